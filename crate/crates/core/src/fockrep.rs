//! The fermionic Fock space and exact actions of quadratic mode components.
//!
//! A basis state is a sorted list of creation entries `a(m)` with `m < 0`.
//! Entries are packed into `u32` keys `(level << 16) | letter code` where
//! `m = −(2·level + 1)/2`, so the numeric key order is (mode descending,
//! letter order). Normal-ordered quadratic mode components act with finite
//! results on every state, so nothing here truncates.
//!
//! The c and c* oscillators are not part of the space; operators built from
//! those letters act as zero.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::cliffspace::{AlgebraKind, Family, Letter, LetterError};
use crate::fieldcalc::{bracket, LocalBracket, QuadField};
use crate::mrycheck::{expected_bracket, FieldAssignment, GeneratorSymbol, RelationTable};
use crate::rational::Rational;
use crate::report::StateResidual;
use crate::scalars::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FockError {
    #[error("mode `{0}` is not a half-integer")]
    NotHalfInteger(String),
    #[error("entry {0} has a non-negative mode")]
    NotCreation(String),
    #[error("letter {0} has no oscillators in the Fock space")]
    NoOscillator(Letter),
    #[error(transparent)]
    Letter(#[from] LetterError),
}

/// A half-integer mode, stored as twice its value (always odd).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mode {
    twice: i32,
}

impl Mode {
    pub fn from_twice(twice: i32) -> Result<Self, FockError> {
        if twice % 2 == 0 {
            return Err(FockError::NotHalfInteger(format!("{twice}/2")));
        }
        Ok(Mode { twice })
    }

    /// `numer/2`; `numer` must be odd.
    pub fn half(numer: i32) -> Self {
        Mode::from_twice(numer).expect("odd numerator")
    }

    pub fn twice(&self) -> i32 {
        self.twice
    }

    pub fn value(&self) -> Rational {
        Rational::new(self.twice.into(), 2)
    }

    pub fn is_creation(&self) -> bool {
        self.twice < 0
    }

    fn level(&self) -> u32 {
        ((self.twice.unsigned_abs()) - 1) / 2
    }

    fn from_level(level: u32) -> Mode {
        Mode {
            twice: -(2 * level as i32 + 1),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2", self.twice)
    }
}

impl FromStr for Mode {
    type Err = FockError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let r: Rational = s
            .parse()
            .map_err(|_| FockError::NotHalfInteger(s.to_string()))?;
        let twice = (&r * &Rational::from_int(2))
            .to_i64()
            .ok_or_else(|| FockError::NotHalfInteger(s.to_string()))?;
        Mode::from_twice(twice as i32)
    }
}

type Keys = SmallVec<[u32; 8]>;

fn key(letter: Letter, level: u32) -> u32 {
    (level << 16) | u32::from(letter.code())
}

fn key_letter(k: u32) -> Letter {
    Letter::from_code((k & 0xffff) as u16)
}

fn key_level(k: u32) -> u32 {
    k >> 16
}

/// A basis state: creation entries in canonical order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FockState {
    keys: Keys,
}

impl FockState {
    pub fn vacuum() -> Self {
        FockState::default()
    }

    /// The state `a₁(m₁) a₂(m₂) ⋯ |0⟩` written in canonical order, with the
    /// sign picked up by sorting; `None` when an entry repeats.
    pub fn from_entries(entries: &[(Letter, Mode)]) -> Result<Option<(i8, FockState)>, FockError> {
        let mut state = FockState::vacuum();
        let mut sign = 1i8;
        // Apply right to left so the leftmost letter acts last.
        for &(l, m) in entries.iter().rev() {
            if !m.is_creation() {
                return Err(FockError::NotCreation(format!("{l}({m})")));
            }
            if l.is_c() {
                return Err(FockError::NoOscillator(l));
            }
            match create(&state.keys, l, m.level()) {
                Some((s, keys)) => {
                    sign *= s;
                    state = FockState { keys };
                }
                None => return Ok(None),
            }
        }
        Ok(Some((sign, state)))
    }

    pub fn entries(&self) -> Vec<(Letter, Mode)> {
        self.keys
            .iter()
            .map(|&k| (key_letter(k), Mode::from_level(key_level(k))))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn is_vacuum(&self) -> bool {
        self.keys.is_empty()
    }

    /// Twice the total energy Σ|m|.
    pub fn energy_twice(&self) -> u32 {
        self.keys.iter().map(|&k| 2 * key_level(k) + 1).sum()
    }

    pub fn energy(&self) -> Rational {
        Rational::new(self.energy_twice().into(), 2)
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.keys.is_empty() {
            return f.write_str("|0>");
        }
        for (l, m) in self.entries() {
            write!(f, "{l}({m})")?;
        }
        f.write_str("|0>")
    }
}

impl fmt::Debug for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for FockState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(
            self.entries()
                .into_iter()
                .map(|(l, m)| (l.to_string(), m.to_string())),
        )
    }
}

impl<'de> Deserialize<'de> for FockState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = Vec::<(String, String)>::deserialize(d)?;
        let mut entries = Vec::with_capacity(raw.len());
        for (l, m) in raw {
            entries.push((
                l.parse::<Letter>().map_err(D::Error::custom)?,
                m.parse::<Mode>().map_err(D::Error::custom)?,
            ));
        }
        match FockState::from_entries(&entries).map_err(D::Error::custom)? {
            Some((1, s)) => Ok(s),
            _ => Err(D::Error::custom(
                "entries must be distinct and in canonical order",
            )),
        }
    }
}

/// Inserts `letter(−(2·level+1)/2)`; `None` on fermionic exclusion.
fn create(keys: &[u32], letter: Letter, level: u32) -> Option<(i8, Keys)> {
    let k = key(letter, level);
    match keys.binary_search(&k) {
        Ok(_) => None,
        Err(pos) => {
            let mut out: Keys = SmallVec::with_capacity(keys.len() + 1);
            out.extend_from_slice(&keys[..pos]);
            out.push(k);
            out.extend_from_slice(&keys[pos..]);
            Some((parity(pos), out))
        }
    }
}

fn parity(pos: usize) -> i8 {
    if pos.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `letter(m)` on a basis state, `m` given as twice its value. All nonzero
/// pairings are 1, so the result is a signed basis state or zero.
fn apply_letter_keys(
    family: Family,
    letter: Letter,
    twice: i32,
    keys: &[u32],
) -> Option<(i8, Keys)> {
    if letter.is_c() {
        return None;
    }
    if twice < 0 {
        return create(keys, letter, ((-twice) as u32 - 1) / 2);
    }
    let partner = letter.partner(family)?;
    let k = key(partner, (twice as u32 - 1) / 2);
    let pos = keys.binary_search(&k).ok()?;
    let mut out: Keys = SmallVec::from_slice(keys);
    out.remove(pos);
    Some((parity(pos), out))
}

/// Calls `emit(sign, state)` for every term of `Σ_m :a(m) b(k−m):` on a basis
/// state. Only three families of m contribute: the creation window
/// `m ∈ (k, 0)`, m for which b annihilates an entry while a creates, and m
/// for which a annihilates an entry.
fn apply_pair_keys(
    family: Family,
    a: Letter,
    b: Letter,
    k: i64,
    keys: &[u32],
    mut emit: impl FnMut(i8, Keys),
) {
    if a.is_c() || b.is_c() {
        return;
    }
    let k2 = (2 * k) as i32;
    let mut run = |tm: i32, sign: i8, a_first: bool| {
        let tb = k2 - tm;
        let (first, t1, second, t2) = if a_first {
            (a, tm, b, tb)
        } else {
            (b, tb, a, tm)
        };
        if let Some((s1, mid)) = apply_letter_keys(family, first, t1, keys) {
            if let Some((s2, out)) = apply_letter_keys(family, second, t2, &mid) {
                emit(sign * s1 * s2, out);
            }
        }
    };
    // m < 0 and k − m < 0: both create
    if k < 0 {
        let mut tm = k2 + 1;
        while tm < 0 {
            run(tm, 1, false);
            tm += 2;
        }
    }
    let pb = b.partner(family);
    let pa = a.partner(family);
    for &e in keys {
        let l = key_letter(e);
        let te = -(2 * key_level(e) as i32 + 1);
        // b(k−m) annihilates the entry, a(m) creates
        if Some(l) == pb {
            let tm = k2 + te;
            if tm < 0 {
                run(tm, 1, false);
            }
        }
        // m > 0: :a(m)b(k−m): = −b(k−m)a(m)
        if Some(l) == pa {
            run(-te, -1, true);
        }
    }
}

/// A finite Scalar-combination of basis states.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StateVector {
    terms: BTreeMap<FockState, Scalar>,
}

impl StateVector {
    pub fn zero() -> Self {
        StateVector::default()
    }

    pub fn basis(state: FockState) -> Self {
        let mut v = StateVector::zero();
        v.terms.insert(state, Scalar::one());
        v
    }

    pub fn vacuum() -> Self {
        StateVector::basis(FockState::vacuum())
    }

    pub fn add_term(&mut self, state: FockState, coeff: &Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(state) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(coeff.clone());
            }
        }
    }

    fn add_signed(&mut self, state: FockState, coeff: &Scalar, sign: i8) {
        match sign {
            1 => self.add_term(state, coeff),
            -1 => self.add_term(state, &-coeff),
            _ => {}
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, state: &FockState) -> Scalar {
        self.terms.get(state).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FockState, &Scalar)> {
        self.terms.iter()
    }

    pub fn scale(&self, s: &Scalar) -> StateVector {
        let mut out = StateVector::zero();
        for (st, c) in &self.terms {
            out.add_term(st.clone(), &(c * s));
        }
        out
    }

    pub fn add(&self, other: &StateVector) -> StateVector {
        let mut out = self.clone();
        for (st, c) in &other.terms {
            out.add_term(st.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &StateVector) -> StateVector {
        let mut out = self.clone();
        for (st, c) in &other.terms {
            out.add_term(st.clone(), &-c);
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct VectorTerm {
    state: FockState,
    coeff: Scalar,
}

impl Serialize for StateVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.terms.iter().map(|(st, c)| VectorTerm {
            state: st.clone(),
            coeff: c.clone(),
        }))
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let mut v = StateVector::zero();
        for t in Vec::<VectorTerm>::deserialize(d)? {
            v.add_term(t.state, &t.coeff);
        }
        Ok(v)
    }
}

/// The z^{−k−1} coefficient `Σ_m :a(m)b(k−m):` of a quadratic field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeComponent {
    pub source: QuadField,
    pub k: i64,
}

impl ModeComponent {
    pub fn new(source: QuadField, k: i64) -> Self {
        ModeComponent { source, k }
    }
}

pub fn apply_letter(
    kind: AlgebraKind,
    letter: Letter,
    mode: Mode,
    v: &StateVector,
) -> Result<StateVector, FockError> {
    letter.validate(kind)?;
    let mut out = StateVector::zero();
    for (st, c) in &v.terms {
        if let Some((s, keys)) = apply_letter_keys(kind.family(), letter, mode.twice, &st.keys) {
            out.add_signed(FockState { keys }, c, s);
        }
    }
    Ok(out)
}

fn apply_field(family: Family, field: &QuadField, k: i64, v: &StateVector) -> StateVector {
    let mut out = StateVector::zero();
    for (st, c) in &v.terms {
        for (&(a, b), f) in field.terms() {
            let coeff = c * f;
            apply_pair_keys(family, a, b, k, &st.keys, |s, keys| {
                out.add_signed(FockState { keys }, &coeff, s)
            });
        }
    }
    out
}

pub fn apply_mode_component(kind: AlgebraKind, op: &ModeComponent, v: &StateVector) -> StateVector {
    apply_field(kind.family(), &op.source, op.k, v)
}

/// `:a b:_k` with the letters in the given (not necessarily canonical)
/// order, for checking the ordering antisymmetry.
pub fn apply_ordered_pair(
    kind: AlgebraKind,
    a: Letter,
    b: Letter,
    k: i64,
    v: &StateVector,
) -> StateVector {
    let mut out = StateVector::zero();
    for (st, c) in &v.terms {
        apply_pair_keys(kind.family(), a, b, k, &st.keys, |s, keys| {
            out.add_signed(FockState { keys }, c, s)
        });
    }
    out
}

/// Operators built from mode components, evaluated exactly on vectors.
#[derive(Debug, Clone)]
pub enum Operator {
    Mode(ModeComponent),
    /// A multiple of the identity.
    Scalar(Scalar),
    Sum(Vec<Operator>),
    Commutator(Box<Operator>, Box<Operator>),
}

impl Operator {
    pub fn mode(field: &QuadField, k: i64) -> Operator {
        Operator::Mode(ModeComponent::new(field.clone(), k))
    }

    pub fn commutator(a: Operator, b: Operator) -> Operator {
        Operator::Commutator(Box::new(a), Box::new(b))
    }

    pub fn apply(&self, kind: AlgebraKind, v: &StateVector) -> StateVector {
        match self {
            Operator::Mode(m) => apply_mode_component(kind, m, v),
            Operator::Scalar(s) => v.scale(s),
            Operator::Sum(ops) => ops
                .iter()
                .fold(StateVector::zero(), |acc, op| acc.add(&op.apply(kind, v))),
            Operator::Commutator(a, b) => {
                let ab = a.apply(kind, &b.apply(kind, v));
                let ba = b.apply(kind, &a.apply(kind, v));
                ab.sub(&ba)
            }
        }
    }
}

/// The operator `(delta_part)_{k+l} + k δ_{k,−l} ddelta` that a local bracket
/// predicts for `[G_k, H_l]`.
pub fn mode_translation(b: &LocalBracket, k: i64, l: i64) -> Operator {
    let mut terms = vec![Operator::mode(&b.delta_part, k + l)];
    if k == -l && k != 0 {
        terms.push(Operator::Scalar(
            b.ddelta_scalar.scale_rational(&Rational::from_int(k)),
        ));
    }
    Operator::Sum(terms)
}

/// Where the expected value of a commutator comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    /// The presentation's relations, falling back to the symbolic bracket
    /// for pairs no relation states directly.
    RelationTable,
    /// The symbolic bracket of the two fields.
    Symbolic,
}

fn expected_local(
    fields: &FieldAssignment,
    table: &RelationTable,
    g: GeneratorSymbol,
    h: GeneratorSymbol,
    how: Expectation,
) -> LocalBracket {
    let symbolic = || {
        bracket(
            fields.field(g).expect("non-central"),
            fields.field(h).expect("non-central"),
            fields.kind,
        )
    };
    match how {
        Expectation::RelationTable => {
            expected_bracket(table, fields, g, h).unwrap_or_else(symbolic)
        }
        Expectation::Symbolic => symbolic(),
    }
}

/// `(G_k H_l − H_l G_k − expected) v` for every test state `v`.
pub fn commutator_check(
    fields: &FieldAssignment,
    g: GeneratorSymbol,
    k: i64,
    h: GeneratorSymbol,
    l: i64,
    states: &[FockState],
    how: Expectation,
) -> Vec<StateVector> {
    let kind = fields.kind;
    let table = RelationTable::new(kind);
    let lhs = Operator::commutator(
        Operator::mode(fields.field(g).expect("non-central"), k),
        Operator::mode(fields.field(h).expect("non-central"), l),
    );
    let rhs = mode_translation(&expected_local(fields, &table, g, h, how), k, l);
    states
        .iter()
        .map(|st| {
            let v = StateVector::basis(st.clone());
            lhs.apply(kind, &v).sub(&rhs.apply(kind, &v))
        })
        .collect()
}

/// `ad X(±α_i, m_0) ⋯ ad X(±α_i, m_{a−1}) X(±α_j, m_a)` on each state; `modes`
/// lists the outermost operator first and the target last.
pub fn serre_check_fock(
    fields: &FieldAssignment,
    i: usize,
    j: usize,
    sign: i64,
    modes: &[i64],
    states: &[FockState],
) -> Vec<StateVector> {
    let kind = fields.kind;
    let xi = fields
        .field(GeneratorSymbol::x(i, sign))
        .expect("index in range");
    let xj = fields
        .field(GeneratorSymbol::x(j, sign))
        .expect("index in range");
    let (target_mode, ad_modes) = modes.split_last().expect("at least the target mode");
    let mut op = Operator::mode(xj, *target_mode);
    for &m in ad_modes.iter().rev() {
        op = Operator::commutator(Operator::mode(xi, m), op);
    }
    states
        .iter()
        .map(|st| op.apply(kind, &StateVector::basis(st.clone())))
        .collect()
}

/// All states of energy at most `max_energy`, ordered by (energy, entries).
pub fn enumerate_states(kind: AlgebraKind, max_energy: &Rational) -> Vec<FockState> {
    let Some(max_twice) = (max_energy * &Rational::from_int(2)).floor_i64() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for e in 0..=max_twice.max(-1) {
        states_of_energy(kind, e as u32, &mut out);
    }
    out
}

/// The first `cap` states of [`enumerate_states`], without enumerating the
/// rest.
pub fn test_states(kind: AlgebraKind, max_energy: &Rational, cap: usize) -> Vec<FockState> {
    let max_twice = (max_energy * &Rational::from_int(2))
        .floor_i64()
        .unwrap_or(-1);
    let mut out = Vec::new();
    let mut e = 0;
    while e <= max_twice && out.len() < cap {
        states_of_energy(kind, e as u32, &mut out);
        e += 1;
    }
    out.truncate(cap);
    out
}

fn states_of_energy(kind: AlgebraKind, energy_twice: u32, out: &mut Vec<FockState>) {
    let letters = Letter::fock_letters(kind);
    let max_level = energy_twice.saturating_sub(1) / 2;
    let mut slots: Vec<u32> = Vec::new();
    for level in 0..=max_level {
        for &l in &letters {
            slots.push(key(l, level));
        }
    }
    slots.sort_unstable();
    let start = out.len();
    let mut cur: Keys = SmallVec::new();
    fill(&slots, 0, energy_twice, &mut cur, out);
    out[start..].sort();
}

fn fill(slots: &[u32], from: usize, remaining: u32, cur: &mut Keys, out: &mut Vec<FockState>) {
    if remaining == 0 {
        out.push(FockState { keys: cur.clone() });
        return;
    }
    for idx in from..slots.len() {
        let cost = 2 * key_level(slots[idx]) + 1;
        if cost > remaining {
            continue;
        }
        cur.push(slots[idx]);
        fill(slots, idx + 1, remaining - cost, cur, out);
        cur.pop();
    }
}

/// Dense ids for states met during a batch of checks.
#[derive(Default)]
struct Interner {
    ids: FxHashMap<Keys, u32>,
    states: Vec<Keys>,
}

impl Interner {
    fn id(&mut self, keys: Keys) -> u32 {
        if let Some(&i) = self.ids.get(&keys) {
            return i;
        }
        let i = self.states.len() as u32;
        self.states.push(keys.clone());
        self.ids.insert(keys, i);
        i
    }
}

/// Memoized integer actions of single products `:ab:_k` on interned states.
struct PairCache {
    family: Family,
    atoms: Vec<(Letter, Letter)>,
    bound: i64,
    interner: Interner,
    spans: FxHashMap<u64, (u32, u32)>,
    arena: Vec<(u32, i32)>,
    scratch: Vec<(u32, i32)>,
}

impl PairCache {
    fn new(family: Family, atoms: Vec<(Letter, Letter)>, bound: i64) -> Self {
        PairCache {
            family,
            atoms,
            bound,
            interner: Interner::default(),
            spans: FxHashMap::default(),
            arena: Vec::new(),
            scratch: Vec::new(),
        }
    }

    fn slot(&self, atom: usize, k: i64) -> u64 {
        (atom as u64) * (2 * self.bound as u64 + 1) + (k + self.bound) as u64
    }

    /// Span of `:ab:_k |state⟩` in the arena.
    fn ensure(&mut self, atom: usize, k: i64, state: u32) -> (u32, u32) {
        let key = (self.slot(atom, k) << 32) | u64::from(state);
        if let Some(&span) = self.spans.get(&key) {
            return span;
        }
        let (a, b) = self.atoms[atom];
        let keys = self.interner.states[state as usize].clone();
        let mut produced: SmallVec<[(Keys, i8); 8]> = SmallVec::new();
        apply_pair_keys(self.family, a, b, k, &keys, |s, out| {
            produced.push((out, s))
        });
        let start = self.arena.len() as u32;
        for (out, s) in produced {
            let id = self.interner.id(out);
            self.arena.push((id, i32::from(s)));
        }
        let span = (start, self.arena.len() as u32 - start);
        self.spans.insert(key, span);
        span
    }

    /// Integer vector of `:p:_k :q:_l − :q:_l :p:_k` on `state`, merged and
    /// pruned into `self.scratch`.
    fn commutator(&mut self, p: usize, k: i64, q: usize, l: i64, state: u32) {
        self.scratch.clear();
        for (outer, ko, inner, ki, sign) in [(p, k, q, l, 1), (q, l, p, k, -1)] {
            let (s1, n1) = self.ensure(inner, ki, state);
            for idx in s1..s1 + n1 {
                let (w, c1) = self.arena[idx as usize];
                let (s2, n2) = self.ensure(outer, ko, w);
                for jdx in s2..s2 + n2 {
                    let (u, c2) = self.arena[jdx as usize];
                    self.scratch.push((u, sign * c1 * c2));
                }
            }
        }
        self.scratch.sort_unstable_by_key(|&(u, _)| u);
        let mut merged: Vec<(u32, i32)> = Vec::with_capacity(self.scratch.len());
        for &(u, c) in &self.scratch {
            match merged.last_mut() {
                Some(last) if last.0 == u => last.1 += c,
                _ => merged.push((u, c)),
            }
        }
        merged.retain(|&(_, c)| c != 0);
        self.scratch = merged;
    }
}

/// One generator-mode commutator to check: `[G_k, H_l]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CommutatorCase {
    pub g: GeneratorSymbol,
    pub k: i64,
    pub h: GeneratorSymbol,
    pub l: i64,
}

/// Residuals of a batch of commutator checks against both expectations,
/// sharing the operator products.
#[derive(Debug, Clone, Default)]
pub struct BatchResiduals {
    pub table: Vec<StateResidual>,
    pub symbolic: Vec<StateResidual>,
}

/// Runs [`commutator_check`] for many cases over the same states. The
/// products of single `:ab:` components are computed in integers with
/// memoization and only then combined with the field coefficients; the
/// result is identical to evaluating the operators directly.
pub fn commutator_batch(
    fields: &FieldAssignment,
    cases: &[CommutatorCase],
    states: &[FockState],
    chunk: usize,
) -> Vec<BatchResiduals> {
    use rayon::prelude::*;
    let chunk = chunk.max(1);
    let kind = fields.kind;
    let table = RelationTable::new(kind);
    let mut atoms: Vec<(Letter, Letter)> = Vec::new();
    let mut atom_index: FxHashMap<(Letter, Letter), usize> = FxHashMap::default();
    let mut decompose = |f: &QuadField| -> Vec<(usize, Scalar)> {
        f.terms()
            .map(|(&pair, c)| {
                let idx = *atom_index.entry(pair).or_insert_with(|| {
                    atoms.push(pair);
                    atoms.len() - 1
                });
                (idx, c.clone())
            })
            .collect()
    };
    let gens = GeneratorSymbol::all(kind);
    let decomposed: FxHashMap<GeneratorSymbol, Vec<(usize, Scalar)>> = gens
        .iter()
        .map(|&g| (g, decompose(fields.field(g).expect("non-central"))))
        .collect();
    let bound = cases
        .iter()
        .map(|c| c.k.abs().max(c.l.abs()))
        .max()
        .unwrap_or(0);
    let expected: Vec<(Operator, Operator)> = cases
        .iter()
        .map(|c| {
            (
                mode_translation(
                    &expected_local(fields, &table, c.g, c.h, Expectation::RelationTable),
                    c.k,
                    c.l,
                ),
                mode_translation(
                    &expected_local(fields, &table, c.g, c.h, Expectation::Symbolic),
                    c.k,
                    c.l,
                ),
            )
        })
        .collect();

    let per_chunk: Vec<Vec<BatchResiduals>> = states
        .par_chunks(chunk)
        .enumerate()
        .map(|(ci, chunk_states)| {
            let mut cache = PairCache::new(kind.family(), atoms.clone(), bound);
            let ids: Vec<u32> = chunk_states
                .iter()
                .map(|s| cache.interner.id(s.keys.clone()))
                .collect();
            let mut out = vec![BatchResiduals::default(); cases.len()];
            for (case_idx, case) in cases.iter().enumerate() {
                let gp = &decomposed[&case.g];
                let hp = &decomposed[&case.h];
                for (si, &sid) in ids.iter().enumerate() {
                    let mut acc: FxHashMap<u32, Scalar> = FxHashMap::default();
                    for (p, cp) in gp {
                        for (q, cq) in hp {
                            cache.commutator(*p, case.k, *q, case.l, sid);
                            if cache.scratch.is_empty() {
                                continue;
                            }
                            let cpq = cp * cq;
                            for &(u, n) in &cache.scratch {
                                acc.entry(u)
                                    .or_default()
                                    .add_product(&cpq, &Scalar::from_int(n.into()));
                            }
                        }
                    }
                    let mut lhs = StateVector::zero();
                    for (u, c) in acc {
                        lhs.add_term(
                            FockState {
                                keys: cache.interner.states[u as usize].clone(),
                            },
                            &c,
                        );
                    }
                    let v = StateVector::basis(chunk_states[si].clone());
                    let state_index = ci * chunk + si;
                    let (et, es) = &expected[case_idx];
                    let rt = lhs.sub(&et.apply(kind, &v));
                    if !rt.is_zero() {
                        out[case_idx].table.push(StateResidual {
                            state_index,
                            vector: rt,
                        });
                    }
                    let rs = lhs.sub(&es.apply(kind, &v));
                    if !rs.is_zero() {
                        out[case_idx].symbolic.push(StateResidual {
                            state_index,
                            vector: rs,
                        });
                    }
                }
            }
            out
        })
        .collect();

    let mut merged = vec![BatchResiduals::default(); cases.len()];
    for chunk_out in per_chunk {
        for (m, c) in merged.iter_mut().zip(chunk_out) {
            m.table.extend(c.table);
            m.symbolic.extend(c.symbolic);
        }
    }
    merged
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cliffspace::Ghost;
    use crate::mrycheck::CPolicy;

    fn e(i: usize) -> Letter {
        Letter::eps(i)
    }

    fn state(entries: &[(Letter, i32)]) -> FockState {
        let es: Vec<_> = entries.iter().map(|&(l, t)| (l, Mode::half(t))).collect();
        let (s, st) = FockState::from_entries(&es).unwrap().unwrap();
        assert_eq!(s, 1);
        st
    }

    #[test]
    fn creation_on_vacuum() {
        let kind = AlgebraKind::a_odd(3).unwrap();
        let v = apply_letter(kind, e(1), Mode::half(-1), &StateVector::vacuum()).unwrap();
        assert_eq!(v, StateVector::basis(state(&[(e(1), -1)])));
        // exclusion
        let w = apply_letter(kind, e(1), Mode::half(-1), &v).unwrap();
        assert!(w.is_zero());
    }

    #[test]
    fn annihilation_uses_pairing() {
        let kind = AlgebraKind::a_odd(3).unwrap();
        let v = StateVector::basis(state(&[(e(1).star(), -1)]));
        assert_eq!(
            apply_letter(kind, e(1), Mode::half(1), &v).unwrap(),
            StateVector::vacuum()
        );
        assert!(apply_letter(kind, e(2), Mode::half(1), &v)
            .unwrap()
            .is_zero());
        let d = AlgebraKind::d(2).unwrap();
        let g = Letter::ghost(Ghost::E);
        let v = StateVector::basis(state(&[(g, -1)]));
        assert_eq!(
            apply_letter(d, g, Mode::half(1), &v).unwrap(),
            StateVector::vacuum()
        );
        assert!(
            apply_letter(AlgebraKind::a_even(2).unwrap(), g, Mode::half(1), &v)
                .unwrap()
                .is_zero()
        );
    }

    #[test]
    fn ordering_signs() {
        // e1(−1/2) e2(−1/2)|0⟩ is canonical; the reverse product is its negative.
        let es = [(e(2), Mode::half(-1)), (e(1), Mode::half(-1))];
        let (s, st) = FockState::from_entries(&es).unwrap().unwrap();
        assert_eq!(s, -1);
        assert_eq!(st, state(&[(e(1), -1), (e(2), -1)]));
        // lower modes sort later
        let es = [(e(1), Mode::half(-3)), (e(2), Mode::half(-1))];
        assert_eq!(FockState::from_entries(&es).unwrap().unwrap().0, -1);
    }

    #[test]
    fn mode_component_examples() {
        let kind = AlgebraKind::a_odd(3).unwrap();
        let fa = FieldAssignment::new(kind, CPolicy::Eliminate);
        let h3 = fa.field(GeneratorSymbol::H(3)).unwrap();
        assert!(apply_mode_component(
            kind,
            &ModeComponent::new(h3.clone(), 0),
            &StateVector::vacuum()
        )
        .is_zero());
        let x3 = fa.field(GeneratorSymbol::XPlus(3)).unwrap();
        let v = apply_mode_component(
            kind,
            &ModeComponent::new(x3.clone(), -1),
            &StateVector::vacuum(),
        );
        let expect = state(&[(e(3), -1), (Letter::eps_bar(3).star(), -1)]);
        assert_eq!(v, StateVector::basis(expect));
    }

    #[test]
    fn relation_examples() {
        let ao = AlgebraKind::a_odd(3).unwrap();
        let fa = FieldAssignment::new(ao, CPolicy::Eliminate);
        let vac = [FockState::vacuum()];
        let h = GeneratorSymbol::H(3);
        let r = commutator_check(&fa, h, 1, h, -1, &vac, Expectation::RelationTable);
        assert!(r[0].is_zero());
        // the commutator itself is 2·vacuum
        let lhs = Operator::commutator(
            Operator::mode(fa.field(h).unwrap(), 1),
            Operator::mode(fa.field(h).unwrap(), -1),
        );
        assert_eq!(
            lhs.apply(ao, &StateVector::vacuum()),
            StateVector::vacuum().scale(&Scalar::from_int(2))
        );

        let d = AlgebraKind::d(3).unwrap();
        let fd = FieldAssignment::new(d, CPolicy::Eliminate);
        let r = commutator_check(
            &fd,
            GeneratorSymbol::XPlus(0),
            0,
            GeneratorSymbol::XMinus(0),
            0,
            &vac,
            Expectation::RelationTable,
        );
        assert!(r[0].is_zero());
        assert!(commutator_check(&fd, h, 0, h, 0, &[], Expectation::Symbolic).is_empty());
    }

    #[test]
    fn serre_examples() {
        let vac = [FockState::vacuum()];
        let ao = FieldAssignment::new(AlgebraKind::a_odd(3).unwrap(), CPolicy::Eliminate);
        assert!(serre_check_fock(&ao, 1, 3, 1, &[0, 0], &vac)[0].is_zero());
        let ae = FieldAssignment::new(AlgebraKind::a_even(2).unwrap(), CPolicy::Eliminate);
        assert!(serre_check_fock(&ae, 0, 1, 1, &[0, 1, -1], &vac)[0].is_zero());
        let t = AlgebraKind::d4();
        let ft = FieldAssignment::new(t, CPolicy::Eliminate);
        let states = test_states(t, &Rational::from_int(1), 30);
        for r in serre_check_fock(&ft, 1, 2, 1, &[0, 0, 0, 0, -1], &states) {
            assert!(r.is_zero());
        }
    }

    #[test]
    fn enumeration_counts() {
        let kind = AlgebraKind::a_odd(3).unwrap();
        assert_eq!(
            enumerate_states(kind, &Rational::zero()),
            vec![FockState::vacuum()]
        );
        assert_eq!(enumerate_states(kind, &Rational::new(1, 2)).len(), 13);
        let mut prev = 0;
        for e in 0..6 {
            let c = enumerate_states(kind, &Rational::new(e, 2)).len();
            assert!(c >= prev);
            prev = c;
        }
        let all = enumerate_states(kind, &Rational::new(5, 2));
        assert_eq!(
            test_states(kind, &Rational::from_int(4), 100),
            all[..100].to_vec()
        );
        for w in all.windows(2) {
            assert!((w[0].energy(), &w[0]) < (w[1].energy(), &w[1]));
        }
    }

    #[test]
    fn serde_shapes() {
        let st = state(&[(e(1), -1), (Letter::eps_bar(2).star(), -3)]);
        let v = serde_json::to_value(&st).unwrap();
        assert_eq!(v, serde_json::json!([["e1", "-1/2"], ["b2*", "-3/2"]]));
        let back: FockState = serde_json::from_value(v).unwrap();
        assert_eq!(back, st);
        assert_eq!("-3/2".parse::<Mode>().unwrap(), Mode::half(-3));
        assert!("1".parse::<Mode>().is_err());
    }

    #[test]
    fn batch_matches_direct_evaluation() {
        let kind = AlgebraKind::d(2).unwrap();
        let fa = FieldAssignment::new(kind, CPolicy::Eliminate);
        let states = test_states(kind, &Rational::from_int(2), 40);
        let mut cases = Vec::new();
        for g in GeneratorSymbol::all(kind) {
            for h in [
                GeneratorSymbol::XMinus(0),
                GeneratorSymbol::H(2),
                GeneratorSymbol::XPlus(1),
            ] {
                cases.push(CommutatorCase { g, k: 1, h, l: -1 });
            }
        }
        let batch = commutator_batch(&fa, &cases, &states, 16);
        for (c, b) in cases.iter().zip(&batch) {
            assert!(b.table.is_empty() && b.symbolic.is_empty(), "{c:?}");
        }
        // A wrong field coefficient shows up as residuals.
        let bad = fa.perturbed(GeneratorSymbol::H(2));
        let batch = commutator_batch(&bad, &cases, &states, 16);
        assert!(batch.iter().any(|b| !b.table.is_empty()));
    }
}
