//! Normal-ordered quadratic fields and their brackets.
//!
//! For letters a₁, b₁, a₂, b₂ the bracket of two quadratic fields is
//!
//! ```text
//! [:a₁b₁:(z), :a₂b₂:(w)] = ( ⟨a₁,b₂⟩:b₁a₂: − ⟨a₁,a₂⟩:b₁b₂: + ⟨b₁,a₂⟩:a₁b₂: − ⟨b₁,b₂⟩:a₁a₂: )(w) δ(z−w)
//!                        + ( ⟨a₁,b₂⟩⟨b₁,a₂⟩ − ⟨a₁,a₂⟩⟨b₁,b₂⟩ ) ∂_w δ(z−w)
//! ```
//!
//! extended bilinearly. Iterated brackets keep every field at the innermost
//! variable, so a chain result is indexed only by which δ factors carry a
//! derivative.

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::cliffspace::{pair_value, AlgebraKind, Letter, LetterSum};
use crate::scalars::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("ad chains take 1 to 4 operators, got {0}")]
    ChainLength(usize),
}

/// A combination of normal-ordered products `:ab:` with `a < b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct QuadField {
    terms: BTreeMap<(Letter, Letter), Scalar>,
}

impl QuadField {
    pub fn zero() -> Self {
        QuadField::default()
    }

    /// `coeff · :ab:`, canonicalized.
    pub fn pair(a: Letter, b: Letter, coeff: Scalar) -> Self {
        let mut f = QuadField::zero();
        f.add_pair(a, b, &coeff);
        f
    }

    pub fn add_pair(&mut self, a: Letter, b: Letter, coeff: &Scalar) {
        self.add_pair_signed(a, b, coeff, 1);
    }

    fn add_pair_signed(&mut self, a: Letter, b: Letter, coeff: &Scalar, sign: i8) {
        if a == b || sign == 0 || coeff.is_zero() {
            return;
        }
        let (key, sign) = if a < b {
            ((a, b), sign)
        } else {
            ((b, a), -sign)
        };
        let e = self.terms.entry(key).or_default();
        e.add_signed(coeff, sign);
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Letter, Letter), &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, a: Letter, b: Letter) -> Scalar {
        match self.terms.get(&(a.min(b), a.max(b))) {
            Some(c) if a < b => c.clone(),
            Some(c) => -c,
            None => Scalar::zero(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> QuadField {
        if s.is_zero() {
            return QuadField::zero();
        }
        QuadField {
            terms: self.terms.iter().map(|(k, c)| (*k, c * s)).collect(),
        }
    }

    /// Drops every product containing c or c*.
    pub fn without_c(&self) -> QuadField {
        QuadField {
            terms: self
                .terms
                .iter()
                .filter(|((a, b), _)| !a.is_c() && !b.is_c())
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.terms.keys().flat_map(|(a, b)| [*a, *b])
    }
}

impl Add<&QuadField> for &QuadField {
    type Output = QuadField;
    fn add(self, rhs: &QuadField) -> QuadField {
        let mut out = self.clone();
        for ((a, b), c) in &rhs.terms {
            out.add_pair(*a, *b, c);
        }
        out
    }
}

impl Sub<&QuadField> for &QuadField {
    type Output = QuadField;
    fn sub(self, rhs: &QuadField) -> QuadField {
        let mut out = self.clone();
        for ((a, b), c) in &rhs.terms {
            out.add_pair_signed(*a, *b, c, -1);
        }
        out
    }
}

impl Neg for &QuadField {
    type Output = QuadField;
    fn neg(self) -> QuadField {
        QuadField {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct QuadTerm {
    pair: [Letter; 2],
    coeff: Scalar,
}

impl Serialize for QuadField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.terms.iter().map(|((a, b), c)| QuadTerm {
            pair: [*a, *b],
            coeff: c.clone(),
        }))
    }
}

impl<'de> Deserialize<'de> for QuadField {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let mut f = QuadField::zero();
        for t in Vec::<QuadTerm>::deserialize(d)? {
            f.add_pair(t.pair[0], t.pair[1], &t.coeff);
        }
        Ok(f)
    }
}

/// Bilinear expansion of `:a(z)b(z):` for letter combinations a, b.
pub fn normal_pair(a: &LetterSum, b: &LetterSum) -> QuadField {
    let mut f = QuadField::zero();
    for (x, cx) in a.terms() {
        for (y, cy) in b.terms() {
            f.add_pair(*x, *y, &(cx * cy));
        }
    }
    f
}

/// Result of a two-variable bracket: `delta_part(w) δ(z−w) + ddelta_scalar ∂_w δ(z−w) c̸`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LocalBracket {
    pub delta_part: QuadField,
    pub ddelta_scalar: Scalar,
}

impl LocalBracket {
    pub fn is_zero(&self) -> bool {
        self.delta_part.is_zero() && self.ddelta_scalar.is_zero()
    }

    pub fn sub(&self, other: &LocalBracket) -> LocalBracket {
        LocalBracket {
            delta_part: &self.delta_part - &other.delta_part,
            ddelta_scalar: &self.ddelta_scalar - &other.ddelta_scalar,
        }
    }
}

pub fn bracket(a: &QuadField, b: &QuadField, kind: AlgebraKind) -> LocalBracket {
    let fam = kind.family();
    let p = |x: Letter, y: Letter| pair_value(fam, x, y);
    let mut delta = QuadField::zero();
    let mut dd = Scalar::zero();
    for (&(a1, b1), c1) in &a.terms {
        for (&(a2, b2), c2) in &b.terms {
            let (p_a1b2, p_a1a2, p_b1a2, p_b1b2) = (p(a1, b2), p(a1, a2), p(b1, a2), p(b1, b2));
            if p_a1b2 == 0 && p_a1a2 == 0 && p_b1a2 == 0 && p_b1b2 == 0 {
                continue;
            }
            let c = c1 * c2;
            delta.add_pair_signed(b1, a2, &c, p_a1b2);
            delta.add_pair_signed(b1, b2, &c, -p_a1a2);
            delta.add_pair_signed(a1, b2, &c, p_b1a2);
            delta.add_pair_signed(a1, a2, &c, -p_b1b2);
            dd.add_signed(&c, p_a1b2 * p_b1a2 - p_a1a2 * p_b1b2);
        }
    }
    LocalBracket {
        delta_part: delta,
        ddelta_scalar: dd,
    }
}

/// Iterated brackets `ad A_k(z_k) ⋯ ad A_2(z_2) T(z_1)`.
///
/// Keys are derivative flags `(d_2, …, d_k)`; flag `d_i = 1` marks the factor
/// `∂δ(z_i − z_1)`. The value at a key is the field part at `z_1` and the
/// central scalar (a derivative term can only be produced by the last
/// bracket, since brackets against a scalar vanish).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AdChainResult {
    entries: BTreeMap<Vec<u8>, (QuadField, Scalar)>,
}

impl AdChainResult {
    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<u8>, &(QuadField, Scalar))> {
        self.entries.iter()
    }

    pub fn get(&self, flags: &[u8]) -> Option<&(QuadField, Scalar)> {
        self.entries.get(flags)
    }

    /// Drops c-products from every field slot.
    pub fn without_c(&self) -> AdChainResult {
        let mut out = AdChainResult::default();
        for (k, (f, c)) in &self.entries {
            out.insert(k.clone(), f.without_c(), c.clone());
        }
        out
    }

    fn insert(&mut self, flags: Vec<u8>, field: QuadField, central: Scalar) {
        if !field.is_zero() || !central.is_zero() {
            self.entries.insert(flags, (field, central));
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ChainEntry {
    flags: Vec<u8>,
    field: QuadField,
    central: Scalar,
}

impl Serialize for AdChainResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.entries.iter().map(|(k, (f, c))| ChainEntry {
            flags: k.clone(),
            field: f.clone(),
            central: c.clone(),
        }))
    }
}

impl<'de> Deserialize<'de> for AdChainResult {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let mut out = AdChainResult::default();
        for e in Vec::<ChainEntry>::deserialize(d)? {
            out.insert(e.flags, e.field, e.central);
        }
        Ok(out)
    }
}

/// `operators` are listed outermost first, i.e. `[A_k, …, A_2]`.
pub fn ad_chain(
    operators: &[QuadField],
    target: &QuadField,
    kind: AlgebraKind,
) -> Result<AdChainResult, FieldError> {
    if operators.is_empty() || operators.len() > 4 {
        return Err(FieldError::ChainLength(operators.len()));
    }
    let mut cur = AdChainResult::default();
    cur.insert(Vec::new(), target.clone(), Scalar::zero());
    for op in operators.iter().rev() {
        let mut next = AdChainResult::default();
        for (flags, (field, _central)) in &cur.entries {
            // A purely central slot brackets to zero.
            if field.is_zero() {
                continue;
            }
            let b = bracket(op, field, kind);
            let mut f0 = flags.clone();
            f0.push(0);
            next.insert(f0, b.delta_part, Scalar::zero());
            let mut f1 = flags.clone();
            f1.push(1);
            next.insert(f1, QuadField::zero(), b.ddelta_scalar);
        }
        cur = next;
    }
    Ok(cur)
}
