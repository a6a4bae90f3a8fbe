//! Algebra kinds, fermionic field letters with their pairing, and the lattice
//! vectors used to realize simple roots.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::rational::Rational;
use crate::scalars::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KindError {
    #[error("{family} requires n >= {min}, got {n}")]
    RankTooSmall {
        family: Family,
        min: usize,
        n: usize,
    },
    #[error("d4-triality is only defined for n = 2, got {0}")]
    TrialityRank(usize),
    #[error("rank {0} is too large")]
    RankTooLarge(usize),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LetterError {
    #[error("malformed letter `{0}`")]
    Malformed(String),
    #[error("letter {letter} is not defined for {kind}")]
    Invalid { letter: Letter, kind: AlgebraKind },
    #[error("root index {index} out of range 0..={n}")]
    RootIndex { index: usize, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "a-odd")]
    AOdd,
    #[serde(rename = "d")]
    D,
    #[serde(rename = "a-even")]
    AEven,
    #[serde(rename = "d4-triality")]
    D4Triality,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::AOdd, Family::D, Family::AEven, Family::D4Triality];

    pub fn name(self) -> &'static str {
        match self {
            Family::AOdd => "a-odd",
            Family::D => "d",
            Family::AEven => "a-even",
            Family::D4Triality => "d4-triality",
        }
    }

    pub fn min_rank(self) -> usize {
        match self {
            Family::AOdd => 3,
            Family::D | Family::AEven | Family::D4Triality => 2,
        }
    }

    pub fn has_ghosts(self) -> bool {
        matches!(self, Family::D | Family::AEven)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = KindError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| KindError::UnknownFamily(s.to_string()))
    }
}

/// Letter indices are stored in a byte, and the Fock layer packs them into
/// eight bits as well.
const MAX_RANK: usize = 60;

/// A family together with a validated rank `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "KindRepr", into = "KindRepr")]
pub struct AlgebraKind {
    family: Family,
    n: usize,
}

#[derive(Serialize, Deserialize)]
struct KindRepr {
    family: Family,
    n: usize,
}

impl TryFrom<KindRepr> for AlgebraKind {
    type Error = KindError;
    fn try_from(r: KindRepr) -> Result<Self, Self::Error> {
        AlgebraKind::new(r.family, r.n)
    }
}

impl From<AlgebraKind> for KindRepr {
    fn from(k: AlgebraKind) -> Self {
        KindRepr {
            family: k.family,
            n: k.n,
        }
    }
}

impl AlgebraKind {
    pub fn new(family: Family, n: usize) -> Result<Self, KindError> {
        if family == Family::D4Triality && n != 2 {
            return Err(KindError::TrialityRank(n));
        }
        if n < family.min_rank() {
            return Err(KindError::RankTooSmall {
                family,
                min: family.min_rank(),
                n,
            });
        }
        if n > MAX_RANK {
            return Err(KindError::RankTooLarge(n));
        }
        Ok(AlgebraKind { family, n })
    }

    pub fn a_odd(n: usize) -> Result<Self, KindError> {
        AlgebraKind::new(Family::AOdd, n)
    }

    pub fn d(n: usize) -> Result<Self, KindError> {
        AlgebraKind::new(Family::D, n)
    }

    pub fn a_even(n: usize) -> Result<Self, KindError> {
        AlgebraKind::new(Family::AEven, n)
    }

    pub fn d4() -> Self {
        AlgebraKind {
            family: Family::D4Triality,
            n: 2,
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Order of the diagram automorphism.
    pub fn r(&self) -> usize {
        match self.family {
            Family::D4Triality => 3,
            _ => 2,
        }
    }

    /// The kinds exercised by the acceptance checks.
    pub fn test_set() -> Vec<AlgebraKind> {
        vec![
            AlgebraKind::a_odd(3).unwrap(),
            AlgebraKind::d(2).unwrap(),
            AlgebraKind::d(3).unwrap(),
            AlgebraKind::a_even(2).unwrap(),
            AlgebraKind::a_even(3).unwrap(),
            AlgebraKind::d4(),
        ]
    }
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} n={}", self.family, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ghost {
    E,
    EBar,
}

/// Declaration order fixes the letter order: ε before ε̄ before ghosts
/// before c.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Species {
    Eps(u8),
    EpsBar(u8),
    Ghost(Ghost),
    C,
}

/// An atomic field symbol. Unstarred letters sort before starred ones.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    starred: bool,
    species: Species,
}

impl Letter {
    pub fn eps(i: usize) -> Self {
        Letter {
            starred: false,
            species: Species::Eps(i as u8),
        }
    }

    pub fn eps_bar(i: usize) -> Self {
        Letter {
            starred: false,
            species: Species::EpsBar(i as u8),
        }
    }

    pub fn c() -> Self {
        Letter {
            starred: false,
            species: Species::C,
        }
    }

    pub fn ghost(g: Ghost) -> Self {
        Letter {
            starred: false,
            species: Species::Ghost(g),
        }
    }

    /// The starred partner. Panics on ghosts, which have no starred form.
    pub fn star(self) -> Self {
        assert!(!self.is_ghost(), "ghost letters cannot be starred");
        Letter {
            starred: true,
            species: self.species,
        }
    }

    pub fn species(&self) -> Species {
        self.species
    }

    pub fn is_starred(&self) -> bool {
        self.starred
    }

    pub fn is_ghost(&self) -> bool {
        matches!(self.species, Species::Ghost(_))
    }

    pub fn is_c(&self) -> bool {
        self.species == Species::C
    }

    pub fn is_valid_for(&self, kind: AlgebraKind) -> bool {
        match self.species {
            Species::Eps(i) | Species::EpsBar(i) => (1..=kind.n()).contains(&(i as usize)),
            Species::Ghost(_) => kind.family().has_ghosts() && !self.starred,
            Species::C => true,
        }
    }

    pub fn validate(&self, kind: AlgebraKind) -> Result<(), LetterError> {
        if self.is_valid_for(kind) {
            Ok(())
        } else {
            Err(LetterError::Invalid {
                letter: *self,
                kind,
            })
        }
    }

    /// A 16-bit code whose numeric order agrees with the letter order.
    pub fn code(&self) -> u16 {
        let (rank, idx) = match self.species {
            Species::Eps(i) => (0u16, i as u16),
            Species::EpsBar(i) => (1, i as u16),
            Species::Ghost(Ghost::E) => (2, 0),
            Species::Ghost(Ghost::EBar) => (2, 1),
            Species::C => (3, 0),
        };
        (u16::from(self.starred) << 15) | (rank << 8) | idx
    }

    pub fn from_code(code: u16) -> Self {
        let starred = code & 0x8000 != 0;
        let idx = (code & 0xff) as u8;
        let species = match (code >> 8) & 0x7f {
            0 => Species::Eps(idx),
            1 => Species::EpsBar(idx),
            2 if idx == 0 => Species::Ghost(Ghost::E),
            2 => Species::Ghost(Ghost::EBar),
            _ => Species::C,
        };
        Letter { starred, species }
    }

    /// The unique letter this one pairs with nontrivially, if any.
    pub fn partner(&self, family: Family) -> Option<Letter> {
        match self.species {
            Species::C => None,
            Species::Ghost(g) => match family {
                Family::D => Some(*self),
                Family::AEven => Some(Letter::ghost(match g {
                    Ghost::E => Ghost::EBar,
                    Ghost::EBar => Ghost::E,
                })),
                _ => None,
            },
            _ => Some(Letter {
                starred: !self.starred,
                species: self.species,
            }),
        }
    }

    /// Every letter of `kind` except the isotropic c, c*, in letter order.
    pub fn fock_letters(kind: AlgebraKind) -> Vec<Letter> {
        let n = kind.n();
        let mut out = Vec::new();
        for starred in [false, true] {
            for i in 1..=n {
                out.push(Letter {
                    starred,
                    species: Species::Eps(i as u8),
                });
            }
            for i in 1..=n {
                out.push(Letter {
                    starred,
                    species: Species::EpsBar(i as u8),
                });
            }
            if !starred && kind.family().has_ghosts() {
                out.push(Letter::ghost(Ghost::E));
                out.push(Letter::ghost(Ghost::EBar));
            }
        }
        out
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.species {
            Species::Eps(i) => write!(f, "e{i}")?,
            Species::EpsBar(i) => write!(f, "b{i}")?,
            Species::Ghost(Ghost::E) => f.write_str("gE")?,
            Species::Ghost(Ghost::EBar) => f.write_str("gEbar")?,
            Species::C => f.write_str("c")?,
        }
        if self.starred {
            f.write_str("*")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Letter {
    type Err = LetterError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LetterError::Malformed(s.to_string());
        let (body, starred) = match s.strip_suffix('*') {
            Some(b) => (b, true),
            None => (s, false),
        };
        let species = match body {
            "c" => Species::C,
            "gE" if !starred => Species::Ghost(Ghost::E),
            "gEbar" if !starred => Species::Ghost(Ghost::EBar),
            _ => {
                let idx = |t: &str| t.parse::<u8>().ok().filter(|&i| i >= 1);
                if let Some(t) = body.strip_prefix('e') {
                    Species::Eps(idx(t).ok_or_else(bad)?)
                } else if let Some(t) = body.strip_prefix('b') {
                    Species::EpsBar(idx(t).ok_or_else(bad)?)
                } else {
                    return Err(bad());
                }
            }
        };
        Ok(Letter { starred, species })
    }
}

impl Serialize for Letter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// ⟨a, b⟩ as a small integer, assuming both letters are valid for the family.
pub fn pair_value(family: Family, a: Letter, b: Letter) -> i8 {
    i8::from(a.partner(family) == Some(b))
}

pub fn pairing(kind: AlgebraKind, a: Letter, b: Letter) -> Result<Scalar, LetterError> {
    a.validate(kind)?;
    b.validate(kind)?;
    Ok(Scalar::from_int(pair_value(kind.family(), a, b).into()))
}

/// A finite linear combination of letters, e.g. β = −γc + ε₁.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LetterSum {
    terms: BTreeMap<Letter, Scalar>,
}

impl LetterSum {
    pub fn new() -> Self {
        LetterSum::default()
    }

    pub fn add(mut self, letter: Letter, coeff: Scalar) -> Self {
        let e = self.terms.entry(letter).or_default();
        *e += &coeff;
        if e.is_zero() {
            self.terms.remove(&letter);
        }
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Letter, &Scalar)> {
        self.terms.iter()
    }

    /// Stars every letter.
    pub fn star(&self) -> LetterSum {
        LetterSum {
            terms: self
                .terms
                .iter()
                .map(|(l, c)| (l.star(), c.clone()))
                .collect(),
        }
    }
}

impl From<Letter> for LetterSum {
    fn from(l: Letter) -> Self {
        LetterSum::new().add(l, Scalar::one())
    }
}

/// Lattice directions. `Eps` allows index n+1 for the D₄ realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    C,
    D,
    Eps(u8),
    EpsBar(u8),
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Vector {
    terms: BTreeMap<Direction, Scalar>,
}

impl Vector {
    pub fn zero() -> Self {
        Vector::default()
    }

    pub fn basis(d: Direction) -> Self {
        Vector::zero().plus(d, Scalar::one())
    }

    pub fn plus(mut self, d: Direction, coeff: Scalar) -> Self {
        let e = self.terms.entry(d).or_default();
        *e += &coeff;
        if e.is_zero() {
            self.terms.remove(&d);
        }
        self
    }

    pub fn scale(&self, s: &Scalar) -> Vector {
        let mut out = Vector::zero();
        for (d, c) in &self.terms {
            out = out.plus(*d, c * s);
        }
        out
    }

    pub fn add(&self, other: &Vector) -> Vector {
        let mut out = self.clone();
        for (d, c) in &other.terms {
            out = out.plus(*d, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, d: Direction) -> Scalar {
        self.terms.get(&d).cloned().unwrap_or_default()
    }

    pub fn inner(&self, other: &Vector) -> Scalar {
        let mut acc = Scalar::zero();
        for (d, x) in &self.terms {
            let partner = match d {
                Direction::C => Direction::D,
                Direction::D => Direction::C,
                other => *other,
            };
            if let Some(y) = other.terms.get(&partner) {
                acc.add_product(x, y);
            }
        }
        acc
    }
}

fn eps(i: usize) -> Vector {
    Vector::basis(Direction::Eps(i as u8))
}

fn q(numer: i64, denom: i64) -> Scalar {
    Scalar::ratio(numer, denom)
}

/// 1/√2 and 1/√3 as field elements.
fn inv_sqrt2() -> Scalar {
    Scalar::sqrt2().scale_rational(&Rational::new(1, 2))
}

fn inv_sqrt3() -> Scalar {
    Scalar::sqrt3().scale_rational(&Rational::new(1, 3))
}

pub fn c_vector() -> Vector {
    Vector::basis(Direction::C)
}

/// The coefficient γ in β = −γc + ε₁.
pub fn beta_gamma(kind: AlgebraKind) -> Scalar {
    match kind.family() {
        Family::AOdd => Scalar::sqrt2(),
        Family::D => Scalar::one(),
        Family::AEven => inv_sqrt2(),
        Family::D4Triality => Scalar::sqrt3(),
    }
}

pub fn beta(kind: AlgebraKind) -> Vector {
    eps(1).plus(Direction::C, -beta_gamma(kind))
}

/// β as a combination of field letters.
pub fn beta_letters(kind: AlgebraKind) -> LetterSum {
    LetterSum::from(Letter::eps(1)).add(Letter::c(), -beta_gamma(kind))
}

pub fn theta0(kind: AlgebraKind) -> Vector {
    match kind.family() {
        Family::AOdd => eps(1).add(&eps(2)).scale(&inv_sqrt2()),
        Family::D => eps(1),
        Family::AEven => eps(1).scale(&Scalar::sqrt2()),
        Family::D4Triality => eps(1).sub(&eps(3)).scale(&inv_sqrt3()),
    }
}

pub fn simple_root(kind: AlgebraKind, i: usize) -> Result<Vector, LetterError> {
    let n = kind.n();
    if i > n {
        return Err(LetterError::RootIndex { index: i, n });
    }
    if i == 0 {
        return Ok(c_vector().sub(&theta0(kind)));
    }
    let diff = || eps(i).sub(&eps(i + 1));
    Ok(match kind.family() {
        Family::AOdd if i == n => eps(n).scale(&Scalar::sqrt2()),
        Family::D if i == n => eps(n),
        Family::AEven if i == n => eps(n).scale(&inv_sqrt2()),
        Family::AOdd | Family::AEven => diff().scale(&inv_sqrt2()),
        Family::D => diff(),
        Family::D4Triality if i == 1 => diff().scale(&inv_sqrt3()),
        Family::D4Triality => eps(2)
            .scale(&q(2, 1))
            .sub(&eps(1))
            .sub(&eps(3))
            .scale(&inv_sqrt3()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mrycheck::{d_vector, extended_cartan};

    fn all_letters(kind: AlgebraKind) -> Vec<Letter> {
        let mut v = Letter::fock_letters(kind);
        v.push(Letter::c());
        v.push(Letter::c().star());
        v
    }

    #[test]
    fn letter_order_matches_declared_order() {
        let kind = AlgebraKind::d(2).unwrap();
        let mut v = all_letters(kind);
        v.sort();
        let names: Vec<String> = v.iter().map(|l| l.to_string()).collect();
        assert_eq!(
            names,
            ["e1", "e2", "b1", "b2", "gE", "gEbar", "c", "e1*", "e2*", "b1*", "b2*", "c*"]
        );
        for w in v.windows(2) {
            assert!(w[0].code() < w[1].code());
        }
    }

    #[test]
    fn letter_strings_roundtrip() {
        for s in ["e1", "e1*", "b2", "b2*", "c", "c*", "gE", "gEbar"] {
            let l: Letter = s.parse().unwrap();
            assert_eq!(l.to_string(), s);
            assert_eq!(Letter::from_code(l.code()), l);
        }
        assert!("gE*".parse::<Letter>().is_err());
        assert!("e0".parse::<Letter>().is_err());
        assert!("x1".parse::<Letter>().is_err());
    }

    #[test]
    fn pairing_examples() {
        let ao = AlgebraKind::a_odd(3).unwrap();
        assert_eq!(
            pairing(ao, Letter::eps(1), Letter::eps(1).star()).unwrap(),
            Scalar::one()
        );
        let d = AlgebraKind::d(2).unwrap();
        let (e, eb) = (Letter::ghost(Ghost::E), Letter::ghost(Ghost::EBar));
        assert!(pairing(d, e, eb).unwrap().is_zero());
        assert_eq!(pairing(d, e, e).unwrap(), Scalar::one());
        let ae = AlgebraKind::a_even(2).unwrap();
        assert_eq!(pairing(ae, e, eb).unwrap(), Scalar::one());
        assert!(pairing(ae, e, e).unwrap().is_zero());
        assert!(pairing(ao, e, e).is_err());
        assert!(pairing(ao, Letter::eps(4), Letter::eps(4).star()).is_err());
    }

    #[test]
    fn pairing_symmetric_and_c_isotropic() {
        for kind in AlgebraKind::test_set() {
            let ls = all_letters(kind);
            for &a in &ls {
                for &b in &ls {
                    assert_eq!(pairing(kind, a, b).unwrap(), pairing(kind, b, a).unwrap());
                    if a.is_c()
                        || (!a.is_ghost() && !b.is_ghost() && a.is_starred() == b.is_starred())
                    {
                        assert!(pairing(kind, a, b).unwrap().is_zero(), "{a} {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn gram_matrix_matches_cartan_data() {
        for kind in AlgebraKind::test_set()
            .into_iter()
            .chain([AlgebraKind::a_odd(4).unwrap(), AlgebraKind::d(4).unwrap()])
        {
            let a = extended_cartan(kind);
            let d = d_vector(kind);
            let n = kind.n();
            for i in 0..=n {
                let ai = simple_root(kind, i).unwrap();
                assert!(ai.inner(&c_vector()).is_zero());
                for (j, &aij) in a[i].iter().enumerate() {
                    let aj = simple_root(kind, j).unwrap();
                    let expect = Scalar::from_int(aij).scale_rational(&d[i]);
                    assert_eq!(ai.inner(&aj), expect, "{kind} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn beta_and_theta() {
        let ao = AlgebraKind::a_odd(3).unwrap();
        let expect = eps(1).scale(&inv_sqrt2()).add(&eps(2).scale(&inv_sqrt2()));
        assert_eq!(theta0(ao), expect);
        let d = AlgebraKind::d(2).unwrap();
        assert_eq!(
            simple_root(d, 0).unwrap(),
            beta(d).scale(&Scalar::from_int(-1))
        );
        for kind in AlgebraKind::test_set() {
            let b = beta(kind);
            assert_eq!(b.inner(&b), Scalar::one());
            assert_eq!(b.inner(&eps(1)), Scalar::one());
            for x in [eps(2), Vector::basis(Direction::EpsBar(1))] {
                assert!(b.inner(&x).is_zero());
            }
            let lhs = simple_root(kind, 0)
                .unwrap()
                .add(&theta0(kind))
                .sub(&c_vector());
            assert!(lhs.is_zero());
        }
        assert!(simple_root(ao, 4).is_err());
    }

    #[test]
    fn rank_validation() {
        assert!(AlgebraKind::a_odd(2).is_err());
        assert!(AlgebraKind::new(Family::D4Triality, 3).is_err());
        assert!(AlgebraKind::a_even(1).is_err());
        assert_eq!(AlgebraKind::d4().r(), 3);
        assert_eq!("a-even".parse::<Family>().unwrap(), Family::AEven);
    }
}
