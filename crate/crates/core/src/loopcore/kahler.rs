//! Kähler differentials of `C[s^±1, t^±r]` modulo exact forms.
//!
//! The quotient has basis `s^{j−1} t^m ds` (with `m ≠ 0`, plus `s^{−1}ds`
//! at `j = m = 0`) and `s^j t^{−1} dt`. Every `b·da` for monomials `a`,
//! `b` reduces to at most two of them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::rational::Rational;
use crate::scalars::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KahlerError {
    #[error("t-degree {degree} of b·da is not a multiple of {r}")]
    NotAdmissible { degree: i64, r: usize },
}

/// A basis class; `m` is always the total t-degree (0 for `tdt`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "basis", rename_all = "lowercase")]
pub enum KahlerBasis {
    /// `s^{j−1} t^m ds`.
    Sds { j: i64, m: i64 },
    /// `s^j t^{−1} dt`.
    Tdt { j: i64 },
}

impl KahlerBasis {
    pub fn c0() -> Self {
        KahlerBasis::Sds { j: 0, m: 0 }
    }

    pub fn j(&self) -> i64 {
        match *self {
            KahlerBasis::Sds { j, .. } | KahlerBasis::Tdt { j } => j,
        }
    }

    pub fn m(&self) -> i64 {
        match *self {
            KahlerBasis::Sds { m, .. } => m,
            KahlerBasis::Tdt { .. } => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct KahlerElement {
    terms: BTreeMap<KahlerBasis, Scalar>,
}

#[derive(Serialize, Deserialize)]
struct KahlerTerm {
    basis: String,
    j: i64,
    m: i64,
    coeff: Scalar,
}

impl KahlerElement {
    pub fn zero() -> Self {
        KahlerElement::default()
    }

    pub fn single(b: KahlerBasis, c: Scalar) -> Self {
        let mut k = KahlerElement::zero();
        k.add_term(b, &c);
        k
    }

    pub fn add_term(&mut self, b: KahlerBasis, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(b).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&b);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (KahlerBasis, &Scalar)> {
        self.terms.iter().map(|(&b, c)| (b, c))
    }

    pub fn coeff(&self, b: KahlerBasis) -> Scalar {
        self.terms.get(&b).cloned().unwrap_or_default()
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

    pub fn scale(&self, s: &Scalar) -> KahlerElement {
        let mut out = KahlerElement::zero();
        for (b, c) in self.terms() {
            out.add_term(b, &(c * s));
        }
        out
    }

    pub fn add(&self, other: &KahlerElement) -> KahlerElement {
        let mut out = self.clone();
        for (b, c) in other.terms() {
            out.add_term(b, c);
        }
        out
    }
}

impl Serialize for KahlerElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.terms().map(|(b, c)| KahlerTerm {
            basis: match b {
                KahlerBasis::Sds { .. } => "sds".into(),
                KahlerBasis::Tdt { .. } => "tdt".into(),
            },
            j: b.j(),
            m: b.m(),
            coeff: c.clone(),
        }))
    }
}

impl<'de> Deserialize<'de> for KahlerElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let mut out = KahlerElement::zero();
        for t in Vec::<KahlerTerm>::deserialize(d)? {
            let b = match t.basis.as_str() {
                "sds" => KahlerBasis::Sds { j: t.j, m: t.m },
                "tdt" => KahlerBasis::Tdt { j: t.j },
                other => return Err(D::Error::custom(format!("unknown Kähler basis `{other}`"))),
            };
            out.add_term(b, &t.coeff);
        }
        Ok(out)
    }
}

/// Reduces `b·da` for `b = s^ℓ t^m`, `a = s^k t^p`. The t-degree `m + p`
/// must be a multiple of `r`.
pub fn kahler_reduce(b: (i64, i64), a: (i64, i64), r: usize) -> Result<KahlerElement, KahlerError> {
    let total = b.1 + a.1;
    if total.rem_euclid(r as i64) != 0 {
        return Err(KahlerError::NotAdmissible { degree: total, r });
    }
    Ok(reduce(b, a))
}

/// [`kahler_reduce`] without the admissibility check; the formula is valid
/// for every pair of monomials.
pub(crate) fn reduce(b: (i64, i64), a: (i64, i64)) -> KahlerElement {
    let (l, m) = b;
    let (k, p) = a;
    let total = m + p;
    let mut out = KahlerElement::zero();
    if total != 0 {
        let c = Rational::new(k * m - p * l, total);
        out.add_term(
            KahlerBasis::Sds { j: k + l, m: total },
            &Scalar::from_rational(c),
        );
    } else {
        if k + l == 0 {
            out.add_term(KahlerBasis::c0(), &Scalar::from_int(k));
        }
        out.add_term(KahlerBasis::Tdt { j: k + l }, &Scalar::from_int(p));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_s_forms() {
        let c0 = KahlerBasis::c0();
        assert_eq!(
            kahler_reduce((3, 0), (-3, 0), 2).unwrap(),
            KahlerElement::single(c0, Scalar::from_int(-3))
        );
        assert!(kahler_reduce((2, 0), (1, 0), 2).unwrap().is_zero());
        // s²t^{−1} d(s^{−2}t) = −2 s^{−1}ds + t^{−1}dt
        let got = kahler_reduce((2, -1), (-2, 1), 2).unwrap();
        let want = KahlerElement::single(c0, Scalar::from_int(-2)).add(&KahlerElement::single(
            KahlerBasis::Tdt { j: 0 },
            Scalar::one(),
        ));
        assert_eq!(got, want);
    }

    #[test]
    fn mixed_forms() {
        // s^{-1} t^{-1} d(s t) = s^{-1}ds + t^{-1}dt
        let got = kahler_reduce((-1, -1), (1, 1), 2).unwrap();
        let want = KahlerElement::single(KahlerBasis::c0(), Scalar::one()).add(
            &KahlerElement::single(KahlerBasis::Tdt { j: 0 }, Scalar::one()),
        );
        assert_eq!(got, want);
        // t² d(s) = s^0 t² ds
        assert_eq!(
            kahler_reduce((0, 2), (1, 0), 2).unwrap(),
            KahlerElement::single(KahlerBasis::Sds { j: 1, m: 2 }, Scalar::one())
        );
        // s t d(t) = s t dt ≡ −(1/2) t² ds
        let got = kahler_reduce((1, 1), (0, 1), 2).unwrap();
        assert_eq!(
            got,
            KahlerElement::single(KahlerBasis::Sds { j: 1, m: 2 }, Scalar::ratio(-1, 2))
        );
    }

    #[test]
    fn skew_symmetry() {
        for l in -3..=3 {
            for k in -3..=3 {
                for m in -3..=3i64 {
                    for p in -3..=3i64 {
                        if (m + p) % 3 != 0 {
                            assert!(kahler_reduce((l, m), (k, p), 3).is_err());
                            continue;
                        }
                        let x = kahler_reduce((l, m), (k, p), 3).unwrap();
                        let y = kahler_reduce((k, p), (l, m), 3).unwrap();
                        assert!(x.add(&y).is_zero(), "{l} {m} {k} {p}");
                    }
                }
            }
        }
    }

    #[test]
    fn serde_shape() {
        let k = kahler_reduce((-1, -1), (1, 1), 2).unwrap();
        let v = serde_json::to_value(&k).unwrap();
        assert_eq!(v[0]["basis"], "sds");
        assert_eq!(v[1]["basis"], "tdt");
        let back: KahlerElement = serde_json::from_value(v).unwrap();
        assert_eq!(back, k);
    }
}
