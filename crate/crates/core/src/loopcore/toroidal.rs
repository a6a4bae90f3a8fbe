//! The toroidal algebra `g ⊗ C[s^±1, t^±1] ⊕ K` and its bracket.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::kahler::{reduce, KahlerBasis, KahlerElement};
use super::lie::{LieVector, SimpleLieAlgebra};
use crate::scalars::Scalar;

/// Finite sums of `x_b ⊗ s^j t^m`, keyed by `(b, j, m)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LoopElement {
    terms: BTreeMap<(usize, i64, i64), Scalar>,
}

#[derive(Serialize, Deserialize)]
struct LoopTerm {
    basis_index: usize,
    j: i64,
    m: i64,
    coeff: Scalar,
}

impl LoopElement {
    pub fn zero() -> Self {
        LoopElement::default()
    }

    /// `x ⊗ s^j t^m`.
    pub fn tensor(x: &LieVector, j: i64, m: i64) -> Self {
        let mut out = LoopElement::zero();
        for (b, c) in x.terms() {
            out.add_term((b, j, m), c);
        }
        out
    }

    pub fn add_term(&mut self, key: (usize, i64, i64), c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(key).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ((usize, i64, i64), &Scalar)> {
        self.terms.iter().map(|(&k, c)| (k, c))
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

    pub fn scale(&self, s: &Scalar) -> LoopElement {
        let mut out = LoopElement::zero();
        for (k, c) in self.terms() {
            out.add_term(k, &(c * s));
        }
        out
    }

    pub fn add(&self, other: &LoopElement) -> LoopElement {
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.add_term(k, c);
        }
        out
    }
}

impl Serialize for LoopElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.terms().map(|((basis_index, j, m), c)| LoopTerm {
            basis_index,
            j,
            m,
            coeff: c.clone(),
        }))
    }
}

impl<'de> Deserialize<'de> for LoopElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let mut out = LoopElement::zero();
        for t in Vec::<LoopTerm>::deserialize(d)? {
            out.add_term((t.basis_index, t.j, t.m), &t.coeff);
        }
        Ok(out)
    }
}

/// A loop part plus a central part in `K`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ToroidalElement {
    #[serde(rename = "loop")]
    loop_part: LoopElement,
    central: KahlerElement,
}

impl ToroidalElement {
    pub fn zero() -> Self {
        ToroidalElement::default()
    }

    pub fn new(loop_part: LoopElement, central: KahlerElement) -> Self {
        ToroidalElement { loop_part, central }
    }

    pub fn from_loop(loop_part: LoopElement) -> Self {
        ToroidalElement::new(loop_part, KahlerElement::zero())
    }

    pub fn central_basis(b: KahlerBasis) -> Self {
        ToroidalElement::new(LoopElement::zero(), KahlerElement::single(b, Scalar::one()))
    }

    pub fn loop_part(&self) -> &LoopElement {
        &self.loop_part
    }

    pub fn central(&self) -> &KahlerElement {
        &self.central
    }

    pub fn is_zero(&self) -> bool {
        self.loop_part.is_zero() && self.central.is_zero()
    }

    pub fn scale(&self, s: &Scalar) -> ToroidalElement {
        ToroidalElement::new(self.loop_part.scale(s), self.central.scale(s))
    }

    pub fn add(&self, other: &ToroidalElement) -> ToroidalElement {
        ToroidalElement::new(
            self.loop_part.add(&other.loop_part),
            self.central.add(&other.central),
        )
    }

    pub fn sub(&self, other: &ToroidalElement) -> ToroidalElement {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    /// Drops the central part.
    pub fn without_central(&self) -> ToroidalElement {
        ToroidalElement::from_loop(self.loop_part.clone())
    }
}

/// `[x⊗a, y⊗b] = [x,y]⊗ab + (x|y)·b da`; central parts drop out.
pub fn toroidal_bracket(
    g: &SimpleLieAlgebra,
    x: &ToroidalElement,
    y: &ToroidalElement,
) -> ToroidalElement {
    let mut lp = LoopElement::zero();
    let mut central = KahlerElement::zero();
    for ((bx, j1, m1), a) in x.loop_part.terms() {
        for ((by, j2, m2), b) in y.loop_part.terms() {
            let ab = a * b;
            for &(z, c) in g.bracket_basis(bx, by) {
                lp.add_term((z, j1 + j2, m1 + m2), &ab.scale_rational(&c.into()));
            }
            let f = g.form_basis(bx, by);
            if f != 0 {
                let red = reduce((j2, m2), (j1, m1));
                central = central.add(&red.scale(&ab.scale_rational(&f.into())));
            }
        }
    }
    ToroidalElement::new(lp, central)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cliffspace::AlgebraKind;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_element(g: &SimpleLieAlgebra, rng: &mut ChaCha8Rng) -> ToroidalElement {
        let r = g.kind().r() as i64;
        let mut lp = LoopElement::zero();
        for _ in 0..2 {
            let key = (
                rng.gen_range(0..g.dim()),
                rng.gen_range(-2..=2),
                r * rng.gen_range(-1..=1),
            );
            lp.add_term(key, &Scalar::from_int(rng.gen_range(-2..=2)));
        }
        ToroidalElement::from_loop(lp)
    }

    #[test]
    fn jacobi_and_antisymmetry() {
        for kind in [AlgebraKind::a_odd(3).unwrap(), AlgebraKind::d4()] {
            let g = SimpleLieAlgebra::new(kind);
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for _ in 0..200 {
                let [x, y, z] = [(); 3].map(|_| random_element(&g, &mut rng));
                let br = |a: &ToroidalElement, b: &ToroidalElement| toroidal_bracket(&g, a, b);
                assert!(br(&x, &y).add(&br(&y, &x)).is_zero());
                let j = br(&x, &br(&y, &z))
                    .add(&br(&y, &br(&z, &x)))
                    .add(&br(&z, &br(&x, &y)));
                assert!(j.is_zero());
            }
        }
    }

    #[test]
    fn central_term_of_cartan_pair() {
        let g = SimpleLieAlgebra::new(AlgebraKind::a_odd(3).unwrap());
        let h0 = LieVector::basis(g.h(0));
        let x = ToroidalElement::from_loop(LoopElement::tensor(&h0, 2, 0));
        let y = ToroidalElement::from_loop(LoopElement::tensor(&h0, -2, 0));
        let got = toroidal_bracket(&g, &x, &y);
        // (h0|h0) · s^{-2} d(s^2) = 2 · 2 c0
        assert_eq!(
            got,
            ToroidalElement::central_basis(KahlerBasis::c0()).scale(&Scalar::from_int(4))
        );
        let x = ToroidalElement::from_loop(LoopElement::tensor(&h0, 1, 0));
        let y = ToroidalElement::from_loop(LoopElement::tensor(&h0, -1, 0));
        assert_eq!(
            toroidal_bracket(&g, &x, &y),
            ToroidalElement::central_basis(KahlerBasis::c0()).scale(&Scalar::from_int(2))
        );
        let k = ToroidalElement::central_basis(KahlerBasis::Tdt { j: 3 });
        assert!(toroidal_bracket(&g, &x, &k).is_zero());
    }

    #[test]
    fn twist_grading_is_preserved() {
        use crate::loopcore::{PsiMap, PsiReading};
        use crate::mrycheck::GeneratorSymbol;
        for kind in AlgebraKind::test_set() {
            let psi = PsiMap::new(kind, PsiReading::Corrected);
            let gens = GeneratorSymbol::all(kind);
            for x in &gens {
                for y in &gens {
                    let a = ToroidalElement::from_loop(psi.pibar(*x, 1));
                    let b = ToroidalElement::from_loop(psi.pibar(*y, -2));
                    assert!(
                        psi.is_twisted(&toroidal_bracket(psi.algebra(), &a, &b)),
                        "{kind} {x} {y}"
                    );
                }
            }
        }
    }
}
