//! The map ψ from the presentation's generators into the twisted toroidal
//! algebra, and its checks.

use std::collections::BTreeSet;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kahler::KahlerBasis;
use super::lie::{LieVector, SimpleLieAlgebra};
use super::toroidal::{toroidal_bracket, LoopElement, ToroidalElement};
use crate::cliffspace::{AlgebraKind, Family};
use crate::mrycheck::{degree, Degree, GeneratorSymbol, RelationTable, Report};
use crate::report::{elapsed_ms, Record, Residual};
use crate::scalars::Scalar;

/// Which formula for the index-0 images to use. Only `Corrected` is a
/// homomorphism; the others are kept to show that each correction is needed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsiReading {
    Corrected,
    /// Coefficient 1 on `s^k t^{−1}dt` in ψ(α₀(k)) for every family.
    UnitCentral,
    /// `t^{−1}` instead of `t` in ψ(X(α₀,k)) for the a-even family.
    AEvenTInverse,
    /// Phase 1 instead of powers of ω in the index-0 root vectors.
    ConstantPhase,
}

/// Simple-root coordinates of the highest root θ of g.
pub fn highest_root(kind: AlgebraKind) -> Vec<i64> {
    let n = kind.n();
    match kind.family() {
        Family::AOdd => [vec![1; 2 * n - 2], vec![0]].concat(),
        Family::D => [vec![1; n], vec![0]].concat(),
        Family::AEven => vec![1; 2 * n],
        Family::D4Triality => vec![1, 1, 1, 0],
    }
}

/// Which part of a generator: `Cartan` for α_i, `Plus`/`Minus` for X(±α_i).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Cartan,
    Plus,
    Minus,
}

pub struct PsiMap {
    g: SimpleLieAlgebra,
    reading: PsiReading,
    h_theta: LieVector,
    e_theta: LieVector,
    f_theta: LieVector,
}

impl PsiMap {
    pub fn new(kind: AlgebraKind, reading: PsiReading) -> Self {
        let g = SimpleLieAlgebra::new(kind);
        let theta = highest_root(kind);
        let h_theta = theta
            .iter()
            .enumerate()
            .fold(LieVector::zero(), |acc, (i, &c)| {
                acc.plus(i, &Scalar::from_int(c))
            });
        let neg: Vec<i64> = theta.iter().map(|x| -x).collect();
        let e_theta = LieVector::basis(g.root_basis(&theta).expect("θ is a root"));
        let f_theta = LieVector::basis(g.root_basis(&neg).expect("−θ is a root"));
        PsiMap {
            g,
            reading,
            h_theta,
            e_theta,
            f_theta,
        }
    }

    pub fn algebra(&self) -> &SimpleLieAlgebra {
        &self.g
    }

    pub fn kind(&self) -> AlgebraKind {
        self.g.kind()
    }

    /// `ω^e` for `ω = e^{2πi/r}`.
    fn omega_pow(&self, e: i64) -> Scalar {
        Scalar::zeta_power(24 / self.kind().r() as i64 * e)
    }

    /// The g₀ generator `h_i`, `e_i` or `f_i` for `i = 1, …, n`.
    pub fn fixed_generator(&self, part: Part, i: usize) -> LieVector {
        let kind = self.kind();
        let q = i - 1;
        let base = match part {
            Part::Cartan => LieVector::basis(self.g.h(q)),
            Part::Plus => LieVector::basis(self.g.e(q)),
            Part::Minus => LieVector::basis(self.g.f(q)),
        };
        if self.g.sigma_perm()[q] == q {
            return base;
        }
        let orbit = self.g.orbit_sum(&base);
        if kind.family() == Family::AEven && i == kind.n() {
            let c = if part == Part::Cartan {
                Scalar::from_int(2)
            } else {
                Scalar::sqrt2()
            };
            return orbit.scale(&c);
        }
        orbit
    }

    /// ψ applied to `symbol` at s-mode `k`.
    pub fn image(&self, symbol: GeneratorSymbol, k: i64) -> ToroidalElement {
        let kind = self.kind();
        let r = kind.r();
        let (part, i) = match symbol {
            GeneratorSymbol::Central => return ToroidalElement::central_basis(KahlerBasis::c0()),
            GeneratorSymbol::H(i) => (Part::Cartan, i),
            GeneratorSymbol::XPlus(i) => (Part::Plus, i),
            GeneratorSymbol::XMinus(i) => (Part::Minus, i),
        };
        if i > 0 {
            return ToroidalElement::from_loop(LoopElement::tensor(
                &self.fixed_generator(part, i),
                k,
                0,
            ));
        }
        let minus = Scalar::from_int(-1);
        if kind.family() == Family::AEven {
            return match part {
                Part::Cartan => {
                    let lp = LoopElement::tensor(&self.h_theta.scale(&minus), k, 0);
                    ToroidalElement::from_loop(lp)
                        .add(&ToroidalElement::central_basis(KahlerBasis::Tdt { j: k }))
                }
                Part::Plus => {
                    let m = if self.reading == PsiReading::AEvenTInverse {
                        -1
                    } else {
                        1
                    };
                    ToroidalElement::from_loop(LoopElement::tensor(
                        &self.f_theta.scale(&minus),
                        k,
                        m,
                    ))
                }
                Part::Minus => ToroidalElement::from_loop(LoopElement::tensor(
                    &self.e_theta.scale(&minus),
                    k,
                    -1,
                )),
            };
        }
        let phased = |x: &LieVector, phase: &dyn Fn(usize) -> i64| -> LieVector {
            (0..r).fold(LieVector::zero(), |acc, p| {
                let w = if self.reading == PsiReading::ConstantPhase {
                    Scalar::one()
                } else {
                    self.omega_pow(phase(p))
                };
                acc.add(&self.g.sigma_pow(x, p).scale(&w))
            })
        };
        match part {
            Part::Cartan => {
                let c1 = if self.reading == PsiReading::UnitCentral {
                    1
                } else {
                    r as i64
                };
                let lp = LoopElement::tensor(&self.g.orbit_sum(&self.h_theta).scale(&minus), k, 0);
                ToroidalElement::from_loop(lp).add(
                    &ToroidalElement::central_basis(KahlerBasis::Tdt { j: k })
                        .scale(&Scalar::from_int(c1)),
                )
            }
            Part::Plus => {
                let x = phased(&self.f_theta, &|p| (r - p) as i64);
                ToroidalElement::from_loop(LoopElement::tensor(&x.scale(&minus), k, 1))
            }
            Part::Minus => {
                let x = phased(&self.e_theta, &|p| p as i64);
                ToroidalElement::from_loop(LoopElement::tensor(&x.scale(&minus), k, -1))
            }
        }
    }

    /// `(e_i, f_i, h_i)` for `i = 1, …, n`.
    pub fn fixed_generators(&self) -> Vec<(LieVector, LieVector, LieVector)> {
        (1..=self.kind().n())
            .map(|i| {
                (
                    self.fixed_generator(Part::Plus, i),
                    self.fixed_generator(Part::Minus, i),
                    self.fixed_generator(Part::Cartan, i),
                )
            })
            .collect()
    }

    /// π̄: ψ without its central part (so c̸ ↦ 0).
    pub fn pibar(&self, symbol: GeneratorSymbol, k: i64) -> LoopElement {
        self.image(symbol, k).loop_part().clone()
    }

    pub fn theta_triple(&self) -> (&LieVector, &LieVector, &LieVector) {
        (&self.e_theta, &self.f_theta, &self.h_theta)
    }

    pub fn bracket(&self, x: &ToroidalElement, y: &ToroidalElement) -> ToroidalElement {
        toroidal_bracket(&self.g, x, y)
    }

    /// Restriction of a g-root to g₀, over α₀, …, α_n (α₀ coordinate 0).
    fn restrict(&self, root: &[i64]) -> Vec<i64> {
        let mut out = vec![0; self.kind().n() + 1];
        for (q, &c) in root.iter().enumerate() {
            out[self.orbit_rep(q) + 1] += c;
        }
        out
    }

    fn orbit_rep(&self, q: usize) -> usize {
        let perm = self.g.sigma_perm();
        let mut best = q;
        let mut cur = perm[q];
        while cur != q {
            best = best.min(cur);
            cur = perm[cur];
        }
        best
    }

    /// The Z × Q̂ degree of `x_b ⊗ s^j t^m`.
    pub fn term_degree(&self, b: usize, j: i64, m: i64) -> Degree {
        let mut root_part = self
            .g
            .root_of(b)
            .map(|a| self.restrict(a))
            .unwrap_or_else(|| vec![0; self.kind().n() + 1]);
        let mut delta = self.restrict(&highest_root(self.kind()));
        delta[0] = 1;
        for (x, d) in root_part.iter_mut().zip(&delta) {
            *x += m * d;
        }
        Degree {
            s_degree: j,
            root_part,
        }
    }

    /// Degrees of all loop terms of an element.
    pub fn degrees(&self, x: &ToroidalElement) -> BTreeSet<(i64, Vec<i64>)> {
        x.loop_part()
            .terms()
            .map(|((b, j, m), _)| {
                let d = self.term_degree(b, j, m);
                (d.s_degree, d.root_part)
            })
            .collect()
    }

    /// Whether every `(j, m)` component `X` satisfies `σX = ω^m X`.
    pub fn is_twisted(&self, x: &ToroidalElement) -> bool {
        let mut slots: BTreeSet<(i64, i64)> = BTreeSet::new();
        for ((_, j, m), _) in x.loop_part().terms() {
            slots.insert((j, m));
        }
        slots.into_iter().all(|(j, m)| {
            let comp = x
                .loop_part()
                .terms()
                .filter(|((_, jj, mm), _)| (*jj, *mm) == (j, m))
                .fold(LieVector::zero(), |acc, ((b, _, _), c)| acc.plus(b, c));
            self.g.sigma(&comp) == comp.scale(&self.omega_pow(m))
        })
    }
}

#[derive(Debug, Clone)]
enum PsiCase {
    Cartan {
        i: usize,
        j: usize,
        k: i64,
        l: i64,
    },
    CartanRoot {
        i: usize,
        j: usize,
        sign: i64,
        k: i64,
        l: i64,
    },
    RootPair {
        i: usize,
        j: usize,
        k: i64,
        l: i64,
    },
    SameRoot {
        i: usize,
        sign: i64,
        k: i64,
        l: i64,
    },
    Serre {
        i: usize,
        j: usize,
        sign: i64,
        modes: Vec<i64>,
    },
}

fn psi_cases(table: &RelationTable, bound: i64) -> Vec<PsiCase> {
    let n = table.kind.n();
    let mut out = Vec::new();
    let modes: Vec<i64> = (-bound..=bound).collect();
    for i in 0..=n {
        for j in 0..=n {
            for &k in &modes {
                for &l in &modes {
                    out.push(PsiCase::Cartan { i, j, k, l });
                    for sign in [1, -1] {
                        out.push(PsiCase::CartanRoot { i, j, sign, k, l });
                    }
                    out.push(PsiCase::RootPair { i, j, k, l });
                    if i == j {
                        for sign in [1, -1] {
                            out.push(PsiCase::SameRoot { i, sign, k, l });
                        }
                    }
                }
            }
        }
    }
    for i in 0..=n {
        for j in 0..=n {
            if i == j {
                continue;
            }
            let len = table.serre_arity(i, j) + 1;
            let total = 3usize.pow(len as u32);
            for code in 0..total {
                let modes: Vec<i64> = (0..len)
                    .map(|p| (code / 3usize.pow(p as u32) % 3) as i64 - 1)
                    .collect();
                for sign in [1, -1] {
                    out.push(PsiCase::Serre {
                        i,
                        j,
                        sign,
                        modes: modes.clone(),
                    });
                }
            }
        }
    }
    out
}

fn evaluate(
    psi: &PsiMap,
    table: &RelationTable,
    case: &PsiCase,
) -> (String, Vec<i64>, ToroidalElement) {
    let c = || psi.image(GeneratorSymbol::Central, 0);
    let delta = |k: i64, l: i64| {
        if k == -l {
            Scalar::from_int(k)
        } else {
            Scalar::zero()
        }
    };
    let ix = |v: usize| v as i64;
    match *case {
        PsiCase::Cartan { i, j, k, l } => {
            let got = psi.bracket(
                &psi.image(GeneratorSymbol::H(i), k),
                &psi.image(GeneratorSymbol::H(j), l),
            );
            let want = c().scale(&(&table.hh_coeff(i, j) * &delta(k, l)));
            (
                table.hh_relation(i, j).to_string(),
                vec![ix(i), ix(j), k, l],
                got.sub(&want),
            )
        }
        PsiCase::CartanRoot { i, j, sign, k, l } => {
            let got = psi.bracket(
                &psi.image(GeneratorSymbol::H(i), k),
                &psi.image(GeneratorSymbol::x(j, sign), l),
            );
            let want = psi
                .image(GeneratorSymbol::x(j, sign), k + l)
                .scale(&Scalar::from_int(sign * table.a(i, j)));
            ("6".into(), vec![ix(i), ix(j), sign, k, l], got.sub(&want))
        }
        PsiCase::RootPair { i, j, k, l } => {
            let got = psi.bracket(
                &psi.image(GeneratorSymbol::XPlus(i), k),
                &psi.image(GeneratorSymbol::XMinus(j), l),
            );
            let want = if i == j {
                psi.image(GeneratorSymbol::H(i), k + l)
                    .add(&c().scale(&(&table.xx_ddelta(i) * &delta(k, l))))
            } else {
                ToroidalElement::zero()
            };
            ("8".into(), vec![ix(i), ix(j), k, l], got.sub(&want))
        }
        PsiCase::SameRoot { i, sign, k, l } => {
            let x = psi.image(GeneratorSymbol::x(i, sign), k);
            let y = psi.image(GeneratorSymbol::x(i, sign), l);
            ("7".into(), vec![ix(i), sign, k, l], psi.bracket(&x, &y))
        }
        PsiCase::Serre {
            i,
            j,
            sign,
            ref modes,
        } => {
            let (target, ops) = modes.split_last().expect("nonempty mode tuple");
            let mut acc = psi.image(GeneratorSymbol::x(j, sign), *target);
            for &m in ops.iter().rev() {
                acc = psi.bracket(&psi.image(GeneratorSymbol::x(i, sign), m), &acc);
            }
            let mut idx = vec![ix(i), ix(j), sign];
            idx.extend(modes);
            (table.serre_relation(i, j).to_string(), idx, acc)
        }
    }
}

/// Checks that ψ respects every defining relation for modes in
/// `[−bound, bound]` (Serre relations use modes in `{−1, 0, 1}`).
pub fn check_psi_homomorphism(kind: AlgebraKind, bound: i64, reading: PsiReading) -> Report {
    let psi = PsiMap::new(kind, reading);
    let table = RelationTable::new(kind);
    let relations = psi_cases(&table, bound)
        .par_iter()
        .map(|case| {
            let start = Instant::now();
            let (id, indices, residual) = evaluate(&psi, &table, case);
            Record::new(id, indices, Residual::Toroidal(residual), elapsed_ms(start))
        })
        .collect();
    Report {
        kind: kind.family(),
        n: kind.n(),
        relations,
    }
}

/// The tabulated value of `(σ^p(−h_θ) | σ^q(h_j))` for a 1-based primed
/// index `j ≤ n`; `None` when `p` is outside the table (a-even, `p > 0`).
pub fn expected_pairing(kind: AlgebraKind, p: usize, q: usize, j: usize) -> Option<i64> {
    let n = kind.n();
    let d = |a: usize| i64::from(j == a);
    Some(match kind.family() {
        Family::AOdd if p == q => -d(1),
        Family::AOdd => d(1) - d(2),
        Family::D if p == q => -d(1) - d(n),
        Family::D => -d(1) + d(n),
        Family::D4Triality if p == q || (p + 1) % 3 == q => -d(1),
        Family::D4Triality => d(1),
        Family::AEven if p == 0 => -d(1),
        Family::AEven => return None,
    })
}

/// Compares the computed pairings against [`expected_pairing`].
pub fn check_pairing_table(kind: AlgebraKind) -> Vec<Record> {
    let psi = PsiMap::new(kind, PsiReading::Corrected);
    let g = psi.algebra();
    let r = kind.r();
    let mut out = Vec::new();
    for p in 0..r {
        for q in 0..r {
            for j in 1..=kind.n() {
                let Some(want) = expected_pairing(kind, p, q, j) else {
                    continue;
                };
                let start = Instant::now();
                let x = g.sigma_pow(&psi.h_theta, p).scale(&Scalar::from_int(-1));
                let y = g.sigma_pow(&LieVector::basis(g.h(j - 1)), q);
                let got = g.form(&x, &y);
                let mut bad = Vec::new();
                if got != Scalar::from_int(want) {
                    bad.push(format!("p={p} q={q} j={j}: got {got}, table {want}"));
                }
                out.push(Record::new(
                    "pairing",
                    vec![p as i64, q as i64, j as i64],
                    Residual::Mismatches(bad),
                    elapsed_ms(start),
                ));
            }
        }
    }
    out
}

/// Checks that every image lies in the twisted loop algebra and that the
/// projection keeps the Z × Q̂ degree of each generator.
pub fn check_grading(kind: AlgebraKind, bound: i64) -> Vec<Record> {
    let psi = PsiMap::new(kind, PsiReading::Corrected);
    let mut out = Vec::new();
    for symbol in GeneratorSymbol::all(kind) {
        for k in -bound..=bound {
            let start = Instant::now();
            let x = ToroidalElement::from_loop(psi.pibar(symbol, k));
            let mut bad = Vec::new();
            if !psi.is_twisted(&x) {
                bad.push(format!("{symbol}({k}) is not σ-twisted"));
            }
            let want = degree(kind, symbol, k);
            let got = psi.degrees(&x);
            if got.len() != 1 || !got.contains(&(want.s_degree, want.root_part.clone())) {
                bad.push(format!(
                    "{symbol}({k}) has degrees {got:?}, expected {want:?}"
                ));
            }
            let idx = symbol.index().map_or(-1, |i| i as i64);
            out.push(Record::new(
                format!("grading {symbol}"),
                vec![idx, k],
                Residual::Mismatches(bad),
                elapsed_ms(start),
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corrected_map_is_a_homomorphism() {
        for kind in AlgebraKind::test_set() {
            let report = check_psi_homomorphism(kind, 1, PsiReading::Corrected);
            let bad: Vec<String> = report.failures().take(3).map(|r| r.to_string()).collect();
            assert!(bad.is_empty(), "{kind}: {bad:?}");
        }
    }

    #[test]
    fn each_correction_is_needed() {
        let fails = |kind, reading| !check_psi_homomorphism(kind, 1, reading).all_pass();
        assert!(fails(
            AlgebraKind::a_odd(3).unwrap(),
            PsiReading::UnitCentral
        ));
        assert!(fails(AlgebraKind::d4(), PsiReading::UnitCentral));
        assert!(fails(
            AlgebraKind::a_even(2).unwrap(),
            PsiReading::AEvenTInverse
        ));
        assert!(fails(
            AlgebraKind::a_odd(3).unwrap(),
            PsiReading::ConstantPhase
        ));
        assert!(fails(AlgebraKind::d4(), PsiReading::ConstantPhase));
    }

    #[test]
    fn fixed_generators_match_images() {
        for kind in AlgebraKind::test_set() {
            let psi = PsiMap::new(kind, PsiReading::Corrected);
            let g = psi.algebra();
            for i in 1..=kind.n() {
                let e = psi.fixed_generator(Part::Plus, i);
                let f = psi.fixed_generator(Part::Minus, i);
                let h = psi.fixed_generator(Part::Cartan, i);
                assert_eq!(g.sigma(&e), e);
                assert_eq!(g.bracket(&e, &f), h, "{kind} {i}");
            }
        }
    }

    #[test]
    fn pairing_table_and_grading() {
        for kind in AlgebraKind::test_set() {
            for rec in check_pairing_table(kind)
                .iter()
                .chain(&check_grading(kind, 2))
            {
                assert!(rec.passed(), "{kind}: {rec} {:?}", rec.residual);
            }
        }
    }

    #[test]
    fn fixed_generators_follow_the_g0_cartan_matrix() {
        for kind in AlgebraKind::test_set() {
            let psi = PsiMap::new(kind, PsiReading::Corrected);
            let table = RelationTable::new(kind);
            let g = psi.algebra();
            let gens = psi.fixed_generators();
            for (i, (_, _, h)) in gens.iter().enumerate() {
                for (j, (e, f, _)) in gens.iter().enumerate() {
                    let a = Scalar::from_int(table.a(i + 1, j + 1));
                    assert_eq!(g.bracket(h, e), e.scale(&a), "{kind} {i} {j}");
                    assert_eq!(g.bracket(h, f), f.scale(&-a), "{kind} {i} {j}");
                }
            }
        }
        let psi = PsiMap::new(AlgebraKind::a_even(2).unwrap(), PsiReading::Corrected);
        let g = psi.algebra();
        let h2 = LieVector::basis(g.h(1))
            .plus(g.h(2), &Scalar::one())
            .scale(&Scalar::from_int(2));
        assert_eq!(psi.fixed_generator(Part::Cartan, 2), h2);
    }

    #[test]
    fn theta_triple() {
        for kind in AlgebraKind::test_set() {
            let psi = PsiMap::new(kind, PsiReading::Corrected);
            let g = psi.algebra();
            let (e, f, h) = psi.theta_triple();
            assert_eq!(g.bracket(h, e), e.scale(&Scalar::from_int(2)));
            assert_eq!(&g.bracket(e, f), h);
        }
    }

    #[test]
    fn sample_images() {
        let kind = AlgebraKind::d(3).unwrap();
        let psi = PsiMap::new(kind, PsiReading::Corrected);
        let g = psi.algebra();
        let (_, _, h) = psi.theta_triple();
        let x = psi.image(GeneratorSymbol::H(0), 2);
        let lp = LoopElement::tensor(&g.orbit_sum(h).scale(&Scalar::from_int(-1)), 2, 0);
        assert_eq!(x.loop_part(), &lp);
        assert_eq!(
            x.central().coeff(KahlerBasis::Tdt { j: 2 }),
            Scalar::from_int(2)
        );
        let ae = PsiMap::new(AlgebraKind::a_even(3).unwrap(), PsiReading::Corrected);
        let g = ae.algebra();
        let e1 = LieVector::basis(g.e(0)).plus(g.e(5), &Scalar::one());
        assert_eq!(
            ae.image(GeneratorSymbol::XPlus(1), -1).loop_part(),
            &LoopElement::tensor(&e1, -1, 0)
        );
        assert!(ae.pibar(GeneratorSymbol::Central, 0).is_zero());
        for symbol in GeneratorSymbol::all(kind) {
            assert_eq!(&psi.pibar(symbol, 1), psi.image(symbol, 1).loop_part());
        }
    }

    #[test]
    fn cartan_central_value_from_the_proof() {
        // [ψ(α₀(k)), ψ(α₂(l))] = r a₀₂ k δ ψ(c̸) = −2k δ ψ(c̸)
        let psi = PsiMap::new(AlgebraKind::a_odd(3).unwrap(), PsiReading::Corrected);
        let got = psi.bracket(
            &psi.image(GeneratorSymbol::H(0), 2),
            &psi.image(GeneratorSymbol::H(2), -2),
        );
        assert_eq!(
            got,
            ToroidalElement::central_basis(KahlerBasis::c0()).scale(&Scalar::from_int(-4))
        );
    }

    #[test]
    fn central_generator_is_s_inverse_ds() {
        let psi = PsiMap::new(AlgebraKind::d(2).unwrap(), PsiReading::Corrected);
        let c = psi.image(GeneratorSymbol::Central, 0);
        assert_eq!(c.central().coeff(KahlerBasis::c0()), Scalar::one());
        assert!(c.loop_part().is_zero());
    }
}
