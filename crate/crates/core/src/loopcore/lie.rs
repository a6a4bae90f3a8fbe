//! Simply-laced simple Lie algebras in a Chevalley basis, with the diagram
//! automorphism σ lifted to the algebra.
//!
//! Structure constants come from the Frenkel–Kac sign cocycle on the root
//! lattice: `[E_α, E_β] = ε(α, β) E_{α+β}` and `[E_α, E_{−α}] = −Σ a_i h_i`.
//! The basis is `h_0 … h_{N−1}`, then `e_α` for positive roots sorted by
//! (height, coordinates), then `f_α = −E_{−α}` in the same order.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::cliffspace::{AlgebraKind, Family};
use crate::scalars::Scalar;

/// A finite linear combination of basis elements.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LieVector {
    terms: BTreeMap<usize, Scalar>,
}

impl LieVector {
    pub fn zero() -> Self {
        LieVector::default()
    }

    pub fn basis(i: usize) -> Self {
        LieVector::zero().plus(i, &Scalar::one())
    }

    pub fn plus(mut self, i: usize, c: &Scalar) -> Self {
        self.add_term(i, c);
        self
    }

    pub fn add_term(&mut self, i: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(i).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&i);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.terms.iter().map(|(&i, c)| (i, c))
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.terms.get(&i).cloned().unwrap_or_default()
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

    pub fn scale(&self, s: &Scalar) -> LieVector {
        let mut out = LieVector::zero();
        for (i, c) in self.terms() {
            out.add_term(i, &(c * s));
        }
        out
    }

    pub fn add(&self, other: &LieVector) -> LieVector {
        let mut out = self.clone();
        for (i, c) in other.terms() {
            out.add_term(i, c);
        }
        out
    }

    pub fn sub(&self, other: &LieVector) -> LieVector {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }
}

/// Sparse structure constants: `[b_x, b_y] = Σ c · b_z`.
type Structure = Vec<(usize, i64)>;

#[derive(Debug, Clone)]
pub struct SimpleLieAlgebra {
    kind: AlgebraKind,
    cartan: Vec<Vec<i64>>,
    roots: Vec<Vec<i64>>,
    root_index: HashMap<Vec<i64>, usize>,
    sigma_perm: Vec<usize>,
    sigma: Vec<(usize, i64)>,
    table: Vec<Vec<Structure>>,
}

fn finite_cartan(kind: AlgebraKind) -> Vec<Vec<i64>> {
    let (rank, type_a) = match kind.family() {
        Family::AOdd => (2 * kind.n() - 1, true),
        Family::AEven => (2 * kind.n(), true),
        Family::D => (kind.n() + 1, false),
        Family::D4Triality => (4, false),
    };
    let mut a = vec![vec![0; rank]; rank];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut link = |i: usize, j: usize| {
        a[i][j] = -1;
        a[j][i] = -1;
    };
    if type_a {
        for i in 0..rank - 1 {
            link(i, i + 1);
        }
    } else {
        for i in 0..rank - 2 {
            link(i, i + 1);
        }
        link(rank - 3, rank - 1);
    }
    a
}

fn diagram_automorphism(kind: AlgebraKind, rank: usize) -> Vec<usize> {
    match kind.family() {
        Family::AOdd | Family::AEven => (0..rank).map(|i| rank - 1 - i).collect(),
        Family::D => {
            let mut p: Vec<usize> = (0..rank).collect();
            p.swap(rank - 2, rank - 1);
            p
        }
        Family::D4Triality => vec![2, 1, 3, 0],
    }
}

impl SimpleLieAlgebra {
    /// The algebra g whose σ-twisted loop algebra realizes `kind`.
    pub fn new(kind: AlgebraKind) -> Self {
        let cartan = finite_cartan(kind);
        let rank = cartan.len();
        let ip = |a: &[i64], b: &[i64]| -> i64 {
            a.iter()
                .zip(&cartan)
                .map(|(x, row)| x * row.iter().zip(b).map(|(c, y)| c * y).sum::<i64>())
                .sum()
        };
        let simple: Vec<Vec<i64>> = (0..rank).map(|i| unit(rank, i)).collect();
        let mut positive = simple.clone();
        let mut frontier = simple.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for b in &frontier {
                for s in &simple {
                    if ip(b, s) == -1 {
                        let c: Vec<i64> = b.iter().zip(s).map(|(x, y)| x + y).collect();
                        if !positive.contains(&c) {
                            positive.push(c.clone());
                            next.push(c);
                        }
                    }
                }
            }
            frontier = next;
        }
        positive.sort_by(|a, b| (a.iter().sum::<i64>(), a).cmp(&(b.iter().sum::<i64>(), b)));
        let mut roots = positive.clone();
        roots.extend(positive.iter().map(|a| neg(a)));
        let root_index = roots
            .iter()
            .enumerate()
            .map(|(k, a)| (a.clone(), rank + k))
            .collect();
        let mut alg = SimpleLieAlgebra {
            kind,
            cartan,
            roots,
            root_index,
            sigma_perm: diagram_automorphism(kind, rank),
            sigma: Vec::new(),
            table: Vec::new(),
        };
        let dim = alg.dim();
        alg.table = (0..dim)
            .map(|x| (0..dim).map(|y| alg.compute_bracket(x, y)).collect())
            .collect();
        alg.sigma = alg.compute_sigma();
        alg
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    pub fn dim(&self) -> usize {
        self.rank() + self.roots.len()
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    /// Simple-root coordinates of the root carried by basis element `x`.
    pub fn root_of(&self, x: usize) -> Option<&[i64]> {
        x.checked_sub(self.rank()).map(|k| self.roots[k].as_slice())
    }

    pub fn root_basis(&self, root: &[i64]) -> Option<usize> {
        self.root_index.get(root).copied()
    }

    /// 0-based diagram automorphism on simple roots.
    pub fn sigma_perm(&self) -> &[usize] {
        &self.sigma_perm
    }

    pub fn h(&self, i: usize) -> usize {
        i
    }

    pub fn e(&self, i: usize) -> usize {
        self.root_index[&unit(self.rank(), i)]
    }

    pub fn f(&self, i: usize) -> usize {
        self.root_index[&neg(&unit(self.rank(), i))]
    }

    fn cocycle(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut odd = false;
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                let eps_neg = i == j || (i < j && self.cartan[i][j] == -1);
                if eps_neg && (ai * bj).rem_euclid(2) == 1 {
                    odd = !odd;
                }
            }
        }
        if odd {
            -1
        } else {
            1
        }
    }

    fn root_sign(a: &[i64]) -> i64 {
        if a.iter().sum::<i64>() > 0 {
            1
        } else {
            -1
        }
    }

    fn compute_bracket(&self, x: usize, y: usize) -> Structure {
        let rank = self.rank();
        match (self.root_of(x), self.root_of(y)) {
            (None, None) => Vec::new(),
            (None, Some(b)) => {
                let c: i64 = (0..rank).map(|j| self.cartan[x][j] * b[j]).sum();
                if c == 0 {
                    Vec::new()
                } else {
                    vec![(y, c)]
                }
            }
            (Some(_), None) => self
                .compute_bracket(y, x)
                .into_iter()
                .map(|(z, c)| (z, -c))
                .collect(),
            (Some(a), Some(b)) => {
                let sab = Self::root_sign(a) * Self::root_sign(b);
                let c: Vec<i64> = a.iter().zip(b).map(|(p, q)| p + q).collect();
                if c.iter().all(|&v| v == 0) {
                    (0..rank)
                        .filter(|&i| a[i] != 0)
                        .map(|i| (i, -sab * a[i]))
                        .collect()
                } else if let Some(&z) = self.root_index.get(&c) {
                    vec![(z, sab * self.cocycle(a, b) * Self::root_sign(&c))]
                } else {
                    Vec::new()
                }
            }
        }
    }

    pub fn bracket_basis(&self, x: usize, y: usize) -> &[(usize, i64)] {
        &self.table[x][y]
    }

    pub fn bracket(&self, x: &LieVector, y: &LieVector) -> LieVector {
        let mut out = LieVector::zero();
        for (i, a) in x.terms() {
            for (j, b) in y.terms() {
                let ab = a * b;
                for &(z, c) in self.bracket_basis(i, j) {
                    out.add_term(z, &ab.scale_rational(&c.into()));
                }
            }
        }
        out
    }

    /// The invariant form with `(h_i|h_j) = A_ij` and `(e_α|f_α) = 1`.
    pub fn form_basis(&self, x: usize, y: usize) -> i64 {
        match (self.root_of(x), self.root_of(y)) {
            (None, None) => self.cartan[x][y],
            (Some(a), Some(b)) if a.iter().zip(b).all(|(p, q)| p + q == 0) => 1,
            _ => 0,
        }
    }

    pub fn form(&self, x: &LieVector, y: &LieVector) -> Scalar {
        let mut t = Scalar::zero();
        for (i, a) in x.terms() {
            for (j, b) in y.terms() {
                let f = self.form_basis(i, j);
                if f != 0 {
                    t += &(a * b).scale_rational(&f.into());
                }
            }
        }
        t
    }

    /// `(σa)_{σ(i)} = a_i`.
    fn permute(&self, a: &[i64]) -> Vec<i64> {
        let mut out = vec![0; a.len()];
        for (i, &v) in a.iter().enumerate() {
            out[self.sigma_perm[i]] = v;
        }
        out
    }

    fn compute_sigma(&self) -> Vec<(usize, i64)> {
        let rank = self.rank();
        let mut map = vec![(0, 0); self.dim()];
        for (i, m) in map.iter_mut().enumerate().take(rank) {
            *m = (self.sigma_perm[i], 1);
        }
        let mut eta: HashMap<Vec<i64>, i64> = HashMap::new();
        let positive = &self.roots[..self.roots.len() / 2];
        for a in positive {
            let sign = if a.iter().sum::<i64>() == 1 {
                1
            } else {
                let (i, b) = (0..rank)
                    .find_map(|i| {
                        let mut b = a.clone();
                        b[i] -= 1;
                        (b.iter().all(|&v| v >= 0) && self.root_index.contains_key(&b))
                            .then_some((i, b))
                    })
                    .expect("every non-simple positive root drops to a root");
                let ai = unit(rank, i);
                self.cocycle(&ai, &b)
                    * eta[&b]
                    * self.cocycle(&self.permute(&ai), &self.permute(&b))
            };
            eta.insert(a.clone(), sign);
            let pa = self.permute(a);
            map[self.root_index[a]] = (self.root_index[&pa], sign);
            map[self.root_index[&neg(a)]] = (self.root_index[&neg(&pa)], sign);
        }
        map
    }

    /// Exhaustive check of the algebra axioms on basis elements: antisymmetry,
    /// Jacobi and form invariance on every triple, `[e_α, f_α] = h_α`,
    /// `(h_i|h_i) = 2`, and σ being a form-preserving automorphism with
    /// `σ^r = id`. Returns a description of each violation.
    pub fn check_invariants(&self) -> Vec<String> {
        let d = self.dim();
        let mut bad = Vec::new();
        let ad = |x: usize, v: &BTreeMap<usize, i64>| -> BTreeMap<usize, i64> {
            let mut out = BTreeMap::new();
            for (&y, &c) in v {
                for &(z, e) in self.bracket_basis(x, y) {
                    *out.entry(z).or_insert(0) += c * e;
                }
            }
            out.retain(|_, c| *c != 0);
            out
        };
        let single = |x: usize| BTreeMap::from([(x, 1i64)]);
        let form_with = |v: &BTreeMap<usize, i64>, z: usize| -> i64 {
            v.iter().map(|(&y, &c)| c * self.form_basis(y, z)).sum()
        };
        for x in 0..d {
            for y in 0..d {
                let xy = ad(x, &single(y));
                let yx = ad(y, &single(x));
                if xy.iter().any(|(z, c)| yx.get(z) != Some(&-c)) || xy.len() != yx.len() {
                    bad.push(format!("[b{x}, b{y}] is not antisymmetric"));
                }
                for z in 0..d {
                    let mut j = ad(x, &ad(y, &single(z)));
                    for (w, c) in ad(y, &ad(z, &single(x))).into_iter().chain(ad(z, &xy)) {
                        *j.entry(w).or_insert(0) += c;
                    }
                    if j.values().any(|&c| c != 0) {
                        bad.push(format!("Jacobi fails on (b{x}, b{y}, b{z})"));
                    }
                    if form_with(&xy, z) != form_with(&ad(y, &single(z)), x) {
                        bad.push(format!("form not invariant on (b{x}, b{y}, b{z})"));
                    }
                }
            }
        }
        for k in 0..self.roots.len() / 2 {
            let (e, f) = (self.rank() + k, self.rank() + self.roots.len() / 2 + k);
            let h: BTreeMap<usize, i64> = self.roots[k]
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| (i, c))
                .collect();
            if ad(e, &single(f)) != h {
                bad.push(format!("[e, f] ≠ h for root {:?}", self.roots[k]));
            }
        }
        for i in 0..self.rank() {
            if self.form_basis(i, i) != 2 {
                bad.push(format!("(h{i}|h{i}) ≠ 2"));
            }
        }
        let r = self.kind.r();
        for x in 0..d {
            let mut cur = (x, 1);
            for _ in 0..r {
                let (y, s) = self.sigma[cur.0];
                cur = (y, cur.1 * s);
            }
            if cur != (x, 1) {
                bad.push(format!("σ^{r}(b{x}) ≠ b{x}"));
            }
            for y in 0..d {
                let (sx, ex) = self.sigma[x];
                let (sy, ey) = self.sigma[y];
                let lhs: BTreeMap<usize, i64> = ad(x, &single(y))
                    .into_iter()
                    .map(|(z, c)| (self.sigma[z].0, c * self.sigma[z].1))
                    .collect();
                let rhs: BTreeMap<usize, i64> = ad(sx, &single(sy))
                    .into_iter()
                    .map(|(z, c)| (z, c * ex * ey))
                    .collect();
                if lhs != rhs {
                    bad.push(format!("σ does not preserve [b{x}, b{y}]"));
                }
                if self.form_basis(sx, sy) * ex * ey != self.form_basis(x, y) {
                    bad.push(format!("σ does not preserve (b{x}|b{y})"));
                }
            }
        }
        bad
    }

    /// σ on a basis element: a signed basis element.
    pub fn sigma_basis(&self, x: usize) -> (usize, i64) {
        self.sigma[x]
    }

    pub fn sigma(&self, x: &LieVector) -> LieVector {
        let mut out = LieVector::zero();
        for (i, c) in x.terms() {
            let (j, s) = self.sigma[i];
            out.add_term(j, &c.scale_rational(&s.into()));
        }
        out
    }

    pub fn sigma_pow(&self, x: &LieVector, p: usize) -> LieVector {
        (0..p).fold(x.clone(), |acc, _| self.sigma(&acc))
    }

    /// Σ_p σ^p(x) over one period of σ.
    pub fn orbit_sum(&self, x: &LieVector) -> LieVector {
        (0..self.kind.r()).fold(LieVector::zero(), |acc, p| acc.add(&self.sigma_pow(x, p)))
    }
}

fn unit(rank: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; rank];
    v[i] = 1;
    v
}

fn neg(a: &[i64]) -> Vec<i64> {
    a.iter().map(|x| -x).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn kinds() -> Vec<AlgebraKind> {
        AlgebraKind::test_set()
    }

    #[test]
    fn dimensions() {
        for n in 2..5 {
            if n >= 3 {
                assert_eq!(
                    SimpleLieAlgebra::new(AlgebraKind::a_odd(n).unwrap()).dim(),
                    4 * n * n - 1
                );
            }
            assert_eq!(
                SimpleLieAlgebra::new(AlgebraKind::a_even(n).unwrap()).dim(),
                4 * n * n + 4 * n
            );
            assert_eq!(
                SimpleLieAlgebra::new(AlgebraKind::d(n).unwrap()).dim(),
                (n + 1) * (2 * n + 1)
            );
        }
        assert_eq!(SimpleLieAlgebra::new(AlgebraKind::d4()).dim(), 28);
    }

    #[test]
    fn antisymmetry_and_jacobi_on_basis() {
        for kind in kinds() {
            let g = SimpleLieAlgebra::new(kind);
            let d = g.dim();
            for x in 0..d {
                for y in 0..d {
                    let xy = g.bracket(&LieVector::basis(x), &LieVector::basis(y));
                    let yx = g.bracket(&LieVector::basis(y), &LieVector::basis(x));
                    assert!(xy.add(&yx).is_zero());
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            for _ in 0..300 {
                let [x, y, z] = [0; 3].map(|_| LieVector::basis(rng.gen_range(0..d)));
                let j = g
                    .bracket(&x, &g.bracket(&y, &z))
                    .add(&g.bracket(&y, &g.bracket(&z, &x)))
                    .add(&g.bracket(&z, &g.bracket(&x, &y)));
                assert!(j.is_zero(), "{kind}");
            }
        }
    }

    #[test]
    fn form_is_invariant_and_chevalley_relations_hold() {
        for kind in kinds() {
            let g = SimpleLieAlgebra::new(kind);
            let d = g.dim();
            for x in 0..d {
                for y in 0..d {
                    for z in 0..d {
                        let [bx, by, bz] = [x, y, z].map(LieVector::basis);
                        let lhs = g.form(&g.bracket(&bx, &by), &bz);
                        let rhs = g.form(&bx, &g.bracket(&by, &bz));
                        assert_eq!(lhs, rhs, "{kind} {x} {y} {z}");
                    }
                }
            }
            for i in 0..g.rank() {
                let hf = g.bracket(&LieVector::basis(g.e(i)), &LieVector::basis(g.f(i)));
                assert_eq!(hf, LieVector::basis(g.h(i)));
            }
        }
    }

    #[test]
    fn exhaustive_invariants() {
        for kind in kinds() {
            let bad = SimpleLieAlgebra::new(kind).check_invariants();
            assert!(bad.is_empty(), "{kind}: {:?}", &bad[..bad.len().min(3)]);
        }
    }

    #[test]
    fn sigma_is_an_automorphism_of_order_r() {
        for kind in kinds() {
            let g = SimpleLieAlgebra::new(kind);
            let d = g.dim();
            for x in 0..d {
                let bx = LieVector::basis(x);
                assert_eq!(g.sigma_pow(&bx, kind.r()), bx);
                for y in 0..d {
                    let by = LieVector::basis(y);
                    let lhs = g.sigma(&g.bracket(&bx, &by));
                    let rhs = g.bracket(&g.sigma(&bx), &g.sigma(&by));
                    assert_eq!(lhs, rhs, "{kind} {x} {y}");
                    assert_eq!(g.form(&g.sigma(&bx), &g.sigma(&by)), g.form(&bx, &by));
                }
            }
            for i in 0..g.rank() {
                let j = g.sigma_perm()[i];
                assert_eq!(g.sigma_basis(g.e(i)), (g.e(j), 1));
                assert_eq!(g.sigma_basis(g.f(i)), (g.f(j), 1));
            }
        }
    }
}
