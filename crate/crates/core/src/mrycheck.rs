//! Presentation data (extended Cartan matrices and relation coefficients),
//! the quadratic fermion fields assigned to each generator, and the
//! symbolic relation checker.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cliffspace::{beta_letters, AlgebraKind, Family, Ghost, Letter, LetterSum};
use crate::fieldcalc::{ad_chain, bracket, normal_pair, LocalBracket, QuadField};
use crate::rational::Rational;
use crate::report::{elapsed_ms, Record, Residual};
use crate::scalars::Scalar;

/// Generators of the presentation: c̸, α_i(·), X(α_i,·), X(−α_i,·).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GeneratorSymbol {
    Central,
    H(usize),
    XPlus(usize),
    XMinus(usize),
}

impl GeneratorSymbol {
    /// Every non-central generator of `kind`, H first.
    pub fn all(kind: AlgebraKind) -> Vec<GeneratorSymbol> {
        let n = kind.n();
        let mut v: Vec<_> = (0..=n).map(GeneratorSymbol::H).collect();
        v.extend((0..=n).map(GeneratorSymbol::XPlus));
        v.extend((0..=n).map(GeneratorSymbol::XMinus));
        v
    }

    pub fn x(i: usize, sign: i64) -> GeneratorSymbol {
        if sign > 0 {
            GeneratorSymbol::XPlus(i)
        } else {
            GeneratorSymbol::XMinus(i)
        }
    }

    pub fn index(&self) -> Option<usize> {
        match *self {
            GeneratorSymbol::Central => None,
            GeneratorSymbol::H(i) | GeneratorSymbol::XPlus(i) | GeneratorSymbol::XMinus(i) => {
                Some(i)
            }
        }
    }
}

impl fmt::Display for GeneratorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSymbol::Central => f.write_str("c"),
            GeneratorSymbol::H(i) => write!(f, "H{i}"),
            GeneratorSymbol::XPlus(i) => write!(f, "X+{i}"),
            GeneratorSymbol::XMinus(i) => write!(f, "X-{i}"),
        }
    }
}

pub fn extended_cartan(kind: AlgebraKind) -> Vec<Vec<i64>> {
    let n = kind.n();
    if kind.family() == Family::D4Triality {
        return vec![vec![2, -1, 0], vec![-1, 2, -3], vec![0, -1, 2]];
    }
    let mut a = vec![vec![0i64; n + 1]; n + 1];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    for i in 1..n.saturating_sub(1) {
        a[i][i + 1] = -1;
        a[i + 1][i] = -1;
    }
    // (a_{n-1,n}, a_{n,n-1}) and the node 0 attachment (j, a_0j, a_j0)
    let ((up, down), (j, a0j, aj0)) = match kind.family() {
        Family::AOdd => ((-2, -1), (2, -1, -1)),
        Family::D => ((-1, -2), (1, -2, -1)),
        Family::AEven => ((-1, -2), (1, -1, -2)),
        Family::D4Triality => unreachable!(),
    };
    a[n - 1][n] = up;
    a[n][n - 1] = down;
    a[0][j] = a0j;
    a[j][0] = aj0;
    a
}

/// The symmetrizing vector: (α_i|α_j) = d_i a_ij.
pub fn d_vector(kind: AlgebraKind) -> Vec<Rational> {
    let n = kind.n();
    let half = Rational::new(1, 2);
    let one = Rational::one();
    match kind.family() {
        Family::AOdd => {
            let mut d = vec![half; n + 1];
            d[n] = one;
            d
        }
        Family::D => {
            let mut d = vec![one; n + 1];
            d[0] = half.clone();
            d[n] = half;
            d
        }
        Family::AEven => {
            let mut d = vec![half; n + 1];
            d[0] = one;
            d[n] = Rational::new(1, 4);
            d
        }
        Family::D4Triality => vec![Rational::new(1, 3), Rational::new(1, 3), one],
    }
}

/// Structure constants of the presentation for one kind.
#[derive(Debug, Clone)]
pub struct RelationTable {
    pub kind: AlgebraKind,
    pub cartan: Vec<Vec<i64>>,
    pub d_vector: Vec<Rational>,
}

impl RelationTable {
    pub fn new(kind: AlgebraKind) -> Self {
        RelationTable {
            kind,
            cartan: extended_cartan(kind),
            d_vector: d_vector(kind),
        }
    }

    pub fn a(&self, i: usize, j: usize) -> i64 {
        self.cartan[i][j]
    }

    fn r(&self) -> i64 {
        self.kind.r() as i64
    }

    /// Relation number (1–5) governing [α_i, α_j].
    pub fn hh_relation(&self, i: usize, j: usize) -> u8 {
        let n = self.kind.n();
        let (i, j) = (i.min(j), i.max(j));
        match (i, j) {
            (0, 0) => 1,
            (0, _) => 2,
            _ if (i, j) == (n - 1, n) => 4,
            _ if (i, j) == (n, n) => 5,
            _ => 3,
        }
    }

    /// C_ij in [α_i(k), α_j(l)] = C_ij k δ_{k,−l} c̸.
    pub fn hh_coeff(&self, i: usize, j: usize) -> Scalar {
        let fam = self.kind.family();
        let n = self.kind.n();
        let r = self.r();
        let (i, j) = (i.min(j), i.max(j));
        let v = match self.hh_relation(i, j) {
            1 if fam == Family::AEven => 2,
            1 => 2 * r,
            2 | 3 if fam == Family::D => self.a(i, j),
            2 | 3 => r * self.a(i, j),
            4 => {
                let f = match fam {
                    Family::AOdd | Family::D4Triality => 1,
                    Family::AEven => 4,
                    Family::D => 2,
                };
                f * self.a(n - 1, n)
            }
            _ => match fam {
                Family::AOdd | Family::D4Triality => 2,
                Family::AEven => 8,
                Family::D => 4,
            },
        };
        Scalar::from_int(v)
    }

    /// D_i in [X(α_i,k), X(−α_i,l)] = α_i(k+l) + D_i k δ_{k,−l} c̸.
    pub fn xx_ddelta(&self, i: usize) -> Scalar {
        let n = self.kind.n();
        let r = self.r();
        let dn = i64::from(i == n);
        let d0 = i64::from(i == 0);
        Scalar::from_int(match self.kind.family() {
            Family::AOdd | Family::D4Triality => r - dn * (r - 1),
            Family::AEven => r * (1 + dn * (r - 1)) - d0 * (r - 1),
            Family::D => 1 + (d0 + dn) * (r - 1),
        })
    }

    /// Number of ad X(±α_i) applied in the Serre relation for (i, j).
    pub fn serre_arity(&self, i: usize, j: usize) -> usize {
        (1 - self.a(i, j)) as usize
    }

    /// Relation number 9–12 for the Serre relation of (i, j).
    pub fn serre_relation(&self, i: usize, j: usize) -> u8 {
        (9 - self.a(i, j)) as u8
    }
}

/// Whether quadratic terms containing c or c* are kept in the fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CPolicy {
    Eliminate,
    Retain,
}

/// The quadratic field attached to every generator.
#[derive(Debug, Clone)]
pub struct FieldAssignment {
    pub kind: AlgebraKind,
    pub policy: CPolicy,
    h: Vec<QuadField>,
    x_plus: Vec<QuadField>,
    x_minus: Vec<QuadField>,
}

fn ls(l: Letter) -> LetterSum {
    LetterSum::from(l)
}

impl FieldAssignment {
    pub fn new(kind: AlgebraKind, policy: CPolicy) -> Self {
        let n = kind.n();
        let int = Scalar::from_int;
        let r2 = Scalar::sqrt2();
        let e = |i: usize| ls(Letter::eps(i));
        let es = |i: usize| ls(Letter::eps(i).star());
        let b = |i: usize| ls(Letter::eps_bar(i));
        let bs = |i: usize| ls(Letter::eps_bar(i).star());
        let ge = ls(Letter::ghost(Ghost::E));
        let geb = ls(Letter::ghost(Ghost::EBar));
        let beta = beta_letters(kind);
        let betas = beta.star();
        let np = |x: &LetterSum, y: &LetterSum| normal_pair(x, y);
        let sum = |fs: &[QuadField]| fs.iter().fold(QuadField::zero(), |acc, f| &acc + f);

        let mut h = vec![QuadField::zero(); n + 1];
        let mut xp = vec![QuadField::zero(); n + 1];
        let mut xm = vec![QuadField::zero(); n + 1];

        // The middle nodes are shared by the two A families.
        let a_middle =
            |h: &mut Vec<QuadField>, xp: &mut Vec<QuadField>, xm: &mut Vec<QuadField>| {
                for i in 1..n {
                    xp[i] = sum(&[np(&e(i), &es(i + 1)), np(&bs(i), &b(i + 1))]);
                    xm[i] = sum(&[np(&e(i + 1), &es(i)), np(&bs(i + 1), &b(i))]);
                    h[i] = sum(&[
                        np(&e(i), &es(i)),
                        np(&es(i + 1), &e(i + 1)),
                        np(&bs(i), &b(i)),
                        np(&b(i + 1), &bs(i + 1)),
                    ]);
                }
            };

        match kind.family() {
            Family::AOdd => {
                xp[0] = sum(&[np(&b(2), &betas), np(&es(2), &b(1))]);
                xm[0] = sum(&[np(&beta, &bs(2)), np(&bs(1), &e(2))]);
                h[0] = sum(&[
                    np(&betas, &beta),
                    np(&es(2), &e(2)),
                    np(&b(1), &bs(1)),
                    np(&b(2), &bs(2)),
                ]);
                a_middle(&mut h, &mut xp, &mut xm);
                xp[n] = np(&e(n), &bs(n));
                xm[n] = np(&b(n), &es(n));
                h[n] = sum(&[np(&e(n), &es(n)), np(&bs(n), &b(n))]);
            }
            Family::D => {
                xp[0] = np(&geb, &betas).scale(&r2);
                xm[0] = np(&beta, &geb).scale(&r2);
                h[0] = np(&betas, &beta).scale(&int(2));
                for i in 1..n {
                    xp[i] = np(&e(i), &es(i + 1));
                    xm[i] = np(&e(i + 1), &es(i));
                    h[i] = sum(&[np(&e(i), &es(i)), np(&es(i + 1), &e(i + 1))]);
                }
                xp[n] = np(&e(n), &ge).scale(&r2);
                xm[n] = np(&ge, &es(n)).scale(&r2);
                h[n] = np(&e(n), &es(n)).scale(&int(2));
            }
            Family::AEven => {
                xp[0] = np(&b(1), &betas);
                xm[0] = np(&beta, &bs(1));
                h[0] = sum(&[np(&b(1), &bs(1)), np(&betas, &beta)]);
                a_middle(&mut h, &mut xp, &mut xm);
                xp[n] = sum(&[np(&e(n), &geb), np(&bs(n), &ge)]).scale(&r2);
                xm[n] = sum(&[np(&ge, &es(n)), np(&geb, &b(n))]).scale(&r2);
                h[n] = sum(&[np(&e(n), &es(n)), np(&bs(n), &b(n))]).scale(&int(2));
            }
            Family::D4Triality => {
                let w = Scalar::omega();
                let w2 = &w * &w;
                xp[0] = sum(&[
                    np(&b(1), &betas),
                    np(&bs(1), &es(1)).scale(&w),
                    np(&bs(2), &es(2)).scale(&w2),
                ]);
                xm[0] = sum(&[
                    np(&beta, &bs(1)),
                    np(&e(1), &b(1)).scale(&w2),
                    np(&e(2), &b(2)).scale(&w),
                ]);
                xp[1] = sum(&[np(&e(1), &es(2)), np(&b(2), &bs(1)), np(&b(2), &b(1))]);
                xm[1] = sum(&[np(&e(2), &es(1)), np(&b(1), &bs(2)), np(&bs(1), &bs(2))]);
                xp[2] = np(&e(2), &bs(2));
                xm[2] = np(&b(2), &es(2));
                h[0] = sum(&[
                    np(&es(1), &e(1)),
                    np(&betas, &beta),
                    np(&es(2), &e(2)),
                    np(&bs(2), &b(2)),
                ]);
                h[1] = sum(&[
                    np(&e(1), &es(1)),
                    np(&es(2), &e(2)),
                    np(&b(2), &bs(2)).scale(&int(2)),
                ]);
                h[2] = sum(&[np(&e(2), &es(2)), np(&bs(2), &b(2))]);
            }
        }

        if policy == CPolicy::Eliminate {
            for f in h.iter_mut().chain(xp.iter_mut()).chain(xm.iter_mut()) {
                *f = f.without_c();
            }
        }
        FieldAssignment {
            kind,
            policy,
            h,
            x_plus: xp,
            x_minus: xm,
        }
    }

    /// The field of a non-central generator; `None` for c̸.
    pub fn field(&self, symbol: GeneratorSymbol) -> Option<&QuadField> {
        match symbol {
            GeneratorSymbol::Central => None,
            GeneratorSymbol::H(i) => self.h.get(i),
            GeneratorSymbol::XPlus(i) => self.x_plus.get(i),
            GeneratorSymbol::XMinus(i) => self.x_minus.get(i),
        }
    }

    fn field_mut(&mut self, symbol: GeneratorSymbol) -> Option<&mut QuadField> {
        match symbol {
            GeneratorSymbol::Central => None,
            GeneratorSymbol::H(i) => self.h.get_mut(i),
            GeneratorSymbol::XPlus(i) => self.x_plus.get_mut(i),
            GeneratorSymbol::XMinus(i) => self.x_minus.get_mut(i),
        }
    }

    /// A copy with the first coefficient of one generator field raised by 1.
    pub fn perturbed(&self, symbol: GeneratorSymbol) -> FieldAssignment {
        let mut out = self.clone();
        if let Some(f) = out.field_mut(symbol) {
            let first = f.terms().next().map(|(&pair, _)| pair);
            if let Some((a, b)) = first {
                f.add_pair(a, b, &Scalar::one());
            }
        }
        out
    }

    fn get(&self, symbol: GeneratorSymbol) -> &QuadField {
        self.field(symbol).expect("generator index in range")
    }
}

/// The c-eliminated field of `symbol`; `None` for c̸ or an out-of-range index.
pub fn generator_field(kind: AlgebraKind, symbol: GeneratorSymbol) -> Option<QuadField> {
    FieldAssignment::new(kind, CPolicy::Eliminate)
        .field(symbol)
        .cloned()
}

/// The right-hand side of [G(z), H(w)] predicted by the relation table, as a
/// local bracket, whenever the presentation states it directly (with the
/// reversed-order forms of relations 6 and 8 included).
pub fn expected_bracket(
    table: &RelationTable,
    fields: &FieldAssignment,
    g: GeneratorSymbol,
    h: GeneratorSymbol,
) -> Option<LocalBracket> {
    use GeneratorSymbol::*;
    let zero = || LocalBracket::default();
    let scaled = |sym: GeneratorSymbol, c: i64| fields.get(sym).scale(&Scalar::from_int(c));
    Some(match (g, h) {
        (Central, _) | (_, Central) => zero(),
        (H(i), H(j)) => LocalBracket {
            delta_part: QuadField::zero(),
            ddelta_scalar: table.hh_coeff(i, j),
        },
        (H(i), XPlus(j)) => LocalBracket {
            delta_part: scaled(XPlus(j), table.a(i, j)),
            ddelta_scalar: Scalar::zero(),
        },
        (H(i), XMinus(j)) => LocalBracket {
            delta_part: scaled(XMinus(j), -table.a(i, j)),
            ddelta_scalar: Scalar::zero(),
        },
        // [X(z), α(w)] = −[α(w), X(z)]; the field part relocates freely and
        // the relation carries no derivative term.
        (XPlus(j), H(i)) => LocalBracket {
            delta_part: scaled(XPlus(j), -table.a(i, j)),
            ddelta_scalar: Scalar::zero(),
        },
        (XMinus(j), H(i)) => LocalBracket {
            delta_part: scaled(XMinus(j), table.a(i, j)),
            ddelta_scalar: Scalar::zero(),
        },
        (XPlus(i), XPlus(j)) | (XMinus(i), XMinus(j)) if i == j => zero(),
        (XPlus(i), XMinus(j)) if i == j => LocalBracket {
            delta_part: fields.get(H(i)).clone(),
            ddelta_scalar: table.xx_ddelta(i),
        },
        // [X(−α_i,z), X(α_i,w)] = −α_i(w)δ + D_i ∂_wδ: the ∂δ term is symmetric.
        (XMinus(i), XPlus(j)) if i == j => LocalBracket {
            delta_part: -fields.get(H(i)),
            ddelta_scalar: table.xx_ddelta(i),
        },
        (XPlus(_), XMinus(_)) | (XMinus(_), XPlus(_)) => zero(),
        _ => return None,
    })
}

/// One instance of a relation: its number and index tuple (a trailing ±1
/// is the root sign where relevant).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RelationInstance {
    pub id: u8,
    pub indices: Vec<i64>,
}

pub fn instances(kind: AlgebraKind) -> Vec<RelationInstance> {
    let table = RelationTable::new(kind);
    let n = kind.n();
    let mut out = Vec::new();
    let inst = |id: u8, indices: Vec<i64>| RelationInstance { id, indices };
    for i in 0..=n {
        for j in 0..=n {
            out.push(inst(table.hh_relation(i, j), vec![i as i64, j as i64]));
            for s in [1, -1] {
                out.push(inst(6, vec![i as i64, j as i64, s]));
            }
            out.push(inst(8, vec![i as i64, j as i64]));
            if i != j {
                for s in [1, -1] {
                    out.push(inst(
                        table.serre_relation(i, j),
                        vec![i as i64, j as i64, s],
                    ));
                }
            }
        }
        for s in [1, -1] {
            out.push(inst(7, vec![i as i64, s]));
        }
    }
    out.sort();
    out
}

fn strip_local(b: LocalBracket, policy: CPolicy) -> LocalBracket {
    match policy {
        CPolicy::Eliminate => b,
        CPolicy::Retain => LocalBracket {
            delta_part: b.delta_part.without_c(),
            ddelta_scalar: b.ddelta_scalar,
        },
    }
}

/// Computes the residual of one relation instance.
pub fn check_relation(
    fields: &FieldAssignment,
    table: &RelationTable,
    instance: &RelationInstance,
) -> Record {
    use GeneratorSymbol::*;
    let start = Instant::now();
    let kind = fields.kind;
    let ix = &instance.indices;
    let u = |k: usize| ix[k] as usize;
    let local = |g: GeneratorSymbol, h: GeneratorSymbol| {
        let got = bracket(fields.get(g), fields.get(h), kind);
        let expected =
            expected_bracket(table, fields, g, h).expect("relation has a stated right-hand side");
        Residual::Local(strip_local(got.sub(&expected), fields.policy))
    };
    let residual = match instance.id {
        1..=5 => local(H(u(0)), H(u(1))),
        6 => local(H(u(0)), GeneratorSymbol::x(u(1), ix[2])),
        7 => local(
            GeneratorSymbol::x(u(0), ix[1]),
            GeneratorSymbol::x(u(0), ix[1]),
        ),
        8 => local(XPlus(u(0)), XMinus(u(1))),
        _ => {
            let (i, j, s) = (u(0), u(1), ix[2]);
            let op = fields.get(GeneratorSymbol::x(i, s)).clone();
            let ops = vec![op; table.serre_arity(i, j)];
            let chain = ad_chain(&ops, fields.get(GeneratorSymbol::x(j, s)), kind)
                .expect("arity is at most 4");
            let chain = match fields.policy {
                CPolicy::Eliminate => chain,
                CPolicy::Retain => chain.without_c(),
            };
            Residual::Chain(chain)
        }
    };
    Record::new(
        instance.id.to_string(),
        instance.indices.clone(),
        residual,
        elapsed_ms(start),
    )
}

/// Checks every relation instance for the standard field assignment.
pub fn check_all(kind: AlgebraKind) -> Report {
    check_all_with(&FieldAssignment::new(kind, CPolicy::Eliminate))
}

pub fn check_all_with(fields: &FieldAssignment) -> Report {
    let table = RelationTable::new(fields.kind);
    let relations: Vec<Record> = instances(fields.kind)
        .par_iter()
        .map(|inst| check_relation(fields, &table, inst))
        .collect();
    Report {
        kind: fields.kind.family(),
        n: fields.kind.n(),
        relations,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub kind: Family,
    pub n: usize,
    pub relations: Vec<Record>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.relations.iter().all(Record::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.relations.iter().filter(|r| !r.passed())
    }

    pub fn render_text(&self) -> String {
        let mut s = format!("{} n={}\n", self.kind, self.n);
        for r in &self.relations {
            s.push_str(&format!("  {r}\n"));
        }
        let pass = self.relations.iter().filter(|r| r.passed()).count();
        s.push_str(&format!("  {pass}/{} passed\n", self.relations.len()));
        s
    }
}

/// Z × Q̂ degree: the s-degree and root coordinates over α₀, …, α_n.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Degree {
    pub s_degree: i64,
    pub root_part: Vec<i64>,
}

impl Degree {
    pub fn add(&self, other: &Degree) -> Degree {
        Degree {
            s_degree: self.s_degree + other.s_degree,
            root_part: self
                .root_part
                .iter()
                .zip(&other.root_part)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

pub fn degree(kind: AlgebraKind, symbol: GeneratorSymbol, k: i64) -> Degree {
    let mut root_part = vec![0; kind.n() + 1];
    let s_degree = match symbol {
        GeneratorSymbol::Central => 0,
        GeneratorSymbol::H(_) => k,
        GeneratorSymbol::XPlus(i) => {
            root_part[i] = 1;
            k
        }
        GeneratorSymbol::XMinus(i) => {
            root_part[i] = -1;
            k
        }
    };
    Degree {
        s_degree,
        root_part,
    }
}
