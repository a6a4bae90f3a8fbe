//! Batch runs of the verification suites and their reports.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cliffspace::{pairing, AlgebraKind, Letter};
use crate::fockrep::{
    apply_letter, apply_ordered_pair, commutator_batch, serre_check_fock, test_states,
    CommutatorCase, FockState, Mode, Operator, StateVector,
};
use crate::loopcore::{
    check_grading, check_pairing_table, check_psi_homomorphism, kahler_reduce, KahlerBasis,
    KahlerElement, PsiReading, SimpleLieAlgebra,
};
use crate::mrycheck::{
    check_all, check_relation, instances, CPolicy, FieldAssignment, GeneratorSymbol, RelationTable,
};
use crate::rational::Rational;
use crate::report::{elapsed_ms, Record, Residual, StateResidual};
use crate::scalars::Scalar;

/// Mismatch lists are truncated to this many entries.
const MAX_MESSAGES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("unknown suite `{0}` (expected symbolic-mry, serre, fock, psi or axioms)")]
    UnknownSuite(String),
    #[error("fock energy must be non-negative, got {0}")]
    NegativeEnergy(Rational),
    #[error("mode bound must be non-negative, got {0}")]
    NegativeBound(i64),
    #[error("state cap must be positive")]
    ZeroCap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    SymbolicMry,
    Serre,
    Fock,
    Psi,
    Axioms,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::SymbolicMry,
        Suite::Serre,
        Suite::Fock,
        Suite::Psi,
        Suite::Axioms,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::SymbolicMry => "symbolic-mry",
            Suite::Serre => "serre",
            Suite::Fock => "fock",
            Suite::Psi => "psi",
            Suite::Axioms => "axioms",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| ConfigError::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub kind: AlgebraKind,
    pub suites: Vec<Suite>,
    pub fock_energy: Rational,
    pub mode_bound: i64,
    /// At most this many Fock states, lowest energy first.
    pub state_cap: usize,
    pub format: OutputFormat,
    pub seed: u64,
    /// Record wall-clock times; off makes reports byte-reproducible.
    pub timings: bool,
}

impl RunConfig {
    /// All suites with energy 4, mode bound 2, 2000 states, seed 0.
    pub fn new(kind: AlgebraKind) -> Self {
        RunConfig {
            kind,
            suites: Suite::ALL.to_vec(),
            fock_energy: Rational::from_int(4),
            mode_bound: 2,
            state_cap: 2000,
            format: OutputFormat::Json,
            seed: 0,
            timings: true,
        }
    }

    pub fn with_suites(mut self, suites: &[Suite]) -> Self {
        self.suites = suites.to_vec();
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.fock_energy.is_negative() {
            return Err(ConfigError::NegativeEnergy(self.fock_energy.clone()));
        }
        if self.mode_bound < 0 {
            return Err(ConfigError::NegativeBound(self.mode_bound));
        }
        if self.state_cap == 0 {
            return Err(ConfigError::ZeroCap);
        }
        Ok(())
    }

    fn states(&self) -> Vec<FockState> {
        test_states(self.kind, &self.fock_energy, self.state_cap)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: Suite,
    pub records: Vec<Record>,
    pub pass_count: usize,
    pub fail_count: usize,
    pub ms: f64,
}

impl SuiteReport {
    fn new(name: Suite, records: Vec<Record>, ms: f64) -> Self {
        let pass_count = records.iter().filter(|r| r.passed()).count();
        let fail_count = records.len() - pass_count;
        SuiteReport {
            name,
            records,
            pass_count,
            fail_count,
            ms,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.fail_count == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub suites: Vec<SuiteReport>,
}

impl RunReport {
    pub fn all_pass(&self) -> bool {
        self.suites.iter().all(SuiteReport::all_pass)
    }

    pub fn suite(&self, name: Suite) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// One line per record, failures with a residual summary.
    pub fn render_text(&self) -> String {
        let c = &self.config;
        let names: Vec<&str> = c.suites.iter().map(|s| s.name()).collect();
        let mut s = format!(
            "{} | suites {} | fock energy {} | mode bound {} | seed {}\n",
            c.kind,
            names.join(","),
            c.fock_energy,
            c.mode_bound,
            c.seed
        );
        for suite in &self.suites {
            s.push_str(&format!(
                "\n== {} ({} pass, {} fail, {:.0} ms)\n",
                suite.name, suite.pass_count, suite.fail_count, suite.ms
            ));
            for r in &suite.records {
                s.push_str(&format!("  {r}\n"));
            }
        }
        s.push_str(if self.all_pass() {
            "\nall checks passed\n"
        } else {
            "\nFAILURES present\n"
        });
        s
    }
}

/// Runs the selected suites. Suites run in parallel; the report keeps the
/// configured order.
pub fn run(config: &RunConfig) -> Result<RunReport, ConfigError> {
    config.validate()?;
    let suites = config
        .suites
        .par_iter()
        .map(|&suite| {
            let start = Instant::now();
            let mut records = match suite {
                Suite::SymbolicMry => check_all(config.kind).relations,
                Suite::Serre => serre_suite(config),
                Suite::Fock => fock_suite(config),
                Suite::Psi => psi_suite(config),
                Suite::Axioms => axioms_suite(config),
            };
            let mut ms = elapsed_ms(start);
            if !config.timings {
                ms = 0.0;
                records.iter_mut().for_each(|r| r.ms = 0.0);
            }
            SuiteReport::new(suite, records, ms)
        })
        .collect();
    Ok(RunReport {
        config: config.clone(),
        suites,
    })
}

fn messages(mut v: Vec<String>) -> Residual {
    v.truncate(MAX_MESSAGES);
    Residual::Mismatches(v)
}

fn nonzero_residuals(vectors: Vec<StateVector>) -> Vec<StateResidual> {
    vectors
        .into_iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(state_index, vector)| StateResidual {
            state_index,
            vector,
        })
        .collect()
}

/// Symbolic ad-chains for every Serre instance, plus a Fock replay of each
/// on one seeded mode tuple.
fn serre_suite(config: &RunConfig) -> Vec<Record> {
    let kind = config.kind;
    let fields = FieldAssignment::new(kind, CPolicy::Eliminate);
    let table = RelationTable::new(kind);
    let serre: Vec<_> = instances(kind)
        .into_iter()
        .filter(|inst| inst.id >= 9)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let tuples: Vec<Vec<i64>> = serre
        .iter()
        .map(|inst| {
            let arity = table.serre_arity(inst.indices[0] as usize, inst.indices[1] as usize);
            (0..=arity)
                .map(|_| rng.gen_range(-config.mode_bound..=config.mode_bound))
                .collect()
        })
        .collect();
    let states = config.states();
    let mut out: Vec<Record> = serre
        .par_iter()
        .map(|inst| check_relation(&fields, &table, inst))
        .collect();
    let fock: Vec<Record> = serre
        .par_iter()
        .zip(&tuples)
        .map(|(inst, modes)| {
            let start = Instant::now();
            let (i, j, sign) = (
                inst.indices[0] as usize,
                inst.indices[1] as usize,
                inst.indices[2],
            );
            let residual = nonzero_residuals(serre_check_fock(&fields, i, j, sign, modes, &states));
            let mut indices = inst.indices.clone();
            indices.extend(modes);
            Record::new(
                format!("fock-{}", inst.id),
                indices,
                Residual::Fock(residual),
                elapsed_ms(start),
            )
        })
        .collect();
    out.extend(fock);
    out
}

/// `[G_k, H_l]` for every ordered generator pair and `|k|, |l| ≤ bound` on
/// the test states, against the relation table and the symbolic bracket.
fn fock_suite(config: &RunConfig) -> Vec<Record> {
    let kind = config.kind;
    let fields = FieldAssignment::new(kind, CPolicy::Eliminate);
    let b = config.mode_bound;
    let gens = GeneratorSymbol::all(kind);
    let mut cases = Vec::new();
    for &g in &gens {
        for &h in &gens {
            for k in -b..=b {
                for l in -b..=b {
                    cases.push(CommutatorCase { g, k, h, l });
                }
            }
        }
    }
    let states = config.states();
    let start = Instant::now();
    let results = commutator_batch(&fields, &cases, &states, 64);
    let per_case = elapsed_ms(start) / cases.len().max(1) as f64;
    cases
        .iter()
        .zip(results)
        .map(|(c, r)| {
            let mut residual = r.table;
            residual.extend(r.symbolic);
            Record::new(
                format!("[{},{}]", c.g, c.h),
                vec![c.k, c.l],
                Residual::Fock(residual),
                per_case,
            )
        })
        .collect()
}

fn psi_suite(config: &RunConfig) -> Vec<Record> {
    let kind = config.kind;
    let mut out = check_psi_homomorphism(kind, config.mode_bound, PsiReading::Corrected).relations;
    out.extend(check_pairing_table(kind));
    out.extend(check_grading(kind, config.mode_bound));
    out
}

fn axioms_suite(config: &RunConfig) -> Vec<Record> {
    let kind = config.kind;
    let states = config.states();
    let small: Vec<FockState> = states.iter().take(60).cloned().collect();
    type Check<'a> = (&'static str, Box<dyn Fn() -> Vec<String> + Sync + 'a>);
    let checks: Vec<Check> = vec![
        (
            "clifford",
            Box::new(|| clifford_check(kind, &small, config.mode_bound)),
        ),
        (
            "ordering",
            Box::new(|| ordering_check(kind, &small, config.mode_bound)),
        ),
        (
            "jacobi",
            Box::new(|| jacobi_check(kind, &states, config.mode_bound, 1000, config.seed)),
        ),
        (
            "lie-algebra",
            Box::new(|| SimpleLieAlgebra::new(kind).check_invariants()),
        ),
        ("kahler", Box::new(|| kahler_check(kind.r(), config.seed))),
        ("scalars", Box::new(|| scalar_check(1000, config.seed))),
    ];
    checks
        .par_iter()
        .map(|(name, f)| {
            let start = Instant::now();
            let bad = f();
            Record::new(*name, Vec::new(), messages(bad), elapsed_ms(start))
        })
        .collect()
}

fn half_modes(bound: i64) -> Vec<Mode> {
    let b = 2 * bound as i32 + 1;
    (-b..=b).step_by(2).map(Mode::half).collect()
}

/// `{a(m), b(n)} = ⟨a, b⟩ δ_{m+n,0}` on each state.
pub fn clifford_check(kind: AlgebraKind, states: &[FockState], bound: i64) -> Vec<String> {
    let letters = Letter::fock_letters(kind);
    let modes = half_modes(bound);
    let mut bad = Vec::new();
    for &a in &letters {
        for &b in &letters {
            let pab = pairing(kind, a, b).expect("letters of the kind");
            for &m in &modes {
                for &n in &modes {
                    let want = if m.twice() + n.twice() == 0 {
                        pab.clone()
                    } else {
                        Scalar::zero()
                    };
                    for st in states {
                        let v = StateVector::basis(st.clone());
                        let ab =
                            apply_letter(kind, a, m, &apply_letter(kind, b, n, &v).expect("valid"))
                                .expect("valid");
                        let ba =
                            apply_letter(kind, b, n, &apply_letter(kind, a, m, &v).expect("valid"))
                                .expect("valid");
                        if ab.add(&ba) != v.scale(&want) {
                            bad.push(format!("{{{a}({m}), {b}({n})}} on {st}"));
                        }
                    }
                }
            }
        }
    }
    bad
}

/// `:ab:_k = −:ba:_k` on each state.
pub fn ordering_check(kind: AlgebraKind, states: &[FockState], bound: i64) -> Vec<String> {
    let letters = Letter::fock_letters(kind);
    let mut bad = Vec::new();
    for &a in &letters {
        for &b in &letters {
            for k in -bound..=bound {
                for st in states {
                    let v = StateVector::basis(st.clone());
                    let ab = apply_ordered_pair(kind, a, b, k, &v);
                    let ba = apply_ordered_pair(kind, b, a, k, &v);
                    if !ab.add(&ba).is_zero() {
                        bad.push(format!(":{a}{b}:_{k} on {st}"));
                    }
                }
            }
        }
    }
    bad
}

/// Jacobi identity for random triples of generator modes, on a few random
/// test states each.
pub fn jacobi_check(
    kind: AlgebraKind,
    states: &[FockState],
    bound: i64,
    triples: usize,
    seed: u64,
) -> Vec<String> {
    let fields = FieldAssignment::new(kind, CPolicy::Eliminate);
    let gens = GeneratorSymbol::all(kind);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6a09_e667);
    let cases: Vec<[(GeneratorSymbol, i64); 3]> = (0..triples)
        .map(|_| {
            [(); 3].map(|_| {
                (
                    *gens.choose(&mut rng).expect("generators"),
                    rng.gen_range(-bound..=bound),
                )
            })
        })
        .collect();
    let picks: Vec<Vec<FockState>> = cases
        .iter()
        .map(|_| states.choose_multiple(&mut rng, 3).cloned().collect())
        .collect();
    cases
        .par_iter()
        .zip(&picks)
        .flat_map_iter(|(triple, picked)| {
            let op = |i: usize| {
                Operator::mode(fields.field(triple[i].0).expect("non-central"), triple[i].1)
            };
            let cyc = |a: usize, b: usize, c: usize| {
                Operator::commutator(op(a), Operator::commutator(op(b), op(c)))
            };
            let jac = Operator::Sum(vec![cyc(0, 1, 2), cyc(1, 2, 0), cyc(2, 0, 1)]);
            picked
                .iter()
                .filter(|st| {
                    !jac.apply(kind, &StateVector::basis((*st).clone()))
                        .is_zero()
                })
                .map(|st| {
                    let t: Vec<String> = triple.iter().map(|(g, k)| format!("{g}({k})")).collect();
                    format!("Jacobi({}) on {st}", t.join(", "))
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// The two reduction identities for pure and mixed forms, and the skew rule
/// `a(db) + (da)b = 0` on random admissible monomials.
pub fn kahler_check(r: usize, seed: u64) -> Vec<String> {
    let mut bad = Vec::new();
    let c0 = |c: i64| KahlerElement::single(KahlerBasis::c0(), Scalar::from_int(c));
    for l in -4..=4 {
        for k in -4..=4 {
            let want = if k + l == 0 {
                c0(k)
            } else {
                KahlerElement::zero()
            };
            if kahler_reduce((l, 0), (k, 0), r).ok() != Some(want.clone()) {
                bad.push(format!("s^{l} d(s^{k})"));
            }
            let mixed = want.add(&KahlerElement::single(
                KahlerBasis::Tdt { j: k + l },
                Scalar::one(),
            ));
            if kahler_reduce((l, -1), (k, 1), r).ok() != Some(mixed) {
                bad.push(format!("s^{l} t^-1 d(s^{k} t)"));
            }
        }
    }
    let ri = r as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xbb67_ae85);
    for _ in 0..1000 {
        let a = (rng.gen_range(-5..=5), rng.gen_range(-4..=4));
        let m = ri * rng.gen_range(-2..=2) - a.1;
        let b = (rng.gen_range(-5..=5), m);
        match (kahler_reduce(b, a, r), kahler_reduce(a, b, r)) {
            (Ok(x), Ok(y)) if x.add(&y).is_zero() => {}
            _ => bad.push(format!("skew rule fails for a = {a:?}, b = {b:?}")),
        }
    }
    bad
}

/// Field axioms, inverses and the complex embedding on random samples.
pub fn scalar_check(samples: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x3c6e_f372);
    let close = |a: num_complex::Complex64, b: num_complex::Complex64| {
        (a - b).norm() <= 1e-9 * (1.0 + a.norm().max(b.norm()))
    };
    let mut bad = Vec::new();
    for idx in 0..samples {
        let [x, y, z] = [(); 3].map(|_| Scalar::sample(&mut rng));
        let mut fails = Vec::new();
        if &(&x * &y) * &z != &x * &(&y * &z) {
            fails.push("associativity");
        }
        if &x * &y != &y * &x || &x + &y != &y + &x {
            fails.push("commutativity");
        }
        if &x * &(&y + &z) != &(&x * &y) + &(&x * &z) {
            fails.push("distributivity");
        }
        if &x * &Scalar::one() != x || &x + &Scalar::zero() != x || !(&x + &-&x).is_zero() {
            fails.push("identities");
        }
        if !x.is_zero() {
            match x.inverse() {
                Ok(inv) if (&x * &inv).is_one() => {
                    if !close(
                        x.embed() * inv.embed(),
                        num_complex::Complex64::new(1.0, 0.0),
                    ) {
                        fails.push("embedding of inverse");
                    }
                }
                _ => fails.push("inverse"),
            }
        }
        if !close((&x * &y).embed(), x.embed() * y.embed())
            || !close((&x + &y).embed(), x.embed() + y.embed())
        {
            fails.push("embedding");
        }
        bad.extend(fails.into_iter().map(|f| format!("sample {idx}: {f}")));
    }
    bad
}
