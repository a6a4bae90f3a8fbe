//! Acceptance run: one pass/fail line per criterion, nonzero exit on any
//! failure.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use toroidal_core::cliffspace::AlgebraKind;
use toroidal_core::fieldcalc::bracket;
use toroidal_core::loopcore::{check_psi_homomorphism, PsiReading};
use toroidal_core::mrycheck::{
    check_all, CPolicy, FieldAssignment, GeneratorSymbol, RelationTable,
};
use toroidal_core::suites::{run, scalar_check, RunConfig, Suite};
use toroidal_core::Scalar;

struct Outcome {
    pass: bool,
    detail: String,
}

fn suite_over_kinds(suite: Suite) -> (usize, Vec<String>) {
    let mut records = 0;
    let mut failures = Vec::new();
    for kind in AlgebraKind::test_set() {
        let report =
            run(&RunConfig::new(kind).with_suites(&[suite])).expect("default config is valid");
        let s = report.suite(suite).expect("suite ran");
        records += s.records.len();
        failures.extend(
            s.records
                .iter()
                .filter(|r| !r.passed())
                .take(3)
                .map(|r| format!("{kind}: {r}")),
        );
    }
    (records, failures)
}

fn summarize(records: usize, failures: &[String], secs: f64, limit: f64) -> Outcome {
    let within = secs < limit;
    let mut detail = format!("{records} records, {} failing, {secs:.1} s", failures.len());
    if limit.is_finite() {
        detail.push_str(&format!(", limit {limit:.0} s"));
    }
    if let Some(f) = failures.first() {
        detail.push_str(&format!("; first: {f}"));
    }
    Outcome {
        pass: failures.is_empty() && within,
        detail,
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut ids = BTreeSet::new();
    let mut records = 0;
    let mut failures = Vec::new();
    for kind in AlgebraKind::test_set() {
        let report = check_all(kind);
        records += report.relations.len();
        ids.extend(report.relations.iter().map(|r| r.id.clone()));
        failures.extend(report.failures().take(3).map(|r| format!("{kind}: {r}")));
    }
    let all_ids: BTreeSet<String> = (1..=12).map(|i| i.to_string()).collect();
    if ids != all_ids {
        failures.push(format!("relation ids covered: {ids:?}"));
    }
    summarize(records, &failures, start.elapsed().as_secs_f64(), 60.0)
}

fn criterion_2() -> Outcome {
    // (kind, coefficient at i = 0, coefficient at i = n)
    let expected = [
        (AlgebraKind::a_odd(3).unwrap(), 2, 1),
        (AlgebraKind::d(2).unwrap(), 2, 2),
        (AlgebraKind::d(3).unwrap(), 2, 2),
        (AlgebraKind::a_even(2).unwrap(), 1, 4),
        (AlgebraKind::a_even(3).unwrap(), 1, 4),
        (AlgebraKind::d4(), 3, 1),
    ];
    let mut failures = Vec::new();
    for (kind, c0, cn) in expected {
        let fields = FieldAssignment::new(kind, CPolicy::Eliminate);
        let table = RelationTable::new(kind);
        for (i, want) in [(0, c0), (kind.n(), cn)] {
            let plus = fields.field(GeneratorSymbol::XPlus(i)).unwrap();
            let minus = fields.field(GeneratorSymbol::XMinus(i)).unwrap();
            let got = bracket(plus, minus, kind).ddelta_scalar;
            if got != Scalar::from_int(want) || table.xx_ddelta(i) != Scalar::from_int(want) {
                failures.push(format!(
                    "{kind} i={i}: fields give {got}, table gives {}, expected {want}",
                    table.xx_ddelta(i)
                ));
            }
        }
    }
    summarize(12, &failures, 0.0, f64::INFINITY)
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let (records, failures) = suite_over_kinds(Suite::Fock);
    summarize(records, &failures, start.elapsed().as_secs_f64(), 300.0)
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let (records, mut failures) = suite_over_kinds(Suite::Serre);
    let d4 = run(&RunConfig::new(AlgebraKind::d4()).with_suites(&[Suite::Serre])).unwrap();
    let recs = &d4.suite(Suite::Serre).unwrap().records;
    if !recs.iter().any(|r| r.id == "12") || !recs.iter().any(|r| r.id == "fock-12") {
        failures.push("d4-triality: no arity-4 chain checked".into());
    }
    summarize(
        records,
        &failures,
        start.elapsed().as_secs_f64(),
        f64::INFINITY,
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let (records, mut failures) = suite_over_kinds(Suite::Psi);
    for n in [2, 3] {
        let kind = AlgebraKind::a_even(n).unwrap();
        if check_psi_homomorphism(kind, 2, PsiReading::AEvenTInverse).all_pass() {
            failures.push(format!("{kind}: literal t^-1 reading unexpectedly passes"));
        }
    }
    summarize(
        records,
        &failures,
        start.elapsed().as_secs_f64(),
        f64::INFINITY,
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let (records, failures) = suite_over_kinds(Suite::Axioms);
    summarize(records, &failures, start.elapsed().as_secs_f64(), 120.0)
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let failures = scalar_check(1000, 0);
    summarize(
        1000,
        &failures,
        start.elapsed().as_secs_f64(),
        f64::INFINITY,
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 7] = [
        ("symbolic relations (1)-(12) on the test set", criterion_1),
        (
            "central coefficients of [X(a0),X(-a0)] and [X(an),X(-an)]",
            criterion_2,
        ),
        ("Fock commutators, energy <= 4, |k|,|l| <= 2", criterion_3),
        ("Serre chains, symbolic and on Fock states", criterion_4),
        ("psi homomorphism and pairing table", criterion_5),
        ("axiom suites", criterion_6),
        ("scalar field axioms and embedding", criterion_7),
    ];
    let mut all = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let out = f();
        all &= out.pass;
        println!(
            "criterion {}: {} - {name}: {}",
            i + 1,
            if out.pass { "PASS" } else { "FAIL" },
            out.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
