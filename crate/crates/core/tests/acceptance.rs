//! One PASS/FAIL line per acceptance criterion. Every comparison is exact;
//! the runtime budgets are wall-clock bounds on this machine.

use std::time::{Duration, Instant};

use ncblow_core::facts::{infer, FactBase, Literal, PairContext, Predicate, Provenance, Subject};
use ncblow_core::intersection::{default_repeated_blowup_report, ledger, MsDot, PairRelation};
use ncblow_core::verify::{run_suite, Suite, VerifyConfig};
use ncblow_core::{
    AlgebraDescriptor, CurvePoint, Divisor, ExecutionMode, Family, HilbertSeries, LaurentPoly,
    PdimStatus, Smoothness, TcrDescriptor,
};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    id: u32,
    name: &'static str,
    tolerance: &'static str,
    pass: bool,
    detail: String,
}

fn tcr(mu: i64) -> TcrDescriptor {
    TcrDescriptor::generic(Divisor::from_terms([(CurvePoint::base("M"), mu)])).unwrap()
}

fn within(elapsed: Duration, budget: Duration) -> bool {
    elapsed < budget
}

fn criterion_1() -> Outcome {
    let mut worst = Duration::ZERO;
    let mut failures = Vec::new();
    for mu in [3, 7, 9] {
        let b = tcr(mu);
        let p = CurvePoint::base("P");
        for (label, q) in [
            ("p = p'", p.clone()),
            ("p = tau^3 p'", CurvePoint::new("P", -3)),
            ("off orbit", CurvePoint::base("Q")),
        ] {
            let start = Instant::now();
            let f = Divisor::point(p.clone()).negate();
            let g = Divisor::point(q.clone()).negate();
            let hom = b.hom_saturated(&f, &g, 50, ExecutionMode::default());
            let eps = i64::from(p == q);
            let expected = &(&b.hilb_b() - &HilbertSeries::one())
                + &HilbertSeries::polynomial(LaurentPoly::monomial(0, eps));
            let rows_ok = (0..=50).all(|n| {
                hom.rows
                    .iter()
                    .find(|r| r.n == n)
                    .is_some_and(|r| BigInt::from(r.h0) == expected.coeff(n))
            });
            worst = worst.max(start.elapsed());
            if hom.series != expected || !rows_ok {
                failures.push(format!("mu={mu} {label}"));
            }
        }
    }
    Outcome {
        id: 1,
        name: "saturated Hom of point-ideal twists is hilb B - 1 + eps",
        tolerance: "exact, degrees 0..50, < 1 s per case",
        pass: failures.is_empty() && within(worst, Duration::from_secs(1)),
        detail: format!("9 cases, slowest {worst:?}, failing {failures:?}"),
    }
}

fn suite_outcome(id: u32, name: &'static str, tolerance: &'static str, suite: Suite) -> Outcome {
    let start = Instant::now();
    let o = run_suite(suite, &VerifyConfig::default());
    Outcome {
        id,
        name,
        tolerance,
        pass: o.passed(),
        detail: format!("{o} in {:?}", start.elapsed()),
    }
}

fn roundtrips() -> (
    Vec<(AlgebraDescriptor, ncblow_core::surface::Blowdown)>,
    Duration,
) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let start = Instant::now();
    let mut out = Vec::new();
    for mu in 4..=9 {
        let a = AlgebraDescriptor::new(tcr(mu), Smoothness::Smooth, Family::Generic).unwrap();
        for _ in 0..50 {
            let p = CurvePoint::new(
                ["M", "P", "Q"][rng.gen_range(0..3)],
                rng.gen_range(-100..=100),
            );
            let up = a.blowup(&p, PdimStatus::Finite).unwrap();
            let down = up.algebra.blowdown(&up.exceptional.label).unwrap();
            out.push((a.clone(), down));
        }
    }
    (out, start.elapsed())
}

fn criterion_3_and_4() -> (Outcome, Outcome) {
    let (runs, elapsed) = roundtrips();
    let equal = runs.iter().filter(|(a, d)| &d.algebra == a).count();
    let target = HilbertSeries::monomial_over(1, 3);
    let delta_ok = runs.iter().filter(|(_, d)| {
        d.series_delta == target
            && (0..=50i64).all(|n| d.series_delta.coeff(n) == BigInt::from(n * (n + 1) / 2))
    });
    let delta_ok = delta_ok.count();
    (
        Outcome {
            id: 3,
            name: "blowup then blowdown restores the descriptor",
            tolerance: "exact equality, mu 4..9 x 50 points, < 1 s total",
            pass: equal == runs.len()
                && runs.len() == 300
                && within(elapsed, Duration::from_secs(1)),
            detail: format!("{equal}/{} equal in {elapsed:?}", runs.len()),
        },
        Outcome {
            id: 4,
            name: "blowdown adds s/(1-s)^3 to hilb R",
            tolerance: "exact, degrees 0..50",
            pass: delta_ok == runs.len(),
            detail: format!("{delta_ok}/{} blowdowns", runs.len()),
        },
    )
}

fn criterion_6() -> Outcome {
    let mut rels = vec![PairRelation::SameLine, PairRelation::OffOrbit];
    rels.extend((-5..=5).map(PairRelation::OnOrbit));
    let minus_one_same_line = ledger(PairRelation::SameLine)
        .candidates
        .iter()
        .any(|c| c.dot == -1);
    let suite = run_suite(Suite::Intersection, &VerifyConfig::default());
    let cases: usize = rels.iter().map(|&r| ledger(r).candidates.len()).sum();
    Outcome {
        id: 6,
        name: "intersection numbers lie in {-1, 0, 1}, -1 only for one line, all routes agree",
        tolerance: "exact, j in -5..5",
        pass: suite.passed() && minus_one_same_line,
        detail: format!("{cases} (relation, C) cases; {suite}"),
    }
}

fn criterion_7() -> Outcome {
    let l = Subject::Line("L".into());
    let mut a = FactBase::new();
    a.insert(
        Literal::line("L", Predicate::Exceptional, true),
        Provenance::Declared,
    );
    a.insert(
        Literal::algebra(Predicate::QgrSmooth, true),
        Provenance::Declared,
    );
    let ca = infer(&a, &PairContext::new());
    let a_ok = ca.status(&l, Predicate::SelfDotMinusOne) == Some(true)
        && ca.status(&l, Predicate::SelfExtLLZero) == Some(true)
        && ca.is_consistent();

    let mut b = FactBase::new();
    b.insert(
        Literal::line("L", Predicate::Contractible, true),
        Provenance::Declared,
    );
    let cb = infer(&b, &PairContext::new());
    let b_ok = cb.derived().count() == 0 && cb.status(&l, Predicate::SelfDotMinusOne).is_none();

    let mut c = FactBase::new();
    c.insert(
        Literal::line("L", Predicate::Contractible, true),
        Provenance::Declared,
    );
    c.insert(
        Literal::line("L", Predicate::NonsplitSelfExtension, true),
        Provenance::Declared,
    );
    let cc = infer(&c, &PairContext::new());
    let c_ok = cc.status(&l, Predicate::SelfDotMinusOne) == Some(false) && cc.is_consistent();

    Outcome {
        id: 7,
        name: "inference: exceptional+smooth gives -1; contractible alone gives nothing; obstruction is consistent",
        tolerance: "exact closure membership",
        pass: a_ok && b_ok && c_ok,
        detail: format!("(a) {a_ok} (b) {b_ok} (c) {c_ok}"),
    }
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let rep = default_repeated_blowup_report();
    let elapsed = start.elapsed();
    let Ok(rep) = rep else {
        return Outcome {
            id: 8,
            name: "repeated blowup of the Sklyanin Veronese",
            tolerance: "exact, < 2 s",
            pass: false,
            detail: format!("{:?}", rep.err()),
        };
    };
    let checks = [
        ("degrees", rep.degrees == [9, 8, 7]),
        ("dim J_1", rep.line_ideal_degree_one == 6),
        (
            "Y/R",
            rep.y_over_r == HilbertSeries::monomial_over(1, 2).scale(2)
                && rep.y_over_r_degree_one == 2,
        ),
        ("not smooth", rep.smoothness[2] == Smoothness::NotSmooth),
        (
            "contractible yet not -1",
            rep.contractible && rep.self_dot_minus_one == Some(false) && rep.consistent,
        ),
        ("ms undefined", rep.ms_dot == MsDot::Undefined),
        ("blowdown", rep.blowdown_degree == 8),
    ];
    let failed: Vec<_> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    Outcome {
        id: 8,
        name: "repeated blowup of the Sklyanin Veronese",
        tolerance: "exact, < 2 s",
        pass: failed.is_empty() && within(elapsed, Duration::from_secs(2)),
        detail: format!("{} checks in {elapsed:?}, failing {failed:?}", checks.len()),
    }
}

#[test]
fn acceptance() {
    let (c3, c4) = criterion_3_and_4();
    let outcomes = vec![
        criterion_1(),
        suite_outcome(
            2,
            "hilb Hom(J, R) = hilb R + s/(1-s)^2 via the dual line",
            "exact, mu 3..9, degrees 0..50",
            Suite::LineDual,
        ),
        c3,
        c4,
        suite_outcome(
            5,
            "point-module Hom/Ext tables, graded and quotient category",
            "exact, j in -4..4 and off orbit",
            Suite::PointTables,
        ),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        suite_outcome(
            9,
            "symbolic principality agrees with the group law",
            "exact, 200 divisors over Q and 200 over F_10007",
            Suite::Oracle,
        ),
        suite_outcome(
            10,
            "series engine: canonical forms, + and * coefficient laws, ranks",
            "exact, 500 pairs, degrees -10..50",
            Suite::Series,
        ),
    ];
    for o in &outcomes {
        println!(
            "criterion {:>2}: {} | {} | {} | {}",
            o.id,
            if o.pass { "PASS" } else { "FAIL" },
            o.name,
            o.tolerance,
            o.detail
        );
    }
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
