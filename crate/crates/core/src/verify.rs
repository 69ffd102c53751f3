//! Property suites that compare the closed forms against independent
//! per-degree or per-point computations. Cases fan out through [`par_map`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curve::{CurvePoint, Divisor, GenericityContext};
use crate::error::ParseError;
use crate::exec::{par_map, ExecutionMode};
use crate::hilbert::{HilbertSeries, LaurentPoly};
use crate::intersection::{dot_routes, ledger, PairRelation};
use crate::surface::{AlgebraDescriptor, Family, LineModuleRef, PdimStatus, Smoothness};
use crate::tcr::{PointModuleRef, TcrDescriptor};
use crate::weierstrass::{default_rational_curve, Fp, Point, WeierstrassCurve};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;
pub const DEFAULT_WINDOW: i64 = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Epsilon,
    LineDual,
    Roundtrip,
    PointTables,
    Oracle,
    Series,
    Intersection,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Epsilon,
        Suite::LineDual,
        Suite::Roundtrip,
        Suite::PointTables,
        Suite::Oracle,
        Suite::Series,
        Suite::Intersection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Epsilon => "epsilon",
            Suite::LineDual => "line-dual",
            Suite::Roundtrip => "roundtrip",
            Suite::PointTables => "point-tables",
            Suite::Oracle => "oracle",
            Suite::Series => "series",
            Suite::Intersection => "intersection",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A suite name, or `all`.
pub fn parse_suites(text: &str) -> Result<Vec<Suite>, ParseError> {
    if text.trim() == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    text.split(',').map(str::parse).collect()
}

impl FromStr for Suite {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s.trim())
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
                ParseError::new(format!(
                    "unknown suite `{s}`; expected all or one of {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub window: i64,
    pub seed: u64,
    pub mode: ExecutionMode,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            window: DEFAULT_WINDOW,
            seed: DEFAULT_SEED,
            mode: ExecutionMode::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn collect(suite: Suite, results: Vec<Result<(), String>>) -> Self {
        let checks = results.len();
        let failures = results.into_iter().filter_map(Result::err).collect();
        Self {
            suite,
            checks,
            failures,
        }
    }
}

impl fmt::Display for SuiteOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            write!(f, "{}: pass ({} checks)", self.suite, self.checks)
        } else {
            write!(
                f,
                "{}: FAIL ({} of {} checks), first counterexample: {}",
                self.suite,
                self.failures.len(),
                self.checks,
                self.failures[0]
            )
        }
    }
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> SuiteOutcome {
    let results = match suite {
        Suite::Epsilon => epsilon(cfg),
        Suite::LineDual => line_dual(cfg),
        Suite::Roundtrip => roundtrip(cfg),
        Suite::PointTables => point_tables(cfg),
        Suite::Oracle => oracle(cfg),
        Suite::Series => series(cfg),
        Suite::Intersection => intersection(cfg),
    };
    SuiteOutcome::collect(suite, results)
}

pub fn run_suites(suites: &[Suite], cfg: &VerifyConfig) -> Vec<SuiteOutcome> {
    suites.iter().map(|&s| run_suite(s, cfg)).collect()
}

fn generic_tcr(mu: i64) -> TcrDescriptor {
    TcrDescriptor::generic(Divisor::from_terms([(CurvePoint::base("M"), mu)]))
        .expect("positive degree")
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Saturated Hom between twists by `-[p]` and `-[p']`, per-degree sections
/// against `hilb B - 1 + eps`.
fn epsilon(cfg: &VerifyConfig) -> Vec<Result<(), String>> {
    let mut cases = Vec::new();
    for mu in [3, 7, 9] {
        for (label, q, shift) in [
            ("p = p'", "P", 0),
            ("p = tau^3 p'", "P", -3),
            ("off orbit", "Q", 0),
        ] {
            cases.push((mu, label, CurvePoint::new(q, shift)));
        }
    }
    let window = cfg.window;
    let mode = cfg.mode;
    par_map(mode, &cases, |(mu, label, q)| {
        let b = generic_tcr(*mu);
        let p = CurvePoint::base("P");
        let f = Divisor::point(p.clone()).negate();
        let g = Divisor::point(q.clone()).negate();
        let eps = i64::from(&p == q);
        let hom = b.hom_saturated(&f, &g, window, ExecutionMode::Sequential);
        let expected = &(&b.hilb_b() - &HilbertSeries::one())
            + &HilbertSeries::polynomial(LaurentPoly::monomial(0, eps));
        check(hom.series == expected, || {
            format!("mu={mu} {label}: series {} != {expected}", hom.series)
        })?;
        for row in hom.rows.iter().filter(|r| (0..=window).contains(&r.n)) {
            check(BigInt::from(row.h0) == expected.coeff(row.n), || {
                format!(
                    "mu={mu} {label}: h0 at degree {} is {}, expected {}",
                    row.n,
                    row.h0,
                    expected.coeff(row.n)
                )
            })?;
        }
        Ok(())
    })
}

/// `hilb Hom_R(J, R) = hilb R + s/(1-s)^2` through the dual of the line.
fn line_dual(cfg: &VerifyConfig) -> Vec<Result<(), String>> {
    let window = cfg.window;
    let mus: Vec<i64> = (3..=9).collect();
    par_map(cfg.mode, &mus, |&mu| {
        let a = AlgebraDescriptor::new(generic_tcr(mu), Smoothness::Unknown, Family::Generic)
            .map_err(|e| e.to_string())?;
        let l = LineModuleRef::right("L", CurvePoint::base("P"));
        let got = a.hilb_hom_j_r(&l);
        for n in 0..=window {
            // hilb R in degree n is 1 + sum_{k<=n} k mu; s/(1-s)^2 adds n
            let r_n = 1 + mu * n * (n + 1) / 2;
            check(got.coeff(n) == BigInt::from(r_n + n), || {
                format!(
                    "mu={mu}: degree {n} has {}, expected {}",
                    got.coeff(n),
                    r_n + n
                )
            })?;
        }
        Ok(())
    })
}

/// Blowup then blowdown at random points returns the same descriptor, and
/// the blowdown adds `s/(1-s)^3`.
fn roundtrip(cfg: &VerifyConfig) -> Vec<Result<(), String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut cases = Vec::new();
    for mu in 4..=9i64 {
        for _ in 0..50 {
            let orbit = ["P", "Q", "M"][rng.gen_range(0..3)];
            cases.push((mu, CurvePoint::new(orbit, rng.gen_range(-50..=50))));
        }
    }
    let window = cfg.window;
    par_map(cfg.mode, &cases, |(mu, p)| {
        let a = AlgebraDescriptor::new(generic_tcr(*mu), Smoothness::Unknown, Family::Generic)
            .map_err(|e| e.to_string())?;
        let up = a
            .blowup(p, PdimStatus::Unknown)
            .map_err(|e| e.to_string())?;
        let down = up
            .algebra
            .blowdown(&up.exceptional.label)
            .map_err(|e| e.to_string())?;
        check(down.algebra == a, || {
            format!("mu={mu} p={p}: descriptor changed")
        })?;
        for n in 0..=window {
            // s/(1-s)^3 has coefficient n(n+1)/2
            let expected = BigInt::from(n * (n + 1) / 2);
            check(down.series_delta.coeff(n) == expected, || {
                format!(
                    "mu={mu} p={p}: blowdown delta in degree {n} is {}",
                    down.series_delta.coeff(n)
                )
            })?;
        }
        Ok(())
    })
}

fn point_tables(cfg: &VerifyConfig) -> Vec<Result<(), String>> {
    let mut cases: Vec<(i64, Option<i64>)> = Vec::new();
    for mu in [3, 5, 9] {
        cases.extend((-4..=4).map(|j| (mu, Some(j))));
        cases.push((mu, None));
    }
    par_map(cfg.mode, &cases, |&(mu, j)| {
        let b = generic_tcr(mu);
        let q = PointModuleRef::right(CurvePoint::base("Q"));
        let p = PointModuleRef::right(match j {
            Some(j) => CurvePoint::new("Q", j),
            None => CurvePoint::base("Z"),
        });
        let mono = |e: i64| HilbertSeries::monomial(e);
        let (hom, ext, qgr) = match j {
            Some(j) if j >= 0 => (mono(j), &mono(-1) + &mono(j), mono(j)),
            Some(j) => (HilbertSeries::zero(), mono(-1), mono(j)),
            None => (HilbertSeries::zero(), mono(-1), HilbertSeries::zero()),
        };
        let tag = format!("mu={mu} j={j:?}");
        let got = b.point_hom(&p, &q).map_err(|e| e.to_string())?;
        check(got == hom, || format!("{tag}: Hom {got} != {hom}"))?;
        let got = b.point_ext1(&p, &q).map_err(|e| e.to_string())?;
        check(got == ext, || format!("{tag}: Ext^1 {got} != {ext}"))?;
        let (h, e) = b.point_qgr_homext(&p, &q).map_err(|e| e.to_string())?;
        check(h == qgr && e == qgr, || {
            format!("{tag}: qgr ({h}, {e}) != ({qgr}, {qgr})")
        })?;
        // shifting both sides leaves Hom unchanged
        let got = b
            .point_hom(&p.shifted(2), &q.shifted(2))
            .map_err(|e| e.to_string())?;
        check(got == hom, || format!("{tag}: shifted Hom {got}"))?;
        let rel = j.map_or(PairRelation::OffOrbit, PairRelation::OnOrbit);
        let l = ledger(rel);
        check(l.h == hom && l.e == ext, || {
            format!("{tag}: ledger disagrees with tables")
        })
    })
}

fn random_divisor(
    rng: &mut ChaCha8Rng,
    orbits: &[&str],
    make_principal: bool,
    ctx: &GenericityContext,
) -> Divisor {
    let mut d = Divisor::zero();
    for _ in 0..rng.gen_range(1..=4) {
        let orbit = orbits[rng.gen_range(0..orbits.len())];
        d.add_point(
            CurvePoint::new(orbit, rng.gen_range(-4..=4)),
            rng.gen_range(-2..=2),
        );
    }
    d.add_point(CurvePoint::base(orbits[0]), -d.degree());
    if make_principal {
        let w = ctx.canonicalize_divisor(&d).weighted_shift();
        // [A:-w] - [A:0] has degree 0 and weighted shift -w
        d.add_point(CurvePoint::new(orbits[0], -w), 1);
        d.add_point(CurvePoint::base(orbits[0]), -1);
    }
    d
}

fn concrete_sum<F: crate::weierstrass::Field>(
    curve: &WeierstrassCurve<F>,
    t: &Point<F>,
    base: &BTreeMap<&str, Point<F>>,
    d: &Divisor,
) -> Point<F> {
    let pts: Vec<(Point<F>, i64)> = d
        .terms()
        .map(|(p, m)| {
            (
                curve.add(&base[p.orbit.as_str()], &curve.scalar_mul(p.shift, t)),
                m,
            )
        })
        .collect();
    curve.divisor_sum(pts.iter().map(|(p, m)| (p, *m)))
}

/// Symbolic principality against the group law: over the rationals on
/// `y^2 = x^3 - 2` with `t = (3, 5)`, and over `F_10007` behind the order
/// guard. Orbit `B` is declared as `A + 3` and bound accordingly.
fn oracle(cfg: &VerifyConfig) -> Vec<Result<(), String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x0_4ac1e);
    let mut ctx = GenericityContext::generic();
    ctx.relate("B", "A", 3).expect("fresh orbits");
    let orbits = ["A", "B"];
    let rational: Vec<Divisor> = (0..200)
        .map(|i| random_divisor(&mut rng, &orbits, i % 2 == 0, &ctx))
        .collect();
    let prime: Vec<Divisor> = (0..200)
        .map(|i| random_divisor(&mut rng, &orbits, i % 2 == 0, &ctx))
        .collect();

    let mut results = Vec::new();

    let (qc, qt) = default_rational_curve();
    let pa = qc.scalar_mul(2, &qt);
    let pb = qc.add(&pa, &qc.scalar_mul(3, &qt));
    let qbase: BTreeMap<&str, Point<BigRational>> = [("A", pa), ("B", pb)].into_iter().collect();
    results.extend(par_map(cfg.mode, &rational, |d| {
        let symbolic = ctx.is_principal(d);
        let concrete = concrete_sum(&qc, &qt, &qbase, d).is_infinity();
        check(symbolic == concrete, || {
            format!("Q: {d}: symbolic {symbolic}, group law {concrete}")
        })
    }));

    let p = 10007;
    let fc = WeierstrassCurve::new(Fp::new(2, p), Fp::new(3, p)).expect("nonsingular");
    let ft = fc.point(Fp::new(1, p), Fp::new(1973, p)).expect("on curve");
    let horizon = 2000;
    if let Err(e) = fc.order_guard(&ft, horizon) {
        results.push(Err(format!(
            "F_{p}: translation has order {} within horizon {horizon}",
            e.n
        )));
        return results;
    }
    let pa = fc.point(Fp::new(4, p), Fp::new(2622, p)).expect("on curve");
    let pb = fc.add(&pa, &fc.scalar_mul(3, &ft));
    let fbase: BTreeMap<&str, Point<Fp>> = [("A", pa), ("B", pb)].into_iter().collect();
    results.extend(par_map(cfg.mode, &prime, |d| {
        let w = ctx.canonicalize_divisor(d).weighted_shift();
        if w.unsigned_abs() >= horizon {
            return Err(format!("F_{p}: {d} leaves the guarded range"));
        }
        let symbolic = ctx.is_principal(d);
        let concrete = concrete_sum(&fc, &ft, &fbase, d).is_infinity();
        check(symbolic == concrete, || {
            format!("F_{p}: {d}: symbolic {symbolic}, group law {concrete}")
        })
    }));
    results
}

fn random_series(rng: &mut ChaCha8Rng) -> HilbertSeries {
    let terms: Vec<(i64, i64)> = (0..rng.gen_range(0..5))
        .map(|_| (rng.gen_range(-5..=5), rng.gen_range(-5..=5)))
        .collect();
    HilbertSeries::new(LaurentPoly::from_terms(terms), rng.gen_range(0..=3))
}

fn low_exponent(h: &HilbertSeries) -> i64 {
    h.numerator().min_exponent().unwrap_or(0)
}

/// Canonical forms, coefficient laws for `+` and `*`, and ranks.
fn series(cfg: &VerifyConfig) -> Vec<Result<(), String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5e_1e5);
    let pairs: Vec<(HilbertSeries, HilbertSeries)> = (0..500)
        .map(|_| (random_series(&mut rng), random_series(&mut rng)))
        .collect();
    par_map(cfg.mode, &pairs, |(a, b)| {
        let again = HilbertSeries::new(a.numerator().clone(), a.pole_order());
        check(&again == a, || format!("{a} is not canonical"))?;
        let parsed = HilbertSeries::parse(&a.to_string()).map_err(|e| e.to_string())?;
        check(&parsed == a, || format!("{a} does not survive printing"))?;
        let sum = a + b;
        let prod = a * b;
        for n in -10..=50 {
            check(sum.coeff(n) == a.coeff(n) + b.coeff(n), || {
                format!("({a}) + ({b}) at {n}")
            })?;
            let lo = low_exponent(a);
            let hi = n - low_exponent(b);
            let conv: BigInt = (lo..=hi).map(|k| a.coeff(k) * b.coeff(n - k)).sum();
            check(prod.coeff(n) == conv, || format!("({a}) * ({b}) at {n}"))?;
        }
        for h in [a, b] {
            if h.pole_order() <= 1 {
                let far = h.numerator().max_exponent().unwrap_or(0).max(0) + 1;
                let rank = h.rank_at_one().expect("simple pole");
                check(rank == h.coeff(far) && rank == h.coeff(far + 7), || {
                    format!(
                        "rank of {h} is {rank}, eventual coefficient {}",
                        h.coeff(far)
                    )
                })?;
            } else {
                check(h.rank_at_one().is_none(), || {
                    format!("{h} has a higher pole but a rank")
                })?;
            }
        }
        Ok(())
    })
}

/// Every admissible `C` for every relation with `|j| <= 5`.
fn intersection(cfg: &VerifyConfig) -> Vec<Result<(), String>> {
    let mut rels = vec![PairRelation::SameLine, PairRelation::OffOrbit];
    rels.extend((-5..=5).map(PairRelation::OnOrbit));
    par_map(cfg.mode, &rels, |&rel| {
        let l = ledger(rel);
        check(!l.candidates.is_empty(), || format!("{rel}: no candidates"))?;
        for cand in &l.candidates {
            check(cand.c.is_nonnegative() && cand.c.leq(&l.e), || {
                format!("{rel}: C = {} outside [0, E]", cand.c)
            })?;
            check((-1..=1).contains(&cand.dot), || {
                format!("{rel}: dot {}", cand.dot)
            })?;
            check(cand.dot != -1 || rel == PairRelation::SameLine, || {
                format!("{rel}: dot -1 for distinct lines")
            })?;
            let routes = dot_routes(rel, &cand.c).map_err(|e| e.to_string())?;
            check(routes.agree(), || {
                format!("{rel}, C = {}: {routes:?}", cand.c)
            })?;
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_sequentially() {
        let cfg = VerifyConfig {
            window: 20,
            mode: ExecutionMode::Sequential,
            ..VerifyConfig::default()
        };
        for outcome in run_suites(&Suite::ALL, &cfg) {
            assert!(outcome.passed(), "{outcome}");
        }
    }

    #[test]
    fn suite_names() {
        assert_eq!(parse_suites("all").unwrap().len(), 7);
        assert_eq!(
            parse_suites("epsilon,oracle").unwrap(),
            vec![Suite::Epsilon, Suite::Oracle]
        );
        assert!(parse_suites("nope").is_err());
    }

    #[test]
    fn oracle_divisors_are_mixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ctx = GenericityContext::generic();
        let principal = (0..50)
            .filter(|i| ctx.is_principal(&random_divisor(&mut rng, &["A"], i % 2 == 0, &ctx)))
            .count();
        assert!((25..50).contains(&principal));
    }
}
