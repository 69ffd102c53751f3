//! Intersection numbers of line modules.
//!
//! For lines `L`, `L'` with divisors `p`, `p'`, multiplication by `g` and the
//! point modules `M_p`, `M_p'` give series `H = hilb Hom_B(M_p, M_p')`,
//! `E = hilb Ext^1_B(M_p, M_p')` and the image `C` of a connecting map with
//! `0 <= C <= E`. Then `X = (C - H)/(1-s)` and the intersection number is
//! the rank of `(1-s) X` at `s = 1`, i.e. the coefficient sum of `C - H`.
//! `C` is never guessed: the ledger lists every admissible candidate.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::curve::{CurvePoint, GenericityContext};
use crate::error::{Error, Result};
use crate::facts::{
    infer, Closure, FactBase, Literal, PairContext, PairDivisors, Predicate, Provenance, Subject,
};
use crate::hilbert::{HilbertSeries, LaurentPoly};
use crate::surface::{AlgebraDescriptor, Family, PdimStatus, Smoothness};
use crate::tcr::TcrDescriptor;

/// How `Div L = p` sits relative to `Div L' = p'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "j")]
pub enum PairRelation {
    /// `L = L'`.
    SameLine,
    /// `p = tau^j p'` for distinct lines.
    OnOrbit(i64),
    OffOrbit,
}

impl fmt::Display for PairRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairRelation::SameLine => f.write_str("same_line"),
            PairRelation::OnOrbit(j) => write!(f, "on_orbit({j})"),
            PairRelation::OffOrbit => f.write_str("off_orbit"),
        }
    }
}

impl PairRelation {
    /// Relation of two distinct lines from their divisors.
    pub fn classify(ctx: &GenericityContext, p: &CurvePoint, p_prime: &CurvePoint) -> Self {
        match ctx.orbit_offset(p, p_prime) {
            Some(j) => PairRelation::OnOrbit(j),
            None => PairRelation::OffOrbit,
        }
    }

    fn hom_exponent(self) -> Option<i64> {
        match self {
            PairRelation::SameLine => Some(0),
            PairRelation::OnOrbit(j) if j >= 0 => Some(j),
            _ => None,
        }
    }

    /// `p = p'`, as a point: `1` in the saturated-hom correction, else `0`.
    pub fn epsilon(self) -> i64 {
        match self {
            PairRelation::SameLine | PairRelation::OnOrbit(0) => 1,
            _ => 0,
        }
    }
}

/// The series bookkeeping for one pair, with every admissible `C`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ledger {
    pub relation: PairRelation,
    pub h: HilbertSeries,
    pub e: HilbertSeries,
    pub candidates: Vec<Candidate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub c: HilbertSeries,
    pub x: HilbertSeries,
    pub dot: i64,
}

fn poly(terms: &[(i64, i64)]) -> HilbertSeries {
    HilbertSeries::polynomial(LaurentPoly::from_terms(terms.iter().copied()))
}

/// Candidates for `C`: for the same line, every sub-series of `E`; for
/// distinct lines, those whose `X` is `0`, `s^-1/(1-s)` or
/// `s^-1 + ... + s^(j-1)`.
pub fn ledger(rel: PairRelation) -> Ledger {
    let (h, e, cs) = match rel.hom_exponent() {
        Some(j) => {
            let h = HilbertSeries::monomial(j);
            let e = poly(&[(-1, 1), (j, 1)]);
            let cs = match rel {
                PairRelation::SameLine => vec![
                    HilbertSeries::zero(),
                    HilbertSeries::monomial(-1),
                    HilbertSeries::monomial(0),
                    e.clone(),
                ],
                _ => vec![h.clone(), e.clone(), HilbertSeries::monomial(-1)],
            };
            (h, e, cs)
        }
        None => (
            HilbertSeries::zero(),
            HilbertSeries::monomial(-1),
            vec![HilbertSeries::zero(), HilbertSeries::monomial(-1)],
        ),
    };
    let candidates = cs
        .into_iter()
        .map(|c| {
            let x = x_series(&h, &c);
            let dot = dot_from_series(&h, &c);
            Candidate { c, x, dot }
        })
        .collect();
    Ledger {
        relation: rel,
        h,
        e,
        candidates,
    }
}

/// `X = (C - H)/(1-s)`.
pub fn x_series(h: &HilbertSeries, c: &HilbertSeries) -> HilbertSeries {
    (c - h).over_one_minus_s(1)
}

fn dot_from_series(h: &HilbertSeries, c: &HilbertSeries) -> i64 {
    let diff = c - h;
    diff.eval_at_one()
        .expect("C and H are polynomials")
        .to_i64()
        .expect("small")
}

/// The three ways of reading the intersection number off a resolved ledger.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DotRoutes {
    /// Coefficient sum of `C - H`.
    pub coefficient_sum: i64,
    /// `(1-s) X` evaluated at `s = 1`.
    pub rank_of_x: i64,
    /// Eventual coefficient of `X` (zero if `X` is a polynomial).
    pub eventual_coefficient: i64,
}

impl DotRoutes {
    pub fn agree(&self) -> bool {
        self.coefficient_sum == self.rank_of_x && self.rank_of_x == self.eventual_coefficient
    }
}

/// Intersection number for a resolved `C`; `C` must be one of the ledger's
/// candidates.
pub fn dot(rel: PairRelation, c: &HilbertSeries) -> Result<i64> {
    let routes = dot_routes(rel, c)?;
    if !routes.agree() {
        return Err(Error::inconsistency(format!(
            "intersection routes disagree: {routes:?}"
        )));
    }
    Ok(routes.coefficient_sum)
}

pub fn dot_routes(rel: PairRelation, c: &HilbertSeries) -> Result<DotRoutes> {
    let l = ledger(rel);
    if !l.candidates.iter().any(|cand| &cand.c == c) {
        return Err(Error::precondition(format!(
            "C = {c} is not admissible for {rel}; candidates: {}",
            l.candidates
                .iter()
                .map(|cand| cand.c.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        )));
    }
    let x = x_series(&l.h, c);
    let to_i64 = |b: BigInt| b.to_i64().expect("small");
    let rank_of_x = to_i64(
        x.times_one_minus_s(1)
            .eval_at_one()
            .expect("(1-s)X has no pole"),
    );
    let eventual_coefficient = if x.pole_order() == 0 {
        0
    } else {
        let far = x.numerator().max_exponent().unwrap_or(0).max(0) + 1;
        to_i64(x.coeff(far))
    };
    Ok(DotRoutes {
        coefficient_sum: dot_from_series(&l.h, c),
        rank_of_x,
        eventual_coefficient,
    })
}

/// `hilb End_R(L) = 1/(1-s)`: endomorphisms of a line are `k[g]`. Other
/// pairs are not determined by the divisors alone.
pub fn line_hom(rel: PairRelation) -> Option<HilbertSeries> {
    (rel == PairRelation::SameLine).then(|| HilbertSeries::monomial_over(0, 1))
}

/// `hilb Hom_R(J, J') = hilb R + (eps - 1)/(1-s) - im_alpha/(1-s)`.
pub fn hom_jj_series(
    rel: PairRelation,
    im_alpha: &HilbertSeries,
    hilb_r: &HilbertSeries,
) -> Result<HilbertSeries> {
    if !im_alpha.is_nonnegative() {
        return Err(Error::precondition(format!(
            "im alpha = {im_alpha} has a negative coefficient"
        )));
    }
    let correction =
        &HilbertSeries::polynomial(LaurentPoly::monomial(0, rel.epsilon() - 1)) - im_alpha;
    let out = hilb_r + &correction.over_one_minus_s(1);
    if !out.is_nonnegative() {
        return Err(Error::inconsistency(format!(
            "hilb Hom(J, J') = {out} has a negative coefficient"
        )));
    }
    Ok(out)
}

/// `X = hilb Ext^1(J, J') + hilb R - 1/(1-s) - hilb Hom(J, J')`.
pub fn x_from_ideals(
    ext1_jj: &HilbertSeries,
    hom_jj: &HilbertSeries,
    hilb_r: &HilbertSeries,
) -> HilbertSeries {
    &(&(ext1_jj + hilb_r) - &HilbertSeries::monomial_over(0, 1)) - hom_jj
}

/// One rank `grk Ext^n`, possibly only bounded below.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankValue {
    Exact(u64),
    AtLeast(u64),
}

impl RankValue {
    fn is_zero(self) -> bool {
        self == RankValue::Exact(0)
    }

    fn is_nonzero(self) -> bool {
        match self {
            RankValue::Exact(r) | RankValue::AtLeast(r) => r > 0,
        }
    }
}

impl fmt::Display for RankValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankValue::Exact(r) => write!(f, "{r}"),
            RankValue::AtLeast(r) => write!(f, ">={r}"),
        }
    }
}

/// `r_n = grk Ext^n` given by a finite prefix followed by a repeating block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtRankProfile {
    pub prefix: Vec<RankValue>,
    pub period: Vec<RankValue>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "outcome", content = "value")]
pub enum MsDot {
    Defined(i64),
    /// The alternating sum does not terminate.
    Undefined,
    /// Finite, but some ranks are only bounded.
    Indeterminate,
}

impl fmt::Display for MsDot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MsDot::Defined(v) => write!(f, "defined({v})"),
            MsDot::Undefined => f.write_str("undefined"),
            MsDot::Indeterminate => f.write_str("indeterminate"),
        }
    }
}

impl ExtRankProfile {
    pub fn new(prefix: Vec<RankValue>, period: Vec<RankValue>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::precondition(
                "rank profile needs a nonempty repeating block",
            ));
        }
        Ok(Self { prefix, period })
    }

    /// Exact ranks, eventually zero.
    pub fn finite(ranks: &[u64]) -> Self {
        Self {
            prefix: ranks.iter().map(|&r| RankValue::Exact(r)).collect(),
            period: vec![RankValue::Exact(0)],
        }
    }

    pub fn rank(&self, n: usize) -> RankValue {
        match self.prefix.get(n) {
            Some(&r) => r,
            None => self.period[(n - self.prefix.len()) % self.period.len()],
        }
    }

    /// The profile of a line whose Ext ranks are `1`, at least `1`, then a
    /// nonzero constant from degree 2 on.
    pub fn persistent_self_extension() -> Self {
        Self {
            prefix: vec![RankValue::Exact(1), RankValue::AtLeast(1)],
            period: vec![RankValue::AtLeast(1)],
        }
    }

    /// `sum_n (-1)^(n+1) r_n` when it terminates.
    pub fn ms_dot(&self) -> MsDot {
        if self.period.iter().any(|r| r.is_nonzero()) {
            return MsDot::Undefined;
        }
        if !self.period.iter().all(|r| r.is_zero()) {
            return MsDot::Indeterminate;
        }
        let mut sum = 0i64;
        for (n, r) in self.prefix.iter().enumerate() {
            match r {
                RankValue::Exact(v) => {
                    let v = *v as i64;
                    sum += if n % 2 == 0 { -v } else { v };
                }
                RankValue::AtLeast(_) => return MsDot::Indeterminate,
            }
        }
        MsDot::Defined(sum)
    }

    /// Partial sums up to `n_max`; `Some(value)` if they are constant over
    /// the last repeating block, `None` if a rank is inexact.
    pub fn partial_sum(&self, n_max: usize) -> Option<(i64, bool)> {
        let mut sum = 0i64;
        let mut settled_since = 0;
        for n in 0..=n_max {
            let RankValue::Exact(v) = self.rank(n) else {
                return None;
            };
            if v != 0 {
                settled_since = n + 1;
            }
            sum += if n % 2 == 0 { -(v as i64) } else { v as i64 };
        }
        Some((sum, n_max + 1 - settled_since >= self.period.len()))
    }
}

/// Which rule families cover a pair of distinct lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coverage {
    SelfIntersection,
    DistinctDivisors,
    Transverse,
    /// Equal divisors, isomorphism unknown.
    Outside,
}

pub fn coverage(rel: PairRelation, isomorphic: Option<bool>) -> Coverage {
    match (rel, isomorphic) {
        (PairRelation::SameLine, _) => Coverage::SelfIntersection,
        (PairRelation::OnOrbit(0), Some(false)) => Coverage::Transverse,
        (PairRelation::OnOrbit(0), Some(true)) => Coverage::SelfIntersection,
        (PairRelation::OnOrbit(0), None) => Coverage::Outside,
        _ => Coverage::DistinctDivisors,
    }
}

/// Close a fact set about a single pair under the rules.
pub fn infer_pair(facts: &FactBase, a: &str, b: &str, rel: PairRelation) -> Closure {
    let mut pairs = PairContext::new();
    let divisors = match rel {
        PairRelation::SameLine | PairRelation::OnOrbit(0) => PairDivisors::Equal,
        _ => PairDivisors::Distinct,
    };
    if rel != PairRelation::SameLine {
        pairs.add(a, b, divisors);
        pairs.add(b, a, divisors);
    }
    infer(facts, &pairs)
}

/// One line of a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub step: String,
    pub anchor: String,
    pub value: String,
    pub provenance: String,
}

impl ReportRecord {
    pub fn new(step: &str, anchor: &str, value: impl ToString, provenance: &str) -> Self {
        Self {
            step: step.into(),
            anchor: anchor.into(),
            value: value.to_string(),
            provenance: provenance.into(),
        }
    }
}

/// Results of the repeated blowup `T ⊇ T(p) ⊇ T(2p)` of a degree-9
/// Sklyanin Veronese at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct RepeatedBlowupReport {
    pub degrees: [i64; 3],
    pub line_ideal_degree_one: i64,
    pub y_over_r: HilbertSeries,
    pub y_over_r_degree_one: i64,
    pub isomorphic_lines: bool,
    pub smoothness: [Smoothness; 3],
    pub contractible: bool,
    pub self_dot_minus_one: Option<bool>,
    pub consistent: bool,
    pub ms_dot: MsDot,
    pub blowdown_degree: i64,
    pub closure: Closure,
    pub records: Vec<ReportRecord>,
}

/// Build `T(p)` and `T(2p)` from `base`, combine the known facts about the
/// exceptional line `L` of `T(2p)`, and blow `L` down again.
pub fn repeated_blowup_report(
    base: &AlgebraDescriptor,
    p: &CurvePoint,
) -> Result<RepeatedBlowupReport> {
    if base.mu() != 9 || base.family() != Family::SklyaninVeronese {
        return Err(Error::precondition(
            "the repeated blowup report needs the degree-9 Sklyanin Veronese",
        ));
    }
    if base.smoothness() != Smoothness::Smooth {
        return Err(Error::precondition(
            "the Sklyanin Veronese is declared smooth",
        ));
    }
    let mut records = Vec::new();
    let tp = base.blowup(p, PdimStatus::Unknown)?;
    let t2p = tp.algebra.blowup(p, PdimStatus::Unknown)?;
    let l_label = t2p.exceptional.label.clone();
    let l_prime = tp.exceptional.label.clone();
    let degrees = [base.mu(), tp.algebra.mu(), t2p.algebra.mu()];
    records.push(ReportRecord::new(
        "degrees",
        "blowup lowers the degree by one",
        format!("{:?}", degrees),
        "derived",
    ));

    let mut r = t2p.algebra;
    let line_ideal_degree_one = r.hilb_line_ideal().coeff(1).to_i64().expect("small");
    records.push(ReportRecord::new(
        "dim J_1",
        "hilb R - 1/(1-s)^2 in degree 1",
        line_ideal_degree_one,
        "derived",
    ));

    // Y = T_{<=1} R; Y/R is two copies of L[-1].
    let y_over_r = HilbertSeries::monomial_over(1, 2).scale(2);
    let y_over_r_degree_one = (base.hilb_r().coeff(1) - r.hilb_r().coeff(1))
        .to_i64()
        .expect("small");
    if y_over_r.coeff(1).to_i64() != Some(y_over_r_degree_one) {
        return Err(Error::inconsistency(format!(
            "Y/R in degree 1 is {} but T_1 - R_1 = {y_over_r_degree_one}",
            y_over_r.coeff(1)
        )));
    }
    records.push(ReportRecord::new(
        "hilb Y/R",
        "two copies of L[-1]",
        &y_over_r,
        "established",
    ));
    records.push(ReportRecord::new(
        "dim (Y/R)_1",
        "dim T_1 - dim R_1",
        y_over_r_degree_one,
        "derived",
    ));

    let iso = Literal::pair(&l_label, &l_prime, Predicate::Isomorphic, true);
    let isomorphic_lines = r.facts().contains(&iso);
    records.push(ReportRecord::new(
        "L isomorphic to L'",
        "exceptional lines of a repeated blowup",
        isomorphic_lines,
        "established",
    ));

    r.add_fact(
        Literal::line(&l_label, Predicate::NonsplitSelfExtension, true),
        Provenance::Established("nonsplit-self-extension-of-L".into()),
    );
    let closure = r.closure();
    let subject = Subject::Line(l_label.clone());
    let contractible = closure.status(&subject, Predicate::Contractible) == Some(true);
    let self_dot_minus_one = closure.status(&subject, Predicate::SelfDotMinusOne);
    let consistent = closure.is_consistent();
    records.push(ReportRecord::new(
        "hilb End(J) = hilb R",
        "exceptional line of a blowup",
        contractible,
        "established",
    ));
    records.push(ReportRecord::new(
        "(L . L) = -1",
        "nonsplit self-extension obstructs Ext^1(L, L) = 0",
        match self_dot_minus_one {
            Some(v) => v.to_string(),
            None => "unknown".into(),
        },
        "derived",
    ));
    records.push(ReportRecord::new(
        "contradictions",
        "closure consistency",
        !consistent,
        "derived",
    ));

    let smooth_2p = match closure.status(&Subject::Algebra, Predicate::QgrSmooth) {
        Some(true) => Smoothness::Smooth,
        Some(false) => Smoothness::NotSmooth,
        None => r.smoothness(),
    };
    let smoothness = [base.smoothness(), tp.algebra.smoothness(), smooth_2p];
    records.push(ReportRecord::new(
        "smoothness T",
        "declared",
        base.smoothness(),
        "established",
    ));
    records.push(ReportRecord::new(
        "smoothness T(p)",
        "not decided",
        tp.algebra.smoothness(),
        "derived",
    ));
    records.push(ReportRecord::new(
        "smoothness T(2p)",
        "smooth forces a projective line ideal",
        smooth_2p,
        "derived",
    ));

    let ms_dot = ExtRankProfile::persistent_self_extension().ms_dot();
    records.push(ReportRecord::new(
        "Mori-Smith (L . L)",
        "Ext ranks 1, >=1, then a nonzero constant",
        ms_dot,
        "established",
    ));

    let down = r.blowdown(&l_label)?;
    records.push(ReportRecord::new(
        "blowdown of L",
        "hilb End(J) = hilb R",
        format!("degree {}", down.algebra.mu()),
        "derived",
    ));
    if down.series_delta != HilbertSeries::monomial_over(1, 3) {
        return Err(Error::inconsistency(format!(
            "blowdown changed hilb R by {} instead of s/(1-s)^3",
            down.series_delta
        )));
    }

    Ok(RepeatedBlowupReport {
        degrees,
        line_ideal_degree_one,
        y_over_r,
        y_over_r_degree_one,
        isomorphic_lines,
        smoothness,
        contractible,
        self_dot_minus_one,
        consistent,
        ms_dot,
        blowdown_degree: down.algebra.mu(),
        closure,
        records,
    })
}

/// The degree-9 Sklyanin Veronese on the generic orbit `M`.
pub fn sklyanin_veronese() -> AlgebraDescriptor {
    let m = crate::curve::Divisor::from_terms([(CurvePoint::base("M"), 9)]);
    let tcr = TcrDescriptor::generic(m).expect("degree 9");
    AlgebraDescriptor::new(tcr, Smoothness::Smooth, Family::SklyaninVeronese).expect("degree 9")
}

/// Canonical input: base point `[P:0]`.
pub fn default_repeated_blowup_report() -> Result<RepeatedBlowupReport> {
    repeated_blowup_report(&sklyanin_veronese(), &CurvePoint::base("P"))
}
