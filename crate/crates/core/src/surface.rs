//! Elliptic algebras as descriptors: the twisting divisor of `R/gR`, line
//! modules, a blowup history, smoothness status and a fact base.
//!
//! Blowing up at `p` replaces `M` by `M - [p]` and creates an exceptional
//! right line with divisor `tau(p)`. Blowing down a contractible line with
//! divisor `q` replaces `M` by `M + [tau^-1 q]`. Undoing the last blowup
//! restores the parent descriptor exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::curve::{CurvePoint, Divisor};
use crate::error::{Error, ParseError, Result};
use crate::facts::{infer, FactBase, Literal, PairContext, Predicate, Provenance, Subject};
use crate::hilbert::{HilbertSeries, LaurentPoly};
use crate::tcr::{Side, TcrDescriptor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothness {
    Smooth,
    NotSmooth,
    Unknown,
}

impl fmt::Display for Smoothness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Smoothness::Smooth => "smooth",
            Smoothness::NotSmooth => "not_smooth",
            Smoothness::Unknown => "unknown",
        })
    }
}

impl FromStr for Smoothness {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        match s.trim() {
            "smooth" | "true" => Ok(Smoothness::Smooth),
            "not_smooth" | "false" => Ok(Smoothness::NotSmooth),
            "unknown" => Ok(Smoothness::Unknown),
            o => Err(ParseError::new(format!("bad smoothness `{o}`"))),
        }
    }
}

/// Projective dimension of `L°` for an exceptional line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdimStatus {
    Finite,
    Infinite,
    Unknown,
}

impl FromStr for PdimStatus {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        match s.trim() {
            "finite" => Ok(PdimStatus::Finite),
            "infinite" => Ok(PdimStatus::Infinite),
            "unknown" => Ok(PdimStatus::Unknown),
            o => Err(ParseError::new(format!("bad pdim status `{o}`"))),
        }
    }
}

/// Which construction the algebra comes from; some facts are only known
/// for particular families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Generic,
    /// Third Veronese of a Sklyanin algebra, degree 9.
    SklyaninVeronese,
}

impl FromStr for Family {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        match s.trim() {
            "generic" => Ok(Family::Generic),
            "sklyanin-veronese" => Ok(Family::SklyaninVeronese),
            o => Err(ParseError::new(format!("bad family `{o}`"))),
        }
    }
}

/// A line module `L[shift]`; `div_point` is the divisor of the unshifted `L`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LineModuleRef {
    pub label: String,
    pub side: Side,
    pub div_point: CurvePoint,
    pub shift: i64,
}

impl LineModuleRef {
    pub fn right(label: impl Into<String>, div_point: CurvePoint) -> Self {
        Self {
            label: label.into(),
            side: Side::Right,
            div_point,
            shift: 0,
        }
    }

    pub fn shifted(&self, n: i64) -> Self {
        Self {
            shift: self.shift + n,
            ..self.clone()
        }
    }

    /// `s^-shift / (1-s)^2`
    pub fn hilbert_series(&self) -> HilbertSeries {
        HilbertSeries::monomial_over(-self.shift, 2)
    }
}

impl fmt::Display for LineModuleRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} line, Div {})",
            self.label, self.side, self.div_point
        )?;
        if self.shift != 0 {
            write!(f, "[{}]", self.shift)?;
        }
        Ok(())
    }
}

/// `Ext^1_R(L, R)`: a line on the other side, with `hilb = s/(1-s)^2` for
/// unshifted `L`. Right `L` with divisor `p` gives a left line with divisor
/// `tau^-1 p`; left lines move back by `tau`. Applying it twice (after
/// undoing the `-1` shift) returns the input.
pub fn line_dual(l: &LineModuleRef) -> LineModuleRef {
    let div_point = match l.side {
        Side::Right => l.div_point.tau_power(-1),
        Side::Left => l.div_point.tau_power(1),
    };
    LineModuleRef {
        label: format!("{}^v", l.label),
        side: l.side.opposite(),
        div_point,
        shift: -l.shift - 1,
    }
}

/// The dual line module `Ext^1(L, R)[1]`.
pub fn dual_line_module(l: &LineModuleRef) -> LineModuleRef {
    line_dual(l).shifted(1)
}

#[derive(Clone, Debug, PartialEq)]
struct SavedState {
    facts: FactBase,
    lines: BTreeMap<String, LineModuleRef>,
    smoothness: Smoothness,
    next_exceptional: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum HistoryEvent {
    Blowup {
        point: CurvePoint,
        parent_degree: i64,
        exceptional: String,
        saved: Box<SavedStateHandle>,
    },
    Blowdown {
        line: String,
        div_point: CurvePoint,
        parent_degree: i64,
    },
}

/// Opaque snapshot of the parent, used to undo a blowup exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SavedStateHandle(SavedState);

impl fmt::Display for HistoryEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HistoryEvent::Blowup {
                point,
                parent_degree,
                exceptional,
                ..
            } => write!(
                f,
                "blowup at {point} (degree {parent_degree}), exceptional {exceptional}"
            ),
            HistoryEvent::Blowdown {
                line,
                div_point,
                parent_degree,
            } => write!(
                f,
                "blowdown of {line} with Div {div_point} (degree {parent_degree})"
            ),
        }
    }
}

/// The numerical shadow of an elliptic algebra `R` with `R/gR = B(E, M, tau)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraDescriptor {
    tcr: TcrDescriptor,
    family: Family,
    smoothness: Smoothness,
    history: Vec<HistoryEvent>,
    facts: FactBase,
    lines: BTreeMap<String, LineModuleRef>,
    next_exceptional: usize,
}

/// Outcome of a blowup.
#[derive(Clone, Debug, PartialEq)]
pub struct Blowup {
    pub algebra: AlgebraDescriptor,
    pub exceptional: LineModuleRef,
}

/// Outcome of a blowdown, with the series check of the extension.
#[derive(Clone, Debug, PartialEq)]
pub struct Blowdown {
    pub algebra: AlgebraDescriptor,
    /// `hilb R~ - hilb R`.
    pub series_delta: HilbertSeries,
    /// Whether the blowdown undid the most recent blowup.
    pub undid_blowup: bool,
}

/// Where `K~` sits relative to `K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TildeExtensionReport {
    pub base: HilbertSeries,
    pub multiplicities: HilbertSeries,
    pub extension: HilbertSeries,
    pub ext1: HilbertSeries,
}

/// Smoothness of a blowup `T(p)` from that of `T` and `pdim L°`.
pub fn smoothness_step(parent: Smoothness, pdim: PdimStatus) -> Smoothness {
    match (parent, pdim) {
        (Smoothness::NotSmooth, _) | (_, PdimStatus::Infinite) => Smoothness::NotSmooth,
        (Smoothness::Smooth, PdimStatus::Finite) => Smoothness::Smooth,
        _ => Smoothness::Unknown,
    }
}

/// Smoothness of a blowdown: inherited only when `pdim L°` is finite and
/// `(L . L) = -1` are both known.
pub fn blowdown_smoothness(parent: Smoothness, pdim_finite: bool, minus_one: bool) -> Smoothness {
    if pdim_finite && minus_one {
        parent
    } else {
        Smoothness::Unknown
    }
}

/// `K~ = K + p(s)/(1-s)^2` and `Ext^1 = p(s)/(1-s)` for nonnegative `p`.
pub fn tilde_series(
    base: &HilbertSeries,
    multiplicities: &HilbertSeries,
) -> Result<TildeExtensionReport> {
    if !multiplicities.is_nonnegative() {
        return Err(Error::precondition(format!(
            "multiplicity series {multiplicities} has a negative coefficient"
        )));
    }
    Ok(TildeExtensionReport {
        base: base.clone(),
        multiplicities: multiplicities.clone(),
        extension: base + &multiplicities.over_one_minus_s(2),
        ext1: multiplicities.over_one_minus_s(1),
    })
}

pub const SUFFICIENT_FOR_CONTRACTION: &[&str] = &[
    "the line is the exceptional line of a blowup",
    "hilb End(J) = hilb R is declared (contractible)",
    "(L . L) = -1, or any condition equivalent to it",
];

impl AlgebraDescriptor {
    pub fn new(tcr: TcrDescriptor, smoothness: Smoothness, family: Family) -> Result<Self> {
        if tcr.mu() < 3 {
            return Err(Error::precondition(format!(
                "elliptic algebras have degree at least 3, got {}",
                tcr.mu()
            )));
        }
        if family == Family::SklyaninVeronese && tcr.mu() != 9 {
            return Err(Error::precondition(
                "the Sklyanin Veronese family has degree 9",
            ));
        }
        let mut a = Self {
            tcr,
            family,
            smoothness,
            history: Vec::new(),
            facts: FactBase::new(),
            lines: BTreeMap::new(),
            next_exceptional: 1,
        };
        a.record_smoothness("declared-smoothness");
        if family == Family::SklyaninVeronese {
            a.facts.insert(
                Literal::algebra(Predicate::LocalizationSimple, true),
                Provenance::Established("sklyanin-veronese-localization-simple".into()),
            );
        }
        Ok(a)
    }

    fn record_smoothness(&mut self, anchor: &str) {
        let holds = match self.smoothness {
            Smoothness::Smooth => true,
            Smoothness::NotSmooth => false,
            Smoothness::Unknown => return,
        };
        self.facts.insert(
            Literal::algebra(Predicate::QgrSmooth, holds),
            Provenance::Established(anchor.into()),
        );
    }

    pub fn tcr(&self) -> &TcrDescriptor {
        &self.tcr
    }

    pub fn mu(&self) -> i64 {
        self.tcr.mu()
    }

    pub fn m(&self) -> &Divisor {
        self.tcr.m()
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn history(&self) -> &[HistoryEvent] {
        &self.history
    }

    pub fn facts(&self) -> &FactBase {
        &self.facts
    }

    pub fn lines(&self) -> &BTreeMap<String, LineModuleRef> {
        &self.lines
    }

    pub fn line(&self, label: &str) -> Result<&LineModuleRef> {
        self.lines
            .get(label)
            .ok_or_else(|| Error::precondition(format!("no line named {label} on this algebra")))
    }

    /// Register a line module (not created by a blowup).
    pub fn add_line(&mut self, line: LineModuleRef) -> Result<()> {
        if self.lines.contains_key(&line.label) {
            return Err(Error::precondition(format!(
                "line {} already exists",
                line.label
            )));
        }
        if !crate::facts::valid_label(&line.label) {
            return Err(Error::precondition(format!(
                "bad line label `{}`",
                line.label
            )));
        }
        self.lines.insert(line.label.clone(), line);
        Ok(())
    }

    pub fn add_fact(&mut self, lit: Literal, provenance: Provenance) -> bool {
        self.facts.insert(lit, provenance)
    }

    /// `hilb R = hilb B / (1-s)` since `R` is g-divisible.
    pub fn hilb_r(&self) -> HilbertSeries {
        self.tcr.hilb_b().over_one_minus_s(1)
    }

    /// Series of the line ideal `J` of an unshifted line.
    pub fn hilb_line_ideal(&self) -> HilbertSeries {
        &self.hilb_r() - &HilbertSeries::monomial_over(0, 2)
    }

    /// `hilb Hom_R(J, R) = hilb R + hilb Ext^1_R(L, R)`.
    pub fn hilb_hom_j_r(&self, l: &LineModuleRef) -> HilbertSeries {
        &self.hilb_r()
            + &line_dual(&LineModuleRef {
                shift: 0,
                ..l.clone()
            })
            .hilbert_series()
    }

    /// Pairs among the current lines, for the inference engine.
    pub fn pair_context(&self) -> PairContext {
        let ctx = self.tcr.context();
        let mut pairs = PairContext::new();
        for a in self.lines.values() {
            for b in self.lines.values() {
                if a.label != b.label && a.side == b.side {
                    let same = ctx.same_point(&a.div_point, &b.div_point);
                    pairs.add(
                        &a.label,
                        &b.label,
                        if same {
                            crate::facts::PairDivisors::Equal
                        } else {
                            crate::facts::PairDivisors::Distinct
                        },
                    );
                }
            }
        }
        pairs
    }

    pub fn closure(&self) -> crate::facts::Closure {
        infer(&self.facts, &self.pair_context())
    }

    /// Blow up at `p`; needs degree at least 4 so the result stays elliptic.
    pub fn blowup(&self, p: &CurvePoint, pdim: PdimStatus) -> Result<Blowup> {
        if self.mu() < 4 {
            return Err(Error::precondition(format!(
                "blowup needs degree at least 4 (the result must have degree at least 3), got {}",
                self.mu()
            )));
        }
        let m = self.m().sub(&Divisor::point(p.clone()));
        let tcr = self.tcr.with_m(m)?;
        let label = format!("E{}", self.next_exceptional);
        let exceptional = LineModuleRef::right(label.clone(), p.tau_power(1));

        let saved = SavedState {
            facts: self.facts.clone(),
            lines: self.lines.clone(),
            smoothness: self.smoothness,
            next_exceptional: self.next_exceptional,
        };
        let smoothness = smoothness_step(self.smoothness, pdim);
        let mut next = AlgebraDescriptor {
            tcr,
            family: self.family,
            smoothness,
            history: self.history.clone(),
            facts: FactBase::new(),
            lines: BTreeMap::new(),
            next_exceptional: self.next_exceptional + 1,
        };
        next.record_smoothness("smoothness-under-blowup");
        next.lines.insert(label.clone(), exceptional.clone());
        next.facts.insert(
            Literal::line(&label, Predicate::Exceptional, true),
            Provenance::Established("exceptional-line-of-blowup".into()),
        );
        // End(J) is the blowup at tau(p), which has the same Hilbert series
        next.facts.insert(
            Literal::line(&label, Predicate::Contractible, true),
            Provenance::Established("exceptional-line-endomorphism-ring".into()),
        );
        match pdim {
            PdimStatus::Finite => {
                next.facts
                    .declare(Literal::line(&label, Predicate::PdimFinite, true));
            }
            PdimStatus::Infinite => {
                next.facts
                    .declare(Literal::line(&label, Predicate::PdimFinite, false));
            }
            PdimStatus::Unknown => {}
        }
        if self.family == Family::SklyaninVeronese {
            next.facts.insert(
                Literal::algebra(Predicate::LocalizationSimple, true),
                Provenance::Established("iterated-sklyanin-blowup-localization-simple".into()),
            );
            // Blowing up the same point twice: the earlier exceptional line,
            // viewed over the new algebra, is isomorphic to the new one.
            if let Some(HistoryEvent::Blowup {
                point,
                exceptional: prev,
                ..
            }) = self.history.last()
            {
                if self.tcr.context().same_point(point, p) {
                    if let Some(prev_line) = self.lines.get(prev) {
                        next.lines.insert(prev.clone(), prev_line.clone());
                        for (a, b) in [(&label, prev), (prev, &label)] {
                            next.facts.insert(
                                Literal::pair(a, b, Predicate::Isomorphic, true),
                                Provenance::Established("repeated-blowup-exceptional-lines".into()),
                            );
                        }
                    }
                }
            }
        }
        next.history.push(HistoryEvent::Blowup {
            point: p.clone(),
            parent_degree: self.mu(),
            exceptional: label,
            saved: Box::new(SavedStateHandle(saved)),
        });
        Ok(Blowup {
            algebra: next,
            exceptional,
        })
    }

    /// Blow down a right line whose contractibility follows from the facts.
    pub fn blowdown(&self, label: &str) -> Result<Blowdown> {
        let line = self.line(label)?.clone();
        if line.side != Side::Right || line.shift != 0 {
            return Err(Error::precondition(format!(
                "blowdown takes an unshifted right line, got {line}"
            )));
        }
        let closure = self.closure();
        if !closure.is_consistent() {
            return Err(Error::inconsistency(format!(
                "fact base is contradictory: {}",
                closure
                    .contradictions
                    .iter()
                    .map(|l| format!("{} {}", l.subject, l.predicate))
                    .collect::<Vec<_>>()
                    .join(", ")
            )));
        }
        let subject = Subject::Line(label.to_string());
        if closure.status(&subject, Predicate::Contractible) != Some(true) {
            return Err(Error::precondition(format!(
                "cannot blow down {label}: hilb End(J) = hilb R is not established; any of these would do: {}",
                SUFFICIENT_FOR_CONTRACTION.join("; ")
            )));
        }

        let new_m = self.m().add(&Divisor::point(line.div_point.tau_power(-1)));
        let old_r = self.hilb_r();

        let algebra = match self.history.last() {
            Some(HistoryEvent::Blowup {
                exceptional, saved, ..
            }) if *exceptional == label => {
                let SavedStateHandle(saved) = saved.as_ref().clone();
                let mut history = self.history.clone();
                history.pop();
                AlgebraDescriptor {
                    tcr: self.tcr.with_m(new_m)?,
                    family: self.family,
                    smoothness: saved.smoothness,
                    history,
                    facts: saved.facts,
                    lines: saved.lines,
                    next_exceptional: saved.next_exceptional,
                }
            }
            _ => {
                let pdim_finite = closure.status(&subject, Predicate::PdimFinite) == Some(true);
                let minus_one = closure.status(&subject, Predicate::SelfDotMinusOne) == Some(true);
                let mut next = AlgebraDescriptor {
                    tcr: self.tcr.with_m(new_m)?,
                    family: self.family,
                    smoothness: blowdown_smoothness(self.smoothness, pdim_finite, minus_one),
                    history: self.history.clone(),
                    facts: FactBase::new(),
                    lines: BTreeMap::new(),
                    next_exceptional: self.next_exceptional,
                };
                next.record_smoothness("smoothness-under-blowdown");
                next.history.push(HistoryEvent::Blowdown {
                    line: label.to_string(),
                    div_point: line.div_point.clone(),
                    parent_degree: self.mu(),
                });
                next
            }
        };
        let series_delta = &algebra.hilb_r() - &old_r;
        let undid_blowup = algebra.history.len() < self.history.len();
        Ok(Blowdown {
            algebra,
            series_delta,
            undid_blowup,
        })
    }

    /// `hilb R~` predicted for the blowdown along an established line: the
    /// multiplicities are `s + s^2 + ...`.
    pub fn blowdown_tilde(&self) -> TildeExtensionReport {
        tilde_series(&self.hilb_r(), &HilbertSeries::monomial_over(1, 1))
            .expect("s/(1-s) is nonnegative")
    }
}

/// `s + s^2 + ... + s^n` as a series, a convenience for truncated inputs.
pub fn partial_geometric(n: i64) -> HilbertSeries {
    HilbertSeries::polynomial(LaurentPoly::geometric(1, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn algebra(mu: i64, smooth: Smoothness) -> AlgebraDescriptor {
        let tcr =
            TcrDescriptor::generic(Divisor::from_terms([(CurvePoint::base("M"), mu)])).unwrap();
        AlgebraDescriptor::new(tcr, smooth, Family::Generic).unwrap()
    }

    fn coeffs(h: &HilbertSeries, hi: i64) -> Vec<i64> {
        h.coefficients(0, hi)
            .iter()
            .map(|c| i64::try_from(c).unwrap())
            .collect()
    }

    #[test]
    fn hilb_r_values() {
        assert_eq!(
            coeffs(&algebra(9, Smoothness::Smooth).hilb_r(), 3),
            vec![1, 10, 28, 55]
        );
        let a7 = algebra(7, Smoothness::Unknown);
        assert_eq!(coeffs(&a7.hilb_r(), 2), vec![1, 8, 22]);
        assert_eq!(a7.hilb_line_ideal().coeff(1), BigInt::from(6));
        // spot check against the additive example: hilb R + s/(1-s)^2 at degree 1
        let l = LineModuleRef::right("L", CurvePoint::base("P"));
        assert_eq!(a7.hilb_hom_j_r(&l).coeff(1), BigInt::from(9));
    }

    #[test]
    fn blowup_bookkeeping() {
        let a = algebra(9, Smoothness::Smooth);
        let p = CurvePoint::base("P");
        let b = a.blowup(&p, PdimStatus::Finite).unwrap();
        assert_eq!(b.algebra.mu(), 8);
        assert_eq!(b.exceptional.div_point, p.tau_power(1));
        assert_eq!(b.algebra.smoothness(), Smoothness::Smooth);
        let c = b.algebra.blowup(&p, PdimStatus::Unknown).unwrap();
        assert_eq!(c.algebra.mu(), 7);
        assert_eq!(c.exceptional.div_point, p.tau_power(1));
        assert_eq!(c.algebra.smoothness(), Smoothness::Unknown);
    }

    #[test]
    fn degree_floor() {
        let a = algebra(4, Smoothness::Unknown);
        let b = a
            .blowup(&CurvePoint::base("P"), PdimStatus::Unknown)
            .unwrap();
        assert_eq!(b.algebra.mu(), 3);
        let err = b
            .algebra
            .blowup(&CurvePoint::base("P"), PdimStatus::Unknown)
            .unwrap_err();
        assert!(matches!(err, Error::Precondition(m) if m.contains("degree at least 4")));
        assert!(AlgebraDescriptor::new(
            TcrDescriptor::generic(Divisor::from_terms([(CurvePoint::base("M"), 2)])).unwrap(),
            Smoothness::Unknown,
            Family::Generic
        )
        .is_err());
    }

    #[test]
    fn round_trip_restores_descriptor() {
        let a = algebra(9, Smoothness::Smooth);
        let b = a
            .blowup(&CurvePoint::new("P", 3), PdimStatus::Finite)
            .unwrap();
        let d = b.algebra.blowdown(&b.exceptional.label).unwrap();
        assert!(d.undid_blowup);
        assert_eq!(d.algebra, a);
        assert_eq!(d.series_delta, HilbertSeries::monomial_over(1, 3));
        assert_eq!(coeffs(&d.series_delta, 3), vec![0, 1, 3, 6]);
    }

    #[test]
    fn blowdown_needs_justification() {
        let mut a = algebra(8, Smoothness::Smooth);
        a.add_line(LineModuleRef::right("L", CurvePoint::base("P")))
            .unwrap();
        let err = a.blowdown("L").unwrap_err();
        assert!(matches!(err, Error::Precondition(m) if m.contains("exceptional line")));
        a.add_fact(
            Literal::line("L", Predicate::SelfDotMinusOne, true),
            Provenance::Declared,
        );
        let d = a.blowdown("L").unwrap();
        assert_eq!(d.algebra.mu(), 9);
        assert_eq!(
            d.algebra.m(),
            &a.m().add(&Divisor::point(CurvePoint::new("P", -1)))
        );
        assert_eq!(d.series_delta, HilbertSeries::monomial_over(1, 3));
        // smoothness transfers only with finite pdim as well; qgr smooth
        // supplies it through the projective line ideal
        assert_eq!(d.algebra.smoothness(), Smoothness::Smooth);
        assert_eq!(a.blowdown_tilde().extension, d.algebra.hilb_r());
    }

    #[test]
    fn smoothness_tables() {
        use PdimStatus::*;
        use Smoothness::*;
        assert_eq!(smoothness_step(Smooth, Finite), Smooth);
        assert_eq!(smoothness_step(Smooth, Infinite), NotSmooth);
        assert_eq!(
            smoothness_step(Smooth, PdimStatus::Unknown),
            Smoothness::Unknown
        );
        assert_eq!(smoothness_step(NotSmooth, Finite), NotSmooth);
        assert_eq!(
            smoothness_step(Smoothness::Unknown, Finite),
            Smoothness::Unknown
        );
        assert_eq!(blowdown_smoothness(Smooth, true, true), Smooth);
        assert_eq!(
            blowdown_smoothness(Smooth, true, false),
            Smoothness::Unknown
        );
    }

    #[test]
    fn duals() {
        let l = LineModuleRef::right("L", CurvePoint::base("P"));
        let d = line_dual(&l);
        assert_eq!(d.side, Side::Left);
        assert_eq!(d.div_point, CurvePoint::new("P", -1));
        assert_eq!(d.hilbert_series(), HilbertSeries::monomial_over(1, 2));
        let back = line_dual(&dual_line_module(&l));
        assert_eq!(
            (back.side, &back.div_point, back.shift),
            (l.side, &l.div_point, -1)
        );
        let vv = dual_line_module(&dual_line_module(&l));
        assert_eq!(
            (vv.side, &vv.div_point, vv.shift),
            (l.side, &l.div_point, l.shift)
        );
    }

    #[test]
    fn tilde_cases() {
        let r = algebra(5, Smoothness::Unknown).hilb_r();
        let zero = tilde_series(&r, &HilbertSeries::zero()).unwrap();
        assert_eq!(zero.extension, r);
        assert!(zero.ext1.is_zero());
        let cube = tilde_series(&r, &HilbertSeries::monomial(3)).unwrap();
        assert_eq!(cube.ext1.rank_at_one(), Some(BigInt::from(1)));
        assert!(tilde_series(&r, &HilbertSeries::monomial(3).scale(-1)).is_err());
        // truncating s/(1-s) agrees in low degrees
        let trunc = tilde_series(&r, &partial_geometric(10)).unwrap();
        let full = tilde_series(&r, &HilbertSeries::monomial_over(1, 1)).unwrap();
        assert_eq!(
            trunc.extension.coefficients(0, 10),
            full.extension.coefficients(0, 10)
        );
    }

    proptest! {
        #[test]
        fn round_trip_random(mu in 4i64..10, orbit in 0usize..3, k in -30i64..30) {
            let a = algebra(mu, Smoothness::Unknown);
            let p = CurvePoint::new(["M", "P", "Q"][orbit], k);
            let b = a.blowup(&p, PdimStatus::Unknown).unwrap();
            prop_assert_eq!(b.algebra.mu(), mu - 1);
            prop_assert_eq!(&b.algebra.hilb_r() - &a.hilb_r(), HilbertSeries::monomial_over(1, 3).scale(-1));
            let d = b.algebra.blowdown(&b.exceptional.label).unwrap();
            prop_assert_eq!(&d.algebra, &a);
            prop_assert_eq!(
                &d.algebra.hilb_line_ideal() + &HilbertSeries::monomial_over(0, 2),
                d.algebra.hilb_r()
            );
        }
    }
}
