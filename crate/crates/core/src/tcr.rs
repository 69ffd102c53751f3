//! Twisted homogeneous coordinate rings `B(E, M, tau)`: section counts,
//! Hilbert series of saturated submodules, and point-module tables.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::curve::{CurvePoint, Divisor, GenericityContext};
use crate::error::{Error, Result};
use crate::exec::{par_map, ExecutionMode};
use crate::hilbert::HilbertSeries;

/// `B(E, M, tau)` with `M` kept as an exact divisor.
#[derive(Clone, Debug, PartialEq)]
pub struct TcrDescriptor {
    m: Divisor,
    context: Arc<GenericityContext>,
}

/// One audited degree: the divisor whose sections give the degree-`n` piece.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    pub n: i64,
    pub divisor: String,
    pub h0: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// A point module `M_p[shift]` (right) or `M^l_p[shift]` (left).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointModuleRef {
    pub point: CurvePoint,
    pub side: Side,
    pub shift: i64,
}

impl PointModuleRef {
    pub fn right(point: CurvePoint) -> Self {
        Self {
            point,
            side: Side::Right,
            shift: 0,
        }
    }

    pub fn left(point: CurvePoint) -> Self {
        Self {
            point,
            side: Side::Left,
            shift: 0,
        }
    }

    pub fn shifted(&self, n: i64) -> Self {
        Self {
            shift: self.shift + n,
            ..self.clone()
        }
    }

    /// `hilb = s^-shift / (1-s)`.
    pub fn hilbert_series(&self) -> HilbertSeries {
        HilbertSeries::monomial_over(-self.shift, 1)
    }

    /// The unshifted point module isomorphic to `(self)_{>=0}`, which for a
    /// right module `M_p[n]` is `M_{tau^n p}` and for a left module
    /// `M^l_q[n]` is `M^l_{tau^-n q}`. Requires `shift >= 0`.
    pub fn truncate(&self) -> Result<Self> {
        if self.shift < 0 {
            return Err(Error::precondition(
                "truncation to degrees >= 0 needs a nonnegative shift",
            ));
        }
        let point = match self.side {
            Side::Right => self.point.tau_power(self.shift),
            Side::Left => self.point.tau_power(-self.shift),
        };
        Ok(Self {
            point,
            side: self.side,
            shift: 0,
        })
    }
}

impl fmt::Display for PointModuleRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} point module at {}", self.side, self.point)?;
        if self.shift != 0 {
            write!(f, "[{}]", self.shift)?;
        }
        Ok(())
    }
}

/// Hom between saturated modules, as a closed series plus audit rows.
#[derive(Clone, Debug, PartialEq)]
pub struct SaturatedHom {
    pub series: HilbertSeries,
    pub rows: Vec<TraceRow>,
    /// Degree-`n` divisor is `base + M_n` pulled along `tau^n`; this is the
    /// first degree with a nonnegative divisor degree.
    pub first_degree: i64,
}

impl TcrDescriptor {
    pub fn new(m: Divisor, context: Arc<GenericityContext>) -> Result<Self> {
        if m.degree() < 1 {
            return Err(Error::precondition(format!(
                "twisting divisor must have degree >= 1, got {}",
                m.degree()
            )));
        }
        Ok(Self { m, context })
    }

    pub fn generic(m: Divisor) -> Result<Self> {
        Self::new(m, Arc::new(GenericityContext::generic()))
    }

    pub fn m(&self) -> &Divisor {
        &self.m
    }

    pub fn context(&self) -> &Arc<GenericityContext> {
        &self.context
    }

    pub fn mu(&self) -> i64 {
        self.m.degree()
    }

    pub fn with_m(&self, m: Divisor) -> Result<Self> {
        Self::new(m, Arc::clone(&self.context))
    }

    /// Divisor of `M_n`.
    pub fn m_n(&self, n: i64) -> Divisor {
        self.m.twisted_power(n)
    }

    /// `h^0(E, O(D))` by Riemann-Roch on a genus-one curve.
    pub fn h0(&self, d: &Divisor) -> i64 {
        h0(&self.context, d)
    }

    /// `hilb B = 1 + mu s / (1-s)^2`; `deg M_n = n mu >= 1` for `n >= 1`, so
    /// no principality question ever arises.
    pub fn hilb_b(&self) -> HilbertSeries {
        &HilbertSeries::one() + &HilbertSeries::monomial_over(1, 2).scale(self.mu())
    }

    /// Per-degree rows `h0(M_n)` for `n = 0..=window`.
    pub fn hilb_b_rows(&self, window: i64, mode: ExecutionMode) -> Vec<TraceRow> {
        let ns: Vec<i64> = (0..=window).collect();
        par_map(mode, &ns, |&n| {
            let d = self.m_n(n);
            TraceRow {
                n,
                h0: self.h0(&d),
                divisor: d.to_string(),
            }
        })
    }

    /// Divisor of the degree-`n` piece of `Hom(O(F)-module, O(G)-module)`.
    pub fn hom_divisor(&self, f: &Divisor, g: &Divisor, n: i64) -> Divisor {
        f.negate().pullback(n).add(g).add(&self.m_n(n))
    }

    /// Hilbert series of `Hom_B(S(F), S(G))` where `S(X) = ⊕_n H^0(O(X) ⊗ M_n)`.
    ///
    /// The divisor degree `deg G - deg F + n mu` grows strictly, so only the
    /// first degree can land on zero; beyond it the series is linear.
    pub fn hom_saturated(
        &self,
        f: &Divisor,
        g: &Divisor,
        window: i64,
        mode: ExecutionMode,
    ) -> SaturatedHom {
        let mu = self.mu();
        let a = g.degree() - f.degree();
        let n0 = div_ceil(-a, mu);
        let head = if a + mu * n0 == 0 {
            let principal = self.context.is_principal(&self.hom_divisor(f, g, n0));
            Some(principal)
        } else {
            None
        };
        let n1 = if head.is_some() { n0 + 1 } else { n0 };
        // s^n1 [ (a + mu n1)/(1-s) + mu s/(1-s)^2 ]
        let tail = &HilbertSeries::monomial_over(n1, 1).scale(a + mu * n1)
            + &HilbertSeries::monomial_over(n1 + 1, 2).scale(mu);
        let series = match head {
            Some(true) => &tail + &HilbertSeries::monomial(n0),
            _ => tail,
        };
        let ns: Vec<i64> = (n0.min(0)..=window).collect();
        let rows = par_map(mode, &ns, |&n| {
            let d = self.hom_divisor(f, g, n);
            TraceRow {
                n,
                h0: self.h0(&d),
                divisor: d.to_string(),
            }
        });
        SaturatedHom {
            series,
            rows,
            first_degree: n0,
        }
    }

    fn require_mu(&self, min: i64, what: &str) -> Result<()> {
        if self.mu() < min {
            return Err(Error::precondition(format!(
                "{what} needs deg M >= {min}, got {}",
                self.mu()
            )));
        }
        Ok(())
    }

    fn right_pair(&self, p: &PointModuleRef, q: &PointModuleRef) -> Result<Option<i64>> {
        if p.side != Side::Right || q.side != Side::Right {
            return Err(Error::precondition("point tables take right point modules"));
        }
        Ok(self.context.orbit_offset(&p.point, &q.point))
    }

    /// `Hom_B(M_p[a], M_q[b])`; `s^j` when `p = tau^j q` with `j >= 0`.
    pub fn point_hom(&self, p: &PointModuleRef, q: &PointModuleRef) -> Result<HilbertSeries> {
        self.require_mu(3, "the graded point Hom table")?;
        let base = match self.right_pair(p, q)? {
            Some(j) if j >= 0 => HilbertSeries::monomial(j),
            _ => HilbertSeries::zero(),
        };
        Ok(base.shift(p.shift - q.shift))
    }

    /// `Ext^1_B(M_p[a], M_q[b])`; always contains `s^-1`.
    pub fn point_ext1(&self, p: &PointModuleRef, q: &PointModuleRef) -> Result<HilbertSeries> {
        self.require_mu(3, "the graded point Ext table")?;
        let mut base = HilbertSeries::monomial(-1);
        if let Some(j) = self.right_pair(p, q)? {
            if j >= 0 {
                base = &base + &HilbertSeries::monomial(j);
            }
        }
        Ok(base.shift(p.shift - q.shift))
    }

    /// Hom and Ext^1 in the quotient category: both `s^j` for `p = tau^j q`.
    pub fn point_qgr_homext(
        &self,
        p: &PointModuleRef,
        q: &PointModuleRef,
    ) -> Result<(HilbertSeries, HilbertSeries)> {
        self.require_mu(2, "the quotient-category point table")?;
        let base = match self.right_pair(p, q)? {
            Some(j) => HilbertSeries::monomial(j),
            None => HilbertSeries::zero(),
        };
        let shifted = base.shift(p.shift - q.shift);
        Ok((shifted.clone(), shifted))
    }

    /// `Ext^1_B(M, B)` for an unshifted point module: the opposite-side point
    /// module at `tau^-2 p` (right input) or `tau^2 q` (left input), shifted
    /// by `-1` so that its series is `s/(1-s)`.
    pub fn point_dual(&self, p: &PointModuleRef) -> Result<PointModuleRef> {
        self.require_mu(3, "the point-module dual")?;
        if p.shift != 0 {
            return Err(Error::precondition(
                "point_dual takes an unshifted module; truncate the shift first",
            ));
        }
        let point = match p.side {
            Side::Right => p.point.tau_power(-2),
            Side::Left => p.point.tau_power(2),
        };
        Ok(PointModuleRef {
            point,
            side: p.side.opposite(),
            shift: -1,
        })
    }
}

/// Riemann-Roch on an elliptic curve.
pub fn h0(ctx: &GenericityContext, d: &Divisor) -> i64 {
    match d.degree() {
        n if n >= 1 => n,
        0 => i64::from(ctx.is_principal(d)),
        _ => 0,
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    a.div_euclid(b) + i64::from(a.rem_euclid(b) != 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn d(text: &str) -> Divisor {
        text.parse().unwrap()
    }

    fn tcr(mu: i64) -> TcrDescriptor {
        TcrDescriptor::generic(Divisor::from_terms([(CurvePoint::base("M"), mu)])).unwrap()
    }

    fn coeffs(h: &HilbertSeries, lo: i64, hi: i64) -> Vec<i64> {
        h.coefficients(lo, hi)
            .iter()
            .map(|c| i64::try_from(c).unwrap())
            .collect()
    }

    #[test]
    fn h0_cases() {
        let b = tcr(3);
        assert_eq!(b.h0(&d("3*[A:0]")), 3);
        assert_eq!(b.h0(&d("[A:0] - [B:0]")), 0);
        assert_eq!(b.h0(&d("[A:2] + [A:-2] - 2*[A:0]")), 1);
        assert_eq!(b.h0(&d("-[A:0]")), 0);
    }

    #[test]
    fn hilb_b_coefficients() {
        assert_eq!(coeffs(&tcr(9).hilb_b(), 0, 3), vec![1, 9, 18, 27]);
        assert_eq!(coeffs(&tcr(3).hilb_b(), 0, 3), vec![1, 3, 6, 9]);
        assert_eq!(coeffs(&tcr(1).hilb_b(), 0, 3), vec![1, 1, 2, 3]);
        assert_eq!(tcr(9).hilb_b().coeff(2), BigInt::from(18));
        // closed form agrees with per-degree section counts
        let b = tcr(5);
        let rows = b.hilb_b_rows(30, ExecutionMode::Sequential);
        for row in rows {
            assert_eq!(BigInt::from(row.h0), b.hilb_b().coeff(row.n));
        }
    }

    #[test]
    fn rejects_nonpositive_degree() {
        assert!(TcrDescriptor::generic(d("[A:0] - [B:0]")).is_err());
    }

    #[test]
    fn epsilon_cases() {
        for mu in [3, 7, 9] {
            let b = tcr(mu);
            let p = d("-[P:0]");
            let same = b.hom_saturated(&p, &p, 50, ExecutionMode::Sequential);
            assert_eq!(same.series, b.hilb_b());
            let shifted = b.hom_saturated(&p, &d("-[P:-3]"), 50, ExecutionMode::Sequential);
            assert_eq!(shifted.series, &b.hilb_b() - &HilbertSeries::one());
            let off = b.hom_saturated(&p, &d("-[Q:0]"), 50, ExecutionMode::Sequential);
            assert_eq!(off.series, &b.hilb_b() - &HilbertSeries::one());
        }
    }

    #[test]
    fn point_ideal_dual_quotient() {
        let b = tcr(4);
        let h = b.hom_saturated(
            &d("-[P:0]"),
            &Divisor::zero(),
            20,
            ExecutionMode::Sequential,
        );
        assert_eq!(&h.series - &b.hilb_b(), HilbertSeries::monomial_over(1, 1));
        assert_eq!(h.rows[2].divisor, b.m_n(2).add(&d("[P:-2]")).to_string());
    }

    #[test]
    fn point_tables() {
        let b = tcr(3);
        let q = PointModuleRef::right(CurvePoint::base("Q"));
        let at = |j| PointModuleRef::right(CurvePoint::new("Q", j));
        let off = PointModuleRef::right(CurvePoint::base("Z"));
        assert_eq!(b.point_hom(&at(2), &q).unwrap(), HilbertSeries::monomial(2));
        assert_eq!(b.point_hom(&q, &q).unwrap(), HilbertSeries::one());
        assert_eq!(b.point_hom(&off, &q).unwrap(), HilbertSeries::zero());
        assert_eq!(
            b.point_ext1(&at(2), &q).unwrap(),
            HilbertSeries::polynomial("s^-1 + s^2".parse().unwrap())
        );
        assert_eq!(
            b.point_ext1(&at(-1), &q).unwrap(),
            HilbertSeries::monomial(-1)
        );
        assert_eq!(b.point_ext1(&off, &q).unwrap(), HilbertSeries::monomial(-1));
        let (h, e) = b.point_qgr_homext(&at(-3), &q).unwrap();
        assert_eq!(
            (h.clone(), e),
            (HilbertSeries::monomial(-3), HilbertSeries::monomial(-3))
        );
        assert_eq!(
            b.point_qgr_homext(&off, &q).unwrap().0,
            HilbertSeries::zero()
        );
        assert!(tcr(2).point_hom(&q, &q).is_err());
        assert!(tcr(2).point_qgr_homext(&q, &q).is_ok());
    }

    #[test]
    fn duals_and_truncation() {
        let b = tcr(3);
        let p = PointModuleRef::right(CurvePoint::base("P"));
        let dual = b.point_dual(&p).unwrap();
        assert_eq!(dual.side, Side::Left);
        assert_eq!(dual.point, CurvePoint::new("P", -2));
        assert_eq!(dual.hilbert_series(), HilbertSeries::monomial_over(1, 1));
        let back = b.point_dual(&dual.shifted(1)).unwrap();
        assert_eq!(
            (back.side, back.point.clone()),
            (Side::Right, p.point.clone())
        );
        assert!(b.point_dual(&dual).is_err());
        assert_eq!(
            p.shifted(2).truncate().unwrap(),
            PointModuleRef::right(CurvePoint::new("P", 2))
        );
        let l = PointModuleRef::left(CurvePoint::base("P"));
        assert_eq!(
            l.shifted(2).truncate().unwrap(),
            PointModuleRef::left(CurvePoint::new("P", -2))
        );
    }

    #[test]
    fn div_ceil_signs() {
        assert_eq!(div_ceil(-1, 9), 0);
        assert_eq!(div_ceil(1, 9), 1);
        assert_eq!(div_ceil(-9, 9), -1);
        assert_eq!(div_ceil(-10, 9), -1);
        assert_eq!(div_ceil(10, 9), 2);
    }

    proptest! {
        #[test]
        fn hom_saturated_matches_rows(mu in 1i64..10, fa in -12i64..12, ga in -12i64..12, fo in 0usize..2, shift in -4i64..5) {
            let b = tcr(mu);
            let orbit = ["P", "Q"][fo];
            let f = Divisor::from_terms([(CurvePoint::new("P", 0), fa)]);
            let g = Divisor::from_terms([(CurvePoint::new(orbit, shift), ga)]);
            let h = b.hom_saturated(&f, &g, 40, ExecutionMode::Sequential);
            for row in &h.rows {
                prop_assert_eq!(BigInt::from(row.h0), h.series.coeff(row.n));
            }
            prop_assert_eq!(h.series.coeff(h.first_degree - 1), BigInt::from(0));
        }

        #[test]
        fn gr_hom_below_qgr_hom(j in -4i64..5, a in -2i64..3, b_shift in -2i64..3) {
            let b = tcr(3);
            let p = PointModuleRef::right(CurvePoint::new("Q", j)).shifted(a);
            let q = PointModuleRef::right(CurvePoint::base("Q")).shifted(b_shift);
            let gr = b.point_hom(&p, &q).unwrap();
            let (qgr, _) = b.point_qgr_homext(&p, &q).unwrap();
            prop_assert!(gr.leq(&qgr));
            let e = b.point_ext1(&p, &q).unwrap();
            prop_assert!(HilbertSeries::monomial(-1).shift(a - b_shift).leq(&e));
        }
    }
}
