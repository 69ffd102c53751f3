//! Short Weierstrass curves `y^2 = x^3 + ax + b` with exact group law over
//! the rationals or a prime field. Used as ground truth for principality.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, ParseError, Result};

/// Exact field arithmetic. Constructors take `&self` so that prime-field
/// elements can carry their modulus.
pub trait Field: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn constant(&self, n: i64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn is_zero(&self) -> bool;
    /// 0 for the rationals.
    fn characteristic(&self) -> u64;

    fn zero_like(&self) -> Self {
        self.constant(0)
    }
    fn one_like(&self) -> Self {
        self.constant(1)
    }
}

impl Field for BigRational {
    fn constant(&self, n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn characteristic(&self) -> u64 {
        0
    }
}

/// An element of `F_p`, `p` an odd prime below `2^63`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Fp {
    pub v: u64,
    pub p: u64,
}

impl Fp {
    pub fn new(v: i64, p: u64) -> Self {
        Fp {
            v: v.rem_euclid(p as i64) as u64,
            p,
        }
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = *self;
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = Field::mul(&acc, &base);
            }
            base = Field::mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl Field for Fp {
    fn constant(&self, n: i64) -> Self {
        Fp::new(n, self.p)
    }
    fn add(&self, other: &Self) -> Self {
        Fp {
            v: ((self.v as u128 + other.v as u128) % self.p as u128) as u64,
            p: self.p,
        }
    }
    fn sub(&self, other: &Self) -> Self {
        Field::add(self, &Field::neg(other))
    }
    fn mul(&self, other: &Self) -> Self {
        Fp {
            v: ((self.v as u128 * other.v as u128) % self.p as u128) as u64,
            p: self.p,
        }
    }
    fn neg(&self) -> Self {
        Fp {
            v: (self.p - self.v) % self.p,
            p: self.p,
        }
    }
    fn inv(&self) -> Option<Self> {
        (self.v != 0).then(|| self.pow(self.p - 2))
    }
    fn is_zero(&self) -> bool {
        self.v == 0
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum Point<F> {
    Infinity,
    Affine { x: F, y: F },
}

impl<F: Field> Point<F> {
    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }
}

impl<F: Field> fmt::Display for Point<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Infinity => write!(f, "O"),
            Point::Affine { x, y } => write!(f, "({x},{y})"),
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct WeierstrassCurve<F> {
    a: F,
    b: F,
}

/// `n * t = O` was found inside the guarded range.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("translation point has finite order dividing {n}")]
pub struct OrderGuardError {
    pub n: u64,
}

impl<F: Field> WeierstrassCurve<F> {
    pub fn new(a: F, b: F) -> Result<Self> {
        let ch = a.characteristic();
        if ch == 2 || ch == 3 {
            return Err(Error::precondition(
                "short Weierstrass form needs characteristic other than 2 and 3",
            ));
        }
        // 4a^3 + 27b^2 != 0
        let a3 = a.mul(&a).mul(&a);
        let disc = a.constant(4).mul(&a3).add(&a.constant(27).mul(&b.mul(&b)));
        if disc.is_zero() {
            return Err(Error::precondition("singular curve: 4a^3 + 27b^2 = 0"));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &F {
        &self.a
    }

    pub fn b(&self) -> &F {
        &self.b
    }

    pub fn contains(&self, p: &Point<F>) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine { x, y } => {
                let rhs = x.mul(x).mul(x).add(&self.a.mul(x)).add(&self.b);
                y.mul(y) == rhs
            }
        }
    }

    pub fn point(&self, x: F, y: F) -> Result<Point<F>> {
        let p = Point::Affine { x, y };
        if self.contains(&p) {
            Ok(p)
        } else {
            Err(Error::precondition(format!("{p} is not on the curve")))
        }
    }

    pub fn negate(&self, p: &Point<F>) -> Point<F> {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine { x, y } => Point::Affine {
                x: x.clone(),
                y: y.neg(),
            },
        }
    }

    pub fn add(&self, p: &Point<F>, q: &Point<F>) -> Point<F> {
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return q.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine { x: x1, y: y1 }, Point::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            if y1.add(y2).is_zero() {
                return Point::Infinity;
            }
            // tangent: (3x^2 + a) / 2y
            let num = x1.constant(3).mul(&x1.mul(x1)).add(&self.a);
            let den = y1.constant(2).mul(y1);
            num.mul(&den.inv().expect("2y is nonzero off the 2-torsion"))
        } else {
            let den = x2.sub(x1);
            y2.sub(y1).mul(&den.inv().expect("distinct x"))
        };
        let x3 = lambda.mul(&lambda).sub(x1).sub(x2);
        let y3 = lambda.mul(&x1.sub(&x3)).sub(y1);
        Point::Affine { x: x3, y: y3 }
    }

    pub fn scalar_mul(&self, n: i64, p: &Point<F>) -> Point<F> {
        let mut base = if n < 0 { self.negate(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = Point::Infinity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            k >>= 1;
            // skip the final doubling; rational coordinates grow fast
            if k > 0 {
                base = self.add(&base, &base);
            }
        }
        acc
    }

    /// Group-law sum of a concrete divisor.
    pub fn divisor_sum<'a, I>(&self, terms: I) -> Point<F>
    where
        I: IntoIterator<Item = (&'a Point<F>, i64)>,
        F: 'a,
    {
        terms.into_iter().fold(Point::Infinity, |acc, (p, m)| {
            self.add(&acc, &self.scalar_mul(m, p))
        })
    }

    /// Check that `t` cannot have finite order showing up within `horizon`.
    /// Over the rationals torsion orders are at most 12, so checking those
    /// multiples proves infinite order outright.
    pub fn order_guard(&self, t: &Point<F>, horizon: u64) -> Result<(), OrderGuardError> {
        let limit = if self.a.characteristic() == 0 {
            12
        } else {
            horizon
        };
        let mut acc = Point::Infinity;
        for n in 1..=limit {
            acc = self.add(&acc, t);
            if acc.is_infinity() {
                return Err(OrderGuardError { n });
            }
        }
        Ok(())
    }
}

/// Symbolic orbits bound to concrete points: `[X:k]` evaluates to `P_X + k t`.
#[derive(Clone, Debug, PartialEq)]
pub struct Binding<F> {
    pub curve: WeierstrassCurve<F>,
    pub translation: Point<F>,
    pub points: BTreeMap<String, Point<F>>,
}

impl<F: Field> Binding<F> {
    pub fn new(curve: WeierstrassCurve<F>, translation: Point<F>) -> Result<Self> {
        if !curve.contains(&translation) {
            return Err(Error::precondition("translation point is not on the curve"));
        }
        Ok(Self {
            curve,
            translation,
            points: BTreeMap::new(),
        })
    }

    pub fn bind(&mut self, orbit: &str, p: Point<F>) -> Result<()> {
        if !self.curve.contains(&p) {
            return Err(Error::precondition(format!(
                "bound point for orbit {orbit} is not on the curve"
            )));
        }
        self.points.insert(orbit.to_string(), p);
        Ok(())
    }

    /// `sum_X m_X P_X + w t`.
    pub fn evaluate(
        &self,
        orbit_mults: &BTreeMap<String, i64>,
        weighted_shift: i64,
    ) -> Option<Point<F>> {
        let mut acc = self.curve.scalar_mul(weighted_shift, &self.translation);
        for (orbit, m) in orbit_mults {
            let p = self.points.get(orbit)?;
            acc = self.curve.add(&acc, &self.curve.scalar_mul(*m, p));
        }
        Some(acc)
    }

    /// Offset `k` with `P_a - P_b = k t`, searched for `|k| <= horizon`.
    pub fn coincidence(&self, a: &str, b: &str, horizon: i64) -> Option<i64> {
        let pa = self.points.get(a)?;
        let pb = self.points.get(b)?;
        let diff = self.curve.add(pa, &self.curve.negate(pb));
        let t = &self.translation;
        let mut plus = Point::Infinity;
        let mut minus = Point::Infinity;
        for k in 0..=horizon {
            if plus == diff {
                return Some(k);
            }
            if minus == diff {
                return Some(-k);
            }
            plus = self.curve.add(&plus, t);
            minus = self.curve.add(&minus, &self.curve.negate(t));
        }
        None
    }
}

/// An oracle over a fixed field.
#[derive(Clone, Debug, PartialEq)]
pub enum OracleBinding {
    Rational(Binding<BigRational>),
    Prime(Binding<Fp>),
}

impl OracleBinding {
    pub fn characteristic(&self) -> u64 {
        match self {
            OracleBinding::Rational(_) => 0,
            OracleBinding::Prime(b) => b.curve.a.p,
        }
    }

    pub fn bound_orbits(&self) -> Vec<String> {
        match self {
            OracleBinding::Rational(b) => b.points.keys().cloned().collect(),
            OracleBinding::Prime(b) => b.points.keys().cloned().collect(),
        }
    }

    pub fn is_bound(&self, orbit: &str) -> bool {
        match self {
            OracleBinding::Rational(b) => b.points.contains_key(orbit),
            OracleBinding::Prime(b) => b.points.contains_key(orbit),
        }
    }

    /// Whether `sum m_X P_X + w t = O`; `None` if some orbit is unbound.
    pub fn sums_to_identity(
        &self,
        orbit_mults: &BTreeMap<String, i64>,
        weighted_shift: i64,
    ) -> Option<bool> {
        match self {
            OracleBinding::Rational(b) => b
                .evaluate(orbit_mults, weighted_shift)
                .map(|p| p.is_infinity()),
            OracleBinding::Prime(b) => b
                .evaluate(orbit_mults, weighted_shift)
                .map(|p| p.is_infinity()),
        }
    }

    pub fn order_guard(&self, horizon: u64) -> Result<(), OrderGuardError> {
        match self {
            OracleBinding::Rational(b) => b.curve.order_guard(&b.translation, horizon),
            OracleBinding::Prime(b) => b.curve.order_guard(&b.translation, horizon),
        }
    }

    pub fn coincidence(&self, a: &str, b: &str, horizon: i64) -> Option<i64> {
        match self {
            OracleBinding::Rational(x) => x.coincidence(a, b, horizon),
            OracleBinding::Prime(x) => x.coincidence(a, b, horizon),
        }
    }

    /// Bind an orbit from textual coordinates such as `(3,5)` or `(129/100,-383/1000)`.
    pub fn bind_literal(&mut self, orbit: &str, coords: &str) -> Result<()> {
        let (x, y) = split_pair(coords)?;
        match self {
            OracleBinding::Rational(b) => {
                let p = b.curve.point(parse_rational(x)?, parse_rational(y)?)?;
                b.bind(orbit, p)
            }
            OracleBinding::Prime(b) => {
                let q = b.curve.a.p;
                let p = b.curve.point(parse_fp(x, q)?, parse_fp(y, q)?)?;
                b.bind(orbit, p)
            }
        }
    }

    /// Parse `curve Q: a=0 b=-2; t=(3,5)` or `curve F101: a=1 b=1; t=(3,43)`.
    /// The leading `curve` keyword is optional.
    pub fn parse(text: &str) -> Result<Self> {
        let body = text.trim();
        let body = body.strip_prefix("curve").unwrap_or(body).trim();
        let (field, rest) = body
            .split_once(':')
            .ok_or_else(|| ParseError::new("curve literal needs `<field>: a=.. b=..; t=(x,y)`"))?;
        let (coeffs, t_part) = rest
            .split_once(';')
            .ok_or_else(|| ParseError::new("curve literal is missing `; t=(x,y)`"))?;
        let mut a_text = None;
        let mut b_text = None;
        for tok in coeffs.split_whitespace() {
            match tok.split_once('=') {
                Some(("a", v)) => a_text = Some(v),
                Some(("b", v)) => b_text = Some(v),
                _ => {
                    return Err(ParseError::new(format!(
                        "unexpected token `{tok}` in curve literal"
                    ))
                    .into())
                }
            }
        }
        let a_text = a_text.ok_or_else(|| ParseError::new("curve literal is missing a="))?;
        let b_text = b_text.ok_or_else(|| ParseError::new("curve literal is missing b="))?;
        let t_coords = t_part
            .trim()
            .strip_prefix("t=")
            .ok_or_else(|| ParseError::new("curve literal is missing t=(x,y)"))?;
        let (tx, ty) = split_pair(t_coords)?;

        match field.trim() {
            "Q" => {
                let curve =
                    WeierstrassCurve::new(parse_rational(a_text)?, parse_rational(b_text)?)?;
                let t = curve.point(parse_rational(tx)?, parse_rational(ty)?)?;
                Ok(OracleBinding::Rational(Binding::new(curve, t)?))
            }
            f => {
                let p: u64 = f
                    .strip_prefix('F')
                    .and_then(|n| n.parse().ok())
                    .ok_or_else(|| {
                        ParseError::new(format!("unknown field `{f}`; use Q or F<prime>"))
                    })?;
                if !is_prime(p) || p >= 1 << 62 {
                    return Err(Error::precondition(format!(
                        "field size {p} is not a usable prime"
                    )));
                }
                let curve = WeierstrassCurve::new(parse_fp(a_text, p)?, parse_fp(b_text, p)?)?;
                let t = curve.point(parse_fp(tx, p)?, parse_fp(ty, p)?)?;
                Ok(OracleBinding::Prime(Binding::new(curve, t)?))
            }
        }
    }
}

fn split_pair(text: &str) -> Result<(&str, &str)> {
    let inner = text
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| ParseError::new(format!("expected `(x,y)`, got `{}`", text.trim())))?;
    let (x, y) = inner
        .split_once(',')
        .ok_or_else(|| ParseError::new(format!("expected `(x,y)`, got `{}`", text.trim())))?;
    Ok((x.trim(), y.trim()))
}

fn parse_rational(text: &str) -> Result<BigRational> {
    text.trim()
        .parse::<BigRational>()
        .map_err(|_| ParseError::new(format!("bad rational `{text}`")).into())
}

fn parse_fp(text: &str, p: u64) -> Result<Fp> {
    let n: BigInt = text
        .trim()
        .parse()
        .map_err(|_| ParseError::new(format!("bad field element `{text}`")))?;
    let r = ((n % BigInt::from(p)) + BigInt::from(p)) % BigInt::from(p);
    let v: u64 = r.try_into().expect("reduced below p");
    Ok(Fp { v, p })
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `y^2 = x^3 - 2` over the rationals with `t = (3, 5)`, a point of infinite order.
pub fn default_rational_curve() -> (WeierstrassCurve<BigRational>, Point<BigRational>) {
    let q = |n: i64| BigRational::from_integer(BigInt::from(n));
    let curve = WeierstrassCurve::new(q(0), q(-2)).expect("nonsingular");
    let t = curve.point(q(3), q(5)).expect("on curve");
    (curve, t)
}

/// All affine points of a prime-field curve, in order of `x` then `y`.
pub fn fp_points(curve: &WeierstrassCurve<Fp>) -> Vec<Point<Fp>> {
    let p = curve.a.p;
    let mut out = Vec::new();
    for x in 0..p {
        let xf = Fp::new(x as i64, p);
        let rhs = xf.mul(&xf).mul(&xf).add(&curve.a.mul(&xf)).add(&curve.b);
        // Euler's criterion then a direct square root search is fine at these sizes
        if rhs.is_zero() {
            out.push(Point::Affine { x: xf, y: rhs });
            continue;
        }
        if rhs.pow((p - 1) / 2).v != 1 {
            continue;
        }
        if let Some(y) = (1..p)
            .map(|y| Fp::new(y as i64, p))
            .find(|y| y.mul(y) == rhs)
        {
            out.push(Point::Affine { x: xf, y });
            out.push(Point::Affine { x: xf, y: y.neg() });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn small_fp_curve() -> WeierstrassCurve<Fp> {
        WeierstrassCurve::new(Fp::new(1, 101), Fp::new(1, 101)).unwrap()
    }

    #[test]
    fn doubling_on_rational_curve() {
        let (curve, t) = default_rational_curve();
        let two = curve.scalar_mul(2, &t);
        assert_eq!(
            two,
            Point::Affine {
                x: q(129, 100),
                y: q(-383, 1000)
            }
        );
        assert!(curve.contains(&two));
        assert_eq!(curve.add(&t, &Point::Infinity), t);
        assert!(curve.add(&t, &curve.negate(&t)).is_infinity());
    }

    #[test]
    fn rejects_bad_curves() {
        assert!(WeierstrassCurve::new(q(0, 1), q(0, 1)).is_err());
        assert!(WeierstrassCurve::new(Fp::new(1, 3), Fp::new(1, 3)).is_err());
        assert!(WeierstrassCurve::new(Fp::new(1, 2), Fp::new(1, 2)).is_err());
        let (curve, _) = default_rational_curve();
        assert!(curve.point(q(1, 1), q(1, 1)).is_err());
    }

    #[test]
    fn order_guard_cases() {
        let (curve, t) = default_rational_curve();
        assert_eq!(curve.order_guard(&t, 100), Ok(()));

        let fp = small_fp_curve();
        let p7 = fp.point(Fp::new(3, 101), Fp::new(43, 101)).unwrap();
        assert_eq!(fp.order_guard(&p7, 100), Err(OrderGuardError { n: 7 }));
        assert_eq!(fp.order_guard(&p7, 6), Ok(()));

        // 2-torsion over Q: y^2 = x^3 - x has (0, 0)
        let c = WeierstrassCurve::new(q(-1, 1), q(0, 1)).unwrap();
        let two_torsion = c.point(q(0, 1), q(0, 1)).unwrap();
        assert_eq!(
            c.order_guard(&two_torsion, 2),
            Err(OrderGuardError { n: 2 })
        );
    }

    #[test]
    fn divisor_sum_basics() {
        let (curve, t) = default_rational_curve();
        let p = curve.scalar_mul(3, &t);
        assert!(curve.divisor_sum([(&p, 1), (&p, -1)]).is_infinity());
        let pt = curve.add(&p, &t);
        assert_eq!(curve.divisor_sum([(&pt, 1), (&p, -1)]), t);
    }

    #[test]
    fn literal_parsing() {
        let mut b = OracleBinding::parse("curve Q: a=0 b=-2; t=(3,5)").unwrap();
        assert_eq!(b.characteristic(), 0);
        b.bind_literal("A", "(129/100,-383/1000)").unwrap();
        assert!(b.is_bound("A"));
        assert!(b.bind_literal("B", "(1,1)").is_err());
        let fb = OracleBinding::parse("F101: a=1 b=1; t=(3,43)").unwrap();
        assert_eq!(fb.order_guard(100), Err(OrderGuardError { n: 7 }));
        assert!(OracleBinding::parse("curve F100: a=1 b=1; t=(0,1)").is_err());
        assert!(OracleBinding::parse("curve Q a=0 b=-2").is_err());
    }

    #[test]
    fn fp_point_enumeration() {
        let c = small_fp_curve();
        let pts = fp_points(&c);
        assert!(pts.iter().all(|p| c.contains(p)));
        // group order = affine points + O; every point is killed by it
        let order = pts.len() as i64 + 1;
        assert!(pts.iter().all(|p| c.scalar_mul(order, p).is_infinity()));
    }

    proptest! {
        #[test]
        fn fp_group_axioms(i in 0usize..200, j in 0usize..200, k in 0usize..200) {
            let c = small_fp_curve();
            let pts = fp_points(&c);
            let (a, b, d) = (&pts[i % pts.len()], &pts[j % pts.len()], &pts[k % pts.len()]);
            prop_assert_eq!(c.add(&c.add(a, b), d), c.add(a, &c.add(b, d)));
            prop_assert_eq!(c.add(a, b), c.add(b, a));
            prop_assert!(c.contains(&c.add(a, b)));
        }

        #[test]
        fn rational_associativity(a in -4i64..5, b in -4i64..5, d in -4i64..5) {
            let (c, t) = default_rational_curve();
            let p = c.scalar_mul(a, &t);
            let q2 = c.scalar_mul(b, &t);
            let r = c.scalar_mul(d, &t);
            prop_assert_eq!(c.add(&c.add(&p, &q2), &r), c.add(&p, &c.add(&q2, &r)));
            prop_assert_eq!(c.add(&c.add(&p, &q2), &r), c.scalar_mul(a + b + d, &t));
        }
    }
}
