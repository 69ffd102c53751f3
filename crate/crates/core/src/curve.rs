//! Points on translation orbits, formal divisors, and principality relative
//! to an explicit genericity context.
//!
//! A point `[A:k]` stands for `tau^k(P_A)` where `tau` is translation by a
//! point `t` of infinite order. Unless told otherwise, base points of
//! different orbits and `t` are assumed independent in the group law.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::weierstrass::OracleBinding;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CurvePoint {
    pub orbit: String,
    pub shift: i64,
}

impl CurvePoint {
    pub fn new(orbit: impl Into<String>, shift: i64) -> Self {
        Self {
            orbit: orbit.into(),
            shift,
        }
    }

    /// The base point of an orbit.
    pub fn base(orbit: impl Into<String>) -> Self {
        Self::new(orbit, 0)
    }

    /// `tau^j` applied to this point.
    pub fn tau_power(&self, j: i64) -> Self {
        Self::new(self.orbit.clone(), self.shift + j)
    }

    /// `j` with `self = tau^j(other)`, if both lie on one orbit.
    pub fn offset_from(&self, other: &CurvePoint) -> Option<i64> {
        (self.orbit == other.orbit).then(|| self.shift - other.shift)
    }
}

impl fmt::Debug for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.orbit, self.shift)
    }
}

impl FromStr for CurvePoint {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, ParseError> {
        let t = text.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| ParseError::new(format!("expected a point like [A:0], got `{t}`")))?;
        let (orbit, shift) = match inner.split_once(':') {
            Some((o, s)) => (
                o.trim(),
                s.trim()
                    .parse::<i64>()
                    .map_err(|_| ParseError::new(format!("bad shift in `{t}`")))?,
            ),
            None => (inner.trim(), 0),
        };
        if orbit.is_empty() || !orbit.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(ParseError::new(format!("bad orbit name in `{t}`")));
        }
        Ok(CurvePoint::new(orbit, shift))
    }
}

/// A finite formal sum of points with nonzero integer multiplicities.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Divisor {
    terms: BTreeMap<CurvePoint, i64>,
}

impl Divisor {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn point(p: CurvePoint) -> Self {
        Self::from_terms([(p, 1)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (CurvePoint, i64)>) -> Self {
        let mut d = Self::zero();
        for (p, m) in terms {
            d.add_point(p, m);
        }
        d
    }

    pub fn add_point(&mut self, p: CurvePoint, m: i64) {
        if m == 0 {
            return;
        }
        let slot = self.terms.entry(p.clone()).or_insert(0);
        *slot += m;
        if *slot == 0 {
            self.terms.remove(&p);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CurvePoint, i64)> {
        self.terms.iter().map(|(p, m)| (p, *m))
    }

    pub fn multiplicity(&self, p: &CurvePoint) -> i64 {
        self.terms.get(p).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.terms.values().sum()
    }

    pub fn add(&self, other: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (p, m) in other.terms() {
            out.add_point(p.clone(), m);
        }
        out
    }

    pub fn sub(&self, other: &Divisor) -> Divisor {
        self.add(&other.negate())
    }

    pub fn negate(&self) -> Divisor {
        self.scale(-1)
    }

    pub fn scale(&self, k: i64) -> Divisor {
        Divisor::from_terms(self.terms().map(|(p, m)| (p.clone(), m * k)))
    }

    /// Pullback along `tau^j`: `[x]` goes to `[tau^-j x]`.
    pub fn pullback(&self, j: i64) -> Divisor {
        Divisor::from_terms(self.terms().map(|(p, m)| (p.tau_power(-j), m)))
    }

    /// Divisor of `M_n = M ⊗ M^tau ⊗ ... ⊗ M^(tau^(n-1))`. Negative `n` is
    /// defined so that `M_n + pullback(M_{-n}, n) = 0`.
    pub fn twisted_power(&self, n: i64) -> Divisor {
        let mut out = Divisor::zero();
        if n >= 0 {
            for i in 0..n {
                out = out.add(&self.pullback(i));
            }
        } else {
            for i in n..0 {
                out = out.sub(&self.pullback(i));
            }
        }
        out
    }

    /// Multiplicity sum per orbit.
    pub fn orbit_sums(&self) -> BTreeMap<String, i64> {
        let mut out: BTreeMap<String, i64> = BTreeMap::new();
        for (p, m) in self.terms() {
            *out.entry(p.orbit.clone()).or_insert(0) += m;
        }
        out.retain(|_, m| *m != 0);
        out
    }

    /// `sum_k k * a_k` over all points: the coefficient of `t` in the group sum.
    pub fn weighted_shift(&self) -> i64 {
        self.terms().map(|(p, m)| p.shift * m).sum()
    }

    pub fn orbits(&self) -> impl Iterator<Item = &str> {
        let mut seen: Vec<&str> = self.terms.keys().map(|p| p.orbit.as_str()).collect();
        seen.dedup();
        seen.into_iter()
    }

    /// Principality when every orbit is generic and independent.
    pub fn is_principal_generic(&self) -> bool {
        self.degree() == 0 && self.orbit_sums().is_empty() && self.weighted_shift() == 0
    }
}

impl fmt::Debug for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (p, m)) in self.terms().enumerate() {
            match (i, m < 0) {
                (0, false) => write!(f, "{m}*{p}")?,
                (0, true) => write!(f, "-{}*{p}", -m)?,
                (_, false) => write!(f, " + {m}*{p}")?,
                (_, true) => write!(f, " - {}*{p}", -m)?,
            }
        }
        Ok(())
    }
}

impl FromStr for Divisor {
    type Err = ParseError;

    /// Accepts `3*[A:0] - 1*[B:2]`, `[A] + [A:-1]`, `-2[B:1]` and `0`.
    fn from_str(text: &str) -> Result<Self, ParseError> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "0" {
            return Ok(Divisor::zero());
        }
        if compact.is_empty() {
            return Err(ParseError::new("empty divisor"));
        }
        let mut d = Divisor::zero();
        let mut rest = compact.as_str();
        let mut first = true;
        while !rest.is_empty() {
            let (sign, after) = match rest.as_bytes()[0] {
                b'+' => (1, &rest[1..]),
                b'-' => (-1, &rest[1..]),
                _ if first => (1, rest),
                _ => return Err(ParseError::new(format!("expected + or - before `{rest}`"))),
            };
            first = false;
            let open = after
                .find('[')
                .ok_or_else(|| ParseError::new(format!("missing point in `{after}`")))?;
            let close = after[open..]
                .find(']')
                .map(|c| open + c)
                .ok_or_else(|| ParseError::new(format!("unclosed point in `{after}`")))?;
            let coef_text = after[..open].trim_end_matches('*');
            let coef: i64 = if coef_text.is_empty() {
                1
            } else {
                coef_text
                    .parse()
                    .map_err(|_| ParseError::new(format!("bad multiplicity `{coef_text}`")))?
            };
            let p: CurvePoint = after[open..=close].parse()?;
            d.add_point(p, sign * coef);
            rest = &after[close + 1..];
        }
        Ok(d)
    }
}

/// Explicit assumptions under which principality is decided.
///
/// Relations identify base points across orbits (`B = A+k` means
/// `P_B = tau^k P_A`). A binding attaches concrete curve points, after which
/// bound orbits are decided by the group law and unbound ones stay generic.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GenericityContext {
    /// orbit -> (parent, offset) with `[orbit:0] = [parent:offset]`
    parents: BTreeMap<String, (String, i64)>,
    declared: Vec<(String, String, i64)>,
    binding: Option<OracleBinding>,
}

impl GenericityContext {
    pub fn generic() -> Self {
        Self::default()
    }

    pub fn with_binding(binding: OracleBinding) -> Self {
        Self {
            binding: Some(binding),
            ..Self::default()
        }
    }

    pub fn binding(&self) -> Option<&OracleBinding> {
        self.binding.as_ref()
    }

    pub fn binding_mut(&mut self) -> Option<&mut OracleBinding> {
        self.binding.as_mut()
    }

    pub fn set_binding(&mut self, binding: OracleBinding) {
        self.binding = Some(binding);
    }

    pub fn relations(&self) -> &[(String, String, i64)] {
        &self.declared
    }

    pub fn has_assumptions(&self) -> bool {
        self.binding.is_some() || !self.declared.is_empty()
    }

    fn find(&self, orbit: &str) -> (String, i64) {
        let mut cur = orbit.to_string();
        let mut off = 0;
        while let Some((parent, k)) = self.parents.get(&cur) {
            off += k;
            cur = parent.clone();
        }
        (cur, off)
    }

    /// Declare `P_b = tau^k(P_a)`.
    pub fn relate(&mut self, b: &str, a: &str, k: i64) -> Result<()> {
        let (rb, ob) = self.find(b);
        let (ra, oa) = self.find(a);
        if rb == ra {
            if ob != oa + k {
                return Err(Error::inconsistency(format!(
                    "relation {b} = {a}{k:+} contradicts earlier relations ({b} = {a}{:+})",
                    ob - oa
                )));
            }
        } else {
            // [rb:0] = [b:-ob] = [a:k-ob] = [ra:oa+k-ob]
            self.parents.insert(rb, (ra, oa + k - ob));
        }
        self.declared.push((b.to_string(), a.to_string(), k));
        Ok(())
    }

    /// Rewrite every point onto its orbit representative.
    pub fn canonicalize(&self, point: &CurvePoint) -> CurvePoint {
        let (root, off) = self.find(&point.orbit);
        CurvePoint::new(root, point.shift + off)
    }

    pub fn canonicalize_divisor(&self, d: &Divisor) -> Divisor {
        Divisor::from_terms(d.terms().map(|(p, m)| (self.canonicalize(p), m)))
    }

    /// Whether the two points coincide under the declared relations.
    pub fn same_point(&self, p: &CurvePoint, q: &CurvePoint) -> bool {
        self.canonicalize(p) == self.canonicalize(q)
    }

    /// `j` with `p = tau^j(q)` under the declared relations.
    pub fn orbit_offset(&self, p: &CurvePoint, q: &CurvePoint) -> Option<i64> {
        self.canonicalize(p).offset_from(&self.canonicalize(q))
    }

    /// `D ~ 0`: degree zero and group-law sum zero.
    pub fn is_principal(&self, d: &Divisor) -> bool {
        let d = self.canonicalize_divisor(d);
        if d.degree() != 0 {
            return false;
        }
        let Some(binding) = &self.binding else {
            return d.is_principal_generic();
        };
        // Bound orbits contribute concrete points; unbound orbits must cancel
        // on their own, and their shifts fold into the multiple of t.
        let mut bound = BTreeMap::new();
        for (orbit, m) in d.orbit_sums() {
            if binding.is_bound(&orbit) {
                bound.insert(orbit, m);
            } else {
                return false;
            }
        }
        binding
            .sums_to_identity(&bound, d.weighted_shift())
            .expect("all orbits bound")
    }

    /// Check the binding against the declared relations: the translation
    /// must pass the order guard, declared relations must hold concretely,
    /// and undeclared orbit pairs must not coincide up to `horizon` steps.
    pub fn check_binding(&self, horizon: u64) -> Result<()> {
        let Some(binding) = &self.binding else {
            return Ok(());
        };
        binding
            .order_guard(horizon)
            .map_err(|e| Error::precondition(format!("order guard failed at n = {}: {e}", e.n)))?;
        for (b, a, k) in &self.declared {
            if binding.is_bound(a) && binding.is_bound(b) {
                let mut mults = BTreeMap::new();
                mults.insert(b.clone(), 1);
                mults.insert(a.clone(), -1);
                if binding.sums_to_identity(&mults, -k) != Some(true) {
                    return Err(Error::inconsistency(format!(
                        "declared relation {b} = {a}{k:+} fails for the bound points"
                    )));
                }
            }
        }
        let orbits = binding.bound_orbits();
        for (i, a) in orbits.iter().enumerate() {
            for b in &orbits[i + 1..] {
                if self.find(a).0 == self.find(b).0 {
                    continue;
                }
                if let Some(k) = binding.coincidence(b, a, horizon as i64) {
                    return Err(Error::inconsistency(format!(
                        "bound points satisfy {b} = {a}{k:+} but no such relation is declared"
                    )));
                }
            }
        }
        Ok(())
    }
}
