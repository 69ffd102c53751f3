//! Exact bookkeeping for elliptic algebras and their blowups.
//!
//! The crate works entirely with numerical shadows: divisors on translation
//! orbits of an elliptic curve, Hilbert series `q(s)/(1-s)^k`, and
//! implications between intersection-theoretic conditions. Nothing here
//! manipulates ring presentations.

pub mod curve;
pub mod error;
pub mod exec;
pub mod facts;
pub mod hilbert;
pub mod intersection;
pub mod scenario;
pub mod surface;
pub mod tcr;
pub mod verify;
pub mod weierstrass;

pub use curve::{CurvePoint, Divisor, GenericityContext};
pub use error::{Error, ParseError, Result};
pub use exec::{par_map, ExecutionMode};
pub use facts::{
    infer, FactBase, Literal, PairContext, PairDivisors, Predicate, Provenance, Subject,
};
pub use hilbert::{HilbertSeries, LaurentPoly};
pub use surface::{AlgebraDescriptor, Family, LineModuleRef, PdimStatus, Smoothness};
pub use tcr::{PointModuleRef, Side, TcrDescriptor, TraceRow};
pub use weierstrass::{Fp, OracleBinding, Point, WeierstrassCurve};
