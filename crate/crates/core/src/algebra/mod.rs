//! Exact arithmetic kernel: rationals, sparse polynomials, polynomial maps,
//! interpolation and triangular automorphisms.

mod auto;
mod interp;
mod map;
mod poly;

pub use auto::{invert_triangular, AutoKind, TriangularAuto};
pub use interp::lagrange_interpolate;
pub use map::PolyMap;
pub use poly::{Monomial, MultiPoly, TotalDegree};
pub(crate) use poly::q_to_f64;

use thiserror::Error;

/// Exact rational scalar; always kept in lowest terms with a positive denominator.
pub type Q = num_rational::BigRational;

/// Floating complex scalar used for numeric witnesses.
pub type C64 = num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("variable count mismatch: {left} vs {right}")]
    VarCountMismatch { left: usize, right: usize },
    #[error("expected {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("floating-point evaluation overflowed")]
    NonFinite,
    #[error("a polynomial map needs at least one component")]
    EmptyMap,
    #[error("interpolation needs at least one node")]
    NoNodes,
    #[error("duplicate interpolation node x = {0}")]
    DuplicateNode(String),
    #[error("unsupported automorphism shape: {0}")]
    UnsupportedShape(String),
    #[error("affine part is not invertible")]
    Singular,
    #[error("forward and inverse do not compose to the identity")]
    NotInverse,
}

/// Shorthand for an integer-valued rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(n.into())
}
