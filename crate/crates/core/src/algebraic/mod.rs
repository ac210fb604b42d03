//! Exact arithmetic in a real algebraic number field ℚ(q).
//!
//! Elements are residues modulo the minimal polynomial of q with rational
//! coefficients. Signs and decimals are obtained by evaluating an element on
//! ever finer isolating intervals of q, so every comparison is exact.

mod constants;
mod field;
mod poly;

pub use constants::{constants_table, q2, q_aleph0, q_f, q_golden, registry, RegisteredConstant};
pub use field::{ArithOp, Field, FieldElement, FieldSpec};
pub use poly::{
    compare_roots, isolate_all_roots, isolate_root, refine_root, RatPoly, RootLocation, SturmChain,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("polynomial is constant")]
    ConstantPolynomial,
    #[error("no real root in the search range")]
    NoRoot,
    #[error("{count} real roots in the search range")]
    Ambiguous { count: usize },
    #[error("interval endpoints do not bracket a sign change of the polynomial")]
    NotIsolating,
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is a zero divisor; the defining polynomial is reducible")]
    ZeroDivisor,
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("{got} coefficients given for a field of degree {degree}")]
    TooManyCoefficients { got: usize, degree: usize },
}
