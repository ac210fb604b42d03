//! Exact dynamics of binary expansions in non-integer bases q ∈ (1, 2).
//!
//! The crate is layered bottom-up:
//!
//! - [`algebraic`]: exact arithmetic in ℚ(q) with exact signs and decimals.
//! - [`words`]: finite and eventually periodic 0/1 words, their notation and
//!   exact values.
//! - [`dynamics`]: the digit maps `x ↦ qx - s`, orbits, expansion trees and
//!   expansion counting with certificates.
//! - [`classify`]: membership in the sets of points with one or two
//!   expansions at the base q₂, the branching classes A₁/A₂/A₃ and the escape
//!   search for null infinite points.
//! - [`paperlab`]: the verification battery and its reports.

// FieldElement hashes its coefficients only; the memo cells it reaches
// through the shared field never affect equality.
#![allow(clippy::mutable_key_type)]

pub mod algebraic;
pub mod classify;
pub mod dynamics;
pub mod paperlab;
pub mod words;

pub use algebraic::{Field, FieldElement, FieldSpec};
