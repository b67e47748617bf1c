//! Numerical certification toolkit for Hardy-type, Hardy–Rellich,
//! Hardy–Sobolev, transport and Moser–Trudinger inequalities.

// `!(x > 0.0)` is used deliberately so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod banded;
pub mod bessel_certify;
pub mod best_constants;
pub mod error;
pub mod moser;
pub mod quad;
pub mod radial_ode;
pub mod transport;
pub mod verifier;
pub mod weight_dsl;

pub use error::{Error, Result};
