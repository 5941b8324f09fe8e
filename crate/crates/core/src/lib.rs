//! Signed distance, Hessian forms and positivity checks for smoothly bounded
//! domains in ℂⁿ.
//!
//! Points of ℂⁿ are stored as 2n reals with z_k = x_{2k−1} + i·x_{2k}
//! (1-based), i.e. `x[2k]` and `x[2k+1]` for 0-based k.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod config;
pub mod distance;
pub mod dual;
pub mod error;
pub mod expr;
pub mod forms;
pub mod geometry;
pub mod linalg;
pub mod sampling;
pub mod spec_file;
pub mod theorems;

pub use error::{Error, Result};
pub use expr::Expr;
pub use geometry::{
    check_4l_identity, eval_derivatives, hessian_forms, taylor_residual, unitary_transform, BBox,
    DefiningFunction, Derivatives, DomainSource, DomainSpec, FormKind, HessianForms,
};
pub use spec_file::{parse_domain_spec, parse_domain_spec_str};
pub use linalg::{ComplexVector, RealPoint, C64};
