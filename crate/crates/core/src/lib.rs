#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Exact transforms, global-existence and blow-up criteria, and monotone
//! iteration for two semilinear wave equations on ℝ³⁺¹:
//!
//! * `u_tt - Δu = f(u)(u_t² - |∇u|²)`, solved exactly through `v = F(u)`;
//! * the focusing power equation `u_tt - Δu = |u|^N u`.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix `f64`.

pub mod criteria;
pub mod error;
pub mod fd_oracle;
pub mod focusing_solver;
pub mod numerics;
pub mod radial;
pub mod freewave;
pub mod null_solver;
pub mod scalar;
pub mod space;
pub mod transforms;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Grid = radial::RadialGrid<f64>;
pub type Field = radial::RadialField<f64>;
