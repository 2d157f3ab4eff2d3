//! Radial grids, sampled radial fields, their calculus and serialization.

mod calculus;
mod field;
mod grid;
pub mod io;
mod interp;
mod kato;

pub use calculus::{
    differentiate, integrate_line, integrate_radial, laplacian, RadialIntegral, MIN_DIFF_NODES,
    TAIL_FRACTION,
};
pub use field::{Parity, RadialField};
pub use grid::{RadialGrid, Spacing, MIN_NODES};
pub use interp::{Hermite, Sample};
pub use kato::{kato_norm, kato_norm_radial, kato_potential, KatoNormResult, KatoOptions};


/// A radial function known in closed form or through an interpolant.
pub trait RadialProfile<T: Real>: Send + Sync {
    fn value(&self, r: T) -> T;
    fn derivative(&self, r: T) -> T;
    /// `f'' + 2f'/r`.
    fn laplacian(&self, r: T) -> T;
}

use crate::scalar::Real;
