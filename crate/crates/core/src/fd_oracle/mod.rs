//! Second-order leapfrog reference solver for radial problems, written on
//! `w = r u` so the radial Laplacian becomes `∂²_r`.

mod order;
mod scheme;

pub use order::{convergence_order, ObservedOrder};
pub use scheme::{fd_solve, FdOptions, FdRun, FdStatus, PowerSign, Rhs, SupSample};
