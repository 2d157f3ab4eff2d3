//! The focusing power equation `u_tt - Δu = |u|^N u`: the radial sine
//! kernel, the lattice Duhamel map and its monotone iteration, stationary
//! solutions, energies and the threshold probe around the ground state.

mod energy;
mod iterate;
mod kernel;
mod lattice;
mod soliton;
mod window;

pub use energy::{energy_focusing, energy_power, kenig_merle_quantities, KenigMerle};
pub use iterate::{
    admissibility, duhamel_map, fixed_point_residual, monotone_iterate, Admissibility, DuhamelMap, IterateOptions,
    IterationState, TraceEntry,
};
pub use kernel::sine_kernel_radial;
pub use lattice::{Lattice, LatticeSummary};
pub use soliton::{
    crossing_radii, soliton, supersolution_check, supersolution_check_profile, Soliton, SolitonKind,
};
pub use window::{
    blowup_window_probe, blowup_window_probe_t, Direction, LatticeProbe, OracleProbe, PlusData, WindowOptions, WindowReport,
};

#[cfg(test)]
mod tests;
