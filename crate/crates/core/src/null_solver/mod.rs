//! Exact solutions of `u_tt - Δu = f(u)(u_t² - |∇u|²)` through the free wave
//! `v = F(u)`: validity, blow-up localization, quantitative bounds and
//! conserved quantities.

mod blowup;
mod metrics;
mod solution;

pub use blowup::{detect_blowup, detect_blowup_with, BlowupReport, LogFitOptions, LogRateFit};
pub use metrics::{
    asymptotic_profile, conserved_energy, conserved_energy_quadratic, dispersion_metrics,
    verify_pointwise_bounds, AsymptoticReport, Asymptotics, BoundViolation, DecayFit, DecayOptions,
    DispersionReport, PointwiseReport, ProbeSet,
};
pub use solution::{solve_null, NullSolution, NullState, Validity};

#[cfg(test)]
mod tests;
