use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::solution::{NullSolution, Validity};
use crate::criteria::{is_unit_constant, quadratic_global_condition};
use crate::error::{invalid, Error, Result};
use crate::freewave::RadialCauchyData;
use crate::numerics::{golden_min, lin_space, log_space};
use crate::radial::{differentiate, integrate_radial, Parity, RadialField, RadialIntegral};
use crate::scalar::{c, Real};
use crate::transforms::NonlinearityProfile;

/// Spacetime probe points: every listed time against every grid radius
/// inside the resolved cone (or against `radii` when given).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSet {
    pub times: Vec<f64>,
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
}

impl ProbeSet {
    /// `n` times spread evenly over `[-horizon, horizon]`.
    pub fn tensor(horizon: f64, n: usize) -> Self {
        Self {
            times: lin_space(-horizon, horizon, n),
            radii: None,
        }
    }

    fn points<T: Real>(&self, sol: &NullSolution<T>) -> Vec<(T, T)> {
        let ext = sol.extent();
        let mut out = Vec::new();
        for &t in &self.times {
            let t = T::lit(t);
            let radii: Vec<T> = match &self.radii {
                Some(rs) => rs.iter().map(|&r| T::lit(r)).collect(),
                None => sol.data().grid().nodes().to_vec(),
            };
            out.extend(radii.into_iter().filter(|&r| r + t.abs() <= ext).map(|r| (r, t)));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundViolation {
    pub bound: String,
    pub r: f64,
    pub t: f64,
    /// `bound - value`; negative means violated.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointwiseReport {
    pub probes: usize,
    pub epsilon: f64,
    pub c0: f64,
    /// `[inf u0 - ln(1 + ‖r(u0)_r‖∞ + ‖r u1‖∞), sup u0 + ln(1/ε)]`.
    pub log_envelope: [f64; 2],
    /// Smallest slack per bound: lower envelope, upper envelope,
    /// `r(u_r + |u_t|) <= 1 - 1/c0`, `r(|u_r| + |u_t|) <= c0 - 1`.
    pub min_slack: [f64; 4],
    pub violations: Vec<BoundViolation>,
}

impl PointwiseReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

const BOUND_NAMES: [&str; 4] = ["log_lower", "log_upper", "signed_gradient", "abs_gradient"];

fn require_unit<T: Real>(profile: &NonlinearityProfile<T>, what: &str) -> Result<()> {
    if is_unit_constant(profile) {
        Ok(())
    } else {
        invalid(format!("{what} applies to f ≡ 1 only (profile {})", profile.name()))
    }
}

/// Checks the logarithmic sandwich of `u` and both weighted gradient bounds
/// with `c0 = e^{sup u0 - inf u0} ε⁻¹ (1 + ‖r(u0)_r‖∞ + ‖r u1‖∞)` at every
/// probe, for `f ≡ 1`.
pub fn verify_pointwise_bounds<T: Real>(sol: &NullSolution<T>, probes: &ProbeSet) -> Result<PointwiseReport> {
    require_unit(sol.profile(), "verify_pointwise_bounds")?;
    let verdict = quadratic_global_condition(sol.data(), sol.profile(), true)?;
    let (eps, c0, env) = match (verdict.bounds.epsilon, verdict.bounds.c0, verdict.bounds.log_envelope) {
        (Some(e), Some(c0), Some(env)) if verdict.holds => (e, c0, env),
        _ => return invalid(format!("criterion fails (margin {:e}); no ε available", verdict.margin)),
    };
    let tol = 1e-9;
    let mut slack = [f64::INFINITY; 4];
    let mut violations = Vec::new();
    let pts = probes.points(sol);
    for &(r, t) in &pts {
        let u = sol.u(r, t)?.f64();
        let ur = sol.u_r(r, t)?.f64();
        let ut = sol.u_t(r, t)?.f64();
        let (rf, tf) = (r.f64(), t.f64());
        let s = [
            u - env[0],
            env[1] - u,
            (1.0 - 1.0 / c0) - rf * (ur + ut.abs()),
            (c0 - 1.0) - rf * (ur.abs() + ut.abs()),
        ];
        for k in 0..4 {
            slack[k] = slack[k].min(s[k]);
            if s[k] < -tol * (1.0 + c0) {
                violations.push(BoundViolation {
                    bound: BOUND_NAMES[k].to_string(),
                    r: rf,
                    t: tf,
                    slack: s[k],
                });
            }
        }
    }
    Ok(PointwiseReport {
        probes: pts.len(),
        epsilon: eps,
        c0,
        log_envelope: env,
        min_slack: slack,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionReport {
    pub times: Vec<f64>,
    /// `‖(u(t), u_t(t))‖_{Ḣ¹×L²}` per time.
    pub energy_norms: Vec<f64>,
    pub energy_sup: f64,
    /// `e^{sup u0 - inf u0} ε⁻¹ ‖(u0, u1)‖_{Ḣ¹×L²}`.
    pub energy_bound: f64,
    pub energy_bound_holds: bool,
    /// Trapezoidal `‖u‖_{L²_t L∞_x}` over the nonnegative probe times.
    pub l2_linf: f64,
    /// `max(1, e^{sup u0} ε⁻¹) e^{-inf u0} ‖(u0, u1)‖_{Ḣ¹×L²}`.
    pub l2_linf_scale: f64,
    /// `l2_linf / l2_linf_scale`; the implicit constant is not known.
    pub strichartz_ratio: f64,
    /// `‖(v(t), v_t(t))‖_{Ḣ¹×L²}` of the free wave per time.
    pub v_energy: Vec<f64>,
    pub v_energy_drift: f64,
}

fn hdot_l2<T: Real>(grad: &RadialField<T>, vel: &RadialField<T>) -> Result<RadialIntegral<T>> {
    let dens = grad.zip_map(vel, Parity::Even, |_, a, b| a * a + b * b)?;
    Ok(integrate_radial(&dens))
}

/// Energy-norm and Strichartz-type metrics of a global `f ≡ 1` solution at
/// the given probe times.
pub fn dispersion_metrics<T: Real>(sol: &NullSolution<T>, times: &[T]) -> Result<DispersionReport> {
    require_unit(sol.profile(), "dispersion_metrics")?;
    let data = sol.data();
    let verdict = quadratic_global_condition(data, sol.profile(), true)?;
    let eps = match verdict.bounds.epsilon {
        Some(e) if verdict.holds => e,
        _ => return invalid(format!("criterion fails (margin {:e})", verdict.margin)),
    };
    let u1 = data.u1()?;
    let d0 = hdot_l2(&differentiate(data.u0())?, &u1)?;
    if d0.tail_divergent || !d0.value.is_finite() {
        return Err(Error::NonFiniteEnergy(format!(
            "‖(u0, u1)‖² = {:e} (tail divergent: {})",
            d0.value.f64(),
            d0.tail_divergent
        )));
    }
    let norm0 = d0.value.f64().max(0.0).sqrt();
    let (inf_u, sup_u) = (data.u0().min().f64(), data.u0().max().f64());
    let energy_bound = (sup_u - inf_u).exp() / eps * norm0;
    let l2_linf_scale = (sup_u.exp() / eps).max(1.0) * (-inf_u).exp() * norm0;

    let mut energy_norms = Vec::with_capacity(times.len());
    let mut v_energy = Vec::with_capacity(times.len());
    let mut linf = Vec::new();
    for &t in times {
        let st = sol.state(t)?;
        energy_norms.push(hdot_l2(&st.u_r, &st.u_t)?.value.f64().max(0.0).sqrt());
        let v_r = differentiate(&st.v)?;
        v_energy.push(hdot_l2(&v_r, &st.v_t)?.value.f64().max(0.0).sqrt());
        if t >= T::zero() {
            linf.push((t.f64(), st.u.sup_abs().f64()));
        }
    }
    linf.sort_by(|a, b| a.0.total_cmp(&b.0));
    let l2_linf = linf
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 * w[0].1 + w[1].1 * w[1].1))
        .sum::<f64>()
        .sqrt();
    let energy_sup = energy_norms.iter().copied().fold(0.0, f64::max);
    let e0 = v_energy.first().copied().unwrap_or(0.0);
    let v_energy_drift = if e0 > 0.0 {
        v_energy.iter().map(|e| (e - e0).abs() / e0).fold(0.0, f64::max)
    } else {
        v_energy.iter().copied().fold(0.0, f64::max)
    };
    Ok(DispersionReport {
        times: times.iter().map(|t| t.f64()).collect(),
        energy_norms,
        energy_sup,
        energy_bound,
        energy_bound_holds: energy_sup <= energy_bound * (1.0 + 1e-9),
        l2_linf,
        l2_linf_scale,
        strichartz_ratio: if l2_linf_scale > 0.0 { l2_linf / l2_linf_scale } else { 0.0 },
        v_energy,
        v_energy_drift,
    })
}

/// `∫ e^{-2u} (u_t² + |∇u|²) dx`, the conserved quantity for `f ≡ 1`.
pub fn conserved_energy_quadratic<T: Real>(u: &RadialField<T>, u_t: &RadialField<T>) -> Result<RadialIntegral<T>> {
    weighted_energy(u, u_t, |u| (-(u + u)).exp())
}

/// `∫ F'(u)² (u_t² + |∇u|²) dx`, the free-wave energy of `v = F(u)`.
pub fn conserved_energy<T: Real>(
    u: &RadialField<T>,
    u_t: &RadialField<T>,
    profile: &NonlinearityProfile<T>,
) -> Result<RadialIntegral<T>> {
    weighted_energy(u, u_t, |u| {
        let d = profile.fprime(u);
        d * d
    })
}

fn weighted_energy<T: Real>(
    u: &RadialField<T>,
    u_t: &RadialField<T>,
    weight: impl Fn(T) -> T,
) -> Result<RadialIntegral<T>> {
    let u_r = differentiate(u)?;
    let grad = u_r.zip_map(u_t, Parity::Even, |_, a, b| a * a + b * b)?;
    let dens = grad.zip_map(u, Parity::Even, |_, g, u| weight(u) * g)?;
    Ok(integrate_radial(&dens))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Asymptotics {
    Global,
    BlowUp,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub times: Vec<f64>,
    /// `t ‖u(t)‖∞`.
    pub t_sup: Vec<f64>,
    /// `max / min` of `t_sup`.
    pub band_ratio: f64,
    /// `band_ratio <= 2`.
    pub bounded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub classification: Asymptotics,
    /// `[min v, max v]` over spacetime.
    pub v_range: [f64; 2],
    pub levels: [Option<f64>; 2],
    /// Distance of the `v` range to the nearest finite level.
    pub level_distance: f64,
    pub validity: Validity,
    pub decay: Option<DecayFit>,
    /// `(F⁻¹)'` at the rest value of `v`; `u ≈ coefficient · v` at late times.
    pub scattering_coefficient: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayOptions {
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
}

impl Default for DecayOptions {
    fn default() -> Self {
        Self {
            t_min: 5.0,
            t_max: 50.0,
            samples: 19,
        }
    }
}

/// Global-versus-blow-up dichotomy from the range of `v`, and in the global
/// case the `1/t` decay of `‖u(t)‖∞` at late times.
pub fn asymptotic_profile<T: Real>(
    data: &RadialCauchyData<T>,
    profile: &Arc<NonlinearityProfile<T>>,
    opts: &DecayOptions,
) -> Result<AsymptoticReport> {
    let sol = NullSolution::new(data, profile.clone())?;
    let (vmin, vmax) = sol.v_range();
    let (lo, hi) = profile.v_levels();
    let dist = sol.level_gap(vmin).min(sol.level_gap(vmax));
    let scale = T::one() + vmin.abs().max(vmax.abs());
    let resolution = c::<T>(1e-9) * scale;
    let mut warnings = Vec::new();
    let classification = if dist.abs() <= resolution {
        warnings.push(format!("v range within {:e} of an invertibility level", dist.f64()));
        Asymptotics::Indeterminate
    } else if dist > T::zero() {
        Asymptotics::Global
    } else {
        Asymptotics::BlowUp
    };
    let wave = sol.wave();
    let ext = sol.extent();
    let edge = wave.psi(ext).abs().max(wave.psi(-ext).abs());
    let peak = vmin.abs().max(vmax.abs());
    let rest = profile.v_of(T::zero());
    if (edge - rest.abs()).abs() > c::<T>(1e-8) * (T::one() + peak) {
        warnings.push(format!("profile not decayed at the grid edge (|Ψ| = {:e})", edge.f64()));
    }
    let decay = if classification == Asymptotics::Global {
        Some(decay_fit(&sol, opts)?)
    } else {
        None
    };
    Ok(AsymptoticReport {
        classification,
        v_range: [vmin.f64(), vmax.f64()],
        levels: [lo.map(|x| x.f64()), hi.map(|x| x.f64())],
        level_distance: dist.f64(),
        validity: sol.validity(),
        decay,
        scattering_coefficient: (T::one() / profile.dv_du(T::zero())).f64(),
        warnings,
    })
}

/// `‖u(t)‖∞` sampled on `[0, t + extent]`; beyond the grid the profile is
/// frozen at its (decayed) edge value.
fn sup_norm_at<T: Real>(sol: &NullSolution<T>, t: T) -> Result<T> {
    let h = sol.wave().grid().max_step() * c(0.5);
    let span = t + sol.extent();
    let n = (span / h).ceil().to_usize().unwrap_or(2).max(2) + 1;
    let radii = lin_space(T::zero(), span, n);
    let mut best = (T::zero(), T::zero());
    for &r in &radii {
        let u = sol.u(r, t)?.abs();
        if u > best.0 {
            best = (u, r);
        }
    }
    let (a, b) = ((best.1 - h).max(T::zero()), best.1 + h);
    let tol = T::epsilon().sqrt() * h;
    let refined = -golden_min(a, b, tol, |r| -sol.u(r, t).map(|u| u.abs()).unwrap_or(T::zero())).1;
    Ok(best.0.max(refined))
}

fn decay_fit<T: Real>(sol: &NullSolution<T>, opts: &DecayOptions) -> Result<DecayFit> {
    if opts.samples < 2 || opts.t_min <= 0.0 || opts.t_max <= opts.t_min {
        return invalid("decay fit needs 0 < t_min < t_max and at least two samples");
    }
    let times: Vec<T> = log_space(T::lit(opts.t_min), T::lit(opts.t_max), opts.samples);
    let mut t_sup = Vec::with_capacity(times.len());
    for &t in &times {
        t_sup.push((t * sup_norm_at(sol, t)?).f64());
    }
    let max = t_sup.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = t_sup.iter().copied().fold(f64::INFINITY, f64::min);
    let band_ratio = if min > 0.0 { max / min } else if max == 0.0 { 1.0 } else { f64::INFINITY };
    Ok(DecayFit {
        times: times.iter().map(|t| t.f64()).collect(),
        t_sup,
        band_ratio,
        bounded: band_ratio <= 2.0,
    })
}
