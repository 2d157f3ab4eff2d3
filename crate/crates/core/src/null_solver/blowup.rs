use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::solution::NullSolution;
use crate::criteria::quadratic_global_condition;
use crate::error::{Error, Result};
use crate::freewave::RadialCauchyData;
use crate::numerics::{fit_line, log_space};
use crate::scalar::{c, Real};
use crate::transforms::NonlinearityProfile;

/// Sampling of `‖u(t)‖∞` near the blow-up point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogFitOptions {
    /// Largest `|t - t0|` used.
    pub delta_max: f64,
    /// Decades of `|t - t0|` below `delta_max`.
    pub decades: f64,
    pub samples: usize,
    /// Half-width of the ball around `x0` over which `u` is maximized.
    pub ball_radius: f64,
}

impl Default for LogFitOptions {
    fn default() -> Self {
        Self {
            delta_max: 0.1,
            decades: 5.0,
            samples: 41,
            ball_radius: 1.0,
        }
    }
}

/// Least-squares fit `‖u(t)‖∞ ≈ C + slope |ln|t - t0||`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRateFit {
    pub intercept: f64,
    pub slope: f64,
    /// `(|t - t0|, ‖u(t)‖∞ over the ball)`.
    pub samples: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    /// Earliest touch time (smaller `|t|` of the two directions).
    pub t0: f64,
    pub t_forward: Option<f64>,
    pub t_backward: Option<f64>,
    /// Radius of the touch point at `t0`.
    pub x0_radius: f64,
    /// Witness radius of the failed criterion.
    pub r0: f64,
    pub window: [f64; 2],
    pub within_window: bool,
    /// The invertibility level of `v` that is reached.
    pub level: f64,
    pub criterion_margin: f64,
    pub log_rate_fit: Option<LogRateFit>,
}

/// Locates the first time the free wave `v` reaches an invertibility level,
/// searching both time directions up to the criterion's witness radius.
pub fn detect_blowup<T: Real>(
    data: &RadialCauchyData<T>,
    profile: &Arc<NonlinearityProfile<T>>,
) -> Result<BlowupReport> {
    detect_blowup_with(data, profile, &LogFitOptions::default())
}

pub fn detect_blowup_with<T: Real>(
    data: &RadialCauchyData<T>,
    profile: &Arc<NonlinearityProfile<T>>,
    opts: &LogFitOptions,
) -> Result<BlowupReport> {
    let verdict = quadratic_global_condition(data, profile, true)?;
    let r0 = verdict.witness.as_ref().and_then(|w| w.r).unwrap_or(f64::INFINITY);
    let sol = NullSolution::new(data, profile.clone())?;
    let limit = if r0.is_finite() {
        T::lit(r0) * c(1.0 + 1e-6) + c(1e-6)
    } else {
        sol.extent()
    };
    let fwd = sol.first_touch_within(true, limit)?;
    let bwd = sol.first_touch_within(false, limit)?;
    let (t0, x0) = match (fwd, bwd) {
        (Some(f), Some(b)) => {
            if f.0.abs() <= b.0.abs() {
                f
            } else {
                b
            }
        }
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => {
            return Err(Error::WitnessInconsistent(format!(
                "v stays inside the invertibility range for |t| <= {:.6} (criterion margin {:e})",
                limit.f64(),
                verdict.margin
            )))
        }
    };
    let v = sol.v(x0, t0);
    let (lo, hi) = profile.v_levels();
    let level = match (lo, hi) {
        (Some(a), Some(b)) => {
            if (v - a).abs() <= (b - v).abs() {
                a
            } else {
                b
            }
        }
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (None, None) => unreachable!("a touch needs a finite level"),
    };
    let log_rate_fit = log_rate(&sol, t0, x0, opts)?;
    let t0f = t0.f64();
    Ok(BlowupReport {
        t0: t0f,
        t_forward: fwd.map(|x| x.0.f64()),
        t_backward: bwd.map(|x| x.0.f64()),
        x0_radius: x0.f64(),
        r0,
        window: [-r0, r0],
        within_window: t0f.abs() <= r0 + 1e-8,
        level: level.f64(),
        criterion_margin: verdict.margin,
        log_rate_fit,
    })
}

/// Fits `max_{|r - x0| <= ball} |u(r, t)|` against `|ln|t - t0||` for `t`
/// approaching `t0` from the side of the data.
fn log_rate<T: Real>(sol: &NullSolution<T>, t0: T, x0: T, opts: &LogFitOptions) -> Result<Option<LogRateFit>> {
    let dmax = T::lit(opts.delta_max).min(t0.abs());
    let dmin = dmax * T::lit(10f64.powf(-opts.decades));
    if dmax <= T::zero() || dmin <= T::epsilon() * c(1e4) || opts.samples < 2 {
        return Ok(None);
    }
    let sign = if t0 >= T::zero() { T::one() } else { -T::one() };
    let ball = T::lit(opts.ball_radius);
    let nodes = sol.wave().grid().nodes();
    let mut samples = Vec::with_capacity(opts.samples);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for delta in log_space(dmin, dmax, opts.samples) {
        let t = t0 - sign * delta;
        let (a, b) = ((x0 - ball).max(T::zero()), x0 + ball);
        let (_, r_near) = sol.gap_on(t, a, b);
        let mut norm = match sol.u(r_near, t) {
            Ok(u) => u.abs(),
            Err(_) => continue,
        };
        for &r in nodes.iter().filter(|&&r| r >= a && r <= b) {
            if let Ok(u) = sol.u(r, t) {
                norm = norm.max(u.abs());
            }
        }
        samples.push((delta.f64(), norm.f64()));
        xs.push(-delta.ln());
        ys.push(norm);
    }
    if xs.len() < 2 {
        return Ok(None);
    }
    let (intercept, slope) = fit_line(&xs, &ys)?;
    Ok(Some(LogRateFit {
        intercept: intercept.f64(),
        slope: slope.f64(),
        samples,
    }))
}
