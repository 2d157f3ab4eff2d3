use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::iterate::{monotone_iterate, IterateOptions};
use super::soliton::Soliton;
use crate::criteria::{focusing_domination, DominationCase};
use crate::error::{invalid, Result};
use crate::fd_oracle::{fd_solve, FdOptions, FdStatus, PowerSign, Rhs};
use crate::freewave::RadialCauchyData;
use crate::radial::{Parity, RadialField, RadialGrid, RadialProfile};
use crate::scalar::{c, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Amplitude `1+ε`; the data shape is set by [`PlusData`].
    Plus,
    /// Data `(0, (1-ε)(Q_r + Q/r))`.
    Minus,
}

impl std::str::FromStr for Direction {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" => Ok(Self::Plus),
            "minus" => Ok(Self::Minus),
            other => invalid(format!("direction must be plus or minus, got {other:?}")),
        }
    }
}

/// Shape of the plus-side data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlusData {
    /// `(0, (1+ε)(Q_r + Q/r))`.
    #[default]
    Velocity,
    /// `((1+ε)Q, 0)`, for which `(u0)_r + u0/r - |u1| = (1+ε)(Q_r + Q/r)`.
    Displacement,
}

impl std::str::FromStr for PlusData {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "velocity" => Ok(Self::Velocity),
            "displacement" => Ok(Self::Displacement),
            other => invalid(format!("plus data must be velocity or displacement, got {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WindowOptions {
    /// Extent of both solvers; must exceed the horizon.
    pub r_max: f64,
    pub lattice_h: f64,
    pub fd_h: f64,
    pub threshold: f64,
    /// Skip the lattice iteration (oracle only).
    pub lattice: bool,
    pub n_max: usize,
    pub workers: usize,
    pub plus_data: PlusData,
}

impl Default for WindowOptions {
    fn default() -> Self {
        WindowOptions {
            r_max: 40.0,
            lattice_h: 0.05,
            fd_h: 0.02,
            threshold: 1e3,
            lattice: true,
            n_max: 200,
            workers: 1,
            plus_data: PlusData::Velocity,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LatticeProbe {
    pub iterations: usize,
    pub converged: bool,
    pub sup: f64,
    /// `min (Q - u)` over the resolved cone.
    pub below_q_margin: f64,
    pub monotone_violations: usize,
    /// First lattice time holding a node presumed infinite.
    pub cap_time: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleProbe {
    pub status: FdStatus,
    pub t_detect: Option<f64>,
    pub sup_max: f64,
    pub sup_final: f64,
    /// `sup_final / sup_max`; small values indicate decay.
    pub decay_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowReport {
    pub epsilon: f64,
    pub direction: Direction,
    pub horizon: f64,
    pub amplitude: f64,
    /// Case ii margin of `(Q, 0)` over the probe data (minus side only).
    pub domination_margin: Option<f64>,
    pub lattice: Option<LatticeProbe>,
    pub oracle: OracleProbe,
    /// Minus: the oracle sup stayed below 2. Plus: the oracle crossed the
    /// threshold before the horizon.
    pub expected: bool,
    pub options: WindowOptions,
}

/// Probes both sides of the ground-state threshold with data
/// `(0, (1 ∓ ε)(Q_r + Q/r))` for `u_tt - Δu = u⁵`.
pub fn blowup_window_probe(epsilon: f64, direction: Direction, horizon: f64, opts: &WindowOptions) -> Result<WindowReport> {
    blowup_window_probe_t::<f64>(epsilon, direction, horizon, opts)
}

pub fn blowup_window_probe_t<T: Real>(
    epsilon: f64,
    direction: Direction,
    horizon: f64,
    opts: &WindowOptions,
) -> Result<WindowReport> {
    if !(0.0..=0.5).contains(&epsilon) {
        return invalid(format!("epsilon must lie in [0, 0.5], got {epsilon}"));
    }
    if !(horizon > 0.0 && horizon < opts.r_max) {
        return invalid(format!("horizon {horizon} must lie in (0, r_max = {})", opts.r_max));
    }
    let amplitude = match direction {
        Direction::Plus => 1.0 + epsilon,
        Direction::Minus => 1.0 - epsilon,
    };
    let q = Soliton::<T>::ground();
    let a = c::<T>(amplitude);
    let grid = Arc::new(RadialGrid::with_spacing(c::<T>(opts.fd_h.min(opts.lattice_h) * 0.5), c(opts.r_max))?);
    let data = if direction == Direction::Plus && opts.plus_data == PlusData::Displacement {
        RadialCauchyData::from_weighted_fns(grid.clone(), |r| a * q.value(r), |_| T::zero(), Parity::Even)?
    } else {
        RadialCauchyData::from_weighted_fns(grid.clone(), |_| T::zero(), |r| a * q.t_transform(r), Parity::Even)?
    };

    let domination_margin = if direction == Direction::Minus {
        let qd = RadialCauchyData::from_weighted(
            RadialField::from_fn(grid.clone(), Parity::Even, |r| q.value(r))?,
            RadialField::zeros(grid.clone()),
        )?;
        Some(focusing_domination(&qd.into(), &data.clone().into(), DominationCase::Ii, false)?.margin)
    } else {
        None
    };

    let lattice = if opts.lattice {
        let it = monotone_iterate(
            &data,
            &IterateOptions {
                n: 4.0,
                horizon,
                h: opts.lattice_h,
                r_max: Some(opts.r_max),
                n_max: opts.n_max,
                workers: opts.workers,
                ..IterateOptions::default()
            },
        )?;
        let u = &it.u;
        let below = u
            .resolved_nodes()
            .map(|(j, k)| q.value(u.radius(k)) - u.get(j, k))
            .fold(T::infinity(), T::min);
        let cap_time = (0..u.n_t())
            .find(|&j| u.row(j).iter().any(|v| v.is_infinite()))
            .map(|j| u.time(j).f64());
        Some(LatticeProbe {
            iterations: it.n,
            converged: it.converged,
            sup: u.sup_resolved().f64(),
            below_q_margin: below.f64(),
            monotone_violations: it.total_violations(),
            cap_time,
        })
    } else {
        None
    };

    let run = fd_solve(
        &data,
        &Rhs::Power {
            n: 4.0,
            sign: PowerSign::Focusing,
        },
        c(horizon),
        &FdOptions {
            h: opts.fd_h,
            r_max: Some(opts.r_max),
            blowup_threshold: opts.threshold,
            ..FdOptions::default()
        },
    )?;
    let sup_max = run.sup_max();
    let sup_final = run.sup_history.last().map_or(0.0, |s| s.sup);
    let t_detect = match run.status {
        FdStatus::BlewUp { t_detect } => Some(t_detect),
        _ => None,
    };
    let expected = match direction {
        Direction::Minus => run.status == FdStatus::Completed && sup_max < 2.0,
        Direction::Plus => t_detect.is_some_and(|t| t < horizon),
    };
    Ok(WindowReport {
        epsilon,
        direction,
        horizon,
        amplitude,
        domination_margin,
        lattice,
        oracle: OracleProbe {
            status: run.status,
            t_detect,
            sup_max,
            sup_final,
            decay_ratio: if sup_max > 0.0 { sup_final / sup_max } else { 0.0 },
        },
        expected,
        options: opts.clone(),
    })
}
