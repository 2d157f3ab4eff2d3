use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::freewave::RadialCauchyData;
use crate::radial::{Hermite, Parity, RadialField, RadialGrid};
use crate::scalar::{c, Real};
use crate::transforms::{ProfileSpec, ScalarFn};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerSign {
    /// `u_tt - Δu = |u|^N u`.
    Focusing,
    /// `u_tt - Δu = -|u|^N u`.
    Defocusing,
}

/// Right-hand side of `u_tt - Δu = G`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rhs {
    /// `G = f(u)(u_t² - u_r²)`.
    NullForm { f: ProfileSpec },
    /// `G = ±|u|^N u`.
    Power { n: f64, sign: PowerSign },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdOptions {
    /// Spatial step.
    pub h: f64,
    /// `k / h`, at most 0.9.
    pub cfl: f64,
    /// Domain radius; defaults to the data grid's extent.
    pub r_max: Option<f64>,
    /// `sup |u|` beyond which the run stops as blown up.
    pub blowup_threshold: f64,
    /// Times at which snapshots are kept (the final time is always kept).
    pub snapshot_times: Vec<f64>,
}

impl Default for FdOptions {
    fn default() -> Self {
        Self {
            h: 0.02,
            cfl: 0.5,
            r_max: None,
            blowup_threshold: 1e8,
            snapshot_times: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FdStatus {
    Completed,
    BlewUp { t_detect: f64 },
    Unstable { step: usize, t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupSample {
    pub t: f64,
    pub sup: f64,
}

/// A finished (or stopped) leapfrog run.
#[derive(Debug, Clone)]
pub struct FdRun<T> {
    pub h: T,
    pub k: T,
    pub horizon: T,
    pub status: FdStatus,
    pub grid: Arc<RadialGrid<T>>,
    /// `(t, u(·, t))` at the requested times reached, then the last level.
    pub snapshots: Vec<(T, RadialField<T>)>,
    /// `sup_r |u|` after every step.
    pub sup_history: Vec<SupSample>,
    /// Discrete energy of `w` after every step (linear part only).
    pub energy_history: Vec<f64>,
}

impl<T: Real> FdRun<T> {
    pub fn last(&self) -> &RadialField<T> {
        &self.snapshots.last().expect("run keeps the final level").1
    }

    pub fn final_time(&self) -> T {
        self.snapshots.last().map(|s| s.0).unwrap_or(T::zero())
    }

    /// Snapshot closest to `t`.
    pub fn snapshot(&self, t: T) -> Option<&RadialField<T>> {
        self.snapshots
            .iter()
            .min_by(|a, b| (a.0 - t).abs().partial_cmp(&(b.0 - t).abs()).unwrap())
            .map(|s| &s.1)
    }

    pub fn sup_max(&self) -> f64 {
        self.sup_history.iter().map(|s| s.sup).fold(0.0, f64::max)
    }

    /// Largest relative change of the discrete energy over the run.
    pub fn energy_drift(&self) -> f64 {
        let e0 = match self.energy_history.first() {
            Some(&e) if e > 0.0 => e,
            _ => return 0.0,
        };
        self.energy_history
            .iter()
            .map(|e| (e - e0).abs() / e0)
            .fold(0.0, f64::max)
    }
}

enum Source<T: Real> {
    Null(ScalarFn<T>),
    Power { n: T, sign: T },
}

impl<T: Real> Source<T> {
    fn eval(&self, u: T, ut: T, ur: T) -> T {
        match self {
            Source::Null(f) => f(u) * (ut * ut - ur * ur),
            Source::Power { n, sign } => *sign * u.abs().powf(*n) * u,
        }
    }

    fn needs_derivatives(&self) -> bool {
        matches!(self, Source::Null(_))
    }
}

/// `u = w/r`, with the odd-cubic limit `(8w₁ - w₂)/6h` at the origin.
fn recover<T: Real>(w: &[T], r: &[T], h: T, out: &mut [T]) {
    out[0] = (c::<T>(8.0) * w[1] - w[2]) / (c::<T>(6.0) * h);
    for i in 1..w.len() {
        out[i] = w[i] / r[i];
    }
}

struct Work<T> {
    u: Vec<T>,
    ut: Vec<T>,
    g: Vec<T>,
}

/// `r G` at every node from the levels `w` (and `w_t` for the null form).
fn source_term<T: Real>(src: &Source<T>, w: &[T], wt: Option<&[T]>, r: &[T], h: T, work: &mut Work<T>) {
    let n = w.len();
    recover(w, r, h, &mut work.u);
    if let (true, Some(wt)) = (src.needs_derivatives(), wt) {
        recover(wt, r, h, &mut work.ut);
    }
    let two_h = h + h;
    work.g[0] = T::zero();
    for i in 1..n {
        let ur = if i + 1 < n {
            // u_r = (w_r - u)/r
            let wr = (w[i + 1] - w[i - 1]) / two_h;
            (wr - work.u[i]) / r[i]
        } else {
            let wr = (w[i] - w[i - 1]) / h;
            (wr - work.u[i]) / r[i]
        };
        let ut = if src.needs_derivatives() { work.ut[i] } else { T::zero() };
        work.g[i] = r[i] * src.eval(work.u[i], ut, ur);
    }
}

/// Time-steps `w_tt = w_rr + r G` from the radial data to `horizon`, with
/// `w(0) = 0` and `u_r = 0` at the outer radius.
///
/// The nonlinearity is evaluated at the current level; for the null form
/// `u_t` is first predicted from a second-order backward difference, then
/// corrected once with the centred difference.
pub fn fd_solve<T: Real>(data: &RadialCauchyData<T>, rhs: &Rhs, horizon: T, opts: &FdOptions) -> Result<FdRun<T>> {
    if !(opts.cfl > 0.0 && opts.cfl <= 0.9) {
        return invalid(format!("CFL ratio {} outside (0, 0.9]", opts.cfl));
    }
    if !(opts.h > 0.0) || horizon < T::zero() {
        return invalid("fd_solve needs h > 0 and a nonnegative horizon");
    }
    let src = match rhs {
        Rhs::NullForm { f } => Source::Null(f.weight::<T>()?),
        Rhs::Power { n, sign } => Source::Power {
            n: T::lit(*n),
            sign: match sign {
                PowerSign::Focusing => T::one(),
                PowerSign::Defocusing => -T::one(),
            },
        },
    };
    let h = T::lit(opts.h);
    let r_max = opts.r_max.map(T::lit).unwrap_or_else(|| data.grid().r_max());
    let cells = (r_max / h).round().to_usize().unwrap_or(0);
    if cells < 8 {
        return invalid(format!("FD grid too coarse: {cells} cells"));
    }
    let grid = Arc::new(RadialGrid::uniform(h * T::of(cells), cells + 1)?);
    let r = grid.nodes().to_vec();
    let n = r.len();
    let steps = (horizon / (h * T::lit(opts.cfl))).ceil().to_usize().unwrap_or(0);
    let k = if steps > 0 { horizon / T::of(steps) } else { T::zero() };
    let lam2 = (k / h) * (k / h);

    let u0 = Hermite::new(data.u0())?;
    let w1 = Hermite::new(data.ru1())?;
    let w0: Vec<T> = r.iter().map(|&x| x * u0.value(x)).collect();
    let wt0: Vec<T> = r.iter().map(|&x| if x > T::zero() { w1.value(x) } else { T::zero() }).collect();

    let mut work = Work {
        u: vec![T::zero(); n],
        ut: vec![T::zero(); n],
        g: vec![T::zero(); n],
    };
    let mut snapshots = Vec::new();
    let mut sup_history = Vec::with_capacity(steps + 1);
    let mut energy_history = Vec::with_capacity(steps + 1);
    let mut wanted: Vec<T> = opts.snapshot_times.iter().map(|&t| T::lit(t)).collect();
    wanted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut next_snap = 0usize;

    let snap = |w: &[T], work: &mut Work<T>| -> Result<RadialField<T>> {
        recover(w, &r, h, &mut work.u);
        RadialField::new(grid.clone(), work.u.clone(), Parity::Even)
    };
    let sup = |w: &[T], work: &mut Work<T>| -> T {
        recover(w, &r, h, &mut work.u);
        work.u.iter().fold(T::zero(), |m, &x| if x.abs() > m || x.is_nan() { x.abs() } else { m })
    };
    let energy = |wp: &[T], wc: &[T]| -> f64 {
        // staggered energy of the linear scheme
        let mut e = T::zero();
        for i in 0..n - 1 {
            let dt = (wc[i] - wp[i]) / k;
            let a = (wc[i + 1] - wc[i]) / h;
            let b = (wp[i + 1] - wp[i]) / h;
            e += dt * dt + a * b;
        }
        (e * h * c(0.5)).f64()
    };

    let thresh = T::lit(opts.blowup_threshold);
    let s0 = sup(&w0, &mut work);
    sup_history.push(SupSample { t: 0.0, sup: s0.f64() });
    while next_snap < wanted.len() && wanted[next_snap] <= k * c(0.5) {
        snapshots.push((T::zero(), snap(&w0, &mut work)?));
        next_snap += 1;
    }
    if steps == 0 {
        snapshots.push((T::zero(), snap(&w0, &mut work)?));
        return Ok(FdRun {
            h,
            k,
            horizon,
            status: FdStatus::Completed,
            grid,
            snapshots,
            sup_history,
            energy_history,
        });
    }

    // Taylor start: w¹ = w⁰ + k w_t + k²/2 (w_rr + rG)
    source_term(&src, &w0, Some(&wt0), &r, h, &mut work);
    let mut prev = w0.clone();
    let mut cur = vec![T::zero(); n];
    for i in 1..n - 1 {
        let wrr = (w0[i + 1] - w0[i] - w0[i] + w0[i - 1]) / (h * h);
        cur[i] = w0[i] + k * wt0[i] + k * k * c(0.5) * (wrr + work.g[i]);
    }
    {
        let i = n - 1;
        let ghost = w0[i - 1] + (h + h) * w0[i] / r[i];
        let wrr = (w0[i - 1] - w0[i] - w0[i] + ghost) / (h * h);
        cur[i] = w0[i] + k * wt0[i] + k * k * c(0.5) * (wrr + work.g[i]);
    }
    let mut older = prev.clone();
    let mut next = vec![T::zero(); n];
    let mut wt = vec![T::zero(); n];
    let mut status = FdStatus::Completed;
    energy_history.push(energy(&prev, &cur));

    for step in 1..=steps {
        let t = k * T::of(step);
        let s = sup(&cur, &mut work);
        sup_history.push(SupSample { t: t.f64(), sup: s.f64() });
        if !s.is_finite() {
            status = FdStatus::Unstable { step, t: t.f64() };
            break;
        }
        if s > thresh {
            status = FdStatus::BlewUp { t_detect: t.f64() };
            break;
        }
        while next_snap < wanted.len() && wanted[next_snap] <= t + k * c(0.5) {
            snapshots.push((t, snap(&cur, &mut work)?));
            next_snap += 1;
        }
        if step == steps {
            break;
        }
        // predictor: w_t from a backward difference (second order when two
        // past levels exist)
        if src.needs_derivatives() {
            for i in 0..n {
                wt[i] = if step >= 2 {
                    (c::<T>(3.0) * cur[i] - c::<T>(4.0) * prev[i] + older[i]) / (k + k)
                } else {
                    // w_t(k) ≈ w_t(0) + k w_tt(0), with w_tt(0) from the Taylor start
                    c::<T>(2.0) * (cur[i] - prev[i]) / k - wt0[i]
                };
            }
        }
        source_term(&src, &cur, Some(&wt), &r, h, &mut work);
        leap(&prev, &cur, &work.g, lam2, k, &mut next);
        if src.needs_derivatives() {
            // corrector with the centred w_t
            for i in 0..n {
                wt[i] = (next[i] - prev[i]) / (k + k);
            }
            source_term(&src, &cur, Some(&wt), &r, h, &mut work);
            leap(&prev, &cur, &work.g, lam2, k, &mut next);
        }
        std::mem::swap(&mut older, &mut prev);
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
        energy_history.push(energy(&prev, &cur));
    }
    let t_last = T::lit(sup_history.last().map(|s| s.t).unwrap_or(0.0));
    if matches!(status, FdStatus::Completed) || snapshots.last().is_none_or(|s| s.0 != t_last) {
        snapshots.push((t_last, snap(&cur, &mut work)?));
    }
    Ok(FdRun {
        h,
        k,
        horizon,
        status,
        grid,
        snapshots,
        sup_history,
        energy_history,
    })
}

fn leap<T: Real>(prev: &[T], cur: &[T], g: &[T], lam2: T, k: T, next: &mut [T]) {
    let n = cur.len();
    next[0] = T::zero();
    let k2 = k * k;
    for i in 1..n - 1 {
        next[i] = cur[i] + cur[i] - prev[i] + lam2 * (cur[i + 1] - cur[i] - cur[i] + cur[i - 1]) + k2 * g[i];
    }
    // u_r = 0 at the outer radius: ghost w_{N+1} = w_{N-1} + 2h w_N / R
    let i = n - 1;
    let ghost = cur[i - 1] + c::<T>(2.0) * cur[i] / T::of(i);
    next[i] = cur[i] + cur[i] - prev[i] + lam2 * (cur[i - 1] - cur[i] - cur[i] + ghost) + k2 * g[i];
}
