use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freewave::{dalembert_split, DalembertPair, RadialCauchyData, RadialWave};
use crate::numerics::{bisect, golden_min};
use crate::radial::{Parity, RadialField};
use crate::scalar::{c, Real};
use crate::transforms::{push_forward_radial, NonlinearityProfile};

/// Where the exact solution `u = F⁻¹(v)` is defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Validity {
    Global,
    /// `v` reaches an invertibility level; the first touch times in each
    /// direction (`None` when the profile never crosses on that side within
    /// the resolved extent).
    ConeLimited {
        t_forward: Option<f64>,
        t_backward: Option<f64>,
    },
}

impl Validity {
    pub fn is_global(&self) -> bool {
        matches!(self, Validity::Global)
    }

    pub fn contains(&self, t: f64) -> bool {
        match *self {
            Validity::Global => true,
            Validity::ConeLimited { t_forward, t_backward } => {
                t_forward.is_none_or(|f| t < f) && t_backward.is_none_or(|b| t > b)
            }
        }
    }
}

/// Snapshot of `u` and its derivatives at one time.
#[derive(Debug, Clone)]
pub struct NullState<T> {
    pub t: T,
    pub u: RadialField<T>,
    pub u_t: RadialField<T>,
    pub u_r: RadialField<T>,
    pub v: RadialField<T>,
    pub v_t: RadialField<T>,
    pub truncated: bool,
}

/// Exact solution of `u_tt - Δu = f(u)(u_t² - |∇u|²)` for radial data.
#[derive(Debug, Clone)]
pub struct NullSolution<T> {
    profile: Arc<NonlinearityProfile<T>>,
    data: RadialCauchyData<T>,
    v_data: RadialCauchyData<T>,
    v_split: DalembertPair<T>,
    wave: RadialWave<T>,
    psi_min: T,
    psi_max: T,
    validity: Validity,
}

impl<T: Real> NullSolution<T> {
    pub fn new(data: &RadialCauchyData<T>, profile: Arc<NonlinearityProfile<T>>) -> Result<Self> {
        let v_data = push_forward_radial(data, &profile)?;
        let v_split = dalembert_split(&v_data)?;
        let wave = RadialWave::from_pair(&v_split)?;
        let mut sol = Self {
            profile,
            data: data.clone(),
            v_data,
            v_split,
            wave,
            psi_min: T::zero(),
            psi_max: T::zero(),
            validity: Validity::Global,
        };
        let (lo, hi) = sol.psi_extremes();
        sol.psi_min = lo;
        sol.psi_max = hi;
        let (vlo, vhi) = sol.profile.v_levels();
        let inside = vlo.is_none_or(|a| lo > a) && vhi.is_none_or(|b| hi < b);
        if !inside {
            sol.validity = Validity::ConeLimited {
                t_forward: sol.first_touch(true)?.map(|(t, _)| t.f64()),
                t_backward: sol.first_touch(false)?.map(|(t, _)| t.f64()),
            };
        }
        Ok(sol)
    }

    pub fn profile(&self) -> &Arc<NonlinearityProfile<T>> {
        &self.profile
    }

    pub fn data(&self) -> &RadialCauchyData<T> {
        &self.data
    }

    /// The pushed-forward data `(v0, v1)`.
    pub fn v_data(&self) -> &RadialCauchyData<T> {
        &self.v_data
    }

    pub fn v_split(&self) -> &DalembertPair<T> {
        &self.v_split
    }

    pub fn wave(&self) -> &RadialWave<T> {
        &self.wave
    }

    pub fn validity(&self) -> Validity {
        self.validity
    }

    /// `[min Ψ, max Ψ]`, which equals `[inf v, sup v]` over all of spacetime.
    pub fn v_range(&self) -> (T, T) {
        (self.psi_min, self.psi_max)
    }

    pub fn extent(&self) -> T {
        self.wave.extent()
    }

    pub fn v(&self, r: T, t: T) -> T {
        self.wave.u(r, t)
    }

    pub fn u(&self, r: T, t: T) -> Result<T> {
        let v = self.v(r, t);
        self.profile.u_of(v).map_err(|_| self.ceased(r, t))
    }

    pub fn u_t(&self, r: T, t: T) -> Result<T> {
        let u = self.u(r, t)?;
        Ok(self.wave.u_t(r, t) / self.profile.dv_du(u))
    }

    pub fn u_r(&self, r: T, t: T) -> Result<T> {
        let u = self.u(r, t)?;
        Ok(self.wave.u_r(r, t) / self.profile.dv_du(u))
    }

    fn ceased(&self, r: T, t: T) -> Error {
        let (lo, hi) = self.profile.v_levels();
        Error::SolutionCeased {
            r: r.f64(),
            t: t.f64(),
            lo: lo.map_or(f64::NEG_INFINITY, |x| x.f64()),
            hi: hi.map_or(f64::INFINITY, |x| x.f64()),
        }
    }

    /// `u(·, t)` on the data grid; errors at the first node where `v` has left
    /// the invertibility range.
    pub fn solve(&self, t: T) -> Result<RadialField<T>> {
        let grid = self.data.grid().clone();
        let mut out = Vec::with_capacity(grid.len());
        for &r in grid.nodes() {
            out.push(self.u(r, t)?);
        }
        RadialField::new(grid, out, Parity::Even)
    }

    pub fn state(&self, t: T) -> Result<NullState<T>> {
        let ws = self.wave.state(t)?;
        let v_r = ws.u_r()?;
        let grid = ws.u.grid().clone();
        let n = grid.len();
        let (mut u, mut ut, mut ur) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for (i, &r) in grid.nodes().iter().enumerate() {
            let ui = self.profile.u_of(ws.u.values()[i]).map_err(|_| self.ceased(r, t))?;
            let d = self.profile.dv_du(ui);
            u.push(ui);
            ut.push(ws.u_t.values()[i] / d);
            ur.push(v_r.values()[i] / d);
        }
        Ok(NullState {
            t,
            u: RadialField::new(grid.clone(), u, Parity::Even)?,
            u_t: RadialField::new(grid.clone(), ut, Parity::Even)?,
            u_r: RadialField::new(grid, ur, Parity::Odd)?,
            v: ws.u,
            v_t: ws.u_t,
            truncated: ws.truncated,
        })
    }

    /// Distance of `v` to the nearer finite invertibility level (negative
    /// outside the range, `+∞` with no finite level).
    pub(crate) fn level_gap(&self, v: T) -> T {
        let (lo, hi) = self.profile.v_levels();
        let below = lo.map_or(T::infinity(), |a| v - a);
        let above = hi.map_or(T::infinity(), |b| b - v);
        below.min(above)
    }

    fn psi_extremes(&self) -> (T, T) {
        let nodes = self.wave.grid().nodes();
        let mut lo = (T::infinity(), T::zero());
        let mut hi = (T::neg_infinity(), T::zero());
        let mut visit = |s: T| {
            let p = self.wave.psi(s);
            if p < lo.0 {
                lo = (p, s);
            }
            if p > hi.0 {
                hi = (p, s);
            }
        };
        for w in nodes.windows(2) {
            let m = (w[0] + w[1]) * c(0.5);
            for s in [w[0], m, -w[0], -m] {
                visit(s);
            }
        }
        let last = *nodes.last().unwrap();
        visit(last);
        visit(-last);
        let h = self.wave.grid().max_step();
        let ext = self.extent();
        let tol = T::epsilon().sqrt() * h;
        let span = |s: T| ((s - h).max(-ext), (s + h).min(ext));
        let (a, b) = span(lo.1);
        let refined_lo = golden_min(a, b, tol, |s| self.wave.psi(s)).1;
        let (a, b) = span(hi.1);
        let refined_hi = -golden_min(a, b, tol, |s| -self.wave.psi(s)).1;
        (lo.0.min(refined_lo), hi.0.max(refined_hi))
    }

    /// `min_r gap(v(r, t))` over the resolved radii, with its location.
    pub(crate) fn cone_gap(&self, t: T) -> (T, T) {
        self.gap_on(t, T::zero(), self.extent() - t.abs())
    }

    /// `min gap(v(r, t))` over `r ∈ [a, b]` (nodes, then a golden refinement
    /// around the best node).
    pub(crate) fn gap_on(&self, t: T, a: T, b: T) -> (T, T) {
        let b = b.min(self.extent() - t.abs());
        let nodes = self.wave.grid().nodes();
        let mut best = (T::infinity(), a.max(T::zero()));
        let mut cand: Vec<T> = vec![a.max(T::zero())];
        cand.extend(nodes.iter().copied().filter(|&r| r > a && r < b));
        if b >= a {
            cand.push(b);
        }
        let mut at = 0;
        for (k, &r) in cand.iter().enumerate() {
            let g = self.level_gap(self.v(r, t));
            if g < best.0 {
                best = (g, r);
                at = k;
            }
        }
        if cand.len() < 2 {
            return best;
        }
        let lo = cand[at.saturating_sub(1)];
        let hi = cand[(at + 1).min(cand.len() - 1)];
        let tol = T::epsilon().sqrt() * (hi - lo).max(T::epsilon());
        let (r, g) = golden_min(lo, hi, tol, |r| self.level_gap(self.v(r, t)));
        if g < best.0 {
            (g, r)
        } else {
            best
        }
    }

    /// First time in one direction at which `v` touches a finite level:
    /// `(t, r)` of the touch.
    pub(crate) fn first_touch(&self, forward: bool) -> Result<Option<(T, T)>> {
        self.first_touch_within(forward, self.extent())
    }

    pub(crate) fn first_touch_within(&self, forward: bool, limit: T) -> Result<Option<(T, T)>> {
        let sign = if forward { T::one() } else { -T::one() };
        let (g0, r0) = self.cone_gap(T::zero());
        if g0 <= T::zero() {
            return Ok(Some((T::zero(), r0)));
        }
        // v(0, t) = Ψ(t): the touch happens no later than Ψ's first crossing.
        let limit = match self.psi_crossing(forward) {
            Some(s) => limit.min(s.abs()),
            None => limit,
        }
        .min(self.extent() * c(0.999));
        let dt = self.wave.grid().max_step();
        let mut prev = T::zero();
        let mut k = 1usize;
        loop {
            let tau = (T::of(k) * dt).min(limit);
            let (g, _) = self.cone_gap(sign * tau);
            if g <= T::zero() {
                let tol = c::<T>(1e-10).max(T::epsilon() * c(16.0));
                let hit = bisect(prev, tau, tol, |s| self.cone_gap(sign * s).0)
                    .map_err(|e| Error::WitnessInconsistent(format!("touch bracketing failed: {e}")))?;
                // report the side of the bracket where the level is reached
                let (gt, _) = self.cone_gap(sign * hit);
                let t = if gt <= T::zero() { hit } else { (hit + tol).min(tau) };
                let (_, r) = self.cone_gap(sign * t);
                return Ok(Some((sign * t, r)));
            }
            if tau >= limit {
                return Ok(None);
            }
            prev = tau;
            k += 1;
        }
    }

    /// First `s` (of the given sign) where `Ψ(s)` reaches a level.
    fn psi_crossing(&self, forward: bool) -> Option<T> {
        let sign = if forward { T::one() } else { -T::one() };
        let nodes = self.wave.grid().nodes();
        let mut prev = T::zero();
        for &s in nodes.iter().skip(1) {
            if self.level_gap(self.wave.psi(sign * s)) <= T::zero() {
                let tol = T::epsilon() * c(64.0);
                let hit = bisect(prev, s, tol, |x| self.level_gap(self.wave.psi(sign * x))).unwrap_or(s);
                return Some(sign * s.min(hit + tol));
            }
            prev = s;
        }
        None
    }
}

/// `u(·, t)` for radial data under the profile's transform.
pub fn solve_null<T: Real>(
    data: &RadialCauchyData<T>,
    profile: &Arc<NonlinearityProfile<T>>,
    t: T,
) -> Result<RadialField<T>> {
    NullSolution::new(data, profile.clone())?.solve(t)
}
