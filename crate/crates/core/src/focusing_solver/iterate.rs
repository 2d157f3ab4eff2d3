use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::lattice::Lattice;
use crate::criteria::{focusing_domination, DominationCase};
use crate::error::{invalid, Error, Result};
use crate::freewave::{CauchyData, RadialCauchyData, RadialWave};
use crate::radial::{differentiate, laplacian, RadialField};
use crate::scalar::{c, Real};

/// Which admissible case the data satisfy, with all four weighted margins.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Admissibility {
    pub case: Option<DominationCase>,
    /// Margins for cases i, ii, iii, iv. Case iii is weighted by `r`, case
    /// iv by `r²`, so that data with `u1 ~ 1/r` at the origin are covered.
    pub margins: [f64; 4],
    pub tolerance: f64,
    /// The power is an even integer.
    pub guaranteed: bool,
}

impl Admissibility {
    pub fn holds(&self) -> bool {
        self.case.is_some()
    }
}

fn is_even_integer<T: Real>(n: T) -> bool {
    n >= T::zero() && n.fract() == T::zero() && (n / c(2.0)).fract() == T::zero()
}

/// Margins of the four comparison cases against the zero solution.
pub fn admissibility<T: Real>(data: &RadialCauchyData<T>, n: T) -> Result<Admissibility> {
    let grid = data.grid().clone();
    let zero = RadialCauchyData::new(RadialField::zeros(grid.clone()), RadialField::zeros(grid.clone()))?;
    let u: CauchyData<T> = data.clone().into();
    let v: CauchyData<T> = zero.into();
    let m1 = focusing_domination(&u, &v, DominationCase::I, false)?.margin;
    let m2 = focusing_domination(&u, &v, DominationCase::Ii, false)?.margin;

    let u0 = data.u0();
    let ru1 = data.ru1();
    let du0 = differentiate(u0)?;
    let lap = laplacian(u0)?;
    let dru1 = differentiate(ru1)?;
    let nodes = u0.nodes();
    let mut m3 = T::infinity();
    let mut m4 = T::infinity();
    let mut scale = T::one();
    for i in 0..nodes.len() {
        let r = nodes[i];
        let w = ru1.values()[i];
        let rdu0 = r * du0.values()[i];
        m3 = m3.min(w - rdu0.abs());
        // r² (u1)_r = r (r u1)' - r u1
        let r2du1 = r * dru1.values()[i] - w;
        let r2lap = r * r * lap.values()[i];
        m4 = m4.min(-r2lap - r2du1.abs());
        scale = scale.max(w.abs()).max(rdu0.abs()).max(r2lap.abs()).max(r2du1.abs());
    }
    let tol = c::<T>(1e-8) * scale;
    let margins = [m1, m2, m3.f64(), m4.f64()];
    // cases ii and iv give the comparison for both time directions
    let order = [
        (1, DominationCase::Ii),
        (3, DominationCase::Iv),
        (2, DominationCase::Iii),
        (0, DominationCase::I),
    ];
    let case = order
        .iter()
        .find(|(i, _)| margins[*i] >= -tol.f64())
        .map(|&(_, case)| case);
    Ok(Admissibility {
        case,
        margins,
        tolerance: tol.f64(),
        guaranteed: is_even_integer(n),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IterateOptions {
    /// Power `N` in `|u|^N u`.
    pub n: f64,
    pub horizon: f64,
    /// Lattice step in both `r` and `t`.
    pub h: f64,
    /// Lattice extent; defaults to the data grid.
    pub r_max: Option<f64>,
    /// Nodes above this are presumed infinite.
    pub cap: f64,
    /// Stop when `sup |u_{n+1} - u_n|` over finite nodes falls below this.
    pub tol: f64,
    pub n_max: usize,
    /// Decrease tolerated as rounding, relative to `1 + |u_n|`. The rounded
    /// map is itself monotone for nonnegative iterates, so the default is 0.
    pub monotone_tol: f64,
    pub keep_history: bool,
    pub workers: usize,
}

impl Default for IterateOptions {
    fn default() -> Self {
        IterateOptions {
            n: 4.0,
            horizon: 2.0,
            h: 0.05,
            r_max: None,
            cap: 1e6,
            tol: 1e-10,
            n_max: 200,
            monotone_tol: 0.0,
            keep_history: false,
            workers: 1,
        }
    }
}

/// The lattice Duhamel map
/// `u ↦ W + ∫_0^t sin((t-s)√-Δ)/√-Δ (|u|^N u)(s) ds`.
///
/// Kernel integrals are exact for piecewise linear `ρ f`; the time integral
/// is composite Simpson, closed with a 3/8 panel on odd counts.
#[derive(Debug, Clone)]
pub struct DuhamelMap<T> {
    free: Lattice<T>,
    n: T,
    workers: usize,
}

impl<T: Real> DuhamelMap<T> {
    pub fn new(data: &RadialCauchyData<T>, n: T, horizon: T, h: T, r_max: Option<T>) -> Result<Self> {
        if !(h > T::zero()) {
            return invalid("lattice step must be positive");
        }
        let r_max = r_max.unwrap_or_else(|| data.grid().r_max());
        let n_r = (r_max / h).round().to_usize().unwrap_or(0) + 1;
        let mut free = Lattice::new(r_max, n_r, horizon, T::zero())?;
        let wave = RadialWave::new(data)?;
        let nodes: Vec<T> = free.grid().nodes().to_vec();
        let h = free.h();
        for (j, row) in free.rows_mut().iter_mut().enumerate() {
            let t = T::of(j) * h;
            for (v, &r) in row.iter_mut().zip(&nodes) {
                *v = wave.u(r, t);
            }
        }
        Ok(DuhamelMap { free, n, workers: 1 })
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    /// `W`, the free wave of the data on the lattice.
    pub fn free_wave(&self) -> &Lattice<T> {
        &self.free
    }

    fn source(&self, u: T) -> T {
        if u.is_infinite() {
            return u;
        }
        match self.n.to_i32() {
            Some(k) if T::of(k.unsigned_abs() as usize) == self.n => u.abs().powi(k) * u,
            _ => u.abs().powf(self.n) * u,
        }
    }

    /// One application to `u`, which must live on the map's lattice.
    pub fn apply(&self, u: &Lattice<T>) -> Result<Lattice<T>> {
        if u.n_r() != self.free.n_r() || u.n_t() != self.free.n_t() || u.h() != self.free.h() {
            return Err(Error::GridMismatch);
        }
        let h = self.free.h();
        let nodes = self.free.grid().nodes();
        let n_r = nodes.len();
        let sources: Vec<Source<T>> = (0..u.n_t())
            .map(|i| Source::new(u.row(i).iter().map(|&x| self.source(x)).collect(), nodes, h))
            .collect();
        let n_t = u.n_t();
        let row = |j: usize| -> Vec<T> {
            let w = time_weights::<T>(j, h);
            let mut out = self.free.row(j).to_vec();
            for (i, src) in sources.iter().enumerate().take(j) {
                let m = j - i;
                let wi = w[i];
                for (k, o) in out.iter_mut().enumerate() {
                    *o += wi * src.kernel(k, m, nodes, h, n_r);
                }
            }
            out
        };
        let rows: Vec<Vec<T>> = if self.workers <= 1 || n_t < 4 {
            (0..n_t).map(row).collect()
        } else {
            let workers = self.workers.min(n_t);
            let mut slots: Vec<Option<Vec<T>>> = vec![None; n_t];
            std::thread::scope(|s| {
                let handles: Vec<_> = (0..workers)
                    .map(|w| {
                        let row = &row;
                        s.spawn(move || (w..n_t).step_by(workers).map(|j| (j, row(j))).collect::<Vec<_>>())
                    })
                    .collect();
                for hnd in handles {
                    for (j, r) in hnd.join().expect("lattice worker panicked") {
                        slots[j] = Some(r);
                    }
                }
            });
            slots.into_iter().map(|r| r.expect("every row computed")).collect()
        };
        Ok(Lattice::from_rows(self.free.grid().clone(), h, rows))
    }
}

/// One time slice of the source. Interval integrals come from a disjoint
/// sparse table over the trapezoid segments, so each is a sum of in-range
/// terms only: no cancellation against large values elsewhere, and the
/// rounded result is monotone in the source.
struct Source<T> {
    f: Vec<T>,
    table: SumTable<T>,
}

impl<T: Real> Source<T> {
    fn new(f: Vec<T>, nodes: &[T], h: T) -> Self {
        // 0 · ∞ at the origin is ∞: the node is presumed infinite nearby
        let g = |k: usize| if f[k].is_infinite() { f[k] } else { nodes[k] * f[k] };
        let seg: Vec<T> = (1..f.len()).map(|k| h * (g(k - 1) + g(k)) * c(0.5)).collect();
        Source {
            table: SumTable::new(seg),
            f,
        }
    }

    /// `(1/2r_k) ∫_{|r_k - t_m|}^{r_k + t_m} ρ f`, zero beyond the lattice.
    fn kernel(&self, k: usize, m: usize, nodes: &[T], h: T, n_r: usize) -> T {
        if k == 0 {
            return if m < n_r { T::of(m) * h * self.f[m] } else { T::zero() };
        }
        let lo = k.abs_diff(m);
        if lo >= n_r - 1 {
            return T::zero();
        }
        let hi = (k + m).min(n_r - 1);
        self.table.sum(lo, hi - 1) / (nodes[k] + nodes[k])
    }
}

/// Disjoint sparse table: `sum(a, b)` over `x[a..=b]` from two stored
/// partial sums, each accumulated from the block midpoint outward.
struct SumTable<T> {
    x: Vec<T>,
    levels: Vec<Vec<T>>,
}

impl<T: Real> SumTable<T> {
    fn new(x: Vec<T>) -> Self {
        let n = x.len().max(1).next_power_of_two();
        let depth = n.trailing_zeros() as usize;
        let mut levels = Vec::with_capacity(depth);
        for l in 0..depth {
            let half = 1 << l;
            let mut row = vec![T::zero(); n];
            for mid in (half..n).step_by(2 * half) {
                let mut acc = T::zero();
                for i in (mid - half..mid).rev() {
                    if i < x.len() {
                        acc += x[i];
                    }
                    row[i] = acc;
                }
                acc = T::zero();
                for i in mid..mid + half {
                    if i < x.len() {
                        acc += x[i];
                    }
                    row[i] = acc;
                }
            }
            levels.push(row);
        }
        SumTable { x, levels }
    }

    fn sum(&self, a: usize, b: usize) -> T {
        if a == b {
            return self.x[a];
        }
        let l = (usize::BITS - 1 - (a ^ b).leading_zeros()) as usize;
        self.levels[l][a] + self.levels[l][b]
    }
}

/// Quadrature weights for `∫_0^{t_j}` on the nodes `t_0..t_j`.
pub(crate) fn time_weights<T: Real>(j: usize, h: T) -> Vec<T> {
    let mut w = vec![T::zero(); j + 1];
    match j {
        0 => {}
        1 => {
            w[0] = h * c(0.5);
            w[1] = h * c(0.5);
        }
        _ => {
            let simpson_end = if j.is_multiple_of(2) { j } else { j - 3 };
            for p in (0..simpson_end).step_by(2) {
                w[p] += h / c(3.0);
                w[p + 1] += c::<T>(4.0) * h / c(3.0);
                w[p + 2] += h / c(3.0);
            }
            if j % 2 == 1 {
                let a = j - 3;
                let e = c::<T>(3.0) * h / c(8.0);
                w[a] += e;
                w[a + 1] += e * c(3.0);
                w[a + 2] += e * c(3.0);
                w[a + 3] += e;
            }
        }
    }
    w
}

/// Convenience: `W + D(u)` for a lattice `u` built over the data's grid.
pub fn duhamel_map<T: Real>(data: &RadialCauchyData<T>, n: T, u: &Lattice<T>) -> Result<Lattice<T>> {
    let map = DuhamelMap::new(data, n, u.horizon(), u.h(), Some(u.grid().r_max()))?;
    map.apply(u)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    pub n: usize,
    /// `sup |u_n - u_{n-1}|` over nodes finite in both.
    pub sup_change: f64,
    pub diverged_fraction: f64,
    /// Nodes where `u_n < u_{n-1}` beyond rounding.
    pub monotone_violations: usize,
    /// Smallest `u_n - u_{n-1}` over nodes finite in both.
    pub min_increment: f64,
    pub min_value: f64,
}

#[derive(Debug, Clone)]
pub struct IterationState<T> {
    pub n: usize,
    pub u: Lattice<T>,
    /// The previous iterate, `u_{n-1}`.
    pub previous: Lattice<T>,
    pub converged: bool,
    pub admissibility: Admissibility,
    pub trace: Vec<TraceEntry>,
    /// `u_0, ..., u_n` when requested.
    pub history: Vec<Lattice<T>>,
    pub options: IterateOptions,
}

impl<T: Real> IterationState<T> {
    pub fn total_violations(&self) -> usize {
        self.trace.iter().map(|e| e.monotone_violations).sum()
    }

    /// Iteration trace as JSON.
    pub fn trace_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Out<'a> {
            options: &'a IterateOptions,
            admissibility: &'a Admissibility,
            converged: bool,
            iterations: usize,
            lattice: super::lattice::LatticeSummary,
            trace: &'a [TraceEntry],
        }
        Ok(serde_json::to_string_pretty(&Out {
            options: &self.options,
            admissibility: &self.admissibility,
            converged: self.converged,
            iterations: self.n,
            lattice: self.u.summary(),
            trace: &self.trace,
        })?)
    }
}

fn compare<T: Real>(prev: &Lattice<T>, next: &Lattice<T>, mono_tol: T) -> (T, usize, usize, T, T, bool) {
    let (mut sup, mut viol, mut inf, mut min_inc, mut min_val) = (T::zero(), 0, 0, T::infinity(), T::infinity());
    let mut newly_infinite = false;
    for j in 0..next.n_t() {
        for (&a, &b) in prev.row(j).iter().zip(next.row(j)) {
            if b.is_infinite() {
                inf += 1;
                newly_infinite |= !a.is_infinite();
                continue;
            }
            min_val = min_val.min(b);
            if a.is_infinite() {
                continue;
            }
            let d = b - a;
            sup = sup.max(d.abs());
            min_inc = min_inc.min(d);
            if d < -mono_tol * (T::one() + a.abs()) {
                viol += 1;
            }
        }
    }
    (sup, viol, inf, min_inc, min_val, newly_infinite)
}

fn apply_cap<T: Real>(u: &mut Lattice<T>, cap: T) {
    for row in u.rows_mut() {
        for v in row.iter_mut() {
            if v.abs() > cap {
                *v = if *v > T::zero() { T::infinity() } else { T::neg_infinity() };
            }
        }
    }
}

/// Picard iteration of the Duhamel map from `u_0 = W`. Admissible data give
/// a nondecreasing sequence; nodes beyond `cap` are held at `+∞`.
pub fn monotone_iterate<T: Real>(data: &RadialCauchyData<T>, opts: &IterateOptions) -> Result<IterationState<T>> {
    let n = c::<T>(opts.n);
    if !(opts.n >= 0.0) {
        return invalid(format!("power N must be nonnegative, got {}", opts.n));
    }
    if !(opts.cap > 0.0) {
        return invalid("divergence cap must be positive");
    }
    let adm = admissibility(data, n)?;
    if !adm.holds() {
        return Err(Error::MonotonicityNotGuaranteed);
    }
    let map = DuhamelMap::new(data, n, c(opts.horizon), c(opts.h), opts.r_max.map(c))?.with_workers(opts.workers);
    let cap = c::<T>(opts.cap);
    let total = (map.free_wave().n_r() * map.free_wave().n_t()) as f64;
    let mut u = map.free_wave().clone();
    apply_cap(&mut u, cap);
    let mut history = Vec::new();
    if opts.keep_history {
        history.push(u.clone());
    }
    let mut trace = Vec::new();
    let mut prev = u.clone();
    let mut converged = false;
    let mut it = 0;
    while it < opts.n_max {
        let mut next = map.apply(&u)?;
        apply_cap(&mut next, cap);
        it += 1;
        let (sup, viol, inf, min_inc, min_val, newly) = compare(&u, &next, c(opts.monotone_tol));
        trace.push(TraceEntry {
            n: it,
            sup_change: sup.f64(),
            diverged_fraction: inf as f64 / total,
            monotone_violations: viol,
            min_increment: min_inc.f64(),
            min_value: min_val.f64(),
        });
        prev = std::mem::replace(&mut u, next);
        if opts.keep_history {
            history.push(u.clone());
        }
        if sup.f64() < opts.tol && !newly {
            converged = true;
            break;
        }
    }
    Ok(IterationState {
        n: it,
        u,
        previous: prev,
        converged,
        admissibility: adm,
        trace,
        history,
        options: opts.clone(),
    })
}

/// `sup |D(u) - u|` over the resolved cone for the lattice sample of a
/// stationary profile; zero for an exact stationary solution with data
/// `(u, 0)`.
pub fn fixed_point_residual<T: Real>(
    profile: impl Fn(T) -> T,
    n: T,
    r_max: T,
    horizon: T,
    h: T,
) -> Result<T> {
    let grid = Arc::new(crate::radial::RadialGrid::with_spacing(h, r_max)?);
    let u0 = RadialField::from_fn(grid.clone(), crate::radial::Parity::Even, &profile)?;
    let data = RadialCauchyData::new(u0, RadialField::zeros(grid))?;
    let map = DuhamelMap::new(&data, n, horizon, h, Some(data.grid().r_max()))?;
    let mut u = map.free_wave().clone();
    let nodes: Vec<T> = u.grid().nodes().to_vec();
    for row in u.rows_mut() {
        for (v, &r) in row.iter_mut().zip(&nodes) {
            *v = profile(r);
        }
    }
    let out = map.apply(&u)?;
    Ok(out
        .resolved_nodes()
        .map(|(j, k)| (out.get(j, k) - u.get(j, k)).abs())
        .fold(T::zero(), T::max))
}
