use serde::Serialize;

use super::field::{Parity, RadialField};
use crate::error::{Error, Result};
use crate::scalar::{c, Real};

/// Fewest nodes the difference stencils accept.
pub const MIN_DIFF_NODES: usize = 4;

/// Radial derivative `f'(r)`.
///
/// Fourth-order stencils in the computational coordinate on uniform and
/// sinh-mapped grids (ghost nodes through `r = 0` from the parity, one-sided
/// at the outer end), second order on arbitrary node sets.
pub fn differentiate<T: Real>(f: &RadialField<T>) -> Result<RadialField<T>> {
    let n = f.len();
    if n < MIN_DIFF_NODES {
        return Err(Error::GridTooCoarse(n, MIN_DIFF_NODES));
    }
    let grid = f.grid();
    let values = match grid.jacobian() {
        Some(jac) if n >= 5 => {
            let dx = T::one() / T::of(n - 1);
            let dfdx = diff_equispaced(f.values(), f.parity(), dx);
            dfdx.into_iter().zip(jac).map(|(d, &j)| d / j).collect()
        }
        _ => diff_arbitrary(grid.nodes(), f.values(), f.parity()),
    };
    RadialField::new(grid.clone(), values, f.parity().derivative())
}

fn diff_equispaced<T: Real>(y: &[T], parity: Parity, dx: T) -> Vec<T> {
    let n = y.len();
    let d12 = c::<T>(12.0) * dx;
    let (c3, c6, c8, c10, c16, c18, c25, c36, c48) = (
        c::<T>(3.0),
        c::<T>(6.0),
        c::<T>(8.0),
        c::<T>(10.0),
        c::<T>(16.0),
        c::<T>(18.0),
        c::<T>(25.0),
        c::<T>(36.0),
        c::<T>(48.0),
    );
    let sign = parity.sign::<T>();
    // value at signed index, reflecting through the origin
    let at = |k: isize| -> T {
        if k >= 0 {
            y[k as usize]
        } else {
            sign.unwrap_or(T::zero()) * y[(-k) as usize]
        }
    };
    let mut out = vec![T::zero(); n];
    for (i, o) in out.iter_mut().enumerate() {
        let k = i as isize;
        *o = if i + 2 < n && (i >= 2 || sign.is_some()) {
            (at(k - 2) - c8 * at(k - 1) + c8 * at(k + 1) - at(k + 2)) / d12
        } else if i == 0 {
            (-c25 * y[0] + c48 * y[1] - c36 * y[2] + c16 * y[3] - c3 * y[4]) / d12
        } else if i == 1 {
            (-c3 * y[0] - c10 * y[1] + c18 * y[2] - c6 * y[3] + y[4]) / d12
        } else if i == n - 1 {
            (c25 * y[i] - c48 * y[i - 1] + c36 * y[i - 2] - c16 * y[i - 3] + c3 * y[i - 4]) / d12
        } else {
            (c3 * y[i + 1] + c10 * y[i] - c18 * y[i - 1] + c6 * y[i - 2] - y[i - 3]) / d12
        };
    }
    out
}

fn diff_arbitrary<T: Real>(x: &[T], y: &[T], parity: Parity) -> Vec<T> {
    let n = x.len();
    let three_point = |x0: T, x1: T, x2: T, y0: T, y1: T, y2: T, at: T| -> T {
        // derivative at `at` of the parabola through three points
        let l0 = (c::<T>(2.0) * at - x1 - x2) / ((x0 - x1) * (x0 - x2));
        let l1 = (c::<T>(2.0) * at - x0 - x2) / ((x1 - x0) * (x1 - x2));
        let l2 = (c::<T>(2.0) * at - x0 - x1) / ((x2 - x0) * (x2 - x1));
        y0 * l0 + y1 * l1 + y2 * l2
    };
    let mut out = vec![T::zero(); n];
    out[0] = match parity.sign::<T>() {
        Some(s) => three_point(-x[1], x[0], x[1], s * y[1], y[0], y[1], x[0]),
        None => three_point(x[0], x[1], x[2], y[0], y[1], y[2], x[0]),
    };
    for i in 1..n - 1 {
        out[i] = three_point(x[i - 1], x[i], x[i + 1], y[i - 1], y[i], y[i + 1], x[i]);
    }
    out[n - 1] = three_point(
        x[n - 3],
        x[n - 2],
        x[n - 1],
        y[n - 3],
        y[n - 2],
        y[n - 1],
        x[n - 1],
    );
    out
}

/// Radial Laplacian `f'' + 2f'/r = (rf)''/r`, with the limit `3f''(0)` at
/// the origin.
pub fn laplacian<T: Real>(f: &RadialField<T>) -> Result<RadialField<T>> {
    let rf = f.times_r();
    let d1 = differentiate(&rf)?;
    let d2 = differentiate(&d1)?;
    let d3 = differentiate(&d2)?;
    let mut values: Vec<T> = d2
        .values()
        .iter()
        .zip(f.nodes())
        .map(|(&v, &r)| if r > T::zero() { v / r } else { T::zero() })
        .collect();
    values[0] = d3.values()[0];
    RadialField::new(f.grid().clone(), values, f.parity())
}

/// `∫_0^{r_max} f dr` with the grid weights.
pub fn integrate_line<T: Real>(f: &RadialField<T>) -> T {
    f.values()
        .iter()
        .zip(f.grid().weights())
        .fold(T::zero(), |a, (&v, &w)| a + v * w)
}

/// `4π ∫ f r^2 dr` together with truncation diagnostics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RadialIntegral<T> {
    /// Quadrature plus the estimated tail beyond `r_max`.
    pub value: T,
    /// Quadrature over the grid only.
    pub raw: T,
    /// Power-law extrapolation of `∫_{r_max}^∞`.
    pub tail_estimate: T,
    /// Contribution of the outermost tenth `[0.9 r_max, r_max]` to the raw
    /// integral.
    pub last_decade: T,
    /// `last_decade` exceeds `1e-6` of the total.
    pub tail_unresolved: bool,
    /// The integrand does not decay fast enough for the tail to converge.
    pub tail_divergent: bool,
}

/// Threshold for the `tail_unresolved` flag.
pub const TAIL_FRACTION: f64 = 1e-6;

/// `4π ∫_0^{r_max} f(r) r^2 dr` with a power-law tail estimate.
pub fn integrate_radial<T: Real>(f: &RadialField<T>) -> RadialIntegral<T> {
    weighted_integral(f, 2)
}

/// `4π ∫ f r^k dr` for `k` = 1 (Kato weight) or 2 (volume).
pub(crate) fn weighted_integral<T: Real>(f: &RadialField<T>, k: i32) -> RadialIntegral<T> {
    let nodes = f.nodes();
    let w = f.grid().weights();
    let g: Vec<T> = f
        .values()
        .iter()
        .zip(nodes)
        .map(|(&v, &r)| v * r.powi(k))
        .collect();
    let four_pi = c::<T>(4.0) * T::PI();
    let r_max = f.grid().r_max();
    let decade = r_max * c(0.9);
    let (mut raw, mut last) = (T::zero(), T::zero());
    for ((&gi, &wi), &r) in g.iter().zip(w).zip(nodes) {
        raw += gi * wi;
        if r >= decade {
            last += gi * wi;
        }
    }
    let (tail, divergent) = tail_estimate(nodes, &g);
    let raw = four_pi * raw;
    let tail = four_pi * tail;
    let last = four_pi * last;
    let value = raw + tail;
    let scale = value.abs().max(T::min_positive_value());
    RadialIntegral {
        value,
        raw,
        tail_estimate: tail,
        last_decade: last,
        tail_unresolved: divergent || last.abs() > c::<T>(TAIL_FRACTION) * scale,
        tail_divergent: divergent,
    }
}

/// Tail `∫_R^∞ g` assuming `g ~ C r^{-q}` fitted between `R/2` and `R`.
fn tail_estimate<T: Real>(nodes: &[T], g: &[T]) -> (T, bool) {
    let n = nodes.len();
    let r_end = nodes[n - 1];
    let g_end = g[n - 1];
    if g_end == T::zero() {
        return (T::zero(), false);
    }
    let half = r_end * c(0.5);
    let j = nodes.partition_point(|&x| x < half).min(n - 2);
    let (r_mid, g_mid) = (nodes[j], g[j]);
    if r_mid <= T::zero() || g_mid == T::zero() || (g_mid > T::zero()) != (g_end > T::zero()) {
        // oscillating or compactly supported near the end: no power law
        let negligible = g_end.abs() * r_end <= c::<T>(1e-14) * sum_abs(g);
        return (T::zero(), !negligible);
    }
    let q = -(g_end / g_mid).ln() / (r_end / r_mid).ln();
    if q > c(1.05) {
        (g_end * r_end / (q - T::one()), false)
    } else {
        (T::zero(), true)
    }
}

fn sum_abs<T: Real>(g: &[T]) -> T {
    g.iter().fold(T::zero(), |a, &x| a + x.abs())
}
