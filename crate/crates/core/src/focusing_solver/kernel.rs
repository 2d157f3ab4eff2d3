use std::sync::Arc;

use crate::error::{Error, Result};
use crate::radial::{Parity, RadialField, RadialGrid};
use crate::scalar::{c, Real};

/// Cumulative `C(x) = ∫_0^x ρ f(ρ) dρ` with `ρ f` piecewise linear on the
/// grid and zero beyond its last node.
#[derive(Debug, Clone)]
pub(crate) struct Moment<T> {
    grid: Arc<RadialGrid<T>>,
    g: Vec<T>,
    cum: Vec<T>,
}

impl<T: Real> Moment<T> {
    pub(crate) fn new(f: &RadialField<T>) -> Self {
        let nodes = f.nodes();
        let g: Vec<T> = nodes.iter().zip(f.values()).map(|(&r, &v)| r * v).collect();
        let mut cum = Vec::with_capacity(g.len());
        cum.push(T::zero());
        for i in 1..g.len() {
            let h = nodes[i] - nodes[i - 1];
            let prev = cum[i - 1];
            cum.push(prev + h * (g[i] + g[i - 1]) * c(0.5));
        }
        Moment {
            grid: f.grid().clone(),
            g,
            cum,
        }
    }

    pub(crate) fn at(&self, x: T) -> T {
        let nodes = self.grid.nodes();
        let n = nodes.len();
        if x >= nodes[n - 1] {
            return self.cum[n - 1];
        }
        if x <= T::zero() {
            return T::zero();
        }
        let i = self.grid.locate(x);
        let (a, b) = (nodes[i], nodes[i + 1]);
        let s = (x - a) / (b - a);
        let gx = self.g[i] + s * (self.g[i + 1] - self.g[i]);
        self.cum[i] + (x - a) * (self.g[i] + gx) * c(0.5)
    }

    /// `ρ f(ρ)` interpolated, zero beyond the grid.
    pub(crate) fn density(&self, x: T) -> T {
        let nodes = self.grid.nodes();
        let n = nodes.len();
        if x > nodes[n - 1] {
            return T::zero();
        }
        let i = self.grid.locate(x).min(n - 2);
        let (a, b) = (nodes[i], nodes[i + 1]);
        let s = (x - a) / (b - a);
        self.g[i] + s * (self.g[i + 1] - self.g[i])
    }
}

/// `sin(t√-Δ)/√-Δ f` for radial `f`:
/// `g(r) = (1/2r) ∫_{|r-t|}^{r+t} ρ f(ρ) dρ`, with `g(0) = t f(t)`.
///
/// This is the free wave with data `(0, f)` at time `t`. `ρ f` is taken
/// piecewise linear and `f` vanishes beyond the grid, so `g(r)` is exact
/// for the sampled `f` only where `r + t <= r_max`.
pub fn sine_kernel_radial<T: Real>(f: &RadialField<T>, t: T) -> Result<RadialField<T>> {
    let r_max = f.grid().r_max();
    if t < T::zero() {
        return Err(Error::Invalid(format!("kernel time must be nonnegative, got {t}")));
    }
    if t >= r_max {
        return Err(Error::InsufficientExtent {
            needed: t.f64(),
            available: r_max.f64(),
        });
    }
    let m = Moment::new(f);
    let values = f
        .nodes()
        .iter()
        .map(|&r| {
            if t == T::zero() {
                T::zero()
            } else if r == T::zero() {
                m.density(t)
            } else {
                (m.at(r + t) - m.at((r - t).abs())) / (r + r)
            }
        })
        .collect();
    RadialField::new(f.grid().clone(), values, Parity::Even)
}
