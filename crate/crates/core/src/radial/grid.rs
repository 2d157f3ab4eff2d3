use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{c, Real};

/// Minimum number of nodes accepted by [`RadialGrid`].
pub const MIN_NODES: usize = 8;

/// How the radial nodes are laid out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Spacing<T> {
    /// `r_i = i h`.
    Uniform { h: T },
    /// `r = r_max sinh(s x) / sinh(s)` for uniform `x` in `[0, 1]`: linear near
    /// the origin, geometric far out.
    Sinh { stretch: T },
    /// Explicit nodes (e.g. loaded from a file).
    Arbitrary,
}

/// Strictly increasing radii starting at `r = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid<T> {
    nodes: Vec<T>,
    spacing: Spacing<T>,
    /// `dr/dx` at each node for mapped grids (uniform `x` step `1/(n-1)`).
    jacobian: Option<Vec<T>>,
    weights: Vec<T>,
}

impl<T: Real> RadialGrid<T> {
    pub fn uniform(r_max: T, n: usize) -> Result<Self> {
        if n < MIN_NODES {
            return Err(Error::GridTooCoarse(n, MIN_NODES));
        }
        if !(r_max > T::zero()) || !r_max.is_finite() {
            return Err(Error::Invalid(format!("r_max must be positive, got {r_max}")));
        }
        let h = r_max / T::of(n - 1);
        let mut nodes: Vec<T> = (0..n).map(|i| T::of(i) * h).collect();
        nodes[n - 1] = r_max;
        let jacobian = vec![r_max; n];
        Ok(Self::finish(nodes, Spacing::Uniform { h }, Some(jacobian)))
    }

    /// Uniform grid with a prescribed spacing `h`; `r_max` is rounded up to a
    /// whole number of steps.
    pub fn with_spacing(h: T, r_max: T) -> Result<Self> {
        let steps = (r_max / h).ceil().to_usize().unwrap_or(0);
        Self::uniform(h * T::of(steps), steps + 1)
    }

    /// Graded grid, denser near `r = 0`. `stretch -> 0` recovers the uniform grid.
    pub fn sinh(r_max: T, n: usize, stretch: T) -> Result<Self> {
        if n < MIN_NODES {
            return Err(Error::GridTooCoarse(n, MIN_NODES));
        }
        if !(stretch > T::zero()) {
            return Self::uniform(r_max, n);
        }
        let scale = r_max / stretch.sinh();
        let dx = T::one() / T::of(n - 1);
        let mut nodes = Vec::with_capacity(n);
        let mut jac = Vec::with_capacity(n);
        for i in 0..n {
            let x = T::of(i) * dx;
            nodes.push(scale * (stretch * x).sinh());
            jac.push(scale * stretch * (stretch * x).cosh());
        }
        nodes[n - 1] = r_max;
        Ok(Self::finish(nodes, Spacing::Sinh { stretch }, Some(jac)))
    }

    /// Validates explicit nodes. A node list that is uniform to rounding is
    /// recognised as such.
    pub fn from_nodes(nodes: Vec<T>) -> Result<Self> {
        let n = nodes.len();
        if n < MIN_NODES {
            return Err(Error::GridTooCoarse(n, MIN_NODES));
        }
        if nodes[0] != T::zero() {
            return Err(Error::NonMonotoneNodes(0));
        }
        for i in 1..n {
            if !(nodes[i] > nodes[i - 1]) || !nodes[i].is_finite() {
                return Err(Error::NonMonotoneNodes(i));
            }
        }
        let r_max = nodes[n - 1];
        let h = r_max / T::of(n - 1);
        let uniform = nodes
            .iter()
            .enumerate()
            .all(|(i, &r)| (r - T::of(i) * h).abs() <= c::<T>(1e-9) * r_max);
        if uniform {
            return Self::uniform(r_max, n);
        }
        Ok(Self::finish(nodes, Spacing::Arbitrary, None))
    }

    fn finish(nodes: Vec<T>, spacing: Spacing<T>, jacobian: Option<Vec<T>>) -> Self {
        let weights = match &jacobian {
            Some(jac) => {
                let dx = T::one() / T::of(nodes.len() - 1);
                simpson_weights(nodes.len(), dx)
                    .into_iter()
                    .zip(jac)
                    .map(|(w, &j)| w * j)
                    .collect()
            }
            None => nonuniform_simpson_weights(&nodes),
        };
        Self {
            nodes,
            spacing,
            jacobian,
            weights,
        }
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_max(&self) -> T {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn spacing(&self) -> Spacing<T> {
        self.spacing
    }

    /// Uniform step `h` if the grid is uniform.
    pub fn uniform_step(&self) -> Option<T> {
        match self.spacing {
            Spacing::Uniform { h } => Some(h),
            _ => None,
        }
    }

    /// Largest gap between consecutive nodes.
    pub fn max_step(&self) -> T {
        self.nodes
            .windows(2)
            .fold(T::zero(), |m, w| m.max(w[1] - w[0]))
    }

    pub(crate) fn jacobian(&self) -> Option<&[T]> {
        self.jacobian.as_deref()
    }

    /// Quadrature weights for `∫_0^{r_max} g dr` (fourth order on uniform and
    /// mapped grids).
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Index `i` with `nodes[i] <= r < nodes[i+1]`, clamped to the last cell.
    pub fn locate(&self, r: T) -> usize {
        let n = self.nodes.len();
        if r <= T::zero() {
            return 0;
        }
        if r >= self.nodes[n - 1] {
            return n - 2;
        }
        match self.spacing {
            Spacing::Uniform { h } => (r / h).floor().to_usize().unwrap_or(0).min(n - 2),
            _ => {
                let idx = self.nodes.partition_point(|&x| x <= r);
                idx.saturating_sub(1).min(n - 2)
            }
        }
    }

    /// Index of the node closest to `r`.
    pub fn nearest(&self, r: T) -> usize {
        let i = self.locate(r);
        if (r - self.nodes[i]).abs() <= (self.nodes[i + 1] - r).abs() {
            i
        } else {
            i + 1
        }
    }

    /// A grid with the same layout and twice the resolution.
    pub fn refined(&self) -> Result<Self> {
        let n = 2 * self.len() - 1;
        match self.spacing {
            Spacing::Uniform { .. } => Self::uniform(self.r_max(), n),
            Spacing::Sinh { stretch } => Self::sinh(self.r_max(), n, stretch),
            Spacing::Arbitrary => {
                let mut nodes = Vec::with_capacity(n);
                for w in self.nodes.windows(2) {
                    nodes.push(w[0]);
                    nodes.push((w[0] + w[1]) * c(0.5));
                }
                nodes.push(self.r_max());
                Self::from_nodes(nodes)
            }
        }
    }

    /// Node midpoints.
    pub fn midpoints(&self) -> Vec<T> {
        self.nodes
            .windows(2)
            .map(|w| (w[0] + w[1]) * c(0.5))
            .collect()
    }
}

/// Composite Simpson weights on `n` equispaced points with step `dx`;
/// a 3/8 panel closes an odd interval count.
pub(crate) fn simpson_weights<T: Real>(n: usize, dx: T) -> Vec<T> {
    let mut w = vec![T::zero(); n];
    let intervals = n - 1;
    let (simpson_end, tail) = if intervals.is_multiple_of(2) {
        (intervals, false)
    } else {
        (intervals - 3, true)
    };
    let third = dx / c(3.0);
    let mut k = 0;
    while k < simpson_end {
        w[k] += third;
        w[k + 1] += c::<T>(4.0) * third;
        w[k + 2] += third;
        k += 2;
    }
    if tail {
        let e = dx * c(3.0 / 8.0);
        let s = simpson_end;
        w[s] += e;
        w[s + 1] += c::<T>(3.0) * e;
        w[s + 2] += c::<T>(3.0) * e;
        w[s + 3] += e;
    }
    w
}

/// Simpson weights on arbitrary nodes: quadratic interpolation over pairs of
/// intervals, the last odd interval integrates the quadratic through the
/// final three nodes.
pub(crate) fn nonuniform_simpson_weights<T: Real>(x: &[T]) -> Vec<T> {
    let n = x.len();
    let mut w = vec![T::zero(); n];
    let mut k = 0;
    while k + 2 < n {
        let a = quad_panel(x[k], x[k + 1], x[k + 2], x[k], x[k + 2]);
        for j in 0..3 {
            w[k + j] += a[j];
        }
        k += 2;
    }
    if k + 1 == n - 1 {
        // last interval [x_{n-2}, x_{n-1}] using nodes n-3..n-1
        let a = quad_panel(x[n - 3], x[n - 2], x[n - 1], x[n - 2], x[n - 1]);
        for j in 0..3 {
            w[n - 3 + j] += a[j];
        }
    }
    w
}

/// Weights of `∫_lo^hi p(x) dx` where `p` interpolates at `x0, x1, x2`.
fn quad_panel<T: Real>(x0: T, x1: T, x2: T, lo: T, hi: T) -> [T; 3] {
    // ∫ L_j over [lo, hi] via exact antiderivatives of the Lagrange basis
    let basis = |xa: T, xb: T, xj: T| -> T {
        // L(x) = (x - xa)(x - xb) / ((xj - xa)(xj - xb))
        let anti = |x: T| {
            x * x * x / c(3.0) - (xa + xb) * x * x / c(2.0) + xa * xb * x
        };
        (anti(hi) - anti(lo)) / ((xj - xa) * (xj - xb))
    };
    [basis(x1, x2, x0), basis(x0, x2, x1), basis(x0, x1, x2)]
}
