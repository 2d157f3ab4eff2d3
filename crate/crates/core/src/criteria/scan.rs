use crate::error::Result;
use crate::freewave::RadialCauchyData;
use crate::radial::{Hermite, RadialGrid};
use crate::scalar::{c, Real};

/// Minimum of a slack function and where it is attained.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Scan<T> {
    pub min: T,
    pub at: T,
}

const MAX_LEVEL: u32 = 5;

fn level_min<T: Real>(nodes: &[T], level: u32, g: &impl Fn(T) -> T) -> Scan<T> {
    let m = 1usize << level;
    let mut best = Scan {
        min: T::infinity(),
        at: nodes[0],
    };
    let mut visit = |r: T| {
        let v = g(r);
        let v = if v.is_nan() { T::neg_infinity() } else { v };
        if v < best.min {
            best = Scan { min: v, at: r };
        }
    };
    for w in nodes.windows(2) {
        for j in 0..m {
            visit(w[0] + (w[1] - w[0]) * T::of(j) / T::of(m));
        }
    }
    visit(nodes[nodes.len() - 1]);
    best
}

/// Minimum over nodes and midpoints, refined by doubling until it moves by
/// less than 1%.
pub(crate) fn scan_radial<T: Real>(grid: &RadialGrid<T>, g: impl Fn(T) -> T) -> Scan<T> {
    let nodes = grid.nodes();
    let mut best = level_min(nodes, 1, &g);
    for level in 2..=MAX_LEVEL {
        let next = level_min(nodes, level, &g);
        let moved = (best.min - next.min).abs();
        let stable = moved <= c::<T>(0.01) * best.min.abs() || moved <= T::epsilon() * c(16.0);
        if next.min < best.min {
            best = next;
        }
        if stable || !best.min.is_finite() {
            break;
        }
    }
    best
}

/// Supremum of `|g|` over nodes and midpoints.
pub(crate) fn sup_radial<T: Real>(grid: &RadialGrid<T>, g: impl Fn(T) -> T) -> T {
    let s = level_min(grid.nodes(), 1, &|r| -g(r).abs());
    -s.min
}

/// `u0`, `(u0)_r` and `r u1` at any radius of the grid.
pub(crate) struct RadialProbe<T> {
    u0: Hermite<T>,
    ru1: Hermite<T>,
}

impl<T: Real> RadialProbe<T> {
    pub fn new(data: &RadialCauchyData<T>) -> Result<Self> {
        Ok(Self {
            u0: Hermite::new(data.u0())?,
            ru1: Hermite::new(data.ru1())?,
        })
    }

    pub fn u0(&self, r: T) -> T {
        self.u0.value(r)
    }

    pub fn u0_r(&self, r: T) -> T {
        self.u0.derivative(r)
    }

    pub fn ru1(&self, r: T) -> T {
        self.ru1.value(r)
    }

    /// `(r u0)' = u0 + r (u0)_r`; equals `u0(0)` at the origin.
    pub fn t_u0(&self, r: T) -> T {
        self.u0(r) + r * self.u0_r(r)
    }
}
