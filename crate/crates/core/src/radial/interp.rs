use std::sync::Arc;

use super::calculus::differentiate;
use super::field::RadialField;
use super::grid::RadialGrid;
use crate::error::Result;
use crate::scalar::{c, Real};

/// Piecewise cubic Hermite interpolant of a [`RadialField`], with node
/// slopes from [`differentiate`] and an exact running antiderivative.
#[derive(Debug, Clone)]
pub struct Hermite<T> {
    grid: Arc<RadialGrid<T>>,
    y: Vec<T>,
    d: Vec<T>,
    cumulative: Vec<T>,
}

/// A point evaluation, flagged when it falls beyond the last node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<T> {
    pub value: T,
    pub truncated: bool,
}

impl<T: Real> Hermite<T> {
    pub fn new(f: &RadialField<T>) -> Result<Self> {
        let d = differentiate(f)?;
        Ok(Self::from_parts(
            f.grid().clone(),
            f.values().to_vec(),
            d.values().to_vec(),
        ))
    }

    /// Interpolant with explicitly supplied node slopes.
    pub fn from_parts(grid: Arc<RadialGrid<T>>, y: Vec<T>, d: Vec<T>) -> Self {
        let nodes = grid.nodes();
        let mut cumulative = Vec::with_capacity(y.len());
        cumulative.push(T::zero());
        let twelfth = c::<T>(1.0 / 12.0);
        for i in 1..y.len() {
            let h = nodes[i] - nodes[i - 1];
            let cell = h * (y[i - 1] + y[i]) * c(0.5) + h * h * (d[i - 1] - d[i]) * twelfth;
            cumulative.push(cumulative[i - 1] + cell);
        }
        Self {
            grid,
            y,
            d,
            cumulative,
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid<T>> {
        &self.grid
    }

    pub fn r_max(&self) -> T {
        self.grid.r_max()
    }

    fn cell(&self, r: T) -> (usize, T, T) {
        let i = self.grid.locate(r);
        let nodes = self.grid.nodes();
        let h = nodes[i + 1] - nodes[i];
        (i, h, (r - nodes[i]) / h)
    }

    /// Value at `r >= 0`; frozen at the boundary value beyond `r_max`.
    pub fn sample(&self, r: T) -> Sample<T> {
        if r >= self.r_max() {
            return Sample {
                value: self.y[self.y.len() - 1],
                truncated: r > self.r_max(),
            };
        }
        let (i, h, s) = self.cell(r.max(T::zero()));
        let s2 = s * s;
        let s3 = s2 * s;
        let two = c::<T>(2.0);
        let three = c::<T>(3.0);
        let h00 = two * s3 - three * s2 + T::one();
        let h10 = s3 - two * s2 + s;
        let h01 = -two * s3 + three * s2;
        let h11 = s3 - s2;
        Sample {
            value: h00 * self.y[i] + h * h10 * self.d[i] + h01 * self.y[i + 1] + h * h11 * self.d[i + 1],
            truncated: false,
        }
    }

    pub fn value(&self, r: T) -> T {
        self.sample(r).value
    }

    /// Derivative of the interpolant; zero beyond `r_max`.
    pub fn derivative(&self, r: T) -> T {
        if r >= self.r_max() {
            return if r > self.r_max() {
                T::zero()
            } else {
                self.d[self.d.len() - 1]
            };
        }
        let (i, h, s) = self.cell(r.max(T::zero()));
        let s2 = s * s;
        let six = c::<T>(6.0);
        let dh00 = (six * s2 - six * s) / h;
        let dh10 = c::<T>(3.0) * s2 - c::<T>(4.0) * s + T::one();
        let dh01 = (six * s - six * s2) / h;
        let dh11 = c::<T>(3.0) * s2 - c::<T>(2.0) * s;
        dh00 * self.y[i] + dh10 * self.d[i] + dh01 * self.y[i + 1] + dh11 * self.d[i + 1]
    }

    /// `∫_0^r` of the interpolant; continued with the frozen value beyond
    /// `r_max`.
    pub fn antiderivative(&self, r: T) -> Sample<T> {
        let n = self.y.len();
        if r >= self.r_max() {
            let extra = (r - self.r_max()) * self.y[n - 1];
            return Sample {
                value: self.cumulative[n - 1] + extra,
                truncated: r > self.r_max(),
            };
        }
        let (i, h, s) = self.cell(r.max(T::zero()));
        let s2 = s * s;
        let s3 = s2 * s;
        let s4 = s3 * s;
        let i00 = s4 * c(0.5) - s3 + s;
        let i10 = s4 * c(0.25) - s3 * c(2.0 / 3.0) + s2 * c(0.5);
        let i01 = -s4 * c(0.5) + s3;
        let i11 = s4 * c(0.25) - s3 / c(3.0);
        let part = h * (self.y[i] * i00 + h * self.d[i] * i10 + self.y[i + 1] * i01 + h * self.d[i + 1] * i11);
        Sample {
            value: self.cumulative[i] + part,
            truncated: false,
        }
    }

    /// Running integral `∫_0^{r_i}` at the nodes.
    pub fn cumulative(&self) -> &[T] {
        &self.cumulative
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::field::Parity;

    #[test]
    fn reproduces_cubics() {
        let g = Arc::new(RadialGrid::<f64>::uniform(2.0, 11).unwrap());
        let f = RadialField::from_fn(g, Parity::None, |r| r * r * r - r).unwrap();
        let h = Hermite::new(&f).unwrap();
        for &r in &[0.0, 0.03, 0.77, 1.5, 1.99] {
            assert!((h.value(r) - (r * r * r - r)).abs() < 1e-12);
            assert!((h.derivative(r) - (3.0 * r * r - 1.0)).abs() < 1e-11);
            let anti = r.powi(4) / 4.0 - r * r / 2.0;
            assert!((h.antiderivative(r).value - anti).abs() < 1e-12);
        }
        let s = h.sample(3.0);
        assert!(s.truncated && s.value == 6.0);
    }

    #[test]
    fn smooth_interpolation_accuracy() {
        let g = Arc::new(RadialGrid::<f64>::uniform(4.0, 81).unwrap());
        let f = RadialField::from_fn(g, Parity::Even, |r| (-r * r).exp()).unwrap();
        let h = Hermite::new(&f).unwrap();
        for k in 0..400 {
            let r = k as f64 * 0.00997;
            assert!((h.value(r) - (-r * r).exp()).abs() < 1e-6);
        }
        let total = h.antiderivative(4.0).value;
        assert!((total - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-7);
    }
}
