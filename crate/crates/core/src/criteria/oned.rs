use super::verdict::{Verdict, Witness};
use crate::error::{invalid, Result};
use crate::scalar::{c, Real};

/// A function sampled on an increasing set of points of the line,
/// interpolated by cubic Hermite.
#[derive(Debug, Clone)]
pub struct LineField<T> {
    x: Vec<T>,
    y: Vec<T>,
    d: Vec<T>,
}

impl<T: Real> LineField<T> {
    /// Slopes from three-point differences.
    pub fn new(x: Vec<T>, y: Vec<T>) -> Result<Self> {
        check(&x, &y)?;
        let d = slopes(&x, &y);
        Ok(Self { x, y, d })
    }

    pub fn with_slopes(x: Vec<T>, y: Vec<T>, d: Vec<T>) -> Result<Self> {
        check(&x, &y)?;
        check(&x, &d)?;
        Ok(Self { x, y, d })
    }

    pub fn nodes(&self) -> &[T] {
        &self.x
    }

    pub fn values(&self) -> &[T] {
        &self.y
    }

    /// Value at `s`, constant beyond either end.
    pub fn value(&self, s: T) -> T {
        let n = self.x.len();
        if s <= self.x[0] {
            return self.y[0];
        }
        if s >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let j = self.x.partition_point(|&v| v <= s).clamp(1, n - 1);
        let h = self.x[j] - self.x[j - 1];
        let t = (s - self.x[j - 1]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let two = c::<T>(2.0);
        let three = c::<T>(3.0);
        (two * t3 - three * t2 + T::one()) * self.y[j - 1]
            + (t3 - two * t2 + t) * h * self.d[j - 1]
            + (three * t2 - two * t3) * self.y[j]
            + (t3 - t2) * h * self.d[j]
    }

    /// `∫_{x_0}^{x_i} y` at every node, exact for the Hermite interpolant.
    pub fn cumulative(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.x.len()];
        for i in 1..self.x.len() {
            let h = self.x[i] - self.x[i - 1];
            out[i] = out[i - 1]
                + h * (self.y[i - 1] + self.y[i]) * c(0.5)
                + h * h * (self.d[i - 1] - self.d[i]) / c(12.0);
        }
        out
    }
}

fn check<T: Real>(x: &[T], y: &[T]) -> Result<()> {
    if x.len() != y.len() || x.len() < 3 {
        return invalid("line fields need matching x/y of length >= 3");
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return invalid("line nodes must increase strictly");
    }
    if y.iter().any(|v| !v.is_finite()) {
        return invalid("line field has non-finite values");
    }
    Ok(())
}

fn slopes<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    let n = x.len();
    let three_point = |i: usize, j: usize, k: usize, at: usize| {
        // derivative at x[at] of the parabola through i, j, k
        let (xi, xj, xk) = (x[i], x[j], x[k]);
        let s = x[at];
        y[i] * ((s - xj) + (s - xk)) / ((xi - xj) * (xi - xk))
            + y[j] * ((s - xi) + (s - xk)) / ((xj - xi) * (xj - xk))
            + y[k] * ((s - xi) + (s - xj)) / ((xk - xi) * (xk - xj))
    };
    (0..n)
        .map(|i| match i {
            0 => three_point(0, 1, 2, 0),
            _ if i == n - 1 => three_point(n - 3, n - 2, n - 1, n - 1),
            _ => three_point(i - 1, i, i + 1, i),
        })
        .collect()
}

/// One-dimensional positivity: `u0 >= |∂⁻¹u1|` with the antiderivative
/// anchored at the left end.
pub fn oned_positivity<T: Real>(u0: &LineField<T>, u1: &LineField<T>, strict: bool) -> Result<Verdict> {
    if u0.nodes() != u1.nodes() {
        return invalid("u0 and u1 must share nodes");
    }
    let anti = antiderivative(u1)?;
    let x = u0.nodes();
    let mut best = (T::infinity(), x[0]);
    for i in 0..x.len() {
        let mut visit = |s: T| {
            let v = u0.value(s) - anti.value(s).abs();
            if v < best.0 {
                best = (v, s);
            }
        };
        visit(x[i]);
        if i + 1 < x.len() {
            visit((x[i] + x[i + 1]) * c(0.5));
        }
    }
    let total = *anti.values().last().unwrap();
    let mut v = Verdict::new("oned_positivity", strict, best.0.f64(), Some(Witness::radial(best.1, best.0)))
        .note(format!("∫u1 dx = {}", total.f64()));
    let scale = u1.values().iter().fold(T::zero(), |m, &y| m.max(y.abs())) * (x[x.len() - 1] - x[0]);
    if total.abs() > c::<T>(1e-8) * scale.max(T::epsilon()) {
        v = v.warn("∫u1 dx != 0: compactly supported data cannot satisfy the criterion");
    }
    Ok(v)
}

/// `∂⁻¹u1` anchored at the left end, as a line field with slopes `u1`.
pub fn antiderivative<T: Real>(u1: &LineField<T>) -> Result<LineField<T>> {
    LineField::with_slopes(u1.x.clone(), u1.cumulative(), u1.y.clone())
}

/// d'Alembert solution of `u_tt = u_xx` at `(s, t)`: data outside the
/// sampled interval are frozen at the end values.
pub fn oned_solution<T: Real>(u0: &LineField<T>, anti: &LineField<T>, s: T, t: T) -> T {
    (u0.value(s - t) + u0.value(s + t)) * c(0.5) + (anti.value(s + t) - anti.value(s - t)) * c(0.5)
}
