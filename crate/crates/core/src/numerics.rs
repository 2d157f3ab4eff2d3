//! Small numerical kernels shared by the modules: Gauss–Legendre rules,
//! bracketed root finding and a least-squares line fit.

use crate::error::{invalid, Result};
use crate::scalar::{c, Real};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Builds an `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        // Nodes are computed in f64 and converted; f64 reaches full accuracy
        // for the orders used here.
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self {
            nodes: nodes.into_iter().map(c).collect(),
            weights: weights.into_iter().map(c).collect(),
        }
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate(&self, a: T, b: T, mut f: impl FnMut(T) -> T) -> T {
        let half = (b - a) * c(0.5);
        let mid = (a + b) * c(0.5);
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&x, &w)| acc + w * f(mid + half * x))
            * half
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: T, b: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = (b - a) * c(0.5);
        let mid = (a + b) * c(0.5);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, w * half))
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Bisection on a sign-changing bracket, stopping once the bracket is below
/// `tol`. Returns the midpoint of the final bracket.
pub fn bisect<T: Real>(mut a: T, mut b: T, tol: T, mut f: impl FnMut(T) -> T) -> Result<T> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if (fa > T::zero()) == (fb > T::zero()) {
        return invalid(format!(
            "bisection bracket [{a}, {b}] does not change sign ({fa:e}, {fb:e})"
        ));
    }
    for _ in 0..400 {
        let m = (a + b) * c(0.5);
        if (b - a).abs() <= tol || m == a || m == b {
            return Ok(m);
        }
        let fm = f(m);
        if fm == T::zero() {
            return Ok(m);
        }
        if (fm > T::zero()) == (fa > T::zero()) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok((a + b) * c(0.5))
}

/// Brent's method on a sign-changing bracket.
pub fn brent<T: Real>(a0: T, b0: T, tol: T, mut f: impl FnMut(T) -> T) -> Result<T> {
    let (mut a, mut b) = (a0, b0);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if (fa > T::zero()) == (fb > T::zero()) {
        return invalid(format!("brent bracket [{a}, {b}] does not change sign"));
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let two = c::<T>(2.0);
    let mut cc = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut bisected = true;
    for _ in 0..200 {
        if fb == T::zero() || (b - a).abs() <= tol {
            return Ok(b);
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + cc * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (c::<T>(3.0) * a + b) / c(4.0);
        let out_of_range = !((s > lo.min(b)) && (s < lo.max(b)));
        let slow = if bisected {
            (s - b).abs() >= (b - cc).abs() / two
        } else {
            (s - b).abs() >= (cc - d).abs() / two
        };
        let tiny = if bisected {
            (b - cc).abs() < tol
        } else {
            (cc - d).abs() < tol
        };
        if out_of_range || slow || tiny {
            s = (a + b) / two;
            bisected = true;
        } else {
            bisected = false;
        }
        let fs = f(s);
        d = cc;
        cc = b;
        fc = fb;
        if (fa > T::zero()) != (fs > T::zero()) {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Ok(b)
}

/// Ordinary least-squares fit `y = intercept + slope * x`.
pub fn fit_line<T: Real>(xs: &[T], ys: &[T]) -> Result<(T, T)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return invalid("line fit needs at least two paired samples");
    }
    let n = T::of(xs.len());
    let mx = xs.iter().fold(T::zero(), |a, &x| a + x) / n;
    let my = ys.iter().fold(T::zero(), |a, &y| a + y) / n;
    let (mut sxx, mut sxy) = (T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == T::zero() {
        return invalid("line fit with degenerate abscissae");
    }
    let slope = sxy / sxx;
    Ok((my - slope * mx, slope))
}

/// `n` points spaced logarithmically between `lo` and `hi` (both > 0).
pub fn log_space<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            let s = if n == 1 { T::zero() } else { T::of(i) / T::of(n - 1) };
            (a + (b - a) * s).exp()
        })
        .collect()
}

/// `n` points spaced evenly between `lo` and `hi` inclusive.
pub fn lin_space<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    (0..n)
        .map(|i| {
            if n == 1 {
                lo
            } else {
                lo + (hi - lo) * T::of(i) / T::of(n - 1)
            }
        })
        .collect()
}

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`.
/// Returns `(x, f(x))`.
pub fn golden_min<T: Real>(mut a: T, mut b: T, tol: T, mut f: impl FnMut(T) -> T) -> (T, T) {
    let g = c::<T>(0.618_033_988_749_894_9);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let gl = GaussLegendre::<f64>::new(6);
        // degree 11 is the highest exact degree for 6 nodes
        let v = gl.integrate(0.0, 2.0, |x| x.powi(11));
        assert!((v - 2f64.powi(12) / 12.0).abs() < 1e-10);
        let w: f64 = gl.weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn roots() {
        let r = brent(0.0f64, 2.0, 1e-14, |x| x * x - 2.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        let r = bisect(0.0f64, 2.0, 1e-14, |x| x * x - 2.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        assert!(bisect(0.0f64, 1.0, 1e-9, |x| x + 1.0).is_err());
    }

    #[test]
    fn line_fit() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let (b, m) = fit_line(&xs, &ys).unwrap();
        assert!((b - 1.0f64).abs() < 1e-14 && (m - 2.0).abs() < 1e-14);
    }
}
