//! Scalar fields on ℝ³ and angular quadrature on the unit sphere.

use std::sync::Arc;

use crate::numerics::GaussLegendre;
use crate::radial::{laplacian, Hermite, RadialField};
use crate::error::Result;
use crate::scalar::{c, Real};

pub type Point3<T> = [T; 3];

pub fn norm3<T: Real>(x: Point3<T>) -> T {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

pub fn add3<T: Real>(a: Point3<T>, b: Point3<T>) -> Point3<T> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn scale3<T: Real>(s: T, a: Point3<T>) -> Point3<T> {
    [s * a[0], s * a[1], s * a[2]]
}

pub fn dot3<T: Real>(a: Point3<T>, b: Point3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// A scalar field on ℝ³. Derivatives default to central differences.
pub trait Field3<T: Real>: Send + Sync {
    fn value(&self, x: Point3<T>) -> T;

    fn gradient(&self, x: Point3<T>) -> Point3<T> {
        let h = fd_step::<T>(x, 3.0);
        let mut g = [T::zero(); 3];
        for (k, gk) in g.iter_mut().enumerate() {
            let mut p = x;
            let mut m = x;
            p[k] += h;
            m[k] -= h;
            *gk = (self.value(p) - self.value(m)) / (h + h);
        }
        g
    }

    fn laplacian(&self, x: Point3<T>) -> T {
        let h = fd_step::<T>(x, 4.0);
        let centre = self.value(x);
        let mut acc = T::zero();
        for k in 0..3 {
            let mut p = x;
            let mut m = x;
            p[k] += h;
            m[k] -= h;
            acc += self.value(p) - centre - centre + self.value(m);
        }
        acc / (h * h)
    }
}

fn fd_step<T: Real>(x: Point3<T>, root: f64) -> T {
    T::epsilon().powf(c(1.0 / root)) * (T::one() + norm3(x))
}

impl<T: Real, F: Field3<T> + ?Sized> Field3<T> for Arc<F> {
    fn value(&self, x: Point3<T>) -> T {
        (**self).value(x)
    }
    fn gradient(&self, x: Point3<T>) -> Point3<T> {
        (**self).gradient(x)
    }
    fn laplacian(&self, x: Point3<T>) -> T {
        (**self).laplacian(x)
    }
}

/// A closure viewed as a [`Field3`] with finite-difference derivatives.
pub struct FnField<F>(pub F);

impl<T: Real, F: Fn(Point3<T>) -> T + Send + Sync> Field3<T> for FnField<F> {
    fn value(&self, x: Point3<T>) -> T {
        (self.0)(x)
    }
}

/// A closure with analytic gradient and Laplacian.
pub struct AnalyticField<F, G, L> {
    pub value: F,
    pub gradient: G,
    pub laplacian: L,
}

impl<T, F, G, L> Field3<T> for AnalyticField<F, G, L>
where
    T: Real,
    F: Fn(Point3<T>) -> T + Send + Sync,
    G: Fn(Point3<T>) -> Point3<T> + Send + Sync,
    L: Fn(Point3<T>) -> T + Send + Sync,
{
    fn value(&self, x: Point3<T>) -> T {
        (self.value)(x)
    }
    fn gradient(&self, x: Point3<T>) -> Point3<T> {
        (self.gradient)(x)
    }
    fn laplacian(&self, x: Point3<T>) -> T {
        (self.laplacian)(x)
    }
}

/// A sampled radial field lifted to ℝ³.
#[derive(Debug, Clone)]
pub struct RadialLift<T> {
    f: Hermite<T>,
    lap: Hermite<T>,
}

impl<T: Real> RadialLift<T> {
    pub fn new(f: &RadialField<T>) -> Result<Self> {
        Ok(Self {
            f: Hermite::new(f)?,
            lap: Hermite::new(&laplacian(f)?)?,
        })
    }
}

impl<T: Real> Field3<T> for RadialLift<T> {
    fn value(&self, x: Point3<T>) -> T {
        self.f.value(norm3(x))
    }
    fn gradient(&self, x: Point3<T>) -> Point3<T> {
        let r = norm3(x);
        if r == T::zero() {
            return [T::zero(); 3];
        }
        scale3(self.f.derivative(r) / r, x)
    }
    fn laplacian(&self, x: Point3<T>) -> T {
        let r = norm3(x);
        if r > self.lap.r_max() {
            return T::zero();
        }
        self.lap.value(r)
    }
}

/// Nodes on the unit sphere with weights summing to one, so that
/// `Σ w f(ω)` is the spherical mean.
#[derive(Debug, Clone)]
pub struct SphericalRule<T> {
    pub points: Vec<Point3<T>>,
    pub weights: Vec<T>,
}

impl<T: Real> SphericalRule<T> {
    /// The 26-point Lebedev rule, exact for polynomials of degree 7.
    pub fn lebedev26() -> Self {
        let mut points = Vec::with_capacity(26);
        let mut weights = Vec::with_capacity(26);
        let one = T::one();
        let z = T::zero();
        for k in 0..3 {
            for s in [one, -one] {
                let mut p = [z; 3];
                p[k] = s;
                points.push(p);
                weights.push(c(1.0 / 21.0));
            }
        }
        let a = c::<T>(std::f64::consts::FRAC_1_SQRT_2);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            for si in [a, -a] {
                for sj in [a, -a] {
                    let mut p = [z; 3];
                    p[i] = si;
                    p[j] = sj;
                    points.push(p);
                    weights.push(c(4.0 / 105.0));
                }
            }
        }
        let b = c::<T>(1.0 / 3f64.sqrt());
        for sx in [b, -b] {
            for sy in [b, -b] {
                for sz in [b, -b] {
                    points.push([sx, sy, sz]);
                    weights.push(c(9.0 / 280.0));
                }
            }
        }
        Self { points, weights }
    }

    /// Gauss–Legendre in `cos θ` times a uniform rule in `φ`; exact to degree
    /// `2 n_theta - 1` in `cos θ` and `n_phi - 1` in `φ`.
    pub fn product(n_theta: usize, n_phi: usize) -> Self {
        let gl = GaussLegendre::<T>::new(n_theta);
        let mut points = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        let two_pi = c::<T>(2.0) * T::PI();
        for (&z, &w) in gl.nodes.iter().zip(&gl.weights) {
            let s = (T::one() - z * z).max(T::zero()).sqrt();
            for k in 0..n_phi {
                let phi = two_pi * (T::of(k) + c(0.5)) / T::of(n_phi);
                points.push([s * phi.cos(), s * phi.sin(), z]);
                weights.push(w * c(0.5) / T::of(n_phi));
            }
        }
        Self { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Mean of `f` over the sphere of radius `rho` centred at `x`.
    pub fn mean(&self, x: Point3<T>, rho: T, mut f: impl FnMut(Point3<T>) -> T) -> T {
        self.points
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&w3, &w)| acc + w * f(add3(x, scale3(rho, w3))))
    }
}
