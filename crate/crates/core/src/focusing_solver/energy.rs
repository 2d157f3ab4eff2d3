use serde::Serialize;

use super::soliton::Soliton;
use crate::error::{invalid, Result};
use crate::numerics::GaussLegendre;
use crate::radial::{differentiate, integrate_radial, Parity, RadialField, RadialIntegral, RadialProfile};
use crate::scalar::{c, Real};

/// `E[u] = ∫ (u_t² + |∇u|²)/2 - u⁶/6`.
pub fn energy_focusing<T: Real>(u: &RadialField<T>, u_t: &RadialField<T>) -> Result<RadialIntegral<T>> {
    energy_power(u, u_t, c(4.0))
}

/// `∫ (u_t² + |∇u|²)/2 - |u|^{N+2}/(N+2)`.
pub fn energy_power<T: Real>(u: &RadialField<T>, u_t: &RadialField<T>, n: T) -> Result<RadialIntegral<T>> {
    if !(n >= T::zero()) {
        return invalid(format!("power N must be nonnegative, got {n}"));
    }
    let u_r = differentiate(u)?;
    let p = n + c(2.0);
    let kin = u_r.zip_map(u_t, Parity::Even, |_, a, b| (a * a + b * b) * c(0.5))?;
    let dens = kin.zip_map(u, Parity::Even, |_, k, u| k - u.abs().powf(p) / p)?;
    Ok(integrate_radial(&dens))
}

/// The ground-state integrals behind the energy threshold, computed by
/// quadrature with an extrapolated tail.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KenigMerle {
    /// `‖∇Q‖²`.
    pub grad_sq: f64,
    /// `‖∇Q‖² / 2`.
    pub half_grad_sq: f64,
    /// `∫ Q⁶`, equal to `‖∇Q‖²` since `-ΔQ = Q⁵`.
    pub potential: f64,
    /// `E[(Q, 0)]`.
    pub energy_q: f64,
    /// `‖Q_r + Q/r‖²`.
    pub momentum_sq: f64,
    /// `E[(0, Q_r + Q/r)]`.
    pub energy_momentum: f64,
    /// `∫ (2 Q_r Q / r + Q²/r²)`.
    pub virial: f64,
    /// `d/dε E[(1+ε)Q]` at `ε = 0`, by central differences.
    pub d_energy: f64,
    /// `d²/dε² E[(1+ε)Q]` at `ε = 0`.
    pub d2_energy: f64,
    /// Largest tail correction applied, relative to `‖∇Q‖²`.
    pub max_tail: f64,
}

/// `4π ∫_0^∞ g(r) r² dr` for `g` smooth at the origin and decaying like a
/// power: Gauss–Legendre on geometric panels to `r_max`, then a power-law
/// tail fitted on `[r_max/2, r_max]`.
pub(crate) fn radial_quadrature<T: Real>(g: impl Fn(T) -> T, r_max: T) -> (T, T) {
    let gl = GaussLegendre::<T>::new(24);
    let w = |r: T| g(r) * r * r;
    let mut edges = vec![T::zero(), c(0.5)];
    while *edges.last().unwrap() < r_max {
        let next = (*edges.last().unwrap() * c(1.5)).min(r_max);
        edges.push(next);
    }
    let body = edges
        .windows(2)
        .fold(T::zero(), |acc, e| acc + gl.integrate(e[0], e[1], &w));
    let (a, b) = (w(r_max * c(0.5)), w(r_max));
    let tail = if a == T::zero() || b == T::zero() || (a > T::zero()) != (b > T::zero()) {
        T::zero()
    } else {
        let q = (a / b).ln() / c::<T>(2.0).ln();
        if q > T::one() {
            b * r_max / (q - T::one())
        } else {
            T::infinity()
        }
    };
    let four_pi = c::<T>(4.0) * T::PI();
    (four_pi * (body + tail), four_pi * tail)
}

pub fn kenig_merle_quantities<T: Real>() -> KenigMerle {
    let q = Soliton::<T>::ground();
    let r_max = c::<T>(1e5);
    let (grad, t1) = radial_quadrature(
        |r| {
            let d = q.derivative(r);
            d * d
        },
        r_max,
    );
    let (pot, t2) = radial_quadrature(|r| q.value(r).powi(6), r_max);
    let u1 = |r: T| q.t_transform(r) / r;
    let (mom, t3) = radial_quadrature(
        |r| {
            let v = u1(r);
            v * v
        },
        r_max,
    );
    let (vir, t4) = radial_quadrature(
        |r| {
            let (v, d) = (q.value(r), q.derivative(r));
            (c::<T>(2.0) * d * v * r + v * v) / (r * r)
        },
        r_max,
    );
    let e = |eps: T| {
        let s = T::one() + eps;
        s * s * grad * c(0.5) - s.powi(6) * pot / c(6.0)
    };
    let d = c::<T>(1e-4);
    let d_energy = (e(d) - e(-d)) / (d + d);
    let d2_energy = (e(d) - e(T::zero()) * c(2.0) + e(-d)) / (d * d);
    let max_tail = [t1, t2, t3, t4].iter().fold(T::zero(), |m, t| m.max(t.abs())) / grad;
    KenigMerle {
        grad_sq: grad.f64(),
        half_grad_sq: (grad * c(0.5)).f64(),
        potential: pot.f64(),
        energy_q: (grad * c(0.5) - pot / c(6.0)).f64(),
        momentum_sq: mom.f64(),
        energy_momentum: (mom * c(0.5)).f64(),
        virial: vir.f64(),
        d_energy: d_energy.f64(),
        d2_energy: d2_energy.f64(),
        max_tail: max_tail.f64(),
    }
}
