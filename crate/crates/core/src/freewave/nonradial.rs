use serde::{Deserialize, Serialize};

use super::data::{CauchyData, GeneralCauchyData};
use crate::error::{Error, Result};
use crate::numerics::GaussLegendre;
use crate::radial::differentiate;
use crate::scalar::{c, max_of, min_of, Real};
use crate::space::{add3, dot3, norm3, scale3, Field3, Point3, SphericalRule};

/// Which representation formula evaluates the solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalForm {
    /// Kirchhoff: spherical means of `u0`, `∂_r u0` and `u1` on `|y - x| = |t|`.
    Mean,
    /// Volume integrals of `-Δu0` and `∂_r u1` outside the sphere; `t >= 0`.
    Laplacian,
}

/// Quadrature settings for nonradial point evaluation.
#[derive(Debug, Clone)]
pub struct SphericalOptions<T> {
    pub sphere: SphericalRule<T>,
    /// Outer radius of the volume integrals of the laplacian form.
    pub radius: T,
    pub panels: usize,
    pub order: usize,
}

impl<T: Real> Default for SphericalOptions<T> {
    fn default() -> Self {
        Self {
            sphere: SphericalRule::product(16, 32),
            radius: c(30.0),
            panels: 40,
            order: 8,
        }
    }
}

/// `u(x, t)` for nonradial data.
pub fn evaluate_nonradial<T: Real>(
    data: &GeneralCauchyData<T>,
    x: Point3<T>,
    t: T,
    form: EvalForm,
    opts: &SphericalOptions<T>,
) -> Result<T> {
    match form {
        EvalForm::Mean => Ok(kirchhoff(data, x, t, &opts.sphere)),
        EvalForm::Laplacian => {
            if t < T::zero() {
                return Err(Error::Invalid("laplacian form needs t >= 0".into()));
            }
            laplacian_form(data, x, t, opts)
        }
    }
}

/// `u(0, t)`.
pub fn evaluate_at_origin_nonradial<T: Real>(
    data: &CauchyData<T>,
    t: T,
    form: EvalForm,
    opts: &SphericalOptions<T>,
) -> Result<T> {
    evaluate_nonradial(data.as_general()?, [T::zero(); 3], t, form, opts)
}

fn kirchhoff<T: Real>(data: &GeneralCauchyData<T>, x: Point3<T>, t: T, rule: &SphericalRule<T>) -> T {
    let rho = t.abs();
    let mut acc = T::zero();
    for (&w3, &w) in rule.points.iter().zip(&rule.weights) {
        let y = add3(x, scale3(rho, w3));
        let du0 = dot3(data.u0.gradient(y), w3);
        acc += w * (data.u0.value(y) + rho * du0 + t * data.u1.value(y));
    }
    acc
}

fn laplacian_form<T: Real>(
    data: &GeneralCauchyData<T>,
    x: Point3<T>,
    t: T,
    opts: &SphericalOptions<T>,
) -> Result<T> {
    let rule = &opts.sphere;
    // ρ-integrand: ρ M_ρ[-Δu0] - t M_ρ[∂_ρ u1]
    let shell = |rho: T| -> T {
        let mut a = T::zero();
        for (&w3, &w) in rule.points.iter().zip(&rule.weights) {
            let y = add3(x, scale3(rho, w3));
            a += w * (-rho * data.u0.laplacian(y) - t * dot3(data.u1.gradient(y), w3));
        }
        a
    };
    if opts.radius <= t {
        return Err(Error::InsufficientExtent {
            needed: t.f64(),
            available: opts.radius.f64(),
        });
    }
    let gl = GaussLegendre::<T>::new(opts.order);
    let p = opts.panels.max(1);
    let width = (opts.radius - t) / T::of(p);
    let mut sum = T::zero();
    let mut abs_sum = T::zero();
    for k in 0..p {
        let lo = t + width * T::of(k);
        let part = gl.integrate(lo, lo + width, &shell);
        sum += part;
        abs_sum += part.abs();
    }
    let end = shell(opts.radius).abs() * opts.radius;
    if end > c::<T>(1e-8) * abs_sum.max(T::one()) {
        return Err(Error::TailUnresolved {
            tail: end.f64(),
            total: sum.f64(),
        });
    }
    Ok(sum)
}

/// Sup of `|f|` over the data's sampling lattice.
pub(crate) fn sup_on_samples<T: Real>(data: &GeneralCauchyData<T>, f: impl Fn(Point3<T>) -> T) -> T {
    data.sample_points()
        .into_iter()
        .fold(T::zero(), |m, x| m.max(f(x).abs()))
}

/// Bounds `[inf u0 - T K, sup u0 + T K]` with `K = ‖u1‖_∞ + ‖∇u0‖_∞`, valid
/// on `ℝ³ × [-T, T]`.
pub fn local_envelope<T: Real>(data: &CauchyData<T>, horizon: T) -> Result<(T, T)> {
    let (lo, hi, k) = match data {
        CauchyData::Radial(d) => {
            let du0 = differentiate(d.u0())?;
            let u1 = d.u1()?;
            (d.u0().min(), d.u0().max(), u1.sup_abs() + du0.sup_abs())
        }
        CauchyData::General(d) => {
            let pts = d.sample_points();
            let vals: Vec<T> = pts.iter().map(|&x| d.u0.value(x)).collect();
            let k = sup_on_samples(d, |x| d.u1.value(x)) + sup_on_samples(d, |x| norm3(d.u0.gradient(x)));
            (min_of(&vals), max_of(&vals), k)
        }
    };
    if !(lo.is_finite() && hi.is_finite() && k.is_finite()) {
        return Err(Error::Invalid("unbounded data samples".into()));
    }
    let spread = horizon.abs() * k;
    Ok((lo - spread, hi + spread))
}
