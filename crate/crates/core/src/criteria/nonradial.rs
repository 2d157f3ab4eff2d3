use std::sync::Arc;

use super::verdict::{Bounds, Verdict, Witness};
use crate::error::Result;
use crate::freewave::GeneralCauchyData;
use crate::radial::{kato_norm, KatoOptions};
use crate::scalar::Real;
use crate::space::{norm3, Field3, FnField, Point3};

pub(crate) fn scan_points<T: Real>(pts: &[Point3<T>], g: impl Fn(Point3<T>) -> T) -> (T, Point3<T>) {
    let mut best = (T::infinity(), pts[0]);
    for &x in pts {
        let v = g(x);
        let v = if v.is_nan() { T::neg_infinity() } else { v };
        if v < best.0 {
            best = (v, x);
        }
    }
    best
}

/// `u0 > 0` and `u1 >= |∇u0|`: the free wave stays positive for `t >= 0`.
pub fn nonradial_momentum<T: Real>(data: &GeneralCauchyData<T>, strict: bool) -> Result<Verdict> {
    let pts = data.sample_points();
    let (m0, x0) = scan_points(&pts, |x| data.u0.value(x));
    let (m1, x1) = scan_points(&pts, |x| data.u1.value(x) - norm3(data.u0.gradient(x)));
    // u0 > 0 is required strictly whatever the flag
    let (margin, at) = if m0 < m1 { (m0, x0) } else { (m1, x1) };
    let mut v = Verdict::new("nonradial_momentum", strict, margin.f64(), Some(Witness::point(at, margin)));
    v.holds = m0 > T::zero() && super::verdict::decide(strict, m1.f64());
    Ok(v.note("positivity holds on t >= 0 only"))
}

/// `-Δu0 > |∇u1|`: the free wave stays positive on all of space-time.
/// With Kato options the payload carries `(‖Δu0‖_K + ‖∇u1‖_K) / 4π`.
pub fn nonradial_laplacian<T: Real>(
    data: &GeneralCauchyData<T>,
    strict: bool,
    kato: Option<&KatoOptions<T>>,
) -> Result<Verdict> {
    let pts = data.sample_points();
    let (m, at) = scan_points(&pts, |x| -data.u0.laplacian(x) - norm3(data.u1.gradient(x)));
    let mut v = Verdict::new("nonradial_laplacian", strict, m.f64(), Some(Witness::point(at, m)));
    if !data.decay.is_declared() {
        v = v.warn("decay at infinity not declared; positivity needs decaying data");
    }
    if let Some(opts) = kato {
        match kato_bound(data, opts) {
            Ok(k) => {
                v.bounds = Bounds {
                    kato_bound: Some(k.f64()),
                    linf_bound: Some(k.f64()),
                    ..Bounds::default()
                }
            }
            Err(e) => v = v.warn(format!("Kato bound unavailable: {e}")),
        }
    }
    Ok(v.note("Kato norm used as a computable surrogate for the Lorentz-space hypothesis"))
}

/// `(‖Δu0‖_K + ‖∇u1‖_K) / 4π`.
pub fn kato_bound<T: Real>(data: &GeneralCauchyData<T>, opts: &KatoOptions<T>) -> Result<T> {
    let u0 = data.u0.clone();
    let u1 = data.u1.clone();
    let lap: Arc<dyn Field3<T>> = Arc::new(FnField(move |x| u0.laplacian(x)));
    let grad: Arc<dyn Field3<T>> = Arc::new(FnField(move |x| norm3(u1.gradient(x))));
    let k0 = kato_norm(lap.as_ref(), opts)?.value;
    let k1 = kato_norm(grad.as_ref(), opts)?.value;
    Ok((k0 + k1) / (T::lit(4.0) * T::PI()))
}
