use serde::{Deserialize, Serialize};

use super::scan::{scan_radial, sup_radial, RadialProbe};
use super::verdict::{Bounds, Verdict, Witness};
use crate::error::{invalid, Result};
use crate::freewave::{CauchyData, RadialCauchyData};
use crate::scalar::{c, Real};
use crate::transforms::{EndpointCase, NonlinearityProfile};

/// `(r u0)' - r|u1|`: positive (or nonnegative) exactly when the free wave
/// with these data stays positive (nonnegative) everywhere.
pub fn radial_positivity<T: Real>(data: &RadialCauchyData<T>, strict: bool) -> Result<Verdict> {
    let p = RadialProbe::new(data)?;
    let grid = data.grid();
    let s = scan_radial(grid, |r| p.t_u0(r) - p.ru1(r).abs());
    let linf = sup_radial(grid, |r| p.t_u0(r)) + sup_radial(grid, |r| p.ru1(r));
    let mut v = Verdict::new("radial_positivity", strict, s.min.f64(), Some(Witness::radial(s.at, s.min)));
    if !v.holds {
        let r0 = s.at.f64();
        v.bounds.blowup_window = Some([-r0, r0]);
        v = v.note(format!("u(0, t) <= 0 at t = {r0} or t = {}", -r0));
    }
    if linf.is_finite() {
        v.bounds.linf_bound = Some(linf.f64());
    }
    Ok(v)
}

/// `a <= u <= b` everywhere: `(r u0)' - a >= r|u1|` and `b - (r u0)' >= r|u1|`.
pub fn radial_bounds<T: Real>(data: &RadialCauchyData<T>, a: T, b: T, strict: bool) -> Result<Verdict> {
    if !(a < b) {
        return invalid(format!("bounds need a < b, got a = {a}, b = {b}"));
    }
    let p = RadialProbe::new(data)?;
    let s = scan_radial(data.grid(), |r| {
        let t = p.t_u0(r);
        let w = p.ru1(r).abs();
        (t - a - w).min(b - t - w)
    });
    let bounds = Bounds {
        envelope: Some([a.f64(), b.f64()]),
        ut_coefficient: Some(((b - a) * c(0.5)).f64()),
        ..Bounds::default()
    };
    Ok(Verdict::new("radial_bounds", strict, s.min.f64(), Some(Witness::radial(s.at, s.min))).with_bounds(bounds))
}

/// Outgoing data: `(u0)_r + u0/r = u1`, checked in the weighted form
/// `|(r u0)' - r u1| <= tol`.
pub fn outgoing_check<T: Real>(data: &RadialCauchyData<T>, tol: T) -> Result<Verdict> {
    let p = RadialProbe::new(data)?;
    let grid = data.grid();
    let s = scan_radial(grid, |r| -(p.t_u0(r) - p.ru1(r)).abs());
    let residual = -s.min;
    Ok(Verdict::new("outgoing_check", false, (tol - residual).f64(), Some(Witness::radial(s.at, residual)))
        .note(format!("max weighted residual {}", residual.f64())))
}

/// Global existence for `u_tt - Δu = f(u)(u_t² - |∇u|²)` with radial data.
///
/// For each finite endpoint the condition is checked in the weighted form
/// `r(∓(u0)_r + |u1|) < gap(u0)`, `gap` being `(F(u0) - a)/F'(u0)` or
/// `(b - F(u0))/F'(u0)`. For `f ≡ 1` this is `(u0)_r + |u1| < 1/r` node for
/// node. The margin is the `ε` of the bounded variant.
pub fn quadratic_global_condition<T: Real>(
    data: &RadialCauchyData<T>,
    profile: &NonlinearityProfile<T>,
    strict: bool,
) -> Result<Verdict> {
    let name = "quadratic_global_condition";
    let case = profile.classification().case();
    if case == EndpointCase::BothInfinite {
        return Ok(Verdict::new(name, strict, f64::INFINITY, None)
            .note("F(±∞) = ±∞: global smooth solution for any smooth data"));
    }
    let p = RadialProbe::new(data)?;
    let grid = data.grid();
    let below = profile.a().map(|_| {
        scan_radial(grid, |r| {
            profile.gap_below(p.u0(r)).unwrap_or(T::infinity()) + r * p.u0_r(r) - p.ru1(r).abs()
        })
    });
    let above = profile.b().map(|_| {
        scan_radial(grid, |r| {
            profile.gap_above(p.u0(r)).unwrap_or(T::infinity()) - r * p.u0_r(r) - p.ru1(r).abs()
        })
    });
    let worst = match (below, above) {
        (Some(x), Some(y)) => {
            if x.min <= y.min {
                x
            } else {
                y
            }
        }
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => unreachable!(),
    };
    let mut bounds = Bounds {
        margin_below: below.map(|s| s.min.f64()),
        margin_above: above.map(|s| s.min.f64()),
        ..Bounds::default()
    };
    let mut v = Verdict::new(name, strict, worst.min.f64(), Some(Witness::radial(worst.at, worst.min)));
    if v.holds {
        bounds.epsilon = Some(worst.min.f64());
        bounds.envelope = envelope(data, profile, &p).map(|[l, h]| [l.f64(), h.f64()]);
        if is_unit_constant(profile) {
            let (lo, hi) = (data.u0().min(), data.u0().max());
            let k = T::one() + sup_radial(grid, |r| r * p.u0_r(r)) + data.ru1().sup_abs();
            let eps = worst.min;
            bounds.log_envelope = Some([(lo - k.ln()).f64(), (hi - eps.ln()).f64()]);
            bounds.c0 = Some(((hi - lo).exp() * k / eps).f64());
        }
    } else {
        let r0 = worst.at.f64();
        bounds.blowup_window = Some([-r0, r0]);
    }
    if case == EndpointCase::BothFinite {
        v = v.note("both endpoints finite: each side evaluated independently; holds requires both");
    }
    Ok(v.with_bounds(bounds))
}

pub(crate) fn is_unit_constant<T: Real>(profile: &NonlinearityProfile<T>) -> bool {
    [-3.0, -0.5, 0.0, 0.7, 2.0, 9.0]
        .iter()
        .all(|&u| profile.f(T::lit(u)) == T::one())
}

/// Sharp `[inf u, sup u]` from the extreme one-dimensional profiles of the
/// free wave `b - F(u)` (or `F(u) - a`).
fn envelope<T: Real>(
    data: &RadialCauchyData<T>,
    profile: &NonlinearityProfile<T>,
    p: &RadialProbe<T>,
) -> Option<[T; 2]> {
    let grid = data.grid();
    let mut lo = T::neg_infinity();
    let mut hi = T::infinity();
    if let Some(b) = profile.b() {
        // w = b - F(u); (r w0)' = (b - F) - r F' (u0)_r, r w1 = -F' r u1
        let w_t = |r: T| {
            let u = p.u0(r);
            (b - profile.F(u)) - r * profile.fprime(u) * p.u0_r(r)
        };
        let w_m = |r: T| profile.fprime(p.u0(r)) * p.ru1(r);
        let m = scan_radial(grid, |r| w_t(r) - w_m(r).abs()).min;
        let big = sup_radial(grid, w_t) + sup_radial(grid, w_m);
        if m > T::zero() {
            hi = hi.min(profile.f_inverse(b - m).ok()?);
        }
        lo = lo.max(profile.f_inverse(b - big).unwrap_or(T::neg_infinity()));
    }
    if let Some(a) = profile.a() {
        let w_t = |r: T| {
            let u = p.u0(r);
            (profile.F(u) - a) + r * profile.fprime(u) * p.u0_r(r)
        };
        let w_m = |r: T| profile.fprime(p.u0(r)) * p.ru1(r);
        let m = scan_radial(grid, |r| w_t(r) - w_m(r).abs()).min;
        let big = sup_radial(grid, w_t) + sup_radial(grid, w_m);
        if m > T::zero() {
            lo = lo.max(profile.f_inverse(a + m).ok()?);
        }
        hi = hi.min(profile.f_inverse(a + big).unwrap_or(T::infinity()));
    }
    Some([lo, hi])
}

/// Guaranteed existence time and which endpoint limits it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalTime {
    #[serde(with = "super::verdict::nonfinite")]
    pub time: f64,
    /// The formula's denominator vanished or both endpoints are infinite.
    pub unbounded: bool,
    pub from_below: Option<f64>,
    pub from_above: Option<f64>,
}

/// `T = (F(inf u0) - a) / ((‖∇u0‖∞ + ‖u1‖∞) sup F'(u0))`, with the mirror
/// formula `(b - F(sup u0)) / (...)` for a finite `b`; the smaller when both.
pub fn local_existence_time<T: Real>(data: &CauchyData<T>, profile: &NonlinearityProfile<T>) -> Result<LocalTime> {
    let (inf_u, sup_u, grad, mom, sup_fp) = match data {
        CauchyData::Radial(d) => {
            let u1 = d.u1()?;
            let p = RadialProbe::new(d)?;
            let grad = sup_radial(d.grid(), |r| p.u0_r(r));
            let sup_fp = d.u0().values().iter().fold(T::zero(), |m, &u| m.max(profile.fprime(u)));
            (d.u0().min(), d.u0().max(), grad, u1.sup_abs(), sup_fp)
        }
        CauchyData::General(d) => {
            let pts = d.sample_points();
            let mut acc = (T::infinity(), T::neg_infinity(), T::zero(), T::zero(), T::zero());
            for x in pts {
                let u = d.u0.value(x);
                let g = d.u0.gradient(x);
                acc.0 = acc.0.min(u);
                acc.1 = acc.1.max(u);
                acc.2 = acc.2.max((g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt());
                acc.3 = acc.3.max(d.u1.value(x).abs());
                acc.4 = acc.4.max(profile.fprime(u));
            }
            acc
        }
    };
    let denom = (grad + mom) * sup_fp;
    let below = profile.a().map(|a| (profile.F(inf_u) - a) / denom);
    let above = profile.b().map(|b| (b - profile.F(sup_u)) / denom);
    let t = [below, above].iter().flatten().fold(T::infinity(), |m, &x| m.min(x));
    let unbounded = !(t.is_finite());
    Ok(LocalTime {
        time: if unbounded { f64::INFINITY } else { t.f64() },
        unbounded,
        from_below: below.filter(|x| x.is_finite()).map(|x| x.f64()),
        from_above: above.filter(|x| x.is_finite()).map(|x| x.f64()),
    })
}
