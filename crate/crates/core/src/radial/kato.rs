use serde::Serialize;

use super::calculus::weighted_integral;
use super::field::RadialField;
use crate::error::{Error, Result};
use crate::numerics::GaussLegendre;
use crate::scalar::{c, Real};
use crate::space::{Field3, Point3, SphericalRule};

/// `sup_y ∫ |f(x)| / |x - y| dx` over the centres examined.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KatoNormResult<T> {
    pub value: T,
    pub argmax_center: Point3<T>,
    /// Power-law tail added beyond the truncation radius.
    pub tail_estimate: T,
}

/// Kato norm of a radial field.
///
/// For radial `|f|` the potential `∫|f(x)|/|x-y| dx` is nonincreasing in
/// `|y|` (Newton's theorem), so the supremum sits at the origin and equals
/// `4π ∫ |f| r dr`.
pub fn kato_norm_radial<T: Real>(f: &RadialField<T>) -> Result<KatoNormResult<T>> {
    let abs = f.map(f.parity(), |_, v| v.abs())?;
    let i = weighted_integral(&abs, 1);
    if i.tail_divergent {
        return Err(Error::NotKatoClass(format!(
            "|f| r does not decay integrably beyond r = {}",
            f.grid().r_max()
        )));
    }
    Ok(KatoNormResult {
        value: i.value,
        argmax_center: [T::zero(); 3],
        tail_estimate: i.tail_estimate,
    })
}

/// Resolution of the general Kato-norm quadrature.
#[derive(Debug, Clone)]
pub struct KatoOptions<T> {
    /// Integration radius around each centre.
    pub radius: T,
    /// Gauss–Legendre panels on `[0, radius]`, geometrically graded.
    pub panels: usize,
    pub order: usize,
    pub sphere: SphericalRule<T>,
    /// Centres examined: a uniform cube `[-half_width, half_width]^3`.
    pub center_half_width: T,
    pub centers_per_axis: usize,
}

impl<T: Real> Default for KatoOptions<T> {
    fn default() -> Self {
        Self {
            radius: c(20.0),
            panels: 24,
            order: 8,
            sphere: SphericalRule::product(12, 24),
            center_half_width: c(1.0),
            centers_per_axis: 5,
        }
    }
}

/// Kato norm of a field on ℝ³ as a supremum over a uniform centre grid.
pub fn kato_norm<T: Real>(f: &dyn Field3<T>, opts: &KatoOptions<T>) -> Result<KatoNormResult<T>> {
    let m = opts.centers_per_axis.max(1);
    let coord = |k: usize| {
        if m == 1 {
            T::zero()
        } else {
            -opts.center_half_width + c::<T>(2.0) * opts.center_half_width * T::of(k) / T::of(m - 1)
        }
    };
    let mut best: Option<KatoNormResult<T>> = None;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let y = [coord(i), coord(j), coord(k)];
                let r = kato_potential(f, y, opts)?;
                if best.is_none_or(|b| r.value > b.value) {
                    best = Some(r);
                }
            }
        }
    }
    Ok(best.expect("at least one centre"))
}

/// `∫ |f(x)| / |x - y| dx` for one centre `y`.
pub fn kato_potential<T: Real>(
    f: &dyn Field3<T>,
    y: Point3<T>,
    opts: &KatoOptions<T>,
) -> Result<KatoNormResult<T>> {
    let gl = GaussLegendre::<T>::new(opts.order);
    let shell = |rho: T| rho * opts.sphere.mean(y, rho, |x| f.value(x).abs());
    // panels graded so the inner ones resolve structure near the centre
    let p = opts.panels.max(1);
    let ratio = c::<T>(1.2);
    let total_weight = (0..p).fold(T::zero(), |a, k| a + ratio.powi(k as i32));
    let mut lo = T::zero();
    let mut sum = T::zero();
    for k in 0..p {
        let hi = lo + opts.radius * ratio.powi(k as i32) / total_weight;
        sum += gl.integrate(lo, hi, &shell);
        lo = hi;
    }
    let four_pi = c::<T>(4.0) * T::PI();
    let r_end = opts.radius;
    let (g_end, g_mid) = (shell(r_end), shell(r_end * c(0.5)));
    let tail = if g_end == T::zero() {
        T::zero()
    } else {
        let q = -(g_end / g_mid).ln() / c::<T>(2.0).ln();
        if !(q > c(1.05)) {
            return Err(Error::NotKatoClass(format!(
                "shell average decays like r^-{} at r = {}",
                q.f64(),
                r_end.f64()
            )));
        }
        g_end * r_end / (q - T::one())
    };
    Ok(KatoNormResult {
        value: four_pi * (sum + tail),
        argmax_center: y,
        tail_estimate: four_pi * tail,
    })
}
