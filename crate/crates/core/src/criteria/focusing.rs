use serde::{Deserialize, Serialize};

use super::nonradial::scan_points;
use super::radial::outgoing_check;
use super::scan::{scan_radial, sup_radial, RadialProbe};
use super::verdict::{Bounds, Verdict, Witness};
use crate::error::{invalid, Error, Result};
use crate::freewave::CauchyData;
use crate::radial::{differentiate, laplacian, Hermite};
use crate::scalar::{c, Real};
use crate::space::norm3;

/// `C_N = (2(N-2)/N²)^{1/N}`, the constant of the singular soliton
/// `Q_N = C_N |x|^{-2/N}`; defined for `N > 2`.
pub fn singular_soliton_constant<T: Real>(n: T) -> Result<T> {
    if !(n > c(2.0)) {
        return Err(Error::NoSingularSoliton(n.f64()));
    }
    Ok((c::<T>(2.0) * (n - c(2.0)) / (n * n)).powf(T::one() / n))
}

/// The four comparison cases for the focusing power equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DominationCase {
    /// Radial, both outgoing, `u0 >= |v0|`.
    I,
    /// Radial, `(u0)_r + u0/r - |u1| >= |(v0)_r + v0/r| + |v1|`.
    Ii,
    /// `u1 - |∇u0| >= |v1| + |∇v0|`.
    Iii,
    /// `-Δu0 - |∇u1| >= |Δv0| + |∇v1|`.
    Iv,
}

impl std::str::FromStr for DominationCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "i" => Ok(Self::I),
            "ii" => Ok(Self::Ii),
            "iii" => Ok(Self::Iii),
            "iv" => Ok(Self::Iv),
            other => invalid(format!("unknown domination case {other:?}")),
        }
    }
}

/// Does the solution from `u_data` dominate the one from `v_data`
/// (`|v| <= u`)? Radial cases use weighted forms (multiplied by `r`).
pub fn focusing_domination<T: Real>(
    u_data: &CauchyData<T>,
    v_data: &CauchyData<T>,
    case: DominationCase,
    strict: bool,
) -> Result<Verdict> {
    let name = "focusing_domination";
    let v = match case {
        DominationCase::I | DominationCase::Ii => {
            let (u, w) = match (u_data, v_data) {
                (CauchyData::Radial(u), CauchyData::Radial(w)) => (u, w),
                _ => return invalid(format!("case {case:?} needs radial data")),
            };
            if !u.u0().same_grid(w.u0()) {
                return Err(Error::GridMismatch);
            }
            let pu = RadialProbe::new(u)?;
            let pw = RadialProbe::new(w)?;
            if case == DominationCase::I {
                let s = scan_radial(u.grid(), |r| pu.u0(r) - pw.u0(r).abs());
                let scale = sup_radial(u.grid(), |r| pu.t_u0(r)).max(T::one());
                let tol = c::<T>(1e-6) * scale;
                let ou = outgoing_check(u, tol)?;
                let ov = outgoing_check(w, tol)?;
                let margin = s.min.f64().min(ou.margin).min(ov.margin);
                let mut out = Verdict::new(name, strict, margin, Some(Witness::radial(s.at, s.min)));
                if !ou.holds {
                    out = out.warn("u data are not outgoing");
                }
                if !ov.holds {
                    out = out.warn("v data are not outgoing");
                }
                out
            } else {
                let s = scan_radial(u.grid(), |r| {
                    pu.t_u0(r) - pu.ru1(r).abs() - pw.t_u0(r).abs() - pw.ru1(r).abs()
                });
                Verdict::new(name, strict, s.min.f64(), Some(Witness::radial(s.at, s.min)))
            }
        }
        DominationCase::Iii | DominationCase::Iv => {
            let (u, w) = match (u_data, v_data) {
                (CauchyData::General(u), CauchyData::General(w)) => (u, w),
                _ => return invalid(format!("case {case:?} needs nonradial data")),
            };
            let pts = u.sample_points();
            let (m, at) = if case == DominationCase::Iii {
                scan_points(&pts, |x| {
                    u.u1.value(x) - norm3(u.u0.gradient(x)) - w.u1.value(x).abs() - norm3(w.u0.gradient(x))
                })
            } else {
                scan_points(&pts, |x| {
                    -u.u0.laplacian(x)
                        - norm3(u.u1.gradient(x))
                        - w.u0.laplacian(x).abs()
                        - norm3(w.u1.gradient(x))
                })
            };
            Verdict::new(name, strict, m.f64(), Some(Witness::point(at, m)))
        }
    };
    let v = v.note("dominated solution satisfies |v| <= u");
    Ok(if matches!(case, DominationCase::I | DominationCase::Iii) {
        v.note("valid on t >= 0")
    } else {
        v
    })
}

/// `|Δu0| + |∇u1| <= C_N^{N+1} / (alpha + |x|)^{2+2/N}` at every node; the
/// payload carries the predicted bound `|u| <= C_N (alpha + |x|)^{-2/N}`.
pub fn supercritical_envelope<T: Real>(data: &CauchyData<T>, n: T, alpha: T, strict: bool) -> Result<Verdict> {
    let cn = singular_soliton_constant(n)?;
    if alpha < T::zero() {
        return invalid("alpha must be nonnegative");
    }
    let k = cn.powf(n + T::one());
    let p = c::<T>(2.0) + c::<T>(2.0) / n;
    let env = |r: T| k / (alpha + r).powf(p);
    let (margin, witness, weighted) = match data {
        CauchyData::Radial(d) => {
            let lap = Hermite::new(&laplacian(d.u0())?)?;
            let du1 = Hermite::new(&differentiate(&d.u1()?)?)?;
            let s = scan_radial(d.grid(), |r| env(r) - lap.value(r).abs() - du1.value(r).abs());
            let weighted = sup_radial(d.grid(), |r| r.powf(p) * lap.value(r))
                + sup_radial(d.grid(), |r| r.powf(p) * du1.value(r));
            (s.min, Witness::radial(s.at, s.min), weighted)
        }
        CauchyData::General(d) => {
            let pts = d.sample_points();
            let (m, at) = scan_points(&pts, |x| {
                env(norm3(x)) - d.u0.laplacian(x).abs() - norm3(d.u1.gradient(x))
            });
            let w0 = pts
                .iter()
                .fold(T::zero(), |acc, &x| acc.max(norm3(x).powf(p) * d.u0.laplacian(x).abs()));
            let w1 = pts
                .iter()
                .fold(T::zero(), |acc, &x| acc.max(norm3(x).powf(p) * norm3(d.u1.gradient(x))));
            (m, Witness::point(at, m), w0 + w1)
        }
    };
    let bounds = Bounds {
        pointwise_coefficient: Some(cn.f64()),
        linf_bound: (alpha > T::zero()).then(|| (cn * alpha.powf(-c::<T>(2.0) / n)).f64()),
        weighted_norm: (alpha == T::zero()).then(|| weighted.f64()),
        ..Bounds::default()
    };
    let mut v = Verdict::new("supercritical_envelope", strict, margin.f64(), Some(witness)).with_bounds(bounds);
    if alpha == T::zero() {
        v = v.note(format!(
            "weighted norm {} vs C_N^(N+1) = {}",
            weighted.f64(),
            k.f64()
        ));
    }
    Ok(v)
}
