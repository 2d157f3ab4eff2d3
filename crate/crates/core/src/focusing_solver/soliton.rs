use serde::{Deserialize, Serialize};

use crate::criteria::{singular_soliton_constant, Verdict, Witness};
use crate::error::{invalid, Result};
use crate::numerics::brent;
use crate::radial::{laplacian, RadialField, RadialProfile};
use crate::scalar::{c, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolitonKind {
    /// `Q = (1 + r²/3)^{-1/2}`, for `N = 4`.
    Ground,
    /// `Q_N = C_N r^{-2/N}`, for `N > 2`.
    Singular,
}

/// Stationary solution of `-ΔS = S^{N+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Soliton<T> {
    pub kind: SolitonKind,
    pub n: T,
    /// Amplitude: `1` for the ground state, `C_N` for the singular one.
    pub c_n: T,
}

pub fn soliton<T: Real>(kind: SolitonKind, n: T) -> Result<Soliton<T>> {
    match kind {
        SolitonKind::Ground => {
            if n != c(4.0) {
                return invalid(format!("the ground state Q solves the N = 4 equation, not N = {n}"));
            }
            Ok(Soliton { kind, n, c_n: T::one() })
        }
        SolitonKind::Singular => Ok(Soliton {
            kind,
            n,
            c_n: singular_soliton_constant(n)?,
        }),
    }
}

impl<T: Real> Soliton<T> {
    pub fn ground() -> Self {
        Soliton {
            kind: SolitonKind::Ground,
            n: c(4.0),
            c_n: T::one(),
        }
    }

    fn alpha(&self) -> T {
        -c::<T>(2.0) / self.n
    }

    /// `(r S)'`, which is `Q_r + Q/r` times `r`.
    pub fn t_transform(&self, r: T) -> T {
        match self.kind {
            SolitonKind::Ground => (T::one() + r * r / c(3.0)).powf(c(-1.5)),
            SolitonKind::Singular => (self.alpha() + T::one()) * self.c_n * r.powf(self.alpha()),
        }
    }

    /// `-ΔS - S^{N+1}`.
    pub fn residual(&self, r: T) -> T {
        -self.laplacian(r) - self.value(r).powf(self.n + T::one())
    }
}

impl<T: Real> RadialProfile<T> for Soliton<T> {
    fn value(&self, r: T) -> T {
        match self.kind {
            SolitonKind::Ground => (T::one() + r * r / c(3.0)).powf(c(-0.5)),
            SolitonKind::Singular => self.c_n * r.powf(self.alpha()),
        }
    }

    fn derivative(&self, r: T) -> T {
        match self.kind {
            SolitonKind::Ground => -r / c(3.0) * (T::one() + r * r / c(3.0)).powf(c(-1.5)),
            SolitonKind::Singular => self.alpha() * self.c_n * r.powf(self.alpha() - T::one()),
        }
    }

    fn laplacian(&self, r: T) -> T {
        match self.kind {
            SolitonKind::Ground => -(T::one() + r * r / c(3.0)).powf(c(-2.5)),
            SolitonKind::Singular => {
                let a = self.alpha();
                a * (a + T::one()) * self.c_n * r.powf(a - c(2.0))
            }
        }
    }
}

/// Radii where `Q_4 = Q`; `Q_4 <= Q` between them.
pub fn crossing_radii<T: Real>() -> Result<(T, T)> {
    let q = Soliton::<T>::ground();
    let q4 = soliton(SolitonKind::Singular, c::<T>(4.0))?;
    let g = |r: T| q4.value(r) - q.value(r);
    let tol = T::epsilon() * c(4.0);
    // g > 0 near 0 and at infinity, negative at r = 3
    let lo = brent(c(1e-3), c(3.0), tol, g)?;
    let hi = brent(c(3.0), c(1e3), tol, g)?;
    Ok((lo, hi))
}

/// `-Δu0 >= u0^{N+1}` and `u0 >= 0` at every node. The margin is the
/// smallest `(-Δu0 - u0^{N+1}) / (|Δu0| + |u0|^{N+1})` (or `u0` itself where
/// negative); it holds down to `-tol`, since the Laplacian is numerical.
/// Passing data `(u0, 0)` give `|u| <= u0`.
pub fn supersolution_check<T: Real>(u0: &RadialField<T>, n: T, tol: f64) -> Result<Verdict> {
    let lap = laplacian(u0)?;
    let points = u0.nodes().iter().zip(u0.values()).zip(lap.values()).map(|((&r, &u), &l)| (r, u, l));
    Ok(supersolution_verdict(points, n, tol))
}

/// [`supersolution_check`] for a closed-form profile at the given radii.
pub fn supersolution_check_profile<T: Real>(u0: &dyn RadialProfile<T>, n: T, radii: &[T], tol: f64) -> Verdict {
    supersolution_verdict(radii.iter().map(|&r| (r, u0.value(r), u0.laplacian(r))), n, tol)
}

fn supersolution_verdict<T: Real>(points: impl Iterator<Item = (T, T, T)>, n: T, tol: f64) -> Verdict {
    let mut worst = (T::infinity(), T::zero());
    for (r, u, l) in points {
        let p = u.abs().powf(n) * u;
        let scale = l.abs() + p.abs();
        let mut m = if scale > T::zero() { (-l - p) / scale } else { T::zero() };
        if u < T::zero() {
            m = m.min(u);
        }
        if m < worst.0 {
            worst = (m, r);
        }
    }
    let mut v = Verdict::new("supersolution", false, worst.0.f64(), Some(Witness::radial(worst.1, worst.0)))
        .note("domination |u| <= u0 for data (u0, 0)");
    if !v.holds && worst.0.f64() >= -tol {
        v.holds = true;
        v = v.note(format!("holds within tolerance {tol:e}"));
    }
    v
}
