use std::sync::Arc;

use super::profile::NonlinearityProfile;
use crate::error::{Error, Result};
use crate::freewave::{CauchyData, GeneralCauchyData, RadialCauchyData};
use crate::radial::{Parity, RadialField};
use crate::scalar::Real;
use crate::space::{add3, dot3, scale3, Field3, Point3};

/// Maps data `(u0, u1)` of the nonlinear equation to free-wave data
/// `(v0, v1) = (v(u0), v'(u0) u1)`, `v` being the profile's oriented `F`.
pub fn push_forward<T: Real>(
    data: &CauchyData<T>,
    profile: &Arc<NonlinearityProfile<T>>,
) -> Result<CauchyData<T>> {
    match data {
        CauchyData::Radial(d) => push_forward_radial(d, profile).map(CauchyData::Radial),
        CauchyData::General(d) => Ok(CauchyData::General(push_forward_general(d, profile))),
    }
}

pub fn push_forward_radial<T: Real>(
    data: &RadialCauchyData<T>,
    profile: &NonlinearityProfile<T>,
) -> Result<RadialCauchyData<T>> {
    let v0 = data.u0().map(Parity::Even, |_, u| profile.v_of(u))?;
    let rv1 = data
        .u0()
        .zip_map(data.ru1(), data.ru1().parity(), |_, u, w| profile.dv_du(u) * w)?;
    Ok(RadialCauchyData::from_weighted(v0, rv1)?.with_decay(data.decay))
}

pub fn push_forward_general<T: Real>(
    data: &GeneralCauchyData<T>,
    profile: &Arc<NonlinearityProfile<T>>,
) -> GeneralCauchyData<T> {
    let v0 = PushedPosition {
        u0: data.u0.clone(),
        profile: profile.clone(),
    };
    let v1 = PushedMomentum {
        u0: data.u0.clone(),
        u1: data.u1.clone(),
        profile: profile.clone(),
    };
    GeneralCauchyData {
        u0: Arc::new(v0),
        u1: Arc::new(v1),
        ..data.clone()
    }
}

/// `u = v^{-1}(v)` node by node; fails at the first node outside the
/// invertibility range.
pub fn pull_back<T: Real>(v: &RadialField<T>, profile: &NonlinearityProfile<T>) -> Result<RadialField<T>> {
    let mut out = Vec::with_capacity(v.len());
    for (i, (&r, &x)) in v.nodes().iter().zip(v.values()).enumerate() {
        match profile.u_of(x) {
            Ok(u) => out.push(u),
            Err(Error::OutsideInvertibility { value, lo, hi, .. }) => {
                return Err(Error::OutsideInvertibility {
                    index: i,
                    r: r.f64(),
                    value,
                    lo,
                    hi,
                })
            }
            Err(e) => return Err(e),
        }
    }
    RadialField::new(v.grid().clone(), out, v.parity())
}

/// `v(u0)` with `∇v0 = v'∇u0` and `Δv0 = v'Δu0 + v''|∇u0|²`.
pub struct PushedPosition<T> {
    u0: Arc<dyn Field3<T>>,
    profile: Arc<NonlinearityProfile<T>>,
}

impl<T: Real> Field3<T> for PushedPosition<T> {
    fn value(&self, x: Point3<T>) -> T {
        self.profile.v_of(self.u0.value(x))
    }
    fn gradient(&self, x: Point3<T>) -> Point3<T> {
        scale3(self.profile.dv_du(self.u0.value(x)), self.u0.gradient(x))
    }
    fn laplacian(&self, x: Point3<T>) -> T {
        let u = self.u0.value(x);
        let g = self.u0.gradient(x);
        self.profile.dv_du(u) * self.u0.laplacian(x) + self.profile.d2v_du2(u) * dot3(g, g)
    }
}

/// `v'(u0) u1` with `∇v1 = v'∇u1 + v'' u1 ∇u0`.
pub struct PushedMomentum<T> {
    u0: Arc<dyn Field3<T>>,
    u1: Arc<dyn Field3<T>>,
    profile: Arc<NonlinearityProfile<T>>,
}

impl<T: Real> Field3<T> for PushedMomentum<T> {
    fn value(&self, x: Point3<T>) -> T {
        self.profile.dv_du(self.u0.value(x)) * self.u1.value(x)
    }
    fn gradient(&self, x: Point3<T>) -> Point3<T> {
        let u = self.u0.value(x);
        add3(
            scale3(self.profile.dv_du(u), self.u1.gradient(x)),
            scale3(self.profile.d2v_du2(u) * self.u1.value(x), self.u0.gradient(x)),
        )
    }
}

/// `Δv0` and `∇v1` of the pushed data at a point, from the chain rule.
pub struct LaplacianPush<T> {
    data: GeneralCauchyData<T>,
}

impl<T: Real> LaplacianPush<T> {
    pub fn lap_v0(&self, x: Point3<T>) -> T {
        self.data.u0.laplacian(x)
    }

    pub fn grad_v1(&self, x: Point3<T>) -> Point3<T> {
        self.data.u1.gradient(x)
    }

    /// The pushed data themselves.
    pub fn data(&self) -> &GeneralCauchyData<T> {
        &self.data
    }
}

pub fn nonradial_laplacian_push<T: Real>(
    data: &GeneralCauchyData<T>,
    profile: &Arc<NonlinearityProfile<T>>,
) -> LaplacianPush<T> {
    LaplacianPush {
        data: push_forward_general(data, profile),
    }
}
