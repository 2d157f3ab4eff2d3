use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::{differentiate, Parity, RadialField, RadialGrid};
use crate::scalar::Real;
use crate::space::{Field3, Point3};

/// Declared decay of the data at infinity, used only for diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Decay {
    /// The data vanish for `|x|` beyond this radius.
    pub support_radius: Option<f64>,
    /// The data and their derivatives decay at least like `|x|^-power`.
    pub power: Option<f64>,
}

impl Decay {
    pub fn is_declared(&self) -> bool {
        self.support_radius.is_some() || self.power.is_some()
    }
}

/// Radial Cauchy data `(u0, u1)`.
///
/// The momentum is stored in the weighted form `r u1`, which stays bounded
/// for data such as `(0, Q_r + Q/r)` whose `u1` grows like `1/r` at the origin.
#[derive(Debug, Clone)]
pub struct RadialCauchyData<T> {
    u0: RadialField<T>,
    ru1: RadialField<T>,
    pub decay: Decay,
}

impl<T: Real> RadialCauchyData<T> {
    pub fn new(u0: RadialField<T>, u1: RadialField<T>) -> Result<Self> {
        u0.check_same_grid(&u1)?;
        let ru1 = u1.times_r();
        Ok(Self {
            u0,
            ru1,
            decay: Decay::default(),
        })
    }

    pub fn from_weighted(u0: RadialField<T>, ru1: RadialField<T>) -> Result<Self> {
        u0.check_same_grid(&ru1)?;
        Ok(Self {
            u0,
            ru1,
            decay: Decay::default(),
        })
    }

    /// Samples closed-form `u0` and `u1`.
    pub fn from_fns(
        grid: Arc<RadialGrid<T>>,
        u0: impl Fn(T) -> T,
        u1: impl Fn(T) -> T,
    ) -> Result<Self> {
        let f0 = RadialField::from_fn(grid.clone(), Parity::Even, u0)?;
        let f1 = RadialField::from_fn(grid, Parity::Even, u1)?;
        Self::new(f0, f1)
    }

    /// Samples closed-form `u0` and `r u1`.
    pub fn from_weighted_fns(
        grid: Arc<RadialGrid<T>>,
        u0: impl Fn(T) -> T,
        ru1: impl Fn(T) -> T,
        ru1_parity: Parity,
    ) -> Result<Self> {
        let f0 = RadialField::from_fn(grid.clone(), Parity::Even, u0)?;
        let f1 = RadialField::from_fn(grid, ru1_parity, ru1)?;
        Self::from_weighted(f0, f1)
    }

    pub fn with_decay(mut self, decay: Decay) -> Self {
        self.decay = decay;
        self
    }

    pub fn grid(&self) -> &Arc<RadialGrid<T>> {
        self.u0.grid()
    }

    pub fn u0(&self) -> &RadialField<T> {
        &self.u0
    }

    /// `r u1(r)`.
    pub fn ru1(&self) -> &RadialField<T> {
        &self.ru1
    }

    /// `u1(r)`, with the limit `(r u1)'(0)` at the origin. Fails when `r u1`
    /// does not vanish at the origin.
    pub fn u1(&self) -> Result<RadialField<T>> {
        let scale = self.ru1.sup_abs().max(T::one());
        if self.ru1.values()[0].abs() > T::epsilon().sqrt() * scale {
            return Err(Error::Invalid(
                "u1 is singular at the origin (r u1 does not vanish)".into(),
            ));
        }
        let d = differentiate(&self.ru1)?;
        let mut values: Vec<T> = self
            .ru1
            .values()
            .iter()
            .zip(self.ru1.nodes())
            .map(|(&w, &r)| if r > T::zero() { w / r } else { T::zero() })
            .collect();
        values[0] = d.values()[0];
        RadialField::new(self.grid().clone(), values, self.ru1.parity().times(Parity::Odd))
    }

    /// Scales the momentum by `lambda`.
    pub fn scale_momentum(&self, lambda: T) -> Result<Self> {
        Ok(Self {
            u0: self.u0.clone(),
            ru1: self.ru1.map(self.ru1.parity(), |_, v| lambda * v)?,
            decay: self.decay,
        })
    }
}

/// Nonradial Cauchy data given as fields on ℝ³, with the box on which sup
/// norms are sampled.
#[derive(Clone)]
pub struct GeneralCauchyData<T> {
    pub u0: Arc<dyn Field3<T>>,
    pub u1: Arc<dyn Field3<T>>,
    pub decay: Decay,
    /// Sup norms are taken over `[-half_width, half_width]^3`.
    pub sample_half_width: T,
    pub samples_per_axis: usize,
}

impl<T: Real> GeneralCauchyData<T> {
    pub fn new(u0: Arc<dyn Field3<T>>, u1: Arc<dyn Field3<T>>) -> Self {
        Self {
            u0,
            u1,
            decay: Decay::default(),
            sample_half_width: T::lit(6.0),
            samples_per_axis: 25,
        }
    }

    /// The sampling lattice used for sup norms and pointwise criteria.
    pub fn sample_points(&self) -> Vec<Point3<T>> {
        let m = self.samples_per_axis.max(2);
        let h = self.sample_half_width;
        let coord = |k: usize| -h + (h + h) * T::of(k) / T::of(m - 1);
        let mut pts = Vec::with_capacity(m * m * m);
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    pts.push([coord(i), coord(j), coord(k)]);
                }
            }
        }
        pts
    }
}

impl<T> std::fmt::Debug for GeneralCauchyData<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GeneralCauchyData")
            .field("decay", &self.decay)
            .finish_non_exhaustive()
    }
}

/// Cauchy data of either symmetry.
#[derive(Debug, Clone)]
pub enum CauchyData<T> {
    Radial(RadialCauchyData<T>),
    General(GeneralCauchyData<T>),
}

impl<T: Real> CauchyData<T> {
    pub fn as_radial(&self) -> Result<&RadialCauchyData<T>> {
        match self {
            CauchyData::Radial(d) => Ok(d),
            CauchyData::General(_) => Err(Error::Invalid("radial data required".into())),
        }
    }

    pub fn as_general(&self) -> Result<&GeneralCauchyData<T>> {
        match self {
            CauchyData::General(d) => Ok(d),
            CauchyData::Radial(_) => Err(Error::Invalid("nonradial data required".into())),
        }
    }
}

impl<T> From<RadialCauchyData<T>> for CauchyData<T> {
    fn from(d: RadialCauchyData<T>) -> Self {
        CauchyData::Radial(d)
    }
}

impl<T> From<GeneralCauchyData<T>> for CauchyData<T> {
    fn from(d: GeneralCauchyData<T>) -> Self {
        CauchyData::General(d)
    }
}
