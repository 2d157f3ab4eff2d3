use std::sync::Arc;

use super::data::RadialCauchyData;
use crate::error::{Error, Result};
use crate::radial::{differentiate, Hermite, Parity, RadialField, RadialGrid};
use crate::scalar::{c, Real};

/// `T(u)(r) = (r u(r))'`.
pub fn t_transform<T: Real>(u: &RadialField<T>) -> Result<RadialField<T>> {
    if u.parity() != Parity::Even {
        return Err(Error::Parity(format!(
            "T-transform needs an even field, got {:?}",
            u.parity()
        )));
    }
    differentiate(&u.times_r())
}

/// `u(r) = (1/r) ∫_0^r U`, with `U(0)` at the origin.
pub fn inv_t_transform<T: Real>(big_u: &RadialField<T>) -> Result<RadialField<T>> {
    let h = Hermite::new(big_u)?;
    let mut values: Vec<T> = h
        .cumulative()
        .iter()
        .zip(big_u.nodes())
        .map(|(&a, &r)| if r > T::zero() { a / r } else { T::zero() })
        .collect();
    values[0] = big_u.values()[0];
    RadialField::new(big_u.grid().clone(), values, Parity::Even)
}

/// Right- and left-moving profiles of the reduced problem `U_tt = U_rr` on
/// the half line with a Neumann condition at `r = 0`.
#[derive(Debug, Clone)]
pub struct DalembertPair<T> {
    pub u_plus: RadialField<T>,
    pub u_minus: RadialField<T>,
    /// Some samples needed values beyond the grid and used the frozen
    /// boundary value.
    pub truncated: bool,
}

impl<T: Real> DalembertPair<T> {
    /// `U(r, 0) = U_+ + U_-`.
    pub fn reconstruct(&self) -> Result<RadialField<T>> {
        self.u_plus.axpby(T::one(), &self.u_minus, T::one())
    }
}

/// `U_± = (U_0 ∓ ∂_r^{-1} U_1) / 2` with `∂_r^{-1} U_1 = r u1`.
pub fn dalembert_split<T: Real>(data: &RadialCauchyData<T>) -> Result<DalembertPair<T>> {
    let big_u0 = t_transform(data.u0())?;
    let w1 = data.ru1();
    let half = c::<T>(0.5);
    Ok(DalembertPair {
        u_plus: big_u0.zip_map(w1, Parity::None, |_, a, b| half * (a - b))?,
        u_minus: big_u0.zip_map(w1, Parity::None, |_, a, b| half * (a + b))?,
        truncated: false,
    })
}

/// Exact radial free wave built from the reflected d'Alembert profile.
///
/// With `Ψ(s) = 2U_-(s)` for `s >= 0` and `Ψ(s) = 2U_+(-s)` for `s < 0`,
/// and `A' = Ψ`, `A(0) = 0`:
///
/// ```text
/// u(r, t)     = (A(t + r) - A(t - r)) / 2r,     u(0, t) = Ψ(t)
/// (ru)_r      = (Ψ(t + r) + Ψ(t - r)) / 2
/// r u_t       = (Ψ(t + r) - Ψ(t - r)) / 2
/// ```
#[derive(Debug, Clone)]
pub struct RadialWave<T> {
    pos: Hermite<T>,
    neg: Hermite<T>,
    shift: T,
}

/// Solution snapshot at one time.
#[derive(Debug, Clone)]
pub struct WaveState<T> {
    pub t: T,
    pub u: RadialField<T>,
    pub u_t: RadialField<T>,
    /// `(r u)_r`, the reduced field `U(r, t)`.
    pub big_u: RadialField<T>,
    /// `r u_t`.
    pub r_ut: RadialField<T>,
    pub truncated: bool,
}

impl<T: Real> WaveState<T> {
    /// `u_r = ((ru)_r - u)/r`, zero at the origin.
    pub fn u_r(&self) -> Result<RadialField<T>> {
        self.big_u.zip_map(&self.u, Parity::Odd, |r, bu, u| {
            if r > T::zero() {
                (bu - u) / r
            } else {
                T::zero()
            }
        })
    }

    /// The snapshot as new Cauchy data.
    pub fn as_data(&self) -> Result<RadialCauchyData<T>> {
        RadialCauchyData::from_weighted(self.u.clone(), self.r_ut.clone())
    }
}

impl<T: Real> RadialWave<T> {
    pub fn new(data: &RadialCauchyData<T>) -> Result<Self> {
        Self::from_pair(&dalembert_split(data)?)
    }

    pub fn from_pair(pair: &DalembertPair<T>) -> Result<Self> {
        let two = c::<T>(2.0);
        let pos = pair.u_minus.map(Parity::None, |_, v| two * v)?;
        let neg = pair.u_plus.map(Parity::None, |_, v| two * v)?;
        Ok(Self {
            pos: Hermite::new(&pos)?,
            neg: Hermite::new(&neg)?,
            shift: T::zero(),
        })
    }

    pub fn grid(&self) -> &Arc<RadialGrid<T>> {
        self.pos.grid()
    }

    /// Largest `|s|` at which the profile is known.
    pub fn extent(&self) -> T {
        self.pos.r_max()
    }

    /// The same solution viewed from time `t0` (so `t = 0` of the result is
    /// `t = t0` of `self`).
    pub fn translated(&self, t0: T) -> Self {
        Self {
            pos: self.pos.clone(),
            neg: self.neg.clone(),
            shift: self.shift + t0,
        }
    }

    /// `Ψ(s)`; at `s = 0` the mean of the one-sided limits.
    pub fn psi(&self, s: T) -> T {
        let s = s + self.shift;
        self.psi_raw(s)
    }

    fn psi_raw(&self, s: T) -> T {
        if s > T::zero() {
            self.pos.value(s)
        } else if s < T::zero() {
            self.neg.value(-s)
        } else {
            (self.pos.value(T::zero()) + self.neg.value(T::zero())) * c(0.5)
        }
    }

    fn dpsi_raw(&self, s: T) -> T {
        if s > T::zero() {
            self.pos.derivative(s)
        } else if s < T::zero() {
            -self.neg.derivative(-s)
        } else {
            (self.pos.derivative(T::zero()) - self.neg.derivative(T::zero())) * c(0.5)
        }
    }

    fn anti_raw(&self, s: T) -> T {
        if s >= T::zero() {
            self.pos.antiderivative(s).value
        } else {
            -self.neg.antiderivative(-s).value
        }
    }

    /// Whether evaluating at `(r, t)` reaches beyond the known profile; the
    /// outer nodes of every snapshot with `t != 0` are.
    pub fn is_truncated(&self, r: T, t: T) -> bool {
        (t + self.shift).abs() + r > self.extent()
    }

    pub fn u(&self, r: T, t: T) -> T {
        let t = t + self.shift;
        if r == T::zero() {
            return self.psi_raw(t);
        }
        (self.anti_raw(t + r) - self.anti_raw(t - r)) / (r + r)
    }

    pub fn u_t(&self, r: T, t: T) -> T {
        let t = t + self.shift;
        if r == T::zero() {
            return self.dpsi_raw(t);
        }
        (self.psi_raw(t + r) - self.psi_raw(t - r)) / (r + r)
    }

    /// `(r u)_r`.
    pub fn big_u(&self, r: T, t: T) -> T {
        let t = t + self.shift;
        (self.psi_raw(t + r) + self.psi_raw(t - r)) * c(0.5)
    }

    /// `r u_t`.
    pub fn r_ut(&self, r: T, t: T) -> T {
        let t = t + self.shift;
        (self.psi_raw(t + r) - self.psi_raw(t - r)) * c(0.5)
    }

    pub fn u_r(&self, r: T, t: T) -> T {
        if r == T::zero() {
            return T::zero();
        }
        (self.big_u(r, t) - self.u(r, t)) / r
    }

    /// Samples the solution at time `t` on the profile grid.
    pub fn state(&self, t: T) -> Result<WaveState<T>> {
        if (t + self.shift).abs() >= self.extent() {
            return Err(Error::InsufficientExtent {
                needed: (t + self.shift).abs().f64(),
                available: self.extent().f64(),
            });
        }
        let grid = self.grid().clone();
        let nodes = grid.nodes();
        let mut u = Vec::with_capacity(nodes.len());
        let mut ut = Vec::with_capacity(nodes.len());
        let mut bu = Vec::with_capacity(nodes.len());
        let mut rut = Vec::with_capacity(nodes.len());
        for &r in nodes {
            u.push(self.u(r, t));
            ut.push(self.u_t(r, t));
            bu.push(self.big_u(r, t));
            rut.push(self.r_ut(r, t));
        }
        Ok(WaveState {
            t,
            u: RadialField::new(grid.clone(), u, Parity::Even)?,
            u_t: RadialField::new(grid.clone(), ut, Parity::Even)?,
            big_u: RadialField::new(grid.clone(), bu, Parity::Even)?,
            r_ut: RadialField::new(grid, rut, Parity::Odd)?,
            truncated: t + self.shift != T::zero(),
        })
    }

    /// The translated d'Alembert pair `Ũ_-(r) = Ψ(r + t0)/2`,
    /// `Ũ_+(r) = Ψ(t0 - r)/2` sampled on the grid.
    pub fn pair(&self) -> Result<DalembertPair<T>> {
        let grid = self.grid().clone();
        let half = c::<T>(0.5);
        let s = self.shift;
        let u_minus = RadialField::from_fn(grid.clone(), Parity::None, |r| half * self.psi_raw(r + s))?;
        let u_plus = RadialField::from_fn(grid, Parity::None, |r| half * self.psi_raw(s - r))?;
        Ok(DalembertPair {
            u_plus,
            u_minus,
            truncated: s != T::zero(),
        })
    }
}

/// Translates a split to time `t0` (either sign).
pub fn time_translate_split<T: Real>(pair: &DalembertPair<T>, t0: T) -> Result<DalembertPair<T>> {
    let wave = RadialWave::from_pair(pair)?;
    if t0.abs() >= wave.extent() {
        return Err(Error::InsufficientExtent {
            needed: t0.abs().f64(),
            available: wave.extent().f64(),
        });
    }
    wave.translated(t0).pair()
}

/// `u(·, t)` for radial data.
pub fn propagate_radial<T: Real>(data: &RadialCauchyData<T>, t: T) -> Result<RadialField<T>> {
    Ok(RadialWave::new(data)?.state(t)?.u)
}
