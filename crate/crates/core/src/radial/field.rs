use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::grid::RadialGrid;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Reflection behaviour of a radial profile through `r = 0` on the line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    /// `f(-r) = f(r)`: smooth radial functions of `x`.
    Even,
    /// `f(-r) = -f(r)`: e.g. `r u(r)` or a radial derivative.
    Odd,
    /// No smooth extension; one-sided stencils at the origin.
    None,
}

impl Parity {
    /// Parity of the derivative.
    pub fn derivative(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
            Parity::None => Parity::None,
        }
    }

    /// Parity of a product.
    pub fn times(self, other: Parity) -> Parity {
        match (self, other) {
            (Parity::None, _) | (_, Parity::None) => Parity::None,
            (a, b) if a == b => Parity::Even,
            _ => Parity::Odd,
        }
    }

    pub(crate) fn sign<T: Real>(self) -> Option<T> {
        match self {
            Parity::Even => Some(T::one()),
            Parity::Odd => Some(-T::one()),
            Parity::None => None,
        }
    }
}

/// Samples of a radial function on a [`RadialGrid`].
#[derive(Debug, Clone)]
pub struct RadialField<T> {
    grid: Arc<RadialGrid<T>>,
    values: Vec<T>,
    parity: Parity,
}

impl<T: Real> RadialField<T> {
    pub fn new(grid: Arc<RadialGrid<T>>, values: Vec<T>, parity: Parity) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Invalid(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                index: i,
                r: grid.nodes()[i].f64(),
            });
        }
        Ok(Self {
            grid,
            values,
            parity,
        })
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: Arc<RadialGrid<T>>, parity: Parity, f: impl Fn(T) -> T) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid, values, parity)
    }

    pub fn constant(grid: Arc<RadialGrid<T>>, value: T) -> Self {
        let values = vec![value; grid.len()];
        Self {
            grid,
            values,
            parity: Parity::Even,
        }
    }

    pub fn zeros(grid: Arc<RadialGrid<T>>) -> Self {
        Self::constant(grid, T::zero())
    }

    pub fn grid(&self) -> &Arc<RadialGrid<T>> {
        &self.grid
    }

    pub fn nodes(&self) -> &[T] {
        self.grid.nodes()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub(crate) fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Pointwise map; the result must stay finite.
    pub fn map(&self, parity: Parity, f: impl Fn(T, T) -> T) -> Result<Self> {
        let values = self
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&r, &v)| f(r, v))
            .collect();
        Self::new(self.grid.clone(), values, parity)
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_map(&self, other: &Self, parity: Parity, f: impl Fn(T, T, T) -> T) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .nodes()
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(&r, (&a, &b))| f(r, a, b))
            .collect();
        Self::new(self.grid.clone(), values, parity)
    }

    /// `alpha * self + beta * other`.
    pub fn axpby(&self, alpha: T, other: &Self, beta: T) -> Result<Self> {
        let parity = if self.parity == other.parity {
            self.parity
        } else {
            Parity::None
        };
        self.zip_map(other, parity, |_, a, b| alpha * a + beta * b)
    }

    /// `r * f(r)`.
    pub fn times_r(&self) -> Self {
        let values = self
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&r, &v)| r * v)
            .collect();
        Self {
            grid: self.grid.clone(),
            values,
            parity: self.parity.times(Parity::Odd),
        }
    }

    pub fn sup_abs(&self) -> T {
        crate::scalar::sup_abs(&self.values)
    }

    pub fn max(&self) -> T {
        crate::scalar::max_of(&self.values)
    }

    pub fn min(&self) -> T {
        crate::scalar::min_of(&self.values)
    }

    /// Value at the node closest to `r`.
    pub fn at_nearest(&self, r: T) -> T {
        self.values[self.grid.nearest(r)]
    }
}
