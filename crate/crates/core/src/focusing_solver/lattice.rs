use std::io::Write;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::radial::{Parity, RadialField, RadialGrid};
use crate::scalar::{c, Real};

/// Values on the uniform `(r, t)` lattice `r_k = k h`, `t_j = j h`.
/// `+∞` marks nodes presumed infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice<T> {
    grid: Arc<RadialGrid<T>>,
    h: T,
    /// `values[j][k]` at `(r_k, t_j)`.
    values: Vec<Vec<T>>,
}

/// Lattice summary for reports.
#[derive(Debug, Clone, Serialize)]
pub struct LatticeSummary {
    pub h: f64,
    pub r_max: f64,
    pub horizon: f64,
    pub n_r: usize,
    pub n_t: usize,
    pub sup_resolved: f64,
    pub infinite_nodes: usize,
}

impl<T: Real> Lattice<T> {
    /// Lattice over `[0, r_max] × [0, horizon]`; `horizon` is rounded up to a
    /// multiple of `h = r_max / (n_r - 1)`.
    pub fn new(r_max: T, n_r: usize, horizon: T, fill: T) -> Result<Self> {
        let grid = Arc::new(RadialGrid::uniform(r_max, n_r)?);
        let h = grid.uniform_step().expect("uniform grid");
        if !(horizon >= T::zero()) || horizon >= r_max {
            return invalid(format!("lattice horizon {horizon} must lie in [0, r_max = {r_max})"));
        }
        let n_t = (horizon / h - c(1e-9)).ceil().to_usize().unwrap_or(0) + 1;
        Ok(Lattice {
            values: vec![vec![fill; n_r]; n_t],
            grid,
            h,
        })
    }

    pub(crate) fn from_rows(grid: Arc<RadialGrid<T>>, h: T, values: Vec<Vec<T>>) -> Self {
        Lattice { grid, h, values }
    }

    pub fn grid(&self) -> &Arc<RadialGrid<T>> {
        &self.grid
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn n_r(&self) -> usize {
        self.grid.len()
    }

    pub fn n_t(&self) -> usize {
        self.values.len()
    }

    pub fn time(&self, j: usize) -> T {
        T::of(j) * self.h
    }

    pub fn horizon(&self) -> T {
        self.time(self.n_t() - 1)
    }

    pub fn radius(&self, k: usize) -> T {
        self.grid.nodes()[k]
    }

    pub fn get(&self, j: usize, k: usize) -> T {
        self.values[j][k]
    }

    pub fn row(&self, j: usize) -> &[T] {
        &self.values[j]
    }

    pub(crate) fn rows_mut(&mut self) -> &mut [Vec<T>] {
        &mut self.values
    }

    /// Inside the cone `r + t <= r_max`, where no value depends on data or
    /// sources beyond the grid.
    pub fn resolved(&self, j: usize, k: usize) -> bool {
        j + k < self.n_r()
    }

    /// `(j, k)` over the resolved cone.
    pub fn resolved_nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_t()).flat_map(move |j| (0..self.n_r().saturating_sub(j)).map(move |k| (j, k)))
    }

    /// Row `j` as a field; errors if it holds infinite nodes.
    pub fn field(&self, j: usize) -> Result<RadialField<T>> {
        RadialField::new(self.grid.clone(), self.values[j].clone(), Parity::Even)
    }

    pub fn infinite_count(&self) -> usize {
        self.values.iter().flatten().filter(|v| v.is_infinite()).count()
    }

    /// Largest `|u|` over finite resolved nodes.
    pub fn sup_resolved(&self) -> T {
        self.resolved_nodes()
            .map(|(j, k)| self.values[j][k].abs())
            .filter(|v| v.is_finite())
            .fold(T::zero(), T::max)
    }

    pub fn summary(&self) -> LatticeSummary {
        LatticeSummary {
            h: self.h.f64(),
            r_max: self.grid.r_max().f64(),
            horizon: self.horizon().f64(),
            n_r: self.n_r(),
            n_t: self.n_t(),
            sup_resolved: self.sup_resolved().f64(),
            infinite_nodes: self.infinite_count(),
        }
    }

    /// Long-format CSV `t,r,value,resolved`, every `stride`-th node in each
    /// direction. Infinite nodes print as `inf`.
    pub fn write_csv(&self, stride: usize, out: impl Write) -> Result<()> {
        let stride = stride.max(1);
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "r", "value", "resolved"])?;
        for j in (0..self.n_t()).step_by(stride) {
            for k in (0..self.n_r()).step_by(stride) {
                w.write_record([
                    self.time(j).f64().to_string(),
                    self.radius(k).f64().to_string(),
                    self.values[j][k].f64().to_string(),
                    (self.resolved(j, k) as u8).to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
