use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid `t_i = i·dt`, `i = 0..len`, shared by lags and times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    dt: f64,
    len: usize,
}

impl UniformGrid {
    pub fn new(dt: f64, len: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Grid(format!("grid spacing must be > 0, got {dt}")));
        }
        if len == 0 {
            return Err(Error::Grid("grid needs at least one point".into()));
        }
        Ok(Self { dt, len })
    }

    /// Grid `0, dt, …, t_max`; `t_max` must be a whole multiple of `dt`.
    pub fn with_horizon(dt: f64, t_max: f64) -> Result<Self> {
        if !(t_max.is_finite() && t_max >= 0.0) {
            return Err(Error::Grid(format!("horizon must be >= 0, got {t_max}")));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Grid(format!("grid spacing must be > 0, got {dt}")));
        }
        let steps = t_max / dt;
        let rounded = steps.round();
        if (steps - rounded).abs() > 1e-9 * rounded.max(1.0) {
            return Err(Error::Grid(format!("horizon {t_max} is not a multiple of dt = {dt}")));
        }
        Self::new(dt, rounded as usize + 1)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn at(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn last(&self) -> f64 {
        self.at(self.len - 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.at(i))
    }

    /// Index of `t` if it lies on the grid (within a relative 1e-9 of a step).
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let x = t / self.dt;
        let i = x.round();
        if i < 0.0 || (x - i).abs() > 1e-9 * i.max(1.0) || i as usize >= self.len {
            return None;
        }
        Some(i as usize)
    }

    /// Same horizon at half the spacing.
    pub fn refined(&self) -> Self {
        Self {
            dt: 0.5 * self.dt,
            len: 2 * (self.len - 1) + 1,
        }
    }
}
