//! Run configuration: TOML schema, defaults and validation.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::QubitState;
use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::nonmarkov::{linear_grid, GridMeta};
use crate::spectral::{ir_cutoff_for, BathSpec, ModelParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub hopping: f64,
    pub uv_cutoff: f64,
    /// ω_min for baths with exponent ≤ 1, required when there is one.
    /// Baths with exponent > 1 always integrate from 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ir_cutoff: Option<f64>,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            hopping: 1.0,
            uv_cutoff: 1.0,
            ir_cutoff: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BathSection {
    pub coupling: f64,
    pub exponent: f64,
}

impl Default for BathSection {
    fn default() -> Self {
        Self {
            coupling: 0.0,
            exponent: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub dt: f64,
    pub t_max: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { dt: 0.01, t_max: 20.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StateSection {
    pub rho_ss: f64,
    pub rho_tt: f64,
    pub re_rho_st: f64,
    pub im_rho_st: f64,
}

impl Default for StateSection {
    fn default() -> Self {
        let s = QubitState::default_superposition();
        Self {
            rho_ss: s.rho_ss,
            rho_tt: s.rho_tt,
            re_rho_st: s.rho_st.re,
            im_rho_st: s.rho_st.im,
        }
    }
}

/// What a sweep evaluates per (α, β) cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SweepMeasure {
    /// Coherence-backflow measure from the full pipeline.
    #[default]
    Nm,
    /// `𝒥̃/𝒥` only.
    Hopping,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_points: usize,
    pub beta_min: f64,
    pub beta_max: f64,
    pub beta_points: usize,
    /// Defaults to `grid.t_max`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    pub measure: SweepMeasure,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            alpha_min: 0.1,
            alpha_max: 5.0,
            alpha_points: 32,
            beta_min: 0.1,
            beta_max: 5.0,
            beta_points: 32,
            horizon: None,
            measure: SweepMeasure::Nm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub prefix: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            prefix: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelSection,
    pub bath1: BathSection,
    pub bath2: BathSection,
    pub grid: GridSection,
    pub initial_state: StateSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    pub output: OutputSection,
}

/// A fully checked configuration, ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedRun {
    pub model: ModelParams,
    pub grid: UniformGrid,
    pub state0: QubitState,
    pub sweep: Option<ValidatedSweep>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedSweep {
    pub s: f64,
    pub s_prime: f64,
    pub alpha_grid: Vec<f64>,
    pub beta_grid: Vec<f64>,
    pub horizon: f64,
    pub meta: GridMeta,
    pub measure: SweepMeasure,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("cannot parse config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// ω_min in effect: the configured value, or 0 when no exponent
    /// needs one.
    pub fn resolved_ir_cutoff(&self) -> Result<f64> {
        match self.model.ir_cutoff {
            Some(w) if !(w >= 0.0 && w < self.model.uv_cutoff) => Err(Error::Config(format!(
                "model.ir_cutoff must lie in [0, uv_cutoff), got {w}"
            ))),
            Some(w) => Ok(w),
            None => {
                let s_min = self.bath1.exponent.min(self.bath2.exponent);
                if s_min <= 1.0 {
                    Err(Error::Config(format!(
                        "model.ir_cutoff is required for exponent {s_min} <= 1: the infrared \
                         kernel integral of omega^(s-2) diverges at omega -> 0"
                    )))
                } else {
                    Ok(0.0)
                }
            }
        }
    }

    /// Checks every constraint and builds the run parameters.
    pub fn validate(&self) -> Result<ValidatedRun> {
        let ir = self.resolved_ir_cutoff()?;
        let bath = |b: &BathSection| {
            BathSpec::new(
                b.coupling,
                b.exponent,
                self.model.uv_cutoff,
                ir_cutoff_for(b.exponent, ir),
            )
        };
        let (b1, b2) = (bath(&self.bath1)?, bath(&self.bath2)?);
        let model = ModelParams::new(self.model.hopping, b1, b2)?;
        let grid = UniformGrid::with_horizon(self.grid.dt, self.grid.t_max)?;
        let st = &self.initial_state;
        let state0 = QubitState::new(st.rho_ss, st.rho_tt, Complex64::new(st.re_rho_st, st.im_rho_st))?;
        let sweep = match &self.sweep {
            None => None,
            Some(sw) => {
                let horizon = sw.horizon.unwrap_or(self.grid.t_max);
                UniformGrid::with_horizon(self.grid.dt, horizon)?;
                Some(ValidatedSweep {
                    s: self.bath1.exponent,
                    s_prime: self.bath2.exponent,
                    alpha_grid: linear_grid(sw.alpha_min, sw.alpha_max, sw.alpha_points)?,
                    beta_grid: linear_grid(sw.beta_min, sw.beta_max, sw.beta_points)?,
                    horizon,
                    meta: GridMeta {
                        dt: self.grid.dt,
                        ir_cutoff: ir,
                        uv_cutoff: self.model.uv_cutoff,
                        hopping: self.model.hopping,
                    },
                    measure: sw.measure,
                })
            }
        };
        Ok(ValidatedRun {
            model,
            grid,
            state0,
            sweep,
        })
    }
}
