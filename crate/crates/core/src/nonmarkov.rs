//! Coherence-backflow non-Markovianity and (α, β) sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::QubitState;
use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::pipeline::simulate;
use crate::spectral::{ir_cutoff_for, renormalized_hopping, BathSpec, ModelParams};

/// Coherence increments smaller than this are floating-point noise.
pub const NOISE_FLOOR: f64 = 1e-12;

/// Accumulated positive increments of the l1 coherence,
/// `𝒩 = Σ_i max(C[i+1] − C[i], 0)`.
pub fn nm_measure(coherence: &[f64], times: &[f64]) -> Result<f64> {
    if coherence.len() != times.len() {
        return Err(Error::Length(format!(
            "coherence has {} samples but the time grid has {}",
            coherence.len(),
            times.len()
        )));
    }
    if coherence.len() < 2 {
        return Err(Error::Length(format!(
            "need at least two samples, got {}",
            coherence.len()
        )));
    }
    Ok(coherence
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&d| d > NOISE_FLOOR)
        .fold(0.0, |acc, d| acc + d))
}

/// Number of local coherence maxima followed by a rise, i.e. revivals.
pub fn count_revivals(coherence: &[f64]) -> usize {
    let mut revivals = 0;
    let mut falling = false;
    for w in coherence.windows(2) {
        let d = w[1] - w[0];
        if d < -NOISE_FLOOR {
            falling = true;
        } else if d > NOISE_FLOOR && falling {
            revivals += 1;
            falling = false;
        }
    }
    revivals
}

/// Parameters shared by every cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub dt: f64,
    pub ir_cutoff: f64,
    pub uv_cutoff: f64,
    pub hopping: f64,
}

impl GridMeta {
    /// Bath of the given coupling and exponent under these settings.
    pub fn bath(&self, coupling: f64, exponent: f64) -> Result<BathSpec> {
        BathSpec::new(
            coupling,
            exponent,
            self.uv_cutoff,
            ir_cutoff_for(exponent, self.ir_cutoff),
        )
    }
}

fn worker_pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

impl Default for GridMeta {
    fn default() -> Self {
        Self {
            dt: 0.01,
            ir_cutoff: crate::spectral::DEFAULT_IR_CUTOFF,
            uv_cutoff: 1.0,
            hopping: 1.0,
        }
    }
}

/// Outcome of one (α, β) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub alpha: f64,
    pub beta: f64,
    pub nm: f64,
    pub error: Option<String>,
}

impl Cell {
    pub fn is_valid(&self) -> bool {
        self.error.is_none()
    }
}

/// 𝒩 over an (α, β) grid, α-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub s: f64,
    pub s_prime: f64,
    pub alpha_grid: Vec<f64>,
    pub beta_grid: Vec<f64>,
    pub cells: Vec<Cell>,
    pub horizon: f64,
    pub grid_meta: GridMeta,
}

impl SweepResult {
    pub fn cell(&self, ia: usize, ib: usize) -> &Cell {
        &self.cells[ia * self.beta_grid.len() + ib]
    }

    /// 𝒩 per cell; NaN marks failed cells.
    pub fn nm_values(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.nm).collect()
    }

    pub fn max_nm(&self) -> f64 {
        self.cells
            .iter()
            .filter(|c| c.is_valid())
            .map(|c| c.nm)
            .fold(0.0, f64::max)
    }
}

/// Inclusive linear grid of `points` values.
pub fn linear_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 || !lo.is_finite() || !hi.is_finite() || hi < lo || (points == 1 && hi != lo) {
        return Err(Error::Config(format!(
            "invalid grid spec: {points} points on [{lo}, {hi}]"
        )));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| if i == points - 1 { hi } else { lo + step * i as f64 })
        .collect())
}

/// 𝒩 for one parameter point, from the full pipeline.
pub fn nm_for(model: &ModelParams, grid: UniformGrid, state0: &QubitState) -> Result<f64> {
    let sim = simulate(model, grid, state0)?;
    let times: Vec<f64> = grid.iter().collect();
    nm_measure(&sim.trajectory.coherence, &times)
}

/// Runs the pipeline for every (α, β) cell.
///
/// Cells run in parallel on `workers` threads (all available cores when
/// `None`); the output order is α-major regardless of completion order. A
/// failing cell is recorded with its error and NaN for 𝒩.
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    s: f64,
    s_prime: f64,
    alpha_grid: &[f64],
    beta_grid: &[f64],
    horizon: f64,
    meta: GridMeta,
    state0: &QubitState,
    workers: Option<usize>,
) -> Result<SweepResult> {
    if alpha_grid.is_empty() || beta_grid.is_empty() {
        return Err(Error::Config("sweep grids must be nonempty".into()));
    }
    let grid = UniformGrid::with_horizon(meta.dt, horizon)?;
    if !(meta.hopping.is_finite() && meta.hopping > 0.0) {
        return Err(Error::Config(format!("bare hopping must be > 0, got {}", meta.hopping)));
    }
    // Exponents and cutoffs are shared; validate once up front.
    meta.bath(0.0, s)?;
    meta.bath(0.0, s_prime)?;
    state0.validate()?;

    let coords: Vec<(f64, f64)> = alpha_grid
        .iter()
        .flat_map(|&a| beta_grid.iter().map(move |&b| (a, b)))
        .collect();

    let run_cell = |&(alpha, beta): &(f64, f64)| -> Cell {
        let result = meta
            .bath(alpha, s)
            .and_then(|b1| ModelParams::new(meta.hopping, b1, meta.bath(beta, s_prime)?))
            .and_then(|model| nm_for(&model, grid, state0));
        match result {
            Ok(nm) => Cell {
                alpha,
                beta,
                nm,
                error: None,
            },
            Err(e) => {
                log::warn!("sweep cell (alpha={alpha}, beta={beta}) failed: {e}");
                Cell {
                    alpha,
                    beta,
                    nm: f64::NAN,
                    error: Some(format!("alpha={alpha}, beta={beta}: {e}")),
                }
            }
        }
    };

    let pool = worker_pool(workers)?;
    let cells: Vec<Cell> = pool.install(|| coords.par_iter().map(run_cell).collect());

    Ok(SweepResult {
        s,
        s_prime,
        alpha_grid: alpha_grid.to_vec(),
        beta_grid: beta_grid.to_vec(),
        cells,
        horizon,
        grid_meta: meta,
    })
}

/// `𝒥̃/𝒥` for one (α, β) cell; NaN with an error when the cell fails.
#[derive(Debug, Clone, PartialEq)]
pub struct HoppingCell {
    pub alpha: f64,
    pub beta: f64,
    pub ratio: f64,
    pub error: Option<String>,
}

/// `𝒥̃/𝒥` over an (α, β) grid, α-major, evaluated on `workers` threads.
pub fn hopping_sweep(
    s: f64,
    s_prime: f64,
    alpha_grid: &[f64],
    beta_grid: &[f64],
    meta: GridMeta,
    workers: Option<usize>,
) -> Result<Vec<HoppingCell>> {
    if alpha_grid.is_empty() || beta_grid.is_empty() {
        return Err(Error::Config("sweep grids must be nonempty".into()));
    }
    meta.bath(0.0, s)?;
    meta.bath(0.0, s_prime)?;
    let coords: Vec<(f64, f64)> = alpha_grid
        .iter()
        .flat_map(|&a| beta_grid.iter().map(move |&b| (a, b)))
        .collect();
    let run_cell = |&(alpha, beta): &(f64, f64)| -> HoppingCell {
        let result = meta
            .bath(alpha, s)
            .and_then(|b1| renormalized_hopping(1.0, &b1, &meta.bath(beta, s_prime)?));
        match result {
            Ok(ratio) => HoppingCell {
                alpha,
                beta,
                ratio,
                error: None,
            },
            Err(e) => HoppingCell {
                alpha,
                beta,
                ratio: f64::NAN,
                error: Some(format!("alpha={alpha}, beta={beta}: {e}")),
            },
        }
    };
    let pool = worker_pool(workers)?;
    Ok(pool.install(|| coords.par_iter().map(run_cell).collect()))
}
