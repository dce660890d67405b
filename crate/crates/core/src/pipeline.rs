//! Kernels → rates → evolution for one parameter point.

use crate::dynamics::{evolve_ode, QubitState, Trajectory};
use crate::error::Result;
use crate::grid::UniformGrid;
use crate::rates::{compute_rates_log, RateTable};
use crate::spectral::{compute_kernels, KernelTable, ModelParams};

/// Everything produced by one run.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub kernels: KernelTable,
    pub rates: RateTable,
    pub trajectory: Trajectory,
}

impl Simulation {
    /// `𝒥̃/𝒥`.
    pub fn hopping_ratio(&self, model: &ModelParams) -> f64 {
        self.rates.jtilde / model.hopping
    }
}

/// Kernels and rates on `grid` for `model`.
pub fn rates_for(model: &ModelParams, grid: UniformGrid) -> Result<(KernelTable, RateTable)> {
    let kernels = compute_kernels(&model.bath1, &model.bath2, grid)?;
    let rates = compute_rates_log(&kernels, kernels.log_renormalized_hopping(model.hopping))?;
    Ok((kernels, rates))
}

/// Full pipeline with the canonical RK4 evolver.
pub fn simulate(model: &ModelParams, grid: UniformGrid, state0: &QubitState) -> Result<Simulation> {
    let (kernels, rates) = rates_for(model, grid)?;
    let trajectory = evolve_ode(state0, &rates);
    Ok(Simulation {
        kernels,
        rates,
        trajectory,
    })
}
