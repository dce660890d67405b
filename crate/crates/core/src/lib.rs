//! Open-system dynamics of a singlet–triplet qubit coupled to two
//! Gaussian-cutoff bosonic baths.
//!
//! The pipeline runs in three stages: bath kernels ([`spectral`]), time-local
//! rates ([`rates`]) and the reduced density matrix ([`dynamics`]). On top sit
//! the coherence-backflow measure and parameter sweeps ([`nonmarkov`]).

pub mod config;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod nonmarkov;
pub mod oracle;
pub mod output;
pub mod pipeline;
pub mod presets;
pub mod quadrature;
pub mod rates;
pub mod spectral;

pub use dynamics::{evolve_closed_form, evolve_ode, QubitState, Trajectory};
pub use error::{Error, Result};
pub use grid::UniformGrid;
pub use nonmarkov::{nm_measure, sweep, GridMeta, SweepResult};
pub use pipeline::{simulate, Simulation};
pub use rates::{compute_rates, RateTable};
pub use spectral::{compute_kernels, renormalized_hopping, spectral_density, BathSpec, KernelTable, ModelParams};
