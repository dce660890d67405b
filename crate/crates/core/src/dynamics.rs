//! Singlet–triplet density-matrix evolution.
//!
//! In the `{|S⟩, |T⟩}` basis the master equation reduces to
//!
//! ```text
//! dρ_SS/dt = −Γ₀(ρ_SS − ρ_TT)
//! dρ_TT/dt = −Γ₀(ρ_TT − ρ_SS)
//! dρ_TS/dt = −(Γ₋ + 6Γ₊)/2 · ρ_TS − (Γ₋ − 2Γ₊)/2 · ρ_ST
//! ```
//!
//! The Lamb-shift term drops out: in the one-fermion sector
//! `(n₁ − n₂)² = 1` and its commutator with ρ vanishes, so ζ is never read.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::rates::RateTable;

/// Tolerated deviation of `ρ_SS + ρ_TT` from one.
pub const TRACE_TOL: f64 = 1e-12;
/// Determinant floor below which a state is reported as non-positive.
pub const POSITIVITY_TOL: f64 = 1e-9;

/// Density matrix of the single fermion in the singlet–triplet basis.
///
/// `⟨T|ρ|S⟩` is not stored; it is `conj(rho_st)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub rho_ss: f64,
    pub rho_tt: f64,
    /// `⟨S|ρ|T⟩`.
    pub rho_st: Complex64,
}

impl QubitState {
    pub fn new(rho_ss: f64, rho_tt: f64, rho_st: Complex64) -> Result<Self> {
        let state = Self { rho_ss, rho_tt, rho_st };
        state.validate()?;
        Ok(state)
    }

    /// Pure state `a_S|S⟩ + a_T|T⟩`; amplitudes are normalized.
    pub fn pure(a_s: Complex64, a_t: Complex64) -> Result<Self> {
        let norm = (a_s.norm_sqr() + a_t.norm_sqr()).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Config("state amplitudes must not both vanish".into()));
        }
        let (a_s, a_t) = (a_s / norm, a_t / norm);
        Ok(Self {
            rho_ss: a_s.norm_sqr(),
            rho_tt: a_t.norm_sqr(),
            rho_st: a_s * a_t.conj(),
        })
    }

    /// `√(2/3)|S⟩ + √(1/3)|T⟩`.
    pub fn default_superposition() -> Self {
        Self {
            rho_ss: 2.0 / 3.0,
            rho_tt: 1.0 / 3.0,
            rho_st: Complex64::new(2f64.sqrt() / 3.0, 0.0),
        }
    }

    pub fn singlet() -> Self {
        Self {
            rho_ss: 1.0,
            rho_tt: 0.0,
            rho_st: Complex64::new(0.0, 0.0),
        }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            rho_ss: 0.5,
            rho_tt: 0.5,
            rho_st: Complex64::new(0.0, 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.rho_ss.is_finite() && self.rho_tt.is_finite() && self.rho_st.is_finite();
        if !finite {
            return Err(Error::Config("density matrix entries must be finite".into()));
        }
        if !(0.0..=1.0).contains(&self.rho_ss) || !(0.0..=1.0).contains(&self.rho_tt) {
            return Err(Error::Config(format!(
                "populations must lie in [0, 1], got {} and {}",
                self.rho_ss, self.rho_tt
            )));
        }
        if (self.trace() - 1.0).abs() > TRACE_TOL {
            return Err(Error::Config(format!("trace must be 1, got {}", self.trace())));
        }
        if self.determinant() < -POSITIVITY_TOL {
            return Err(Error::Config(format!(
                "state is not positive semidefinite: rho_ss*rho_tt - |rho_st|^2 = {:e}",
                self.determinant()
            )));
        }
        Ok(())
    }

    pub fn trace(&self) -> f64 {
        self.rho_ss + self.rho_tt
    }

    /// `ρ_SS·ρ_TT − |ρ_ST|²`; negative values signal lost positivity.
    pub fn determinant(&self) -> f64 {
        self.rho_ss * self.rho_tt - self.rho_st.norm_sqr()
    }

    /// `P_D = ρ_SS − ρ_TT`.
    pub fn population_difference(&self) -> f64 {
        self.rho_ss - self.rho_tt
    }

    /// l1-norm coherence `|ρ_ST| + |ρ_TS| = 2|ρ_ST|`.
    pub fn coherence(&self) -> f64 {
        2.0 * self.rho_st.norm()
    }

    /// Full 2×2 matrix `[[ρ_SS, ρ_ST], [ρ_TS, ρ_TT]]`.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [
            [Complex64::new(self.rho_ss, 0.0), self.rho_st],
            [self.rho_st.conj(), Complex64::new(self.rho_tt, 0.0)],
        ]
    }
}

/// A time at which the state left the positive cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityViolation {
    pub time: f64,
    /// Most negative determinant at that time.
    pub determinant: f64,
}

/// Sampled evolution with derived observables.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub time_grid: UniformGrid,
    pub states: Vec<QubitState>,
    pub p_diff: Vec<f64>,
    pub coherence: Vec<f64>,
    pub positivity_violations: Vec<PositivityViolation>,
}

impl Trajectory {
    fn from_states(time_grid: UniformGrid, states: Vec<QubitState>) -> Self {
        let (p_diff, coherence) = observables_of(&states);
        let positivity_violations: Vec<PositivityViolation> = states
            .iter()
            .enumerate()
            .filter(|(_, s)| s.determinant() < -POSITIVITY_TOL)
            .map(|(i, s)| PositivityViolation {
                time: time_grid.at(i),
                determinant: s.determinant(),
            })
            .collect();
        if let Some(first) = positivity_violations.first() {
            let worst = positivity_violations
                .iter()
                .map(|v| v.determinant)
                .fold(f64::INFINITY, f64::min);
            log::warn!(
                "positivity lost at {} grid times, first at t = {}, worst determinant {:e}",
                positivity_violations.len(),
                first.time,
                worst
            );
        }
        Self {
            time_grid,
            states,
            p_diff,
            coherence,
            positivity_violations,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &QubitState {
        self.states.last().expect("trajectory is never empty")
    }
}

/// P_D and C_l1 for every sample.
pub fn observables(traj: &Trajectory) -> (Vec<f64>, Vec<f64>) {
    observables_of(&traj.states)
}

fn observables_of(states: &[QubitState]) -> (Vec<f64>, Vec<f64>) {
    states
        .iter()
        .map(|s| (s.population_difference(), s.coherence()))
        .unzip()
}

/// Closed-form solution from the cumulative rate integrals:
/// `P_D(t) = P_D(0)e^{−2∫Γ₀}`, `Re ρ_ST(t) = Re ρ_ST(0)e^{−∫Γ₁}`,
/// `Im ρ_ST(t) = Im ρ_ST(0)e^{−∫Γ₂}`.
pub fn evolve_closed_form(state0: &QubitState, rates: &RateTable) -> Trajectory {
    let p0 = state0.population_difference();
    let states = (0..rates.len())
        .map(|i| {
            let p = p0 * (-2.0 * rates.int_gamma0[i]).exp();
            QubitState {
                rho_ss: 0.5 * (1.0 + p),
                rho_tt: 0.5 * (1.0 - p),
                rho_st: Complex64::new(
                    state0.rho_st.re * (-rates.int_gamma1[i]).exp(),
                    state0.rho_st.im * (-rates.int_gamma2[i]).exp(),
                ),
            }
        })
        .collect();
    Trajectory::from_states(rates.time_grid, states)
}

/// Fixed-step RK4 integration of the singlet–triplet equations on the rate
/// grid.
///
/// The half-step stages use the mean of the two bracketing grid rates, so
/// each step integrates the rates with the trapezoid rule, matching the
/// cumulative integrals used by [`evolve_closed_form`].
pub fn evolve_ode(state0: &QubitState, rates: &RateTable) -> Trajectory {
    let dt = rates.time_grid.dt();
    let mut states = Vec::with_capacity(rates.len());
    let mut y = [state0.rho_ss, state0.rho_tt, state0.rho_st.re, state0.rho_st.im];
    states.push(*state0);
    for i in 1..rates.len() {
        let start = StepRates::at(rates, i - 1);
        let end = StepRates::at(rates, i);
        let mid = start.midpoint(&end);

        let k1 = derivative(&y, &start);
        let k2 = derivative(&axpy(&y, 0.5 * dt, &k1), &mid);
        let k3 = derivative(&axpy(&y, 0.5 * dt, &k2), &mid);
        let k4 = derivative(&axpy(&y, dt, &k3), &end);
        for (c, yc) in y.iter_mut().enumerate() {
            *yc += dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        states.push(QubitState {
            rho_ss: y[0],
            rho_tt: y[1],
            rho_st: Complex64::new(y[2], y[3]),
        });
    }
    Trajectory::from_states(rates.time_grid, states)
}

/// Evolution up to `t_max`, which must be a point of the rate grid.
pub fn evolve_ode_to(state0: &QubitState, rates: &RateTable, t_max: f64) -> Result<Trajectory> {
    Ok(evolve_ode(state0, &rates.truncated(t_max)?))
}

#[derive(Debug, Clone, Copy)]
struct StepRates {
    plus: f64,
    minus: f64,
}

impl StepRates {
    fn at(rates: &RateTable, i: usize) -> Self {
        Self {
            plus: rates.gamma_plus[i],
            minus: rates.gamma_minus[i],
        }
    }

    fn midpoint(&self, other: &Self) -> Self {
        Self {
            plus: 0.5 * (self.plus + other.plus),
            minus: 0.5 * (self.minus + other.minus),
        }
    }
}

/// Right-hand side for `y = [ρ_SS, ρ_TT, Re ρ_ST, Im ρ_ST]`.
fn derivative(y: &[f64; 4], r: &StepRates) -> [f64; 4] {
    let gamma0 = (2.0 * r.plus - r.minus) / 2.0;
    let diag = (r.minus + 6.0 * r.plus) / 2.0;
    let cross = (r.minus - 2.0 * r.plus) / 2.0;
    let d_ss = -gamma0 * (y[0] - y[1]);
    // ρ_ST = conj(ρ_TS): dρ_ST/dt = −diag·ρ_ST − cross·conj(ρ_ST)
    [d_ss, -d_ss, -diag * y[2] - cross * y[2], -diag * y[3] + cross * y[3]]
}

fn axpy(y: &[f64; 4], a: f64, k: &[f64; 4]) -> [f64; 4] {
    [y[0] + a * k[0], y[1] + a * k[1], y[2] + a * k[2], y[3] + a * k[3]]
}
