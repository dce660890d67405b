//! Spectral densities, bath kernels and the polaron-renormalized hopping.
//!
//! Each bath has a power-law spectral density with a Gaussian UV cutoff,
//! `J(ω) = c·ω^s·exp(−ω²/Ω²)`. The kernels entering every rate are
//!
//! ```text
//! φ_c(u) = Σ_b ∫ dω J_b(ω) cos(ωu) / ω²
//! φ_s(u) = Σ_b ∫ dω J_b(ω) sin(ωu) / ω²
//! ```
//!
//! integrated from each bath's infrared cutoff to a UV bound where the
//! Gaussian tail is negligible.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::quadrature::{refine_partition, AdaptiveOpts, GaussLegendre};

/// Relative accuracy targeted for the kernels, measured against the
/// non-oscillatory mass `∫ J(ω)/ω² dω` of each bath.
pub const KERNEL_REL_TOL: f64 = 1e-11;

/// Default infrared cutoff, in units of Ω.
pub const DEFAULT_IR_CUTOFF: f64 = 1e-3;

/// Infrared cutoff applied to a bath of the given exponent: `omega_min` for
/// exponents ≤ 1, where the kernel integrals need it, and 0 otherwise.
pub fn ir_cutoff_for(exponent: f64, omega_min: f64) -> f64 {
    if exponent <= 1.0 {
        omega_min
    } else {
        0.0
    }
}

const RULE_ORDER: usize = 16;
const PROBE_LAGS: usize = 33;
const MAX_PANELS: usize = 20_000;
// Lower edge of the graded mesh when a bath has no infrared cutoff; the
// stretch [0, δ] is added in closed form.
const HEAD_FRACTION: f64 = 1e-7;
const TAIL_FLOOR: f64 = 1e-16;
const REANCHOR_EVERY: usize = 64;

/// Spectral law of one bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    /// Dimensionless coupling strength (α or β).
    pub coupling: f64,
    /// Spectral exponent s; sub-Ohmic below 1, super-Ohmic above.
    pub exponent: f64,
    /// Gaussian UV cutoff Ω.
    pub uv_cutoff: f64,
    /// Lower integration bound ω_min.
    pub ir_cutoff: f64,
}

impl BathSpec {
    pub fn new(coupling: f64, exponent: f64, uv_cutoff: f64, ir_cutoff: f64) -> Result<Self> {
        let bath = Self {
            coupling,
            exponent,
            uv_cutoff,
            ir_cutoff,
        };
        bath.validate()?;
        Ok(bath)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.coupling.is_finite() && self.coupling >= 0.0) {
            return Err(Error::Config(format!(
                "bath coupling must be finite and >= 0, got {}",
                self.coupling
            )));
        }
        if !(self.exponent.is_finite() && self.exponent > 0.0) {
            return Err(Error::Config(format!(
                "spectral exponent must be > 0, got {}",
                self.exponent
            )));
        }
        if !(self.uv_cutoff.is_finite() && self.uv_cutoff > 0.0) {
            return Err(Error::Config(format!("uv cutoff must be > 0, got {}", self.uv_cutoff)));
        }
        if !(self.ir_cutoff.is_finite() && self.ir_cutoff >= 0.0 && self.ir_cutoff < self.uv_cutoff) {
            return Err(Error::Config(format!(
                "infrared cutoff must satisfy 0 <= omega_min < uv cutoff, got {}",
                self.ir_cutoff
            )));
        }
        if self.exponent <= 1.0 && self.ir_cutoff == 0.0 {
            return Err(Error::Config(format!(
                "exponent s = {} <= 1 requires an infrared cutoff omega_min > 0: \
                 the kernel integral of omega^(s-2) diverges at omega -> 0",
                self.exponent
            )));
        }
        Ok(())
    }

    /// Copy with a different coupling.
    pub fn with_coupling(&self, coupling: f64) -> Self {
        Self { coupling, ..*self }
    }

    /// `ω^(s−2)·exp(−ω²/Ω²)`, the kernel weight for unit coupling.
    fn unit_weight(&self, omega: f64) -> f64 {
        let x = omega / self.uv_cutoff;
        omega.powf(self.exponent - 2.0) * (-x * x).exp()
    }

    fn lower_limit(&self) -> f64 {
        if self.ir_cutoff > 0.0 {
            self.ir_cutoff
        } else {
            HEAD_FRACTION * self.uv_cutoff
        }
    }

    /// Smallest UV bound (≥ 6Ω) beyond which the unit-coupling weight tail
    /// is negligible.
    fn upper_limit(&self) -> f64 {
        let omega_c = self.uv_cutoff;
        let mut w = 6.0 * omega_c;
        loop {
            // ∫_W^∞ ω^(s-2) e^{-ω²/Ω²} dω ≲ W^(s-3) Ω²/2 · e^{-W²/Ω²} for W ≫ Ω
            let x = w / omega_c;
            let tail = w.powf(self.exponent - 3.0) * 0.5 * omega_c * omega_c * (-x * x).exp();
            let scale = omega_c.powf(self.exponent - 1.0);
            if tail <= TAIL_FLOOR * scale || w > 60.0 * omega_c {
                return w;
            }
            w += 0.25 * omega_c;
        }
    }
}

/// `J(ω) = coupling · ω^s · exp(−ω²/Ω²)`.
pub fn spectral_density(bath: &BathSpec, omega: f64) -> f64 {
    debug_assert!(omega >= 0.0);
    if bath.coupling == 0.0 || omega == 0.0 {
        return 0.0;
    }
    let x = omega / bath.uv_cutoff;
    bath.coupling * omega.powf(bath.exponent) * (-x * x).exp()
}

/// Cosine and sine bath kernels sampled on a uniform lag grid.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    pub lag_grid: UniformGrid,
    pub phi_c: Vec<f64>,
    pub phi_s: Vec<f64>,
    /// Continuum baths the table was built from; `None` for mode sums.
    pub baths: Option<[BathSpec; 2]>,
}

impl KernelTable {
    /// Kernel table of two uncoupled baths: both kernels vanish.
    pub fn zeros(lag_grid: UniformGrid, baths: [BathSpec; 2]) -> Self {
        Self {
            lag_grid,
            phi_c: vec![0.0; lag_grid.len()],
            phi_s: vec![0.0; lag_grid.len()],
            baths: Some(baths),
        }
    }

    /// `ln 𝒥̃ = ln 𝒥 − φ_c(0)/2`.
    pub fn log_renormalized_hopping(&self, hopping: f64) -> f64 {
        hopping.ln() - 0.5 * self.phi_c[0]
    }

    pub fn renormalized_hopping(&self, hopping: f64) -> f64 {
        hopping * (-0.5 * self.phi_c[0]).exp()
    }
}

/// Computes φ_c and φ_s for the two baths on every lag of `lag_grid`.
///
/// The frequency mesh is graded geometrically up from the lowest infrared
/// cutoff, then uniform with panels no wider than a quarter period of
/// `cos(ω·u_max)`, and finally refined adaptively. Refinement is driven by
/// unit-coupling integrands, so the mesh depends on exponents, cutoffs and
/// the lag grid only.
pub fn compute_kernels(bath1: &BathSpec, bath2: &BathSpec, lag_grid: UniformGrid) -> Result<KernelTable> {
    check_pair(bath1, bath2)?;
    if lag_grid.is_empty() {
        return Err(Error::Grid("lag grid is empty".into()));
    }
    let baths = [*bath1, *bath2];
    let nodes = frequency_mesh(&baths, &lag_grid)?;

    let amplitudes: Vec<f64> = nodes
        .iter()
        .map(|&(omega, w)| {
            let mut sum = 0.0;
            for b in &baths {
                if omega >= b.lower_limit() {
                    sum += b.coupling * b.unit_weight(omega);
                }
            }
            w * sum
        })
        .collect();
    let freqs: Vec<f64> = nodes.iter().map(|&(omega, _)| omega).collect();

    let (mut phi_c, mut phi_s) = oscillatory_sums(&freqs, &amplitudes, &lag_grid);

    // Closed-form [0, δ] heads of baths without an infrared cutoff. Summed
    // before use so that exchanging the baths is exact.
    let (mut head_c, mut head_s) = (0.0, 0.0);
    for b in &baths {
        if b.ir_cutoff == 0.0 && b.coupling != 0.0 {
            let delta = b.lower_limit();
            let s = b.exponent;
            head_c += b.coupling * delta.powf(s - 1.0) / (s - 1.0);
            head_s += b.coupling * delta.powf(s) / s;
        }
    }
    if head_c != 0.0 {
        for (j, (c, sn)) in phi_c.iter_mut().zip(phi_s.iter_mut()).enumerate() {
            *c += head_c;
            *sn += head_s * lag_grid.at(j);
        }
    }

    Ok(KernelTable {
        lag_grid,
        phi_c,
        phi_s,
        baths: Some(baths),
    })
}

/// `𝒥̃ = 𝒥·exp(−φ_c(0)/2)`.
pub fn renormalized_hopping(hopping: f64, bath1: &BathSpec, bath2: &BathSpec) -> Result<f64> {
    Ok(log_renormalized_hopping(hopping, bath1, bath2)?.exp())
}

/// `ln 𝒥̃`, finite even where `𝒥̃` itself would underflow.
pub fn log_renormalized_hopping(hopping: f64, bath1: &BathSpec, bath2: &BathSpec) -> Result<f64> {
    if !(hopping.is_finite() && hopping > 0.0) {
        return Err(Error::Config(format!("bare hopping must be > 0, got {hopping}")));
    }
    let table = compute_kernels(bath1, bath2, UniformGrid::new(1.0, 1)?)?;
    Ok(table.log_renormalized_hopping(hopping))
}

fn check_pair(bath1: &BathSpec, bath2: &BathSpec) -> Result<()> {
    bath1.validate()?;
    bath2.validate()?;
    let (o1, o2) = (bath1.uv_cutoff, bath2.uv_cutoff);
    if (o1 - o2).abs() > 1e-12 * o1.max(o2) {
        return Err(Error::Config(format!(
            "both baths must share one uv cutoff, got {o1} and {o2}"
        )));
    }
    Ok(())
}

/// Quadrature nodes `(ω_i, w_i)` over the union of both baths' ranges.
fn frequency_mesh(baths: &[BathSpec; 2], lag_grid: &UniformGrid) -> Result<Vec<(f64, f64)>> {
    let omega_c = baths[0].uv_cutoff;
    let u_max = lag_grid.last();
    let lo = baths[0].lower_limit().min(baths[1].lower_limit());
    let hi = baths[0].upper_limit().max(baths[1].upper_limit());

    let quarter = if u_max > 0.0 {
        (0.5 * std::f64::consts::PI / u_max).min(0.5 * omega_c)
    } else {
        0.5 * omega_c
    };

    let mut breaks = vec![lo];
    let mut x = lo;
    while 2.0 * x < quarter {
        x *= 2.0;
        breaks.push(x);
    }
    let start = quarter.max(lo);
    if start > lo {
        breaks.push(start);
    }
    let n_uniform = ((hi - start) / quarter).ceil().max(1.0) as usize;
    let width = (hi - start) / n_uniform as f64;
    for k in 1..=n_uniform {
        breaks.push(start + width * k as f64);
    }
    for b in baths {
        let l = b.lower_limit();
        if l > lo && !breaks.contains(&l) {
            breaks.push(l);
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let rule = GaussLegendre::new(RULE_ORDER);
    let n_probe = PROBE_LAGS.min(lag_grid.len());
    let probes: Vec<f64> = (0..n_probe)
        .map(|k| {
            if n_probe == 1 {
                0.0
            } else {
                lag_grid.at(k * (lag_grid.len() - 1) / (n_probe - 1))
            }
        })
        .collect();

    let unit = |omega: f64, b: &BathSpec| {
        if omega >= b.lower_limit() {
            b.unit_weight(omega)
        } else {
            0.0
        }
    };

    // Non-oscillatory mass of each bath sets the absolute error budget.
    let mass = |b: &BathSpec| -> f64 {
        breaks
            .windows(2)
            .map(|w| rule.integrate(w[0], w[1], |om| unit(om, b)))
            .sum()
    };
    let scale = mass(&baths[0]).min(mass(&baths[1]));

    let dim = 4 * probes.len();
    let opts = AdaptiveOpts {
        abs_tol: KERNEL_REL_TOL * scale,
        max_panels: MAX_PANELS,
        min_width: 1e-15 * hi,
    };
    let panels = refine_partition(&rule, &breaks, dim, opts, |omega, out| {
        let w0 = unit(omega, &baths[0]);
        let w1 = unit(omega, &baths[1]);
        for (k, &u) in probes.iter().enumerate() {
            let (s, c) = (omega * u).sin_cos();
            out[4 * k] = w0 * c;
            out[4 * k + 1] = w0 * s;
            out[4 * k + 2] = w1 * c;
            out[4 * k + 3] = w1 * s;
        }
    })?;

    Ok(panels
        .iter()
        .flat_map(|p| rule.mapped(p.a, p.b).collect::<Vec<_>>())
        .collect())
}

/// `Σ_i a_i cos(ω_i u_j)` and `Σ_i a_i sin(ω_i u_j)` for every lag.
///
/// Phases advance by complex rotation lag to lag and are re-anchored with
/// exact `sin_cos` every few lags to bound drift.
fn oscillatory_sums(freqs: &[f64], amps: &[f64], lag_grid: &UniformGrid) -> (Vec<f64>, Vec<f64>) {
    let n = lag_grid.len();
    let dt = lag_grid.dt();
    let mut phi_c = vec![0.0; n];
    let mut phi_s = vec![0.0; n];

    let (step_s, step_c): (Vec<f64>, Vec<f64>) = freqs.iter().map(|&w| (w * dt).sin_cos()).unzip();
    let mut zc = vec![1.0; freqs.len()];
    let mut zs = vec![0.0; freqs.len()];

    for j in 0..n {
        if j > 0 {
            if j % REANCHOR_EVERY == 0 {
                let u = lag_grid.at(j);
                for (i, &w) in freqs.iter().enumerate() {
                    let (s, c) = (w * u).sin_cos();
                    zc[i] = c;
                    zs[i] = s;
                }
            } else {
                for i in 0..freqs.len() {
                    let c = zc[i] * step_c[i] - zs[i] * step_s[i];
                    let s = zs[i] * step_c[i] + zc[i] * step_s[i];
                    zc[i] = c;
                    zs[i] = s;
                }
            }
        }
        let mut sc = 0.0;
        let mut ss = 0.0;
        for i in 0..freqs.len() {
            sc += amps[i] * zc[i];
            ss += amps[i] * zs[i];
        }
        phi_c[j] = sc;
        phi_s[j] = ss;
    }
    // sine kernel vanishes identically at zero lag
    phi_s[0] = 0.0;
    (phi_c, phi_s)
}

/// Bare hopping together with the two baths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub hopping: f64,
    pub bath1: BathSpec,
    pub bath2: BathSpec,
}

impl ModelParams {
    pub fn new(hopping: f64, bath1: BathSpec, bath2: BathSpec) -> Result<Self> {
        if !(hopping.is_finite() && hopping > 0.0) {
            return Err(Error::Config(format!("bare hopping must be > 0, got {hopping}")));
        }
        check_pair(&bath1, &bath2)?;
        Ok(Self { hopping, bath1, bath2 })
    }

    pub fn renormalized_hopping(&self) -> Result<f64> {
        renormalized_hopping(self.hopping, &self.bath1, &self.bath2)
    }

    /// Same model with the two baths exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            hopping: self.hopping,
            bath1: self.bath2,
            bath2: self.bath1,
        }
    }
}
