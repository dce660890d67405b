//! Time-local decay rates Γ±(t), the Lamb-shift function ζ(t) and the
//! composite rates that drive the singlet–triplet populations and coherences.
//!
//! Every rate is a convolution-free integral over the lag `u = t − τ`:
//!
//! ```text
//! Γ_σ(t) = 2𝒥̃² ∫₀^t du [e^{σφ_c(u)} cos φ_s(u) − 1]
//! ζ(t)   =  𝒥̃² ∫₀^t du  e^{φ_c(u)}  sin φ_s(u)
//! ```
//!
//! so all grid times are produced by a single cumulative pass over the
//! kernel table.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::quadrature::{cumulative_gregory, cumulative_trapezoid};
use crate::spectral::KernelTable;

/// Branch of the bath correlation function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Vacuum bath correlation at lag `u`: `exp(σ·φ_c(u) + i·φ_s(u)) − 1`.
///
/// Its real part `e^{σφ_c}cos φ_s − 1` is the Γ_σ integrand. `u` must be a
/// lag of the kernel table.
pub fn bath_correlation(kernels: &KernelTable, u: f64, sign: Sign) -> Result<Complex64> {
    let j = kernels
        .lag_grid
        .index_of(u)
        .ok_or_else(|| Error::Grid(format!("lag {u} is not on the kernel grid")))?;
    let exponent = Complex64::new(sign.factor() * kernels.phi_c[j], kernels.phi_s[j]);
    Ok(exponent.exp() - 1.0)
}

/// Rates and their running integrals on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    pub time_grid: UniformGrid,
    pub gamma_plus: Vec<f64>,
    pub gamma_minus: Vec<f64>,
    pub zeta: Vec<f64>,
    /// (2Γ₊ − Γ₋)/2, population relaxation.
    pub gamma0: Vec<f64>,
    /// 2Γ₊ + Γ₋, decay of Re ρ_ST.
    pub gamma1: Vec<f64>,
    /// 4Γ₊, decay of Im ρ_ST.
    pub gamma2: Vec<f64>,
    pub int_gamma0: Vec<f64>,
    pub int_gamma1: Vec<f64>,
    pub int_gamma2: Vec<f64>,
    pub jtilde: f64,
    pub ln_jtilde: f64,
}

impl RateTable {
    /// Builds a table from Γ₊, Γ₋ and ζ samples, filling composites and
    /// cumulative integrals.
    pub fn from_primary(
        time_grid: UniformGrid,
        gamma_plus: Vec<f64>,
        gamma_minus: Vec<f64>,
        zeta: Vec<f64>,
        ln_jtilde: f64,
    ) -> Result<Self> {
        let n = time_grid.len();
        if gamma_plus.len() != n || gamma_minus.len() != n || zeta.len() != n {
            return Err(Error::Grid(format!(
                "rate arrays must have {n} samples, got {}/{}/{}",
                gamma_plus.len(),
                gamma_minus.len(),
                zeta.len()
            )));
        }
        let gamma0: Vec<f64> = gamma_plus
            .iter()
            .zip(&gamma_minus)
            .map(|(p, m)| (2.0 * p - m) / 2.0)
            .collect();
        let gamma1: Vec<f64> = gamma_plus.iter().zip(&gamma_minus).map(|(p, m)| 2.0 * p + m).collect();
        let gamma2: Vec<f64> = gamma_plus.iter().map(|p| 4.0 * p).collect();
        let dt = time_grid.dt();
        Ok(Self {
            time_grid,
            int_gamma0: cumulative_trapezoid(&gamma0, dt),
            int_gamma1: cumulative_trapezoid(&gamma1, dt),
            int_gamma2: cumulative_trapezoid(&gamma2, dt),
            gamma_plus,
            gamma_minus,
            zeta,
            gamma0,
            gamma1,
            gamma2,
            jtilde: ln_jtilde.exp(),
            ln_jtilde,
        })
    }

    /// Time-independent rates, for synthetic checks of the evolvers.
    pub fn constant(time_grid: UniformGrid, gamma_plus: f64, gamma_minus: f64, zeta: f64) -> Self {
        let n = time_grid.len();
        Self::from_primary(time_grid, vec![gamma_plus; n], vec![gamma_minus; n], vec![zeta; n], 0.0)
            .expect("lengths match by construction")
    }

    pub fn len(&self) -> usize {
        self.time_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time_grid.is_empty()
    }

    /// Same table with ζ set to zero.
    pub fn without_lamb_shift(&self) -> Self {
        Self {
            zeta: vec![0.0; self.zeta.len()],
            ..self.clone()
        }
    }

    /// Prefix of the table covering `[0, t_max]`.
    pub fn truncated(&self, t_max: f64) -> Result<Self> {
        let last = self
            .time_grid
            .index_of(t_max)
            .ok_or_else(|| Error::Grid(format!("horizon {t_max} is not covered by the rate grid")))?;
        let n = last + 1;
        let cut = |v: &Vec<f64>| v[..n].to_vec();
        Ok(Self {
            time_grid: UniformGrid::new(self.time_grid.dt(), n)?,
            gamma_plus: cut(&self.gamma_plus),
            gamma_minus: cut(&self.gamma_minus),
            zeta: cut(&self.zeta),
            gamma0: cut(&self.gamma0),
            gamma1: cut(&self.gamma1),
            gamma2: cut(&self.gamma2),
            int_gamma0: cut(&self.int_gamma0),
            int_gamma1: cut(&self.int_gamma1),
            int_gamma2: cut(&self.int_gamma2),
            jtilde: self.jtilde,
            ln_jtilde: self.ln_jtilde,
        })
    }
}

/// Pointwise integrands of Γ₊, Γ₋ and ζ, including the 𝒥̃² prefactors.
///
/// `𝒥̃²e^{σφ_c}` is evaluated as `exp(2 ln 𝒥̃ + σφ_c)`, which stays finite
/// for sub-Ohmic baths where `φ_c(0)` runs into the hundreds.
pub fn rate_integrands(kernels: &KernelTable, ln_jtilde: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let two_ln = 2.0 * ln_jtilde;
    let floor = two_ln.exp();
    let n = kernels.phi_c.len();
    let mut plus = Vec::with_capacity(n);
    let mut minus = Vec::with_capacity(n);
    let mut zeta = Vec::with_capacity(n);
    for (&c, &s) in kernels.phi_c.iter().zip(&kernels.phi_s) {
        let (sin, cos) = s.sin_cos();
        let up = (two_ln + c).exp();
        let down = (two_ln - c).exp();
        plus.push(2.0 * (up * cos - floor));
        minus.push(2.0 * (down * cos - floor));
        zeta.push(up * sin);
    }
    (plus, minus, zeta)
}

/// Rates on the kernel's own lag grid.
pub fn compute_rates(kernels: &KernelTable, jtilde: f64) -> Result<RateTable> {
    if !(jtilde.is_finite() && jtilde > 0.0) {
        return Err(Error::Config(format!("renormalized hopping must be > 0, got {jtilde}")));
    }
    compute_rates_log(kernels, jtilde.ln())
}

/// Rates from `ln 𝒥̃`; use this when 𝒥̃ itself may underflow.
pub fn compute_rates_log(kernels: &KernelTable, ln_jtilde: f64) -> Result<RateTable> {
    compute_rates_on(kernels, ln_jtilde, kernels.lag_grid)
}

/// Rates on `time_grid`, which must share the kernel spacing and not
/// extend past the last lag.
pub fn compute_rates_on(kernels: &KernelTable, ln_jtilde: f64, time_grid: UniformGrid) -> Result<RateTable> {
    let lag = kernels.lag_grid;
    if (lag.dt() - time_grid.dt()).abs() > 1e-12 * lag.dt() {
        return Err(Error::Grid(format!(
            "time grid spacing {} differs from kernel lag spacing {}",
            time_grid.dt(),
            lag.dt()
        )));
    }
    if time_grid.len() > lag.len() {
        return Err(Error::Grid(format!(
            "time grid reaches {} but kernels stop at {}",
            time_grid.last(),
            lag.last()
        )));
    }
    let (plus, minus, zeta) = rate_integrands(kernels, ln_jtilde);
    let n = time_grid.len();
    let dt = time_grid.dt();
    let gp = cumulative_gregory(&plus[..n], dt);
    let gm = cumulative_gregory(&minus[..n], dt);
    let z = cumulative_gregory(&zeta[..n], dt);
    RateTable::from_primary(time_grid, gp, gm, z, ln_jtilde)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{compute_kernels, BathSpec};

    fn gaussian_kernels(coupling: f64, tmax: f64) -> KernelTable {
        let b = BathSpec::new(coupling, 2.0, 1.0, 0.0).unwrap();
        compute_kernels(&b, &b, UniformGrid::with_horizon(0.01, tmax).unwrap()).unwrap()
    }

    #[test]
    fn zero_coupling_correlation_vanishes() {
        let k = gaussian_kernels(0.0, 2.0);
        for u in [0.0, 0.5, 2.0] {
            assert_eq!(bath_correlation(&k, u, Sign::Plus).unwrap(), Complex64::new(0.0, 0.0));
            assert_eq!(bath_correlation(&k, u, Sign::Minus).unwrap(), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn correlation_at_zero_lag_is_real() {
        let k = gaussian_kernels(0.7, 1.0);
        let c = bath_correlation(&k, 0.0, Sign::Minus).unwrap();
        assert_eq!(c.im, 0.0);
        assert!(c.re > -1.0 && c.re <= 0.0);
        assert!((c.re - ((-k.phi_c[0]).exp() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn correlation_rejects_off_grid_lag() {
        let k = gaussian_kernels(1.0, 1.0);
        assert!(matches!(bath_correlation(&k, 0.005, Sign::Plus), Err(Error::Grid(_))));
    }

    #[test]
    fn correlation_real_part_composes_kernels() {
        // one bath, α = 1, s = 2: φ_c(2) = (√π/2)e^{-1}, φ_s(2) = Dawson(1)
        let b = BathSpec::new(1.0, 2.0, 1.0, 0.0).unwrap();
        let k = compute_kernels(&b, &b.with_coupling(0.0), UniformGrid::with_horizon(0.01, 2.0).unwrap()).unwrap();
        let c = bath_correlation(&k, 2.0, Sign::Plus).unwrap();
        let expected = 0.326_024_666_086_646_1f64.exp() * 0.538_079_506_912_768_4f64.cos() - 1.0;
        assert!((c.re - expected).abs() < 1e-9, "{} vs {expected}", c.re);
    }

    #[test]
    fn zero_coupling_rates_vanish() {
        let k = gaussian_kernels(0.0, 5.0);
        let r = compute_rates(&k, 1.0).unwrap();
        for v in [
            &r.gamma_plus,
            &r.gamma_minus,
            &r.zeta,
            &r.int_gamma0,
            &r.int_gamma1,
            &r.int_gamma2,
        ] {
            assert!(v.iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn rates_start_at_zero_and_composites_hold() {
        let k = gaussian_kernels(1.0, 5.0);
        let jt = k.renormalized_hopping(1.0);
        let r = compute_rates(&k, jt).unwrap();
        assert_eq!(r.gamma_plus[0], 0.0);
        assert_eq!(r.gamma_minus[0], 0.0);
        assert_eq!(r.zeta[0], 0.0);
        assert_eq!(r.int_gamma1[0], 0.0);
        for i in 0..r.len() {
            let (p, m) = (r.gamma_plus[i], r.gamma_minus[i]);
            assert_eq!(r.gamma0[i], (2.0 * p - m) / 2.0);
            assert_eq!(r.gamma1[i], 2.0 * p + m);
            assert_eq!(r.gamma2[i], 4.0 * p);
        }
        assert_eq!(r.int_gamma2, cumulative_trapezoid(&r.gamma2, r.time_grid.dt()));
    }

    #[test]
    fn log_form_survives_huge_kernels() {
        // φ_c(0) ≈ 608 for α = β = 5, s = 1/2: 𝒥̃² = e^{-608} is tiny but finite,
        // while e^{φ_c} alone would be ~1e264.
        let b = BathSpec::new(5.0, 0.5, 1.0, 1e-3).unwrap();
        let k = compute_kernels(&b, &b, UniformGrid::with_horizon(0.01, 2.0).unwrap()).unwrap();
        let r = compute_rates_log(&k, k.log_renormalized_hopping(1.0)).unwrap();
        assert!(r.gamma_plus.iter().all(|v| v.is_finite()));
        assert!(r.zeta.iter().all(|v| v.is_finite()));
        // the integrand starts at 2(1 − e^{-φ_c(0)}) ≈ 2
        let (plus, _, _) = rate_integrands(&k, k.log_renormalized_hopping(1.0));
        assert!((plus[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_time_grid_is_rejected() {
        let k = gaussian_kernels(1.0, 1.0);
        let coarse = UniformGrid::with_horizon(0.02, 1.0).unwrap();
        assert!(matches!(compute_rates_on(&k, 0.0, coarse), Err(Error::Grid(_))));
        let long = UniformGrid::with_horizon(0.01, 2.0).unwrap();
        assert!(matches!(compute_rates_on(&k, 0.0, long), Err(Error::Grid(_))));
    }

    #[test]
    fn truncation_keeps_prefix() {
        let k = gaussian_kernels(1.0, 2.0);
        let r = compute_rates(&k, k.renormalized_hopping(1.0)).unwrap();
        let t = r.truncated(1.0).unwrap();
        assert_eq!(t.len(), 101);
        assert_eq!(t.gamma_plus[..], r.gamma_plus[..101]);
        assert!(r.truncated(3.0).is_err());
    }
}
