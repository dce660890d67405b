//! Brute-force reference computations used to validate the pipeline.
//!
//! Nothing here shares code with the production path: bath kernels come
//! either from explicit finite mode sums or from a fresh adaptive
//! Gauss–Kronrod integral at every lag, and rates are evaluated in their
//! original `τ` form. Slow by construction.

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::spectral::{spectral_density, BathSpec, KernelTable};

/// A finite set of bath modes with couplings `|g_k|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBath {
    pub mode_freqs: Vec<f64>,
    pub mode_weights: Vec<f64>,
}

impl DiscreteBath {
    pub fn new(mode_freqs: Vec<f64>, mode_weights: Vec<f64>) -> Result<Self> {
        if mode_freqs.is_empty() || mode_freqs.len() != mode_weights.len() {
            return Err(Error::Length(format!(
                "need matching nonempty mode lists, got {} frequencies and {} weights",
                mode_freqs.len(),
                mode_weights.len()
            )));
        }
        if mode_freqs.iter().any(|&w| !(w > 0.0)) || mode_weights.iter().any(|&g| !(g >= 0.0)) {
            return Err(Error::Config("mode frequencies must be > 0 and weights >= 0".into()));
        }
        Ok(Self {
            mode_freqs,
            mode_weights,
        })
    }

    /// `modes` equally spaced modes on `[ω_min, omega_max]`, one per bin at
    /// the bin midpoint, each with weight `J(ω_k)·Δω`.
    pub fn uniform(bath: &BathSpec, modes: usize, omega_max: f64) -> Result<Self> {
        bath.validate()?;
        let lo = bath.ir_cutoff;
        if modes == 0 || !(omega_max > lo) {
            return Err(Error::Config(format!(
                "need modes > 0 and omega_max > omega_min, got {modes} on [{lo}, {omega_max}]"
            )));
        }
        let dw = (omega_max - lo) / modes as f64;
        let freqs: Vec<f64> = (0..modes).map(|k| lo + (k as f64 + 0.5) * dw).collect();
        let weights = freqs.iter().map(|&w| spectral_density(bath, w) * dw).collect();
        Self::new(freqs, weights)
    }

    pub fn total_weight(&self) -> f64 {
        self.mode_weights.iter().sum()
    }
}

/// Exact mode sums `φ_c(u) = Σ_k g_k²/ω_k² cos(ω_k u)` (and sine) over both baths.
pub fn discrete_kernels(db1: &DiscreteBath, db2: &DiscreteBath, lag_grid: UniformGrid) -> KernelTable {
    let mut phi_c = Vec::with_capacity(lag_grid.len());
    let mut phi_s = Vec::with_capacity(lag_grid.len());
    for u in lag_grid.iter() {
        let mut c = 0.0;
        let mut s = 0.0;
        for db in [db1, db2] {
            for (&w, &g) in db.mode_freqs.iter().zip(&db.mode_weights) {
                let a = g / (w * w);
                c += a * (w * u).cos();
                s += a * (w * u).sin();
            }
        }
        phi_c.push(c);
        phi_s.push(s);
    }
    KernelTable {
        lag_grid,
        phi_c,
        phi_s,
        baths: None,
    }
}

// Gauss–Kronrod 7/15 abscissae and weights (QUADPACK).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<const N: usize, F: FnMut(f64) -> [f64; N]>(f: &mut F, a: f64, b: f64) -> ([f64; N], f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = [0.0; N];
    let mut gauss = [0.0; N];
    for k in 0..N {
        kron[k] = WGK[7] * fc[k];
        gauss[k] = WG[3] * fc[k];
    }
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        for k in 0..N {
            let pair = f1[k] + f2[k];
            kron[k] += WGK[j] * pair;
            if j % 2 == 1 {
                gauss[k] += WG[j / 2] * pair;
            }
        }
    }
    let mut err: f64 = 0.0;
    for k in 0..N {
        kron[k] *= h;
        gauss[k] *= h;
        err = err.max((kron[k] - gauss[k]).abs());
    }
    (kron, err)
}

/// Globally adaptive Gauss–Kronrod integration of a vector integrand.
///
/// Stops when the summed error estimate is below
/// `max(abs_tol, rel_tol·max_k |I_k|)`.
pub fn integrate_gk<const N: usize, F: FnMut(f64) -> [f64; N]>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<[f64; N]> {
    const MAX_INTERVALS: usize = 4000;
    if a == b {
        return Ok([0.0; N]);
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    loop {
        let mut total = [0.0; N];
        let mut err = 0.0;
        for (_, _, v, e) in &intervals {
            for k in 0..N {
                total[k] += v[k];
            }
            err += e;
        }
        let scale = total.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if err <= abs_tol.max(rel_tol * scale) {
            return Ok(total);
        }
        if intervals.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature(format!(
                "Gauss-Kronrod error {err:.3e} after {MAX_INTERVALS} intervals on [{a}, {b}]"
            )));
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("at least one interval");
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::Quadrature(format!(
                "interval [{lo}, {hi}] cannot be split further"
            )));
        }
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}

/// Upper frequency bound of the oracle integrals, in units of Ω.
const ORACLE_UV_FACTOR: f64 = 8.0;

/// `(φ_c(u), φ_s(u))` for one bath by adaptive quadrature of
/// `J(ω)cos(ωu)/ω²` and `J(ω)sin(ωu)/ω²` over `[ω_min, 8Ω]`.
pub fn kernel_at(bath: &BathSpec, u: f64) -> Result<(f64, f64)> {
    if bath.coupling == 0.0 {
        return Ok((0.0, 0.0));
    }
    let hi = ORACLE_UV_FACTOR * bath.uv_cutoff;
    let weight = |w: f64| {
        if w == 0.0 {
            0.0
        } else {
            spectral_density(bath, w) / (w * w)
        }
    };
    let [mass] = integrate_gk(|w| [weight(w)], bath.ir_cutoff, hi, 0.0, 1e-13)?;
    let [c, s] = integrate_gk(
        |w| {
            let g = weight(w);
            let (sn, cs) = (w * u).sin_cos();
            [g * cs, g * sn]
        },
        bath.ir_cutoff,
        hi,
        1e-13 * mass,
        0.0,
    )?;
    Ok((c, s))
}

/// `(Γ₊(t), Γ₋(t), ζ(t))` from the `τ` form of the rate integrals, with a
/// fresh kernel quadrature at every `τ` node.
pub fn brute_force_rates(bath1: &BathSpec, bath2: &BathSpec, jtilde: f64, t: f64) -> Result<(f64, f64, f64)> {
    if !(t >= 0.0) {
        return Err(Error::Config(format!("time must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok((0.0, 0.0, 0.0));
    }
    let j2 = jtilde * jtilde;
    let mut failure = None;
    let integrand = |tau: f64| -> [f64; 3] {
        let u = t - tau;
        let k = kernel_at(bath1, u).and_then(|a| Ok((a, kernel_at(bath2, u)?)));
        match k {
            Ok(((c1, s1), (c2, s2))) => {
                let (c, s) = (c1 + c2, s1 + s2);
                [
                    2.0 * j2 * (c.exp() * s.cos() - 1.0),
                    2.0 * j2 * ((-c).exp() * s.cos() - 1.0),
                    j2 * c.exp() * s.sin(),
                ]
            }
            Err(e) => {
                failure.get_or_insert(e);
                [f64::NAN; 3]
            }
        }
    };
    let [gp, gm, z] = integrate_gk(integrand, 0.0, t, 1e-14, 1e-11)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((gp, gm, z))
}
