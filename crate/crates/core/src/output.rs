//! CSV and manifest writers.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::dynamics::Trajectory;
use crate::nonmarkov::{HoppingCell, SweepResult};
use crate::rates::RateTable;
use crate::spectral::KernelTable;

pub const KERNEL_HEADER: [&str; 3] = ["t", "phi_c", "phi_s"];
pub const RATE_HEADER: [&str; 10] = [
    "t",
    "gamma_plus",
    "gamma_minus",
    "zeta",
    "gamma0",
    "gamma1",
    "gamma2",
    "int_gamma0",
    "int_gamma1",
    "int_gamma2",
];
pub const TRAJECTORY_HEADER: [&str; 7] = ["t", "rho_ss", "rho_tt", "re_rho_st", "im_rho_st", "p_diff", "coherence"];
pub const SWEEP_HEADER: [&str; 7] = ["s", "s_prime", "alpha", "beta", "nm", "horizon", "valid"];
pub const HOPPING_HEADER: [&str; 5] = ["s", "s_prime", "alpha", "beta", "jtilde_ratio"];

/// Locale-free number formatting: shortest round-trip decimal, switching to
/// exponent notation outside `[1e-4, 1e15)`.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn write_rows<W: Write>(out: W, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()
}

fn numbers(values: &[f64]) -> Vec<String> {
    values.iter().map(|&v| fmt_f64(v)).collect()
}

pub fn write_kernels<W: Write>(out: W, k: &KernelTable) -> std::io::Result<()> {
    let rows = k
        .lag_grid
        .iter()
        .enumerate()
        .map(|(i, u)| numbers(&[u, k.phi_c[i], k.phi_s[i]]));
    write_rows(out, &KERNEL_HEADER, rows)
}

pub fn write_rates<W: Write>(out: W, r: &RateTable) -> std::io::Result<()> {
    let rows = r.time_grid.iter().enumerate().map(|(i, t)| {
        numbers(&[
            t,
            r.gamma_plus[i],
            r.gamma_minus[i],
            r.zeta[i],
            r.gamma0[i],
            r.gamma1[i],
            r.gamma2[i],
            r.int_gamma0[i],
            r.int_gamma1[i],
            r.int_gamma2[i],
        ])
    });
    write_rows(out, &RATE_HEADER, rows)
}

pub fn write_trajectory<W: Write>(out: W, tr: &Trajectory) -> std::io::Result<()> {
    let rows = tr.time_grid.iter().zip(&tr.states).enumerate().map(|(i, (t, s))| {
        numbers(&[
            t,
            s.rho_ss,
            s.rho_tt,
            s.rho_st.re,
            s.rho_st.im,
            tr.p_diff[i],
            tr.coherence[i],
        ])
    });
    write_rows(out, &TRAJECTORY_HEADER, rows)
}

pub fn write_sweep<W: Write>(out: W, r: &SweepResult) -> std::io::Result<()> {
    let rows = r.cells.iter().map(|c| {
        let mut row = numbers(&[r.s, r.s_prime, c.alpha, c.beta, c.nm, r.horizon]);
        row.push(c.is_valid().to_string());
        row
    });
    write_rows(out, &SWEEP_HEADER, rows)
}

pub fn write_hopping<W: Write>(out: W, s: f64, s_prime: f64, cells: &[HoppingCell]) -> std::io::Result<()> {
    let rows = cells.iter().map(|c| numbers(&[s, s_prime, c.alpha, c.beta, c.ratio]));
    write_rows(out, &HOPPING_HEADER, rows)
}

/// Everything needed to reproduce one set of output files.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub label: String,
    pub config: RunConfig,
    /// Infrared cutoff applied to each bath.
    pub ir_cutoffs: [f64; 2],
    pub files: Vec<String>,
    pub failed_cells: Vec<String>,
    pub wall_time_seconds: f64,
}

impl Manifest {
    pub fn new(command: &str, preset: Option<&str>, label: &str, config: &RunConfig, ir_cutoffs: [f64; 2]) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            preset: preset.map(str::to_string),
            label: label.to_string(),
            config: config.clone(),
            ir_cutoffs,
            files: Vec::new(),
            failed_cells: Vec::new(),
            wall_time_seconds: 0.0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

/// `dir/prefix + name`.
pub fn output_path(dir: &Path, prefix: &str, name: &str) -> PathBuf {
    dir.join(format!("{prefix}{name}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::UniformGrid;
    use crate::nonmarkov::{Cell, GridMeta};

    #[test]
    fn number_format() {
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(0.25), "0.25");
        assert_eq!(fmt_f64(20.0), "20");
        assert_eq!(fmt_f64(-1.5e-7), "-1.5e-7");
        assert_eq!(fmt_f64(3e20), "3e20");
        assert_eq!(fmt_f64(f64::NAN), "NaN");
        for v in [0.1, 1.0 / 3.0, 2.2e-16, 6.02e23, -0.000123] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn kernel_csv_layout() {
        let k = KernelTable::zeros(
            UniformGrid::new(0.5, 3).unwrap(),
            [crate::spectral::BathSpec::new(0.0, 2.0, 1.0, 0.0).unwrap(); 2],
        );
        let mut buf = Vec::new();
        write_kernels(&mut buf, &k).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "t,phi_c,phi_s\n0,0,0\n0.5,0,0\n1,0,0\n"
        );
    }

    #[test]
    fn sweep_csv_marks_invalid_cells() {
        let r = SweepResult {
            s: 0.5,
            s_prime: 1.0,
            alpha_grid: vec![0.1],
            beta_grid: vec![0.2, 0.3],
            cells: vec![
                Cell {
                    alpha: 0.1,
                    beta: 0.2,
                    nm: 0.0,
                    error: None,
                },
                Cell {
                    alpha: 0.1,
                    beta: 0.3,
                    nm: f64::NAN,
                    error: Some("x".into()),
                },
            ],
            horizon: 20.0,
            grid_meta: GridMeta::default(),
        };
        let mut buf = Vec::new();
        write_sweep(&mut buf, &r).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "s,s_prime,alpha,beta,nm,horizon,valid\n0.5,1,0.1,0.2,0,20,true\n0.5,1,0.1,0.3,NaN,20,false\n"
        );
    }
}
