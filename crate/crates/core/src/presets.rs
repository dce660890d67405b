//! Built-in configurations for the figure families.
//!
//! Trajectory figures come in three couplings (α = β = 5, 1, 0.1); `fig9`
//! mixes strong and weak baths. `fig5a`…`fig5f` are the six 𝒩 heatmaps and
//! `fig1` scans `𝒥̃/𝒥`. `fig5` expands to all six heatmaps.

use crate::config::{BathSection, ModelSection, RunConfig, SweepMeasure, SweepSection};
use crate::error::{Error, Result};
use crate::spectral::DEFAULT_IR_CUTOFF;

/// One named run of a preset.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetRun {
    pub label: String,
    pub config: RunConfig,
}

const TRAJECTORY_FIGURES: [(&str, f64, f64); 6] = [
    ("fig2", 2.0, 2.0),
    ("fig3", 1.0, 2.0),
    ("fig4", 0.5, 0.5),
    ("fig6", 0.5, 2.0),
    ("fig7", 1.0, 1.0),
    ("fig8", 0.5, 1.0),
];

const COUPLINGS: [(&str, f64); 3] = [("strong", 5.0), ("intermediate", 1.0), ("weak", 0.1)];

const FIG9_COUPLINGS: [(&str, f64, f64); 4] = [
    ("a0.1_b5", 0.1, 5.0),
    ("a5_b0.1", 5.0, 0.1),
    ("a1_b5", 1.0, 5.0),
    ("a5_b1", 5.0, 1.0),
];

const SWEEP_PANELS: [(&str, f64, f64); 6] = [
    ("fig5a", 0.5, 0.5),
    ("fig5b", 0.5, 1.0),
    ("fig5c", 0.5, 2.0),
    ("fig5d", 1.0, 1.0),
    ("fig5e", 1.0, 2.0),
    ("fig5f", 2.0, 2.0),
];

/// Every name accepted by [`preset`].
pub fn preset_names() -> Vec<&'static str> {
    let mut names = vec!["fig1"];
    names.extend(TRAJECTORY_FIGURES.iter().map(|f| f.0));
    names.push("fig9");
    names.push("fig5");
    names.extend(SWEEP_PANELS.iter().map(|p| p.0));
    names
}

fn base(s: f64, s_prime: f64, alpha: f64, beta: f64, prefix: String) -> RunConfig {
    RunConfig {
        model: ModelSection {
            ir_cutoff: Some(DEFAULT_IR_CUTOFF),
            ..ModelSection::default()
        },
        bath1: BathSection {
            coupling: alpha,
            exponent: s,
        },
        bath2: BathSection {
            coupling: beta,
            exponent: s_prime,
        },
        output: crate::config::OutputSection {
            prefix,
            ..Default::default()
        },
        ..RunConfig::default()
    }
}

fn sweep_run(label: &str, s: f64, s_prime: f64, measure: SweepMeasure) -> PresetRun {
    let mut config = base(s, s_prime, 0.0, 0.0, format!("{label}_"));
    config.sweep = Some(SweepSection {
        measure,
        ..SweepSection::default()
    });
    PresetRun {
        label: label.to_string(),
        config,
    }
}

/// Expands a preset name into its runs.
pub fn preset(name: &str) -> Result<Vec<PresetRun>> {
    if let Some(&(fig, s, sp)) = TRAJECTORY_FIGURES.iter().find(|f| f.0 == name) {
        return Ok(COUPLINGS
            .iter()
            .map(|&(tag, c)| {
                let label = format!("{fig}_{tag}");
                PresetRun {
                    config: base(s, sp, c, c, format!("{label}_")),
                    label,
                }
            })
            .collect());
    }
    match name {
        "fig9" => Ok(FIG9_COUPLINGS
            .iter()
            .map(|&(tag, a, b)| {
                let label = format!("fig9_{tag}");
                PresetRun {
                    config: base(0.5, 1.0, a, b, format!("{label}_")),
                    label,
                }
            })
            .collect()),
        "fig5" => Ok(SWEEP_PANELS
            .iter()
            .map(|&(l, s, sp)| sweep_run(l, s, sp, SweepMeasure::Nm))
            .collect()),
        "fig1" => {
            let pairs = [(0.5, 0.5), (0.5, 1.0), (0.5, 2.0), (1.0, 1.0), (1.0, 2.0), (2.0, 2.0)];
            Ok(pairs
                .iter()
                .map(|&(s, sp)| sweep_run(&format!("fig1_s{s}_{sp}"), s, sp, SweepMeasure::Hopping))
                .collect())
        }
        _ => match SWEEP_PANELS.iter().find(|p| p.0 == name) {
            Some(&(l, s, sp)) => Ok(vec![sweep_run(l, s, sp, SweepMeasure::Nm)]),
            None => Err(Error::Config(format!(
                "unknown preset {name:?}; expected one of {}",
                preset_names().join(", ")
            ))),
        },
    }
}

/// All trajectory runs of the figure presets.
pub fn trajectory_presets() -> Vec<PresetRun> {
    TRAJECTORY_FIGURES
        .iter()
        .map(|f| f.0)
        .chain(["fig9"])
        .flat_map(|n| preset(n).expect("built-in preset"))
        .collect()
}
