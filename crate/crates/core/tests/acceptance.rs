//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so criteria execute
//! sequentially with their own timings. Exits nonzero if any criterion fails.

use std::io::Write;
use std::time::{Duration, Instant};

use polaronix::dynamics::{evolve_closed_form, evolve_ode, QubitState, Trajectory};
use polaronix::grid::UniformGrid;
use polaronix::nonmarkov::{count_revivals, hopping_sweep, linear_grid, nm_measure, sweep, GridMeta};
use polaronix::oracle::{brute_force_rates, discrete_kernels, kernel_at, DiscreteBath};
use polaronix::output::write_sweep;
use polaronix::pipeline::{rates_for, simulate};
use polaronix::presets::{preset, trajectory_presets};
use polaronix::rates::RateTable;
use polaronix::spectral::{compute_kernels, BathSpec, ModelParams, DEFAULT_IR_CUTOFF};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ZERO_TOL: f64 = 1e-12;
const CLOSED_FORM_TOL: f64 = 1e-6;
const DISCRETE_TOL: f64 = 1e-3;
const DISCRETE_MODES: usize = 20_000;
const RATES_TOL: f64 = 1e-5;
const EVOLVER_TOL: f64 = 1e-6;
const HALVING_TOL: f64 = 1e-4;
const TRACE_TOL: f64 = 1e-12;
const SWAP_TOL: f64 = 1e-12;
const WEAK_NM_MAX: f64 = 1e-6;
const WEAK_PDIFF_MAX: f64 = 0.05;
const STRONG_COHERENCE_FRACTION: f64 = 0.8;

const DT: f64 = 0.01;
const HORIZON: f64 = 20.0;
const EXPONENTS: [f64; 3] = [0.5, 1.0, 2.0];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn bath(coupling: f64, s: f64) -> BathSpec {
    BathSpec::new(coupling, s, 1.0, DEFAULT_IR_CUTOFF).unwrap()
}

fn model(alpha: f64, s: f64, beta: f64, s_prime: f64) -> ModelParams {
    ModelParams::new(1.0, bath(alpha, s), bath(beta, s_prime)).unwrap()
}

fn grid() -> UniformGrid {
    UniformGrid::with_horizon(DT, HORIZON).unwrap()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn sup(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn state_diff(a: &Trajectory, b: &Trajectory) -> f64 {
    a.states
        .iter()
        .zip(&b.states)
        .map(|(x, y)| {
            (x.rho_ss - y.rho_ss)
                .abs()
                .max((x.rho_tt - y.rho_tt).abs())
                .max((x.rho_st.re - y.rho_st.re).abs())
                .max((x.rho_st.im - y.rho_st.im).abs())
        })
        .fold(0.0, f64::max)
}

fn rate_arrays(r: &RateTable) -> [&Vec<f64>; 9] {
    [
        &r.gamma_plus,
        &r.gamma_minus,
        &r.zeta,
        &r.gamma0,
        &r.gamma1,
        &r.gamma2,
        &r.int_gamma0,
        &r.int_gamma1,
        &r.int_gamma2,
    ]
}

fn preset_models() -> Vec<(String, ModelParams, QubitState)> {
    trajectory_presets()
        .into_iter()
        .map(|p| {
            let run = p.config.validate().unwrap();
            (p.label, run.model, run.state0)
        })
        .collect()
}

fn zero_coupling() -> Outcome {
    let state0 = QubitState::default_superposition();
    let mut worst: f64 = 0.0;
    let mut nm_total = 0.0;
    for &s in &EXPONENTS {
        for &sp in &EXPONENTS {
            let m = model(0.0, s, 0.0, sp);
            let sim = simulate(&m, grid(), &state0).unwrap();
            worst = worst.max((sim.hopping_ratio(&m) - 1.0).abs());
            for a in rate_arrays(&sim.rates) {
                worst = worst.max(sup(a));
            }
            for traj in [&sim.trajectory, &evolve_closed_form(&state0, &sim.rates)] {
                for st in &traj.states {
                    worst = worst
                        .max((st.rho_ss - state0.rho_ss).abs())
                        .max((st.rho_tt - state0.rho_tt).abs())
                        .max((st.rho_st - state0.rho_st).norm());
                }
            }
            let times: Vec<f64> = grid().iter().collect();
            nm_total += nm_measure(&sim.trajectory.coherence, &times).unwrap();
        }
    }
    outcome(
        worst <= ZERO_TOL && nm_total == 0.0,
        format!("max deviation {worst:.2e} (tol {ZERO_TOL:e}), total N = {nm_total}"),
    )
}

fn closed_form_kernel() -> Outcome {
    let mut worst: f64 = 0.0;
    for alpha in [0.1, 1.0, 5.0] {
        let b = BathSpec::new(alpha, 2.0, 1.0, 0.0).unwrap();
        let none = b.with_coupling(0.0);
        for (b1, b2) in [(b, none), (none, b)] {
            let k = compute_kernels(&b1, &b2, grid()).unwrap();
            let exact: Vec<f64> = grid()
                .iter()
                .map(|u| alpha * std::f64::consts::PI.sqrt() / 2.0 * (-u * u / 4.0).exp())
                .collect();
            worst = worst.max(max_abs_diff(&k.phi_c, &exact) / sup(&exact));
        }
    }
    outcome(
        worst <= CLOSED_FORM_TOL,
        format!("sup relative error {worst:.2e} on u in [0, {HORIZON}] (tol {CLOSED_FORM_TOL:e})"),
    )
}

fn discrete_modes() -> Outcome {
    let mut rows = Vec::new();
    let mut pass = true;
    for &s in &EXPONENTS {
        for &sp in &EXPONENTS {
            let (b1, b2) = (bath(1.0, s), bath(1.0, sp));
            let k = compute_kernels(&b1, &b2, grid()).unwrap();
            let d1 = DiscreteBath::uniform(&b1, DISCRETE_MODES, 6.0).unwrap();
            let d2 = DiscreteBath::uniform(&b2, DISCRETE_MODES, 6.0).unwrap();
            let dk = discrete_kernels(&d1, &d2, grid());
            let ec = max_abs_diff(&k.phi_c, &dk.phi_c) / sup(&dk.phi_c);
            let es = max_abs_diff(&k.phi_s, &dk.phi_s) / sup(&dk.phi_s);
            let e = ec.max(es);
            pass &= e <= DISCRETE_TOL;
            rows.push(format!("({s},{sp}) {e:.2e}"));
        }
    }
    outcome(
        pass,
        format!(
            "K={DISCRETE_MODES}, sup relative: {} (tol {DISCRETE_TOL:e})",
            rows.join(", ")
        ),
    )
}

fn rates_oracle() -> Outcome {
    let (b1, b2) = (
        BathSpec::new(1.0, 2.0, 1.0, 0.0).unwrap(),
        BathSpec::new(1.0, 2.0, 1.0, 0.0).unwrap(),
    );
    let m = ModelParams::new(1.0, b1, b2).unwrap();
    let (_, rates) = rates_for(&m, grid()).unwrap();
    let jtilde = (-0.5 * (kernel_at(&b1, 0.0).unwrap().0 + kernel_at(&b2, 0.0).unwrap().0)).exp();
    let mut rng = ChaCha8Rng::seed_from_u64(20_251_016);
    let mut worst: f64 = 0.0;
    let mut times = Vec::new();
    for _ in 0..10 {
        let i = rng.gen_range(1..grid().len());
        let t = grid().at(i);
        times.push(t);
        let (gp, gm, z) = brute_force_rates(&b1, &b2, jtilde, t).unwrap();
        for (got, want) in [
            (rates.gamma_plus[i], gp),
            (rates.gamma_minus[i], gm),
            (rates.zeta[i], z),
        ] {
            worst = worst.max((got - want).abs() / want.abs());
        }
    }
    outcome(
        worst <= RATES_TOL,
        format!(
            "max relative error {worst:.2e} over t = {:?} (tol {RATES_TOL:e})",
            times.iter().map(|t| (t * 100.0).round() / 100.0).collect::<Vec<_>>()
        ),
    )
}

fn evolver_equivalence() -> Outcome {
    let mut worst_eq: f64 = 0.0;
    let mut worst_half: f64 = 0.0;
    let mut worst_label = String::new();
    for (label, m, s0) in preset_models() {
        let sim = simulate(&m, grid(), &s0).unwrap();
        let cf = evolve_closed_form(&s0, &sim.rates);
        worst_eq = worst_eq.max(state_diff(&sim.trajectory, &cf));
        let fine = simulate(&m, grid().refined(), &s0).unwrap();
        let coarse_on_fine = Trajectory {
            states: fine.trajectory.states.iter().step_by(2).copied().collect(),
            ..sim.trajectory.clone()
        };
        let d = state_diff(&sim.trajectory, &coarse_on_fine);
        if d > worst_half {
            worst_half = d;
            worst_label = label;
        }
    }
    outcome(
        worst_eq <= EVOLVER_TOL && worst_half <= HALVING_TOL,
        format!(
            "ode vs closed form {worst_eq:.2e} (tol {EVOLVER_TOL:e}); dt halving {worst_half:.2e} at {worst_label} (tol {HALVING_TOL:e})"
        ),
    )
}

fn conservation() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut hermitian = true;
    for (_, m, s0) in preset_models() {
        let sim = simulate(&m, grid(), &s0).unwrap();
        for traj in [&sim.trajectory, &evolve_closed_form(&s0, &sim.rates)] {
            for st in &traj.states {
                worst = worst.max((st.trace() - 1.0).abs());
                let mat = st.matrix();
                hermitian &= mat[1][0] == mat[0][1].conj() && mat[0][0].im == 0.0 && mat[1][1].im == 0.0;
            }
        }
    }
    outcome(
        worst <= TRACE_TOL && hermitian,
        format!("max |trace - 1| = {worst:.2e} (tol {TRACE_TOL:e}), hermitian at every step: {hermitian}"),
    )
}

fn swap_symmetry() -> Outcome {
    let mut worst: f64 = 0.0;
    let times: Vec<f64> = grid().iter().collect();
    for (_, m, s0) in preset_models() {
        let a = simulate(&m, grid(), &s0).unwrap();
        let b = simulate(&m.swapped(), grid(), &s0).unwrap();
        worst = worst.max((a.rates.jtilde - b.rates.jtilde).abs());
        for (x, y) in rate_arrays(&a.rates).iter().zip(rate_arrays(&b.rates)) {
            worst = worst.max(max_abs_diff(x, y));
        }
        worst = worst.max(state_diff(&a.trajectory, &b.trajectory));
        let na = nm_measure(&a.trajectory.coherence, &times).unwrap();
        let nb = nm_measure(&b.trajectory.coherence, &times).unwrap();
        worst = worst.max((na - nb).abs());
    }
    let r = sweep(
        0.5,
        0.5,
        &[0.3, 1.0, 2.5],
        &[0.3, 1.0, 2.5],
        HORIZON,
        GridMeta::default(),
        &QubitState::default_superposition(),
        None,
    )
    .unwrap();
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max((r.cell(i, j).nm - r.cell(j, i).nm).abs());
        }
    }
    outcome(
        worst <= SWAP_TOL,
        format!("max difference over jtilde, rates, states, N and sweep cells {worst:.2e} (tol {SWAP_TOL:e})"),
    )
}

fn hopping_trend() -> Outcome {
    let g = linear_grid(0.1, 5.0, 10).unwrap();
    let pairs = [(0.5, 0.5), (0.5, 1.0), (0.5, 2.0), (1.0, 1.0), (1.0, 2.0), (2.0, 2.0)];
    let mut violations = 0;
    let mut range = (f64::INFINITY, 0.0f64);
    for (s, sp) in pairs {
        let cells = hopping_sweep(s, sp, &g, &g, GridMeta::default(), None).unwrap();
        let r = |i: usize, j: usize| cells[i * g.len() + j].ratio;
        for i in 0..g.len() {
            for j in 0..g.len() {
                range = (range.0.min(r(i, j)), range.1.max(r(i, j)));
                if i + 1 < g.len() && r(i + 1, j) >= r(i, j) {
                    violations += 1;
                }
                if j + 1 < g.len() && r(i, j + 1) >= r(i, j) {
                    violations += 1;
                }
            }
        }
    }
    outcome(
        violations == 0,
        format!(
            "6 pairs x 10x10 grid, {violations} non-decreasing steps, ratio range [{:.3e}, {:.3}]",
            range.0, range.1
        ),
    )
}

fn run_preset(label: &str) -> (Trajectory, f64) {
    let fig = label.split('_').next().unwrap();
    let run = preset(fig)
        .unwrap()
        .into_iter()
        .find(|r| r.label == label)
        .unwrap()
        .config
        .validate()
        .unwrap();
    let sim = simulate(&run.model, run.grid, &run.state0).unwrap();
    let times: Vec<f64> = run.grid.iter().collect();
    let nm = nm_measure(&sim.trajectory.coherence, &times).unwrap();
    (sim.trajectory, nm)
}

fn fig2_qualitative() -> Outcome {
    let (weak, weak_nm) = run_preset("fig2_weak");
    let (strong, _) = run_preset("fig2_strong");
    let pd = weak.p_diff.last().unwrap().abs();
    let ratio = strong.coherence.last().unwrap() / strong.coherence[0];
    let weak_ok = weak_nm < WEAK_NM_MAX && pd < WEAK_PDIFF_MAX;
    let strong_ok = ratio > STRONG_COHERENCE_FRACTION;
    outcome(
        weak_ok && strong_ok,
        format!(
            "weak: N = {weak_nm:.2e} (< {WEAK_NM_MAX:e}), |P_D(T)| = {pd:.2e} (< {WEAK_PDIFF_MAX}); \
             strong: C(T)/C(0) = {ratio:.4} (> {STRONG_COHERENCE_FRACTION})"
        ),
    )
}

fn sub_ohmic_backflow() -> Outcome {
    let (mid, mid_nm) = run_preset("fig4_intermediate");
    let (_, weak_nm) = run_preset("fig4_weak");
    let revivals = count_revivals(&mid.coherence);
    outcome(
        mid_nm > 0.0 && revivals >= 1 && weak_nm < mid_nm,
        format!("alpha=beta=1: N = {mid_nm:.4e}, {revivals} revivals; alpha=beta=0.1: N = {weak_nm:.4e}"),
    )
}

fn lamb_shift_irrelevance() -> Outcome {
    let mut identical = true;
    let mut zeta_scale: f64 = 0.0;
    for (_, m, s0) in preset_models() {
        let (_, rates) = rates_for(&m, grid()).unwrap();
        zeta_scale = zeta_scale.max(sup(&rates.zeta));
        let stripped = rates.without_lamb_shift();
        identical &= evolve_ode(&s0, &rates).states == evolve_ode(&s0, &stripped).states;
        identical &= evolve_closed_form(&s0, &rates).states == evolve_closed_form(&s0, &stripped).states;
    }
    outcome(
        identical && zeta_scale > 0.0,
        format!("bitwise identical with zeta = 0: {identical} (max |zeta| = {zeta_scale:.3e})"),
    )
}

fn sweep_scale() -> Outcome {
    let run = preset("fig5a").unwrap().remove(0).config.validate().unwrap();
    let sw = run.sweep.unwrap();
    let go = |workers| {
        let start = Instant::now();
        let r = sweep(
            sw.s,
            sw.s_prime,
            &sw.alpha_grid,
            &sw.beta_grid,
            sw.horizon,
            sw.meta,
            &run.state0,
            Some(workers),
        )
        .unwrap();
        let mut csv = Vec::new();
        write_sweep(&mut csv, &r).unwrap();
        (r, csv, start.elapsed())
    };
    let (r4, csv4, t4) = go(4);
    let (_, csv1, t1) = go(1);
    let invalid = r4.cells.iter().filter(|c| !c.is_valid()).count();
    let limit = Duration::from_secs(600);
    outcome(
        csv4 == csv1 && t4 < limit && t1 < limit && invalid == 0 && r4.max_nm() > 0.0,
        format!(
            "{}x{} cells: {:.1}s (4 workers), {:.1}s (1 worker), identical CSV: {}, invalid cells: {invalid}, max N = {:.4e}",
            sw.alpha_grid.len(),
            sw.beta_grid.len(),
            t4.as_secs_f64(),
            t1.as_secs_f64(),
            csv4 == csv1,
            r4.max_nm()
        ),
    )
}

type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 12] = [
        ("zero-coupling identities", Some(Duration::from_secs(1)), zero_coupling),
        ("closed-form kernel", Some(Duration::from_secs(5)), closed_form_kernel),
        ("discrete-mode oracle", Some(Duration::from_secs(60)), discrete_modes),
        ("rates oracle", Some(Duration::from_secs(60)), rates_oracle),
        (
            "evolver equivalence",
            Some(Duration::from_secs(30)),
            evolver_equivalence,
        ),
        ("conservation", None, conservation),
        ("swap symmetry", None, swap_symmetry),
        ("hopping trend", None, hopping_trend),
        ("super-Ohmic qualitative", None, fig2_qualitative),
        ("sub-Ohmic backflow", None, sub_ohmic_backflow),
        ("lamb-shift irrelevance", None, lamb_shift_irrelevance),
        ("sweep scale", None, sweep_scale),
    ];
    let mut failed = 0;
    let mut err = std::io::stderr();
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let o = check();
        let elapsed = start.elapsed();
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let pass = o.pass && in_time;
        if !pass {
            failed += 1;
        }
        let budget_note = budget.map_or(String::new(), |b| format!(", budget {}s", b.as_secs()));
        writeln!(
            err,
            "{} {name}: {} [{:.2}s{budget_note}]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64()
        )
        .unwrap();
    }
    writeln!(err, "acceptance: {} passed, {failed} failed", criteria.len() - failed).unwrap();
    if failed > 0 {
        std::process::exit(1);
    }
}
