use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use polaronix::config::{RunConfig, SweepMeasure, ValidatedRun};
use polaronix::nonmarkov::{hopping_sweep, sweep};
use polaronix::oracle::{brute_force_rates, discrete_kernels, kernel_at, DiscreteBath};
use polaronix::output::{self, Manifest};
use polaronix::pipeline::{rates_for, simulate};
use polaronix::presets::{preset, PresetRun};
use polaronix::spectral::compute_kernels;
use polaronix::Error;

#[derive(Parser)]
#[command(
    name = "polaronix",
    version,
    about = "Dressed-qubit decoherence and non-Markovianity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bath kernels φ_c, φ_s on the lag grid.
    Kernels(RunArgs),
    /// Decay rates and their cumulative integrals.
    Rates(RunArgs),
    /// Density-matrix trajectory and rates.
    Evolve(RunArgs),
    /// 𝒩 (or 𝒥̃/𝒥) over an (α, β) grid.
    Sweep(RunArgs),
    /// Brute-force reference values.
    #[command(hide = true)]
    OracleGen(OracleArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in configuration (fig1 … fig9, fig5a … fig5f).
    #[arg(long)]
    preset: Option<String>,
    /// Output directory, overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (0 or unset: all cores).
    #[arg(long, env = "POLARONIX_WORKERS")]
    workers: Option<usize>,
    /// Grid step, overrides the config.
    #[arg(long)]
    dt: Option<f64>,
    /// Horizon, overrides the config (and the sweep horizon).
    #[arg(long)]
    tmax: Option<f64>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated times for brute-force rates.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    times: Vec<f64>,
    /// Modes per bath for the discrete kernels.
    #[arg(long, default_value_t = 20_000)]
    modes: usize,
    /// Upper mode frequency in units of the uv cutoff.
    #[arg(long, default_value_t = 6.0)]
    omega_max: f64,
}

#[derive(Debug)]
enum Failure {
    Model(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Model(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Model(e) if e.is_config() => 2,
            Failure::Model(_) => 3,
            Failure::Io(..) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Model(e) => write!(f, "{e}"),
            Failure::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

struct Job {
    label: String,
    config: RunConfig,
    run: ValidatedRun,
}

fn load_jobs(args: &RunArgs) -> Result<Vec<Job>, Failure> {
    let runs = match (&args.config, &args.preset) {
        (Some(path), None) => vec![PresetRun {
            label: "run".into(),
            config: RunConfig::load(path)?,
        }],
        (None, Some(name)) => preset(name)?,
        _ => return Err(Error::Config("one of --config or --preset is required".into()).into()),
    };
    runs.into_iter()
        .map(|PresetRun { label, mut config }| {
            if let Some(out) = &args.out {
                config.output.dir = out.clone();
            }
            if let Some(dt) = args.dt {
                config.grid.dt = dt;
            }
            if let Some(t) = args.tmax {
                config.grid.t_max = t;
                if let Some(sw) = config.sweep.as_mut() {
                    sw.horizon = Some(t);
                }
            }
            let run = config.validate().map_err(|e| e.context(&label))?;
            Ok(Job { label, config, run })
        })
        .collect()
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn emit<F>(manifest: &mut Manifest, dir: &Path, prefix: &str, name: &str, write: F) -> Result<(), Failure>
where
    F: FnOnce(BufWriter<File>) -> std::io::Result<()>,
{
    let path = output::output_path(dir, prefix, name);
    write(create(&path)?).map_err(|e| Failure::Io(path.clone(), e))?;
    manifest.files.push(path.display().to_string());
    Ok(())
}

fn run_job(command: &str, job: &Job, args: &RunArgs, oracle: Option<&OracleArgs>) -> Result<(), Failure> {
    let start = Instant::now();
    let dir = &job.config.output.dir;
    let prefix = job.config.output.prefix.as_str();
    std::fs::create_dir_all(dir).map_err(|e| Failure::Io(dir.clone(), e))?;
    let run = &job.run;
    let cutoffs = [run.model.bath1.ir_cutoff, run.model.bath2.ir_cutoff];
    let mut manifest = Manifest::new(command, args.preset.as_deref(), &job.label, &job.config, cutoffs);

    match command {
        "kernels" => {
            let k = compute_kernels(&run.model.bath1, &run.model.bath2, run.grid)?;
            emit(&mut manifest, dir, prefix, "kernels.csv", |w| {
                output::write_kernels(w, &k)
            })?;
        }
        "rates" => {
            let (_, r) = rates_for(&run.model, run.grid)?;
            emit(&mut manifest, dir, prefix, "rates.csv", |w| output::write_rates(w, &r))?;
        }
        "evolve" => {
            let sim = simulate(&run.model, run.grid, &run.state0)?;
            let n = sim.trajectory.positivity_violations.len();
            if n > 0 {
                eprintln!("{}: positivity proxy violated at {n} grid times", job.label);
            }
            emit(&mut manifest, dir, prefix, "trajectory.csv", |w| {
                output::write_trajectory(w, &sim.trajectory)
            })?;
            emit(&mut manifest, dir, prefix, "rates.csv", |w| {
                output::write_rates(w, &sim.rates)
            })?;
        }
        "sweep" => {
            let sw = run
                .sweep
                .as_ref()
                .ok_or_else(|| Error::Config("sweep needs a [sweep] section".into()))?;
            match sw.measure {
                SweepMeasure::Nm => {
                    let r = sweep(
                        sw.s,
                        sw.s_prime,
                        &sw.alpha_grid,
                        &sw.beta_grid,
                        sw.horizon,
                        sw.meta,
                        &run.state0,
                        args.workers,
                    )?;
                    manifest.failed_cells = r.cells.iter().filter_map(|c| c.error.clone()).collect();
                    emit(&mut manifest, dir, prefix, "sweep.csv", |w| output::write_sweep(w, &r))?;
                }
                SweepMeasure::Hopping => {
                    let cells = hopping_sweep(sw.s, sw.s_prime, &sw.alpha_grid, &sw.beta_grid, sw.meta, args.workers)?;
                    manifest.failed_cells = cells.iter().filter_map(|c| c.error.clone()).collect();
                    emit(&mut manifest, dir, prefix, "hopping.csv", |w| {
                        output::write_hopping(w, sw.s, sw.s_prime, &cells)
                    })?;
                }
            }
            for e in &manifest.failed_cells {
                eprintln!("cell failed: {e}");
            }
        }
        "oracle-gen" => {
            let o = oracle.expect("oracle arguments");
            let (b1, b2) = (&run.model.bath1, &run.model.bath2);
            let (c1, _) = kernel_at(b1, 0.0)?;
            let (c2, _) = kernel_at(b2, 0.0)?;
            let jtilde = run.model.hopping * (-0.5 * (c1 + c2)).exp();
            let mut rows = Vec::with_capacity(o.times.len());
            for &t in &o.times {
                let (gp, gm, z) = brute_force_rates(b1, b2, jtilde, t)?;
                rows.push([t, gp, gm, z]);
            }
            emit(&mut manifest, dir, prefix, "oracle_rates.csv", |w| {
                let mut w = csv::Writer::from_writer(w);
                w.write_record(["t", "gamma_plus", "gamma_minus", "zeta"])?;
                for r in &rows {
                    w.write_record(r.iter().map(|&v| output::fmt_f64(v)))?;
                }
                w.flush()
            })?;
            let omega_max = o.omega_max * run.model.bath1.uv_cutoff;
            let d1 = DiscreteBath::uniform(b1, o.modes, omega_max)?;
            let d2 = DiscreteBath::uniform(b2, o.modes, omega_max)?;
            let k = discrete_kernels(&d1, &d2, run.grid);
            emit(&mut manifest, dir, prefix, "oracle_kernels.csv", |w| {
                output::write_kernels(w, &k)
            })?;
        }
        _ => unreachable!("unknown command {command}"),
    }

    manifest.wall_time_seconds = start.elapsed().as_secs_f64();
    let path = output::output_path(dir, prefix, &format!("{command}_manifest.json"));
    std::fs::write(&path, manifest.to_json() + "\n").map_err(|e| Failure::Io(path, e))
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let (command, args, oracle) = match &cli.command {
        Command::Kernels(a) => ("kernels", a, None),
        Command::Rates(a) => ("rates", a, None),
        Command::Evolve(a) => ("evolve", a, None),
        Command::Sweep(a) => ("sweep", a, None),
        Command::OracleGen(o) => ("oracle-gen", &o.run, Some(o)),
    };
    let jobs = load_jobs(args)?;
    if command == "sweep" {
        if let Some(j) = jobs.iter().find(|j| j.run.sweep.is_none()) {
            return Err(Error::Config(format!("{}: sweep needs a [sweep] section", j.label)).into());
        }
    }
    for job in &jobs {
        log::info!("{command} {}", job.label);
        run_job(command, job, args, oracle).map_err(|f| match f {
            Failure::Model(e) => Failure::Model(e.context(&job.label)),
            io => io,
        })?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
