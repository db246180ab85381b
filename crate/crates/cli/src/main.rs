mod output;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use log::info;
use serde::Deserialize;

use ringtraj::evaluate::{build_table, default_approaches, load_fixture_dir, simulate_follow, tracking_error, EvalError};
use ringtraj::geometry::load_heightmap;
use ringtraj::planner::{plan, PlanError};
use ringtraj::{FollowerConfig64, FourierTrajectory64, HeightMapMeta, PlannerConfig64, TrajectoryPlan64};

/// Exit status for each failure class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Failure = 1,
    InvalidInput = 2,
    EmptyGeometry = 3,
    Infeasible = 4,
    Divergence = 5,
}

struct CliError {
    status: Status,
    error: anyhow::Error,
}

impl CliError {
    fn new(status: Status, error: impl Into<anyhow::Error>) -> Self {
        Self {
            status,
            error: error.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

/// Failures while writing outputs.
impl From<anyhow::Error> for CliError {
    fn from(error: anyhow::Error) -> Self {
        Self::new(Status::Failure, error)
    }
}

trait OrStatus<T> {
    fn or_status(self, status: Status) -> Result<T, CliError>;
}

impl<T, E: Into<anyhow::Error>> OrStatus<T> for Result<T, E> {
    fn or_status(self, status: Status) -> Result<T, CliError> {
        self.map_err(|e| CliError::new(status, e))
    }
}

#[derive(Parser)]
#[command(name = "ringtraj", version, about = "Ring-based Fourier coverage trajectories for building inspection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan a trajectory around the building in a heightmap.
    Plan {
        #[arg(long)]
        heightmap: PathBuf,
        /// JSON with `cell_size` and `origin`.
        #[arg(long)]
        meta: PathBuf,
        /// Planner JSON config.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Also write slice images and the discrete target path here.
        #[arg(long)]
        debug_dir: Option<PathBuf>,
    },
    /// Compare Fourier and polynomial reconstructions of fixture paths.
    Eval {
        /// Directory of `x,y` CSV polylines.
        #[arg(long)]
        fixtures: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Resampled points per path.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Fly a trajectory with the point-mass follower.
    Simulate {
        /// Plan JSON or a single trajectory JSON.
        #[arg(long)]
        trajectory: PathBuf,
        #[arg(long)]
        follower: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write an SVG of the x-y projection and a CSV of sampled series.
    ExportPlot {
        #[arg(long)]
        trajectory: PathBuf,
        #[arg(long)]
        svg: PathBuf,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value_t = 400)]
        samples: usize,
    },
}

#[derive(Deserialize)]
struct SimulateConfig {
    #[serde(flatten)]
    follower: FollowerConfig64,
    /// Duration in trajectory periods.
    #[serde(default = "default_periods")]
    periods: f64,
}

fn default_periods() -> f64 {
    3.0
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Plan {
            heightmap,
            meta,
            config,
            out_dir,
            debug_dir,
        } => cmd_plan(&heightmap, &meta, &config, &out_dir, debug_dir.as_deref()),
        Command::Eval { fixtures, out, samples } => cmd_eval(&fixtures, &out, samples),
        Command::Simulate {
            trajectory,
            follower,
            out,
        } => cmd_simulate(&trajectory, &follower, &out),
        Command::ExportPlot {
            trajectory,
            svg,
            csv,
            samples,
        } => cmd_export_plot(&trajectory, &svg, &csv, samples),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status as u8)
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .or_status(Status::InvalidInput)
}

fn plan_status(e: &PlanError) -> Status {
    if e.is_empty_geometry() {
        Status::EmptyGeometry
    } else {
        match e {
            PlanError::Infeasible { .. } => Status::Infeasible,
            PlanError::Config(_) | PlanError::Geometry(_) | PlanError::Slicing(_) => Status::InvalidInput,
            _ => Status::Failure,
        }
    }
}

fn cmd_plan(
    heightmap: &Path,
    meta: &Path,
    config: &Path,
    out_dir: &Path,
    debug_dir: Option<&Path>,
) -> Result<(), CliError> {
    let cfg_text = read_text(config)?;
    let cfg = PlannerConfig64::from_json_str(&cfg_text)
        .with_context(|| format!("in {}", config.display()))
        .or_status(Status::InvalidInput)?;
    let meta = HeightMapMeta::<f64>::load(meta).or_status(Status::InvalidInput)?;
    let hm = load_heightmap(heightmap, meta).or_status(Status::InvalidInput)?;
    let out = plan(&hm, &cfg).map_err(|e| CliError::new(plan_status(&e), e))?;

    std::fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    output::write_json(&out_dir.join("trajectory.json"), &out.plan)?;
    output::write_json(&out_dir.join("feasibility.json"), &out.feasibility)?;
    let waypoints = out.plan.waypoints(cfg.samples_per_ring);
    output::write_atomic(&out_dir.join("waypoints.csv"), |w| output::waypoint_csv(w, &waypoints))?;
    if let Some(dir) = debug_dir {
        output::write_debug(dir, &out.artifacts)?;
    }
    let feasible = out.feasibility.iter().all(|r| r.feasible);
    info!("wrote plan to {}", out_dir.display());
    println!(
        "rings={} duration={:.3} waypoints={} feasible={}",
        out.plan.rings.len(),
        out.plan.duration(),
        waypoints.len(),
        feasible
    );
    Ok(())
}

fn cmd_eval(fixtures: &Path, out: &Path, samples: usize) -> Result<(), CliError> {
    let paths = load_fixture_dir::<f64>(fixtures, samples).or_status(Status::InvalidInput)?;
    let report = build_table(&paths, &default_approaches()).map_err(|e| {
        let status = match e {
            EvalError::Spectral(_) | EvalError::Baseline(_) => Status::InvalidInput,
            _ => Status::Failure,
        };
        CliError::new(status, e)
    })?;
    output::write_atomic(out, |w| Ok(report.write_csv(w)?))?;
    print!("{}", report.to_text());
    Ok(())
}

/// Either a full plan or one trajectory.
enum Loaded {
    Plan(TrajectoryPlan64),
    Single(FourierTrajectory64),
}

fn load_trajectory(path: &Path) -> Result<Loaded, CliError> {
    let text = read_text(path)?;
    if let Ok(p) = serde_json::from_str::<TrajectoryPlan64>(&text) {
        return Ok(Loaded::Plan(p));
    }
    serde_json::from_str::<FourierTrajectory64>(&text)
        .map(Loaded::Single)
        .with_context(|| format!("{} is neither a plan nor a trajectory", path.display()))
        .or_status(Status::InvalidInput)
}

impl Loaded {
    fn into_plan(self) -> TrajectoryPlan64 {
        match self {
            Loaded::Plan(p) => p,
            Loaded::Single(t) => TrajectoryPlan64::new(vec![t]),
        }
    }
}

fn cmd_simulate(trajectory: &Path, follower: &Path, out: &Path) -> Result<(), CliError> {
    let loaded = load_trajectory(trajectory)?;
    let cfg: SimulateConfig = serde_json::from_str(&read_text(follower)?)
        .with_context(|| format!("in {}", follower.display()))
        .or_status(Status::InvalidInput)?;
    cfg.follower.validate().or_status(Status::InvalidInput)?;
    let result = match &loaded {
        Loaded::Single(t) => simulate_follow(t, &cfg.follower, t.period * cfg.periods),
        Loaded::Plan(p) => simulate_follow(p, &cfg.follower, p.duration() * cfg.periods),
    };
    let trace = result.map_err(|e| {
        let status = match e {
            EvalError::Divergence { .. } => Status::Divergence,
            _ => Status::InvalidInput,
        };
        CliError::new(status, e)
    })?;
    output::write_atomic(out, |w| Ok(trace.write_csv(w)?))?;
    let (rms, max) = tracking_error(&trace).or_status(Status::Failure)?;
    println!("steps={} rms_error={rms:.6e} max_error={max:.6e}", trace.len());
    Ok(())
}

fn cmd_export_plot(trajectory: &Path, svg: &Path, csv: &Path, samples: usize) -> Result<(), CliError> {
    if samples == 0 {
        return Err(CliError::new(Status::InvalidInput, anyhow::anyhow!("--samples must be positive")));
    }
    let plan = load_trajectory(trajectory)?.into_plan();
    let series = output::sample_series(&plan, samples);
    output::write_atomic(csv, |w| output::series_csv(w, &series))?;
    output::write_atomic(svg, |w| output::svg(w, &plan, samples))?;
    Ok(())
}
