//! Reconstruction error tables and a point-mass tracking simulation.
//!
//! The table compares truncated Fourier reconstructions against polynomial
//! fits on the same resampled paths. The follower is a per-axis double
//! integrator driven by a PD law with an optional acceleration clamp.

use std::fmt::{self, Write as _};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baseline::{fitted_values, polyfit, BaselineError};
use crate::ringpath::{resample_closed, RingPathError};
use crate::scalar::{vec3, Real};
use crate::spectral::{dft, idft, truncate, FourierTrajectory, SpectralError};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("sequence lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    Empty,
    #[error("invalid follower config: {0}")]
    Config(String),
    #[error("duration {duration} is shorter than the reference period {period}")]
    Duration { duration: f64, period: f64 },
    #[error("simulation diverged at t = {t} (step {step})")]
    Divergence { t: f64, step: usize },
    #[error("path {name}: {source}")]
    Path { name: String, source: RingPathError },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error("{path}: {message}")]
    Fixture { path: PathBuf, message: String },
}

/// Mean squared Euclidean distance between matching points.
pub fn mse<T: Real, const D: usize>(a: &[[T; D]], b: &[[T; D]]) -> Result<T, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(EvalError::Empty);
    }
    let total: T = a
        .iter()
        .zip(b)
        .map(|(p, q)| p.iter().zip(q).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>())
        .sum();
    Ok(total / T::from_usize_lossy(a.len()))
}

/// `|Σ s² − (1/Q)·Σ|F|²|` relative to `Σ s²`.
pub fn parseval_defect<T: Real>(signal: &[T]) -> Result<T, EvalError> {
    let sp = dft(signal)?;
    let time: T = signal.iter().map(|&s| s * s).sum();
    let freq = sp.energy();
    let scale = time.max(T::min_positive_value());
    Ok((time - freq).abs() / scale)
}

/// Planar path sampled at `N` points, one signal per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedPath<T: Real> {
    pub name: String,
    pub xs: Vec<T>,
    pub ys: Vec<T>,
}

impl<T: Real> NamedPath<T> {
    /// Resamples the closed polyline through the given vertices to `n` points.
    pub fn from_polyline(name: impl Into<String>, xs: &[T], ys: &[T], n: usize) -> Result<Self, EvalError> {
        let name = name.into();
        let (xs, ys) = resample_closed(xs, ys, n).map_err(|source| EvalError::Path {
            name: name.clone(),
            source,
        })?;
        Ok(Self { name, xs, ys })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    fn points(&self) -> Vec<[T; 2]> {
        self.xs.iter().zip(&self.ys).map(|(&x, &y)| [x, y]).collect()
    }
}

/// Reads a closed polyline from a CSV file with an `x,y` header.
pub fn load_path_csv<T: Real>(path: &Path) -> Result<(Vec<T>, Vec<T>), EvalError> {
    let fail = |message: String| EvalError::Fixture {
        path: path.to_path_buf(),
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| fail(e.to_string()))?;
    let headers = rdr.headers().map_err(|e| fail(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| fail(format!("missing column `{name}`")))
    };
    let (ix, iy) = (col("x")?, col("y")?);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| fail(e.to_string()))?;
        let num = |i: usize| -> Result<T, EvalError> {
            rec.get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .map(T::lit)
                .ok_or_else(|| fail(format!("row {}: bad number", line + 2)))
        };
        xs.push(num(ix)?);
        ys.push(num(iy)?);
    }
    Ok((xs, ys))
}

/// Loads every `*.csv` in `dir`, sorted by file name, resampled to `n` points.
pub fn load_fixture_dir<T: Real>(dir: &Path, n: usize) -> Result<Vec<NamedPath<T>>, EvalError> {
    let entries = std::fs::read_dir(dir).map_err(|e| EvalError::Fixture {
        path: dir.to_path_buf(),
        message: e.to_string(),
    })?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(EvalError::Fixture {
            path: dir.to_path_buf(),
            message: "no .csv paths found".into(),
        });
    }
    files
        .iter()
        .map(|f| {
            let (xs, ys) = load_path_csv::<T>(f)?;
            let name = f.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            NamedPath::from_polyline(name, &xs, &ys, n)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approach {
    /// Inverse transform of the lowest `terms` bins.
    Ift(usize),
    /// Least-squares polynomial of the given degree.
    Poly(usize),
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Approach::Ift(k) => write!(f, "IFT-{k}"),
            Approach::Poly(d) => write!(f, "Poly-{d}"),
        }
    }
}

/// Rows of the comparison table.
pub fn default_approaches() -> Vec<Approach> {
    let steps = [1, 2, 5, 50, 100];
    steps
        .iter()
        .map(|&k| Approach::Ift(k))
        .chain(steps.iter().map(|&d| Approach::Poly(d)))
        .collect()
}

/// Reconstruction of one axis signal under `approach`.
pub fn reconstruct<T: Real>(signal: &[T], approach: Approach) -> Result<Vec<T>, EvalError> {
    match approach {
        Approach::Ift(terms) => Ok(idft(&truncate(&dft(signal)?, terms)?)?),
        Approach::Poly(degree) => Ok(fitted_values(&polyfit(signal, degree)?, signal.len())),
    }
}

/// MSE per approach (rows) and path (columns), with wall-clock time per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport<T: Real> {
    pub figures: Vec<String>,
    pub approaches: Vec<Approach>,
    pub mse: Vec<Vec<T>>,
    pub millis: Vec<Vec<f64>>,
}

impl<T: Real> EvalReport<T> {
    pub fn cell(&self, approach: Approach, figure: &str) -> Option<T> {
        let r = self.approaches.iter().position(|&a| a == approach)?;
        let c = self.figures.iter().position(|f| f == figure)?;
        Some(self.mse[r][c])
    }

    /// MSE values only, so the file is reproducible.
    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec!["approach".to_string()];
        header.extend(self.figures.iter().cloned());
        wtr.write_record(&header)?;
        for (a, row) in self.approaches.iter().zip(&self.mse) {
            let mut rec = vec![a.to_string()];
            rec.extend(row.iter().map(|v| format!("{:e}", v.to_f64_lossy())));
            wtr.write_record(&rec)?;
        }
        wtr.flush()
    }

    /// Aligned table with MSE and time per cell.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:<10}", "approach");
        for f in &self.figures {
            let _ = write!(out, " {f:>22}");
        }
        out.push('\n');
        for ((a, row), times) in self.approaches.iter().zip(&self.mse).zip(&self.millis) {
            let _ = write!(out, "{:<10}", a.to_string());
            for (v, ms) in row.iter().zip(times) {
                let cell = format!("{:.3e} ({ms:.2}ms)", v.to_f64_lossy());
                let _ = write!(out, " {cell:>22}");
            }
            out.push('\n');
        }
        out
    }
}

/// Reconstruction MSE of every path under every approach. Paths are
/// evaluated on separate threads.
pub fn build_table<T: Real>(paths: &[NamedPath<T>], approaches: &[Approach]) -> Result<EvalReport<T>, EvalError> {
    if paths.is_empty() {
        return Err(EvalError::Empty);
    }
    let columns: Vec<Result<Vec<(T, f64)>, EvalError>> = std::thread::scope(|s| {
        let handles: Vec<_> = paths
            .iter()
            .map(|p| s.spawn(move || evaluate_path(p, approaches)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("table worker panicked"))
            .collect()
    });
    let columns = columns.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mse = (0..approaches.len())
        .map(|r| columns.iter().map(|c| c[r].0).collect())
        .collect();
    let millis = (0..approaches.len())
        .map(|r| columns.iter().map(|c| c[r].1).collect())
        .collect();
    Ok(EvalReport {
        figures: paths.iter().map(|p| p.name.clone()).collect(),
        approaches: approaches.to_vec(),
        mse,
        millis,
    })
}

fn evaluate_path<T: Real>(path: &NamedPath<T>, approaches: &[Approach]) -> Result<Vec<(T, f64)>, EvalError> {
    let target = path.points();
    approaches
        .iter()
        .map(|&a| {
            let start = Instant::now();
            let rx = reconstruct(&path.xs, a)?;
            let ry = reconstruct(&path.ys, a)?;
            let rec: Vec<[T; 2]> = rx.into_iter().zip(ry).map(|(x, y)| [x, y]).collect();
            let e = mse(&target, &rec)?;
            Ok((e, start.elapsed().as_secs_f64() * 1e3))
        })
        .collect()
}

/// PD follower parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FollowerConfig<T: Real> {
    #[serde(default = "defaults::kp")]
    pub kp: T,
    #[serde(default = "defaults::kd")]
    pub kd: T,
    /// Clamp on the commanded acceleration norm; `None` disables it.
    #[serde(default = "defaults::a_max")]
    pub a_max: Option<T>,
    #[serde(default = "defaults::dt")]
    pub dt: T,
}

mod defaults {
    use crate::scalar::Real;

    pub fn kp<T: Real>() -> T {
        T::lit(4.0)
    }
    pub fn kd<T: Real>() -> T {
        T::lit(4.0)
    }
    pub fn a_max<T: Real>() -> Option<T> {
        Some(T::lit(5.0))
    }
    pub fn dt<T: Real>() -> T {
        T::lit(0.01)
    }
}

impl<T: Real> Default for FollowerConfig<T> {
    fn default() -> Self {
        Self {
            kp: defaults::kp(),
            kd: defaults::kd(),
            a_max: defaults::a_max(),
            dt: defaults::dt(),
        }
    }
}

impl<T: Real> FollowerConfig<T> {
    /// Critically damped gains `kd = 2·√kp`, without a clamp.
    pub fn critically_damped(kp: T, dt: T) -> Self {
        Self {
            kp,
            kd: T::lit(2.0) * kp.sqrt(),
            a_max: None,
            dt,
        }
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        let pos = |v: T| v > T::zero() && v.is_finite();
        if !pos(self.kp) {
            return Err(EvalError::Config(format!("kp must be positive, got {}", self.kp)));
        }
        if !pos(self.kd) {
            return Err(EvalError::Config(format!("kd must be positive, got {}", self.kd)));
        }
        if !pos(self.dt) {
            return Err(EvalError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if let Some(a) = self.a_max {
            if !pos(a) {
                return Err(EvalError::Config(format!("a_max must be positive, got {a}")));
            }
        }
        Ok(())
    }
}

/// Commanded position and velocity over time.
pub trait Reference<T: Real> {
    fn state(&self, t: T) -> ([T; 3], [T; 3]);

    /// Length of one pass, if the reference repeats.
    fn period(&self) -> Option<T> {
        None
    }
}

impl<T: Real> Reference<T> for FourierTrajectory<T> {
    fn state(&self, t: T) -> ([T; 3], [T; 3]) {
        let [p, v, _] = self.derivatives(t);
        (p, v)
    }

    fn period(&self) -> Option<T> {
        Some(self.period)
    }
}

impl<T: Real, F: Fn(T) -> ([T; 3], [T; 3])> Reference<T> for F {
    fn state(&self, t: T) -> ([T; 3], [T; 3]) {
        self(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimStep<T: Real> {
    pub t: T,
    pub position: [T; 3],
    pub velocity: [T; 3],
    pub ref_position: [T; 3],
    pub ref_velocity: [T; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace<T: Real> {
    pub dt: T,
    pub steps: Vec<SimStep<T>>,
}

impl<T: Real> SimTrace<T> {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `t,x,y,z,x_ref,y_ref,z_ref`.
    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["t", "x", "y", "z", "x_ref", "y_ref", "z_ref"])?;
        for s in &self.steps {
            let row = [s.t, s.position[0], s.position[1], s.position[2]]
                .into_iter()
                .chain(s.ref_position)
                .map(|v| v.to_string());
            wtr.write_record(row)?;
        }
        wtr.flush()
    }
}

/// Follows `reference` for `duration` seconds from its own state at `t = 0`.
pub fn simulate_follow<T: Real, R: Reference<T> + ?Sized>(
    reference: &R,
    cfg: &FollowerConfig<T>,
    duration: T,
) -> Result<SimTrace<T>, EvalError> {
    let (p0, v0) = reference.state(T::zero());
    simulate_follow_from(reference, cfg, duration, p0, v0)
}

/// Follows `reference` from an explicit initial state. The trace holds
/// `round(duration/dt)` samples at `t = i·dt`; each step applies
/// `a = kp·(p_ref − p) + kd·(v_ref − v)`, clamps its norm to `a_max`, then
/// updates velocity before position.
pub fn simulate_follow_from<T: Real, R: Reference<T> + ?Sized>(
    reference: &R,
    cfg: &FollowerConfig<T>,
    duration: T,
    p0: [T; 3],
    v0: [T; 3],
) -> Result<SimTrace<T>, EvalError> {
    cfg.validate()?;
    if let Some(period) = reference.period() {
        if !(duration >= period) {
            return Err(EvalError::Duration {
                duration: duration.to_f64_lossy(),
                period: period.to_f64_lossy(),
            });
        }
    }
    let count = (duration / cfg.dt).round().to_usize().unwrap_or(0);
    if count == 0 {
        return Err(EvalError::Empty);
    }
    let (mut p, mut v) = (p0, v0);
    let mut steps = Vec::with_capacity(count);
    for i in 0..count {
        let t = cfg.dt * T::from_usize_lossy(i);
        let (pr, vr) = reference.state(t);
        if !p.iter().chain(&v).all(|x| x.is_finite()) {
            return Err(EvalError::Divergence {
                t: t.to_f64_lossy(),
                step: i,
            });
        }
        steps.push(SimStep {
            t,
            position: p,
            velocity: v,
            ref_position: pr,
            ref_velocity: vr,
        });
        let mut a = [T::zero(); 3];
        for ax in 0..3 {
            a[ax] = cfg.kp * (pr[ax] - p[ax]) + cfg.kd * (vr[ax] - v[ax]);
        }
        if let Some(limit) = cfg.a_max {
            let norm = vec3::norm(a);
            if norm > limit {
                a = a.map(|x| x * limit / norm);
            }
        }
        for ax in 0..3 {
            v[ax] = v[ax] + a[ax] * cfg.dt;
            p[ax] = p[ax] + v[ax] * cfg.dt;
        }
    }
    Ok(SimTrace { dt: cfg.dt, steps })
}

/// RMS and maximum position error after the first 10% of samples.
pub fn tracking_error<T: Real>(trace: &SimTrace<T>) -> Result<(T, T), EvalError> {
    if trace.is_empty() {
        return Err(EvalError::Empty);
    }
    let tail = &trace.steps[trace.len() / 10..];
    let (mut sum, mut max) = (T::zero(), T::zero());
    for s in tail {
        let e = vec3::dist2(s.position, s.ref_position);
        sum = sum + e;
        max = max.max(e);
    }
    Ok(((sum / T::from_usize_lossy(tail.len())).sqrt(), max.sqrt()))
}
