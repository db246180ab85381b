//! End-to-end planning: heightmap to a sequence of per-ring Fourier
//! trajectories with feasibility reports.

use log::{debug, info, warn};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contour::{dilate, find_contours, largest_contour, orient_ccw, ContourError, KernelShape, StructuringElement};
use crate::evaluate::Reference;
use crate::geometry::{voxelize_padded, GeometryError, HeightMap, VoxelGrid};
use crate::image::BinaryImage;
use crate::ringpath::{
    align_start, build_target_path, contour_to_signals, interpolate_z, pixels_to_world, resample_closed,
    slice_centroid, RingPathError, RingSignal, TargetPath, YawMode, YawPolicy,
};
use crate::scalar::Real;
use crate::slicing::{extract_slices, SensorConfig, Slice, SlicePlan, SlicingError};
use crate::spectral::{
    dft, feasibility_check, max_harmonics, to_fourier_trajectory, AxisHarmonic, FeasibilityReport, FourierTrajectory,
    SpectralError, TrajectorySample, ZProfile,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ZMode {
    /// Exact linear climb per ring.
    #[default]
    Linear,
    /// Series of the climb mirrored about the ring's end.
    FourierMirrored,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SynthesisScope {
    /// One series per ring.
    #[default]
    PerRing,
    /// One series over all rings concatenated.
    WholePath,
}

/// Planner settings, read from the JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PlannerConfig<T: Real> {
    #[serde(flatten)]
    pub sensor: SensorConfig<T>,
    /// Voxel edge length in meters.
    pub resolution: T,
    #[serde(default = "default_samples")]
    pub samples_per_ring: usize,
    /// Retained spectrum bins; harmonics used are `(terms - 1) / 2`.
    #[serde(default = "default_terms")]
    pub terms: usize,
    #[serde(default)]
    pub yaw_mode: YawMode,
    /// Heading for `yaw_mode = fixed`, radians.
    #[serde(default)]
    pub yaw_angle: T,
    #[serde(default)]
    pub z_mode: ZMode,
    #[serde(default)]
    pub synthesis_scope: SynthesisScope,
    /// Dilation radius override; defaults to `ceil(d / resolution)`.
    #[serde(default)]
    pub standoff_radius_cells: Option<usize>,
    #[serde(default)]
    pub kernel: KernelShape,
    /// Lengthen periods of infeasible rings instead of failing.
    #[serde(default = "default_true")]
    pub adjust_period: bool,
}

fn default_samples() -> usize {
    100
}

fn default_terms() -> usize {
    21
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("building has zero height")]
    ZeroHeight,
    #[error(transparent)]
    Slicing(#[from] SlicingError),
    #[error("ring {ring}: {source}")]
    Contour { ring: usize, source: ContourError },
    #[error("ring {ring}: {source}")]
    RingPath { ring: usize, source: RingPathError },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("ring {ring} is infeasible at T = {period} s; needs T >= {min_period} s")]
    Infeasible { ring: usize, period: f64, min_period: f64 },
}

impl PlanError {
    /// True for failures caused by an empty slice or a missing contour.
    pub fn is_empty_geometry(&self) -> bool {
        matches!(
            self,
            PlanError::ZeroHeight
                | PlanError::Slicing(SlicingError::EmptySlice { .. })
                | PlanError::Contour {
                    source: ContourError::NoContour,
                    ..
                }
        )
    }
}

impl<T: Real> PlannerConfig<T> {
    pub fn from_json_str(s: &str) -> Result<Self, PlanError> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| PlanError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        self.sensor.validate().map_err(|e| PlanError::Config(e.to_string()))?;
        if !(self.resolution > T::zero()) || !self.resolution.is_finite() {
            return Err(PlanError::Config(format!("resolution must be positive, got {}", self.resolution)));
        }
        if self.samples_per_ring < 3 {
            return Err(PlanError::Config(format!(
                "samples_per_ring must be at least 3, got {}",
                self.samples_per_ring
            )));
        }
        if self.terms == 0 || self.terms > self.samples_per_ring {
            return Err(PlanError::Config(format!(
                "terms must be in 1..={}, got {}",
                self.samples_per_ring, self.terms
            )));
        }
        if matches!(self.standoff_radius_cells, Some(0)) {
            return Err(PlanError::Config("standoff_radius_cells must be positive".into()));
        }
        Ok(())
    }

    /// Harmonics per series for a signal of `q` samples.
    pub fn harmonics_for(&self, q: usize) -> usize {
        ((self.terms - 1) / 2).min(max_harmonics(q))
    }

    fn structuring_element(&self) -> Result<StructuringElement, PlanError> {
        let se = match self.standoff_radius_cells {
            Some(r) => StructuringElement::new(self.kernel, r),
            None => StructuringElement::for_standoff(self.sensor.d, self.resolution)
                .map(|se| StructuringElement { shape: self.kernel, ..se }),
        };
        se.map_err(|source| PlanError::Contour { ring: 0, source })
    }
}

/// Ordered ring trajectories flown back to back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TrajectoryPlan<T: Real> {
    pub rings: Vec<FourierTrajectory<T>>,
    /// Ring indices in flight order.
    pub order: Vec<usize>,
    /// Start time of each entry of `rings`.
    pub t_offsets: Vec<T>,
}

/// Timestamped waypoint of a plan.
pub type Waypoint<T> = TrajectorySample<T>;

impl<T: Real> TrajectoryPlan<T> {
    pub fn new(rings: Vec<FourierTrajectory<T>>) -> Self {
        let mut t = T::zero();
        let t_offsets = rings
            .iter()
            .map(|r| {
                let start = t;
                t = t + r.period;
                start
            })
            .collect();
        let order = rings.iter().map(|r| r.ring_index).collect();
        Self {
            rings,
            order,
            t_offsets,
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn duration(&self) -> T {
        self.rings.iter().map(|r| r.period).sum()
    }

    /// Index of the ring active at `t`, clamped to the first and last ring.
    pub fn ring_at(&self, t: T) -> usize {
        self.t_offsets
            .iter()
            .rposition(|&start| t >= start)
            .unwrap_or(0)
            .min(self.rings.len().saturating_sub(1))
    }

    /// Sample at global time `t`. Past the end the vehicle holds the final
    /// position with zero velocity.
    pub fn sample(&self, t: T) -> TrajectorySample<T> {
        let end = self.duration();
        if t >= end {
            if let Some(last) = self.rings.last() {
                let mut s = last.sample(last.period);
                s.t = t;
                s.velocity = [T::zero(); 3];
                return s;
            }
        }
        let i = self.ring_at(t);
        let mut s = self.rings[i].sample(t - self.t_offsets[i]);
        s.t = t;
        s
    }

    /// `per_ring` equally spaced samples of every ring, in flight order.
    pub fn waypoints(&self, per_ring: usize) -> Vec<Waypoint<T>> {
        let mut out = Vec::with_capacity(per_ring * self.rings.len());
        for (r, &start) in self.rings.iter().zip(&self.t_offsets) {
            for i in 0..per_ring {
                let local = r.period * T::from_usize_lossy(i) / T::from_usize_lossy(per_ring);
                let mut s = r.sample(local);
                s.t = start + local;
                out.push(s);
            }
        }
        out
    }
}

impl<T: Real> Reference<T> for TrajectoryPlan<T> {
    fn state(&self, t: T) -> ([T; 3], [T; 3]) {
        let s = self.sample(t);
        (s.position, s.velocity)
    }

    fn period(&self) -> Option<T> {
        Some(self.duration())
    }
}

/// Intermediate products kept for inspection.
#[derive(Debug, Clone)]
pub struct PlanArtifacts<T: Real> {
    pub grid: VoxelGrid<T>,
    pub slice_plan: SlicePlan<T>,
    pub slices: Vec<Slice<T>>,
    pub dilated: Vec<BinaryImage>,
    pub target: TargetPath<T>,
}

#[derive(Debug, Clone)]
pub struct PlanOutput<T: Real> {
    pub plan: TrajectoryPlan<T>,
    pub feasibility: Vec<FeasibilityReport<T>>,
    pub artifacts: PlanArtifacts<T>,
}

fn perimeter<T: Real>(xs: &[T], ys: &[T]) -> T {
    let n = xs.len();
    (0..n)
        .map(|i| {
            let j = (i + 1) % n;
            (xs[j] - xs[i]).hypot(ys[j] - ys[i])
        })
        .sum()
}

/// Runs the full pipeline on a heightmap.
pub fn plan<T: Real>(hm: &HeightMap<T>, cfg: &PlannerConfig<T>) -> Result<PlanOutput<T>, PlanError> {
    cfg.validate()?;
    let h_b = hm.max_height();
    if !(h_b > T::zero()) {
        return Err(PlanError::ZeroHeight);
    }
    let slice_plan = SlicePlan::new(&cfg.sensor, h_b)?;
    let se = cfg.structuring_element()?;
    let grid = voxelize_padded(hm, cfg.resolution, se.radius + 1)?;
    info!(
        "building {h_b} m, delta_h {} m, {} rings, grid {:?}, standoff radius {} cells",
        slice_plan.delta_h,
        slice_plan.n,
        grid.dims(),
        se.radius
    );
    let slices = extract_slices(&grid, &slice_plan)?;
    let dz = slice_plan.spacing();
    let m = cfg.samples_per_ring;

    let mut rings = Vec::with_capacity(slices.len());
    let mut policies = Vec::with_capacity(slices.len());
    let mut dilated = Vec::with_capacity(slices.len());
    let mut previous_end: Option<[T; 2]> = None;
    for s in &slices {
        let ring = s.ring;
        let grown = dilate(&s.image, &se);
        let contours = find_contours(&grown);
        let outer = largest_contour(&contours).map_err(|source| PlanError::Contour { ring, source })?;
        let (oriented, _) = orient_ccw(outer);
        let rp = |source| PlanError::RingPath { ring, source };
        let (px, py) = contour_to_signals(&oriented).map_err(rp)?;
        let (wx, wy) = pixels_to_world(&px, &py, &grid).map_err(rp)?;
        let (mut xs, mut ys) = resample_closed(&wx, &wy, m).map_err(rp)?;
        if let Some(end) = previous_end {
            align_start(&mut xs, &mut ys, end);
        }
        previous_end = Some([xs[m - 1], ys[m - 1]]);
        let zs = interpolate_z(m, s.altitude, dz).map_err(rp)?;
        policies.push(match cfg.yaw_mode {
            YawMode::CentroidFacing => YawPolicy::CentroidFacing {
                centroid: slice_centroid(&s.image, &grid).expect("non-empty slice"),
            },
            YawMode::TangentFollowing => YawPolicy::TangentFollowing,
            YawMode::Fixed => YawPolicy::Fixed { angle: cfg.yaw_angle },
        });
        debug!("ring {ring}: {} contour points, altitude {}", oriented.len(), s.altitude);
        rings.push(RingSignal { ring, xs, ys, zs });
        dilated.push(grown);
    }
    let target = build_target_path(&rings, &policies).map_err(|source| PlanError::RingPath { ring: 0, source })?;

    let speed = T::lit(0.5) * cfg.sensor.v_max;
    let mut trajectories = Vec::new();
    match cfg.synthesis_scope {
        SynthesisScope::PerRing => {
            for (r, policy) in rings.iter().zip(&policies) {
                let period = perimeter(&r.xs, &r.ys) / speed;
                let tr = synthesize(&r.xs, &r.ys, &r.zs, dz, period, cfg)?;
                trajectories.push(tr.with_yaw(*policy).with_ring_index(r.ring));
            }
        }
        SynthesisScope::WholePath => {
            let period = rings.iter().map(|r| perimeter(&r.xs, &r.ys)).sum::<T>() / speed;
            let climb = dz * T::from_usize_lossy(rings.len());
            let tr = synthesize(&target.xs, &target.ys, &target.zs, climb, period, cfg)?;
            let policy = match policies[0] {
                YawPolicy::CentroidFacing { .. } => {
                    let n = T::from_usize_lossy(policies.len());
                    let mut c = [T::zero(); 2];
                    for p in &policies {
                        if let YawPolicy::CentroidFacing { centroid } = p {
                            c = [c[0] + centroid[0] / n, c[1] + centroid[1] / n];
                        }
                    }
                    YawPolicy::CentroidFacing { centroid: c }
                }
                other => other,
            };
            trajectories.push(tr.with_yaw(policy).with_ring_index(1));
        }
    }

    let mut feasibility = Vec::with_capacity(trajectories.len());
    for tr in &mut trajectories {
        let mut rep = feasibility_check(tr, cfg.sensor.a_max, cfg.sensor.v_max);
        if !rep.feasible {
            if !cfg.adjust_period {
                return Err(PlanError::Infeasible {
                    ring: tr.ring_index,
                    period: tr.period.to_f64_lossy(),
                    min_period: rep.min_period.to_f64_lossy(),
                });
            }
            let mut attempts = 0;
            while !rep.feasible && attempts < 8 {
                let stretched = rep.min_period * (T::one() + T::lit(1e-6) * T::lit(10f64.powi(attempts)));
                warn!(
                    "ring {}: period {} s infeasible, stretching to {} s",
                    tr.ring_index, tr.period, stretched
                );
                *tr = tr.with_period(stretched);
                rep = feasibility_check(tr, cfg.sensor.a_max, cfg.sensor.v_max);
                attempts += 1;
            }
            if !rep.feasible {
                return Err(PlanError::Infeasible {
                    ring: tr.ring_index,
                    period: tr.period.to_f64_lossy(),
                    min_period: rep.min_period.to_f64_lossy(),
                });
            }
        }
        feasibility.push(rep);
    }

    Ok(PlanOutput {
        plan: TrajectoryPlan::new(trajectories),
        feasibility,
        artifacts: PlanArtifacts {
            grid,
            slice_plan,
            slices,
            dilated,
            target,
        },
    })
}

/// Series for one closed x/y signal with the z treatment from `cfg`.
/// `climb` is the altitude gained over one period.
fn synthesize<T: Real>(
    xs: &[T],
    ys: &[T],
    zs: &[T],
    climb: T,
    period: T,
    cfg: &PlannerConfig<T>,
) -> Result<FourierTrajectory<T>, PlanError> {
    let q = xs.len();
    let harmonics = cfg.harmonics_for(q);
    let (sx, sy, sz) = (dft(xs)?, dft(ys)?, dft(zs)?);
    let tr = to_fourier_trajectory([&sx, &sy, &sz], period, harmonics)?;
    let start = zs[0];
    Ok(match cfg.z_mode {
        ZMode::Linear => tr.with_linear_z(start, climb),
        ZMode::FourierMirrored => {
            // z over [0, 2T): the climb followed by its reflection
            let mut ext: Vec<T> = zs.iter().map(|&z| z - start).collect();
            ext.push(climb);
            ext.extend(zs[1..].iter().rev().map(|&z| z - start));
            let spectrum = dft(&ext)?;
            let len = T::from_usize_lossy(ext.len());
            let two = T::lit(2.0);
            let hz = cfg.harmonics_for(ext.len());
            let series = (1..=hz)
                .map(|k| AxisHarmonic {
                    k,
                    a: two * spectrum.bins()[k].re / len,
                    b: -two * spectrum.bins()[k].im / len,
                })
                .collect();
            let mean = spectrum.bins()[0].re / len;
            tr.with_z_profile(
                start + mean,
                ZProfile::FourierMirrored {
                    period: period * two,
                    harmonics: series,
                },
            )
        }
    })
}
