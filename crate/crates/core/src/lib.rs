//! Coverage trajectories for building inspection.
//!
//! A 2.5D heightmap is voxelized and sliced at ring altitudes. Each slice is
//! grown by the standoff distance, traced, and resampled into a closed ring;
//! each ring becomes a truncated Fourier series that can be sampled,
//! differentiated, and checked against speed and acceleration limits.
//!
//! All numeric types are generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod contour;
pub mod evaluate;
pub mod geometry;
pub mod image;
pub mod planner;
pub mod ringpath;
pub mod scalar;
pub mod slicing;
pub mod spectral;

pub use scalar::Real;

pub use baseline::{polyeval, polyfit, PolyTrajectory};
pub use contour::{Contour, StructuringElement};
pub use evaluate::{build_table, mse, simulate_follow, tracking_error, EvalReport, FollowerConfig, SimTrace};
pub use geometry::{HeightMap, HeightMapMeta, VoxelGrid};
pub use image::BinaryImage;
pub use planner::{plan, PlannerConfig, TrajectoryPlan};
pub use ringpath::{RingSignal, TargetPath};
pub use slicing::{SensorConfig, Slice};
pub use spectral::{feasibility_check, FeasibilityReport, FourierTrajectory, Spectrum, TrajectorySample};

pub type HeightMap64 = HeightMap<f64>;
pub type VoxelGrid64 = VoxelGrid<f64>;
pub type SensorConfig64 = SensorConfig<f64>;
pub type RingSignal64 = RingSignal<f64>;
pub type TargetPath64 = TargetPath<f64>;
pub type Spectrum64 = Spectrum<f64>;
pub type FourierTrajectory64 = FourierTrajectory<f64>;
pub type FourierTrajectory32 = FourierTrajectory<f32>;
pub type TrajectorySample64 = TrajectorySample<f64>;
pub type FeasibilityReport64 = FeasibilityReport<f64>;
pub type PolyTrajectory64 = PolyTrajectory<f64>;
pub type EvalReport64 = EvalReport<f64>;
pub type FollowerConfig64 = FollowerConfig<f64>;
pub type SimTrace64 = SimTrace<f64>;
pub type PlannerConfig64 = PlannerConfig<f64>;
pub type TrajectoryPlan64 = TrajectoryPlan<f64>;
