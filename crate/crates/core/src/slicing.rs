//! Ring spacing and per-ring horizontal slices of the voxel grid.
//!
//! Ring and layer indices are 1-based in the formulas here and 0-based in
//! storage. [`layer_storage_index`] is the only place that converts.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::VoxelGrid;
use crate::image::BinaryImage;
use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum SlicingError {
    #[error("invalid sensor configuration: {0}")]
    Sensor(String),
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("ring index {l} outside 1..={n}")]
    RingOutOfRange { l: usize, n: usize },
    #[error("layer {k} outside 1..={nz}")]
    LayerOutOfRange { k: usize, nz: usize },
    #[error("slice for ring {ring} at {altitude} m is empty")]
    EmptySlice { ring: usize, altitude: f64 },
}

/// Camera geometry and vehicle limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SensorConfig<T: Real> {
    /// Standoff distance to the wall, meters.
    pub d: T,
    /// Focal length, meters.
    pub f: T,
    /// Sensor height, meters.
    pub h_s: T,
    /// Vertical overlap fraction in `[0, 1)`.
    pub o: T,
    pub v_max: T,
    pub a_max: T,
}

impl<T: Real> SensorConfig<T> {
    pub fn validate(&self) -> Result<(), SlicingError> {
        let positive = [
            ("d", self.d),
            ("f", self.f),
            ("h_s", self.h_s),
            ("v_max", self.v_max),
            ("a_max", self.a_max),
        ];
        for (name, v) in positive {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(SlicingError::Sensor(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.o >= T::zero() && self.o < T::one()) {
            return Err(SlicingError::Sensor(format!("o must lie in [0, 1), got {}", self.o)));
        }
        Ok(())
    }
}

/// Vertical spacing between consecutive rings for the requested image overlap.
pub fn altitude_increment<T: Real>(cfg: &SensorConfig<T>) -> Result<T, SlicingError> {
    if !(cfg.d > T::zero() && cfg.f > T::zero() && cfg.h_s > T::zero()) {
        return Err(SlicingError::Sensor("d, f and h_s must be positive".into()));
    }
    if !(cfg.o >= T::zero() && cfg.o < T::one()) {
        return Err(SlicingError::Sensor(format!("o must lie in [0, 1), got {}", cfg.o)));
    }
    Ok(cfg.d / cfg.f * cfg.h_s * (T::one() - cfg.o))
}

fn positive<T: Real>(name: &'static str, v: T) -> Result<(), SlicingError> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(SlicingError::NonPositive {
            name,
            value: v.to_f64_lossy(),
        })
    }
}

/// Number of rings needed to cover a building of height `h_b`.
pub fn ring_count<T: Real>(h_b: T, delta_h: T) -> Result<usize, SlicingError> {
    positive("h_b", h_b)?;
    positive("delta_h", delta_h)?;
    Ok((h_b / delta_h).ceil().to_usize().unwrap_or(1).max(1))
}

/// Starting altitude of ring `l` (1-based).
pub fn ring_altitude<T: Real>(l: usize, h_b: T, n: usize) -> Result<T, SlicingError> {
    if l == 0 || l > n {
        return Err(SlicingError::RingOutOfRange { l, n });
    }
    Ok(h_b / T::from_usize_lossy(n) * T::from_usize_lossy(l - 1))
}

/// 1-based voxel layer holding the slice for ring `l`, clamped to `[1, r]`.
pub fn slice_index<T: Real>(l: usize, h_b: T, r: usize, n: usize) -> Result<usize, SlicingError> {
    positive("h_b", h_b)?;
    if r == 0 {
        return Err(SlicingError::NonPositive { name: "r", value: 0.0 });
    }
    ring_altitude(l, h_b, n)?;
    // h(l) / h_b = (l - 1) / n exactly, so the floor is taken in integers.
    let k = (l - 1) * r / n + 1;
    Ok(k.clamp(1, r))
}

/// Converts a 1-based layer to a 0-based storage index.
#[inline]
pub fn layer_storage_index(k: usize, nz: usize) -> Result<usize, SlicingError> {
    if k == 0 || k > nz {
        Err(SlicingError::LayerOutOfRange { k, nz })
    } else {
        Ok(k - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicePlan<T: Real> {
    pub delta_h: T,
    pub building_height: T,
    pub n: usize,
}

impl<T: Real> SlicePlan<T> {
    pub fn new(cfg: &SensorConfig<T>, building_height: T) -> Result<Self, SlicingError> {
        let delta_h = altitude_increment(cfg)?;
        let n = ring_count(building_height, delta_h)?;
        Ok(Self {
            delta_h,
            building_height,
            n,
        })
    }

    /// Ring altitudes `h(1) .. h(n)`.
    pub fn altitudes(&self) -> Vec<T> {
        (1..=self.n)
            .map(|l| ring_altitude(l, self.building_height, self.n).expect("in range"))
            .collect()
    }

    /// Altitude gained per ring, `h_b / n`.
    pub fn spacing(&self) -> T {
        self.building_height / T::from_usize_lossy(self.n)
    }

    /// 1-based slice layers for every ring, given `r` layers along height.
    pub fn slice_indices(&self, r: usize) -> Vec<usize> {
        (1..=self.n)
            .map(|l| slice_index(l, self.building_height, r, self.n).expect("in range"))
            .collect()
    }
}

/// Horizontal occupancy slice for ring `ring` (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct Slice<T: Real> {
    pub ring: usize,
    pub altitude: T,
    pub image: BinaryImage,
}

/// Binary image of 1-based layer `k`.
pub fn extract_slice<T: Real>(grid: &VoxelGrid<T>, k: usize) -> Result<BinaryImage, SlicingError> {
    let nz = grid.dims()[2];
    let idx = layer_storage_index(k, nz)?;
    Ok(grid.layer(idx).expect("checked layer"))
}

/// Slices for every ring of `plan`; empty slices are errors.
pub fn extract_slices<T: Real>(
    grid: &VoxelGrid<T>,
    plan: &SlicePlan<T>,
) -> Result<Vec<Slice<T>>, SlicingError> {
    let r = grid.dims()[2];
    plan.altitudes()
        .into_iter()
        .zip(plan.slice_indices(r))
        .enumerate()
        .map(|(i, (altitude, k))| {
            let image = extract_slice(grid, k)?;
            if image.is_empty() {
                return Err(SlicingError::EmptySlice {
                    ring: i + 1,
                    altitude: altitude.to_f64_lossy(),
                });
            }
            Ok(Slice {
                ring: i + 1,
                altitude,
                image,
            })
        })
        .collect()
}
