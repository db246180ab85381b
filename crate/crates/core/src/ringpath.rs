//! Ring signals: contour coordinates split into per-axis sequences,
//! resampled by arc length, lifted with a z ramp, and concatenated.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contour::Contour;
use crate::geometry::{GeometryError, VoxelGrid};
use crate::image::BinaryImage;
use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum RingPathError {
    #[error("contour has {0} points, need at least 3")]
    Degenerate(usize),
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("polyline has zero length")]
    ZeroLength,
    #[error("sequence lengths differ: {0:?}")]
    LengthMismatch(Vec<usize>),
    #[error("rings have inconsistent sample counts: {0:?}")]
    InconsistentRings(Vec<usize>),
    #[error("no rings")]
    NoRings,
    #[error("{rings} rings but {policies} yaw policies")]
    YawPolicyCount { rings: usize, policies: usize },
    #[error("pixel out of range: {0}")]
    Pixel(String),
}

impl From<GeometryError> for RingPathError {
    fn from(e: GeometryError) -> Self {
        RingPathError::Pixel(e.to_string())
    }
}

/// How the camera heading is chosen along the path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum YawMode {
    /// Face the centroid of the ring's building slice.
    #[default]
    CentroidFacing,
    /// Face along the direction of travel.
    TangentFollowing,
    /// Constant heading.
    Fixed,
}

/// Resolved heading rule for one ring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", tag = "mode", rename_all = "kebab-case")]
pub enum YawPolicy<T: Real> {
    CentroidFacing { centroid: [T; 2] },
    TangentFollowing,
    Fixed { angle: T },
}

/// Wraps an angle to `(-π, π]`.
pub fn wrap_angle<T: Real>(a: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut w = a - two_pi * ((a + T::PI()) / two_pi).floor();
    // w in [-π, π)
    if w <= -T::PI() {
        w = w + two_pi;
    }
    w
}

/// Heading from `(x, y)` toward `target`, or `None` when they coincide.
pub fn heading_to<T: Real>(x: T, y: T, target: [T; 2]) -> Option<T> {
    let (dx, dy) = (target[0] - x, target[1] - y);
    if dx == T::zero() && dy == T::zero() {
        None
    } else {
        Some(wrap_angle(dy.atan2(dx)))
    }
}

/// Per-ring discrete position signals in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct RingSignal<T: Real> {
    /// 1-based ring index.
    pub ring: usize,
    pub xs: Vec<T>,
    pub ys: Vec<T>,
    pub zs: Vec<T>,
}

impl<T: Real> RingSignal<T> {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

/// Splits an ordered contour into its x and y pixel sequences.
pub fn contour_to_signals(c: &Contour) -> Result<(Vec<usize>, Vec<usize>), RingPathError> {
    if c.len() < 3 {
        return Err(RingPathError::Degenerate(c.len()));
    }
    Ok(c.points.iter().copied().unzip())
}

/// Half-open linear climb: `z[i] = h_start + dz·i/m`.
pub fn interpolate_z<T: Real>(m: usize, h_start: T, dz: T) -> Result<Vec<T>, RingPathError> {
    if m < 2 {
        return Err(RingPathError::TooFewSamples { need: 2, got: m });
    }
    let mt = T::from_usize_lossy(m);
    Ok((0..m)
        .map(|i| h_start + dz * T::from_usize_lossy(i) / mt)
        .collect())
}

/// Resamples the closed polyline through `(xs, ys)` to `n` points equally
/// spaced in arc length, starting at the first input point.
pub fn resample_closed<T: Real>(
    xs: &[T],
    ys: &[T],
    n: usize,
) -> Result<(Vec<T>, Vec<T>), RingPathError> {
    if xs.len() != ys.len() {
        return Err(RingPathError::LengthMismatch(vec![xs.len(), ys.len()]));
    }
    let m = xs.len();
    if m < 3 {
        return Err(RingPathError::Degenerate(m));
    }
    if n < 3 {
        return Err(RingPathError::TooFewSamples { need: 3, got: n });
    }
    let seg_len = |i: usize| {
        let j = (i + 1) % m;
        (xs[j] - xs[i]).hypot(ys[j] - ys[i])
    };
    let lengths: Vec<T> = (0..m).map(seg_len).collect();
    let total: T = lengths.iter().copied().sum();
    if !(total > T::zero()) {
        return Err(RingPathError::ZeroLength);
    }

    let mut out_x = Vec::with_capacity(n);
    let mut out_y = Vec::with_capacity(n);
    let nt = T::from_usize_lossy(n);
    let mut seg = 0usize;
    let mut seg_start = T::zero();
    for j in 0..n {
        let s = total * T::from_usize_lossy(j) / nt;
        while seg + 1 < m && seg_start + lengths[seg] <= s {
            seg_start = seg_start + lengths[seg];
            seg += 1;
        }
        let next = (seg + 1) % m;
        let frac = if lengths[seg] > T::zero() {
            ((s - seg_start) / lengths[seg]).min(T::one()).max(T::zero())
        } else {
            T::zero()
        };
        out_x.push(xs[seg] + (xs[next] - xs[seg]) * frac);
        out_y.push(ys[seg] + (ys[next] - ys[seg]) * frac);
    }
    Ok((out_x, out_y))
}

/// World x/y of pixel centers on `grid`'s horizontal plane.
pub fn pixels_to_world<T: Real>(
    xs: &[usize],
    ys: &[usize],
    grid: &VoxelGrid<T>,
) -> Result<(Vec<T>, Vec<T>), RingPathError> {
    if xs.len() != ys.len() {
        return Err(RingPathError::LengthMismatch(vec![xs.len(), ys.len()]));
    }
    let mut wx = Vec::with_capacity(xs.len());
    let mut wy = Vec::with_capacity(ys.len());
    for (&x, &y) in xs.iter().zip(ys) {
        let p = grid.grid_to_world(x as i64, y as i64, 0)?;
        wx.push(p[0]);
        wy.push(p[1]);
    }
    Ok((wx, wy))
}

/// Mean world x/y of the set pixels of a slice, `None` for an empty slice.
pub fn slice_centroid<T: Real>(img: &BinaryImage, grid: &VoxelGrid<T>) -> Option<[T; 2]> {
    let (mut sx, mut sy, mut count) = (T::zero(), T::zero(), 0usize);
    for (x, y) in img.pixels() {
        let p = grid.grid_to_world(x as i64, y as i64, 0).ok()?;
        sx = sx + p[0];
        sy = sy + p[1];
        count += 1;
    }
    (count > 0).then(|| {
        let c = T::from_usize_lossy(count);
        [sx / c, sy / c]
    })
}

/// Rotates the closed sequence so it starts at the point nearest `target`.
pub fn align_start<T: Real>(xs: &mut [T], ys: &mut [T], target: [T; 2]) {
    let best = (0..xs.len())
        .map(|i| (xs[i] - target[0]).hypot(ys[i] - target[1]))
        .enumerate()
        .fold((0, T::infinity()), |acc, (i, d)| if d < acc.1 { (i, d) } else { acc })
        .0;
    xs.rotate_left(best);
    ys.rotate_left(best);
}

/// Concatenated multi-ring path with per-sample heading.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetPath<T: Real> {
    pub xs: Vec<T>,
    pub ys: Vec<T>,
    pub zs: Vec<T>,
    /// Sample offsets where rings 2.. begin.
    pub ring_offsets: Vec<usize>,
    pub yaw: Vec<T>,
}

impl<T: Real> TargetPath<T> {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn point(&self, i: usize) -> [T; 3] {
        [self.xs[i], self.ys[i], self.zs[i]]
    }
}

/// Heading per sample of one closed ring.
pub fn yaw_profile<T: Real>(xs: &[T], ys: &[T], policy: &YawPolicy<T>, previous: T) -> Vec<T> {
    let n = xs.len();
    let mut last = previous;
    (0..n)
        .map(|i| {
            let yaw = match *policy {
                YawPolicy::CentroidFacing { centroid } => heading_to(xs[i], ys[i], centroid),
                YawPolicy::TangentFollowing => {
                    let j = (i + 1) % n;
                    let (dx, dy) = (xs[j] - xs[i], ys[j] - ys[i]);
                    (dx != T::zero() || dy != T::zero()).then(|| wrap_angle(dy.atan2(dx)))
                }
                YawPolicy::Fixed { angle } => Some(wrap_angle(angle)),
            };
            last = yaw.unwrap_or(last);
            last
        })
        .collect()
}

/// Concatenates rings in order and attaches a heading per sample.
pub fn build_target_path<T: Real>(
    rings: &[RingSignal<T>],
    policies: &[YawPolicy<T>],
) -> Result<TargetPath<T>, RingPathError> {
    let first = rings.first().ok_or(RingPathError::NoRings)?;
    if policies.len() != rings.len() {
        return Err(RingPathError::YawPolicyCount {
            rings: rings.len(),
            policies: policies.len(),
        });
    }
    let n = first.len();
    for r in rings {
        if r.ys.len() != r.len() || r.zs.len() != r.len() {
            return Err(RingPathError::LengthMismatch(vec![r.xs.len(), r.ys.len(), r.zs.len()]));
        }
    }
    if rings.iter().any(|r| r.len() != n) {
        return Err(RingPathError::InconsistentRings(rings.iter().map(RingSignal::len).collect()));
    }
    let mut path = TargetPath {
        xs: Vec::with_capacity(n * rings.len()),
        ys: Vec::with_capacity(n * rings.len()),
        zs: Vec::with_capacity(n * rings.len()),
        ring_offsets: Vec::new(),
        yaw: Vec::with_capacity(n * rings.len()),
    };
    let mut previous = T::zero();
    for (idx, (r, policy)) in rings.iter().zip(policies).enumerate() {
        if idx > 0 {
            path.ring_offsets.push(path.xs.len());
        }
        let yaw = yaw_profile(&r.xs, &r.ys, policy, previous);
        previous = *yaw.last().unwrap_or(&previous);
        path.xs.extend_from_slice(&r.xs);
        path.ys.extend_from_slice(&r.ys);
        path.zs.extend_from_slice(&r.zs);
        path.yaw.extend(yaw);
    }
    Ok(path)
}
