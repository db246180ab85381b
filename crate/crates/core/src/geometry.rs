//! 2.5D heightmaps and their binary voxel occupancy grid.
//!
//! Heightmap cells and voxels both use the cell-center convention: cell `c`
//! spans `[origin + c·size, origin + (c+1)·size)` and its center sits at
//! `origin + (c + 0.5)·size`.

use std::fs;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::image::BinaryImage;
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed heightmap: {0}")]
    Malformed(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("bad metadata: {0}")]
    Metadata(String),
    #[error("resolution {resolution} unusable for a {width} x {depth} m footprint")]
    Resolution {
        resolution: f64,
        width: f64,
        depth: f64,
    },
    #[error("voxel index ({i}, {j}, {k}) outside grid {nx} x {ny} x {nz}")]
    OutOfRange {
        i: i64,
        j: i64,
        k: i64,
        nx: usize,
        ny: usize,
        nz: usize,
    },
}

/// Sidecar metadata for a heightmap CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
#[serde(deny_unknown_fields)]
pub struct HeightMapMeta<T: Real> {
    pub cell_size: T,
    pub origin: [T; 2],
}

impl<T: Real> HeightMapMeta<T> {
    pub fn from_json_str(s: &str) -> Result<Self, GeometryError> {
        serde_json::from_str(s).map_err(|e| GeometryError::Metadata(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, GeometryError> {
        let path = path.as_ref();
        let s = fs::read_to_string(path).map_err(|source| GeometryError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&s)
    }
}

/// One altitude per ground cell. Rows are y ascending, columns x ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightMap<T: Real> {
    width: usize,
    depth: usize,
    cell_size: T,
    origin: [T; 2],
    heights: Vec<T>,
}

impl<T: Real> HeightMap<T> {
    /// `heights` is row-major with `depth` rows of `width` entries.
    pub fn new(
        width: usize,
        depth: usize,
        cell_size: T,
        origin: [T; 2],
        heights: Vec<T>,
    ) -> Result<Self, GeometryError> {
        if width == 0 || depth == 0 {
            return Err(GeometryError::Malformed("empty matrix".into()));
        }
        if heights.len() != width * depth {
            return Err(GeometryError::Malformed(format!(
                "{} values for a {width} x {depth} grid",
                heights.len()
            )));
        }
        if !(cell_size > T::zero()) || !cell_size.is_finite() {
            return Err(GeometryError::Metadata(format!(
                "cell_size must be positive, got {cell_size}"
            )));
        }
        if !origin.iter().all(|v| v.is_finite()) {
            return Err(GeometryError::Metadata("origin must be finite".into()));
        }
        if let Some((idx, h)) = heights
            .iter()
            .enumerate()
            .find(|(_, h)| !h.is_finite() || **h < T::zero())
        {
            return Err(GeometryError::InvalidModel(format!(
                "height {h} at row {}, column {} must be a non-negative number",
                idx / width,
                idx % width
            )));
        }
        Ok(Self {
            width,
            depth,
            cell_size,
            origin,
            heights,
        })
    }

    /// Builds from row slices (`rows[y][x]`).
    pub fn from_rows(rows: &[Vec<T>], meta: HeightMapMeta<T>) -> Result<Self, GeometryError> {
        let depth = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if let Some(y) = rows.iter().position(|r| r.len() != width) {
            return Err(GeometryError::Malformed(format!(
                "row {y} has {} entries, expected {width}",
                rows[y].len()
            )));
        }
        let heights = rows.iter().flatten().copied().collect();
        Self::new(width, depth, meta.cell_size, meta.origin, heights)
    }

    /// Parses a numeric CSV matrix without header.
    pub fn from_csv_reader<R: Read>(reader: R, meta: HeightMapMeta<T>) -> Result<Self, GeometryError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows = Vec::new();
        for (y, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| GeometryError::Malformed(e.to_string()))?;
            if rec.iter().all(str::is_empty) {
                continue;
            }
            let row = rec
                .iter()
                .enumerate()
                .map(|(x, field)| {
                    field
                        .parse::<f64>()
                        .map(T::lit)
                        .map_err(|_| {
                            GeometryError::Malformed(format!(
                                "row {y}, column {x}: {field:?} is not a number"
                            ))
                        })
                })
                .collect::<Result<Vec<T>, _>>()?;
            rows.push(row);
        }
        Self::from_rows(&rows, meta)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn cell_size(&self) -> T {
        self.cell_size
    }

    pub fn origin(&self) -> [T; 2] {
        self.origin
    }

    pub fn heights(&self) -> &[T] {
        &self.heights
    }

    #[inline]
    pub fn height_at(&self, x: usize, y: usize) -> T {
        self.heights[y * self.width + x]
    }

    /// Height of the cell covering world point `(x, y)`; zero outside the map.
    pub fn height_at_world(&self, x: T, y: T) -> T {
        let cx = ((x - self.origin[0]) / self.cell_size).floor();
        let cy = ((y - self.origin[1]) / self.cell_size).floor();
        if cx < T::zero() || cy < T::zero() {
            return T::zero();
        }
        match (cx.to_usize(), cy.to_usize()) {
            (Some(cx), Some(cy)) if cx < self.width && cy < self.depth => self.height_at(cx, cy),
            _ => T::zero(),
        }
    }

    pub fn max_height(&self) -> T {
        self.heights.iter().copied().fold(T::zero(), T::max)
    }
}

/// Reads `path` as a heightmap CSV with the given metadata.
pub fn load_heightmap<T: Real>(
    path: impl AsRef<Path>,
    meta: HeightMapMeta<T>,
) -> Result<HeightMap<T>, GeometryError> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|source| GeometryError::Io {
        path: path.display().to_string(),
        source,
    })?;
    HeightMap::from_csv_reader(file, meta)
}

/// Building height and the world bounding box of its non-zero cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildingMeta<T: Real> {
    pub height: T,
    /// `[min_x, min_y, max_x, max_y]` in meters.
    pub footprint: [T; 4],
}

impl<T: Real> BuildingMeta<T> {
    pub fn from_heightmap(hm: &HeightMap<T>) -> Result<Self, GeometryError> {
        let height = hm.max_height();
        if !(height > T::zero()) {
            return Err(GeometryError::InvalidModel("building height is zero".into()));
        }
        let mut bbox = [T::infinity(), T::infinity(), T::neg_infinity(), T::neg_infinity()];
        for y in 0..hm.depth {
            for x in 0..hm.width {
                if hm.height_at(x, y) > T::zero() {
                    let x0 = hm.origin[0] + T::from_usize_lossy(x) * hm.cell_size;
                    let y0 = hm.origin[1] + T::from_usize_lossy(y) * hm.cell_size;
                    bbox[0] = bbox[0].min(x0);
                    bbox[1] = bbox[1].min(y0);
                    bbox[2] = bbox[2].max(x0 + hm.cell_size);
                    bbox[3] = bbox[3].max(y0 + hm.cell_size);
                }
            }
        }
        Ok(Self {
            height,
            footprint: bbox,
        })
    }
}

/// Binary 3D occupancy grid. `nz` is the number of layers along height.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelGrid<T: Real> {
    dims: [usize; 3],
    resolution: T,
    origin: [T; 3],
    occupancy: Vec<bool>,
}

impl<T: Real> VoxelGrid<T> {
    pub fn empty(dims: [usize; 3], resolution: T, origin: [T; 3]) -> Self {
        Self {
            dims,
            resolution,
            origin,
            occupancy: vec![false; dims[0] * dims[1] * dims[2]],
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn resolution(&self) -> T {
        self.resolution
    }

    pub fn origin(&self) -> [T; 3] {
        self.origin
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.dims[1] + j) * self.dims[0] + i
    }

    #[inline]
    pub fn is_occupied(&self, i: usize, j: usize, k: usize) -> bool {
        self.occupancy[self.offset(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: bool) {
        let o = self.offset(i, j, k);
        self.occupancy[o] = v;
    }

    pub fn occupied_count(&self) -> usize {
        self.occupancy.iter().filter(|&&b| b).count()
    }

    /// Occupancy of 0-based layer `k` as an `nx` by `ny` image.
    pub fn layer(&self, k: usize) -> Option<BinaryImage> {
        if k >= self.dims[2] {
            return None;
        }
        let [nx, ny, _] = self.dims;
        Some(BinaryImage::from_fn(nx, ny, |i, j| self.is_occupied(i, j, k)))
    }

    fn check(&self, i: i64, j: i64, k: i64) -> Result<[usize; 3], GeometryError> {
        let [nx, ny, nz] = self.dims;
        let ok = |v: i64, n: usize| v >= 0 && (v as usize) < n;
        if ok(i, nx) && ok(j, ny) && ok(k, nz) {
            Ok([i as usize, j as usize, k as usize])
        } else {
            Err(GeometryError::OutOfRange { i, j, k, nx, ny, nz })
        }
    }

    /// Center of voxel `(i, j, k)` in world meters.
    pub fn grid_to_world(&self, i: i64, j: i64, k: i64) -> Result<[T; 3], GeometryError> {
        let idx = self.check(i, j, k)?;
        let half = T::lit(0.5);
        Ok([0, 1, 2].map(|a| self.origin[a] + (T::from_usize_lossy(idx[a]) + half) * self.resolution))
    }

    /// Voxel containing world point `p`.
    pub fn world_to_grid(&self, p: [T; 3]) -> Result<[usize; 3], GeometryError> {
        let idx = [0, 1, 2].map(|a| {
            ((p[a] - self.origin[a]) / self.resolution)
                .floor()
                .to_i64()
                .unwrap_or(i64::MIN)
        });
        self.check(idx[0], idx[1], idx[2])
    }
}

/// Column-fill voxelization with no margin; see [`voxelize_padded`].
pub fn voxelize<T: Real>(hm: &HeightMap<T>, resolution: T) -> Result<VoxelGrid<T>, GeometryError> {
    voxelize_padded(hm, resolution, 0)
}

/// Column-fill voxelization of a heightmap, surrounded by `margin` free
/// voxels on each horizontal side.
///
/// Voxel `(i, j, k)` is occupied iff `(k + 0.5)·resolution` is below the
/// height of the heightmap cell covering the voxel's (x, y) center.
pub fn voxelize_padded<T: Real>(
    hm: &HeightMap<T>,
    resolution: T,
    margin: usize,
) -> Result<VoxelGrid<T>, GeometryError> {
    let width_m = T::from_usize_lossy(hm.width) * hm.cell_size;
    let depth_m = T::from_usize_lossy(hm.depth) * hm.cell_size;
    if !(resolution > T::zero()) || !resolution.is_finite() || resolution > width_m.min(depth_m) {
        return Err(GeometryError::Resolution {
            resolution: resolution.to_f64_lossy(),
            width: width_m.to_f64_lossy(),
            depth: depth_m.to_f64_lossy(),
        });
    }
    let cells = |extent: T| (extent / resolution).ceil().to_usize().unwrap_or(0).max(1);
    let nx = cells(width_m) + 2 * margin;
    let ny = cells(depth_m) + 2 * margin;
    let nz = cells(hm.max_height());
    let pad = T::from_usize_lossy(margin) * resolution;
    let origin = [hm.origin[0] - pad, hm.origin[1] - pad, T::zero()];
    let mut grid = VoxelGrid::empty([nx, ny, nz], resolution, origin);
    let half = T::lit(0.5);
    for j in 0..ny {
        let y = origin[1] + (T::from_usize_lossy(j) + half) * resolution;
        for i in 0..nx {
            let x = origin[0] + (T::from_usize_lossy(i) + half) * resolution;
            let h = hm.height_at_world(x, y);
            for k in 0..nz {
                if (T::from_usize_lossy(k) + half) * resolution < h {
                    grid.set(i, j, k, true);
                } else {
                    break;
                }
            }
        }
    }
    Ok(grid)
}
