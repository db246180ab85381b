//! Slice dilation, border following, and contour selection.

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::image::BinaryImage;
use crate::scalar::Real;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ContourError {
    #[error("no contour found (building absent in slice)")]
    NoContour,
    #[error("structuring element radius must be at least 1")]
    ZeroRadius,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum KernelShape {
    /// Pixels with `dx² + dy² ≤ r²`.
    #[default]
    Disk,
    /// Full `(2r + 1)²` square.
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructuringElement {
    pub shape: KernelShape,
    pub radius: usize,
}

impl StructuringElement {
    pub fn new(shape: KernelShape, radius: usize) -> Result<Self, ContourError> {
        if radius == 0 {
            return Err(ContourError::ZeroRadius);
        }
        Ok(Self { shape, radius })
    }

    pub fn disk(radius: usize) -> Result<Self, ContourError> {
        Self::new(KernelShape::Disk, radius)
    }

    /// Disk whose radius in cells is `ceil(distance / resolution)`, at least 1.
    pub fn for_standoff<T: Real>(distance: T, resolution: T) -> Result<Self, ContourError> {
        let r = (distance / resolution).ceil().to_usize().unwrap_or(0).max(1);
        Self::disk(r)
    }

    /// Kernel diameter in meters at the given voxel resolution.
    pub fn diameter<T: Real>(&self, resolution: T) -> T {
        T::from_usize_lossy(2 * self.radius + 1) * resolution
    }

    /// Half-width of the kernel's row at vertical offset `dy`.
    fn half_width(&self, dy: i64) -> i64 {
        let r = self.radius as i64;
        match self.shape {
            KernelShape::Square => r,
            KernelShape::Disk => {
                let rem = r * r - dy * dy;
                let mut w = (rem as f64).sqrt() as i64;
                while (w + 1) * (w + 1) <= rem {
                    w += 1;
                }
                while w * w > rem {
                    w -= 1;
                }
                w
            }
        }
    }

    /// Kernel offsets `(dx, dy)`.
    pub fn offsets(&self) -> Vec<(i64, i64)> {
        let r = self.radius as i64;
        (-r..=r)
            .flat_map(|dy| {
                let w = self.half_width(dy);
                (-w..=w).map(move |dx| (dx, dy))
            })
            .collect()
    }
}

/// Minkowski sum of the set pixels with the kernel, clipped to the image.
pub fn dilate(img: &BinaryImage, se: &StructuringElement) -> BinaryImage {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let r = se.radius as i64;
    let rows: Vec<(i64, i64)> = (-r..=r).map(|dy| (dy, se.half_width(dy))).collect();
    let mut out = BinaryImage::new(img.width(), img.height());
    for (x, y) in img.pixels() {
        let (x, y) = (x as i64, y as i64);
        for &(dy, hw) in &rows {
            let ty = y + dy;
            if ty < 0 || ty >= h {
                continue;
            }
            let x0 = (x - hw).max(0);
            let x1 = (x + hw).min(w - 1);
            for tx in x0..=x1 {
                out.set(tx as usize, ty as usize, true);
            }
        }
    }
    out
}

/// Ordered boundary pixels `(x, y)` of one border.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contour {
    pub points: Vec<(usize, usize)>,
    pub closed: bool,
}

impl Contour {
    pub fn new(points: Vec<(usize, usize)>) -> Self {
        Self {
            points,
            closed: true,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Twice the shoelace signed area, positive for counter-clockwise loops
    /// in a y-up frame.
    pub fn signed_area2(&self) -> i64 {
        let n = self.points.len();
        (0..n)
            .map(|i| {
                let (x0, y0) = self.points[i];
                let (x1, y1) = self.points[(i + 1) % n];
                x0 as i64 * y1 as i64 - x1 as i64 * y0 as i64
            })
            .sum()
    }

    pub fn area(&self) -> f64 {
        self.signed_area2().abs() as f64 / 2.0
    }
}

// Clockwise on screen (y down), starting east.
const DIRS: [(i64, i64); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];

fn dir_index(dx: i64, dy: i64) -> usize {
    DIRS.iter()
        .position(|&d| d == (dx, dy))
        .expect("neighbouring pixels")
}

/// Outer borders of every 8-connected component, by Suzuki–Abe border
/// following. Pixels outside the image are background, so components
/// touching the edge still produce closed borders. Hole borders are traced
/// to keep the labelling consistent but are not returned.
pub fn find_contours(img: &BinaryImage) -> Vec<Contour> {
    // Padded label image: 0 background, 1 unvisited foreground, ±NBD borders.
    let (w, h) = (img.width() + 2, img.height() + 2);
    let mut f = vec![0i32; w * h];
    for (x, y) in img.pixels() {
        f[(y + 1) * w + x + 1] = 1;
    }
    let at = |x: i64, y: i64| (y as usize) * w + x as usize;

    let mut contours = Vec::new();
    let mut nbd = 1i32;
    for y in 1..(h - 1) as i64 {
        for x in 1..(w - 1) as i64 {
            let v = f[at(x, y)];
            if v == 0 {
                continue;
            }
            let start = if v == 1 && f[at(x - 1, y)] == 0 {
                Some(((x - 1, y), true))
            } else if v >= 1 && f[at(x + 1, y)] == 0 {
                Some(((x + 1, y), false))
            } else {
                None
            };
            let Some((from, outer)) = start else {
                continue;
            };
            nbd += 1;
            let mut points = Vec::new();

            // Clockwise search around (x, y) from `from` for a foreground pixel.
            let d0 = dir_index(from.0 - x, from.1 - y);
            let first = (0..8)
                .map(|s| DIRS[(d0 + s) % 8])
                .map(|(dx, dy)| (x + dx, y + dy))
                .find(|&(px, py)| f[at(px, py)] != 0);
            let Some(p1) = first else {
                f[at(x, y)] = -nbd;
                if outer {
                    points.push(((x - 1) as usize, (y - 1) as usize));
                    contours.push(Contour::new(points));
                }
                continue;
            };

            let mut p2 = p1;
            let mut p3 = (x, y);
            loop {
                if outer {
                    points.push(((p3.0 - 1) as usize, (p3.1 - 1) as usize));
                }
                // Counter-clockwise search around p3 starting after p2.
                let d2 = dir_index(p2.0 - p3.0, p2.1 - p3.1);
                let mut east_examined = false;
                let mut p4 = p3;
                for s in 1..=8 {
                    let d = (d2 + 8 - s) % 8;
                    let q = (p3.0 + DIRS[d].0, p3.1 + DIRS[d].1);
                    if f[at(q.0, q.1)] != 0 {
                        p4 = q;
                        break;
                    }
                    if d == 0 {
                        east_examined = true;
                    }
                }
                let cell = &mut f[at(p3.0, p3.1)];
                if east_examined {
                    *cell = -nbd;
                } else if *cell == 1 {
                    *cell = nbd;
                }
                if p4 == (x, y) && p3 == p1 {
                    break;
                }
                p2 = p3;
                p3 = p4;
            }
            if outer {
                contours.push(Contour::new(points));
            }
        }
    }
    contours
}

/// Contour enclosing the largest area. Ties go to more points, then to the
/// lexicographically smallest first point.
pub fn largest_contour(cs: &[Contour]) -> Result<&Contour, ContourError> {
    cs.iter()
        .max_by(|a, b| {
            a.signed_area2()
                .abs()
                .cmp(&b.signed_area2().abs())
                .then(a.len().cmp(&b.len()))
                .then_with(|| b.points.first().cmp(&a.points.first()))
        })
        .ok_or(ContourError::NoContour)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    AlreadyCcw,
    Reversed,
    /// Fewer than three points or zero area; returned unchanged.
    Degenerate,
}

/// Orders the contour counter-clockwise (positive shoelace area in pixel
/// coordinates, which map to world x/y without a flip). The first point is
/// kept when reversing.
pub fn orient_ccw(c: &Contour) -> (Contour, Orientation) {
    let area2 = c.signed_area2();
    if c.len() < 3 || area2 == 0 {
        warn!("degenerate contour with {} points left unoriented", c.len());
        return (c.clone(), Orientation::Degenerate);
    }
    if area2 > 0 {
        return (c.clone(), Orientation::AlreadyCcw);
    }
    let mut points = Vec::with_capacity(c.len());
    points.push(c.points[0]);
    points.extend(c.points[1..].iter().rev());
    (
        Contour {
            points,
            closed: c.closed,
        },
        Orientation::Reversed,
    )
}
