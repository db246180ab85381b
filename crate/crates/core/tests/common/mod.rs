//! Independent reference implementations and random inputs shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use ringtraj::contour::StructuringElement;
use ringtraj::image::BinaryImage;
use ringtraj::spectral::Harmonic;
use ringtraj::FourierTrajectory64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Direct O(Q²) summation of `Σ s_t·exp(-j2πkt/Q)`.
pub fn naive_dft(s: &[f64]) -> Vec<Complex64> {
    let q = s.len();
    (0..q)
        .map(|k| {
            s.iter()
                .enumerate()
                .map(|(t, &v)| {
                    // reduce kt mod q before scaling to keep the angle small
                    let ang = -2.0 * PI * ((k * t) % q) as f64 / q as f64;
                    Complex64::from_polar(v, ang)
                })
                .sum()
        })
        .collect()
}

/// Population variance.
pub fn variance(s: &[f64]) -> f64 {
    let m = s.iter().sum::<f64>() / s.len() as f64;
    s.iter().map(|v| (v - m).powi(2)).sum::<f64>() / s.len() as f64
}

/// Brute-force Minkowski sum of the set pixels with the kernel offsets,
/// clipped to the image.
pub fn minkowski(img: &BinaryImage, se: &StructuringElement) -> BinaryImage {
    let offsets = se.offsets();
    let mut out = BinaryImage::new(img.width(), img.height());
    for (x, y) in img.pixels() {
        for &(dx, dy) in &offsets {
            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
            if nx >= 0 && ny >= 0 && (nx as usize) < img.width() && (ny as usize) < img.height() {
                out.set(nx as usize, ny as usize, true);
            }
        }
    }
    out
}

/// Set pixels with a 4-neighbour outside the set (off-image counts as outside).
pub fn boundary_set(img: &BinaryImage) -> BTreeSet<(usize, usize)> {
    img.pixels()
        .filter(|&(x, y)| {
            let (x, y) = (x as i64, y as i64);
            [(1, 0), (-1, 0), (0, 1), (0, -1)]
                .iter()
                .any(|(dx, dy)| !img.get_signed(x + dx, y + dy))
        })
        .collect()
}

pub fn random_image(rng: &mut impl Rng, max: usize, density: f64) -> BinaryImage {
    let w = rng.gen_range(1..=max);
    let h = rng.gen_range(1..=max);
    BinaryImage::from_fn(w, h, |_, _| rng.gen_bool(density))
}

/// A 4-connected blob grown from a seed with its holes filled, so the
/// background is one 4-connected region.
pub fn random_blob(rng: &mut impl Rng, max: usize) -> BinaryImage {
    let w = rng.gen_range(1..=max);
    let h = rng.gen_range(1..=max);
    let mut img = BinaryImage::new(w, h);
    let mut cells = vec![(rng.gen_range(0..w), rng.gen_range(0..h))];
    img.set(cells[0].0, cells[0].1, true);
    let target = rng.gen_range(1..=(w * h).max(1));
    let mut tries = 0;
    while cells.len() < target && tries < 20 * w * h {
        tries += 1;
        let (x, y) = cells[rng.gen_range(0..cells.len())];
        let (dx, dy) = [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)][rng.gen_range(0..4)];
        let (nx, ny) = (x as i64 + dx, y as i64 + dy);
        if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
            continue;
        }
        let (nx, ny) = (nx as usize, ny as usize);
        if !img.get(nx, ny) {
            img.set(nx, ny, true);
            cells.push((nx, ny));
        }
    }
    fill_holes(&img)
}

/// Sets every background pixel not 4-reachable from outside the image.
pub fn fill_holes(img: &BinaryImage) -> BinaryImage {
    let (w, h) = (img.width() as i64 + 2, img.height() as i64 + 2);
    let mut seen = vec![false; (w * h) as usize];
    let mut queue = VecDeque::from([(0i64, 0i64)]);
    seen[0] = true;
    while let Some((x, y)) = queue.pop_front() {
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let (nx, ny) = (x + dx, y + dy);
            if nx < 0 || ny < 0 || nx >= w || ny >= h {
                continue;
            }
            let idx = (ny * w + nx) as usize;
            if seen[idx] || img.get_signed(nx - 1, ny - 1) {
                continue;
            }
            seen[idx] = true;
            queue.push_back((nx, ny));
        }
    }
    BinaryImage::from_fn(img.width(), img.height(), |x, y| {
        img.get(x, y) || !seen[((y as i64 + 1) * w + x as i64 + 1) as usize]
    })
}

/// Random series with `n` consecutive harmonics, amplitudes up to `10/k`.
pub fn random_trajectory(rng: &mut impl Rng, n: usize) -> FourierTrajectory64 {
    random_trajectory_decay(rng, n, 1)
}

/// Random series with amplitudes up to `10/k^power`.
pub fn random_trajectory_decay(rng: &mut impl Rng, n: usize, power: i32) -> FourierTrajectory64 {
    let period = rng.gen_range(5.0..200.0);
    let offset = [rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0), rng.gen_range(0.0..30.0)];
    let harmonics = (1..=n)
        .map(|k| {
            let scale = 10.0 / (k as f64).powi(power);
            let mut v = || rng.gen_range(-scale..scale);
            Harmonic {
                k,
                a: [v(), v(), v()],
                b: [v(), v(), v()],
            }
        })
        .collect();
    FourierTrajectory64::new(period, offset, harmonics, 2 * n + 1)
}

/// Circle of radius `r` in the x-y plane with period `period`.
pub fn circle(r: f64, period: f64) -> FourierTrajectory64 {
    FourierTrajectory64::new(
        period,
        [0.0; 3],
        vec![Harmonic {
            k: 1,
            a: [r, 0.0, 0.0],
            b: [0.0, r, 0.0],
        }],
        16,
    )
}

/// `x(t) = 1 − (1 + ωt)·e^{−ωt}`, the unit step response of
/// `ẍ + 2ωẋ + ω²x = ω²`.
pub fn critically_damped_step(omega: f64, t: f64) -> f64 {
    1.0 - (1.0 + omega * t) * (-omega * t).exp()
}

/// Steady-state error amplitude of the PD double integrator tracking a
/// sinusoid of amplitude `r` at rate `w`: `|E/R| = w² / |kp − w² + j·kd·w|`.
pub fn pd_error_gain(kp: f64, kd: f64, w: f64) -> f64 {
    w * w / ((kp - w * w).powi(2) + (kd * w).powi(2)).sqrt()
}

/// Box building heightmap rows: `size` x `size` cells at height `h`
/// surrounded by a ring of zero cells.
pub fn box_rows(size: usize, h: f64) -> Vec<Vec<f64>> {
    let n = size + 2;
    (0..n)
        .map(|y| {
            (0..n)
                .map(|x| if (1..=size).contains(&x) && (1..=size).contains(&y) { h } else { 0.0 })
                .collect()
        })
        .collect()
}
