//! Least-squares polynomial fits of per-axis signals, the comparison
//! baseline for the Fourier reconstruction.
//!
//! Samples are placed at `u = linspace(-1, 1, Q)`. Fits use a basis that is
//! orthonormal on those points, generated by Arnoldi iteration on
//! `diag(u)`, so high degrees stay well conditioned. The basis is carried
//! as its Hessenberg recurrence and evaluated anywhere in `u`. Near full
//! degree that recurrence loses accuracy on equispaced points; when it drifts
//! from the basis columns the fit is evaluated instead by barycentric
//! interpolation of its values at the samples.

use log::warn;
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum BaselineError {
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("time range must be increasing, got [{0}, {1}]")]
    BadRange(f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
enum Basis<T: Real> {
    /// `Σ c_i·u^i`, evaluated by Horner's rule.
    Monomial(Vec<T>),
    /// `Σ c_i·q_i(u)` with `u·q_{k-1} = Σ_{j≤k} H[j][k-1]·q_j` and `q_0 = 1`.
    Orthogonal { coeffs: Vec<T>, hessenberg: Vec<Vec<T>> },
    /// Fitted values at `linspace(-1, 1, Q)` with barycentric weights.
    Nodal { values: Vec<T>, weights: Vec<T> },
}

fn recurrence<T: Real>(coeffs: &[T], hessenberg: &[Vec<T>], u: T) -> T {
    let mut q = Vec::with_capacity(coeffs.len());
    q.push(T::one());
    for k in 1..coeffs.len() {
        let h = &hessenberg[k - 1];
        let mut v = u * q[k - 1];
        for (j, qj) in q.iter().enumerate() {
            v = v - h[j] * *qj;
        }
        q.push(v / h[k]);
    }
    coeffs.iter().zip(&q).map(|(&c, &qi)| c * qi).sum()
}

/// Weights `(-1)^j·C(n, j)` for equispaced nodes, scaled so the largest is one.
fn equispaced_weights<T: Real>(m: usize) -> Vec<T> {
    let n = m - 1;
    let mid = n / 2;
    let mut mag = vec![0.0f64; m];
    mag[mid] = 1.0;
    for j in (0..mid).rev() {
        mag[j] = mag[j + 1] * (j + 1) as f64 / (n - j) as f64;
    }
    for j in mid + 1..m {
        mag[j] = mag[j - 1] * (n - j + 1) as f64 / j as f64;
    }
    mag.iter()
        .enumerate()
        .map(|(j, &w)| T::lit(if j % 2 == 0 { w } else { -w }))
        .collect()
}

fn barycentric<T: Real>(values: &[T], weights: &[T], u: T) -> T {
    let nodes = sample_positions::<T>(values.len());
    let (mut num, mut den) = (T::zero(), T::zero());
    for ((&x, &f), &w) in nodes.iter().zip(values).zip(weights) {
        let d = u - x;
        if d == T::zero() {
            return f;
        }
        num = num + w * f / d;
        den = den + w / d;
    }
    num / den
}

/// Single-axis polynomial over the normalized parameter `u ∈ [-1, 1]`,
/// mapped from time `t ∈ [t0, t1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyTrajectory<T: Real> {
    /// Requested degree.
    pub degree: usize,
    /// Degree actually fitted; below `degree` when there are too few samples.
    pub effective_degree: usize,
    pub t_range: (T, T),
    /// Set when the fit interpolates every sample (degree ≥ sample count − 1).
    pub interpolating: bool,
    basis: Basis<T>,
}

impl<T: Real> PolyTrajectory<T> {
    /// Polynomial with monomial coefficients in `u`, lowest power first.
    pub fn from_monomial(coeffs: Vec<T>, t0: T, t1: T) -> Result<Self, BaselineError> {
        if !(t1 > t0) {
            return Err(BaselineError::BadRange(t0.to_f64_lossy(), t1.to_f64_lossy()));
        }
        let degree = coeffs.len().saturating_sub(1);
        Ok(Self {
            degree,
            effective_degree: degree,
            t_range: (t0, t1),
            interpolating: false,
            basis: Basis::Monomial(coeffs),
        })
    }

    /// Coefficient count in the stored basis (`effective_degree + 1`).
    pub fn coefficient_count(&self) -> usize {
        match &self.basis {
            Basis::Monomial(c) => c.len(),
            Basis::Orthogonal { coeffs, .. } => coeffs.len(),
            Basis::Nodal { .. } => self.effective_degree + 1,
        }
    }

    pub fn to_u(&self, t: T) -> T {
        let (t0, t1) = self.t_range;
        T::lit(2.0) * (t - t0) / (t1 - t0) - T::one()
    }

    pub fn eval_u(&self, u: T) -> T {
        match &self.basis {
            Basis::Monomial(c) => c.iter().rev().fold(T::zero(), |acc, &ci| acc * u + ci),
            Basis::Orthogonal { coeffs, hessenberg } => recurrence(coeffs, hessenberg, u),
            Basis::Nodal { values, weights } => barycentric(values, weights, u),
        }
    }
}

/// Evaluates the polynomial at time `t`.
pub fn polyeval<T: Real>(p: &PolyTrajectory<T>, t: T) -> T {
    p.eval_u(p.to_u(t))
}

/// Normalized sample positions `linspace(-1, 1, q)`.
pub fn sample_positions<T: Real>(q: usize) -> Vec<T> {
    let last = T::from_usize_lossy(q - 1);
    (0..q)
        .map(|i| T::lit(2.0) * T::from_usize_lossy(i) / last - T::one())
        .collect()
}

/// Least-squares fit of `signal[i]` at `u_i = linspace(-1, 1, Q)[i]`; time
/// `t = i` maps onto `u`. Degrees of `Q - 1` or more interpolate the samples
/// and are flagged.
pub fn polyfit<T: Real>(signal: &[T], degree: usize) -> Result<PolyTrajectory<T>, BaselineError> {
    if degree == 0 {
        return Err(BaselineError::ZeroDegree);
    }
    let m = signal.len();
    if m < 2 {
        return Err(BaselineError::TooFewSamples(m));
    }
    let interpolating = degree >= m - 1;
    if degree >= m {
        warn!("degree {degree} on {m} samples: fitting the interpolant of degree {}", m - 1);
    }
    let effective = degree.min(m - 1);
    let u = sample_positions::<T>(m);
    let mt = T::from_usize_lossy(m);
    let dot = |a: &[T], b: &[T]| a.iter().zip(b).map(|(&x, &y)| x * y).sum::<T>() / mt;

    // Columns scaled to have mean square one.
    let mut cols: Vec<Vec<T>> = vec![vec![T::one(); m]];
    let mut hessenberg: Vec<Vec<T>> = Vec::with_capacity(effective);
    for k in 1..=effective {
        let mut v: Vec<T> = u.iter().zip(&cols[k - 1]).map(|(&x, &q)| x * q).collect();
        let mut h = vec![T::zero(); k + 1];
        // Two Gram-Schmidt passes keep the columns orthogonal to working precision.
        for _ in 0..2 {
            for (j, qj) in cols.iter().enumerate() {
                let r = dot(qj, &v);
                h[j] = h[j] + r;
                v.iter_mut().zip(qj).for_each(|(vi, &q)| *vi = *vi - r * q);
            }
        }
        let norm = dot(&v, &v).sqrt();
        h[k] = norm;
        v.iter_mut().for_each(|vi| *vi = *vi / norm);
        cols.push(v);
        hessenberg.push(h);
    }
    let coeffs: Vec<T> = cols.iter().map(|q| dot(q, signal)).collect();
    let fitted: Vec<T> = (0..m)
        .map(|i| cols.iter().zip(&coeffs).map(|(q, &c)| c * q[i]).sum())
        .collect();
    let scale = fitted.iter().map(|v| v.abs()).fold(T::one(), T::max);
    let drift = u
        .iter()
        .zip(&fitted)
        .map(|(&ui, &fi)| (recurrence(&coeffs, &hessenberg, ui) - fi).abs())
        .fold(T::zero(), T::max);
    let basis = if drift <= T::lit(1e-9).max(T::epsilon() * T::lit(1e3)) * scale {
        Basis::Orthogonal { coeffs, hessenberg }
    } else {
        Basis::Nodal {
            values: fitted,
            weights: equispaced_weights(m),
        }
    };
    Ok(PolyTrajectory {
        degree,
        effective_degree: effective,
        t_range: (T::zero(), T::from_usize_lossy(m - 1)),
        interpolating,
        basis,
    })
}

/// Fitted values at the sample positions.
pub fn fitted_values<T: Real>(p: &PolyTrajectory<T>, q: usize) -> Vec<T> {
    (0..q).map(|i| polyeval(p, T::from_usize_lossy(i))).collect()
}
