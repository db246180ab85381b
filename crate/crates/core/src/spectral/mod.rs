//! Discrete Fourier analysis of ring signals and their synthesis into
//! smooth periodic trajectories.
//!
//! `dft` computes `F_k = Σ_t s_t·exp(-j2πkt/Q)` and `idft` the scaled
//! inverse. Both run on a fast transform; tests check them against the
//! direct summation.

mod feasibility;
mod fft;
mod series;

pub use feasibility::{feasibility_check, FeasibilityReport};
pub use series::{AxisHarmonic, FourierTrajectory, Harmonic, TrajectorySample, ZProfile};

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Real;
use fft::Direction;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("empty signal")]
    Empty,
    #[error("term count {terms} outside 1..={q}")]
    TermsOutOfRange { terms: usize, q: usize },
    #[error("{harmonics} harmonics need more than {q} samples (at most {max})")]
    TooManyHarmonics { harmonics: usize, q: usize, max: usize },
    #[error("axis spectra have different lengths: {0:?}")]
    AxisMismatch([usize; 3]),
    #[error("inverse transform left an imaginary residue of {residue} (scale {scale})")]
    ImaginaryResidue { residue: f64, scale: f64 },
    #[error("period must be positive, got {0}")]
    Period(f64),
}

/// Frequency coefficients `F_0 .. F_{Q-1}` of a length-`Q` signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T: Real> {
    bins: Vec<Complex<T>>,
}

impl<T: Real> Spectrum<T> {
    pub fn from_bins(bins: Vec<Complex<T>>) -> Result<Self, SpectralError> {
        if bins.is_empty() {
            return Err(SpectralError::Empty);
        }
        Ok(Self { bins })
    }

    pub fn bins(&self) -> &[Complex<T>] {
        &self.bins
    }

    /// Sample count `Q`.
    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    /// Largest `|F_k - conj(F_{Q-k})|`; zero for spectra of real signals.
    pub fn hermitian_defect(&self) -> T {
        let q = self.bins.len();
        (0..q)
            .map(|k| (self.bins[k] - self.bins[(q - k) % q].conj()).norm())
            .fold(T::zero(), T::max)
    }

    /// Total energy `(1/Q)·Σ|F_k|²`, equal to `Σ s_t²` by Parseval.
    pub fn energy(&self) -> T {
        let s: T = self.bins.iter().map(|c| c.norm_sqr()).sum();
        s / T::from_usize_lossy(self.bins.len())
    }
}

/// Forward transform of a real signal.
pub fn dft<T: Real>(signal: &[T]) -> Result<Spectrum<T>, SpectralError> {
    if signal.is_empty() {
        return Err(SpectralError::Empty);
    }
    let mut bins: Vec<Complex<T>> = signal.iter().map(|&s| Complex::new(s, T::zero())).collect();
    fft::transform(&mut bins, Direction::Forward);
    Ok(Spectrum { bins })
}

/// Inverse transform keeping the complex result.
pub fn idft_complex<T: Real>(sp: &Spectrum<T>) -> Vec<Complex<T>> {
    let mut out = sp.bins.clone();
    fft::transform(&mut out, Direction::Inverse);
    let scale = T::one() / T::from_usize_lossy(out.len());
    out.iter_mut().for_each(|c| *c = *c * scale);
    out
}

/// Inverse transform, real part.
///
/// For a conjugate-symmetric spectrum the imaginary part must vanish; a
/// residue above `1e-6` of the signal scale is reported as an error. For
/// other spectra (such as one truncated to an even number of terms) the
/// imaginary part is discarded.
pub fn idft<T: Real>(sp: &Spectrum<T>) -> Result<Vec<T>, SpectralError> {
    let out = idft_complex(sp);
    let scale = out.iter().map(|c| c.re.abs()).fold(T::one(), T::max);
    let symmetric_tol = T::lit(1e-9) * sp.bins.iter().map(|c| c.norm()).fold(T::one(), T::max);
    if sp.hermitian_defect() <= symmetric_tol {
        let residue = out.iter().map(|c| c.im.abs()).fold(T::zero(), T::max);
        if residue > T::lit(1e-6) * scale {
            return Err(SpectralError::ImaginaryResidue {
                residue: residue.to_f64_lossy(),
                scale: scale.to_f64_lossy(),
            });
        }
    }
    Ok(out.into_iter().map(|c| c.re).collect())
}

/// Bin indices ordered by absolute frequency: `0, +1, -1, +2, -2, …`, with
/// `-k` stored at `Q - k` and the Nyquist bin listed once.
pub fn bin_order(q: usize) -> Vec<usize> {
    let mut order = Vec::with_capacity(q);
    if q == 0 {
        return order;
    }
    order.push(0);
    let mut k = 1;
    while order.len() < q {
        order.push(k);
        if order.len() < q && q - k != k {
            order.push(q - k);
        }
        k += 1;
    }
    order
}

/// Keeps the `terms` lowest-frequency bins (see [`bin_order`]).
pub fn truncate<T: Real>(sp: &Spectrum<T>, terms: usize) -> Result<Spectrum<T>, SpectralError> {
    let q = sp.len();
    if terms == 0 || terms > q {
        return Err(SpectralError::TermsOutOfRange { terms, q });
    }
    let mut bins = vec![Complex::new(T::zero(), T::zero()); q];
    for &k in &bin_order(q)[..terms] {
        bins[k] = sp.bins[k];
    }
    Ok(Spectrum { bins })
}

/// Largest harmonic count representable without the Nyquist bin.
pub fn max_harmonics(q: usize) -> usize {
    q.saturating_sub(1) / 2
}

/// Real series coefficients from per-axis spectra:
/// `A = F_0/Q`, `A_k = 2·Re(F_k)/Q`, `B_k = -2·Im(F_k)/Q` for `k = 1..=harmonics`.
pub fn to_fourier_trajectory<T: Real>(
    spectra: [&Spectrum<T>; 3],
    period: T,
    harmonics: usize,
) -> Result<FourierTrajectory<T>, SpectralError> {
    let lens = spectra.map(Spectrum::len);
    if lens[0] != lens[1] || lens[1] != lens[2] {
        return Err(SpectralError::AxisMismatch(lens));
    }
    let q = lens[0];
    if harmonics > max_harmonics(q) {
        return Err(SpectralError::TooManyHarmonics {
            harmonics,
            q,
            max: max_harmonics(q),
        });
    }
    if !(period > T::zero()) || !period.is_finite() {
        return Err(SpectralError::Period(period.to_f64_lossy()));
    }
    let qt = T::from_usize_lossy(q);
    let two = T::lit(2.0);
    let offset = spectra.map(|s| s.bins[0].re / qt);
    let harmonics = (1..=harmonics)
        .map(|k| Harmonic {
            k,
            a: spectra.map(|s| two * s.bins[k].re / qt),
            b: spectra.map(|s| -two * s.bins[k].im / qt),
        })
        .collect();
    Ok(FourierTrajectory::new(period, offset, harmonics, q))
}
