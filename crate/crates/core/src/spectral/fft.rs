//! Fast transforms of arbitrary length: iterative radix-2 for powers of
//! two, Bluestein's chirp-z convolution otherwise.

use num_complex::Complex;

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    /// `exp(-j2πkt/Q)` kernel.
    Forward,
    /// `exp(+j2πkt/Q)` kernel, unscaled.
    Inverse,
}

impl Direction {
    fn sign<T: Real>(self) -> T {
        match self {
            Direction::Forward => -T::one(),
            Direction::Inverse => T::one(),
        }
    }
}

/// Unscaled DFT of `buf` in place.
pub(crate) fn transform<T: Real>(buf: &mut [Complex<T>], dir: Direction) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        radix2(buf, dir);
    } else {
        bluestein(buf, dir);
    }
}

fn twiddle<T: Real>(num: usize, den: usize, dir: Direction) -> Complex<T> {
    // angle = sign·2π·num/den with num reduced mod den
    let angle = dir.sign::<T>() * T::TAU() * T::from_usize_lossy(num % den) / T::from_usize_lossy(den);
    Complex::new(angle.cos(), angle.sin())
}

fn radix2<T: Real>(buf: &mut [Complex<T>], dir: Direction) {
    let n = buf.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let table: Vec<Complex<T>> = (0..n / 2).map(|j| twiddle(j, n, dir)).collect();
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for j in 0..half {
                let w = table[j * stride];
                let a = buf[start + j];
                let b = buf[start + j + half] * w;
                buf[start + j] = a + b;
                buf[start + j + half] = a - b;
            }
        }
        len <<= 1;
    }
}

fn bluestein<T: Real>(buf: &mut [Complex<T>], dir: Direction) {
    let n = buf.len();
    let m = (2 * n - 1).next_power_of_two();
    // chirp[k] = exp(sign·jπk²/n); k² is reduced mod 2n to keep the angle small
    let chirp: Vec<Complex<T>> = (0..n)
        .map(|k| {
            let k2 = ((k as u128 * k as u128) % (2 * n as u128)) as usize;
            twiddle(k2, 2 * n, dir)
        })
        .collect();

    let zero = Complex::new(T::zero(), T::zero());
    let mut a = vec![zero; m];
    for k in 0..n {
        a[k] = buf[k] * chirp[k];
    }
    let mut b = vec![zero; m];
    b[0] = chirp[0].conj();
    for k in 1..n {
        let c = chirp[k].conj();
        b[k] = c;
        b[m - k] = c;
    }
    radix2(&mut a, Direction::Forward);
    radix2(&mut b, Direction::Forward);
    for (x, y) in a.iter_mut().zip(&b) {
        *x = *x * *y;
    }
    radix2(&mut a, Direction::Inverse);
    let scale = T::one() / T::from_usize_lossy(m);
    for k in 0..n {
        buf[k] = a[k] * chirp[k] * scale;
    }
}
