use serde::{Deserialize, Serialize};

use super::series::FourierTrajectory;
use crate::scalar::{vec3, Real};

/// Speed and acceleration of a trajectory against vehicle limits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FeasibilityReport<T: Real> {
    pub period: T,
    pub v_max: T,
    pub a_max: T,
    /// Per-axis bound `Σ_k ω_k·|(A_k, B_k)|`.
    pub speed_bound_axis: [T; 3],
    /// Per-axis bound `Σ_k ω_k²·|(A_k, B_k)|`.
    pub accel_bound_axis: [T; 3],
    /// Bound on the speed norm `Σ_k ω_k·‖[A_k B_k]‖₂`.
    pub speed_bound: T,
    /// Bound on the acceleration norm `Σ_k ω_k²·‖[A_k B_k]‖₂`.
    pub accel_bound: T,
    pub sampled_speed_axis: [T; 3],
    pub sampled_accel_axis: [T; 3],
    pub sampled_speed: T,
    pub sampled_accel: T,
    pub samples: usize,
    pub feasible: bool,
    /// Shortest period at which the sampled maxima meet both limits.
    pub min_period: T,
}

/// `max_θ ‖a·cos θ + b·sin θ‖`, the spectral norm of the 3x2 matrix `[a b]`.
fn pair_amplitude<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    let dot = |u: [T; 3], v: [T; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let (aa, bb, ab) = (dot(a, a), dot(b, b), dot(a, b));
    let two = T::lit(2.0);
    let disc = ((aa - bb) * (aa - bb) + two * two * ab * ab).sqrt();
    ((aa + bb + disc) / two).sqrt()
}

/// Checks analytic bounds and a dense sampling of one period against
/// `v_max` and `a_max`. Feasibility is decided on the sampled maxima of the
/// speed and acceleration norms.
pub fn feasibility_check<T: Real>(tr: &FourierTrajectory<T>, a_max: T, v_max: T) -> FeasibilityReport<T> {
    let w0 = tr.base_frequency();
    let mut speed_axis = [T::zero(); 3];
    let mut accel_axis = [T::zero(); 3];
    let mut speed_bound = T::zero();
    let mut accel_bound = T::zero();
    for h in &tr.harmonics {
        let w = w0 * T::from_usize_lossy(h.k);
        for ax in 0..3 {
            let amp = h.a[ax].hypot(h.b[ax]);
            speed_axis[ax] = speed_axis[ax] + w * amp;
            accel_axis[ax] = accel_axis[ax] + w * w * amp;
        }
        let amp = pair_amplitude(h.a, h.b);
        speed_bound = speed_bound + w * amp;
        accel_bound = accel_bound + w * w * amp;
    }
    let (zv, za) = tr.z_profile.derivative_bounds(tr.period);
    speed_axis[2] = speed_axis[2] + zv;
    accel_axis[2] = accel_axis[2] + za;
    speed_bound = speed_bound + zv;
    accel_bound = accel_bound + za;

    let q = tr.samples.max(2 * tr.harmonic_count() + 1);
    let samples = (10 * tr.harmonic_count().max(1) * q).max(1024);
    let mut sampled_speed_axis = [T::zero(); 3];
    let mut sampled_accel_axis = [T::zero(); 3];
    let mut sampled_speed = T::zero();
    let mut sampled_accel = T::zero();
    let dt = tr.period / T::from_usize_lossy(samples);
    for i in 0..samples {
        let [_, v, a] = tr.derivatives(dt * T::from_usize_lossy(i));
        for ax in 0..3 {
            sampled_speed_axis[ax] = sampled_speed_axis[ax].max(v[ax].abs());
            sampled_accel_axis[ax] = sampled_accel_axis[ax].max(a[ax].abs());
        }
        sampled_speed = sampled_speed.max(vec3::norm(v));
        sampled_accel = sampled_accel.max(vec3::norm(a));
    }

    let feasible = sampled_speed <= v_max && sampled_accel <= a_max;
    let ratio = (sampled_speed / v_max).max((sampled_accel / a_max).sqrt());
    FeasibilityReport {
        period: tr.period,
        v_max,
        a_max,
        speed_bound_axis: speed_axis,
        accel_bound_axis: accel_axis,
        speed_bound,
        accel_bound,
        sampled_speed_axis,
        sampled_accel_axis,
        sampled_speed,
        sampled_accel,
        samples,
        feasible,
        min_period: tr.period * ratio,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Harmonic;
    use std::f64::consts::PI;

    fn circle(r: f64, period: f64) -> FourierTrajectory<f64> {
        FourierTrajectory::new(
            period,
            [0.0; 3],
            vec![Harmonic {
                k: 1,
                a: [r, 0.0, 0.0],
                b: [0.0, r, 0.0],
            }],
            8,
        )
    }

    #[test]
    fn pair_amplitude_cases() {
        assert!((pair_amplitude::<f64>([2.0, 0.0, 0.0], [0.0, 2.0, 0.0]) - 2.0).abs() < 1e-15);
        assert!((pair_amplitude::<f64>([3.0, 0.0, 0.0], [4.0, 0.0, 0.0]) - 5.0).abs() < 1e-15);
        assert!((pair_amplitude::<f64>([1.0, 0.0, 0.0], [0.0, 0.0, 0.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dc_only_always_feasible() {
        let tr = FourierTrajectory::new(1.0, [1.0, 2.0, 3.0], vec![], 1);
        let rep = feasibility_check(&tr, 1e-9, 1e-9);
        assert!(rep.feasible);
        assert_eq!(rep.sampled_accel, 0.0);
        assert_eq!(rep.min_period, 0.0);
    }

    #[test]
    fn circle_acceleration_is_exact() {
        let (r, period) = (2.0, 7.0);
        let rep = feasibility_check(&circle(r, period), 10.0, 10.0);
        let want = (2.0 * PI / period).powi(2) * r;
        assert!((rep.sampled_accel - want).abs() < 1e-12 * want, "{} vs {want}", rep.sampled_accel);
        assert!((rep.accel_bound - want).abs() < 1e-12 * want);
        assert!(rep.accel_bound * (1.0 + 1e-12) >= rep.sampled_accel);
    }

    #[test]
    fn doubling_period_quarters_acceleration() {
        let a = feasibility_check(&circle(1.5, 3.0), 1.0, 1.0);
        let b = feasibility_check(&circle(1.5, 6.0), 1.0, 1.0);
        assert!((a.sampled_accel / b.sampled_accel - 4.0).abs() < 1e-9);
        assert!((a.sampled_speed / b.sampled_speed - 2.0).abs() < 1e-9);
    }

    #[test]
    fn min_period_makes_it_feasible() {
        let tr = circle(5.0, 2.0);
        let rep = feasibility_check(&tr, 1.0, 2.0);
        assert!(!rep.feasible);
        let fixed = feasibility_check(&tr.with_period(rep.min_period * (1.0 + 1e-9)), 1.0, 2.0);
        assert!(fixed.feasible);
    }

    #[test]
    fn climb_counts_toward_speed() {
        let tr = FourierTrajectory::<f64>::new(10.0, [0.0; 3], vec![], 4).with_linear_z(0.0, 5.0);
        let rep = feasibility_check(&tr, 1.0, 1.0);
        assert!((rep.sampled_speed - 0.5).abs() < 1e-12);
        assert!((rep.speed_bound_axis[2] - 0.5).abs() < 1e-12);
    }
}
