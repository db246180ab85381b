use serde::{Deserialize, Serialize};

use crate::ringpath::{heading_to, wrap_angle, YawPolicy};
use crate::scalar::Real;

/// Coefficients of harmonic `k`: `A_k·cos(2πkt/T) + B_k·sin(2πkt/T)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Harmonic<T: Real> {
    pub k: usize,
    #[serde(rename = "A_k")]
    pub a: [T; 3],
    #[serde(rename = "B_k")]
    pub b: [T; 3],
}

/// Scalar harmonic for a single axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct AxisHarmonic<T: Real> {
    pub k: usize,
    pub a: T,
    pub b: T,
}

/// Extra altitude term added to the series' z component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", tag = "mode", rename_all = "kebab-case")]
pub enum ZProfile<T: Real> {
    /// `climb·t/T`: a constant climb rate over one period.
    Linear { climb: T },
    /// Series of a mirror-extended climb with its own (doubled) period.
    FourierMirrored {
        period: T,
        harmonics: Vec<AxisHarmonic<T>>,
    },
}

impl<T: Real> Default for ZProfile<T> {
    fn default() -> Self {
        ZProfile::Linear { climb: T::zero() }
    }
}

impl<T: Real> ZProfile<T> {
    /// Value and first two time derivatives at `t`, for ring period `period`.
    fn eval(&self, t: T, period: T) -> [T; 3] {
        match self {
            ZProfile::Linear { climb } => [*climb * t / period, *climb / period, T::zero()],
            ZProfile::FourierMirrored { period: p, harmonics } => {
                let mut out = [T::zero(); 3];
                for h in harmonics {
                    let w = T::TAU() * T::from_usize_lossy(h.k) / *p;
                    let (s, c) = (w * t).sin_cos();
                    out[0] = out[0] + h.a * c + h.b * s;
                    out[1] = out[1] + w * (h.b * c - h.a * s);
                    out[2] = out[2] - w * w * (h.a * c + h.b * s);
                }
                out
            }
        }
    }

    /// Upper bounds on `|ż|` and `|z̈|`.
    pub(crate) fn derivative_bounds(&self, period: T) -> (T, T) {
        match self {
            ZProfile::Linear { climb } => (climb.abs() / period, T::zero()),
            ZProfile::FourierMirrored { period: p, harmonics } => {
                harmonics.iter().fold((T::zero(), T::zero()), |(v, a), h| {
                    let w = T::TAU() * T::from_usize_lossy(h.k) / *p;
                    let amp = h.a.hypot(h.b);
                    (v + w * amp, a + w * w * amp)
                })
            }
        }
    }

    fn scale_time(&mut self, factor: T) {
        if let ZProfile::FourierMirrored { period, .. } = self {
            *period = *period * factor;
        }
    }
}

/// Periodic trajectory `s(t) = A + Σ_k A_k·cos(2πkt/T) + B_k·sin(2πkt/T)`,
/// plus an optional altitude profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FourierTrajectory<T: Real> {
    #[serde(rename = "T")]
    pub period: T,
    #[serde(rename = "A")]
    pub offset: [T; 3],
    pub harmonics: Vec<Harmonic<T>>,
    #[serde(default = "default_yaw")]
    pub yaw_mode: YawPolicy<T>,
    #[serde(default)]
    pub ring_index: usize,
    #[serde(default)]
    pub z_profile: ZProfile<T>,
    /// Samples of the source signal, `Q`.
    #[serde(default)]
    pub samples: usize,
}

fn default_yaw<T: Real>() -> YawPolicy<T> {
    YawPolicy::TangentFollowing
}

/// Position, velocity, and heading at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample<T: Real> {
    pub t: T,
    pub position: [T; 3],
    pub velocity: [T; 3],
    pub yaw: T,
}

impl<T: Real> FourierTrajectory<T> {
    pub fn new(period: T, offset: [T; 3], harmonics: Vec<Harmonic<T>>, samples: usize) -> Self {
        Self {
            period,
            offset,
            harmonics,
            yaw_mode: YawPolicy::TangentFollowing,
            ring_index: 0,
            z_profile: ZProfile::default(),
            samples,
        }
    }

    pub fn with_yaw(mut self, yaw: YawPolicy<T>) -> Self {
        self.yaw_mode = yaw;
        self
    }

    pub fn with_ring_index(mut self, ring: usize) -> Self {
        self.ring_index = ring;
        self
    }

    /// Replaces the z series by a linear climb from `start`.
    pub fn with_linear_z(mut self, start: T, climb: T) -> Self {
        self.offset[2] = start;
        for h in &mut self.harmonics {
            h.a[2] = T::zero();
            h.b[2] = T::zero();
        }
        self.z_profile = ZProfile::Linear { climb };
        self
    }

    /// Replaces the z series by an explicit profile added to offset `start`.
    pub fn with_z_profile(mut self, start: T, profile: ZProfile<T>) -> Self {
        self.offset[2] = start;
        for h in &mut self.harmonics {
            h.a[2] = T::zero();
            h.b[2] = T::zero();
        }
        self.z_profile = profile;
        self
    }

    /// Harmonic count `N`.
    pub fn harmonic_count(&self) -> usize {
        self.harmonics.len()
    }

    pub fn base_frequency(&self) -> T {
        T::TAU() / self.period
    }

    /// Same path traversed with period `period`.
    pub fn with_period(&self, period: T) -> Self {
        let mut out = self.clone();
        out.z_profile.scale_time(period / self.period);
        out.period = period;
        out
    }

    /// Position and its first two derivatives at `t`.
    pub fn derivatives(&self, t: T) -> [[T; 3]; 3] {
        let w0 = self.base_frequency();
        let (s1, c1) = (w0 * t).sin_cos();
        // cos/sin of kθ by repeated rotation
        let (mut c, mut s) = (T::one(), T::zero());
        let mut k_prev = 0usize;
        let mut pos = self.offset;
        let mut vel = [T::zero(); 3];
        let mut acc = [T::zero(); 3];
        for h in &self.harmonics {
            if h.k == k_prev + 1 {
                let nc = c * c1 - s * s1;
                s = s * c1 + c * s1;
                c = nc;
            } else {
                let th = w0 * T::from_usize_lossy(h.k) * t;
                (s, c) = th.sin_cos();
            }
            k_prev = h.k;
            let w = w0 * T::from_usize_lossy(h.k);
            for ax in 0..3 {
                let (a, b) = (h.a[ax], h.b[ax]);
                pos[ax] = pos[ax] + a * c + b * s;
                vel[ax] = vel[ax] + w * (b * c - a * s);
                acc[ax] = acc[ax] - w * w * (a * c + b * s);
            }
        }
        let z = self.z_profile.eval(t, self.period);
        pos[2] = pos[2] + z[0];
        vel[2] = vel[2] + z[1];
        acc[2] = acc[2] + z[2];
        [pos, vel, acc]
    }

    pub fn position(&self, t: T) -> [T; 3] {
        self.derivatives(t)[0]
    }

    pub fn velocity(&self, t: T) -> [T; 3] {
        self.derivatives(t)[1]
    }

    pub fn acceleration(&self, t: T) -> [T; 3] {
        self.derivatives(t)[2]
    }

    /// Heading for a state under this trajectory's yaw policy; zero when undefined.
    pub fn yaw_at(&self, position: [T; 3], velocity: [T; 3]) -> T {
        match self.yaw_mode {
            YawPolicy::CentroidFacing { centroid } => {
                heading_to(position[0], position[1], centroid).unwrap_or_else(T::zero)
            }
            YawPolicy::TangentFollowing => {
                if velocity[0] == T::zero() && velocity[1] == T::zero() {
                    T::zero()
                } else {
                    wrap_angle(velocity[1].atan2(velocity[0]))
                }
            }
            YawPolicy::Fixed { angle } => wrap_angle(angle),
        }
    }

    pub fn sample(&self, t: T) -> TrajectorySample<T> {
        let [position, velocity, _] = self.derivatives(t);
        TrajectorySample {
            t,
            position,
            velocity,
            yaw: self.yaw_at(position, velocity),
        }
    }
}
