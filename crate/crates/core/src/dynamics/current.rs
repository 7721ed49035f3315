//! Environmental current: a slowly fluctuating dominant flow plus a bounded
//! random perturbation,
//!
//! ```text
//! v_current(t) = A · f(t) · d_main + ε · d_random(t)
//! ```
//!
//! `f(t)` is a sinusoid with a per-process random phase mapped into
//! `f_range`; its period is [`LOW_FREQUENCY_RATIO`] times `f_period`.
//! `d_random(t)` is a unit vector whose angle is redrawn at every multiple
//! of `f_period` and interpolated along the shorter arc in between, so the
//! perturbation is continuous and has magnitude exactly ε.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::math::Vec2;
use crate::seeding::{mix, unit_f64};

use super::DynamicsError;

/// Period of the dominant-flow fluctuation in units of `f_period`.
pub const LOW_FREQUENCY_RATIO: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurrentField {
    pub d_main: Vec2,
    /// Peak amplitude A (m/s).
    pub amplitude: f64,
    pub f_range: [f64; 2],
    /// Perturbation magnitude ε (m/s).
    pub eps: f64,
    /// Fluctuation timescale (s).
    pub f_period: f64,
}

impl Default for CurrentField {
    fn default() -> Self {
        Self::still()
    }
}

impl CurrentField {
    pub fn still() -> Self {
        Self {
            d_main: Vec2::new(1.0, 0.0),
            amplitude: 0.0,
            f_range: [0.8, 1.0],
            eps: 0.0,
            f_period: 30.0,
        }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let fail = |m: String| Err(DynamicsError::Config(m));
        if (self.d_main.norm() - 1.0).abs() > 1e-9 {
            return fail(format!("d_main must be a unit vector, |d_main| = {}", self.d_main.norm()));
        }
        if !(self.amplitude >= 0.0) || !(self.eps >= 0.0) {
            return fail("current amplitude and eps must be non-negative".into());
        }
        let [lo, hi] = self.f_range;
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return fail(format!("f_range must be an ordered finite interval, got [{lo}, {hi}]"));
        }
        if !(self.f_period > 0.0) {
            return fail(format!("f_period must be positive, got {}", self.f_period));
        }
        Ok(())
    }

    /// Upper bound on |v_current|.
    pub fn max_speed(&self) -> f64 {
        self.amplitude * self.f_range[0].abs().max(self.f_range[1].abs()) + self.eps
    }
}

/// A realised current: the field plus the random phase and knot seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurrentProcess {
    pub field: CurrentField,
    phase: f64,
    knot_seed: u64,
}

impl CurrentProcess {
    pub fn new<R: Rng + ?Sized>(field: CurrentField, rng: &mut R) -> Self {
        Self {
            field,
            phase: rng.random::<f64>() * TAU,
            knot_seed: rng.random(),
        }
    }

    pub fn with_phase(field: CurrentField, phase: f64, knot_seed: u64) -> Self {
        Self {
            field,
            phase,
            knot_seed,
        }
    }

    /// Fluctuating multiplier f(t), always inside `f_range`.
    pub fn multiplier(&self, t: f64) -> f64 {
        let [lo, hi] = self.field.f_range;
        let period = self.field.f_period * LOW_FREQUENCY_RATIO;
        let s = 0.5 + 0.5 * (TAU * t / period + self.phase).sin();
        (lo + (hi - lo) * s).clamp(lo, hi)
    }

    fn knot_angle(&self, k: i64) -> f64 {
        unit_f64(mix(&[self.knot_seed, k as u64])) * TAU
    }

    /// Unit perturbation direction d_random(t).
    pub fn perturbation_direction(&self, t: f64) -> Vec2 {
        let s = t / self.field.f_period;
        let k = s.floor();
        let frac = s - k;
        let k = k as i64;
        let a0 = self.knot_angle(k);
        let a1 = self.knot_angle(k + 1);
        let delta = crate::math::angle_diff(a1, a0);
        Vec2::from_angle(a0 + delta * frac)
    }

    pub fn velocity(&self, t: f64) -> Vec2 {
        let f = &self.field;
        let mut v = f.d_main * (f.amplitude * self.multiplier(t));
        if f.eps > 0.0 {
            v += self.perturbation_direction(t) * f.eps;
        }
        v
    }
}

/// Draws a fresh realisation of `field` from `rng` and evaluates it at `t`.
pub fn sample_current<R: Rng + ?Sized>(field: &CurrentField, t: f64, rng: &mut R) -> Vec2 {
    CurrentProcess::new(*field, rng).velocity(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_term_evaluation() {
        let field = CurrentField {
            d_main: Vec2::new(1.0, 0.0),
            amplitude: 0.5,
            f_range: [0.9, 0.9],
            eps: 0.0,
            f_period: 10.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = sample_current(&field, 12.5, &mut rng);
        assert!((v.x - 0.45).abs() < 1e-15 && v.y == 0.0);
    }

    #[test]
    fn still_water_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(sample_current(&CurrentField::still(), 4.0, &mut rng), Vec2::ZERO);
    }

    #[test]
    fn magnitude_bound_over_many_samples() {
        let field = CurrentField {
            d_main: Vec2::from_angle(1.1),
            amplitude: 0.7,
            f_range: [0.8, 1.0],
            eps: 0.15,
            f_period: 7.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let bound = field.max_speed();
        for i in 0..10_000 {
            let t = f64::from(i) * 0.37;
            let v = sample_current(&field, t, &mut rng);
            assert!(v.norm() <= bound + 1e-12);
        }
        let process = CurrentProcess::new(field, &mut rng);
        for i in 0..10_000 {
            let t = f64::from(i) * 0.113;
            let f = process.multiplier(t);
            assert!((0.8..=1.0).contains(&f));
            assert!((process.perturbation_direction(t).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn perturbation_is_continuous_across_knots() {
        let field = CurrentField {
            eps: 0.2,
            amplitude: 0.3,
            ..CurrentField::still()
        };
        let process = CurrentProcess::with_phase(field, 0.4, 17);
        for k in 1..20 {
            let t = f64::from(k) * field.f_period;
            let before = process.velocity(t - 1e-9);
            let after = process.velocity(t + 1e-9);
            assert!((before - after).norm() < 1e-6);
        }
    }

    #[test]
    fn same_seed_same_realisation() {
        let field = CurrentField {
            eps: 0.2,
            amplitude: 0.3,
            ..CurrentField::still()
        };
        let a = CurrentProcess::new(field, &mut ChaCha8Rng::seed_from_u64(5));
        let b = CurrentProcess::new(field, &mut ChaCha8Rng::seed_from_u64(5));
        for i in 0..100 {
            let t = f64::from(i) * 1.7;
            assert_eq!(a.velocity(t), b.velocity(t));
        }
    }

    #[test]
    fn validation() {
        let mut f = CurrentField::still();
        f.validate().unwrap();
        f.d_main = Vec2::new(2.0, 0.0);
        assert!(f.validate().is_err());
    }
}
