//! Heading and speed PID loops turning a [`ControlCommand`] into rudder and
//! propeller commands.

use serde::{Deserialize, Serialize};

use crate::math::angle_diff;

use super::params::ShipParams;
use super::state::{ControlCommand, VesselState};

/// Heading errors beyond this (radians, 5°) do not feed the integrator.
pub const HEADING_INTEGRATION_BAND: f64 = 0.087_266_462_599_716_48;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PidGains {
    pub heading: LoopGains,
    pub speed: LoopGains,
    /// Anti-windup bound applied to both integrators.
    pub integral_clamp: f64,
}

impl Default for PidGains {
    fn default() -> Self {
        Self {
            heading: LoopGains {
                kp: 1.2,
                ki: 0.02,
                kd: 4.0,
            },
            speed: LoopGains {
                kp: 0.1,
                ki: 0.01,
                kd: 0.0,
            },
            integral_clamp: 5.0,
        }
    }
}

impl PidGains {
    pub fn is_valid(&self) -> bool {
        let loops = [self.heading, self.speed];
        loops
            .iter()
            .all(|g| g.kp >= 0.0 && g.ki >= 0.0 && g.kd >= 0.0)
            && self.integral_clamp >= 0.0
    }
}

/// PID state for one vessel. The heading derivative acts on the measured
/// yaw rate so that heading steps do not kick the rudder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidController {
    pub gains: PidGains,
    pub max_rudder: f64,
    /// Propeller feed-forward slope (normalized rpm per m/s).
    pub rpm_per_speed: f64,
    heading_integral: f64,
    speed_integral: f64,
    prev_speed_error: Option<f64>,
}

impl PidController {
    pub fn new(gains: PidGains, max_rudder: f64, rpm_per_speed: f64) -> Self {
        Self {
            gains,
            max_rudder,
            rpm_per_speed,
            heading_integral: 0.0,
            speed_integral: 0.0,
            prev_speed_error: None,
        }
    }

    pub fn for_ship(gains: PidGains, params: &ShipParams) -> Self {
        Self::new(gains, params.actuator.max_rudder(), params.rpm_per_speed())
    }

    pub fn reset(&mut self) {
        self.heading_integral = 0.0;
        self.speed_integral = 0.0;
        self.prev_speed_error = None;
    }

    pub fn heading_integral(&self) -> f64 {
        self.heading_integral
    }

    pub fn speed_integral(&self) -> f64 {
        self.speed_integral
    }

    /// Computes `(rudder_cmd, rpm_cmd)` for one control interval of `dt`.
    pub fn track(&mut self, state: &VesselState, cmd: &ControlCommand, dt: f64) -> (f64, f64) {
        let g = &self.gains;
        let clamp = g.integral_clamp;

        let heading_err = angle_diff(cmd.target_heading, state.psi);
        let pd = g.heading.kp * heading_err - g.heading.kd * state.r;
        // Conditional integration: only inside the error band, and held
        // while the output saturates in the direction the error pushes it.
        let trial = (self.heading_integral + heading_err * dt).clamp(-clamp, clamp);
        let raw = pd + g.heading.ki * trial;
        let in_band = heading_err.abs() <= HEADING_INTEGRATION_BAND;
        if in_band && (raw.abs() <= self.max_rudder || raw.signum() != heading_err.signum()) {
            self.heading_integral = trial;
        }
        let rudder = (pd + g.heading.ki * self.heading_integral).clamp(-self.max_rudder, self.max_rudder);

        let speed_err = cmd.target_speed - state.u;
        self.speed_integral = (self.speed_integral + speed_err * dt).clamp(-clamp, clamp);
        let derivative = match self.prev_speed_error {
            Some(prev) if dt > 0.0 => (speed_err - prev) / dt,
            _ => 0.0,
        };
        self.prev_speed_error = Some(speed_err);
        let trim = self.rpm_per_speed * cmd.target_speed;
        let rpm = trim
            + g.speed.kp * speed_err
            + g.speed.ki * self.speed_integral
            + g.speed.kd * derivative;
        (
            if rudder.is_finite() { rudder } else { 0.0 },
            if rpm.is_finite() { rpm.clamp(0.0, 1.0) } else { 0.0 },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{step_nomoto, Integrator};
    use crate::math::Vec2;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_error_gives_trim() {
        let mut pid = PidController::new(PidGains::default(), 0.6, 0.15);
        let s = VesselState::underway(Vec2::ZERO, 0.3, 4.0);
        let (rudder, rpm) = pid.track(&s, &ControlCommand::new(0.3, 4.0), 1.0);
        assert_eq!(rudder, 0.0);
        assert!((rpm - 0.6).abs() < 1e-15);
    }

    #[test]
    fn proportional_sign_turns_toward_target() {
        let gains = PidGains {
            heading: LoopGains { kp: 0.5, ki: 0.0, kd: 0.0 },
            ..PidGains::default()
        };
        let mut pid = PidController::new(gains, 0.6, 0.1);
        let s = VesselState::underway(Vec2::ZERO, 0.0, 4.0);
        let (rudder, _) = pid.track(&s, &ControlCommand::new(FRAC_PI_2, 4.0), 1.0);
        assert!(rudder > 0.0);
        let (rudder, _) = pid.track(&s, &ControlCommand::new(-FRAC_PI_2, 4.0), 1.0);
        assert!(rudder < 0.0);
    }

    #[test]
    fn integrators_respect_clamp() {
        let gains = PidGains {
            integral_clamp: 0.5,
            ..PidGains::default()
        };
        let mut pid = PidController::new(gains, 0.6, 0.1);
        let s = VesselState::at_rest(Vec2::ZERO, 0.0);
        for _ in 0..100 {
            pid.track(&s, &ControlCommand::new(3.0, 8.0), 1.0);
            assert!(pid.heading_integral().abs() <= 0.5);
            assert!(pid.speed_integral().abs() <= 0.5);
        }
    }

    #[test]
    fn outputs_are_clamped() {
        let mut pid = PidController::new(PidGains::default(), 0.6, 0.5);
        let s = VesselState::at_rest(Vec2::ZERO, 0.0);
        let (rudder, rpm) = pid.track(&s, &ControlCommand::new(3.0, 10.0), 1.0);
        assert!(rudder <= 0.6 && rpm <= 1.0);
    }

    #[test]
    fn heading_step_converges_under_nomoto() {
        let params = ShipParams::reference_nomoto();
        let mut pid = PidController::for_ship(PidGains::default(), &params);
        let cmd = ControlCommand::new(FRAC_PI_2, 5.0);
        let mut s = VesselState::underway(Vec2::ZERO, 0.0, 5.0);
        let mut converged_at = None;
        for step in 1..=120 {
            let (rudder, _) = pid.track(&s, &cmd, 1.0);
            s = step_nomoto(&s, &params, rudder, 5.0, Vec2::ZERO, 1.0, Integrator::Rk4, 10).unwrap();
            let err = angle_diff(cmd.target_heading, s.psi).abs();
            if err < 0.5f64.to_radians() {
                converged_at.get_or_insert(step);
            } else {
                converged_at = None;
            }
        }
        assert!(converged_at.is_some(), "final psi {}", s.psi);
    }
}
