use serde::{Deserialize, Serialize};

use crate::math::{wrap_angle, Vec2};

use super::DynamicsError;

/// Pose, body-frame velocities and actuator positions of one vessel.
///
/// `u`/`v` are ground velocities resolved in the body frame (x forward, y to
/// port), `r` is positive counterclockwise.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VesselState {
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub u: f64,
    pub v: f64,
    pub r: f64,
    pub rudder: f64,
    pub rpm: f64,
}

impl VesselState {
    pub fn at_rest(position: Vec2, psi: f64) -> Self {
        Self {
            x: position.x,
            y: position.y,
            psi: wrap_angle(psi),
            ..Self::default()
        }
    }

    pub fn underway(position: Vec2, psi: f64, speed: f64) -> Self {
        Self {
            u: speed,
            ..Self::at_rest(position, psi)
        }
    }

    #[inline]
    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    /// Ground velocity in the world frame.
    #[inline]
    pub fn world_velocity(&self) -> Vec2 {
        Vec2::new(self.u, self.v).rotated(self.psi)
    }

    pub fn speed_over_ground(&self) -> f64 {
        self.u.hypot(self.v)
    }

    pub fn is_finite(&self) -> bool {
        [
            self.x,
            self.y,
            self.psi,
            self.u,
            self.v,
            self.r,
            self.rudder,
            self.rpm,
        ]
        .iter()
        .all(|f| f.is_finite())
    }

    pub(crate) fn check_finite(&self) -> Result<(), DynamicsError> {
        let fields = [
            ("x", self.x),
            ("y", self.y),
            ("psi", self.psi),
            ("u", self.u),
            ("v", self.v),
            ("r", self.r),
            ("rudder", self.rudder),
            ("rpm", self.rpm),
        ];
        match fields.iter().find(|(_, value)| !value.is_finite()) {
            Some((field, value)) => Err(DynamicsError::NonFiniteState {
                field,
                value: *value,
            }),
            None => Ok(()),
        }
    }
}

/// High-level command tracked by the PID layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlCommand {
    pub target_heading: f64,
    pub target_speed: f64,
}

impl ControlCommand {
    /// Normalizes the heading and clamps negative speeds to zero.
    pub fn new(target_heading: f64, target_speed: f64) -> Self {
        Self {
            target_heading: wrap_angle(target_heading),
            target_speed: target_speed.max(0.0),
        }
    }
}
