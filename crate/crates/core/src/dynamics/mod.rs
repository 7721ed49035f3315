//! Vessel motion models, integrators, command tracking and current forcing.
//!
//! Three model tiers share one [`VesselState`]: the 3-DOF MMG model, a
//! first-order Nomoto yaw model and a rate-limited kinematic model. All step
//! functions are pure; randomness only enters through [`CurrentProcess`].

mod current;
mod integrator;
mod kinematic;
mod mmg;
mod nomoto;
mod params;
mod pid;
mod state;

use thiserror::Error;

use crate::math::Vec2;

pub use current::{sample_current, CurrentField, CurrentProcess, LOW_FREQUENCY_RATIO};
pub use integrator::{rk4_step, Integrator};
pub use kinematic::step_kinematic;
pub use mmg::{step_mmg, Loads, MmgModel};
pub use nomoto::step_nomoto;
pub use params::{
    ActuatorLimits, HullCoefficients, KinematicParams, ModelKind, NomotoParams,
    PropellerCoefficients, RudderCoefficients, ShipParams,
};
pub use pid::{LoopGains, PidController, PidGains};
pub use state::{ControlCommand, VesselState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("non-finite state field `{field}` = {value}")]
    NonFiniteState { field: &'static str, value: f64 },
    #[error("non-finite input `{0}`")]
    NonFiniteInput(&'static str),
    #[error("invalid step: {0}")]
    InvalidStep(String),
    #[error("rudder command {command} exceeds limit ±{limit}")]
    RudderOutOfRange { command: f64, limit: f64 },
    #[error("model mismatch: expected {expected}, parameters are {found}")]
    WrongModel { expected: ModelKind, found: ModelKind },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot parse ship parameters: {0}")]
    Parse(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

pub(crate) fn check_step_inputs(
    state: &VesselState,
    current: Vec2,
    dt: f64,
    substeps: u32,
) -> Result<(), DynamicsError> {
    state.check_finite()?;
    if !current.is_finite() {
        return Err(DynamicsError::NonFiniteInput("current"));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(DynamicsError::InvalidStep(format!("dt must be positive, got {dt}")));
    }
    if substeps == 0 {
        return Err(DynamicsError::InvalidStep("substeps must be at least 1".into()));
    }
    Ok(())
}

/// Runs one control interval: PID (once, at the start of the interval)
/// followed by `substeps` physics sub-steps of whichever model `params`
/// selects. Kinematic vessels consume the command directly.
#[allow(clippy::too_many_arguments)]
pub fn advance(
    state: &VesselState,
    params: &ShipParams,
    pid: &mut PidController,
    cmd: &ControlCommand,
    current: Vec2,
    dt: f64,
    integrator: Integrator,
    substeps: u32,
) -> Result<VesselState, DynamicsError> {
    match params.model_kind {
        ModelKind::Mmg3dof => {
            let (rudder, rpm) = pid.track(state, cmd, dt);
            step_mmg(state, params, rudder, rpm, current, dt, integrator, substeps)
        }
        ModelKind::Nomoto1 => {
            let (rudder, _) = pid.track(state, cmd, dt);
            step_nomoto(
                state,
                params,
                rudder,
                cmd.target_speed,
                current,
                dt,
                integrator,
                substeps,
            )
        }
        ModelKind::Kinematic => step_kinematic(state, params, cmd, current, dt, substeps),
    }
}
