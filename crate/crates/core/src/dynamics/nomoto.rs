//! First-order Nomoto yaw response, `T ṙ + r = K δ`, with the vessel moving at
//! a commanded speed along its heading plus current drift.

use crate::math::{wrap_angle, Vec2};

use super::integrator::{rk4_step, Integrator};
use super::params::ShipParams;
use super::state::VesselState;
use super::DynamicsError;

#[inline]
fn derivative(s: &[f64; 4], gain: f64, time_constant: f64, delta: f64, speed: f64, current: Vec2) -> [f64; 4] {
    let (sn, cs) = s[2].sin_cos();
    [
        speed * cs + current.x,
        speed * sn + current.y,
        s[3],
        (gain * delta - s[3]) / time_constant,
    ]
}

/// Advances a Nomoto vessel by `dt` seconds at `speed` through the water.
#[allow(clippy::too_many_arguments)]
pub fn step_nomoto(
    state: &VesselState,
    params: &ShipParams,
    rudder_cmd: f64,
    speed: f64,
    current: Vec2,
    dt: f64,
    integrator: Integrator,
    substeps: u32,
) -> Result<VesselState, DynamicsError> {
    let nomoto = *params.nomoto_params()?;
    if !(nomoto.t > 0.0) {
        return Err(DynamicsError::Config(format!(
            "nomoto.t must be positive, got {}",
            nomoto.t
        )));
    }
    super::check_step_inputs(state, current, dt, substeps)?;
    if !speed.is_finite() {
        return Err(DynamicsError::NonFiniteInput("speed"));
    }
    let max_rudder = params.actuator.max_rudder();
    if !(rudder_cmd.abs() <= max_rudder + 1e-12) {
        return Err(DynamicsError::RudderOutOfRange {
            command: rudder_cmd,
            limit: max_rudder,
        });
    }

    let h = dt / f64::from(substeps);
    let max_slew = params.actuator.rudder_rate() * h;
    let mut out = *state;
    let mut y = [out.x, out.y, out.psi, out.r];
    for _ in 0..substeps {
        out.rudder += (rudder_cmd - out.rudder).clamp(-max_slew, max_slew);
        let delta = out.rudder;
        y = match integrator {
            Integrator::Rk4 => rk4_step(&y, h, |s| {
                derivative(s, nomoto.k, nomoto.t, delta, speed, current)
            }),
            Integrator::SemiImplicitEuler => {
                let r = y[3] + h * (nomoto.k * delta - y[3]) / nomoto.t;
                let psi = y[2] + h * r;
                let (sn, cs) = psi.sin_cos();
                [
                    y[0] + h * (speed * cs + current.x),
                    y[1] + h * (speed * sn + current.y),
                    psi,
                    r,
                ]
            }
        };
        y[2] = wrap_angle(y[2]);
    }
    out.x = y[0];
    out.y = y[1];
    out.psi = y[2];
    out.r = y[3];
    out.u = speed;
    out.v = 0.0;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params_with(k: f64, t: f64) -> ShipParams {
        let mut p = ShipParams::reference_nomoto();
        p.nomoto.as_mut().unwrap().k = k;
        p.nomoto.as_mut().unwrap().t = t;
        p
    }

    #[test]
    fn zero_rudder_runs_straight() {
        let p = ShipParams::reference_nomoto();
        let s0 = VesselState::at_rest(Vec2::new(1.0, 2.0), 0.5);
        let s1 = step_nomoto(&s0, &p, 0.0, 3.0, Vec2::ZERO, 2.0, Integrator::Rk4, 4).unwrap();
        let expected = Vec2::new(1.0, 2.0) + Vec2::from_angle(0.5) * 6.0;
        assert!((s1.position() - expected).norm() < 1e-12);
        assert_eq!(s1.psi, 0.5);
    }

    #[test]
    fn zero_gain_never_turns() {
        let p = params_with(0.0, 5.0);
        let mut s = VesselState::at_rest(Vec2::ZERO, -1.0);
        for _ in 0..50 {
            s = step_nomoto(&s, &p, 0.5, 2.0, Vec2::ZERO, 1.0, Integrator::Rk4, 10).unwrap();
        }
        assert_eq!(s.psi, -1.0);
        assert_eq!(s.r, 0.0);
    }

    #[test]
    fn yaw_rate_approaches_steady_value() {
        let p = params_with(0.2, 3.0);
        let delta = 0.3;
        let mut s = VesselState::at_rest(Vec2::ZERO, 0.0);
        s.rudder = delta;
        for _ in 0..60 {
            s = step_nomoto(&s, &p, delta, 2.0, Vec2::ZERO, 1.0, Integrator::Rk4, 10).unwrap();
        }
        assert!((s.r - 0.2 * delta).abs() < 1e-6);
    }

    #[test]
    fn current_adds_pure_drift() {
        let p = ShipParams::reference_nomoto();
        let s0 = VesselState::at_rest(Vec2::ZERO, 0.0);
        let s1 = step_nomoto(&s0, &p, 0.0, 1.0, Vec2::new(0.0, 0.5), 4.0, Integrator::Rk4, 8).unwrap();
        assert!((s1.position() - Vec2::new(4.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn wrong_model_rejected() {
        let p = ShipParams::reference_mmg();
        assert!(matches!(
            step_nomoto(&VesselState::default(), &p, 0.0, 1.0, Vec2::ZERO, 1.0, Integrator::Rk4, 1),
            Err(DynamicsError::WrongModel { .. })
        ));
    }
}
