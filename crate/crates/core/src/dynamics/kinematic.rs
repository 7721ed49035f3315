//! Rate-limited kinematic vessel: heading and speed slew toward the command,
//! position follows the heading plus current drift.

use crate::math::{angle_diff, wrap_angle, Vec2};

use super::params::ShipParams;
use super::state::{ControlCommand, VesselState};
use super::DynamicsError;

pub fn step_kinematic(
    state: &VesselState,
    params: &ShipParams,
    cmd: &ControlCommand,
    current: Vec2,
    dt: f64,
    substeps: u32,
) -> Result<VesselState, DynamicsError> {
    let kin = *params.kinematic_params()?;
    super::check_step_inputs(state, current, dt, substeps)?;
    if !cmd.target_heading.is_finite() || !cmd.target_speed.is_finite() {
        return Err(DynamicsError::NonFiniteInput("command"));
    }
    let h = dt / f64::from(substeps);
    let max_turn = kin.turn_rate_max() * h;
    let max_dv = kin.accel_max * h;
    let target_speed = cmd.target_speed.max(0.0);
    let mut out = *state;
    let mut turn = 0.0;
    for _ in 0..substeps {
        turn = angle_diff(cmd.target_heading, out.psi).clamp(-max_turn, max_turn);
        out.psi = wrap_angle(out.psi + turn);
        out.u += (target_speed - out.u).clamp(-max_dv, max_dv);
        let (sn, cs) = out.psi.sin_cos();
        out.x += h * (out.u * cs + current.x);
        out.y += h * (out.u * sn + current.y);
    }
    out.v = 0.0;
    out.r = turn / h;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn params(rate_deg: f64) -> ShipParams {
        let mut p = ShipParams::reference_kinematic();
        p.kinematic.as_mut().unwrap().turn_rate_max_deg = rate_deg;
        p
    }

    #[test]
    fn straight_unit_step() {
        let s0 = VesselState::underway(Vec2::ZERO, 0.0, 1.0);
        let s1 = step_kinematic(&s0, &params(8.0), &ControlCommand::new(0.0, 1.0), Vec2::ZERO, 1.0, 1)
            .unwrap();
        assert_eq!(s1.position(), Vec2::new(1.0, 0.0));
    }

    #[test]
    fn turn_is_rate_limited() {
        let s0 = VesselState::underway(Vec2::ZERO, 0.0, 1.0);
        let p = params(0.1f64.to_degrees());
        let s1 = step_kinematic(&s0, &p, &ControlCommand::new(FRAC_PI_2, 1.0), Vec2::ZERO, 1.0, 10)
            .unwrap();
        assert!((s1.psi - 0.1).abs() < 1e-12);
    }

    #[test]
    fn turn_across_the_branch_cut_takes_the_short_way() {
        // Brute force over fine sub-steps: the wrapped error to the target
        // shrinks monotonically and the heading never visits |psi| < 3.
        let p = params(1.0);
        let cmd = ControlCommand::new(-3.0, 1.0);
        let mut s = VesselState::underway(Vec2::ZERO, 3.0, 1.0);
        let mut prev_err = angle_diff(cmd.target_heading, s.psi).abs();
        for _ in 0..2000 {
            s = step_kinematic(&s, &p, &cmd, Vec2::ZERO, 0.01, 1).unwrap();
            let err = angle_diff(cmd.target_heading, s.psi).abs();
            assert!(err <= prev_err + 1e-15);
            assert!(s.psi.abs() >= 3.0 - 1e-12, "psi = {}", s.psi);
            prev_err = err;
        }
        assert!(prev_err < 1e-12);
        assert!(s.psi.abs() <= PI);
    }

    #[test]
    fn speed_is_accel_limited() {
        let p = ShipParams::reference_kinematic();
        let s0 = VesselState::at_rest(Vec2::ZERO, 0.0);
        let s1 = step_kinematic(&s0, &p, &ControlCommand::new(0.0, 5.0), Vec2::ZERO, 1.0, 10).unwrap();
        assert!((s1.u - 0.3).abs() < 1e-12);
    }
}
