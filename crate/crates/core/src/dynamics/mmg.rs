//! Three-degree-of-freedom MMG manoeuvring model.
//!
//! Rigid-body equations in surge, sway and yaw:
//!
//! ```text
//! m (u̇ − v r) = X_H + X_P + X_R
//! m (v̇ + u r) = Y_H + Y_P + Y_R
//! I_z ṙ       = N_H + N_P + N_R
//! ```
//!
//! The hull force includes the added-mass reaction from the coefficient
//! table (m'_x, m'_y, J'_z), which is moved to the left-hand side before
//! solving for the accelerations. Y_P and N_P are zero for the single-screw
//! reference set. Coefficients follow the MMG standard convention (y to
//! starboard, r clockwise); the state uses y to port and r counterclockwise,
//! so sway, yaw and rudder are mirrored on the way in and out.
//!
//! Hydrodynamic forces see the through-water velocity. With a current that is
//! uniform over a sub-step the relative-velocity equations are exact, and the
//! ground-frame accelerations follow by adding the rotation of the current
//! vector in the body frame.

use std::f64::consts::PI;

use crate::math::{wrap_angle, Vec2};

use super::integrator::{rk4_step, Integrator};
use super::params::{MmgBlocks, ModelKind, ShipParams};
use super::state::VesselState;
use super::DynamicsError;

/// Dimensional constants derived once from a [`ShipParams`] set.
#[derive(Debug, Clone, Copy)]
pub struct MmgModel {
    length: f64,
    rho: f64,
    surge_mass: f64,
    sway_mass: f64,
    yaw_inertia: f64,
    q_force: f64,
    q_moment: f64,
    h: HullTerms,
    p: PropTerms,
    rd: RudderTerms,
    max_rudder: f64,
    rudder_rate: f64,
    rpm_tau: f64,
    max_rps: f64,
}

#[derive(Debug, Clone, Copy)]
struct HullTerms {
    r_0: f64,
    x_vv: f64,
    x_vr: f64,
    x_rr: f64,
    x_vvvv: f64,
    y: [f64; 6],
    n: [f64; 6],
}

#[derive(Debug, Clone, Copy)]
struct PropTerms {
    diameter: f64,
    one_minus_t: f64,
    one_minus_w0: f64,
    k0: f64,
    k1: f64,
    k2: f64,
    x_p: f64,
    c_1: f64,
    c_2_pos: f64,
    c_2_neg: f64,
}

#[derive(Debug, Clone, Copy)]
struct RudderTerms {
    q_normal: f64,
    one_minus_t: f64,
    one_plus_a: f64,
    lever: f64,
    l_r: f64,
    epsilon: f64,
    kappa: f64,
    eta: f64,
    gamma_pos: f64,
    gamma_neg: f64,
}

/// Surge, sway and yaw loads in the MMG (starboard-positive) frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Loads {
    pub x: f64,
    pub y: f64,
    pub n: f64,
}

impl MmgModel {
    pub fn new(params: &ShipParams) -> Result<Self, DynamicsError> {
        let blocks = params.mmg()?;
        if !(params.mass > 0.0) || !(params.i_z > 0.0) {
            return Err(DynamicsError::Config(format!(
                "mass and i_z must be positive (mass = {}, i_z = {})",
                params.mass, params.i_z
            )));
        }
        Ok(Self::from_blocks(params, &blocks))
    }

    fn from_blocks(params: &ShipParams, b: &MmgBlocks<'_>) -> Self {
        let l = params.length;
        let d = params.draft;
        let rho = params.rho;
        let q_force = 0.5 * rho * l * d;
        let q_moment = q_force * l;
        let hull = b.hull;
        let prop = b.propeller;
        let rud = b.rudder;
        Self {
            length: l,
            rho,
            surge_mass: params.mass + hull.m_x * q_force * l,
            sway_mass: params.mass + hull.m_y * q_force * l,
            yaw_inertia: params.i_z + hull.j_z * q_moment * l * l,
            q_force,
            q_moment,
            h: HullTerms {
                r_0: hull.r_0,
                x_vv: hull.x_vv,
                x_vr: hull.x_vr,
                x_rr: hull.x_rr,
                x_vvvv: hull.x_vvvv,
                y: [
                    hull.y_v, hull.y_r, hull.y_vvv, hull.y_vvr, hull.y_vrr, hull.y_rrr,
                ],
                n: [
                    hull.n_v, hull.n_r, hull.n_vvv, hull.n_vvr, hull.n_vrr, hull.n_rrr,
                ],
            },
            p: PropTerms {
                diameter: prop.diameter,
                one_minus_t: 1.0 - prop.thrust_deduction,
                one_minus_w0: 1.0 - prop.wake_fraction,
                k0: prop.k0,
                k1: prop.k1,
                k2: prop.k2,
                x_p: prop.x_p,
                c_1: prop.c_1,
                c_2_pos: prop.c_2_pos,
                c_2_neg: prop.c_2_neg,
            },
            rd: RudderTerms {
                q_normal: 0.5 * rho * rud.area * rud.f_alpha,
                one_minus_t: 1.0 - rud.t_r,
                one_plus_a: 1.0 + rud.a_h,
                lever: (rud.x_r + rud.a_h * rud.x_h) * l,
                l_r: rud.l_r,
                epsilon: rud.epsilon,
                kappa: rud.kappa,
                eta: prop.diameter / rud.span,
                gamma_pos: rud.gamma_pos,
                gamma_neg: rud.gamma_neg,
            },
            max_rudder: params.actuator.max_rudder(),
            rudder_rate: params.actuator.rudder_rate(),
            rpm_tau: params.actuator.rpm_time_constant,
            max_rps: prop.max_rps,
        }
    }

    pub fn max_rudder(&self) -> f64 {
        self.max_rudder
    }

    /// Total loads for through-water velocities in the MMG frame.
    ///
    /// `v` and `r` are starboard/clockwise positive, `delta` is the MMG rudder
    /// angle and `rps` the propeller revolutions per second.
    pub fn loads(&self, u: f64, v: f64, r: f64, delta: f64, rps: f64) -> Loads {
        let speed_sq = u * u + v * v;
        let speed = speed_sq.sqrt();
        let (beta, r_nd) = if speed > 1e-9 {
            ((-v).atan2(u), r * self.length / speed)
        } else {
            (0.0, 0.0)
        };

        // Hull.
        let (mut x, mut y, mut n) = (0.0, 0.0, 0.0);
        if speed > 1e-9 {
            let vp = v / speed;
            let h = &self.h;
            let vp2 = vp * vp;
            let rp2 = r_nd * r_nd;
            let x_nd =
                -h.r_0 + h.x_vv * vp2 + h.x_vr * vp * r_nd + h.x_rr * rp2 + h.x_vvvv * vp2 * vp2;
            let basis = [
                vp,
                r_nd,
                vp2 * vp,
                vp2 * r_nd,
                vp * rp2,
                rp2 * r_nd,
            ];
            let mut y_nd = 0.0;
            let mut n_nd = 0.0;
            for ((cy, cn), b) in h.y.iter().zip(&h.n).zip(&basis) {
                y_nd += cy * b;
                n_nd += cn * b;
            }
            x = self.q_force * speed_sq * x_nd;
            y = self.q_force * speed_sq * y_nd;
            n = self.q_moment * speed_sq * n_nd;
        }

        // Propeller.
        let p = &self.p;
        let beta_p = beta - p.x_p * r_nd;
        let c_2 = if beta_p > 0.0 { p.c_2_pos } else { p.c_2_neg };
        let wake = p.one_minus_w0 * (1.0 + (1.0 - (-p.c_1 * beta_p.abs()).exp()) * (c_2 - 1.0));
        let u_p = u * wake;
        let dp = p.diameter;
        // K_T(J) n² D² expanded so that n = 0 and u_P = 0 stay regular.
        let kt_n2d2 = p.k0 * rps * rps * dp * dp + p.k1 * rps * dp * u_p + p.k2 * u_p * u_p;
        x += p.one_minus_t * self.rho * dp * dp * kt_n2d2;

        // Rudder.
        let rd = &self.rd;
        let jet = (u_p * u_p + 8.0 / PI * kt_n2d2).max(0.0).sqrt().copysign(u_p);
        let inner = u_p + rd.kappa * (jet - u_p);
        let u_r = rd.epsilon * (rd.eta * inner * inner + (1.0 - rd.eta) * u_p * u_p).sqrt();
        let beta_r = beta - rd.l_r * r_nd;
        let gamma = if beta_r < 0.0 { rd.gamma_neg } else { rd.gamma_pos };
        let v_r = speed * gamma * beta_r;
        let alpha = delta - v_r.atan2(u_r);
        let f_n = rd.q_normal * (u_r * u_r + v_r * v_r) * alpha.sin();
        let (sd, cd) = delta.sin_cos();
        x -= rd.one_minus_t * f_n * sd;
        y -= rd.one_plus_a * f_n * cd;
        n -= rd.lever * f_n * cd;

        Loads { x, y, n }
    }

    /// Time derivative of `[x, y, psi, u, v, r]` in the state convention.
    #[inline]
    pub fn derivative(&self, s: &[f64; 6], delta: f64, rps: f64, current: Vec2) -> [f64; 6] {
        let [_, _, psi, u, v, r] = *s;
        let (sn, cs) = psi.sin_cos();
        let c_bx = current.x * cs + current.y * sn;
        let c_by = -current.x * sn + current.y * cs;
        let u_w = u - c_bx;
        let v_w = v - c_by;
        let loads = self.loads(u_w, -v_w, -r, -delta, rps);
        let (fx, fy, fn_) = (loads.x, -loads.y, -loads.n);
        let du_w = (fx + self.sway_mass * v_w * r) / self.surge_mass;
        let dv_w = (fy - self.surge_mass * u_w * r) / self.sway_mass;
        let dr = fn_ / self.yaw_inertia;
        [
            u * cs - v * sn,
            u * sn + v * cs,
            r,
            du_w + r * c_by,
            dv_w - r * c_bx,
            dr,
        ]
    }

    /// Advances `state` by `dt` using `substeps` equal sub-intervals.
    #[allow(clippy::too_many_arguments)]
    pub fn step(
        &self,
        state: &VesselState,
        rudder_cmd: f64,
        rpm_cmd: f64,
        current: Vec2,
        dt: f64,
        integrator: Integrator,
        substeps: u32,
    ) -> VesselState {
        let h = dt / f64::from(substeps);
        let rpm_blend = 1.0 - (-h / self.rpm_tau).exp();
        let max_slew = self.rudder_rate * h;
        let mut out = *state;
        let mut y = [out.x, out.y, out.psi, out.u, out.v, out.r];
        for _ in 0..substeps {
            out.rudder += (rudder_cmd - out.rudder).clamp(-max_slew, max_slew);
            out.rpm += (rpm_cmd - out.rpm) * rpm_blend;
            let delta = out.rudder;
            let rps = out.rpm * self.max_rps;
            y = match integrator {
                Integrator::Rk4 => rk4_step(&y, h, |s| self.derivative(s, delta, rps, current)),
                Integrator::SemiImplicitEuler => {
                    let d = self.derivative(&y, delta, rps, current);
                    let u = y[3] + h * d[3];
                    let v = y[4] + h * d[4];
                    let r = y[5] + h * d[5];
                    let psi = y[2] + h * r;
                    let (sn, cs) = psi.sin_cos();
                    [
                        y[0] + h * (u * cs - v * sn),
                        y[1] + h * (u * sn + v * cs),
                        psi,
                        u,
                        v,
                        r,
                    ]
                }
            };
            y[2] = wrap_angle(y[2]);
        }
        out.x = y[0];
        out.y = y[1];
        out.psi = y[2];
        out.u = y[3];
        out.v = y[4];
        out.r = y[5];
        out
    }
}

/// Propeller revolutions per second that balance hull resistance at surge `u`.
pub(crate) fn straight_line_rps(params: &ShipParams, blocks: &MmgBlocks<'_>, u: f64) -> f64 {
    let p = blocks.propeller;
    let q_force = 0.5 * params.rho * params.length * params.draft;
    let u_p = u * (1.0 - p.wake_fraction);
    let common = (1.0 - p.thrust_deduction) * params.rho * p.diameter * p.diameter;
    let a = common * p.k0 * p.diameter * p.diameter;
    let b = common * p.k1 * p.diameter * u_p;
    let c = common * p.k2 * u_p * u_p - blocks.hull.r_0 * q_force * u * u;
    (-b + (b * b - 4.0 * a * c).max(0.0).sqrt()) / (2.0 * a)
}

/// Advances an MMG vessel by `dt` seconds.
#[allow(clippy::too_many_arguments)]
pub fn step_mmg(
    state: &VesselState,
    params: &ShipParams,
    rudder_cmd: f64,
    rpm_cmd: f64,
    current: Vec2,
    dt: f64,
    integrator: Integrator,
    substeps: u32,
) -> Result<VesselState, DynamicsError> {
    params.expect_kind(ModelKind::Mmg3dof)?;
    super::check_step_inputs(state, current, dt, substeps)?;
    let model = MmgModel::new(params)?;
    if !(rudder_cmd.abs() <= model.max_rudder + 1e-12) {
        return Err(DynamicsError::RudderOutOfRange {
            command: rudder_cmd,
            limit: model.max_rudder,
        });
    }
    if !rpm_cmd.is_finite() {
        return Err(DynamicsError::NonFiniteInput("rpm_cmd"));
    }
    Ok(model.step(
        state,
        rudder_cmd,
        rpm_cmd.clamp(0.0, 1.0),
        current,
        dt,
        integrator,
        substeps,
    ))
}
