//! Ship parameter sets and their text file format.
//!
//! Parameter files are TOML with a `model_kind` discriminator. Unknown keys
//! are rejected so typos in coefficient names surface immediately.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DynamicsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[serde(alias = "MMG3DOF")]
    Mmg3dof,
    #[serde(alias = "Nomoto1")]
    Nomoto1,
    #[serde(alias = "Kinematic")]
    Kinematic,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ModelKind::Mmg3dof => "mmg3dof",
            ModelKind::Nomoto1 => "nomoto1",
            ModelKind::Kinematic => "kinematic",
        };
        f.write_str(s)
    }
}

/// Non-dimensional hull derivatives (MMG standard form, starboard-positive).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HullCoefficients {
    /// Added mass in surge, m'_x.
    pub m_x: f64,
    /// Added mass in sway, m'_y.
    pub m_y: f64,
    /// Added yaw moment of inertia, J'_z.
    pub j_z: f64,
    pub r_0: f64,
    pub x_vv: f64,
    pub x_vr: f64,
    pub x_rr: f64,
    pub x_vvvv: f64,
    pub y_v: f64,
    pub y_r: f64,
    pub y_vvv: f64,
    pub y_vvr: f64,
    pub y_vrr: f64,
    pub y_rrr: f64,
    pub n_v: f64,
    pub n_r: f64,
    pub n_vvv: f64,
    pub n_vvr: f64,
    pub n_vrr: f64,
    pub n_rrr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropellerCoefficients {
    /// Propeller diameter (m).
    pub diameter: f64,
    /// Revolutions per second at rpm command 1.0.
    pub max_rps: f64,
    /// Thrust deduction factor t_P.
    pub thrust_deduction: f64,
    /// Wake fraction in straight motion w_P0.
    pub wake_fraction: f64,
    /// Thrust coefficient polynomial K_T(J) = k0 + k1 J + k2 J².
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
    /// Longitudinal propeller position x'_P.
    pub x_p: f64,
    /// Wake-change coefficients C1 and C2 (C2 split by drift sign).
    pub c_1: f64,
    pub c_2_pos: f64,
    pub c_2_neg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RudderCoefficients {
    /// Rudder area A_R (m²).
    pub area: f64,
    /// Rudder span H_R (m).
    pub span: f64,
    pub t_r: f64,
    pub a_h: f64,
    /// Longitudinal position of the hull-induced force x'_H.
    pub x_h: f64,
    /// Longitudinal rudder position x'_R.
    pub x_r: f64,
    /// Effective rudder position l'_R for the flow straightening term.
    pub l_r: f64,
    pub epsilon: f64,
    pub kappa: f64,
    /// Rudder lift gradient f_α.
    pub f_alpha: f64,
    pub gamma_pos: f64,
    pub gamma_neg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActuatorLimits {
    pub max_rudder_deg: f64,
    pub rudder_rate_deg: f64,
    /// First-order time constant of the propeller response (s).
    #[serde(default = "default_rpm_time_constant")]
    pub rpm_time_constant: f64,
}

fn default_rpm_time_constant() -> f64 {
    2.0
}

impl ActuatorLimits {
    pub fn max_rudder(&self) -> f64 {
        self.max_rudder_deg.to_radians()
    }

    pub fn rudder_rate(&self) -> f64 {
        self.rudder_rate_deg.to_radians()
    }
}

impl Default for ActuatorLimits {
    fn default() -> Self {
        Self {
            max_rudder_deg: 35.0,
            rudder_rate_deg: 10.0,
            rpm_time_constant: default_rpm_time_constant(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NomotoParams {
    /// Steady turn gain K (1/s).
    pub k: f64,
    /// Time constant T (s).
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KinematicParams {
    /// Maximum heading rate (deg/s).
    pub turn_rate_max_deg: f64,
    /// Maximum speed change (m/s²).
    pub accel_max: f64,
}

impl KinematicParams {
    pub fn turn_rate_max(&self) -> f64 {
        self.turn_rate_max_deg.to_radians()
    }
}

/// Mass, geometry and model coefficients of one vessel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShipParams {
    #[serde(default)]
    pub name: String,
    pub model_kind: ModelKind,
    pub length: f64,
    pub beam: f64,
    #[serde(default)]
    pub draft: f64,
    pub safety_radius: f64,
    /// Water density (kg/m³).
    #[serde(default = "default_rho")]
    pub rho: f64,
    /// Mass (kg).
    #[serde(default)]
    pub mass: f64,
    /// Yaw moment of inertia about the midship (kg·m²).
    #[serde(default)]
    pub i_z: f64,
    #[serde(default)]
    pub actuator: ActuatorLimits,
    pub hull: Option<HullCoefficients>,
    pub propeller: Option<PropellerCoefficients>,
    pub rudder: Option<RudderCoefficients>,
    pub nomoto: Option<NomotoParams>,
    pub kinematic: Option<KinematicParams>,
}

fn default_rho() -> f64 {
    1025.0
}

/// The MMG coefficient blocks, guaranteed present after validation.
#[derive(Debug, Clone, Copy)]
pub struct MmgBlocks<'a> {
    pub hull: &'a HullCoefficients,
    pub propeller: &'a PropellerCoefficients,
    pub rudder: &'a RudderCoefficients,
}

const REFERENCE_MMG: &str = include_str!("../../data/kvlcc2_usv12.toml");
const REFERENCE_NOMOTO: &str = include_str!("../../data/usv12_nomoto.toml");
const REFERENCE_KINEMATIC: &str = include_str!("../../data/usv12_kinematic.toml");

impl ShipParams {
    pub fn from_toml_str(text: &str) -> Result<Self, DynamicsError> {
        let params: ShipParams =
            toml::from_str(text).map_err(|e| DynamicsError::Parse(e.message().to_string()))?;
        params.validate()?;
        Ok(params)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DynamicsError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| DynamicsError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("ship parameters always serialize")
    }

    /// KVLCC2 hull, propeller and rudder derivatives Froude-scaled to a 12 m hull.
    pub fn reference_mmg() -> Self {
        Self::from_toml_str(REFERENCE_MMG).expect("bundled MMG parameters are valid")
    }

    pub fn reference_nomoto() -> Self {
        Self::from_toml_str(REFERENCE_NOMOTO).expect("bundled Nomoto parameters are valid")
    }

    pub fn reference_kinematic() -> Self {
        Self::from_toml_str(REFERENCE_KINEMATIC).expect("bundled kinematic parameters are valid")
    }

    pub fn reference(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Mmg3dof => Self::reference_mmg(),
            ModelKind::Nomoto1 => Self::reference_nomoto(),
            ModelKind::Kinematic => Self::reference_kinematic(),
        }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let config = |msg: String| Err(DynamicsError::Config(msg));
        let positive = |name: &str, value: f64| -> Result<(), DynamicsError> {
            if value.is_finite() && value > 0.0 {
                Ok(())
            } else {
                Err(DynamicsError::Config(format!(
                    "{name} must be positive and finite, got {value}"
                )))
            }
        };
        positive("safety_radius", self.safety_radius)?;
        positive("length", self.length)?;
        positive("beam", self.beam)?;
        positive("actuator.max_rudder_deg", self.actuator.max_rudder_deg)?;
        positive("actuator.rudder_rate_deg", self.actuator.rudder_rate_deg)?;
        positive("actuator.rpm_time_constant", self.actuator.rpm_time_constant)?;
        match self.model_kind {
            ModelKind::Mmg3dof => {
                positive("mass", self.mass)?;
                positive("i_z", self.i_z)?;
                positive("draft", self.draft)?;
                positive("rho", self.rho)?;
                let Some(prop) = &self.propeller else {
                    return config("mmg3dof requires a [propeller] table".into());
                };
                if self.hull.is_none() {
                    return config("mmg3dof requires a [hull] table".into());
                }
                let Some(rudder) = &self.rudder else {
                    return config("mmg3dof requires a [rudder] table".into());
                };
                positive("propeller.diameter", prop.diameter)?;
                positive("propeller.max_rps", prop.max_rps)?;
                positive("rudder.area", rudder.area)?;
                positive("rudder.span", rudder.span)?;
            }
            ModelKind::Nomoto1 => {
                let Some(nomoto) = &self.nomoto else {
                    return config("nomoto1 requires a [nomoto] table".into());
                };
                positive("nomoto.t", nomoto.t)?;
                if !nomoto.k.is_finite() {
                    return config(format!("nomoto.k must be finite, got {}", nomoto.k));
                }
            }
            ModelKind::Kinematic => {
                let Some(kin) = &self.kinematic else {
                    return config("kinematic requires a [kinematic] table".into());
                };
                positive("kinematic.turn_rate_max_deg", kin.turn_rate_max_deg)?;
                positive("kinematic.accel_max", kin.accel_max)?;
            }
        }
        Ok(())
    }

    pub(crate) fn expect_kind(&self, kind: ModelKind) -> Result<(), DynamicsError> {
        if self.model_kind == kind {
            Ok(())
        } else {
            Err(DynamicsError::WrongModel {
                expected: kind,
                found: self.model_kind,
            })
        }
    }

    pub fn mmg(&self) -> Result<MmgBlocks<'_>, DynamicsError> {
        self.expect_kind(ModelKind::Mmg3dof)?;
        match (&self.hull, &self.propeller, &self.rudder) {
            (Some(hull), Some(propeller), Some(rudder)) => Ok(MmgBlocks {
                hull,
                propeller,
                rudder,
            }),
            _ => Err(DynamicsError::Config(
                "mmg3dof requires [hull], [propeller] and [rudder] tables".into(),
            )),
        }
    }

    pub fn nomoto_params(&self) -> Result<&NomotoParams, DynamicsError> {
        self.expect_kind(ModelKind::Nomoto1)?;
        self.nomoto
            .as_ref()
            .ok_or_else(|| DynamicsError::Config("missing [nomoto] table".into()))
    }

    pub fn kinematic_params(&self) -> Result<&KinematicParams, DynamicsError> {
        self.expect_kind(ModelKind::Kinematic)?;
        self.kinematic
            .as_ref()
            .ok_or_else(|| DynamicsError::Config("missing [kinematic] table".into()))
    }

    /// Propeller command that holds `speed` in straight, calm-water running.
    ///
    /// All straight-line MMG force terms scale with the square of speed, so the
    /// trim command is linear in speed; this returns the slope. Nomoto and
    /// kinematic vessels take speed directly and use a unit slope against
    /// their notional top speed.
    pub fn rpm_per_speed(&self) -> f64 {
        match self.mmg() {
            Ok(blocks) => {
                let rps = super::mmg::straight_line_rps(self, &blocks, 1.0);
                rps / blocks.propeller.max_rps
            }
            Err(_) => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_sets_validate() {
        for kind in [ModelKind::Mmg3dof, ModelKind::Nomoto1, ModelKind::Kinematic] {
            let p = ShipParams::reference(kind);
            assert_eq!(p.model_kind, kind);
            p.validate().unwrap();
        }
    }

    #[test]
    fn unknown_key_is_named_in_error() {
        let text = format!("{REFERENCE_KINEMATIC}\nturning_radius = 3.0\n");
        let err = ShipParams::from_toml_str(&text).unwrap_err().to_string();
        assert!(err.contains("turning_radius"), "{err}");
    }

    #[test]
    fn unknown_nested_key_is_named_in_error() {
        let text = REFERENCE_MMG.replace("y_vvr", "y_vvx");
        let err = ShipParams::from_toml_str(&text).unwrap_err().to_string();
        assert!(err.contains("y_vvx"), "{err}");
    }

    #[test]
    fn zero_mass_is_config_error() {
        let mut p = ShipParams::reference_mmg();
        p.mass = 0.0;
        assert!(matches!(p.validate(), Err(DynamicsError::Config(_))));
    }

    #[test]
    fn round_trips_through_text() {
        let p = ShipParams::reference_mmg();
        let again = ShipParams::from_toml_str(&p.to_toml_string()).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn trim_slope_is_positive_for_mmg() {
        let slope = ShipParams::reference_mmg().rpm_per_speed();
        assert!(slope > 0.0 && slope.is_finite());
    }
}
