//! Scenario files: map geometry, spawners, budgets, reward weights and
//! randomization ranges.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{CurrentField, Integrator, ModelKind, PidGains, ShipParams};
use crate::geometry::{CircleObstacle, MapExtent, ObstacleSet, PolylineObstacle, Route};
use crate::mask::{
    ActionSet, AuditReport, AuditScene, CommandFrame, MaskConfig, SafetyHorizon, CRUISE_SPEED, DEFAULT_ACTIONS,
};
use crate::seeding::{rng_for, Stream};
use crate::math::Vec2;
use crate::observation::{BevConfig, PotentialConfig};

use super::EnvError;

/// Scenario file format version accepted by the loader.
pub const SCENARIO_VERSION: u32 = 1;

const MINI_COASTLINE: &str = include_str!("../../data/scenarios/mini_coastline.toml");
const MINI_PORT: &str = include_str!("../../data/scenarios/mini_port.toml");
const OPEN_WATER: &str = include_str!("../../data/scenarios/open_water.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LintCheck {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

impl LintCheck {
    fn new(name: &str, ok: bool, detail: String) -> Self {
        Self { name: name.into(), ok, detail }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LintReport {
    pub scenario: String,
    pub ok: bool,
    pub checks: Vec<LintCheck>,
}

/// Names accepted by [`Scenario::bundled`].
pub const BUNDLED: [&str; 3] = ["mini_coastline", "mini_port", "open_water"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Goal {
    pub position: Vec2,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolylineSpec {
    pub vertices: Vec<Vec2>,
    #[serde(default)]
    pub closed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleSpec {
    pub center: Vec2,
    pub radius: f64,
}

/// Ranges for moving obstacles. Each one starts at a random point of
/// `region` and loops over `waypoints` random way-points, each leg
/// `leg_length` long, clamped to `region`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MovingSpawner {
    pub count: u32,
    pub region: MapExtent,
    pub radius: [f64; 2],
    pub speed: [f64; 2],
    pub waypoints: [u32; 2],
    pub leg_length: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RewardWeights {
    /// Per metre of distance-to-goal improvement.
    pub w_progress: f64,
    pub r_success: f64,
    /// Applied on collision and boundary infringement.
    pub r_collision: f64,
    /// Per-step cost.
    pub c_time: f64,
    /// Scale of the penalty on gradient magnitude above `gradient_threshold`.
    pub w_gradient: f64,
    pub gradient_threshold: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        Self {
            w_progress: 1.0,
            r_success: 200.0,
            r_collision: -200.0,
            c_time: 0.1,
            w_gradient: 0.5,
            gradient_threshold: 0.5,
        }
    }
}

impl RewardWeights {
    pub fn validate(&self) -> Result<(), EnvError> {
        let ok = self.r_success > 0.0
            && self.r_collision < 0.0
            && self.c_time >= 0.0
            && self.w_progress.is_finite()
            && self.w_gradient >= 0.0
            && self.gradient_threshold >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(EnvError::Scenario(format!(
                "reward weights need r_success > 0, r_collision < 0, c_time >= 0, w_gradient >= 0: {self:?}"
            )))
        }
    }
}

/// Per-episode current ranges. The main direction is uniform on the
/// circle; the amplitude is uniform in `amplitude`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CurrentRanges {
    pub amplitude: [f64; 2],
    pub f_range: [f64; 2],
    pub eps: f64,
    pub f_period: f64,
}

impl Default for CurrentRanges {
    fn default() -> Self {
        Self {
            amplitude: [0.0, 0.3],
            f_range: [0.8, 1.0],
            eps: 0.05,
            f_period: 30.0,
        }
    }
}

impl CurrentRanges {
    pub fn still() -> Self {
        Self {
            amplitude: [0.0, 0.0],
            eps: 0.0,
            ..Self::default()
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> CurrentField {
        let [lo, hi] = self.amplitude;
        CurrentField {
            d_main: Vec2::from_angle(rng.random::<f64>() * std::f64::consts::TAU),
            amplitude: if hi > lo { rng.random_range(lo..=hi) } else { lo },
            f_range: self.f_range,
            eps: self.eps,
            f_period: self.f_period,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Randomization {
    pub current: CurrentRanges,
    pub sensor_sigma_pos: f64,
    pub sensor_sigma_heading_deg: f64,
    pub command_sigma_heading_deg: f64,
}

impl Default for Randomization {
    fn default() -> Self {
        Self {
            current: CurrentRanges::default(),
            sensor_sigma_pos: 1.0,
            sensor_sigma_heading_deg: 0.5,
            command_sigma_heading_deg: 1.0,
        }
    }
}

impl Randomization {
    /// No current and no noise.
    pub fn off() -> Self {
        Self {
            current: CurrentRanges::still(),
            sensor_sigma_pos: 0.0,
            sensor_sigma_heading_deg: 0.0,
            command_sigma_heading_deg: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VesselConfig {
    pub model: ModelKind,
    /// Ship parameter file, relative to the scenario file. The bundled
    /// reference set for `model` is used when absent.
    pub params: Option<String>,
    pub integrator: Integrator,
    pub substeps: u32,
    /// Control interval (s).
    pub dt: f64,
    /// Commanded speed for every action (m/s).
    pub speed: f64,
    pub pid: PidGains,
}

impl Default for VesselConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::Mmg3dof,
            params: None,
            integrator: Integrator::Rk4,
            substeps: 10,
            dt: 1.0,
            speed: CRUISE_SPEED,
            pid: PidGains::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MaskSettings {
    pub n_actions: usize,
    pub frame: CommandFrame,
    pub horizon_steps: u32,
    /// Defaults to half the safety radius.
    pub circle_margin: Option<f64>,
    /// Defaults to half the safety radius.
    pub clearance_margin: Option<f64>,
}

impl Default for MaskSettings {
    fn default() -> Self {
        Self {
            n_actions: DEFAULT_ACTIONS,
            frame: CommandFrame::Relative,
            horizon_steps: 5,
            circle_margin: None,
            clearance_margin: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObservationSettings {
    pub history: usize,
    /// Defaults to [`PotentialConfig::for_radius`] of the safety radius.
    pub potential: Option<PotentialConfig>,
    pub bev: BevConfig,
}

impl Default for ObservationSettings {
    fn default() -> Self {
        Self {
            history: 8,
            potential: None,
            bev: BevConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    pub name: String,
    pub extent: MapExtent,
    pub goal: Goal,
    pub departure: MapExtent,
    #[serde(default = "default_jitter")]
    pub heading_jitter_deg: f64,
    pub step_budget: u32,
    #[serde(default)]
    pub polylines: Vec<PolylineSpec>,
    #[serde(default)]
    pub static_circles: Vec<CircleSpec>,
    #[serde(default)]
    pub moving: Option<MovingSpawner>,
    #[serde(default)]
    pub agents_as_obstacles: bool,
    #[serde(default)]
    pub reward: RewardWeights,
    #[serde(default)]
    pub randomization: Randomization,
    #[serde(default)]
    pub vessel: VesselConfig,
    #[serde(default)]
    pub mask: MaskSettings,
    #[serde(default)]
    pub observation: ObservationSettings,
}

fn default_jitter() -> f64 {
    10.0
}

/// Attempts per spawn before the scenario is declared infeasible.
pub const SPAWN_ATTEMPTS: u32 = 1000;

impl Scenario {
    /// Parses and validates a scenario.
    pub fn from_toml_str(text: &str) -> Result<Self, EnvError> {
        let table: toml::Table =
            toml::from_str(text).map_err(|e| EnvError::Parse(e.message().to_string()))?;
        match table.get("version").map(|v| v.as_integer()) {
            Some(Some(v)) if v == SCENARIO_VERSION as i64 => {}
            Some(Some(v)) => return Err(EnvError::UnsupportedVersion(v)),
            Some(None) => return Err(EnvError::Parse("`version` must be an integer".into())),
            None => return Err(EnvError::Parse("missing `version` header".into())),
        }
        let s: Scenario = toml::from_str(text).map_err(|e| EnvError::Parse(e.message().to_string()))?;
        s.validate()?;
        Ok(s)
    }

    /// Reads a scenario file; a relative `vessel.params` path is resolved
    /// against the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, EnvError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| EnvError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let mut s = Self::from_toml_str(&text)?;
        if let (Some(p), Some(dir)) = (&s.vessel.params, path.parent()) {
            s.vessel.params = Some(dir.join(p).display().to_string());
        }
        Ok(s)
    }

    /// Loads a bundled scenario by name, or a file path otherwise.
    pub fn resolve(name_or_path: &str) -> Result<Self, EnvError> {
        match Self::bundled(name_or_path) {
            Some(s) => Ok(s),
            None => Self::load(name_or_path),
        }
    }

    pub fn bundled(name: &str) -> Option<Self> {
        let text = match name {
            "mini_coastline" => MINI_COASTLINE,
            "mini_port" => MINI_PORT,
            "open_water" => OPEN_WATER,
            _ => return None,
        };
        Some(Self::from_toml_str(text).expect("bundled scenarios are valid"))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenarios always serialize")
    }

    pub fn ship_params(&self) -> Result<ShipParams, EnvError> {
        let params = match &self.vessel.params {
            Some(path) => ShipParams::load(path)?,
            None => ShipParams::reference(self.vessel.model),
        };
        if params.model_kind != self.vessel.model {
            return Err(EnvError::Scenario(format!(
                "vessel.model is {} but the parameter file is {}",
                self.vessel.model, params.model_kind
            )));
        }
        Ok(params)
    }

    pub fn action_set(&self) -> Result<ActionSet, EnvError> {
        ActionSet::new(self.mask.n_actions, self.mask.frame, self.vessel.speed)
            .map_err(|e| EnvError::Scenario(e.to_string()))
    }

    /// Mask settings for a hull of safety radius `radius`, with any margin
    /// overrides applied.
    pub fn mask_config(&self, radius: f64) -> MaskConfig {
        let mut cfg = MaskConfig::for_radius(radius, SafetyHorizon::from_steps(self.mask.horizon_steps, self.vessel.dt));
        if let Some(c) = self.mask.circle_margin {
            cfg.circle_margin = c;
        }
        if let Some(c) = self.mask.clearance_margin {
            cfg.clearance_margin = c;
        }
        cfg
    }

    /// Geometry, spawn and budget checks. Structural errors are returned
    /// as `Err`; soft findings appear as failed checks in the report.
    pub fn lint(&self, seed: u64, spawn_trials: usize) -> Result<LintReport, EnvError> {
        self.validate()?;
        let params = self.ship_params()?;
        let r = params.safety_radius;
        let mut checks = Vec::new();

        let statics = self.static_obstacles();
        let blocked = [self.departure.min, self.departure.max, self.departure.center()]
            .into_iter()
            .filter(|&p| !self.spawn_clear(&statics, p, r))
            .count();
        checks.push(LintCheck::new(
            "departure_clearance",
            blocked < 3,
            format!("{blocked} of 3 departure probe points are blocked by static geometry"),
        ));

        let mut failures = 0;
        for trial in 0..spawn_trials {
            let set = self.sample_obstacles(&mut rng_for(seed, Stream::Obstacles, trial as u64, 0, 0));
            let mut rng = rng_for(seed, Stream::Spawn, trial as u64, 0, 0);
            let ok = (0..SPAWN_ATTEMPTS).any(|_| {
                let p = Vec2::new(
                    rng.random_range(self.departure.min.x..=self.departure.max.x),
                    rng.random_range(self.departure.min.y..=self.departure.max.y),
                );
                self.spawn_clear(&set, p, r)
            });
            failures += !ok as usize;
        }
        checks.push(LintCheck::new(
            "spawn_feasibility",
            failures == 0,
            format!("{failures} of {spawn_trials} sampled layouts had no clear spawn point"),
        ));

        let direct = self.departure.center().distance(self.goal.position) / self.vessel.speed.max(1e-9) / self.vessel.dt;
        checks.push(LintCheck::new(
            "budget",
            (self.step_budget as f64) >= 1.5 * direct,
            format!("budget {} steps, straight run {:.0} steps", self.step_budget, direct.ceil()),
        ));

        let goal_clear = statics.polylines.iter().all(|poly| poly.distance(self.goal.position) > self.goal.radius);
        checks.push(LintCheck::new(
            "goal_clearance",
            goal_clear,
            "goal disc clear of static polylines".into(),
        ));
        Ok(LintReport {
            scenario: self.name.clone(),
            ok: checks.iter().all(|c| c.ok),
            checks,
        })
    }

    /// A random open-water pose in a freshly sampled obstacle layout.
    pub fn audit_scene<R: Rng>(&self, params: &ShipParams, rng: &mut R) -> Result<AuditScene, EnvError> {
        let obstacles = self.sample_obstacles(rng);
        let r = params.safety_radius;
        for _ in 0..SPAWN_ATTEMPTS {
            let p = Vec2::new(
                rng.random_range(self.extent.min.x..=self.extent.max.x),
                rng.random_range(self.extent.min.y..=self.extent.max.y),
            );
            if self.spawn_clear(&obstacles, p, r) {
                return Ok(AuditScene {
                    position: p,
                    psi: rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
                    obstacles,
                    actions: self.action_set()?,
                    cfg: self.mask_config(r),
                });
            }
        }
        Err(EnvError::InfeasibleSpawn { env: 0, agent: 0, attempts: SPAWN_ATTEMPTS })
    }

    /// Mask-versus-rollout agreement over `samples` poses drawn from this
    /// scenario, one random action each.
    pub fn audit_mask(&self, seed: u64, samples: usize) -> Result<AuditReport, EnvError> {
        let params = self.ship_params()?;
        let mut rng = rng_for(seed, Stream::Obstacles, u64::MAX, 0, 0);
        let mut report = AuditReport::default();
        for _ in 0..samples {
            let scene = self.audit_scene(&params, &mut rng)?;
            let i = rng.random_range(0..scene.actions.n_actions);
            report.record(&scene, i);
        }
        Ok(report)
    }

    /// Structural checks that need no randomness.
    pub fn validate(&self) -> Result<(), EnvError> {
        let fail = |m: String| Err(EnvError::Scenario(m));
        self.extent.validate()?;
        self.departure.validate()?;
        if !self.extent.contains_extent(&self.departure) {
            return fail("departure region must lie inside the map extent".into());
        }
        if !self.extent.contains(self.goal.position) || !(self.goal.radius > 0.0) {
            return fail("goal must lie inside the extent with a positive radius".into());
        }
        if self.step_budget == 0 {
            return fail("step_budget must be positive".into());
        }
        self.static_obstacles().validate()?;
        for (i, c) in self.static_circles.iter().enumerate() {
            if c.center.distance(self.goal.position) <= c.radius {
                return fail(format!("goal lies inside static circle {i}"));
            }
        }
        if self.static_obstacles().inside_land(self.goal.position) {
            return fail("goal lies inside a closed polyline".into());
        }
        if let Some(m) = &self.moving {
            m.region.validate()?;
            let ordered = |r: [f64; 2]| r[0] <= r[1] && r[0].is_finite() && r[1].is_finite();
            if !(ordered(m.radius) && m.radius[0] > 0.0)
                || !(ordered(m.speed) && m.speed[0] >= 0.0)
                || !(m.waypoints[0] >= 2 && m.waypoints[0] <= m.waypoints[1])
                || !(ordered(m.leg_length) && m.leg_length[0] > 0.0)
            {
                return fail(format!("invalid moving spawner ranges: {m:?}"));
            }
        }
        self.reward.validate()?;
        let v = &self.vessel;
        if !(v.dt > 0.0) || v.substeps == 0 || !(v.speed >= 0.0) || !v.pid.is_valid() {
            return fail("vessel needs dt > 0, substeps >= 1, speed >= 0 and non-negative gains".into());
        }
        if !(2..=crate::mask::ActionMask::MAX_ACTIONS).contains(&self.mask.n_actions) || self.mask.horizon_steps == 0 {
            return fail("mask needs 2..=64 actions and a positive horizon".into());
        }
        if self.observation.history == 0 {
            return fail("observation history must be at least 1".into());
        }
        self.observation.bev.validate()?;
        if let Some(p) = &self.observation.potential {
            p.validate()?;
        }
        let r = &self.randomization;
        let field = CurrentField {
            amplitude: r.current.amplitude[1],
            f_range: r.current.f_range,
            eps: r.current.eps,
            f_period: r.current.f_period,
            ..CurrentField::still()
        };
        field.validate()?;
        if !(r.current.amplitude[0] >= 0.0 && r.current.amplitude[0] <= r.current.amplitude[1]) {
            return fail("current amplitude range must be ordered and non-negative".into());
        }
        if !(r.sensor_sigma_pos >= 0.0 && r.sensor_sigma_heading_deg >= 0.0 && r.command_sigma_heading_deg >= 0.0) {
            return fail("noise scales must be non-negative".into());
        }
        Ok(())
    }

    /// Polylines and static circles, ids in file order.
    pub fn static_obstacles(&self) -> ObstacleSet {
        let circles = self
            .static_circles
            .iter()
            .enumerate()
            .map(|(i, c)| CircleObstacle::fixed(i as u32, c.center, c.radius))
            .collect();
        let polylines = self
            .polylines
            .iter()
            .enumerate()
            .map(|(i, p)| PolylineObstacle::new(i as u32, p.vertices.clone(), p.closed))
            .collect();
        ObstacleSet::new(circles, polylines)
    }

    /// Static obstacles plus freshly sampled moving ones.
    pub fn sample_obstacles<R: Rng>(&self, rng: &mut R) -> ObstacleSet {
        let mut set = self.static_obstacles();
        let Some(m) = &self.moving else { return set };
        let first_id = set.circles.len() as u32;
        let range = |r: [f64; 2], rng: &mut R| if r[1] > r[0] { rng.random_range(r[0]..=r[1]) } else { r[0] };
        let inside = |rng: &mut R| {
            Vec2::new(
                rng.random_range(m.region.min.x..=m.region.max.x),
                rng.random_range(m.region.min.y..=m.region.max.y),
            )
        };
        for k in 0..m.count {
            let start = inside(rng);
            let radius = range(m.radius, rng);
            let speed = range(m.speed, rng);
            let n = rng.random_range(m.waypoints[0]..=m.waypoints[1]) as usize;
            let mut waypoints = vec![start];
            while waypoints.len() < n {
                let prev = *waypoints.last().expect("non-empty");
                let leg = Vec2::from_angle(rng.random::<f64>() * std::f64::consts::TAU) * range(m.leg_length, rng);
                let p = prev + leg;
                let p = Vec2::new(
                    p.x.clamp(m.region.min.x, m.region.max.x),
                    p.y.clamp(m.region.min.y, m.region.max.y),
                );
                if p.distance(prev) > 1e-6 {
                    waypoints.push(p);
                }
            }
            let velocity = (waypoints[1] - start).normalized() * speed;
            let mut c = CircleObstacle::moving(first_id + k, start, radius, velocity);
            c.route = Some(Route {
                waypoints,
                speed,
                next: 1,
            });
            set.circles.push(c);
        }
        set
    }

    /// True if a vessel disc of `radius` at `p` is clear of every obstacle
    /// in `set` and inside the extent.
    pub fn spawn_clear(&self, set: &ObstacleSet, p: Vec2, radius: f64) -> bool {
        self.extent.contains(p)
            && !set.inside_land(p)
            && set.circles.iter().all(|c| p.distance(c.center) > c.radius + radius)
            && set.polylines.iter().all(|poly| poly.distance(p) > radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bundled_scenarios_load() {
        for name in BUNDLED {
            let s = Scenario::bundled(name).unwrap();
            assert_eq!(s.name, name);
            s.ship_params().unwrap();
        }
        let coast = Scenario::bundled("mini_coastline").unwrap();
        assert_eq!((coast.extent.width(), coast.extent.height()), (2000.0, 2000.0));
        assert_eq!(coast.step_budget, 800);
        assert_eq!(coast.static_circles.len(), 3);
        assert_eq!(coast.moving.unwrap().count, 3);
        let port = Scenario::bundled("mini_port").unwrap();
        assert_eq!(port.step_budget, 600);
    }

    #[test]
    fn version_is_checked() {
        let text = Scenario::bundled("open_water").unwrap().to_toml_string();
        let bumped = text.replace("version = 1", "version = 2");
        assert_eq!(Scenario::from_toml_str(&bumped), Err(EnvError::UnsupportedVersion(2)));
        let missing = text.replace("version = 1\n", "");
        assert!(matches!(Scenario::from_toml_str(&missing), Err(EnvError::Parse(_))));
    }

    #[test]
    fn round_trip_and_unknown_keys() {
        let s = Scenario::bundled("mini_port").unwrap();
        let back = Scenario::from_toml_str(&s.to_toml_string()).unwrap();
        assert_eq!(back, s);
        let bad = format!("{}\nsurprise = 3\n", "version = 1");
        let err = Scenario::from_toml_str(&bad).unwrap_err().to_string();
        assert!(err.contains("surprise") || err.contains("missing"), "{err}");
        let text = s.to_toml_string().replace("[reward]", "[reward]\nw_bonus = 1.0");
        let err = Scenario::from_toml_str(&text).unwrap_err().to_string();
        assert!(err.contains("w_bonus"), "{err}");
    }

    #[test]
    fn moving_obstacles_follow_spawner_ranges() {
        let s = Scenario::bundled("mini_coastline").unwrap();
        let m = s.moving.unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let set = s.sample_obstacles(&mut rng);
            assert_eq!(set.circles.len(), 6);
            for c in &set.circles[3..] {
                assert!(m.region.contains(c.center));
                assert!(c.radius >= m.radius[0] && c.radius <= m.radius[1]);
                let r = c.route.as_ref().unwrap();
                assert!(r.waypoints.len() >= m.waypoints[0] as usize);
                assert!(r.waypoints.iter().all(|w| m.region.contains(*w)));
            }
        }
    }

    #[test]
    fn goal_inside_obstacle_is_rejected() {
        let mut s = Scenario::bundled("open_water").unwrap();
        s.static_circles.push(CircleSpec {
            center: s.goal.position,
            radius: 10.0,
        });
        assert!(s.validate().is_err());
    }
}
