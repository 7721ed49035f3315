//! Lock-step batch of environments and agents.
//!
//! A step runs in phases. The batch owner advances moving obstacles and
//! refreshes each grid, then per-agent physics runs in parallel, then a
//! second parallel pass resolves swept collisions, rewards, observations
//! and next-step masks against the updated snapshot. Every random draw is
//! keyed by `(seed, stream, env, agent, step)`, so the dispatch strategy
//! never changes results.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::Decision;
use crate::dynamics::{advance, ControlCommand, CurrentProcess, DynamicsError, PidController, ShipParams, VesselState};
use crate::geometry::{
    ccd_circle, ccd_segment, CircleObstacle, CollisionEvent, Contact, HashGrid, MapExtent, ObstacleId,
    ObstacleRef, ObstacleSet,
};
use crate::mask::{generate_mask_with, ActionMask, ActionSet, MaskConfig, MaskOutcome};
use crate::math::Vec2;
use crate::observation::{
    aggregate_gradients_near, build_observation, render_bev, BevImage, HistoryBuffer, ObservationConfig,
    ObservationContext,
};
use crate::seeding::{rng_for, Stream};

use super::reward::RewardBreakdown;
use super::scenario::Scenario;
use super::EnvError;

/// How per-agent work is dispatched to the thread pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// One parallel pass over all N × M agents.
    #[default]
    Full,
    /// One parallel pass per environment, environments in sequence.
    #[serde(rename = "per-env")]
    PerEnvironment,
    /// One dispatch per agent, agents in sequence.
    PerAgent,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Full, Strategy::PerEnvironment, Strategy::PerAgent];

    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Full => "full",
            Strategy::PerEnvironment => "per-env",
            Strategy::PerAgent => "per-agent",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(Strategy::Full),
            "per-env" | "per-environment" | "per_env" => Ok(Strategy::PerEnvironment),
            "per-agent" | "per_agent" => Ok(Strategy::PerAgent),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchConfig {
    pub n_envs: usize,
    pub m_agents: usize,
    pub seed: u64,
    pub strategy: Strategy,
}

impl BatchConfig {
    pub fn new(n_envs: usize, m_agents: usize, seed: u64) -> Self {
        Self {
            n_envs,
            m_agents,
            seed,
            strategy: Strategy::Full,
        }
    }

    pub fn with_strategy(self, strategy: Strategy) -> Self {
        Self { strategy, ..self }
    }

    pub fn n_agents(&self) -> usize {
        self.n_envs * self.m_agents
    }
}

/// Which per-step products to compute. Physics, collisions and rewards
/// always run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvOptions {
    pub observations: bool,
    pub masks: bool,
    pub bev: bool,
}

impl Default for EnvOptions {
    fn default() -> Self {
        Self {
            observations: true,
            masks: true,
            bev: true,
        }
    }
}

impl EnvOptions {
    pub fn without_bev() -> Self {
        Self {
            bev: false,
            ..Self::default()
        }
    }

    pub fn physics_only() -> Self {
        Self {
            observations: false,
            masks: false,
            bev: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    #[default]
    None,
    Goal,
    Collision,
    Boundary,
    Timeout,
}

impl Termination {
    /// Stable integer code for dense arrays.
    pub fn code(&self) -> u8 {
        match self {
            Termination::None => 0,
            Termination::Goal => 1,
            Termination::Collision => 2,
            Termination::Boundary => 3,
            Termination::Timeout => 4,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::None => "none",
            Termination::Goal => "goal",
            Termination::Collision => "collision",
            Termination::Boundary => "boundary",
            Termination::Timeout => "timeout",
        }
    }
}

/// Outcome of the most recent step for one agent.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AgentStep {
    pub reward: RewardBreakdown,
    /// Action applied this step; `None` if the agent was already done or
    /// the action was rejected.
    pub action: Option<usize>,
    /// Masked candidates at the decision point.
    pub unsafe_actions: u32,
    /// The decision mask had no safe action.
    pub fallback: bool,
    pub collision: Option<CollisionEvent>,
    /// The action index was out of range; the agent did not move.
    pub rejected: bool,
}

/// One agent's state and episode bookkeeping.
#[derive(Debug, Clone)]
pub struct Agent {
    state: VesselState,
    pid: PidController,
    start: Vec2,
    history: Option<HistoryBuffer>,
    bev: Option<BevImage>,
    mask: MaskOutcome,
    done: bool,
    termination: Termination,
    steps: u32,
    goal_distance: f64,
    episode_return: f64,
    unsafe_total: u64,
    last: AgentStep,
    fault: Option<DynamicsError>,
}

/// Read-only access to an agent.
pub type AgentView = Agent;

impl Agent {
    pub fn state(&self) -> &VesselState {
        &self.state
    }

    pub fn history(&self) -> Option<&HistoryBuffer> {
        self.history.as_ref()
    }

    pub fn bev(&self) -> Option<&BevImage> {
        self.bev.as_ref()
    }

    /// Mask for the next decision.
    pub fn mask(&self) -> &MaskOutcome {
        &self.mask
    }

    pub fn done(&self) -> bool {
        self.done
    }

    pub fn termination(&self) -> Termination {
        self.termination
    }

    /// Steps taken this episode.
    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn goal_distance(&self) -> f64 {
        self.goal_distance
    }

    pub fn episode_return(&self) -> f64 {
        self.episode_return
    }

    /// Sum of masked-candidate counts over this episode's decisions.
    pub fn unsafe_total(&self) -> u64 {
        self.unsafe_total
    }

    pub fn last(&self) -> &AgentStep {
        &self.last
    }
}

struct World {
    obstacles: ObstacleSet,
    grid: HashGrid,
    prev_centers: Vec<Vec2>,
    current: CurrentProcess,
    current_now: Vec2,
}

/// Per-step quantities shared by every agent.
struct StepContext<'a> {
    scenario: &'a Scenario,
    params: &'a ShipParams,
    actions: &'a ActionSet,
    mask_cfg: &'a MaskConfig,
    obs_cfg: &'a ObservationConfig,
    options: EnvOptions,
    seed: u64,
    m: usize,
    step: u64,
    cmd_sigma: f64,
    sensor: (f64, f64),
}

impl StepContext<'_> {
    fn obs_context(&self) -> ObservationContext {
        ObservationContext {
            extent: self.scenario.extent,
            goal: self.scenario.goal.position,
            step_budget: self.scenario.step_budget,
            commanded_speed: self.actions.speed,
        }
    }

    /// State as seen through the sensors at `step`.
    fn sensed(&self, s: &VesselState, env: usize, agent: usize, step: u64) -> VesselState {
        let (sp, sh) = self.sensor;
        if sp == 0.0 && sh == 0.0 {
            return *s;
        }
        let mut rng = rng_for(self.seed, Stream::SensorNoise, env as u64, agent as u64, step);
        let mut out = *s;
        out.x += gaussian(&mut rng, sp);
        out.y += gaussian(&mut rng, sp);
        out.psi = crate::math::wrap_angle(out.psi + gaussian(&mut rng, sh));
        out
    }
}

fn gaussian<R: Rng>(rng: &mut R, sigma: f64) -> f64 {
    if sigma > 0.0 {
        Normal::new(0.0, sigma).expect("sigma is positive and finite").sample(rng)
    } else {
        0.0
    }
}

fn dispatch<F>(agents: &mut [Agent], m: usize, strategy: Strategy, f: F)
where
    F: Fn(usize, &mut Agent) + Sync + Send,
{
    match strategy {
        Strategy::Full => agents.par_iter_mut().enumerate().for_each(|(i, a)| f(i, a)),
        Strategy::PerEnvironment => {
            for (e, chunk) in agents.chunks_mut(m).enumerate() {
                chunk.par_iter_mut().enumerate().for_each(|(j, a)| f(e * m + j, a));
            }
        }
        Strategy::PerAgent => {
            for (i, a) in agents.iter_mut().enumerate() {
                std::slice::from_mut(a).par_iter_mut().for_each(|a| f(i, a));
            }
        }
    }
}

/// Earliest `t ∈ [0, 1]` at which `p0 → p1` leaves `extent` (`p0` inside).
fn exit_time(extent: &MapExtent, p0: Vec2, p1: Vec2) -> Option<f64> {
    if extent.contains(p1) {
        return None;
    }
    let d = p1 - p0;
    let mut t_exit = 1.0f64;
    for (delta, lo, hi, start) in [
        (d.x, extent.min.x, extent.max.x, p0.x),
        (d.y, extent.min.y, extent.max.y, p0.y),
    ] {
        if delta > 0.0 {
            t_exit = t_exit.min((hi - start) / delta);
        } else if delta < 0.0 {
            t_exit = t_exit.min((lo - start) / delta);
        }
    }
    Some(t_exit.clamp(0.0, 1.0))
}

/// Agents' step-start and step-end positions, for agent-agent checks.
#[derive(Clone, Copy)]
struct Swept {
    p0: Vec2,
    p1: Vec2,
    active: bool,
}

pub struct BatchEnv {
    scenario: Scenario,
    params: ShipParams,
    config: BatchConfig,
    options: EnvOptions,
    actions: ActionSet,
    mask_cfg: MaskConfig,
    obs_cfg: ObservationConfig,
    worlds: Vec<World>,
    agents: Vec<Agent>,
    step: u32,
}

impl BatchEnv {
    pub fn new(scenario: Scenario, config: BatchConfig, options: EnvOptions) -> Result<Self, EnvError> {
        scenario.validate()?;
        if config.n_envs == 0 || config.m_agents == 0 {
            return Err(EnvError::Batch(format!(
                "n_envs and m_agents must be positive, got {} x {}",
                config.n_envs, config.m_agents
            )));
        }
        let params = scenario.ship_params()?;
        let r = params.safety_radius;
        let actions = scenario.action_set()?;
        let mask_cfg = scenario.mask_config(r);
        let mut obs_cfg = ObservationConfig::for_radius(r);
        if let Some(p) = scenario.observation.potential {
            obs_cfg.potential = p;
        }
        let mut env = Self {
            scenario,
            params,
            config,
            options,
            actions,
            mask_cfg,
            obs_cfg,
            worlds: Vec::new(),
            agents: Vec::new(),
            step: 0,
        };
        env.reset()?;
        Ok(env)
    }

    fn context(&self) -> StepContext<'_> {
        let noise = &self.scenario.randomization;
        StepContext {
            scenario: &self.scenario,
            params: &self.params,
            actions: &self.actions,
            mask_cfg: &self.mask_cfg,
            obs_cfg: &self.obs_cfg,
            options: self.options,
            seed: self.config.seed,
            m: self.config.m_agents,
            step: self.step as u64,
            cmd_sigma: noise.command_sigma_heading_deg.to_radians(),
            sensor: (noise.sensor_sigma_pos, noise.sensor_sigma_heading_deg.to_radians()),
        }
    }

    /// Re-samples obstacles, currents and spawns from the configured seed.
    pub fn reset(&mut self) -> Result<(), EnvError> {
        let seed = self.config.seed;
        let m = self.config.m_agents;
        let sc = &self.scenario;
        let radius = self.params.safety_radius;
        self.step = 0;
        self.worlds = (0..self.config.n_envs)
            .map(|e| {
                let obstacles = sc.sample_obstacles(&mut rng_for(seed, Stream::Obstacles, e as u64, 0, 0));
                let mut rng = rng_for(seed, Stream::Current, e as u64, 0, 0);
                let field = sc.randomization.current.sample(&mut rng);
                let current = CurrentProcess::new(field, &mut rng);
                World {
                    grid: HashGrid::build(&obstacles),
                    prev_centers: obstacles.circles.iter().map(|c| c.center).collect(),
                    current_now: current.velocity(0.0),
                    current,
                    obstacles,
                }
            })
            .collect();

        let goal = sc.goal.position;
        let jitter = sc.heading_jitter_deg.to_radians();
        let trim_rpm = (self.params.rpm_per_speed() * self.actions.speed).clamp(0.0, 1.0);
        let mut agents = Vec::with_capacity(self.config.n_agents());
        for (e, world) in self.worlds.iter().enumerate() {
            let mut placed: Vec<Vec2> = Vec::new();
            for j in 0..m {
                let mut rng = rng_for(seed, Stream::Spawn, e as u64, j as u64, 0);
                let dep = &sc.departure;
                let mut spawn = None;
                for _ in 0..super::scenario::SPAWN_ATTEMPTS {
                    let p = Vec2::new(
                        rng.random_range(dep.min.x..=dep.max.x),
                        rng.random_range(dep.min.y..=dep.max.y),
                    );
                    let clear_of_agents = !sc.agents_as_obstacles
                        || placed.iter().all(|q| q.distance(p) > 2.0 * radius);
                    if clear_of_agents && sc.spawn_clear(&world.obstacles, p, radius) {
                        spawn = Some(p);
                        break;
                    }
                }
                let p = spawn.ok_or(EnvError::InfeasibleSpawn {
                    env: e,
                    agent: j,
                    attempts: super::scenario::SPAWN_ATTEMPTS,
                })?;
                placed.push(p);
                let psi = (goal - p).angle() + rng.random_range(-1.0..=1.0) * jitter;
                let mut state = VesselState::underway(p, psi, self.actions.speed);
                state.rpm = trim_rpm;
                agents.push(Agent {
                    state,
                    pid: PidController::for_ship(sc.vessel.pid, &self.params),
                    start: p,
                    history: None,
                    bev: None,
                    mask: MaskOutcome {
                        mask: ActionMask::all_safe(self.actions.n_actions),
                        fallback: None,
                    },
                    done: false,
                    termination: Termination::None,
                    steps: 0,
                    goal_distance: p.distance(goal),
                    episode_return: 0.0,
                    unsafe_total: 0,
                    last: AgentStep::default(),
                    fault: None,
                });
            }
        }
        self.agents = agents;

        let swept = self.swept_snapshot();
        let mut agents = std::mem::take(&mut self.agents);
        let ctx = self.context();
        let worlds = &self.worlds;
        dispatch(&mut agents, m, self.config.strategy, |i, a| {
            let e = i / ctx.m;
            let sensed = ctx.sensed(&a.state, e, i % ctx.m, 0);
            if ctx.options.observations {
                let obs = build_observation(&sensed, &worlds[e].obstacles, Some(&worlds[e].grid), &ctx.obs_context(), 0, ctx.obs_cfg);
                a.history = Some(HistoryBuffer::new(ctx.scenario.observation.history, obs));
            }
            refresh_mask_and_bev(&ctx, &worlds[e], &swept, i, a, &sensed);
        });
        self.agents = agents;
        Ok(())
    }

    fn swept_snapshot(&self) -> Vec<Swept> {
        if !self.scenario.agents_as_obstacles {
            return Vec::new();
        }
        self.agents
            .iter()
            .map(|a| Swept {
                p0: a.start,
                p1: a.state.position(),
                active: !a.done,
            })
            .collect()
    }

    /// Advances every agent one control step. `actions[i]` is ignored for
    /// agents that are already done; out-of-range indices are rejected for
    /// that agent only.
    pub fn step(&mut self, actions: &[usize]) -> Result<(), EnvError> {
        let n = self.agents.len();
        if actions.len() != n {
            return Err(EnvError::ActionCount {
                expected: n,
                found: actions.len(),
            });
        }
        let dt = self.scenario.vessel.dt;
        let t = self.step as f64 * dt;

        // Phase 1: exogenous obstacles and the grid.
        self.worlds.par_iter_mut().for_each(|w| {
            w.prev_centers.clear();
            w.prev_centers.extend(w.obstacles.circles.iter().map(|c| c.center));
            for c in &mut w.obstacles.circles {
                c.advance(dt);
            }
            w.grid.update_circles(&w.obstacles);
            w.current_now = w.current.velocity(t);
        });

        // Phase 2a: commands and physics.
        let strategy = self.config.strategy;
        let m = self.config.m_agents;
        let mut agents = std::mem::take(&mut self.agents);
        {
            let ctx = self.context();
            let worlds = &self.worlds;
            let vessel = &ctx.scenario.vessel;
            dispatch(&mut agents, m, strategy, |i, a| {
                a.start = a.state.position();
                if a.done {
                    a.last = AgentStep::default();
                    return;
                }
                let action = actions[i];
                if action >= ctx.actions.n_actions {
                    a.last = AgentStep {
                        rejected: true,
                        ..AgentStep::default()
                    };
                    return;
                }
                let e = i / ctx.m;
                let mut heading = ctx.actions.heading(action, a.state.psi);
                if ctx.cmd_sigma > 0.0 {
                    let mut rng = rng_for(ctx.seed, Stream::CommandNoise, e as u64, (i % ctx.m) as u64, ctx.step);
                    heading += gaussian(&mut rng, ctx.cmd_sigma);
                }
                let cmd = ControlCommand::new(heading, ctx.actions.speed);
                match advance(
                    &a.state,
                    ctx.params,
                    &mut a.pid,
                    &cmd,
                    worlds[e].current_now,
                    vessel.dt,
                    vessel.integrator,
                    vessel.substeps,
                ) {
                    Ok(s) => a.state = s,
                    Err(err) => a.fault = Some(err),
                }
                a.last = AgentStep {
                    action: Some(action),
                    unsafe_actions: a.mask.mask.count_unsafe() as u32,
                    fallback: a.mask.fallback.is_some(),
                    ..AgentStep::default()
                };
            });
        }
        self.agents = agents;
        if let Some(err) = self.agents.iter_mut().find_map(|a| a.fault.take()) {
            return Err(err.into());
        }

        // Phase 2b: events, rewards and next observations.
        let swept = self.swept_snapshot();
        self.step += 1;
        let mut agents = std::mem::take(&mut self.agents);
        let ctx = self.context();
        let worlds = &self.worlds;
        dispatch(&mut agents, m, strategy, |i, a| {
            if a.done || a.last.rejected {
                return;
            }
            let e = i / ctx.m;
            resolve_step(&ctx, &worlds[e], &swept, i, a);
            let sensed = ctx.sensed(&a.state, e, i % ctx.m, ctx.step);
            if ctx.options.observations {
                let obs = build_observation(
                    &sensed,
                    &worlds[e].obstacles,
                    Some(&worlds[e].grid),
                    &ctx.obs_context(),
                    a.steps,
                    ctx.obs_cfg,
                );
                if let Some(h) = a.history.as_mut() {
                    h.push(obs);
                }
            }
            if !a.done {
                refresh_mask_and_bev(&ctx, &worlds[e], &swept, i, a, &sensed);
            } else if ctx.options.bev {
                a.bev = Some(render_bev(&sensed, &worlds[e].obstacles, ctx.scenario.goal.position, ctx.scenario.goal.radius, &ctx.scenario.observation.bev));
            }
        });
        self.agents = agents;
        Ok(())
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn params(&self) -> &ShipParams {
        &self.params
    }

    pub fn config(&self) -> &BatchConfig {
        &self.config
    }

    pub fn options(&self) -> &EnvOptions {
        &self.options
    }

    pub fn action_set(&self) -> &ActionSet {
        &self.actions
    }

    pub fn mask_config(&self) -> &MaskConfig {
        &self.mask_cfg
    }

    pub fn observation_config(&self) -> &ObservationConfig {
        &self.obs_cfg
    }

    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    /// Control steps taken since the last reset.
    pub fn step_index(&self) -> u32 {
        self.step
    }

    pub fn agent(&self, i: usize) -> &Agent {
        &self.agents[i]
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn all_done(&self) -> bool {
        self.agents.iter().all(|a| a.done)
    }

    /// Obstacle snapshot of environment `e` after the last step.
    pub fn obstacles(&self, e: usize) -> &ObstacleSet {
        &self.worlds[e].obstacles
    }

    pub fn grid(&self, e: usize) -> &HashGrid {
        &self.worlds[e].grid
    }

    /// Current velocity applied during the last step of environment `e`.
    pub fn current(&self, e: usize) -> Vec2 {
        self.worlds[e].current_now
    }

    /// Decision inputs for agent `i` from its true state.
    pub fn decision(&self, i: usize) -> Decision {
        let a = &self.agents[i];
        Decision {
            psi: a.state.psi,
            goal_bearing: (self.scenario.goal.position - a.state.position()).angle(),
            mask: a.mask,
        }
    }
}

/// Circles standing in for the other agents of environment `e`.
fn agent_circles(ctx: &StepContext, swept: &[Swept], i: usize, dt: f64) -> Vec<CircleObstacle> {
    if swept.is_empty() {
        return Vec::new();
    }
    let e = i / ctx.m;
    let r = ctx.params.safety_radius;
    (e * ctx.m..(e + 1) * ctx.m)
        .filter(|&k| k != i && swept[k].active)
        .map(|k| CircleObstacle::moving(k as u32, swept[k].p1, r, (swept[k].p1 - swept[k].p0) * (1.0 / dt)))
        .collect()
}

fn refresh_mask_and_bev(ctx: &StepContext, world: &World, swept: &[Swept], i: usize, a: &mut Agent, sensed: &VesselState) {
    if ctx.options.masks {
        let extra = agent_circles(ctx, swept, i, ctx.scenario.vessel.dt);
        a.mask = generate_mask_with(
            a.state.position(),
            a.state.psi,
            &world.obstacles,
            &extra,
            ctx.actions,
            ctx.mask_cfg,
            &world.grid,
        );
    }
    if ctx.options.bev {
        a.bev = Some(render_bev(
            sensed,
            &world.obstacles,
            ctx.scenario.goal.position,
            ctx.scenario.goal.radius,
            &ctx.scenario.observation.bev,
        ));
    }
}

/// Swept checks over the step just integrated, then termination, reward
/// and bookkeeping.
fn resolve_step(ctx: &StepContext, world: &World, swept: &[Swept], i: usize, a: &mut Agent) {
    let sc = ctx.scenario;
    let r = ctx.params.safety_radius;
    let p0 = a.start;
    let p1 = a.state.position();

    let mut hit: Option<(ObstacleId, Contact)> = None;
    let mut consider = |id: ObstacleId, c: Contact| {
        if hit.is_none_or(|(_, best)| c.t < best.t) {
            hit = Some((id, c));
        }
    };
    for (k, c) in world.obstacles.circles.iter().enumerate() {
        if let Some(contact) = ccd_circle(p0, p1, r, c, world.prev_centers[k], c.center) {
            consider(ObstacleId::Circle { id: c.id }, contact);
        }
    }
    for h in world.grid.query_swept(p0, p1, r) {
        if let ObstacleRef::Segment { polyline, segment } = h {
            let poly = &world.obstacles.polylines[polyline as usize];
            let (s0, s1) = poly.segment(segment as usize);
            if let Some(contact) = ccd_segment(p0, p1, r, s0, s1) {
                consider(ObstacleId::Polyline { id: poly.id, segment }, contact);
            }
        }
    }
    if !swept.is_empty() {
        let e = i / ctx.m;
        for k in (e * ctx.m..(e + 1) * ctx.m).filter(|&k| k != i && swept[k].active) {
            let other = CircleObstacle::fixed(k as u32, swept[k].p0, r);
            if let Some(contact) = ccd_circle(p0, p1, r, &other, swept[k].p0, swept[k].p1) {
                consider(ObstacleId::Agent { index: k as u32 }, contact);
            }
        }
    }

    let mut event: Option<(Termination, f64)> = hit.map(|(_, c)| (Termination::Collision, c.t));
    let boundary = exit_time(&sc.extent, p0, p1).or_else(|| world.obstacles.inside_land(p1).then_some(1.0));
    if let Some(tb) = boundary {
        if event.is_none_or(|(_, t)| tb < t) {
            event = Some((Termination::Boundary, tb));
            hit = None;
        }
    }
    let goal = CircleObstacle::fixed(u32::MAX, sc.goal.position, sc.goal.radius);
    if let Some(g) = ccd_circle(p0, p1, 0.0, &goal, goal.center, goal.center) {
        if event.is_none_or(|(_, t)| g.t < t) {
            event = Some((Termination::Goal, g.t));
            hit = None;
        }
    }

    a.steps += 1;
    let mut termination = Termination::None;
    if let Some((kind, t)) = event {
        termination = kind;
        if t < 1.0 {
            let p = p0.lerp(p1, t);
            a.state.x = p.x;
            a.state.y = p.y;
        }
    } else if a.steps >= sc.step_budget {
        termination = Termination::Timeout;
    }
    a.last.collision = hit.map(|(id, c)| CollisionEvent::new(i as u32, id, c));

    let p = a.state.position();
    let goal_distance = p.distance(sc.goal.position);
    let grad = aggregate_gradients_near(
        p,
        &world.obstacles,
        &world.grid,
        sc.goal.position,
        sc.extent.diagonal(),
        &ctx.obs_cfg.potential,
    )
    .normalized();
    let magnitude = grad.polyline.norm().max(grad.circle.norm());
    let reward = RewardBreakdown::compute(&sc.reward, a.goal_distance, goal_distance, termination, magnitude);
    a.goal_distance = goal_distance;
    a.last.reward = reward;
    a.episode_return += reward.total();
    a.unsafe_total += a.last.unsafe_actions as u64;
    a.termination = termination;
    a.done = termination != Termination::None;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn open(n: usize, m: usize, seed: u64) -> BatchEnv {
        BatchEnv::new(Scenario::bundled("open_water").unwrap(), BatchConfig::new(n, m, seed), EnvOptions::default()).unwrap()
    }

    #[test]
    fn reset_is_deterministic() {
        let a = open(3, 2, 11);
        let b = open(3, 2, 11);
        for i in 0..6 {
            assert_eq!(a.agent(i).state(), b.agent(i).state());
            assert_eq!(a.agent(i).history(), b.agent(i).history());
        }
        let c = open(3, 2, 12);
        assert_ne!(a.agent(0).state(), c.agent(0).state());
    }

    #[test]
    fn exit_time_on_each_side() {
        let e = MapExtent::sized(10.0, 10.0);
        assert_eq!(exit_time(&e, Vec2::new(5.0, 5.0), Vec2::new(6.0, 6.0)), None);
        assert_eq!(exit_time(&e, Vec2::new(5.0, 5.0), Vec2::new(15.0, 5.0)), Some(0.5));
        assert_eq!(exit_time(&e, Vec2::new(5.0, 5.0), Vec2::new(5.0, -5.0)), Some(0.5));
    }

    #[test]
    fn wrong_action_count_and_rejection() {
        let mut env = open(1, 2, 1);
        assert!(matches!(env.step(&[9]), Err(EnvError::ActionCount { .. })));
        let before = *env.agent(1).state();
        env.step(&[9, 99]).unwrap();
        assert!(env.agent(1).last().rejected);
        assert_eq!(*env.agent(1).state(), before);
        assert!(!env.agent(0).last().rejected);
    }

    #[test]
    fn strategy_names_parse() {
        for s in Strategy::ALL {
            assert_eq!(s.as_str().parse::<Strategy>().unwrap(), s);
        }
        assert!("sideways".parse::<Strategy>().is_err());
    }
}
