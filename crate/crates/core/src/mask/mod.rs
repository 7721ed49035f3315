//! Per-step action masking against velocity obstacles and polyline
//! clearance, plus the masked softmax over policy logits.
//!
//! Candidates are `n` uniformly spaced headings at a common speed. A bit is
//! cleared when the constant-velocity path at that heading reaches a circle
//! (inflated by the agent radius and a margin) in less than the horizon, or
//! passes within the clearance of a polyline segment before the horizon.

mod audit;
mod vo;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::VesselState;
use crate::geometry::{ccd_segment, CircleObstacle, HashGrid, ObstacleRef, ObstacleSet};
use crate::math::{angle_diff, wrap_angle, Vec2};

pub use audit::{audit_mask, random_scene, rollout_violates, AuditReport, AuditScene, RolloutVerdict};
pub use vo::{polyline_unsafe, ttc_circle, vo_cone_contains};

/// Ten knots in metres per second.
pub const CRUISE_SPEED: f64 = 10.0 * 1852.0 / 3600.0;

pub const DEFAULT_ACTIONS: usize = 18;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaskError {
    #[error("no safe action: every mask bit is cleared")]
    NoSafeAction,
    #[error("expected {expected} logits, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("logit {index} is not finite ({value})")]
    NonFiniteLogit { index: usize, value: f64 },
    #[error("invalid action set: {0}")]
    InvalidActions(String),
}

/// How action offsets map to headings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandFrame {
    /// Offsets are added to the current heading.
    #[default]
    Relative,
    /// Offsets are absolute world headings.
    Absolute,
}

/// `n` commands at offsets `-π + i·2π/n`. With even `n`, index `n/2` is
/// offset zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionSet {
    pub n_actions: usize,
    pub frame: CommandFrame,
    pub speed: f64,
}

impl Default for ActionSet {
    fn default() -> Self {
        Self {
            n_actions: DEFAULT_ACTIONS,
            frame: CommandFrame::Relative,
            speed: CRUISE_SPEED,
        }
    }
}

impl ActionSet {
    pub fn new(n_actions: usize, frame: CommandFrame, speed: f64) -> Result<Self, MaskError> {
        let set = Self { n_actions, frame, speed };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<(), MaskError> {
        if !(2..=ActionMask::MAX_ACTIONS).contains(&self.n_actions) {
            return Err(MaskError::InvalidActions(format!(
                "n_actions must be in [2, {}], got {}",
                ActionMask::MAX_ACTIONS,
                self.n_actions
            )));
        }
        if !(self.speed.is_finite() && self.speed >= 0.0) {
            return Err(MaskError::InvalidActions(format!("speed must be >= 0, got {}", self.speed)));
        }
        Ok(())
    }

    pub fn offset(&self, i: usize) -> f64 {
        -std::f64::consts::PI + i as f64 * std::f64::consts::TAU / self.n_actions as f64
    }

    /// Absolute heading of candidate `i` for a vessel at heading `psi`.
    pub fn heading(&self, i: usize, psi: f64) -> f64 {
        match self.frame {
            CommandFrame::Relative => wrap_angle(psi + self.offset(i)),
            CommandFrame::Absolute => wrap_angle(self.offset(i)),
        }
    }

    pub fn headings(&self, psi: f64) -> Vec<f64> {
        (0..self.n_actions).map(|i| self.heading(i, psi)).collect()
    }

    pub fn velocity(&self, i: usize, psi: f64) -> Vec2 {
        Vec2::from_angle(self.heading(i, psi)) * self.speed
    }

    /// Ordering used to break ties between candidates: closer to the
    /// current heading first, then starboard (clockwise) before port.
    pub fn tie_key(&self, i: usize, psi: f64) -> (f64, bool) {
        let turn = angle_diff(self.heading(i, psi), psi);
        (turn.abs(), turn > 0.0)
    }
}

/// Safety horizon in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SafetyHorizon {
    pub seconds: f64,
}

impl SafetyHorizon {
    pub fn from_steps(steps: u32, dt: f64) -> Self {
        Self { seconds: steps as f64 * dt }
    }
}

impl Default for SafetyHorizon {
    fn default() -> Self {
        Self::from_steps(5, 1.0)
    }
}

/// Radii used by the masker. Circles are inflated to
/// `agent_radius + obstacle radius + circle_margin`; polyline clearance is
/// `agent_radius + clearance_margin`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaskConfig {
    pub horizon: SafetyHorizon,
    pub agent_radius: f64,
    pub circle_margin: f64,
    pub clearance_margin: f64,
}

impl MaskConfig {
    /// Both margins default to half the agent radius.
    pub fn for_radius(agent_radius: f64, horizon: SafetyHorizon) -> Self {
        Self {
            horizon,
            agent_radius,
            circle_margin: 0.5 * agent_radius,
            clearance_margin: 0.5 * agent_radius,
        }
    }

    pub fn combined_radius(&self, obstacle_radius: f64) -> f64 {
        self.agent_radius + obstacle_radius + self.circle_margin
    }

    pub fn clearance(&self) -> f64 {
        self.agent_radius + self.clearance_margin
    }
}

/// Bit `i` set means action `i` is safe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActionMask {
    bits: u64,
    len: u8,
}

impl ActionMask {
    pub const MAX_ACTIONS: usize = 64;

    pub fn all_safe(n: usize) -> Self {
        assert!((1..=Self::MAX_ACTIONS).contains(&n));
        let bits = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Self { bits, len: n as u8 }
    }

    pub fn none_safe(n: usize) -> Self {
        assert!((1..=Self::MAX_ACTIONS).contains(&n));
        Self { bits: 0, len: n as u8 }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut m = Self::none_safe(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            m.set(i, b);
        }
        m
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        i < self.len() && self.bits >> i & 1 == 1
    }

    pub fn set(&mut self, i: usize, safe: bool) {
        assert!(i < self.len());
        if safe {
            self.bits |= 1 << i;
        } else {
            self.bits &= !(1 << i);
        }
    }

    pub fn count_safe(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn count_unsafe(&self) -> usize {
        self.len() - self.count_safe()
    }

    pub fn any_safe(&self) -> bool {
        self.bits != 0
    }

    pub fn raw(&self) -> u64 {
        self.bits
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }

    /// `'1'` for safe, `'0'` for masked, action 0 first.
    pub fn to_bit_string(&self) -> String {
        (0..self.len()).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }
}

/// A mask plus the fallback action chosen when every bit is cleared.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskOutcome {
    pub mask: ActionMask,
    pub fallback: Option<usize>,
}

/// Masks candidate actions for a vessel against the obstacle snapshot.
pub fn generate_mask(
    state: &VesselState,
    obstacles: &ObstacleSet,
    actions: &ActionSet,
    cfg: &MaskConfig,
    grid: &HashGrid,
) -> MaskOutcome {
    generate_mask_with(state.position(), state.psi, obstacles, &[], actions, cfg, grid)
}

/// As [`generate_mask`], with extra circles (other agents) checked
/// exhaustively. `extra` is not indexed by the grid.
pub fn generate_mask_with(
    position: Vec2,
    psi: f64,
    obstacles: &ObstacleSet,
    extra: &[CircleObstacle],
    actions: &ActionSet,
    cfg: &MaskConfig,
    grid: &HashGrid,
) -> MaskOutcome {
    let n = actions.n_actions;
    let th = cfg.horizon.seconds;
    let reach = cfg.agent_radius + cfg.circle_margin.max(cfg.clearance_margin);
    let radius = (actions.speed + obstacles.max_circle_speed()) * th
        + reach
        + obstacles.max_circle_radius();
    let mut nearby = Vec::new();
    grid.query_into(position, radius, &mut nearby);

    let clearance = cfg.clearance();
    let mut mask = ActionMask::all_safe(n);
    for i in 0..n {
        let v = actions.velocity(i, psi);
        let p_next = position + v * th;
        let circle_hit = |c: &CircleObstacle| {
            let r = cfg.combined_radius(c.radius);
            vo_cone_contains(position, v, c, r) && ttc_circle(position, v, c, r) < th
        };
        let unsafe_near = nearby.iter().any(|h| match *h {
            ObstacleRef::Circle(ci) => circle_hit(&obstacles.circles[ci as usize]),
            ObstacleRef::Segment { polyline, segment } => {
                let (a, b) = obstacles.polylines[polyline as usize].segment(segment as usize);
                vo::path_segment_unsafe(position, p_next, a, b, clearance)
            }
        });
        if unsafe_near || extra.iter().any(circle_hit) {
            mask.set(i, false);
        }
    }
    let fallback = (!mask.any_safe())
        .then(|| least_bad_action(position, psi, obstacles, extra, actions, cfg));
    MaskOutcome { mask, fallback }
}

/// Candidate maximizing the earliest time of contact with any inflated
/// circle or polyline clearance band, looking ten horizons ahead. Ties go
/// to [`ActionSet::tie_key`].
pub fn least_bad_action(
    position: Vec2,
    psi: f64,
    obstacles: &ObstacleSet,
    extra: &[CircleObstacle],
    actions: &ActionSet,
    cfg: &MaskConfig,
) -> usize {
    let far = 10.0 * cfg.horizon.seconds;
    let clearance = cfg.clearance();
    let min_ttc = |i: usize| {
        let v = actions.velocity(i, psi);
        let mut t = f64::INFINITY;
        for c in obstacles.circles.iter().chain(extra) {
            t = t.min(ttc_circle(position, v, c, cfg.combined_radius(c.radius)));
        }
        let p_far = position + v * far;
        for poly in &obstacles.polylines {
            for (a, b) in poly.segments() {
                if let Some(c) = ccd_segment(position, p_far, clearance, a, b) {
                    t = t.min(c.t * far);
                }
            }
        }
        t
    };
    let mut best = 0;
    let mut best_t = f64::NEG_INFINITY;
    for i in 0..actions.n_actions {
        let t = min_ttc(i);
        let better = t > best_t
            || (t == best_t && actions.tie_key(i, psi) < actions.tie_key(best, psi));
        if better {
            best = i;
            best_t = t;
        }
    }
    best
}

/// Softmax over the unmasked logits; masked entries are exactly zero.
pub fn masked_distribution(logits: &[f64], mask: &ActionMask) -> Result<Vec<f64>, MaskError> {
    if logits.len() != mask.len() {
        return Err(MaskError::LengthMismatch {
            expected: mask.len(),
            found: logits.len(),
        });
    }
    if let Some((index, &value)) = logits.iter().enumerate().find(|(_, z)| !z.is_finite()) {
        return Err(MaskError::NonFiniteLogit { index, value });
    }
    let z_max = logits
        .iter()
        .enumerate()
        .filter(|(i, _)| mask.get(*i))
        .map(|(_, &z)| z)
        .fold(f64::NEG_INFINITY, f64::max);
    if z_max == f64::NEG_INFINITY {
        return Err(MaskError::NoSafeAction);
    }
    let mut probs: Vec<f64> = logits
        .iter()
        .enumerate()
        .map(|(i, &z)| if mask.get(i) { (z - z_max).exp() } else { 0.0 })
        .collect();
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    Ok(probs)
}
