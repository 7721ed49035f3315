//! Dense constant-velocity rollout oracle for auditing mask verdicts.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::geometry::{min_dist_point_segment, CircleObstacle, HashGrid, ObstacleSet, PolylineObstacle};
use crate::math::Vec2;

use super::{generate_mask_with, ActionSet, MaskConfig, SafetyHorizon};

/// Samples per horizon used by the rollout oracle.
const ROLLOUT_SAMPLES: usize = 1000;

/// One randomized masking problem.
#[derive(Debug, Clone)]
pub struct AuditScene {
    pub position: Vec2,
    pub psi: f64,
    pub obstacles: ObstacleSet,
    pub actions: ActionSet,
    pub cfg: MaskConfig,
}

/// Oracle result for one (scene, action) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RolloutVerdict {
    pub violates: bool,
    /// True when the pair sits within sampling tolerance of the TTC or
    /// clearance boundary, where the two verdicts may legitimately differ.
    pub near_boundary: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AuditReport {
    pub pairs: usize,
    pub agree: usize,
    pub disagree: usize,
    pub disagree_off_boundary: usize,
    pub masked: usize,
}

impl AuditReport {
    pub fn agreement(&self) -> f64 {
        if self.pairs == 0 {
            1.0
        } else {
            self.agree as f64 / self.pairs as f64
        }
    }
}

/// Agent at the origin with a random heading, up to four circles (half of
/// them moving) and up to two polylines within reach of the horizon.
pub fn random_scene<R: Rng>(rng: &mut R) -> AuditScene {
    let agent_radius = rng.random_range(2.0..10.0);
    let actions = ActionSet {
        speed: rng.random_range(1.0..8.0),
        ..ActionSet::default()
    };
    let horizon = SafetyHorizon::from_steps(rng.random_range(2..8), 1.0);
    let cfg = MaskConfig::for_radius(agent_radius, horizon);
    let reach = actions.speed * horizon.seconds + 30.0;
    let point = |rng: &mut R| {
        Vec2::new(rng.random_range(-reach..reach), rng.random_range(-reach..reach))
    };
    let mut circles = Vec::new();
    for id in 0..rng.random_range(0..=4u32) {
        let center = point(rng);
        let radius = rng.random_range(1.0..15.0);
        let c = if rng.random_bool(0.5) {
            let v = Vec2::from_angle(rng.random_range(-3.2..3.2)) * rng.random_range(0.0..5.0);
            CircleObstacle::moving(id, center, radius, v)
        } else {
            CircleObstacle::fixed(id, center, radius)
        };
        circles.push(c);
    }
    let mut polylines = Vec::new();
    for id in 0..rng.random_range(0..=2u32) {
        let n = rng.random_range(2..=4);
        let vertices: Vec<Vec2> = (0..n).map(|_| point(rng)).collect();
        polylines.push(PolylineObstacle::new(id, vertices, false));
    }
    AuditScene {
        position: Vec2::ZERO,
        psi: rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
        obstacles: ObstacleSet::new(circles, polylines),
        actions,
        cfg,
    }
}

/// Samples the constant-velocity paths of the agent and every obstacle over
/// the horizon and reports whether action `i` collides or violates
/// clearance.
pub fn rollout_violates(scene: &AuditScene, i: usize) -> RolloutVerdict {
    let th = scene.cfg.horizon.seconds;
    let dt = th / ROLLOUT_SAMPLES as f64;
    let v = scene.actions.velocity(i, scene.psi);
    let mut violates = false;
    let mut near_boundary = false;
    for c in &scene.obstacles.circles {
        let r = scene.cfg.combined_radius(c.radius);
        let rel_speed = (v - c.velocity).norm();
        let tol = rel_speed * dt;
        let mut d_min = f64::INFINITY;
        let mut first = None;
        // Strictly before the horizon, matching `ttc < T_h`.
        for k in 0..ROLLOUT_SAMPLES {
            let t = k as f64 * dt;
            let d = (scene.position + v * t).distance(c.center + c.velocity * t);
            d_min = d_min.min(d);
            if d <= r && first.is_none() {
                first = Some(t);
            }
        }
        if first.is_some() {
            violates = true;
        }
        if (d_min - r).abs() <= tol || first.is_some_and(|t| th - t <= 2.0 * dt) {
            near_boundary = true;
        }
    }
    let clearance = scene.cfg.clearance();
    let tol = v.norm() * dt;
    for poly in &scene.obstacles.polylines {
        let mut d_min = f64::INFINITY;
        for k in 0..=ROLLOUT_SAMPLES {
            let p = scene.position + v * (k as f64 * dt);
            for (a, b) in poly.segments() {
                d_min = d_min.min(min_dist_point_segment(p, a, b));
            }
        }
        if d_min < clearance {
            violates = true;
        }
        if (d_min - clearance).abs() <= tol {
            near_boundary = true;
        }
    }
    RolloutVerdict { violates, near_boundary }
}

impl AuditReport {
    /// Compares the mask bit for action `i` in `scene` with the rollout
    /// oracle and tallies the result.
    pub fn record(&mut self, scene: &AuditScene, i: usize) {
        let grid = HashGrid::build(&scene.obstacles);
        let out = generate_mask_with(
            scene.position,
            scene.psi,
            &scene.obstacles,
            &[],
            &scene.actions,
            &scene.cfg,
            &grid,
        );
        let masked = !out.mask.get(i);
        let verdict = rollout_violates(scene, i);
        self.pairs += 1;
        self.masked += masked as usize;
        if masked == verdict.violates {
            self.agree += 1;
        } else {
            self.disagree += 1;
            if !verdict.near_boundary {
                self.disagree_off_boundary += 1;
            }
        }
    }
}

/// Draws `samples` random (scene, action) pairs and compares the mask bit
/// with the rollout oracle.
pub fn audit_mask(seed: u64, samples: usize) -> AuditReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AuditReport::default();
    for _ in 0..samples {
        let scene = random_scene(&mut rng);
        let i = rng.random_range(0..scene.actions.n_actions);
        report.record(&scene, i);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_hundred_scenes_every_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(500);
        let mut off_boundary = 0;
        for _ in 0..500 {
            let scene = random_scene(&mut rng);
            let grid = HashGrid::build(&scene.obstacles);
            let out = generate_mask_with(
                scene.position,
                scene.psi,
                &scene.obstacles,
                &[],
                &scene.actions,
                &scene.cfg,
                &grid,
            );
            for i in 0..scene.actions.n_actions {
                let verdict = rollout_violates(&scene, i);
                if out.mask.get(i) == verdict.violates && !verdict.near_boundary {
                    off_boundary += 1;
                }
            }
        }
        assert_eq!(off_boundary, 0);
    }

    #[test]
    fn audit_is_deterministic() {
        assert_eq!(audit_mask(3, 200), audit_mask(3, 200));
    }
}
