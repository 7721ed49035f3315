//! Log-barrier potential `U(d) = α ln(d/d0) (d0 − d)²` and its gradient,
//! aggregated per obstacle category.

use serde::{Deserialize, Serialize};

use crate::geometry::{HashGrid, ObstacleRef, ObstacleSet};
use crate::math::Vec2;

use super::ObservationError;

/// Distances are floored at this fraction of `d0` before evaluating the
/// gradient, so overlapping obstacles still give a finite push.
const MIN_DISTANCE_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub alpha: f64,
    pub d0: f64,
    pub cutoff: f64,
}

impl PotentialConfig {
    /// `d0 = 3 × safety_radius`, `cutoff = 10 × d0`, `α = 1`.
    pub fn for_radius(safety_radius: f64) -> Self {
        let d0 = 3.0 * safety_radius;
        Self {
            alpha: 1.0,
            d0,
            cutoff: 10.0 * d0,
        }
    }

    pub fn validate(&self) -> Result<(), ObservationError> {
        if !(self.alpha > 0.0 && self.d0 > 0.0 && self.cutoff >= self.d0 && self.cutoff.is_finite()) {
            return Err(ObservationError::Config(format!(
                "need alpha > 0 and 0 < d0 <= cutoff, got {self:?}"
            )));
        }
        Ok(())
    }
}

pub fn barrier_potential(d: f64, cfg: &PotentialConfig) -> f64 {
    let gap = cfg.d0 - d;
    cfg.alpha * (d / cfg.d0).ln() * gap * gap
}

/// `dU/dd = α (2 ln(d/d0)(d − d0) + (d − d0)(1 − d0/d))`, zero at and beyond
/// the cutoff.
pub fn barrier_gradient(d: f64, cfg: &PotentialConfig) -> Result<f64, ObservationError> {
    if !(d > 0.0) {
        return Err(ObservationError::NonPositiveDistance(d));
    }
    if d >= cfg.cutoff {
        return Ok(0.0);
    }
    let delta = d - cfg.d0;
    Ok(cfg.alpha * (2.0 * (d / cfg.d0).ln() * delta + delta * (1.0 - cfg.d0 / d)))
}

/// Unnormalized per-category gradient sums in the world frame.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GradientSums {
    pub polyline: Vec2,
    pub circle: Vec2,
    /// Unit vector toward the goal scaled by the normalized goal distance.
    pub goal: Vec2,
}

/// Bounded per-category gradients: each vector squashed by `g / (1 + |g|)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GradientBlock {
    pub polyline: Vec2,
    pub circle: Vec2,
    /// `squash(goal + polyline + circle)` over the squashed repulsive terms.
    pub composite: Vec2,
}

impl GradientBlock {
    pub fn magnitudes(&self) -> [f64; 3] {
        [self.polyline.norm(), self.circle.norm(), self.composite.norm()]
    }
}

pub fn squash(g: Vec2) -> Vec2 {
    g * (1.0 / (1.0 + g.norm()))
}

impl GradientSums {
    pub fn normalized(&self) -> GradientBlock {
        let polyline = squash(self.polyline);
        let circle = squash(self.circle);
        GradientBlock {
            polyline,
            circle,
            composite: squash(self.goal + polyline + circle),
        }
    }
}

fn contribution(agent_p: Vec2, from: Vec2, d: f64, cfg: &PotentialConfig) -> Vec2 {
    if d >= cfg.cutoff {
        return Vec2::ZERO;
    }
    let d = d.max(MIN_DISTANCE_FRACTION * cfg.d0);
    let g = barrier_gradient(d, cfg).unwrap_or(0.0);
    (agent_p - from).normalized() * g
}

fn goal_term(agent_p: Vec2, goal_p: Vec2, goal_scale: f64) -> Vec2 {
    let to_goal = goal_p - agent_p;
    to_goal.normalized() * (to_goal.norm() / goal_scale).min(1.0)
}

/// Sums gradients over every obstacle. Circle distance is to the rim;
/// polyline distance is to the nearest segment. `goal_scale` is the
/// distance at which the goal term saturates.
pub fn aggregate_gradients(
    agent_p: Vec2,
    obstacles: &ObstacleSet,
    goal_p: Vec2,
    goal_scale: f64,
    cfg: &PotentialConfig,
) -> GradientSums {
    let mut sums = GradientSums {
        goal: goal_term(agent_p, goal_p, goal_scale),
        ..Default::default()
    };
    for c in &obstacles.circles {
        let d = agent_p.distance(c.center) - c.radius;
        sums.circle += contribution(agent_p, c.center, d, cfg);
    }
    for poly in &obstacles.polylines {
        let q = poly.closest_point(agent_p);
        sums.polyline += contribution(agent_p, q, agent_p.distance(q), cfg);
    }
    sums
}

/// As [`aggregate_gradients`], visiting only obstacles the grid returns
/// within the cutoff. Results match the exhaustive version up to summation
/// order.
pub fn aggregate_gradients_near(
    agent_p: Vec2,
    obstacles: &ObstacleSet,
    grid: &HashGrid,
    goal_p: Vec2,
    goal_scale: f64,
    cfg: &PotentialConfig,
) -> GradientSums {
    let mut sums = GradientSums {
        goal: goal_term(agent_p, goal_p, goal_scale),
        ..Default::default()
    };
    let mut nearby = Vec::new();
    grid.query_into(agent_p, cfg.cutoff, &mut nearby);
    // Handles arrive sorted, so segments of one polyline are contiguous.
    let mut current: Option<(u32, f64, Vec2)> = None;
    let flush = |cur: Option<(u32, f64, Vec2)>, sums: &mut GradientSums| {
        if let Some((_, d, q)) = cur {
            sums.polyline += contribution(agent_p, q, d, cfg);
        }
    };
    for h in nearby {
        match h {
            ObstacleRef::Circle(ci) => {
                let c = &obstacles.circles[ci as usize];
                let d = agent_p.distance(c.center) - c.radius;
                sums.circle += contribution(agent_p, c.center, d, cfg);
            }
            ObstacleRef::Segment { polyline, segment } => {
                let (a, b) = obstacles.polylines[polyline as usize].segment(segment as usize);
                let q = crate::geometry::closest_point_on_segment(agent_p, a, b);
                let d = agent_p.distance(q);
                match current {
                    Some((id, best, _)) if id == polyline => {
                        if d < best {
                            current = Some((id, d, q));
                        }
                    }
                    _ => {
                        flush(current, &mut sums);
                        current = Some((polyline, d, q));
                    }
                }
            }
        }
    }
    flush(current, &mut sums);
    sums
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CircleObstacle, PolylineObstacle};

    fn unit() -> PotentialConfig {
        PotentialConfig {
            alpha: 1.0,
            d0: 1.0,
            cutoff: 10.0,
        }
    }

    #[test]
    fn gradient_examples() {
        let cfg = unit();
        assert_eq!(barrier_gradient(1.0, &cfg).unwrap(), 0.0);
        let g = barrier_gradient(0.5, &cfg).unwrap();
        assert!((g - (2f64.ln() + 0.5)).abs() < 1e-12);
        assert_eq!(barrier_gradient(11.0, &cfg).unwrap(), 0.0);
        assert!(barrier_gradient(0.0, &cfg).is_err());
        assert!(barrier_gradient(-1.0, &cfg).is_err());
    }

    #[test]
    fn gradient_matches_central_difference() {
        let cfg = PotentialConfig {
            alpha: 1.7,
            d0: 24.0,
            cutoff: 240.0,
        };
        for k in 0..50 {
            let d = 0.1 * cfg.d0 * 100f64.powf(k as f64 / 49.0) * 0.999;
            let h = 1e-5 * d;
            let fd = (barrier_potential(d + h, &cfg) - barrier_potential(d - h, &cfg)) / (2.0 * h);
            let g = barrier_gradient(d, &cfg).unwrap();
            assert!((g - fd).abs() <= 1e-6 * g.abs().max(1e-6), "d={d} g={g} fd={fd}");
        }
    }

    #[test]
    fn empty_scene_has_zero_repulsion() {
        let s = aggregate_gradients(Vec2::ZERO, &ObstacleSet::default(), Vec2::new(10.0, 0.0), 100.0, &unit());
        assert_eq!(s.circle, Vec2::ZERO);
        assert_eq!(s.polyline, Vec2::ZERO);
        assert!((s.goal.x - 0.1).abs() < 1e-15);
    }

    #[test]
    fn circle_east_pushes_west() {
        let cfg = unit();
        let set = ObstacleSet::new(vec![CircleObstacle::fixed(0, Vec2::new(1.5, 0.0), 1.0)], vec![]);
        let s = aggregate_gradients(Vec2::ZERO, &set, Vec2::ZERO, 1.0, &cfg);
        assert!(s.circle.x < 0.0);
        assert!((s.circle.x + 2f64.ln() + 0.5).abs() < 1e-12);
        assert_eq!(s.circle.y, 0.0);
    }

    #[test]
    fn symmetric_pair_cancels_north() {
        let set = ObstacleSet::new(
            vec![
                CircleObstacle::fixed(0, Vec2::new(3.0, 2.0), 1.0),
                CircleObstacle::fixed(1, Vec2::new(3.0, -2.0), 1.0),
            ],
            vec![],
        );
        let s = aggregate_gradients(Vec2::ZERO, &set, Vec2::ZERO, 1.0, &unit());
        assert_eq!(s.circle.y, 0.0);
        assert!(s.circle.x != 0.0);
    }

    #[test]
    fn grid_version_matches_exhaustive() {
        let cfg = PotentialConfig::for_radius(2.0);
        let set = ObstacleSet::new(
            (0..30)
                .map(|i| {
                    let a = i as f64 * 0.7;
                    CircleObstacle::fixed(i, Vec2::new(a.cos() * 9.0 * a, a.sin() * 7.0 * a), 1.0 + (i % 4) as f64)
                })
                .collect(),
            vec![
                PolylineObstacle::new(0, vec![Vec2::new(-80.0, 30.0), Vec2::new(0.0, 40.0), Vec2::new(90.0, 10.0)], false),
                PolylineObstacle::new(1, vec![Vec2::new(-20.0, -30.0), Vec2::new(20.0, -30.0), Vec2::new(0.0, -60.0)], true),
            ],
        );
        let grid = HashGrid::build(&set);
        for k in 0..40 {
            let p = Vec2::new(k as f64 * 5.0 - 100.0, (k as f64 * 1.3).sin() * 50.0);
            let a = aggregate_gradients(p, &set, Vec2::ZERO, 100.0, &cfg);
            let b = aggregate_gradients_near(p, &set, &grid, Vec2::ZERO, 100.0, &cfg);
            assert!((a.circle - b.circle).norm() <= 1e-9 * (1.0 + a.circle.norm()));
            assert!((a.polyline - b.polyline).norm() <= 1e-9 * (1.0 + a.polyline.norm()));
        }
    }

    #[test]
    fn squash_is_bounded() {
        let b = GradientSums {
            polyline: Vec2::new(1e9, 0.0),
            circle: Vec2::new(0.0, -3.0),
            goal: Vec2::new(1.0, 0.0),
        }
        .normalized();
        assert!(b.polyline.norm() < 1.0 && b.circle.norm() < 1.0 && b.composite.norm() < 1.0);
        assert!((b.circle.y + 0.75).abs() < 1e-15);
    }
}
