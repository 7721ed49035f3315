//! Velocity-obstacle geometry against circles and clearance checks against
//! polylines, all under constant-velocity motion.

use crate::geometry::{seg_seg_distance, seg_seg_intersect, CircleObstacle, PolylineObstacle};
use crate::math::Vec2;

/// True iff the relative velocity `candidate − obs.velocity` points into the
/// collision cone of the disc of `combined_radius` around the obstacle, or
/// the agent already overlaps that disc.
pub fn vo_cone_contains(
    agent_p: Vec2,
    candidate: Vec2,
    obs: &CircleObstacle,
    combined_radius: f64,
) -> bool {
    let rel_p = obs.center - agent_p;
    let dist_sq = rel_p.norm_sq();
    let r_sq = combined_radius * combined_radius;
    if dist_sq <= r_sq {
        return true;
    }
    let rel_v = candidate - obs.velocity;
    let along = rel_v.dot(rel_p);
    if along <= 0.0 {
        return false;
    }
    // Inside the cone iff the ray's perpendicular offset from the center is
    // within the radius: |rel_v × rel_p|² ≤ r² |rel_v|².
    let cross = rel_v.cross(rel_p);
    cross * cross <= r_sq * rel_v.norm_sq()
}

/// Smallest `t ≥ 0` with `|p_rel + v_rel t| = combined_radius`; zero when
/// already overlapping and `+∞` when the paths never meet.
pub fn ttc_circle(agent_p: Vec2, candidate: Vec2, obs: &CircleObstacle, combined_radius: f64) -> f64 {
    let d = agent_p - obs.center;
    let w = candidate - obs.velocity;
    let c = d.norm_sq() - combined_radius * combined_radius;
    if c <= 0.0 {
        return 0.0;
    }
    let a = w.norm_sq();
    let b = 2.0 * d.dot(w);
    if a == 0.0 || b >= 0.0 {
        return f64::INFINITY;
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return f64::INFINITY;
    }
    let q = -0.5 * (b - disc.sqrt());
    c / q
}

/// Projects the agent over `horizon` seconds and reports whether the path
/// passes within `clearance` of, or crosses, any segment of `obs`.
pub fn polyline_unsafe(
    agent_p: Vec2,
    candidate: Vec2,
    horizon: f64,
    obs: &PolylineObstacle,
    clearance: f64,
) -> bool {
    let p_next = agent_p + candidate * horizon;
    obs.segments()
        .any(|(a, b)| path_segment_unsafe(agent_p, p_next, a, b, clearance))
}

#[inline]
pub(crate) fn path_segment_unsafe(p: Vec2, p_next: Vec2, a: Vec2, b: Vec2, clearance: f64) -> bool {
    seg_seg_distance(p, p_next, a, b) < clearance || seg_seg_intersect(p, p_next, a, b).is_some()
}
