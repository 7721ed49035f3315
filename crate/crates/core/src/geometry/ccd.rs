//! Swept (continuous-time) collision tests for a disc moving along a straight
//! segment during one step. Step time is normalized to `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::math::Vec2;

use super::obstacles::{CircleObstacle, PolylineObstacle};
use super::primitives::{closest_point_on_segment, first_disc_entry, min_dist_point_segment};

/// Earliest contact inside a step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contact {
    /// Fraction of the step at first contact, in `[0, 1]`.
    pub t: f64,
    pub point: Vec2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObstacleId {
    Circle { id: u32 },
    Polyline { id: u32, segment: u32 },
    Agent { index: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent {
    pub agent: u32,
    pub obstacle: ObstacleId,
    pub t: f64,
    pub point: Vec2,
}

impl CollisionEvent {
    pub fn new(agent: u32, obstacle: ObstacleId, contact: Contact) -> Self {
        Self {
            agent,
            obstacle,
            t: contact.t,
            point: contact.point,
        }
    }
}

/// Disc of `agent_radius` moving `p0 → p1` against a circle moving
/// `obs_p0 → obs_p1`, both linearly over the step.
pub fn ccd_circle(
    p0: Vec2,
    p1: Vec2,
    agent_radius: f64,
    obs: &CircleObstacle,
    obs_p0: Vec2,
    obs_p1: Vec2,
) -> Option<Contact> {
    let d = p0 - obs_p0;
    let w = (p1 - p0) - (obs_p1 - obs_p0);
    let t = first_disc_entry(d, w, agent_radius + obs.radius, 0.0, 1.0)?;
    let agent = p0.lerp(p1, t);
    let center = obs_p0.lerp(obs_p1, t);
    let point = agent + (center - agent).normalized() * agent_radius;
    Some(Contact { t, point })
}

/// Earliest `t` at which a disc moving `p0 → p1` touches segment `[a, b]`.
///
/// The disc touches the segment exactly when its center enters the capsule
/// around the segment; the capsule boundary is two offset lines plus the two
/// end caps, so the entry time is the smallest valid root over those pieces.
pub fn ccd_segment(p0: Vec2, p1: Vec2, radius: f64, a: Vec2, b: Vec2) -> Option<Contact> {
    let contact = |t: f64| {
        let c = p0.lerp(p1, t);
        Contact {
            t,
            point: closest_point_on_segment(c, a, b),
        }
    };
    if min_dist_point_segment(p0, a, b) <= radius {
        return Some(contact(0.0));
    }
    let w = p1 - p0;
    let mut best = f64::INFINITY;
    for cap in [a, b] {
        if let Some(t) = first_disc_entry(p0 - cap, w, radius, 0.0, 1.0) {
            best = best.min(t);
        }
    }
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq > 0.0 {
        let n = Vec2::new(-ab.y, ab.x) * (1.0 / len_sq.sqrt());
        let s0 = (p0 - a).dot(n);
        let ds = w.dot(n);
        if ds != 0.0 {
            for side in [radius, -radius] {
                let t = (side - s0) / ds;
                if (0.0..=1.0).contains(&t) && t < best {
                    let lambda = (p0 + w * t - a).dot(ab) / len_sq;
                    if (0.0..=1.0).contains(&lambda) {
                        best = t;
                    }
                }
            }
        }
    }
    best.is_finite().then(|| contact(best))
}

/// Earliest contact against any segment of `obs`, with the segment index.
pub fn ccd_polyline(
    p0: Vec2,
    p1: Vec2,
    agent_radius: f64,
    obs: &PolylineObstacle,
) -> Option<(u32, Contact)> {
    let mut best: Option<(u32, Contact)> = None;
    for (i, (a, b)) in obs.segments().enumerate() {
        if let Some(c) = ccd_segment(p0, p1, agent_radius, a, b) {
            if best.is_none_or(|(_, prev)| c.t < prev.t) {
                best = Some((i as u32, c));
            }
        }
    }
    best
}

/// Endpoint-only check: does the disc overlap the segment at the end of
/// the step? Used as the discrete baseline that swept tests improve on.
pub fn discrete_segment_overlap(p1: Vec2, radius: f64, a: Vec2, b: Vec2) -> bool {
    min_dist_point_segment(p1, a, b) <= radius
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn far_static_circle_is_missed() {
        let c = CircleObstacle::fixed(0, Vec2::new(100.0, 100.0), 5.0);
        assert!(ccd_circle(Vec2::ZERO, Vec2::new(1.0, 0.0), 1.0, &c, c.center, c.center).is_none());
    }

    #[test]
    fn tunnelling_through_circle_is_caught() {
        let c = CircleObstacle::fixed(0, Vec2::new(5.0, 3.0), 4.0);
        let p0 = Vec2::ZERO;
        let p1 = Vec2::new(10.0, 0.0);
        // Endpoints are √34 ≈ 5.83 away; closest approach is 3 < 4.
        assert!(p0.distance(c.center) > 4.0 && p1.distance(c.center) > 4.0);
        let hit = ccd_circle(p0, p1, 0.0, &c, c.center, c.center).unwrap();
        // Entry at x = 5 − √7.
        assert!((hit.t - (5.0 - 7f64.sqrt()) / 10.0).abs() < 1e-12);
    }

    #[test]
    fn head_on_symmetric_meeting_is_halfway() {
        let c = CircleObstacle::fixed(0, Vec2::ZERO, 1.0);
        let hit = ccd_circle(
            Vec2::new(-6.0, 0.0),
            Vec2::new(0.0, 0.0),
            1.0,
            &c,
            Vec2::new(6.0, 0.0),
            Vec2::new(0.0, 0.0),
        )
        .unwrap();
        // Gap of 12 closes at 12 per step; contact when 2 apart.
        assert!((hit.t - 10.0 / 12.0).abs() < 1e-12);
        // Combined radius is half the gap closed over the step.
        let hit = ccd_circle(
            Vec2::new(-4.0, 0.0),
            Vec2::new(0.0, 0.0),
            2.0,
            &CircleObstacle::fixed(0, Vec2::ZERO, 2.0),
            Vec2::new(4.0, 0.0),
            Vec2::new(0.0, 0.0),
        )
        .unwrap();
        assert!((hit.t - 0.5).abs() < 1e-12);
    }

    #[test]
    fn overlapping_at_start_is_time_zero() {
        let c = CircleObstacle::fixed(0, Vec2::new(1.0, 0.0), 1.0);
        let hit = ccd_circle(Vec2::ZERO, Vec2::new(-5.0, 0.0), 0.5, &c, c.center, c.center).unwrap();
        assert_eq!(hit.t, 0.0);
    }

    #[test]
    fn parallel_path_misses_distant_segment() {
        let wall = PolylineObstacle::new(0, vec![Vec2::new(0.0, 10.0), Vec2::new(10.0, 10.0)], false);
        assert!(ccd_polyline(Vec2::ZERO, Vec2::new(10.0, 0.0), 1.0, &wall).is_none());
    }

    #[test]
    fn perpendicular_crossing_time_is_exact() {
        let wall = PolylineObstacle::new(0, vec![Vec2::new(-1.0, 3.0), Vec2::new(1.0, 3.0)], false);
        let (seg, hit) = ccd_polyline(Vec2::ZERO, Vec2::new(0.0, 4.0), 0.0, &wall).unwrap();
        assert_eq!(seg, 0);
        assert!((hit.t - 0.75).abs() < 1e-15);
        assert!((hit.point - Vec2::new(0.0, 3.0)).norm() < 1e-12);
    }

    #[test]
    fn end_cap_contact() {
        // Path passes beyond the segment's end; only the cap is touched.
        let (_, hit) = ccd_polyline(
            Vec2::new(5.0, -5.0),
            Vec2::new(5.0, 5.0),
            2.0,
            &PolylineObstacle::new(0, vec![Vec2::new(0.0, 0.0), Vec2::new(4.0, 0.0)], false),
        )
        .unwrap();
        let y = -(4.0f64 - 1.0).sqrt();
        assert!((hit.t - (y + 5.0) / 10.0).abs() < 1e-12);
    }

    #[test]
    fn earliest_segment_wins() {
        let zigzag = PolylineObstacle::new(
            0,
            vec![Vec2::new(-5.0, 8.0), Vec2::new(5.0, 8.0), Vec2::new(5.0, 2.0), Vec2::new(-5.0, 2.0)],
            false,
        );
        let (seg, hit) = ccd_polyline(Vec2::ZERO, Vec2::new(0.0, 10.0), 0.0, &zigzag).unwrap();
        assert_eq!(seg, 2);
        assert!((hit.t - 0.2).abs() < 1e-15);
    }
}
