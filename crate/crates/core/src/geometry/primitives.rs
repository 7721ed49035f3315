use crate::math::Vec2;

/// Closest point to `p` on segment `[a, b]` (clamped projection).
#[inline]
pub fn closest_point_on_segment(p: Vec2, a: Vec2, b: Vec2) -> Vec2 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return a;
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    a + ab * t
}

/// Euclidean distance from `p` to segment `[a, b]`; a zero-length segment
/// is treated as the point `a`.
#[inline]
pub fn min_dist_point_segment(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return p.distance(a);
    }
    let ap = p - a;
    let t = ap.dot(ab);
    if t <= 0.0 {
        return ap.norm();
    }
    if t >= len_sq {
        return p.distance(b);
    }
    // Interior: perpendicular distance, exact zero for collinear points.
    ab.cross(ap).abs() / len_sq.sqrt()
}

#[inline]
fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a)
}

#[inline]
fn on_segment_bbox(p: Vec2, a: Vec2, b: Vec2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Intersection test for segments `[a1, a2]` and `[b1, b2]` by orientation
/// signs. Collinear overlap counts as intersecting; the returned point is
/// then one point of the overlap.
pub fn seg_seg_intersect(a1: Vec2, a2: Vec2, b1: Vec2, b2: Vec2) -> Option<Vec2> {
    let d1 = orient(b1, b2, a1);
    let d2 = orient(b1, b2, a2);
    let d3 = orient(a1, a2, b1);
    let d4 = orient(a1, a2, b2);

    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        let t = d1 / (d1 - d2);
        return Some(a1.lerp(a2, t));
    }
    if d1 == 0.0 && on_segment_bbox(a1, b1, b2) {
        return Some(a1);
    }
    if d2 == 0.0 && on_segment_bbox(a2, b1, b2) {
        return Some(a2);
    }
    if d3 == 0.0 && on_segment_bbox(b1, a1, a2) {
        return Some(b1);
    }
    if d4 == 0.0 && on_segment_bbox(b2, a1, a2) {
        return Some(b2);
    }
    None
}

/// Minimum distance between segments `[a1, a2]` and `[b1, b2]`.
pub fn seg_seg_distance(a1: Vec2, a2: Vec2, b1: Vec2, b2: Vec2) -> f64 {
    if seg_seg_intersect(a1, a2, b1, b2).is_some() {
        return 0.0;
    }
    min_dist_point_segment(a1, b1, b2)
        .min(min_dist_point_segment(a2, b1, b2))
        .min(min_dist_point_segment(b1, a1, a2))
        .min(min_dist_point_segment(b2, a1, a2))
}

/// Smallest root in `[lo, hi]` of `|d + w t|² = radius²` where the moving
/// point starts outside the disc, or `None`.
#[inline]
pub(crate) fn first_disc_entry(d: Vec2, w: Vec2, radius: f64, lo: f64, hi: f64) -> Option<f64> {
    let a = w.norm_sq();
    let b = 2.0 * d.dot(w);
    let c = d.norm_sq() - radius * radius;
    if c <= 0.0 {
        return Some(lo);
    }
    if a == 0.0 || b >= 0.0 {
        // Not approaching.
        return None;
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    // b < 0, so this is the cancellation-free form of the smaller root.
    let q = -0.5 * (b - disc.sqrt());
    let t = c / q;
    (t >= lo && t <= hi).then_some(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_on_segment_has_zero_distance() {
        let d = min_dist_point_segment(Vec2::new(0.3, 0.0), Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0));
        assert_eq!(d, 0.0);
    }

    #[test]
    fn point_above_segment() {
        let d = min_dist_point_segment(Vec2::new(0.0, 1.0), Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0));
        assert_eq!(d, 1.0);
    }

    #[test]
    fn beyond_endpoint_clamps() {
        let d = min_dist_point_segment(Vec2::new(4.0, 4.0), Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0));
        assert_eq!(d, 5.0);
    }

    #[test]
    fn zero_length_segment_is_a_point() {
        let a = Vec2::new(2.0, 2.0);
        assert_eq!(min_dist_point_segment(Vec2::new(5.0, 6.0), a, a), 5.0);
    }

    #[test]
    fn unit_square_diagonals_cross_in_the_middle() {
        let p = seg_seg_intersect(
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(1.0, 0.0),
        )
        .unwrap();
        assert!((p - Vec2::new(0.5, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn collinear_overlap_intersects() {
        let hit = seg_seg_intersect(
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(3.0, 0.0),
        );
        assert!(hit.is_some());
        let miss = seg_seg_intersect(
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(3.0, 0.0),
        );
        assert!(miss.is_none());
    }

    #[test]
    fn parallel_segments_distance() {
        let d = seg_seg_distance(
            Vec2::new(0.0, 0.0),
            Vec2::new(4.0, 0.0),
            Vec2::new(1.0, 2.0),
            Vec2::new(3.0, 2.0),
        );
        assert_eq!(d, 2.0);
    }
}
