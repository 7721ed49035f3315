use serde::{Deserialize, Serialize};

use crate::math::Vec2;

use super::GeometryError;

/// Closed way-point loop traversed at constant speed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub waypoints: Vec<Vec2>,
    pub speed: f64,
    /// Index of the way-point currently being approached.
    #[serde(default)]
    pub next: usize,
}

impl Route {
    pub fn validate(&self) -> Result<(), GeometryError> {
        if self.waypoints.len() < 2 {
            return Err(GeometryError::Invalid("route needs at least 2 way-points".into()));
        }
        if !(self.speed >= 0.0) {
            return Err(GeometryError::Invalid(format!(
                "route speed must be non-negative, got {}",
                self.speed
            )));
        }
        Ok(())
    }

    /// Moves `position` along the loop for `dt` seconds. Returns the new
    /// position and the velocity on the leg being travelled at the end.
    pub fn advance(&mut self, mut position: Vec2, dt: f64) -> (Vec2, Vec2) {
        let n = self.waypoints.len();
        let mut remaining = self.speed * dt;
        let mut velocity = Vec2::ZERO;
        // Bound the loop in case every way-point coincides.
        for _ in 0..(4 * n + 4) {
            let target = self.waypoints[self.next % n];
            let to_target = target - position;
            let dist = to_target.norm();
            if dist > 0.0 {
                velocity = to_target * (self.speed / dist);
            }
            if remaining < dist {
                position += to_target * (remaining / dist);
                return (position, velocity);
            }
            remaining -= dist;
            position = target;
            self.next = (self.next + 1) % n;
            if remaining <= 0.0 {
                let next_target = self.waypoints[self.next];
                velocity = (next_target - position).normalized() * self.speed;
                return (position, velocity);
            }
        }
        (position, velocity)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleObstacle {
    pub id: u32,
    pub center: Vec2,
    pub radius: f64,
    /// World-frame velocity (zero for static obstacles).
    #[serde(default)]
    pub velocity: Vec2,
    #[serde(default)]
    pub route: Option<Route>,
}

impl CircleObstacle {
    pub fn fixed(id: u32, center: Vec2, radius: f64) -> Self {
        Self {
            id,
            center,
            radius,
            velocity: Vec2::ZERO,
            route: None,
        }
    }

    pub fn moving(id: u32, center: Vec2, radius: f64, velocity: Vec2) -> Self {
        Self {
            id,
            center,
            radius,
            velocity,
            route: None,
        }
    }

    pub fn is_moving(&self) -> bool {
        self.route.is_some() || self.velocity != Vec2::ZERO
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.radius > 0.0) || !self.center.is_finite() {
            return Err(GeometryError::Invalid(format!(
                "circle {} needs a finite center and positive radius",
                self.id
            )));
        }
        if let Some(route) = &self.route {
            route.validate()?;
        }
        Ok(())
    }

    /// Advances the obstacle by `dt`: along its route if it has one,
    /// otherwise at constant velocity.
    pub fn advance(&mut self, dt: f64) {
        match &mut self.route {
            Some(route) => {
                let (p, v) = route.advance(self.center, dt);
                self.center = p;
                self.velocity = v;
            }
            None => self.center += self.velocity * dt,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolylineObstacle {
    pub id: u32,
    pub vertices: Vec<Vec2>,
    #[serde(default)]
    pub closed: bool,
}

impl PolylineObstacle {
    pub fn new(id: u32, vertices: Vec<Vec2>, closed: bool) -> Self {
        Self {
            id,
            vertices,
            closed,
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if self.vertices.len() < 2 {
            return Err(GeometryError::Invalid(format!(
                "polyline {} needs at least 2 vertices",
                self.id
            )));
        }
        for (i, pair) in self.vertices.windows(2).enumerate() {
            if pair[0] == pair[1] {
                return Err(GeometryError::Invalid(format!(
                    "polyline {} repeats vertex {i}",
                    self.id
                )));
            }
        }
        if self.vertices.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::Invalid(format!(
                "polyline {} has a non-finite vertex",
                self.id
            )));
        }
        Ok(())
    }

    pub fn segment_count(&self) -> usize {
        let n = self.vertices.len();
        if self.closed && n > 2 {
            n
        } else {
            n.saturating_sub(1)
        }
    }

    pub fn segment(&self, i: usize) -> (Vec2, Vec2) {
        let n = self.vertices.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }

    pub fn segments(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        (0..self.segment_count()).map(move |i| self.segment(i))
    }

    /// Ray-casting containment test; always false for open polylines.
    pub fn contains(&self, p: Vec2) -> bool {
        if !self.closed || self.vertices.len() < 3 {
            return false;
        }
        let mut inside = false;
        for (a, b) in self.segments() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn distance(&self, p: Vec2) -> f64 {
        self.segments()
            .map(|(a, b)| super::min_dist_point_segment(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Closest point on the polyline to `p`.
    pub fn closest_point(&self, p: Vec2) -> Vec2 {
        let mut best = self.vertices[0];
        let mut best_d = f64::INFINITY;
        for (a, b) in self.segments() {
            let c = super::closest_point_on_segment(p, a, b);
            let d = (p - c).norm_sq();
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        best
    }
}

/// A snapshot of every obstacle in one environment.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ObstacleSet {
    pub circles: Vec<CircleObstacle>,
    pub polylines: Vec<PolylineObstacle>,
}

impl ObstacleSet {
    pub fn new(circles: Vec<CircleObstacle>, polylines: Vec<PolylineObstacle>) -> Self {
        Self { circles, polylines }
    }

    pub fn is_empty(&self) -> bool {
        self.circles.is_empty() && self.polylines.is_empty()
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        self.circles.iter().try_for_each(CircleObstacle::validate)?;
        self.polylines.iter().try_for_each(PolylineObstacle::validate)
    }

    pub fn max_circle_radius(&self) -> f64 {
        self.circles.iter().map(|c| c.radius).fold(0.0, f64::max)
    }

    pub fn max_circle_speed(&self) -> f64 {
        self.circles
            .iter()
            .map(|c| match &c.route {
                Some(r) => r.speed.max(c.velocity.norm()),
                None => c.velocity.norm(),
            })
            .fold(0.0, f64::max)
    }

    /// True if `p` lies inside any closed polyline.
    pub fn inside_land(&self, p: Vec2) -> bool {
        self.polylines.iter().any(|poly| poly.contains(p))
    }
}
