use serde::{Deserialize, Serialize};

use crate::math::Vec2;

use super::GeometryError;

/// Axis-aligned map rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapExtent {
    pub min: Vec2,
    pub max: Vec2,
}

impl MapExtent {
    pub fn new(min: Vec2, max: Vec2) -> Self {
        Self { min, max }
    }

    /// `[0, width] × [0, height]`.
    pub fn sized(width: f64, height: f64) -> Self {
        Self::new(Vec2::ZERO, Vec2::new(width, height))
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.min.is_finite() && self.max.is_finite())
            || self.max.x <= self.min.x
            || self.max.y <= self.min.y
        {
            return Err(GeometryError::Invalid(format!(
                "extent max {:?} must exceed min {:?}",
                self.max, self.min
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Vec2 {
        (self.min + self.max) * 0.5
    }

    pub fn diagonal(&self) -> f64 {
        (self.max - self.min).norm()
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn contains_extent(&self, other: &MapExtent) -> bool {
        self.contains(other.min) && self.contains(other.max)
    }

    /// Maps the extent onto `[-1, 1]²`, clamping points outside.
    pub fn normalize(&self, p: Vec2) -> Vec2 {
        let c = self.center();
        Vec2::new(
            (2.0 * (p.x - c.x) / self.width()).clamp(-1.0, 1.0),
            (2.0 * (p.y - c.y) / self.height()).clamp(-1.0, 1.0),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_corners() {
        let e = MapExtent::sized(2000.0, 1000.0);
        assert_eq!(e.normalize(Vec2::ZERO), Vec2::new(-1.0, -1.0));
        assert_eq!(e.normalize(Vec2::new(1000.0, 500.0)), Vec2::ZERO);
        assert_eq!(e.normalize(Vec2::new(5000.0, 500.0)).x, 1.0);
        assert!(MapExtent::sized(0.0, 1.0).validate().is_err());
    }
}
