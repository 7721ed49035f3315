//! Obstacles, broad-phase lookup and swept collision detection.

mod ccd;
mod extent;
mod grid;
mod obstacles;
mod primitives;

use thiserror::Error;

pub use ccd::{
    ccd_circle, ccd_polyline, ccd_segment, discrete_segment_overlap, CollisionEvent, Contact,
    ObstacleId,
};
pub use extent::MapExtent;
pub use grid::{HashGrid, ObstacleRef, FALLBACK_CELL_SIZE};
pub use obstacles::{CircleObstacle, ObstacleSet, PolylineObstacle, Route};
pub use primitives::{
    closest_point_on_segment, min_dist_point_segment, seg_seg_distance, seg_seg_intersect,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid geometry: {0}")]
    Invalid(String),
}
