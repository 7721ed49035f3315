//! Fixed-size observation rows built from barrier-potential gradients,
//! history stacking, and the agent-centred raster.

mod bev;
mod potential;
mod vector;

use thiserror::Error;

pub use bev::{
    render_bev, BevConfig, BevImage, BEV_CHANNELS, CHANNEL_NAMES, CH_GOAL, CH_LAND, CH_MOVING,
    CH_STATIC,
};
pub use potential::{
    aggregate_gradients, aggregate_gradients_near, barrier_gradient, barrier_potential, squash,
    GradientBlock, GradientSums, PotentialConfig,
};
pub use vector::{
    build_observation, HistoryBuffer, Observation, ObservationConfig, ObservationContext, OBS_DIM,
    OBS_FIELDS, OBS_LAYOUT,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObservationError {
    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("invalid observation config: {0}")]
    Config(String),
}
