//! Batch-parallel surface vessel navigation simulator.
//!
//! The crate is organised bottom-up:
//!
//! - [`dynamics`]: MMG, Nomoto and kinematic vessel models, PID command
//!   tracking and randomized currents.
//! - [`geometry`]: circle and polyline obstacles, the hash-grid broad phase
//!   and swept (continuous-time) collision tests.
//! - [`mask`]: velocity-obstacle action masking and the masked softmax.
//! - [`observation`]: potential-gradient features, history stacking and the
//!   agent-centred bird's-eye-view raster.
//! - [`env`]: scenarios, batched reset/step, rewards, benchmarks and
//!   evaluation metrics.
//! - [`baselines`]: velocity-obstacle and greedy reference controllers.
//! - [`tensors`]: dense array layout for external training code.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod dynamics;
pub mod env;
pub mod geometry;
pub mod mask;
pub mod math;
pub mod observation;
pub mod seeding;
pub mod tensors;

pub use math::{wrap_angle, Vec2};
