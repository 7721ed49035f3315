//! Dense row-major buffers for array frameworks.
//!
//! Shapes are fixed when the buffers are allocated, with `B = n_envs ×
//! m_agents` in flat agent order (`env * m + agent`):
//!
//! | name          | dtype | shape          |
//! |---------------|-------|----------------|
//! | `obs`         | f64   | `(B, k, d)`    |
//! | `bev`         | f32   | `(B, C, H, W)` |
//! | `mask`        | u8    | `(B, n)`       |
//! | `reward`      | f64   | `(B,)`         |
//! | `done`        | u8    | `(B,)`         |
//! | `termination` | u8    | `(B,)`         |
//! | `error`       | u8    | `(B,)`         |
//!
//! History rows run oldest to newest. `mask` holds 1 for a safe action.
//! `termination` uses [`Termination::code`]. `error` is 1 where the last
//! action index was rejected. Values are copied bit-for-bit from the
//! environment.

use serde::{Deserialize, Serialize};

use crate::env::{BatchEnv, Termination};
use crate::observation::BEV_CHANNELS;

/// Version tag of the buffer layout.
pub const TENSOR_LAYOUT: &str = "seanav-tensors-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorShapes {
    pub batch: usize,
    pub history: usize,
    pub obs_dim: usize,
    pub bev_channels: usize,
    pub bev_size: usize,
    pub n_actions: usize,
}

impl TensorShapes {
    pub fn of(env: &BatchEnv) -> Self {
        let sc = env.scenario();
        Self {
            batch: env.n_agents(),
            history: if env.options().observations { sc.observation.history } else { 0 },
            obs_dim: crate::observation::OBS_DIM,
            bev_channels: if env.options().bev { BEV_CHANNELS } else { 0 },
            bev_size: sc.observation.bev.size,
            n_actions: env.action_set().n_actions,
        }
    }

    pub fn obs(&self) -> [usize; 3] {
        [self.batch, self.history, self.obs_dim]
    }

    pub fn bev(&self) -> [usize; 4] {
        [self.batch, self.bev_channels, self.bev_size, self.bev_size]
    }

    pub fn mask(&self) -> [usize; 2] {
        [self.batch, self.n_actions]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchTensors {
    pub shapes: TensorShapes,
    pub obs: Vec<f64>,
    pub bev: Vec<f32>,
    pub mask: Vec<u8>,
    pub reward: Vec<f64>,
    pub done: Vec<u8>,
    pub termination: Vec<u8>,
    pub error: Vec<u8>,
}

impl BatchTensors {
    pub fn allocate(shapes: TensorShapes) -> Self {
        let b = shapes.batch;
        Self {
            shapes,
            obs: vec![0.0; shapes.obs().iter().product()],
            bev: vec![0.0; shapes.bev().iter().product()],
            mask: vec![0; shapes.mask().iter().product()],
            reward: vec![0.0; b],
            done: vec![0; b],
            termination: vec![Termination::None.code(); b],
            error: vec![0; b],
        }
    }

    pub fn from_env(env: &BatchEnv) -> Self {
        let mut t = Self::allocate(TensorShapes::of(env));
        t.fill(env);
        t
    }

    /// Overwrites every buffer from `env`. Panics if `env` does not match
    /// the allocated shapes.
    pub fn fill(&mut self, env: &BatchEnv) {
        assert_eq!(self.shapes, TensorShapes::of(env), "tensor shapes do not match the environment");
        let s = self.shapes;
        let obs_stride = s.history * s.obs_dim;
        let bev_stride = s.bev_channels * s.bev_size * s.bev_size;
        for (i, a) in env.agents().iter().enumerate() {
            if let Some(h) = a.history() {
                h.write_flat(&mut self.obs[i * obs_stride..(i + 1) * obs_stride]);
            }
            if let Some(img) = a.bev() {
                self.bev[i * bev_stride..(i + 1) * bev_stride].copy_from_slice(&img.data);
            }
            let mask = &a.mask().mask;
            for (j, m) in self.mask[i * s.n_actions..(i + 1) * s.n_actions].iter_mut().enumerate() {
                *m = mask.get(j) as u8;
            }
            self.reward[i] = a.last().reward.total();
            self.done[i] = a.done() as u8;
            self.termination[i] = a.termination().code();
            self.error[i] = a.last().rejected as u8;
        }
    }
}
