use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::dynamics::VesselState;
use crate::geometry::{HashGrid, MapExtent, ObstacleSet};
use crate::math::Vec2;

use super::potential::{aggregate_gradients, aggregate_gradients_near, GradientSums, PotentialConfig};

/// Entries per observation row.
pub const OBS_DIM: usize = 21;

/// Version string of the row layout below; bump on any change.
pub const OBS_LAYOUT: &str = "seanav-obs-v1";

/// Column names in order.
pub const OBS_FIELDS: [&str; OBS_DIM] = [
    "pos_x",
    "pos_y",
    "sin_psi",
    "cos_psi",
    "u",
    "v",
    "r",
    "cmd_speed",
    "goal_dist",
    "goal_sin",
    "goal_cos",
    "grad_poly_x",
    "grad_poly_y",
    "grad_circle_x",
    "grad_circle_y",
    "grad_goal_x",
    "grad_goal_y",
    "grad_poly_mag",
    "grad_circle_mag",
    "grad_goal_mag",
    "step_frac",
];

/// Scales mapping raw quantities into `[-1, 1]` before clamping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservationConfig {
    pub potential: PotentialConfig,
    pub speed_scale: f64,
    pub yaw_rate_scale: f64,
}

impl ObservationConfig {
    pub fn for_radius(safety_radius: f64) -> Self {
        Self {
            potential: PotentialConfig::for_radius(safety_radius),
            speed_scale: 10.0,
            yaw_rate_scale: 0.5,
        }
    }
}

/// Per-episode quantities needed to assemble a row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationContext {
    pub extent: MapExtent,
    pub goal: Vec2,
    pub step_budget: u32,
    pub commanded_speed: f64,
}

/// One observation row. Angles and gradients are in the world frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation(#[serde(with = "row")] pub [f64; OBS_DIM]);

mod row {
    use super::OBS_DIM;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64; OBS_DIM], s: S) -> Result<S::Ok, S::Error> {
        v.as_slice().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[f64; OBS_DIM], D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        v.try_into()
            .map_err(|v: Vec<f64>| serde::de::Error::invalid_length(v.len(), &"21 entries"))
    }
}

impl Observation {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

fn unit_clamp(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

/// Assembles a row from a (possibly noise-corrupted) state. With a grid
/// the gradient sums only visit obstacles within the cutoff.
pub fn build_observation(
    state: &VesselState,
    obstacles: &ObstacleSet,
    grid: Option<&HashGrid>,
    ctx: &ObservationContext,
    step_index: u32,
    cfg: &ObservationConfig,
) -> Observation {
    let p = state.position();
    let scale = ctx.extent.diagonal();
    let sums: GradientSums = match grid {
        Some(g) => aggregate_gradients_near(p, obstacles, g, ctx.goal, scale, &cfg.potential),
        None => aggregate_gradients(p, obstacles, ctx.goal, scale, &cfg.potential),
    };
    let block = sums.normalized();
    let to_goal = ctx.goal - p;
    let bearing = to_goal.angle();
    let pos = ctx.extent.normalize(p);
    let [m_poly, m_circle, m_goal] = block.magnitudes();
    Observation([
        pos.x,
        pos.y,
        state.psi.sin(),
        state.psi.cos(),
        unit_clamp(state.u / cfg.speed_scale),
        unit_clamp(state.v / cfg.speed_scale),
        unit_clamp(state.r / cfg.yaw_rate_scale),
        unit_clamp(ctx.commanded_speed / cfg.speed_scale),
        (to_goal.norm() / scale).min(1.0),
        bearing.sin(),
        bearing.cos(),
        block.polyline.x,
        block.polyline.y,
        block.circle.x,
        block.circle.y,
        block.composite.x,
        block.composite.y,
        m_poly,
        m_circle,
        m_goal,
        (step_index as f64 / ctx.step_budget.max(1) as f64).min(1.0),
    ])
}

/// Last `k` observations, oldest first.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryBuffer {
    k: usize,
    rows: VecDeque<Observation>,
}

impl HistoryBuffer {
    pub const DEFAULT_K: usize = 8;

    /// A buffer of `k` copies of `initial`.
    pub fn new(k: usize, initial: Observation) -> Self {
        assert!(k >= 1, "history length must be positive");
        let mut b = Self {
            k,
            rows: VecDeque::with_capacity(k),
        };
        b.reset(initial);
        b
    }

    pub fn reset(&mut self, initial: Observation) {
        self.rows.clear();
        self.rows.extend(std::iter::repeat_n(initial, self.k));
    }

    pub fn push(&mut self, obs: Observation) {
        self.rows.pop_front();
        self.rows.push_back(obs);
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn latest(&self) -> &Observation {
        self.rows.back().expect("history is never empty")
    }

    pub fn rows(&self) -> impl Iterator<Item = &Observation> {
        self.rows.iter()
    }

    /// Row-major `k × OBS_DIM` copy.
    pub fn write_flat(&self, out: &mut [f64]) {
        assert_eq!(out.len(), self.k * OBS_DIM);
        for (dst, row) in out.chunks_exact_mut(OBS_DIM).zip(&self.rows) {
            dst.copy_from_slice(&row.0);
        }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.k * OBS_DIM];
        self.write_flat(&mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CircleObstacle;

    fn ctx() -> ObservationContext {
        ObservationContext {
            extent: MapExtent::sized(2000.0, 2000.0),
            goal: Vec2::new(1500.0, 1000.0),
            step_budget: 600,
            commanded_speed: 5.0,
        }
    }

    fn state() -> VesselState {
        let mut s = VesselState::at_rest(Vec2::new(1000.0, 1000.0), 0.4);
        s.u = 4.0;
        s.r = 0.02;
        s
    }

    #[test]
    fn layout_and_ranges() {
        assert_eq!(OBS_FIELDS.len(), OBS_DIM);
        let cfg = ObservationConfig::for_radius(8.0);
        let set = ObstacleSet::new(vec![CircleObstacle::fixed(0, Vec2::new(1010.0, 1000.0), 5.0)], vec![]);
        let o = build_observation(&state(), &set, None, &ctx(), 60, &cfg);
        assert!(o.is_finite());
        assert!(o.0.iter().all(|x| (-1.0..=1.0).contains(x)));
        assert_eq!(o.0[0], 0.0);
        assert!((o.0[4] - 0.4).abs() < 1e-15);
        assert!((o.0[8] - 500.0 / (2000.0 * 2f64.sqrt())).abs() < 1e-12);
        assert_eq!(o.0[9], 0.0);
        assert!((o.0[20] - 0.1).abs() < 1e-15);
        // Circle to the east pushes west.
        assert!(o.0[13] < 0.0);
    }

    #[test]
    fn dimension_independent_of_obstacle_count() {
        let cfg = ObservationConfig::for_radius(8.0);
        for n in [0, 1, 50] {
            let circles = (0..n)
                .map(|i| CircleObstacle::fixed(i, Vec2::new(900.0 + i as f64 * 4.0, 1040.0), 3.0))
                .collect();
            let o = build_observation(&state(), &ObstacleSet::new(circles, vec![]), None, &ctx(), 0, &cfg);
            assert_eq!(o.as_slice().len(), OBS_DIM);
            assert!(o.is_finite());
        }
    }

    #[test]
    fn history_prefill_and_shift() {
        let a = Observation([1.0; OBS_DIM]);
        let b = Observation([2.0; OBS_DIM]);
        let mut h = HistoryBuffer::new(4, a);
        assert_eq!(h.to_flat(), vec![1.0; 4 * OBS_DIM]);
        h.push(b);
        let flat = h.to_flat();
        assert_eq!(flat.len(), 4 * OBS_DIM);
        assert!(flat[..3 * OBS_DIM].iter().all(|&x| x == 1.0));
        assert!(flat[3 * OBS_DIM..].iter().all(|&x| x == 2.0));
        assert_eq!(h.latest(), &b);
    }

    #[test]
    fn observation_json_round_trip() {
        let o = Observation([0.25; OBS_DIM]);
        let s = serde_json::to_string(&o).unwrap();
        assert_eq!(serde_json::from_str::<Observation>(&s).unwrap(), o);
        assert!(serde_json::from_str::<Observation>("[1.0]").is_err());
    }
}
