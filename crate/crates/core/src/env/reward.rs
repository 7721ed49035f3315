use serde::{Deserialize, Serialize};

use super::batch::Termination;
use super::scenario::RewardWeights;

/// Per-step reward split into its terms; [`total`](Self::total) is their
/// sum in field order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub progress: f64,
    pub terminal: f64,
    pub time: f64,
    pub gradient: f64,
}

impl RewardBreakdown {
    pub fn total(&self) -> f64 {
        self.progress + self.terminal + self.time + self.gradient
    }

    /// `gradient_magnitude` is the larger squashed repulsive gradient at the
    /// end of the step.
    pub fn compute(
        w: &RewardWeights,
        prev_goal_distance: f64,
        goal_distance: f64,
        termination: Termination,
        gradient_magnitude: f64,
    ) -> Self {
        let terminal = match termination {
            Termination::Goal => w.r_success,
            Termination::Collision | Termination::Boundary => w.r_collision,
            Termination::None | Termination::Timeout => 0.0,
        };
        Self {
            progress: w.w_progress * (prev_goal_distance - goal_distance),
            terminal,
            time: -w.c_time,
            gradient: -w.w_gradient * (gradient_magnitude - w.gradient_threshold).max(0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_progress_step() {
        let w = RewardWeights::default();
        let r = RewardBreakdown::compute(&w, 100.0, 100.0, Termination::None, 0.7);
        assert_eq!(r.progress, 0.0);
        assert_eq!(r.terminal, 0.0);
        assert!((r.total() - (-0.1 - 0.5 * 0.2)).abs() < 1e-15);
        let quiet = RewardBreakdown::compute(&w, 100.0, 100.0, Termination::None, 0.3);
        assert_eq!(quiet.total(), -0.1);
    }

    #[test]
    fn terminal_terms() {
        let w = RewardWeights::default();
        let g = RewardBreakdown::compute(&w, 10.0, 5.0, Termination::Goal, 0.0);
        assert_eq!(g.terminal, 200.0);
        assert_eq!(g.progress, 5.0);
        for t in [Termination::Collision, Termination::Boundary] {
            assert_eq!(RewardBreakdown::compute(&w, 10.0, 5.0, t, 0.0).terminal, -200.0);
        }
        assert_eq!(RewardBreakdown::compute(&w, 10.0, 5.0, Termination::Timeout, 0.0).terminal, 0.0);
    }
}
