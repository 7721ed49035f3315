//! Reference controllers over the discrete action set.
//!
//! Both pick the candidate heading nearest the goal bearing. Ties go to the
//! candidate nearer the current heading, then to starboard.

use crate::mask::{ActionMask, ActionSet, MaskOutcome};
use crate::math::angle_diff;

/// What a policy sees at a decision point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub psi: f64,
    pub goal_bearing: f64,
    pub mask: MaskOutcome,
}

fn nearest(actions: &ActionSet, psi: f64, goal_bearing: f64, allowed: impl Fn(usize) -> bool) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for i in (0..actions.n_actions).filter(|&i| allowed(i)) {
        let err = angle_diff(actions.heading(i, psi), goal_bearing).abs();
        let better = match best {
            None => true,
            Some((b, e)) => err < e || (err == e && actions.tie_key(i, psi) < actions.tie_key(b, psi)),
        };
        if better {
            best = Some((i, err));
        }
    }
    best.map(|(i, _)| i)
}

/// Unmasked candidate nearest the goal bearing; the mask's fallback when
/// every candidate is masked.
pub fn vo_policy(actions: &ActionSet, d: &Decision) -> usize {
    let mask: &ActionMask = &d.mask.mask;
    nearest(actions, d.psi, d.goal_bearing, |i| mask.get(i))
        .or(d.mask.fallback)
        .unwrap_or_else(|| greedy_policy(actions, d))
}

/// Candidate nearest the goal bearing, ignoring the mask.
pub fn greedy_policy(actions: &ActionSet, d: &Decision) -> usize {
    nearest(actions, d.psi, d.goal_bearing, |_| true).expect("action set is never empty")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::ActionMask;
    use std::f64::consts::PI;

    fn decision(psi: f64, bearing: f64, mask: ActionMask) -> Decision {
        Decision {
            psi,
            goal_bearing: bearing,
            mask: MaskOutcome { mask, fallback: None },
        }
    }

    #[test]
    fn unconstrained_picks_nearest() {
        let a = ActionSet::default();
        let d = decision(0.3, 0.3 + 2.0 * PI / 9.0 + 0.01, ActionMask::all_safe(18));
        assert_eq!(vo_policy(&a, &d), 11);
        assert_eq!(greedy_policy(&a, &d), 11);
    }

    #[test]
    fn blocked_ahead_turns_starboard_on_tie() {
        let a = ActionSet::default();
        let mut m = ActionMask::all_safe(18);
        m.set(9, false);
        let d = decision(1.0, 1.0, m);
        // Offsets ±20° tie; starboard is the negative offset, index 8.
        assert_eq!(vo_policy(&a, &d), 8);
        assert_eq!(greedy_policy(&a, &d), 9);
    }

    #[test]
    fn enumeration_oracle() {
        let a = ActionSet::default();
        for seed in 0..200u64 {
            let bits: Vec<bool> = (0..18).map(|i| (seed.wrapping_mul(2654435761) >> i) & 3 != 0).collect();
            let m = ActionMask::from_bools(&bits);
            if !m.any_safe() {
                continue;
            }
            let psi = (seed as f64 * 0.37) % PI;
            let bearing = (seed as f64 * 1.91) % PI - 1.0;
            let got = vo_policy(&a, &decision(psi, bearing, m));
            assert!(m.get(got));
            let err = |i: usize| angle_diff(a.heading(i, psi), bearing).abs();
            for i in (0..18).filter(|&i| m.get(i)) {
                assert!(err(got) <= err(i) + 1e-12);
            }
        }
    }

    #[test]
    fn all_masked_uses_fallback() {
        let a = ActionSet::default();
        let d = Decision {
            psi: 0.0,
            goal_bearing: 0.0,
            mask: MaskOutcome {
                mask: ActionMask::none_safe(18),
                fallback: Some(3),
            },
        };
        assert_eq!(vo_policy(&a, &d), 3);
    }
}
