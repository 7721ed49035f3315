//! Line protocol for an external policy process.
//!
//! Per decision the simulator writes one JSON frame on a single line and
//! reads back one line of actions, either a JSON array or whitespace
//! separated integers, one per agent in flat order.

use serde::{Deserialize, Serialize};

use super::batch::{BatchEnv, Termination};
use super::EnvError;

pub const PROTOCOL_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternAgent {
    pub index: usize,
    pub done: bool,
    pub termination: Termination,
    /// Reward of the last step; 0 before the first one.
    pub reward: f64,
    /// History flattened oldest-first, `k × d` values.
    pub obs: Vec<f64>,
    /// One character per action, `1` = safe.
    pub mask: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternFrame {
    pub schema_version: u32,
    pub step: u32,
    pub agents: Vec<ExternAgent>,
    pub done_all: bool,
}

impl ExternFrame {
    pub fn capture(env: &BatchEnv) -> Self {
        let agents = env
            .agents()
            .iter()
            .enumerate()
            .map(|(index, a)| ExternAgent {
                index,
                done: a.done(),
                termination: a.termination(),
                reward: a.last().reward.total(),
                obs: a.history().map(|h| h.to_flat()).unwrap_or_default(),
                mask: a.mask().mask.to_bit_string(),
            })
            .collect();
        Self {
            schema_version: PROTOCOL_SCHEMA_VERSION,
            step: env.step_index(),
            agents,
            done_all: env.all_done(),
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("frame fields are always serializable")
    }
}

/// Parses one action line for `n` agents.
pub fn parse_actions(line: &str, n: usize) -> Result<Vec<usize>, EnvError> {
    let trimmed = line.trim();
    let actions: Vec<usize> = if trimmed.starts_with('[') {
        serde_json::from_str(trimmed).map_err(|e| EnvError::Policy(format!("bad action array: {e}")))?
    } else {
        trimmed
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| EnvError::Policy(format!("bad action `{tok}`")))
            })
            .collect::<Result<_, _>>()?
    };
    if actions.len() != n {
        return Err(EnvError::ActionCount {
            expected: n,
            found: actions.len(),
        });
    }
    Ok(actions)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_action_formats() {
        assert_eq!(parse_actions("[1, 2,3]\n", 3).unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_actions(" 4 5\t6 ", 3).unwrap(), vec![4, 5, 6]);
        assert!(matches!(parse_actions("1 2", 3), Err(EnvError::ActionCount { .. })));
        assert!(matches!(parse_actions("1 x 2", 3), Err(EnvError::Policy(_))));
        assert!(matches!(parse_actions("[-1, 0, 0]", 3), Err(EnvError::Policy(_))));
    }
}
