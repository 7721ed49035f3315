//! JSON-lines rollout log. Every line is one object tagged with `kind`;
//! the first line is a header carrying the schema version.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dynamics::VesselState;
use crate::geometry::CollisionEvent;

use super::batch::{BatchEnv, Termination};
use super::evaluate::{EpisodeSummary, Metrics};
use super::reward::RewardBreakdown;
use super::EnvError;

pub const LOG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LogRecord {
    Header {
        schema_version: u32,
        scenario: String,
        policy: String,
        seed: u64,
        episodes: usize,
        n_actions: usize,
        step_budget: u32,
    },
    Step {
        step: u32,
        env: usize,
        agent: usize,
        action: usize,
        /// Decision mask, one character per action, `1` = safe.
        mask: String,
        state: VesselState,
        reward: RewardBreakdown,
        reward_total: f64,
        episode_return: f64,
        termination: Termination,
        unsafe_actions: u32,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        collision: Option<CollisionEvent>,
    },
    Episode(EpisodeSummary),
    Summary(Metrics),
}

/// Writes records as they arrive. Output is a pure function of the
/// records, so identical runs produce identical bytes.
pub struct RolloutLogger<W: Write> {
    out: W,
}

impl<W: Write> RolloutLogger<W> {
    pub fn new(out: W) -> Self {
        Self { out }
    }

    pub fn write(&mut self, record: &LogRecord) -> Result<(), EnvError> {
        let line = serde_json::to_string(record).map_err(|e| EnvError::Policy(e.to_string()))?;
        writeln!(self.out, "{line}").map_err(|e| EnvError::Io {
            path: "<log>".into(),
            message: e.to_string(),
        })
    }

    /// One record per agent that acted in the step just taken. `masks`
    /// holds the decision masks as bit strings, captured before the step.
    pub fn write_step(&mut self, env: &BatchEnv, masks: &[String]) -> Result<(), EnvError> {
        let m = env.config().m_agents;
        for (i, a) in env.agents().iter().enumerate() {
            let Some(action) = a.last().action else { continue };
            let reward = a.last().reward;
            self.write(&LogRecord::Step {
                step: a.steps(),
                env: i / m,
                agent: i % m,
                action,
                mask: masks[i].clone(),
                state: *a.state(),
                reward,
                reward_total: reward.total(),
                episode_return: a.episode_return(),
                termination: a.termination(),
                unsafe_actions: a.last().unsafe_actions,
                collision: a.last().collision,
            })?;
        }
        Ok(())
    }

    pub fn flush(&mut self) -> Result<(), EnvError> {
        self.out.flush().map_err(|e| EnvError::Io {
            path: "<log>".into(),
            message: e.to_string(),
        })
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_round_trip_with_kind_tag() {
        let rec = LogRecord::Header {
            schema_version: LOG_SCHEMA_VERSION,
            scenario: "open_water".into(),
            policy: "vo".into(),
            seed: 3,
            episodes: 2,
            n_actions: 18,
            step_budget: 600,
        };
        let mut log = RolloutLogger::new(Vec::new());
        log.write(&rec).unwrap();
        let text = String::from_utf8(log.into_inner()).unwrap();
        assert!(text.starts_with("{\"kind\":\"header\",\"schema_version\":1"));
        assert!(text.ends_with('\n'));
        let back: LogRecord = serde_json::from_str(text.trim_end()).unwrap();
        assert_eq!(back, rec);
    }
}
