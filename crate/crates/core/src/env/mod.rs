//! Batched navigation environment: N environments × M agents stepped in
//! lock-step, with rewards, termination, logging, benchmarking and
//! evaluation.

mod batch;
mod bench;
mod evaluate;
mod log;
mod protocol;
mod reward;
mod scenario;

use thiserror::Error;

use crate::dynamics::DynamicsError;
use crate::geometry::GeometryError;
use crate::observation::ObservationError;

pub use batch::{Agent, AgentStep, AgentView, BatchConfig, BatchEnv, EnvOptions, Strategy, Termination};
pub use bench::{bench_scenario, run_benchmark, run_trial, BenchConfig, BenchReport, BenchRow};
pub use evaluate::{evaluate, evaluate_with, Baseline, EpisodeSummary, Metrics, Policy, PolicyFn, StepObserver};
pub use log::{LogRecord, RolloutLogger, LOG_SCHEMA_VERSION};
pub use protocol::{parse_actions, ExternAgent, ExternFrame, PROTOCOL_SCHEMA_VERSION};
pub use reward::RewardBreakdown;
pub use scenario::{
    CircleSpec, CurrentRanges, Goal, LintCheck, LintReport, MaskSettings, MovingSpawner, ObservationSettings,
    PolylineSpec, Randomization, RewardWeights, Scenario, VesselConfig, BUNDLED, SCENARIO_VERSION,
    SPAWN_ATTEMPTS,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("cannot parse scenario: {0}")]
    Parse(String),
    #[error("unsupported scenario version {0}")]
    UnsupportedVersion(i64),
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("infeasible spawn for env {env} agent {agent} after {attempts} attempts")]
    InfeasibleSpawn { env: usize, agent: usize, attempts: u32 },
    #[error("invalid batch: {0}")]
    Batch(String),
    #[error("expected {expected} actions, got {found}")]
    ActionCount { expected: usize, found: usize },
    #[error("policy error: {0}")]
    Policy(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Observation(#[from] ObservationError),
}

impl EnvError {
    /// Coarse category used by the CLI exit status and external callers.
    pub fn category(&self) -> &'static str {
        match self {
            EnvError::Parse(_) | EnvError::UnsupportedVersion(_) | EnvError::Io { .. } => "input",
            EnvError::Scenario(_) | EnvError::InfeasibleSpawn { .. } | EnvError::Geometry(_) => "scenario",
            EnvError::Batch(_) | EnvError::ActionCount { .. } => "usage",
            EnvError::Policy(_) => "policy",
            EnvError::Dynamics(_) | EnvError::Observation(_) => "simulation",
        }
    }
}
