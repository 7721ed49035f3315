//! Wall-clock throughput of the three dispatch strategies on an identical
//! workload.
//!
//! The workload is open water with deterministic pseudo-random commands,
//! so every strategy integrates exactly the same trajectories. Only the
//! step loop is timed; construction and reset are not.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Integrator, ModelKind};
use crate::geometry::MapExtent;
use crate::math::Vec2;
use crate::seeding::{mix, Stream};

use super::batch::{BatchConfig, BatchEnv, EnvOptions, Strategy};
use super::scenario::Scenario;
use super::EnvError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub n_envs: usize,
    pub m_agents: usize,
    pub n_commands: u32,
    pub substeps: u32,
    pub trials: usize,
    pub seed: u64,
    pub model: ModelKind,
    pub integrator: Integrator,
    pub strategies: Vec<Strategy>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            n_envs: 1024,
            m_agents: 64,
            n_commands: 50,
            substeps: 10,
            trials: 10,
            seed: 0,
            model: ModelKind::Mmg3dof,
            integrator: Integrator::Rk4,
            strategies: Strategy::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub strategy: Strategy,
    pub seconds: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation over trials.
    pub std: f64,
    /// Hash of every agent's end state bits; equal hashes mean bit-identical
    /// end states.
    pub state_hash: String,
    /// Largest end-state component difference against the first strategy.
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub threads: usize,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn row(&self, s: Strategy) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.strategy == s)
    }

    /// `mean(slow) / mean(fast)`.
    pub fn ratio(&self, slow: Strategy, fast: Strategy) -> Option<f64> {
        Some(self.row(slow)?.mean / self.row(fast)?.mean)
    }
}

/// Obstacle-free ±10 km square, large enough that no agent terminates
/// within the benchmark horizon.
pub fn bench_scenario(cfg: &BenchConfig) -> Result<Scenario, EnvError> {
    let mut sc = Scenario::bundled("open_water").expect("open_water is bundled");
    sc.name = "bench_open_water".into();
    sc.extent = MapExtent::new(Vec2::new(-10_000.0, -10_000.0), Vec2::new(10_000.0, 10_000.0));
    sc.departure = MapExtent::new(Vec2::new(-9_000.0, -9_000.0), Vec2::new(9_000.0, 8_000.0));
    sc.goal.position = Vec2::new(9_500.0, 9_500.0);
    sc.step_budget = cfg.n_commands.max(1) + 1;
    sc.vessel.model = cfg.model;
    sc.vessel.params = None;
    sc.vessel.integrator = cfg.integrator;
    sc.vessel.substeps = cfg.substeps;
    sc.validate()?;
    Ok(sc)
}

fn fnv1a(words: impl Iterator<Item = u64>) -> u64 {
    words.fold(0xcbf2_9ce4_8422_2325, |h, w| {
        w.to_le_bytes()
            .iter()
            .fold(h, |h, &b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
    })
}

fn end_state(env: &BatchEnv) -> Vec<f64> {
    env.agents()
        .iter()
        .flat_map(|a| {
            let s = a.state();
            [s.x, s.y, s.psi, s.u, s.v, s.r, s.rudder, s.rpm]
        })
        .collect()
}

/// Runs one timed trial and returns `(seconds, end state)`.
pub fn run_trial(sc: &Scenario, cfg: &BenchConfig, strategy: Strategy) -> Result<(f64, Vec<f64>), EnvError> {
    let batch = BatchConfig::new(cfg.n_envs, cfg.m_agents, cfg.seed).with_strategy(strategy);
    let mut env = BatchEnv::new(sc.clone(), batch, EnvOptions::physics_only())?;
    let n = env.n_agents();
    let n_actions = env.action_set().n_actions as u64;
    let mut actions = vec![0usize; n];
    let start = Instant::now();
    for step in 0..cfg.n_commands {
        for (i, a) in actions.iter_mut().enumerate() {
            *a = (mix(&[cfg.seed, Stream::Benchmark as u64, i as u64, step as u64]) % n_actions) as usize;
        }
        env.step(&actions)?;
    }
    Ok((start.elapsed().as_secs_f64(), end_state(&env)))
}

pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchReport, EnvError> {
    if cfg.trials == 0 || cfg.strategies.is_empty() {
        return Err(EnvError::Batch("benchmark needs at least one trial and one strategy".into()));
    }
    let sc = bench_scenario(cfg)?;
    let mut reference: Option<Vec<f64>> = None;
    let mut rows = Vec::new();
    for &strategy in &cfg.strategies {
        let mut seconds = Vec::with_capacity(cfg.trials);
        let mut last = Vec::new();
        for _ in 0..cfg.trials {
            let (t, state) = run_trial(&sc, cfg, strategy)?;
            seconds.push(t);
            last = state;
        }
        let mean = seconds.iter().sum::<f64>() / seconds.len() as f64;
        let std = (seconds.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / seconds.len() as f64).sqrt();
        let reference = reference.get_or_insert_with(|| last.clone());
        let max_deviation = reference
            .iter()
            .zip(&last)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        rows.push(BenchRow {
            strategy,
            seconds,
            mean,
            std,
            state_hash: format!("{:016x}", fnv1a(last.iter().map(|x| x.to_bits()))),
            max_deviation,
        });
    }
    Ok(BenchReport {
        config: cfg.clone(),
        threads: rayon::current_num_threads(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_batch_strategies_agree_bitwise() {
        let cfg = BenchConfig {
            n_envs: 2,
            m_agents: 2,
            n_commands: 5,
            trials: 1,
            ..BenchConfig::default()
        };
        let report = run_benchmark(&cfg).unwrap();
        assert_eq!(report.rows.len(), 3);
        let h = &report.rows[0].state_hash;
        assert!(report.rows.iter().all(|r| &r.state_hash == h && r.max_deviation == 0.0));
    }
}
