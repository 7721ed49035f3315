//! Seeded policy evaluation: success rate, episode length and unsafe
//! actions per decision.

use serde::{Deserialize, Serialize};

use crate::baselines::{greedy_policy, vo_policy};

use super::batch::{BatchConfig, BatchEnv, EnvOptions, Termination};
use super::scenario::Scenario;
use super::EnvError;

/// Chooses one action per agent, in flat order. Entries for done agents
/// are ignored.
pub trait Policy {
    fn name(&self) -> &str;
    fn act(&mut self, env: &BatchEnv) -> Result<Vec<usize>, EnvError>;
}

/// Called after every step with the env and the decision masks used for it.
pub type StepObserver<'a> = dyn FnMut(&BatchEnv, &[String]) -> Result<(), EnvError> + 'a;

/// Adapts a closure into a [`Policy`].
pub struct PolicyFn<F> {
    name: String,
    f: F,
}

impl<F> PolicyFn<F>
where
    F: FnMut(&BatchEnv) -> Result<Vec<usize>, EnvError>,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        Self { name: name.into(), f }
    }
}

impl<F> Policy for PolicyFn<F>
where
    F: FnMut(&BatchEnv) -> Result<Vec<usize>, EnvError>,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn act(&mut self, env: &BatchEnv) -> Result<Vec<usize>, EnvError> {
        (self.f)(env)
    }
}

/// The built-in velocity-obstacle and greedy controllers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    Vo,
    Greedy,
}

impl Policy for Baseline {
    fn name(&self) -> &str {
        match self {
            Baseline::Vo => "vo",
            Baseline::Greedy => "greedy",
        }
    }

    fn act(&mut self, env: &BatchEnv) -> Result<Vec<usize>, EnvError> {
        let actions = env.action_set();
        Ok((0..env.n_agents())
            .map(|i| {
                if env.agent(i).done() {
                    return 0;
                }
                let d = env.decision(i);
                match self {
                    Baseline::Vo => vo_policy(actions, &d),
                    Baseline::Greedy => greedy_policy(actions, &d),
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub episode: usize,
    pub termination: Termination,
    pub length: u32,
    pub episode_return: f64,
    /// Masked candidates per decision, averaged over this episode.
    pub unsafe_per_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub episodes: usize,
    /// Percent of episodes ending in `Goal`.
    pub success_rate: f64,
    pub length_mean: f64,
    pub length_std: f64,
    pub unsafe_mean: f64,
    pub unsafe_std: f64,
    pub return_mean: f64,
    pub goal: usize,
    pub collision: usize,
    pub boundary: usize,
    pub timeout: usize,
}

/// Mean and population standard deviation.
fn mean_std(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = xs.clone().sum::<f64>() / n as f64;
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
    (mean, var.sqrt())
}

impl Metrics {
    pub fn from_episodes(eps: &[EpisodeSummary]) -> Self {
        let (length_mean, length_std) = mean_std(eps.iter().map(|e| e.length as f64));
        let (unsafe_mean, unsafe_std) = mean_std(eps.iter().map(|e| e.unsafe_per_step));
        let (return_mean, _) = mean_std(eps.iter().map(|e| e.episode_return));
        let count = |t: Termination| eps.iter().filter(|e| e.termination == t).count();
        let goal = count(Termination::Goal);
        Self {
            episodes: eps.len(),
            success_rate: if eps.is_empty() { 0.0 } else { 100.0 * goal as f64 / eps.len() as f64 },
            length_mean,
            length_std,
            unsafe_mean,
            unsafe_std,
            return_mean,
            goal,
            collision: count(Termination::Collision),
            boundary: count(Termination::Boundary),
            timeout: count(Termination::Timeout),
        }
    }
}

/// Runs `n_episodes` episodes side by side, one environment each, until
/// every one terminates. `observe` sees the env after each step together
/// with the decision masks used for it.
pub fn evaluate_with(
    scenario: &Scenario,
    n_episodes: usize,
    seed: u64,
    options: EnvOptions,
    policy: &mut dyn Policy,
    observe: &mut StepObserver,
) -> Result<(Metrics, Vec<EpisodeSummary>), EnvError> {
    let mut env = BatchEnv::new(scenario.clone(), BatchConfig::new(n_episodes, 1, seed), options)?;
    while !env.all_done() {
        let masks: Vec<String> = env.agents().iter().map(|a| a.mask().mask.to_bit_string()).collect();
        let actions = policy.act(&env)?;
        env.step(&actions)?;
        observe(&env, &masks)?;
    }
    let episodes: Vec<EpisodeSummary> = env
        .agents()
        .iter()
        .enumerate()
        .map(|(episode, a)| EpisodeSummary {
            episode,
            termination: a.termination(),
            length: a.steps(),
            episode_return: a.episode_return(),
            unsafe_per_step: a.unsafe_total() as f64 / a.steps().max(1) as f64,
        })
        .collect();
    Ok((Metrics::from_episodes(&episodes), episodes))
}

/// [`evaluate_with`] without BEV rendering or observers.
pub fn evaluate(
    scenario: &Scenario,
    n_episodes: usize,
    seed: u64,
    policy: &mut dyn Policy,
) -> Result<Metrics, EnvError> {
    evaluate_with(scenario, n_episodes, seed, EnvOptions::without_bev(), policy, &mut |_, _| Ok(()))
        .map(|(m, _)| m)
}
