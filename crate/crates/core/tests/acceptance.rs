//! Acceptance suite. Runs every criterion at its stated tolerance and
//! prints one `PASS`/`FAIL` line per criterion; exits nonzero if any
//! counted criterion fails.
//!
//! Oracles here are written independently of the library code they check:
//! finite differences for the barrier gradient, dense sampling for swept
//! collisions and masks, closed-form solutions for the Nomoto model and
//! step-halving for integrator order.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use seanav::dynamics::{step_mmg, step_nomoto, Integrator, ModelKind, ShipParams, VesselState};
use seanav::env::{
    evaluate, evaluate_with, run_benchmark, Baseline, BenchConfig, EnvOptions, LogRecord, RolloutLogger, Scenario,
    Strategy,
};
use seanav::geometry::{ccd_circle, ccd_segment, discrete_segment_overlap, min_dist_point_segment, CircleObstacle};
use seanav::mask::{audit_mask, masked_distribution, ActionMask};
use seanav::observation::{barrier_gradient, barrier_potential, PotentialConfig};
use seanav::Vec2;

struct Outcome {
    pass: bool,
    /// False when the host cannot meet the criterion's stated hardware
    /// precondition; the line is still printed.
    counted: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, counted: true, detail }
    }
}

fn parallel_ordering() -> Outcome {
    let cfg = BenchConfig { trials: 1, ..BenchConfig::default() };
    let rk4 = run_benchmark(&cfg).expect("benchmark runs");
    let euler = run_benchmark(&BenchConfig {
        n_envs: 64,
        integrator: Integrator::SemiImplicitEuler,
        ..cfg.clone()
    })
    .expect("benchmark runs");
    let rk4_dev = rk4.rows.iter().map(|r| r.max_deviation).fold(0.0, f64::max);
    let euler_same = euler.rows.iter().all(|r| r.state_hash == euler.rows[0].state_hash);
    let ratio = rk4.ratio(Strategy::PerAgent, Strategy::Full).expect("both strategies ran");
    let cores = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let times: Vec<String> = rk4.rows.iter().map(|r| format!("{}={:.2}s", r.strategy, r.mean)).collect();
    let equivalent = rk4_dev <= 1e-12 && euler_same;
    let fast_enough = ratio >= 4.0;
    let mut out = Outcome::new(
        equivalent && fast_enough,
        format!(
            "{} envs x {} agents, {}; per-agent/full = {ratio:.2}x (need >= 4x); rk4 max dev {rk4_dev:.1e}; euler bit-exact {euler_same}; {} core(s)",
            cfg.n_envs,
            cfg.m_agents,
            times.join(" "),
            cores
        ),
    );
    if equivalent && !fast_enough && cores < 8 {
        // The ordering is defined for an 8-core host; on fewer cores the
        // speed half is reported but cannot be judged.
        out.counted = false;
        out.detail.push_str("; speed half needs an 8-core host, not counted");
    }
    out
}

fn barrier_gradient_fd() -> Outcome {
    let d0 = 24.0;
    // Cutoff beyond the grid so the formula itself is checked everywhere.
    let cfg = PotentialConfig { alpha: 1.3, d0, cutoff: 100.0 * d0 };
    let n = 200;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let d = d0 * 10f64.powf(-1.0 + 2.0 * i as f64 / (n - 1) as f64);
        let h = 1e-3 * d;
        let u = |x: f64| barrier_potential(x, &cfg);
        // Five-point stencil, fourth-order accurate.
        let fd = (u(d - 2.0 * h) - 8.0 * u(d - h) + 8.0 * u(d + h) - u(d + 2.0 * h)) / (12.0 * h);
        let g = barrier_gradient(d, &cfg).expect("positive distance");
        worst = worst.max((g - fd).abs() / g.abs().max(fd.abs()));
    }
    Outcome::new(worst <= 1e-6, format!("{n} log-spaced points in [0.1 d0, 10 d0], worst relative error {worst:.2e} (need <= 1e-6)"))
}

fn mask_soundness() -> Outcome {
    let rep = audit_mask(2024, 10_000);
    let agreement = rep.agreement();
    Outcome::new(
        rep.pairs == 10_000 && agreement >= 0.999 && rep.disagree_off_boundary == 0,
        format!(
            "{} pairs, agreement {:.4}% (need >= 99.9%), {} disagreements, {} away from the boundary (need 0)",
            rep.pairs,
            100.0 * agreement,
            rep.disagree,
            rep.disagree_off_boundary
        ),
    )
}

fn masked_softmax_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut failures = Vec::new();
    for trial in 0..10_000 {
        let n = rng.random_range(2..=18);
        let scale = [1.0, 10.0, 1e3][trial % 3];
        let logits: Vec<f64> = (0..n).map(|_| rng.random_range(-scale..=scale)).collect();
        let mut bits: Vec<bool> = (0..n).map(|_| rng.random_bool(0.6)).collect();
        let keep = rng.random_range(0..n);
        bits[keep] = true;
        let mask = ActionMask::from_bools(&bits);
        let p = masked_distribution(&logits, &mask).expect("at least one safe action");
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            failures.push(format!("sum {sum}"));
        }
        if p.iter().zip(&bits).any(|(&pi, &b)| !b && pi != 0.0) {
            failures.push("masked entry nonzero".into());
        }
        let shift = rng.random_range(-1e3..=1e3);
        let shifted: Vec<f64> = logits.iter().map(|z| z + shift).collect();
        let q = masked_distribution(&shifted, &mask).expect("at least one safe action");
        let argmax = |v: &[f64]| (0..n).fold(None::<usize>, |b, i| match b {
            Some(j) if v[j] >= v[i] => Some(j),
            _ if bits[i] => Some(i),
            _ => b,
        });
        // Oracle: the best unmasked raw logit.
        let oracle = argmax(&logits);
        if argmax(&p) != oracle || argmax(&q) != oracle {
            failures.push(format!("argmax moved under shift {shift}"));
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!("10000 logit/mask pairs with |z| up to 1e3, {} failures{}", failures.len(), failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()),
    )
}

/// First sample index at which the disc touches the obstacle, as a step
/// fraction.
fn dense_first_contact(p0: Vec2, p1: Vec2, touches: impl Fn(Vec2) -> bool) -> Option<f64> {
    const SAMPLES: usize = 10_000;
    (0..=SAMPLES).map(|k| k as f64 / SAMPLES as f64).find(|&t| touches(p0.lerp(p1, t)))
}

fn ccd_superiority() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (mut discrete_hits, mut ccd_hits, mut worst_dt) = (0, 0, 0.0f64);
    let scenes = 1000;
    for k in 0..scenes {
        let radius = rng.random_range(1.0..10.0);
        let center = Vec2::new(rng.random_range(-100.0..100.0), rng.random_range(-100.0..100.0));
        let dir = Vec2::from_angle(rng.random_range(0.0..std::f64::consts::TAU));
        let side = dir.rotated(std::f64::consts::FRAC_PI_2);
        // Endpoints well clear on either side, path through the obstacle.
        let before = rng.random_range(1.5..6.0) * radius;
        let after = rng.random_range(1.5..6.0) * radius;
        let lateral = rng.random_range(-0.5..0.5) * radius;
        if k % 2 == 0 {
            let half = rng.random_range(5.0..50.0);
            let (a, b) = (center - side * half, center + side * half);
            let p0 = center - dir * before + side * lateral;
            let p1 = center + dir * after + side * lateral;
            let discrete = discrete_segment_overlap(p0, radius, a, b) || discrete_segment_overlap(p1, radius, a, b);
            discrete_hits += discrete as usize;
            let oracle = dense_first_contact(p0, p1, |p| min_dist_point_segment(p, a, b) <= radius);
            if let (Some(c), Some(t)) = (ccd_segment(p0, p1, radius, a, b), oracle) {
                ccd_hits += 1;
                worst_dt = worst_dt.max((c.t - t).abs());
            }
        } else {
            let obs_r = rng.random_range(1.0..20.0);
            let c = CircleObstacle::fixed(0, center, obs_r);
            let reach = radius + obs_r;
            let p0 = center - dir * (reach + before) + side * lateral;
            let p1 = center + dir * (reach + after) + side * lateral;
            let discrete = p0.distance(center) <= reach || p1.distance(center) <= reach;
            discrete_hits += discrete as usize;
            let oracle = dense_first_contact(p0, p1, |p| p.distance(center) <= reach);
            if let (Some(hit), Some(t)) = (ccd_circle(p0, p1, radius, &c, center, center), oracle) {
                ccd_hits += 1;
                worst_dt = worst_dt.max((hit.t - t).abs());
            }
        }
    }
    Outcome::new(
        discrete_hits == 0 && ccd_hits == scenes && worst_dt <= 2e-3,
        format!(
            "{scenes} tunnelling scenes: discrete caught {discrete_hits} (need 0), swept caught {ccd_hits} (need {scenes}), worst |t - t_dense| {worst_dt:.1e} (need <= 2e-3)"
        ),
    )
}

fn integrator_convergence() -> Outcome {
    // Nomoto with the rudder already at its command: closed form exists.
    let params = ShipParams::reference(ModelKind::Nomoto1);
    let nom = *params.nomoto_params().expect("nomoto params");
    let delta = 0.5 * params.actuator.max_rudder();
    let (k, t_c) = (nom.k, nom.t);
    let mut s = VesselState::underway(Vec2::ZERO, 0.3, 4.0);
    s.rudder = delta;
    s.r = -0.01;
    let (r0, psi0) = (s.r, s.psi);
    let mut worst: f64 = 0.0;
    for step in 1..=5 {
        s = step_nomoto(&s, &params, delta, 4.0, Vec2::ZERO, t_c, Integrator::Rk4, 100).expect("nomoto step");
        let t = step as f64 * t_c;
        let e = (-t / t_c).exp();
        let r = k * delta + (r0 - k * delta) * e;
        let psi = psi0 + k * delta * t + (r0 - k * delta) * t_c * (1.0 - e);
        let dpsi = seanav::wrap_angle(s.psi - psi);
        worst = worst.max((s.r - r).abs() / r.abs()).max(dpsi.abs() / psi.abs());
    }

    // Step-halving on a steady MMG turn with the actuators at their commands,
    // from h = 0.5 s (RK4) and h = 0.125 s (Euler), inside the asymptotic range.
    let mmg = ShipParams::reference(ModelKind::Mmg3dof);
    let rpm = mmg.rpm_per_speed() * 5.0;
    let mut start = VesselState::underway(Vec2::new(10.0, -20.0), 0.2, 5.0);
    start.rudder = 0.25;
    start.rpm = rpm;
    start.r = 0.01;
    let order = |integ: Integrator, base: u32, horizon: f64| {
        let run = |n: u32| {
            let s = step_mmg(&start, &mmg, 0.25, rpm, Vec2::ZERO, horizon, integ, n).expect("mmg step");
            [s.x, s.y, s.psi, s.u, s.v, s.r]
        };
        let (a, b, c) = (run(base), run(2 * base), run(4 * base));
        let diff = |p: &[f64; 6], q: &[f64; 6]| p.iter().zip(q).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        (diff(&a, &b) / diff(&b, &c)).log2()
    };
    let p_rk4 = order(Integrator::Rk4, 80, 40.0);
    let p_euler = order(Integrator::SemiImplicitEuler, 320, 40.0);
    Outcome::new(
        worst <= 1e-6 && p_rk4 >= 3.8 && p_euler >= 0.9,
        format!(
            "nomoto rk4 at dt = T/100 worst relative error {worst:.1e} (need <= 1e-6); mmg order rk4 {p_rk4:.3} (need >= 3.8), semi-implicit euler {p_euler:.3} (need >= 0.9)"
        ),
    )
}

fn vo_band() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    // Reference success rate and mean length for the two published scenarios.
    for (name, paper_len) in [("mini_coastline", 488.0), ("mini_port", 314.0)] {
        let sc = Scenario::bundled(name).expect("bundled");
        let statics = sc.static_circles.len();
        let moving = sc.moving.as_ref().map(|m| m.count).unwrap_or(0);
        let m = evaluate(&sc, 100, 0, &mut Baseline::Vo).expect("evaluation runs");
        let rel = (m.length_mean - paper_len) / paper_len;
        let ok = statics == 3 && moving == 3 && (50.0..=90.0).contains(&m.success_rate) && rel.abs() <= 0.4;
        pass &= ok;
        parts.push(format!(
            "{name}: SR {:.0}% (need 50-90), Length {:.1} ± {:.1} ({:+.0}% vs {paper_len}, need ±40%), UA {:.2}, {statics} static + {moving} moving",
            m.success_rate,
            m.length_mean,
            m.length_std,
            100.0 * rel,
            m.unsafe_mean
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

fn determinism_and_bookkeeping() -> Outcome {
    let sc = Scenario::bundled("mini_coastline").expect("bundled");
    let run = || {
        let mut log = RolloutLogger::new(Vec::new());
        let mut observe = |env: &seanav::env::BatchEnv, masks: &[String]| log.write_step(env, masks);
        let (_, eps) = evaluate_with(&sc, 12, 31, EnvOptions::without_bev(), &mut Baseline::Vo, &mut observe)
            .expect("evaluation runs");
        for e in &eps {
            log.write(&LogRecord::Episode(e.clone())).expect("in-memory write");
        }
        String::from_utf8(log.into_inner()).expect("utf-8 log")
    };
    let (a, b) = (run(), run());
    let identical = a == b;

    let mut returns = [0.0f64; 12];
    let mut mismatches = 0;
    let mut steps = 0;
    for line in a.lines() {
        match serde_json::from_str::<LogRecord>(line).expect("log line parses") {
            LogRecord::Step { env, reward, reward_total, episode_return, .. } => {
                let replay = reward.progress + reward.terminal + reward.time + reward.gradient;
                returns[env] += replay;
                mismatches += (replay != reward_total || returns[env] != episode_return) as usize;
                steps += 1;
            }
            LogRecord::Episode(e) => mismatches += (returns[e.episode] != e.episode_return) as usize,
            _ => {}
        }
    }
    Outcome::new(
        identical && mismatches == 0 && steps > 0,
        format!("two seeded runs byte-identical: {identical} ({} bytes); {steps} step records replayed, {mismatches} return mismatches (need 0)", a.len()),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("parallel_ordering", parallel_ordering),
        ("barrier_gradient", barrier_gradient_fd),
        ("mask_soundness", mask_soundness),
        ("masked_softmax", masked_softmax_properties),
        ("ccd_superiority", ccd_superiority),
        ("integrator_convergence", integrator_convergence),
        ("vo_baseline_band", vo_band),
        ("determinism_bookkeeping", determinism_and_bookkeeping),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let out = check();
        let status = if out.pass { "PASS" } else { "FAIL" };
        println!("{status} {name} [{:.1}s] {}", start.elapsed().as_secs_f64(), out.detail);
        failed += (!out.pass && out.counted) as usize;
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
