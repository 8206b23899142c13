use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{decode_and_report, QuboModel, SolveResult, SolverMetadata};
use crate::assembly::CompiledProblem;

/// Geometric cooling; one step is a full sweep of single-bit flip proposals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnealSchedule {
    /// Defaults to the largest absolute QUBO coefficient.
    pub initial_temperature: Option<f64>,
    pub cooling: f64,
    pub steps: usize,
    pub restarts: usize,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule {
            initial_temperature: None,
            cooling: 0.995,
            steps: 20_000,
            restarts: 8,
        }
    }
}

/// Metropolis annealing; restart `r` draws from stream `r` of the seeded generator.
pub fn simulated_annealing(
    c: &CompiledProblem,
    schedule: &AnnealSchedule,
    seed: u64,
) -> SolveResult {
    let start = Instant::now();
    let n = c.n_variables();
    let model = QuboModel::new(&c.polynomial, n);
    let t0 = schedule
        .initial_temperature
        .unwrap_or_else(|| model.max_abs_coefficient());
    let t0 = if t0 > 0.0 { t0 } else { 1.0 };
    let restarts = schedule.restarts.max(1);

    let runs: Vec<Vec<bool>> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            anneal_once(&model, t0, schedule, &mut rng)
        })
        .collect();

    let mut best: Option<(f64, Vec<bool>)> = None;
    for x in runs {
        let e = c.polynomial.evaluate(&x).expect("full assignment");
        if best.as_ref().is_none_or(|(b, _)| e < *b) {
            best = Some((e, x));
        }
    }
    let (energy, assignment) = best.expect("at least one restart");
    let solution = decode_and_report(c, &assignment).expect("assignment has registry length");
    SolveResult {
        assignment,
        energy,
        solution,
        metadata: SolverMetadata {
            method: "simulated_annealing".into(),
            seed: Some(seed),
            iterations: (restarts * schedule.steps * n) as u64,
            restarts: Some(restarts),
            wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        },
    }
}

fn anneal_once(
    model: &QuboModel,
    t0: f64,
    schedule: &AnnealSchedule,
    rng: &mut ChaCha8Rng,
) -> Vec<bool> {
    let n = model.n();
    let mut x: Vec<bool> = (0..n).map(|_| rng.random()).collect();
    let mut fields = model.local_fields(&x);
    let mut energy = model.energy(&x);
    let mut best = (energy, x.clone());
    let mut t = t0;
    for _ in 0..schedule.steps {
        for i in 0..n {
            let delta = model.flip_delta(&x, &fields, i);
            if delta <= 0.0 || rng.random::<f64>() < (-delta / t).exp() {
                model.flip(&mut x, &mut fields, i);
                energy += delta;
                if energy < best.0 {
                    best = (energy, x.clone());
                }
            }
        }
        t *= schedule.cooling;
    }
    best.1
}
