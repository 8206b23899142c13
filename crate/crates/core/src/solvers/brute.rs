use std::time::Instant;

use rayon::prelude::*;

use super::{decode_and_report, QuboModel, SolveResult, SolverMetadata};
use crate::assembly::CompiledProblem;
use crate::error::SolveError;

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 24;

/// The leading variables fixed per work unit; the split never depends on thread count.
const PREFIX_BITS: usize = 8;

/// Candidate `(energy, code)`; codes order assignments lexicographically, `x0` most significant.
type Best = (f64, u64);

fn better(candidate: Best, best: Best) -> bool {
    let tol = 1e-9 * (1.0 + best.0.abs());
    candidate.0 < best.0 - tol || (candidate.0 <= best.0 + tol && candidate.1 < best.1)
}

/// Exhaustive minimization; ties go to the lexicographically smallest assignment.
///
/// `threads` limits the worker count; `None` uses the global pool.
pub fn brute_force(
    c: &CompiledProblem,
    cap: usize,
    threads: Option<usize>,
) -> Result<SolveResult, SolveError> {
    let n = c.n_variables();
    if n > cap || n >= 63 {
        return Err(SolveError::CapExceeded { n, cap });
    }
    let start = Instant::now();
    let model = QuboModel::new(&c.polynomial, n);
    let prefix_bits = n.min(PREFIX_BITS);
    let low_bits = n - prefix_bits;

    let scan = || -> Vec<Best> {
        (0..1u64 << prefix_bits)
            .into_par_iter()
            .map(|prefix| scan_chunk(&model, n, prefix, low_bits))
            .collect()
    };
    let chunk_bests =
        match threads.and_then(|t| rayon::ThreadPoolBuilder::new().num_threads(t).build().ok()) {
            Some(pool) => pool.install(scan),
            None => scan(),
        };
    let (_, code) = chunk_bests
        .into_iter()
        .reduce(|best, cand| if better(cand, best) { cand } else { best })
        .expect("at least one chunk");

    let assignment = decode_code(code, n);
    let energy = c
        .polynomial
        .evaluate(&assignment)
        .expect("assignment covers every variable");
    let solution = decode_and_report(c, &assignment)?;
    Ok(SolveResult {
        assignment,
        energy,
        solution,
        metadata: SolverMetadata {
            method: "brute_force".into(),
            seed: None,
            iterations: 1u64 << n,
            restarts: None,
            wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        },
    })
}

fn decode_code(code: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| code >> (n - 1 - i) & 1 == 1).collect()
}

/// Gray-code walk over the low bits with the prefix fixed.
fn scan_chunk(model: &QuboModel, n: usize, prefix: u64, low_bits: usize) -> Best {
    let base = prefix << low_bits;
    let mut x = decode_code(base, n);
    let mut fields = model.local_fields(&x);
    let mut energy = model.energy(&x);
    let mut best = (energy, base);
    let mut gray = 0u64;
    for t in 1..1u64 << low_bits {
        let b = t.trailing_zeros() as usize;
        let i = n - 1 - b;
        energy += model.flip_delta(&x, &fields, i);
        model.flip(&mut x, &mut fields, i);
        gray ^= 1 << b;
        let cand = (energy, base | gray);
        if better(cand, best) {
            best = cand;
        }
    }
    best
}
