//! Classical solvers for compiled problems and the reports they produce.

mod anneal;
mod brute;
mod report;

use serde::{Deserialize, Serialize};

use crate::pbpoly::Polynomial;

pub use anneal::{simulated_annealing, AnnealSchedule};
pub use brute::{brute_force, DEFAULT_BRUTE_FORCE_CAP};
pub use report::{
    check_constraint, decode_and_report, ConstraintReport, DecodedPath, DecodedSolution,
};

/// Sparse view of a quadratic polynomial tuned for single-bit flips.
#[derive(Clone, Debug)]
pub struct QuboModel {
    pub linear: Vec<f64>,
    /// Symmetric neighbour lists: `(j, q_ij)` appears under both `i` and `j`.
    pub neighbors: Vec<Vec<(usize, f64)>>,
    pub offset: f64,
}

impl QuboModel {
    /// Builds the model over `n` variables; `p` must have degree <= 2.
    pub fn new(p: &Polynomial, n: usize) -> Self {
        let mut linear = vec![0.0; n];
        let mut neighbors = vec![Vec::new(); n];
        for (m, c) in p.terms() {
            match *m.vars() {
                [i] => linear[i] += c,
                [i, j] => {
                    neighbors[i].push((j, c));
                    neighbors[j].push((i, c));
                }
                [] => {}
                _ => panic!("QuboModel needs a quadratic polynomial"),
            }
        }
        QuboModel {
            linear,
            neighbors,
            offset: p.constant_term(),
        }
    }

    pub fn n(&self) -> usize {
        self.linear.len()
    }

    pub fn energy(&self, x: &[bool]) -> f64 {
        let mut e = self.offset;
        for (i, &xi) in x.iter().enumerate() {
            if xi {
                e += self.linear[i];
                e += self.neighbors[i]
                    .iter()
                    .filter(|&&(j, _)| j > i && x[j])
                    .map(|&(_, q)| q)
                    .sum::<f64>();
            }
        }
        e
    }

    /// `linear_i + Σ_j q_ij x_j` for every `i`.
    pub fn local_fields(&self, x: &[bool]) -> Vec<f64> {
        (0..self.n())
            .map(|i| {
                self.linear[i]
                    + self.neighbors[i]
                        .iter()
                        .filter(|&&(j, _)| x[j])
                        .map(|&(_, q)| q)
                        .sum::<f64>()
            })
            .collect()
    }

    /// Energy change from flipping bit `i`.
    pub fn flip_delta(&self, x: &[bool], fields: &[f64], i: usize) -> f64 {
        if x[i] {
            -fields[i]
        } else {
            fields[i]
        }
    }

    /// Flips bit `i` and updates the neighbours' fields.
    pub fn flip(&self, x: &mut [bool], fields: &mut [f64], i: usize) {
        x[i] = !x[i];
        let sign = if x[i] { 1.0 } else { -1.0 };
        for &(j, q) in &self.neighbors[i] {
            fields[j] += sign * q;
        }
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        let lin = self.linear.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.neighbors
            .iter()
            .flatten()
            .fold(lin, |m, &(_, q)| m.max(q.abs()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverMetadata {
    pub method: String,
    pub seed: Option<u64>,
    /// Assignments scanned (brute force) or flips proposed (annealing).
    pub iterations: u64,
    pub restarts: Option<usize>,
    pub wall_time_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    #[serde(with = "bitstring")]
    pub assignment: Vec<bool>,
    /// Cost of `assignment`, offset included.
    pub energy: f64,
    pub solution: DecodedSolution,
    pub metadata: SolverMetadata,
}

impl SolveResult {
    /// Equality ignoring wall time.
    pub fn same_outcome(&self, other: &SolveResult) -> bool {
        let mut a = self.clone();
        a.metadata.wall_time_ms = other.metadata.wall_time_ms;
        a == *other
    }
}

/// Assignments travel as strings of `0`/`1`, variable 0 first.
mod bitstring {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bits: &[bool], s: S) -> Result<S::Ok, S::Error> {
        let text: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        s.serialize_str(&text)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        let text = String::deserialize(d)?;
        text.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(de::Error::custom(format!("invalid bit `{other}`"))),
            })
            .collect()
    }
}
