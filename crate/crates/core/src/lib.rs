//! Compile pathfinding problems on weighted directed graphs into QUBO form.
//!
//! The pipeline runs input ([`io`]) → encoding ([`encodings`]) → constraint
//! lowering ([`constraints`]) → penalty assembly ([`assembly`]) →
//! quadratization ([`quadratize`]) → artifacts ([`outputs`]), with classical
//! [`solvers`] for checking results.

pub mod assembly;
pub mod constraints;
pub mod encodings;
pub mod error;
pub mod fmt_num;
pub mod graph;
pub mod io;
pub mod outputs;
pub mod pbpoly;
pub mod quadratize;
pub mod solvers;

pub use assembly::{compile, compile_with_cap, suggest_encoding, CompiledProblem, SchemeCount};
pub use constraints::Constraint;
pub use encodings::{EncodingSettings, Scheme, VarRole, VariableRegistry};
pub use error::{CompileError, EncodingError, GraphError, OutputError, PolyError, SolveError};
pub use graph::{Graph, Path};
pub use io::{
    parse_spec, parse_tsplib, serialize_spec, validate, Diagnostic, Objective, ProblemSpec,
    SpecError,
};
pub use outputs::{
    parse_artifact, serialize_artifact, to_ising, to_qubo_matrix, Artifact, ArtifactFormat,
    IsingModel, QuboArtifact,
};
pub use pbpoly::{Monomial, Polynomial};
pub use solvers::{
    brute_force, decode_and_report, simulated_annealing, AnnealSchedule, DecodedSolution,
    SolveResult,
};
