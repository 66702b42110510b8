//! Lowest eigenvalue of a real symmetric matrix by iterative QUBO minimization.
//!
//! Each coefficient of the trial vector is encoded in `K` bits around a moving center
//! with a resolution that halves every two Repeats. A Repeat picks a few coefficients,
//! builds the QUBO of `aᵀ(H − λ)a` restricted to their bits, samples it with simulated
//! annealing (optionally through a minor embedding on a sparse hardware graph), and keeps
//! the candidate with the lowest Rayleigh quotient. λ then follows the best energy.
//!
//! ```
//! use qae_core::{exact_diagonalize, generate_ci_like_matrix, run_qae, RunConfig};
//!
//! let h = generate_ci_like_matrix(4, 1.0, 0.2, 7).unwrap();
//! let mut cfg = RunConfig::for_dim(4);
//! cfg.reads_per_anneal = 50;
//! cfg.sweeps = 200;
//! let result = run_qae(&h, &cfg).unwrap();
//! let exact = exact_diagonalize(&h).unwrap().lowest();
//! assert!(result.final_energy >= exact - 1e-12);
//! ```

// `!(x > 0.0)` style checks are kept on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod decompose;
pub mod eigen;
pub mod embedding;
pub mod encoding;
mod error;
pub mod io;
pub mod matrix;
pub mod qubo;
pub mod sampler;
pub mod topology;
pub mod trace;
pub mod workflow;

pub use analysis::{delta_percent, fine_structure_splitting, lambda_scan, mean_std, median, ScanPoint};
pub use config::{LambdaUpdate, RunConfig, MAX_SUBPROBLEM_VARS};
pub use decompose::{
    default_priority, extract_subqubo, priority_list, select_subspace, Decomposer, PriorityList,
};
pub use eigen::{exact_diagonalize, EigenResult, MAX_JACOBI_DIM};
pub use embedding::{chain_strength, embed, embed_apply, unembed, Embedding};
pub use encoding::{
    bit_weight, build_qubo, decode_coefficient, decode_sample, energy_functional,
    scale_coefficients, sigma_for_iteration, CoefficientVector, EncodingState,
};
pub use error::{QaeError, Result};
pub use io::{
    format_matrix, format_result, load_matrix, parse_matrix, parse_result, save_matrix,
    write_result,
};
pub use matrix::{generate_ci_like_matrix, SymmetricMatrix};
pub use qubo::{qubo_energy, Assignment, QuboModel};
pub use sampler::{
    brute_force, simulated_anneal, steepest_descent, AnnealSchedule, BruteForce, Sample,
    SampleSet, Sampler, SamplerKind, SimulatedAnnealer,
};
pub use topology::{build_topology, TopologyGraph, TopologyKind};
pub use trace::{read_trace, write_trace, ConvergenceTrace, TraceRecord};
pub use workflow::{rayleigh_quotient, run_qae, FittedAnnealer, QaeSolver, ResultRecord};
