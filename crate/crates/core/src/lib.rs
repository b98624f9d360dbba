//! Nonnegative tensor-ring factorization with hypergraph manifold
//! regularization, plus a Tucker low-rank accelerated solver.

pub mod cli;
pub mod error;
pub mod eval;
pub mod hypergraph;
pub mod lra;
pub mod solver;
pub mod tensor;

pub use error::{Error, Result};
pub use hypergraph::{GraphMode, Hypergraph};
pub use lra::{hosvd_truncate, TuckerApprox};
pub use solver::{solve, solve_hgntr, solve_lra_hgntr, SolveResult, SolverConfig, Variant};
pub use tensor::{DenseTensor, Matrix, TRCores};
