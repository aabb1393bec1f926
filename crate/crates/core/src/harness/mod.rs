//! Problem suite, reference oracles, configuration and persistence.

pub mod bench;
pub mod checks;
pub mod config;
pub mod finite_diff;
pub mod plot;
pub mod problems;
pub mod trace_io;

pub use problems::{build_problem, ProblemDims, ProblemInstance};
