//! First-order Nash equilibrium search for smooth nonconvex-concave min-max problems.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bregman;
pub mod cli;
pub mod error;
pub mod fgm;
pub mod geometry;
pub mod harness;
pub mod moreau;
pub mod problem;
pub mod saddle;
pub mod stationarity;

pub use error::{Error, Result};
pub use geometry::{prox_map, FeasibleSet, VectorPoint};
pub use problem::{CallCounts, ProblemConstants, ProblemSpec, SaddleOracle};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeDoctests;
