//! Load planning for double-stack railcars: instance generation, an exact
//! lexicographic solver, solution summaries, and fast learned predictors of
//! those summaries from the counts available before container weights are
//! known.
//!
//! The typical flow is
//! [`sampling`] → [`solver`] → [`summarize`] → [`neural`] / [`heuristics`] → [`eval`].

pub mod cli;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod fleet;
pub mod heuristics;
pub mod manifest;
pub mod neural;
pub mod pipeline;
pub mod rng;
pub mod sampling;
pub mod solver;
pub mod summarize;

pub use error::{Error, Result};
pub use fleet::{ContainerLength, Fleet, LoadingPattern, PlatformType, RailcarType};
pub use sampling::{DataClass, FullInstance, InstanceSketch};
pub use solver::{solve_lpp, DetailedSolution, LexObjective, SolverConfig};
pub use summarize::Summary;
