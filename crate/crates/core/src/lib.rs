//! Abstraction-based explanations of tabular reward functions.
//!
//! A reward over a finite set of items (grid cells, color chips) is turned
//! into a joint distribution `p(x, y)`, compressed by the deterministic
//! information bottleneck into clusters of items, and the resulting
//! abstractions are scored by complexity (bits kept about the items), reward
//! distortion (MSE of the per-cluster mean reward), and two proxies for a
//! reader's understanding: agreement of pairwise item rankings and the
//! quality of the path a reader would choose.

pub mod artifacts;
pub mod dib;
pub mod domains;
pub mod encoder;
pub mod error;
pub mod fmt;
pub mod frontier;
pub mod info;
pub mod joint;
pub mod metrics;
pub mod render;
pub mod suite;
pub mod tasks;

pub use dib::{solve_dib, DibParams, DibRun, Init};
pub use domains::{Domain, DomainKind, DomainSpec, Objective, RewardModel};
pub use encoder::Encoder;
pub use error::{Error, Result};
pub use frontier::{select_checkpoints, sweep_frontier, FrontierPoint, SweepConfig};
pub use joint::JointDistribution;
