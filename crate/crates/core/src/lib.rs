//! Kneser graphs, their random subgraphs, and the combinatorial machinery for
//! studying when the largest independent sets of a random subgraph are stars.

pub mod bitset;
pub mod combinatorics;
pub mod diversity;
pub mod error;
pub mod kneser;
pub mod process;
pub mod reductions;
pub mod shadow;
pub mod solver;
pub mod thresholds;
pub mod union_find;

pub use combinatorics::{Family, KSet, Params};
pub use error::{Error, Result};
pub use kneser::KneserGraph;
