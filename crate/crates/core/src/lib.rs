//! Exact computation of summed pairwise intersection sizes over intersecting
//! and cross-intersecting families of k-subsets of `[n]`: the functionals
//! themselves, their closed-form extremal values, the cyclic-order counting
//! machinery, and exhaustive or heuristic maximization.

pub mod bounds;
pub mod cyclic;
pub mod error;
pub mod report;
pub mod search;
pub mod setcore;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use setcore::{Family, FamilyJson, KSet, Permutation};
