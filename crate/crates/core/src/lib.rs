//! RiffleScrambler: a salt-dependent memory-hard password hash built on
//! time-reversed riffle shuffles, plus tools for checking its graphs.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod graph;
pub mod hasher;
pub mod hashfn;
pub mod permute;
pub mod trajectory;

pub use error::{Error, Result};
pub use graph::{gen_graph, NodeId, RiffleGraph};
pub use hasher::{evaluate, hash_password, verify_password, HashParams, PhcString};
pub use hashfn::{Digest, HashFunction, Sha256Hash};
pub use permute::{inverse_riffle_shuffle, riffle_permutation, BitWord, Permutation};
pub use trajectory::{trace_trajectories, BitMatrix};
