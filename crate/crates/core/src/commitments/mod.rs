//! Commitment structures: a padded binary Merkle tree for per-block
//! transaction roots and a Merkle mountain range accumulator for chain
//! commitments.
//!
//! Domain separation, frozen for golden vectors:
//! - leaf nodes hash as `H(0x00 || leaf)`
//! - internal nodes hash as `H(0x01 || left || right)`
//! - MMR peak bagging hashes as `H(0x02 || peak || acc)`, and the final root
//!   commits the leaf count as `H(0x02 || count_be64 || acc)`

use thiserror::Error;

pub mod merkle;
pub mod mmr;

pub use merkle::{MerkleProof, MerkleTree, Side};
pub use mmr::{Mmr, MmrProof};

pub(crate) const TAG_LEAF: &[u8] = &[0x00];
pub(crate) const TAG_NODE: &[u8] = &[0x01];
pub(crate) const TAG_BAG: &[u8] = &[0x02];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CommitmentError {
    #[error("leaf list must not be empty")]
    EmptyLeaves,
    #[error("leaf index {index} out of range for {count} leaves")]
    IndexOutOfRange { index: u64, count: u64 },
    #[error("accumulator is empty")]
    EmptyAccumulator,
}
