//! Cross-chain token bridge between a BFT source chain and a contract-hosting
//! destination chain, packaged as a library plus a deterministic simulation
//! harness.
//!
//! The source chain finalizes blocks with quorum signatures and periodically
//! emits checkpoint headers carrying a Merkle mountain range root over the
//! headers since the previous checkpoint. A relay forwards checkpoint headers
//! to a bridge contract on the destination chain; clients burn tokens on the
//! source chain, obtain a proof of burn from an untrusted full node, and mint
//! the same amount on the destination chain once the contract verifies the
//! proof against a synced checkpoint. A stateless contract variant verifies
//! self-contained proofs anchored in a committee handoff chain instead of
//! relayed state.
//!
//! Modules map onto the moving parts:
//!
//! - [`crypto`] — hashing, deterministic key pairs, quorum signatures
//! - [`commitments`] — Merkle trees and the MMR accumulator with proofs
//! - [`chain`] — the source chain model and the destination chain's tx log
//! - [`fullnode`] — proof-of-burn service over the source chain
//! - [`relay`] — checkpoint submission and rank-staggered failover
//! - [`contract`] — the bridge contract state machine and gas metering
//! - [`client`] — transfer sessions driving burn, prove, and mint
//! - [`sim`] — scenario files, the tick loop, traces, metrics, verdicts

pub mod chain;
pub mod client;
pub mod commitments;
pub mod contract;
pub mod cost;
pub mod crypto;
pub mod encoding;
pub mod fullnode;
pub mod prf;
pub mod relay;
pub mod sim;

pub use crypto::{Digest, PublicKey, Threshold};
