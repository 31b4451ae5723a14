//! Full node: untrusted query service answering proof-of-burn requests.
//!
//! Given a burn hash the node locates the including block, picks the first
//! checkpoint after it, and assembles the two inclusion proofs a verifier
//! needs: header-in-window and transaction-in-block. Adversarial behavior
//! modes return corrupted or stale material, or nothing at all; the protocol
//! tolerates them because the client rotates nodes and the contract rejects
//! anything that does not verify.

use thiserror::Error;

use crate::chain::{
    checkpoint_window, covering_checkpoint, epoch_of_height, BlockHeader, ChainA, Height,
};
use crate::commitments::{merkle::MerkleProof, merkle::MerkleTree, mmr::MmrProof};
use crate::crypto::Digest;
use crate::encoding::{DecodeError, Decoder, Encoder};

/// Proof of burn: the checkpoint height whose window covers the including
/// block, that block's full header, the header's window inclusion proof, and
/// the burn's transaction inclusion proof.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoB {
    pub checkpoint_height: Height,
    pub header: BlockHeader,
    pub pi_b: MmrProof,
    pub pi_t: MerkleProof,
}

impl PoB {
    pub fn encode_into(&self, enc: &mut Encoder) {
        enc.u64(self.checkpoint_height);
        enc.bytes(&self.header.encode());
        self.pi_b.encode_into(enc);
        self.pi_t.encode_into(enc);
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut enc = Encoder::new();
        self.encode_into(&mut enc);
        enc.finish()
    }

    pub fn decode_from(dec: &mut Decoder<'_>) -> Result<Self, DecodeError> {
        let checkpoint_height = dec.u64()?;
        let header_bytes = dec.bytes()?;
        let mut hdec = Decoder::new(header_bytes);
        let header = BlockHeader::decode_from(&mut hdec)?;
        hdec.finish()?;
        let pi_b = MmrProof::decode_from(dec)?;
        let pi_t = MerkleProof::decode_from(dec)?;
        Ok(PoB {
            checkpoint_height,
            header,
            pi_b,
            pi_t,
        })
    }
}

/// Self-contained proof bundle for the stateless contract variant: the full
/// header of the including block, the covering checkpoint header, an optional
/// newer tip checkpoint with a checkpoint-chain proof linking the two, and
/// the epoch handoff chain that authenticates the committees from genesis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatelessPob {
    pub header_btx: BlockHeader,
    pub header_bcp: BlockHeader,
    pub tip: Option<BlockHeader>,
    pub handoff: Vec<BlockHeader>,
    pub pi_t: MerkleProof,
    pub pi_b: MmrProof,
    pub pi_cp: Option<MmrProof>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PobFailure {
    /// No response at all; the client treats it like a timeout.
    #[error("no response")]
    Silent,
    #[error("transaction not found on the chain")]
    NotFound,
    /// The covering checkpoint has not been produced yet; retry later.
    #[error("transaction not covered by a checkpoint yet")]
    NotYetCheckpointed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FullNodeBehavior {
    Honest,
    Silent,
    /// Responds with one corrupted digest in the proof material.
    WrongProof,
    /// Responds with a proof pinned to an older checkpoint than the covering
    /// one.
    StaleCheckpoint,
}

#[derive(Clone, Debug)]
pub struct FullNode {
    pub id: usize,
    pub behavior: FullNodeBehavior,
}

impl FullNode {
    pub fn new(id: usize, behavior: FullNodeBehavior) -> Self {
        FullNode { id, behavior }
    }

    /// Answer a proof-of-burn request for the stateful contract.
    pub fn handle_pob_request(&self, chain: &ChainA, burn_id: &Digest) -> Result<PoB, PobFailure> {
        match self.behavior {
            FullNodeBehavior::Silent => Err(PobFailure::Silent),
            FullNodeBehavior::Honest => honest_pob(chain, burn_id),
            FullNodeBehavior::WrongProof => {
                let mut pob = honest_pob(chain, burn_id)?;
                corrupt_pob(&mut pob);
                Ok(pob)
            }
            FullNodeBehavior::StaleCheckpoint => {
                let mut pob = honest_pob(chain, burn_id)?;
                let delta = chain.params.delta;
                if pob.checkpoint_height > delta {
                    pob.checkpoint_height -= delta;
                } else {
                    // No older checkpoint exists; degrade to a corrupt proof.
                    corrupt_pob(&mut pob);
                }
                Ok(pob)
            }
        }
    }

    /// Answer a proof request for the stateless contract variant.
    pub fn handle_stateless_request(
        &self,
        chain: &ChainA,
        burn_id: &Digest,
    ) -> Result<StatelessPob, PobFailure> {
        match self.behavior {
            FullNodeBehavior::Silent => Err(PobFailure::Silent),
            FullNodeBehavior::Honest => honest_stateless(chain, burn_id),
            FullNodeBehavior::WrongProof => {
                let mut pob = honest_stateless(chain, burn_id)?;
                corrupt_stateless(&mut pob);
                Ok(pob)
            }
            FullNodeBehavior::StaleCheckpoint => {
                let mut pob = honest_stateless(chain, burn_id)?;
                // Claim an older checkpoint as the covering one; the window
                // proof no longer matches it.
                let delta = chain.params.delta;
                let cp = pob.header_bcp.height;
                if cp > delta {
                    pob.header_bcp = chain
                        .header_at(cp - delta)
                        .expect("older checkpoint exists")
                        .clone();
                } else {
                    corrupt_stateless(&mut pob);
                }
                Ok(pob)
            }
        }
    }
}

fn honest_pob(chain: &ChainA, burn_id: &Digest) -> Result<PoB, PobFailure> {
    let (height, tx_index) = chain.find_tx(burn_id).ok_or(PobFailure::NotFound)?;
    let checkpoint = covering_checkpoint(chain.params.delta, height);
    match chain.latest_checkpoint_height() {
        Some(latest) if latest >= checkpoint => {}
        _ => return Err(PobFailure::NotYetCheckpointed),
    }

    let window = chain
        .window_mmr_at(checkpoint)
        .expect("checkpoint exists on chain");
    let (start, _) = checkpoint_window(chain.params.delta, checkpoint);
    let pi_b = window
        .prove(height - start)
        .expect("window position is in range");

    let header = chain.header_at(height).expect("block exists").clone();
    let txs = chain.block_txs(height).expect("block exists");
    let ids: Vec<Digest> = txs.iter().map(|t| t.hash_id()).collect();
    let tree = MerkleTree::build(&ids).expect("included tx implies nonempty block");
    let pi_t = tree.prove(tx_index as u64).expect("index is in range");

    Ok(PoB {
        checkpoint_height: checkpoint,
        header,
        pi_b,
        pi_t,
    })
}

fn honest_stateless(chain: &ChainA, burn_id: &Digest) -> Result<StatelessPob, PobFailure> {
    let pob = honest_pob(chain, burn_id)?;
    let delta = chain.params.delta;
    let bcp = chain
        .header_at(pob.checkpoint_height)
        .expect("covering checkpoint exists")
        .clone();

    // Anchor at the newest checkpoint; when that is the covering checkpoint
    // itself the chain-of-checkpoints proof is unnecessary.
    let tip_height = chain
        .latest_checkpoint_height()
        .expect("checked by honest_pob");
    let (tip, pi_cp) = if tip_height == bcp.height {
        (None, None)
    } else {
        let tip = chain
            .header_at(tip_height)
            .expect("tip checkpoint exists")
            .clone();
        let tip_seq = tip_height / delta;
        let cp_mmr = chain.cp_mmr_before(tip_seq);
        let proof = cp_mmr
            .prove(bcp.height / delta - 1)
            .expect("covering checkpoint precedes the tip");
        (Some(tip), Some(proof))
    };

    let anchor_height = tip.as_ref().map_or(bcp.height, |t| t.height);
    let handoff = chain.epoch_handoff(epoch_of_height(anchor_height, chain.params.epoch_length));

    Ok(StatelessPob {
        header_btx: pob.header,
        header_bcp: bcp,
        tip,
        handoff,
        pi_t: pob.pi_t,
        pi_b: pob.pi_b,
        pi_cp,
    })
}

fn flip_first_byte(d: &mut Digest) {
    let mut bytes = *d.as_bytes();
    bytes[0] ^= 0xFF;
    *d = Digest::from_bytes(bytes);
}

fn corrupt_pob(pob: &mut PoB) {
    if let Some((digest, _)) = pob.pi_t.siblings.first_mut() {
        flip_first_byte(digest);
    } else if let Some(digest) = pob.pi_b.mountain_path.first_mut() {
        flip_first_byte(digest);
    } else if let Some(digest) = pob.pi_b.peak_bag.first_mut() {
        flip_first_byte(digest);
    } else {
        flip_first_byte(&mut pob.header.parent);
    }
}

fn corrupt_stateless(pob: &mut StatelessPob) {
    if let Some((digest, _)) = pob.pi_t.siblings.first_mut() {
        flip_first_byte(digest);
    } else if let Some(digest) = pob.pi_b.mountain_path.first_mut() {
        flip_first_byte(digest);
    } else if let Some(digest) = pob.pi_b.peak_bag.first_mut() {
        flip_first_byte(digest);
    } else {
        flip_first_byte(&mut pob.header_btx.parent);
    }
}
