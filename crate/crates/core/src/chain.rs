//! Source chain model and the destination chain's ordered transaction log.
//!
//! The source chain produces one quorum-signed block per call. Every `delta`
//! blocks the header carries an MMR root over the headers since the previous
//! checkpoint, and a second MMR root over all previous checkpoint headers.
//! Epochs are `epoch_length` blocks long (`delta` divides `epoch_length`, so
//! every epoch block is a checkpoint block); the last block of an epoch
//! announces the next committee, selected by a seeded pseudorandom draw from
//! the validator pool.
//!
//! The destination chain is modeled as a queue in front of the bridge
//! contract: a transaction submitted at tick `t` executes at tick `t + 1`,
//! one at a time, in submission order.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::commitments::{merkle::MerkleTree, mmr::Mmr, CommitmentError};
use crate::contract::{BridgeTx, ContractState, GasLedger, GasRow, RejectReason};
use crate::cost::{GasCharge, GasWeights};
use crate::crypto::{
    aggregate, hash_parts, keygen, sign, Digest, KeyPair, PublicKey, QuorumSignature, Threshold,
};
use crate::encoding::{DecodeError, Decoder, Encoder};
use crate::prf::{pick_distinct, HashStream};

pub type Height = u64;
pub type EpochId = u64;
pub type Amount = u64;
pub type Tick = u64;

pub const ADDRESS_LEN: usize = 20;

const TAG_ADDR: &[u8] = b"bridge.v1.addr";
const TAG_BURN: &[u8] = b"bridge.v1.burn";
const TAG_XFER: &[u8] = b"bridge.v1.xfer";
const TAG_HDR: &[u8] = b"bridge.v1.hdr";
const TAG_HDR_SIGN: &[u8] = b"bridge.v1.hdr-sign";
const TAG_COMMITTEE: &[u8] = b"bridge.v1.committee";
const TAG_VALIDATOR: &[u8] = b"bridge.v1.validator";
const TAG_ROTATION: &[u8] = b"bridge.v1.rotation";

/// Wallet address, valid on both chains. The all-zero address is the burn
/// sink and owns nothing.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Address([u8; ADDRESS_LEN]);

impl Address {
    pub const NULL: Address = Address([0u8; ADDRESS_LEN]);

    /// Deterministic address for a human-readable label.
    pub fn from_label(label: &str) -> Self {
        let digest = hash_parts(&[TAG_ADDR, label.as_bytes()]);
        let mut bytes = [0u8; ADDRESS_LEN];
        bytes.copy_from_slice(&digest.as_bytes()[..ADDRESS_LEN]);
        Address(bytes)
    }

    pub fn from_bytes(bytes: [u8; ADDRESS_LEN]) -> Self {
        Address(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; ADDRESS_LEN] {
        &self.0
    }

    pub fn is_null(&self) -> bool {
        *self == Address::NULL
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Address({}..)", &hex::encode(self.0)[..8])
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChainError {
    #[error("invalid chain parameters: {0}")]
    InvalidParams(String),
    #[error("transaction amount must be positive")]
    ZeroAmount,
    #[error("burn target must be the null address")]
    BurnTargetNotNull,
    #[error("{address} holds {available} but the transaction needs {needed}")]
    InsufficientBalance {
        address: Address,
        needed: Amount,
        available: Amount,
    },
    #[error("transaction {0} already included")]
    DuplicateTransaction(Digest),
    #[error("no committee registered for epoch {0}")]
    UnknownCommittee(EpochId),
    #[error(transparent)]
    Commitment(#[from] CommitmentError),
}

/// Burn: destroy `amount` tokens by sending them to the null address.
/// The transaction's hash is its identity across both chains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BurnTx {
    pub sender: Address,
    pub amount: Amount,
    pub target: Address,
    pub nonce: u64,
}

impl BurnTx {
    pub fn new(sender: Address, amount: Amount, nonce: u64) -> Self {
        BurnTx {
            sender,
            amount,
            target: Address::NULL,
            nonce,
        }
    }

    pub fn encode_into(&self, enc: &mut Encoder) {
        enc.raw(self.sender.as_bytes());
        enc.u64(self.amount);
        enc.raw(self.target.as_bytes());
        enc.u64(self.nonce);
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut enc = Encoder::new();
        self.encode_into(&mut enc);
        enc.finish()
    }

    pub fn decode_from(dec: &mut Decoder<'_>) -> Result<Self, DecodeError> {
        Ok(BurnTx {
            sender: Address::from_bytes(dec.array::<ADDRESS_LEN>()?),
            amount: dec.u64()?,
            target: Address::from_bytes(dec.array::<ADDRESS_LEN>()?),
            nonce: dec.u64()?,
        })
    }

    pub fn hash_id(&self) -> Digest {
        hash_parts(&[TAG_BURN, &self.encode()])
    }
}

/// Ordinary value transfer, used as block filler in scenarios.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferTx {
    pub from: Address,
    pub to: Address,
    pub amount: Amount,
    pub nonce: u64,
}

impl TransferTx {
    pub fn encode(&self) -> Vec<u8> {
        let mut enc = Encoder::new();
        enc.raw(self.from.as_bytes());
        enc.raw(self.to.as_bytes());
        enc.u64(self.amount);
        enc.u64(self.nonce);
        enc.finish()
    }

    pub fn hash_id(&self) -> Digest {
        hash_parts(&[TAG_XFER, &self.encode()])
    }
}

/// A transaction on the source chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SourceTx {
    Burn(BurnTx),
    Transfer(TransferTx),
}

impl SourceTx {
    pub fn hash_id(&self) -> Digest {
        match self {
            SourceTx::Burn(tx) => tx.hash_id(),
            SourceTx::Transfer(tx) => tx.hash_id(),
        }
    }
}

/// Header of a source chain block.
///
/// `mmr_root` is present exactly on checkpoint blocks (positive heights that
/// are multiples of `delta`) and commits the headers since the previous
/// checkpoint. `cp_mmr_root` additionally commits all earlier checkpoint
/// headers (absent on the first checkpoint, which has none to commit).
/// `next_committee` is present exactly on the last block of each epoch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockHeader {
    pub height: Height,
    pub epoch: EpochId,
    pub parent: Digest,
    pub tx_root: Digest,
    pub qsig: QuorumSignature,
    pub pks: Vec<PublicKey>,
    pub mmr_root: Option<Digest>,
    pub cp_mmr_root: Option<Digest>,
    pub next_committee: Option<Vec<PublicKey>>,
}

fn encode_pk_list(enc: &mut Encoder, pks: &[PublicKey]) {
    enc.u32(pks.len() as u32);
    for pk in pks {
        enc.raw(pk.as_bytes());
    }
}

fn decode_pk_list(dec: &mut Decoder<'_>) -> Result<Vec<PublicKey>, DecodeError> {
    let n = dec.u32()? as usize;
    if n > 1 << 16 {
        return Err(DecodeError::Invalid("public key list length"));
    }
    let mut pks = Vec::with_capacity(n);
    for _ in 0..n {
        pks.push(PublicKey::from_bytes(dec.array::<32>()?));
    }
    Ok(pks)
}

fn encode_opt_digest(enc: &mut Encoder, d: &Option<Digest>) {
    match d {
        None => enc.u8(0),
        Some(d) => enc.u8(1).raw(d.as_bytes()),
    };
}

fn decode_opt_digest(dec: &mut Decoder<'_>) -> Result<Option<Digest>, DecodeError> {
    match dec.u8()? {
        0 => Ok(None),
        1 => Ok(Some(Digest::from_bytes(dec.array::<32>()?))),
        _ => Err(DecodeError::Invalid("presence tag")),
    }
}

impl BlockHeader {
    fn encode_with(&self, qsig: &QuorumSignature) -> Vec<u8> {
        let mut enc = Encoder::new();
        enc.u64(self.height);
        enc.u64(self.epoch);
        enc.raw(self.parent.as_bytes());
        enc.raw(self.tx_root.as_bytes());
        qsig.encode_into(&mut enc);
        encode_pk_list(&mut enc, &self.pks);
        encode_opt_digest(&mut enc, &self.mmr_root);
        encode_opt_digest(&mut enc, &self.cp_mmr_root);
        match &self.next_committee {
            None => {
                enc.u8(0);
            }
            Some(pks) => {
                enc.u8(1);
                encode_pk_list(&mut enc, pks);
            }
        }
        enc.finish()
    }

    pub fn encode(&self) -> Vec<u8> {
        self.encode_with(&self.qsig)
    }

    pub fn decode_from(dec: &mut Decoder<'_>) -> Result<Self, DecodeError> {
        let height = dec.u64()?;
        let epoch = dec.u64()?;
        let parent = Digest::from_bytes(dec.array::<32>()?);
        let tx_root = Digest::from_bytes(dec.array::<32>()?);
        let qsig = QuorumSignature::decode_from(dec)?;
        let pks = decode_pk_list(dec)?;
        let mmr_root = decode_opt_digest(dec)?;
        let cp_mmr_root = decode_opt_digest(dec)?;
        let next_committee = match dec.u8()? {
            0 => None,
            1 => Some(decode_pk_list(dec)?),
            _ => return Err(DecodeError::Invalid("presence tag")),
        };
        Ok(BlockHeader {
            height,
            epoch,
            parent,
            tx_root,
            qsig,
            pks,
            mmr_root,
            cp_mmr_root,
            next_committee,
        })
    }

    /// What the committee signs: the header with its signature field zeroed
    /// (a signature cannot cover itself).
    pub fn signing_payload(&self) -> Digest {
        let zeroed = QuorumSignature::zeroed(self.pks.len());
        hash_parts(&[TAG_HDR_SIGN, &self.encode_with(&zeroed)])
    }

    /// Identity of the header as committed by the chain MMRs.
    pub fn hash_id(&self) -> Digest {
        hash_parts(&[TAG_HDR, &self.encode()])
    }

    /// Checkpoint sequence number claimed by this header, if it has the
    /// shape of a checkpoint (positive multiple of `delta`, MMR root set).
    pub fn checkpoint_sequence(&self, delta: u64) -> Option<u64> {
        if self.height > 0 && self.height % delta == 0 && self.mmr_root.is_some() {
            Some(self.height / delta)
        } else {
            None
        }
    }
}

/// Commitment to a committee: the digest of the canonical key list encoding.
pub fn committee_commitment(pks: &[PublicKey]) -> Digest {
    let mut enc = Encoder::new();
    encode_pk_list(&mut enc, pks);
    hash_parts(&[TAG_COMMITTEE, &enc.finish()])
}

/// Epoch of a block height. Genesis sits in epoch 0; epoch `e` covers
/// heights `(e * epoch_length, (e + 1) * epoch_length]`, so the last block
/// of an epoch lands on a multiple of `epoch_length` and is always a
/// checkpoint.
pub fn epoch_of_height(height: Height, epoch_length: u64) -> EpochId {
    if height == 0 {
        0
    } else {
        (height - 1) / epoch_length
    }
}

/// Height of the first checkpoint block strictly after `height`; the
/// checkpoint whose window commits the header at `height`.
pub fn covering_checkpoint(delta: u64, height: Height) -> Height {
    (height / delta + 1) * delta
}

/// Span `(start, leaf_count)` of header heights committed by the checkpoint
/// at `checkpoint`: `[checkpoint - delta, checkpoint)`, except the first
/// window which starts at height 1 because genesis is the trust anchor and
/// is never committed.
pub fn checkpoint_window(delta: u64, checkpoint: Height) -> (Height, u64) {
    let start = if checkpoint == delta { 1 } else { checkpoint - delta };
    (start, checkpoint - start)
}

#[derive(Clone, Debug)]
pub struct ChainParams {
    pub delta: u64,
    pub epoch_length: u64,
    pub committee_size: usize,
    pub validator_pool_size: usize,
    pub threshold: Threshold,
    pub confirmation_depth: u64,
}

impl ChainParams {
    pub fn validate(&self) -> Result<(), ChainError> {
        if self.delta == 0 {
            return Err(ChainError::InvalidParams("delta must be positive".into()));
        }
        if self.epoch_length == 0 || self.epoch_length % self.delta != 0 {
            return Err(ChainError::InvalidParams(format!(
                "epoch length {} must be a positive multiple of delta {}",
                self.epoch_length, self.delta
            )));
        }
        if self.committee_size == 0 {
            return Err(ChainError::InvalidParams(
                "committee must not be empty".into(),
            ));
        }
        if self.validator_pool_size < self.committee_size {
            return Err(ChainError::InvalidParams(format!(
                "validator pool {} smaller than committee {}",
                self.validator_pool_size, self.committee_size
            )));
        }
        Ok(())
    }
}

/// The source chain. Headers, blocks, and committed MMR state are append
/// only; balances follow an account model where burns debit the sender and
/// credit nothing.
pub struct ChainA {
    pub params: ChainParams,
    seed: u64,
    validator_pool: Vec<KeyPair>,
    committees: Vec<Vec<KeyPair>>,
    headers: Vec<BlockHeader>,
    blocks: Vec<Vec<SourceTx>>,
    balances: BTreeMap<Address, Amount>,
    tx_locations: BTreeMap<Digest, (Height, u32)>,
    window: Mmr,
    cp_chain: Mmr,
    mempool: Vec<SourceTx>,
    pending_debits: BTreeMap<Address, Amount>,
}

impl ChainA {
    pub fn init(
        params: ChainParams,
        seed: u64,
        genesis_balances: &[(Address, Amount)],
    ) -> Result<Self, ChainError> {
        params.validate()?;
        let validator_pool: Vec<KeyPair> = (0..params.validator_pool_size)
            .map(|i| {
                let seed_digest =
                    hash_parts(&[TAG_VALIDATOR, &seed.to_be_bytes(), &(i as u64).to_be_bytes()]);
                keygen(seed_digest.as_bytes())
            })
            .collect();
        let genesis_committee = rotate(seed, &validator_pool, params.committee_size, 0);

        let mut balances = BTreeMap::new();
        for (addr, amount) in genesis_balances {
            *balances.entry(*addr).or_insert(0) += amount;
        }

        let mut chain = ChainA {
            params,
            seed,
            validator_pool,
            committees: vec![genesis_committee],
            headers: Vec::new(),
            blocks: Vec::new(),
            balances,
            tx_locations: BTreeMap::new(),
            window: Mmr::new(),
            cp_chain: Mmr::new(),
            mempool: Vec::new(),
            pending_debits: BTreeMap::new(),
        };

        let genesis = chain.build_header(0, Digest::ZERO, Digest::ZERO, None, None, None)?;
        chain.headers.push(genesis);
        chain.blocks.push(Vec::new());
        Ok(chain)
    }

    fn build_header(
        &self,
        height: Height,
        parent: Digest,
        tx_root: Digest,
        mmr_root: Option<Digest>,
        cp_mmr_root: Option<Digest>,
        next_committee: Option<Vec<PublicKey>>,
    ) -> Result<BlockHeader, ChainError> {
        let epoch = epoch_of_height(height, self.params.epoch_length);
        let committee = self
            .committees
            .get(epoch as usize)
            .ok_or(ChainError::UnknownCommittee(epoch))?;
        let mut header = BlockHeader {
            height,
            epoch,
            parent,
            tx_root,
            qsig: QuorumSignature::zeroed(committee.len()),
            pks: committee.iter().map(|kp| kp.public).collect(),
            mmr_root,
            cp_mmr_root,
            next_committee,
        };
        header.qsig = sign_with(committee, &header);
        Ok(header)
    }

    /// Validate and queue a transaction for the next block.
    pub fn submit_tx(&mut self, tx: SourceTx) -> Result<Digest, ChainError> {
        let id = tx.hash_id();
        if self.tx_locations.contains_key(&id) || self.mempool.iter().any(|t| t.hash_id() == id) {
            return Err(ChainError::DuplicateTransaction(id));
        }
        let (debtor, amount) = match &tx {
            SourceTx::Burn(b) => {
                if b.amount == 0 {
                    return Err(ChainError::ZeroAmount);
                }
                if !b.target.is_null() {
                    return Err(ChainError::BurnTargetNotNull);
                }
                (b.sender, b.amount)
            }
            SourceTx::Transfer(t) => {
                if t.amount == 0 {
                    return Err(ChainError::ZeroAmount);
                }
                (t.from, t.amount)
            }
        };
        let pending = self.pending_debits.get(&debtor).copied().unwrap_or(0);
        let available = self.balance(&debtor).saturating_sub(pending);
        if available < amount {
            return Err(ChainError::InsufficientBalance {
                address: debtor,
                needed: amount,
                available,
            });
        }
        *self.pending_debits.entry(debtor).or_insert(0) += amount;
        self.mempool.push(tx);
        Ok(id)
    }

    /// Produce the next block from the queued transactions.
    pub fn produce_next(&mut self) -> Result<&BlockHeader, ChainError> {
        let txs = std::mem::take(&mut self.mempool);
        self.pending_debits.clear();
        self.produce_block(txs)
    }

    /// Produce the next block with an explicit transaction list.
    pub fn produce_block(&mut self, txs: Vec<SourceTx>) -> Result<&BlockHeader, ChainError> {
        // Validate the whole batch against a debit-only scratch ledger
        // before touching real balances.
        let mut scratch: BTreeMap<Address, Amount> = BTreeMap::new();
        for tx in &txs {
            let id = tx.hash_id();
            if self.tx_locations.contains_key(&id) {
                return Err(ChainError::DuplicateTransaction(id));
            }
            let (debtor, amount) = match tx {
                SourceTx::Burn(b) => {
                    if b.amount == 0 {
                        return Err(ChainError::ZeroAmount);
                    }
                    if !b.target.is_null() {
                        return Err(ChainError::BurnTargetNotNull);
                    }
                    (b.sender, b.amount)
                }
                SourceTx::Transfer(t) => {
                    if t.amount == 0 {
                        return Err(ChainError::ZeroAmount);
                    }
                    (t.from, t.amount)
                }
            };
            let spent = scratch.entry(debtor).or_insert(0);
            let available = self.balance(&debtor).saturating_sub(*spent);
            if available < amount {
                return Err(ChainError::InsufficientBalance {
                    address: debtor,
                    needed: amount,
                    available,
                });
            }
            *spent += amount;
        }

        for tx in &txs {
            match tx {
                SourceTx::Burn(b) => {
                    *self.balances.entry(b.sender).or_insert(0) -= b.amount;
                }
                SourceTx::Transfer(t) => {
                    *self.balances.entry(t.from).or_insert(0) -= t.amount;
                    *self.balances.entry(t.to).or_insert(0) += t.amount;
                }
            }
        }

        let height = self.headers.len() as Height;
        let parent = self.headers.last().expect("genesis exists").hash_id();
        let tx_root = if txs.is_empty() {
            Digest::ZERO
        } else {
            let ids: Vec<Digest> = txs.iter().map(|t| t.hash_id()).collect();
            MerkleTree::build(&ids)?.root()
        };

        let is_checkpoint = height % self.params.delta == 0;
        let mmr_root = is_checkpoint.then(|| self.window.root_or_empty());
        let cp_mmr_root = if is_checkpoint && self.cp_chain.leaf_count() > 0 {
            Some(self.cp_chain.root()?)
        } else {
            None
        };

        let is_epoch_block = height % self.params.epoch_length == 0;
        let next_committee = if is_epoch_block {
            let epoch = epoch_of_height(height, self.params.epoch_length);
            let next = rotate(
                self.seed,
                &self.validator_pool,
                self.params.committee_size,
                epoch + 1,
            );
            let pks: Vec<PublicKey> = next.iter().map(|kp| kp.public).collect();
            debug_assert_eq!(self.committees.len() as u64, epoch + 1);
            self.committees.push(next);
            Some(pks)
        } else {
            None
        };

        let header =
            self.build_header(height, parent, tx_root, mmr_root, cp_mmr_root, next_committee)?;
        let header_id = header.hash_id();

        for (idx, tx) in txs.iter().enumerate() {
            self.tx_locations.insert(tx.hash_id(), (height, idx as u32));
        }
        self.headers.push(header);
        self.blocks.push(txs);

        if is_checkpoint {
            // The checkpoint's own header opens the next window.
            self.window = Mmr::new();
            self.cp_chain.push(&header_id);
        }
        self.window.push(&header_id);

        Ok(self.headers.last().expect("just pushed"))
    }

    pub fn tip_height(&self) -> Height {
        (self.headers.len() - 1) as Height
    }

    pub fn header_at(&self, height: Height) -> Option<&BlockHeader> {
        self.headers.get(height as usize)
    }

    pub fn headers(&self) -> &[BlockHeader] {
        &self.headers
    }

    pub fn block_txs(&self, height: Height) -> Option<&[SourceTx]> {
        self.blocks.get(height as usize).map(|b| b.as_slice())
    }

    /// Locate the transaction whose hash is `id`.
    pub fn find_tx(&self, id: &Digest) -> Option<(Height, u32)> {
        self.tx_locations.get(id).copied()
    }

    pub fn tx_by_id(&self, id: &Digest) -> Option<&SourceTx> {
        let (height, idx) = self.find_tx(id)?;
        self.blocks.get(height as usize)?.get(idx as usize)
    }

    /// Finality check: enough blocks on top of `height`. Depth 0 means a
    /// block is final the moment it is included.
    pub fn confirmed(&self, height: Height) -> bool {
        self.tip_height() >= height && self.tip_height() - height >= self.params.confirmation_depth
    }

    pub fn latest_checkpoint_height(&self) -> Option<Height> {
        let cp = self.tip_height() / self.params.delta * self.params.delta;
        (cp > 0).then_some(cp)
    }

    pub fn balance(&self, addr: &Address) -> Amount {
        self.balances.get(addr).copied().unwrap_or(0)
    }

    pub fn total_burned(&self) -> Amount {
        self.blocks
            .iter()
            .flatten()
            .filter_map(|tx| match tx {
                SourceTx::Burn(b) => Some(b.amount),
                SourceTx::Transfer(_) => None,
            })
            .sum()
    }

    pub fn committee_keys(&self, epoch: EpochId) -> Option<&[KeyPair]> {
        self.committees.get(epoch as usize).map(|c| c.as_slice())
    }

    pub fn committee_pks(&self, epoch: EpochId) -> Option<Vec<PublicKey>> {
        self.committee_keys(epoch)
            .map(|c| c.iter().map(|kp| kp.public).collect())
    }

    pub fn genesis_committee_pks(&self) -> Vec<PublicKey> {
        self.committee_pks(0).expect("genesis committee")
    }

    /// Rebuild the window MMR a checkpoint committed, for proof generation.
    pub fn window_mmr_at(&self, checkpoint: Height) -> Option<Mmr> {
        if checkpoint == 0
            || checkpoint % self.params.delta != 0
            || checkpoint > self.tip_height()
        {
            return None;
        }
        let (start, count) = checkpoint_window(self.params.delta, checkpoint);
        let mut mmr = Mmr::new();
        for h in start..start + count {
            mmr.push(&self.headers[h as usize].hash_id());
        }
        Some(mmr)
    }

    /// Rebuild the checkpoint-chain MMR as committed by the checkpoint with
    /// sequence `tip_seq` (covering sequences `1..tip_seq`).
    pub fn cp_mmr_before(&self, tip_seq: u64) -> Mmr {
        let mut mmr = Mmr::new();
        for seq in 1..tip_seq {
            let h = seq * self.params.delta;
            mmr.push(&self.headers[h as usize].hash_id());
        }
        mmr
    }

    /// Epoch block headers (carriers of `next_committee`) for epochs
    /// `0..target_epoch`, in order. The committee handoff chain a stateless
    /// verifier walks from genesis.
    pub fn epoch_handoff(&self, target_epoch: EpochId) -> Vec<BlockHeader> {
        (0..target_epoch)
            .map(|e| self.headers[((e + 1) * self.params.epoch_length) as usize].clone())
            .collect()
    }

    /// Re-sign an (arbitrarily modified) header with the real committee of
    /// its epoch. Models a colluding quorum; exists only so adversarial
    /// scenarios can produce well-signed but wrong headers.
    pub fn resign_header(&self, mut header: BlockHeader) -> BlockHeader {
        let committee = &self.committees[header.epoch as usize];
        header.qsig = sign_with(committee, &header);
        header
    }
}

fn sign_with(committee: &[KeyPair], header: &BlockHeader) -> QuorumSignature {
    let payload = header.signing_payload();
    let sigs: Vec<_> = committee
        .iter()
        .enumerate()
        .map(|(i, kp)| {
            (
                i,
                sign(&kp.secret, payload.as_bytes()).expect("payload is nonempty"),
            )
        })
        .collect();
    aggregate(&sigs, committee.len()).expect("indices are distinct and in range")
}

fn rotate(seed: u64, pool: &[KeyPair], committee_size: usize, epoch: EpochId) -> Vec<KeyPair> {
    let mut stream = HashStream::seeded(TAG_ROTATION, seed, epoch);
    pick_distinct(&mut stream, pool.len(), committee_size)
        .into_iter()
        .map(|i| pool[i].clone())
        .collect()
}

/// A transaction queued on the destination chain.
#[derive(Clone, Debug)]
pub struct PendingTx {
    pub submitted_at: Tick,
    pub submitter: Address,
    pub tx: BridgeTx,
}

/// Execution record for one destination-chain transaction.
#[derive(Clone, Debug)]
pub struct AppliedTx {
    pub tick: Tick,
    pub tx_id: Digest,
    pub kind: &'static str,
    pub submitter: Address,
    pub result: Result<(), RejectReason>,
    /// Set when executing this transaction moved the contract's active relay.
    pub new_active_relay: Option<usize>,
}

/// Destination chain: an ordered log feeding the bridge contract, with a
/// one-tick inclusion delay. Valid submissions are always applied eventually.
pub struct ChainB {
    pending: VecDeque<PendingTx>,
    pub log: Vec<AppliedTx>,
    pub contract: ContractState,
    pub gas: GasLedger,
}

impl ChainB {
    pub fn new(contract: ContractState, weights: GasWeights) -> Self {
        ChainB {
            pending: VecDeque::new(),
            log: Vec::new(),
            contract,
            gas: GasLedger::new(weights),
        }
    }

    pub fn submit(&mut self, now: Tick, submitter: Address, tx: BridgeTx) -> Digest {
        let id = tx.id();
        self.pending.push_back(PendingTx {
            submitted_at: now,
            submitter,
            tx,
        });
        id
    }

    pub fn pending_count(&self) -> usize {
        self.pending.len()
    }

    /// Execute every transaction submitted before `now`, in order.
    pub fn apply_ready(&mut self, now: Tick) -> Vec<AppliedTx> {
        let mut applied = Vec::new();
        while matches!(self.pending.front(), Some(p) if p.submitted_at < now) {
            let p = self.pending.pop_front().expect("peeked");
            let tx_id = p.tx.id();
            let kind = p.tx.kind();
            let mut charge = GasCharge {
                calldata_bytes: p.tx.encode().len() as u64,
                ..GasCharge::default()
            };
            let active_before = self.contract.active_relay();
            let result = match &p.tx {
                BridgeTx::Sync(tx) => self.contract.handle_sync(tx, &mut charge),
                BridgeTx::Mint(tx) => self.contract.handle_mint(tx, &mut charge),
                BridgeTx::StatelessMint(tx) => self.contract.handle_stateless_mint(tx, &mut charge),
            };
            let active_after = self.contract.active_relay();
            let record = AppliedTx {
                tick: now,
                tx_id,
                kind,
                submitter: p.submitter,
                result,
                new_active_relay: (active_before != active_after).then_some(active_after),
            };
            self.gas.record(GasRow {
                tx_id,
                kind,
                submitter: p.submitter,
                charge,
                result: record.result.clone(),
            });
            self.log.push(record.clone());
            applied.push(record);
        }
        applied
    }
}
