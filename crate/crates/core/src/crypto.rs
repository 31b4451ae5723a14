//! Hashing and the quorum signature scheme carried in block headers.
//!
//! A key pair is derived deterministically from a 32-byte seed. An
//! individual signature is a keyed digest over `(public key, message)`, and a
//! quorum signature is the digest of the sorted individual signatures next to
//! a bitmap of the signers. Verification recomputes every claimed signer's
//! contribution and compares aggregates, so threshold semantics, bitmap
//! accounting, and tamper rejection behave exactly like an aggregate scheme
//! while the build stays dependency-free. The aggregate value is opaque to
//! callers, which leaves room to swap in a pairing-based backend later.
//!
//! Key secrecy against a process-local adversary is out of scope: anyone
//! holding a public key can recompute signatures under it. Nothing in the
//! protocol logic depends on that being hard.

use std::fmt;

use sha2::{Digest as _, Sha256};
use thiserror::Error;

use crate::cost::OpCount;
use crate::encoding::{DecodeError, Decoder, Encoder};

pub const DIGEST_LEN: usize = 32;

const TAG_SECRET: &[u8] = b"bridge.v1.secret";
const TAG_PUBLIC: &[u8] = b"bridge.v1.public";
const TAG_SIG: &[u8] = b"bridge.v1.sig";
const TAG_AGG: &[u8] = b"bridge.v1.agg";

/// 32-byte hash value. Equality is byte equality.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Digest([u8; DIGEST_LEN]);

impl Digest {
    pub const ZERO: Digest = Digest([0u8; DIGEST_LEN]);

    pub const fn from_bytes(bytes: [u8; DIGEST_LEN]) -> Self {
        Digest(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; DIGEST_LEN] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        let bytes = hex::decode(s.trim()).ok()?;
        let arr: [u8; DIGEST_LEN] = bytes.try_into().ok()?;
        Some(Digest(arr))
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({}..)", &self.to_hex()[..8])
    }
}

/// SHA-256 of the raw input.
pub fn hash(data: &[u8]) -> Digest {
    Digest(Sha256::digest(data).into())
}

/// SHA-256 over the concatenation of the parts, without copying.
pub fn hash_parts(parts: &[&[u8]]) -> Digest {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update(part);
    }
    Digest(hasher.finalize().into())
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CryptoError {
    #[error("message must not be empty")]
    EmptyMessage,
    #[error("duplicate committee index {0}")]
    DuplicateIndex(usize),
    #[error("committee index {index} out of range for committee of {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("signer bitmap has {bitmap} entries but the committee has {committee}")]
    BitmapLengthMismatch { bitmap: usize, committee: usize },
    #[error("weight vector has {weights} entries but the committee has {committee}")]
    WeightLengthMismatch { weights: usize, committee: usize },
    #[error("threshold must satisfy 0 < num <= den")]
    InvalidThreshold,
}

/// Verification key with a canonical 32-byte encoding.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PublicKey(Digest);

impl PublicKey {
    pub fn as_bytes(&self) -> &[u8; DIGEST_LEN] {
        self.0.as_bytes()
    }

    pub fn from_bytes(bytes: [u8; DIGEST_LEN]) -> Self {
        PublicKey(Digest(bytes))
    }
}

impl fmt::Display for PublicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for PublicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PublicKey({}..)", &self.0.to_hex()[..8])
    }
}

/// Signing key. Opaque; only the signing routines look inside.
#[derive(Clone)]
pub struct SecretKey(Digest);

impl fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SecretKey(..)")
    }
}

#[derive(Clone, Debug)]
pub struct KeyPair {
    pub secret: SecretKey,
    pub public: PublicKey,
}

/// Deterministic key generation: the same seed always yields the same pair.
pub fn keygen(seed: &[u8; 32]) -> KeyPair {
    let secret = hash_parts(&[TAG_SECRET, seed]);
    let public = hash_parts(&[TAG_PUBLIC, secret.as_bytes()]);
    KeyPair {
        secret: SecretKey(secret),
        public: PublicKey(public),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct IndividualSignature(Digest);

impl IndividualSignature {
    pub fn as_bytes(&self) -> &[u8; DIGEST_LEN] {
        self.0.as_bytes()
    }
}

impl fmt::Debug for IndividualSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sig({}..)", &self.0.to_hex()[..8])
    }
}

pub fn sign(secret: &SecretKey, message: &[u8]) -> Result<IndividualSignature, CryptoError> {
    if message.is_empty() {
        return Err(CryptoError::EmptyMessage);
    }
    let public = hash_parts(&[TAG_PUBLIC, secret.0.as_bytes()]);
    Ok(IndividualSignature(hash_parts(&[
        TAG_SIG,
        public.as_bytes(),
        message,
    ])))
}

pub fn verify(public: &PublicKey, message: &[u8], sig: &IndividualSignature) -> bool {
    if message.is_empty() {
        return false;
    }
    sig.0 == hash_parts(&[TAG_SIG, public.as_bytes(), message])
}

/// Aggregate signature plus a bitmap naming which committee members signed.
///
/// Invariant: the bitmap length equals the committee size it was built for,
/// and the number of set bits equals the number of aggregated signatures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuorumSignature {
    agg: Digest,
    bitmap: Vec<bool>,
}

impl QuorumSignature {
    /// All-zero placeholder used when hashing a header's signing payload.
    pub fn zeroed(committee_size: usize) -> Self {
        QuorumSignature {
            agg: Digest::ZERO,
            bitmap: vec![false; committee_size],
        }
    }

    pub fn agg(&self) -> &Digest {
        &self.agg
    }

    pub fn bitmap(&self) -> &[bool] {
        &self.bitmap
    }

    pub fn signer_count(&self) -> usize {
        self.bitmap.iter().filter(|b| **b).count()
    }

    /// Test-only style accessor for tamper experiments: rebuild with a
    /// different aggregate value.
    pub fn with_agg(&self, agg: Digest) -> Self {
        QuorumSignature {
            agg,
            bitmap: self.bitmap.clone(),
        }
    }

    pub fn encode_into(&self, enc: &mut Encoder) {
        enc.raw(self.agg.as_bytes());
        enc.u32(self.bitmap.len() as u32);
        let mut packed = vec![0u8; self.bitmap.len().div_ceil(8)];
        for (i, set) in self.bitmap.iter().enumerate() {
            if *set {
                packed[i / 8] |= 1 << (i % 8);
            }
        }
        enc.raw(&packed);
    }

    pub fn decode_from(dec: &mut Decoder<'_>) -> Result<Self, DecodeError> {
        let agg = Digest::from_bytes(dec.array::<32>()?);
        let bits = dec.u32()? as usize;
        if bits > 1 << 20 {
            return Err(DecodeError::Invalid("bitmap length"));
        }
        let mut bitmap = Vec::with_capacity(bits);
        let packed_len = bits.div_ceil(8);
        let mut packed = vec![0u8; packed_len];
        for byte in packed.iter_mut() {
            *byte = dec.u8()?;
        }
        for i in 0..bits {
            bitmap.push(packed[i / 8] & (1 << (i % 8)) != 0);
        }
        Ok(QuorumSignature { agg, bitmap })
    }
}

fn combine(mut sig_bytes: Vec<[u8; DIGEST_LEN]>) -> Digest {
    sig_bytes.sort_unstable();
    let mut hasher = Sha256::new();
    hasher.update(TAG_AGG);
    for s in &sig_bytes {
        hasher.update(s);
    }
    Digest(hasher.finalize().into())
}

/// Aggregate individual signatures into a quorum signature.
///
/// Indices must be distinct and below `committee_size`; the resulting bitmap
/// has exactly those indices set.
pub fn aggregate(
    sigs: &[(usize, IndividualSignature)],
    committee_size: usize,
) -> Result<QuorumSignature, CryptoError> {
    let mut bitmap = vec![false; committee_size];
    let mut parts = Vec::with_capacity(sigs.len());
    for (index, sig) in sigs {
        if *index >= committee_size {
            return Err(CryptoError::IndexOutOfRange {
                index: *index,
                size: committee_size,
            });
        }
        if bitmap[*index] {
            return Err(CryptoError::DuplicateIndex(*index));
        }
        bitmap[*index] = true;
        parts.push(*sig.as_bytes());
    }
    Ok(QuorumSignature {
        agg: combine(parts),
        bitmap,
    })
}

/// Quorum fraction, exact rational in `(0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Threshold {
    num: u32,
    den: u32,
}

impl Threshold {
    /// Standard BFT two-thirds quorum.
    pub const TWO_THIRDS: Threshold = Threshold { num: 2, den: 3 };

    pub fn new(num: u32, den: u32) -> Result<Self, CryptoError> {
        if num == 0 || den == 0 || num > den {
            return Err(CryptoError::InvalidThreshold);
        }
        Ok(Threshold { num, den })
    }

    pub fn num(&self) -> u32 {
        self.num
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    /// `weight / total >= num / den`, evaluated without rounding.
    pub fn met(&self, weight: u128, total: u128) -> bool {
        if total == 0 {
            return false;
        }
        weight * self.den as u128 >= total * self.num as u128
    }
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold::TWO_THIRDS
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Verify a quorum signature with equal voting weights.
pub fn quorum_verify(
    qsig: &QuorumSignature,
    pks: &[PublicKey],
    message: &[u8],
    threshold: Threshold,
) -> Result<bool, CryptoError> {
    quorum_verify_counted(qsig, pks, message, threshold, None, &mut OpCount::default())
}

/// Verify a quorum signature with an explicit per-validator weight vector.
pub fn quorum_verify_weighted(
    qsig: &QuorumSignature,
    pks: &[PublicKey],
    message: &[u8],
    threshold: Threshold,
    weights: &[u64],
) -> Result<bool, CryptoError> {
    quorum_verify_counted(
        qsig,
        pks,
        message,
        threshold,
        Some(weights),
        &mut OpCount::default(),
    )
}

/// Verification core. Reports one signature check per set bitmap bit plus one
/// hash for recombining the aggregate.
pub fn quorum_verify_counted(
    qsig: &QuorumSignature,
    pks: &[PublicKey],
    message: &[u8],
    threshold: Threshold,
    weights: Option<&[u64]>,
    ops: &mut OpCount,
) -> Result<bool, CryptoError> {
    if qsig.bitmap.len() != pks.len() {
        return Err(CryptoError::BitmapLengthMismatch {
            bitmap: qsig.bitmap.len(),
            committee: pks.len(),
        });
    }
    if let Some(w) = weights {
        if w.len() != pks.len() {
            return Err(CryptoError::WeightLengthMismatch {
                weights: w.len(),
                committee: pks.len(),
            });
        }
    }
    if message.is_empty() {
        return Ok(false);
    }

    let weight_of = |i: usize| weights.map_or(1u128, |w| w[i] as u128);
    let total: u128 = (0..pks.len()).map(weight_of).sum();

    let mut parts = Vec::with_capacity(qsig.signer_count());
    let mut signed_weight: u128 = 0;
    for (i, set) in qsig.bitmap.iter().enumerate() {
        if *set {
            let expected = hash_parts(&[TAG_SIG, pks[i].as_bytes(), message]);
            ops.sig_verifies += 1;
            parts.push(*expected.as_bytes());
            signed_weight += weight_of(i);
        }
    }
    let recombined = combine(parts);
    ops.hashes += 1;

    Ok(recombined == qsig.agg && threshold.met(signed_weight, total))
}
