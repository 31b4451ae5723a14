//! Merkle mountain range accumulator.
//!
//! Leaves are appended left to right; complete binary subtrees ("mountains")
//! merge exactly like carries in a binary counter, so an accumulator over
//! `n` leaves has one peak per set bit of `n`. The root bags the peaks right
//! to left and finally commits the leaf count, which binds proofs to a
//! specific snapshot: a proof generated at leaf count `k` never verifies
//! against the root at any other count.
//!
//! Storage is per-level and append-only. `levels[h][j]` is the digest of the
//! complete subtree of height `h` over leaves `[j * 2^h, (j+1) * 2^h)`; a
//! node digest never changes once written, appends only push.

use crate::cost::OpCount;
use crate::crypto::{hash_parts, Digest};
use crate::encoding::{DecodeError, Decoder, Encoder};

use super::{CommitmentError, TAG_BAG, TAG_LEAF, TAG_NODE};

/// Inclusion proof: the sibling path inside the leaf's mountain plus the
/// digests of the other peaks in bagging order (rightmost peak first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MmrProof {
    pub leaf_index: u64,
    pub mountain_path: Vec<Digest>,
    pub peak_bag: Vec<Digest>,
}

impl MmrProof {
    pub fn digest_count(&self) -> usize {
        self.mountain_path.len() + self.peak_bag.len()
    }

    /// Shape of a proof for a single-peak position with nothing to show;
    /// only meaningful where the verifier expects an intentionally empty
    /// proof.
    pub fn empty() -> Self {
        MmrProof {
            leaf_index: 0,
            mountain_path: Vec::new(),
            peak_bag: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.mountain_path.is_empty() && self.peak_bag.is_empty()
    }

    pub fn encode_into(&self, enc: &mut Encoder) {
        enc.u64(self.leaf_index);
        enc.u32(self.mountain_path.len() as u32);
        for d in &self.mountain_path {
            enc.raw(d.as_bytes());
        }
        enc.u32(self.peak_bag.len() as u32);
        for d in &self.peak_bag {
            enc.raw(d.as_bytes());
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut enc = Encoder::new();
        self.encode_into(&mut enc);
        enc.finish()
    }

    pub fn decode_from(dec: &mut Decoder<'_>) -> Result<Self, DecodeError> {
        let leaf_index = dec.u64()?;
        let path_len = dec.u32()? as usize;
        if path_len > 64 {
            return Err(DecodeError::Invalid("mmr path length"));
        }
        let mut mountain_path = Vec::with_capacity(path_len);
        for _ in 0..path_len {
            mountain_path.push(Digest::from_bytes(dec.array::<32>()?));
        }
        let bag_len = dec.u32()? as usize;
        if bag_len > 64 {
            return Err(DecodeError::Invalid("mmr bag length"));
        }
        let mut peak_bag = Vec::with_capacity(bag_len);
        for _ in 0..bag_len {
            peak_bag.push(Digest::from_bytes(dec.array::<32>()?));
        }
        Ok(MmrProof {
            leaf_index,
            mountain_path,
            peak_bag,
        })
    }
}

fn leaf_node(leaf: &Digest) -> Digest {
    hash_parts(&[TAG_LEAF, leaf.as_bytes()])
}

fn parent_node(left: &Digest, right: &Digest) -> Digest {
    hash_parts(&[TAG_NODE, left.as_bytes(), right.as_bytes()])
}

fn bag_step(peak: &Digest, acc: &Digest) -> Digest {
    hash_parts(&[TAG_BAG, peak.as_bytes(), acc.as_bytes()])
}

fn final_root(count: u64, acc: &Digest) -> Digest {
    hash_parts(&[TAG_BAG, &count.to_be_bytes(), acc.as_bytes()])
}

/// Peak layout for a given leaf count: `(height, first_leaf)` per peak, left
/// to right — one peak per set bit of the count, highest first.
fn peak_spans(count: u64) -> Vec<(u32, u64)> {
    let mut spans = Vec::new();
    let mut start = 0u64;
    for height in (0..64).rev() {
        if count & (1 << height) != 0 {
            spans.push((height, start));
            start += 1 << height;
        }
    }
    spans
}

#[derive(Debug, Clone, Default)]
pub struct Mmr {
    levels: Vec<Vec<Digest>>,
}

impl Mmr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn leaf_count(&self) -> u64 {
        self.levels.first().map_or(0, |l| l.len() as u64)
    }

    /// Append one leaf; existing node digests are never touched.
    pub fn push(&mut self, leaf: &Digest) {
        let mut node = leaf_node(leaf);
        let mut height = 0;
        loop {
            if self.levels.len() == height {
                self.levels.push(Vec::new());
            }
            self.levels[height].push(node);
            let len = self.levels[height].len();
            if len % 2 != 0 {
                break;
            }
            node = parent_node(&self.levels[height][len - 2], &self.levels[height][len - 1]);
            height += 1;
        }
    }

    /// Current peaks as `(height, digest)`, left to right.
    pub fn peaks(&self) -> Vec<(u32, Digest)> {
        peak_spans(self.leaf_count())
            .into_iter()
            .map(|(h, start)| (h, self.levels[h as usize][(start >> h) as usize]))
            .collect()
    }

    /// Bagged root committing every leaf and the leaf count.
    pub fn root(&self) -> Result<Digest, CommitmentError> {
        let count = self.leaf_count();
        if count == 0 {
            return Err(CommitmentError::EmptyAccumulator);
        }
        let peaks = self.peaks();
        let mut acc = peaks.last().expect("nonempty").1;
        for (_, peak) in peaks[..peaks.len() - 1].iter().rev() {
            acc = bag_step(peak, &acc);
        }
        Ok(final_root(count, &acc))
    }

    /// Root, with the empty accumulator mapped to a fixed placeholder digest
    /// (`H(0x02 || 0u64)`) that no proof can verify against. Lets callers
    /// stamp a root field even when the committed window happens to be empty.
    pub fn root_or_empty(&self) -> Digest {
        match self.root() {
            Ok(root) => root,
            Err(_) => hash_parts(&[TAG_BAG, &0u64.to_be_bytes()]),
        }
    }

    pub fn prove(&self, index: u64) -> Result<MmrProof, CommitmentError> {
        let count = self.leaf_count();
        if index >= count {
            return Err(CommitmentError::IndexOutOfRange {
                index,
                count,
            });
        }
        let spans = peak_spans(count);
        let (peak_ordinal, (peak_height, _)) = spans
            .iter()
            .enumerate()
            .find(|(_, (h, start))| index >= *start && index < start + (1u64 << h))
            .map(|(i, s)| (i, *s))
            .expect("index below count is inside some peak");

        let mut mountain_path = Vec::with_capacity(peak_height as usize);
        for level in 0..peak_height {
            let abs = (index >> level) ^ 1;
            mountain_path.push(self.levels[level as usize][abs as usize]);
        }

        let peaks = self.peaks();
        let mut peak_bag: Vec<Digest> = peaks
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != peak_ordinal)
            .map(|(_, (_, d))| *d)
            .collect();
        peak_bag.reverse(); // bagging order: rightmost first

        Ok(MmrProof {
            leaf_index: index,
            mountain_path,
            peak_bag,
        })
    }
}

/// Recompute the bagged root for `(leaf, proof)` under the claimed snapshot
/// size and compare. Malformed proofs return false; nothing errors.
pub fn verify(proof: &MmrProof, leaf: &Digest, root: &Digest, leaf_count: u64) -> bool {
    verify_counted(proof, leaf, root, leaf_count, &mut OpCount::default())
}

pub fn verify_counted(
    proof: &MmrProof,
    leaf: &Digest,
    root: &Digest,
    leaf_count: u64,
    ops: &mut OpCount,
) -> bool {
    if leaf_count == 0 || proof.leaf_index >= leaf_count {
        return false;
    }
    let spans = peak_spans(leaf_count);
    let located = spans
        .iter()
        .enumerate()
        .find(|(_, (h, start))| proof.leaf_index >= *start && proof.leaf_index < start + (1u64 << h));
    let (peak_ordinal, (peak_height, _)) = match located {
        Some((i, s)) => (i, *s),
        None => return false,
    };
    if proof.mountain_path.len() != peak_height as usize {
        return false;
    }
    if proof.peak_bag.len() != spans.len() - 1 {
        return false;
    }

    let mut node = leaf_node(leaf);
    ops.hashes += 1;
    for (level, sibling) in proof.mountain_path.iter().enumerate() {
        let abs = proof.leaf_index >> level;
        node = if abs & 1 == 0 {
            parent_node(&node, sibling)
        } else {
            parent_node(sibling, &node)
        };
        ops.hashes += 1;
    }

    // Bag right to left, splicing the recomputed peak into its slot.
    let mut others = proof.peak_bag.iter();
    let mut acc: Option<Digest> = None;
    for ordinal in (0..spans.len()).rev() {
        let peak = if ordinal == peak_ordinal {
            node
        } else {
            match others.next() {
                Some(d) => *d,
                None => return false,
            }
        };
        acc = Some(match acc {
            None => peak,
            Some(a) => {
                ops.hashes += 1;
                bag_step(&peak, &a)
            }
        });
    }
    let acc = acc.expect("at least one peak");
    ops.hashes += 1;
    final_root(leaf_count, &acc) == *root
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::hash;
    use crate::prf::HashStream;

    fn leaf(i: u64) -> Digest {
        hash(format!("mmr-leaf-{i}").as_bytes())
    }

    fn filled(n: u64) -> Mmr {
        let mut mmr = Mmr::new();
        for i in 0..n {
            mmr.push(&leaf(i));
        }
        mmr
    }

    // Independent reference: build each mountain recursively from the leaf
    // slice, then bag. Shares only the node hash formulas with the
    // incremental implementation.
    fn oracle_root(leaves: &[Digest]) -> Digest {
        fn perfect(leaves: &[Digest]) -> Digest {
            if leaves.len() == 1 {
                leaf_node(&leaves[0])
            } else {
                let half = leaves.len() / 2;
                parent_node(&perfect(&leaves[..half]), &perfect(&leaves[half..]))
            }
        }
        let mut peaks = Vec::new();
        let mut rest = leaves;
        while !rest.is_empty() {
            let chunk = if rest.len().is_power_of_two() {
                rest.len()
            } else {
                let mut p = 1usize;
                while p * 2 <= rest.len() {
                    p *= 2;
                }
                p
            };
            peaks.push(perfect(&rest[..chunk]));
            rest = &rest[chunk..];
        }
        let mut acc = *peaks.last().unwrap();
        for p in peaks[..peaks.len() - 1].iter().rev() {
            acc = bag_step(p, &acc);
        }
        final_root(leaves.len() as u64, &acc)
    }

    #[test]
    fn empty_root_errors() {
        assert_eq!(Mmr::new().root(), Err(CommitmentError::EmptyAccumulator));
    }

    #[test]
    fn single_leaf_root_commits_count() {
        let mmr = filled(1);
        let expected = final_root(1, &leaf_node(&leaf(0)));
        assert_eq!(mmr.root().unwrap(), expected);
    }

    #[test]
    fn peak_heights_follow_binary_counter() {
        let heights = |n: u64| -> Vec<u32> { filled(n).peaks().iter().map(|(h, _)| *h).collect() };
        assert_eq!(heights(1), vec![0]);
        assert_eq!(heights(3), vec![1, 0]);
        assert_eq!(heights(8), vec![3]);
        assert_eq!(heights(11), vec![3, 1, 0]);
    }

    // Hand-rolled recomputation of the three-leaf root: two peaks bagged
    // right to left, count hashed into the final step.
    #[test]
    fn three_leaf_root_recomputed_by_hand() {
        let mmr = filled(3);
        let n0 = leaf_node(&leaf(0));
        let n1 = leaf_node(&leaf(1));
        let n2 = leaf_node(&leaf(2));
        let peak_a = parent_node(&n0, &n1);
        let bag = bag_step(&peak_a, &n2);
        assert_eq!(mmr.root().unwrap(), final_root(3, &bag));
    }

    #[test]
    fn roots_differ_as_leaves_are_added() {
        assert_ne!(filled(3).root().unwrap(), filled(4).root().unwrap());
    }

    #[test]
    fn rebuild_oracle_matches_after_every_append() {
        let mut mmr = Mmr::new();
        let mut leaves = Vec::new();
        for i in 0..64 {
            leaves.push(leaf(i));
            mmr.push(&leaf(i));
            assert_eq!(mmr.root().unwrap(), oracle_root(&leaves), "count {}", i + 1);
        }
    }

    #[test]
    fn append_never_mutates_existing_nodes() {
        let mut mmr = filled(5);
        let before: Vec<Vec<Digest>> = mmr.levels.clone();
        for i in 5..40 {
            mmr.push(&leaf(i));
        }
        for (h, level) in before.iter().enumerate() {
            assert_eq!(&mmr.levels[h][..level.len()], &level[..]);
        }
    }

    #[test]
    fn three_leaf_proof_structure() {
        let mmr = filled(3);
        let proof = mmr.prove(2).unwrap();
        assert_eq!(proof.mountain_path.len(), 0);
        assert_eq!(proof.peak_bag.len(), 1);
        assert!(verify(&proof, &leaf(2), &mmr.root().unwrap(), 3));
    }

    #[test]
    fn one_leaf_proof_is_empty() {
        let mmr = filled(1);
        let proof = mmr.prove(0).unwrap();
        assert!(proof.mountain_path.is_empty() && proof.peak_bag.is_empty());
        assert!(verify(&proof, &leaf(0), &mmr.root().unwrap(), 1));
    }

    #[test]
    fn prove_rejects_out_of_range() {
        assert!(matches!(
            filled(3).prove(3),
            Err(CommitmentError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn all_indices_round_trip_for_every_size_up_to_64() {
        for n in 1..=64u64 {
            let mmr = filled(n);
            let root = mmr.root().unwrap();
            for i in 0..n {
                let proof = mmr.prove(i).unwrap();
                assert!(verify(&proof, &leaf(i), &root, n), "n={n} i={i}");
            }
        }
    }

    #[test]
    fn twenty_leaf_exhaustive_round_trip() {
        let mmr = filled(20);
        let root = mmr.root().unwrap();
        for i in 0..20 {
            assert!(verify(&mmr.prove(i).unwrap(), &leaf(i), &root, 20));
        }
    }

    #[test]
    fn wrong_count_claim_fails() {
        let mmr = filled(6);
        let proof = mmr.prove(2).unwrap();
        let root = mmr.root().unwrap();
        assert!(verify(&proof, &leaf(2), &root, 6));
        assert!(!verify(&proof, &leaf(2), &root, 7));
        assert!(!verify(&proof, &leaf(2), &root, 5));
    }

    #[test]
    fn proof_does_not_survive_later_appends() {
        let mut mmr = filled(6);
        let proof = mmr.prove(2).unwrap();
        mmr.push(&leaf(6));
        let newer_root = mmr.root().unwrap();
        assert!(!verify(&proof, &leaf(2), &newer_root, 7));
        assert!(!verify(&proof, &leaf(2), &newer_root, 6));
    }

    #[test]
    fn proof_size_stays_within_bound() {
        for n in [16u64, 256, 4096] {
            let mmr = filled(n);
            let bound = 2 * (64 - (n - 1).leading_zeros() as usize) + 1;
            let mut max = 0;
            for i in 0..n {
                max = max.max(mmr.prove(i).unwrap().digest_count());
            }
            assert!(max <= bound, "n={n} max={max} bound={bound}");
        }
    }

    #[test]
    fn tamper_fuzz_rejects_every_mutation() {
        let n = 21u64;
        let mmr = filled(n);
        let root = mmr.root().unwrap();
        let mut stream = HashStream::new(b"mmr-fuzz", b"0");
        for trial in 0..1000 {
            let idx = stream.next_range(n);
            let proof = mmr.prove(idx).unwrap();
            let l = leaf(idx);
            // Mutate one byte of the proof digests, the leaf, or the root.
            let surface = stream.next_range(3);
            let byte = stream.next_range(32) as usize;
            let bit = 1u8 << stream.next_range(8);
            match surface {
                0 => {
                    let mut p = proof.clone();
                    let total = p.mountain_path.len() + p.peak_bag.len();
                    if total == 0 {
                        // No digests to corrupt; flip the index instead.
                        p.leaf_index ^= 1;
                        assert!(!verify(&p, &l, &root, n), "trial {trial}: index flip");
                        continue;
                    }
                    let which = stream.next_range(total as u64) as usize;
                    let target = if which < p.mountain_path.len() {
                        &mut p.mountain_path[which]
                    } else {
                        &mut p.peak_bag[which - p.mountain_path.len()]
                    };
                    let mut bytes = *target.as_bytes();
                    bytes[byte] ^= bit;
                    *target = Digest::from_bytes(bytes);
                    assert!(!verify(&p, &l, &root, n), "trial {trial}: proof flip");
                }
                1 => {
                    let mut bytes = *l.as_bytes();
                    bytes[byte] ^= bit;
                    assert!(
                        !verify(&proof, &Digest::from_bytes(bytes), &root, n),
                        "trial {trial}: leaf flip"
                    );
                }
                _ => {
                    let mut bytes = *root.as_bytes();
                    bytes[byte] ^= bit;
                    assert!(
                        !verify(&proof, &l, &Digest::from_bytes(bytes), n),
                        "trial {trial}: root flip"
                    );
                }
            }
        }
    }

    #[test]
    fn proof_encoding_round_trips() {
        let mmr = filled(13);
        let proof = mmr.prove(9).unwrap();
        let buf = proof.encode();
        let mut dec = Decoder::new(&buf);
        let back = MmrProof::decode_from(&mut dec).unwrap();
        dec.finish().unwrap();
        assert_eq!(back, proof);
    }
}
