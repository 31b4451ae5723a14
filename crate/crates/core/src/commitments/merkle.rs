//! Padded binary Merkle tree for per-block transaction roots.
//!
//! The leaf list is padded to the next power of two by repeating the last
//! leaf, so `[a, b, c]` and `[a, b, c, c]` commit to the same root. Proofs
//! bind both the leaf and its position: every sibling carries a side flag and
//! verification additionally checks the flags agree with the claimed index.

use crate::cost::OpCount;
use crate::crypto::{hash_parts, Digest};
use crate::encoding::{DecodeError, Decoder, Encoder};

use super::{CommitmentError, TAG_LEAF, TAG_NODE};

/// Which side of the path node the sibling sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MerkleProof {
    pub leaf_index: u64,
    pub siblings: Vec<(Digest, Side)>,
}

impl MerkleProof {
    pub fn digest_count(&self) -> usize {
        self.siblings.len()
    }

    pub fn encode_into(&self, enc: &mut Encoder) {
        enc.u64(self.leaf_index);
        enc.u32(self.siblings.len() as u32);
        for (digest, side) in &self.siblings {
            enc.u8(match side {
                Side::Left => 0,
                Side::Right => 1,
            });
            enc.raw(digest.as_bytes());
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut enc = Encoder::new();
        self.encode_into(&mut enc);
        enc.finish()
    }

    pub fn decode_from(dec: &mut Decoder<'_>) -> Result<Self, DecodeError> {
        let leaf_index = dec.u64()?;
        let n = dec.u32()? as usize;
        if n > 64 {
            return Err(DecodeError::Invalid("merkle proof depth"));
        }
        let mut siblings = Vec::with_capacity(n);
        for _ in 0..n {
            let side = match dec.u8()? {
                0 => Side::Left,
                1 => Side::Right,
                _ => return Err(DecodeError::Invalid("side flag")),
            };
            let digest = Digest::from_bytes(dec.array::<32>()?);
            siblings.push((digest, side));
        }
        Ok(MerkleProof {
            leaf_index,
            siblings,
        })
    }
}

/// Tree over a fixed leaf sequence. `levels[0]` holds the padded leaf nodes,
/// the last level holds the root.
#[derive(Debug, Clone)]
pub struct MerkleTree {
    leaf_count: u64,
    levels: Vec<Vec<Digest>>,
}

fn leaf_node(leaf: &Digest) -> Digest {
    hash_parts(&[TAG_LEAF, leaf.as_bytes()])
}

fn parent_node(left: &Digest, right: &Digest) -> Digest {
    hash_parts(&[TAG_NODE, left.as_bytes(), right.as_bytes()])
}

impl MerkleTree {
    pub fn build(leaves: &[Digest]) -> Result<Self, CommitmentError> {
        if leaves.is_empty() {
            return Err(CommitmentError::EmptyLeaves);
        }
        let padded = leaves.len().next_power_of_two();
        let mut level: Vec<Digest> = leaves.iter().map(leaf_node).collect();
        level.resize(padded, *level.last().expect("nonempty"));

        let mut levels = vec![level];
        while levels.last().expect("at least one level").len() > 1 {
            let prev = levels.last().expect("nonempty");
            let next: Vec<Digest> = prev
                .chunks(2)
                .map(|pair| parent_node(&pair[0], &pair[1]))
                .collect();
            levels.push(next);
        }
        Ok(MerkleTree {
            leaf_count: leaves.len() as u64,
            levels,
        })
    }

    pub fn root(&self) -> Digest {
        self.levels.last().expect("built tree")[0]
    }

    pub fn leaf_count(&self) -> u64 {
        self.leaf_count
    }

    pub fn prove(&self, index: u64) -> Result<MerkleProof, CommitmentError> {
        if index >= self.leaf_count {
            return Err(CommitmentError::IndexOutOfRange {
                index,
                count: self.leaf_count,
            });
        }
        let mut siblings = Vec::new();
        let mut pos = index as usize;
        for level in &self.levels[..self.levels.len() - 1] {
            let sib = pos ^ 1;
            let side = if sib < pos { Side::Left } else { Side::Right };
            siblings.push((level[sib], side));
            pos /= 2;
        }
        Ok(MerkleProof {
            leaf_index: index,
            siblings,
        })
    }
}

/// Fold `leaf` up through the proof and compare against `root`.
///
/// Returns false on any malformed proof; never errors.
pub fn verify(proof: &MerkleProof, leaf: &Digest, root: &Digest) -> bool {
    verify_counted(proof, leaf, root, &mut OpCount::default())
}

pub fn verify_counted(
    proof: &MerkleProof,
    leaf: &Digest,
    root: &Digest,
    ops: &mut OpCount,
) -> bool {
    if proof.siblings.len() > 64 {
        return false;
    }
    // The claimed index must fit in the tree depth the siblings describe.
    if proof.siblings.len() < 64 && proof.leaf_index >> proof.siblings.len() != 0 {
        return false;
    }
    let mut node = leaf_node(leaf);
    ops.hashes += 1;
    for (level, (sibling, side)) in proof.siblings.iter().enumerate() {
        // Position binding: the side flags must match the index bits.
        let expected = if (proof.leaf_index >> level) & 1 == 1 {
            Side::Left
        } else {
            Side::Right
        };
        if *side != expected {
            return false;
        }
        node = match side {
            Side::Left => parent_node(sibling, &node),
            Side::Right => parent_node(&node, sibling),
        };
        ops.hashes += 1;
    }
    node == *root
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::hash;
    use crate::prf::HashStream;

    fn leaves(n: usize) -> Vec<Digest> {
        (0..n).map(|i| hash(format!("leaf-{i}").as_bytes())).collect()
    }

    #[test]
    fn empty_leaf_list_rejected() {
        assert!(matches!(
            MerkleTree::build(&[]),
            Err(CommitmentError::EmptyLeaves)
        ));
    }

    #[test]
    fn single_leaf_root_is_the_leaf_node() {
        let l = hash(b"x");
        let tree = MerkleTree::build(&[l]).unwrap();
        assert_eq!(tree.root(), hash_parts(&[TAG_LEAF, l.as_bytes()]));
        let proof = tree.prove(0).unwrap();
        assert!(proof.siblings.is_empty());
        assert!(verify(&proof, &l, &tree.root()));
    }

    // Direct recomputation of the two-leaf shape.
    #[test]
    fn two_leaf_root_recomputed_by_hand() {
        let (a, b) = (hash(b"a"), hash(b"b"));
        let tree = MerkleTree::build(&[a, b]).unwrap();
        let la = hash_parts(&[TAG_LEAF, a.as_bytes()]);
        let lb = hash_parts(&[TAG_LEAF, b.as_bytes()]);
        let expected = hash_parts(&[TAG_NODE, la.as_bytes(), lb.as_bytes()]);
        assert_eq!(tree.root(), expected);
    }

    #[test]
    fn padding_duplicates_last_leaf() {
        let ls = leaves(3);
        let padded = vec![ls[0], ls[1], ls[2], ls[2]];
        assert_eq!(
            MerkleTree::build(&ls).unwrap().root(),
            MerkleTree::build(&padded).unwrap().root()
        );
    }

    #[test]
    fn proof_depth_matches_log2() {
        let tree = MerkleTree::build(&leaves(4)).unwrap();
        assert_eq!(tree.prove(2).unwrap().siblings.len(), 2);
        let tree3 = MerkleTree::build(&leaves(3)).unwrap();
        assert_eq!(tree3.prove(0).unwrap().siblings.len(), 2);
    }

    #[test]
    fn prove_rejects_out_of_range() {
        let tree = MerkleTree::build(&leaves(3)).unwrap();
        assert!(matches!(
            tree.prove(3),
            Err(CommitmentError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn all_indices_round_trip() {
        let ls = leaves(8);
        let tree = MerkleTree::build(&ls).unwrap();
        for (i, leaf) in ls.iter().enumerate() {
            let proof = tree.prove(i as u64).unwrap();
            assert!(verify(&proof, leaf, &tree.root()), "index {i}");
        }
    }

    #[test]
    fn proof_binds_position() {
        let ls = leaves(8);
        let tree = MerkleTree::build(&ls).unwrap();
        let proof_for_2 = tree.prove(2).unwrap();
        // Right leaf, right position verifies; any other leaf at that
        // position does not.
        assert!(verify(&proof_for_2, &ls[2], &tree.root()));
        for (j, leaf) in ls.iter().enumerate() {
            if j != 2 {
                assert!(!verify(&proof_for_2, leaf, &tree.root()), "leaf {j}");
            }
        }
        // Re-badging the proof with a different index trips the side check.
        let mut moved = proof_for_2.clone();
        moved.leaf_index = 3;
        assert!(!verify(&moved, &ls[3], &tree.root()));
    }

    #[test]
    fn sibling_tamper_fuzz() {
        let ls = leaves(16);
        let tree = MerkleTree::build(&ls).unwrap();
        let mut stream = HashStream::new(b"merkle-fuzz", b"0");
        for trial in 0..500 {
            let idx = stream.next_range(16);
            let mut proof = tree.prove(idx).unwrap();
            let which = stream.next_range(proof.siblings.len() as u64) as usize;
            let mut bytes = *proof.siblings[which].0.as_bytes();
            bytes[stream.next_range(32) as usize] ^= 1 << stream.next_range(8);
            proof.siblings[which].0 = Digest::from_bytes(bytes);
            assert!(
                !verify(&proof, &ls[idx as usize], &tree.root()),
                "trial {trial}"
            );
        }
    }

    #[test]
    fn proof_encoding_round_trips() {
        let tree = MerkleTree::build(&leaves(5)).unwrap();
        let proof = tree.prove(4).unwrap();
        let buf = proof.encode();
        let mut dec = Decoder::new(&buf);
        let back = MerkleProof::decode_from(&mut dec).unwrap();
        dec.finish().unwrap();
        assert_eq!(back, proof);
    }
}
