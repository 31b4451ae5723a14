//! Abstract operation counting behind the gas model.
//!
//! Verification primitives report how many hash evaluations and individual
//! signature checks they performed; the contract layer folds those counts
//! into per-transaction charges together with storage writes and calldata
//! size. Weights are expressed in tenths of a gas unit so the weighted total
//! stays exact integer arithmetic.

/// Primitive operation counts reported by verification routines.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCount {
    pub hashes: u64,
    pub sig_verifies: u64,
}

/// Full per-transaction cost tally.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct GasCharge {
    pub hashes: u64,
    pub sig_verifies: u64,
    pub storage_writes: u64,
    pub calldata_bytes: u64,
}

impl GasCharge {
    pub fn absorb(&mut self, ops: OpCount) {
        self.hashes += ops.hashes;
        self.sig_verifies += ops.sig_verifies;
    }

    pub fn weighted_tenths(&self, w: &GasWeights) -> u64 {
        self.hashes * w.hash_tenths
            + self.sig_verifies * w.sig_verify_tenths
            + self.storage_writes * w.storage_write_tenths
            + self.calldata_bytes * w.calldata_byte_tenths
    }
}

/// Cost weights, in tenths of a gas unit per operation.
///
/// Defaults: hash 1.0, signature verification 50.0, storage write 100.0,
/// calldata byte 0.1. The relative magnitudes mirror public fee schedules;
/// the absolute values carry no meaning of their own.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GasWeights {
    pub hash_tenths: u64,
    pub sig_verify_tenths: u64,
    pub storage_write_tenths: u64,
    pub calldata_byte_tenths: u64,
}

impl Default for GasWeights {
    fn default() -> Self {
        Self {
            hash_tenths: 10,
            sig_verify_tenths: 500,
            storage_write_tenths: 1000,
            calldata_byte_tenths: 1,
        }
    }
}

/// Render a tenths value as a decimal string, e.g. `1234` -> `"123.4"`.
pub fn tenths_to_string(tenths: u64) -> String {
    format!("{}.{}", tenths / 10, tenths % 10)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weighted_total_uses_tenths() {
        let charge = GasCharge {
            hashes: 3,
            sig_verifies: 2,
            storage_writes: 1,
            calldata_bytes: 10,
        };
        let w = GasWeights::default();
        // 3*1.0 + 2*50.0 + 1*100.0 + 10*0.1 = 204.0
        assert_eq!(charge.weighted_tenths(&w), 2040);
        assert_eq!(tenths_to_string(charge.weighted_tenths(&w)), "204.0");
    }
}
