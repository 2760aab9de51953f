//! Iterative product-code decoding and TPC self-detection.
//!
//! Both decoders alternate row and column half-iterations and stop as soon
//! as every row and column is a valid component codeword. After decoding,
//! [`self_detect`] checks the syndromes of the first `k` rows, which replaces
//! a CRC when the receiver uses self-detection.

mod chase;
mod detect;
mod hiho;
mod siso;

pub use chase::{chase2_component, ChaseOutput};
pub use detect::{self_detect, self_detect_columns, SelfDetection};
pub use hiho::hiho_decode;
pub use siso::{siso_decode, siso_decode_with, SisoSchedule};

use crate::bits::{BitMatrix, SoftMatrix};

/// Runtime operation counters of one decoding call.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OpCounters {
    /// Hard-decision component decodings performed.
    pub hdd: u64,
    /// XOR operations charged to self-detection (LFSR accounting).
    pub syndrome_xors: f64,
}

impl OpCounters {
    pub fn merge(&mut self, other: &OpCounters) {
        self.hdd += other.hdd;
        self.syndrome_xors += other.syndrome_xors;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub decoded: BitMatrix,
    pub half_iterations_used: usize,
    /// Every row and column of `decoded` is a valid component codeword.
    pub converged: bool,
    pub self_detect_clean: bool,
    /// 1-based index of the first row with a nonzero syndrome.
    pub x_hat: Option<usize>,
    pub ops: OpCounters,
}

/// Sign slicer: positive values map to bit 0, negative to bit 1, and an
/// exact zero to bit 0.
pub fn hard_slice(soft: &SoftMatrix) -> BitMatrix {
    let n = soft.size();
    let bits = soft.values().iter().map(|&v| (v < 0.0) as u8).collect();
    BitMatrix::from_vec(n, bits).expect("slice preserves dimensions")
}

/// Runs self-detection on a decoder output and fills in the result fields.
/// When the last half-iteration decoded rows, the first `k` columns are also
/// checked.
pub(crate) fn finish(
    code: &crate::codec::ComponentCode,
    decoded: BitMatrix,
    half_iterations_used: usize,
    converged: bool,
    mut ops: OpCounters,
) -> DecodeResult {
    let rows = self_detect(code, &decoded);
    ops.syndrome_xors += rows.xor_count;
    let mut clean = rows.clean;
    let ended_on_rows = half_iterations_used % 2 == 1;
    if clean && ended_on_rows {
        let cols = self_detect_columns(code, &decoded);
        ops.syndrome_xors += cols.xor_count;
        clean = cols.clean;
    }
    DecodeResult {
        decoded,
        half_iterations_used,
        converged,
        self_detect_clean: clean,
        x_hat: rows.x_hat,
        ops,
    }
}
