use crate::bits::BitMatrix;
use crate::codec::ComponentCode;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfDetection {
    pub clean: bool,
    /// 1-based index of the first failing row (or column).
    pub x_hat: Option<usize>,
    /// LFSR XOR operations: `(2nu - 1) / 2` per shift, `k` shifts per checked row.
    pub xor_count: f64,
}

/// Divides rows `1..=k` of the decoded matrix by the component generator,
/// stopping at the first row with a nonzero syndrome or odd overall parity.
pub fn self_detect(code: &ComponentCode, decoded: &BitMatrix) -> SelfDetection {
    scan(code, (0..code.k()).map(|r| decoded.row(r).to_vec()))
}

/// Column counterpart of [`self_detect`], used when decoding ended on a row
/// half-iteration.
pub fn self_detect_columns(code: &ComponentCode, decoded: &BitMatrix) -> SelfDetection {
    scan(code, (0..code.k()).map(|c| decoded.column(c)))
}

fn scan(code: &ComponentCode, lines: impl Iterator<Item = Vec<u8>>) -> SelfDetection {
    let per_line = 0.5 * (2.0 * code.nu() as f64 - 1.0) * code.k() as f64;
    let mut checked = 0usize;
    for (i, line) in lines.enumerate() {
        checked += 1;
        if !code.is_codeword(&line) {
            return SelfDetection {
                clean: false,
                x_hat: Some(i + 1),
                xor_count: per_line * checked as f64,
            };
        }
    }
    SelfDetection {
        clean: true,
        x_hat: None,
        xor_count: per_line * checked as f64,
    }
}
