use crate::bits::BitMatrix;
use crate::codec::ComponentCode;
use crate::{Error, Result};

/// A square product codeword: every row and every column is a component
/// codeword. Information sits in the top-left `k x k` block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductCodeword {
    bits: BitMatrix,
}

impl ProductCodeword {
    pub fn bits(&self) -> &BitMatrix {
        &self.bits
    }

    pub fn into_bits(self) -> BitMatrix {
        self.bits
    }
}

/// Encodes `k*k` information bits (row-major) into an `n x n` product codeword:
/// rows first, then every column.
pub fn encode_product(code: &ComponentCode, info: &[u8]) -> Result<ProductCodeword> {
    let (n, k) = (code.n(), code.k());
    if info.len() != k * k {
        return Err(Error::param(format!(
            "product info has {} bits, expected {}x{}",
            info.len(),
            k,
            k
        )));
    }
    let mut bits = BitMatrix::zeros(n);
    for r in 0..k {
        code.encode_into(&info[r * k..(r + 1) * k], bits.row_mut(r));
    }
    let mut column = vec![0u8; n];
    for c in 0..n {
        let top: Vec<u8> = (0..k).map(|r| bits.get(r, c)).collect();
        code.encode_into(&top, &mut column);
        bits.set_column(c, &column);
    }
    Ok(ProductCodeword { bits })
}

/// True when every row and column of `bits` is a component codeword.
pub fn is_product_codeword(code: &ComponentCode, bits: &BitMatrix) -> bool {
    rows_valid(code, bits) && columns_valid(code, bits)
}

fn rows_valid(code: &ComponentCode, bits: &BitMatrix) -> bool {
    (0..bits.size()).all(|r| code.is_codeword(bits.row(r)))
}

fn columns_valid(code: &ComponentCode, bits: &BitMatrix) -> bool {
    (0..bits.size()).all(|c| code.is_codeword(&bits.column(c)))
}
