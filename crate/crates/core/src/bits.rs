//! Square binary and real matrices used throughout the codec and decoder.
//!
//! Bits are stored one per `u8` (0 or 1), row-major. Product-code sizes stay
//! below 128x128 so packing buys little and would complicate the decoders.

use crate::{Error, Result};

/// An `n x n` binary matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n: usize,
    data: Vec<u8>,
}

impl BitMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0; n * n] }
    }

    pub fn from_vec(n: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::param(format!(
                "matrix data has {} entries, expected {}",
                data.len(),
                n * n
            )));
        }
        if data.iter().any(|&b| b > 1) {
            return Err(Error::param("matrix entries must be 0 or 1"));
        }
        Ok(Self { n, data })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.n + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, bit: u8) {
        self.data[row * self.n + col] = bit & 1;
    }

    #[inline]
    pub fn flip(&mut self, row: usize, col: usize) {
        self.data[row * self.n + col] ^= 1;
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.data[row * self.n..(row + 1) * self.n]
    }

    pub fn row_mut(&mut self, row: usize) -> &mut [u8] {
        &mut self.data[row * self.n..(row + 1) * self.n]
    }

    pub fn column(&self, col: usize) -> Vec<u8> {
        (0..self.n).map(|r| self.get(r, col)).collect()
    }

    pub fn set_column(&mut self, col: usize, bits: &[u8]) {
        for (r, &b) in bits.iter().enumerate() {
            self.set(r, col, b);
        }
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.data
    }

    /// Number of positions where `self` and `other` differ.
    pub fn hamming_distance(&self, other: &BitMatrix) -> usize {
        self.data
            .iter()
            .zip(&other.data)
            .filter(|(a, b)| a != b)
            .count()
    }

    /// The top-left `k x k` block, row-major.
    pub fn top_left(&self, k: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(k * k);
        for r in 0..k {
            out.extend_from_slice(&self.row(r)[..k]);
        }
        out
    }
}

/// An `n x n` real matrix of soft values. The sign carries the bit decision
/// (positive means bit 0) and the magnitude carries the reliability.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftMatrix {
    n: usize,
    values: Vec<f64>,
}

impl SoftMatrix {
    pub fn from_vec(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::param(format!(
                "soft matrix has {} entries, expected {}",
                values.len(),
                n * n
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("soft matrix entries must be finite"));
        }
        Ok(Self { n, values })
    }

    pub fn filled(n: usize, value: f64) -> Self {
        Self { n, values: vec![value; n * n] }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n + col]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[cfg(test)]
    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}
