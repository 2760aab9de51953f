use crate::{Error, Result};

/// Primitive polynomials per field degree, bit `i` is the coefficient of `X^i`.
/// m=3: x^3+x+1, m=4: x^4+x+1, m=5: x^5+x^2+1, m=6: x^6+x+1, m=7: x^7+x^3+1.
const PRIMITIVE_POLYS: [(u32, u32); 5] = [
    (3, 0b1011),
    (4, 0b1_0011),
    (5, 0b10_0101),
    (6, 0b100_0011),
    (7, 0b1000_1001),
];

/// Outcome of hard-decision decoding a single component word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HddStatus {
    /// The word was already a codeword.
    Clean,
    /// A single error was located and flipped.
    Corrected,
    /// An even-weight error pattern (weight >= 2) was detected; the word is
    /// returned unchanged.
    DetectedUncorrectable,
}

/// Extended Hamming code eBCH(2^m, 2^m - m - 1, 4).
///
/// Bit layout of a codeword: positions `0..k` hold the information bits,
/// positions `k..n-1` the cyclic parity bits, and position `n-1` the overall
/// even-parity extension. Position `j < n-1` is the coefficient of
/// `X^(n-2-j)` of the underlying cyclic Hamming codeword, so the information
/// occupies the high-order coefficients and bits are processed
/// most-significant first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentCode {
    m: u32,
    n: usize,
    k: usize,
    generator: u32,
    nu: u32,
    /// Syndrome (as `m`-bit value) of a single error at each cyclic position.
    position_syndromes: Vec<u32>,
    /// Inverse of `position_syndromes`, indexed by syndrome value.
    syndrome_positions: Vec<usize>,
}

impl ComponentCode {
    /// Builds eBCH(2^m, 2^m-m-1, 4) for `3 <= m <= 7`.
    pub fn new(m: u32) -> Result<Self> {
        let generator = PRIMITIVE_POLYS
            .iter()
            .find(|(deg, _)| *deg == m)
            .map(|(_, g)| *g)
            .ok_or_else(|| Error::param(format!("field degree m={m} outside 3..=7")))?;

        let n = 1usize << m;
        let k = n - m as usize - 1;
        let cyclic_len = n - 1;

        let mut position_syndromes = vec![0u32; cyclic_len];
        let mut syndrome_positions = vec![usize::MAX; 1 << m];
        // X^0 mod g = 1, then multiply by X repeatedly.
        let mut power = 1u32;
        for degree in 0..cyclic_len {
            let pos = cyclic_len - 1 - degree;
            position_syndromes[pos] = power;
            syndrome_positions[power as usize] = pos;
            power <<= 1;
            if power & (1 << m) != 0 {
                power ^= generator;
            }
        }
        debug_assert_eq!(power, 1, "generator must be primitive");

        Ok(Self {
            m,
            n,
            k,
            generator,
            nu: generator.count_ones(),
            position_syndromes,
            syndrome_positions,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Codeword length `2^m`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Information length `2^m - m - 1`.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d_min(&self) -> usize {
        4
    }

    /// Generator of the underlying Hamming code, bit `i` = coefficient of `X^i`.
    pub fn generator(&self) -> u32 {
        self.generator
    }

    /// The primitive polynomial defining GF(2^m); equal to the generator for
    /// single-error-correcting codes.
    pub fn primitive_poly(&self) -> u32 {
        self.generator
    }

    /// Number of nonzero coefficients in the generator.
    pub fn nu(&self) -> u32 {
        self.nu
    }

    /// Systematic encoding of `k` information bits.
    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.k {
            return Err(Error::param(format!(
                "component info has {} bits, expected {}",
                info.len(),
                self.k
            )));
        }
        let mut word = vec![0u8; self.n];
        self.encode_into(info, &mut word);
        Ok(word)
    }

    /// Encodes without length checks; `word` must have length `n`.
    pub(crate) fn encode_into(&self, info: &[u8], word: &mut [u8]) {
        let m = self.m;
        let mask = (1u32 << m) - 1;
        let taps = self.generator & mask;
        let mut reg = 0u32;
        for &bit in info {
            let feedback = (bit as u32 & 1) ^ (reg >> (m - 1));
            reg = (reg << 1) & mask;
            if feedback != 0 {
                reg ^= taps;
            }
        }
        word[..self.k].copy_from_slice(info);
        for i in 0..m as usize {
            word[self.k + i] = ((reg >> (m as usize - 1 - i)) & 1) as u8;
        }
        let parity = word[..self.n - 1].iter().fold(0u8, |acc, &b| acc ^ b);
        word[self.n - 1] = parity;
    }

    /// Remainder of the cyclic part (first `n-1` bits) divided by the generator.
    pub fn syndrome(&self, word: &[u8]) -> u32 {
        word[..self.n - 1]
            .iter()
            .zip(&self.position_syndromes)
            .filter(|(&b, _)| b != 0)
            .fold(0u32, |acc, (_, &s)| acc ^ s)
    }

    /// Overall parity of all `n` bits (0 for a codeword).
    pub fn parity(&self, word: &[u8]) -> u8 {
        word.iter().fold(0u8, |acc, &b| acc ^ (b & 1))
    }

    pub fn is_codeword(&self, word: &[u8]) -> bool {
        self.syndrome(word) == 0 && self.parity(word) == 0
    }

    /// Cyclic position whose single-error syndrome equals `syndrome`.
    pub(crate) fn error_position(&self, syndrome: u32) -> usize {
        self.syndrome_positions[syndrome as usize]
    }

    /// Hard-decision decoding: corrects one error, detects two.
    pub fn hdd(&self, word: &[u8]) -> Result<(Vec<u8>, HddStatus)> {
        if word.len() != self.n {
            return Err(Error::param(format!(
                "component word has {} bits, expected {}",
                word.len(),
                self.n
            )));
        }
        let mut out = word.to_vec();
        let status = self.hdd_in_place(&mut out);
        Ok((out, status))
    }

    /// In-place variant of [`hdd`](Self::hdd); leaves the word untouched when
    /// the error is uncorrectable.
    pub(crate) fn hdd_in_place(&self, word: &mut [u8]) -> HddStatus {
        let syndrome = self.syndrome(word);
        let parity = self.parity(word);
        match (syndrome, parity) {
            (0, 0) => HddStatus::Clean,
            (0, _) => {
                word[self.n - 1] ^= 1;
                HddStatus::Corrected
            }
            (s, 1) => {
                word[self.error_position(s)] ^= 1;
                HddStatus::Corrected
            }
            _ => HddStatus::DetectedUncorrectable,
        }
    }

    /// Decodes the cyclic Hamming part (always succeeds, the code is perfect)
    /// and recomputes the extension bit. Used to build Chase candidates.
    pub(crate) fn complete_in_place(&self, word: &mut [u8]) {
        let syndrome = self.syndrome(word);
        if syndrome != 0 {
            word[self.error_position(syndrome)] ^= 1;
        }
        let parity = word[..self.n - 1].iter().fold(0u8, |acc, &b| acc ^ b);
        word[self.n - 1] = parity;
    }

    /// Row weights of the `(n-k) x n` parity-check matrix of the extended code:
    /// `m` rows from the cyclic syndrome map, then the all-ones parity row.
    pub fn parity_check_row_weights(&self) -> Vec<usize> {
        let mut weights: Vec<usize> = (0..self.m)
            .map(|bit| {
                self.position_syndromes
                    .iter()
                    .filter(|&&s| (s >> bit) & 1 == 1)
                    .count()
            })
            .collect();
        weights.push(self.n);
        weights
    }
}
