use crate::{Error, Result};

/// A CRC generator `g(X)` of degree `degree`. `poly` omits the leading
/// `X^degree` term (0x8005 for CRC-16/IBM).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrcSpec {
    pub name: &'static str,
    pub degree: u32,
    pub poly: u64,
}

impl CrcSpec {
    pub const CRC8_07: CrcSpec = CrcSpec { name: "CRC-8/07", degree: 8, poly: 0x07 };
    pub const CRC16_8005: CrcSpec = CrcSpec { name: "CRC-16/8005", degree: 16, poly: 0x8005 };
    pub const CRC16_8BB7: CrcSpec = CrcSpec { name: "CRC-16/8BB7", degree: 16, poly: 0x8BB7 };
    pub const CRC32_1EDC6F41: CrcSpec = CrcSpec {
        name: "CRC-32/1EDC6F41",
        degree: 32,
        poly: 0x1EDC_6F41,
    };

    /// All shipped generators.
    pub fn catalog() -> [CrcSpec; 4] {
        [Self::CRC8_07, Self::CRC16_8005, Self::CRC16_8BB7, Self::CRC32_1EDC6F41]
    }

    /// Looks a generator up by its hex polynomial (`"8005"`, `"0x1EDC6F41"`)
    /// or full name.
    pub fn by_name(name: &str) -> Option<CrcSpec> {
        let key = name.trim().trim_start_matches("0x").to_ascii_uppercase();
        Self::catalog().into_iter().find(|c| {
            c.name.eq_ignore_ascii_case(name.trim()) || format!("{:X}", c.poly) == key || format!("{:02X}", c.poly) == key
        })
    }

    /// Number of nonzero coefficients including the leading term.
    pub fn nu_bar(&self) -> u32 {
        self.poly.count_ones() + 1
    }

    fn mask(&self) -> u64 {
        if self.degree == 64 {
            u64::MAX
        } else {
            (1u64 << self.degree) - 1
        }
    }

    /// Remainder of the bit sequence, read as a polynomial with the first bit
    /// as the highest-degree coefficient, modulo `g(X)`.
    pub fn remainder(&self, bits: &[u8]) -> u64 {
        let top = self.degree - 1;
        let mask = self.mask();
        let mut reg = 0u64;
        for &b in bits {
            let carry = (reg >> top) & 1;
            reg = ((reg << 1) | (b as u64 & 1)) & mask;
            if carry != 0 {
                reg ^= self.poly;
            }
        }
        reg
    }

    /// `data || (X^degree * data(X) mod g(X))`, check bits most significant first.
    pub fn append(&self, data: &[u8]) -> Result<Vec<u8>> {
        if data.is_empty() {
            return Err(Error::param("CRC input must be non-empty"));
        }
        let mut out = Vec::with_capacity(data.len() + self.degree as usize);
        out.extend_from_slice(data);
        out.extend(std::iter::repeat_n(0u8, self.degree as usize));
        let rem = self.remainder(&out);
        let d = data.len();
        for i in 0..self.degree as usize {
            out[d + i] = ((rem >> (self.degree as usize - 1 - i)) & 1) as u8;
        }
        Ok(out)
    }

    /// True iff `data_with_crc` is a multiple of `g(X)`.
    pub fn check(&self, data_with_crc: &[u8]) -> bool {
        data_with_crc.len() > self.degree as usize && self.remainder(data_with_crc) == 0
    }
}
