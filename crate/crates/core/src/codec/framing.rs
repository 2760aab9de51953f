use crate::codec::{encode_product, ComponentCode, CrcSpec, ProductCodeword};
use crate::{Error, Result};

/// How the receiver decides whether a decoded subpacket is correct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Detection {
    /// CRC appended to the information before product encoding.
    Crc(CrcSpec),
    /// Syndromes of the first `k` decoded rows; no CRC overhead.
    SelfDetect,
    /// Genie comparison against the transmitted information.
    Perfect,
}

impl Detection {
    pub fn crc_bits(&self) -> usize {
        match self {
            Detection::Crc(spec) => spec.degree as usize,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderMode {
    /// Hard-input hard-output iterative decoding.
    Hiho,
    /// Chase-Pyndiah soft-input soft-output decoding.
    Siso,
}

/// Geometry and receiver configuration of the subpacket HARQ link.
#[derive(Debug, Clone, PartialEq)]
pub struct HarqConfig {
    pub code: ComponentCode,
    /// Subpackets (product codewords) per packet.
    pub subpackets: usize,
    /// Maximum number of transmission rounds per subpacket.
    pub max_rounds: usize,
    pub detection: Detection,
    pub decoder: DecoderMode,
    /// Least-reliable positions flipped by the Chase decoder.
    pub chase_p: usize,
    /// Full (row + column) decoding iterations.
    pub max_iters: usize,
}

impl HarqConfig {
    /// Defaults: one subpacket, M=4, SISO with p=4 and four iterations.
    pub fn new(code: ComponentCode, detection: Detection) -> Self {
        Self {
            code,
            subpackets: 1,
            max_rounds: 4,
            detection,
            decoder: DecoderMode::Siso,
            chase_p: 4,
            max_iters: 4,
        }
    }

    pub fn with_subpackets(mut self, l: usize) -> Self {
        self.subpackets = l;
        self
    }

    pub fn with_max_rounds(mut self, m: usize) -> Self {
        self.max_rounds = m;
        self
    }

    pub fn with_decoder(mut self, mode: DecoderMode) -> Self {
        self.decoder = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.subpackets == 0 {
            return Err(Error::param("subpackets per packet must be >= 1"));
        }
        if self.max_rounds == 0 {
            return Err(Error::param("max transmission rounds must be >= 1"));
        }
        if self.max_iters == 0 {
            return Err(Error::param("max decoding iterations must be >= 1"));
        }
        if !(1..=8).contains(&self.chase_p) || self.chase_p > self.code.n() {
            return Err(Error::param("chase p must be in 1..=8 and at most n"));
        }
        let k2 = self.code.k() * self.code.k();
        if self.detection.crc_bits() >= k2 {
            return Err(Error::param("CRC does not fit inside the information block"));
        }
        Ok(())
    }

    /// Subpacket length `N = n^2`.
    pub fn subpacket_bits(&self) -> usize {
        self.code.n() * self.code.n()
    }

    /// Packet length `L * N`.
    pub fn packet_bits(&self) -> usize {
        self.subpackets * self.subpacket_bits()
    }

    /// Information bits per subpacket: `k^2 - l_crc`.
    pub fn kappa(&self) -> usize {
        self.code.k() * self.code.k() - self.detection.crc_bits()
    }

    /// Effective code rate `kappa / N`.
    pub fn rate(&self) -> f64 {
        self.kappa() as f64 / self.subpacket_bits() as f64
    }
}

/// Splits `kappa * L` information bits into `L` subpackets, appends the CRC
/// when configured, and product-encodes each part.
pub fn build_packet(cfg: &HarqConfig, info: &[u8]) -> Result<Vec<ProductCodeword>> {
    let kappa = cfg.kappa();
    if info.len() != kappa * cfg.subpackets {
        return Err(Error::param(format!(
            "packet info has {} bits, expected {} x {}",
            info.len(),
            cfg.subpackets,
            kappa
        )));
    }
    info.chunks(kappa).map(|part| encode_subpacket(cfg, part)).collect()
}

pub(crate) fn encode_subpacket(cfg: &HarqConfig, part: &[u8]) -> Result<ProductCodeword> {
    match &cfg.detection {
        Detection::Crc(spec) => encode_product(&cfg.code, &spec.append(part)?),
        _ => encode_product(&cfg.code, part),
    }
}
