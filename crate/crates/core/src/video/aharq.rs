use crate::analysis::{session_delay, LinkTiming};
use crate::codec::HarqConfig;
use crate::video::{Frame, FrameType};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct AharqConfig {
    /// Preroll: frames buffered before playback starts.
    pub b_p: usize,
    pub b_th_i: usize,
    pub b_th_p: usize,
    pub b_th_b: usize,
    /// Frame types the controller may falsely acknowledge or truncate.
    pub false_ack_types: Vec<FrameType>,
    /// Nominal retransmission limit `M`.
    pub base_m: usize,
}

impl AharqConfig {
    /// Thresholds 2 / 8 / `b_p` frames, adaptation on B frames only.
    pub fn new(b_p: usize, base_m: usize) -> Result<Self> {
        let c = Self {
            b_p,
            b_th_i: 2,
            b_th_p: 8,
            b_th_b: b_p,
            false_ack_types: vec![FrameType::B],
            base_m,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b_th_i < self.b_th_p && self.b_th_p < self.b_th_b) {
            return Err(Error::param(format!(
                "thresholds must satisfy I < P < B, got {} / {} / {}",
                self.b_th_i, self.b_th_p, self.b_th_b
            )));
        }
        if self.b_p == 0 || self.base_m == 0 {
            return Err(Error::param("preroll and base M must be >= 1"));
        }
        Ok(())
    }

    pub fn threshold(&self, kind: FrameType) -> usize {
        match kind {
            FrameType::I => self.b_th_i,
            FrameType::P => self.b_th_p,
            FrameType::B => self.b_th_b,
        }
    }
}

/// What the transmitter does with a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Normal,
    /// Retransmission limit lowered to the given value.
    ReducedM(usize),
    /// Acknowledged after the first transmission whatever the outcome.
    FalseAck,
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Decision::Normal => write!(f, "NORMAL"),
            Decision::ReducedM(m) => write!(f, "REDUCED_M({m})"),
            Decision::FalseAck => write!(f, "FALSE_ACK"),
        }
    }
}

/// The HARQ link a video is streamed over.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoLink {
    pub harq: HarqConfig,
    /// Subpacket PER of rounds `1..=M` at the operating SNR.
    pub per_rounds: Vec<f64>,
    pub timing: LinkTiming,
    /// Subpacket retransmissions; otherwise every `kappa`-bit block is a
    /// packet of its own.
    pub subpacketized: bool,
}

impl VideoLink {
    pub fn validate(&self) -> Result<()> {
        self.harq.validate()?;
        self.timing.validate()?;
        if self.per_rounds.len() != self.harq.max_rounds {
            return Err(Error::param("link needs one PER value per round"));
        }
        if self.per_rounds.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::param("PER values must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Information bits carried by one packet.
    pub fn packet_payload(&self) -> usize {
        self.harq.kappa() * if self.subpacketized { self.harq.subpackets } else { 1 }
    }
}

/// Delivery budget `(B_C - B_TH) / f_P` in seconds; negative when the buffer
/// is below the threshold.
pub fn budget_time(b_c: usize, b_th: usize, fps: f64) -> f64 {
    (b_c as f64 - b_th as f64) / fps
}

/// Expected time to send a frame with the retransmission limit set to `m`.
pub fn estimate_frame_delivery(size_bits: u64, link: &VideoLink, m: usize) -> Result<f64> {
    if m == 0 || m > link.per_rounds.len() {
        return Err(Error::param(format!("limit {m} outside 1..={}", link.per_rounds.len())));
    }
    let packets = size_bits as f64 / link.packet_payload() as f64;
    session_delay(&link.harq, &link.per_rounds[..m], &link.timing, packets, link.subpacketized)
}

/// A-HARQ decision for a frame about to be sent with `b_c` frames buffered.
pub fn aharq_decide(frame: &Frame, b_c: usize, link: &VideoLink, fps: f64, cfg: &AharqConfig) -> Result<Decision> {
    if !cfg.false_ack_types.contains(&frame.kind) {
        return Ok(Decision::Normal);
    }
    let threshold = cfg.threshold(frame.kind);
    if b_c < threshold {
        return Ok(Decision::FalseAck);
    }
    let budget = budget_time(b_c, threshold, fps);
    let top = cfg.base_m.min(link.per_rounds.len());
    for m in (1..=top).rev() {
        if estimate_frame_delivery(frame.size_bits, link, m)? <= budget {
            return Ok(if m == top { Decision::Normal } else { Decision::ReducedM(m) });
        }
    }
    Ok(Decision::FalseAck)
}
