use crate::analysis::sas::{expected_rho, packet_tx_stats};
use crate::codec::HarqConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkTiming {
    /// Data rate in bits per second.
    pub chi: f64,
    /// One-way propagation time in seconds.
    pub t_p: f64,
}

impl LinkTiming {
    pub fn new(chi: f64, t_p: f64) -> Result<Self> {
        let t = Self { chi, t_p };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.chi > 0.0 && self.chi.is_finite()) || !(self.t_p >= 0.0 && self.t_p.is_finite()) {
            return Err(Error::param("timing needs chi > 0 and t_p >= 0"));
        }
        Ok(())
    }
}

/// Expected time to deliver `packets` packets (may be fractional).
///
/// Subpacketized: every session sends `E{rho} L N` bits on average and waits
/// one round trip per packet transmission, `E{R}` of them. Otherwise each
/// `kappa`-bit block is its own packet and every transmission pays a round
/// trip.
pub fn session_delay(
    cfg: &HarqConfig,
    per_rounds: &[f64],
    timing: &LinkTiming,
    packets: f64,
    subpacketized: bool,
) -> Result<f64> {
    timing.validate()?;
    let rho = expected_rho(per_rounds);
    let n = cfg.subpacket_bits() as f64;
    let rtt = 2.0 * timing.t_p;
    if subpacketized {
        let (_, mean_r) = packet_tx_stats(per_rounds, cfg.subpackets)?;
        Ok((rho * cfg.subpackets as f64 * n / timing.chi + mean_r * rtt) * packets)
    } else {
        Ok(rho * (n / timing.chi + rtt) * packets)
    }
}

/// Delay of a `k_bits` payload. The payload is padded up to whole packets of
/// `kappa L` bits (`kappa` bits without subpacketization).
pub fn delay_tau(
    cfg: &HarqConfig,
    per_rounds: &[f64],
    timing: &LinkTiming,
    k_bits: u64,
    subpacketized: bool,
) -> Result<f64> {
    let unit = (cfg.kappa() * if subpacketized { cfg.subpackets } else { 1 }) as u64;
    session_delay(cfg, per_rounds, timing, k_bits.div_ceil(unit) as f64, subpacketized)
}

/// Time to send every frame of a video, each frame treated as a fluid
/// `N_F / (kappa L)` packets.
pub fn video_total_delay(
    frame_bits: &[u64],
    cfg: &HarqConfig,
    per_rounds: &[f64],
    timing: &LinkTiming,
) -> Result<f64> {
    if frame_bits.is_empty() {
        return Err(Error::param("trace has no frames"));
    }
    let unit = (cfg.kappa() * cfg.subpackets) as f64;
    let packets: f64 = frame_bits.iter().map(|&b| b as f64 / unit).sum();
    session_delay(cfg, per_rounds, timing, packets, true)
}
