use rand::Rng;

use crate::channel::{modulate, mrc_combine, transmit, ChannelModel, Reception};
use crate::codec::{encode_subpacket, DecoderMode, Detection, HarqConfig};
use crate::decoder::{hard_slice, hiho_decode, siso_decode, DecodeResult, OpCounters};
use crate::rng::{stream, Purpose};
use crate::{Error, Result};

/// Receiver verdict for one decoding attempt, next to the ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundVerdict {
    /// The detector declared the subpacket erroneous (NACK).
    pub declared_error: bool,
    /// The decoded information differs from what was sent.
    pub actual_error: bool,
}

impl RoundVerdict {
    pub fn false_alarm(&self) -> bool {
        self.declared_error && !self.actual_error
    }

    pub fn misdetection(&self) -> bool {
        !self.declared_error && self.actual_error
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubpacketOutcome {
    /// Transmissions used, `1..=M`.
    pub rho: usize,
    /// Accepted by the receiver (`z = 1`); `false` only when dropped at `M`.
    pub delivered: bool,
    /// One verdict per transmission round.
    pub rounds: Vec<RoundVerdict>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PacketOutcome {
    pub subpackets: Vec<SubpacketOutcome>,
    pub ops: OpCounters,
}

impl PacketOutcome {
    /// Transmission sessions of the whole packet: the largest `rho`.
    pub fn packet_rounds(&self) -> usize {
        self.subpackets.iter().map(|s| s.rho).max().unwrap_or(0)
    }
}

/// Random information bits for packet `packet` of an experiment.
pub fn packet_payload(cfg: &HarqConfig, seed: u64, packet: u64) -> Vec<u8> {
    let mut rng = stream(seed, packet, 0, Purpose::Payload);
    (0..cfg.kappa() * cfg.subpackets)
        .map(|_| rng.random::<bool>() as u8)
        .collect()
}

/// Sends one packet through the truncated subpacket HARQ loop.
///
/// Every subpacket is transmitted, all stored copies are MRC-combined and
/// decoded, and the detector decides ACK/NACK; only NACKed subpackets are
/// sent again, up to `M` rounds. Channel draws come from the stream keyed by
/// `(seed, packet * L + subpacket, round)`.
pub fn run_session(
    cfg: &HarqConfig,
    model: &ChannelModel,
    info: &[u8],
    seed: u64,
    packet: u64,
) -> Result<PacketOutcome> {
    cfg.validate()?;
    model.validate()?;
    let kappa = cfg.kappa();
    if info.len() != kappa * cfg.subpackets {
        return Err(Error::param(format!(
            "packet info has {} bits, expected {}",
            info.len(),
            kappa * cfg.subpackets
        )));
    }

    let mut ops = OpCounters::default();
    let mut subpackets = Vec::with_capacity(cfg.subpackets);
    for (s, part) in info.chunks(kappa).enumerate() {
        let codeword = encode_subpacket(cfg, part)?;
        let symbols = modulate(codeword.bits());
        let trial = packet * cfg.subpackets as u64 + s as u64;
        let mut receptions: Vec<Reception> = Vec::with_capacity(cfg.max_rounds);
        let mut rounds = Vec::with_capacity(cfg.max_rounds);
        let mut delivered = false;
        for round in 0..cfg.max_rounds {
            let mut rng = stream(seed, trial, round as u64, Purpose::Channel);
            receptions.push(transmit(&symbols, model, &mut rng));
            let result = decode_receptions(cfg, &receptions)?;
            ops.merge(&result.ops);
            let verdict = judge(cfg, part, &result);
            rounds.push(verdict);
            if !verdict.declared_error {
                delivered = true;
                break;
            }
        }
        subpackets.push(SubpacketOutcome {
            rho: rounds.len(),
            delivered,
            rounds,
        });
    }
    Ok(PacketOutcome { subpackets, ops })
}

pub(crate) fn decode_receptions(cfg: &HarqConfig, receptions: &[Reception]) -> Result<DecodeResult> {
    let n = cfg.code.n();
    let combined = mrc_combine(receptions)?;
    match cfg.decoder {
        DecoderMode::Hiho => {
            let hard = hard_slice(&combined.soft_matrix(n)?);
            hiho_decode(&cfg.code, &hard, cfg.max_iters)
        }
        DecoderMode::Siso => siso_decode(&cfg.code, &combined.reliability_matrix(n)?, cfg.max_iters, cfg.chase_p),
    }
}

/// Applies the configured detector and compares the decoded information
/// bits (parity and CRC excluded) with the transmitted ones.
pub(crate) fn judge(cfg: &HarqConfig, info: &[u8], result: &DecodeResult) -> RoundVerdict {
    let block = result.decoded.top_left(cfg.code.k());
    let actual_error = &block[..info.len()] != info;
    let declared_error = match &cfg.detection {
        Detection::Perfect => actual_error,
        Detection::Crc(spec) => !spec.check(&block),
        Detection::SelfDetect => !result.self_detect_clean,
    };
    RoundVerdict {
        declared_error,
        actual_error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{ComponentCode, CrcSpec};

    fn cfg(detection: Detection) -> HarqConfig {
        HarqConfig::new(ComponentCode::new(4).unwrap(), detection).with_subpackets(3)
    }

    #[test]
    fn noiseless_channel_delivers_in_one_round() {
        let cfg = cfg(Detection::Crc(CrcSpec::CRC16_8005));
        let model = ChannelModel::awgn(60.0, cfg.rate());
        let info = packet_payload(&cfg, 1, 0);
        let out = run_session(&cfg, &model, &info, 1, 0).unwrap();
        assert_eq!(out.packet_rounds(), 1);
        assert!(out.subpackets.iter().all(|s| s.rho == 1 && s.delivered));
    }

    #[test]
    fn hopeless_channel_truncates_at_m() {
        let cfg = cfg(Detection::Perfect);
        let model = ChannelModel::awgn(-40.0, cfg.rate());
        let info = packet_payload(&cfg, 2, 0);
        let out = run_session(&cfg, &model, &info, 2, 0).unwrap();
        for s in &out.subpackets {
            assert_eq!(s.rho, 4);
            assert!(!s.delivered);
            assert!(s.rounds.iter().all(|r| r.declared_error && r.actual_error));
        }
    }

    #[test]
    fn crc_and_genie_agree_up_to_misdetections() {
        let code = ComponentCode::new(4).unwrap();
        let crc_cfg = HarqConfig::new(code, Detection::Crc(CrcSpec::CRC16_8005)).with_decoder(DecoderMode::Hiho);
        // genie view of the same decoder output
        let genie_cfg = HarqConfig {
            detection: Detection::Perfect,
            ..crc_cfg.clone()
        };
        let model = ChannelModel::awgn(2.5, crc_cfg.rate());
        let mut genie_errors = 0;
        for packet in 0..300 {
            let info = packet_payload(&crc_cfg, 5, packet);
            let symbols = modulate(encode_subpacket(&crc_cfg, &info).unwrap().bits());
            let rx = transmit(&symbols, &model, &mut stream(5, packet, 0, Purpose::Channel));
            let result = decode_receptions(&crc_cfg, &[rx]).unwrap();
            let crc = judge(&crc_cfg, &info, &result);
            let genie = judge(&genie_cfg, &info, &result);
            assert_eq!(genie.declared_error, genie.actual_error);
            assert_eq!(crc.actual_error, genie.actual_error);
            if genie.declared_error {
                genie_errors += 1;
                assert!(crc.declared_error || crc.misdetection());
            }
        }
        assert!(genie_errors > 0);
    }

    #[test]
    fn wrong_payload_length() {
        let cfg = cfg(Detection::Perfect);
        let model = ChannelModel::awgn(3.0, cfg.rate());
        assert!(run_session(&cfg, &model, &[0; 5], 0, 0).is_err());
    }
}
