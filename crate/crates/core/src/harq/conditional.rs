use rand::Rng;
use rayon::prelude::*;

use crate::channel::{modulate, modulate_bits, mrc_combine, transmit, ChannelModel, Reception};
use crate::codec::{encode_subpacket, HarqConfig};
use crate::harq::session::{decode_receptions, judge, packet_payload};
use crate::rng::{stream, Purpose};
use crate::{Error, Result};

/// What is sent in each round of a conditional-PER experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    /// Raw BPSK block of this many bits; any bit error is a NACK.
    Uncoded(usize),
    /// One product-code subpacket with the configured decoder and detector.
    Tpc(HarqConfig),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalPer {
    pub trials: u64,
    /// Trials whose first round was NACKed.
    pub first_nacks: u64,
    /// `P(NACK_2 | NACK_1)`; absent when no first round failed.
    pub conditional: Option<f64>,
    /// Round-2 NACK rate of two fresh, independent receptions.
    pub unconditional: f64,
}

/// Second-round NACK probability with and without conditioning on a
/// first-round failure.
///
/// Each trial draws receptions `r1, r2` and checks the combination of both
/// after a failed `r1`; independently it combines two fresh receptions
/// `r3, r4` and checks them regardless of any earlier outcome.
pub fn measure_conditional_per(block: &Block, model: &ChannelModel, trials: u64, seed: u64) -> Result<ConditionalPer> {
    if trials == 0 {
        return Err(Error::param("trials must be >= 1"));
    }
    model.validate()?;
    if let Block::Uncoded(0) = block {
        return Err(Error::param("uncoded block needs at least one bit"));
    }
    if let Block::Tpc(cfg) = block {
        cfg.validate()?;
    }
    let results: Vec<(bool, bool, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| trial(block, model, seed, t))
        .collect::<Result<_>>()?;
    let first_nacks = results.iter().filter(|r| r.0).count() as u64;
    let second = results.iter().filter(|r| r.0 && r.1).count() as u64;
    let fresh = results.iter().filter(|r| r.2).count() as u64;
    Ok(ConditionalPer {
        trials,
        first_nacks,
        conditional: (first_nacks > 0).then(|| second as f64 / first_nacks as f64),
        unconditional: fresh as f64 / trials as f64,
    })
}

/// `(nack after r1, nack after r1+r2, nack after r3+r4)`.
fn trial(block: &Block, model: &ChannelModel, seed: u64, t: u64) -> Result<(bool, bool, bool)> {
    let rx = |round: u64, symbols: &[f64]| -> Reception {
        transmit(symbols, model, &mut stream(seed, t, round, Purpose::Channel))
    };
    match block {
        Block::Uncoded(len) => {
            let mut rng = stream(seed, t, 0, Purpose::Payload);
            let bits: Vec<u8> = (0..*len).map(|_| rng.random::<bool>() as u8).collect();
            let symbols = modulate_bits(&bits);
            let wrong = |copies: &[Reception]| -> Result<bool> {
                let c = mrc_combine(copies)?;
                Ok(c.values.iter().zip(&bits).any(|(&v, &b)| ((v < 0.0) as u8) != b))
            };
            let (r1, r2, r3, r4) = (rx(0, &symbols), rx(1, &symbols), rx(2, &symbols), rx(3, &symbols));
            let first = wrong(std::slice::from_ref(&r1))?;
            let second = first && wrong(&[r1, r2])?;
            Ok((first, second, wrong(&[r3, r4])?))
        }
        Block::Tpc(cfg) => {
            let info = packet_payload(&cfg.clone().with_subpackets(1), seed, t);
            let symbols = modulate(encode_subpacket(cfg, &info)?.bits());
            let nack = |copies: &[Reception]| -> Result<bool> {
                let result = decode_receptions(cfg, copies)?;
                Ok(judge(cfg, &info, &result).declared_error)
            };
            let (r1, r2, r3, r4) = (rx(0, &symbols), rx(1, &symbols), rx(2, &symbols), rx(3, &symbols));
            let first = nack(std::slice::from_ref(&r1))?;
            let second = first && nack(&[r1, r2])?;
            Ok((first, second, nack(&[r3, r4])?))
        }
    }
}
