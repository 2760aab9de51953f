//! BPSK over AWGN or iid Rayleigh fading, and the MRC Chase combiner.
//!
//! The model is real baseband after coherent matched filtering: a received
//! value is `r = |f| s + w` with `s = 1 - 2b`, unit symbol energy and
//! `w ~ N(0, N0/2)`. With perfect channel knowledge at the combiner this is
//! statistically equivalent to the complex model for BPSK.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::bits::{BitMatrix, SoftMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    Awgn,
    Rayleigh,
}

/// Channel with SNR defined per information bit: `Es/N0 = rate * Eb/N0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    pub kind: ChannelKind,
    pub ebn0_db: f64,
    /// Information bits per transmitted symbol (`kappa / N`).
    pub code_rate: f64,
    /// Mean fading power `E|f|^2` (Rayleigh only).
    pub sigma_f_sq: f64,
}

impl ChannelModel {
    pub fn new(kind: ChannelKind, ebn0_db: f64, code_rate: f64) -> Self {
        Self {
            kind,
            ebn0_db,
            code_rate,
            sigma_f_sq: 1.0,
        }
    }

    pub fn awgn(ebn0_db: f64, code_rate: f64) -> Self {
        Self::new(ChannelKind::Awgn, ebn0_db, code_rate)
    }

    pub fn rayleigh(ebn0_db: f64, code_rate: f64) -> Self {
        Self::new(ChannelKind::Rayleigh, ebn0_db, code_rate)
    }

    pub fn with_ebn0_db(mut self, ebn0_db: f64) -> Self {
        self.ebn0_db = ebn0_db;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.code_rate > 0.0 && self.code_rate <= 1.0) {
            return Err(Error::param(format!("code rate {} outside (0, 1]", self.code_rate)));
        }
        if !self.ebn0_db.is_finite() {
            return Err(Error::param("Eb/N0 must be finite"));
        }
        if self.kind == ChannelKind::Rayleigh && !(self.sigma_f_sq > 0.0) {
            return Err(Error::param("fading variance must be positive"));
        }
        Ok(())
    }

    /// Symbol SNR `Es/N0` (linear).
    pub fn es_n0(&self) -> f64 {
        self.code_rate * 10f64.powf(self.ebn0_db / 10.0)
    }

    /// Noise spectral density for unit symbol energy.
    pub fn n0(&self) -> f64 {
        1.0 / self.es_n0()
    }

    pub fn noise_std(&self) -> f64 {
        (self.n0() / 2.0).sqrt()
    }
}

/// One received copy of a block of symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct Reception {
    /// Matched-filter outputs.
    pub soft: Vec<f64>,
    /// Fading magnitudes `|f|` (all ones on AWGN, strictly positive).
    pub fading: Vec<f64>,
}

/// `0 -> +1`, `1 -> -1`.
pub fn modulate(bits: &BitMatrix) -> Vec<f64> {
    modulate_bits(bits.as_slice())
}

pub fn modulate_bits(bits: &[u8]) -> Vec<f64> {
    bits.iter().map(|&b| 1.0 - 2.0 * (b & 1) as f64).collect()
}

/// Passes `symbols` through the channel, drawing fading and noise from `rng`.
pub fn transmit<R: Rng + ?Sized>(symbols: &[f64], model: &ChannelModel, rng: &mut R) -> Reception {
    let std = model.noise_std();
    let mut soft = Vec::with_capacity(symbols.len());
    let mut fading = Vec::with_capacity(symbols.len());
    for &s in symbols {
        let f = match model.kind {
            ChannelKind::Awgn => 1.0,
            ChannelKind::Rayleigh => loop {
                let power: f64 = Exp1.sample(rng);
                let f = (model.sigma_f_sq * power).sqrt();
                if f > 0.0 {
                    break f;
                }
            },
        };
        let w: f64 = StandardNormal.sample(rng);
        soft.push(f * s + std * w);
        fading.push(f);
    }
    Reception { soft, fading }
}

/// Output of the Chase combiner.
#[derive(Debug, Clone, PartialEq)]
pub struct Combined {
    /// `R_C = sum_i a_i r_i` with `a_i = f_i / sum_j |f_j|^2`.
    pub values: Vec<f64>,
    /// Combined channel power `sum_j |f_j|^2` per position.
    pub gain: Vec<f64>,
}

impl Combined {
    pub fn soft_matrix(&self, n: usize) -> Result<SoftMatrix> {
        SoftMatrix::from_vec(n, self.values.clone())
    }

    /// `R_C` weighted by the combined channel power, proportional to the bit
    /// log-likelihood ratio. This is the soft input handed to the SISO decoder.
    pub fn reliability_matrix(&self, n: usize) -> Result<SoftMatrix> {
        let v = self.values.iter().zip(&self.gain).map(|(r, g)| r * g).collect();
        SoftMatrix::from_vec(n, v)
    }
}

/// Maximal-ratio combining of all stored receptions of one block.
pub fn mrc_combine(receptions: &[Reception]) -> Result<Combined> {
    let first = receptions
        .first()
        .ok_or_else(|| Error::param("combiner needs at least one reception"))?;
    let len = first.soft.len();
    if receptions
        .iter()
        .any(|r| r.soft.len() != len || r.fading.len() != len)
    {
        return Err(Error::param("receptions have mismatched dimensions"));
    }
    let mut numerator = vec![0.0f64; len];
    let mut gain = vec![0.0f64; len];
    for rx in receptions {
        for i in 0..len {
            numerator[i] += rx.fading[i] * rx.soft[i];
            gain[i] += rx.fading[i] * rx.fading[i];
        }
    }
    if gain.iter().any(|&g| !(g > 0.0)) {
        return Err(Error::Numeric("zero combined channel power".into()));
    }
    let values = numerator.iter().zip(&gain).map(|(x, g)| x / g).collect();
    Ok(Combined { values, gain })
}
