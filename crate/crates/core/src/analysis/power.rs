use rand_distr::{Binomial, Distribution};

use crate::analysis::sas::{sas_throughput, throughput_from_rounds, SasInputs};
use crate::rng::{stream, Purpose};
use crate::{Error, Result};

/// Average power per successfully delivered information bit, `P / eta`;
/// infinite when nothing gets through.
pub fn avg_power(p_per_bit: f64, eta: f64) -> f64 {
    if eta > 0.0 {
        p_per_bit / eta
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerMethod {
    /// Downward scan in steps of `epsilon * P0`.
    BruteForce,
    Bisection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// Fraction of the full-power throughput that must be kept.
    pub mu: f64,
    /// Relative step (brute force) or tolerance (bisection).
    pub epsilon: f64,
    pub p_max: f64,
    pub method: PowerMethod,
    /// Brute-force starting power; defaults to `p_max`.
    pub start: Option<f64>,
}

impl OptimizerConfig {
    pub fn new(mu: f64, epsilon: f64, p_max: f64, method: PowerMethod) -> Result<Self> {
        let c = Self {
            mu,
            epsilon,
            p_max,
            method,
            start: None,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::param(format!("epsilon = {} outside (0, 1)", self.epsilon)));
        }
        if !(self.mu > 0.0 && self.mu <= 1.0) {
            return Err(Error::param(format!("mu = {} outside (0, 1]", self.mu)));
        }
        if !(self.p_max > 0.0 && self.p_max.is_finite()) {
            return Err(Error::param("p_max must be positive"));
        }
        if let Some(s) = self.start {
            if !(s > 0.0 && s <= self.p_max) {
                return Err(Error::param("start power must lie in (0, p_max]"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerResult {
    pub p_star: f64,
    pub eta_star: f64,
    pub eta_max: f64,
    /// Throughput evaluations, counted the way the iteration formulas count them.
    pub iterations: usize,
    /// `(P_avg(p_max) - P_avg(p_star)) / P_avg(p_max) * 100`.
    pub power_saving_pct: f64,
    /// False when the throughput at `p_max` is zero.
    pub feasible: bool,
}

/// Smallest examined power whose throughput stays at or above
/// `mu * eta(p_max)`. `eta` maps a per-bit power to a throughput.
pub fn optimize_power<F>(mut eta: F, cfg: &OptimizerConfig) -> Result<PowerResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    cfg.validate()?;
    let p_max = cfg.p_max;
    let eta_max = eta(p_max)?;
    if !(eta_max > 0.0) {
        return Ok(PowerResult {
            p_star: p_max,
            eta_star: eta_max,
            eta_max,
            iterations: 1,
            power_saving_pct: 0.0,
            feasible: false,
        });
    }
    let target = cfg.mu * eta_max;
    let (p_star, eta_star, iterations) = match cfg.method {
        PowerMethod::BruteForce => {
            let mut iterations = 1;
            let mut p0 = cfg.start.unwrap_or(p_max);
            let mut eta0 = eta_max;
            if p0 < p_max {
                eta0 = eta(p0)?;
                iterations += 1;
                if eta0 < target {
                    p0 = p_max;
                    eta0 = eta_max;
                }
            }
            let (mut best, mut best_eta) = (p0, eta0);
            for j in 1.. {
                let cand = p0 * (1.0 - j as f64 * cfg.epsilon);
                if cand <= 0.0 {
                    break;
                }
                iterations += 1;
                let e = eta(cand)?;
                if e < target {
                    break;
                }
                best = cand;
                best_eta = e;
            }
            (best, best_eta, iterations)
        }
        PowerMethod::Bisection => {
            let (mut lo, mut hi, mut hi_eta) = (0.0, p_max, eta_max);
            let mut halvings = 0;
            while hi - lo > cfg.epsilon * p_max {
                let mid = 0.5 * (lo + hi);
                let e = eta(mid)?;
                if e < target {
                    lo = mid;
                } else {
                    hi = mid;
                    hi_eta = e;
                }
                halvings += 1;
            }
            (hi, hi_eta, halvings + 2)
        }
    };
    let full = avg_power(p_max, eta_max);
    let saving = (full - avg_power(p_star, eta_star)) / full * 100.0;
    Ok(PowerResult {
        p_star,
        eta_star,
        eta_max,
        iterations,
        power_saving_pct: saving,
        feasible: true,
    })
}

/// SNR in dB obtained with per-bit power `p`, the SNR being linear in power
/// and equal to `gamma_ref_db` at `p_max`.
fn snr_at(p: f64, p_max: f64, gamma_ref_db: f64) -> f64 {
    gamma_ref_db + 10.0 * (p / p_max).log10()
}

/// Optimization with the throughput evaluated from the channel PER table.
pub fn optimize_power_sas(inputs: &SasInputs, cfg: &OptimizerConfig, gamma_ref_db: f64) -> Result<PowerResult> {
    optimize_power(
        |p| {
            if p <= 0.0 {
                return Ok(0.0);
            }
            sas_throughput(inputs, snr_at(p, cfg.p_max, gamma_ref_db))
        },
        cfg,
    )
}

/// Optimization without channel knowledge: at every candidate power the
/// per-round PERs are estimated from the last `window` ACK/NACK messages of
/// each round, which are drawn from the true link.
pub fn optimize_power_blind(
    inputs: &SasInputs,
    cfg: &OptimizerConfig,
    gamma_ref_db: f64,
    window: u64,
    seed: u64,
) -> Result<PowerResult> {
    if window == 0 {
        return Err(Error::param("ACK window must be >= 1"));
    }
    let mut evaluation = 0u64;
    optimize_power(
        |p| {
            evaluation += 1;
            if p <= 0.0 {
                return Ok(0.0);
            }
            let truth = inputs.per_rounds(snr_at(p, cfg.p_max, gamma_ref_db))?;
            let estimate = truth
                .iter()
                .enumerate()
                .map(|(round, &q)| {
                    let mut rng = stream(seed, evaluation, round as u64, Purpose::Feedback);
                    let nacks = Binomial::new(window, q)
                        .map_err(|e| Error::Numeric(e.to_string()))?
                        .sample(&mut rng);
                    Ok(nacks as f64 / window as f64)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(throughput_from_rounds(&estimate, inputs.kappa, inputs.n_bits))
        },
        cfg,
    )
}
