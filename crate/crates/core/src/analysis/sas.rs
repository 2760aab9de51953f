use crate::channel::ChannelKind;
use crate::harq::PerTable;
use crate::{Error, Result};

/// Floor applied to zero PER cells before taking logarithms.
const PER_FLOOR: f64 = 1e-9;

/// Single-shot PER as a function of Eb/N0, interpolated linearly in
/// (dB, log10 PER) and clamped at both ends of the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PerCurve {
    snr_db: Vec<f64>,
    per: Vec<f64>,
}

impl PerCurve {
    pub fn new(snr_db: Vec<f64>, per: Vec<f64>) -> Result<Self> {
        if snr_db.is_empty() || snr_db.len() != per.len() {
            return Err(Error::param("PER curve needs matching, non-empty grid and values"));
        }
        if snr_db.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::param("SNR grid must be strictly ascending"));
        }
        if per.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::param("PER values must lie in [0, 1]"));
        }
        Ok(Self { snr_db, per })
    }

    /// Round-1 row of a measured table.
    pub fn from_table(table: &PerTable) -> Result<Self> {
        Self::new(table.snr_grid_db.clone(), table.per_round[0].clone())
    }

    pub fn snr_db(&self) -> &[f64] {
        &self.snr_db
    }

    pub fn per(&self) -> &[f64] {
        &self.per
    }

    pub fn eval_db(&self, db: f64) -> f64 {
        let (x, y) = (&self.snr_db, &self.per);
        let last = x.len() - 1;
        if db.is_nan() || db <= x[0] {
            return y[0];
        }
        if db >= x[last] {
            return y[last];
        }
        let i = x.partition_point(|&v| v <= db) - 1;
        if y[i] == 0.0 && y[i + 1] == 0.0 {
            return 0.0;
        }
        let t = (db - x[i]) / (x[i + 1] - x[i]);
        let (a, b) = (y[i].max(PER_FLOOR).log10(), y[i + 1].max(PER_FLOOR).log10());
        10f64.powf(a + t * (b - a)).clamp(0.0, 1.0)
    }
}

/// `E{rho} = 1 + sum_{i<M} prod_{j<=i} P_j`.
pub fn expected_rho(per_rounds: &[f64]) -> f64 {
    let mut acc = 1.0;
    let mut prod = 1.0;
    for &p in per_rounds.iter().take(per_rounds.len().saturating_sub(1)) {
        prod *= p;
        acc += prod;
    }
    acc
}

/// `E{rho} = M - sum_{i<M} (M - i)(1 - P_i) prod_{j<i} P_j`; same value as
/// [`expected_rho`], kept as a cross-check.
pub fn expected_rho_complement(per_rounds: &[f64]) -> f64 {
    let m = per_rounds.len();
    let mut acc = m as f64;
    let mut prod = 1.0;
    for (i, &p) in per_rounds.iter().enumerate().take(m.saturating_sub(1)) {
        acc -= (m - i - 1) as f64 * (1.0 - p) * prod;
        prod *= p;
    }
    acc
}

/// Probability a subpacket fails all `M` rounds.
pub fn drop_rate(per_rounds: &[f64]) -> f64 {
    per_rounds.iter().product()
}

/// `(kappa / N)(1 - P_D) / E{rho}`.
pub fn throughput_from_rounds(per_rounds: &[f64], kappa: usize, n_bits: usize) -> f64 {
    kappa as f64 / n_bits as f64 * (1.0 - drop_rate(per_rounds)) / expected_rho(per_rounds)
}

/// Throughput with an imperfect detector: round `i` is NACKed with
/// probability `P_E + P_F - P_M`, clamped to `[0, 1]`.
pub fn throughput_with_detection(
    per_rounds: &[f64],
    far_rounds: &[f64],
    mdr_rounds: &[f64],
    kappa: usize,
    n_bits: usize,
) -> Result<f64> {
    if far_rounds.len() != per_rounds.len() || mdr_rounds.len() != per_rounds.len() {
        return Err(Error::param("PER, FAR and MDR need one value per round"));
    }
    let declared: Vec<f64> = per_rounds
        .iter()
        .zip(far_rounds)
        .zip(mdr_rounds)
        .map(|((p, f), m)| (p + f - m).clamp(0.0, 1.0))
        .collect();
    Ok(throughput_from_rounds(&declared, kappa, n_bits))
}

/// Distribution of packet transmission sessions `R = max` over `L`
/// subpackets. Returns the PMF over `1..=M` and `E{R}`.
pub fn packet_tx_stats(per_rounds: &[f64], subpackets: usize) -> Result<(Vec<f64>, f64)> {
    if subpackets == 0 || per_rounds.is_empty() {
        return Err(Error::param("need L >= 1 and at least one round"));
    }
    let m = per_rounds.len();
    let l = subpackets as i32;
    let mut pmf = Vec::with_capacity(m);
    let mut prev_cdf = 0.0;
    let mut tail = 1.0;
    for (i, &p) in per_rounds.iter().enumerate() {
        let cdf = if i + 1 == m {
            1.0
        } else {
            tail *= p;
            (1.0 - tail).powi(l)
        };
        pmf.push(cdf - prev_cdf);
        prev_cdf = cdf;
    }
    let mean = pmf.iter().enumerate().map(|(i, q)| (i + 1) as f64 * q).sum();
    Ok((pmf, mean))
}

/// BER of BPSK with `ell`-branch MRC over iid Rayleigh fading at mean
/// branch SNR `gamma` (linear).
pub fn rayleigh_diversity_ber(gamma: f64, ell: usize) -> f64 {
    let (p, _) = diversity_terms(gamma, ell);
    p
}

/// Returns `(p, 1 - p)` without cancellation at high SNR.
fn diversity_terms(gamma: f64, ell: usize) -> (f64, f64) {
    let lambda = gamma / (1.0 + gamma);
    let root = lambda.sqrt();
    let low = 0.5 / ((1.0 + gamma) * (1.0 + root)); // (1 - sqrt(lambda)) / 2
    let high = 0.5 * (1.0 + root);
    let mut sum = 0.0;
    let mut binom = 1.0;
    let mut high_pow = 1.0;
    for i in 0..ell {
        if i > 0 {
            binom *= (ell - 1 + i) as f64 / i as f64;
            high_pow *= high;
        }
        sum += binom * high_pow;
    }
    let p = low.powi(ell as i32) * sum;
    (p, 1.0 - p)
}

/// SNR at which a single Rayleigh branch has the same BER as `ell`-branch
/// MRC at `gamma`: `Psi = beta^2 / (1 - beta^2)` with `beta = 1 - 2 p_ell`.
pub fn equivalent_snr(gamma: f64, ell: usize) -> Result<f64> {
    if !(gamma > 0.0) || ell == 0 {
        return Err(Error::param("equivalent SNR needs gamma > 0 and ell >= 1"));
    }
    if ell == 1 {
        return Ok(gamma);
    }
    let (p, q) = diversity_terms(gamma, ell);
    if !(p > 0.0) {
        return Err(Error::Numeric(format!("diversity BER underflow at gamma {gamma}, ell {ell}")));
    }
    let beta = q - p;
    // 1 - beta^2 = 4 p (1 - p)
    Ok(beta * beta / (4.0 * p * q))
}

/// What the semi-analytical solution needs: the single-shot PER curve and
/// the link geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct SasInputs {
    pub curve: PerCurve,
    pub max_rounds: usize,
    pub kappa: usize,
    pub n_bits: usize,
    pub kind: ChannelKind,
}

impl SasInputs {
    pub fn new(curve: PerCurve, max_rounds: usize, kappa: usize, n_bits: usize, kind: ChannelKind) -> Result<Self> {
        if max_rounds == 0 || kappa == 0 || kappa > n_bits {
            return Err(Error::param("SAS needs M >= 1 and 0 < kappa <= N"));
        }
        Ok(Self {
            curve,
            max_rounds,
            kappa,
            n_bits,
            kind,
        })
    }

    pub fn rate(&self) -> f64 {
        self.kappa as f64 / self.n_bits as f64
    }

    /// `P_E^(l)(gamma)` for `l = 1..=M` at Eb/N0 `gamma_db`. After `l`
    /// combined copies the AWGN SNR is `l * gamma`; on Rayleigh it is the
    /// equivalent single-branch SNR of `l`-order diversity, evaluated on the
    /// symbol SNR.
    pub fn per_rounds(&self, gamma_db: f64) -> Result<Vec<f64>> {
        (1..=self.max_rounds)
            .map(|ell| {
                let db = match self.kind {
                    ChannelKind::Awgn => gamma_db + 10.0 * (ell as f64).log10(),
                    ChannelKind::Rayleigh => {
                        let es = self.rate() * 10f64.powf(gamma_db / 10.0);
                        if es == 0.0 {
                            gamma_db
                        } else {
                            10.0 * (equivalent_snr(es, ell)? / self.rate()).log10()
                        }
                    }
                };
                Ok(self.curve.eval_db(db))
            })
            .collect()
    }
}

/// Throughput predicted from the single-shot PER curve alone.
pub fn sas_throughput(inputs: &SasInputs, gamma_db: f64) -> Result<f64> {
    let rounds = inputs.per_rounds(gamma_db)?;
    Ok(throughput_from_rounds(&rounds, inputs.kappa, inputs.n_bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Mean of the truncated geometric law, by enumeration of its PMF.
    fn rho_oracle(p: &[f64]) -> f64 {
        let m = p.len();
        let mut mean = 0.0;
        let mut reach = 1.0;
        for (i, &pi) in p.iter().enumerate() {
            let stop = if i + 1 == m { reach } else { reach * (1.0 - pi) };
            mean += (i + 1) as f64 * stop;
            reach *= pi;
        }
        mean
    }

    #[test]
    fn expected_rho_examples() {
        assert_eq!(expected_rho(&[0.0; 4]), 1.0);
        assert_eq!(expected_rho(&[1.0; 4]), 4.0);
        assert!((expected_rho(&[0.5, 0.2, 0.1]) - 1.6).abs() < 1e-15);
        assert!((rho_oracle(&[0.5, 0.2, 0.1]) - 1.6).abs() < 1e-15);
        assert_eq!(drop_rate(&[0.5, 0.2]), 0.1);
        assert_eq!(drop_rate(&[0.3, 0.0, 1.0]), 0.0);
    }

    proptest! {
        #[test]
        fn rho_forms_agree(p in proptest::collection::vec(0.0f64..=1.0, 1..8)) {
            let a = expected_rho(&p);
            prop_assert!((a - expected_rho_complement(&p)).abs() < 1e-12);
            prop_assert!((a - rho_oracle(&p)).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolation_rule() {
        let c = PerCurve::new(vec![0.0, 2.0, 4.0], vec![1e-1, 1e-3, 0.0]).unwrap();
        assert!((c.eval_db(1.0) - 1e-2).abs() < 1e-12);
        assert_eq!(c.eval_db(-5.0), 1e-1);
        assert_eq!(c.eval_db(9.0), 0.0);
        // zero cell floored at 1e-9 between grid points
        assert!((c.eval_db(3.0) - (1e-3f64 * 1e-9).sqrt()).abs() < 1e-15);
        assert!(PerCurve::new(vec![1.0, 0.0], vec![0.1, 0.1]).is_err());
    }

    #[test]
    fn sas_examples() {
        let zero = PerCurve::new(vec![0.0, 10.0], vec![0.0, 0.0]).unwrap();
        let s = SasInputs::new(zero, 4, 105, 256, ChannelKind::Awgn).unwrap();
        assert_eq!(sas_throughput(&s, 3.0).unwrap(), 105.0 / 256.0);

        let c = PerCurve::new(vec![0.0, 5.0, 10.0], vec![0.9, 0.2, 0.01]).unwrap();
        let one = SasInputs::new(c.clone(), 1, 105, 256, ChannelKind::Awgn).unwrap();
        assert!((sas_throughput(&one, 5.0).unwrap() - 0.8 * 105.0 / 256.0).abs() < 1e-12);

        // step at 6 dB: at 4 dB one copy fails, two copies (7.01 dB) succeed
        let step = PerCurve::new(vec![5.99, 6.0], vec![1.0, 0.0]).unwrap();
        let two = SasInputs::new(step, 2, 105, 256, ChannelKind::Awgn).unwrap();
        assert_eq!(two.per_rounds(4.0).unwrap(), vec![1.0, 0.0]);
        assert_eq!(sas_throughput(&two, 4.0).unwrap(), 0.5 * 105.0 / 256.0);
    }

    #[test]
    fn psi_identity_and_monotonicity() {
        for g in [0.1, 1.0, 10.0] {
            assert_eq!(equivalent_snr(g, 1).unwrap(), g);
            let mut prev = g;
            for ell in 2..6 {
                let psi = equivalent_snr(g, ell).unwrap();
                assert!(psi > prev);
                prev = psi;
            }
        }
        // closed-form ell = 1 path agrees with the general expression
        let (p, q) = diversity_terms(3.0, 1);
        assert!(((q - p).powi(2) / (4.0 * p * q) - 3.0).abs() < 1e-12);
        assert!(equivalent_snr(0.0, 2).is_err());
    }

    /// Bisection for the single-branch SNR whose Rayleigh BER matches the
    /// two-branch MRC BER at unit SNR.
    #[test]
    fn psi_matches_root_finding() {
        let single = |g: f64| 0.5 * (1.0 - (g / (1.0 + g)).sqrt());
        let target = rayleigh_diversity_ber(1.0, 2);
        let (mut lo, mut hi) = (1e-6f64, 1e6f64);
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if single(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((equivalent_snr(1.0, 2).unwrap() - lo).abs() < 1e-9);
    }

    #[test]
    fn diversity_ber_known_values() {
        // two branches at unit SNR: p = ((1-r)/2)^2 (1 + 2 (1+r)/2), r = sqrt(1/2)
        let r = 0.5f64.sqrt();
        let expected = ((1.0 - r) / 2.0).powi(2) * (1.0 + (1.0 + r));
        assert!((rayleigh_diversity_ber(1.0, 2) - expected).abs() < 1e-15);
        assert!(equivalent_snr(1e6, 4).unwrap().is_finite());
    }

    #[test]
    fn packet_pmf() {
        let (pmf, mean) = packet_tx_stats(&[0.0; 4], 8).unwrap();
        assert_eq!(pmf, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(mean, 1.0);
        let p = [0.5, 0.2, 0.1];
        let (pmf, mean) = packet_tx_stats(&p, 1).unwrap();
        assert!((pmf[0] - 0.5).abs() < 1e-15 && (pmf[1] - 0.4).abs() < 1e-15 && (pmf[2] - 0.1).abs() < 1e-15);
        assert!((mean - expected_rho(&p)).abs() < 1e-15);
        assert!(packet_tx_stats(&p, 0).is_err());
    }

    #[test]
    fn detection_throughput() {
        let p = [0.4, 0.1, 0.02, 0.0];
        let z = [0.0; 4];
        let base = throughput_from_rounds(&p, 3233, 4096);
        assert_eq!(throughput_with_detection(&p, &z, &z, 3233, 4096).unwrap(), base);
        let fa = [0.05, 0.05, 0.0, 0.0];
        assert!(throughput_with_detection(&p, &fa, &z, 3233, 4096).unwrap() < base);
        let inflated = throughput_with_detection(&p, &z, &p, 3233, 4096).unwrap();
        assert_eq!(inflated, 3233.0 / 4096.0);
    }
}
