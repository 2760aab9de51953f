use crate::codec::ComponentCode;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ChaseOutput {
    /// Selected codeword (bits).
    pub decision: Vec<u8>,
    /// Extrinsic information per bit, sign convention of the soft input.
    pub extrinsic: Vec<f64>,
    /// Distinct candidate codewords examined.
    pub candidates: usize,
}

/// Chase-II decoding of one component word with Pyndiah soft output.
///
/// The `p` least reliable positions of the hard decision are flipped in all
/// `2^p` combinations; each test pattern is decoded to a codeword (syndrome
/// correction of the cyclic part, extension bit recomputed), and the
/// candidate with the largest correlation to `soft` wins. For bit `j` the
/// soft output is half the correlation gap to the best candidate that
/// disagrees on `j`; with no such competitor it is `beta` times the decided
/// sign. The extrinsic value is the soft output minus the input.
pub fn chase2_component(code: &ComponentCode, soft: &[f64], p: usize, beta: f64) -> Result<ChaseOutput> {
    let n = code.n();
    if soft.len() != n {
        return Err(Error::param(format!("soft word has {} values, expected {n}", soft.len())));
    }
    if !(1..=8).contains(&p) || p > n {
        return Err(Error::param(format!("chase p={p} outside 1..=8")));
    }

    let hard: Vec<u8> = soft.iter().map(|&v| (v < 0.0) as u8).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.select_nth_unstable_by(p - 1, |&a, &b| soft[a].abs().total_cmp(&soft[b].abs()));
    let weak = &order[..p];

    let mut candidates: Vec<(Vec<u8>, f64)> = Vec::with_capacity(1 << p);
    let mut word = vec![0u8; n];
    for pattern in 0u32..(1 << p) {
        word.copy_from_slice(&hard);
        for (bit, &pos) in weak.iter().enumerate() {
            if (pattern >> bit) & 1 == 1 {
                word[pos] ^= 1;
            }
        }
        code.complete_in_place(&mut word);
        if candidates.iter().any(|(c, _)| *c == word) {
            continue;
        }
        let metric = correlation(soft, &word);
        candidates.push((word.clone(), metric));
    }

    let best = candidates
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .expect("at least one test pattern");
    let (decision, best_metric) = candidates[best].clone();

    let extrinsic = (0..n)
        .map(|j| {
            let sign = 1.0 - 2.0 * decision[j] as f64;
            let competitor = candidates
                .iter()
                .filter(|(c, _)| c[j] != decision[j])
                .map(|(_, m)| *m)
                .fold(f64::NEG_INFINITY, f64::max);
            if competitor.is_finite() {
                0.5 * (best_metric - competitor) * sign - soft[j]
            } else {
                beta * sign
            }
        })
        .collect();

    Ok(ChaseOutput {
        decision,
        extrinsic,
        candidates: candidates.len(),
    })
}

fn correlation(soft: &[f64], word: &[u8]) -> f64 {
    soft.iter()
        .zip(word)
        .map(|(&r, &b)| if b == 0 { r } else { -r })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bpsk(word: &[u8], amplitude: f64) -> Vec<f64> {
        word.iter().map(|&b| amplitude * (1.0 - 2.0 * b as f64)).collect()
    }

    #[test]
    fn noiseless_word_is_returned() {
        let code = ComponentCode::new(3).unwrap();
        let cw = code.encode(&[1, 0, 1, 1]).unwrap();
        let out = chase2_component(&code, &bpsk(&cw, 5.0), 4, 0.5).unwrap();
        assert_eq!(out.decision, cw);
    }

    /// eBCH(8,4,4), codeword 10001011 sent as +-1. Position 2 arrives with the
    /// wrong sign at magnitude 0.1; the two weakest positions are 2 and 6.
    /// By hand: patterns {}, {2} and {2,6} all decode to 10001011
    /// (correlation 6.1); pattern {6} decodes to a different codeword at
    /// Hamming distance 4, which loses at least 2 x (1 + 1 - 0.2) in correlation.
    #[test]
    fn weak_sign_flip_is_corrected() {
        let code = ComponentCode::new(3).unwrap();
        let cw = code.encode(&[1, 0, 0, 0]).unwrap();
        assert_eq!(cw, vec![1, 0, 0, 0, 1, 0, 1, 1]);
        let mut soft = bpsk(&cw, 1.0);
        soft[2] = -0.1; // true bit 0 (+1), received negative
        soft[6] = -0.2; // true bit 1 (-1), weak but right
        let out = chase2_component(&code, &soft, 2, 0.5).unwrap();
        assert_eq!(out.decision, cw);
        // every candidate is a codeword
        assert!(code.is_codeword(&out.decision));
        // the corrected position gets a positive (bit 0) soft output
        assert!(out.extrinsic[2] + soft[2] > 0.0);
    }

    #[test]
    fn decision_is_always_a_codeword() {
        let code = ComponentCode::new(4).unwrap();
        let mut state = 12345u64;
        for _ in 0..200 {
            let soft: Vec<f64> = (0..16)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
                })
                .collect();
            let out = chase2_component(&code, &soft, 4, 0.3).unwrap();
            assert!(code.is_codeword(&out.decision));
            assert!(out.extrinsic.iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn rejects_bad_p() {
        let code = ComponentCode::new(3).unwrap();
        assert!(chase2_component(&code, &[1.0; 8], 0, 0.5).is_err());
        assert!(chase2_component(&code, &[1.0; 8], 9, 0.5).is_err());
    }
}
