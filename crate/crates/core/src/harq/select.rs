use crate::analysis::{sas_throughput, SasInputs};
use crate::{Error, Result};

/// One code and packet split competing for the link.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    /// Component code length `n`.
    pub n: usize,
    /// Subpackets per packet.
    pub subpackets: usize,
    pub sas: SasInputs,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    /// Index into the candidate list.
    pub index: usize,
    pub throughput: f64,
}

/// Picks the candidate with the highest semi-analytical throughput at
/// `gamma_db`. Ties go to the higher code rate, then to the shorter code.
pub fn adaptive_code_select(candidates: &[Candidate], gamma_db: f64) -> Result<Selection> {
    let first = candidates
        .first()
        .ok_or_else(|| Error::param("no candidate codes to select from"))?;
    let packet_bits = first.subpackets * first.sas.n_bits;
    if candidates.iter().any(|c| c.subpackets * c.sas.n_bits != packet_bits) {
        return Err(Error::param("candidates must share the packet size"));
    }
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in candidates.iter().enumerate() {
        let eta = sas_throughput(&c.sas, gamma_db)?;
        let better = match best {
            None => true,
            Some((j, b)) => {
                let other = &candidates[j];
                eta > b
                    || (eta == b && c.sas.rate() > other.sas.rate())
                    || (eta == b && c.sas.rate() == other.sas.rate() && c.n < other.n)
            }
        };
        if better {
            best = Some((i, eta));
        }
    }
    let (index, throughput) = best.expect("non-empty candidates");
    Ok(Selection { index, throughput })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::PerCurve;
    use crate::channel::ChannelKind;

    fn cand(n: usize, k: usize, l: usize, per: Vec<f64>) -> Candidate {
        let curve = PerCurve::new(vec![0.0, 2.0, 4.0, 6.0], per).unwrap();
        Candidate {
            n,
            subpackets: l,
            sas: SasInputs::new(curve, 4, k * k - 16, n * n, ChannelKind::Awgn).unwrap(),
        }
    }

    #[test]
    fn single_and_dominant() {
        let a = cand(64, 57, 4, vec![1.0, 0.5, 0.1, 0.0]);
        assert_eq!(adaptive_code_select(&[a.clone()], 3.0).unwrap().index, 0);
        let worse = cand(128, 120, 1, vec![1.0, 0.9, 0.8, 0.5]);
        let better = cand(128, 120, 1, vec![0.5, 0.1, 0.0, 0.0]);
        for g in [0.0, 2.0, 5.0, 9.0] {
            assert_eq!(adaptive_code_select(&[worse.clone(), better.clone()], g).unwrap().index, 1);
        }
    }

    #[test]
    fn ties_prefer_rate_then_length() {
        let zero = vec![0.0; 4];
        let low = cand(128, 120, 1, zero.clone());
        let high = cand(128, 120, 1, zero.clone());
        assert_eq!(adaptive_code_select(&[low, high], 3.0).unwrap().index, 0);
        assert!(adaptive_code_select(&[], 3.0).is_err());
        let a = cand(64, 57, 4, zero.clone());
        let b = cand(128, 120, 2, zero);
        assert!(adaptive_code_select(&[a, b], 3.0).is_err());
    }
}
