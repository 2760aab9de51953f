/// One feedback message as seen by the transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AckEvent {
    /// Transmission round the feedback refers to, from 1.
    pub round: usize,
    pub nack: bool,
}

/// Per-round PER from the last `window` feedback messages of each round.
///
/// Returns `rounds` entries; a round without events yields `None`. A zero
/// window yields no estimates.
pub fn estimate_per_from_acks(log: &[AckEvent], window: usize, rounds: usize) -> Vec<Option<f64>> {
    (1..=rounds)
        .map(|round| {
            let mut seen = 0usize;
            let mut nacks = 0usize;
            for e in log.iter().rev().filter(|e| e.round == round).take(window) {
                seen += 1;
                nacks += e.nack as usize;
            }
            (seen > 0).then(|| nacks as f64 / seen as f64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn events(round: usize, pattern: &[bool]) -> Vec<AckEvent> {
        pattern.iter().map(|&nack| AckEvent { round, nack }).collect()
    }

    #[test]
    fn counts_recent_nacks() {
        let mut log = events(1, &[true, false, true, false, false, false, true, false, false, false]);
        assert_eq!(estimate_per_from_acks(&log, 10, 2), vec![Some(0.3), None]);
        log.extend(events(2, &[true, true]));
        log.extend(events(1, &[false; 5]));
        // window keeps the five newest round-1 events plus five older ones
        assert_eq!(estimate_per_from_acks(&log, 10, 2), vec![Some(0.1), Some(1.0)]);
        assert_eq!(estimate_per_from_acks(&log, 5, 2)[0], Some(0.0));
    }

    #[test]
    fn empty_log() {
        assert_eq!(estimate_per_from_acks(&[], 10, 3), vec![None; 3]);
        assert_eq!(estimate_per_from_acks(&events(1, &[false; 4]), 10, 1), vec![Some(0.0)]);
    }
}
