use rayon::prelude::*;

use crate::channel::ChannelModel;
use crate::codec::HarqConfig;
use crate::decoder::OpCounters;
use crate::harq::session::{packet_payload, run_session, PacketOutcome};
use crate::harq::PerTable;
use crate::{Error, Result};

/// Per-round detector and ground-truth counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RoundCounts {
    /// Subpackets that reached this round.
    pub at_risk: u64,
    /// NACKs sent in this round.
    pub declared_errors: u64,
    /// Decodes whose information bits were wrong.
    pub actual_errors: u64,
    pub false_alarms: u64,
    pub misdetections: u64,
}

impl RoundCounts {
    fn add(&mut self, other: &RoundCounts) {
        self.at_risk += other.at_risk;
        self.declared_errors += other.declared_errors;
        self.actual_errors += other.actual_errors;
        self.false_alarms += other.false_alarms;
        self.misdetections += other.misdetections;
    }

    /// Fraction of at-risk subpackets declared erroneous.
    pub fn per(&self) -> Option<f64> {
        ratio(self.declared_errors, self.at_risk)
    }

    /// False alarms per at-risk subpacket.
    pub fn far_rate(&self) -> Option<f64> {
        ratio(self.false_alarms, self.at_risk)
    }

    /// Misdetections per at-risk subpacket.
    pub fn mdr_rate(&self) -> Option<f64> {
        ratio(self.misdetections, self.at_risk)
    }

    /// Decoding-error rate regardless of the detector.
    pub fn actual_per(&self) -> Option<f64> {
        ratio(self.actual_errors, self.at_risk)
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Aggregate of many HARQ sessions.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionStats {
    pub kappa: usize,
    /// Transmitted bits per subpacket (`n^2`).
    pub n_bits: usize,
    pub max_rounds: usize,
    /// Transmissions per subpacket, in packet order.
    pub rho: Vec<usize>,
    /// Delivery flag per subpacket.
    pub z: Vec<bool>,
    /// Index `i` holds round `i + 1`.
    pub rounds: Vec<RoundCounts>,
    pub false_alarms: u64,
    pub misdetections: u64,
    /// Decoding attempts whose information bits were correct.
    pub correct_packets: u64,
    /// Decoding attempts whose information bits were wrong.
    pub erroneous_packets: u64,
    /// Histogram of packet transmission sessions; index `l - 1` counts `R = l`.
    pub r_pmf: Vec<u64>,
    pub ops: OpCounters,
}

impl SessionStats {
    pub fn empty(cfg: &HarqConfig) -> Self {
        Self {
            kappa: cfg.kappa(),
            n_bits: cfg.subpacket_bits(),
            max_rounds: cfg.max_rounds,
            rho: Vec::new(),
            z: Vec::new(),
            rounds: vec![RoundCounts::default(); cfg.max_rounds],
            false_alarms: 0,
            misdetections: 0,
            correct_packets: 0,
            erroneous_packets: 0,
            r_pmf: vec![0; cfg.max_rounds],
            ops: OpCounters::default(),
        }
    }

    pub fn record(&mut self, packet: &PacketOutcome) {
        for sub in &packet.subpackets {
            self.rho.push(sub.rho);
            self.z.push(sub.delivered);
            for (i, v) in sub.rounds.iter().enumerate() {
                let slot = &mut self.rounds[i];
                slot.at_risk += 1;
                slot.declared_errors += v.declared_error as u64;
                slot.actual_errors += v.actual_error as u64;
                slot.false_alarms += v.false_alarm() as u64;
                slot.misdetections += v.misdetection() as u64;
                if v.actual_error {
                    self.erroneous_packets += 1;
                } else {
                    self.correct_packets += 1;
                }
                self.false_alarms += v.false_alarm() as u64;
                self.misdetections += v.misdetection() as u64;
            }
        }
        self.r_pmf[packet.packet_rounds() - 1] += 1;
        self.ops.merge(&packet.ops);
    }

    /// Appends `other`, which must come from the same configuration.
    pub fn merge(&mut self, other: &SessionStats) -> Result<()> {
        if (self.kappa, self.n_bits, self.max_rounds) != (other.kappa, other.n_bits, other.max_rounds) {
            return Err(Error::param("cannot merge statistics of different configurations"));
        }
        self.rho.extend_from_slice(&other.rho);
        self.z.extend_from_slice(&other.z);
        for (a, b) in self.rounds.iter_mut().zip(&other.rounds) {
            a.add(b);
        }
        for (a, b) in self.r_pmf.iter_mut().zip(&other.r_pmf) {
            *a += b;
        }
        self.false_alarms += other.false_alarms;
        self.misdetections += other.misdetections;
        self.correct_packets += other.correct_packets;
        self.erroneous_packets += other.erroneous_packets;
        self.ops.merge(&other.ops);
        Ok(())
    }

    /// Subpackets transmitted (`V`).
    pub fn subpackets(&self) -> usize {
        self.rho.len()
    }

    pub fn packets(&self) -> u64 {
        self.r_pmf.iter().sum()
    }

    /// `kappa * sum(z) / (N * sum(rho))`.
    pub fn throughput(&self) -> f64 {
        let sent: usize = self.rho.iter().sum();
        if sent == 0 {
            return 0.0;
        }
        let delivered = self.z.iter().filter(|&&z| z).count();
        (self.kappa * delivered) as f64 / (self.n_bits * sent) as f64
    }

    pub fn mean_rho(&self) -> f64 {
        self.rho.iter().sum::<usize>() as f64 / self.rho.len().max(1) as f64
    }

    /// Mean packet transmission sessions `E{R}`.
    pub fn mean_packet_rounds(&self) -> f64 {
        let total: u64 = self.r_pmf.iter().enumerate().map(|(i, c)| (i as u64 + 1) * c).sum();
        total as f64 / self.packets().max(1) as f64
    }

    pub fn drop_rate(&self) -> f64 {
        let dropped = self.z.iter().filter(|&&z| !z).count();
        dropped as f64 / self.z.len().max(1) as f64
    }

    /// Declared PER per round; absent when no subpacket reached the round.
    pub fn per_round_per(&self) -> Vec<Option<f64>> {
        self.rounds.iter().map(RoundCounts::per).collect()
    }

    /// False alarms divided by the number of correctly decoded packets.
    pub fn far(&self) -> Option<f64> {
        ratio(self.false_alarms, self.correct_packets)
    }

    /// Misdetections divided by the number of erroneously decoded packets.
    pub fn mdr(&self) -> Option<f64> {
        ratio(self.misdetections, self.erroneous_packets)
    }
}

/// Runs `packets` independent sessions, in parallel, and aggregates them in
/// packet order. Results depend only on `(cfg, model, seed)`.
pub fn monte_carlo(cfg: &HarqConfig, model: &ChannelModel, packets: u64, seed: u64) -> Result<SessionStats> {
    if packets == 0 {
        return Err(Error::param("packets must be >= 1"));
    }
    cfg.validate()?;
    model.validate()?;
    let outcomes: Vec<PacketOutcome> = (0..packets)
        .into_par_iter()
        .map(|p| {
            let info = packet_payload(cfg, seed, p);
            run_session(cfg, model, &info, seed, p)
        })
        .collect::<Result<_>>()?;
    let mut stats = SessionStats::empty(cfg);
    for o in &outcomes {
        stats.record(o);
    }
    Ok(stats)
}

/// Single-transmission PER of one subpacket over an Eb/N0 grid.
///
/// `model` supplies the channel kind and fading power; its SNR is replaced by
/// each grid point and its rate by the configuration's. All grid points
/// reuse the same seed, so the curve is built on common random numbers.
pub fn measure_single_shot_per(
    cfg: &HarqConfig,
    model: &ChannelModel,
    snr_grid_db: &[f64],
    trials: u64,
    seed: u64,
) -> Result<PerTable> {
    if trials < 100 {
        return Err(Error::param(format!("trials = {trials}, need at least 100 per point")));
    }
    let one_shot = cfg.clone().with_max_rounds(1).with_subpackets(1);
    let mut per = Vec::with_capacity(snr_grid_db.len());
    for &snr in snr_grid_db {
        let m = ChannelModel {
            ebn0_db: snr,
            code_rate: one_shot.rate(),
            ..*model
        };
        let stats = monte_carlo(&one_shot, &m, trials, seed)?;
        per.push(stats.rounds[0].per().unwrap_or(0.0));
    }
    PerTable::new(snr_grid_db.to_vec(), vec![per], vec![trials; snr_grid_db.len()])
}
