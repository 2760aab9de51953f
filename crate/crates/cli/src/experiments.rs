use std::path::Path;

use serde::Serialize;
use tpc_harq::analysis::{
    avg_power, delay_tau, detection_complexity_with_payload, equivalent_snr, optimize_power_blind,
    optimize_power_sas, sas_throughput, throughput_with_detection, PerCurve, SasInputs,
};
use tpc_harq::channel::ChannelKind;
use tpc_harq::codec::{ComponentCode, CrcSpec};
use tpc_harq::harq::{adaptive_code_select, measure_single_shot_per, monte_carlo, Candidate, PerTable};
use tpc_harq::video::{load_trace, simulate_playback, AharqConfig, PlaybackMode, PlaybackReport, VideoLink};

use crate::config::{grid, ExperimentConfig, PlaybackChoice};
use crate::CliError;

fn progress(cfg: &ExperimentConfig, what: impl std::fmt::Display) {
    eprintln!("[{}] {what}", cfg.experiment);
}

/// Highest Eb/N0 at which the SAS reads the PER curve for an SNR grid
/// topping out at `snr_max_db`.
pub fn sas_upper_db(cfg: &ExperimentConfig, snr_max_db: f64) -> Result<f64, CliError> {
    let m = cfg.max_rounds as f64;
    let top = match cfg.channel {
        ChannelKind::Awgn => snr_max_db + 10.0 * m.log10(),
        ChannelKind::Rayleigh => {
            let rate = cfg.harq_config().rate();
            let es = rate * 10f64.powf(snr_max_db / 10.0);
            10.0 * (equivalent_snr(es, cfg.max_rounds)? / rate).log10()
        }
    };
    Ok(top.min(cfg.per_max_db))
}

/// Single-shot PER curve from `cfg.per_table`, or measured from
/// `snr_min_db` up to `upper_db`. Measuring stops after two consecutive
/// points without errors; the rest of the grid is filled with zeros.
pub fn per_table_for(cfg: &ExperimentConfig, upper_db: f64) -> Result<PerTable, CliError> {
    if let Some(path) = &cfg.per_table {
        let file = std::fs::File::open(path).map_err(|e| CliError::Usage(format!("per_table {}: {e}", path.display())))?;
        return Ok(PerTable::read_csv(file)?);
    }
    let harq = cfg.harq_config();
    let model = cfg.channel_model(cfg.snr_min_db);
    let snrs = grid(cfg.snr_min_db, upper_db.max(cfg.snr_min_db), cfg.per_step_db);
    let mut per = Vec::with_capacity(snrs.len());
    let mut zeros = 0;
    for (i, &snr) in snrs.iter().enumerate() {
        let p = if zeros >= 2 {
            0.0
        } else {
            let t = measure_single_shot_per(&harq, &model, &[snr], cfg.per_trials, cfg.per_seed)?;
            progress(cfg, format_args!("PER point {}/{} at {snr:.2} dB: {:.4}", i + 1, snrs.len(), t.per_round[0][0]));
            t.per_round[0][0]
        };
        zeros = if p == 0.0 { zeros + 1 } else { 0 };
        per.push(p);
    }
    Ok(PerTable::new(snrs.clone(), vec![per], vec![cfg.per_trials; snrs.len()])?)
}

pub fn sas_inputs(cfg: &ExperimentConfig, table: &PerTable) -> Result<SasInputs, CliError> {
    let harq = cfg.harq_config();
    Ok(SasInputs::new(
        PerCurve::from_table(table)?,
        cfg.max_rounds,
        harq.kappa(),
        harq.subpacket_bits(),
        cfg.channel,
    )?)
}

/// Single-shot PER over the SNR grid.
pub fn per_sweep(cfg: &ExperimentConfig) -> Result<PerTable, CliError> {
    let harq = cfg.harq_config();
    progress(cfg, format_args!("{} trials per point", cfg.per_trials));
    Ok(measure_single_shot_per(&harq, &cfg.channel_model(cfg.snr_min_db), &cfg.snr_grid(), cfg.per_trials, cfg.seed)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThroughputRow {
    pub snr_db: f64,
    pub eta_mc: f64,
    pub mean_rho: f64,
    pub mean_packet_rounds: f64,
    pub drop_rate: f64,
    pub far: Option<f64>,
    pub mdr: Option<f64>,
}

/// Monte Carlo throughput of the HARQ link over the SNR grid.
pub fn harq_throughput(cfg: &ExperimentConfig) -> Result<Vec<ThroughputRow>, CliError> {
    let harq = cfg.harq_config();
    cfg.snr_grid()
        .into_iter()
        .map(|snr| {
            let s = monte_carlo(&harq, &cfg.channel_model(snr), cfg.trials, cfg.seed)?;
            progress(cfg, format_args!("{snr:.2} dB: eta = {:.4}", s.throughput()));
            Ok(ThroughputRow {
                snr_db: snr,
                eta_mc: s.throughput(),
                mean_rho: s.mean_rho(),
                mean_packet_rounds: s.mean_packet_rounds(),
                drop_rate: s.drop_rate(),
                far: s.far(),
                mdr: s.mdr(),
            })
        })
        .collect()
}

/// One row of a SAS or optimizer sweep; columns that an experiment does
/// not produce stay empty.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SweepRow {
    pub snr_db: f64,
    pub eta_sas: Option<f64>,
    pub eta_mc: Option<f64>,
    pub p_star: Option<f64>,
    pub p_avg: Option<f64>,
    pub p_saving_pct: Option<f64>,
    pub iterations: Option<usize>,
}

/// Semi-analytical throughput next to the Monte Carlo estimate.
pub fn sas_compare(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>, CliError> {
    let table = per_table_for(cfg, sas_upper_db(cfg, cfg.snr_max_db)?)?;
    let inputs = sas_inputs(cfg, &table)?;
    let harq = cfg.harq_config();
    cfg.snr_grid()
        .into_iter()
        .map(|snr| {
            let eta_sas = sas_throughput(&inputs, snr)?;
            let eta_mc = monte_carlo(&harq, &cfg.channel_model(snr), cfg.trials, cfg.seed)?.throughput();
            progress(cfg, format_args!("{snr:.2} dB: SAS {eta_sas:.4}, MC {eta_mc:.4}"));
            Ok(SweepRow {
                snr_db: snr,
                eta_sas: Some(eta_sas),
                eta_mc: Some(eta_mc),
                ..SweepRow::default()
            })
        })
        .collect()
}

/// Minimum-power operating points along the SNR grid, where each grid value
/// is the SNR reached at full power. `blind` estimates the PERs from ACK
/// windows instead of reading them from the PER curve.
pub fn power_opt(cfg: &ExperimentConfig, blind: bool) -> Result<Vec<SweepRow>, CliError> {
    let table = per_table_for(cfg, sas_upper_db(cfg, cfg.snr_max_db)?)?;
    let inputs = sas_inputs(cfg, &table)?;
    power_sweep(cfg, &inputs, blind)
}

/// [`power_opt`] on a given set of SAS inputs.
pub fn power_sweep(cfg: &ExperimentConfig, inputs: &SasInputs, blind: bool) -> Result<Vec<SweepRow>, CliError> {
    let opt = cfg.optimizer();
    cfg.snr_grid()
        .into_iter()
        .enumerate()
        .map(|(i, snr)| {
            let r = if blind {
                optimize_power_blind(inputs, &opt, snr, cfg.ack_window, cfg.seed.wrapping_add(i as u64))?
            } else {
                optimize_power_sas(inputs, &opt, snr)?
            };
            Ok(SweepRow {
                snr_db: snr,
                eta_sas: Some(sas_throughput(inputs, snr)?),
                eta_mc: None,
                p_star: r.feasible.then_some(r.p_star),
                p_avg: r.feasible.then(|| avg_power(r.p_star, r.eta_star)),
                p_saving_pct: r.feasible.then_some(r.power_saving_pct),
                iterations: Some(r.iterations),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelayRow {
    pub snr_db: f64,
    pub t_p_us: f64,
    /// Subpacket retransmission with `L` codewords per packet.
    pub tau_sub_s: f64,
    /// Every codeword is a packet of its own.
    pub tau_pkt_s: f64,
}

/// Delay of a `payload_bits` message with and without subpacketization.
pub fn delay_sweep(cfg: &ExperimentConfig) -> Result<Vec<DelayRow>, CliError> {
    let table = per_table_for(cfg, sas_upper_db(cfg, cfg.snr_max_db)?)?;
    let inputs = sas_inputs(cfg, &table)?;
    delay_rows(cfg, &inputs)
}

pub fn delay_rows(cfg: &ExperimentConfig, inputs: &SasInputs) -> Result<Vec<DelayRow>, CliError> {
    let harq = cfg.harq_config();
    let mut rows = Vec::new();
    for snr in cfg.snr_grid() {
        let per = inputs.per_rounds(snr)?;
        for &t_p_us in &cfg.t_p_us {
            let timing = cfg.timing(t_p_us)?;
            rows.push(DelayRow {
                snr_db: snr,
                t_p_us,
                tau_sub_s: delay_tau(&harq, &per, &timing, cfg.payload_bits, true)?,
                tau_pkt_s: delay_tau(&harq, &per, &timing, cfg.payload_bits, false)?,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectRow {
    pub snr_db: f64,
    pub eta_mc: f64,
    /// Per-round PER of the first transmission, as seen by a genie.
    pub per_first: Option<f64>,
    pub far: Option<f64>,
    pub mdr: Option<f64>,
    /// Throughput predicted from the measured per-round PER, FAR and MDR.
    pub eta_detect: f64,
}

/// False alarms and misdetections of the configured detector.
pub fn detect_eval(cfg: &ExperimentConfig) -> Result<Vec<DetectRow>, CliError> {
    let harq = cfg.harq_config();
    cfg.snr_grid()
        .into_iter()
        .map(|snr| {
            let s = monte_carlo(&harq, &cfg.channel_model(snr), cfg.trials, cfg.seed)?;
            let col = |f: fn(&tpc_harq::harq::RoundCounts) -> Option<f64>| -> Vec<f64> {
                s.rounds.iter().map(|r| f(r).unwrap_or(0.0)).collect()
            };
            let eta_detect = throughput_with_detection(
                &col(|r| r.actual_per()),
                &col(|r| r.far_rate()),
                &col(|r| r.mdr_rate()),
                harq.kappa(),
                harq.subpacket_bits(),
            )?;
            progress(cfg, format_args!("{snr:.2} dB: FAR {:?}, MDR {:?}", s.far(), s.mdr()));
            Ok(DetectRow {
                snr_db: snr,
                eta_mc: s.throughput(),
                per_first: s.rounds[0].actual_per(),
                far: s.far(),
                mdr: s.mdr(),
                eta_detect,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityRow {
    pub n: usize,
    pub k: usize,
    pub crc: String,
    pub kappa: usize,
    pub ns_lfsr_lb: f64,
    pub ns_lfsr_ub: f64,
    pub nc: f64,
    pub cs_lb: f64,
    pub cs_ub: f64,
}

/// Self-detection cost relative to CRC detection for the four long codes
/// and the three CRC-16/32 generators, at a payload of `k^2 - 16` bits.
pub fn complexity_table(cfg: &ExperimentConfig) -> Result<Vec<ComplexityRow>, CliError> {
    let crcs = [CrcSpec::CRC16_8005, CrcSpec::CRC16_8BB7, CrcSpec::CRC32_1EDC6F41];
    let mut rows = Vec::with_capacity(12);
    for crc in &crcs {
        for m in [7, 6, 5, 4] {
            let code = ComponentCode::new(m)?;
            let kappa = code.k() * code.k() - 16;
            let r = detection_complexity_with_payload(&code, crc, cfg.chase_p as u32, kappa)?;
            rows.push(ComplexityRow {
                n: code.n(),
                k: code.k(),
                crc: format!("{:X}", crc.poly),
                kappa,
                ns_lfsr_lb: r.ns_lfsr_bounds.0,
                ns_lfsr_ub: r.ns_lfsr_bounds.1,
                nc: r.nc,
                cs_lb: r.cs_bounds.0,
                cs_ub: r.cs_bounds.1,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VideoSummary {
    pub aharq: bool,
    pub subpacketized: bool,
    pub chi: f64,
    pub starvations: usize,
    pub concealed_pct: f64,
    pub expected_concealed_pct: f64,
    pub psnr_mean: Option<f64>,
    pub psnr_received: Option<f64>,
    pub transmission_time_s: f64,
}

/// Link of the video experiment: per-round PERs from the SAS at the
/// operating SNR and, unless `chi` is given, the transmission rate matched
/// to the trace bit rate through the SAS throughput.
pub fn video_link(cfg: &ExperimentConfig, inputs: &SasInputs, source_bitrate: f64) -> Result<VideoLink, CliError> {
    let per_rounds = inputs.per_rounds(cfg.operating_snr_db)?;
    let chi = match cfg.chi {
        Some(c) => c,
        None => {
            let eta = sas_throughput(inputs, cfg.operating_snr_db)?;
            if eta <= 0.0 {
                return Err(CliError::Usage("operating_snr_db: link throughput is zero, rate matching impossible".into()));
            }
            cfg.rate_margin * source_bitrate / eta
        }
    };
    let t_p_us = cfg.t_p_us[0];
    let timing = tpc_harq::analysis::LinkTiming::new(chi, t_p_us * 1e-6)?;
    Ok(VideoLink {
        harq: cfg.harq_config(),
        per_rounds,
        timing,
        subpacketized: cfg.subpackets > 1,
    })
}

pub fn video_sim(cfg: &ExperimentConfig) -> Result<(PlaybackReport, VideoSummary), CliError> {
    let path = cfg.trace.as_deref().ok_or_else(|| CliError::Usage("trace: video-sim needs a trace file".into()))?;
    let trace = load_trace(path, cfg.fps)?;
    let table = per_table_for(cfg, sas_upper_db(cfg, cfg.operating_snr_db)?)?;
    let inputs = sas_inputs(cfg, &table)?;
    let link = video_link(cfg, &inputs, trace.mean_bitrate())?;
    video_run(cfg, &trace, &link)
}

pub fn video_run(
    cfg: &ExperimentConfig,
    trace: &tpc_harq::video::VideoTrace,
    link: &VideoLink,
) -> Result<(PlaybackReport, VideoSummary), CliError> {
    let aharq = AharqConfig::new(cfg.preroll, cfg.max_rounds)?;
    let mode = match cfg.playback {
        PlaybackChoice::Analytic => PlaybackMode::Analytic,
        PlaybackChoice::Sampled => PlaybackMode::Sampled,
    };
    let report = simulate_playback(trace, link, cfg.aharq.then_some(&aharq), cfg.preroll, mode, cfg.seed)?;
    progress(
        cfg,
        format_args!("{} starvations, {:.2}% concealed", report.starvations, report.concealed_pct),
    );
    let summary = VideoSummary {
        aharq: cfg.aharq,
        subpacketized: link.subpacketized,
        chi: link.timing.chi,
        starvations: report.starvations,
        concealed_pct: report.concealed_pct,
        expected_concealed_pct: report.expected_concealed_pct,
        psnr_mean: report.psnr_mean,
        psnr_received: report.psnr_received,
        transmission_time_s: report.transmission_time,
    };
    Ok((report, summary))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodeSelectRow {
    pub snr_db: f64,
    pub n: usize,
    pub subpackets: usize,
    pub eta_sas: f64,
    pub selected: bool,
}

/// Throughput of every candidate code over the SNR grid and the one the
/// adaptive selector picks, all candidates filling `packet_bits`.
pub fn code_select(cfg: &ExperimentConfig) -> Result<Vec<CodeSelectRow>, CliError> {
    let mut candidates = Vec::with_capacity(cfg.candidates.len());
    for &n in &cfg.candidates {
        let c = ExperimentConfig {
            n,
            subpackets: cfg.packet_bits / (n * n),
            ..cfg.clone()
        };
        c.harq_config().validate()?;
        progress(cfg, format_args!("PER curve of n = {n}"));
        let table = per_table_for(&c, sas_upper_db(&c, c.snr_max_db)?)?;
        candidates.push(Candidate {
            n,
            subpackets: c.subpackets,
            sas: sas_inputs(&c, &table)?,
        });
    }
    let mut rows = Vec::new();
    for snr in cfg.snr_grid() {
        let pick = adaptive_code_select(&candidates, snr)?;
        for (i, c) in candidates.iter().enumerate() {
            rows.push(CodeSelectRow {
                snr_db: snr,
                n: c.n,
                subpackets: c.subpackets,
                eta_sas: sas_throughput(&c.sas, snr)?,
                selected: i == pick.index,
            });
        }
    }
    Ok(rows)
}

/// Runs the configured experiment and writes its artifacts; returns the
/// paths written, manifest last.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<std::path::PathBuf>, CliError> {
    use crate::config::Experiment as E;
    use crate::output::{sibling, write_manifest, write_rows};
    let out = cfg.out.as_path();
    let mut written = vec![out.to_path_buf()];
    match cfg.experiment {
        E::PerSweep => {
            let table = per_sweep(cfg)?;
            let file = create(out)?;
            table.write_csv(file)?;
        }
        E::HarqThroughput => write_rows(out, &harq_throughput(cfg)?)?,
        E::SasCompare => write_rows(out, &sas_compare(cfg)?)?,
        E::DelaySweep => write_rows(out, &delay_sweep(cfg)?)?,
        E::PowerOpt => write_rows(out, &power_opt(cfg, false)?)?,
        E::PowerOptBlind => write_rows(out, &power_opt(cfg, true)?)?,
        E::DetectEval => write_rows(out, &detect_eval(cfg)?)?,
        E::ComplexityTable => write_rows(out, &complexity_table(cfg)?)?,
        E::VideoSim => {
            let (report, summary) = video_sim(cfg)?;
            report.timeline.write_csv(create(out)?)?;
            let path = sibling(out, "summary.csv");
            write_rows(&path, &[summary])?;
            written.push(path);
        }
        E::CodeSelect => write_rows(out, &code_select(cfg)?)?,
    }
    written.push(write_manifest(cfg, &written)?);
    Ok(written)
}

fn create(path: &Path) -> Result<std::fs::File, CliError> {
    std::fs::File::create(path).map_err(|source| CliError::Output {
        path: path.to_path_buf(),
        source,
    })
}
