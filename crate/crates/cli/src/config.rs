//! Experiment configuration: a flat TOML file, `--set key=value` overrides
//! and the common flags, resolved into a validated [`ExperimentConfig`].

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tpc_harq::analysis::{LinkTiming, OptimizerConfig, PowerMethod};
use tpc_harq::channel::{ChannelKind, ChannelModel};
use tpc_harq::codec::{ComponentCode, CrcSpec, DecoderMode, Detection, HarqConfig};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    PerSweep,
    HarqThroughput,
    SasCompare,
    DelaySweep,
    PowerOpt,
    PowerOptBlind,
    DetectEval,
    ComplexityTable,
    VideoSim,
    CodeSelect,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::PerSweep,
        Experiment::HarqThroughput,
        Experiment::SasCompare,
        Experiment::DelaySweep,
        Experiment::PowerOpt,
        Experiment::PowerOptBlind,
        Experiment::DetectEval,
        Experiment::ComplexityTable,
        Experiment::VideoSim,
        Experiment::CodeSelect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::PerSweep => "per-sweep",
            Experiment::HarqThroughput => "harq-throughput",
            Experiment::SasCompare => "sas-compare",
            Experiment::DelaySweep => "delay-sweep",
            Experiment::PowerOpt => "power-opt",
            Experiment::PowerOptBlind => "power-opt-blind",
            Experiment::DetectEval => "detect-eval",
            Experiment::ComplexityTable => "complexity-table",
            Experiment::VideoSim => "video-sim",
            Experiment::CodeSelect => "code-select",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Keys accepted in a config file or through `--set`. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub n: Option<usize>,
    pub channel: Option<String>,
    pub snr_min_db: Option<f64>,
    pub snr_max_db: Option<f64>,
    pub snr_step_db: Option<f64>,
    pub max_rounds: Option<i64>,
    pub subpackets: Option<usize>,
    pub detection: Option<String>,
    #[serde(default, deserialize_with = "string_or_int")]
    pub crc: Option<String>,
    pub decoder: Option<String>,
    pub chase_p: Option<usize>,
    pub max_iters: Option<usize>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub per_trials: Option<u64>,
    pub per_seed: Option<u64>,
    pub per_step_db: Option<f64>,
    pub per_max_db: Option<f64>,
    pub per_table: Option<PathBuf>,
    pub mu: Option<f64>,
    pub epsilon: Option<f64>,
    pub p_max: Option<f64>,
    pub method: Option<String>,
    pub ack_window: Option<u64>,
    pub chi: Option<f64>,
    pub t_p_us: Option<Vec<f64>>,
    pub payload_bits: Option<u64>,
    pub trace: Option<PathBuf>,
    pub fps: Option<f64>,
    pub preroll: Option<usize>,
    pub aharq: Option<bool>,
    pub playback: Option<String>,
    pub operating_snr_db: Option<f64>,
    pub rate_margin: Option<f64>,
    pub candidates: Option<Vec<usize>>,
    pub packet_bits: Option<usize>,
    pub out: Option<PathBuf>,
}

/// CRC names such as `8005` read as TOML integers; keep their digits.
fn string_or_int<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Either {
        S(String),
        I(i64),
    }
    Ok(Option::<Either>::deserialize(d)?.map(|v| match v {
        Either::S(s) => s,
        Either::I(i) => i.to_string(),
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectionChoice {
    Crc,
    #[serde(rename = "self")]
    SelfDetect,
    Perfect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaybackChoice {
    Analytic,
    Sampled,
}

/// A fully resolved and validated experiment description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Component code length.
    pub n: usize,
    #[serde(serialize_with = "ser_channel")]
    pub channel: ChannelKind,
    pub snr_min_db: f64,
    pub snr_max_db: f64,
    pub snr_step_db: f64,
    pub max_rounds: usize,
    pub subpackets: usize,
    pub detection: DetectionChoice,
    /// CRC polynomial in hex, without `0x`; only with CRC detection.
    pub crc: Option<String>,
    #[serde(serialize_with = "ser_decoder")]
    pub decoder: DecoderMode,
    pub chase_p: usize,
    pub max_iters: usize,
    pub seed: u64,
    /// Packets per Monte Carlo point.
    pub trials: u64,
    /// Trials per point of a single-shot PER curve.
    pub per_trials: u64,
    /// Seed of the PER curve, kept apart from the Monte Carlo seed.
    pub per_seed: u64,
    pub per_step_db: f64,
    pub per_max_db: f64,
    pub per_table: Option<PathBuf>,
    pub mu: f64,
    pub epsilon: f64,
    pub p_max: f64,
    #[serde(serialize_with = "ser_method")]
    pub method: PowerMethod,
    pub ack_window: u64,
    /// Transmission rate in bit/s; `None` in video-sim means rate matching.
    pub chi: Option<f64>,
    pub t_p_us: Vec<f64>,
    pub payload_bits: u64,
    pub trace: Option<PathBuf>,
    pub fps: f64,
    pub preroll: usize,
    pub aharq: bool,
    pub playback: PlaybackChoice,
    pub operating_snr_db: f64,
    pub rate_margin: f64,
    pub candidates: Vec<usize>,
    pub packet_bits: usize,
    pub out: PathBuf,
}

fn ser_channel<S: serde::Serializer>(k: &ChannelKind, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(match k {
        ChannelKind::Awgn => "awgn",
        ChannelKind::Rayleigh => "rayleigh",
    })
}

fn ser_decoder<S: serde::Serializer>(d: &DecoderMode, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(match d {
        DecoderMode::Hiho => "hiho",
        DecoderMode::Siso => "siso",
    })
}

fn ser_method<S: serde::Serializer>(m: &PowerMethod, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(match m {
        PowerMethod::Bisection => "bisection",
        PowerMethod::BruteForce => "brute-force",
    })
}

fn usage(key: &str, constraint: impl fmt::Display) -> CliError {
    CliError::Usage(format!("{key}: {constraint}"))
}

/// Reads a config file (if any) into a TOML table.
pub fn read_table(path: Option<&Path>) -> Result<toml::Table, CliError> {
    let Some(path) = path else {
        return Ok(toml::Table::new());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    text.parse::<toml::Table>()
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Applies one `key=value` override. The value is read as a TOML value and
/// falls back to a plain string.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), CliError> {
    let (key, value) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("override {assignment:?} is not key=value")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(CliError::Usage(format!("override {assignment:?} has an empty key")));
    }
    let value = value.trim();
    if key == "crc" {
        // generator names are hex digits, not numbers
        table.insert(key.to_string(), toml::Value::String(value.trim_matches('"').to_string()));
        return Ok(());
    }
    let parsed = format!("v = {value}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()));
    table.insert(key.to_string(), parsed);
    Ok(())
}

pub fn raw_from_table(table: toml::Table) -> Result<RawConfig, CliError> {
    table
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Usage(e.message().to_string()))
}

impl ExperimentConfig {
    /// Applies defaults and checks every field before anything runs.
    pub fn resolve(experiment: Experiment, raw: RawConfig) -> Result<Self, CliError> {
        let n = raw.n.unwrap_or(16);
        if !(n.is_power_of_two() && (8..=128).contains(&n)) {
            return Err(usage("n", format!("must be one of 8, 16, 32, 64, 128 (got {n})")));
        }
        let channel = match raw.channel.as_deref().unwrap_or("awgn") {
            "awgn" => ChannelKind::Awgn,
            "rayleigh" => ChannelKind::Rayleigh,
            other => return Err(usage("channel", format!("expected awgn or rayleigh, got {other:?}"))),
        };
        let snr_min_db = raw.snr_min_db.unwrap_or(0.0);
        let snr_max_db = raw.snr_max_db.unwrap_or(8.0);
        let snr_step_db = raw.snr_step_db.unwrap_or(1.0);
        if !(snr_min_db.is_finite() && snr_max_db.is_finite() && snr_min_db <= snr_max_db) {
            return Err(usage("snr_min_db/snr_max_db", "need finite values with min <= max"));
        }
        if !(snr_step_db > 0.0) {
            return Err(usage("snr_step_db", "must be > 0"));
        }
        let max_rounds = raw.max_rounds.unwrap_or(4);
        if !(1..=16).contains(&max_rounds) {
            return Err(usage("max_rounds", format!("must lie in 1..=16 (got {max_rounds})")));
        }
        let subpackets = raw.subpackets.unwrap_or(1);
        if subpackets == 0 {
            return Err(usage("subpackets", "must be >= 1"));
        }
        let detection = match raw.detection.as_deref().unwrap_or("crc") {
            "crc" => DetectionChoice::Crc,
            "self" => DetectionChoice::SelfDetect,
            "perfect" => DetectionChoice::Perfect,
            other => return Err(usage("detection", format!("expected crc, self or perfect, got {other:?}"))),
        };
        let crc = match (detection, raw.crc) {
            (DetectionChoice::Crc, c) => {
                let c = c.unwrap_or_else(|| "8005".into());
                let spec = CrcSpec::by_name(&c).ok_or_else(|| usage("crc", format!("unknown polynomial {c:?}; use 07, 8005, 8BB7 or 1EDC6F41")))?;
                Some(format!("{:02X}", spec.poly))
            }
            (_, Some(_)) => {
                return Err(usage("crc", "contradicts detection without CRC; drop one of the two keys"));
            }
            (_, None) => None,
        };
        let decoder = match raw.decoder.as_deref().unwrap_or("siso") {
            "siso" => DecoderMode::Siso,
            "hiho" => DecoderMode::Hiho,
            other => return Err(usage("decoder", format!("expected siso or hiho, got {other:?}"))),
        };
        let chase_p = raw.chase_p.unwrap_or(4);
        if !(1..=8).contains(&chase_p) {
            return Err(usage("chase_p", "must lie in 1..=8"));
        }
        let max_iters = raw.max_iters.unwrap_or(4);
        if max_iters == 0 {
            return Err(usage("max_iters", "must be >= 1"));
        }
        let trials = raw.trials.unwrap_or(1000);
        if trials == 0 {
            return Err(usage("trials", "must be >= 1"));
        }
        let per_trials = raw.per_trials.unwrap_or(trials.max(100));
        if per_trials < 100 {
            return Err(usage("per_trials", "must be >= 100"));
        }
        let per_step_db = raw.per_step_db.unwrap_or(0.5);
        if !(per_step_db > 0.0) {
            return Err(usage("per_step_db", "must be > 0"));
        }
        let per_max_db = raw.per_max_db.unwrap_or(30.0);
        if !(per_max_db.is_finite() && per_max_db >= snr_max_db) {
            return Err(usage("per_max_db", "must be finite and >= snr_max_db"));
        }
        let method = match raw.method.as_deref().unwrap_or("bisection") {
            "bisection" => PowerMethod::Bisection,
            "brute-force" => PowerMethod::BruteForce,
            other => return Err(usage("method", format!("expected bisection or brute-force, got {other:?}"))),
        };
        let mu = raw.mu.unwrap_or(0.95);
        let epsilon = raw.epsilon.unwrap_or(0.01);
        let p_max = raw.p_max.unwrap_or(1.0);
        OptimizerConfig::new(mu, epsilon, p_max, method).map_err(|e| usage("mu/epsilon/p_max", e))?;
        let ack_window = raw.ack_window.unwrap_or(100);
        if ack_window == 0 {
            return Err(usage("ack_window", "must be >= 1"));
        }
        if let Some(chi) = raw.chi {
            if !(chi > 0.0 && chi.is_finite()) {
                return Err(usage("chi", "must be a positive bit rate"));
            }
        }
        let t_p_us = raw.t_p_us.unwrap_or_else(|| vec![100.0, 500.0]);
        if t_p_us.is_empty() || t_p_us.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(usage("t_p_us", "needs at least one non-negative delay"));
        }
        let payload_bits = raw.payload_bits.unwrap_or(10560);
        if payload_bits == 0 {
            return Err(usage("payload_bits", "must be >= 1"));
        }
        let fps = raw.fps.unwrap_or(30.0);
        if !(fps > 0.0 && fps.is_finite()) {
            return Err(usage("fps", "must be positive"));
        }
        let preroll = raw.preroll.unwrap_or(16);
        if preroll < 9 {
            return Err(usage("preroll", "must be >= 9 so the I < P < B thresholds fit"));
        }
        let playback = match raw.playback.as_deref().unwrap_or("analytic") {
            "analytic" => PlaybackChoice::Analytic,
            "sampled" => PlaybackChoice::Sampled,
            other => return Err(usage("playback", format!("expected analytic or sampled, got {other:?}"))),
        };
        let rate_margin = raw.rate_margin.unwrap_or(1.0);
        if !(rate_margin > 0.0 && rate_margin.is_finite()) {
            return Err(usage("rate_margin", "must be positive"));
        }
        if experiment == Experiment::CodeSelect && raw.per_table.is_some() {
            return Err(usage("per_table", "code-select measures one PER curve per candidate and takes no table"));
        }
        if experiment == Experiment::VideoSim && raw.trace.is_none() {
            return Err(usage("trace", "video-sim needs a trace file"));
        }
        let candidates = raw.candidates.unwrap_or_else(|| vec![16, 32, 64]);
        let packet_bits = raw.packet_bits.unwrap_or(16384);
        if candidates.is_empty() {
            return Err(usage("candidates", "needs at least one code length"));
        }
        for &c in &candidates {
            if !(c.is_power_of_two() && (8..=128).contains(&c)) || packet_bits % (c * c) != 0 {
                return Err(usage(
                    "candidates",
                    format!("{c} is not a code length in 8..=128 whose n^2 divides packet_bits = {packet_bits}"),
                ));
            }
        }
        let cfg = Self {
            experiment,
            n,
            channel,
            snr_min_db,
            snr_max_db,
            snr_step_db,
            max_rounds: max_rounds as usize,
            subpackets,
            detection,
            crc,
            decoder,
            chase_p,
            max_iters,
            seed: raw.seed.unwrap_or(1),
            trials,
            per_trials,
            per_seed: raw.per_seed.unwrap_or_else(|| raw.seed.unwrap_or(1).wrapping_add(1)),
            per_step_db,
            per_max_db,
            per_table: raw.per_table,
            mu,
            epsilon,
            p_max,
            method,
            ack_window,
            chi: raw.chi,
            t_p_us,
            payload_bits,
            trace: raw.trace,
            fps,
            preroll,
            aharq: raw.aharq.unwrap_or(true),
            playback,
            operating_snr_db: raw.operating_snr_db.unwrap_or(10.0),
            rate_margin,
            candidates,
            packet_bits,
            out: raw.out.unwrap_or_else(|| PathBuf::from(format!("{experiment}.csv"))),
        };
        cfg.harq_config().validate().map_err(|e| usage("code/crc", e))?;
        Ok(cfg)
    }

    /// Defaults for `experiment` with no file and no overrides.
    pub fn defaults(experiment: Experiment) -> Result<Self, CliError> {
        Self::resolve(experiment, RawConfig::default())
    }

    pub fn code(&self) -> ComponentCode {
        ComponentCode::new(self.n.trailing_zeros()).expect("code length validated")
    }

    pub fn detection(&self) -> Detection {
        match self.detection {
            DetectionChoice::Crc => Detection::Crc(CrcSpec::by_name(self.crc.as_deref().unwrap_or("8005")).expect("crc validated")),
            DetectionChoice::SelfDetect => Detection::SelfDetect,
            DetectionChoice::Perfect => Detection::Perfect,
        }
    }

    pub fn harq_config(&self) -> HarqConfig {
        let mut h = HarqConfig::new(self.code(), self.detection())
            .with_subpackets(self.subpackets)
            .with_max_rounds(self.max_rounds)
            .with_decoder(self.decoder);
        h.chase_p = self.chase_p;
        h.max_iters = self.max_iters;
        h
    }

    pub fn channel_model(&self, snr_db: f64) -> ChannelModel {
        ChannelModel::new(self.channel, snr_db, self.harq_config().rate())
    }

    pub fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig::new(self.mu, self.epsilon, self.p_max, self.method).expect("optimizer validated")
    }

    pub fn timing(&self, t_p_us: f64) -> Result<LinkTiming, CliError> {
        let chi = self.chi.unwrap_or(2e6);
        LinkTiming::new(chi, t_p_us * 1e-6).map_err(|e| usage("chi/t_p_us", e))
    }

    /// The SNR grid `snr_min_db, snr_min_db + step, ..., <= snr_max_db`.
    pub fn snr_grid(&self) -> Vec<f64> {
        grid(self.snr_min_db, self.snr_max_db, self.snr_step_db)
    }
}

/// Inclusive grid with a little slack so the end point survives rounding.
pub fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=count).map(|i| lo + i as f64 * step).collect()
}
