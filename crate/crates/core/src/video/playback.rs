use std::io::Write;

use rand::Rng;
use serde::Serialize;

use crate::rng::{stream, Purpose};
use crate::video::{aharq_decide, estimate_frame_delivery, AharqConfig, Decision, VideoLink, VideoTrace};
use crate::{Error, Result};

/// How frame delivery times and losses are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaybackMode {
    /// Expected delivery times; a frame sent with a lowered limit is lost
    /// when its failure probability is at least one half.
    Analytic,
    /// Every subpacket's rounds drawn from the per-round PERs.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Arrival,
    Play,
    Stall,
    Resume,
}

impl EventKind {
    fn as_str(&self) -> &'static str {
        match self {
            EventKind::Arrival => "arrival",
            EventKind::Play => "play",
            EventKind::Stall => "stall",
            EventKind::Resume => "resume",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimelineEvent {
    pub time: f64,
    pub frame_index: usize,
    pub kind: EventKind,
    /// Buffered frames right after the event.
    pub occupancy: usize,
    pub decision: Option<Decision>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BufferTimeline {
    pub events: Vec<TimelineEvent>,
    pub starvation_instants: Vec<f64>,
    /// 1-based indices of frames shown concealed.
    pub concealed_frames: Vec<usize>,
    pub decisions: Vec<Decision>,
}

#[derive(Serialize)]
struct Row<'a> {
    time_s: f64,
    frame_index: usize,
    event: &'a str,
    occupancy: usize,
    decision: String,
}

impl BufferTimeline {
    /// CSV with header `time_s,frame_index,event,occupancy,decision`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for e in &self.events {
            w.serialize(Row {
                time_s: e.time,
                frame_index: e.frame_index,
                event: e.kind.as_str(),
                occupancy: e.occupancy,
                decision: e.decision.map(|d| d.to_string()).unwrap_or_default(),
            })?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlaybackReport {
    pub timeline: BufferTimeline,
    pub starvations: usize,
    /// Share of concealed frames in percent.
    pub concealed_pct: f64,
    /// Mean failure probability of frames sent with a lowered limit, in percent.
    pub expected_concealed_pct: f64,
    /// Mean PSNR of the encoded video.
    pub psnr_mean: Option<f64>,
    /// Mean PSNR with concealed frames at their concealment PSNR.
    pub psnr_received: Option<f64>,
    /// Time the last frame finished arriving.
    pub transmission_time: f64,
}

/// Playback side of the buffer: one frame drains every `1 / fps` once the
/// preroll is reached; an empty buffer at a play instant stalls playback
/// until the next arrival.
struct Player {
    period: f64,
    preroll: usize,
    total: usize,
    delivered: usize,
    played: usize,
    started: bool,
    playing: bool,
    next_play: f64,
}

impl Player {
    fn occupancy(&self) -> usize {
        self.delivered - self.played
    }

    fn advance(&mut self, until: f64, tl: &mut BufferTimeline) {
        while self.playing && self.next_play <= until && self.played < self.total {
            if self.occupancy() == 0 {
                tl.starvation_instants.push(self.next_play);
                tl.events.push(TimelineEvent {
                    time: self.next_play,
                    frame_index: self.played + 1,
                    kind: EventKind::Stall,
                    occupancy: 0,
                    decision: None,
                });
                self.playing = false;
                break;
            }
            self.played += 1;
            tl.events.push(TimelineEvent {
                time: self.next_play,
                frame_index: self.played,
                kind: EventKind::Play,
                occupancy: self.occupancy(),
                decision: None,
            });
            self.next_play += self.period;
        }
    }

    fn arrive(&mut self, time: f64, frame: usize, decision: Decision, tl: &mut BufferTimeline) {
        self.advance(time, tl);
        self.delivered += 1;
        tl.events.push(TimelineEvent {
            time,
            frame_index: frame,
            kind: EventKind::Arrival,
            occupancy: self.occupancy(),
            decision: Some(decision),
        });
        if !self.started && self.delivered >= self.preroll {
            self.started = true;
            self.playing = true;
            self.next_play = time;
        } else if self.started && !self.playing {
            self.playing = true;
            self.next_play = time;
            tl.events.push(TimelineEvent {
                time,
                frame_index: self.played + 1,
                kind: EventKind::Resume,
                occupancy: self.occupancy(),
                decision: None,
            });
        }
    }
}

/// Streams `trace` over `link`, frame after frame, and tracks the playback
/// buffer. With `aharq` set, frames of the configured types may be sent
/// with a lowered retransmission limit or falsely acknowledged once
/// playback has started. A falsely acknowledged frame gets one round; such
/// a frame, or one sent with a lowered limit, is concealed when it is still
/// in error after its last round.
pub fn simulate_playback(
    trace: &VideoTrace,
    link: &VideoLink,
    aharq: Option<&AharqConfig>,
    preroll: usize,
    mode: PlaybackMode,
    seed: u64,
) -> Result<PlaybackReport> {
    link.validate()?;
    if let Some(c) = aharq {
        c.validate()?;
    }
    if preroll == 0 {
        return Err(Error::param("preroll must be >= 1 frame"));
    }
    let mut tl = BufferTimeline::default();
    let mut player = Player {
        period: 1.0 / trace.fps,
        preroll: preroll.min(trace.len()),
        total: trace.len(),
        delivered: 0,
        played: 0,
        started: false,
        playing: false,
        next_play: 0.0,
    };
    let base_m = link.per_rounds.len();
    let mut now = 0.0;
    let mut expected_loss = 0.0;
    for frame in &trace.frames {
        player.advance(now, &mut tl);
        let decision = match aharq {
            Some(cfg) if player.started => aharq_decide(frame, player.occupancy(), link, trace.fps, cfg)?,
            _ => Decision::Normal,
        };
        let limit = match decision {
            Decision::Normal => base_m,
            Decision::ReducedM(m) => m,
            Decision::FalseAck => 1,
        };
        let adapted = decision != Decision::Normal;
        let fail = frame_failure_probability(frame.size_bits, link, limit);
        if adapted {
            expected_loss += fail;
        }
        let (duration, lost) = match mode {
            PlaybackMode::Analytic => (estimate_frame_delivery(frame.size_bits, link, limit)?, fail >= 0.5),
            PlaybackMode::Sampled => sample_frame(frame.size_bits, frame.index as u64, link, limit, seed),
        };
        if adapted && lost {
            tl.concealed_frames.push(frame.index);
        }
        tl.decisions.push(decision);
        now += duration;
        player.arrive(now, frame.index, decision, &mut tl);
    }
    player.advance(f64::INFINITY, &mut tl);

    let f = trace.len() as f64;
    let (psnr_mean, psnr_received) = if trace.has_psnr() {
        let mean = trace.frames.iter().filter_map(|fr| fr.psnr_db).sum::<f64>() / f;
        let received = trace
            .frames
            .iter()
            .map(|fr| {
                if tl.concealed_frames.binary_search(&fr.index).is_ok() {
                    fr.psnr_concealed_db.unwrap_or_default()
                } else {
                    fr.psnr_db.unwrap_or_default()
                }
            })
            .sum::<f64>()
            / f;
        (Some(mean), Some(received))
    } else {
        (None, None)
    };
    Ok(PlaybackReport {
        starvations: tl.starvation_instants.len(),
        concealed_pct: tl.concealed_frames.len() as f64 / f * 100.0,
        expected_concealed_pct: expected_loss / f * 100.0,
        psnr_mean,
        psnr_received,
        transmission_time: now,
        timeline: tl,
    })
}

/// Probability that some subpacket of the frame fails all `limit` rounds.
fn frame_failure_probability(size_bits: u64, link: &VideoLink, limit: usize) -> f64 {
    let count = size_bits.div_ceil(link.harq.kappa() as u64);
    let drop: f64 = link.per_rounds[..limit].iter().product();
    1.0 - (1.0 - drop).powf(count as f64)
}

/// Draws the rounds of every subpacket of a frame; returns the airtime and
/// whether any subpacket was still wrong after `limit` rounds. The frame
/// fills `ceil(size / kappa)` subpackets, grouped `L` to a packet with a
/// short last packet.
fn sample_frame(size_bits: u64, frame: u64, link: &VideoLink, limit: usize, seed: u64) -> (f64, bool) {
    let blocks = size_bits.div_ceil(link.harq.kappa() as u64) as usize;
    let per_packet = if link.subpacketized { link.harq.subpackets } else { 1 };
    let n = link.harq.subpacket_bits() as f64;
    let rtt = 2.0 * link.timing.t_p;
    let mut rng = stream(seed, frame, 0, Purpose::Sampling);
    let mut time = 0.0;
    let mut lost = false;
    let mut left = blocks;
    while left > 0 {
        let subs = left.min(per_packet);
        left -= subs;
        let mut sent = 0usize;
        let mut sessions = 0usize;
        for _ in 0..subs {
            let mut rho = 0;
            let mut ok = false;
            while rho < limit {
                rho += 1;
                if rng.random::<f64>() >= link.per_rounds[rho - 1] {
                    ok = true;
                    break;
                }
            }
            lost |= !ok;
            sent += rho;
            sessions = sessions.max(rho);
        }
        time += if link.subpacketized {
            sent as f64 * n / link.timing.chi + sessions as f64 * rtt
        } else {
            sent as f64 * (n / link.timing.chi + rtt)
        };
    }
    (time, lost)
}
