//! Trace-driven video delivery: playback buffer, content-aware adaptive
//! HARQ (A-HARQ) and concealment accounting.

mod aharq;
mod playback;
mod trace;

pub use aharq::{aharq_decide, budget_time, estimate_frame_delivery, AharqConfig, Decision, VideoLink};
pub use playback::{simulate_playback, BufferTimeline, EventKind, PlaybackMode, PlaybackReport, TimelineEvent};
pub use trace::{load_trace, parse_trace, Frame, FrameType, VideoTrace};
