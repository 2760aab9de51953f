//! Truncated subpacket HARQ with Chase combining, and the Monte Carlo
//! engine that turns sessions into PER, FAR/MDR and throughput statistics.

mod acks;
mod conditional;
mod engine;
mod per_table;
mod select;
mod session;

pub use acks::{estimate_per_from_acks, AckEvent};
pub use conditional::{measure_conditional_per, Block, ConditionalPer};
pub use engine::{measure_single_shot_per, monte_carlo, RoundCounts, SessionStats};
pub use per_table::PerTable;
pub use select::{adaptive_code_select, Candidate, Selection};
pub use session::{packet_payload, run_session, PacketOutcome, RoundVerdict, SubpacketOutcome};
