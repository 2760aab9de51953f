//! Semi-analytical throughput and delay, the Rayleigh diversity mapping,
//! power optimization and detection complexity.

mod complexity;
mod delay;
mod power;
mod sas;

pub use complexity::{detection_complexity, detection_complexity_with_payload, ComplexityReport};
pub use delay::{delay_tau, session_delay, video_total_delay, LinkTiming};
pub use power::{
    avg_power, optimize_power, optimize_power_blind, optimize_power_sas, OptimizerConfig, PowerMethod,
    PowerResult,
};
pub use sas::{
    drop_rate, equivalent_snr, expected_rho, expected_rho_complement, packet_tx_stats, rayleigh_diversity_ber,
    sas_throughput, throughput_from_rounds, throughput_with_detection, PerCurve, SasInputs,
};
