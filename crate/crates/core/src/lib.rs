//! Turbo product codes over extended Hamming components, truncated hybrid ARQ
//! with Chase combining, and the analytical tooling around it: throughput and
//! delay models, transmit-power optimization, detection complexity, and a
//! trace-driven video playback simulator.
//!
//! The crate is organized bottom-up:
//!
//! - [`codec`]: component codes, product-code encoding, CRCs and packet framing
//! - [`decoder`]: HIHO and Chase-Pyndiah SISO iterative decoding, self-detection
//! - [`channel`]: BPSK over AWGN / iid Rayleigh and the MRC Chase combiner
//! - [`harq`]: the subpacket HARQ state machine and Monte Carlo engine
//! - [`analysis`]: semi-analytical throughput/delay, power optimization, complexity
//! - [`video`]: playback-buffer simulation with the adaptive HARQ controller

pub mod analysis;
pub mod bits;
pub mod channel;
pub mod codec;
pub mod decoder;
mod error;
pub mod harq;
pub mod rng;
pub mod video;

pub use error::{Error, Result};
