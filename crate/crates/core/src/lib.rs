//! Monte Carlo comparison of TDD frame-structure schemes with FDD on a LEO
//! satellite downlink.
//!
//! The simulator drops UEs uniformly over one satellite's footprint, derives
//! each UE's delay, Doppler and SNR from the geometry, and evaluates the
//! downlink resource efficiency of three TDD schemes relative to FDD:
//!
//! - extended frame (EFS): a long frame keeping a 1-in-14 guard proportion,
//! - UE-specific guard (USG): each UE gives up exactly its own DL/UL overlap,
//! - partial overlap (POU): no guard, self-interference cancelled at the UE.
//!
//! CSI aging follows the Jakes autocorrelation; TDD CSI is one propagation
//! delay old at the start of the downlink, FDD CSI two.

pub mod channel;
pub mod config;
pub mod duplexing;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod output;
pub mod sync;

pub use config::ScenarioConfig;
pub use error::{Error, Result};
