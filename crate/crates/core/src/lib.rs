//! Artificial-noise power allocation and secrecy outage analysis for
//! multi-antenna wiretap channels with transmit-side antenna correlation.

pub mod acceptance;
pub mod analytics;
pub mod beamformer;
pub mod channel;
pub mod correlation;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod montecarlo;
pub mod optimizer;
pub mod power_allocation;
pub mod special;

pub use error::{Error, Result};
