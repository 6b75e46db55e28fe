#![cfg_attr(not(feature = "std"), no_std)]
extern crate alloc;

pub mod diffusion;
pub mod error;
pub mod exact;
pub mod network;
pub mod optimize;
mod par;
pub mod verify;

pub use diffusion::{run_nlt, sample_thresholds, SeedSets, ThresholdConfig, Trajectory};
pub use error::{Error, Result};
pub use network::{InfoNetwork, NodeId, NodeKind};
