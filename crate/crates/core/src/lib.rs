//! Link-level models for straight rail corridors served by leaky coaxial
//! cables (LCX) or pinching-antenna systems (PASS), plus a channel-estimation
//! benchmark for a moving user.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! parallel evaluation live in the `railwave` crate.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` style guards deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod ce;
pub mod corridor;
pub mod error;
pub mod lcx;
pub mod pass;
pub mod sweep;

pub use corridor::{CorridorGeometry, RadioConfig};
pub use error::{Error, Result};
pub use lcx::{FeedMode, LcxCable, LcxDeployment, LcxParams};
pub use pass::{ActivationSet, PassArray, PassParams};
pub use sweep::{Architecture, ScenarioSpec, SweepResult};
