//! Online fair division of indivisible goods.
//!
//! Goods arrive one at a time and must be handed to an agent on arrival.
//! The crate provides the allocation rules ([`algorithms`]), exact fairness
//! checks ([`metrics`]), adversarial input constructions ([`adversaries`]),
//! independent numeric oracles ([`oracles`]) and experiment drivers
//! ([`harness`]). All values are exact rationals ([`Rat`]).

pub mod adversaries;
pub mod algorithms;
pub mod error;
pub mod harness;
pub mod instance;
pub mod metrics;
pub mod oracles;
pub mod par;
pub mod rat;

pub use error::{Error, Result};
pub use instance::{check_predictions, load_instance, save_instance, Allocation, Instance, Predictions};
pub use par::Execution;
pub use rat::{ExtRat, Rat};
