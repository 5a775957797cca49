//! Function-correcting codes for the symbol-pair read channel.
//!
//! - [`pairmetric`]: binary words, the cyclic pair read map, pair distance.
//! - [`counting`]: exact pair-ball sizes and classical size bounds.
//! - [`irregular`]: codes with per-pair distance requirements, their bounds
//!   and exact minimum lengths.
//! - [`fcspc`]: function tables, distance matrices of a function, the
//!   explicit encoder families and their verification.
//! - [`channel`]: pair-error channel simulation and function-value decoding.

pub mod channel;
pub mod counting;
pub mod error;
pub mod fcspc;
pub mod irregular;
pub mod pairmetric;

pub use error::{Error, Result};
pub use irregular::DistanceMatrix;
pub use pairmetric::{BinaryWord, Metric, PairVector};
