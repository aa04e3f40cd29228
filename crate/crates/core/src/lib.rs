//! Exact secrecy and channel-resolvability exponents for discrete memoryless
//! wiretap channels under i.i.d. and constant-composition random coding.
//!
//! * [`prob`]: distributions, channels and information measures (nats).
//! * [`ntype`]: n-types, joint n-types and type-class counting.
//! * [`iid`]: the i.i.d.-ensemble exponent and its primal grid oracle.
//! * [`cc`]: the constant-composition exponent and the E0 lower bound.
//! * [`finite_n`]: finite-blocklength exponents and the exact type-sum
//!   surrogate for the expected divergence.
//! * [`sim`]: random codebooks, exact output laws and leakage at small n.

pub mod cc;
pub mod error;
pub mod finite_n;
pub mod iid;
pub mod ntype;
pub mod prob;
pub mod sim;
mod optim;

pub use error::{Error, Result};
pub use ntype::{Ensemble, JointNType, NType};
pub use optim::Regime;
pub use prob::{Channel, Distribution, JointDistribution};
