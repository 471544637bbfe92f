//! Numerical toolkit for interaction-free discrimination of quantum
//! channels: decides when two channels with a common vacuum can be told
//! apart without the environment noticing, simulates the Zeno-style probing
//! protocol that achieves it, reduces arbitrary channels to qubit probes via
//! a twirling superchannel, and audits the no-go and rate-limit inequalities
//! on concrete instances.

pub mod channels;
pub mod error;
pub mod json;
pub mod kwiat;
pub mod linops;
pub mod nogo;
pub mod random;
pub mod reduction;
pub mod strategies;

pub use error::{Error, Result};
