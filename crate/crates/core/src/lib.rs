//! Polya-urn contagion on networks.
//!
//! Each node owns an urn of red (infected) and black (healthy) mass. At every
//! step a node draws from its *super urn*, the pooled urns of its closed
//! neighbourhood, and reinforces its own urn with the drawn colour.

pub mod engine;
pub mod graph;
pub mod harness;
pub mod optimize;
pub mod oracle;
pub mod policy;
