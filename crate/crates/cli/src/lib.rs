//! Library surface of the benchmark harness, used by the binary and the
//! integration tests.

pub mod config;
pub mod experiment;
pub mod report;
