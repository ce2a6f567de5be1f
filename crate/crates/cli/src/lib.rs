//! Report plumbing and check grids behind the `nearby` binary.

pub mod commands;
pub mod report;
pub mod suites;
