//! Experiment harness for the hierarchical mobility performance models:
//! configuration parsing, the analytic pipeline and CSV figure
//! generation. The `hmlbn` binary is a thin wrapper over this library.

pub mod config;
pub mod figures;
pub mod pipeline;
