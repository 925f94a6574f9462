//! Analytical performance models for hierarchical mobility management,
//! with a seeded Monte-Carlo simulator that verifies the closed forms.
//!
//! The crate models a coverage hierarchy of hexagonal RAN cells grouped
//! into Mobility Regions and square grids of regions grouped into
//! Mobility Areas. On top of that geometry it derives boundary-crossing
//! distributions for a mobile node's active life, hop-count statistics
//! of the forwarding plane, per-area control-plane event rates, and
//! comparative hand-off and signaling-cost metrics for a mobility-label
//! scheme (H-MLBN) against hierarchical and basic Mobile IP.
//!
//! Modules:
//! - [`geometry`]: region/area geometry and walk-graph summaries;
//! - [`movement`]: crossing probabilities, crossing-count
//!   distributions, the inter-area transition matrix;
//! - [`traffic`]: hop-count chain and the event-rate linear system;
//! - [`metrics`]: link counts, routing penalties, hand-off times and
//!   intensities, update costs;
//! - [`sim`]: seeded Monte-Carlo verification of the movement and
//!   hop-count models.
//!
//! All analytical values are pure functions of their inputs; simulation
//! output is a pure function of `(seed, config)` regardless of worker
//! count.

pub mod error;
pub mod geometry;
pub mod metrics;
pub mod movement;
pub mod sim;
pub mod traffic;

pub use error::{ModelError, Result};

/// Crate version, exposed for run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
