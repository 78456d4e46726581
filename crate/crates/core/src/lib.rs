//! Social-vehicle dissemination of critical urban events.
//!
//! The crate bundles four layers:
//!
//! * [`sim`]: a single-threaded discrete-event kernel with a seeded RNG and
//!   a run loop that drives mobility, beaconing, detection and packets.
//! * [`mobility`]: CSV trace ingestion and synthetic straight-road generators.
//! * [`social`]: routine profiles, community neighbor lists, contact-graph
//!   snapshots, centralities and the structural-influence (STR) score.
//! * [`protocol`]: the community-scoped relay-selection protocol with its
//!   Detector / Relay / Gateway roles, plus a restricted-flooding baseline.
//!
//! [`metrics`], [`config`] and [`experiment`] turn runs into tables, and
//! [`parallel`] fans independent runs out over rayon when the `parallel`
//! feature is enabled.

pub mod config;
pub mod experiment;
pub mod geo;
pub mod metrics;
pub mod mobility;
pub mod parallel;
pub mod protocol;
pub mod sim;
pub mod social;
pub mod time;
pub mod vehicle;
pub mod world;

pub use config::{Protocol, ScenarioConfig};
pub use geo::Point;
pub use metrics::MetricsReport;
pub use sim::{Scenario, Simulator};
pub use time::SimTime;
pub use vehicle::{VehicleId, VehicleState};
