//! Scenario definition: loading, defaults, validation and community assignment.
//!
//! Config files are flat TOML: one `key = value` per line, `#` comments, no
//! tables. Unknown keys are rejected. Every key is optional; an empty file
//! yields the low-density preset.
//!
//! ```toml
//! preset = "hd"            # "ld" (default) or "hd"
//! protocol = "flooding"    # or "sociable"
//! seed = 7
//! bs_positions = [[1300.0, 8.75]]
//! ```

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::Point;
use crate::mobility::{Directions, RoadSpec};
pub use crate::protocol::Protocol;
use crate::protocol::{CriticalEvent, EventId, ProtocolParams};
use crate::sim::rng_stream;
use crate::social::SocialProfile;
use crate::time::SimTime;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config syntax: {0}")]
    Parse(String),
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// one-way road, 3 lanes, 91 vehicles
    #[default]
    Ld,
    /// two-way road, 6 lanes, 754 vehicles
    Hd,
}

impl std::str::FromStr for Preset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ld" => Ok(Preset::Ld),
            "hd" => Ok(Preset::Hd),
            other => Err(format!("unknown preset `{other}` (expected ld or hd)")),
        }
    }
}

/// Distance from the event to the default base station, along +x.
pub const DEFAULT_BS_OFFSET: f64 = 300.0;

/// A fully resolved, validated experiment definition. Times are seconds,
/// distances meters.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub protocol: Protocol,
    pub duration: f64,
    pub mobility_tick: f64,
    pub vehicle_count: usize,
    /// When set, positions come from this CSV trace instead of `road`.
    pub trace: Option<PathBuf>,
    pub road: RoadSpec,
    pub event_location: Point,
    pub event_radius: f64,
    pub event_start: f64,
    pub event_duration: f64,
    pub transmission_range: f64,
    pub bs_positions: Vec<Point>,
    pub relationship_rate: f64,
    pub ttl_initial: u32,
    pub w_ec_min: f64,
    pub w_ec_max: f64,
    pub beacon_period: f64,
    /// monitoring packets per second per detector
    pub monitor_rate: f64,
    pub neighbor_staleness: f64,
    pub snapshot_hops: usize,
    pub hop_latency: f64,
    pub bucket_width: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self::preset(Preset::Ld)
    }
}

impl ScenarioConfig {
    pub fn preset(preset: Preset) -> Self {
        RawConfig {
            preset: Some(preset),
            ..RawConfig::default()
        }
        .resolve()
        .expect("presets are valid")
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        RawConfig::parse(text)?.resolve()
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.to_raw()).expect("flat config always serializes")
    }

    pub fn event(&self) -> CriticalEvent {
        CriticalEvent {
            id: EventId(0),
            location: self.event_location,
            radius: self.event_radius,
            start: SimTime::from_secs(self.event_start),
            duration: SimTime::from_secs(self.event_duration),
        }
    }

    pub fn protocol_params(&self) -> ProtocolParams {
        ProtocolParams {
            ttl_initial: self.ttl_initial,
            w_ec_min: self.w_ec_min,
            w_ec_max: self.w_ec_max,
            snapshot_hops: self.snapshot_hops,
        }
    }

    /// Same scenario with the gateway weight pinned (no per-hop shift).
    pub fn with_fixed_gateway_weight(&self, w_ec: f64) -> Self {
        ScenarioConfig {
            w_ec_min: w_ec,
            w_ec_max: w_ec,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        positive("duration", self.duration)?;
        positive("mobility_tick", self.mobility_tick)?;
        positive("event_radius", self.event_radius)?;
        positive("event_duration", self.event_duration)?;
        positive("transmission_range", self.transmission_range)?;
        positive("beacon_period", self.beacon_period)?;
        positive("monitor_rate", self.monitor_rate)?;
        positive("neighbor_staleness", self.neighbor_staleness)?;
        positive("hop_latency", self.hop_latency)?;
        positive("bucket_width", self.bucket_width)?;
        if !(self.event_start >= 0.0 && self.event_start.is_finite()) {
            return Err(invalid("event_start", format!("must be a finite time >= 0, got {}", self.event_start)));
        }
        if !self.event_location.is_finite() {
            return Err(invalid("event_x", "event location must be finite"));
        }
        if self.bs_positions.is_empty() {
            return Err(invalid("bs_positions", "at least one base station is required"));
        }
        if self.bs_positions.iter().any(|p| !p.is_finite()) {
            return Err(invalid("bs_positions", "coordinates must be finite"));
        }
        if !(0.0..=1.0).contains(&self.relationship_rate) {
            return Err(invalid(
                "relationship_rate",
                format!("must lie in [0, 1], got {}", self.relationship_rate),
            ));
        }
        if self.ttl_initial < 1 {
            return Err(invalid("ttl_initial", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.w_ec_min) {
            return Err(invalid("w_ec_min", format!("must lie in [0, 1], got {}", self.w_ec_min)));
        }
        if !(0.0..=1.0).contains(&self.w_ec_max) || self.w_ec_max < self.w_ec_min {
            return Err(invalid(
                "w_ec_max",
                format!("must lie in [w_ec_min, 1], got {}", self.w_ec_max),
            ));
        }
        if self.snapshot_hops < 1 {
            return Err(invalid("snapshot_hops", "must be at least 1"));
        }
        self.road.validate().map_err(|e| invalid("road", e.to_string()))?;
        Ok(())
    }

    fn to_raw(&self) -> RawConfig {
        RawConfig {
            preset: None,
            seed: Some(self.seed),
            protocol: Some(self.protocol),
            duration: Some(self.duration),
            mobility_tick: Some(self.mobility_tick),
            vehicle_count: Some(self.vehicle_count),
            trace: self.trace.clone(),
            lanes: Some(self.road.lane_count),
            directions: Some(self.road.directions),
            lane_length: Some(self.road.lane_length),
            lane_spacing: Some(self.road.lane_spacing),
            speed_min: Some(self.road.speed_min),
            speed_max: Some(self.road.speed_max),
            spawn_rate: Some(self.road.spawn_rate),
            event_x: Some(self.event_location.x),
            event_y: Some(self.event_location.y),
            event_radius: Some(self.event_radius),
            event_start: Some(self.event_start),
            event_duration: Some(self.event_duration),
            transmission_range: Some(self.transmission_range),
            bs_positions: Some(self.bs_positions.iter().map(|p| [p.x, p.y]).collect()),
            relationship_rate: Some(self.relationship_rate),
            ttl_initial: Some(self.ttl_initial),
            w_ec_min: Some(self.w_ec_min),
            w_ec_max: Some(self.w_ec_max),
            beacon_period: Some(self.beacon_period),
            monitor_rate: Some(self.monitor_rate),
            neighbor_staleness: Some(self.neighbor_staleness),
            snapshot_hops: Some(self.snapshot_hops),
            hop_latency: Some(self.hop_latency),
            bucket_width: Some(self.bucket_width),
        }
    }
}

fn positive(field: &'static str, value: f64) -> Result<(), ConfigError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive, got {value}")))
    }
}

/// The on-disk shape: every key optional, unknown keys rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    pub seed: Option<u64>,
    pub protocol: Option<Protocol>,
    pub duration: Option<f64>,
    pub mobility_tick: Option<f64>,
    pub vehicle_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<PathBuf>,
    pub lanes: Option<u32>,
    pub directions: Option<Directions>,
    pub lane_length: Option<f64>,
    pub lane_spacing: Option<f64>,
    pub speed_min: Option<f64>,
    pub speed_max: Option<f64>,
    pub spawn_rate: Option<f64>,
    pub event_x: Option<f64>,
    pub event_y: Option<f64>,
    pub event_radius: Option<f64>,
    pub event_start: Option<f64>,
    pub event_duration: Option<f64>,
    pub transmission_range: Option<f64>,
    pub bs_positions: Option<Vec<[f64; 2]>>,
    pub relationship_rate: Option<f64>,
    pub ttl_initial: Option<u32>,
    pub w_ec_min: Option<f64>,
    pub w_ec_max: Option<f64>,
    pub beacon_period: Option<f64>,
    pub monitor_rate: Option<f64>,
    pub neighbor_staleness: Option<f64>,
    pub snapshot_hops: Option<usize>,
    pub hop_latency: Option<f64>,
    pub bucket_width: Option<f64>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($field:ident),+ $(,)?) => {
        RawConfig { $($field: $top.$field.or($base.$field)),+ }
    };
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// Values in `top` win over values in `self`.
    pub fn overlay(self, top: RawConfig) -> RawConfig {
        overlay!(
            self, top, preset, seed, protocol, duration, mobility_tick, vehicle_count, trace, lanes,
            directions, lane_length, lane_spacing, speed_min, speed_max, spawn_rate, event_x, event_y,
            event_radius, event_start, event_duration, transmission_range, bs_positions,
            relationship_rate, ttl_initial, w_ec_min, w_ec_max, beacon_period, monitor_rate,
            neighbor_staleness, snapshot_hops, hop_latency, bucket_width,
        )
    }

    /// Applies preset and derived defaults, then validates.
    pub fn resolve(self) -> Result<ScenarioConfig, ConfigError> {
        let preset = self.preset.unwrap_or_default();
        let (lanes, directions, vehicles) = match preset {
            Preset::Ld => (3, Directions::OneWay, 91),
            Preset::Hd => (6, Directions::TwoWay, 754),
        };
        let duration = self.duration.unwrap_or(540.0);
        let vehicle_count = self.vehicle_count.unwrap_or(vehicles);
        let road = RoadSpec {
            lane_count: self.lanes.unwrap_or(lanes),
            directions: self.directions.unwrap_or(directions),
            lane_length: self.lane_length.unwrap_or(2000.0),
            lane_spacing: self.lane_spacing.unwrap_or(3.5),
            speed_min: self.speed_min.unwrap_or(8.0),
            speed_max: self.speed_max.unwrap_or(14.0),
            spawn_rate: self
                .spawn_rate
                .unwrap_or(if duration > 0.0 { vehicle_count as f64 / duration } else { 0.0 }),
        };
        if road.lane_count == 0 {
            return Err(invalid("lanes", "must be at least 1"));
        }
        let event_location = Point::new(
            self.event_x.unwrap_or(road.lane_length / 2.0),
            self.event_y.unwrap_or(road.center_y()),
        );
        let bs_positions = match self.bs_positions {
            Some(list) => list.into_iter().map(|[x, y]| Point::new(x, y)).collect(),
            None => vec![Point::new(event_location.x + DEFAULT_BS_OFFSET, road.center_y())],
        };
        let cfg = ScenarioConfig {
            seed: self.seed.unwrap_or(1),
            protocol: self.protocol.unwrap_or_default(),
            duration,
            mobility_tick: self.mobility_tick.unwrap_or(0.1),
            vehicle_count,
            trace: self.trace,
            road,
            event_location,
            event_radius: self.event_radius.unwrap_or(100.0),
            event_start: self.event_start.unwrap_or(30.0),
            event_duration: self.event_duration.unwrap_or(480.0),
            transmission_range: self.transmission_range.unwrap_or(100.0),
            bs_positions,
            relationship_rate: self.relationship_rate.unwrap_or(0.9),
            ttl_initial: self.ttl_initial.unwrap_or(3),
            w_ec_min: self.w_ec_min.unwrap_or(0.1),
            w_ec_max: self.w_ec_max.unwrap_or(0.9),
            beacon_period: self.beacon_period.unwrap_or(1.0),
            monitor_rate: self.monitor_rate.unwrap_or(1.0),
            neighbor_staleness: self.neighbor_staleness.unwrap_or(3.0),
            snapshot_hops: self.snapshot_hops.unwrap_or(2),
            hop_latency: self.hop_latency.unwrap_or(0.002),
            bucket_width: self.bucket_width.unwrap_or(10.0),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig, ConfigError> {
    load_raw(path)?.resolve()
}

pub fn load_raw(path: impl AsRef<Path>) -> Result<RawConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    RawConfig::parse(&text)
}

/// Shared routine given to community members.
pub fn community_tag() -> SocialProfile {
    SocialProfile::single("corridor", "commute")
}

pub(crate) const COMMUNITY_STREAM: u64 = 2;

/// Exactly `round(rate * n)` vehicles, drawn uniformly for the seed, share
/// one routine; every other vehicle gets a routine of its own.
pub fn assign_communities(vehicle_count: usize, rate: f64, seed: u64) -> Vec<Arc<SocialProfile>> {
    let members = ((rate * vehicle_count as f64).round() as usize).min(vehicle_count);
    let mut order: Vec<usize> = (0..vehicle_count).collect();
    order.shuffle(&mut rng_stream(seed, COMMUNITY_STREAM));
    let shared = Arc::new(community_tag());
    let mut profiles: Vec<Option<Arc<SocialProfile>>> = vec![None; vehicle_count];
    for (rank, &i) in order.iter().enumerate() {
        profiles[i] = Some(if rank < members {
            Arc::clone(&shared)
        } else {
            Arc::new(SocialProfile::single(&format!("solo-{i}"), "commute"))
        });
    }
    profiles.into_iter().map(|p| p.expect("every index assigned")).collect()
}
