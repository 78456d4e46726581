//! Vehicle positions over time.
//!
//! Traces are plain CSV (`time,id,x,y,speed`, `#` comments allowed). Between
//! samples a vehicle moves linearly; before its first and after its last
//! sample it is absent from the road.

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::Point;
use crate::world::Kinematics;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("cannot read trace {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: line {line}{}: {message}", column.map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        path: PathBuf,
        line: u64,
        column: Option<usize>,
        message: String,
    },
    #[error("vehicle {id}: samples at t={t} are not strictly increasing in time")]
    NonMonotonic { id: String, t: f64 },
    #[error("vehicle {id}: non-finite value at t={t}")]
    NonFinite { id: String, t: f64 },
}

#[derive(Debug, Error, PartialEq)]
pub enum RoadError {
    #[error("lane_count must be at least 1")]
    NoLanes,
    #[error("lane_length must be positive, got {0}")]
    ZeroLength(f64),
    #[error("speed range [{min}, {max}] is empty or non-positive")]
    BadSpeedRange { min: f64, max: f64 },
    #[error("spawn_rate must be nonnegative, got {0}")]
    NegativeSpawnRate(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub time: f64,
    #[serde(rename = "id")]
    pub vehicle_id: String,
    pub x: f64,
    pub y: f64,
    pub speed: f64,
}

pub fn load_trace(path: impl AsRef<Path>) -> Result<Vec<TraceRow>, TraceError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| TraceError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_trace(file, path)
}

/// Parses trace CSV from any reader; `origin` only labels error messages.
pub fn read_trace(reader: impl io::Read, origin: &Path) -> Result<Vec<TraceRow>, TraceError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for record in rdr.deserialize::<TraceRow>() {
        let row = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            let column = match e.kind() {
                csv::ErrorKind::Deserialize { err, .. } => err.field().map(|f| f as usize + 1),
                _ => None,
            };
            TraceError::Parse {
                path: origin.to_path_buf(),
                line,
                column,
                message: e.to_string(),
            }
        })?;
        rows.push(row);
    }
    sort_rows(&mut rows);
    Ok(rows)
}

fn sort_rows(rows: &mut [TraceRow]) {
    rows.sort_by(|a, b| {
        a.time
            .total_cmp(&b.time)
            .then_with(|| a.vehicle_id.cmp(&b.vehicle_id))
    });
}

pub fn write_trace(rows: &[TraceRow], writer: impl io::Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Sample {
    t: f64,
    pos: Point,
    speed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VehicleTrack {
    pub id: String,
    samples: Vec<Sample>,
}

impl VehicleTrack {
    pub fn first_seen(&self) -> f64 {
        self.samples[0].t
    }

    pub fn last_seen(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }

    pub fn kinematics_at(&self, t: f64) -> Option<Kinematics> {
        let s = &self.samples;
        if t < s[0].t || t > s[s.len() - 1].t {
            return None;
        }
        // first sample strictly after t
        let hi = s.partition_point(|x| x.t <= t);
        if hi == 0 {
            return None;
        }
        if hi == s.len() {
            let last = s[s.len() - 1];
            let heading = if s.len() > 1 {
                heading_between(&s[s.len() - 2].pos, &last.pos)
            } else {
                0.0
            };
            return Some(Kinematics {
                position: last.pos,
                speed: last.speed,
                heading,
            });
        }
        let (a, b) = (s[hi - 1], s[hi]);
        let frac = (t - a.t) / (b.t - a.t);
        Some(Kinematics {
            position: a.pos.lerp(&b.pos, frac),
            speed: a.speed + (b.speed - a.speed) * frac,
            heading: heading_between(&a.pos, &b.pos),
        })
    }

    pub fn position_at(&self, t: f64) -> Option<Point> {
        self.kinematics_at(t).map(|k| k.position)
    }
}

fn heading_between(a: &Point, b: &Point) -> f64 {
    (b.y - a.y).atan2(b.x - a.x)
}

/// Per-vehicle tracks, sorted by vehicle id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    tracks: Vec<VehicleTrack>,
}

impl Trace {
    pub fn from_rows(rows: &[TraceRow]) -> Result<Self, TraceError> {
        let mut by_id: BTreeMap<&str, Vec<Sample>> = BTreeMap::new();
        for r in rows {
            if !(r.time.is_finite() && r.x.is_finite() && r.y.is_finite() && r.speed.is_finite()) {
                return Err(TraceError::NonFinite {
                    id: r.vehicle_id.clone(),
                    t: r.time,
                });
            }
            by_id.entry(&r.vehicle_id).or_default().push(Sample {
                t: r.time,
                pos: Point::new(r.x, r.y),
                speed: r.speed,
            });
        }
        let mut tracks = Vec::with_capacity(by_id.len());
        for (id, mut samples) in by_id {
            samples.sort_by(|a, b| a.t.total_cmp(&b.t));
            if let Some(w) = samples.windows(2).find(|w| w[1].t <= w[0].t) {
                return Err(TraceError::NonMonotonic {
                    id: id.to_string(),
                    t: w[1].t,
                });
            }
            tracks.push(VehicleTrack {
                id: id.to_string(),
                samples,
            });
        }
        Ok(Trace { tracks })
    }

    pub fn to_rows(&self) -> Vec<TraceRow> {
        let mut rows: Vec<TraceRow> = self
            .tracks
            .iter()
            .flat_map(|tr| {
                tr.samples.iter().map(|s| TraceRow {
                    time: s.t,
                    vehicle_id: tr.id.clone(),
                    x: s.pos.x,
                    y: s.pos.y,
                    speed: s.speed,
                })
            })
            .collect();
        sort_rows(&mut rows);
        rows
    }

    pub fn len(&self) -> usize {
        self.tracks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tracks.is_empty()
    }

    pub fn tracks(&self) -> &[VehicleTrack] {
        &self.tracks
    }

    pub fn track(&self, vehicle_id: &str) -> Option<&VehicleTrack> {
        self.tracks
            .binary_search_by(|t| t.id.as_str().cmp(vehicle_id))
            .ok()
            .map(|i| &self.tracks[i])
    }

    pub fn position_at(&self, vehicle_id: &str, t: f64) -> Option<Point> {
        self.track(vehicle_id)?.position_at(t)
    }

    /// Vehicles standing still for the whole `[0, until]` window.
    pub fn stationary(points: &[(&str, Point)], until: f64) -> Self {
        let rows: Vec<TraceRow> = points
            .iter()
            .flat_map(|(id, p)| {
                [0.0, until].map(|t| TraceRow {
                    time: t,
                    vehicle_id: id.to_string(),
                    x: p.x,
                    y: p.y,
                    speed: 0.0,
                })
            })
            .collect();
        Trace::from_rows(&rows).expect("two distinct timestamps per vehicle")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Directions {
    OneWay,
    TwoWay,
}

/// Straight multi-lane road along +x starting at x = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadSpec {
    pub lane_count: u32,
    pub directions: Directions,
    pub lane_length: f64,
    pub lane_spacing: f64,
    pub speed_min: f64,
    pub speed_max: f64,
    /// vehicles per second, across all lanes
    pub spawn_rate: f64,
}

impl RoadSpec {
    pub fn validate(&self) -> Result<(), RoadError> {
        if self.lane_count == 0 {
            return Err(RoadError::NoLanes);
        }
        if self.lane_length.is_nan() || self.lane_length <= 0.0 {
            return Err(RoadError::ZeroLength(self.lane_length));
        }
        if !(self.speed_min > 0.0 && self.speed_min <= self.speed_max && self.speed_max.is_finite()) {
            return Err(RoadError::BadSpeedRange {
                min: self.speed_min,
                max: self.speed_max,
            });
        }
        if self.spawn_rate.is_nan() || self.spawn_rate < 0.0 {
            return Err(RoadError::NegativeSpawnRate(self.spawn_rate));
        }
        Ok(())
    }

    /// Lanes `[0, forward_lanes)` head +x; the rest head -x.
    pub fn forward_lanes(&self) -> u32 {
        match self.directions {
            Directions::OneWay => self.lane_count,
            Directions::TwoWay => self.lane_count.div_ceil(2),
        }
    }

    pub fn lane_y(&self, lane: u32) -> f64 {
        lane as f64 * self.lane_spacing
    }

    pub fn center_y(&self) -> f64 {
        self.lane_y(self.lane_count - 1) / 2.0
    }
}

/// Deterministic constant-velocity traffic: vehicle `i` enters at
/// `i / spawn_rate` with a uniform speed and leaves at the lane end or at
/// `duration`, whichever comes first. On two-way roads even `i` head +x and
/// odd `i` head -x; within a direction lanes are filled round-robin.
pub fn generate_road(
    spec: &RoadSpec,
    vehicle_count: usize,
    seed: u64,
    duration: f64,
) -> Result<Trace, RoadError> {
    spec.validate()?;
    if spec.spawn_rate == 0.0 || vehicle_count == 0 {
        return Ok(Trace::default());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(MOBILITY_STREAM);
    let width = vehicle_count.to_string().len().max(4);
    let mut rows = Vec::with_capacity(vehicle_count * 2);
    for i in 0..vehicle_count {
        let spawn = i as f64 / spec.spawn_rate;
        if spawn >= duration {
            break;
        }
        let (lane, forward) = lane_for(spec, i);
        let speed = if spec.speed_max > spec.speed_min {
            rng.random_range(spec.speed_min..=spec.speed_max)
        } else {
            spec.speed_min
        };
        let (x0, dir) = if forward { (0.0, 1.0) } else { (spec.lane_length, -1.0) };
        let end = (spawn + spec.lane_length / speed).min(duration);
        let y = spec.lane_y(lane);
        let id = format!("veh{i:0width$}");
        for t in [spawn, end] {
            rows.push(TraceRow {
                time: t,
                vehicle_id: id.clone(),
                x: x0 + dir * speed * (t - spawn),
                y,
                speed,
            });
        }
    }
    Ok(Trace::from_rows(&rows).expect("generated samples are finite and increasing"))
}

fn lane_for(spec: &RoadSpec, i: usize) -> (u32, bool) {
    let n = spec.lane_count as usize;
    let fwd = spec.forward_lanes() as usize;
    if fwd == n {
        return ((i % n) as u32, true);
    }
    let k = i / 2;
    if i.is_multiple_of(2) {
        ((k % fwd) as u32, true)
    } else {
        ((fwd + k % (n - fwd)) as u32, false)
    }
}

pub(crate) const MOBILITY_STREAM: u64 = 1;
