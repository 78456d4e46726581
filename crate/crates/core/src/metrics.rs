//! Evaluation metrics and CSV export.
//!
//! Per time bucket:
//! - `ncv`: distinct collaborating vehicles (detectors, relays, gateways)
//! - `ngm`: monitoring packets generated by detectors
//! - `ndm`: distinct packets delivered to a base station
//! - `epo`: transmissions, counting each beacon, monitoring broadcast and
//!   base-station delivery once
//! - `add_ms`: mean delay from detection to the first delivered packet, over
//!   detection episodes whose first delivery falls in the bucket

use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::protocol::{EventId, LogEntry, PacketId, Protocol};
use crate::time::SimTime;
use crate::vehicle::VehicleId;

pub const CSV_HEADER: &str = "bucket_start_s,ncv,ngm,ndm,epo,add_ms";
pub const SWEEP_HEADER: &str = "w_ec,add_ms,ndm";

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransmissionKind {
    Beacon,
    Monitoring,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeliveryLogEntry {
    pub event: EventId,
    pub origin: VehicleId,
    pub sequence: u32,
    pub detect_time: SimTime,
    pub deliver_time: SimTime,
    pub gateway: VehicleId,
    pub hops: u32,
}

impl DeliveryLogEntry {
    pub fn packet(&self) -> PacketId {
        PacketId {
            event: self.event,
            origin: self.origin,
            sequence: self.sequence,
        }
    }

    /// Detection episodes are keyed by detector and episode start.
    pub fn episode(&self) -> (EventId, VehicleId, SimTime) {
        (self.event, self.origin, self.detect_time)
    }

    pub fn delay_ms(&self) -> f64 {
        self.deliver_time.saturating_sub(self.detect_time).as_millis()
    }
}

/// Average delivery delay in milliseconds: for each detection episode, the
/// time from detection until its first packet reached a base station,
/// averaged over episodes. `None` without deliveries. Later deliveries never
/// change an episode's delay.
pub fn compute_add(log: &[DeliveryLogEntry]) -> Option<f64> {
    let mut first: HashMap<(EventId, VehicleId, SimTime), SimTime> = HashMap::new();
    for d in log {
        let t = first.entry(d.episode()).or_insert(d.deliver_time);
        *t = (*t).min(d.deliver_time);
    }
    if first.is_empty() {
        return None;
    }
    let sum: f64 = first
        .iter()
        .map(|((_, _, detect), deliver)| deliver.saturating_sub(*detect).as_millis())
        .sum();
    Some(sum / first.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub bucket_start_s: f64,
    pub ncv: usize,
    pub ngm: u64,
    pub ndm: u64,
    pub epo: u64,
    pub add_ms: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Totals {
    pub ncv: usize,
    pub ngm: u64,
    pub ndm: u64,
    pub epo: u64,
    pub epo_beacons: u64,
    pub epo_monitoring: u64,
    pub add_ms: Option<f64>,
    /// packet copies put on the air, one per receiver in range
    pub copies: u64,
    /// packet copies that reached a receiver
    pub arrivals: u64,
    /// copies whose receiver left the road before arrival
    pub lost: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub protocol: Protocol,
    pub seed: u64,
    pub bucket_width_s: f64,
    pub records: Vec<MetricsRecord>,
    pub deliveries: Vec<DeliveryLogEntry>,
    pub collaborators: BTreeSet<VehicleId>,
    pub totals: Totals,
    /// Full action log, when the run was asked to keep one.
    pub log: Option<Vec<LogEntry>>,
}

impl MetricsReport {
    pub fn max_ncv(&self) -> usize {
        self.records.iter().map(|r| r.ncv).max().unwrap_or(0)
    }

    pub fn ngm_series(&self) -> Vec<u64> {
        self.records.iter().map(|r| r.ngm).collect()
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.bucket_start_s,
                r.ncv,
                r.ngm,
                r.ndm,
                r.epo,
                fmt_opt(r.add_ms)
            ));
        }
        out
    }

    /// Writes the per-bucket table. A run with no recorded activity writes
    /// only the header.
    pub fn export(&self, path: impl AsRef<Path>) -> Result<(), ExportError> {
        let body = if self.is_empty() {
            format!("{CSV_HEADER}\n")
        } else {
            self.to_csv_string()
        };
        write_atomic(path.as_ref(), body.as_bytes())
    }

    /// No transmissions, detections or deliveries at all.
    pub fn is_empty(&self) -> bool {
        self.totals.epo == 0 && self.totals.ngm == 0 && self.totals.ndm == 0
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3}")).unwrap_or_default()
}

/// One sweep point: the fixed gateway weight and what it achieved.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub w_ec: f64,
    pub add_ms: Option<f64>,
    pub ndm: u64,
}

pub fn sweep_csv_string(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{},{}\n", r.w_ec, fmt_opt(r.add_ms), r.ndm));
    }
    out
}

pub fn export_sweep(rows: &[SweepRow], path: impl AsRef<Path>) -> Result<(), ExportError> {
    write_atomic(path.as_ref(), sweep_csv_string(rows).as_bytes())
}

/// Write to a sibling temp file, then rename over the target.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ExportError> {
    let err = |source| ExportError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(bytes).map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}

#[derive(Debug, Clone, Default)]
struct Bucket {
    ngm: u64,
    ndm: u64,
    epo: u64,
    collaborators: HashSet<VehicleId>,
    delays_ms: Vec<f64>,
}

/// Accumulates one run's counters.
#[derive(Debug, Clone)]
pub struct MetricsCollector {
    width: SimTime,
    buckets: Vec<Bucket>,
    delivered: HashSet<PacketId>,
    episodes: HashSet<(EventId, VehicleId, SimTime)>,
    deliveries: Vec<DeliveryLogEntry>,
    collaborators: BTreeSet<VehicleId>,
    totals: Totals,
}

impl MetricsCollector {
    /// Buckets cover `[0, duration)`; anything at or after `duration` lands in
    /// the last bucket.
    pub fn new(duration: SimTime, bucket_width: SimTime) -> Self {
        assert!(bucket_width > SimTime::ZERO, "bucket width must be positive");
        let n = duration.as_micros().div_ceil(bucket_width.as_micros()) as usize;
        MetricsCollector {
            width: bucket_width,
            buckets: vec![Bucket::default(); n],
            delivered: HashSet::new(),
            episodes: HashSet::new(),
            deliveries: Vec::new(),
            collaborators: BTreeSet::new(),
            totals: Totals::default(),
        }
    }

    fn bucket(&mut self, t: SimTime) -> Option<&mut Bucket> {
        let last = self.buckets.len().checked_sub(1)?;
        let i = ((t.as_micros() / self.width.as_micros()) as usize).min(last);
        self.buckets.get_mut(i)
    }

    pub fn record_transmission(&mut self, kind: TransmissionKind, t: SimTime) {
        match kind {
            TransmissionKind::Beacon => self.totals.epo_beacons += 1,
            TransmissionKind::Monitoring => self.totals.epo_monitoring += 1,
        }
        self.totals.epo += 1;
        if let Some(b) = self.bucket(t) {
            b.epo += 1;
        }
    }

    pub fn record_generated(&mut self, t: SimTime) {
        self.totals.ngm += 1;
        if let Some(b) = self.bucket(t) {
            b.ngm += 1;
        }
    }

    pub fn record_collaborator(&mut self, v: VehicleId, t: SimTime) {
        self.collaborators.insert(v);
        if let Some(b) = self.bucket(t) {
            b.collaborators.insert(v);
        }
    }

    pub fn record_copies(&mut self, n: u64) {
        self.totals.copies += n;
    }

    pub fn record_arrival(&mut self) {
        self.totals.arrivals += 1;
    }

    pub fn record_loss(&mut self) {
        self.totals.lost += 1;
    }

    /// Every delivery is one transmission; only the first per packet counts
    /// toward NDM, and only the first per detection episode toward ADD.
    /// Deliveries must arrive in time order.
    pub fn record_delivery(&mut self, entry: DeliveryLogEntry) {
        let t = entry.deliver_time;
        self.record_transmission(TransmissionKind::Monitoring, t);
        if !self.delivered.insert(entry.packet()) {
            return;
        }
        let first_of_episode = self.episodes.insert(entry.episode());
        self.totals.ndm += 1;
        if let Some(b) = self.bucket(t) {
            b.ndm += 1;
            if first_of_episode {
                b.delays_ms.push(entry.delay_ms());
            }
        }
        self.deliveries.push(entry);
    }

    pub fn finish(self, protocol: Protocol, seed: u64, log: Option<Vec<LogEntry>>) -> MetricsReport {
        let width = self.width;
        let records = self
            .buckets
            .into_iter()
            .enumerate()
            .map(|(i, b)| MetricsRecord {
                bucket_start_s: (width.as_secs() * i as f64),
                ncv: b.collaborators.len(),
                ngm: b.ngm,
                ndm: b.ndm,
                epo: b.epo,
                add_ms: (!b.delays_ms.is_empty())
                    .then(|| b.delays_ms.iter().sum::<f64>() / b.delays_ms.len() as f64),
            })
            .collect();
        let mut totals = self.totals;
        totals.ncv = self.collaborators.len();
        totals.add_ms = compute_add(&self.deliveries);
        MetricsReport {
            protocol,
            seed,
            bucket_width_s: width.as_secs(),
            records,
            deliveries: self.deliveries,
            collaborators: self.collaborators,
            totals,
            log,
        }
    }
}
