//! Detection and dissemination: the community-scoped relay protocol and the
//! restricted-flooding baseline it is compared against.

mod flooding;
mod packet;
mod sociable;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use flooding::flooding_handle;
pub use packet::{EventContext, EventId, MonitoringPacket, PacketId};
pub use sociable::{handle_monitoring, select_relay};

use crate::geo::Point;
use crate::time::SimTime;
use crate::vehicle::{VehicleId, VehicleState};
use crate::world::World;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    #[default]
    Sociable,
    Flooding,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::Sociable => "sociable",
            Protocol::Flooding => "flooding",
        }
    }
}

impl std::str::FromStr for Protocol {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sociable" => Ok(Protocol::Sociable),
            "flooding" => Ok(Protocol::Flooding),
            other => Err(format!("unknown protocol `{other}` (expected sociable or flooding)")),
        }
    }
}

/// A single fixed critical event.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalEvent {
    pub id: EventId,
    pub location: Point,
    pub radius: f64,
    pub start: SimTime,
    pub duration: SimTime,
}

impl CriticalEvent {
    pub fn is_active(&self, now: SimTime) -> bool {
        self.start <= now && now < self.start + self.duration
    }
}

/// Knobs shared by both protocols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    pub ttl_initial: u32,
    pub w_ec_min: f64,
    pub w_ec_max: f64,
    pub snapshot_hops: usize,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        ProtocolParams {
            ttl_initial: 3,
            w_ec_min: 0.1,
            w_ec_max: 0.9,
            snapshot_hops: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiscardReason {
    Duplicate,
    NotCommunity,
    TtlExpired,
    NotRelay,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    DeliverToBs,
    Broadcast(MonitoringPacket),
    Discard(DiscardReason),
}

/// Starts or continues monitoring when `v` is within the event radius.
///
/// Each call while in range yields a fresh packet; the kernel calls this at
/// the monitoring rate. Leaving the radius ends the detection episode.
pub fn detect(
    v: &mut VehicleState,
    world: &World,
    ev: &CriticalEvent,
    params: &ProtocolParams,
    now: SimTime,
) -> Option<MonitoringPacket> {
    let kin = world.kinematics(v.id);
    let in_range = ev.is_active(now)
        && kin.is_some_and(|k| k.position.within(&ev.location, ev.radius));
    if !in_range {
        v.detecting_since = None;
        return None;
    }
    let kin = kin.copied().expect("checked above");
    let since = *v.detecting_since.get_or_insert(now);
    v.roles.is_detector = true;
    let sequence = v.take_sequence();
    Some(MonitoringPacket {
        event_id: ev.id,
        origin: v.id,
        sequence,
        ttl: params.ttl_initial,
        ttl_initial: params.ttl_initial,
        hop_index: 0,
        next_relay: None,
        sender: v.id,
        community: Arc::clone(&v.profile),
        context: EventContext {
            detect_time: since,
            location: kin.position,
            speed: kin.speed,
            direction: kin.heading,
        },
        created_at: now,
    })
}

/// Dispatches a packet to the handler of the chosen protocol.
pub fn handle(
    protocol: Protocol,
    v: &mut VehicleState,
    pkt: &MonitoringPacket,
    world: &World,
    params: &ProtocolParams,
    now: SimTime,
) -> Vec<Action> {
    match protocol {
        Protocol::Sociable => handle_monitoring(v, pkt, world, params, now),
        Protocol::Flooding => flooding_handle(v, pkt, world, now),
    }
}

/// What one vehicle did with one packet, as recorded in a run's action log.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum LoggedAction {
    Detected,
    DeliveredToBs,
    Broadcast { ttl: u32, next_relay: Option<VehicleId> },
    Discarded(DiscardReason),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LogEntry {
    pub time: SimTime,
    pub vehicle: VehicleId,
    pub packet: PacketId,
    /// hop index of the copy handled, or of the copy sent for broadcasts
    pub hop: u32,
    pub action: LoggedAction,
    /// Vehicle was inside base-station coverage when it acted.
    pub at_gateway: bool,
}

impl LogEntry {
    /// Whether this entry makes the vehicle a cooperator for the event:
    /// detecting, relaying, delivering, or receiving the packet as a
    /// community gateway (even one whose TTL had run out).
    pub fn is_collaboration(&self) -> bool {
        match self.action {
            LoggedAction::Detected | LoggedAction::DeliveredToBs | LoggedAction::Broadcast { .. } => true,
            LoggedAction::Discarded(DiscardReason::TtlExpired) => self.at_gateway,
            LoggedAction::Discarded(_) => false,
        }
    }
}

/// The cooperating set of an event, rebuilt from an action log.
pub fn collaborator_set(log: &[LogEntry], event: EventId) -> BTreeSet<VehicleId> {
    log.iter()
        .filter(|e| e.packet.event == event && e.is_collaboration())
        .map(|e| e.vehicle)
        .collect()
}

/// Cooperating sets for every event appearing in the log.
pub fn collaborators_by_event(log: &[LogEntry]) -> BTreeMap<EventId, BTreeSet<VehicleId>> {
    let mut out: BTreeMap<EventId, BTreeSet<VehicleId>> = BTreeMap::new();
    for e in log.iter().filter(|e| e.is_collaboration()) {
        out.entry(e.packet.event).or_default().insert(e.vehicle);
    }
    out
}
