use std::sync::Arc;

use crate::geo::Point;
use crate::social::SocialProfile;
use crate::time::SimTime;
use crate::vehicle::VehicleId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub u32);

/// Identity of one monitoring packet: `(event, origin detector, sequence)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PacketId {
    pub event: EventId,
    pub origin: VehicleId,
    pub sequence: u32,
}

/// What the detector observed when it first saw the event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventContext {
    /// Start of the detector's current in-range episode.
    pub detect_time: SimTime,
    pub location: Point,
    pub speed: f64,
    pub direction: f64,
}

/// A monitoring message for one critical event.
///
/// `hop_index + ttl == ttl_initial` holds for every copy in flight.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitoringPacket {
    pub event_id: EventId,
    pub origin: VehicleId,
    pub sequence: u32,
    pub ttl: u32,
    pub ttl_initial: u32,
    pub hop_index: u32,
    pub next_relay: Option<VehicleId>,
    /// Vehicle that transmitted this copy (link-layer source).
    pub sender: VehicleId,
    /// Routine profile of the origin; receivers outside it do not cooperate.
    pub community: Arc<SocialProfile>,
    pub context: EventContext,
    pub created_at: SimTime,
}

impl MonitoringPacket {
    pub fn id(&self) -> PacketId {
        PacketId {
            event: self.event_id,
            origin: self.origin,
            sequence: self.sequence,
        }
    }

    /// Copy for the next hop, one TTL unit spent.
    pub fn forwarded(&self, by: VehicleId, next_relay: Option<VehicleId>) -> MonitoringPacket {
        debug_assert!(self.ttl > 0);
        MonitoringPacket {
            ttl: self.ttl - 1,
            hop_index: self.hop_index + 1,
            next_relay,
            sender: by,
            ..self.clone()
        }
    }
}
