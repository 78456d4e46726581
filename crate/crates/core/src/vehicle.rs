use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::protocol::PacketId;
use crate::social::{Beacon, CentralityTable, GraphSnapshot, NeighborList, SocialProfile};
use crate::time::SimTime;

/// Dense vehicle index; ordering follows the sorted trace ids, so the
/// lowest `VehicleId` is also the lexicographically smallest trace id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VehicleId(pub u32);

impl VehicleId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VehicleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Protocol roles a vehicle currently holds.
#[derive(Debug, Clone, Default)]
pub struct RoleState {
    pub is_detector: bool,
    pub is_relay_for: HashSet<crate::protocol::EventId>,
    pub is_gateway: bool,
    pub seen_packets: HashSet<PacketId>,
}

/// Per-vehicle protocol state. Kinematics live in [`crate::world::World`].
#[derive(Debug, Clone)]
pub struct VehicleState {
    pub id: VehicleId,
    pub profile: Arc<SocialProfile>,
    pub neighbors: NeighborList,
    pub roles: RoleState,
    /// Start of the current in-range detection episode.
    pub detecting_since: Option<SimTime>,
    next_sequence: u32,
    /// Snapshot and centralities from the last relay decision, reused while
    /// the world epoch is unchanged.
    pub(crate) view: Option<LocalView>,
}

#[derive(Debug, Clone)]
pub(crate) struct LocalView {
    pub epoch: u64,
    pub hops: usize,
    pub snapshot: GraphSnapshot,
    pub table: Option<CentralityTable>,
}

impl VehicleState {
    pub fn new(id: VehicleId, profile: Arc<SocialProfile>) -> Self {
        VehicleState {
            id,
            profile,
            neighbors: NeighborList::default(),
            roles: RoleState::default(),
            detecting_since: None,
            next_sequence: 0,
            view: None,
        }
    }

    /// Community filter plus upsert. Returns whether the list changed.
    pub fn handle_beacon(&mut self, beacon: &Beacon, now: SimTime) -> bool {
        self.neighbors.handle_beacon(&self.profile, beacon, now)
    }

    pub fn expire_neighbors(&mut self, now: SimTime, staleness: SimTime) -> usize {
        self.neighbors.expire(now, staleness)
    }

    pub(crate) fn take_sequence(&mut self) -> u32 {
        let s = self.next_sequence;
        self.next_sequence += 1;
        s
    }
}
