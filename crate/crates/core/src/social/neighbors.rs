use std::collections::BTreeMap;
use std::sync::Arc;

use super::profile::{sor_match, SocialProfile};
use crate::geo::Point;
use crate::time::SimTime;
use crate::vehicle::VehicleId;

/// Periodic hello: id, position, neighbor count and social profile.
#[derive(Debug, Clone)]
pub struct Beacon {
    pub sender: VehicleId,
    pub position: Point,
    pub neighbor_count: usize,
    pub profile: Arc<SocialProfile>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborEntry {
    pub vehicle_id: VehicleId,
    pub last_position: Point,
    pub neighbor_count_reported: usize,
    pub profile: Arc<SocialProfile>,
    pub last_heard: SimTime,
}

/// Neighbors willing to cooperate: only senders sharing a routine with the owner.
#[derive(Debug, Clone, Default)]
pub struct NeighborList {
    entries: BTreeMap<VehicleId, NeighborEntry>,
}

impl NeighborList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, id: VehicleId) -> bool {
        self.entries.contains_key(&id)
    }

    pub fn get(&self, id: VehicleId) -> Option<&NeighborEntry> {
        self.entries.get(&id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &NeighborEntry> {
        self.entries.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = VehicleId> + '_ {
        self.entries.keys().copied()
    }

    pub fn handle_beacon(&mut self, owner: &SocialProfile, beacon: &Beacon, now: SimTime) -> bool {
        if !sor_match(owner, &beacon.profile) {
            return false;
        }
        self.entries.insert(
            beacon.sender,
            NeighborEntry {
                vehicle_id: beacon.sender,
                last_position: beacon.position,
                neighbor_count_reported: beacon.neighbor_count,
                profile: Arc::clone(&beacon.profile),
                last_heard: now,
            },
        );
        true
    }

    /// Drops entries with `now - last_heard > staleness`; returns how many went.
    pub fn expire(&mut self, now: SimTime, staleness: SimTime) -> usize {
        let before = self.entries.len();
        self.entries
            .retain(|_, e| now.saturating_sub(e.last_heard) <= staleness);
        before - self.entries.len()
    }
}
