use super::{Action, DiscardReason, MonitoringPacket};
use crate::social::sor_match;
use crate::time::SimTime;
use crate::vehicle::VehicleState;
use crate::world::World;

/// Restricted flooding: every community member rebroadcasts each packet the
/// first time it hears it, while TTL remains; gateways also deliver.
pub fn flooding_handle(
    v: &mut VehicleState,
    pkt: &MonitoringPacket,
    world: &World,
    _now: SimTime,
) -> Vec<Action> {
    v.roles.is_gateway = world.in_bs_range(v.id);
    if !v.roles.seen_packets.insert(pkt.id()) {
        return vec![Action::Discard(DiscardReason::Duplicate)];
    }
    if !sor_match(&v.profile, &pkt.community) {
        return vec![Action::Discard(DiscardReason::NotCommunity)];
    }
    if pkt.ttl == 0 {
        return vec![Action::Discard(DiscardReason::TtlExpired)];
    }
    let mut actions = Vec::with_capacity(2);
    if v.roles.is_gateway {
        actions.push(Action::DeliverToBs);
    }
    actions.push(Action::Broadcast(pkt.forwarded(v.id, None)));
    actions
}
