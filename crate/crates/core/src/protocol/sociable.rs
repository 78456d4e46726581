use super::{Action, DiscardReason, MonitoringPacket, ProtocolParams};
use crate::social::{build_snapshot, sor_match, weight_schedule, CentralityTable, GraphSnapshot};
use crate::time::SimTime;
use crate::vehicle::{LocalView, VehicleId, VehicleState};
use crate::world::World;

/// One step of the detection-and-dissemination algorithm at vehicle `v`.
///
/// Checks run in order: duplicate, community membership, TTL, base-station
/// delivery, then relaying when `v` is the origin or the designated next
/// relay. Delivery and relaying may both fire; if neither does the packet
/// is discarded.
pub fn handle_monitoring(
    v: &mut VehicleState,
    pkt: &MonitoringPacket,
    world: &World,
    params: &ProtocolParams,
    _now: SimTime,
) -> Vec<Action> {
    let id = pkt.id();
    v.roles.is_gateway = world.in_bs_range(v.id);
    if v.roles.seen_packets.contains(&id) {
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
    if v.id == pkt.origin || pkt.next_relay == Some(v.id) {
        let next = select_relay_cached(v, pkt, world, params);
        v.roles.is_relay_for.insert(pkt.event_id);
        actions.push(Action::Broadcast(pkt.forwarded(v.id, next)));
    }
    if actions.is_empty() {
        return vec![Action::Discard(DiscardReason::NotRelay)];
    }
    v.roles.seen_packets.insert(id);
    actions
}

/// [`select_relay`] over `v`'s local view, rebuilt only when vehicles have
/// moved since the last decision.
fn select_relay_cached(
    v: &mut VehicleState,
    pkt: &MonitoringPacket,
    world: &World,
    params: &ProtocolParams,
) -> Option<VehicleId> {
    let fresh = v
        .view
        .as_ref()
        .is_some_and(|c| c.epoch == world.epoch() && c.hops == params.snapshot_hops);
    if !fresh {
        v.view = Some(LocalView {
            epoch: world.epoch(),
            hops: params.snapshot_hops,
            snapshot: build_snapshot(world, v.id, params.snapshot_hops),
            table: None,
        });
    }
    let mut view = v.view.take().expect("just filled");
    let candidates = relay_candidates(v, pkt, &view.snapshot);
    let next = match candidates.len() {
        0 => None,
        1 => Some(candidates[0]),
        _ => {
            let table = view.table.get_or_insert_with(|| CentralityTable::compute(&view.snapshot));
            best_by_str(&candidates, table, pkt, params)
        }
    };
    v.view = Some(view);
    next
}

fn relay_candidates(v: &VehicleState, pkt: &MonitoringPacket, snapshot: &GraphSnapshot) -> Vec<VehicleId> {
    match snapshot.neighbors(v.id) {
        Ok(it) => it
            .filter(|&u| u != pkt.sender && u != pkt.origin && v.neighbors.contains(u))
            .collect(),
        Err(_) => Vec::new(),
    }
}

fn best_by_str(
    candidates: &[VehicleId],
    table: &CentralityTable,
    pkt: &MonitoringPacket,
    params: &ProtocolParams,
) -> Option<VehicleId> {
    let weights = weight_schedule(pkt.hop_index, pkt.ttl_initial, params.w_ec_min, params.w_ec_max)
        .expect("packet hop and configured weight bounds are validated upstream");
    let mut best: Option<(VehicleId, f64)> = None;
    for &u in candidates {
        let score = weights.score(table.get(u).expect("candidate is a snapshot node"));
        if best.is_none_or(|(_, b)| score > b) {
            best = Some((u, score));
        }
    }
    best.map(|(u, _)| u)
}

/// Picks the next relay among `v`'s community neighbors: present in both its
/// beacon-built neighbor list and the snapshot, and neither the vehicle that
/// sent this copy nor the origin. Highest STR wins under the hop's weights;
/// ties go to the lowest id. A lone candidate is chosen without scoring.
pub fn select_relay(
    v: &VehicleState,
    pkt: &MonitoringPacket,
    snapshot: &GraphSnapshot,
    params: &ProtocolParams,
) -> Option<VehicleId> {
    let candidates = relay_candidates(v, pkt, snapshot);
    match candidates.len() {
        0 => None,
        1 => Some(candidates[0]),
        _ => best_by_str(&candidates, &CentralityTable::compute(snapshot), pkt, params),
    }
}
