use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use super::profile::sor_match;
use crate::vehicle::VehicleId;
use crate::world::World;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vehicle {0} is not part of the snapshot")]
    UnknownNode(VehicleId),
    #[error("self-loop on {0}")]
    SelfLoop(VehicleId),
}

/// Undirected contact graph of community members around one vehicle.
///
/// Nodes are kept sorted by id and adjacency lists sorted by index, so every
/// traversal order (and therefore every tie-break) is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSnapshot {
    nodes: Vec<VehicleId>,
    index: HashMap<VehicleId, usize>,
    adjacency: Vec<Vec<usize>>,
    gateways: Vec<bool>,
}

impl GraphSnapshot {
    pub fn new(
        nodes: impl IntoIterator<Item = VehicleId>,
        edges: impl IntoIterator<Item = (VehicleId, VehicleId)>,
        gateways: impl IntoIterator<Item = VehicleId>,
    ) -> Result<Self, GraphError> {
        let nodes: Vec<VehicleId> = nodes.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let index: HashMap<VehicleId, usize> =
            nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nodes.len()];
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let ia = *index.get(&a).ok_or(GraphError::UnknownNode(a))?;
            let ib = *index.get(&b).ok_or(GraphError::UnknownNode(b))?;
            adj[ia].insert(ib);
            adj[ib].insert(ia);
        }
        let mut flags = vec![false; nodes.len()];
        for g in gateways {
            flags[*index.get(&g).ok_or(GraphError::UnknownNode(g))?] = true;
        }
        Ok(GraphSnapshot {
            nodes,
            index,
            adjacency: adj.into_iter().map(|s| s.into_iter().collect()).collect(),
            gateways: flags,
        })
    }

    pub fn nodes(&self) -> &[VehicleId] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn contains(&self, v: VehicleId) -> bool {
        self.index.contains_key(&v)
    }

    pub fn index_of(&self, v: VehicleId) -> Result<usize, GraphError> {
        self.index.get(&v).copied().ok_or(GraphError::UnknownNode(v))
    }

    pub fn neighbors(&self, v: VehicleId) -> Result<impl Iterator<Item = VehicleId> + '_, GraphError> {
        let i = self.index_of(v)?;
        Ok(self.adjacency[i].iter().map(|&j| self.nodes[j]))
    }

    pub fn has_edge(&self, a: VehicleId, b: VehicleId) -> bool {
        match (self.index.get(&a), self.index.get(&b)) {
            (Some(&ia), Some(&ib)) => self.adjacency[ia].binary_search(&ib).is_ok(),
            _ => false,
        }
    }

    pub fn is_gateway(&self, v: VehicleId) -> bool {
        self.index.get(&v).is_some_and(|&i| self.gateways[i])
    }

    pub fn gateway_count(&self) -> usize {
        self.gateways.iter().filter(|&&g| g).count()
    }

    pub(crate) fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub(crate) fn gateway_flags(&self) -> &[bool] {
        &self.gateways
    }
}

/// BFS over in-range community members (those sharing a routine with
/// `center`) out to `hops`, then every in-range pair among them becomes an
/// edge. Gateways are members covered by a base station.
pub fn build_snapshot(world: &World, center: VehicleId, hops: usize) -> GraphSnapshot {
    let mut members = vec![center];
    let mut depth: HashMap<VehicleId, usize> = HashMap::from([(center, 0)]);
    if world.is_active(center) {
        let profile = world.profile(center);
        let mut queue = VecDeque::from([center]);
        while let Some(u) = queue.pop_front() {
            let d = depth[&u];
            if d == hops {
                continue;
            }
            for &w in world.neighbors_of(u) {
                if depth.contains_key(&w) || !sor_match(profile, world.profile(w)) {
                    continue;
                }
                depth.insert(w, d + 1);
                members.push(w);
                queue.push_back(w);
            }
        }
    }
    members.sort_unstable();

    let mut edges = Vec::new();
    for &a in &members {
        for &b in world.neighbors_of(a) {
            if a < b && depth.contains_key(&b) {
                edges.push((a, b));
            }
        }
    }
    let gateways: Vec<VehicleId> = members
        .iter()
        .copied()
        .filter(|&v| world.in_bs_range(v))
        .collect();
    GraphSnapshot::new(members, edges, gateways).expect("snapshot edges come from its own node set")
}
