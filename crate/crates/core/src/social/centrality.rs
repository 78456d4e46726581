//! Normalized centralities over a [`GraphSnapshot`].
//!
//! All four scores live in `[0, 1]`:
//!
//! * degree: `deg(v) / (n - 1)`;
//! * closeness: `(r - 1) / sum(d)` scaled by `(r - 1) / (n - 1)`, where `r`
//!   counts the nodes reachable from `v` (itself included). Unreachable nodes
//!   are skipped, so disconnected snapshots never divide by infinity;
//! * betweenness: Brandes accumulation, halved for undirected pairs, over
//!   `(n - 1)(n - 2) / 2`;
//! * "eigenvector": **not** a spectral computation. Importance here means
//!   direct base-station reach, so the score is the fraction of the
//!   snapshot's gateways adjacent to `v`. A gateway's own flag never counts
//!   toward its own score.

use std::collections::VecDeque;

use super::snapshot::{GraphError, GraphSnapshot};
use super::weights::StrWeights;
use crate::vehicle::VehicleId;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CentralityScores {
    pub betweenness: f64,
    pub closeness: f64,
    pub degree: f64,
    pub eigenvector: f64,
}

/// Scores for every node of one snapshot, computed in a single pass.
#[derive(Debug, Clone)]
pub struct CentralityTable {
    nodes: Vec<VehicleId>,
    scores: Vec<CentralityScores>,
}

impl CentralityTable {
    pub fn compute(g: &GraphSnapshot) -> Self {
        let n = g.node_count();
        let stats = path_stats(g);
        let betweenness = normalize_betweenness(stats.betweenness);
        let scores = (0..n)
            .map(|i| CentralityScores {
                betweenness: betweenness[i],
                closeness: closeness_from(n, stats.reachable[i], stats.distance_sum[i]),
                degree: degree_at(g, i),
                eigenvector: gateway_adjacency_at(g, i),
            })
            .collect();
        CentralityTable {
            nodes: g.nodes().to_vec(),
            scores,
        }
    }

    pub fn get(&self, v: VehicleId) -> Result<&CentralityScores, GraphError> {
        self.nodes
            .binary_search(&v)
            .map(|i| &self.scores[i])
            .map_err(|_| GraphError::UnknownNode(v))
    }

    pub fn iter(&self) -> impl Iterator<Item = (VehicleId, &CentralityScores)> {
        self.nodes.iter().copied().zip(self.scores.iter())
    }
}

pub fn degree_centrality(g: &GraphSnapshot, v: VehicleId) -> Result<f64, GraphError> {
    Ok(degree_at(g, g.index_of(v)?))
}

pub fn closeness_centrality(g: &GraphSnapshot, v: VehicleId) -> Result<f64, GraphError> {
    Ok(closeness_at(g, g.index_of(v)?))
}

pub fn betweenness_centrality(g: &GraphSnapshot, v: VehicleId) -> Result<f64, GraphError> {
    let i = g.index_of(v)?;
    Ok(brandes(g)[i])
}

pub fn eigenvector_gateway_centrality(g: &GraphSnapshot, v: VehicleId) -> Result<f64, GraphError> {
    Ok(gateway_adjacency_at(g, g.index_of(v)?))
}

/// Structural influence of `v`: the weighted sum of its four centralities.
pub fn compute_str(g: &GraphSnapshot, v: VehicleId, w: &StrWeights) -> Result<f64, GraphError> {
    let i = g.index_of(v)?;
    let scores = CentralityScores {
        betweenness: brandes(g)[i],
        closeness: closeness_at(g, i),
        degree: degree_at(g, i),
        eigenvector: gateway_adjacency_at(g, i),
    };
    Ok(w.score(&scores))
}

fn degree_at(g: &GraphSnapshot, i: usize) -> f64 {
    let n = g.node_count();
    if n <= 1 {
        return 0.0;
    }
    g.adjacency()[i].len() as f64 / (n - 1) as f64
}

fn bfs_distances(adj: &[Vec<usize>], source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap_or(0);
        for &w in &adj[u] {
            if dist[w].is_none() {
                dist[w] = Some(du + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

fn closeness_at(g: &GraphSnapshot, i: usize) -> f64 {
    let n = g.node_count();
    if n <= 1 {
        return 0.0;
    }
    let dist = bfs_distances(g.adjacency(), i);
    let (reachable, total) = dist
        .iter()
        .flatten()
        .fold((0usize, 0usize), |(r, s), &d| (r + 1, s + d));
    closeness_from(n, reachable, total)
}

/// `reachable` counts the source itself.
fn closeness_from(n: usize, reachable: usize, total: usize) -> f64 {
    if n <= 1 || reachable <= 1 || total == 0 {
        return 0.0;
    }
    let others = (reachable - 1) as f64;
    (others / total as f64) * (others / (n - 1) as f64)
}

fn gateway_adjacency_at(g: &GraphSnapshot, i: usize) -> f64 {
    let flags = g.gateway_flags();
    let total = flags.iter().filter(|&&f| f).count();
    let adjacent = g.adjacency()[i].iter().filter(|&&j| flags[j]).count();
    adjacent as f64 / total.max(1) as f64
}

struct PathStats {
    /// unnormalized, each pair counted from both ends
    betweenness: Vec<f64>,
    reachable: Vec<usize>,
    distance_sum: Vec<usize>,
}

/// Normalized betweenness for every node.
fn brandes(g: &GraphSnapshot) -> Vec<f64> {
    normalize_betweenness(path_stats(g).betweenness)
}

fn normalize_betweenness(mut centrality: Vec<f64>) -> Vec<f64> {
    let n = centrality.len();
    if n < 3 {
        centrality.fill(0.0);
        return centrality;
    }
    // each unordered pair was visited from both ends
    let pairs = ((n - 1) * (n - 2)) as f64 / 2.0;
    for c in &mut centrality {
        *c = (*c / 2.0 / pairs).clamp(0.0, 1.0);
    }
    centrality
}

/// One Brandes sweep: dependency accumulation plus per-source BFS distance
/// sums, which closeness reuses.
fn path_stats(g: &GraphSnapshot) -> PathStats {
    let adj = g.adjacency();
    let n = adj.len();
    let mut centrality = vec![0.0_f64; n];
    let mut reachable = vec![1usize; n];
    let mut distance_sum = vec![0usize; n];
    let mut stack = Vec::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0_f64; n];
    let mut dist = vec![-1_i64; n];
    let mut delta = vec![0.0_f64; n];
    let mut queue = VecDeque::with_capacity(n);

    for s in 0..n {
        stack.clear();
        preds.iter_mut().for_each(Vec::clear);
        sigma.fill(0.0);
        dist.fill(-1);
        delta.fill(0.0);
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);

        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in &adj[v] {
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }

        reachable[s] = stack.len();
        distance_sum[s] = stack.iter().map(|&v| dist[v] as usize).sum();
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                centrality[w] += delta[w];
            }
        }
    }

    PathStats {
        betweenness: centrality,
        reachable,
        distance_sum,
    }
}
