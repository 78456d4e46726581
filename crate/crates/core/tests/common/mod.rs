//! Shared fixtures and brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sociable::config::Preset;
use sociable::geo::Point;
use proptest::prelude::*;

use sociable::mobility::{Trace, TraceRow};
use sociable::protocol::{LogEntry, LoggedAction};
use sociable::social::{
    betweenness_centrality, closeness_centrality, degree_centrality, eigenvector_gateway_centrality,
    CentralityTable, GraphSnapshot, SocialProfile,
};
use sociable::{Protocol, Scenario, ScenarioConfig, VehicleId};

pub const TOL: f64 = 1e-9;

/// Undirected graph on `0..n` for the oracles.
#[derive(Debug, Clone)]
pub struct SmallGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub gateways: Vec<bool>,
}

impl SmallGraph {
    fn adjacent(&self) -> Vec<Vec<bool>> {
        let mut m = vec![vec![false; self.n]; self.n];
        for &(a, b) in &self.edges {
            m[a][b] = true;
            m[b][a] = true;
        }
        m
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let d = floyd_warshall(self);
        d[0].iter().all(|x| x.is_some())
    }

    pub fn snapshot(&self) -> GraphSnapshot {
        let id = |i: usize| VehicleId(i as u32);
        GraphSnapshot::new(
            (0..self.n).map(id),
            self.edges.iter().map(|&(a, b)| (id(a), id(b))),
            (0..self.n).filter(|&i| self.gateways[i]).map(id),
        )
        .expect("valid graph")
    }
}

pub fn floyd_warshall(g: &SmallGraph) -> Vec<Vec<Option<usize>>> {
    let adj = g.adjacent();
    let n = g.n;
    let mut d = vec![vec![None; n]; n];
    for i in 0..n {
        d[i][i] = Some(0);
        for j in 0..n {
            if adj[i][j] {
                d[i][j] = Some(1);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// Every shortest s-t path, by depth-first enumeration along edges that
/// step one unit closer to `t`.
fn shortest_paths(adj: &[Vec<bool>], d: &[Vec<Option<usize>>], s: usize, t: usize) -> Vec<Vec<usize>> {
    fn walk(
        adj: &[Vec<bool>],
        d: &[Vec<Option<usize>>],
        t: usize,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let u = *path.last().unwrap();
        if u == t {
            out.push(path.clone());
            return;
        }
        let left = d[u][t].unwrap();
        for w in 0..adj.len() {
            if adj[u][w] && d[w][t] == Some(left - 1) {
                path.push(w);
                walk(adj, d, t, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    if d[s][t].is_some() {
        walk(adj, d, t, &mut vec![s], &mut out);
    }
    out
}

pub struct OracleScores {
    pub degree: Vec<f64>,
    pub closeness: Vec<f64>,
    pub betweenness: Vec<f64>,
    pub gateway: Vec<f64>,
}

pub fn oracle(g: &SmallGraph) -> OracleScores {
    let n = g.n;
    let adj = g.adjacent();
    let d = floyd_warshall(g);
    let degree = (0..n)
        .map(|i| {
            if n <= 1 {
                0.0
            } else {
                adj[i].iter().filter(|&&x| x).count() as f64 / (n - 1) as f64
            }
        })
        .collect();
    let closeness = (0..n)
        .map(|i| {
            let reach: Vec<usize> = (0..n).filter(|&j| j != i).filter_map(|j| d[i][j]).collect();
            let total: usize = reach.iter().sum();
            if n <= 1 || reach.is_empty() || total == 0 {
                0.0
            } else {
                let r = reach.len() as f64;
                (r / total as f64) * (r / (n - 1) as f64)
            }
        })
        .collect();
    let mut betweenness = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            let paths = shortest_paths(&adj, &d, s, t);
            if paths.is_empty() {
                continue;
            }
            for (v, b) in betweenness.iter_mut().enumerate() {
                if v == s || v == t {
                    continue;
                }
                let through = paths.iter().filter(|p| p.contains(&v)).count();
                *b += through as f64 / paths.len() as f64;
            }
        }
    }
    if n >= 3 {
        let pairs = ((n - 1) * (n - 2) / 2) as f64;
        betweenness.iter_mut().for_each(|b| *b /= pairs);
    } else {
        betweenness.fill(0.0);
    }
    let total_gw = g.gateways.iter().filter(|&&x| x).count();
    let gateway = (0..n)
        .map(|i| {
            let adjacent = (0..n).filter(|&j| adj[i][j] && g.gateways[j]).count();
            if total_gw == 0 {
                0.0
            } else {
                adjacent as f64 / total_gw as f64
            }
        })
        .collect();
    OracleScores {
        degree,
        closeness,
        betweenness,
        gateway,
    }
}

/// Compares library centralities with the oracle; returns the first mismatch.
pub fn check_against_oracle(g: &SmallGraph) -> Result<(), String> {
    let snap = g.snapshot();
    let table = CentralityTable::compute(&snap);
    let o = oracle(g);
    for i in 0..g.n {
        let v = VehicleId(i as u32);
        let t = table.get(v).unwrap();
        let pairs = [
            ("degree", degree_centrality(&snap, v).unwrap(), t.degree, o.degree[i]),
            ("closeness", closeness_centrality(&snap, v).unwrap(), t.closeness, o.closeness[i]),
            ("betweenness", betweenness_centrality(&snap, v).unwrap(), t.betweenness, o.betweenness[i]),
            ("gateway", eigenvector_gateway_centrality(&snap, v).unwrap(), t.eigenvector, o.gateway[i]),
        ];
        for (name, single, tabled, want) in pairs {
            if (single - want).abs() > TOL || (tabled - want).abs() > TOL {
                return Err(format!(
                    "{name} of node {i} in {g:?}: got {single} / table {tabled}, oracle {want}"
                ));
            }
        }
    }
    Ok(())
}

/// All labelled connected graphs on `n` nodes, gateway flags cycling through
/// every subset alongside the edge masks.
pub fn exhaustive_connected(n: usize) -> Vec<SmallGraph> {
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    for mask in 0u64..(1 << slots.len()) {
        let edges = slots
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let gw_mask = mask as usize % (1 << n);
        let g = SmallGraph {
            n,
            edges,
            gateways: (0..n).map(|i| gw_mask >> i & 1 == 1).collect(),
        };
        if g.is_connected() {
            out.push(g);
        }
    }
    out
}

/// Random connected graph: a random spanning tree plus extra edges.
pub fn random_connected(rng: &mut ChaCha8Rng, n: usize) -> SmallGraph {
    let mut edges = HashSet::new();
    for v in 1..n {
        let parent = rng.random_range(0..v);
        edges.insert((parent, v));
    }
    let density: f64 = rng.random_range(0.0..0.7);
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(density) {
                edges.insert((a, b));
            }
        }
    }
    let mut edges: Vec<_> = edges.into_iter().collect();
    edges.sort_unstable();
    SmallGraph {
        n,
        edges,
        gateways: (0..n).map(|_| rng.random_bool(0.3)).collect(),
    }
}

/// Exhaustive n <= 5 plus `samples` random connected graphs with 6..=8 nodes.
pub fn oracle_suite(samples: usize, seed: u64) -> Result<usize, String> {
    let mut checked = 0;
    for n in 1..=5 {
        for g in exhaustive_connected(n) {
            check_against_oracle(&g)?;
            checked += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..samples {
        let g = random_connected(&mut rng, 6 + k % 3);
        check_against_oracle(&g)?;
        checked += 1;
    }
    Ok(checked)
}

/// Seven-vehicle scene: two communities (C1, C2), one base station, one
/// detector. `v1` alone is inside the event radius.
pub fn worked_scenario() -> Scenario {
    let c1 = Arc::new(SocialProfile::single("C1", "am"));
    let c2 = Arc::new(SocialProfile::single("C2", "am"));
    let layout = [
        ("v1", Point::new(0.0, 0.0), &c1),
        ("v2", Point::new(0.0, 80.0), &c2),
        ("v3", Point::new(90.0, 0.0), &c1),
        ("v4", Point::new(110.0, 90.0), &c1),
        ("v5", Point::new(200.0, 90.0), &c2),
        ("v6", Point::new(180.0, 0.0), &c1),
        ("v7", Point::new(260.0, 0.0), &c1),
    ];
    let duration = 3.0;
    let trace = Trace::stationary(
        &layout.iter().map(|(id, p, _)| (*id, *p)).collect::<Vec<_>>(),
        duration,
    );
    let profiles = layout.iter().map(|(_, _, c)| Arc::clone(c)).collect();
    let config = ScenarioConfig {
        duration,
        vehicle_count: layout.len(),
        event_location: Point::new(-30.0, 0.0),
        event_radius: 50.0,
        event_start: 2.0,
        event_duration: 0.5,
        bs_positions: vec![Point::new(240.0, -60.0)],
        bucket_width: 1.0,
        ..ScenarioConfig::preset(Preset::Ld)
    };
    Scenario::new(config, trace, profiles).expect("fixture is valid")
}

/// Log rendered as `(ms, vehicle name, action)` for readable comparisons.
pub fn named_log(sc: &Scenario, log: &[LogEntry]) -> Vec<(u64, String, String)> {
    log.iter()
        .map(|e| {
            let action = match &e.action {
                LoggedAction::Detected => "detect".to_string(),
                LoggedAction::DeliveredToBs => "deliver".to_string(),
                LoggedAction::Broadcast { ttl, next_relay } => format!(
                    "broadcast ttl={ttl} next={}",
                    next_relay.map_or("-".to_string(), |v| sc.name(v).to_string())
                ),
                LoggedAction::Discarded(r) => format!("discard {r:?}"),
            };
            (e.time.as_micros() / 1000, sc.name(e.vehicle).to_string(), action)
        })
        .collect()
}

/// Spearman rank correlation with average ranks for ties; 0 when either
/// side is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    assert_eq!(x.len(), y.len());
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        0.0
    } else {
        cov / (vx * vy).sqrt()
    }
}

/// Hop bound and single-broadcast checks over one action log.
pub fn check_hops_and_duplicates(log: &[LogEntry], ttl_initial: u32) -> Result<(), String> {
    let mut broadcasts: BTreeMap<(VehicleId, sociable::protocol::PacketId), usize> = BTreeMap::new();
    for e in log {
        if e.hop > ttl_initial {
            return Err(format!("hop {} above ttl {ttl_initial}: {e:?}", e.hop));
        }
        if matches!(e.action, LoggedAction::Broadcast { .. }) {
            let n = broadcasts.entry((e.vehicle, e.packet)).or_default();
            *n += 1;
            if *n > 1 {
                return Err(format!("{} broadcast {:?} twice", e.vehicle, e.packet));
            }
        }
    }
    Ok(())
}

fn row(ms: u64, v: &str, action: &str) -> (u64, String, String) {
    (ms, v.to_string(), action.to_string())
}

/// Every action of the worked example, in order.
pub fn worked_expected() -> Vec<(u64, String, String)> {
    vec![
        row(2000, "v1", "detect"),
        row(2000, "v1", "broadcast ttl=2 next=v3"),
        row(2002, "v2", "discard NotCommunity"),
        row(2002, "v3", "broadcast ttl=1 next=v6"),
        row(2004, "v1", "discard Duplicate"),
        row(2004, "v4", "discard NotRelay"),
        row(2004, "v6", "deliver"),
        row(2004, "v6", "broadcast ttl=0 next=v7"),
        row(2006, "v3", "discard Duplicate"),
        row(2006, "v5", "discard NotCommunity"),
        row(2006, "v7", "discard TtlExpired"),
    ]
}

/// A handful of vehicles drifting around a 300 m x 60 m patch, two routine
/// groups, random TTL, protocol and base station.
#[derive(Debug, Clone)]
pub struct Scene {
    pub starts: Vec<(f64, f64)>,
    pub velocities: Vec<f64>,
    pub groups: Vec<bool>,
    pub ttl: u32,
    pub flooding: bool,
    pub bs: (f64, f64),
    pub event: (f64, f64, f64),
    pub w_ec: (f64, f64),
}

pub fn scene() -> impl Strategy<Value = Scene> {
    (2usize..12).prop_flat_map(|n| {
        (
            prop::collection::vec((0.0..300.0f64, 0.0..60.0f64), n),
            prop::collection::vec(-15.0..15.0f64, n),
            prop::collection::vec(prop::bool::weighted(0.8), n),
            1u32..6,
            any::<bool>(),
            (0.0..300.0f64, -50.0..110.0f64),
            (0.0..300.0f64, 0.0..60.0f64, 20.0..150.0f64),
            (0.0..=1.0f64, 0.0..=1.0f64),
        )
            .prop_map(|(starts, velocities, groups, ttl, flooding, bs, event, (a, b))| Scene {
                starts,
                velocities,
                groups,
                ttl,
                flooding,
                bs,
                event,
                w_ec: (a.min(b), a.max(b)),
            })
    })
}

const SCENE_DURATION: f64 = 5.0;

pub fn build(s: &Scene) -> Scenario {
    let rows: Vec<TraceRow> = s
        .starts
        .iter()
        .zip(&s.velocities)
        .enumerate()
        .flat_map(|(i, (&(x, y), &vx))| {
            [0.0, SCENE_DURATION].map(|t| TraceRow {
                time: t,
                vehicle_id: format!("v{i:02}"),
                x: x + vx * t,
                y,
                speed: vx.abs(),
            })
        })
        .collect();
    let trace = Trace::from_rows(&rows).unwrap();
    let a = Arc::new(SocialProfile::single("A", "am"));
    let b = Arc::new(SocialProfile::single("B", "am"));
    let profiles = s.groups.iter().map(|&g| if g { a.clone() } else { b.clone() }).collect();
    let config = ScenarioConfig {
        duration: SCENE_DURATION,
        event_location: Point::new(s.event.0, s.event.1),
        event_radius: s.event.2,
        event_start: 1.0,
        event_duration: 3.0,
        bs_positions: vec![Point::new(s.bs.0, s.bs.1)],
        ttl_initial: s.ttl,
        w_ec_min: s.w_ec.0,
        w_ec_max: s.w_ec.1,
        protocol: if s.flooding { Protocol::Flooding } else { Protocol::Sociable },
        bucket_width: 1.0,
        ..ScenarioConfig::preset(Preset::Ld)
    };
    Scenario::new(config, trace, profiles).unwrap()
}

