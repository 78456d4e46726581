//! Physical layer: where every vehicle is right now, who hears whom, and
//! which vehicles sit inside a base station's coverage.

use std::cell::OnceCell;

use rustc_hash::FxHashMap;
use std::sync::Arc;

use crate::geo::Point;
use crate::social::SocialProfile;
use crate::vehicle::VehicleId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics {
    pub position: Point,
    /// m/s
    pub speed: f64,
    /// radians, counter-clockwise from +x
    pub heading: f64,
}

/// Snapshot of positions plus a uniform grid for range queries.
///
/// Grid cells are `range` wide, so every in-range neighbor of a point lies in
/// the 3x3 block of cells around it.
#[derive(Debug, Clone)]
pub struct World {
    kinematics: Vec<Option<Kinematics>>,
    profiles: Vec<Arc<SocialProfile>>,
    base_stations: Vec<Point>,
    range: f64,
    grid: FxHashMap<(i64, i64), Vec<VehicleId>>,
    /// neighbor lists, filled on first query after each update
    adjacency: Vec<OnceCell<Vec<VehicleId>>>,
    epoch: u64,
}

impl World {
    pub fn new(profiles: Vec<Arc<SocialProfile>>, base_stations: Vec<Point>, range: f64) -> Self {
        assert!(range > 0.0, "transmission range must be positive");
        World {
            kinematics: vec![None; profiles.len()],
            adjacency: vec![OnceCell::new(); profiles.len()],
            profiles,
            base_stations,
            range,
            grid: FxHashMap::default(),
            epoch: 0,
        }
    }

    /// Builds a world with every vehicle already placed. Mostly for fixtures.
    pub fn with_positions(
        profiles: Vec<Arc<SocialProfile>>,
        positions: Vec<Option<Point>>,
        base_stations: Vec<Point>,
        range: f64,
    ) -> Self {
        assert_eq!(profiles.len(), positions.len());
        let mut world = World::new(profiles, base_stations, range);
        world.update(|i| {
            positions[i].map(|position| Kinematics {
                position,
                speed: 0.0,
                heading: 0.0,
            })
        });
        world
    }

    pub fn len(&self) -> usize {
        self.kinematics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinematics.is_empty()
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn base_stations(&self) -> &[Point] {
        &self.base_stations
    }

    /// Bumped by every [`World::update`]; equal epochs mean equal positions.
    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    /// Replaces all kinematics and rebuilds the grid.
    pub fn update(&mut self, mut f: impl FnMut(usize) -> Option<Kinematics>) {
        self.epoch += 1;
        self.grid.values_mut().for_each(Vec::clear);
        self.adjacency.iter_mut().for_each(|c| {
            c.take();
        });
        for i in 0..self.kinematics.len() {
            let k = f(i);
            if let Some(k) = &k {
                self.grid
                    .entry(self.cell(&k.position))
                    .or_default()
                    .push(VehicleId(i as u32));
            }
            self.kinematics[i] = k;
        }
    }

    fn cell(&self, p: &Point) -> (i64, i64) {
        (
            (p.x / self.range).floor() as i64,
            (p.y / self.range).floor() as i64,
        )
    }

    pub fn kinematics(&self, v: VehicleId) -> Option<&Kinematics> {
        self.kinematics.get(v.index()).and_then(Option::as_ref)
    }

    pub fn position(&self, v: VehicleId) -> Option<Point> {
        self.kinematics(v).map(|k| k.position)
    }

    pub fn is_active(&self, v: VehicleId) -> bool {
        self.kinematics(v).is_some()
    }

    pub fn profile(&self, v: VehicleId) -> &Arc<SocialProfile> {
        &self.profiles[v.index()]
    }

    pub fn active_vehicles(&self) -> impl Iterator<Item = VehicleId> + '_ {
        self.kinematics
            .iter()
            .enumerate()
            .filter(|(_, k)| k.is_some())
            .map(|(i, _)| VehicleId(i as u32))
    }

    /// Active vehicles within `range` of `p`, ascending by id.
    pub fn within_range_of(&self, p: &Point) -> Vec<VehicleId> {
        let (cx, cy) = self.cell(p);
        let mut out = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.grid.get(&(cx + dx, cy + dy)) {
                    for &id in ids {
                        if let Some(k) = self.kinematics(id) {
                            if k.position.within(p, self.range) {
                                out.push(id);
                            }
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Radio neighbors of `v` (excluding `v`), ascending; empty when `v` is
    /// inactive.
    pub fn neighbors_of(&self, v: VehicleId) -> &[VehicleId] {
        self.adjacency[v.index()].get_or_init(|| match self.position(v) {
            Some(p) => {
                let mut ids = self.within_range_of(&p);
                ids.retain(|&id| id != v);
                ids
            }
            None => Vec::new(),
        })
    }

    pub fn in_range(&self, a: VehicleId, b: VehicleId) -> bool {
        match (self.position(a), self.position(b)) {
            (Some(pa), Some(pb)) => pa.within(&pb, self.range),
            _ => false,
        }
    }

    /// Within transmission range of any base station.
    pub fn in_bs_range(&self, v: VehicleId) -> bool {
        self.position(v).is_some_and(|p| {
            self.base_stations
                .iter()
                .any(|bs| bs.within(&p, self.range))
        })
    }
}
