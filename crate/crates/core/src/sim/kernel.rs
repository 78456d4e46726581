use std::rc::Rc;
use std::sync::Arc;

use thiserror::Error;

use super::queue::{EventKind, EventQueue, SimError};
use crate::config::{assign_communities, ConfigError, ScenarioConfig};
use crate::metrics::{DeliveryLogEntry, MetricsCollector, MetricsReport, TransmissionKind};
use crate::mobility::{generate_road, load_trace, RoadError, Trace, TraceError};
use crate::protocol::{self, Action, CriticalEvent, LogEntry, LoggedAction, MonitoringPacket, Protocol, ProtocolParams};
use crate::social::{Beacon, SocialProfile};
use crate::time::SimTime;
use crate::vehicle::{VehicleId, VehicleState};
use crate::world::World;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Road(#[from] RoadError),
    #[error("{profiles} social profiles for {vehicles} vehicles")]
    ProfileCount { vehicles: usize, profiles: usize },
}

/// Everything a run needs besides the protocol: trajectories, communities
/// and the event. Shared unchanged between paired runs.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub trace: Trace,
    /// indexed like `trace.tracks()`
    pub profiles: Vec<Arc<SocialProfile>>,
    pub event: CriticalEvent,
}

impl Scenario {
    pub fn from_config(config: &ScenarioConfig) -> Result<Self, ScenarioError> {
        config.validate()?;
        let trace = match &config.trace {
            Some(path) => Trace::from_rows(&load_trace(path)?)?,
            None => generate_road(&config.road, config.vehicle_count, config.seed, config.duration)?,
        };
        let profiles = assign_communities(trace.len(), config.relationship_rate, config.seed);
        Scenario::new(config.clone(), trace, profiles)
    }

    /// Explicit trace and communities, for hand-built fixtures.
    pub fn new(
        config: ScenarioConfig,
        trace: Trace,
        profiles: Vec<Arc<SocialProfile>>,
    ) -> Result<Self, ScenarioError> {
        config.validate()?;
        if profiles.len() != trace.len() {
            return Err(ScenarioError::ProfileCount {
                vehicles: trace.len(),
                profiles: profiles.len(),
            });
        }
        let event = config.event();
        Ok(Scenario {
            config,
            trace,
            profiles,
            event,
        })
    }

    /// Trace id of a vehicle.
    pub fn name(&self, v: VehicleId) -> &str {
        &self.trace.tracks()[v.index()].id
    }

    pub fn vehicle_id(&self, name: &str) -> Option<VehicleId> {
        self.trace
            .tracks()
            .binary_search_by(|t| t.id.as_str().cmp(name))
            .ok()
            .map(|i| VehicleId(i as u32))
    }
}

/// One run of one protocol over a scenario.
pub struct Simulator<'a> {
    scenario: &'a Scenario,
    protocol: Protocol,
    params: ProtocolParams,
    record_actions: bool,
}

impl<'a> Simulator<'a> {
    pub fn new(scenario: &'a Scenario) -> Self {
        Simulator {
            scenario,
            protocol: scenario.config.protocol,
            params: scenario.config.protocol_params(),
            record_actions: false,
        }
    }

    pub fn protocol(mut self, protocol: Protocol) -> Self {
        self.protocol = protocol;
        self
    }

    pub fn params(mut self, params: ProtocolParams) -> Self {
        self.params = params;
        self
    }

    /// Keep every protocol action in `MetricsReport::log`.
    pub fn record_actions(mut self, on: bool) -> Self {
        self.record_actions = on;
        self
    }

    pub fn run(&self) -> Result<MetricsReport, SimError> {
        let mut run = Run::new(self)?;
        run.drain()?;
        Ok(run.finish())
    }
}

struct Run<'s> {
    scenario: &'s Scenario,
    protocol: Protocol,
    params: ProtocolParams,
    queue: EventQueue,
    world: World,
    states: Vec<VehicleState>,
    metrics: MetricsCollector,
    log: Option<Vec<LogEntry>>,
    hop_latency: SimTime,
    staleness: SimTime,
}

/// Fixed-period ticks in `[0, end)`, merged so that at equal times mobility
/// runs before beaconing and beaconing before detection.
fn tick_schedule(cfg: &ScenarioConfig, end: SimTime) -> Vec<(SimTime, u8)> {
    let mut ticks = Vec::new();
    for (rank, period) in [
        (0u8, cfg.mobility_tick),
        (1, cfg.beacon_period),
        (2, 1.0 / cfg.monitor_rate),
    ] {
        let step = SimTime::from_secs(period).as_micros().max(1);
        ticks.extend(
            (0..)
                .map(|k: u64| SimTime::from_micros(k * step))
                .take_while(|t| *t < end)
                .map(|t| (t, rank)),
        );
    }
    ticks.sort_unstable();
    ticks
}

impl<'s> Run<'s> {
    fn new(sim: &Simulator<'s>) -> Result<Self, SimError> {
        let sc = sim.scenario;
        let cfg = &sc.config;
        let end = SimTime::from_secs(cfg.duration);
        let mut queue = EventQueue::new(end);
        queue.schedule(end, EventKind::SimEnd)?;
        for (t, rank) in tick_schedule(cfg, end) {
            let kind = match rank {
                0 => EventKind::MobilityTick,
                1 => EventKind::BeaconTick,
                _ => EventKind::EventDetectionCheck,
            };
            queue.schedule(t, kind)?;
        }
        let states = sc
            .profiles
            .iter()
            .enumerate()
            .map(|(i, p)| VehicleState::new(VehicleId(i as u32), Arc::clone(p)))
            .collect();
        Ok(Run {
            scenario: sc,
            protocol: sim.protocol,
            params: sim.params,
            queue,
            world: World::new(sc.profiles.clone(), cfg.bs_positions.clone(), cfg.transmission_range),
            states,
            metrics: MetricsCollector::new(end, SimTime::from_secs(cfg.bucket_width)),
            log: sim.record_actions.then(Vec::new),
            hop_latency: SimTime::from_secs(cfg.hop_latency),
            staleness: SimTime::from_secs(cfg.neighbor_staleness),
        })
    }

    fn drain(&mut self) -> Result<(), SimError> {
        while let Some(ev) = self.queue.pop() {
            let now = ev.timestamp;
            match ev.kind {
                EventKind::MobilityTick => self.move_vehicles(now),
                EventKind::BeaconTick => self.beacon(now),
                EventKind::EventDetectionCheck => self.detect(now)?,
                EventKind::PacketArrival { receiver, packet } => self.arrive(receiver, &packet, now)?,
                EventKind::SimEnd => break,
            }
        }
        Ok(())
    }

    fn finish(self) -> MetricsReport {
        self.metrics.finish(self.protocol, self.scenario.config.seed, self.log)
    }

    fn move_vehicles(&mut self, now: SimTime) {
        let t = now.as_secs();
        let tracks = self.scenario.trace.tracks();
        self.world.update(|i| tracks[i].kinematics_at(t));
    }

    fn beacon(&mut self, now: SimTime) {
        let senders: Vec<VehicleId> = self.world.active_vehicles().collect();
        for &v in &senders {
            let beacon = Beacon {
                sender: v,
                position: self.world.position(v).expect("active"),
                neighbor_count: self.states[v.index()].neighbors.len(),
                profile: Arc::clone(self.world.profile(v)),
            };
            self.metrics.record_transmission(TransmissionKind::Beacon, now);
            for &r in self.world.neighbors_of(v) {
                self.states[r.index()].handle_beacon(&beacon, now);
            }
        }
        for v in senders {
            self.states[v.index()].expire_neighbors(now, self.staleness);
        }
    }

    fn detect(&mut self, now: SimTime) -> Result<(), SimError> {
        let ev = &self.scenario.event;
        if !ev.is_active(now) {
            return Ok(());
        }
        let active: Vec<VehicleId> = self.world.active_vehicles().collect();
        for v in active {
            let state = &mut self.states[v.index()];
            let Some(pkt) = protocol::detect(state, &self.world, ev, &self.params, now) else {
                continue;
            };
            self.metrics.record_generated(now);
            self.note(now, v, &pkt, LoggedAction::Detected);
            self.process(v, &pkt, now)?;
        }
        Ok(())
    }

    fn arrive(&mut self, receiver: VehicleId, pkt: &MonitoringPacket, now: SimTime) -> Result<(), SimError> {
        if !self.world.is_active(receiver) {
            self.metrics.record_loss();
            return Ok(());
        }
        self.metrics.record_arrival();
        self.process(receiver, pkt, now)
    }

    fn process(&mut self, v: VehicleId, pkt: &MonitoringPacket, now: SimTime) -> Result<(), SimError> {
        let actions = protocol::handle(
            self.protocol,
            &mut self.states[v.index()],
            pkt,
            &self.world,
            &self.params,
            now,
        );
        for action in actions {
            match action {
                Action::DeliverToBs => {
                    self.metrics.record_delivery(DeliveryLogEntry {
                        event: pkt.event_id,
                        origin: pkt.origin,
                        sequence: pkt.sequence,
                        detect_time: pkt.context.detect_time,
                        deliver_time: now,
                        gateway: v,
                        hops: pkt.hop_index,
                    });
                    self.note(now, v, pkt, LoggedAction::DeliveredToBs);
                }
                Action::Broadcast(out) => {
                    self.metrics.record_transmission(TransmissionKind::Monitoring, now);
                    self.note(
                        now,
                        v,
                        &out,
                        LoggedAction::Broadcast {
                            ttl: out.ttl,
                            next_relay: out.next_relay,
                        },
                    );
                    let at = now + self.hop_latency;
                    if at >= self.queue.clock().end {
                        continue;
                    }
                    let out = Rc::new(out);
                    let receivers = self.world.neighbors_of(v);
                    self.metrics.record_copies(receivers.len() as u64);
                    for &r in receivers {
                        self.queue.schedule(
                            at,
                            EventKind::PacketArrival {
                                receiver: r,
                                packet: Rc::clone(&out),
                            },
                        )?;
                    }
                }
                Action::Discard(reason) => self.note(now, v, pkt, LoggedAction::Discarded(reason)),
            }
        }
        Ok(())
    }

    fn note(&mut self, now: SimTime, v: VehicleId, pkt: &MonitoringPacket, action: LoggedAction) {
        let entry = LogEntry {
            time: now,
            vehicle: v,
            packet: pkt.id(),
            hop: pkt.hop_index,
            action,
            at_gateway: self.world.in_bs_range(v),
        };
        if entry.is_collaboration() {
            self.metrics.record_collaborator(v, now);
        }
        if let Some(log) = &mut self.log {
            log.push(entry);
        }
    }
}
