use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::rc::Rc;

use thiserror::Error;

use crate::protocol::MonitoringPacket;
use crate::time::SimTime;
use crate::vehicle::VehicleId;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("event scheduled at {at} but the clock already reads {now}")]
    PastEvent { at: SimTime, now: SimTime },
    #[error("clock would pass the end of the run ({end}) at {at}")]
    PastEnd { at: SimTime, end: SimTime },
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    MobilityTick,
    BeaconTick,
    EventDetectionCheck,
    PacketArrival {
        receiver: VehicleId,
        packet: Rc<MonitoringPacket>,
    },
    SimEnd,
}

#[derive(Debug, Clone)]
pub struct SimEvent {
    pub timestamp: SimTime,
    pub sequence: u64,
    pub kind: EventKind,
}

impl PartialEq for SimEvent {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for SimEvent {}

impl PartialOrd for SimEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SimEvent {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.timestamp, self.sequence).cmp(&(other.timestamp, other.sequence))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimClock {
    pub now: SimTime,
    pub end: SimTime,
}

/// Min-queue on `(timestamp, sequence)`.
#[derive(Debug)]
pub struct EventQueue {
    heap: BinaryHeap<Reverse<SimEvent>>,
    next_sequence: u64,
    clock: SimClock,
}

impl EventQueue {
    pub fn new(end: SimTime) -> Self {
        EventQueue {
            heap: BinaryHeap::new(),
            next_sequence: 0,
            clock: SimClock { now: SimTime::ZERO, end },
        }
    }

    pub fn now(&self) -> SimTime {
        self.clock.now
    }

    pub fn clock(&self) -> SimClock {
        self.clock
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn schedule(&mut self, at: SimTime, kind: EventKind) -> Result<u64, SimError> {
        if at < self.clock.now {
            return Err(SimError::PastEvent { at, now: self.clock.now });
        }
        if at > self.clock.end {
            return Err(SimError::PastEnd { at, end: self.clock.end });
        }
        let sequence = self.next_sequence;
        self.next_sequence += 1;
        self.heap.push(Reverse(SimEvent {
            timestamp: at,
            sequence,
            kind,
        }));
        Ok(sequence)
    }

    /// Removes the earliest event and advances the clock to it.
    pub fn pop(&mut self) -> Option<SimEvent> {
        let Reverse(ev) = self.heap.pop()?;
        debug_assert!(ev.timestamp >= self.clock.now);
        self.clock.now = ev.timestamp;
        Some(ev)
    }
}
