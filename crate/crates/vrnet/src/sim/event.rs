//! Deterministic event queue for the session simulator.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::message::SimMessage;

/// The two endpoints of the simulated link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Client,
    Server,
}

impl Endpoint {
    pub fn peer(self) -> Endpoint {
        match self {
            Endpoint::Client => Endpoint::Server,
            Endpoint::Server => Endpoint::Client,
        }
    }
}

/// Timer events owned by one of the endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimerKind {
    /// Server produces VR frame `index` and queues its fragments.
    GenerateFrame { index: u64 },
    /// Client sends liveness ping `index`.
    HealthPing { index: u64 },
    /// Client starts session teardown.
    InitiateClose,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Action {
    Deliver { to: Endpoint, msg: SimMessage },
    Timer(TimerKind),
}

/// A scheduled event. `tiebreak` is assigned monotonically at insertion so
/// that simultaneous events are processed in scheduling order, which keeps
/// runs bit-for-bit reproducible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEvent {
    pub time: f64,
    pub tiebreak: u64,
    pub action: Action,
}

struct HeapEntry(SimEvent);

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we pop the earliest event.
        other
            .0
            .time
            .total_cmp(&self.0.time)
            .then_with(|| other.0.tiebreak.cmp(&self.0.tiebreak))
    }
}

/// Priority queue keyed by `(time, tiebreak)`.
#[derive(Default)]
pub struct EventQueue {
    heap: BinaryHeap<HeapEntry>,
    next_tiebreak: u64,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, time: f64, action: Action) {
        debug_assert!(time.is_finite(), "event scheduled at non-finite time {time}");
        let tiebreak = self.next_tiebreak;
        self.next_tiebreak += 1;
        self.heap.push(HeapEntry(SimEvent {
            time,
            tiebreak,
            action,
        }));
    }

    pub fn pop(&mut self) -> Option<SimEvent> {
        self.heap.pop().map(|e| e.0)
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }
}
