//! Roads, vehicle queues, and the green-time mathematics.
//!
//! The signal-timing math allocates a cycle of `mu * total_vehicles` and
//! splits it across roads in proportion to their queue counts. The exact
//! integer allocation keeps the conservation invariant: green times sum to
//! the cycle time to the millisecond, with any rounding residual assigned
//! to the last road that has demand.

use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::fmt;

use crate::time::{SimDuration, SimTime};
use crate::topology::RoadId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VehicleId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Vehicle {
    pub id: VehicleId,
    pub source: RoadId,
    pub destination: RoadId,
    pub arrival: SimTime,
    pub crossed: Option<SimTime>,
}

/// Signal state shown to a road.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Signal {
    Red,
    Yellow,
    Green,
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Signal::Red => "red",
            Signal::Yellow => "yellow",
            Signal::Green => "green",
        };
        write!(f, "{s}")
    }
}

/// Outcome of an arrival attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrivalOutcome {
    Queued,
    /// The road was at capacity; the arrival is counted, not queued.
    Blocked,
}

/// One road's waiting queue and signal state.
#[derive(Debug, Clone)]
pub struct RoadState {
    pub id: RoadId,
    pub queue: VecDeque<Vehicle>,
    pub signal: Signal,
    pub length_m: f64,
    pub capacity: usize,
    pub arrivals: u64,
    pub blocked: u64,
    pub crossed: u64,
}

impl RoadState {
    pub fn new(id: RoadId, length_m: f64, car_len_m: f64, gap_m: f64) -> Self {
        RoadState {
            id,
            queue: VecDeque::new(),
            signal: Signal::Red,
            length_m,
            capacity: capacity(length_m, car_len_m, gap_m) as usize,
            arrivals: 0,
            blocked: 0,
            crossed: 0,
        }
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    /// Append a vehicle if the road has room; otherwise count it as blocked.
    pub fn arrive(&mut self, vehicle: Vehicle) -> ArrivalOutcome {
        debug_assert!(vehicle.source == self.id);
        debug_assert!(vehicle.destination != vehicle.source);
        self.arrivals += 1;
        if self.queue.len() >= self.capacity {
            self.blocked += 1;
            ArrivalOutcome::Blocked
        } else {
            self.queue.push_back(vehicle);
            ArrivalOutcome::Queued
        }
    }

    /// One crossing opportunity: the head of the queue crosses at `at`.
    pub fn cross_front(&mut self, at: SimTime) -> Option<Vehicle> {
        let mut vehicle = self.queue.pop_front()?;
        debug_assert!(vehicle.arrival <= at);
        vehicle.crossed = Some(at);
        self.crossed += 1;
        Some(vehicle)
    }
}

/// Total queued vehicles across all roads (the sum in the timing math).
pub fn total_vehicles(counts: &[u64]) -> u64 {
    counts.iter().sum()
}

/// Cycle time: `mu` per queued vehicle.
pub fn cycle_time(n_tc: u64, mu: SimDuration) -> SimDuration {
    SimDuration::from_millis(mu.as_millis() * n_tc)
}

/// A road's share of total demand; `None` when there is no demand at all.
pub fn road_share(n_c: u64, n_tc: u64) -> Option<f64> {
    if n_tc == 0 {
        return None;
    }
    debug_assert!(n_c <= n_tc);
    Some(n_c as f64 / n_tc as f64)
}

/// Green time for a share of the cycle, rounded down to the millisecond.
pub fn green_time(k: f64, t_t: SimDuration) -> SimDuration {
    debug_assert!((0.0..=1.0).contains(&k));
    SimDuration::from_millis((k * t_t.as_millis() as f64) as u64)
}

/// Exact integer split of the cycle across roads in proportion to counts.
/// Each road gets `floor(count * t_t / total)`; the rounding residual goes
/// to the last road with demand so the greens sum to `t_t` exactly.
pub fn allocate_green_times(counts: &[u64], t_t: SimDuration) -> Vec<SimDuration> {
    let total = total_vehicles(counts);
    let mut greens = alloc::vec![SimDuration::ZERO; counts.len()];
    if total == 0 {
        return greens;
    }
    let t_ms = t_t.as_millis() as u128;
    let mut allocated: u64 = 0;
    for (green, &count) in greens.iter_mut().zip(counts) {
        let share_ms = (count as u128 * t_ms / total as u128) as u64;
        *green = SimDuration::from_millis(share_ms);
        allocated += share_ms;
    }
    let residual = t_t.as_millis() - allocated;
    if residual > 0 {
        let last = counts.iter().rposition(|&c| c > 0).expect("total > 0");
        greens[last] += SimDuration::from_millis(residual);
    }
    greens
}

/// The per-cycle timing record: counts, totals, shares and green times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingInputs {
    pub counts: Vec<u64>,
    pub total: u64,
    pub mu: SimDuration,
    pub cycle: SimDuration,
    pub shares: Vec<f64>,
    pub greens: Vec<SimDuration>,
}

impl TimingInputs {
    pub fn compute(counts: &[u64], mu: SimDuration) -> TimingInputs {
        let total = total_vehicles(counts);
        let cycle = cycle_time(total, mu);
        let shares = counts
            .iter()
            .map(|&c| road_share(c, total).unwrap_or(0.0))
            .collect();
        let greens = allocate_green_times(counts, cycle);
        TimingInputs {
            counts: counts.to_vec(),
            total,
            mu,
            cycle,
            shares,
            greens,
        }
    }
}

/// Maximum cars a road of `length_m` can hold with the given car geometry.
pub fn capacity(length_m: f64, car_len_m: f64, gap_m: f64) -> u64 {
    debug_assert!(length_m > 0.0 && car_len_m > 0.0 && gap_m > 0.0);
    (length_m / (car_len_m + gap_m)) as u64
}

/// Batch discharge over a green window starting at `green_start`: the i-th
/// vehicle (1-based) crosses at `green_start + i * mu`, up to
/// `floor(window / mu)` vehicles, capped by the queue length.
pub fn discharge(
    road: &mut RoadState,
    green_start: SimTime,
    window: SimDuration,
    mu: SimDuration,
) -> Vec<Vehicle> {
    let opportunities = window.as_millis() / mu.as_millis();
    let mut crossed = Vec::new();
    for i in 1..=opportunities {
        let at = green_start + SimDuration::from_millis(i * mu.as_millis());
        match road.cross_front(at) {
            Some(v) => crossed.push(v),
            None => break,
        }
    }
    crossed
}
