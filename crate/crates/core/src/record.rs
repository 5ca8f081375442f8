//! The immutable record of one completed run.
//!
//! Every transmission, execution, arrival, crossing, signal change, LED
//! commit and loop sample is logged, so the headline metrics can be
//! recomputed independently from the logs. The conservation checks below
//! are exact: they recount from the logs and compare against the running
//! accumulators kept during the simulation.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::config::ScenarioConfig;
use crate::energy::DeviceEnergy;
use crate::net::{TupleId, TupleKind};
use crate::time::{SimDuration, SimTime};
use crate::topology::{DeviceId, LedColor, RoadId};
use crate::traffic::{Signal, VehicleId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmitRecord {
    pub tuple: TupleId,
    pub kind: TupleKind,
    pub road: RoadId,
    pub from: DeviceId,
    pub to: DeviceId,
    pub nw_length: u64,
    pub hop_count: u32,
    pub sent_at: SimTime,
    pub delivered_at: Option<SimTime>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecRecord {
    pub tuple: TupleId,
    pub kind: TupleKind,
    pub device: DeviceId,
    pub enqueued_at: SimTime,
    pub started_at: SimTime,
    pub completed_at: SimTime,
    pub cpu_mi: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArrivalRecord {
    pub vehicle: VehicleId,
    pub road: RoadId,
    pub destination: RoadId,
    pub at: SimTime,
    pub queued: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossRecord {
    pub vehicle: VehicleId,
    pub road: RoadId,
    pub arrived_at: SimTime,
    pub crossed_at: SimTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignalChange {
    pub at: SimTime,
    pub road: RoadId,
    pub signal: Signal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LedCommit {
    pub at: SimTime,
    pub road: RoadId,
    pub color: LedColor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotReport {
    pub road: RoadId,
    pub at: SimTime,
    pub queued_vehicles: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoopSample {
    pub road: RoadId,
    pub emitted_at: SimTime,
    pub committed_at: SimTime,
    /// True when the sample closed at an LED commit rather than at the
    /// no-change decision point.
    pub led_leg: bool,
}

impl LoopSample {
    pub fn latency(&self) -> SimDuration {
        self.committed_at.since(self.emitted_at)
    }
}

/// Everything one run produced.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub config: ScenarioConfig,
    pub elapsed: SimDuration,
    pub events_dispatched: u64,
    /// Network usage accumulated hop by hop during the run.
    pub ttfu: u64,
    pub frames_emitted: u64,
    pub archives_stored: u64,
    pub xmits: Vec<XmitRecord>,
    pub execs: Vec<ExecRecord>,
    pub arrivals: Vec<ArrivalRecord>,
    pub crossings: Vec<CrossRecord>,
    pub signal_changes: Vec<SignalChange>,
    pub led_commits: Vec<LedCommit>,
    pub slot_reports: Vec<SlotReport>,
    pub loop_samples: Vec<LoopSample>,
    pub final_queue_lens: Vec<usize>,
    pub blocked_per_road: Vec<u64>,
    pub energy: Vec<DeviceEnergy>,
}

/// A conservation or consistency violation found by the verifiers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConservationError(pub String);

impl core::fmt::Display for ConservationError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.0)
    }
}

impl RunRecord {
    /// Independent recount of network usage from the transmission log; must
    /// equal the accumulator exactly.
    pub fn verify_ttfu_double_entry(&self) -> Result<(), ConservationError> {
        let recount: u64 = self
            .xmits
            .iter()
            .map(|x| x.nw_length * x.hop_count as u64)
            .sum();
        if recount != self.ttfu {
            return Err(ConservationError(format!(
                "network usage accumulator {} != log recount {recount}",
                self.ttfu
            )));
        }
        Ok(())
    }

    /// Tuples are unique, never duplicated, and each is either delivered
    /// within the run or still in flight at the end.
    pub fn verify_tuple_conservation(&self) -> Result<(), ConservationError> {
        let mut ids: Vec<u64> = self.xmits.iter().map(|x| x.tuple.0).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(ConservationError(String::from(
                "duplicate tuple id in the log",
            )));
        }
        let end = SimTime::ZERO + self.elapsed;
        for x in &self.xmits {
            match x.delivered_at {
                Some(at) if at < x.sent_at => {
                    return Err(ConservationError(format!(
                        "{} delivered before it was sent",
                        x.tuple
                    )));
                }
                Some(_) => {}
                None => {
                    // undelivered tuples are legitimate only at the run edge
                    if x.sent_at > end {
                        return Err(ConservationError(format!(
                            "{} sent after the run ended",
                            x.tuple
                        )));
                    }
                }
            }
        }
        // frames all made it onto the wire
        let frame_xmits = self
            .xmits
            .iter()
            .filter(|x| x.kind == TupleKind::Frame)
            .count() as u64;
        if frame_xmits != self.frames_emitted {
            return Err(ConservationError(format!(
                "{} frames emitted but {frame_xmits} frame transmissions logged",
                self.frames_emitted
            )));
        }
        Ok(())
    }

    /// Vehicle balance, per road and in replay order: arrivals equal
    /// crossed plus still-queued plus blocked, and crossings never outrun
    /// queued arrivals.
    pub fn verify_vehicle_conservation(&self) -> Result<(), ConservationError> {
        let roads = self.final_queue_lens.len();
        let mut queued_arrivals = alloc::vec![0u64; roads];
        let mut blocked = alloc::vec![0u64; roads];
        for a in &self.arrivals {
            if a.queued {
                queued_arrivals[a.road.0] += 1;
            } else {
                blocked[a.road.0] += 1;
            }
        }
        let mut crossed = alloc::vec![0u64; roads];
        for c in &self.crossings {
            crossed[c.road.0] += 1;
            if c.crossed_at < c.arrived_at {
                return Err(ConservationError(format!(
                    "vehicle {} crossed before arriving",
                    c.vehicle.0
                )));
            }
        }
        for r in 0..roads {
            if blocked[r] != self.blocked_per_road[r] {
                return Err(ConservationError(format!(
                    "road {r}: blocked counter {} != log recount {}",
                    self.blocked_per_road[r], blocked[r]
                )));
            }
            let balance = crossed[r] + self.final_queue_lens[r] as u64;
            if queued_arrivals[r] != balance {
                return Err(ConservationError(format!(
                    "road {r}: {} queued arrivals but {} crossed + {} still queued",
                    queued_arrivals[r], crossed[r], self.final_queue_lens[r]
                )));
            }
        }
        // instant-by-instant: crossings per road never exceed queued
        // arrivals seen so far (two-pointer replay over time-sorted logs)
        for r in 0..roads {
            let mut arr: Vec<SimTime> = self
                .arrivals
                .iter()
                .filter(|a| a.road.0 == r && a.queued)
                .map(|a| a.at)
                .collect();
            arr.sort_unstable();
            let mut cross: Vec<SimTime> = self
                .crossings
                .iter()
                .filter(|c| c.road.0 == r)
                .map(|c| c.crossed_at)
                .collect();
            cross.sort_unstable();
            let mut seen_arrivals = 0usize;
            for (i, &t) in cross.iter().enumerate() {
                while seen_arrivals < arr.len() && arr[seen_arrivals] <= t {
                    seen_arrivals += 1;
                }
                if i + 1 > seen_arrivals {
                    return Err(ConservationError(format!(
                        "road {r}: {} crossings by {t} but only {seen_arrivals} arrivals",
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Reconstruct per-road green intervals from the signal log and check
    /// no two roads are green at the same instant. Intervals are half-open,
    /// so a handover at one instant is safe.
    pub fn verify_signal_safety(&self) -> Result<(), ConservationError> {
        let roads = self.final_queue_lens.len();
        let end = SimTime::ZERO + self.elapsed;
        let mut greens: Vec<(SimTime, SimTime, usize)> = Vec::new();
        for r in 0..roads {
            let mut green_since: Option<SimTime> = None;
            for change in self.signal_changes.iter().filter(|c| c.road.0 == r) {
                match (green_since, change.signal) {
                    (None, Signal::Green) => green_since = Some(change.at),
                    (Some(start), s) if s != Signal::Green => {
                        greens.push((start, change.at, r));
                        green_since = None;
                    }
                    _ => {}
                }
            }
            if let Some(start) = green_since {
                greens.push((start, end, r));
            }
        }
        greens.sort_unstable_by_key(|&(start, _, _)| start);
        for w in greens.windows(2) {
            let (start_a, end_a, road_a) = w[0];
            let (start_b, _, road_b) = w[1];
            if road_a != road_b && start_b < end_a {
                return Err(ConservationError(format!(
                    "roads {road_a} and {road_b} are both green in [{start_b}, {})",
                    if end_a < start_b { start_b } else { end_a }
                )));
            }
            let _ = start_a;
        }
        Ok(())
    }

    /// Run every verifier.
    pub fn verify_all(&self) -> Result<(), ConservationError> {
        self.verify_ttfu_double_entry()?;
        self.verify_tuple_conservation()?;
        self.verify_vehicle_conservation()?;
        self.verify_signal_safety()?;
        Ok(())
    }

    pub fn total_arrivals(&self) -> u64 {
        self.arrivals.len() as u64
    }

    pub fn total_crossed(&self) -> u64 {
        self.crossings.len() as u64
    }

    pub fn total_blocked(&self) -> u64 {
        self.blocked_per_road.iter().sum()
    }
}
