//! Signal controllers: the proportional green-time controller (ITCMS) and
//! the STL and IoV baselines.
//!
//! Controllers are pure decision functions: given a snapshot of per-road
//! demand they emit a [`PhasePlan`] for one cycle. Phases are served in
//! ascending road order; at most one road is ever Green or Yellow.

use alloc::vec::Vec;
use core::fmt;

use crate::time::SimDuration;
use crate::topology::RoadId;
use crate::traffic::{Signal, TimingInputs};

/// Which controller drives the signals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ControllerKind {
    Itcms,
    Stl,
    Iov,
}

impl ControllerKind {
    pub const ALL: [ControllerKind; 3] = [
        ControllerKind::Itcms,
        ControllerKind::Stl,
        ControllerKind::Iov,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ControllerKind::Itcms => "itcms",
            ControllerKind::Stl => "stl",
            ControllerKind::Iov => "iov",
        }
    }

    pub fn parse(s: &str) -> Option<ControllerKind> {
        match s {
            "itcms" => Some(ControllerKind::Itcms),
            "stl" => Some(ControllerKind::Stl),
            "iov" => Some(ControllerKind::Iov),
            _ => None,
        }
    }
}

impl fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-road display assignment: exactly one signal state per road, with at
/// most one road showing Green or Yellow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedAssignment {
    states: Vec<Signal>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignmentError {
    /// A road has zero or more than one lamp switched on.
    BadLampCount { road: usize, on: usize },
    /// More than one road is showing Green or Yellow.
    MultipleActive,
}

impl fmt::Display for AssignmentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssignmentError::BadLampCount { road, on } => {
                write!(f, "road {road} has {on} lamps on, expected exactly 1")
            }
            AssignmentError::MultipleActive => {
                write!(f, "more than one road is green or yellow")
            }
        }
    }
}

impl LedAssignment {
    pub fn all_red(roads: usize) -> Self {
        LedAssignment {
            states: alloc::vec![Signal::Red; roads],
        }
    }

    pub fn green_for(road: RoadId, roads: usize) -> Self {
        let mut a = Self::all_red(roads);
        a.states[road.0] = Signal::Green;
        a
    }

    pub fn yellow_for(road: RoadId, roads: usize) -> Self {
        let mut a = Self::all_red(roads);
        a.states[road.0] = Signal::Yellow;
        a
    }

    /// Validate an explicit per-road state vector.
    pub fn from_states(states: Vec<Signal>) -> Result<Self, AssignmentError> {
        let active = states.iter().filter(|s| **s != Signal::Red).count();
        if active > 1 {
            return Err(AssignmentError::MultipleActive);
        }
        Ok(LedAssignment { states })
    }

    /// Validate raw lamp states, `(red, yellow, green)` per road: exactly
    /// one lamp of each road may be lit.
    pub fn from_lamp_states(lamps: &[(bool, bool, bool)]) -> Result<Self, AssignmentError> {
        let mut states = Vec::with_capacity(lamps.len());
        for (road, &(red, yellow, green)) in lamps.iter().enumerate() {
            let on = red as usize + yellow as usize + green as usize;
            if on != 1 {
                return Err(AssignmentError::BadLampCount { road, on });
            }
            states.push(if green {
                Signal::Green
            } else if yellow {
                Signal::Yellow
            } else {
                Signal::Red
            });
        }
        Self::from_states(states)
    }

    pub fn state(&self, road: RoadId) -> Signal {
        self.states[road.0]
    }

    pub fn states(&self) -> &[Signal] {
        &self.states
    }

    pub fn roads(&self) -> usize {
        self.states.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathError {
    SameRoad,
    UnknownRoad(usize),
}

impl fmt::Display for PathError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathError::SameRoad => write!(f, "source and destination roads are the same"),
            PathError::UnknownRoad(r) => write!(f, "unknown road {r}"),
        }
    }
}

/// The path function: a vehicle moving from `source` to `destination` gets
/// the source road's LED set Green and every other road set Red.
pub fn path(source: RoadId, destination: RoadId, roads: usize) -> Result<LedAssignment, PathError> {
    if source.0 >= roads {
        return Err(PathError::UnknownRoad(source.0));
    }
    if destination.0 >= roads {
        return Err(PathError::UnknownRoad(destination.0));
    }
    if source == destination {
        return Err(PathError::SameRoad);
    }
    Ok(LedAssignment::green_for(source, roads))
}

/// One served road within a cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GreenPhase {
    pub road: RoadId,
    pub green: SimDuration,
}

/// A controller's output for one signal cycle.
///
/// Roads appear in ascending index order. A `yellow` interval follows each
/// green phase except the last. An empty plan idles all-red for `idle`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhasePlan {
    pub phases: Vec<GreenPhase>,
    pub yellow: SimDuration,
    pub idle: SimDuration,
}

/// A timeline entry derived from a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlanStep {
    pub road: RoadId,
    pub signal: Signal,
    pub offset: SimDuration,
    pub duration: SimDuration,
    /// For green steps: the crossable window (green plus the trailing
    /// yellow clearance interval, when one follows).
    pub service_window: SimDuration,
}

impl PhasePlan {
    pub fn is_idle(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn cycle_duration(&self) -> SimDuration {
        if self.phases.is_empty() {
            return self.idle;
        }
        let greens = self
            .phases
            .iter()
            .fold(SimDuration::ZERO, |acc, p| acc + p.green);
        let yellows = self.yellow.as_millis() * (self.phases.len() as u64 - 1);
        greens + SimDuration::from_millis(yellows)
    }

    /// Expand the plan into green/yellow steps with offsets from cycle start.
    pub fn steps(&self) -> Vec<PlanStep> {
        let mut steps = Vec::new();
        let mut offset = SimDuration::ZERO;
        for (i, phase) in self.phases.iter().enumerate() {
            let last = i + 1 == self.phases.len();
            let trailing_yellow = if last { SimDuration::ZERO } else { self.yellow };
            steps.push(PlanStep {
                road: phase.road,
                signal: Signal::Green,
                offset,
                duration: phase.green,
                service_window: phase.green + trailing_yellow,
            });
            offset += phase.green;
            if !last && !self.yellow.is_zero() {
                steps.push(PlanStep {
                    road: phase.road,
                    signal: Signal::Yellow,
                    offset,
                    duration: self.yellow,
                    service_window: SimDuration::ZERO,
                });
                offset += self.yellow;
            }
        }
        steps
    }
}

/// ITCMS: green time per road proportional to its share of queued vehicles,
/// with a yellow clearance interval between consecutive greens. A snapshot
/// with no demand yields an all-red idle plan of `min_cycle`.
pub fn itcms_plan(
    counts: &[u64],
    mu: SimDuration,
    yellow: SimDuration,
    min_cycle: SimDuration,
) -> PhasePlan {
    let timing = TimingInputs::compute(counts, mu);
    if timing.total == 0 {
        return PhasePlan {
            phases: Vec::new(),
            yellow,
            idle: min_cycle,
        };
    }
    let phases = timing
        .greens
        .iter()
        .enumerate()
        .filter(|(_, g)| !g.is_zero())
        .map(|(road, &green)| GreenPhase {
            road: RoadId(road),
            green,
        })
        .collect();
    PhasePlan {
        phases,
        yellow,
        idle: SimDuration::ZERO,
    }
}

/// STL: fixed round-robin green per road; a congested road's green is
/// extended by a fixed amount. No yellow interval.
pub fn stl_plan(
    base_green: SimDuration,
    roads: usize,
    extension: SimDuration,
    congestion: &[bool],
) -> PhasePlan {
    debug_assert!(roads >= 1);
    debug_assert_eq!(congestion.len(), roads);
    let phases = (0..roads)
        .map(|road| GreenPhase {
            road: RoadId(road),
            green: if congestion[road] {
                base_green + extension
            } else {
                base_green
            },
        })
        .collect();
    PhasePlan {
        phases,
        yellow: SimDuration::ZERO,
        idle: SimDuration::ZERO,
    }
}

/// IoV: round-robin green proportional to connected-vehicle occupancy at a
/// fixed headway per vehicle, capped by the road's car capacity. Roads with
/// zero occupancy are skipped; an all-zero snapshot idles for `min_cycle`.
/// `clearance` is the change interval between consecutive phases, the same
/// physical constraint every adaptive plan at the intersection honors.
pub fn iov_plan(
    occupancy: &[u64],
    headway: SimDuration,
    max_per_road: u64,
    min_cycle: SimDuration,
    clearance: SimDuration,
) -> PhasePlan {
    let phases: Vec<GreenPhase> = occupancy
        .iter()
        .enumerate()
        .filter(|(_, &occ)| occ > 0)
        .map(|(road, &occ)| GreenPhase {
            road: RoadId(road),
            green: SimDuration::from_millis(occ.min(max_per_road) * headway.as_millis()),
        })
        .collect();
    let idle = if phases.is_empty() {
        min_cycle
    } else {
        SimDuration::ZERO
    };
    PhasePlan {
        phases,
        yellow: clearance,
        idle,
    }
}

/// The fixed-cycle baseline's demo traffic figures: two cars arrive every
/// 15 s per road; three cars depart every 6 s during a green.
pub const STL_ARRIVAL_INTERVAL: SimDuration = SimDuration::from_secs(15);
pub const STL_ARRIVAL_BATCH: u64 = 2;
pub const STL_EXIT_INTERVAL: SimDuration = SimDuration::from_secs(6);
pub const STL_EXIT_BATCH: u64 = 3;

/// The STL baseline's published cycle arithmetic: cycle length, cars
/// arriving over the red window, and cars leaving during one green.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StlArithmetic {
    pub cycle: SimDuration,
    pub arrivals_per_cycle: u64,
    pub exits_per_green: u64,
}

pub fn stl_arithmetic(
    base_green: SimDuration,
    roads: u64,
    arrival_interval: SimDuration,
    arrival_batch: u64,
    exit_interval: SimDuration,
    exit_batch: u64,
) -> StlArithmetic {
    let cycle = SimDuration::from_millis(base_green.as_millis() * roads);
    let red_window = cycle - base_green;
    StlArithmetic {
        cycle,
        arrivals_per_cycle: red_window.as_millis() / arrival_interval.as_millis() * arrival_batch,
        exits_per_green: base_green.as_millis() / exit_interval.as_millis() * exit_batch,
    }
}
