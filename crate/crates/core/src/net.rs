//! Tuples and the network model.
//!
//! A tuple is the unit of data and work exchanged between devices. Delivery
//! time over the tree is the sum of per-link latencies plus a serialization
//! term per hop: the sender's uplink bandwidth governs upward hops and the
//! receiver's downlink bandwidth governs downward hops. Cameras and LEDs
//! have no bandwidth figure, so their links contribute latency only.
//!
//! Every hop's payload is charged to the run's network-usage accumulator
//! (the TTFU metric), so a fog → cloud transfer counts its payload twice:
//! once on the fog → proxy hop and once on proxy → cloud.

use core::fmt;

use crate::time::{SimDuration, SimTime};
use crate::topology::{DeviceId, RoadId, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TupleId(pub u64);

impl fmt::Display for TupleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tuple-{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TupleKind {
    /// Camera image sent to the fog node.
    Frame,
    /// Slot-detector output sent up to the signal decision point.
    SlotStatus,
    /// Display command sent down to one LED.
    LedCommand,
    /// Processed record archived through the proxy to the cloud.
    CloudArchive,
}

impl TupleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TupleKind::Frame => "FRAME",
            TupleKind::SlotStatus => "SLOT_STATUS",
            TupleKind::LedCommand => "LED_COMMAND",
            TupleKind::CloudArchive => "CLOUD_ARCHIVE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tuple {
    pub id: TupleId,
    pub kind: TupleKind,
    pub road: RoadId,
    pub source: DeviceId,
    pub destination: DeviceId,
    /// Execution cost at the destination, million instructions.
    pub cpu_length_mi: u64,
    /// Payload size in bandwidth units (KB by default).
    pub nw_length: u64,
    pub created_at: SimTime,
    pub delivered_at: Option<SimTime>,
    pub executed_at: Option<SimTime>,
}

/// Precomputed delivery schedule for one transmission.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransmitPlan {
    /// Latency plus serialization over all hops.
    pub delay: SimDuration,
    pub hop_count: u32,
    /// Payload charged to network usage: nw_length times hop count.
    pub charged_payload: u64,
}

/// Compute the delivery delay and accounting for sending `nw_length` payload
/// units from `from` to `to`.
pub fn plan_transmission(
    topology: &Topology,
    from: DeviceId,
    to: DeviceId,
    nw_length: u64,
) -> TransmitPlan {
    let route = topology.route(from, to);
    let mut delay = SimDuration::ZERO;
    for hop in &route {
        delay += hop.latency;
        let governing = if hop.up {
            topology.device(hop.from).spec.as_ref().map(|s| s.uplink_bw)
        } else {
            topology.device(hop.to).spec.as_ref().map(|s| s.downlink_bw)
        };
        if let Some(bw) = governing {
            delay += SimDuration::from_millis(nw_length * 1000 / bw);
        }
    }
    TransmitPlan {
        delay,
        hop_count: route.len() as u32,
        charged_payload: nw_length * route.len() as u64,
    }
}

/// Service time for `cpu_mi` million instructions at `mips`, rounded down
/// to whole milliseconds.
pub fn service_time(cpu_mi: u64, mips: u64) -> SimDuration {
    debug_assert!(mips > 0);
    SimDuration::from_millis(cpu_mi * 1000 / mips)
}
