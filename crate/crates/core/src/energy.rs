//! Busy/idle time accounting and the energy model.
//!
//! Each compute device accrues busy time while executing tuples; everything
//! else is idle. Energy integrates the two-level power model:
//! `busy_power * busy_time + idle_power * idle_time`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::time::SimDuration;
use crate::topology::{DeviceId, DeviceKind, Topology};

/// Accumulated busy milliseconds per device, indexed by [`DeviceId`].
#[derive(Debug, Clone, Default)]
pub struct EnergyLedger {
    busy_ms: Vec<u64>,
}

impl EnergyLedger {
    pub fn new(device_count: usize) -> Self {
        EnergyLedger {
            busy_ms: alloc::vec![0; device_count],
        }
    }

    pub fn add_busy(&mut self, device: DeviceId, span: SimDuration) {
        self.busy_ms[device.0] += span.as_millis();
    }

    pub fn busy(&self, device: DeviceId) -> SimDuration {
        SimDuration::from_millis(self.busy_ms[device.0])
    }
}

/// One row of the per-device energy table.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceEnergy {
    pub device: String,
    pub level: u8,
    pub busy_s: f64,
    pub idle_s: f64,
    pub utilization: f64,
    pub energy: f64,
    /// rate_per_mips * busy seconds; informational cost line.
    pub cost: f64,
}

/// Integrate the ledger into per-device energy rows over `elapsed` time.
/// Covers compute-tier devices; cameras and LEDs draw no modeled power.
pub fn energy_report(
    ledger: &EnergyLedger,
    topology: &Topology,
    elapsed: SimDuration,
) -> Vec<DeviceEnergy> {
    debug_assert!(!elapsed.is_zero());
    let mut rows = Vec::new();
    for (id, device) in topology.devices() {
        let Some(spec) = device.spec.as_ref() else {
            continue;
        };
        if !matches!(
            device.kind,
            DeviceKind::Cloud | DeviceKind::Proxy | DeviceKind::Fog { .. }
        ) {
            continue;
        }
        let busy = ledger.busy(id);
        debug_assert!(busy <= elapsed);
        let idle = elapsed - busy;
        let busy_s = busy.as_secs_f64();
        let idle_s = idle.as_secs_f64();
        rows.push(DeviceEnergy {
            device: device.name.clone(),
            level: spec.level,
            busy_s,
            idle_s,
            utilization: busy_s / elapsed.as_secs_f64(),
            energy: spec.busy_power * busy_s + spec.idle_power * idle_s,
            cost: spec.rate_per_mips * busy_s,
        });
    }
    rows
}
