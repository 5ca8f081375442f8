//! The application graph: picture capture, slot detection, LED actuation
//! and cloud archival.
//!
//! Per road, the camera emits a frame every sensor period; the fog node
//! runs picture capture and slot detection over it; the slot report goes up
//! to the signal decision point on the proxy; display corrections come back
//! down to the LEDs; and a copy of the processed record is archived through
//! the proxy to the cloud. The measured application loop is
//! camera → picture-capture → slot-detector → decision → LED.

use alloc::vec::Vec;
use core::fmt;

use crate::controller::LedAssignment;
use crate::net::TupleKind;
use crate::time::SimDuration;
use crate::topology::{DeviceId, DeviceKind, LedColor, RoadId, Topology};
use crate::traffic::Signal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AppModuleKind {
    PictureCapture,
    SlotDetector,
    CloudArchive,
}

impl AppModuleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AppModuleKind::PictureCapture => "picture-capture",
            AppModuleKind::SlotDetector => "slot-detector",
            AppModuleKind::CloudArchive => "cloud-archive",
        }
    }
}

/// A module instance resident on one device.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AppModule {
    pub kind: AppModuleKind,
    pub host: DeviceId,
    pub ram_mb: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeEndpoint {
    Camera(RoadId),
    Module(AppModuleKind, RoadId),
    /// The signal decision point on the proxy.
    SignalController,
    Led(RoadId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AppEdge {
    pub from: EdgeEndpoint,
    pub to: EdgeEndpoint,
    pub tuple: TupleKind,
    /// True when the edge moves toward the cloud.
    pub up: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AppError {
    RamExceeded {
        device: alloc::string::String,
        required_mb: u64,
        available_mb: u64,
    },
    BadHost {
        module: AppModuleKind,
    },
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::RamExceeded {
                device,
                required_mb,
                available_mb,
            } => write!(
                f,
                "device '{device}' needs {required_mb} MB of module RAM but has {available_mb} MB"
            ),
            AppError::BadHost { module } => {
                write!(f, "module '{}' placed on an invalid host", module.as_str())
            }
        }
    }
}

/// The deployed application: module placements plus the edge list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppGraph {
    pub modules: Vec<AppModule>,
    pub edges: Vec<AppEdge>,
}

impl AppGraph {
    /// Place the standard pipeline on a topology and check RAM capacity.
    pub fn standard(
        topology: &Topology,
        footprints: &crate::config::ModuleFootprints,
    ) -> Result<AppGraph, AppError> {
        let mut modules = Vec::new();
        let mut edges = Vec::new();
        for r in 0..topology.road_count() {
            let road = RoadId(r);
            let fog = topology.fog(road);
            modules.push(AppModule {
                kind: AppModuleKind::PictureCapture,
                host: fog,
                ram_mb: footprints.picture_capture_mb,
            });
            modules.push(AppModule {
                kind: AppModuleKind::SlotDetector,
                host: fog,
                ram_mb: footprints.slot_detector_mb,
            });
            edges.push(AppEdge {
                from: EdgeEndpoint::Camera(road),
                to: EdgeEndpoint::Module(AppModuleKind::PictureCapture, road),
                tuple: TupleKind::Frame,
                up: true,
            });
            edges.push(AppEdge {
                from: EdgeEndpoint::Module(AppModuleKind::PictureCapture, road),
                to: EdgeEndpoint::Module(AppModuleKind::SlotDetector, road),
                tuple: TupleKind::Frame,
                up: true,
            });
            edges.push(AppEdge {
                from: EdgeEndpoint::Module(AppModuleKind::SlotDetector, road),
                to: EdgeEndpoint::SignalController,
                tuple: TupleKind::SlotStatus,
                up: true,
            });
            edges.push(AppEdge {
                from: EdgeEndpoint::SignalController,
                to: EdgeEndpoint::Led(road),
                tuple: TupleKind::LedCommand,
                up: false,
            });
            edges.push(AppEdge {
                from: EdgeEndpoint::Module(AppModuleKind::SlotDetector, road),
                to: EdgeEndpoint::Module(AppModuleKind::CloudArchive, road),
                tuple: TupleKind::CloudArchive,
                up: true,
            });
        }
        modules.push(AppModule {
            kind: AppModuleKind::CloudArchive,
            host: topology.cloud(),
            ram_mb: footprints.cloud_archive_mb,
        });

        let graph = AppGraph { modules, edges };
        graph.validate(topology)?;
        Ok(graph)
    }

    pub fn validate(&self, topology: &Topology) -> Result<(), AppError> {
        for module in &self.modules {
            let host_kind = topology.device(module.host).kind;
            let ok = match module.kind {
                AppModuleKind::PictureCapture | AppModuleKind::SlotDetector => {
                    matches!(host_kind, DeviceKind::Fog { .. })
                }
                AppModuleKind::CloudArchive => matches!(host_kind, DeviceKind::Cloud),
            };
            if !ok {
                return Err(AppError::BadHost {
                    module: module.kind,
                });
            }
        }
        // resident footprints must fit each device's RAM
        for (id, device) in topology.devices() {
            let Some(spec) = device.spec.as_ref() else {
                continue;
            };
            let required: u64 = self
                .modules
                .iter()
                .filter(|m| m.host == id)
                .map(|m| m.ram_mb)
                .sum();
            if required > spec.ram_mb {
                return Err(AppError::RamExceeded {
                    device: device.name.clone(),
                    required_mb: required,
                    available_mb: spec.ram_mb,
                });
            }
        }
        Ok(())
    }

    /// The measured loop for one road, in traversal order.
    pub fn loop_for(&self, road: RoadId) -> [EdgeEndpoint; 5] {
        [
            EdgeEndpoint::Camera(road),
            EdgeEndpoint::Module(AppModuleKind::PictureCapture, road),
            EdgeEndpoint::Module(AppModuleKind::SlotDetector, road),
            EdgeEndpoint::SignalController,
            EdgeEndpoint::Led(road),
        ]
    }

    /// Check the loop's edges all exist for every road.
    pub fn has_closed_loops(&self, roads: usize) -> bool {
        (0..roads).all(|r| {
            let chain = self.loop_for(RoadId(r));
            chain
                .windows(2)
                .all(|w| self.edges.iter().any(|e| e.from == w[0] && e.to == w[1]))
        })
    }
}

/// Mean loop latency over samples; `None` when there are no samples.
pub fn loop_delay(samples: &[SimDuration]) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    let total: u64 = samples.iter().map(|s| s.as_millis()).sum();
    Some(total as f64 / samples.len() as f64)
}

/// A display correction: turn on one road's lamp of the given color (its
/// other two lamps go dark implicitly).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LedSwitch {
    pub road: RoadId,
    pub turn_on: LedColor,
}

pub fn signal_color(signal: Signal) -> LedColor {
    match signal {
        Signal::Red => LedColor::Red,
        Signal::Yellow => LedColor::Yellow,
        Signal::Green => LedColor::Green,
    }
}

/// Change-only actuation: commands for exactly the roads whose displayed
/// state differs from the target assignment. Red switches are ordered
/// before yellow and green so a display never shows two permissive roads
/// while commands land.
pub fn led_switches(displayed: &[Signal], target: &LedAssignment) -> Vec<LedSwitch> {
    debug_assert_eq!(displayed.len(), target.roads());
    let mut switches: Vec<LedSwitch> = displayed
        .iter()
        .enumerate()
        .filter(|&(road, &shown)| shown != target.state(RoadId(road)))
        .map(|(road, _)| LedSwitch {
            road: RoadId(road),
            turn_on: signal_color(target.state(RoadId(road))),
        })
        .collect();
    switches.sort_by_key(|s| (s.turn_on, s.road));
    switches
}
