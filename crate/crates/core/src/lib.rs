//! Deterministic discrete-event simulation of a fog-computing traffic
//! signal deployment.
//!
//! A three-tier device tree (cloud, proxy, per-road fog nodes with cameras
//! and LED displays) runs an adaptive traffic-signal application: cameras
//! sense road queues, fog nodes detect free slots, a proportional
//! controller allocates green time per road, and baseline controllers (a
//! fixed-cycle plan and a connected-vehicle plan) provide comparisons. A
//! run is reproducible from its seed and yields a full event record from
//! which throughput, delay, loop latency, network usage and energy are
//! computed.
//!
//! The crate is `no_std` (with `alloc`); the companion CLI crate carries
//! file formats, CSV output and wall-clock measurement.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod app;
pub mod config;
pub mod controller;
pub mod energy;
pub mod kernel;
pub mod metrics;
pub mod net;
pub mod record;
pub mod rng;
pub mod sim;
pub mod time;
pub mod topology;
pub mod traffic;

pub use config::{ArrivalSpec, ConfigError, ControllerConfig, ScenarioConfig};
pub use controller::ControllerKind;
pub use kernel::{Event, EventId, Kernel, RunSummary};
pub use metrics::{compare, report, CompareTable, MetricsReport};
pub use record::RunRecord;
pub use rng::RngStream;
pub use sim::{BuildError, Simulation};
pub use time::{SimDuration, SimTime};
pub use topology::{DeviceId, RoadId, Topology};
