//! Scenario configuration and built-in defaults.
//!
//! `ScenarioConfig::default()` is the `paper-default` scenario: four roads,
//! the standard device tiers, 200/100/50 link latencies, a 5 s camera
//! period, uniform 20..=100 tuple lengths and a proportional controller
//! with a 5 s yellow. Every knob can be overridden; validation names the
//! offending field.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::controller::ControllerKind;
use crate::time::SimDuration;
use crate::topology::{DeviceSpec, TopologyInputs};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: &'static str,
    pub message: String,
}

impl ConfigError {
    fn new(field: &'static str, message: impl Into<String>) -> Self {
        ConfigError {
            field,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config field '{}': {}", self.field, self.message)
    }
}

/// Interpretation of the raw link-latency numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeUnit {
    Millis,
    Secs,
}

impl TimeUnit {
    pub fn as_str(self) -> &'static str {
        match self {
            TimeUnit::Millis => "ms",
            TimeUnit::Secs => "s",
        }
    }

    pub fn parse(s: &str) -> Option<TimeUnit> {
        match s {
            "ms" => Some(TimeUnit::Millis),
            "s" => Some(TimeUnit::Secs),
            _ => None,
        }
    }

    fn scale(self, raw: u64) -> SimDuration {
        match self {
            TimeUnit::Millis => SimDuration::from_millis(raw),
            TimeUnit::Secs => SimDuration::from_secs(raw),
        }
    }
}

/// Self-describing unit block echoed into every output.
#[derive(Debug, Clone, PartialEq)]
pub struct Units {
    pub time_unit: TimeUnit,
    /// Bandwidth and payload unit label; payload math is unit-agnostic.
    pub bw_unit: String,
}

impl Default for Units {
    fn default() -> Self {
        Units {
            time_unit: TimeUnit::Millis,
            bw_unit: String::from("kBps"),
        }
    }
}

/// Raw per-link latency figures, interpreted via [`Units::time_unit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkLatencies {
    pub cloud_proxy: u64,
    pub proxy_fog: u64,
    pub fog_endpoint: u64,
}

impl Default for LinkLatencies {
    fn default() -> Self {
        LinkLatencies {
            cloud_proxy: 200,
            proxy_fog: 100,
            fog_endpoint: 50,
        }
    }
}

/// The three compute tiers.
#[derive(Debug, Clone, PartialEq)]
pub struct TierSpecs {
    pub cloud: DeviceSpec,
    pub proxy: DeviceSpec,
    pub fog: DeviceSpec,
}

impl Default for TierSpecs {
    fn default() -> Self {
        TierSpecs {
            cloud: DeviceSpec {
                level: 0,
                mips: 500,
                ram_mb: 45_000,
                uplink_bw: 1000,
                downlink_bw: 1200,
                rate_per_mips: 1000.0,
                busy_power: 1648.0,
                idle_power: 1332.0,
            },
            proxy: DeviceSpec {
                level: 1,
                mips: 4000,
                ram_mb: 4500,
                uplink_bw: 1000,
                downlink_bw: 1100,
                rate_per_mips: 500.0,
                busy_power: 107.339,
                idle_power: 83.433,
            },
            fog: DeviceSpec {
                level: 2,
                mips: 1000,
                ram_mb: 3000,
                uplink_bw: 800,
                downlink_bw: 1000,
                rate_per_mips: 400.0,
                busy_power: 107.339,
                idle_power: 83.433,
            },
        }
    }
}

/// Per-road vehicle arrival process.
#[derive(Debug, Clone, PartialEq)]
pub enum ArrivalSpec {
    Deterministic { interval: SimDuration, batch: u32 },
    Poisson { rate_per_s: f64 },
    Trace { times: Vec<SimDuration> },
}

impl ArrivalSpec {
    fn validate(&self, field: &'static str) -> Result<(), ConfigError> {
        match self {
            ArrivalSpec::Deterministic { interval, batch } => {
                if interval.is_zero() {
                    return Err(ConfigError::new(
                        field,
                        "deterministic interval must be positive",
                    ));
                }
                if *batch == 0 {
                    return Err(ConfigError::new(
                        field,
                        "deterministic batch must be at least 1",
                    ));
                }
            }
            ArrivalSpec::Poisson { rate_per_s } => {
                if !rate_per_s.is_finite() || *rate_per_s < 0.0 {
                    return Err(ConfigError::new(
                        field,
                        "poisson rate must be finite and non-negative",
                    ));
                }
            }
            ArrivalSpec::Trace { times } => {
                if times.windows(2).any(|w| w[0] > w[1]) {
                    return Err(ConfigError::new(
                        field,
                        "trace times must be non-decreasing",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Tuple sizing: the camera frame draws its CPU and payload lengths
/// uniformly; the remaining tuple kinds use fixed figures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleProfile {
    pub frame_cpu_min_mi: u64,
    pub frame_cpu_max_mi: u64,
    pub frame_nw_min: u64,
    pub frame_nw_max: u64,
    /// Payload of the slot-status report sent up to the decision point.
    pub slot_status_nw: u64,
    /// Signal-decision work executed per slot-status report.
    pub decision_mi: u64,
    pub led_command_nw: u64,
    /// Archival work executed on the cloud per record.
    pub archive_mi: u64,
}

impl Default for TupleProfile {
    fn default() -> Self {
        TupleProfile {
            frame_cpu_min_mi: 20,
            frame_cpu_max_mi: 100,
            frame_nw_min: 20,
            frame_nw_max: 100,
            slot_status_nw: 2,
            decision_mi: 200,
            led_command_nw: 1,
            archive_mi: 50,
        }
    }
}

/// Resident memory footprints used for the RAM capacity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModuleFootprints {
    pub picture_capture_mb: u64,
    pub slot_detector_mb: u64,
    pub cloud_archive_mb: u64,
}

impl Default for ModuleFootprints {
    fn default() -> Self {
        ModuleFootprints {
            picture_capture_mb: 100,
            slot_detector_mb: 100,
            cloud_archive_mb: 100,
        }
    }
}

/// Controller selection and per-kind parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ControllerConfig {
    Itcms {
        yellow: SimDuration,
    },
    Stl {
        base_green: SimDuration,
        extension: SimDuration,
        /// Queue occupancy (percent of capacity) that flags congestion.
        congestion_threshold_pct: u8,
    },
    Iov {
        headway: SimDuration,
        car_length_m: f64,
        car_gap_m: f64,
        /// Phase change interval between consecutive greens.
        clearance: SimDuration,
    },
}

impl ControllerConfig {
    pub fn kind(&self) -> ControllerKind {
        match self {
            ControllerConfig::Itcms { .. } => ControllerKind::Itcms,
            ControllerConfig::Stl { .. } => ControllerKind::Stl,
            ControllerConfig::Iov { .. } => ControllerKind::Iov,
        }
    }

    pub fn default_for(kind: ControllerKind) -> ControllerConfig {
        match kind {
            ControllerKind::Itcms => ControllerConfig::Itcms {
                yellow: SimDuration::from_secs(5),
            },
            ControllerKind::Stl => ControllerConfig::Stl {
                base_green: SimDuration::from_secs(30),
                extension: SimDuration::from_secs(16),
                congestion_threshold_pct: 50,
            },
            ControllerKind::Iov => ControllerConfig::Iov {
                headway: SimDuration::from_millis(2500),
                car_length_m: 4.5,
                car_gap_m: 0.5,
                clearance: SimDuration::from_secs(5),
            },
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        match self {
            ControllerConfig::Itcms { .. } => Ok(()),
            ControllerConfig::Stl {
                base_green,
                congestion_threshold_pct,
                ..
            } => {
                if base_green.is_zero() {
                    return Err(ConfigError::new(
                        "controller.base_green",
                        "must be positive",
                    ));
                }
                if *congestion_threshold_pct > 100 {
                    return Err(ConfigError::new(
                        "controller.congestion_threshold_pct",
                        "must be at most 100",
                    ));
                }
                Ok(())
            }
            ControllerConfig::Iov {
                headway,
                car_length_m,
                car_gap_m,
                ..
            } => {
                if headway.is_zero() {
                    return Err(ConfigError::new("controller.headway", "must be positive"));
                }
                if *car_length_m <= 0.0 || *car_gap_m <= 0.0 {
                    return Err(ConfigError::new(
                        "controller.car_geometry",
                        "car length and gap must be positive",
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Everything one run needs. All durations are simulated time.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Number of roads; each road gets one fog node, camera and LED trio.
    pub roads: usize,
    pub duration: SimDuration,
    pub seed: u64,
    pub controller: ControllerConfig,
    pub sensor_period: SimDuration,
    /// Per-vehicle crossing time at a green light.
    pub mu: SimDuration,
    /// All-red polling cycle when there is no demand.
    pub min_cycle: SimDuration,
    pub throughput_bucket: SimDuration,
    pub units: Units,
    pub devices: TierSpecs,
    pub links: LinkLatencies,
    pub road_length_m: f64,
    pub car_length_m: f64,
    pub car_gap_m: f64,
    /// Default arrival process, plus per-road overrides by index.
    pub arrival: ArrivalSpec,
    pub arrival_overrides: Vec<(usize, ArrivalSpec)>,
    pub tuples: TupleProfile,
    pub modules: ModuleFootprints,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            roads: 4,
            duration: SimDuration::from_secs(3600),
            seed: 1,
            controller: ControllerConfig::default_for(ControllerKind::Itcms),
            sensor_period: SimDuration::from_secs(5),
            mu: SimDuration::from_millis(2500),
            min_cycle: SimDuration::from_secs(10),
            throughput_bucket: SimDuration::from_secs(10),
            units: Units::default(),
            devices: TierSpecs::default(),
            links: LinkLatencies::default(),
            road_length_m: 400.0,
            car_length_m: 4.5,
            car_gap_m: 0.5,
            arrival: ArrivalSpec::Poisson { rate_per_s: 0.09 },
            arrival_overrides: Vec::new(),
            tuples: TupleProfile::default(),
            modules: ModuleFootprints::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.roads == 0 {
            return Err(ConfigError::new("roads", "at least one road is required"));
        }
        if self.duration.is_zero() {
            return Err(ConfigError::new("duration", "must be positive"));
        }
        if self.sensor_period.is_zero() {
            return Err(ConfigError::new("sensor_period", "must be positive"));
        }
        if self.mu.is_zero() {
            return Err(ConfigError::new("mu", "must be positive"));
        }
        if self.min_cycle.is_zero() {
            return Err(ConfigError::new("min_cycle", "must be positive"));
        }
        if self.throughput_bucket.is_zero() {
            return Err(ConfigError::new("throughput_bucket", "must be positive"));
        }
        if self.road_length_m <= 0.0 || !self.road_length_m.is_finite() {
            return Err(ConfigError::new("road_length_m", "must be positive"));
        }
        if self.car_length_m <= 0.0 || self.car_gap_m <= 0.0 {
            return Err(ConfigError::new(
                "car_geometry",
                "car length and gap must be positive",
            ));
        }
        if self.tuples.frame_cpu_min_mi > self.tuples.frame_cpu_max_mi {
            return Err(ConfigError::new("tuples.frame_cpu", "min exceeds max"));
        }
        if self.tuples.frame_nw_min > self.tuples.frame_nw_max {
            return Err(ConfigError::new("tuples.frame_nw", "min exceeds max"));
        }
        self.controller.validate()?;
        self.arrival.validate("arrival")?;
        for (road, spec) in &self.arrival_overrides {
            if *road >= self.roads {
                return Err(ConfigError::new(
                    "arrival_overrides",
                    format!("road index {road} out of range for {} roads", self.roads),
                ));
            }
            spec.validate("arrival_overrides")?;
        }
        for (name, spec) in [
            ("devices.cloud", &self.devices.cloud),
            ("devices.proxy", &self.devices.proxy),
            ("devices.fog", &self.devices.fog),
        ] {
            if let Err(reason) = spec.validate() {
                return Err(ConfigError::new(name, reason));
            }
        }
        Ok(())
    }

    /// The arrival process for one road, override-aware.
    pub fn arrival_for(&self, road: usize) -> &ArrivalSpec {
        self.arrival_overrides
            .iter()
            .find(|(r, _)| *r == road)
            .map(|(_, spec)| spec)
            .unwrap_or(&self.arrival)
    }

    pub fn topology_inputs(&self) -> TopologyInputs {
        let unit = self.units.time_unit;
        TopologyInputs {
            fog_nodes: self.roads,
            cloud: self.devices.cloud.clone(),
            proxy: self.devices.proxy.clone(),
            fog: self.devices.fog.clone(),
            cloud_proxy_latency: unit.scale(self.links.cloud_proxy),
            proxy_fog_latency: unit.scale(self.links.proxy_fog),
            fog_endpoint_latency: unit.scale(self.links.fog_endpoint),
        }
    }

    /// True when two configs describe the same scenario (same seed and
    /// physics), differing at most in the controller.
    pub fn matches_except_controller(&self, other: &ScenarioConfig) -> bool {
        let mut a = self.clone();
        let mut b = other.clone();
        a.controller = ControllerConfig::default_for(ControllerKind::Itcms);
        b.controller = ControllerConfig::default_for(ControllerKind::Itcms);
        a == b
    }
}
