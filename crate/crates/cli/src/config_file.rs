//! JSON scenario files.
//!
//! Layering: built-in defaults, then the config file, then CLI flags. The
//! effective configuration is echoed into the output directory as a
//! complete, re-loadable file, so any run can be reproduced from its echo.
//! Unknown keys are rejected with the offending key named.

use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

use fogsim_core::config::{ArrivalSpec, ControllerConfig, ScenarioConfig, TimeUnit};
use fogsim_core::controller::ControllerKind;
use fogsim_core::topology::DeviceSpec;
use fogsim_core::SimDuration;

use crate::CliError;

fn secs(field: &str, value: f64) -> Result<SimDuration, CliError> {
    SimDuration::try_from_secs_f64(value).ok_or_else(|| {
        CliError::Config(format!(
            "config field '{field}': must be a non-negative duration in seconds"
        ))
    })
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceSpecFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mips: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ram_mb: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uplink_bw: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub downlink_bw: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_per_mips: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub busy_power: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub idle_power: Option<f64>,
}

impl DeviceSpecFile {
    fn apply(&self, spec: &mut DeviceSpec) {
        if let Some(v) = self.level {
            spec.level = v;
        }
        if let Some(v) = self.mips {
            spec.mips = v;
        }
        if let Some(v) = self.ram_mb {
            spec.ram_mb = v;
        }
        if let Some(v) = self.uplink_bw {
            spec.uplink_bw = v;
        }
        if let Some(v) = self.downlink_bw {
            spec.downlink_bw = v;
        }
        if let Some(v) = self.rate_per_mips {
            spec.rate_per_mips = v;
        }
        if let Some(v) = self.busy_power {
            spec.busy_power = v;
        }
        if let Some(v) = self.idle_power {
            spec.idle_power = v;
        }
    }

    fn full(spec: &DeviceSpec) -> DeviceSpecFile {
        DeviceSpecFile {
            level: Some(spec.level),
            mips: Some(spec.mips),
            ram_mb: Some(spec.ram_mb),
            uplink_bw: Some(spec.uplink_bw),
            downlink_bw: Some(spec.downlink_bw),
            rate_per_mips: Some(spec.rate_per_mips),
            busy_power: Some(spec.busy_power),
            idle_power: Some(spec.idle_power),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct TiersFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cloud: Option<DeviceSpecFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proxy: Option<DeviceSpecFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fog: Option<DeviceSpecFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct LinksFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cloud_proxy: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proxy_fog: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fog_endpoint: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct UnitsFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_unit: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bw_unit: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct TuplesFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frame_cpu_min_mi: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frame_cpu_max_mi: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frame_nw_min: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frame_nw_max: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slot_status_nw: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decision_mi: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub led_command_nw: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub archive_mi: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ModulesFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub picture_capture_mb: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slot_detector_mb: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cloud_archive_mb: Option<u64>,
}

/// Controller section: a `kind` plus that kind's parameters. Parameters
/// belonging to a different kind are rejected.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ControllerFile {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub yellow_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_green_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extension_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub congestion_threshold_pct: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub headway_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub car_length_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub car_gap_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clearance_s: Option<f64>,
}

impl ControllerFile {
    fn reject_foreign(&self, kind: ControllerKind) -> Result<(), CliError> {
        let mut foreign: Vec<&str> = Vec::new();
        if kind != ControllerKind::Itcms && self.yellow_s.is_some() {
            foreign.push("yellow_s");
        }
        if kind != ControllerKind::Stl {
            if self.base_green_s.is_some() {
                foreign.push("base_green_s");
            }
            if self.extension_s.is_some() {
                foreign.push("extension_s");
            }
            if self.congestion_threshold_pct.is_some() {
                foreign.push("congestion_threshold_pct");
            }
        }
        if kind != ControllerKind::Iov {
            if self.headway_s.is_some() {
                foreign.push("headway_s");
            }
            if self.car_length_m.is_some() {
                foreign.push("car_length_m");
            }
            if self.car_gap_m.is_some() {
                foreign.push("car_gap_m");
            }
            if self.clearance_s.is_some() {
                foreign.push("clearance_s");
            }
        }
        if foreign.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(format!(
                "config field 'controller': {} do not apply to kind '{}'",
                foreign.join(", "),
                kind
            )))
        }
    }

    pub fn to_config(&self) -> Result<ControllerConfig, CliError> {
        let kind = ControllerKind::parse(&self.kind).ok_or_else(|| {
            CliError::Config(format!(
                "config field 'controller.kind': unknown controller '{}' (valid: itcms, stl, iov)",
                self.kind
            ))
        })?;
        self.reject_foreign(kind)?;
        Ok(match kind {
            ControllerKind::Itcms => ControllerConfig::Itcms {
                yellow: match self.yellow_s {
                    Some(v) => secs("controller.yellow_s", v)?,
                    None => SimDuration::from_secs(5),
                },
            },
            ControllerKind::Stl => {
                let defaults = match ControllerConfig::default_for(ControllerKind::Stl) {
                    ControllerConfig::Stl {
                        base_green,
                        extension,
                        congestion_threshold_pct,
                    } => (base_green, extension, congestion_threshold_pct),
                    _ => unreachable!(),
                };
                ControllerConfig::Stl {
                    base_green: match self.base_green_s {
                        Some(v) => secs("controller.base_green_s", v)?,
                        None => defaults.0,
                    },
                    extension: match self.extension_s {
                        Some(v) => secs("controller.extension_s", v)?,
                        None => defaults.1,
                    },
                    congestion_threshold_pct: self.congestion_threshold_pct.unwrap_or(defaults.2),
                }
            }
            ControllerKind::Iov => ControllerConfig::Iov {
                headway: match self.headway_s {
                    Some(v) => secs("controller.headway_s", v)?,
                    None => SimDuration::from_millis(2500),
                },
                car_length_m: self.car_length_m.unwrap_or(4.5),
                car_gap_m: self.car_gap_m.unwrap_or(0.5),
                clearance: match self.clearance_s {
                    Some(v) => secs("controller.clearance_s", v)?,
                    None => SimDuration::from_secs(5),
                },
            },
        })
    }

    fn full(config: &ControllerConfig) -> ControllerFile {
        let mut file = ControllerFile {
            kind: config.kind().as_str().to_string(),
            ..ControllerFile::default()
        };
        match config {
            ControllerConfig::Itcms { yellow } => {
                file.yellow_s = Some(yellow.as_secs_f64());
            }
            ControllerConfig::Stl {
                base_green,
                extension,
                congestion_threshold_pct,
            } => {
                file.base_green_s = Some(base_green.as_secs_f64());
                file.extension_s = Some(extension.as_secs_f64());
                file.congestion_threshold_pct = Some(*congestion_threshold_pct);
            }
            ControllerConfig::Iov {
                headway,
                car_length_m,
                car_gap_m,
                clearance,
            } => {
                file.headway_s = Some(headway.as_secs_f64());
                file.car_length_m = Some(*car_length_m);
                file.car_gap_m = Some(*car_gap_m);
                file.clearance_s = Some(clearance.as_secs_f64());
            }
        }
        file
    }
}

/// Arrival section: a `kind` plus that kind's parameters.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ArrivalFile {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub batch: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub times_s: Option<Vec<f64>>,
}

impl ArrivalFile {
    pub fn to_spec(&self) -> Result<ArrivalSpec, CliError> {
        match self.kind.as_str() {
            "deterministic" => {
                if self.rate_per_s.is_some() || self.times_s.is_some() {
                    return Err(CliError::Config(
                        "config field 'arrival': rate_per_s/times_s do not apply to kind 'deterministic'".into(),
                    ));
                }
                let interval = self.interval_s.ok_or_else(|| {
                    CliError::Config("config field 'arrival.interval_s': required for kind 'deterministic'".into())
                })?;
                Ok(ArrivalSpec::Deterministic {
                    interval: secs("arrival.interval_s", interval)?,
                    batch: self.batch.unwrap_or(1),
                })
            }
            "poisson" => {
                if self.interval_s.is_some() || self.batch.is_some() || self.times_s.is_some() {
                    return Err(CliError::Config(
                        "config field 'arrival': interval_s/batch/times_s do not apply to kind 'poisson'".into(),
                    ));
                }
                let rate = self.rate_per_s.ok_or_else(|| {
                    CliError::Config("config field 'arrival.rate_per_s': required for kind 'poisson'".into())
                })?;
                Ok(ArrivalSpec::Poisson { rate_per_s: rate })
            }
            "trace" => {
                if self.interval_s.is_some() || self.batch.is_some() || self.rate_per_s.is_some() {
                    return Err(CliError::Config(
                        "config field 'arrival': interval_s/batch/rate_per_s do not apply to kind 'trace'".into(),
                    ));
                }
                let times = self.times_s.as_deref().unwrap_or(&[]);
                let times = times
                    .iter()
                    .map(|&t| secs("arrival.times_s", t))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(ArrivalSpec::Trace { times })
            }
            other => Err(CliError::Config(format!(
                "config field 'arrival.kind': unknown arrival process '{other}' (valid: deterministic, poisson, trace)"
            ))),
        }
    }

    fn full(spec: &ArrivalSpec) -> ArrivalFile {
        match spec {
            ArrivalSpec::Deterministic { interval, batch } => ArrivalFile {
                kind: "deterministic".into(),
                interval_s: Some(interval.as_secs_f64()),
                batch: Some(*batch),
                ..ArrivalFile::default()
            },
            ArrivalSpec::Poisson { rate_per_s } => ArrivalFile {
                kind: "poisson".into(),
                rate_per_s: Some(*rate_per_s),
                ..ArrivalFile::default()
            },
            ArrivalSpec::Trace { times } => ArrivalFile {
                kind: "trace".into(),
                times_s: Some(times.iter().map(|t| t.as_secs_f64()).collect()),
                ..ArrivalFile::default()
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrivalOverrideFile {
    pub road: usize,
    pub arrival: ArrivalFile,
}

/// A scenario file. Every key is optional; absent keys keep their built-in
/// defaults.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub controller: Option<ControllerFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sensor_period_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_cycle_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub throughput_bucket_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub units: Option<UnitsFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub devices: Option<TiersFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub links: Option<LinksFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub road_length_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub car_length_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub car_gap_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arrival: Option<ArrivalFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arrival_overrides: Option<Vec<ArrivalOverrideFile>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuples: Option<TuplesFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modules: Option<ModulesFile>,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<ScenarioFile, CliError> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config file '{}': {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("config file '{}': {e}", path.display())))
    }

    /// Apply this file on top of a configuration.
    pub fn apply(&self, cfg: &mut ScenarioConfig) -> Result<(), CliError> {
        if let Some(v) = self.roads {
            cfg.roads = v;
        }
        if let Some(v) = self.duration_s {
            cfg.duration = secs("duration_s", v)?;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(c) = &self.controller {
            cfg.controller = c.to_config()?;
        }
        if let Some(v) = self.sensor_period_s {
            cfg.sensor_period = secs("sensor_period_s", v)?;
        }
        if let Some(v) = self.mu_s {
            cfg.mu = secs("mu_s", v)?;
        }
        if let Some(v) = self.min_cycle_s {
            cfg.min_cycle = secs("min_cycle_s", v)?;
        }
        if let Some(v) = self.throughput_bucket_s {
            cfg.throughput_bucket = secs("throughput_bucket_s", v)?;
        }
        if let Some(units) = &self.units {
            if let Some(tu) = &units.time_unit {
                cfg.units.time_unit = TimeUnit::parse(tu).ok_or_else(|| {
                    CliError::Config(format!(
                        "config field 'units.time_unit': unknown unit '{tu}' (valid: ms, s)"
                    ))
                })?;
            }
            if let Some(bw) = &units.bw_unit {
                cfg.units.bw_unit = bw.clone();
            }
        }
        if let Some(tiers) = &self.devices {
            if let Some(d) = &tiers.cloud {
                d.apply(&mut cfg.devices.cloud);
            }
            if let Some(d) = &tiers.proxy {
                d.apply(&mut cfg.devices.proxy);
            }
            if let Some(d) = &tiers.fog {
                d.apply(&mut cfg.devices.fog);
            }
        }
        if let Some(links) = &self.links {
            if let Some(v) = links.cloud_proxy {
                cfg.links.cloud_proxy = v;
            }
            if let Some(v) = links.proxy_fog {
                cfg.links.proxy_fog = v;
            }
            if let Some(v) = links.fog_endpoint {
                cfg.links.fog_endpoint = v;
            }
        }
        if let Some(v) = self.road_length_m {
            cfg.road_length_m = v;
        }
        if let Some(v) = self.car_length_m {
            cfg.car_length_m = v;
        }
        if let Some(v) = self.car_gap_m {
            cfg.car_gap_m = v;
        }
        if let Some(a) = &self.arrival {
            cfg.arrival = a.to_spec()?;
        }
        if let Some(overrides) = &self.arrival_overrides {
            cfg.arrival_overrides = overrides
                .iter()
                .map(|o| Ok((o.road, o.arrival.to_spec()?)))
                .collect::<Result<Vec<_>, CliError>>()?;
        }
        if let Some(t) = &self.tuples {
            let p = &mut cfg.tuples;
            if let Some(v) = t.frame_cpu_min_mi {
                p.frame_cpu_min_mi = v;
            }
            if let Some(v) = t.frame_cpu_max_mi {
                p.frame_cpu_max_mi = v;
            }
            if let Some(v) = t.frame_nw_min {
                p.frame_nw_min = v;
            }
            if let Some(v) = t.frame_nw_max {
                p.frame_nw_max = v;
            }
            if let Some(v) = t.slot_status_nw {
                p.slot_status_nw = v;
            }
            if let Some(v) = t.decision_mi {
                p.decision_mi = v;
            }
            if let Some(v) = t.led_command_nw {
                p.led_command_nw = v;
            }
            if let Some(v) = t.archive_mi {
                p.archive_mi = v;
            }
        }
        if let Some(m) = &self.modules {
            if let Some(v) = m.picture_capture_mb {
                cfg.modules.picture_capture_mb = v;
            }
            if let Some(v) = m.slot_detector_mb {
                cfg.modules.slot_detector_mb = v;
            }
            if let Some(v) = m.cloud_archive_mb {
                cfg.modules.cloud_archive_mb = v;
            }
        }
        Ok(())
    }

    /// The complete, self-describing form of an effective configuration.
    pub fn full(cfg: &ScenarioConfig) -> ScenarioFile {
        ScenarioFile {
            roads: Some(cfg.roads),
            duration_s: Some(cfg.duration.as_secs_f64()),
            seed: Some(cfg.seed),
            controller: Some(ControllerFile::full(&cfg.controller)),
            sensor_period_s: Some(cfg.sensor_period.as_secs_f64()),
            mu_s: Some(cfg.mu.as_secs_f64()),
            min_cycle_s: Some(cfg.min_cycle.as_secs_f64()),
            throughput_bucket_s: Some(cfg.throughput_bucket.as_secs_f64()),
            units: Some(UnitsFile {
                time_unit: Some(cfg.units.time_unit.as_str().to_string()),
                bw_unit: Some(cfg.units.bw_unit.clone()),
            }),
            devices: Some(TiersFile {
                cloud: Some(DeviceSpecFile::full(&cfg.devices.cloud)),
                proxy: Some(DeviceSpecFile::full(&cfg.devices.proxy)),
                fog: Some(DeviceSpecFile::full(&cfg.devices.fog)),
            }),
            links: Some(LinksFile {
                cloud_proxy: Some(cfg.links.cloud_proxy),
                proxy_fog: Some(cfg.links.proxy_fog),
                fog_endpoint: Some(cfg.links.fog_endpoint),
            }),
            road_length_m: Some(cfg.road_length_m),
            car_length_m: Some(cfg.car_length_m),
            car_gap_m: Some(cfg.car_gap_m),
            arrival: Some(ArrivalFile::full(&cfg.arrival)),
            arrival_overrides: if cfg.arrival_overrides.is_empty() {
                None
            } else {
                Some(
                    cfg.arrival_overrides
                        .iter()
                        .map(|(road, spec)| ArrivalOverrideFile {
                            road: *road,
                            arrival: ArrivalFile::full(spec),
                        })
                        .collect(),
                )
            },
            tuples: Some(TuplesFile {
                frame_cpu_min_mi: Some(cfg.tuples.frame_cpu_min_mi),
                frame_cpu_max_mi: Some(cfg.tuples.frame_cpu_max_mi),
                frame_nw_min: Some(cfg.tuples.frame_nw_min),
                frame_nw_max: Some(cfg.tuples.frame_nw_max),
                slot_status_nw: Some(cfg.tuples.slot_status_nw),
                decision_mi: Some(cfg.tuples.decision_mi),
                led_command_nw: Some(cfg.tuples.led_command_nw),
                archive_mi: Some(cfg.tuples.archive_mi),
            }),
            modules: Some(ModulesFile {
                picture_capture_mb: Some(cfg.modules.picture_capture_mb),
                slot_detector_mb: Some(cfg.modules.slot_detector_mb),
                cloud_archive_mb: Some(cfg.modules.cloud_archive_mb),
            }),
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_echo_round_trips() {
        let cfg = ScenarioConfig::default();
        let echo = ScenarioFile::full(&cfg);
        let json = echo.to_json_pretty();
        let parsed: ScenarioFile = serde_json::from_str(&json).unwrap();
        let mut rebuilt = ScenarioConfig::default();
        parsed.apply(&mut rebuilt).unwrap();
        assert_eq!(rebuilt, cfg);
    }

    #[test]
    fn unknown_keys_are_rejected_with_their_name() {
        let err = serde_json::from_str::<ScenarioFile>(r#"{"road_count": 4}"#).unwrap_err();
        assert!(err.to_string().contains("road_count"), "{err}");
    }

    #[test]
    fn unknown_controller_kind_is_rejected() {
        let file: ScenarioFile =
            serde_json::from_str(r#"{"controller": {"kind": "foo"}}"#).unwrap();
        let mut cfg = ScenarioConfig::default();
        let err = file.apply(&mut cfg).unwrap_err();
        assert!(err.to_string().contains("itcms, stl, iov"), "{err}");
    }

    #[test]
    fn foreign_controller_params_are_rejected() {
        let file: ScenarioFile =
            serde_json::from_str(r#"{"controller": {"kind": "itcms", "base_green_s": 30.0}}"#)
                .unwrap();
        let mut cfg = ScenarioConfig::default();
        let err = file.apply(&mut cfg).unwrap_err();
        assert!(err.to_string().contains("base_green_s"), "{err}");
    }

    #[test]
    fn negative_durations_are_rejected() {
        let file: ScenarioFile = serde_json::from_str(r#"{"duration_s": -5.0}"#).unwrap();
        let mut cfg = ScenarioConfig::default();
        let err = file.apply(&mut cfg).unwrap_err();
        assert!(err.to_string().contains("duration_s"), "{err}");
    }

    #[test]
    fn partial_device_override_merges() {
        let file: ScenarioFile =
            serde_json::from_str(r#"{"devices": {"fog": {"mips": 2000}}}"#).unwrap();
        let mut cfg = ScenarioConfig::default();
        file.apply(&mut cfg).unwrap();
        assert_eq!(cfg.devices.fog.mips, 2000);
        assert_eq!(cfg.devices.fog.ram_mb, 3000, "other fields keep defaults");
    }
}
