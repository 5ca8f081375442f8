//! Device hierarchy: cloud, proxy, fog nodes, cameras, LEDs.
//!
//! The deployment is a tree rooted at the cloud. Each fog node serves one
//! road and owns one camera plus three LEDs. Compute tiers (cloud, proxy,
//! fog) carry a [`DeviceSpec`]; cameras and LEDs are pure endpoints that
//! add link latency but no serialization or execution capacity.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::time::SimDuration;

/// Index of a road (and of the fog node serving it).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoadId(pub usize);

impl fmt::Display for RoadId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "road-{}", self.0)
    }
}

/// Index of a device within a [`Topology`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DeviceId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LedColor {
    Red,
    Yellow,
    Green,
}

impl LedColor {
    pub const ALL: [LedColor; 3] = [LedColor::Red, LedColor::Yellow, LedColor::Green];

    pub fn as_str(self) -> &'static str {
        match self {
            LedColor::Red => "red",
            LedColor::Yellow => "yellow",
            LedColor::Green => "green",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviceKind {
    Cloud,
    Proxy,
    Fog { road: RoadId },
    Camera { road: RoadId },
    Led { road: RoadId, color: LedColor },
}

impl DeviceKind {
    pub fn is_compute(self) -> bool {
        matches!(
            self,
            DeviceKind::Cloud | DeviceKind::Proxy | DeviceKind::Fog { .. }
        )
    }
}

/// Hardware properties of a compute-tier device.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceSpec {
    /// Tier index: 0 = cloud, 1 = proxy, 2 = fog node.
    pub level: u8,
    /// Processing rate, million instructions per second.
    pub mips: u64,
    pub ram_mb: u64,
    /// Payload units per second (KB/s under the default unit convention).
    pub uplink_bw: u64,
    pub downlink_bw: u64,
    /// Cost rate; carried through to reports, drives no behavior.
    pub rate_per_mips: f64,
    pub busy_power: f64,
    pub idle_power: f64,
}

impl DeviceSpec {
    pub fn validate(&self) -> Result<(), &'static str> {
        if self.mips == 0 {
            return Err("mips must be positive");
        }
        if self.uplink_bw == 0 || self.downlink_bw == 0 {
            return Err("bandwidth must be positive");
        }
        if self.level > 2 {
            return Err("level must be 0, 1 or 2");
        }
        if !(self.busy_power.is_finite() && self.idle_power.is_finite()) {
            return Err("power values must be finite");
        }
        if self.idle_power < 0.0 || self.busy_power < self.idle_power {
            return Err("power must satisfy busy_power >= idle_power >= 0");
        }
        if !self.rate_per_mips.is_finite() || self.rate_per_mips < 0.0 {
            return Err("rate_per_mips must be non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Device {
    pub name: String,
    pub kind: DeviceKind,
    /// Present for compute tiers, absent for cameras and LEDs.
    pub spec: Option<DeviceSpec>,
    /// Parent device and the latency of the connecting link.
    pub parent: Option<(DeviceId, SimDuration)>,
}

/// One hop along a tree path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hop {
    pub from: DeviceId,
    pub to: DeviceId,
    pub latency: SimDuration,
    /// True when the hop moves toward the cloud.
    pub up: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologyError {
    NoFogNodes,
    DuplicateName(String),
    UnknownDevice(String),
    InvalidSpec {
        device: String,
        reason: &'static str,
    },
    MissingSpec(String),
    NotATree(String),
    BadFogChildren {
        device: String,
        cameras: usize,
        leds: usize,
    },
}

impl fmt::Display for TopologyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyError::NoFogNodes => write!(f, "topology needs at least one fog node"),
            TopologyError::DuplicateName(n) => write!(f, "duplicate device name '{n}'"),
            TopologyError::UnknownDevice(n) => write!(f, "unknown device '{n}'"),
            TopologyError::InvalidSpec { device, reason } => {
                write!(f, "invalid spec for '{device}': {reason}")
            }
            TopologyError::MissingSpec(n) => write!(f, "compute device '{n}' has no spec"),
            TopologyError::NotATree(n) => {
                write!(f, "links do not form a tree rooted at the cloud (at '{n}')")
            }
            TopologyError::BadFogChildren {
                device,
                cameras,
                leds,
            } => write!(
                f,
                "fog node '{device}' must have 1 camera and 3 LEDs, found {cameras} and {leds}"
            ),
        }
    }
}

/// The validated device tree for one scenario.
#[derive(Debug, Clone)]
pub struct Topology {
    devices: Vec<Device>,
    by_name: BTreeMap<String, DeviceId>,
    cloud: DeviceId,
    proxy: DeviceId,
    fogs: Vec<DeviceId>,
    cameras: Vec<DeviceId>,
    /// Per road: [red, yellow, green] LED devices.
    leds: Vec<[DeviceId; 3]>,
}

/// Per-tier specs and link latencies used to build the standard tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TopologyInputs {
    pub fog_nodes: usize,
    pub cloud: DeviceSpec,
    pub proxy: DeviceSpec,
    pub fog: DeviceSpec,
    pub cloud_proxy_latency: SimDuration,
    pub proxy_fog_latency: SimDuration,
    pub fog_endpoint_latency: SimDuration,
}

impl Topology {
    /// Build the standard cloud → proxy → fog → {camera, 3 LEDs} tree.
    pub fn build(inputs: &TopologyInputs) -> Result<Topology, TopologyError> {
        if inputs.fog_nodes == 0 {
            return Err(TopologyError::NoFogNodes);
        }
        let mut devices = Vec::new();
        devices.push(Device {
            name: String::from("cloud"),
            kind: DeviceKind::Cloud,
            spec: Some(inputs.cloud.clone()),
            parent: None,
        });
        devices.push(Device {
            name: String::from("proxy"),
            kind: DeviceKind::Proxy,
            spec: Some(inputs.proxy.clone()),
            parent: Some((DeviceId(0), inputs.cloud_proxy_latency)),
        });
        for r in 0..inputs.fog_nodes {
            let road = RoadId(r);
            let fog_id = DeviceId(devices.len());
            devices.push(Device {
                name: format!("fog-{r}"),
                kind: DeviceKind::Fog { road },
                spec: Some(inputs.fog.clone()),
                parent: Some((DeviceId(1), inputs.proxy_fog_latency)),
            });
            devices.push(Device {
                name: format!("camera-{r}"),
                kind: DeviceKind::Camera { road },
                spec: None,
                parent: Some((fog_id, inputs.fog_endpoint_latency)),
            });
            for color in LedColor::ALL {
                devices.push(Device {
                    name: format!("led-{}-{r}", color.as_str()),
                    kind: DeviceKind::Led { road, color },
                    spec: None,
                    parent: Some((fog_id, inputs.fog_endpoint_latency)),
                });
            }
        }
        Topology::from_devices(devices)
    }

    /// Validate an explicit device list and assemble the topology.
    pub fn from_devices(devices: Vec<Device>) -> Result<Topology, TopologyError> {
        let mut by_name = BTreeMap::new();
        for (i, d) in devices.iter().enumerate() {
            if by_name.insert(d.name.clone(), DeviceId(i)).is_some() {
                return Err(TopologyError::DuplicateName(d.name.clone()));
            }
            match (&d.kind, &d.spec) {
                (k, None) if k.is_compute() => {
                    return Err(TopologyError::MissingSpec(d.name.clone()))
                }
                (_, Some(spec)) => {
                    spec.validate()
                        .map_err(|reason| TopologyError::InvalidSpec {
                            device: d.name.clone(),
                            reason,
                        })?
                }
                _ => {}
            }
        }

        // every device must reach a cloud root without looping
        let mut cloud = None;
        let mut proxy = None;
        for (i, d) in devices.iter().enumerate() {
            match d.kind {
                DeviceKind::Cloud => {
                    if d.parent.is_some() || cloud.is_some() {
                        return Err(TopologyError::NotATree(d.name.clone()));
                    }
                    cloud = Some(DeviceId(i));
                }
                DeviceKind::Proxy => proxy = Some(DeviceId(i)),
                _ => {}
            }
            let mut cursor = DeviceId(i);
            let mut steps = 0;
            while let Some((parent, _)) = devices[cursor.0].parent {
                cursor = parent;
                steps += 1;
                if steps > devices.len() {
                    return Err(TopologyError::NotATree(d.name.clone()));
                }
            }
            if !matches!(devices[cursor.0].kind, DeviceKind::Cloud) {
                return Err(TopologyError::NotATree(d.name.clone()));
            }
        }
        let cloud = cloud.ok_or_else(|| TopologyError::UnknownDevice(String::from("cloud")))?;
        let proxy = proxy.ok_or_else(|| TopologyError::UnknownDevice(String::from("proxy")))?;

        // collect per-road equipment and check each fog node's children
        let mut fogs: BTreeMap<usize, DeviceId> = BTreeMap::new();
        for (i, d) in devices.iter().enumerate() {
            if let DeviceKind::Fog { road } = d.kind {
                fogs.insert(road.0, DeviceId(i));
            }
        }
        if fogs.is_empty() {
            return Err(TopologyError::NoFogNodes);
        }
        let mut cameras = Vec::new();
        let mut leds = Vec::new();
        for (&road, &fog_id) in &fogs {
            let mut cams = Vec::new();
            let mut lamp: [Option<DeviceId>; 3] = [None; 3];
            let mut led_count = 0;
            for (i, d) in devices.iter().enumerate() {
                if d.parent.map(|(p, _)| p) != Some(fog_id) {
                    continue;
                }
                match d.kind {
                    DeviceKind::Camera { road: r } if r.0 == road => cams.push(DeviceId(i)),
                    DeviceKind::Led { road: r, color } if r.0 == road => {
                        led_count += 1;
                        let slot = match color {
                            LedColor::Red => 0,
                            LedColor::Yellow => 1,
                            LedColor::Green => 2,
                        };
                        lamp[slot] = Some(DeviceId(i));
                    }
                    _ => {}
                }
            }
            let lamps_ok = lamp.iter().all(|l| l.is_some());
            if cams.len() != 1 || led_count != 3 || !lamps_ok {
                return Err(TopologyError::BadFogChildren {
                    device: devices[fog_id.0].name.clone(),
                    cameras: cams.len(),
                    leds: led_count,
                });
            }
            cameras.push(cams[0]);
            leds.push([lamp[0].unwrap(), lamp[1].unwrap(), lamp[2].unwrap()]);
        }
        let fogs: Vec<DeviceId> = fogs.into_values().collect();

        Ok(Topology {
            devices,
            by_name,
            cloud,
            proxy,
            fogs,
            cameras,
            leds,
        })
    }

    pub fn device(&self, id: DeviceId) -> &Device {
        &self.devices[id.0]
    }

    pub fn devices(&self) -> impl Iterator<Item = (DeviceId, &Device)> {
        self.devices
            .iter()
            .enumerate()
            .map(|(i, d)| (DeviceId(i), d))
    }

    pub fn device_count(&self) -> usize {
        self.devices.len()
    }

    pub fn lookup(&self, name: &str) -> Result<DeviceId, TopologyError> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| TopologyError::UnknownDevice(String::from(name)))
    }

    pub fn cloud(&self) -> DeviceId {
        self.cloud
    }

    pub fn proxy(&self) -> DeviceId {
        self.proxy
    }

    pub fn road_count(&self) -> usize {
        self.fogs.len()
    }

    pub fn fog(&self, road: RoadId) -> DeviceId {
        self.fogs[road.0]
    }

    pub fn camera(&self, road: RoadId) -> DeviceId {
        self.cameras[road.0]
    }

    pub fn led(&self, road: RoadId, color: LedColor) -> DeviceId {
        let slot = match color {
            LedColor::Red => 0,
            LedColor::Yellow => 1,
            LedColor::Green => 2,
        };
        self.leds[road.0][slot]
    }

    fn ancestors(&self, id: DeviceId) -> Vec<DeviceId> {
        let mut chain = alloc::vec![id];
        let mut cursor = id;
        while let Some((parent, _)) = self.devices[cursor.0].parent {
            chain.push(parent);
            cursor = parent;
        }
        chain
    }

    /// The unique tree path between two devices, as hops.
    pub fn route(&self, from: DeviceId, to: DeviceId) -> Vec<Hop> {
        if from == to {
            return Vec::new();
        }
        let up_chain = self.ancestors(from);
        let down_chain = self.ancestors(to);
        // lowest common ancestor: first member of up_chain found in down_chain
        let lca = *up_chain
            .iter()
            .find(|id| down_chain.contains(id))
            .expect("tree has a single root");

        let mut hops = Vec::new();
        for &node in up_chain.iter().take_while(|&&id| id != lca) {
            let (parent, latency) = self.devices[node.0].parent.expect("non-root");
            hops.push(Hop {
                from: node,
                to: parent,
                latency,
                up: true,
            });
        }
        let mut down = Vec::new();
        for &node in down_chain.iter().take_while(|&&id| id != lca) {
            let (parent, latency) = self.devices[node.0].parent.expect("non-root");
            down.push(Hop {
                from: parent,
                to: node,
                latency,
                up: false,
            });
        }
        down.reverse();
        hops.extend(down);
        hops
    }

    /// Sum of link latencies along the unique path.
    pub fn route_latency(&self, from: DeviceId, to: DeviceId) -> SimDuration {
        self.route(from, to)
            .iter()
            .fold(SimDuration::ZERO, |acc, hop| acc + hop.latency)
    }

    /// Name-based variant used by diagnostics and tests.
    pub fn route_latency_by_name(
        &self,
        from: &str,
        to: &str,
    ) -> Result<SimDuration, TopologyError> {
        Ok(self.route_latency(self.lookup(from)?, self.lookup(to)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ScenarioConfig;

    fn paper_default(fog_nodes: usize) -> Topology {
        let cfg = ScenarioConfig {
            roads: fog_nodes,
            ..ScenarioConfig::default()
        };
        Topology::build(&cfg.topology_inputs()).unwrap()
    }

    #[test]
    fn default_four_node_scenario_has_22_devices() {
        let t = paper_default(4);
        assert_eq!(t.device_count(), 22);
        assert_eq!(t.road_count(), 4);
    }

    #[test]
    fn eight_node_scenario_has_eight_cameras_and_24_leds() {
        let t = paper_default(8);
        let cameras = t
            .devices()
            .filter(|(_, d)| matches!(d.kind, DeviceKind::Camera { .. }))
            .count();
        let leds = t
            .devices()
            .filter(|(_, d)| matches!(d.kind, DeviceKind::Led { .. }))
            .count();
        assert_eq!(cameras, 8);
        assert_eq!(leds, 24);
        assert_eq!(t.device_count(), 2 + 8 * 5);
    }

    #[test]
    fn zero_fog_nodes_is_rejected() {
        let cfg = ScenarioConfig {
            roads: 0,
            ..ScenarioConfig::default()
        };
        assert_eq!(
            Topology::build(&cfg.topology_inputs()).unwrap_err(),
            TopologyError::NoFogNodes
        );
    }

    #[test]
    fn camera_to_fog_is_50ms() {
        let t = paper_default(4);
        assert_eq!(
            t.route_latency_by_name("camera-0", "fog-0").unwrap(),
            SimDuration::from_millis(50)
        );
    }

    #[test]
    fn camera_to_cloud_composes_the_three_links() {
        let t = paper_default(4);
        assert_eq!(
            t.route_latency_by_name("camera-0", "cloud").unwrap(),
            SimDuration::from_millis(50 + 100 + 200)
        );
    }

    #[test]
    fn route_to_self_is_empty() {
        let t = paper_default(4);
        let id = t.lookup("fog-2").unwrap();
        assert!(t.route(id, id).is_empty());
        assert_eq!(t.route_latency(id, id), SimDuration::ZERO);
    }

    #[test]
    fn unknown_devices_are_rejected() {
        let t = paper_default(4);
        assert_eq!(
            t.route_latency_by_name("camera-9", "cloud").unwrap_err(),
            TopologyError::UnknownDevice(String::from("camera-9"))
        );
    }

    #[test]
    fn route_latency_is_symmetric() {
        let t = paper_default(8);
        let names: Vec<String> = t.devices().map(|(_, d)| d.name.clone()).collect();
        for a in &names {
            for b in &names {
                assert_eq!(
                    t.route_latency_by_name(a, b).unwrap(),
                    t.route_latency_by_name(b, a).unwrap(),
                );
            }
        }
    }

    #[test]
    fn cross_road_route_goes_through_proxy() {
        let t = paper_default(4);
        // camera-0 -> led-green-1: 50 + 100 up, then 100 + 50 down
        assert_eq!(
            t.route_latency_by_name("camera-0", "led-green-1").unwrap(),
            SimDuration::from_millis(300)
        );
        let route = t.route(
            t.lookup("camera-0").unwrap(),
            t.lookup("led-green-1").unwrap(),
        );
        assert_eq!(route.len(), 4);
        assert!(route[0].up && route[1].up && !route[2].up && !route[3].up);
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let cfg = ScenarioConfig::default();
        let inputs = cfg.topology_inputs();
        let mut devices = alloc::vec![
            Device {
                name: String::from("cloud"),
                kind: DeviceKind::Cloud,
                spec: Some(inputs.cloud.clone()),
                parent: None,
            },
            Device {
                name: String::from("proxy"),
                kind: DeviceKind::Proxy,
                spec: Some(inputs.proxy.clone()),
                parent: Some((DeviceId(0), SimDuration::from_millis(200))),
            },
        ];
        devices.push(Device {
            name: String::from("proxy"),
            kind: DeviceKind::Fog { road: RoadId(0) },
            spec: Some(inputs.fog.clone()),
            parent: Some((DeviceId(1), SimDuration::from_millis(100))),
        });
        assert!(matches!(
            Topology::from_devices(devices),
            Err(TopologyError::DuplicateName(_))
        ));
    }

    #[test]
    fn parent_cycle_is_rejected() {
        let cfg = ScenarioConfig::default();
        let inputs = cfg.topology_inputs();
        let devices = alloc::vec![
            Device {
                name: String::from("cloud"),
                kind: DeviceKind::Cloud,
                spec: Some(inputs.cloud.clone()),
                parent: None,
            },
            Device {
                name: String::from("proxy"),
                kind: DeviceKind::Proxy,
                spec: Some(inputs.proxy.clone()),
                parent: Some((DeviceId(2), SimDuration::from_millis(1))),
            },
            Device {
                name: String::from("fog-0"),
                kind: DeviceKind::Fog { road: RoadId(0) },
                spec: Some(inputs.fog.clone()),
                parent: Some((DeviceId(1), SimDuration::from_millis(1))),
            },
        ];
        assert!(matches!(
            Topology::from_devices(devices),
            Err(TopologyError::NotATree(_))
        ));
    }

    #[test]
    fn fog_without_camera_is_rejected() {
        let cfg = ScenarioConfig::default();
        let inputs = cfg.topology_inputs();
        let mut devices = alloc::vec![
            Device {
                name: String::from("cloud"),
                kind: DeviceKind::Cloud,
                spec: Some(inputs.cloud.clone()),
                parent: None,
            },
            Device {
                name: String::from("proxy"),
                kind: DeviceKind::Proxy,
                spec: Some(inputs.proxy.clone()),
                parent: Some((DeviceId(0), SimDuration::from_millis(200))),
            },
            Device {
                name: String::from("fog-0"),
                kind: DeviceKind::Fog { road: RoadId(0) },
                spec: Some(inputs.fog.clone()),
                parent: Some((DeviceId(1), SimDuration::from_millis(100))),
            },
        ];
        for color in LedColor::ALL {
            devices.push(Device {
                name: format!("led-{}-0", color.as_str()),
                kind: DeviceKind::Led {
                    road: RoadId(0),
                    color,
                },
                spec: None,
                parent: Some((DeviceId(2), SimDuration::from_millis(50))),
            });
        }
        assert!(matches!(
            Topology::from_devices(devices),
            Err(TopologyError::BadFogChildren {
                cameras: 0,
                leds: 3,
                ..
            })
        ));
    }

    #[test]
    fn invalid_spec_is_rejected() {
        let cfg = ScenarioConfig::default();
        let mut inputs = cfg.topology_inputs();
        inputs.fog.mips = 0;
        assert!(matches!(
            Topology::build(&inputs),
            Err(TopologyError::InvalidSpec { .. })
        ));
    }
}
