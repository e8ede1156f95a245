//! Road region, vehicle and RSU populations, mobility and neighbourhood queries.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VehicleId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RsuId(pub u32);

impl fmt::Display for VehicleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for RsuId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

impl VehicleId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A position in metres or a velocity in m/s.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// Euclidean distance in metres.
pub fn distance(a: Vec2, b: Vec2) -> f64 {
    (a - b).norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoadRegion {
    pub length_m: f64,
    pub width_m: f64,
}

impl RoadRegion {
    pub fn new(length_m: f64, width_m: f64) -> Result<Self> {
        if !(length_m > 0.0 && width_m > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "road region must have positive extent, got {length_m} x {width_m}"
            )));
        }
        Ok(Self { length_m, width_m })
    }

    pub fn area(&self) -> f64 {
        self.length_m * self.width_m
    }

    pub fn contains(&self, p: Vec2) -> bool {
        (0.0..=self.length_m).contains(&p.x) && (0.0..=self.width_m).contains(&p.y)
    }

    /// Area of the disc of `radius` around `centre` that lies inside the region.
    pub fn disc_overlap(&self, centre: Vec2, radius: f64) -> f64 {
        // Midpoint quadrature over x of the clipped vertical chord.
        const STEPS: usize = 256;
        let x0 = (centre.x - radius).max(0.0);
        let x1 = (centre.x + radius).min(self.length_m);
        if x1 <= x0 {
            return 0.0;
        }
        let h = (x1 - x0) / STEPS as f64;
        (0..STEPS)
            .map(|i| {
                let x = x0 + (i as f64 + 0.5) * h;
                let dx = x - centre.x;
                let half = (radius * radius - dx * dx).max(0.0).sqrt();
                let lo = (centre.y - half).max(0.0);
                let hi = (centre.y + half).min(self.width_m);
                (hi - lo).max(0.0) * h
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub id: VehicleId,
    pub position: Vec2,
    pub velocity: Vec2,
    /// Queue length in packets; fractional after decay.
    pub queue_len: f64,
    pub buffer_cap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RsuState {
    pub id: RsuId,
    pub position: Vec2,
    pub coverage_m: f64,
    pub in_degree: u32,
}

/// Generation parameters for a topology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TopologyParams {
    pub road_length_m: f64,
    pub road_width_m: f64,
    pub v2v_radius_m: f64,
    pub rsu_coverage_m: f64,
    pub speed_min_mps: f64,
    pub speed_max_mps: f64,
    pub heading_max_rad: f64,
    pub buffer_cap: f64,
}

impl Default for TopologyParams {
    fn default() -> Self {
        Self {
            road_length_m: 20_000.0,
            road_width_m: 200.0,
            v2v_radius_m: 300.0,
            rsu_coverage_m: 500.0,
            speed_min_mps: 15.0,
            speed_max_mps: 30.0,
            heading_max_rad: 0.05,
            buffer_cap: 20.0,
        }
    }
}

impl TopologyParams {
    pub fn region(&self) -> Result<RoadRegion> {
        RoadRegion::new(self.road_length_m, self.road_width_m)
    }

    pub fn validate(&self) -> Result<()> {
        self.region()?;
        if !(self.v2v_radius_m > 0.0) {
            return Err(Error::InvalidConfig("v2v_radius_m must be > 0".into()));
        }
        if !(self.rsu_coverage_m > self.v2v_radius_m) {
            return Err(Error::InvalidConfig(
                "rsu_coverage_m must exceed v2v_radius_m".into(),
            ));
        }
        if !(self.speed_min_mps >= 0.0 && self.speed_max_mps >= self.speed_min_mps) {
            return Err(Error::InvalidConfig(
                "speed range must satisfy 0 <= speed_min_mps <= speed_max_mps".into(),
            ));
        }
        if !(self.heading_max_rad >= 0.0) {
            return Err(Error::InvalidConfig("heading_max_rad must be >= 0".into()));
        }
        if !(self.buffer_cap > 0.0) {
            return Err(Error::InvalidConfig("buffer_cap must be > 0".into()));
        }
        Ok(())
    }
}

/// Number of RSUs deployed for `n_vehicles` vehicles.
pub fn rsu_count(n_vehicles: usize) -> usize {
    (n_vehicles / 200).max(5)
}

/// Immutable snapshot of the network. Vehicle `i` always has id `VehicleId(i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub region: RoadRegion,
    pub vehicles: Vec<VehicleState>,
    pub rsus: Vec<RsuState>,
    pub v2v_radius_m: f64,
}

impl Topology {
    /// Uniform placement with RSUs spaced equally along the centreline.
    pub fn generate(n_vehicles: usize, params: &TopologyParams, seed: u64) -> Result<Self> {
        if n_vehicles < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least 2 vehicles, got {n_vehicles}"
            )));
        }
        params.validate()?;
        let region = params.region()?;
        let mut rng = rng::stream(seed, Stream::Placement, &[n_vehicles as u64]);

        let vehicles = (0..n_vehicles)
            .map(|i| {
                let x = rng.random_range(0.0..=region.length_m);
                let y = rng.random_range(0.0..=region.width_m);
                let speed = rng.random_range(params.speed_min_mps..=params.speed_max_mps);
                let heading = rng.random_range(-params.heading_max_rad..=params.heading_max_rad);
                VehicleState {
                    id: VehicleId(i as u32),
                    position: Vec2::new(x, y),
                    velocity: Vec2::new(speed * heading.cos(), speed * heading.sin()),
                    queue_len: 0.0,
                    buffer_cap: params.buffer_cap,
                }
            })
            .collect();

        let m = rsu_count(n_vehicles);
        let spacing = region.length_m / m as f64;
        let rsus = (0..m)
            .map(|k| RsuState {
                id: RsuId(k as u32),
                position: Vec2::new((k as f64 + 0.5) * spacing, region.width_m / 2.0),
                coverage_m: params.rsu_coverage_m,
                in_degree: 0,
            })
            .collect();

        Ok(Self {
            region,
            vehicles,
            rsus,
            v2v_radius_m: params.v2v_radius_m,
        })
    }

    /// Hand-built topology; ids are reassigned to match positions in the vectors.
    pub fn from_parts(
        region: RoadRegion,
        mut vehicles: Vec<VehicleState>,
        mut rsus: Vec<RsuState>,
        v2v_radius_m: f64,
    ) -> Self {
        for (i, v) in vehicles.iter_mut().enumerate() {
            v.id = VehicleId(i as u32);
        }
        for (i, r) in rsus.iter_mut().enumerate() {
            r.id = RsuId(i as u32);
        }
        Self {
            region,
            vehicles,
            rsus,
            v2v_radius_m,
        }
    }

    pub fn n_vehicles(&self) -> usize {
        self.vehicles.len()
    }

    pub fn vehicle(&self, id: VehicleId) -> Result<&VehicleState> {
        self.vehicles
            .get(id.index())
            .ok_or(Error::UnknownVehicle(id))
    }

    pub fn vehicle_mut(&mut self, id: VehicleId) -> Result<&mut VehicleState> {
        self.vehicles
            .get_mut(id.index())
            .ok_or(Error::UnknownVehicle(id))
    }

    pub fn rsu(&self, id: RsuId) -> Result<&RsuState> {
        self.rsus.get(id.0 as usize).ok_or(Error::UnknownRsu(id))
    }

    pub fn position(&self, id: VehicleId) -> Result<Vec2> {
        self.vehicle(id).map(|v| v.position)
    }

    pub fn vehicle_distance(&self, a: VehicleId, b: VehicleId) -> Result<f64> {
        Ok(distance(self.position(a)?, self.position(b)?))
    }

    /// Advances every vehicle by `dt` seconds, wrapping in x and reflecting in y.
    pub fn step_mobility(&mut self, dt: f64) {
        let len = self.region.length_m;
        let width = self.region.width_m;
        for v in &mut self.vehicles {
            let mut x = v.position.x + v.velocity.x * dt;
            let mut y = v.position.y + v.velocity.y * dt;
            x = x.rem_euclid(len);
            while !(0.0..=width).contains(&y) {
                if y < 0.0 {
                    y = -y;
                } else {
                    y = 2.0 * width - y;
                }
                v.velocity.y = -v.velocity.y;
            }
            v.position = Vec2::new(x, y);
        }
    }

    /// Vehicles within `v2v_radius_m` of `v`, sorted by id.
    pub fn v2v_neighbors(&self, v: VehicleId) -> Result<Vec<VehicleId>> {
        let p = self.position(v)?;
        let r = self.v2v_radius_m;
        Ok(self
            .vehicles
            .iter()
            .filter(|w| w.id != v && distance(p, w.position) <= r)
            .map(|w| w.id)
            .collect())
    }

    /// RSUs whose coverage contains `v`, sorted by id.
    pub fn reachable_rsus(&self, v: VehicleId) -> Result<Vec<RsuId>> {
        let p = self.position(v)?;
        Ok(self
            .rsus
            .iter()
            .filter(|r| distance(p, r.position) <= r.coverage_m)
            .map(|r| r.id)
            .collect())
    }

    pub fn in_rsu_coverage(&self, p: Vec2, rsu: RsuId) -> Result<bool> {
        let r = self.rsu(rsu)?;
        Ok(distance(p, r.position) <= r.coverage_m)
    }

    pub fn reset_in_degrees(&mut self) {
        for r in &mut self.rsus {
            r.in_degree = 0;
        }
    }
}
