//! The bus-network data model: a directed graph that allows several parallel
//! edges between two stops (one per bus line), with per-stop arrival
//! schedules and per-edge average ride times.
//!
//! Vertices and buses are interned to dense indices. `build()` canonicalizes
//! the graph: vertices are ranked by ascending external id and buses by
//! ascending name, so two graphs with the same content compare equal and all
//! index-based tie-breaks are reproducible.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean Earth radius in meters, used by the great-circle distance.
const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Seconds since service-day midnight. May exceed 86400 for post-midnight
/// trips on the same service day.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Timestamp(pub u32);

/// A non-negative span of whole seconds (ride times, waits, costs, bounds).
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct DurationSecs(pub u32);

impl Timestamp {
    pub fn seconds(self) -> u32 {
        self.0
    }

    /// Parses `HH:MM`, `HH:MM:SS` (hours may exceed 24) or a raw second count.
    pub fn parse(s: &str) -> Result<Timestamp> {
        let s = s.trim();
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            if parts.len() != 2 && parts.len() != 3 {
                return Err(Error::InvalidQuery(format!("unparsable time: {s:?}")));
            }
            let mut nums = [0u32; 3];
            for (i, p) in parts.iter().enumerate() {
                nums[i] = p
                    .parse()
                    .map_err(|_| Error::InvalidQuery(format!("unparsable time: {s:?}")))?;
            }
            if nums[1] >= 60 || (parts.len() == 3 && nums[2] >= 60) {
                return Err(Error::InvalidQuery(format!("unparsable time: {s:?}")));
            }
            Ok(Timestamp(nums[0] * 3600 + nums[1] * 60 + nums[2]))
        } else {
            s.parse()
                .map(Timestamp)
                .map_err(|_| Error::InvalidQuery(format!("unparsable time: {s:?}")))
        }
    }

    pub fn clock(self) -> String {
        format!(
            "{:02}:{:02}:{:02}",
            self.0 / 3600,
            self.0 / 60 % 60,
            self.0 % 60
        )
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.clock())
    }
}

impl std::ops::Add<DurationSecs> for Timestamp {
    type Output = Timestamp;
    fn add(self, rhs: DurationSecs) -> Timestamp {
        Timestamp(self.0 + rhs.0)
    }
}

impl std::ops::Sub<Timestamp> for Timestamp {
    type Output = DurationSecs;
    fn sub(self, rhs: Timestamp) -> DurationSecs {
        debug_assert!(self.0 >= rhs.0);
        DurationSecs(self.0 - rhs.0)
    }
}

impl std::ops::Add for DurationSecs {
    type Output = DurationSecs;
    fn add(self, rhs: DurationSecs) -> DurationSecs {
        DurationSecs(self.0 + rhs.0)
    }
}

impl std::ops::AddAssign for DurationSecs {
    fn add_assign(&mut self, rhs: DurationSecs) {
        self.0 += rhs.0;
    }
}

impl std::iter::Sum for DurationSecs {
    fn sum<I: Iterator<Item = DurationSecs>>(iter: I) -> DurationSecs {
        DurationSecs(iter.map(|d| d.0).sum())
    }
}

impl fmt::Display for DurationSecs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}s", self.0)
    }
}

/// Dense vertex index, assigned in ascending external-id order.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Dense bus-line index, assigned in ascending bus-name order.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct BusId(pub u32);

impl BusId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A bus stop with its geographic position and per-bus arrival schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    pub name: String,
    pub lat: f64,
    pub lon: f64,
    /// Bus line -> strictly increasing arrival timestamps at this stop.
    pub schedule: BTreeMap<BusId, Vec<Timestamp>>,
}

/// One directed bus connection between adjacent stops. Parallel edges with
/// different buses may exist; (from, to, bus) is unique.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: VertexId,
    pub to: VertexId,
    pub bus: BusId,
    pub ride: DurationSecs,
}

/// A graph invariant violation reported by [`DmeGraph::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    ScheduleNotIncreasing { vertex: String, bus: String },
    DanglingEdgeEndpoint { from: u32, to: u32, bus: u32 },
    NonPositiveRide { from: String, to: String, bus: String },
    InadmissibleEdgeSpeed { from: String, to: String, bus: String, speed: f64, v_max: f64 },
    CoordinateOutOfRange { vertex: String, lat: f64, lon: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ScheduleNotIncreasing { vertex, bus } => {
                write!(f, "schedule not strictly increasing at {vertex} for bus {bus}")
            }
            Violation::DanglingEdgeEndpoint { from, to, bus } => {
                write!(f, "edge ({from},{to},{bus}) references a missing vertex")
            }
            Violation::NonPositiveRide { from, to, bus } => {
                write!(f, "edge {from}->{to} (bus {bus}) has non-positive ride time")
            }
            Violation::InadmissibleEdgeSpeed { from, to, bus, speed, v_max } => {
                write!(
                    f,
                    "inadmissible heuristic: edge {from}->{to} (bus {bus}) implies speed \
                     {speed:.2} m/s above v_max {v_max:.2} m/s"
                )
            }
            Violation::CoordinateOutOfRange { vertex, lat, lon } => {
                write!(f, "vertex {vertex} has out-of-range coordinates ({lat}, {lon})")
            }
        }
    }
}

/// Directed multi-edge timetable graph. Immutable after construction; safe to
/// share across concurrent searches.
#[derive(Debug, Clone, PartialEq)]
pub struct DmeGraph {
    vertices: Vec<Vertex>,
    out: Vec<Vec<Edge>>,
    bus_names: Vec<String>,
    v_max: f64,
    id_index: HashMap<String, VertexId>,
    bus_index: HashMap<String, BusId>,
}

impl DmeGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn schedule_entry_count(&self) -> usize {
        self.vertices
            .iter()
            .map(|v| v.schedule.values().map(Vec::len).sum::<usize>())
            .sum()
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    /// Overrides the calibrated maximum speed. A value below the observed
    /// maximum edge speed makes the heuristic inadmissible; `validate` flags it.
    pub fn set_v_max(&mut self, v_max: f64) {
        self.v_max = v_max;
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v.index()]
    }

    pub fn vertices(&self) -> impl Iterator<Item = (VertexId, &Vertex)> {
        self.vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (VertexId(i as u32), v))
    }

    pub fn edges_from(&self, v: VertexId) -> &[Edge] {
        &self.out[v.index()]
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.out.iter().flatten()
    }

    /// The unique edge (from, to, bus), if present.
    pub fn edge(&self, from: VertexId, to: VertexId, bus: BusId) -> Option<&Edge> {
        self.out[from.index()]
            .iter()
            .find(|e| e.to == to && e.bus == bus)
    }

    pub fn bus_name(&self, bus: BusId) -> &str {
        &self.bus_names[bus.index()]
    }

    pub fn bus_names(&self) -> &[String] {
        &self.bus_names
    }

    pub fn resolve(&self, external_id: &str) -> Result<VertexId> {
        self.id_index
            .get(external_id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(external_id.to_string()))
    }

    pub fn resolve_bus(&self, name: &str) -> Result<BusId> {
        self.bus_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownBus(name.to_string()))
    }

    /// Great-circle distance in meters between two stops.
    pub fn geo_distance(&self, a: VertexId, b: VertexId) -> f64 {
        let va = self.vertex(a);
        let vb = self.vertex(b);
        haversine_m(va.lat, va.lon, vb.lat, vb.lon)
    }

    /// Earliest departure of `bus` at `v` not before `t`. Boarding exactly at
    /// `t` is allowed. `None` when the bus has no remaining service at `v`.
    pub fn next_departure(&self, v: VertexId, bus: BusId, t: Timestamp) -> Option<Timestamp> {
        let times = self.vertex(v).schedule.get(&bus)?;
        let i = times.partition_point(|&s| s < t);
        times.get(i).copied()
    }

    /// Waiting time before boarding `bus` at `v` at time `t`. Zero when the
    /// rider is already aboard the same bus (`prev_bus == bus`).
    pub fn waiting_time(
        &self,
        v: VertexId,
        bus: BusId,
        t: Timestamp,
        prev_bus: Option<BusId>,
    ) -> Option<DurationSecs> {
        if prev_bus == Some(bus) {
            return Some(DurationSecs(0));
        }
        self.next_departure(v, bus, t).map(|dep| dep - t)
    }

    /// Lower bound on the travel time between two stops: great-circle
    /// distance over the maximum bus speed, rounded down to whole seconds.
    pub fn exploration_cost(&self, a: VertexId, b: VertexId) -> DurationSecs {
        DurationSecs((self.geo_distance(a, b) / self.v_max).floor() as u32)
    }

    /// Checks every graph invariant and returns all violations found.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (id, v) in self.vertices.iter().enumerate() {
            if !(-90.0..=90.0).contains(&v.lat) || !(-180.0..=180.0).contains(&v.lon) {
                out.push(Violation::CoordinateOutOfRange {
                    vertex: v.id.clone(),
                    lat: v.lat,
                    lon: v.lon,
                });
            }
            for (&bus, times) in &v.schedule {
                if times.windows(2).any(|w| w[0] >= w[1]) {
                    out.push(Violation::ScheduleNotIncreasing {
                        vertex: v.id.clone(),
                        bus: self.bus_names.get(bus.index()).cloned().unwrap_or_else(|| bus.0.to_string()),
                    });
                }
            }
            let _ = id;
        }
        let n = self.vertices.len() as u32;
        let nb = self.bus_names.len() as u32;
        for e in self.edges() {
            if e.from.0 >= n || e.to.0 >= n || e.bus.0 >= nb {
                out.push(Violation::DanglingEdgeEndpoint {
                    from: e.from.0,
                    to: e.to.0,
                    bus: e.bus.0,
                });
                continue;
            }
            let from = &self.vertices[e.from.index()].id;
            let to = &self.vertices[e.to.index()].id;
            let bus = &self.bus_names[e.bus.index()];
            if e.ride.0 == 0 {
                out.push(Violation::NonPositiveRide {
                    from: from.clone(),
                    to: to.clone(),
                    bus: bus.clone(),
                });
                continue;
            }
            let speed = self.geo_distance(e.from, e.to) / e.ride.0 as f64;
            if speed > self.v_max {
                out.push(Violation::InadmissibleEdgeSpeed {
                    from: from.clone(),
                    to: to.clone(),
                    bus: bus.clone(),
                    speed,
                    v_max: self.v_max,
                });
            }
        }
        out
    }

    /// Fastest observed edge speed in m/s; the default v_max calibration.
    pub fn max_edge_speed(&self) -> Option<f64> {
        self.edges()
            .filter(|e| e.ride.0 > 0)
            .map(|e| self.geo_distance(e.from, e.to) / e.ride.0 as f64)
            .fold(None, |acc, s| Some(acc.map_or(s, |a: f64| a.max(s))))
    }

    pub(crate) fn from_parts(
        vertices: Vec<Vertex>,
        out: Vec<Vec<Edge>>,
        bus_names: Vec<String>,
        v_max: f64,
    ) -> DmeGraph {
        let id_index = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id.clone(), VertexId(i as u32)))
            .collect();
        let bus_index = bus_names
            .iter()
            .enumerate()
            .map(|(i, b)| (b.clone(), BusId(i as u32)))
            .collect();
        DmeGraph { vertices, out, bus_names, v_max, id_index, bus_index }
    }
}

pub fn haversine_m(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
    let dp = (lat2 - lat1).to_radians();
    let dl = (lon2 - lon1).to_radians();
    let a = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * a.sqrt().atan2((1.0 - a).sqrt())
}

/// Accumulates vertices, schedules and edges, then produces a canonical
/// [`DmeGraph`]: vertices ranked by external id, buses by name, schedules
/// sorted and deduplicated, edges sorted by (to, bus).
#[derive(Debug, Default)]
pub struct GraphBuilder {
    vertices: Vec<(String, String, f64, f64)>,
    vertex_index: HashMap<String, usize>,
    buses: Vec<String>,
    bus_index: HashMap<String, usize>,
    // (vertex temp idx, bus temp idx) -> timestamps
    schedules: HashMap<(usize, usize), Vec<Timestamp>>,
    // (from, to, bus) temp indices -> ride
    edges: HashMap<(usize, usize, usize), DurationSecs>,
    v_max_override: Option<f64>,
}

impl GraphBuilder {
    pub fn new() -> GraphBuilder {
        GraphBuilder::default()
    }

    pub fn add_vertex(&mut self, id: &str, name: &str, lat: f64, lon: f64) -> usize {
        if let Some(&i) = self.vertex_index.get(id) {
            return i;
        }
        let i = self.vertices.len();
        self.vertices.push((id.to_string(), name.to_string(), lat, lon));
        self.vertex_index.insert(id.to_string(), i);
        i
    }

    pub fn bus(&mut self, name: &str) -> usize {
        if let Some(&i) = self.bus_index.get(name) {
            return i;
        }
        let i = self.buses.len();
        self.buses.push(name.to_string());
        self.bus_index.insert(name.to_string(), i);
        i
    }

    pub fn add_schedule_entry(&mut self, vertex: usize, bus: usize, t: Timestamp) {
        self.schedules.entry((vertex, bus)).or_default().push(t);
    }

    /// Registers the edge (from, to, bus). Repeated calls overwrite the ride
    /// time; (from, to, bus) stays unique.
    pub fn add_edge(&mut self, from: usize, to: usize, bus: usize, ride: DurationSecs) {
        self.edges.insert((from, to, bus), ride);
    }

    pub fn override_v_max(&mut self, v_max: f64) {
        self.v_max_override = Some(v_max);
    }

    pub fn build(self) -> DmeGraph {
        // Canonical ranks: vertices by external id, buses by name.
        let mut vorder: Vec<usize> = (0..self.vertices.len()).collect();
        vorder.sort_by(|&a, &b| self.vertices[a].0.cmp(&self.vertices[b].0));
        let mut vrank = vec![0u32; self.vertices.len()];
        for (rank, &old) in vorder.iter().enumerate() {
            vrank[old] = rank as u32;
        }
        let mut border: Vec<usize> = (0..self.buses.len()).collect();
        border.sort_by(|&a, &b| self.buses[a].cmp(&self.buses[b]));
        let mut brank = vec![0u32; self.buses.len()];
        for (rank, &old) in border.iter().enumerate() {
            brank[old] = rank as u32;
        }

        let mut vertices: Vec<Vertex> = vorder
            .iter()
            .map(|&old| {
                let (id, name, lat, lon) = self.vertices[old].clone();
                Vertex { id, name, lat, lon, schedule: BTreeMap::new() }
            })
            .collect();
        for ((v, b), mut times) in self.schedules {
            times.sort_unstable();
            times.dedup();
            vertices[vrank[v] as usize]
                .schedule
                .insert(BusId(brank[b]), times);
        }

        let mut out: Vec<Vec<Edge>> = vec![Vec::new(); vertices.len()];
        for ((from, to, bus), ride) in self.edges {
            let e = Edge {
                from: VertexId(vrank[from]),
                to: VertexId(vrank[to]),
                bus: BusId(brank[bus]),
                ride,
            };
            out[e.from.index()].push(e);
        }
        for edges in &mut out {
            edges.sort_by_key(|e| (e.to, e.bus));
        }

        let bus_names: Vec<String> = border.iter().map(|&i| self.buses[i].clone()).collect();
        let mut g = DmeGraph::from_parts(vertices, out, bus_names, 1.0);
        g.v_max = self
            .v_max_override
            .or_else(|| g.max_edge_speed())
            .unwrap_or(10.0);
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn next_departure_fixture_values() {
        let g = fixtures::example_network();
        let v1 = g.resolve("v1").unwrap();
        let b1 = g.resolve_bus("bus1").unwrap();
        let b2 = g.resolve_bus("bus2").unwrap();
        let t = Timestamp::parse("08:00:00").unwrap();
        // boarding exactly at t -> wait 0
        assert_eq!(g.next_departure(v1, b1, t), Some(t));
        assert_eq!(
            g.next_departure(v1, b2, t),
            Some(Timestamp::parse("08:05:00").unwrap())
        );
        // schedule exhausted
        assert_eq!(g.next_departure(v1, b1, Timestamp::parse("23:59:59").unwrap()), None);
    }

    #[test]
    fn waiting_time_same_bus_is_zero() {
        let g = fixtures::example_network();
        let v2 = g.resolve("v2").unwrap();
        let b1 = g.resolve_bus("bus1").unwrap();
        let arrive = Timestamp::parse("08:03:00").unwrap();
        assert_eq!(g.waiting_time(v2, b1, arrive, Some(b1)), Some(DurationSecs(0)));

        let v1 = g.resolve("v1").unwrap();
        let b2 = g.resolve_bus("bus2").unwrap();
        let t = Timestamp::parse("08:00:00").unwrap();
        assert_eq!(g.waiting_time(v1, b2, t, None), Some(DurationSecs(300)));
        // no service remains
        let late = Timestamp::parse("23:00:00").unwrap();
        assert_eq!(g.waiting_time(v1, b2, late, Some(b1)), None);
    }

    #[test]
    fn exploration_cost_fixture_values() {
        let g = fixtures::example_network();
        let v3 = g.resolve("v3").unwrap();
        let v5 = g.resolve("v5").unwrap();
        assert_eq!(g.exploration_cost(v3, v5), DurationSecs(80));
        assert_eq!(g.exploration_cost(v5, v5), DurationSecs(0));
        let v2 = g.resolve("v2").unwrap();
        assert_eq!(g.exploration_cost(v2, v5), DurationSecs(320));
    }

    #[test]
    fn exploration_cost_is_symmetric() {
        let g = fixtures::example_network();
        for (a, _) in g.vertices() {
            for (b, _) in g.vertices() {
                assert_eq!(g.exploration_cost(a, b), g.exploration_cost(b, a));
            }
        }
    }

    #[test]
    fn validate_clean_fixture() {
        assert!(fixtures::example_network().validate().is_empty());
    }

    #[test]
    fn validate_flags_unsorted_schedule() {
        let mut g = fixtures::example_network();
        let v1 = g.resolve("v1").unwrap();
        let b1 = g.resolve_bus("bus1").unwrap();
        let times = g.vertices[v1.index()].schedule.get_mut(&b1).unwrap();
        times.reverse();
        let violations = g.validate();
        assert_eq!(violations.len(), 1);
        assert!(matches!(violations[0], Violation::ScheduleNotIncreasing { .. }));
    }

    #[test]
    fn validate_flags_inadmissible_v_max() {
        let mut g = fixtures::example_network();
        g.set_v_max(g.max_edge_speed().unwrap() * 0.5);
        assert!(g
            .validate()
            .iter()
            .any(|v| matches!(v, Violation::InadmissibleEdgeSpeed { .. })));
    }

    #[test]
    fn timestamp_parsing() {
        assert_eq!(Timestamp::parse("08:00").unwrap(), Timestamp(28800));
        assert_eq!(Timestamp::parse("08:00:30").unwrap(), Timestamp(28830));
        assert_eq!(Timestamp::parse("25:10:00").unwrap(), Timestamp(90600));
        assert_eq!(Timestamp::parse("28830").unwrap(), Timestamp(28830));
        assert!(Timestamp::parse("8:61").is_err());
        assert!(Timestamp::parse("abc").is_err());
        assert_eq!(Timestamp(28830).clock(), "08:00:30");
    }
}
