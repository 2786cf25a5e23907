//! Time-dependent routing on bus networks.
//!
//! The network is a directed multi-edge graph: stops carry per-bus arrival
//! schedules, edges carry average ride times, and several buses may connect
//! the same pair of stops. On top of it sit an exact origin-destination
//! search (Dijkstra-style and A* with a great-circle lower bound) and a
//! multi-POI planner that orders an unordered POI set for minimum total
//! travel time: riding plus schedule-dependent waiting plus per-POI dwell.

pub mod bench;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod ingest;
pub mod planner;
pub mod report;
pub mod search;

pub use error::{Error, Result};
pub use graph::{BusId, DmeGraph, DurationSecs, Edge, Timestamp, Vertex, VertexId};
