//! A small hand-built 5-stop network used throughout the test suite and as a
//! worked example for the CLI.
//!
//! The network is a reconstruction: stops sit on one meridian so great-circle
//! distances are exact meter offsets, and schedules are chosen so that, for a
//! departure from `v1` at 08:00:
//!
//! * `v2` is reached via bus1 at cost 180 (no wait),
//! * `v3` via bus2 at cost 360 (300 wait + 60 ride),
//! * `v4` via bus1 at cost 420 (staying aboard, no transfer wait),
//! * `v5` via `v3` on bus2 at cost 480, with a costlier 660 alternative on
//!   bus3 and a 540 alternative through `v4`,
//! * the heuristic values are h(3,5) = 80, h(2,5) = 320, h(1,5) = 140.

use crate::graph::{DmeGraph, DurationSecs, GraphBuilder, Timestamp};

/// Meters of latitude per degree along a meridian (R * pi / 180).
const M_PER_DEG: f64 = 6_371_000.0 * std::f64::consts::PI / 180.0;

const BASE_LAT: f64 = 40.7;
const LON: f64 = -73.9;

fn lat_at(meters_north: f64) -> f64 {
    BASE_LAT + meters_north / M_PER_DEG
}

/// The 5-stop example network.
pub fn example_network() -> DmeGraph {
    builder_with_core_network().build()
}

/// The example network plus a sixth stop `v6` reachable from `v5` on bus4,
/// used to exercise dwell-time clock advancement across legs.
pub fn example_network_extended() -> DmeGraph {
    let mut b = builder_with_core_network();
    let v5 = b.add_vertex("v5", "Stop 5", lat_at(0.0), LON);
    let v6 = b.add_vertex("v6", "Stop 6", lat_at(-500.0), LON);
    let bus4 = b.bus("bus4");
    b.add_edge(v5, v6, bus4, DurationSecs(120));
    // Departs v5 at 08:20:00; a rider arriving at 08:08 and dwelling 600 s
    // is ready at 08:18 and waits 120 s.
    b.add_schedule_entry(v5, bus4, Timestamp(30000));
    b.add_schedule_entry(v6, bus4, Timestamp(30120));
    b.build()
}

fn builder_with_core_network() -> GraphBuilder {
    let mut b = GraphBuilder::new();
    // Meter offsets north of v5 along one meridian.
    let v1 = b.add_vertex("v1", "Stop 1", lat_at(1407.0), LON);
    let v2 = b.add_vertex("v2", "Stop 2", lat_at(3206.0), LON);
    let v3 = b.add_vertex("v3", "Stop 3", lat_at(808.0), LON);
    let v4 = b.add_vertex("v4", "Stop 4", lat_at(1000.0), LON);
    let v5 = b.add_vertex("v5", "Stop 5", lat_at(0.0), LON);

    let bus1 = b.bus("bus1");
    let bus2 = b.bus("bus2");
    let bus3 = b.bus("bus3");

    b.add_edge(v1, v2, bus1, DurationSecs(180));
    b.add_edge(v1, v3, bus2, DurationSecs(60));
    b.add_edge(v2, v4, bus1, DurationSecs(240));
    b.add_edge(v3, v5, bus2, DurationSecs(120));
    b.add_edge(v3, v5, bus3, DurationSecs(100));
    b.add_edge(v4, v5, bus1, DurationSecs(120));

    // bus1: v1 08:00 -> v2 08:03 -> v4 08:07 -> v5 08:09, and a later trip.
    b.add_schedule_entry(v1, bus1, Timestamp(28800));
    b.add_schedule_entry(v1, bus1, Timestamp(30600));
    b.add_schedule_entry(v2, bus1, Timestamp(28980));
    b.add_schedule_entry(v2, bus1, Timestamp(30780));
    b.add_schedule_entry(v4, bus1, Timestamp(29220));
    b.add_schedule_entry(v4, bus1, Timestamp(31020));
    b.add_schedule_entry(v5, bus1, Timestamp(29340));

    // bus2: v1 08:05 -> v3 08:06 -> v5 08:08, and a later trip.
    b.add_schedule_entry(v1, bus2, Timestamp(29100));
    b.add_schedule_entry(v1, bus2, Timestamp(30900));
    b.add_schedule_entry(v3, bus2, Timestamp(29160));
    b.add_schedule_entry(v3, bus2, Timestamp(30960));
    b.add_schedule_entry(v5, bus2, Timestamp(29280));

    // bus3: v3 08:09:20 -> v5 08:11:00, and a later trip.
    b.add_schedule_entry(v3, bus3, Timestamp(29360));
    b.add_schedule_entry(v3, bus3, Timestamp(31160));
    b.add_schedule_entry(v5, bus3, Timestamp(29460));

    b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_is_well_formed() {
        let g = example_network();
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.edge_count(), 6);
        assert!(g.validate().is_empty());
        // v_max comes from the fastest edge, v1 -> v2 (1799 m in 180 s).
        assert!((g.v_max() - 1799.0 / 180.0).abs() < 0.01);
    }

    #[test]
    fn extended_fixture_is_well_formed() {
        let g = example_network_extended();
        assert_eq!(g.vertex_count(), 6);
        assert!(g.validate().is_empty());
    }
}
