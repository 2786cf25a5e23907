//! Randomized invariants: time parsing, schedule lookup monotonicity,
//! heuristic geometry, and persistence round trips.

use proptest::prelude::*;

use busnet::graph::{DmeGraph, DurationSecs, GraphBuilder, Timestamp};
use busnet::ingest::{load_graph, save_graph};

/// Strategy for a small well-formed graph: a handful of stops, buses with
/// strictly increasing schedules, and random edges between distinct stops.
fn arb_graph() -> impl Strategy<Value = DmeGraph> {
    let vertex = (40.0f64..41.0, -74.0f64..-73.0);
    let schedule = prop::collection::vec(1u32..600, 0..6);
    (
        prop::collection::vec(vertex, 2..8),
        prop::collection::vec(schedule, 2..24),
        prop::collection::vec((0usize..8, 0usize..8, 0usize..3, 30u32..600), 0..12),
    )
        .prop_map(|(stops, schedules, edge_specs)| {
            let mut b = GraphBuilder::new();
            for (i, &(lat, lon)) in stops.iter().enumerate() {
                b.add_vertex(&format!("p{i}"), "", lat, lon);
            }
            for bus in 0..3 {
                b.bus(&format!("line{bus}"));
            }
            for (i, increments) in schedules.iter().enumerate() {
                let (v, bus) = (i % stops.len(), i % 3);
                let mut t = 6 * 3600 + (i as u32 * 97) % 1800;
                for &inc in increments {
                    t += inc;
                    b.add_schedule_entry(v, bus, Timestamp(t));
                }
            }
            for &(from, to, bus, ride) in &edge_specs {
                let (from, to) = (from % stops.len(), to % stops.len());
                if from != to {
                    b.add_edge(from, to, bus, DurationSecs(ride));
                }
            }
            // A generous cap keeps every edge admissible regardless of the
            // random geometry.
            b.override_v_max(1.0e7);
            b.build()
        })
}

proptest! {
    #[test]
    fn clock_string_round_trips(secs in 0u32..360_000) {
        let t = Timestamp(secs);
        prop_assert_eq!(Timestamp::parse(&t.clock()).unwrap(), t);
        prop_assert_eq!(Timestamp::parse(&secs.to_string()).unwrap(), t);
    }

    #[test]
    fn next_departure_is_monotonic(g in arb_graph(), t1 in 0u32..90_000, dt in 0u32..3_600) {
        let (t1, t2) = (Timestamp(t1), Timestamp(t1 + dt));
        for (v, _) in g.vertices() {
            for bus in g.vertex(v).schedule.keys() {
                let d1 = g.next_departure(v, *bus, t1);
                let d2 = g.next_departure(v, *bus, t2);
                match (d1, d2) {
                    // Asking later never finds an earlier departure, and
                    // never finds one where an earlier ask found none.
                    (Some(a), Some(b)) => prop_assert!(a <= b),
                    (None, Some(_)) => prop_assert!(false, "departure appeared later"),
                    _ => {}
                }
                if let Some(a) = d1 {
                    prop_assert!(a >= t1);
                }
            }
        }
    }

    #[test]
    fn exploration_cost_triangle_bound(g in arb_graph()) {
        // Flooring to whole seconds costs at most 1 s per hop.
        for (a, _) in g.vertices() {
            for (b, _) in g.vertices() {
                for (c, _) in g.vertices() {
                    let direct = g.exploration_cost(a, c);
                    let via = g.exploration_cost(a, b) + g.exploration_cost(b, c);
                    prop_assert!(direct <= via + DurationSecs(1));
                }
            }
        }
    }

    #[test]
    fn persistence_round_trips(g in arb_graph()) {
        let dir = tempfile::tempdir().unwrap();
        let bin = dir.path().join("g.dmeg");
        let json = dir.path().join("g.json");
        save_graph(&g, &bin).unwrap();
        save_graph(&g, &json).unwrap();
        prop_assert_eq!(&load_graph(&bin).unwrap(), &g);
        prop_assert_eq!(&load_graph(&json).unwrap(), &g);
    }

    #[test]
    fn validate_accepts_generated_graphs(g in arb_graph()) {
        prop_assert!(g.validate().is_empty());
    }
}
