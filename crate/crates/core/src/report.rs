//! JSON route documents for emitted plans: visiting order, per-leg steps
//! with their boarding schedule, and the wait/ride/dwell breakdown.

use std::collections::HashMap;

use serde_json::json;

use crate::graph::{DmeGraph, Timestamp};
use crate::planner::{PlanMode, PlanResult, PoiQuery};
use crate::search::replay_leg;

fn time_doc(t: Timestamp) -> serde_json::Value {
    json!({ "seconds": t.seconds(), "clock": t.clock() })
}

pub fn route_document(
    g: &DmeGraph,
    query: &PoiQuery,
    result: &PlanResult,
    mode: PlanMode,
) -> serde_json::Value {
    let best = &result.best;
    let order: Vec<&str> = best
        .sequence
        .order
        .iter()
        .map(|&v| g.vertex(v).id.as_str())
        .collect();
    let legs: Vec<serde_json::Value> = best
        .legs
        .iter()
        .map(|leg| {
            let steps: Vec<serde_json::Value> = replay_leg(g, leg)
                .into_iter()
                .map(|s| {
                    json!({
                        "board_stop": s.board_stop,
                        "alight_stop": s.alight_stop,
                        "bus": s.bus,
                        "scheduled_departure": {
                            "seconds": s.scheduled_departure_secs,
                            "clock": Timestamp(s.scheduled_departure_secs).clock(),
                        },
                        "wait_secs": s.wait_secs,
                        "ride_secs": s.ride_secs,
                    })
                })
                .collect();
            json!({
                "from": g.vertex(leg.origin).id,
                "to": g.vertex(leg.dest).id,
                "depart": time_doc(leg.depart),
                "arrival": time_doc(leg.arrival()),
                "cost_secs": leg.cost.0,
                "wait_secs": leg.wait_total.0,
                "ride_secs": leg.ride_total.0,
                "steps": steps,
            })
        })
        .collect();
    let wait: u32 = best.legs.iter().map(|l| l.wait_total.0).sum();
    let ride: u32 = best.legs.iter().map(|l| l.ride_total.0).sum();
    let dwell_total = best.total_cost.0 - wait - ride;
    let dwell: HashMap<&str, u32> = query
        .pois
        .iter()
        .map(|&p| (g.vertex(p).id.as_str(), query.dwell[&p].0))
        .collect();
    json!({
        "mode": mode.name(),
        "origin": g.vertex(query.origin).id,
        "depart": time_doc(query.depart),
        "visit_order": order,
        "legs": legs,
        "dwell_secs": dwell,
        "totals": {
            "cost_secs": best.total_cost.0,
            "wait_secs": wait,
            "ride_secs": ride,
            "dwell_secs": dwell_total,
        },
        "sequences": {
            "total": result.sequences_total,
            "evaluated": result.sequences_evaluated,
            "pruned": result.sequences_pruned,
        },
        "elapsed_ms": result.elapsed.as_secs_f64() * 1e3,
    })
}
