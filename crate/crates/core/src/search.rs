//! Exact time-dependent minimum-cost search between one origin-destination
//! pair: a Dijkstra-style label-setting search (`dsrs`) and an A* variant
//! (`astar`) ordered by cost plus the great-circle lower bound. Both share
//! one relaxation rule and one deterministic tie-break (smaller vertex index,
//! then smaller bus index among parallel edges).
//!
//! Labels are keyed per vertex: each vertex keeps the single best label,
//! including the incoming bus used for the zero-wait continuation rule. A
//! strict variant keyed by (vertex, incoming bus) exists as a comparison
//! oracle; see [`dsrs_strict_cost`].

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::graph::{BusId, DmeGraph, DurationSecs, Edge, Timestamp, VertexId};

/// Per-vertex search state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLabel {
    pub vertex: VertexId,
    /// Waiting plus riding time accumulated from the leg origin.
    pub cost: DurationSecs,
    /// Leg departure time plus `cost`.
    pub arrival: Timestamp,
    /// `cost` plus the exploration cost to the leg destination.
    pub estimated: DurationSecs,
    /// Predecessor (vertex, bus); absent exactly at the leg origin.
    pub pred: Option<(VertexId, BusId)>,
}

/// One boarding step of a reconstructed route: depart `vertex` on `edge`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Step {
    pub vertex: VertexId,
    pub edge: Edge,
}

/// A minimum-cost origin-destination route with its cost breakdown.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteLeg {
    pub origin: VertexId,
    pub dest: VertexId,
    pub depart: Timestamp,
    pub steps: Vec<Step>,
    pub cost: DurationSecs,
    pub wait_total: DurationSecs,
    pub ride_total: DurationSecs,
    /// Vertices dequeued before the search stopped (diagnostics).
    pub settled_count: usize,
}

impl RouteLeg {
    pub fn arrival(&self) -> Timestamp {
        self.depart + self.cost
    }
}

/// The destination could not be reached before the end of service.
#[derive(Debug, Clone)]
pub struct Unreachable {
    pub origin: VertexId,
    pub dest: VertexId,
    pub settled: Vec<VertexId>,
}

/// Settle-order diagnostics: (vertex, priority at dequeue). The priority is
/// the accumulated cost for `dsrs` and the estimated cost for `astar`.
#[derive(Debug, Clone, Default)]
pub struct SearchTrace {
    pub settle_order: Vec<(VertexId, DurationSecs)>,
}

pub type SearchResult = Result<RouteLeg, Unreachable>;

/// Applies one edge to a label: looks up the wait at the boarding vertex
/// (zero when continuing on the same bus) and adds the ride time. `None`
/// when the edge's bus has no remaining departure today.
pub fn relax(g: &DmeGraph, from_label: &SearchLabel, edge: &Edge) -> Option<(DurationSecs, Timestamp)> {
    debug_assert_eq!(edge.from, from_label.vertex);
    let prev_bus = from_label.pred.map(|(_, b)| b);
    let wait = g.waiting_time(edge.from, edge.bus, from_label.arrival, prev_bus)?;
    Some((
        from_label.cost + wait + edge.ride,
        from_label.arrival + wait + edge.ride,
    ))
}

/// Dijkstra-style search: settles vertices in ascending accumulated cost.
pub fn dsrs(g: &DmeGraph, origin: VertexId, dest: VertexId, depart: Timestamp) -> SearchResult {
    run(g, origin, dest, depart, Heuristic::None).0
}

/// A*: settles vertices in ascending cost + exploration-cost order. Returns
/// the same cost and steps as `dsrs` under the shared tie-breaks.
pub fn astar(g: &DmeGraph, origin: VertexId, dest: VertexId, depart: Timestamp) -> SearchResult {
    run(g, origin, dest, depart, Heuristic::GreatCircle).0
}

pub fn dsrs_traced(
    g: &DmeGraph,
    origin: VertexId,
    dest: VertexId,
    depart: Timestamp,
) -> (SearchResult, SearchTrace) {
    run(g, origin, dest, depart, Heuristic::None)
}

pub fn astar_traced(
    g: &DmeGraph,
    origin: VertexId,
    dest: VertexId,
    depart: Timestamp,
) -> (SearchResult, SearchTrace) {
    run(g, origin, dest, depart, Heuristic::GreatCircle)
}

/// All vertices reachable from `origin` when departing at `depart`.
pub fn reachable_from(g: &DmeGraph, origin: VertexId, depart: Timestamp) -> Vec<VertexId> {
    match run(g, origin, origin, depart, Heuristic::Exhaustive).0 {
        Ok(_) => unreachable!("exhaustive run never reconstructs"),
        Err(u) => u.settled,
    }
}

enum Heuristic {
    None,
    GreatCircle,
    /// No heuristic and no early exit; used to enumerate the reachable set.
    Exhaustive,
}

#[derive(Clone, Copy)]
struct State {
    cost: DurationSecs,
    arrival: Timestamp,
    pred: Option<(VertexId, BusId)>,
}

fn run(
    g: &DmeGraph,
    origin: VertexId,
    dest: VertexId,
    depart: Timestamp,
    heuristic: Heuristic,
) -> (SearchResult, SearchTrace) {
    let n = g.vertex_count();
    // The great-circle bound costs a haversine evaluation; cache it per
    // vertex since a vertex can be pushed several times.
    let mut h_cache: Vec<Option<DurationSecs>> = match heuristic {
        Heuristic::GreatCircle => vec![None; n],
        _ => Vec::new(),
    };
    let mut h = |v: VertexId| match heuristic {
        Heuristic::GreatCircle => *h_cache[v.index()]
            .get_or_insert_with(|| g.exploration_cost(v, dest)),
        _ => DurationSecs(0),
    };
    let early_exit = !matches!(heuristic, Heuristic::Exhaustive);

    let mut best: Vec<Option<State>> = vec![None; n];
    let mut settled = vec![false; n];
    let mut trace = SearchTrace::default();
    // Lazy-deletion priority queue; stale entries are skipped on dequeue.
    let mut queue: BinaryHeap<Reverse<(DurationSecs, VertexId)>> = BinaryHeap::new();

    best[origin.index()] = Some(State { cost: DurationSecs(0), arrival: depart, pred: None });
    queue.push(Reverse((h(origin), origin)));

    while let Some(Reverse((priority, v))) = queue.pop() {
        if settled[v.index()] {
            continue;
        }
        settled[v.index()] = true;
        trace.settle_order.push((v, priority));
        if early_exit && v == dest {
            break;
        }
        let state = best[v.index()].expect("queued vertex has a label");
        let label = SearchLabel {
            vertex: v,
            cost: state.cost,
            arrival: state.arrival,
            estimated: priority,
            pred: state.pred,
        };
        for edge in g.edges_from(v) {
            if settled[edge.to.index()] {
                continue;
            }
            let Some((cost, arrival)) = relax(g, &label, edge) else {
                continue;
            };
            let better = match &best[edge.to.index()] {
                Some(cur) => cost < cur.cost,
                None => true,
            };
            if better {
                best[edge.to.index()] =
                    Some(State { cost, arrival, pred: Some((v, edge.bus)) });
                queue.push(Reverse((cost + h(edge.to), edge.to)));
            }
        }
    }

    let settled_count = trace.settle_order.len();
    if !early_exit || !settled[dest.index()] {
        let settled_set = trace
            .settle_order
            .iter()
            .map(|&(v, _)| v)
            .collect();
        return (
            Err(Unreachable { origin, dest, settled: settled_set }),
            trace,
        );
    }

    // Backtrack predecessor pairs, then replay the steps to split the cost
    // into waiting and riding.
    let mut steps = Vec::new();
    let mut cur = dest;
    while let Some(state) = best[cur.index()] {
        let Some((pv, bus)) = state.pred else { break };
        let edge = *g
            .edge(pv, cur, bus)
            .expect("predecessor pair corresponds to an edge");
        steps.push(Step { vertex: pv, edge });
        cur = pv;
    }
    steps.reverse();

    let cost = best[dest.index()].unwrap().cost;
    let (wait_total, ride_total) = split_totals(g, depart, &steps);
    debug_assert_eq!(wait_total + ride_total, cost);
    (
        Ok(RouteLeg {
            origin,
            dest,
            depart,
            steps,
            cost,
            wait_total,
            ride_total,
            settled_count,
        }),
        trace,
    )
}

fn split_totals(g: &DmeGraph, depart: Timestamp, steps: &[Step]) -> (DurationSecs, DurationSecs) {
    let mut wait = DurationSecs(0);
    let mut ride = DurationSecs(0);
    let mut t = depart;
    let mut prev_bus = None;
    for step in steps {
        let w = g
            .waiting_time(step.vertex, step.edge.bus, t, prev_bus)
            .expect("reconstructed step is serviceable");
        wait += w;
        ride += step.edge.ride;
        t = t + w + step.edge.ride;
        prev_bus = Some(step.edge.bus);
    }
    (wait, ride)
}

/// Per-step detail for emitted route documents.
#[derive(Debug, Clone, Serialize)]
pub struct StepDetail {
    pub board_stop: String,
    pub alight_stop: String,
    pub bus: String,
    pub scheduled_departure_secs: u32,
    pub scheduled_departure_clock: String,
    pub wait_secs: u32,
    pub ride_secs: u32,
}

/// Replays a leg's steps against the graph, producing the boarding schedule
/// and per-step wait/ride breakdown.
pub fn replay_leg(g: &DmeGraph, leg: &RouteLeg) -> Vec<StepDetail> {
    let mut out = Vec::with_capacity(leg.steps.len());
    let mut t = leg.depart;
    let mut prev_bus = None;
    for step in &leg.steps {
        let wait = g
            .waiting_time(step.vertex, step.edge.bus, t, prev_bus)
            .expect("route step is serviceable");
        let dep = t + wait;
        out.push(StepDetail {
            board_stop: g.vertex(step.vertex).id.clone(),
            alight_stop: g.vertex(step.edge.to).id.clone(),
            bus: g.bus_name(step.edge.bus).to_string(),
            scheduled_departure_secs: dep.seconds(),
            scheduled_departure_clock: dep.clock(),
            wait_secs: wait.0,
            ride_secs: step.edge.ride.0,
        });
        t = dep + step.edge.ride;
        prev_bus = Some(step.edge.bus);
    }
    out
}

/// Comparison oracle: minimum cost under labels keyed by (vertex, incoming
/// bus). Exact over all routes, unlike the vertex-keyed model, which can be
/// beaten when a costlier arrival on a different bus avoids a transfer wait
/// downstream.
pub fn dsrs_strict_cost(
    g: &DmeGraph,
    origin: VertexId,
    dest: VertexId,
    depart: Timestamp,
) -> Option<DurationSecs> {
    use std::collections::HashMap;

    let mut best: HashMap<(VertexId, Option<BusId>), DurationSecs> = HashMap::new();
    let mut queue: BinaryHeap<Reverse<(DurationSecs, VertexId, Option<BusId>)>> = BinaryHeap::new();
    best.insert((origin, None), DurationSecs(0));
    queue.push(Reverse((DurationSecs(0), origin, None)));

    while let Some(Reverse((cost, v, bus))) = queue.pop() {
        if best.get(&(v, bus)).is_some_and(|&b| b < cost) {
            continue;
        }
        if v == dest {
            return Some(cost);
        }
        let label = SearchLabel {
            vertex: v,
            cost,
            arrival: depart + cost,
            estimated: cost,
            pred: bus.map(|b| (v, b)),
        };
        for edge in g.edges_from(v) {
            let Some((next_cost, _)) = relax(g, &label, edge) else {
                continue;
            };
            let key = (edge.to, Some(edge.bus));
            if best.get(&key).is_none_or(|&b| next_cost < b) {
                best.insert(key, next_cost);
                queue.push(Reverse((next_cost, edge.to, Some(edge.bus))));
            }
        }
    }
    None
}
