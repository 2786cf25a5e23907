//! Multi-POI route planning: enumerate POI visiting sequences, chain OD legs
//! with dwell times, and prune sequences whose great-circle lower bound
//! already exceeds the best total found so far.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{DmeGraph, DurationSecs, Timestamp, VertexId};
use crate::search::{self, RouteLeg};

pub const DEFAULT_POI_CAP: usize = 10;

/// A multi-POI query: reach every POI from the origin, in any order, with a
/// mandatory dwell at each intermediate POI.
#[derive(Debug, Clone)]
pub struct PoiQuery {
    pub origin: VertexId,
    pub depart: Timestamp,
    /// POIs in caller order (the "ordered" planning mode visits them as given).
    pub pois: Vec<VertexId>,
    pub dwell: HashMap<VertexId, DurationSecs>,
}

impl PoiQuery {
    /// Validates the query; missing dwell entries default to zero.
    pub fn new(
        origin: VertexId,
        depart: Timestamp,
        pois: Vec<VertexId>,
        mut dwell: HashMap<VertexId, DurationSecs>,
    ) -> Result<PoiQuery> {
        if pois.is_empty() {
            return Err(Error::InvalidQuery("POI set is empty".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for &p in &pois {
            if p == origin {
                return Err(Error::InvalidQuery(
                    "origin must not appear in the POI set".into(),
                ));
            }
            if !seen.insert(p) {
                return Err(Error::InvalidQuery("duplicate POI in query".into()));
            }
            dwell.entry(p).or_insert(DurationSecs(0));
        }
        Ok(PoiQuery { origin, depart, pois, dwell })
    }
}

/// One POI visiting order, origin first, with its cost lower bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VisitSequence {
    pub order: Vec<VertexId>,
    pub lower_bound: DurationSecs,
}

/// The chained minimum-cost route realizing one visiting sequence.
#[derive(Debug, Clone, Serialize)]
pub struct CandidateRoute {
    pub sequence: VisitSequence,
    pub legs: Vec<RouteLeg>,
    /// Sum of leg costs plus dwell at every intermediate POI.
    pub total_cost: DurationSecs,
    pub feasible: bool,
}

#[derive(Debug, Clone)]
pub struct PlanResult {
    pub best: CandidateRoute,
    pub sequences_total: u64,
    pub sequences_evaluated: u64,
    pub sequences_pruned: u64,
    pub elapsed: Duration,
    /// Visiting orders discarded by the cutoff, when recording is enabled.
    pub pruned_orders: Option<Vec<Vec<VertexId>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanMode {
    /// Exhaustive: every sequence, Dijkstra legs, no pruning.
    Naive,
    /// Lower-bound-sorted sequences with cutoff pruning, A* legs.
    EaStar,
    /// A* legs over every sequence, pruning disabled (benchmark control).
    EaStarNoPrune,
    /// Visits POIs in the order given by the query; single sequence.
    Ordered,
}

impl PlanMode {
    pub fn parse(s: &str) -> Result<PlanMode> {
        match s {
            "naive" => Ok(PlanMode::Naive),
            "ea-star" | "ea_star" => Ok(PlanMode::EaStar),
            "ea-star-no-prune" | "ea_star_no_prune" => Ok(PlanMode::EaStarNoPrune),
            "ordered" => Ok(PlanMode::Ordered),
            other => Err(Error::InvalidQuery(format!("unknown plan mode: {other}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PlanMode::Naive => "naive",
            PlanMode::EaStar => "ea_star",
            PlanMode::EaStarNoPrune => "ea_star_no_prune",
            PlanMode::Ordered => "ordered",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PlanOptions {
    pub mode: PlanMode,
    /// Maximum POI count; beyond it the query is refused, never truncated.
    pub poi_cap: usize,
    pub record_pruned: bool,
}

impl Default for PlanOptions {
    fn default() -> PlanOptions {
        PlanOptions { mode: PlanMode::EaStar, poi_cap: DEFAULT_POI_CAP, record_pruned: false }
    }
}

/// Lower bound for one visiting order: exploration costs over consecutive
/// pairs plus dwell at every intermediate POI. Never exceeds the true total
/// cost of the corresponding candidate route.
pub fn sequence_lower_bound(
    g: &DmeGraph,
    order: &[VertexId],
    dwell: &HashMap<VertexId, DurationSecs>,
) -> DurationSecs {
    let hops: DurationSecs = order
        .windows(2)
        .map(|w| g.exploration_cost(w[0], w[1]))
        .sum();
    hops + intermediate_dwell(order, dwell)
}

fn intermediate_dwell(
    order: &[VertexId],
    dwell: &HashMap<VertexId, DurationSecs>,
) -> DurationSecs {
    // Every visited POI except the final one charges its dwell.
    order[1..order.len().saturating_sub(1)]
        .iter()
        .map(|p| dwell.get(p).copied().unwrap_or_default())
        .sum()
}

/// Chains OD legs along one visiting order, advancing the clock by each
/// intermediate POI's dwell. Marks the candidate infeasible (and stops) at
/// the first unreachable leg.
pub fn evaluate_sequence(
    g: &DmeGraph,
    order: &[VertexId],
    query: &PoiQuery,
    use_astar: bool,
) -> CandidateRoute {
    debug_assert_eq!(order[0], query.origin);
    let mut legs = Vec::with_capacity(order.len() - 1);
    let mut total = DurationSecs(0);
    let mut t = query.depart;
    let mut feasible = true;
    for (i, w) in order.windows(2).enumerate() {
        let res = if use_astar {
            search::astar(g, w[0], w[1], t)
        } else {
            search::dsrs(g, w[0], w[1], t)
        };
        match res {
            Ok(leg) => {
                t = leg.arrival();
                total += leg.cost;
                legs.push(leg);
            }
            Err(_) => {
                feasible = false;
                break;
            }
        }
        let is_final = i + 2 == order.len();
        if !is_final {
            let dt = query.dwell.get(&w[1]).copied().unwrap_or_default();
            t = t + dt;
            total += dt;
        }
    }
    CandidateRoute {
        sequence: VisitSequence {
            order: order.to_vec(),
            lower_bound: sequence_lower_bound(g, order, &query.dwell),
        },
        legs,
        total_cost: total,
        feasible,
    }
}

/// Answers a multi-POI query in the requested mode.
pub fn plan(g: &DmeGraph, query: &PoiQuery, options: &PlanOptions) -> Result<PlanResult> {
    let n = query.pois.len();
    if n > options.poi_cap {
        return Err(Error::InvalidQuery(format!(
            "{n} POIs exceed the permutation cap of {}",
            options.poi_cap
        )));
    }
    let start = Instant::now();
    let mut result = match options.mode {
        PlanMode::Naive => plan_exhaustive(g, query, false),
        PlanMode::EaStarNoPrune => plan_exhaustive(g, query, true),
        PlanMode::EaStar => plan_pruned(g, query, options.record_pruned),
        PlanMode::Ordered => plan_ordered(g, query),
    }?;
    result.elapsed = start.elapsed();
    Ok(result)
}

/// Convenience wrappers for the two headline modes.
pub fn plan_naive(g: &DmeGraph, query: &PoiQuery) -> Result<PlanResult> {
    plan(g, query, &PlanOptions { mode: PlanMode::Naive, ..Default::default() })
}

pub fn plan_ea_star(g: &DmeGraph, query: &PoiQuery) -> Result<PlanResult> {
    plan(g, query, &PlanOptions::default())
}

fn sorted_pois(query: &PoiQuery) -> Vec<VertexId> {
    let mut pois = query.pois.clone();
    pois.sort_unstable();
    pois
}

fn orders_lexicographic(query: &PoiQuery) -> impl Iterator<Item = Vec<VertexId>> + '_ {
    let pois = sorted_pois(query);
    let n = pois.len();
    pois.into_iter().permutations(n).map(|perm| {
        let mut order = Vec::with_capacity(perm.len() + 1);
        order.push(query.origin);
        order.extend(perm);
        order
    })
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

fn plan_exhaustive(g: &DmeGraph, query: &PoiQuery, use_astar: bool) -> Result<PlanResult> {
    let total = factorial(query.pois.len());
    let mut best: Option<CandidateRoute> = None;
    let mut evaluated = 0u64;
    for order in orders_lexicographic(query) {
        let cand = evaluate_sequence(g, &order, query, use_astar);
        evaluated += 1;
        if cand.feasible {
            // Lexicographic enumeration order makes strict < keep the
            // lexicographically smallest among equal-cost optima.
            let improves = best
                .as_ref()
                .is_none_or(|b| cand.total_cost < b.total_cost);
            if improves {
                best = Some(cand);
            }
        }
    }
    finish(query, best, total, evaluated, 0, None)
}

fn plan_pruned(g: &DmeGraph, query: &PoiQuery, record_pruned: bool) -> Result<PlanResult> {
    let total = factorial(query.pois.len());

    // Pairwise exploration costs over the involved vertices, computed once.
    let mut involved = vec![query.origin];
    involved.extend(sorted_pois(query));
    let k = involved.len();
    let mut slot = HashMap::with_capacity(k);
    for (i, &v) in involved.iter().enumerate() {
        slot.insert(v, i);
    }
    let mut h = vec![DurationSecs(0); k * k];
    for i in 0..k {
        for j in 0..k {
            h[i * k + j] = g.exploration_cost(involved[i], involved[j]);
        }
    }
    let bound_of = |order: &[VertexId]| -> DurationSecs {
        let hops: DurationSecs = order
            .windows(2)
            .map(|w| h[slot[&w[0]] * k + slot[&w[1]]])
            .sum();
        hops + intermediate_dwell(order, &query.dwell)
    };

    let mut ranked: Vec<(DurationSecs, Vec<VertexId>)> = orders_lexicographic(query)
        .map(|order| (bound_of(&order), order))
        .collect();
    ranked.sort();

    let mut best: Option<CandidateRoute> = None;
    let mut mc_ub: Option<DurationSecs> = None;
    let mut evaluated = 0u64;
    let mut pruned = 0u64;
    let mut pruned_orders = record_pruned.then(Vec::new);
    for (i, (bound, order)) in ranked.iter().enumerate() {
        if mc_ub.is_some_and(|ub| *bound > ub) {
            // Sorted order: everything from here on is prunable.
            pruned = (ranked.len() - i) as u64;
            if let Some(list) = &mut pruned_orders {
                list.extend(ranked[i..].iter().map(|(_, o)| o.clone()));
            }
            break;
        }
        let cand = evaluate_sequence(g, order, query, true);
        evaluated += 1;
        if cand.feasible {
            let improves = match &best {
                None => true,
                Some(b) => {
                    cand.total_cost < b.total_cost
                        || (cand.total_cost == b.total_cost
                            && cand.sequence.order < b.sequence.order)
                }
            };
            if improves {
                mc_ub = Some(cand.total_cost);
                best = Some(cand);
            }
        }
    }
    finish(query, best, total, evaluated, pruned, pruned_orders)
}

fn plan_ordered(g: &DmeGraph, query: &PoiQuery) -> Result<PlanResult> {
    let mut order = vec![query.origin];
    order.extend(query.pois.iter().copied());
    let cand = evaluate_sequence(g, &order, query, true);
    let best = cand.feasible.then_some(cand);
    finish(query, best, 1, 1, 0, None)
}

fn finish(
    query: &PoiQuery,
    best: Option<CandidateRoute>,
    total: u64,
    evaluated: u64,
    pruned: u64,
    pruned_orders: Option<Vec<Vec<VertexId>>>,
) -> Result<PlanResult> {
    let Some(best) = best else {
        return Err(Error::NoRoute(format!(
            "all {} visiting sequences over {} POIs are infeasible at {}",
            total,
            query.pois.len(),
            query.depart.clock()
        )));
    };
    Ok(PlanResult {
        best,
        sequences_total: total,
        sequences_evaluated: evaluated,
        sequences_pruned: pruned,
        elapsed: Duration::ZERO,
        pruned_orders,
    })
}
