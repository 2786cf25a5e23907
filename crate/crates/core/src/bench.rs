//! Seeded benchmark harness: random multi-POI queries over scale-limited
//! subgraphs, timed per planning mode. Cost and count fields are
//! deterministic for a fixed config and seed; wall times are not.

use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{DmeGraph, Timestamp, VertexId};
use crate::ingest::subgraph_by_scale;
use crate::planner::{plan, PlanMode, PlanOptions, PoiQuery, DEFAULT_POI_CAP};
use crate::search::reachable_from;

const ORIGIN_RETRIES: usize = 20;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// Subgraph vertex counts to benchmark on.
    pub scales: Vec<usize>,
    pub poi_counts: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub depart: Timestamp,
    pub modes: Vec<PlanMode>,
    /// Run trials serially for clean timing.
    pub sequential: bool,
    pub poi_cap: usize,
    /// Per-POI dwell seconds drawn uniformly from this range; None means 0.
    pub dwell_range: Option<(u32, u32)>,
}

impl Default for BenchConfig {
    fn default() -> BenchConfig {
        BenchConfig {
            scales: vec![882, 3616, 12550],
            poi_counts: (1..=6).collect(),
            trials: 50,
            seed: 1,
            depart: Timestamp(8 * 3600),
            modes: vec![PlanMode::Naive, PlanMode::EaStar],
            sequential: false,
            poi_cap: DEFAULT_POI_CAP,
            dwell_range: None,
        }
    }
}

/// Aggregates for one (scale, poi count, mode) cell.
#[derive(Debug, Clone, Serialize)]
pub struct CellStats {
    pub scale: usize,
    pub poi_count: usize,
    pub mode: &'static str,
    pub trials: usize,
    pub failures: usize,
    pub mean_ms: f64,
    pub median_ms: f64,
    pub mean_cost: f64,
    pub mean_evaluated: f64,
    pub mean_pruned: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub seed: u64,
    pub depart_secs: u32,
    pub cells: Vec<CellStats>,
}

#[derive(Debug, Clone, Default)]
struct TrialOutcome {
    // Per mode: (ms, cost, evaluated, pruned); None when no route was found.
    results: HashMap<&'static str, Option<(f64, u64, u64, u64)>>,
}

fn trial_seed(seed: u64, scale: usize, n: usize, trial: usize) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    (seed, scale, n, trial).hash(&mut h);
    h.finish()
}

/// Picks a seeded random origin and `n` distinct POIs reachable from it at
/// the departure time. `None` when no origin with enough reachable stops is
/// found within the retry budget.
fn sample_query(
    g: &DmeGraph,
    n: usize,
    depart: Timestamp,
    dwell_range: Option<(u32, u32)>,
    rng: &mut ChaCha8Rng,
) -> Option<PoiQuery> {
    for _ in 0..ORIGIN_RETRIES {
        let origin = VertexId(rng.gen_range(0..g.vertex_count() as u32));
        let mut reachable = reachable_from(g, origin, depart);
        reachable.retain(|&v| v != origin);
        if reachable.len() < n {
            continue;
        }
        reachable.sort_unstable();
        reachable.shuffle(rng);
        let pois = reachable[..n].to_vec();
        let dwell = match dwell_range {
            Some((lo, hi)) => pois
                .iter()
                .map(|&p| (p, crate::graph::DurationSecs(rng.gen_range(lo..=hi))))
                .collect(),
            None => HashMap::new(),
        };
        return PoiQuery::new(origin, depart, pois, dwell).ok();
    }
    None
}

fn run_trial(
    g: &DmeGraph,
    config: &BenchConfig,
    scale: usize,
    n: usize,
    trial: usize,
) -> TrialOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(config.seed, scale, n, trial));
    let mut outcome = TrialOutcome::default();
    let Some(query) = sample_query(g, n, config.depart, config.dwell_range, &mut rng) else {
        for mode in &config.modes {
            outcome.results.insert(mode.name(), None);
        }
        return outcome;
    };
    for &mode in &config.modes {
        let options = PlanOptions { mode, poi_cap: config.poi_cap, record_pruned: false };
        let entry = match plan(g, &query, &options) {
            Ok(res) => Some((
                res.elapsed.as_secs_f64() * 1e3,
                res.best.total_cost.0 as u64,
                res.sequences_evaluated,
                res.sequences_pruned,
            )),
            Err(Error::NoRoute(_)) => None,
            // Sampling guarantees valid vertices; anything else is a bug.
            Err(e) => panic!("bench trial failed: {e}"),
        };
        outcome.results.insert(mode.name(), entry);
    }
    outcome
}

pub fn run_bench(g: &DmeGraph, config: &BenchConfig) -> Result<BenchReport> {
    let mut cells = Vec::new();
    for &scale in &config.scales {
        if scale > g.vertex_count() {
            return Err(Error::InvalidQuery(format!(
                "scale {scale} exceeds graph size {}",
                g.vertex_count()
            )));
        }
        let sub;
        let graph = if scale == g.vertex_count() {
            g
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(config.seed, scale, 0, 0));
            // Retry seeds until a component of the requested size exists.
            let mut picked = None;
            for _ in 0..ORIGIN_RETRIES {
                let seed_vertex = VertexId(rng.gen_range(0..g.vertex_count() as u32));
                if let Ok(s) = subgraph_by_scale(g, scale, seed_vertex) {
                    picked = Some(s);
                    break;
                }
            }
            sub = picked.ok_or_else(|| {
                Error::InvalidQuery(format!("no component with {scale} vertices found"))
            })?;
            &sub
        };

        for &n in &config.poi_counts {
            let trials: Vec<TrialOutcome> = if config.sequential {
                (0..config.trials)
                    .map(|t| run_trial(graph, config, scale, n, t))
                    .collect()
            } else {
                (0..config.trials)
                    .into_par_iter()
                    .map(|t| run_trial(graph, config, scale, n, t))
                    .collect()
            };
            for &mode in &config.modes {
                cells.push(aggregate(scale, n, mode, &trials));
            }
        }
    }
    Ok(BenchReport { seed: config.seed, depart_secs: config.depart.seconds(), cells })
}

fn aggregate(scale: usize, n: usize, mode: PlanMode, trials: &[TrialOutcome]) -> CellStats {
    let mut times = Vec::new();
    let (mut cost_sum, mut eval_sum, mut pruned_sum) = (0u64, 0u64, 0u64);
    let mut failures = 0usize;
    for t in trials {
        match t.results.get(mode.name()).copied().flatten() {
            Some((ms, cost, evaluated, pruned)) => {
                times.push(ms);
                cost_sum += cost;
                eval_sum += evaluated;
                pruned_sum += pruned;
            }
            None => failures += 1,
        }
    }
    let ok = times.len();
    times.sort_by(|a, b| a.total_cmp(b));
    let median_ms = if ok == 0 {
        0.0
    } else if ok % 2 == 1 {
        times[ok / 2]
    } else {
        (times[ok / 2 - 1] + times[ok / 2]) / 2.0
    };
    CellStats {
        scale,
        poi_count: n,
        mode: mode.name(),
        trials: trials.len(),
        failures,
        mean_ms: if ok == 0 { 0.0 } else { times.iter().sum::<f64>() / ok as f64 },
        median_ms,
        mean_cost: if ok == 0 { 0.0 } else { cost_sum as f64 / ok as f64 },
        mean_evaluated: if ok == 0 { 0.0 } else { eval_sum as f64 / ok as f64 },
        mean_pruned: if ok == 0 { 0.0 } else { pruned_sum as f64 / ok as f64 },
    }
}

/// Renders the per-cell aggregates as a fixed-width table.
pub fn render_table(report: &BenchReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:>7} {:>4} {:<18} {:>7} {:>9} {:>10} {:>12} {:>10} {:>8} {:>5}\n",
        "scale", "n", "mode", "trials", "mean ms", "median ms", "mean cost", "evaluated", "pruned", "fail"
    ));
    for c in &report.cells {
        out.push_str(&format!(
            "{:>7} {:>4} {:<18} {:>7} {:>9.2} {:>10.2} {:>12.1} {:>10.1} {:>8.1} {:>5}\n",
            c.scale,
            c.poi_count,
            c.mode,
            c.trials,
            c.mean_ms,
            c.median_ms,
            c.mean_cost,
            c.mean_evaluated,
            c.mean_pruned,
            c.failures
        ));
    }
    out
}
