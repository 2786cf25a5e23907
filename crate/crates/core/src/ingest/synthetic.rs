//! Deterministic synthetic network generator for desk-scale testing and
//! benchmarking without a real feed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{haversine_m, DmeGraph, DurationSecs, GraphBuilder, Timestamp};

/// Speed cap for generated hops; per-hop speeds are drawn below it, so every
/// generated edge is admissible under the calibrated v_max.
const GEN_SPEED_CAP: f64 = 12.0;
const MIN_HOP_SPEED: f64 = 10.0;

// The coordinate box scales with the vertex count so stop density stays
// city-like regardless of network size.
const BOX_CENTER: (f64, f64) = (40.70, -73.90);
const KM2_PER_VERTEX: f64 = 0.04;
const M_PER_DEG_LAT: f64 = 110_540.0;
const M_PER_DEG_LON_AT_CENTER: f64 = 84_300.0;

/// Nominal spacing between consecutive stops of a line, in meters.
const STOP_SPACING_M: f64 = 400.0;
const ANGLE_RETRIES: usize = 8;

#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub vertex_count: usize,
    pub line_count: usize,
    pub stops_per_line: usize,
    pub headway: DurationSecs,
    pub service_span: (Timestamp, Timestamp),
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> SyntheticSpec {
        SyntheticSpec {
            vertex_count: 300,
            line_count: 40,
            stops_per_line: 10,
            headway: DurationSecs(180),
            service_span: (Timestamp(6 * 3600), Timestamp(22 * 3600)),
            seed: 1,
        }
    }
}

impl SyntheticSpec {
    fn check(&self) -> Result<()> {
        if self.vertex_count < 2 {
            return Err(Error::InfeasibleSpec("vertex_count must be >= 2".into()));
        }
        if self.line_count < 1 {
            return Err(Error::InfeasibleSpec("line_count must be >= 1".into()));
        }
        if self.stops_per_line < 2 {
            return Err(Error::InfeasibleSpec("stops_per_line must be >= 2".into()));
        }
        if self.stops_per_line > self.vertex_count {
            return Err(Error::InfeasibleSpec(format!(
                "stops_per_line ({}) exceeds vertex_count ({})",
                self.stops_per_line, self.vertex_count
            )));
        }
        if self.headway.0 == 0 {
            return Err(Error::InfeasibleSpec("headway must be positive".into()));
        }
        if self.service_span.0 >= self.service_span.1 {
            return Err(Error::InfeasibleSpec("service span start must precede end".into()));
        }
        Ok(())
    }
}

/// Generates a network: vertices uniform in a coordinate box sized to the
/// vertex count, each line a simple path of spatially close stops (both
/// directions, one bus per direction), periodic headway trips within the
/// service span. Every line after the first starts at a stop some earlier
/// line already serves, so the served stops form one connected network.
/// Deterministic per seed.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<DmeGraph> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let side_m = (spec.vertex_count as f64 * KM2_PER_VERTEX).sqrt() * 1000.0;
    let half_lat = side_m / M_PER_DEG_LAT / 2.0;
    let half_lon = side_m / M_PER_DEG_LON_AT_CENTER / 2.0;

    let mut builder = GraphBuilder::new();
    let mut positions = Vec::with_capacity(spec.vertex_count);
    // Planar meter coordinates relative to the box center, for line layout.
    let mut xy = Vec::with_capacity(spec.vertex_count);
    for i in 0..spec.vertex_count {
        let lat = rng.gen_range(BOX_CENTER.0 - half_lat..BOX_CENTER.0 + half_lat);
        let lon = rng.gen_range(BOX_CENTER.1 - half_lon..BOX_CENTER.1 + half_lon);
        let id = format!("s{i:05}");
        builder.add_vertex(&id, &format!("Stop {i}"), lat, lon);
        positions.push((lat, lon));
        xy.push((
            (lon - BOX_CENTER.1) * M_PER_DEG_LON_AT_CENTER,
            (lat - BOX_CENTER.0) * M_PER_DEG_LAT,
        ));
    }

    let mut covered = vec![false; spec.vertex_count];
    let mut covered_list: Vec<usize> = Vec::new();
    for line in 0..spec.line_count {
        // While unserved stops remain, aim the next line from the served
        // stop nearest a random unserved one toward it; this spreads
        // coverage while keeping every line connected to an earlier one.
        let (start, aim) = if covered_list.is_empty() {
            (rng.gen_range(0..spec.vertex_count), None)
        } else if covered_list.len() < spec.vertex_count {
            let uncovered: Vec<usize> =
                (0..spec.vertex_count).filter(|&v| !covered[v]).collect();
            let target = uncovered[rng.gen_range(0..uncovered.len())];
            let (tx, ty) = xy[target];
            let start = *covered_list
                .iter()
                .min_by(|&&a, &&b| {
                    let da = (xy[a].0 - tx).powi(2) + (xy[a].1 - ty).powi(2);
                    let db = (xy[b].0 - tx).powi(2) + (xy[b].1 - ty).powi(2);
                    da.total_cmp(&db)
                })
                .unwrap();
            (start, Some((ty - xy[start].1).atan2(tx - xy[start].0)))
        } else {
            (covered_list[rng.gen_range(0..covered_list.len())], None)
        };
        let stops = place_line(spec, start, aim, &xy, &covered, &mut rng);
        for &s in &stops {
            if !covered[s] {
                covered[s] = true;
                covered_list.push(s);
            }
        }

        let rides: Vec<DurationSecs> = stops
            .windows(2)
            .map(|w| {
                let (alat, alon) = positions[w[0]];
                let (blat, blon) = positions[w[1]];
                let dist = haversine_m(alat, alon, blat, blon);
                let speed = rng.gen_range(MIN_HOP_SPEED..GEN_SPEED_CAP);
                DurationSecs((dist / speed).ceil().max(1.0) as u32)
            })
            .collect();

        for (dir, path) in [
            (
                'f',
                stops.iter().copied().collect::<Vec<_>>(),
            ),
            ('r', stops.iter().rev().copied().collect()),
        ] {
            let bus = builder.bus(&format!("b{line:04}{dir}"));
            let hop_rides: Vec<DurationSecs> = if dir == 'f' {
                rides.clone()
            } else {
                rides.iter().rev().copied().collect()
            };
            for (w, &ride) in path.windows(2).zip(&hop_rides) {
                builder.add_edge(w[0], w[1], bus, ride);
            }
            // Periodic trips: one departure from the line start per headway.
            let mut start = spec.service_span.0;
            while start <= spec.service_span.1 {
                let mut t = start;
                builder.add_schedule_entry(path[0], bus, t);
                for (w, &ride) in path.windows(2).zip(&hop_rides) {
                    t = t + ride;
                    builder.add_schedule_entry(w[1], bus, t);
                }
                start = start + spec.headway;
            }
        }
    }

    let g = builder.build();
    debug_assert!(g.validate().is_empty());
    Ok(g)
}

/// Lays one line out as a straight corridor: pick a direction, collect the
/// vertices ahead of `start` within the corridor's length, and keep the ones
/// closest to its axis, serving unserved stops first so coverage grows with
/// every line. Falls back to the nearest vertices overall when no sampled
/// direction has enough candidates ahead.
fn place_line(
    spec: &SyntheticSpec,
    start: usize,
    aim: Option<f64>,
    xy: &[(f64, f64)],
    covered: &[bool],
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    let need = spec.stops_per_line - 1;
    let length = spec.stops_per_line as f64 * STOP_SPACING_M;
    let (sx, sy) = xy[start];

    for attempt in 0..ANGLE_RETRIES {
        let theta = match aim {
            Some(a) if attempt == 0 => a,
            _ => rng.gen_range(0.0..std::f64::consts::TAU),
        };
        let (ux, uy) = (theta.cos(), theta.sin());
        // (axis offset, along-axis position, vertex) per corridor candidate.
        let mut strip: Vec<(f64, f64, usize)> = Vec::new();
        for (v, &(x, y)) in xy.iter().enumerate() {
            if v == start {
                continue;
            }
            let (dx, dy) = (x - sx, y - sy);
            let along = dx * ux + dy * uy;
            if along <= 0.0 || along > length {
                continue;
            }
            strip.push(((dx * uy - dy * ux).abs(), along, v));
        }
        if strip.len() < need {
            continue;
        }
        strip.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let cut = (need * 2).min(strip.len());
        let shortlist = &mut strip[..cut];
        shortlist.sort_by_key(|&(_, _, v)| covered[v]);
        let mut picked: Vec<(f64, usize)> =
            shortlist[..need].iter().map(|&(_, along, v)| (along, v)).collect();
        picked.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut stops = Vec::with_capacity(spec.stops_per_line);
        stops.push(start);
        stops.extend(picked.into_iter().map(|(_, v)| v));
        return stops;
    }

    let mut nearest: Vec<(f64, usize)> = xy
        .iter()
        .enumerate()
        .filter(|&(v, _)| v != start)
        .map(|(v, &(x, y))| ((x - sx).powi(2) + (y - sy).powi(2), v))
        .collect();
    nearest.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut stops: Vec<usize> = std::iter::once(start)
        .chain(nearest[..need].iter().map(|&(_, v)| v))
        .collect();
    // A west-to-east sweep keeps the fallback path from zigzagging.
    stops.sort_by(|&a, &b| xy[a].partial_cmp(&xy[b]).unwrap());
    stops
}
