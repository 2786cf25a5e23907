//! GTFS static feed ingestion. Reads the stops / routes / trips / stop_times
//! tables and builds the multi-edge timetable graph: the bus identifier is
//! the GTFS route_id, edge ride times are the mean observed hop time across
//! all trips of a route, and every stop_times arrival becomes a schedule
//! entry at its stop.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::graph::{DmeGraph, DurationSecs, GraphBuilder, Timestamp};

#[derive(Debug, Clone, Deserialize)]
pub struct StopRow {
    pub stop_id: String,
    #[serde(default)]
    pub stop_name: String,
    pub stop_lat: f64,
    pub stop_lon: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RouteRow {
    pub route_id: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct TripRow {
    pub trip_id: String,
    pub route_id: String,
    #[serde(default)]
    pub service_id: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct StopTimeRow {
    pub trip_id: String,
    pub arrival_time: String,
    #[serde(default)]
    pub departure_time: String,
    pub stop_id: String,
    pub stop_sequence: u32,
}

/// An in-memory GTFS static subset.
#[derive(Debug, Clone, Default)]
pub struct GtfsFeed {
    pub stops: Vec<StopRow>,
    pub routes: Vec<RouteRow>,
    pub trips: Vec<TripRow>,
    pub stop_times: Vec<StopTimeRow>,
}

/// Counts reported after ingestion.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct IngestSummary {
    pub vertices: usize,
    pub edges: usize,
    pub schedule_entries: usize,
    pub v_max: f64,
}

impl IngestSummary {
    pub fn of(g: &DmeGraph) -> IngestSummary {
        IngestSummary {
            vertices: g.vertex_count(),
            edges: g.edge_count(),
            schedule_entries: g.schedule_entry_count(),
            v_max: g.v_max(),
        }
    }
}

fn read_table<T: serde::de::DeserializeOwned>(dir: &Path, file: &str) -> Result<Vec<T>> {
    let path = dir.join(file);
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(&path)
        .map_err(|e| Error::Ingest(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, row) in reader.deserialize().enumerate() {
        let row: T = row.map_err(|e| {
            Error::Ingest(format!("{file} row {}: {e}", i + 2))
        })?;
        rows.push(row);
    }
    Ok(rows)
}

/// Loads the four required tables from a feed directory.
pub fn load_feed(dir: &Path) -> Result<GtfsFeed> {
    Ok(GtfsFeed {
        stops: read_table(dir, "stops.txt")?,
        routes: read_table(dir, "routes.txt")?,
        trips: read_table(dir, "trips.txt")?,
        stop_times: read_table(dir, "stop_times.txt")?,
    })
}

/// Builds the graph from a feed, keeping only trips whose service_id is in
/// `service_ids` (all trips when `None`).
pub fn build_graph(feed: &GtfsFeed, service_ids: Option<&HashSet<String>>) -> Result<DmeGraph> {
    let stops: HashMap<&str, &StopRow> =
        feed.stops.iter().map(|s| (s.stop_id.as_str(), s)).collect();
    let routes: HashSet<&str> = feed.routes.iter().map(|r| r.route_id.as_str()).collect();

    let mut bad_rows = Vec::new();
    let mut kept_trips: HashMap<&str, &TripRow> = HashMap::new();
    for trip in &feed.trips {
        if !routes.contains(trip.route_id.as_str()) {
            bad_rows.push(format!(
                "trips: trip {} references unknown route {}",
                trip.trip_id, trip.route_id
            ));
            continue;
        }
        if service_ids.is_none_or(|ids| ids.contains(&trip.service_id)) {
            kept_trips.insert(trip.trip_id.as_str(), trip);
        }
    }
    let all_trips: HashSet<&str> = feed.trips.iter().map(|t| t.trip_id.as_str()).collect();

    // Group stop_times by kept trip, validating references.
    let mut by_trip: HashMap<&str, Vec<(u32, &StopTimeRow)>> = HashMap::new();
    for (i, st) in feed.stop_times.iter().enumerate() {
        let row_no = i + 2;
        if !all_trips.contains(st.trip_id.as_str()) {
            bad_rows.push(format!(
                "stop_times row {row_no}: unknown trip {}",
                st.trip_id
            ));
            continue;
        }
        if !stops.contains_key(st.stop_id.as_str()) {
            bad_rows.push(format!(
                "stop_times row {row_no}: unknown stop {}",
                st.stop_id
            ));
            continue;
        }
        if kept_trips.contains_key(st.trip_id.as_str()) {
            by_trip
                .entry(st.trip_id.as_str())
                .or_default()
                .push((st.stop_sequence, st));
        }
    }
    if !bad_rows.is_empty() {
        return Err(Error::Ingest(format!(
            "unresolvable references:\n  {}",
            bad_rows.join("\n  ")
        )));
    }
    if by_trip.is_empty() {
        return Err(Error::Ingest("feed contains no usable stop_times rows".into()));
    }

    let mut builder = GraphBuilder::new();
    // (from stop, to stop, route) -> (sum of observed hop seconds, count)
    let mut hop_obs: HashMap<(usize, usize, usize), (u64, u64)> = HashMap::new();

    let mut trip_ids: Vec<&str> = by_trip.keys().copied().collect();
    trip_ids.sort_unstable();
    for trip_id in trip_ids {
        let mut rows = by_trip.remove(trip_id).unwrap();
        rows.sort_by_key(|&(seq, _)| seq);
        if rows.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Ingest(format!(
                "trip {trip_id}: duplicate stop_sequence values"
            )));
        }
        let route = &kept_trips[trip_id].route_id;
        let bus = builder.bus(route);

        let mut prev: Option<(usize, Timestamp)> = None; // (vertex, departure)
        for &(_, st) in &rows {
            let stop = stops[st.stop_id.as_str()];
            let v = builder.add_vertex(&stop.stop_id, &stop.stop_name, stop.stop_lat, stop.stop_lon);
            let arrival = Timestamp::parse(&st.arrival_time)
                .map_err(|_| Error::Ingest(format!(
                    "trip {trip_id}: unparsable arrival_time {:?}", st.arrival_time
                )))?;
            let departure = if st.departure_time.is_empty() {
                arrival
            } else {
                Timestamp::parse(&st.departure_time).map_err(|_| {
                    Error::Ingest(format!(
                        "trip {trip_id}: unparsable departure_time {:?}",
                        st.departure_time
                    ))
                })?
            };
            builder.add_schedule_entry(v, bus, arrival);
            if let Some((pv, pdep)) = prev {
                if arrival < pdep {
                    return Err(Error::Ingest(format!(
                        "trip {trip_id}: arrival at {} precedes previous departure",
                        st.stop_id
                    )));
                }
                let (sum, count) = hop_obs.entry((pv, v, bus)).or_insert((0, 0));
                *sum += (arrival - pdep).0 as u64;
                *count += 1;
            }
            prev = Some((v, departure));
        }
    }

    for ((from, to, bus), (sum, count)) in hop_obs {
        let mean = (sum as f64 / count as f64).round() as u32;
        builder.add_edge(from, to, bus, DurationSecs(mean.max(1)));
    }
    Ok(builder.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn mini_feed_dir() -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/mini_feed")
    }

    #[test]
    fn mini_feed_counts() {
        let feed = load_feed(&mini_feed_dir()).unwrap();
        let g = build_graph(&feed, None).unwrap();
        // Two trips, but the second duplicates the first's arrival times over
        // A -> B, so the deduplicated schedules hold one entry per stop.
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.schedule_entry_count(), 3);
        assert!(g.validate().is_empty());
    }

    #[test]
    fn mean_ride_averages_across_trips() {
        let stop = |id: &str, lat: f64| StopRow {
            stop_id: id.into(),
            stop_name: id.into(),
            stop_lat: lat,
            stop_lon: -74.0,
        };
        let st = |trip: &str, time: &str, stop: &str, seq: u32| StopTimeRow {
            trip_id: trip.into(),
            arrival_time: time.into(),
            departure_time: time.into(),
            stop_id: stop.into(),
            stop_sequence: seq,
        };
        let feed = GtfsFeed {
            stops: vec![stop("A", 40.0), stop("B", 40.003)],
            routes: vec![RouteRow { route_id: "R".into() }],
            trips: vec![
                TripRow { trip_id: "t1".into(), route_id: "R".into(), service_id: String::new() },
                TripRow { trip_id: "t2".into(), route_id: "R".into(), service_id: String::new() },
            ],
            stop_times: vec![
                st("t1", "08:00:00", "A", 1),
                st("t1", "08:02:50", "B", 2), // 170 s
                st("t2", "09:00:00", "A", 1),
                st("t2", "09:03:10", "B", 2), // 190 s
            ],
        };
        let g = build_graph(&feed, None).unwrap();
        let a = g.resolve("A").unwrap();
        let b = g.resolve("B").unwrap();
        let r = g.resolve_bus("R").unwrap();
        assert_eq!(g.edge(a, b, r).unwrap().ride, DurationSecs(180));
    }

    #[test]
    fn single_trip_chain() {
        let feed = GtfsFeed {
            stops: vec![
                StopRow { stop_id: "A".into(), stop_name: "A".into(), stop_lat: 40.0, stop_lon: -74.0 },
                StopRow { stop_id: "B".into(), stop_name: "B".into(), stop_lat: 40.001, stop_lon: -74.0 },
                StopRow { stop_id: "C".into(), stop_name: "C".into(), stop_lat: 40.002, stop_lon: -74.0 },
            ],
            routes: vec![RouteRow { route_id: "R".into() }],
            trips: vec![TripRow { trip_id: "t1".into(), route_id: "R".into(), service_id: "wkd".into() }],
            stop_times: vec![
                StopTimeRow { trip_id: "t1".into(), arrival_time: "08:00:00".into(), departure_time: "08:00:00".into(), stop_id: "A".into(), stop_sequence: 1 },
                StopTimeRow { trip_id: "t1".into(), arrival_time: "08:02:00".into(), departure_time: "08:02:10".into(), stop_id: "B".into(), stop_sequence: 2 },
                StopTimeRow { trip_id: "t1".into(), arrival_time: "08:05:00".into(), departure_time: "08:05:00".into(), stop_id: "C".into(), stop_sequence: 3 },
            ],
        };
        let g = build_graph(&feed, None).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.schedule_entry_count(), 3);
        let r = g.resolve_bus("R").unwrap();
        for id in ["A", "B", "C"] {
            let v = g.resolve(id).unwrap();
            assert_eq!(g.vertex(v).schedule[&r].len(), 1);
        }
    }

    #[test]
    fn service_filter_keeps_matching_trips() {
        let feed = load_feed(&mini_feed_dir()).unwrap();
        let none: HashSet<String> = ["nope".to_string()].into();
        assert!(build_graph(&feed, Some(&none)).is_err());
        let wkd: HashSet<String> = ["wkd".to_string()].into();
        let g = build_graph(&feed, Some(&wkd)).unwrap();
        assert_eq!(g.vertex_count(), 3);
    }

    #[test]
    fn unresolvable_references_are_reported() {
        let mut feed = load_feed(&mini_feed_dir()).unwrap();
        feed.stop_times.push(StopTimeRow {
            trip_id: "ghost".into(),
            arrival_time: "08:00:00".into(),
            departure_time: String::new(),
            stop_id: "A".into(),
            stop_sequence: 1,
        });
        let err = build_graph(&feed, None).unwrap_err();
        assert!(err.to_string().contains("ghost"));
    }
}
