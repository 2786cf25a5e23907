//! Scale-limited subgraph extraction, mirroring the SG/MG/LG style of
//! benchmarking on one large network.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::{DmeGraph, GraphBuilder, VertexId};

/// Breadth-first closure over out-edges from `seed_vertex` until `n` vertices
/// are collected (ties within a frontier broken by ascending vertex id).
/// Keeps the induced edges and the kept vertices' schedules; v_max is
/// recalibrated from the kept edges.
pub fn subgraph_by_scale(g: &DmeGraph, n: usize, seed_vertex: VertexId) -> Result<DmeGraph> {
    if n == 0 || n > g.vertex_count() {
        return Err(Error::InvalidQuery(format!(
            "subgraph size {n} not in 1..={}",
            g.vertex_count()
        )));
    }

    let mut kept: Vec<VertexId> = Vec::with_capacity(n);
    let mut seen: HashSet<VertexId> = HashSet::new();
    let mut frontier = vec![seed_vertex];
    seen.insert(seed_vertex);
    'bfs: while !frontier.is_empty() {
        frontier.sort_unstable();
        let mut next = Vec::new();
        for v in frontier {
            kept.push(v);
            if kept.len() == n {
                break 'bfs;
            }
            for e in g.edges_from(v) {
                if seen.insert(e.to) {
                    next.push(e.to);
                }
            }
        }
        frontier = next;
    }
    if kept.len() < n {
        return Err(Error::SubgraphTooSmall { requested: n, achievable: kept.len() });
    }

    let kept_set: HashSet<VertexId> = kept.iter().copied().collect();
    let mut builder = GraphBuilder::new();
    for &v in &kept {
        let vx = g.vertex(v);
        let idx = builder.add_vertex(&vx.id, &vx.name, vx.lat, vx.lon);
        for (&bus, times) in &vx.schedule {
            let b = builder.bus(g.bus_name(bus));
            for &t in times {
                builder.add_schedule_entry(idx, b, t);
            }
        }
    }
    for &v in &kept {
        for e in g.edges_from(v) {
            if kept_set.contains(&e.to) {
                let from = builder.add_vertex(&g.vertex(e.from).id, "", 0.0, 0.0);
                let to = builder.add_vertex(&g.vertex(e.to).id, "", 0.0, 0.0);
                let bus = builder.bus(g.bus_name(e.bus));
                builder.add_edge(from, to, bus, e.ride);
            }
        }
    }
    Ok(builder.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::ingest::{generate_synthetic, SyntheticSpec};

    #[test]
    fn full_closure_is_identity() {
        let g = generate_synthetic(&SyntheticSpec {
            vertex_count: 60,
            line_count: 10,
            ..Default::default()
        })
        .unwrap();
        let seed = g.resolve("s00000").unwrap();
        let sub = subgraph_by_scale(&g, g.vertex_count(), seed).unwrap();
        assert_eq!(sub, g);
    }

    #[test]
    fn single_vertex_subgraph() {
        let g = fixtures::example_network();
        let v1 = g.resolve("v1").unwrap();
        let sub = subgraph_by_scale(&g, 1, v1).unwrap();
        assert_eq!(sub.vertex_count(), 1);
        assert_eq!(sub.edge_count(), 0);
    }

    #[test]
    fn fixture_three_vertex_closure() {
        let g = fixtures::example_network();
        let v1 = g.resolve("v1").unwrap();
        let sub = subgraph_by_scale(&g, 3, v1).unwrap();
        let ids: Vec<&str> = sub.vertices().map(|(_, v)| v.id.as_str()).collect();
        assert_eq!(ids, vec!["v1", "v2", "v3"]);
        assert_eq!(sub.edge_count(), 2);
        let v1s = sub.resolve("v1").unwrap();
        assert_eq!(sub.edges_from(v1s).len(), 2);
    }

    #[test]
    fn component_too_small_is_reported() {
        let g = fixtures::example_network();
        let v5 = g.resolve("v5").unwrap(); // sink vertex, no out-edges
        let err = subgraph_by_scale(&g, 3, v5).unwrap_err();
        assert!(matches!(err, Error::SubgraphTooSmall { requested: 3, achievable: 1 }));
    }

    #[test]
    fn idempotent_for_same_parameters() {
        let g = generate_synthetic(&SyntheticSpec {
            vertex_count: 120,
            line_count: 15,
            ..Default::default()
        })
        .unwrap();
        let seed = g.resolve("s00003").unwrap();
        let a = subgraph_by_scale(&g, 40, seed).unwrap();
        let seed_a = a.resolve(g.vertex(seed).id.as_str()).unwrap();
        let b = subgraph_by_scale(&a, 40, seed_a).unwrap();
        assert_eq!(a, b);
    }
}
