//! Graph persistence: a checksummed little-endian binary format and a JSON
//! variant of the same schema. The two round-trip losslessly through each
//! other.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BusId, DmeGraph, DurationSecs, Edge, Timestamp, Vertex, VertexId};

const MAGIC: &[u8; 4] = b"DMEG";
const FORMAT_VERSION: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Binary,
    Json,
}

impl GraphFormat {
    /// `.json` saves the text variant; anything else the binary form.
    pub fn for_path(path: &Path) -> GraphFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => GraphFormat::Json,
            _ => GraphFormat::Binary,
        }
    }
}

// Serialization mirror of the graph; shared by both formats.
#[derive(Debug, Serialize, Deserialize)]
struct GraphDoc {
    format_version: u16,
    v_max: f64,
    buses: Vec<String>,
    vertices: Vec<VertexDoc>,
    edges: Vec<EdgeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct VertexDoc {
    id: String,
    name: String,
    lat: f64,
    lon: f64,
    /// (bus index, sorted arrival timestamps) runs.
    schedule: Vec<(u32, Vec<u32>)>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeDoc {
    from: u32,
    to: u32,
    bus: u32,
    ride: u32,
}

impl GraphDoc {
    fn from_graph(g: &DmeGraph) -> GraphDoc {
        GraphDoc {
            format_version: FORMAT_VERSION,
            v_max: g.v_max(),
            buses: g.bus_names().to_vec(),
            vertices: g
                .vertices()
                .map(|(_, v)| VertexDoc {
                    id: v.id.clone(),
                    name: v.name.clone(),
                    lat: v.lat,
                    lon: v.lon,
                    schedule: v
                        .schedule
                        .iter()
                        .map(|(&b, ts)| (b.0, ts.iter().map(|t| t.0).collect()))
                        .collect(),
                })
                .collect(),
            edges: g
                .edges()
                .map(|e| EdgeDoc { from: e.from.0, to: e.to.0, bus: e.bus.0, ride: e.ride.0 })
                .collect(),
        }
    }

    fn into_graph(self) -> Result<DmeGraph> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported format version {}",
                self.format_version
            )));
        }
        let n = self.vertices.len() as u32;
        let nb = self.buses.len() as u32;
        let mut vertices = Vec::with_capacity(self.vertices.len());
        for v in self.vertices {
            let mut schedule = std::collections::BTreeMap::new();
            for (bus, ts) in v.schedule {
                if bus >= nb {
                    return Err(Error::Format(format!("schedule references bus {bus}")));
                }
                schedule.insert(BusId(bus), ts.into_iter().map(Timestamp).collect());
            }
            vertices.push(Vertex { id: v.id, name: v.name, lat: v.lat, lon: v.lon, schedule });
        }
        let mut out: Vec<Vec<Edge>> = vec![Vec::new(); vertices.len()];
        for e in self.edges {
            if e.from >= n || e.to >= n || e.bus >= nb {
                return Err(Error::Format(format!(
                    "edge ({}, {}, {}) out of bounds",
                    e.from, e.to, e.bus
                )));
            }
            out[e.from as usize].push(Edge {
                from: VertexId(e.from),
                to: VertexId(e.to),
                bus: BusId(e.bus),
                ride: DurationSecs(e.ride),
            });
        }
        Ok(DmeGraph::from_parts(vertices, out, self.buses, self.v_max))
    }
}

pub fn save_graph(g: &DmeGraph, path: &Path) -> Result<()> {
    let doc = GraphDoc::from_graph(g);
    let bytes = match GraphFormat::for_path(path) {
        GraphFormat::Json => serde_json::to_vec_pretty(&doc)
            .map_err(|e| Error::Format(e.to_string()))?,
        GraphFormat::Binary => encode_binary(&doc),
    };
    fs::write(path, bytes)?;
    Ok(())
}

/// Loads either format; the binary form is recognized by its magic bytes.
pub fn load_graph(path: &Path) -> Result<DmeGraph> {
    let bytes = fs::read(path)?;
    let doc = if bytes.starts_with(MAGIC) {
        decode_binary(&bytes)?
    } else {
        serde_json::from_slice(&bytes)
            .map_err(|e| Error::Format(format!("not a graph file: {e}")))?
    };
    doc.into_graph()
}

// --- binary encoding -------------------------------------------------------

struct Writer(Vec<u8>);

impl Writer {
    fn u16(&mut self, v: u16) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn str(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.0.extend_from_slice(s.as_bytes());
    }
}

fn encode_binary(doc: &GraphDoc) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(MAGIC);
    w.u16(doc.format_version);
    w.u32(doc.vertices.len() as u32);
    w.u32(doc.edges.len() as u32);
    w.f64(doc.v_max);
    w.u32(doc.buses.len() as u32);
    for b in &doc.buses {
        w.str(b);
    }
    for v in &doc.vertices {
        w.str(&v.id);
        w.str(&v.name);
        w.f64(v.lat);
        w.f64(v.lon);
        w.u32(v.schedule.len() as u32);
        for (bus, ts) in &v.schedule {
            w.u32(*bus);
            w.u32(ts.len() as u32);
            for &t in ts {
                w.u32(t);
            }
        }
    }
    for e in &doc.edges {
        w.u32(e.from);
        w.u32(e.to);
        w.u32(e.bus);
        w.u32(e.ride);
    }
    let checksum = fnv1a(&w.0);
    w.u64(checksum);
    w.0
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::Format("truncated graph file".into()));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn str(&mut self) -> Result<String> {
        let len = self.u32()? as usize;
        if len > self.bytes.len() {
            return Err(Error::Format("truncated graph file".into()));
        }
        String::from_utf8(self.take(len)?.to_vec())
            .map_err(|_| Error::Format("invalid utf-8 in graph file".into()))
    }
}

fn decode_binary(bytes: &[u8]) -> Result<GraphDoc> {
    if bytes.len() < MAGIC.len() + 8 {
        return Err(Error::Format("truncated graph file".into()));
    }
    let (payload, tail) = bytes.split_at(bytes.len() - 8);
    let stored = u64::from_le_bytes(tail.try_into().unwrap());
    if fnv1a(payload) != stored {
        return Err(Error::Format("checksum mismatch".into()));
    }

    let mut r = Reader { bytes: payload, pos: MAGIC.len() };
    let version = r.u16()?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported format version {version}")));
    }
    let vertex_count = r.u32()? as usize;
    let edge_count = r.u32()? as usize;
    let v_max = r.f64()?;
    let bus_count = r.u32()? as usize;
    let mut buses = Vec::with_capacity(bus_count.min(1 << 20));
    for _ in 0..bus_count {
        buses.push(r.str()?);
    }
    let mut vertices = Vec::with_capacity(vertex_count.min(1 << 20));
    for _ in 0..vertex_count {
        let id = r.str()?;
        let name = r.str()?;
        let lat = r.f64()?;
        let lon = r.f64()?;
        let runs = r.u32()? as usize;
        let mut schedule = Vec::with_capacity(runs.min(1 << 20));
        for _ in 0..runs {
            let bus = r.u32()?;
            let count = r.u32()? as usize;
            let mut ts = Vec::with_capacity(count.min(1 << 20));
            for _ in 0..count {
                ts.push(r.u32()?);
            }
            schedule.push((bus, ts));
        }
        vertices.push(VertexDoc { id, name, lat, lon, schedule });
    }
    let mut edges = Vec::with_capacity(edge_count.min(1 << 20));
    for _ in 0..edge_count {
        edges.push(EdgeDoc { from: r.u32()?, to: r.u32()?, bus: r.u32()?, ride: r.u32()? });
    }
    if r.pos != payload.len() {
        return Err(Error::Format("trailing bytes in graph file".into()));
    }
    Ok(GraphDoc { format_version: version, v_max, buses, vertices, edges })
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
