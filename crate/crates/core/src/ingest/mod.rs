//! Graph construction: GTFS static feeds, synthetic test networks,
//! scale-limited subgraph extraction, and graph persistence.

mod gtfs;
mod persist;
mod subgraph;
mod synthetic;

pub use gtfs::{build_graph, load_feed, GtfsFeed, IngestSummary};
pub use persist::{load_graph, save_graph, GraphFormat};
pub use subgraph::subgraph_by_scale;
pub use synthetic::{generate_synthetic, SyntheticSpec};
