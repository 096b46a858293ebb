//! Weighted DAGs, literal enforcement and the static shortest path.

mod enforce;
mod graph;
mod path;

pub use enforce::{DagMark, EnforceError, InducedDag};
pub use graph::{topological_sort, Arc, ArcId, Dag, DagError, VertexId};
pub use path::{path_in_graph, shortest_path, shortest_path_masked, Path, SearchStats, SpResult};
