//! Rainbow spanning trees in randomly colored percolation subgraphs of
//! dense regular graphs: host construction, the multiple-exposure random
//! model, the exchange-based forest builder, exact decision procedures,
//! lemma checkers and the Monte Carlo harness.

pub mod dsu;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod lemmas;
pub mod random;

pub use error::{Error, Result};
pub use graph::{build_host, components, edge_connectivity, EdgeId, Graph, HostSpec, Partition};
pub use random::{Color, ColoredEdge, ColoredSubgraph, ExposureStack, ModelParams, RandomStream};
