//! Empirical checks on riffle graphs: disjoint paths, superconcentration,
//! layer dispersion, pebbling and depth.

pub mod concentrator;
mod depth;
pub mod flow;
pub mod pebbling;

pub use concentrator::{
    check_layer_dispersion, check_superconcentrator, layer_dispersion_report, CheckMode, CheckReport, Witness,
    MAX_EXHAUSTIVE_GARLIC,
};
pub use depth::graph_depth;
pub use flow::{max_vertex_disjoint_paths, EdgeFilter, FlowInstance};
pub use pebbling::{
    check_legality, pebble_metrics, sequential_lower_bound, simulate_pebbling, simulate_pebbling_capped,
    ComplexityReport, PebbleFailure, PebbleTrace, Strategy,
};
