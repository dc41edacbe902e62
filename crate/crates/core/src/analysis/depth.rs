use std::collections::HashSet;

use crate::graph::{NodeId, RiffleGraph};

/// Longest directed path, in edges, of `graph` with `removed` deleted.
/// An empty remainder has depth 0.
pub fn graph_depth(graph: &RiffleGraph, removed: &HashSet<NodeId>) -> usize {
    let n = graph.node_count();
    // node index order is a topological order
    let mut depth: Vec<Option<usize>> = vec![None; n];
    let mut best = 0;
    for v in 0..n {
        if removed.contains(&graph.node_at(v)) {
            continue;
        }
        let d = graph
            .parents_by_index(v)
            .iter()
            .filter_map(|p| depth[graph.index_of(*p)])
            .map(|d| d + 1)
            .max()
            .unwrap_or(0);
        depth[v] = Some(d);
        best = best.max(d);
    }
    best
}
