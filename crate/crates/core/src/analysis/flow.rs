//! Unit-capacity max-flow on node-split networks (Dinic).

use std::collections::VecDeque;

use crate::error::{usage, Result};
use crate::graph::{NodeId, RiffleGraph};

/// Which edges of the graph a flow query may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeFilter {
    All,
    /// Only permutation edges between consecutive rows. Horizontal edges
    /// and the `(r, N-1) -> (r+1, 0)` wrap are excluded.
    InterLayerOnly,
}

#[derive(Debug, Clone)]
struct Arc {
    to: u32,
    cap: u8,
}

/// Residual network with a fixed arc list; terminal arcs are appended per
/// query on a clone.
#[derive(Debug, Clone)]
struct Dinic {
    adj: Vec<Vec<u32>>,
    arcs: Vec<Arc>,
}

impl Dinic {
    fn with_nodes(n: usize) -> Self {
        Dinic {
            adj: vec![Vec::new(); n],
            arcs: Vec::new(),
        }
    }

    fn add_node(&mut self) -> u32 {
        self.adj.push(Vec::new());
        self.adj.len() as u32 - 1
    }

    fn add_arc(&mut self, from: u32, to: u32, cap: u8) {
        let id = self.arcs.len() as u32;
        self.arcs.push(Arc { to, cap });
        self.arcs.push(Arc { to: from, cap: 0 });
        self.adj[from as usize].push(id);
        self.adj[to as usize].push(id + 1);
    }

    fn levels(&self, s: u32, t: u32) -> Option<Vec<u32>> {
        let mut level = vec![u32::MAX; self.adj.len()];
        level[s as usize] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &a in &self.adj[u as usize] {
                let arc = &self.arcs[a as usize];
                if arc.cap > 0 && level[arc.to as usize] == u32::MAX {
                    level[arc.to as usize] = level[u as usize] + 1;
                    q.push_back(arc.to);
                }
            }
        }
        (level[t as usize] != u32::MAX).then_some(level)
    }

    /// Finds one augmenting path in the level graph; iterative to keep deep
    /// layered networks off the call stack.
    fn augment(&mut self, s: u32, t: u32, level: &[u32], next: &mut [usize]) -> bool {
        let mut path: Vec<u32> = Vec::new();
        let mut u = s;
        loop {
            if u == t {
                for &a in &path {
                    self.arcs[a as usize].cap -= 1;
                    self.arcs[(a ^ 1) as usize].cap += 1;
                }
                return true;
            }
            let mut advanced = false;
            while next[u as usize] < self.adj[u as usize].len() {
                let a = self.adj[u as usize][next[u as usize]];
                let arc = &self.arcs[a as usize];
                if arc.cap > 0 && level[arc.to as usize] == level[u as usize] + 1 {
                    path.push(a);
                    u = arc.to;
                    advanced = true;
                    break;
                }
                next[u as usize] += 1;
            }
            if !advanced {
                // dead end: retreat
                match path.pop() {
                    None => return false,
                    Some(a) => {
                        u = self.arcs[(a ^ 1) as usize].to;
                        next[u as usize] += 1;
                    }
                }
            }
        }
    }

    fn max_flow(&mut self, s: u32, t: u32) -> usize {
        let mut flow = 0;
        while let Some(level) = self.levels(s, t) {
            let mut next = vec![0usize; self.adj.len()];
            while self.augment(s, t, &level, &mut next) {
                flow += 1;
            }
        }
        flow
    }
}

/// Node-split unit-capacity network derived from a graph: node `v` becomes
/// `in(v) -> out(v)` with capacity 1, so flow value equals the number of
/// vertex-disjoint paths (Menger).
#[derive(Debug, Clone)]
pub struct FlowInstance {
    base: Dinic,
    width: usize,
    rows: usize,
}

impl FlowInstance {
    pub fn new(graph: &RiffleGraph, filter: EdgeFilter) -> Self {
        let n = graph.node_count();
        let mut base = Dinic::with_nodes(2 * n);
        let last = graph.width() as u32 - 1;
        for v in 0..n {
            base.add_arc(2 * v as u32, 2 * v as u32 + 1, 1);
        }
        for v in 0..n {
            let node = graph.node_at(v);
            for p in graph.parents_by_index(v) {
                let keep = match filter {
                    EdgeFilter::All => true,
                    EdgeFilter::InterLayerOnly => {
                        p.row + 1 == node.row && !(p.col == last && node.col == 0)
                    }
                };
                if keep {
                    base.add_arc(2 * graph.index_of(*p) as u32 + 1, 2 * v as u32, 1);
                }
            }
        }
        FlowInstance {
            base,
            width: graph.width(),
            rows: graph.row_count(),
        }
    }

    fn index(&self, n: NodeId) -> Result<u32> {
        if n.row as usize >= self.rows || n.col as usize >= self.width {
            return usage(format!("terminal ({}, {}) outside the graph", n.row, n.col));
        }
        Ok(n.row * self.width as u32 + n.col)
    }

    /// Maximum number of vertex-disjoint paths from `sources` to `sinks`.
    pub fn disjoint_paths(&self, sources: &[NodeId], sinks: &[NodeId]) -> Result<usize> {
        if sources.is_empty() || sinks.is_empty() {
            return usage("terminal sets must be non-empty");
        }
        let src: Vec<u32> = sources.iter().map(|&n| self.index(n)).collect::<Result<_>>()?;
        let dst: Vec<u32> = sinks.iter().map(|&n| self.index(n)).collect::<Result<_>>()?;
        if src.iter().any(|s| dst.contains(s)) {
            return usage("sources and sinks must be disjoint");
        }
        let mut net = self.base.clone();
        let s = net.add_node();
        let t = net.add_node();
        for v in src {
            net.add_arc(s, 2 * v, 1);
        }
        for v in dst {
            net.add_arc(2 * v + 1, t, 1);
        }
        Ok(net.max_flow(s, t))
    }
}

/// Maximum number of pairwise vertex-disjoint directed paths from
/// `sources` to `sinks`.
pub fn max_vertex_disjoint_paths(
    graph: &RiffleGraph,
    sources: &[NodeId],
    sinks: &[NodeId],
    filter: EdgeFilter,
) -> Result<usize> {
    FlowInstance::new(graph, filter).disjoint_paths(sources, sinks)
}
