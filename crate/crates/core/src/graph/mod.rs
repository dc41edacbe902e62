//! Construction, validation and export of the stacked double riffle graph.
//!
//! A block has rows `0..=2g`, each of `N = 2^g` nodes. Every row carries a
//! horizontal chain `(r, i-1) -> (r, i)`, consecutive rows are joined by a
//! wrap edge `(r, N-1) -> (r+1, 0)`, and the layer between rows `l` and
//! `l+1` carries permutation edges:
//!
//! * upper layers `l < g` use traced word `W = words[l]` with edges
//!   `s -> pi_W(s)` and `s -> pi_{!W}(s)`;
//! * lower layers `l = g + m` are the upper layer `g - 1 - m` with every
//!   edge reversed.
//!
//! `lambda` blocks are stacked by sharing row `2g` of one block with row 0
//! of the next, so the full graph has rows `0..=2*lambda*g`.

mod export;
mod index;

use std::collections::BTreeSet;

use serde::Serialize;

pub use export::{export_graph, import_json, ExportFormat};
pub use index::LayerIndex;

use crate::error::{usage, Result};
use crate::hashfn::HashFunction;
use crate::permute::{inverse_riffle_shuffle, riffle_permutation, BitWord, Permutation};
use crate::trajectory::{binary_representation, trace_trajectories};

/// A node of the stacked graph, addressed by row and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NodeId {
    pub row: u32,
    pub col: u32,
}

impl NodeId {
    pub const fn new(row: u32, col: u32) -> Self {
        NodeId { row, col }
    }
}

/// Inter-layer column edges `(source_col, target_col)` of a block layer,
/// computed from the traced words alone.
pub fn layer_edges(words: &[BitWord], layer: usize) -> BTreeSet<(u32, u32)> {
    let g = words.len();
    assert!(layer < 2 * g, "layer {layer} out of range for g = {g}");
    let (word, reversed) = if layer < g {
        (&words[layer], false)
    } else {
        (&words[2 * g - 1 - layer], true)
    };
    let p = riffle_permutation(word);
    let q = riffle_permutation(&word.complement());
    let mut edges = BTreeSet::new();
    for s in 0..word.len() {
        for t in [p.image(s), q.image(s)] {
            let (a, b) = (s as u32, t as u32);
            edges.insert(if reversed { (b, a) } else { (a, b) });
        }
    }
    edges
}

/// The salt-dependent computation graph with its full parent table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RiffleGraph {
    g: u32,
    lambda: u32,
    words: Vec<BitWord>,
    offsets: Vec<u32>,
    parents: Vec<NodeId>,
}

impl RiffleGraph {
    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn lambda(&self) -> u32 {
        self.lambda
    }

    /// Columns per row.
    pub fn width(&self) -> usize {
        1 << self.g
    }

    /// Number of rows, `2 * lambda * g + 1`.
    pub fn row_count(&self) -> usize {
        2 * self.lambda as usize * self.g as usize + 1
    }

    pub fn node_count(&self) -> usize {
        self.width() * self.row_count()
    }

    pub fn edge_count(&self) -> usize {
        self.parents.len()
    }

    /// Traced layer words, one per upper layer of a block.
    pub fn layer_words(&self) -> &[BitWord] {
        &self.words
    }

    #[inline]
    pub fn index_of(&self, node: NodeId) -> usize {
        node.row as usize * self.width() + node.col as usize
    }

    #[inline]
    pub fn node_at(&self, index: usize) -> NodeId {
        NodeId::new((index / self.width()) as u32, (index % self.width()) as u32)
    }

    pub fn contains(&self, node: NodeId) -> bool {
        (node.row as usize) < self.row_count() && (node.col as usize) < self.width()
    }

    /// Canonical parent list: horizontal predecessor first, then parents in
    /// the previous row by ascending column, duplicates collapsed.
    pub fn parents(&self, node: NodeId) -> Result<&[NodeId]> {
        if !self.contains(node) {
            return usage(format!("node ({}, {}) is not in the graph", node.row, node.col));
        }
        Ok(self.parents_by_index(self.index_of(node)))
    }

    #[inline]
    pub fn parents_by_index(&self, index: usize) -> &[NodeId] {
        &self.parents[self.offsets[index] as usize..self.offsets[index + 1] as usize]
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_count()).map(|i| self.node_at(i))
    }

    /// Child lists, indexed like nodes.
    pub fn children(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.node_count()];
        for v in 0..self.node_count() {
            for p in self.parents_by_index(v) {
                out[self.index_of(*p)].push(v as u32);
            }
        }
        out
    }

    /// Inter-layer `(source_col, target_col)` pairs into `row` as recorded in
    /// the parent table. The pair `(N-1, 0)` is dropped because the wrap edge
    /// occupies it.
    pub fn table_layer_edges(&self, row: u32) -> BTreeSet<(u32, u32)> {
        assert!(row >= 1 && (row as usize) < self.row_count());
        let last = self.width() as u32 - 1;
        let mut set = BTreeSet::new();
        for col in 0..self.width() as u32 {
            let v = self.index_of(NodeId::new(row, col));
            for p in self.parents_by_index(v) {
                if p.row + 1 == row && !(p.col == last && col == 0) {
                    set.insert((p.col, col));
                }
            }
        }
        set
    }

    /// Builds a graph from an explicit parent table, checking only shape.
    pub fn from_parent_table(
        g: u32,
        lambda: u32,
        words: Vec<BitWord>,
        table: Vec<Vec<NodeId>>,
    ) -> Result<Self> {
        check_dims(g, lambda)?;
        let width = 1usize << g;
        if words.len() != g as usize || words.iter().any(|w| w.len() != width) {
            return usage(format!("expected {g} layer words of length {width}"));
        }
        let rows = 2 * lambda as usize * g as usize + 1;
        if table.len() != rows * width {
            return usage(format!(
                "parent table has {} entries, expected {}",
                table.len(),
                rows * width
            ));
        }
        let mut offsets = Vec::with_capacity(table.len() + 1);
        let mut parents = Vec::new();
        offsets.push(0u32);
        for list in table {
            for p in &list {
                if p.row as usize >= rows || p.col as usize >= width {
                    return usage(format!("parent ({}, {}) outside the graph", p.row, p.col));
                }
            }
            parents.extend(list);
            offsets.push(parents.len() as u32);
        }
        Ok(RiffleGraph {
            g,
            lambda,
            words,
            offsets,
            parents,
        })
    }

    /// Same horizontal/wrap skeleton but every permutation layer replaced by
    /// identity edges `s -> s`. Used as a negative control.
    pub fn identity_layers(g: u32, lambda: u32) -> Result<Self> {
        check_dims(g, lambda)?;
        let width = 1usize << g;
        let words = (0..g).map(|_| BitWord::zeros(width)).collect();
        let rows = 2 * lambda as usize * g as usize + 1;
        let layers: Vec<BTreeSet<(u32, u32)>> = vec![(0..width as u32).map(|s| (s, s)).collect(); 2 * g as usize];
        let table = build_table(g, rows, &layers);
        RiffleGraph::from_parent_table(g, lambda, words, table)
    }

    /// Copy of the graph with one parent relation removed.
    pub fn without_edge(&self, parent: NodeId, child: NodeId) -> Result<Self> {
        let mut table: Vec<Vec<NodeId>> = (0..self.node_count())
            .map(|v| self.parents_by_index(v).to_vec())
            .collect();
        let list = &mut table[self.index_of(child)];
        let before = list.len();
        list.retain(|p| *p != parent);
        if list.len() == before {
            return usage("edge not present");
        }
        RiffleGraph::from_parent_table(self.g, self.lambda, self.words.clone(), table)
    }

    /// Heap bytes held by the parent table.
    pub fn table_bytes(&self) -> usize {
        self.parents.capacity() * std::mem::size_of::<NodeId>()
            + self.offsets.capacity() * std::mem::size_of::<u32>()
    }
}

fn check_dims(g: u32, lambda: u32) -> Result<()> {
    if g == 0 || g > 24 {
        return usage(format!("garlic {g} outside [1, 24]"));
    }
    if lambda == 0 {
        return usage("lambda must be at least 1");
    }
    Ok(())
}

fn build_table(g: u32, rows: usize, layers: &[BTreeSet<(u32, u32)>]) -> Vec<Vec<NodeId>> {
    let width = 1u32 << g;
    let block_layers = 2 * g as usize;
    // incoming[col] per layer
    let incoming: Vec<Vec<Vec<u32>>> = layers
        .iter()
        .map(|edges| {
            let mut inc = vec![Vec::new(); width as usize];
            for &(s, t) in edges {
                inc[t as usize].push(s);
            }
            inc
        })
        .collect();
    let mut table = Vec::with_capacity(rows * width as usize);
    for row in 0..rows as u32 {
        for col in 0..width {
            let mut list = Vec::with_capacity(3);
            if col > 0 {
                list.push(NodeId::new(row, col - 1));
            }
            if row > 0 {
                let layer = (row as usize - 1) % block_layers;
                let mut prev: Vec<u32> = incoming[layer][col as usize].clone();
                if col == 0 {
                    prev.push(width - 1);
                }
                prev.sort_unstable();
                prev.dedup();
                list.extend(prev.into_iter().map(|c| NodeId::new(row - 1, c)));
            }
            table.push(list);
        }
    }
    table
}

/// Builds the `(2^g, lambda)` graph whose layer words are the traced
/// trajectories of `sigma`.
pub fn gen_graph(g: u32, sigma: &Permutation, lambda: u32) -> Result<RiffleGraph> {
    check_dims(g, lambda)?;
    let traced = trace_trajectories(&binary_representation(sigma, g)?);
    graph_from_words(g, traced.into_columns(), lambda)
}

/// Builds the graph from already-traced layer words.
pub fn graph_from_words(g: u32, words: Vec<BitWord>, lambda: u32) -> Result<RiffleGraph> {
    check_dims(g, lambda)?;
    let width = 1usize << g;
    if words.len() != g as usize || words.iter().any(|w| w.len() != width) {
        return usage(format!("expected {g} layer words of length {width}"));
    }
    let layers: Vec<_> = (0..2 * g as usize).map(|l| layer_edges(&words, l)).collect();
    let rows = 2 * lambda as usize * g as usize + 1;
    let table = build_table(g, rows, &layers);
    RiffleGraph::from_parent_table(g, lambda, words, table)
}

/// Shuffles `2^g` cards under `salt` and builds the resulting graph.
pub fn graph_for_salt<H: HashFunction + ?Sized>(
    hash: &H,
    g: u32,
    salt: &[u8],
    lambda: u32,
) -> Result<RiffleGraph> {
    check_dims(g, lambda)?;
    let sigma = inverse_riffle_shuffle(hash, 1usize << g, salt)?.permutation;
    gen_graph(g, &sigma, lambda)
}

/// Outcome of [`validate_structure`].
#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub g: u32,
    pub lambda: u32,
    pub node_count: usize,
    pub expected_node_count: usize,
    pub edge_count: usize,
    pub horizontal_edges: usize,
    pub expected_horizontal_edges: usize,
    pub max_indegree: usize,
    pub sources: Vec<NodeId>,
    pub sinks: Vec<NodeId>,
    pub topological_order_ok: bool,
    pub mirror_symmetric: bool,
    pub failures: Vec<String>,
    pub pass: bool,
}

/// Checks node count, indegree bound, unique source and sink, mirror
/// symmetry of the lower layers and that `(row, col)` order is topological.
pub fn validate_structure(graph: &RiffleGraph) -> StructureReport {
    let mut failures = Vec::new();
    let width = graph.width();
    let g = graph.g as usize;
    let node_count = graph.node_count();
    let expected_node_count = width * (2 * graph.lambda as usize * g + 1);
    if node_count != expected_node_count {
        failures.push(format!("node count {node_count} != {expected_node_count}"));
    }

    let mut max_indegree = 0;
    let mut horizontal = 0;
    let mut has_child = vec![false; node_count];
    let mut topo_ok = true;
    let mut sources = Vec::new();
    for v in 0..node_count {
        let node = graph.node_at(v);
        let ps = graph.parents_by_index(v);
        max_indegree = max_indegree.max(ps.len());
        if ps.is_empty() {
            sources.push(node);
        }
        if node.row == 0 && node.col > 0 && ps.len() != 1 {
            failures.push(format!("row-0 node ({}, {}) has indegree {}", node.row, node.col, ps.len()));
        }
        for p in ps {
            has_child[graph.index_of(*p)] = true;
            if p.row == node.row && p.col + 1 == node.col {
                horizontal += 1;
            }
            if *p >= node {
                topo_ok = false;
                failures.push(format!(
                    "edge ({}, {}) -> ({}, {}) goes backwards",
                    p.row, p.col, node.row, node.col
                ));
            }
        }
    }
    let sinks: Vec<NodeId> = (0..node_count)
        .filter(|&v| !has_child[v])
        .map(|v| graph.node_at(v))
        .collect();
    if max_indegree > 3 {
        failures.push(format!("max indegree {max_indegree} exceeds 3"));
    }
    if sources != [NodeId::new(0, 0)] {
        failures.push(format!("sources {sources:?}, expected only (0, 0)"));
    }
    let last = NodeId::new(graph.row_count() as u32 - 1, width as u32 - 1);
    if sinks != [last] {
        failures.push(format!("sinks {sinks:?}, expected only ({}, {})", last.row, last.col));
    }
    let expected_horizontal = graph.row_count() * (width - 1);
    if horizontal != expected_horizontal {
        failures.push(format!("{horizontal} horizontal edges, expected {expected_horizontal}"));
    }

    let mut mirror_ok = true;
    for block in 0..graph.lambda as usize {
        let base = (block * 2 * g) as u32;
        for m in 0..g as u32 {
            let upper = graph.table_layer_edges(base + g as u32 - m);
            let lower = graph.table_layer_edges(base + g as u32 + m + 1);
            // The table cannot show (N-1, 0), so drop it and its reversal on
            // both sides. Only g = 1 has these pairs as permutation edges.
            let last = width as u32 - 1;
            let keep = |e: &(u32, u32)| *e != (last, 0) && *e != (0, last);
            let reversed: BTreeSet<(u32, u32)> = upper.iter().map(|&(s, t)| (t, s)).filter(keep).collect();
            let lower: BTreeSet<(u32, u32)> = lower.into_iter().filter(keep).collect();
            if reversed != lower {
                mirror_ok = false;
                failures.push(format!(
                    "block {block}: lower layer {m} is not the reversal of upper layer {}",
                    g as u32 - 1 - m
                ));
            }
        }
    }

    StructureReport {
        g: graph.g,
        lambda: graph.lambda,
        node_count,
        expected_node_count,
        edge_count: graph.edge_count(),
        horizontal_edges: horizontal,
        expected_horizontal_edges: expected_horizontal,
        max_indegree,
        sources,
        sinks,
        topological_order_ok: topo_ok,
        mirror_symmetric: mirror_ok,
        pass: failures.is_empty(),
        failures,
    }
}
