use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{NodeId, RiffleGraph};
use crate::error::{usage, Error, Result};
use crate::permute::BitWord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dot" => Ok(ExportFormat::Dot),
            "json" | "adjacency-json" => Ok(ExportFormat::Json),
            other => usage(format!("unsupported export format {other:?}")),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct AdjacencyJson {
    g: u32,
    lambda: u32,
    words: Vec<String>,
    parents: Vec<Vec<[u32; 2]>>,
}

pub fn export_graph(graph: &RiffleGraph, format: ExportFormat) -> Vec<u8> {
    match format {
        ExportFormat::Dot => to_dot(graph).into_bytes(),
        ExportFormat::Json => {
            let doc = AdjacencyJson {
                g: graph.g(),
                lambda: graph.lambda(),
                words: graph.layer_words().iter().map(|w| w.to_string()).collect(),
                parents: (0..graph.node_count())
                    .map(|v| {
                        graph
                            .parents_by_index(v)
                            .iter()
                            .map(|p| [p.row, p.col])
                            .collect()
                    })
                    .collect(),
            };
            serde_json::to_vec(&doc).expect("plain data serialises")
        }
    }
}

fn node_name(n: NodeId) -> String {
    format!("\"v_{}^{}\"", n.col, n.row)
}

fn to_dot(graph: &RiffleGraph) -> String {
    let mut out = String::new();
    out.push_str("digraph riffle {\n");
    for n in graph.nodes() {
        let _ = writeln!(out, "  {};", node_name(n));
    }
    for n in graph.nodes() {
        for p in graph.parents_by_index(graph.index_of(n)) {
            let _ = writeln!(out, "  {} -> {};", node_name(*p), node_name(n));
        }
    }
    out.push_str("}\n");
    out
}

/// Reads the adjacency JSON written by [`export_graph`].
pub fn import_json(bytes: &[u8]) -> Result<RiffleGraph> {
    let doc: AdjacencyJson =
        serde_json::from_slice(bytes).map_err(|e| Error::Decode(format!("graph json: {e}")))?;
    let words = doc
        .words
        .iter()
        .map(|w| w.parse::<BitWord>())
        .collect::<Result<Vec<_>>>()?;
    let table = doc
        .parents
        .into_iter()
        .map(|list| list.into_iter().map(|[r, c]| NodeId::new(r, c)).collect())
        .collect();
    RiffleGraph::from_parent_table(doc.g, doc.lambda, words, table)
}
