//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;

use rifflescrambler::{NodeId, RiffleGraph};
use sha2::{Digest as _, Sha256};

pub const SALT: [u8; 16] = [
    0x00, 0x11, 0x22, 0x33, 0x44, 0x55, 0x66, 0x77, 0x88, 0x99, 0xaa, 0xbb, 0xcc, 0xdd, 0xee, 0xff,
];

/// Deterministic salts for sweeps.
pub fn salts(count: usize, tag: u8) -> Vec<Vec<u8>> {
    (0..count)
        .map(|i| {
            let mut h = Sha256::new();
            h.update([tag]);
            h.update((i as u64).to_le_bytes());
            h.finalize()[..16].to_vec()
        })
        .collect()
}

/// Child lists rebuilt from the parent table. With `inter_layer_only`,
/// horizontal edges and the row wrap are left out.
pub fn children(graph: &RiffleGraph, inter_layer_only: bool) -> Vec<Vec<usize>> {
    let n = graph.node_count();
    let last = graph.width() as u32 - 1;
    let mut out = vec![Vec::new(); n];
    for v in 0..n {
        let node = graph.node_at(v);
        for p in graph.parents_by_index(v) {
            let horizontal = p.row == node.row;
            let wrap = p.row + 1 == node.row && p.col == last && node.col == 0;
            if inter_layer_only && (horizontal || wrap) {
                continue;
            }
            out[graph.index_of(*p)].push(v);
        }
    }
    out
}

/// Largest number of vertex-disjoint paths from `sources` to `sinks`, by
/// exhaustive backtracking over simple paths.
pub fn brute_disjoint_paths(
    graph: &RiffleGraph,
    sources: &[NodeId],
    sinks: &[NodeId],
    inter_layer_only: bool,
) -> usize {
    let kids = children(graph, inter_layer_only);
    let src: Vec<usize> = sources.iter().map(|&s| graph.index_of(s)).collect();
    let mut is_sink = vec![false; graph.node_count()];
    for &t in sinks {
        is_sink[graph.index_of(t)] = true;
    }
    let mut used = vec![false; graph.node_count()];
    let mut best = 0;
    route(&kids, &src, 0, &is_sink, &mut used, 0, &mut best);
    best
}

fn route(
    kids: &[Vec<usize>],
    src: &[usize],
    i: usize,
    is_sink: &[bool],
    used: &mut [bool],
    found: usize,
    best: &mut usize,
) {
    *best = (*best).max(found);
    if i == src.len() || found + (src.len() - i) <= *best {
        return;
    }
    let s = src[i];
    if !used[s] {
        let mut path = vec![s];
        used[s] = true;
        extend(kids, src, i, is_sink, used, &mut path, found, best);
        used[s] = false;
    }
    route(kids, src, i + 1, is_sink, used, found, best);
}

#[allow(clippy::too_many_arguments)]
fn extend(
    kids: &[Vec<usize>],
    src: &[usize],
    i: usize,
    is_sink: &[bool],
    used: &mut [bool],
    path: &mut Vec<usize>,
    found: usize,
    best: &mut usize,
) {
    let u = *path.last().unwrap();
    if is_sink[u] {
        route(kids, src, i + 1, is_sink, used, found + 1, best);
        return;
    }
    for &c in &kids[u] {
        if used[c] || found + (src.len() - i) <= *best {
            continue;
        }
        used[c] = true;
        path.push(c);
        extend(kids, src, i, is_sink, used, path, found, best);
        path.pop();
        used[c] = false;
    }
}

/// Fewest placements that pebble the last node with at most `budget`
/// pebbles, by 0-1 BFS over configurations. A step places one pebble whose
/// parents were all on and may drop others at the same time. Only usable
/// for graphs of up to ~24 nodes.
pub fn optimal_placements(graph: &RiffleGraph, budget: usize) -> Option<u64> {
    let n = graph.node_count();
    assert!(n <= 24, "state space too large");
    let parents: Vec<u32> = (0..n)
        .map(|v| graph.parents_by_index(v).iter().fold(0u32, |m, p| m | 1 << graph.index_of(*p)))
        .collect();
    let target = 1u32 << (n - 1);
    let mut dist = vec![u64::MAX; 1 << n];
    let mut queue = VecDeque::new();
    dist[0] = 0;
    queue.push_back(0u32);
    while let Some(c) = queue.pop_front() {
        let d = dist[c as usize];
        if c & target != 0 {
            return Some(d);
        }
        let mut relax = |next: u32, cost: u64, queue: &mut VecDeque<u32>| {
            if d + cost < dist[next as usize] {
                dist[next as usize] = d + cost;
                if cost == 0 {
                    queue.push_front(next);
                } else {
                    queue.push_back(next);
                }
            }
        };
        for u in 0..n {
            if c & (1 << u) != 0 {
                relax(c & !(1 << u), 0, &mut queue);
            }
        }
        let count = c.count_ones() as usize;
        for v in 0..n {
            let bit = 1u32 << v;
            if c & bit != 0 || c & parents[v] != parents[v] {
                continue;
            }
            if count < budget {
                relax(c | bit, 1, &mut queue);
            } else {
                for u in 0..n {
                    if c & (1 << u) != 0 {
                        relax((c | bit) & !(1 << u), 1, &mut queue);
                    }
                }
            }
        }
    }
    None
}

fn sha(parts: &[&[u8]]) -> [u8; 32] {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p);
    }
    h.finalize().into()
}

/// The whole g = 1, lambda = 1 evaluation written out by hand.
///
/// With two columns every traced word is balanced and induces the same
/// edge pairs, so the graph is fixed:
///   (1,0) <- (0,0) (0,1)
///   (1,1) <- (1,0) (0,0) (0,1)
///   (2,0) <- (1,0) (1,1)
///   (2,1) <- (2,0) (1,0) (1,1)
/// Each label folds its parents in order, starting from 32 zero bytes.
pub fn transcript_g1(password: &[u8]) -> [u8; 32] {
    let zero = [0u8; 32];
    let l00 = sha(&[password]);
    let l01 = sha(&[&l00]);

    let l10 = sha(&[&sha(&[&zero, &l00]), &l01]);
    let l11 = sha(&[&sha(&[&sha(&[&zero, &l10]), &l00]), &l01]);

    let l20 = sha(&[&sha(&[&zero, &l10]), &l11]);
    sha(&[&sha(&[&sha(&[&zero, &l20]), &l10]), &l11])
}
