//! Superconcentrator and layer-dispersion checks over one block.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::flow::{EdgeFilter, FlowInstance};
use crate::error::{usage, Result};
use crate::graph::{NodeId, RiffleGraph};

/// Exhaustive enumeration is refused above this garlic.
pub const MAX_EXHAUSTIVE_GARLIC: u32 = 3;

/// Witnesses kept in a report; the full count is reported separately.
const MAX_WITNESSES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

/// A terminal pair that routed fewer than `k` disjoint paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub k: usize,
    pub inputs: Vec<u32>,
    pub outputs: Vec<u32>,
    pub flow: usize,
}

/// Machine-readable check result.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub params: serde_json::Value,
    pub trials: usize,
    pub failures: Vec<Witness>,
    pub failure_count: usize,
    pub pass: bool,
}

impl CheckReport {
    fn from_results(check: &str, params: serde_json::Value, results: Vec<Option<Witness>>) -> Self {
        let trials = results.len();
        let all: Vec<Witness> = results.into_iter().flatten().collect();
        let failure_count = all.len();
        CheckReport {
            check: check.to_string(),
            params,
            trials,
            failures: all.into_iter().take(MAX_WITNESSES).collect(),
            failure_count,
            pass: failure_count == 0,
        }
    }
}

/// All size-`k` subsets of `[0, n)` in lexicographic order.
pub(crate) fn combinations(n: u32, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = (0..k as u32).collect();
    if k as u32 > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        // rightmost position that can still advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - (k - i) as u32 {
                break;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn random_subset<R: Rng>(rng: &mut R, n: u32, k: usize) -> Vec<u32> {
    let mut v: Vec<u32> = sample(rng, n as usize, k).into_iter().map(|x| x as u32).collect();
    v.sort_unstable();
    v
}

fn probe(flow: &FlowInstance, in_row: u32, out_row: u32, inputs: Vec<u32>, outputs: Vec<u32>) -> Option<Witness> {
    let k = inputs.len();
    let s: Vec<NodeId> = inputs.iter().map(|&c| NodeId::new(in_row, c)).collect();
    let t: Vec<NodeId> = outputs.iter().map(|&c| NodeId::new(out_row, c)).collect();
    let f = flow.disjoint_paths(&s, &t).expect("terminals are valid and disjoint");
    (f < k).then_some(Witness {
        k,
        inputs,
        outputs,
        flow: f,
    })
}

/// Verifies that every `k` inputs (row 0) can be joined to every `k`
/// outputs (row `2g`) by `k` vertex-disjoint paths.
pub fn check_superconcentrator(graph: &RiffleGraph, mode: CheckMode) -> Result<CheckReport> {
    if graph.lambda() != 1 {
        return usage("superconcentrator check runs on a single block (lambda = 1)");
    }
    let g = graph.g();
    let n = graph.width() as u32;
    let out_row = 2 * g;
    let flow = FlowInstance::new(graph, EdgeFilter::All);

    let (results, params) = match mode {
        CheckMode::Exhaustive => {
            if g > MAX_EXHAUSTIVE_GARLIC {
                return usage(format!(
                    "exhaustive check refused for g = {g} > {MAX_EXHAUSTIVE_GARLIC}; use sampled mode"
                ));
            }
            let pairs: Vec<(Vec<u32>, Vec<u32>)> = (1..=n as usize)
                .flat_map(|k| {
                    let subsets = combinations(n, k);
                    let mut v = Vec::with_capacity(subsets.len() * subsets.len());
                    for a in &subsets {
                        for b in &subsets {
                            v.push((a.clone(), b.clone()));
                        }
                    }
                    v
                })
                .collect();
            let results = pairs
                .into_par_iter()
                .map(|(a, b)| probe(&flow, 0, out_row, a, b))
                .collect();
            (results, json!({"g": g, "mode": "exhaustive"}))
        }
        CheckMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let draws: Vec<(Vec<u32>, Vec<u32>)> = (0..samples)
                .map(|_| {
                    let k = rng.gen_range(1..=n as usize);
                    (random_subset(&mut rng, n, k), random_subset(&mut rng, n, k))
                })
                .collect();
            let results = draws
                .into_par_iter()
                .map(|(a, b)| probe(&flow, 0, out_row, a, b))
                .collect();
            (
                results,
                json!({"g": g, "mode": "sampled", "samples": samples, "seed": seed}),
            )
        }
    };
    Ok(CheckReport::from_results("superconcentrator", params, results))
}

/// For `trials` random size-`h` subsets of a block's input and output rows,
/// checks that `h` vertex-disjoint paths exist over permutation edges only.
/// Such paths cross every layer once, so each has length `2g`.
pub fn layer_dispersion_report(
    graph: &RiffleGraph,
    block: u32,
    h: usize,
    trials: usize,
    seed: u64,
) -> Result<CheckReport> {
    let n = graph.width();
    if h == 0 || h > n {
        return usage(format!("h = {h} outside [1, {n}]"));
    }
    if block >= graph.lambda() {
        return usage(format!("block {block} outside [0, {})", graph.lambda()));
    }
    let g = graph.g();
    let in_row = 2 * g * block;
    let out_row = in_row + 2 * g;
    let flow = FlowInstance::new(graph, EdgeFilter::InterLayerOnly);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<(Vec<u32>, Vec<u32>)> = (0..trials)
        .map(|_| (random_subset(&mut rng, n as u32, h), random_subset(&mut rng, n as u32, h)))
        .collect();
    let results = draws
        .into_par_iter()
        .map(|(a, b)| probe(&flow, in_row, out_row, a, b))
        .collect();
    Ok(CheckReport::from_results(
        "layer-dispersion",
        json!({"g": g, "block": block, "h": h, "seed": seed}),
        results,
    ))
}

pub fn check_layer_dispersion(graph: &RiffleGraph, block: u32, h: usize, trials: usize, seed: u64) -> Result<bool> {
    Ok(layer_dispersion_report(graph, block, h, trials, seed)?.pass)
}
