//! Sequential black-pebbling simulation and complexity metrics.
//!
//! A trace is a list of steps; step `i` places exactly one pebble and may
//! remove any number of pebbles at the same time. Removals are free. A
//! placement is legal when every parent of the placed node was pebbled at
//! the end of the previous step.
//!
//! The simulators produce upper bounds on pebbling cost for the given
//! strategy only. Optimal pebbling is intractable and not attempted.

use std::io::Write;

use serde::Serialize;

use crate::error::{usage, Result};
use crate::graph::{NodeId, RiffleGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// The evaluation order of the hash: rows top to bottom, columns left
    /// to right, dropping each pebble after its last child is placed.
    HonestRowwise,
    /// Pebbles nodes toward the sink in evaluation order, recomputing
    /// evicted parents on demand. At the budget it evicts the pebble whose
    /// next use is furthest away relative to its recomputation cost, and
    /// re-places evicted pebbles early while their parents are still held.
    GreedyBudget,
}

/// Default limit on placements before a greedy run is abandoned.
pub const DEFAULT_PLACEMENT_CAP: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PebbleTrace {
    node_count: usize,
    placed: Vec<u32>,
    // removals of step i are removed[removal_offsets[i]..removal_offsets[i+1]]
    removed: Vec<u32>,
    removal_offsets: Vec<u32>,
    pub placements: u64,
    pub legal: bool,
}

impl PebbleTrace {
    fn new(node_count: usize) -> Self {
        PebbleTrace {
            node_count,
            placed: Vec::new(),
            removed: Vec::new(),
            removal_offsets: vec![0],
            placements: 0,
            legal: false,
        }
    }

    fn push_step(&mut self, place: u32, remove: &[u32]) {
        self.placed.push(place);
        self.removed.extend_from_slice(remove);
        self.removal_offsets.push(self.removed.len() as u32);
        self.placements += 1;
    }

    pub fn steps(&self) -> usize {
        self.placed.len()
    }

    /// `(placed, removed)` for step `i`, 0-based. Configuration `i + 1` is
    /// the result of this step.
    pub fn step(&self, i: usize) -> (u32, &[u32]) {
        let r = &self.removed[self.removal_offsets[i] as usize..self.removal_offsets[i + 1] as usize];
        (self.placed[i], r)
    }

    /// Pebble counts `|P_1| .. |P_t|`.
    pub fn occupancy(&self) -> Vec<usize> {
        let mut on = vec![false; self.node_count];
        let mut count = 0usize;
        let mut out = Vec::with_capacity(self.steps());
        for i in 0..self.steps() {
            let (p, r) = self.step(i);
            for &x in r {
                if on[x as usize] {
                    on[x as usize] = false;
                    count -= 1;
                }
            }
            if !on[p as usize] {
                on[p as usize] = true;
                count += 1;
            }
            out.push(count);
        }
        out
    }

    /// Writes `step,placements,pebbles` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "step,placements,pebbles")?;
        for (i, n) in self.occupancy().into_iter().enumerate() {
            writeln!(out, "{},{},{}", i + 1, i + 1, n)?;
        }
        Ok(())
    }
}

/// Why a simulation stopped without pebbling the sink.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PebbleFailure {
    pub blocking: NodeId,
    pub reason: String,
    pub placements: u64,
}

/// Replays `trace` against the pebbling rules: the target set is the
/// sinks of `graph`, every placement needs all parents pebbled in the
/// previous configuration, and each step places exactly one pebble.
pub fn check_legality(graph: &RiffleGraph, trace: &PebbleTrace) -> bool {
    let n = graph.node_count();
    if trace.node_count != n {
        return false;
    }
    let mut on = vec![false; n];
    let mut ever = vec![false; n];
    for i in 0..trace.steps() {
        let (p, removed) = trace.step(i);
        let p = p as usize;
        if p >= n || removed.iter().any(|&x| x as usize >= n) {
            return false;
        }
        // parents are checked against P_{i-1}, before this step's removals
        if graph.parents_by_index(p).iter().any(|q| !on[graph.index_of(*q)]) {
            return false;
        }
        for &x in removed {
            on[x as usize] = false;
        }
        on[p] = true;
        ever[p] = true;
    }
    let mut has_child = vec![false; n];
    for v in 0..n {
        for q in graph.parents_by_index(v) {
            has_child[graph.index_of(*q)] = true;
        }
    }
    (0..n).filter(|&v| !has_child[v]).all(|v| ever[v])
}

/// Runs `strategy` on `graph`. `budget = None` means unlimited pebbles.
pub fn simulate_pebbling(
    graph: &RiffleGraph,
    strategy: Strategy,
    budget: Option<usize>,
) -> std::result::Result<PebbleTrace, PebbleFailure> {
    simulate_pebbling_capped(graph, strategy, budget, DEFAULT_PLACEMENT_CAP)
}

pub fn simulate_pebbling_capped(
    graph: &RiffleGraph,
    strategy: Strategy,
    budget: Option<usize>,
    placement_cap: u64,
) -> std::result::Result<PebbleTrace, PebbleFailure> {
    let mut trace = match strategy {
        Strategy::HonestRowwise => honest(graph, budget)?,
        Strategy::GreedyBudget => Greedy::new(graph, budget, placement_cap)?.run()?,
    };
    trace.legal = check_legality(graph, &trace);
    Ok(trace)
}

fn honest(graph: &RiffleGraph, budget: Option<usize>) -> std::result::Result<PebbleTrace, PebbleFailure> {
    let n = graph.node_count();
    // last_use[u] = index of u's last child in evaluation order
    let mut last_use = vec![None::<usize>; n];
    for v in 0..n {
        for q in graph.parents_by_index(v) {
            let u = graph.index_of(*q);
            last_use[u] = Some(last_use[u].map_or(v, |x: usize| x.max(v)));
        }
    }
    let mut dies_at: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (u, l) in last_use.iter().enumerate() {
        if let Some(l) = l {
            dies_at[*l].push(u as u32);
        }
    }
    let mut trace = PebbleTrace::new(n);
    let mut live = 0usize;
    for v in 0..n {
        live = live + 1 - dies_at[v].len();
        if let Some(b) = budget {
            if live > b {
                return Err(PebbleFailure {
                    blocking: graph.node_at(v),
                    reason: format!("row-wise evaluation needs {live} pebbles, budget is {b}"),
                    placements: trace.placements,
                });
            }
        }
        trace.push_step(v as u32, &dies_at[v]);
    }
    Ok(trace)
}

struct Greedy<'a> {
    graph: &'a RiffleGraph,
    budget: usize,
    cap: u64,
    children: Vec<Vec<u32>>,
    on: Vec<bool>,
    // stack depths of pending frames that still need this node
    wanted: Vec<Vec<u32>>,
    pinned: Vec<u32>,
    // evicted pebbles that still have children to come; the list may hold
    // stale entries
    rescuable: Vec<bool>,
    evicted: Vec<u32>,
    pebbles: Vec<u32>,
    slot: Vec<u32>,
    trace: PebbleTrace,
}

impl<'a> Greedy<'a> {
    fn new(
        graph: &'a RiffleGraph,
        budget: Option<usize>,
        cap: u64,
    ) -> std::result::Result<Self, PebbleFailure> {
        let n = graph.node_count();
        let max_indegree = (0..n).map(|v| graph.parents_by_index(v).len()).max().unwrap_or(0);
        let budget = budget.unwrap_or(usize::MAX);
        if budget < max_indegree + 1 {
            let blocking = (0..n)
                .find(|&v| graph.parents_by_index(v).len() == max_indegree)
                .map(|v| graph.node_at(v))
                .unwrap_or(NodeId::new(0, 0));
            return Err(PebbleFailure {
                blocking,
                reason: format!("budget {budget} is below max indegree + 1 = {}", max_indegree + 1),
                placements: 0,
            });
        }
        let mut children = graph.children();
        for c in &mut children {
            c.sort_unstable();
        }
        Ok(Greedy {
            graph,
            budget,
            cap,
            children,
            on: vec![false; n],
            wanted: vec![Vec::new(); n],
            pinned: vec![0; n],
            rescuable: vec![false; n],
            evicted: Vec::new(),
            pebbles: Vec::new(),
            slot: vec![u32::MAX; n],
            trace: PebbleTrace::new(n),
        })
    }

    fn static_next_use(&self, u: usize, now: usize) -> usize {
        let c = &self.children[u];
        let i = c.partition_point(|&x| (x as usize) < now);
        c.get(i).map_or(usize::MAX, |&x| x as usize)
    }

    /// Next step in evaluation order that needs `u`, counting the parents of
    /// evicted pebbles still waiting to be rescued.
    fn next_use(&self, u: usize, now: usize) -> usize {
        let own = self.static_next_use(u, now);
        self.children[u]
            .iter()
            .map(|&c| c as usize)
            .filter(|&c| self.rescuable[c])
            .map(|c| self.static_next_use(c, now))
            .fold(own, usize::min)
    }

    /// Larger keys are evicted first. Pebbles wanted by the demand stack are
    /// needed before any later target; deeper frames are served sooner.
    /// Otherwise the distance to the next use is weighed against a rough
    /// recomputation cost: parents that are gone, or will be dead by the
    /// next use, each need their own recomputation.
    fn eviction_key(&self, u: usize, now: usize, top: u32) -> (u8, u64) {
        if let Some(&d) = self.wanted[u].iter().rev().find(|&&d| d < top) {
            return (0, u64::MAX - d as u64);
        }
        let next = self.next_use(u, now);
        if next == usize::MAX {
            return (2, 0);
        }
        let lost = self
            .graph
            .parents_by_index(u)
            .iter()
            .map(|q| self.graph.index_of(*q))
            .filter(|&p| !self.on[p] || self.children[p].last().is_none_or(|&c| (c as usize) < next))
            .count() as u64;
        (1, ((next - now + 1) as u64 * 1024) / (1 + 4 * lost))
    }

    fn place(&mut self, v: usize, now: usize, top: u32) -> std::result::Result<(), PebbleFailure> {
        if self.trace.placements >= self.cap {
            return Err(PebbleFailure {
                blocking: self.graph.node_at(v),
                reason: format!("placement cap {} reached", self.cap),
                placements: self.trace.placements,
            });
        }
        let mut removed = None;
        if self.pebbles.len() >= self.budget {
            // the victim leaves in the same step, so v's own parents qualify
            let victim = self
                .pebbles
                .iter()
                .copied()
                .filter(|&u| self.pinned[u as usize] == 0)
                .max_by_key(|&u| (self.eviction_key(u as usize, now, top), u))
                .ok_or_else(|| PebbleFailure {
                    blocking: self.graph.node_at(v),
                    reason: format!("all {} pebbles are pinned", self.budget),
                    placements: self.trace.placements,
                })?;
            let s = self.slot[victim as usize] as usize;
            self.pebbles.swap_remove(s);
            if let Some(&moved) = self.pebbles.get(s) {
                self.slot[moved as usize] = s as u32;
            }
            self.slot[victim as usize] = u32::MAX;
            self.on[victim as usize] = false;
            removed = Some(victim);
            if self.static_next_use(victim as usize, now) != usize::MAX {
                self.rescuable[victim as usize] = true;
                self.evicted.push(victim);
            }
        }
        self.on[v] = true;
        self.rescuable[v] = false;
        self.slot[v] = self.pebbles.len() as u32;
        self.pebbles.push(v as u32);
        self.trace.push_step(v as u32, removed.as_slice());
        Ok(())
    }

    /// Pebbles `target`, recomputing evicted ancestors depth first. A
    /// frame pins each parent it has recomputed so later siblings cannot
    /// evict it; parents that were already pebbled stay evictable. The
    /// pins are released in the step that places the frame's node.
    fn ensure(&mut self, target: usize) -> std::result::Result<(), PebbleFailure> {
        let mut stack: Vec<(usize, Vec<usize>)> = Vec::new();
        self.push(&mut stack, target);
        while let Some((v, _)) = stack.last() {
            let v = *v;
            if self.on[v] {
                self.pop(&mut stack);
                continue;
            }
            let parents: Vec<usize> = self
                .graph
                .parents_by_index(v)
                .iter()
                .map(|q| self.graph.index_of(*q))
                .collect();
            match parents.iter().copied().filter(|&p| !self.on[p]).max() {
                Some(p) => self.push(&mut stack, p),
                None => {
                    let top = stack.len() as u32 - 1;
                    for p in std::mem::take(&mut stack.last_mut().expect("non-empty").1) {
                        self.pinned[p] -= 1;
                    }
                    self.place(v, v + 1, top)?;
                    self.pop(&mut stack);
                }
            }
        }
        Ok(())
    }

    fn push(&mut self, stack: &mut Vec<(usize, Vec<usize>)>, v: usize) {
        let d = stack.len() as u32;
        for q in self.graph.parents_by_index(v) {
            self.wanted[self.graph.index_of(*q)].push(d);
        }
        stack.push((v, Vec::new()));
    }

    fn pop(&mut self, stack: &mut Vec<(usize, Vec<usize>)>) {
        let (v, pins) = stack.pop().expect("non-empty stack");
        for p in pins {
            self.pinned[p] -= 1;
        }
        for q in self.graph.parents_by_index(v) {
            self.wanted[self.graph.index_of(*q)].pop();
        }
        if let Some((_, below)) = stack.last_mut() {
            if self.on[v] && !below.contains(&v) {
                below.push(v);
                self.pinned[v] += 1;
            }
        }
    }

    /// Re-places evicted pebbles whose parents are all still pebbled, using
    /// free slots or slots held by dead pebbles. Waiting until the next use
    /// would usually mean recomputing the parents as well.
    fn rescue(&mut self, now: usize) -> std::result::Result<(), PebbleFailure> {
        let mut i = 0;
        while i < self.evicted.len() {
            let u = self.evicted[i] as usize;
            if !self.rescuable[u] || self.static_next_use(u, now) == usize::MAX {
                self.rescuable[u] = false;
                self.evicted.swap_remove(i);
                continue;
            }
            let ready = self
                .graph
                .parents_by_index(u)
                .iter()
                .all(|q| self.on[self.graph.index_of(*q)]);
            if !ready {
                i += 1;
                continue;
            }
            // parents needed only by u itself may leave as u is placed
            self.rescuable[u] = false;
            let room = self.pebbles.len() < self.budget
                || self.pebbles.iter().any(|&x| self.next_use(x as usize, now) == usize::MAX);
            if room {
                self.evicted.swap_remove(i);
                self.place(u, now, 0)?;
                i = 0;
            } else {
                self.rescuable[u] = true;
                i += 1;
            }
        }
        Ok(())
    }

    fn run(mut self) -> std::result::Result<PebbleTrace, PebbleFailure> {
        for v in 0..self.graph.node_count() {
            self.ensure(v)?;
            if self.budget != usize::MAX {
                self.rescue(v + 1)?;
            }
        }
        Ok(self.trace)
    }
}

/// Time, space, space-time and cumulative complexity of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ComplexityReport {
    pub time: u64,
    pub space: u64,
    pub space_time: u64,
    pub cumulative: u64,
}

pub fn pebble_metrics(trace: &PebbleTrace) -> Result<ComplexityReport> {
    if !trace.legal {
        return usage("metrics requested for an illegal trace");
    }
    let occ = trace.occupancy();
    let time = occ.len() as u64;
    let space = occ.iter().copied().max().unwrap_or(0) as u64;
    let cumulative = occ.iter().map(|&x| x as u64).sum();
    Ok(ComplexityReport {
        time,
        space,
        space_time: time * space,
        cumulative,
    })
}

/// `N (lambda N / (64 S))^lambda` when `S <= N / 20`, else `None`.
pub fn sequential_lower_bound(width: usize, lambda: u32, space: u64) -> Option<f64> {
    let n = width as f64;
    let s = space as f64;
    (space > 0 && s <= n / 20.0).then(|| n * (lambda as f64 * n / (64.0 * s)).powi(lambda as i32))
}
