//! Exact exhaustive search: find one ITS, find a rooted ITS, count all
//! ITSs, and find an ITS factor. These are the reference algorithms the
//! randomized solvers are tested against, so they must never be wrong:
//! a node budget turns runaway searches into an explicit error instead of
//! a false "none exists".
//!
//! Determinism: the search assigns blocks from the last down to the first,
//! trying each block's s-subsets in colex order, so the first solution found
//! is the minimum in product-colex order (last block most significant).

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::graph::{PartitionedGraph, TransversalBlowup};
use crate::math::{binomial, rat_int, ColexSubsets, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("block {block} has {size} vertices, fewer than s = {s}")]
    BlockTooThin { block: usize, size: usize, s: usize },
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("blocks must all have the same size")]
    UnequalBlocks,
    #[error("block size {size} is not divisible by s = {s}")]
    IndivisibleBlock { size: usize, s: usize },
    #[error("search budget of {0} nodes exhausted")]
    BudgetExceeded(u64),
}

/// Cap on explored search nodes (one node per candidate subset tried).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: 100_000_000,
        }
    }
}

impl SearchBudget {
    pub fn new(max_nodes: u64) -> Self {
        SearchBudget { max_nodes }
    }
}

/// Exact ITS count together with the product lower bound
/// (1/2^r) * C(t,s)^r and its hypothesis flag: every block must have at
/// least t vertices and be incident with at most (t/(4 s^2)) * |V_i| edges
/// (edges counted whole, not as half-edges).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountReport {
    pub s: usize,
    pub t: usize,
    pub exact_count: BigUint,
    pub lower_bound: Rat,
    pub hypothesis_met: bool,
}

struct Searcher<'g> {
    g: &'g PartitionedGraph,
    s: usize,
    /// mask[v]: vertex v may be used at all.
    mask: Vec<bool>,
    /// required[i]: vertex that block i's selection must contain.
    required: Vec<Option<u32>>,
    /// blocked[v]: number of already-chosen neighbors of v.
    blocked: Vec<u32>,
    nodes: u64,
    max_nodes: u64,
}

impl<'g> Searcher<'g> {
    fn new(g: &'g PartitionedGraph, s: usize, budget: SearchBudget) -> Self {
        Searcher {
            g,
            s,
            mask: vec![true; g.vertex_count()],
            required: vec![None; g.r()],
            blocked: vec![0; g.vertex_count()],
            nodes: 0,
            max_nodes: budget.max_nodes,
        }
    }

    /// Visits every ITS in product-colex order until the callback returns
    /// true (stop) or the space is exhausted. Ok(true) means stopped early.
    fn run(
        &mut self,
        on_solution: &mut dyn FnMut(&BTreeMap<usize, Vec<u32>>) -> bool,
    ) -> Result<bool, OracleError> {
        let mut chosen: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        self.dfs(0, &mut chosen, on_solution)
    }

    fn dfs(
        &mut self,
        level: usize,
        chosen: &mut BTreeMap<usize, Vec<u32>>,
        on_solution: &mut dyn FnMut(&BTreeMap<usize, Vec<u32>>) -> bool,
    ) -> Result<bool, OracleError> {
        if level == self.g.r() {
            return Ok(on_solution(chosen));
        }
        // last block varies slowest: level 0 assigns block r-1
        let block = self.g.r() - 1 - level;
        let avail: Vec<u32> = self
            .g
            .block(block)
            .iter()
            .copied()
            .filter(|&v| self.mask[v as usize] && self.blocked[v as usize] == 0)
            .collect();
        let (pool, seed): (Vec<u32>, Vec<u32>) = match self.required[block] {
            Some(req) => {
                if !avail.contains(&req) {
                    return Ok(false);
                }
                (
                    avail.iter().copied().filter(|&v| v != req).collect(),
                    vec![req],
                )
            }
            None => (avail, Vec::new()),
        };
        let pick = self.s - seed.len();
        if pool.len() < pick {
            return Ok(false);
        }
        // colex on positions of `pool` equals colex on vertex indices, and
        // inserting the fixed seed keeps the order monotone
        for subset in ColexSubsets::new(pool.len(), pick) {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Err(OracleError::BudgetExceeded(self.max_nodes));
            }
            let mut set: Vec<u32> = subset.iter().map(|&p| pool[p]).collect();
            set.extend_from_slice(&seed);
            set.sort_unstable();
            for &v in &set {
                for &u in self.g.neighbors(v) {
                    self.blocked[u as usize] += 1;
                }
            }
            chosen.insert(block, set.clone());
            let stopped = self.dfs(level + 1, chosen, on_solution)?;
            chosen.remove(&block);
            for &v in &set {
                for &u in self.g.neighbors(v) {
                    self.blocked[u as usize] -= 1;
                }
            }
            if stopped {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn check_thickness(g: &PartitionedGraph, s: usize) -> Result<(), OracleError> {
    for i in 0..g.r() {
        if g.block(i).len() < s {
            return Err(OracleError::BlockTooThin {
                block: i,
                size: g.block(i).len(),
                s,
            });
        }
    }
    Ok(())
}

/// First ITS of size s in product-colex order, or None if none exists.
pub fn find_its(
    g: &PartitionedGraph,
    s: usize,
    budget: SearchBudget,
) -> Result<Option<TransversalBlowup>, OracleError> {
    check_thickness(g, s)?;
    let mut searcher = Searcher::new(g, s, budget);
    let mut found: Option<TransversalBlowup> = None;
    searcher.run(&mut |chosen| {
        found = Some(TransversalBlowup::from_indices(
            g,
            s,
            chosen.iter().map(|(&b, vs)| (b, vs.clone())),
        ));
        true
    })?;
    Ok(found)
}

/// First ITS whose selection in the root's block contains the root.
pub fn find_rooted(
    g: &PartitionedGraph,
    root: &str,
    s: usize,
    budget: SearchBudget,
) -> Result<Option<TransversalBlowup>, OracleError> {
    let v = g
        .idx_of(root)
        .ok_or_else(|| OracleError::UnknownVertex(root.to_string()))?;
    check_thickness(g, s)?;
    find_rooted_masked(g, v, s, &vec![true; g.vertex_count()], budget)
}

/// Rooted search restricted to masked-in vertices. Blocks whose masked-in
/// part is thinner than s simply yield None; the caller owns the semantics.
pub fn find_rooted_masked(
    g: &PartitionedGraph,
    root: u32,
    s: usize,
    mask: &[bool],
    budget: SearchBudget,
) -> Result<Option<TransversalBlowup>, OracleError> {
    assert_eq!(mask.len(), g.vertex_count());
    let mut searcher = Searcher::new(g, s, budget);
    searcher.mask.copy_from_slice(mask);
    searcher.required[g.block_of(root)] = Some(root);
    let mut found: Option<TransversalBlowup> = None;
    searcher.run(&mut |chosen| {
        found = Some(TransversalBlowup::from_indices(
            g,
            s,
            chosen.iter().map(|(&b, vs)| (b, vs.clone())),
        ));
        true
    })?;
    Ok(found)
}

/// Edges with at least one endpoint in block i.
fn incident_edges(g: &PartitionedGraph, i: usize) -> usize {
    g.edges()
        .iter()
        .filter(|&&(a, b)| g.block_of(a) == i || g.block_of(b) == i)
        .count()
}

/// Counts all ITSs of size s exactly and evaluates the product lower bound
/// at thickness parameter t.
pub fn count_its(
    g: &PartitionedGraph,
    s: usize,
    t: usize,
    budget: SearchBudget,
) -> Result<CountReport, OracleError> {
    check_thickness(g, s)?;
    let mut searcher = Searcher::new(g, s, budget);
    let mut count = BigUint::zero();
    searcher.run(&mut |_| {
        count += BigUint::one();
        false
    })?;
    let per_block = Rat::from_integer(binomial(t, s).into());
    let mut lower_bound = Rat::one();
    for _ in 0..g.r() {
        lower_bound *= &per_block;
        lower_bound /= rat_int(2);
    }
    let thresh_num = rat_int(t as i64);
    let thresh_den = rat_int(4 * (s * s) as i64);
    let hypothesis_met = (0..g.r()).all(|i| {
        let ni = g.block(i).len();
        ni >= t
            && rat_int(incident_edges(g, i) as i64)
                <= &thresh_num * rat_int(ni as i64) / &thresh_den
    });
    Ok(CountReport {
        s,
        t,
        exact_count: count,
        lower_bound,
        hypothesis_met,
    })
}

/// All ITSs in product-colex order, capped at `limit` results.
pub fn enumerate_its(
    g: &PartitionedGraph,
    s: usize,
    limit: usize,
    budget: SearchBudget,
) -> Result<Vec<TransversalBlowup>, OracleError> {
    check_thickness(g, s)?;
    let mut searcher = Searcher::new(g, s, budget);
    let mut out = Vec::new();
    searcher.run(&mut |chosen| {
        out.push(TransversalBlowup::from_indices(
            g,
            s,
            chosen.iter().map(|(&b, vs)| (b, vs.clone())),
        ));
        out.len() >= limit
    })?;
    Ok(out)
}

/// Exhaustive ITS-factor search: partitions every block into |V_i|/s
/// pairwise-disjoint ITSs covering all vertices. Canonical form: each
/// successive member contains the smallest vertex not yet covered, so no
/// permutation of members is explored twice. Intended for tiny instances.
pub fn find_factor(
    g: &PartitionedGraph,
    s: usize,
    budget: SearchBudget,
) -> Result<Option<Vec<TransversalBlowup>>, OracleError> {
    let m = g.block(0).len();
    if (0..g.r()).any(|i| g.block(i).len() != m) {
        return Err(OracleError::UnequalBlocks);
    }
    if m % s != 0 {
        return Err(OracleError::IndivisibleBlock { size: m, s });
    }
    let t = m / s;
    let mut used = vec![false; g.vertex_count()];
    let mut members: Vec<TransversalBlowup> = Vec::new();
    let mut nodes: u64 = 0;
    if factor_dfs(
        g,
        s,
        t,
        &mut used,
        &mut members,
        &mut nodes,
        budget.max_nodes,
    )? {
        Ok(Some(members))
    } else {
        Ok(None)
    }
}

fn factor_dfs(
    g: &PartitionedGraph,
    s: usize,
    t: usize,
    used: &mut Vec<bool>,
    members: &mut Vec<TransversalBlowup>,
    nodes: &mut u64,
    max_nodes: u64,
) -> Result<bool, OracleError> {
    if members.len() == t {
        return Ok(true);
    }
    let root = (0..g.vertex_count() as u32)
        .find(|&v| !used[v as usize])
        .expect("t members exhaust the vertices");
    let mut searcher = Searcher::new(g, s, SearchBudget::new(max_nodes));
    searcher.nodes = *nodes;
    searcher
        .mask
        .iter_mut()
        .zip(used.iter())
        .for_each(|(m, &u)| *m = !u);
    searcher.required[g.block_of(root)] = Some(root);
    let mut candidates: Vec<BTreeMap<usize, Vec<u32>>> = Vec::new();
    searcher.run(&mut |chosen| {
        candidates.push(chosen.clone());
        false
    })?;
    *nodes = searcher.nodes;
    for cand in candidates {
        for vs in cand.values() {
            for &v in vs {
                used[v as usize] = true;
            }
        }
        members.push(TransversalBlowup::from_indices(
            g,
            s,
            cand.iter().map(|(&b, vs)| (b, vs.clone())),
        ));
        if factor_dfs(g, s, t, used, members, nodes, max_nodes)? {
            return Ok(true);
        }
        members.pop();
        for vs in cand.values() {
            for &v in vs {
                used[v as usize] = false;
            }
        }
    }
    Ok(false)
}
