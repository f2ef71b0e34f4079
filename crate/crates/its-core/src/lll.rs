//! Randomized solver for the dense regime: prune every block to
//! a = ceil(2e s^2 D) vertices (D = max block average degree), sample one
//! uniform s-set per block, then repeatedly resample the two blocks of the
//! first violated edge until the union is independent. Verify-and-retry
//! keeps the solver sound regardless of whether the sampling analysis
//! applies; the feasibility flag reports whether it does.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{DegreeProfile, PartitionedGraph, TransversalBlowup};
use crate::math::{ceil_e_times, certified_one_minus_e_times, rat_int, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LllError {
    #[error("block {block} has {size} vertices, fewer than the pruning target {a}")]
    BlockTooThin { block: usize, size: usize, a: usize },
    #[error("pruning target {a} is below s = {s}")]
    TargetBelowS { a: usize, s: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LllConfig {
    /// Pruned block size; None picks max(ceil(2e s^2 D), s) from the input
    /// profile.
    pub a: Option<usize>,
    pub max_resamples: u64,
    pub seed: u64,
}

impl Default for LllConfig {
    fn default() -> Self {
        LllConfig {
            a: None,
            max_resamples: 10_000,
            seed: 0,
        }
    }
}

/// Exact feasibility of the sampling product e * 2aD * s^2 / a^2 < 1.
/// The margin is a rational with the same sign as 1 - 2 s^2 D e / a
/// (a certified bound, not the irrational value itself).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Feasibility {
    pub feasible: bool,
    pub margin: Rat,
}

pub fn lll_feasible(profile: &DegreeProfile, s: usize, a: usize) -> Feasibility {
    assert!(s >= 1 && a >= 1);
    let k = rat_int(2 * (s * s) as i64) * &profile.max_block_avg / rat_int(a as i64);
    let margin = certified_one_minus_e_times(&k);
    Feasibility {
        feasible: margin > Rat::zero(),
        margin,
    }
}

/// Pruning target from the input profile: max(ceil(2e s^2 D), s).
pub fn default_target(profile: &DegreeProfile, s: usize) -> usize {
    let q = rat_int(2 * (s * s) as i64) * &profile.max_block_avg;
    let ceiling = ceil_e_times(&q);
    usize::try_from(&ceiling)
        .expect("pruning target fits usize")
        .max(s)
}

/// Repeatedly removes a highest-degree vertex from some still-oversized
/// block (ties by deterministic vertex order) until every block has
/// exactly `a` vertices, recomputing degrees after each removal. The max
/// block average degree never increases.
pub fn prune(graph: &PartitionedGraph, a: usize) -> Result<PartitionedGraph, LllError> {
    for i in 0..graph.r() {
        if graph.block(i).len() < a {
            return Err(LllError::BlockTooThin {
                block: i,
                size: graph.block(i).len(),
                a,
            });
        }
    }
    Ok(prune_cap(graph, a))
}

/// Like `prune` but total: blocks already at or below `a` are left alone,
/// so the result has exactly min(|V_i|, a) vertices per block.
pub fn prune_cap(graph: &PartitionedGraph, a: usize) -> PartitionedGraph {
    assert!(a >= 1);
    let mut keep = vec![true; graph.vertex_count()];
    let mut degree: Vec<usize> = (0..graph.vertex_count() as u32)
        .map(|v| graph.degree(v))
        .collect();
    let mut block_size: Vec<usize> = (0..graph.r()).map(|i| graph.block(i).len()).collect();
    loop {
        let mut victim: Option<u32> = None;
        for v in 0..graph.vertex_count() as u32 {
            if !keep[v as usize] || block_size[graph.block_of(v)] <= a {
                continue;
            }
            match victim {
                Some(w) if degree[w as usize] >= degree[v as usize] => {}
                _ => victim = Some(v),
            }
        }
        let Some(v) = victim else { break };
        keep[v as usize] = false;
        block_size[graph.block_of(v)] -= 1;
        for &u in graph.neighbors(v) {
            if keep[u as usize] {
                degree[u as usize] -= 1;
            }
        }
    }
    graph
        .induced(&keep)
        .expect("pruning keeps a >= 1 vertices per block")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LllStats {
    /// Pruned block size actually used.
    pub a: usize,
    pub feasible: bool,
    pub margin: Rat,
    /// Sampling rounds, including the initial one.
    pub iterations: u64,
    pub resamples: u64,
    /// Violation counts per canonical edge "u--v".
    pub violated_edge_histogram: BTreeMap<String, u64>,
}

impl LllStats {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "a": self.a,
            "feasible": self.feasible,
            "margin": crate::math::rat_str(&self.margin),
            "iterations": self.iterations,
            "resamples": self.resamples,
            "violated_edge_histogram": self.violated_edge_histogram,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LllResult {
    /// None iff the resample budget ran out before independence.
    pub its: Option<TransversalBlowup>,
    pub stats: LllStats,
}

pub fn solve(
    graph: &PartitionedGraph,
    s: usize,
    config: &LllConfig,
) -> Result<LllResult, LllError> {
    assert!(s >= 1, "s must be positive");
    let profile = graph.profile();
    let a = config.a.unwrap_or_else(|| default_target(&profile, s));
    if a < s {
        return Err(LllError::TargetBelowS { a, s });
    }
    let pruned = prune(graph, a)?;
    let f = lll_feasible(&pruned.profile(), s, a);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut selected = vec![false; pruned.vertex_count()];
    let mut picks: Vec<Vec<u32>> = Vec::with_capacity(pruned.r());
    let sample_block = |rng: &mut ChaCha8Rng, i: usize, selected: &mut [bool]| -> Vec<u32> {
        let verts = pruned.block(i);
        let mut pick: Vec<u32> = rand::seq::index::sample(rng, verts.len(), s)
            .into_iter()
            .map(|p| verts[p])
            .collect();
        pick.sort_unstable();
        for &v in &pick {
            selected[v as usize] = true;
        }
        pick
    };
    for i in 0..pruned.r() {
        picks.push(sample_block(&mut rng, i, &mut selected));
    }

    let mut stats = LllStats {
        a,
        feasible: f.feasible,
        margin: f.margin,
        iterations: 1,
        resamples: 0,
        violated_edge_histogram: BTreeMap::new(),
    };
    loop {
        // first violated edge in canonical (block pair, endpoints) order
        let violated = pruned
            .edges()
            .iter()
            .copied()
            .find(|&(u, v)| selected[u as usize] && selected[v as usize]);
        let Some((u, v)) = violated else {
            let its = TransversalBlowup::from_indices(&pruned, s, picks.into_iter().enumerate());
            return Ok(LllResult {
                its: Some(its),
                stats,
            });
        };
        let key = format!("{}--{}", pruned.id(u), pruned.id(v));
        *stats.violated_edge_histogram.entry(key).or_insert(0) += 1;
        if stats.resamples == config.max_resamples {
            return Ok(LllResult { its: None, stats });
        }
        stats.resamples += 1;
        stats.iterations += 1;
        // resample exactly the two endpoint blocks, lower index first
        for i in [pruned.block_of(u), pruned.block_of(v)] {
            for &w in &picks[i] {
                selected[w as usize] = false;
            }
            picks[i] = sample_block(&mut rng, i, &mut selected);
        }
    }
}
