//! Multi-round semi-random solver for the sparse regime. Each round prunes
//! blocks to the schedule size S(t), samples one s-set per block, activates
//! blocks with probability p, greedily accepts a conflict-free subset of the
//! activated selections into the accumulated partial ITS, then deletes the
//! accepted blocks together with every survivor adjacent to an accepted
//! selection. Once the schedule reaches S(t*+1) >= 2e s^2 D(t*+1) the
//! surviving graph is thick enough for the single-shot sampling solver,
//! which finishes the job; the accepted selections and the terminal ITS are
//! disjoint and mutually non-adjacent by the deletion rule, so their union
//! is a full ITS.
//!
//! The analysis behind the schedule is asymptotic. At desk scale the solver
//! keeps itself honest operationally instead: per-round goal checks with
//! bounded retries, a data-driven early handoff, and verification of every
//! output.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::graph::{PartitionedGraph, TransversalBlowup};
use crate::lll::{self, LllConfig, LllError, LllStats};
use crate::math::{ceil_e_times, ceil_to_usize, e_lt, rat, rat_int, rat_str, rat_to_f64, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NibbleError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("schedule did not reach the terminal condition within {cap} rounds")]
    ScheduleDiverged { cap: usize },
    #[error("round {round} kept violating its goals after {retries} retries")]
    RetriesExhausted { round: usize, retries: u32 },
    #[error(transparent)]
    Lll(#[from] LllError),
}

// === truncation preprocessing ===

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TruncateError {
    #[error("truncation hypothesis violated: {0}")]
    HypothesisViolated(String),
}

/// Removes from every block the vertices of degree >= 16sD/eps (boundary
/// included). Under the stated hypotheses (max block average <= D,
/// thickness >= (s + eps/2) D, eps < 16s) the survivors W_i satisfy
/// |W_i| >= (s + eps/4) D', block averages <= D', and max degree
/// < 16 s D' / eps, where D' = D / (1 - eps/(16s)).
pub fn truncate(
    graph: &PartitionedGraph,
    s: usize,
    eps: &Rat,
    d: &Rat,
) -> Result<(PartitionedGraph, Rat), TruncateError> {
    assert!(s >= 1);
    if *eps <= Rat::zero() {
        return Err(TruncateError::HypothesisViolated(
            "eps must be positive".into(),
        ));
    }
    if *eps >= rat_int(16 * s as i64) {
        return Err(TruncateError::HypothesisViolated(format!(
            "eps must be below 16s = {}",
            16 * s
        )));
    }
    let profile = graph.profile();
    if profile.max_block_avg > *d {
        return Err(TruncateError::HypothesisViolated(format!(
            "max block average {} exceeds D = {}",
            rat_str(&profile.max_block_avg),
            rat_str(d)
        )));
    }
    let need = (rat_int(s as i64) + eps / rat_int(2)) * d;
    if rat_int(profile.thickness as i64) < need {
        return Err(TruncateError::HypothesisViolated(format!(
            "thickness {} is below (s + eps/2) D = {}",
            profile.thickness,
            rat_str(&need)
        )));
    }
    let threshold = rat_int(16 * s as i64) * d / eps;
    let keep: Vec<bool> = (0..graph.vertex_count() as u32)
        .map(|v| rat_int(graph.degree(v) as i64) < threshold)
        .collect();
    let d_prime = d / (rat_int(1) - eps / rat_int(16 * s as i64));
    // Markov: a block of average degree <= D has fewer than eps/(16s) |V_i|
    // vertices at or above 16sD/eps, so no block can be emptied.
    let truncated = graph
        .induced(&keep)
        .expect("degree truncation can remove only a proper fraction of any block");
    Ok((truncated, d_prime))
}

// === schedule ===

/// Exact rational block-size and degree schedules. S decays by the factor
/// (1 - p + eps p / 2s) per round and D by (1 - p + eps p / 4s), so D/S is
/// strictly decreasing and the terminal condition S(t+1) >= 2e s^2 D(t+1)
/// is eventually met; `t_star` is the first round after which it holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NibbleSchedule {
    pub s: usize,
    pub eps: Rat,
    pub d: Rat,
    pub p: Rat,
    pub t_star: usize,
    /// `s_seq[t - 1]` holds S(t) for t in 1..=t_star+1.
    pub s_seq: Vec<Rat>,
    /// `d_seq[t - 1]` holds D(t).
    pub d_seq: Vec<Rat>,
}

impl NibbleSchedule {
    pub fn s_at(&self, t: usize) -> &Rat {
        &self.s_seq[t - 1]
    }

    pub fn d_at(&self, t: usize) -> &Rat {
        &self.d_seq[t - 1]
    }
}

/// Whether S >= 2e s^2 D, decided exactly through rational bounds on e.
fn terminal_reached(s: usize, s_val: &Rat, d_val: &Rat) -> bool {
    if d_val.is_zero() {
        return true;
    }
    // S >= 2e s^2 D  <=>  e <= S / (2 s^2 D), and equality is impossible
    e_lt(&(s_val / (rat_int(2 * (s * s) as i64) * d_val)))
}

pub fn build_schedule(
    s: usize,
    eps: &Rat,
    d: &Rat,
    p: &Rat,
    t_star_override: Option<usize>,
) -> Result<NibbleSchedule, NibbleError> {
    if s < 1 {
        return Err(NibbleError::InvalidParameter("s must be at least 1".into()));
    }
    if *eps <= Rat::zero() {
        return Err(NibbleError::InvalidParameter("eps must be positive".into()));
    }
    if *p <= Rat::zero() || *p >= Rat::one() {
        return Err(NibbleError::InvalidParameter(
            "p must lie strictly between 0 and 1".into(),
        ));
    }
    if *d < Rat::zero() {
        return Err(NibbleError::InvalidParameter(
            "D must be nonnegative".into(),
        ));
    }
    let sr = rat_int(s as i64);
    let fs = rat_int(1) - p + eps * p / (rat_int(2) * &sr);
    let fd = rat_int(1) - p + eps * p / (rat_int(4) * &sr);
    let mut s_seq = vec![(&sr + eps) * d];
    let mut d_seq = vec![d.clone()];
    if t_star_override == Some(0) {
        // no rounds at all: straight to the terminal solver
        return Ok(NibbleSchedule {
            s,
            eps: eps.clone(),
            d: d.clone(),
            p: p.clone(),
            t_star: 0,
            s_seq,
            d_seq,
        });
    }
    // cap at ten times the asymptotic round count 8s ln(2es) / (eps p)
    let cap = match t_star_override {
        Some(t) => t,
        None => {
            let ep = rat_to_f64(eps) * rat_to_f64(p);
            let formula = 8.0 * s as f64 * (2.0 * std::f64::consts::E * s as f64).ln() / ep;
            (10.0 * formula).ceil().max(8.0) as usize
        }
    };
    let t_star = loop {
        let t = s_seq.len(); // sequences currently reach S(t) and D(t)
        let s_next = &s_seq[t - 1] * &fs;
        let d_next = &d_seq[t - 1] * &fd;
        s_seq.push(s_next);
        d_seq.push(d_next);
        if let Some(forced) = t_star_override {
            if t == forced {
                break t;
            }
        } else if terminal_reached(s, &s_seq[t], &d_seq[t]) {
            break t;
        }
        if t >= cap {
            return Err(NibbleError::ScheduleDiverged { cap });
        }
    };
    Ok(NibbleSchedule {
        s,
        eps: eps.clone(),
        d: d.clone(),
        p: p.clone(),
        t_star,
        s_seq,
        d_seq,
    })
}

// === rounds ===

/// Survivor graph plus the bookkeeping to translate back to input blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundState {
    /// Round about to run (1-based).
    pub t: usize,
    pub graph: PartitionedGraph,
    /// Surviving block index -> input block index.
    pub block_map: Vec<usize>,
    /// Accepted selections so far, keyed by input block index.
    pub partial: TransversalBlowup,
}

impl RoundState {
    pub fn initial(graph: &PartitionedGraph, s: usize) -> Self {
        RoundState {
            t: 1,
            graph: graph.clone(),
            block_map: (0..graph.r()).collect(),
            partial: TransversalBlowup::new(s),
        }
    }
}

/// Log entry for one committed round. Block indices refer to the input
/// graph's blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRecord {
    pub t: usize,
    /// Surviving blocks entering the round.
    pub blocks: usize,
    pub s_t: Rat,
    pub d_t: Rat,
    /// Vertices removed by the initial per-block pruning.
    pub pruned: usize,
    pub activated: Vec<usize>,
    pub accepted: Vec<usize>,
    /// The sampled s-set of every surviving block (after pruning).
    pub picks: BTreeMap<usize, Vec<String>>,
    /// Vertices removed by block acceptance and neighbor deletion.
    pub deleted: usize,
    pub retries: u32,
}

impl RoundRecord {
    /// One JSON-lines record; verbose adds the index sets and selections.
    pub fn to_json(&self, verbose: bool) -> Value {
        let mut v = json!({
            "t": self.t,
            "blocks": self.blocks,
            "s_t": rat_str(&self.s_t),
            "d_t": rat_str(&self.d_t),
            "pruned": self.pruned,
            "activated": self.activated.len(),
            "accepted": self.accepted.len(),
            "deleted": self.deleted,
            "retries": self.retries,
        });
        if verbose {
            let obj = v.as_object_mut().unwrap();
            obj.insert("activated_blocks".into(), json!(self.activated));
            obj.insert("accepted_blocks".into(), json!(self.accepted));
            let picks: BTreeMap<String, &Vec<String>> = self
                .picks
                .iter()
                .map(|(k, vs)| (k.to_string(), vs))
                .collect();
            obj.insert("picks".into(), json!(picks));
        }
        v
    }
}

/// Why a round attempt was thrown away. The index refers to input blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RoundAbort {
    /// A non-accepted block lost all its vertices.
    ThinnedOut(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RoundOutcome {
    Continue(RoundState),
    /// Every surviving block was accepted; the ITS is complete.
    Finished(TransversalBlowup),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundAttempt {
    pub outcome: RoundOutcome,
    pub record: RoundRecord,
}

/// Runs one round (prune, sample, activate, greedily accept, delete) on a
/// snapshot. The caller owns goal checking and retries; this function only
/// aborts when a non-accepted block is wiped out entirely.
pub fn run_round(
    state: &RoundState,
    schedule: &NibbleSchedule,
    rng: &mut ChaCha8Rng,
    artificial_deletion: bool,
) -> Result<RoundAttempt, RoundAbort> {
    let s = schedule.s;
    let s_t = schedule.s_at(state.t);
    let target = ceil_to_usize(s_t).max(s);
    let pruned = lll::prune_cap(&state.graph, target);
    let pruned_away = state.graph.vertex_count() - pruned.vertex_count();
    let r = pruned.r();
    for i in 0..r {
        if pruned.block(i).len() < s {
            return Err(RoundAbort::ThinnedOut(state.block_map[i]));
        }
    }

    // one uniform s-set per block, ascending block order
    let picks: Vec<Vec<u32>> = (0..r)
        .map(|i| {
            let verts = pruned.block(i);
            let mut pick: Vec<u32> = rand::seq::index::sample(rng, verts.len(), s)
                .into_iter()
                .map(|p| verts[p])
                .collect();
            pick.sort_unstable();
            pick
        })
        .collect();

    // independent activation
    let p_f = rat_to_f64(&schedule.p);
    let activated: Vec<usize> = (0..r).filter(|_| rng.random_bool(p_f)).collect();

    // greedy maximal conflict-free subset of the activated selections
    let mut accepted_union = vec![false; pruned.vertex_count()];
    let mut accepted: Vec<usize> = Vec::new();
    for &i in &activated {
        let conflict = picks[i].iter().any(|&v| {
            pruned
                .neighbors(v)
                .iter()
                .any(|&u| accepted_union[u as usize])
        });
        if !conflict {
            for &v in &picks[i] {
                accepted_union[v as usize] = true;
            }
            accepted.push(i);
        }
    }

    // delete accepted blocks and every survivor adjacent to an accepted
    // selection
    let mut keep = vec![true; pruned.vertex_count()];
    for &i in &accepted {
        for &v in pruned.block(i) {
            keep[v as usize] = false;
        }
        for &v in &picks[i] {
            for &u in pruned.neighbors(v) {
                keep[u as usize] = false;
            }
        }
    }
    if artificial_deletion {
        // The union-bound retention target p_v = 1 - d(v) p s / S(t) equals
        // the survival estimate it would be divided by, so the extra
        // deletion probability collapses to 0 while p_v > 0 and to 1 once
        // p_v <= 0; no coin flips are needed.
        for v in 0..pruned.vertex_count() as u32 {
            if keep[v as usize]
                && rat_int(pruned.degree(v) as i64) * &schedule.p * rat_int(s as i64) >= *s_t
            {
                keep[v as usize] = false;
            }
        }
    }

    let mut record_picks = BTreeMap::new();
    for i in 0..r {
        let ids: Vec<String> = picks[i].iter().map(|&v| pruned.id(v).to_string()).collect();
        record_picks.insert(state.block_map[i], ids);
    }
    let mut partial = state.partial.clone();
    for &i in &accepted {
        partial.selection.insert(
            state.block_map[i],
            record_picks[&state.block_map[i]].clone(),
        );
    }

    let deleted = keep.iter().filter(|&&k| !k).count();
    let record = RoundRecord {
        t: state.t,
        blocks: r,
        s_t: s_t.clone(),
        d_t: schedule.d_at(state.t).clone(),
        pruned: pruned_away,
        activated: activated.iter().map(|&i| state.block_map[i]).collect(),
        accepted: accepted.iter().map(|&i| state.block_map[i]).collect(),
        picks: record_picks,
        deleted,
        retries: 0,
    };

    if accepted.len() == r {
        return Ok(RoundAttempt {
            outcome: RoundOutcome::Finished(partial),
            record,
        });
    }
    let (next_graph, submap) = match pruned.induced_compact(&keep) {
        Ok(pair) => pair,
        Err(_) => {
            // every vertex was deleted yet some block went unaccepted
            let gone = (0..r)
                .find(|i| !accepted.contains(i))
                .expect("full acceptance is handled above");
            return Err(RoundAbort::ThinnedOut(state.block_map[gone]));
        }
    };
    // every non-accepted block must survive with at least one vertex
    let expected: Vec<usize> = (0..r).filter(|i| !accepted.contains(i)).collect();
    if submap != expected {
        let gone = expected
            .iter()
            .find(|i| !submap.contains(i))
            .expect("a submap mismatch means some non-accepted block vanished");
        return Err(RoundAbort::ThinnedOut(state.block_map[*gone]));
    }
    let next = RoundState {
        t: state.t + 1,
        graph: next_graph,
        block_map: submap.into_iter().map(|i| state.block_map[i]).collect(),
        partial,
    };
    Ok(RoundAttempt {
        outcome: RoundOutcome::Continue(next),
        record,
    })
}

// === solve ===

#[derive(Debug, Clone, PartialEq)]
pub struct NibbleConfig {
    /// Degree bound driving the schedule; None uses the input's max block
    /// average degree.
    pub d: Option<Rat>,
    /// Activation probability, strictly between 0 and 1.
    pub p: Rat,
    /// Forces the number of rounds instead of the terminal condition.
    pub t_star_override: Option<usize>,
    pub max_round_retries: u32,
    pub seed: u64,
    /// Extra per-vertex deletion reproducing the exact-retention analysis;
    /// purely subtractive, off by default.
    pub artificial_deletion: bool,
    /// Hand off to the single-shot solver as soon as the surviving graph is
    /// thick enough for it, instead of finishing the schedule.
    pub early_handoff: bool,
    pub terminal_max_resamples: u64,
}

impl Default for NibbleConfig {
    fn default() -> Self {
        NibbleConfig {
            d: None,
            p: rat(3, 20),
            t_star_override: None,
            max_round_retries: 50,
            seed: 0,
            artificial_deletion: false,
            early_handoff: true,
            terminal_max_resamples: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NibbleResult {
    /// None iff the terminal solver ran out of resampling budget.
    pub its: Option<TransversalBlowup>,
    pub rounds: Vec<RoundRecord>,
    pub schedule: NibbleSchedule,
    /// Thickness >= (s + eps/4) D and max block average <= D on the input.
    pub hypothesis_ok: bool,
    /// Local degree^5 <= D on the input; reported, never enforced.
    pub local_degree_ok: bool,
    /// Round before which the early handoff fired, if it did.
    pub handoff_round: Option<usize>,
    /// Terminal solver stats; None when the rounds alone covered every
    /// block.
    pub terminal: Option<LllStats>,
}

/// Mixes the round and retry indices into the base seed so every attempt
/// draws an independent, reproducible stream.
fn derived_seed(seed: u64, round: u64, retry: u64) -> u64 {
    seed ^ round.wrapping_mul(0x9E3779B97F4A7C15) ^ retry.wrapping_mul(0xD1B54A32D192ED03)
}

/// Per-block goal check on a committed round's survivor graph: every block
/// at least the next schedule size (and at least s), every block average at
/// most the next schedule degree.
fn goals_met(state: &RoundState, schedule: &NibbleSchedule, t_next: usize) -> bool {
    let s_next = schedule.s_at(t_next);
    let d_next = schedule.d_at(t_next);
    let profile = state.graph.profile();
    (0..state.graph.r()).all(|i| {
        let size = state.graph.block(i).len();
        size >= schedule.s && rat_int(size as i64) >= *s_next && profile.per_block_avg[i] <= *d_next
    })
}

/// Thickness already covers the single-shot solver's default pruning target
/// on this graph.
fn handoff_ready(graph: &PartitionedGraph, s: usize) -> bool {
    let profile = graph.profile();
    let q = rat_int(2 * (s * s) as i64) * &profile.max_block_avg;
    let target = ceil_e_times(&q).to_usize().unwrap_or(usize::MAX).max(s);
    profile.thickness >= target
}

pub fn solve(
    graph: &PartitionedGraph,
    s: usize,
    eps: &Rat,
    config: &NibbleConfig,
) -> Result<NibbleResult, NibbleError> {
    if s < 1 {
        return Err(NibbleError::InvalidParameter("s must be at least 1".into()));
    }
    if *eps <= Rat::zero() {
        return Err(NibbleError::InvalidParameter("eps must be positive".into()));
    }
    let profile = graph.profile();
    let d = match &config.d {
        Some(d) => {
            if *d < profile.max_block_avg {
                return Err(NibbleError::InvalidParameter(format!(
                    "configured D = {} is below the actual max block average {}",
                    rat_str(d),
                    rat_str(&profile.max_block_avg)
                )));
            }
            d.clone()
        }
        None => profile.max_block_avg.clone(),
    };
    if profile.thickness < s {
        return Err(NibbleError::InvalidParameter(format!(
            "thickness {} is below s = {s}",
            profile.thickness
        )));
    }
    let schedule = build_schedule(s, eps, &d, &config.p, config.t_star_override)?;
    let hypothesis_ok =
        rat_int(profile.thickness as i64) >= (rat_int(s as i64) + eps / rat_int(4)) * &d;
    let gamma5 = BigInt::from(profile.local_degree).pow(5);
    let local_degree_ok = Rat::from_integer(gamma5) <= d;

    let mut state = RoundState::initial(graph, s);
    let mut rounds: Vec<RoundRecord> = Vec::new();
    let mut handoff_round = None;
    for t in 1..=schedule.t_star {
        if config.early_handoff && handoff_ready(&state.graph, s) {
            handoff_round = Some(t);
            break;
        }
        let mut committed = false;
        for retry in 0..=config.max_round_retries {
            let mut rng =
                ChaCha8Rng::seed_from_u64(derived_seed(config.seed, t as u64, retry as u64));
            let attempt = match run_round(&state, &schedule, &mut rng, config.artificial_deletion) {
                Ok(a) => a,
                Err(RoundAbort::ThinnedOut(_)) => continue,
            };
            match attempt.outcome {
                RoundOutcome::Finished(full) => {
                    let mut record = attempt.record;
                    record.retries = retry;
                    rounds.push(record);
                    return Ok(NibbleResult {
                        its: Some(full),
                        rounds,
                        schedule,
                        hypothesis_ok,
                        local_degree_ok,
                        handoff_round: None,
                        terminal: None,
                    });
                }
                RoundOutcome::Continue(next) => {
                    if !goals_met(&next, &schedule, t + 1) {
                        continue;
                    }
                    let mut record = attempt.record;
                    record.retries = retry;
                    rounds.push(record);
                    state = next;
                    committed = true;
                    break;
                }
            }
        }
        if !committed {
            return Err(NibbleError::RetriesExhausted {
                round: t,
                retries: config.max_round_retries,
            });
        }
    }

    // Terminal regime. With the goals holding after the last committed
    // round, every surviving block has size at least max(ceil(S(t*+1)), s),
    // so the default pruning target never exceeds a block:
    // ceil(2e s^2 Dbar) <= ceil(2e s^2 D(t*+1)) <= ceil(S(t*+1)).
    let lll_cfg = LllConfig {
        a: None,
        max_resamples: config.terminal_max_resamples,
        seed: derived_seed(config.seed, schedule.t_star as u64 + 1, 0),
    };
    let res = lll::solve(&state.graph, s, &lll_cfg)?;
    let its = res.its.map(|terminal| {
        let mut full = state.partial.clone();
        for (i, verts) in terminal.selection {
            full.selection.insert(state.block_map[i], verts);
        }
        full
    });
    Ok(NibbleResult {
        its,
        rounds,
        schedule,
        hypothesis_ok,
        local_degree_ok,
        handoff_round,
        terminal: Some(res.stats),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{self, GeneratorSpec};
    use crate::graph::verify_its;

    fn g(blocks: Vec<Vec<&str>>, edges: Vec<(&str, &str)>) -> PartitionedGraph {
        PartitionedGraph::new(blocks, edges).unwrap()
    }

    /// One 16-vertex block holding a degree-8 hub, eight 2-vertex blocks
    /// each lending one neighbor to the hub.
    fn hub_instance() -> PartitionedGraph {
        let mut blocks: Vec<Vec<String>> = vec![(0..16)
            .map(|i| {
                if i == 0 {
                    "x".to_string()
                } else {
                    format!("f{i}")
                }
            })
            .collect()];
        let mut edges = Vec::new();
        for i in 0..8 {
            blocks.push(vec![format!("y{i}"), format!("z{i}")]);
            edges.push(("x".to_string(), format!("y{i}")));
        }
        PartitionedGraph::new(blocks, edges).unwrap()
    }

    #[test]
    fn truncate_is_identity_below_threshold() {
        let spec = GeneratorSpec::Random {
            r: 4,
            n: 12,
            avg_target: "2".into(),
            local_cap: 4,
            seed: 7,
        };
        let graph = gen::generate(&spec).unwrap();
        let (out, d_prime) = truncate(&graph, 2, &rat_int(1), &rat_int(2)).unwrap();
        assert_eq!(out, graph);
        assert_eq!(d_prime, rat(2, 1) / rat(31, 32));
    }

    #[test]
    fn truncate_removes_boundary_degrees() {
        let graph = hub_instance();
        // threshold 16 * 1 * 1 / 2 = 8 catches exactly the hub
        let (out, d_prime) = truncate(&graph, 1, &rat_int(2), &rat_int(1)).unwrap();
        assert_eq!(d_prime, rat(8, 7));
        assert_eq!(out.vertex_count(), graph.vertex_count() - 1);
        assert!(out.idx_of("x").is_none());
        let profile = out.profile();
        assert_eq!(profile.max_degree, 0);
        // survivors meet the downstream hypotheses with D' in place of D
        assert!(rat_int(profile.thickness as i64) >= (rat_int(1) + rat(2, 4)) * &d_prime);
        assert!(profile.max_block_avg <= d_prime);
    }

    #[test]
    fn truncate_rejects_bad_parameters() {
        let graph = hub_instance();
        assert!(matches!(
            truncate(&graph, 1, &rat_int(0), &rat_int(1)),
            Err(TruncateError::HypothesisViolated(m)) if m.contains("positive")
        ));
        assert!(matches!(
            truncate(&graph, 1, &rat_int(16), &rat_int(1)),
            Err(TruncateError::HypothesisViolated(m)) if m.contains("16s")
        ));
        assert!(matches!(
            truncate(&graph, 1, &rat_int(2), &rat(1, 4)),
            Err(TruncateError::HypothesisViolated(m)) if m.contains("max block average")
        ));
        assert!(matches!(
            truncate(&graph, 1, &rat_int(3), &rat_int(1)),
            Err(TruncateError::HypothesisViolated(m)) if m.contains("thickness")
        ));
    }

    #[test]
    fn schedule_matches_hand_computed_values() {
        let sched = build_schedule(1, &rat_int(1), &rat_int(100), &rat(1, 10), None).unwrap();
        assert_eq!(*sched.s_at(1), rat_int(200));
        assert_eq!(*sched.s_at(2), rat_int(190));
        assert_eq!(*sched.d_at(1), rat_int(100));
        assert_eq!(*sched.d_at(2), rat(185, 2));
        assert_eq!(sched.t_star, 38);
        assert_eq!(sched.s_seq.len(), sched.t_star + 1);
        assert_eq!(sched.d_seq.len(), sched.t_star + 1);
    }

    #[test]
    fn schedule_degree_to_size_ratio_decreases() {
        let sched = build_schedule(2, &rat(1, 2), &rat_int(9), &rat(3, 20), None).unwrap();
        for t in 1..=sched.t_star {
            let now = sched.d_at(t) / sched.s_at(t);
            let next = sched.d_at(t + 1) / sched.s_at(t + 1);
            assert!(next < now, "ratio must strictly decrease at t = {t}");
        }
    }

    #[test]
    fn schedule_terminal_condition_is_minimal() {
        let sched = build_schedule(1, &rat_int(1), &rat_int(100), &rat(1, 10), None).unwrap();
        let ratio = |t: usize| sched.s_at(t) / (rat_int(2) * sched.d_at(t));
        for t in 1..sched.t_star {
            assert!(
                !e_lt(&ratio(t + 1)),
                "terminal held before t_star at t = {t}"
            );
        }
        assert!(e_lt(&ratio(sched.t_star + 1)));
    }

    #[test]
    fn schedule_rejects_bad_parameters() {
        let one = rat_int(1);
        assert!(matches!(
            build_schedule(0, &one, &one, &rat(1, 2), None),
            Err(NibbleError::InvalidParameter(_))
        ));
        assert!(matches!(
            build_schedule(1, &rat_int(0), &one, &rat(1, 2), None),
            Err(NibbleError::InvalidParameter(_))
        ));
        assert!(matches!(
            build_schedule(1, &one, &one, &rat_int(0), None),
            Err(NibbleError::InvalidParameter(_))
        ));
        assert!(matches!(
            build_schedule(1, &one, &one, &rat_int(1), None),
            Err(NibbleError::InvalidParameter(_))
        ));
        assert!(matches!(
            build_schedule(1, &one, &rat_int(-1), &rat(1, 2), None),
            Err(NibbleError::InvalidParameter(_))
        ));
    }

    #[test]
    fn schedule_override_forces_round_count() {
        let sched = build_schedule(1, &rat_int(1), &rat_int(100), &rat(1, 10), Some(3)).unwrap();
        assert_eq!(sched.t_star, 3);
        assert_eq!(sched.s_seq.len(), 4);
        let zero = build_schedule(1, &rat_int(1), &rat_int(100), &rat(1, 10), Some(0)).unwrap();
        assert_eq!(zero.t_star, 0);
        assert_eq!(zero.s_seq.len(), 1);
    }

    /// Schedule with hand-picked values for driving run_round directly.
    fn manual_schedule(s: usize, s1: Rat, p: Rat) -> NibbleSchedule {
        NibbleSchedule {
            s,
            eps: rat_int(1),
            d: rat_int(1),
            p,
            t_star: 1,
            s_seq: vec![s1],
            d_seq: vec![rat_int(1)],
        }
    }

    #[test]
    fn round_without_activation_only_prunes() {
        let graph = g(vec![vec!["a", "b", "c"], vec!["d", "e"]], vec![("a", "d")]);
        let schedule = manual_schedule(1, rat_int(2), rat(0, 1));
        let state = RoundState::initial(&graph, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let attempt = run_round(&state, &schedule, &mut rng, false).unwrap();
        let RoundOutcome::Continue(next) = attempt.outcome else {
            panic!("nothing was activated, the round cannot finish")
        };
        assert_eq!(attempt.record.pruned, 1);
        assert_eq!(attempt.record.deleted, 0);
        assert!(attempt.record.activated.is_empty());
        assert!(attempt.record.accepted.is_empty());
        // the degree-1 vertex "a" is the pruning victim
        assert_eq!(
            next.graph.blocks_as_ids(),
            vec![vec!["b", "c"], vec!["d", "e"]]
        );
        assert_eq!(next.t, 2);
        assert!(next.partial.selection.is_empty());
        assert_eq!(attempt.record.picks.len(), 2);
    }

    #[test]
    fn round_with_full_activation_finishes_edgeless() {
        let graph = g(vec![vec!["a", "b"], vec!["c", "d"]], vec![]);
        let schedule = manual_schedule(1, rat_int(2), rat(1, 1));
        let state = RoundState::initial(&graph, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let attempt = run_round(&state, &schedule, &mut rng, false).unwrap();
        let RoundOutcome::Finished(its) = attempt.outcome else {
            panic!("full activation on an edgeless graph accepts every block")
        };
        assert_eq!(attempt.record.accepted.len(), 2);
        assert!(verify_its(&graph, &its).ok());
    }

    #[test]
    fn round_aborts_when_neighbor_block_is_wiped() {
        let graph = g(vec![vec!["a"], vec!["b"]], vec![("a", "b")]);
        let schedule = manual_schedule(1, rat_int(1), rat(1, 2));
        let state = RoundState::initial(&graph, 1);
        let mut outcomes = [false, false, false]; // wiped 1, wiped 0, continue
        for seed in 0..100 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            match run_round(&state, &schedule, &mut rng, false) {
                Err(RoundAbort::ThinnedOut(1)) => outcomes[0] = true,
                Err(RoundAbort::ThinnedOut(0)) => outcomes[1] = true,
                Ok(attempt) => match attempt.outcome {
                    RoundOutcome::Continue(_) => outcomes[2] = true,
                    RoundOutcome::Finished(its) => assert!(verify_its(&graph, &its).ok()),
                },
                Err(RoundAbort::ThinnedOut(_)) => unreachable!(),
            }
        }
        assert_eq!(outcomes, [true, true, true]);
    }

    #[test]
    fn retention_matches_union_bound() {
        let graph = g(
            vec![vec!["a1", "a2"], vec!["b1", "b2"], vec!["c1", "c2"]],
            vec![("a1", "b1")],
        );
        let schedule = manual_schedule(1, rat_int(2), rat(3, 20));
        let state = RoundState::initial(&graph, 1);
        // p_v = 1 - d p s / S(1) = 1 - 0.15/2
        let p_v = 1.0 - 0.15 / 2.0;
        let trials = 2000u64;
        let mut retained = 0u64;
        for seed in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let attempt = run_round(&state, &schedule, &mut rng, false)
                .expect("every block keeps an isolated vertex");
            let alive = match &attempt.outcome {
                RoundOutcome::Finished(_) => true,
                RoundOutcome::Continue(next) => {
                    attempt.record.accepted.contains(&0) || next.graph.idx_of("a1").is_some()
                }
            };
            if alive {
                retained += 1;
            }
        }
        let freq = retained as f64 / trials as f64;
        // one-sided: the union bound guarantees at least p_v; allow 3 sigma
        assert!(
            freq >= p_v - 0.02,
            "retention {freq} fell below the bound {p_v}"
        );
    }

    #[test]
    fn artificial_deletion_removes_zero_retention_vertices() {
        // hub of degree 6: p_v = 1 - 6 * (1/2) * 1 / 3 = 0
        let mut blocks = vec![vec!["x".to_string(), "x2".to_string(), "x3".to_string()]];
        let mut edges = Vec::new();
        for i in 0..6 {
            blocks.push(vec![format!("y{i}a"), format!("y{i}b"), format!("y{i}c")]);
            edges.push(("x".to_string(), format!("y{i}a")));
        }
        let graph = PartitionedGraph::new(blocks, edges).unwrap();
        let schedule = manual_schedule(1, rat_int(3), rat(1, 2));
        let state = RoundState::initial(&graph, 1);

        let mut flagged_cases = 0;
        for seed in 0..40 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if let Ok(attempt) = run_round(&state, &schedule, &mut rng, true) {
                if let RoundOutcome::Continue(next) = attempt.outcome {
                    if !attempt.record.accepted.contains(&0) {
                        flagged_cases += 1;
                        assert!(next.graph.idx_of("x").is_none());
                    }
                }
            }
        }
        assert!(flagged_cases > 0);

        let survived_somewhere = (0..40).any(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            match run_round(&state, &schedule, &mut rng, false) {
                Ok(attempt) => match attempt.outcome {
                    RoundOutcome::Continue(next) => {
                        !attempt.record.accepted.contains(&0) && next.graph.idx_of("x").is_some()
                    }
                    RoundOutcome::Finished(_) => false,
                },
                Err(_) => false,
            }
        });
        assert!(
            survived_somewhere,
            "without the flag the hub must sometimes survive"
        );
    }

    #[test]
    fn solve_edgeless_with_and_without_handoff() {
        let graph = g(vec![vec!["a", "b"], vec!["c", "d"]], vec![]);
        let eps = rat_int(1);

        let res = solve(&graph, 1, &eps, &NibbleConfig::default()).unwrap();
        assert_eq!(res.handoff_round, Some(1));
        assert!(res.rounds.is_empty());
        assert_eq!(res.terminal.as_ref().unwrap().resamples, 0);
        assert!(verify_its(&graph, &res.its.unwrap()).ok());
        assert!(res.hypothesis_ok);
        assert!(res.local_degree_ok);

        let cfg = NibbleConfig {
            early_handoff: false,
            ..NibbleConfig::default()
        };
        let res = solve(&graph, 1, &eps, &cfg).unwrap();
        assert!(res.handoff_round.is_none());
        assert_eq!(res.rounds.len(), 1);
        assert!(verify_its(&graph, &res.its.unwrap()).ok());
    }

    #[test]
    fn solve_with_zero_rounds_is_plain_terminal() {
        let graph = g(vec![vec!["a", "b"], vec!["c", "d"]], vec![]);
        let cfg = NibbleConfig {
            t_star_override: Some(0),
            early_handoff: false,
            ..NibbleConfig::default()
        };
        let res = solve(&graph, 1, &rat_int(1), &cfg).unwrap();
        assert!(res.rounds.is_empty());
        assert!(res.handoff_round.is_none());
        assert!(res.terminal.is_some());
        assert!(verify_its(&graph, &res.its.unwrap()).ok());
    }

    #[test]
    fn solve_finds_its_on_random_instances() {
        for seed in 0..10 {
            let spec = GeneratorSpec::Random {
                r: 5,
                n: 30,
                avg_target: "2".into(),
                local_cap: 5,
                seed,
            };
            let graph = gen::generate(&spec).unwrap();
            let cfg = NibbleConfig {
                seed,
                ..NibbleConfig::default()
            };
            let res = solve(&graph, 1, &rat(1, 2), &cfg).unwrap();
            let its = res.its.expect("thick random instances must be solved");
            assert!(verify_its(&graph, &its).ok());
            // thickness 30 beats ceil(2 e D) here, so the handoff is instant
            assert_eq!(res.handoff_round, Some(1));
        }
    }

    #[test]
    fn solve_rejects_bad_inputs() {
        let graph = g(vec![vec!["a", "b"], vec!["c", "d"]], vec![("a", "c")]);
        assert!(matches!(
            solve(&graph, 0, &rat_int(1), &NibbleConfig::default()),
            Err(NibbleError::InvalidParameter(_))
        ));
        assert!(matches!(
            solve(&graph, 1, &rat_int(0), &NibbleConfig::default()),
            Err(NibbleError::InvalidParameter(_))
        ));
        let cfg = NibbleConfig {
            d: Some(rat_int(0)),
            ..NibbleConfig::default()
        };
        assert!(matches!(
            solve(&graph, 1, &rat_int(1), &cfg),
            Err(NibbleError::InvalidParameter(m)) if m.contains("below the actual")
        ));
        let thin = g(vec![vec!["a"], vec!["b", "c"]], vec![]);
        assert!(matches!(
            solve(&thin, 2, &rat_int(1), &NibbleConfig::default()),
            Err(NibbleError::InvalidParameter(m)) if m.contains("thickness")
        ));
    }

    #[test]
    fn solve_reports_hypothesis_flags() {
        // local degree 1 but D = 1/3: Gamma^5 > D
        let graph = g(
            vec![vec!["a", "a2", "a3"], vec!["b", "b2", "b3"]],
            vec![("a", "b")],
        );
        let res = solve(&graph, 1, &rat_int(1), &NibbleConfig::default()).unwrap();
        assert!(res.hypothesis_ok);
        assert!(!res.local_degree_ok);
        assert!(verify_its(&graph, &res.its.unwrap()).ok());

        // forcing a huge D breaks the thickness hypothesis, reported only
        let edgeless = g(vec![vec!["a", "b"], vec!["c", "d"]], vec![]);
        let cfg = NibbleConfig {
            d: Some(rat_int(100)),
            ..NibbleConfig::default()
        };
        let res = solve(&edgeless, 1, &rat_int(1), &cfg).unwrap();
        assert!(!res.hypothesis_ok);
        assert!(res.its.is_some());
    }

    #[test]
    fn solve_is_deterministic() {
        let spec = GeneratorSpec::Random {
            r: 4,
            n: 20,
            avg_target: "2".into(),
            local_cap: 4,
            seed: 11,
        };
        let graph = gen::generate(&spec).unwrap();
        let cfg = NibbleConfig {
            seed: 9,
            ..NibbleConfig::default()
        };
        let a = solve(&graph, 1, &rat(1, 2), &cfg).unwrap();
        let b = solve(&graph, 1, &rat(1, 2), &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn solve_fails_honestly_when_no_its_exists() {
        // label cliques leave no transversal: every selection repeats a label
        let graph = gen::label_cliques(1, 2).unwrap();
        let err = solve(&graph, 1, &rat_int(1), &NibbleConfig::default()).unwrap_err();
        assert!(matches!(
            err,
            NibbleError::RetriesExhausted { round: 1, .. }
        ));
    }

    #[test]
    fn round_record_json_is_stable() {
        let mut picks = BTreeMap::new();
        picks.insert(0, vec!["a1".to_string()]);
        picks.insert(1, vec!["b1".to_string()]);
        picks.insert(2, vec!["c2".to_string()]);
        let rec = RoundRecord {
            t: 1,
            blocks: 3,
            s_t: rat(7, 2),
            d_t: rat(5, 2),
            pruned: 1,
            activated: vec![0, 2],
            accepted: vec![2],
            picks,
            deleted: 4,
            retries: 0,
        };
        assert_eq!(
            rec.to_json(false).to_string(),
            r#"{"accepted":1,"activated":2,"blocks":3,"d_t":"5/2","deleted":4,"pruned":1,"retries":0,"s_t":"7/2","t":1}"#
        );
        let verbose = rec.to_json(true);
        assert_eq!(verbose["accepted_blocks"], serde_json::json!([2]));
        assert_eq!(verbose["activated_blocks"], serde_json::json!([0, 2]));
        assert_eq!(verbose["picks"]["1"], serde_json::json!(["b1"]));
    }
}
