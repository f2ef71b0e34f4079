//! Auxiliary graphs that reduce size-s selections to size-1 transversals.
//!
//! Two constructions over a base graph:
//!
//! * blow-up aux: one aux vertex per s-subset of each block; two aux
//!   vertices are adjacent iff some base edge joins their subsets. Its
//!   independent transversals (one aux vertex per aux block) correspond
//!   exactly to the base graph's ITSs of size s.
//! * quotient aux: the same adjacency rule over a prescribed partition of
//!   each block into groups of exactly s vertices, t groups per block.
//!
//! Aux vertex ids join the member ids with '+' in global vertex order, so
//! aux graphs can be written to the ordinary instance format and fed back
//! to any solver.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigUint;
use thiserror::Error;

use crate::graph::{PartitionedGraph, TransversalBlowup};
use crate::io::Instance;
use crate::math::{binomial, rat_int, ColexSubsets, Rat};

/// Cap on total aux vertices; the blow-up construction is combinatorially
/// explosive and should fail fast rather than thrash.
pub const DEFAULT_AUX_CAP: usize = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AuxError {
    #[error("block {block} has {size} vertices, fewer than s = {s}")]
    BlockTooThin { block: usize, size: usize, s: usize },
    #[error("aux graph would have {total} vertices, more than the cap {cap}")]
    CapExceeded { total: BigUint, cap: usize },
    #[error("vertex id {0:?} contains the aux id separator '+'")]
    IdSeparatorClash(String),
    #[error("block {0} size is not divisible by s")]
    IndivisibleBlock(usize),
    #[error("blocks split into different group counts")]
    UnequalGroupCounts,
    #[error("group {group} of block {block} has {got} vertices, expected {want}")]
    GroupSizeMismatch {
        block: usize,
        group: usize,
        got: usize,
        want: usize,
    },
    #[error("groups of block {0} do not partition the block")]
    GroupCoverage(usize),
    #[error("unknown vertex {0:?} in grouping")]
    UnknownGroupVertex(String),
    #[error("aux selection is not a transversal: {0}")]
    NotTransversal(String),
    #[error("aux vertices {0:?} and {1:?} are adjacent")]
    NotIndependent(String, String),
    #[error("unknown aux vertex {0:?}")]
    UnknownAuxVertex(String),
}

/// Shared guts of both aux constructions: the aux graph plus the member
/// list (base vertex indices) behind every aux vertex.
#[derive(Debug, Clone)]
struct AuxCore {
    base: PartitionedGraph,
    s: usize,
    graph: PartitionedGraph,
    members: Vec<Vec<u32>>,
}

fn aux_id(base: &PartitionedGraph, members: &[u32]) -> String {
    members
        .iter()
        .map(|&v| base.id(v))
        .collect::<Vec<_>>()
        .join("+")
}

fn check_separator(base: &PartitionedGraph) -> Result<(), AuxError> {
    for v in 0..base.vertex_count() as u32 {
        if base.id(v).contains('+') {
            return Err(AuxError::IdSeparatorClash(base.id(v).to_string()));
        }
    }
    Ok(())
}

/// Builds the aux graph given per-block member lists (each member a sorted
/// list of base vertex indices). Adjacency is derived by walking base edges
/// and joining every member pair that the edge touches, which matches the
/// "each endpoint lies in that many s-sets" counting argument.
fn build_core(base: &PartitionedGraph, s: usize, member_blocks: Vec<Vec<Vec<u32>>>) -> AuxCore {
    let mut members: Vec<Vec<u32>> = Vec::new();
    let mut ids: Vec<Vec<String>> = Vec::new();
    let mut containing: Vec<Vec<u32>> = vec![Vec::new(); base.vertex_count()];
    for block in member_blocks {
        let mut id_block = Vec::with_capacity(block.len());
        for m in block {
            let aux_idx = members.len() as u32;
            for &v in &m {
                containing[v as usize].push(aux_idx);
            }
            id_block.push(aux_id(base, &m));
            members.push(m);
        }
        ids.push(id_block);
    }
    let mut pairs: HashSet<(u32, u32)> = HashSet::new();
    for &(u, v) in base.edges() {
        for &a in &containing[u as usize] {
            for &b in &containing[v as usize] {
                pairs.insert((a.min(b), a.max(b)));
            }
        }
    }
    let aux_ids_flat: Vec<String> = ids.iter().flatten().cloned().collect();
    let edges: Vec<(String, String)> = pairs
        .into_iter()
        .map(|(a, b)| {
            (
                aux_ids_flat[a as usize].clone(),
                aux_ids_flat[b as usize].clone(),
            )
        })
        .collect();
    let graph = PartitionedGraph::new(ids, edges).expect("aux construction is valid");
    AuxCore {
        base: base.clone(),
        s,
        graph,
        members,
    }
}

fn lift_core(core: &AuxCore, aux_t: &TransversalBlowup) -> Result<TransversalBlowup, AuxError> {
    if aux_t.s != 1 {
        return Err(AuxError::NotTransversal(format!(
            "selects {} aux vertices per block, expected 1",
            aux_t.s
        )));
    }
    let mut picked: Vec<u32> = Vec::with_capacity(core.graph.r());
    for i in 0..core.graph.r() {
        let verts = core
            .selection_for_block(aux_t, i)
            .ok_or_else(|| AuxError::NotTransversal(format!("aux block {i} not covered")))?;
        if verts.len() != 1 {
            return Err(AuxError::NotTransversal(format!(
                "aux block {i} selects {} vertices, expected 1",
                verts.len()
            )));
        }
        let id = &verts[0];
        let v = core
            .graph
            .idx_of(id)
            .ok_or_else(|| AuxError::UnknownAuxVertex(id.clone()))?;
        if core.graph.block_of(v) != i {
            return Err(AuxError::NotTransversal(format!(
                "aux vertex {id:?} listed under block {i} but lives in block {}",
                core.graph.block_of(v)
            )));
        }
        picked.push(v);
    }
    for (k, &a) in picked.iter().enumerate() {
        for &b in &picked[k + 1..] {
            if core.graph.has_edge(a, b) {
                return Err(AuxError::NotIndependent(
                    core.graph.id(a.min(b)).to_string(),
                    core.graph.id(a.max(b)).to_string(),
                ));
            }
        }
    }
    let mut selection: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (i, &a) in picked.iter().enumerate() {
        selection.insert(
            i,
            core.members[a as usize]
                .iter()
                .map(|&v| core.base.id(v).to_string())
                .collect(),
        );
    }
    Ok(TransversalBlowup {
        s: core.s,
        selection,
    })
}

impl AuxCore {
    fn selection_for_block<'a>(
        &self,
        t: &'a TransversalBlowup,
        i: usize,
    ) -> Option<&'a Vec<String>> {
        t.selection.get(&i)
    }
}

// === blow-up aux ===

/// Aux graph over all s-subsets of every block, in colex order per block.
#[derive(Debug, Clone)]
pub struct BlowupAuxGraph {
    core: AuxCore,
}

pub fn blowup_aux(base: &PartitionedGraph, s: usize) -> Result<BlowupAuxGraph, AuxError> {
    blowup_aux_capped(base, s, DEFAULT_AUX_CAP)
}

pub fn blowup_aux_capped(
    base: &PartitionedGraph,
    s: usize,
    cap: usize,
) -> Result<BlowupAuxGraph, AuxError> {
    assert!(s >= 1, "s must be positive");
    check_separator(base)?;
    for i in 0..base.r() {
        if base.block(i).len() < s {
            return Err(AuxError::BlockTooThin {
                block: i,
                size: base.block(i).len(),
                s,
            });
        }
    }
    let mut total = BigUint::ZERO;
    for i in 0..base.r() {
        total += binomial(base.block(i).len(), s);
    }
    if total > BigUint::from(cap) {
        return Err(AuxError::CapExceeded { total, cap });
    }
    let member_blocks: Vec<Vec<Vec<u32>>> = (0..base.r())
        .map(|i| {
            let verts = base.block(i);
            ColexSubsets::new(verts.len(), s)
                .map(|positions| positions.iter().map(|&p| verts[p]).collect())
                .collect()
        })
        .collect();
    Ok(BlowupAuxGraph {
        core: build_core(base, s, member_blocks),
    })
}

impl BlowupAuxGraph {
    pub fn base(&self) -> &PartitionedGraph {
        &self.core.base
    }

    pub fn s(&self) -> usize {
        self.core.s
    }

    /// The aux graph itself; run any solver on it with s = 1.
    pub fn graph(&self) -> &PartitionedGraph {
        &self.core.graph
    }

    /// Base vertices behind an aux vertex (global indices, ascending).
    pub fn members(&self, aux_idx: u32) -> &[u32] {
        &self.core.members[aux_idx as usize]
    }

    /// Back-translates an independent transversal of the aux graph into an
    /// ITS of the base graph.
    pub fn lift(&self, aux_t: &TransversalBlowup) -> Result<TransversalBlowup, AuxError> {
        lift_core(&self.core, aux_t)
    }

    pub fn to_instance(&self) -> Instance {
        Instance {
            graph: self.core.graph.clone(),
            s: Some(1),
        }
    }

    /// Checks the construction's degree bounds against the base profile:
    /// aux block i has exactly C(|V_i|, s) vertices, and max degree, local
    /// degree and block average degree each grow by a factor of at most
    /// s * C(lmax - 1, s - 1), where lmax is the largest base block.
    pub fn bounds_hold(&self) -> bool {
        let base_p = self.core.base.profile();
        let aux_p = self.core.graph.profile();
        let s = self.core.s;
        let lmax = (0..self.core.base.r())
            .map(|i| self.core.base.block(i).len())
            .max()
            .unwrap();
        let factor = BigUint::from(s) * binomial(lmax - 1, s - 1);
        let sizes_ok = (0..self.core.base.r()).all(|i| {
            BigUint::from(self.core.graph.block(i).len())
                == binomial(self.core.base.block(i).len(), s)
        });
        let factor_rat = Rat::from_integer(factor.clone().into());
        sizes_ok
            && BigUint::from(aux_p.max_degree) <= &factor * BigUint::from(base_p.max_degree)
            && BigUint::from(aux_p.local_degree) <= &factor * BigUint::from(base_p.local_degree)
            && aux_p.max_block_avg <= factor_rat * &base_p.max_block_avg
    }
}

// === quotient aux ===

/// Aux graph over a prescribed partition of each block into s-groups.
#[derive(Debug, Clone)]
pub struct QuotientAuxGraph {
    core: AuxCore,
    t: usize,
}

/// Splits each block into consecutive s-chunks in within-block order; the
/// deterministic default grouping.
pub fn consecutive_grouping(
    base: &PartitionedGraph,
    s: usize,
) -> Result<Vec<Vec<Vec<String>>>, AuxError> {
    assert!(s >= 1, "s must be positive");
    let mut t0: Option<usize> = None;
    let mut grouping = Vec::with_capacity(base.r());
    for i in 0..base.r() {
        let verts = base.block(i);
        if verts.len() % s != 0 {
            return Err(AuxError::IndivisibleBlock(i));
        }
        let t = verts.len() / s;
        match t0 {
            None => t0 = Some(t),
            Some(t0) if t0 != t => return Err(AuxError::UnequalGroupCounts),
            _ => {}
        }
        grouping.push(
            verts
                .chunks(s)
                .map(|c| c.iter().map(|&v| base.id(v).to_string()).collect())
                .collect(),
        );
    }
    Ok(grouping)
}

pub fn quotient_aux(
    base: &PartitionedGraph,
    grouping: &[Vec<Vec<String>>],
) -> Result<QuotientAuxGraph, AuxError> {
    check_separator(base)?;
    assert_eq!(grouping.len(), base.r(), "grouping must cover every block");
    let t = grouping.first().map(Vec::len).unwrap_or(0);
    let s = grouping
        .first()
        .and_then(|b| b.first())
        .map(Vec::len)
        .unwrap_or(0);
    assert!(s >= 1, "groups must be nonempty");
    let mut member_blocks: Vec<Vec<Vec<u32>>> = Vec::with_capacity(base.r());
    for (i, groups) in grouping.iter().enumerate() {
        if groups.len() != t {
            return Err(AuxError::UnequalGroupCounts);
        }
        let mut covered: HashMap<u32, ()> = HashMap::new();
        let mut block_members = Vec::with_capacity(groups.len());
        for (j, group) in groups.iter().enumerate() {
            if group.len() != s {
                return Err(AuxError::GroupSizeMismatch {
                    block: i,
                    group: j,
                    got: group.len(),
                    want: s,
                });
            }
            let mut m = Vec::with_capacity(s);
            for id in group {
                let v = base
                    .idx_of(id)
                    .ok_or_else(|| AuxError::UnknownGroupVertex(id.clone()))?;
                if base.block_of(v) != i || covered.insert(v, ()).is_some() {
                    return Err(AuxError::GroupCoverage(i));
                }
                m.push(v);
            }
            m.sort_unstable();
            block_members.push(m);
        }
        if covered.len() != base.block(i).len() {
            return Err(AuxError::GroupCoverage(i));
        }
        member_blocks.push(block_members);
    }
    Ok(QuotientAuxGraph {
        core: build_core(base, s, member_blocks),
        t,
    })
}

impl QuotientAuxGraph {
    pub fn base(&self) -> &PartitionedGraph {
        &self.core.base
    }

    pub fn s(&self) -> usize {
        self.core.s
    }

    /// Groups per block.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn graph(&self) -> &PartitionedGraph {
        &self.core.graph
    }

    pub fn members(&self, aux_idx: u32) -> &[u32] {
        &self.core.members[aux_idx as usize]
    }

    pub fn lift(&self, aux_t: &TransversalBlowup) -> Result<TransversalBlowup, AuxError> {
        lift_core(&self.core, aux_t)
    }

    pub fn to_instance(&self) -> Instance {
        Instance {
            graph: self.core.graph.clone(),
            s: Some(1),
        }
    }

    /// Quotient bounds: every aux block has exactly t vertices and max
    /// degree, local degree and block average degree grow by at most s.
    pub fn bounds_hold(&self) -> bool {
        let base_p = self.core.base.profile();
        let aux_p = self.core.graph.profile();
        let s = self.core.s;
        let sizes_ok = (0..self.core.graph.r()).all(|i| self.core.graph.block(i).len() == self.t);
        sizes_ok
            && aux_p.max_degree <= s * base_p.max_degree
            && aux_p.local_degree <= s * base_p.local_degree
            && aux_p.max_block_avg <= rat_int(s as i64) * &base_p.max_block_avg
    }
}
