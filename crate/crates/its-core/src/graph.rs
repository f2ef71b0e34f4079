//! Multipartite graphs with an explicit vertex partition.
//!
//! A `PartitionedGraph` is a finite simple graph whose vertex set is split
//! into nonempty blocks; every edge must cross two distinct blocks, so each
//! block is an independent set by construction. Global vertex indices are
//! assigned block-major (block 0 first, in input order), which is the
//! deterministic vertex order used by every tie-break in this crate.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::math::{rat_int, Rat};

// === errors ===

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("partition has no blocks")]
    EmptyPartition,
    #[error("block {0} is empty")]
    EmptyBlock(usize),
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertex(String),
    #[error("edge endpoint {0:?} is not a declared vertex")]
    DanglingEdgeEndpoint(String),
    #[error("self-loop at {0:?}")]
    SelfLoop(String),
    #[error("edge {0:?} -- {1:?} joins vertices of the same block")]
    IntraBlockEdge(String, String),
    #[error("duplicate edge {0:?} -- {1:?}")]
    DuplicateEdge(String, String),
}

// === graph ===

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionedGraph {
    ids: Vec<String>,
    blocks: Vec<Vec<u32>>,
    block_of: Vec<u32>,
    neighbors: Vec<Vec<u32>>,
    /// Canonical edge order: endpoints normalized so the first lies in the
    /// lower block, list sorted by (block pair, endpoint indices).
    edges: Vec<(u32, u32)>,
    id_to_idx: HashMap<String, u32>,
}

impl PartitionedGraph {
    /// Builds and validates a graph from blocks of ids and id edges.
    pub fn new<S: Into<String>>(
        blocks: Vec<Vec<S>>,
        edges: Vec<(S, S)>,
    ) -> Result<Self, GraphError> {
        if blocks.is_empty() {
            return Err(GraphError::EmptyPartition);
        }
        let mut ids: Vec<String> = Vec::new();
        let mut block_idx: Vec<Vec<u32>> = Vec::with_capacity(blocks.len());
        let mut block_of: Vec<u32> = Vec::new();
        let mut id_to_idx: HashMap<String, u32> = HashMap::new();
        for (b, block) in blocks.into_iter().enumerate() {
            if block.is_empty() {
                return Err(GraphError::EmptyBlock(b));
            }
            let mut this = Vec::with_capacity(block.len());
            for id in block {
                let id: String = id.into();
                let idx = ids.len() as u32;
                if id_to_idx.insert(id.clone(), idx).is_some() {
                    return Err(GraphError::DuplicateVertex(id));
                }
                ids.push(id);
                block_of.push(b as u32);
                this.push(idx);
            }
            block_idx.push(this);
        }

        let mut neighbors: Vec<Vec<u32>> = vec![Vec::new(); ids.len()];
        let mut canon: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        let mut seen: HashSet<(u32, u32)> = HashSet::new();
        for (a, b) in edges {
            let a: String = a.into();
            let b: String = b.into();
            let ai = *id_to_idx
                .get(&a)
                .ok_or_else(|| GraphError::DanglingEdgeEndpoint(a.clone()))?;
            let bi = *id_to_idx
                .get(&b)
                .ok_or_else(|| GraphError::DanglingEdgeEndpoint(b.clone()))?;
            if ai == bi {
                return Err(GraphError::SelfLoop(a));
            }
            if block_of[ai as usize] == block_of[bi as usize] {
                return Err(GraphError::IntraBlockEdge(a, b));
            }
            let key = (ai.min(bi), ai.max(bi));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge(a, b));
            }
            neighbors[ai as usize].push(bi);
            neighbors[bi as usize].push(ai);
            canon.push(key);
        }
        for n in &mut neighbors {
            n.sort_unstable();
        }
        // Global index order is block-major, so (min, max) already puts the
        // lower block first; sort by (block pair, endpoints).
        canon.sort_unstable_by_key(|&(a, b)| (block_of[a as usize], block_of[b as usize], a, b));
        Ok(PartitionedGraph {
            ids,
            blocks: block_idx,
            block_of,
            neighbors,
            edges: canon,
            id_to_idx,
        })
    }

    // === accessors ===

    pub fn r(&self) -> usize {
        self.blocks.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn block(&self, i: usize) -> &[u32] {
        &self.blocks[i]
    }

    pub fn block_of(&self, v: u32) -> usize {
        self.block_of[v as usize] as usize
    }

    pub fn id(&self, v: u32) -> &str {
        &self.ids[v as usize]
    }

    pub fn idx_of(&self, id: &str) -> Option<u32> {
        self.id_to_idx.get(id).copied()
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.neighbors[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.neighbors[v as usize].len()
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.neighbors[u as usize].binary_search(&v).is_ok()
    }

    /// Number of neighbors of v inside block i.
    pub fn degree_in_block(&self, v: u32, i: usize) -> usize {
        self.neighbors[v as usize]
            .iter()
            .filter(|&&u| self.block_of(u) == i)
            .count()
    }

    pub fn thickness(&self) -> usize {
        self.blocks.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Degree statistics of the partition.
    pub fn profile(&self) -> DegreeProfile {
        let max_degree = (0..self.vertex_count() as u32)
            .map(|v| self.degree(v))
            .max()
            .unwrap_or(0);
        let mut local_degree = 0;
        for v in 0..self.vertex_count() as u32 {
            let mut per_block: HashMap<u32, usize> = HashMap::new();
            for &u in self.neighbors(v) {
                *per_block.entry(self.block_of[u as usize]).or_insert(0) += 1;
            }
            if let Some(&m) = per_block.values().max() {
                local_degree = local_degree.max(m);
            }
        }
        let per_block_avg: Vec<Rat> = self
            .blocks
            .iter()
            .map(|b| {
                let total: usize = b.iter().map(|&v| self.degree(v)).sum();
                rat_int(total as i64) / rat_int(b.len() as i64)
            })
            .collect();
        let max_block_avg = per_block_avg
            .iter()
            .cloned()
            .max()
            .unwrap_or_else(Rat::zero);
        DegreeProfile {
            max_degree,
            local_degree,
            thickness: self.thickness(),
            per_block_avg,
            max_block_avg,
        }
    }

    /// The r-partite complement: same blocks, cross-block adjacency flipped.
    pub fn complement(&self) -> PartitionedGraph {
        let mut edges: Vec<(String, String)> = Vec::new();
        for u in 0..self.vertex_count() as u32 {
            for v in (u + 1)..self.vertex_count() as u32 {
                if self.block_of[u as usize] != self.block_of[v as usize] && !self.has_edge(u, v) {
                    edges.push((self.ids[u as usize].clone(), self.ids[v as usize].clone()));
                }
            }
        }
        let blocks: Vec<Vec<String>> = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|&v| self.ids[v as usize].clone()).collect())
            .collect();
        PartitionedGraph::new(blocks, edges).expect("complement of a valid graph is valid")
    }

    /// Induced subgraph on the kept vertices; block structure and ids are
    /// preserved. Fails with EmptyBlock if a block loses all its vertices.
    pub fn induced(&self, keep: &[bool]) -> Result<PartitionedGraph, GraphError> {
        assert_eq!(keep.len(), self.vertex_count());
        let (g, map) = self.induced_compact(keep)?;
        if map.len() != self.r() {
            let missing = (0..self.r())
                .find(|&i| !map.contains(&i))
                .expect("some block dropped");
            return Err(GraphError::EmptyBlock(missing));
        }
        Ok(g)
    }

    /// Induced subgraph dropping emptied blocks; returns the new-to-old block
    /// index map. Fails only if every vertex is dropped.
    pub fn induced_compact(
        &self,
        keep: &[bool],
    ) -> Result<(PartitionedGraph, Vec<usize>), GraphError> {
        assert_eq!(keep.len(), self.vertex_count());
        let mut blocks: Vec<Vec<String>> = Vec::new();
        let mut map: Vec<usize> = Vec::new();
        for (i, b) in self.blocks.iter().enumerate() {
            let kept: Vec<String> = b
                .iter()
                .filter(|&&v| keep[v as usize])
                .map(|&v| self.ids[v as usize].clone())
                .collect();
            if !kept.is_empty() {
                blocks.push(kept);
                map.push(i);
            }
        }
        let edges: Vec<(String, String)> = self
            .edges
            .iter()
            .filter(|&&(a, b)| keep[a as usize] && keep[b as usize])
            .map(|&(a, b)| (self.ids[a as usize].clone(), self.ids[b as usize].clone()))
            .collect();
        let g = PartitionedGraph::new(blocks, edges)?;
        Ok((g, map))
    }

    /// Blocks as id lists, in order.
    pub fn blocks_as_ids(&self) -> Vec<Vec<String>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&v| self.ids[v as usize].clone()).collect())
            .collect()
    }

    /// Edges as id pairs in canonical order.
    pub fn edges_as_ids(&self) -> Vec<(String, String)> {
        self.edges
            .iter()
            .map(|&(a, b)| (self.ids[a as usize].clone(), self.ids[b as usize].clone()))
            .collect()
    }
}

// === degree profile ===

/// Degree statistics of a partitioned graph. Invariants (checked in tests):
/// local_degree <= max_degree <= r * local_degree, and every per-block
/// average is at most max_degree.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeProfile {
    pub max_degree: usize,
    pub local_degree: usize,
    pub thickness: usize,
    pub per_block_avg: Vec<Rat>,
    pub max_block_avg: Rat,
}

// === transversal blow-ups ===

/// A selection of s vertices from each covered block whose union is meant to
/// be independent. `selection` maps block index to the chosen ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransversalBlowup {
    pub s: usize,
    pub selection: BTreeMap<usize, Vec<String>>,
}

impl TransversalBlowup {
    pub fn new(s: usize) -> Self {
        TransversalBlowup {
            s,
            selection: BTreeMap::new(),
        }
    }

    /// Builds from global vertex indices, sorting each block's choice by the
    /// deterministic vertex order.
    pub fn from_indices(
        graph: &PartitionedGraph,
        s: usize,
        picks: impl IntoIterator<Item = (usize, Vec<u32>)>,
    ) -> Self {
        let mut selection = BTreeMap::new();
        for (block, mut vs) in picks {
            vs.sort_unstable();
            selection.insert(
                block,
                vs.into_iter().map(|v| graph.id(v).to_string()).collect(),
            );
        }
        TransversalBlowup { s, selection }
    }

    pub fn covered_blocks(&self) -> Vec<usize> {
        self.selection.keys().copied().collect()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = &String> {
        self.selection.values().flatten()
    }
}

// === verification ===

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ItsViolation {
    NoSuchBlock(usize),
    UnknownVertex(String),
    WrongBlock {
        id: String,
        stated: usize,
        actual: usize,
    },
    DuplicateSelection(String),
    BlockSizeMismatch {
        block: usize,
        got: usize,
        want: usize,
    },
    BlockNotCovered(usize),
    EdgeInside(String, String),
}

impl fmt::Display for ItsViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ItsViolation::NoSuchBlock(i) => write!(f, "block {i} does not exist"),
            ItsViolation::UnknownVertex(id) => write!(f, "unknown vertex {id:?}"),
            ItsViolation::WrongBlock { id, stated, actual } => {
                write!(
                    f,
                    "vertex {id:?} listed under block {stated} but lives in block {actual}"
                )
            }
            ItsViolation::DuplicateSelection(id) => write!(f, "vertex {id:?} selected twice"),
            ItsViolation::BlockSizeMismatch { block, got, want } => {
                write!(f, "block {block} selects {got} vertices, expected {want}")
            }
            ItsViolation::BlockNotCovered(i) => write!(f, "block {i} not covered"),
            ItsViolation::EdgeInside(a, b) => {
                write!(f, "selected vertices {a:?} and {b:?} are adjacent")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub violations: Vec<ItsViolation>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn verify_inner(
    graph: &PartitionedGraph,
    cand: &TransversalBlowup,
    require_full: bool,
) -> VerifyReport {
    let mut violations = Vec::new();
    let mut chosen: Vec<u32> = Vec::new();
    let mut seen: HashSet<u32> = HashSet::new();
    for (&block, verts) in &cand.selection {
        if block >= graph.r() {
            violations.push(ItsViolation::NoSuchBlock(block));
            continue;
        }
        if verts.len() != cand.s {
            violations.push(ItsViolation::BlockSizeMismatch {
                block,
                got: verts.len(),
                want: cand.s,
            });
        }
        for id in verts {
            match graph.idx_of(id) {
                None => violations.push(ItsViolation::UnknownVertex(id.clone())),
                Some(v) => {
                    let actual = graph.block_of(v);
                    if actual != block {
                        violations.push(ItsViolation::WrongBlock {
                            id: id.clone(),
                            stated: block,
                            actual,
                        });
                    }
                    if !seen.insert(v) {
                        violations.push(ItsViolation::DuplicateSelection(id.clone()));
                    } else {
                        chosen.push(v);
                    }
                }
            }
        }
    }
    if require_full {
        for i in 0..graph.r() {
            if !cand.selection.contains_key(&i) {
                violations.push(ItsViolation::BlockNotCovered(i));
            }
        }
    }
    for (k, &u) in chosen.iter().enumerate() {
        for &v in &chosen[k + 1..] {
            if graph.has_edge(u, v) {
                let (a, b) = (u.min(v), u.max(v));
                violations.push(ItsViolation::EdgeInside(
                    graph.id(a).to_string(),
                    graph.id(b).to_string(),
                ));
            }
        }
    }
    VerifyReport { violations }
}

/// Accepts iff the candidate covers every block with exactly s vertices of
/// that block and the union is independent. The report lists every violation.
pub fn verify_its(graph: &PartitionedGraph, cand: &TransversalBlowup) -> VerifyReport {
    verify_inner(graph, cand, true)
}

/// Like `verify_its` but allows a subset of blocks to be covered.
pub fn verify_partial(graph: &PartitionedGraph, cand: &TransversalBlowup) -> VerifyReport {
    verify_inner(graph, cand, false)
}

/// Does `graph` contain s pairwise fully-joined s-sets, one per block
/// (a complete r-partite blow-up K_r(s) respecting the partition)? Decided
/// through the r-partite complement: such a configuration exists iff the
/// complement has a full independent transversal blow-up of size s.
pub fn has_clique_blowup(
    graph: &PartitionedGraph,
    s: usize,
    budget: crate::oracle::SearchBudget,
) -> Result<bool, crate::oracle::OracleError> {
    Ok(find_clique_blowup(graph, s, budget)?.is_some())
}

/// Witness-producing variant of `has_clique_blowup`: the returned selection
/// spans a K_r(s) in `graph`.
pub fn find_clique_blowup(
    graph: &PartitionedGraph,
    s: usize,
    budget: crate::oracle::SearchBudget,
) -> Result<Option<TransversalBlowup>, crate::oracle::OracleError> {
    let comp = graph.complement();
    crate::oracle::find_its(&comp, s, budget)
}

/// Shared handle used by modules that keep a graph alive across structures.
pub type GraphRef = Arc<PartitionedGraph>;
