//! JSON serialization for instances, candidates, and reports.
//!
//! Instance files are UTF-8 JSON with fields `s` (optional), `blocks`
//! (array of arrays of vertex ids) and `edges` (array of two-element id
//! arrays). Writing is canonical: blocks in stored order, each edge pair
//! normalized to string order, the edge list sorted lexicographically,
//! 2-space pretty printing, trailing newline. Canonical files round-trip
//! byte-exactly.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::graph::{DegreeProfile, GraphError, PartitionedGraph, TransversalBlowup};
use crate::math::rat_str;
use crate::oracle::CountReport;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    File(#[from] std::io::Error),
}

/// A parsed instance file: the graph plus its optional default size s.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: PartitionedGraph,
    pub s: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<usize>,
    blocks: Vec<Vec<String>>,
    edges: Vec<[String; 2]>,
}

pub fn parse_instance(text: &str) -> Result<Instance, IoError> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    let edges: Vec<(String, String)> = doc.edges.into_iter().map(|[a, b]| (a, b)).collect();
    let graph = PartitionedGraph::new(doc.blocks, edges)?;
    Ok(Instance { graph, s: doc.s })
}

pub fn instance_to_json(inst: &Instance) -> String {
    let mut edges: Vec<[String; 2]> = inst
        .graph
        .edges_as_ids()
        .into_iter()
        .map(|(a, b)| if a <= b { [a, b] } else { [b, a] })
        .collect();
    edges.sort();
    let doc = InstanceDoc {
        s: inst.s,
        blocks: inst.graph.blocks_as_ids(),
        edges,
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("instance serializes");
    out.push('\n');
    out
}

pub fn read_instance(path: &Path) -> Result<Instance, IoError> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn write_instance(path: &Path, inst: &Instance) -> Result<(), IoError> {
    Ok(std::fs::write(path, instance_to_json(inst))?)
}

#[derive(Serialize, Deserialize)]
struct CandidateDoc {
    s: usize,
    selection: Vec<PickDoc>,
}

#[derive(Serialize, Deserialize)]
struct PickDoc {
    block: usize,
    vertices: Vec<String>,
}

pub fn parse_candidate(text: &str) -> Result<TransversalBlowup, IoError> {
    let doc: CandidateDoc = serde_json::from_str(text)?;
    let mut selection = BTreeMap::new();
    for pick in doc.selection {
        selection.insert(pick.block, pick.vertices);
    }
    Ok(TransversalBlowup {
        s: doc.s,
        selection,
    })
}

pub fn candidate_to_json(cand: &TransversalBlowup) -> String {
    let doc = CandidateDoc {
        s: cand.s,
        selection: cand
            .selection
            .iter()
            .map(|(&block, vertices)| PickDoc {
                block,
                vertices: vertices.clone(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("candidate serializes");
    out.push('\n');
    out
}

pub fn read_candidate(path: &Path) -> Result<TransversalBlowup, IoError> {
    parse_candidate(&std::fs::read_to_string(path)?)
}

pub fn write_candidate(path: &Path, cand: &TransversalBlowup) -> Result<(), IoError> {
    Ok(std::fs::write(path, candidate_to_json(cand))?)
}

/// Degree profile as JSON; rationals rendered as exact "p/q" strings.
pub fn profile_json(p: &DegreeProfile) -> Value {
    json!({
        "max_degree": p.max_degree,
        "local_degree": p.local_degree,
        "thickness": p.thickness,
        "max_block_avg": rat_str(&p.max_block_avg),
        "per_block_avg": p.per_block_avg.iter().map(rat_str).collect::<Vec<_>>(),
    })
}

/// Count report as JSON; the exact count is rendered in decimal as a string
/// so arbitrary precision survives any JSON reader.
pub fn count_report_json(rep: &CountReport) -> Value {
    json!({
        "s": rep.s,
        "t": rep.t,
        "exact_count": rep.exact_count.to_string(),
        "lower_bound": rat_str(&rep.lower_bound),
        "hypothesis_met": rep.hypothesis_met,
    })
}
