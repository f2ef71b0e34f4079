//! Instance generators: extremal constructions with no ITS and seeded
//! random families with controlled degree statistics. All generators are
//! deterministic given their parameters (plus seed) and every output is a
//! valid partitioned graph.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::PartitionedGraph;
use crate::math::{parse_rat, rat, rat_int, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("bad generator parameter: {0}")]
    BadParameter(String),
    #[error("average degree target {target} is unreachable; the local cap limits it to {max}")]
    InfeasibleTarget { target: String, max: String },
}

/// Serializable description of one generator invocation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    /// Label construction tuned by block average degree.
    LabelCliques { s: usize, d: usize },
    /// Same construction tuned by maximum degree.
    LabelCliquesMaxDegree { s: usize, delta: usize },
    /// Disjoint complete bipartite copies split across blocks; no IT.
    DisjointBicliques { delta: usize },
    /// Seeded random instance with average-degree and local-degree caps.
    Random {
        r: usize,
        n: usize,
        avg_target: String,
        local_cap: usize,
        seed: u64,
    },
    /// Seeded random instance with a per-block incident-edge cap.
    BoundedIncidence {
        r: usize,
        t: usize,
        s: usize,
        seed: u64,
    },
}

pub fn generate(spec: &GeneratorSpec) -> Result<PartitionedGraph, GenError> {
    match spec {
        GeneratorSpec::LabelCliques { s, d } => label_cliques(*s, *d),
        GeneratorSpec::LabelCliquesMaxDegree { s, delta } => label_cliques_max_degree(*s, *delta),
        GeneratorSpec::DisjointBicliques { delta } => disjoint_bicliques(*delta),
        GeneratorSpec::Random {
            r,
            n,
            avg_target,
            local_cap,
            seed,
        } => {
            let d = parse_rat(avg_target)
                .map_err(|e| GenError::BadParameter(format!("avg_target: {e}")))?;
            random_instance(*r, *n, &d, *local_cap, *seed)
        }
        GeneratorSpec::BoundedIncidence { r, t, s, seed } => bounded_incidence(*r, *t, *s, *seed),
    }
}

/// D+1 blocks of sD vertices each; vertices with the same label form a
/// clique across blocks. Every vertex has degree exactly D, the local
/// degree is 1, and no ITS of size s exists: any s choices per block hit
/// s(D+1) > sD labels with repetition, and a repeated label is an edge.
pub fn label_cliques(s: usize, d: usize) -> Result<PartitionedGraph, GenError> {
    if s < 1 || d < 1 {
        return Err(GenError::BadParameter(
            "label_cliques needs s >= 1 and d >= 1".into(),
        ));
    }
    let blocks: Vec<Vec<String>> = (0..=d)
        .map(|i| (0..s * d).map(|l| format!("b{i}v{l}")).collect())
        .collect();
    let mut edges = Vec::new();
    for l in 0..s * d {
        for i in 0..=d {
            for j in (i + 1)..=d {
                edges.push((format!("b{i}v{l}"), format!("b{j}v{l}")));
            }
        }
    }
    Ok(PartitionedGraph::new(blocks, edges).expect("label construction is valid"))
}

/// The label construction parameterized by maximum degree: with d = delta
/// every vertex has degree exactly delta.
pub fn label_cliques_max_degree(s: usize, delta: usize) -> Result<PartitionedGraph, GenError> {
    label_cliques(s, delta)
}

/// 2Δ-1 disjoint copies of K_{Δ,Δ} spread over 2Δ blocks of size 2Δ-1 so
/// that no independent transversal exists.
///
/// Copy 0 anchors two chains: the odd copies 1,3,...,2Δ-3 and the even
/// copies 2,4,...,2Δ-2. Writing o_j and c_j for the j-th odd/even copy,
/// the blocks are
///
/// * level 1: {A_0 x (Δ-1), A_{o_1} x Δ} and {B_0 x (Δ-1), A_{c_1} x Δ},
/// * level j (2 <= j <= Δ-1): {B_{o_{j-1}} x (Δ-1), A_{o_j} x Δ} and the
///   even twin,
/// * closers: {A_0, B_{o_1}, ..., B_{o_{Δ-2}}, B_{o_{Δ-1}} x Δ} and the
///   even twin rooted at B_0.
///
/// An independent set meets at most one side of each copy, inducing a side
/// choice per copy. Whatever the choice, walking the chain that copy 0's
/// side selects reaches a block all of whose vertices lie on deselected
/// sides, so some block cannot be covered. The absence of an IT is also
/// verified by exhaustive search in tests rather than trusted.
pub fn disjoint_bicliques(delta: usize) -> Result<PartitionedGraph, GenError> {
    if delta < 1 {
        return Err(GenError::BadParameter(
            "disjoint_bicliques needs delta >= 1".into(),
        ));
    }
    let name = |copy: usize, side: char, idx: usize| format!("{side}{copy}_{idx}");
    if delta == 1 {
        return Ok(PartitionedGraph::new(
            vec![vec![name(0, 'A', 0)], vec![name(0, 'B', 0)]],
            vec![(name(0, 'A', 0), name(0, 'B', 0))],
        )
        .expect("single biclique is valid"));
    }
    let o = |j: usize| 2 * j - 1;
    let c = |j: usize| 2 * j;
    // (copy, side, multiplicity) slots per block
    let mut parts: Vec<Vec<(usize, char, usize)>> = Vec::new();
    parts.push(vec![(0, 'A', delta - 1), (o(1), 'A', delta)]);
    parts.push(vec![(0, 'B', delta - 1), (c(1), 'A', delta)]);
    for j in 2..delta {
        parts.push(vec![(o(j - 1), 'B', delta - 1), (o(j), 'A', delta)]);
        parts.push(vec![(c(j - 1), 'B', delta - 1), (c(j), 'A', delta)]);
    }
    let mut odd_closer = vec![(0, 'A', 1)];
    let mut even_closer = vec![(0, 'B', 1)];
    for j in 1..delta - 1 {
        odd_closer.push((o(j), 'B', 1));
        even_closer.push((c(j), 'B', 1));
    }
    odd_closer.push((o(delta - 1), 'B', delta));
    even_closer.push((c(delta - 1), 'B', delta));
    parts.push(odd_closer);
    parts.push(even_closer);

    // hand each side's delta vertices out in slot order
    let mut next: std::collections::HashMap<(usize, char), usize> =
        std::collections::HashMap::new();
    let blocks: Vec<Vec<String>> = parts
        .iter()
        .map(|slots| {
            let mut block = Vec::new();
            for &(copy, side, mult) in slots {
                let counter = next.entry((copy, side)).or_insert(0);
                for _ in 0..mult {
                    block.push(name(copy, side, *counter));
                    *counter += 1;
                }
            }
            block
        })
        .collect();
    let mut edges = Vec::new();
    for copy in 0..2 * delta - 1 {
        for i in 0..delta {
            for j in 0..delta {
                edges.push((name(copy, 'A', i), name(copy, 'B', j)));
            }
        }
    }
    Ok(PartitionedGraph::new(blocks, edges).expect("biclique arrangement is valid"))
}

/// r blocks of n vertices; a seeded shuffle of all cross pairs is scanned
/// once and an edge is kept whenever both endpoints stay within the
/// local-degree cap and both touched blocks stay within the average-degree
/// target. The scan is greedy, so the final maximum block average is the
/// largest reachable value <= avg_target along that order.
pub fn random_instance(
    r: usize,
    n: usize,
    avg_target: &Rat,
    local_cap: usize,
    seed: u64,
) -> Result<PartitionedGraph, GenError> {
    if r < 2 || n < 1 {
        return Err(GenError::BadParameter(
            "random_instance needs r >= 2 and n >= 1".into(),
        ));
    }
    if local_cap > n {
        return Err(GenError::BadParameter(
            "local-degree cap cannot exceed the block size".to_string(),
        ));
    }
    let max_avg = rat_int(((r - 1) * local_cap) as i64);
    if *avg_target > max_avg {
        return Err(GenError::InfeasibleTarget {
            target: crate::math::rat_str(avg_target),
            max: crate::math::rat_str(&max_avg),
        });
    }
    let id = |i: usize, j: usize| format!("v{i}_{j}");
    let blocks: Vec<Vec<String>> = (0..r).map(|i| (0..n).map(|j| id(i, j)).collect()).collect();

    let mut pairs: Vec<((usize, usize), (usize, usize))> = Vec::new();
    for bi in 0..r {
        for bj in (bi + 1)..r {
            for vi in 0..n {
                for vj in 0..n {
                    pairs.push(((bi, vi), (bj, vj)));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pairs.shuffle(&mut rng);

    // local[(block, vertex)][other_block] and per-block degree sums
    let mut local = vec![vec![0usize; r]; r * n];
    let mut deg_sum = vec![0usize; r];
    let flat = |b: usize, v: usize| b * n + v;
    let mut edges = Vec::new();
    for ((bi, vi), (bj, vj)) in pairs {
        if local_cap == 0
            || local[flat(bi, vi)][bj] >= local_cap
            || local[flat(bj, vj)][bi] >= local_cap
        {
            continue;
        }
        let ok_avg = |sum: usize| rat(sum as i64 + 1, n as i64) <= *avg_target;
        if !ok_avg(deg_sum[bi]) || !ok_avg(deg_sum[bj]) {
            continue;
        }
        local[flat(bi, vi)][bj] += 1;
        local[flat(bj, vj)][bi] += 1;
        deg_sum[bi] += 1;
        deg_sum[bj] += 1;
        edges.push((id(bi, vi), id(bj, vj)));
    }
    Ok(PartitionedGraph::new(blocks, edges).expect("random instance is valid"))
}

/// r blocks of t vertices; a seeded shuffle of cross pairs is scanned and
/// an edge is kept while both endpoint blocks stay incident with at most
/// (t / 4s^2) * t edges. Outputs always satisfy the counting hypothesis
/// checked by count_its at thickness t.
pub fn bounded_incidence(
    r: usize,
    t: usize,
    s: usize,
    seed: u64,
) -> Result<PartitionedGraph, GenError> {
    if r < 2 || s < 1 || t < s {
        return Err(GenError::BadParameter(
            "bounded_incidence needs r >= 2, s >= 1, t >= s".to_string(),
        ));
    }
    let cap = rat((t * t) as i64, (4 * s * s) as i64);
    let id = |i: usize, j: usize| format!("v{i}_{j}");
    let blocks: Vec<Vec<String>> = (0..r).map(|i| (0..t).map(|j| id(i, j)).collect()).collect();
    let mut pairs: Vec<((usize, usize), (usize, usize))> = Vec::new();
    for bi in 0..r {
        for bj in (bi + 1)..r {
            for vi in 0..t {
                for vj in 0..t {
                    pairs.push(((bi, vi), (bj, vj)));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pairs.shuffle(&mut rng);
    let mut incident = vec![0usize; r];
    let mut edges = Vec::new();
    for ((bi, vi), (bj, vj)) in pairs {
        if rat_int(incident[bi] as i64 + 1) > cap || rat_int(incident[bj] as i64 + 1) > cap {
            continue;
        }
        incident[bi] += 1;
        incident[bj] += 1;
        edges.push((id(bi, vi), id(bj, vj)));
    }
    Ok(PartitionedGraph::new(blocks, edges).expect("bounded incidence instance is valid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{count_its, find_its, SearchBudget};
    use num_traits::Zero;

    #[test]
    fn label_cliques_shape_and_profile() {
        let g = label_cliques(2, 2).unwrap();
        assert_eq!(g.r(), 3);
        assert_eq!(g.thickness(), 4);
        assert_eq!(g.edge_count(), 12);
        let p = g.profile();
        assert_eq!(p.max_block_avg, rat_int(2));
        assert_eq!(p.local_degree, 1);
        assert_eq!(p.max_degree, 2);
    }

    #[test]
    fn label_cliques_has_no_its() {
        for (s, d) in [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1)] {
            let g = label_cliques(s, d).unwrap();
            assert_eq!(
                find_its(&g, s, SearchBudget::default()).unwrap(),
                None,
                "s={s} d={d}"
            );
        }
    }

    /// Padding every block with one isolated vertex restores an ITS, so the
    /// construction is tight at desk scale.
    #[test]
    fn label_cliques_padded_has_its() {
        for (s, d) in [(1, 2), (2, 2)] {
            let g = label_cliques(s, d).unwrap();
            let mut blocks = g.blocks_as_ids();
            for (i, b) in blocks.iter_mut().enumerate() {
                b.push(format!("pad{i}"));
            }
            let padded = PartitionedGraph::new(blocks, g.edges_as_ids()).unwrap();
            assert!(
                find_its(&padded, s, SearchBudget::default())
                    .unwrap()
                    .is_some(),
                "s={s} d={d}"
            );
        }
    }

    #[test]
    fn max_degree_variant_is_exact() {
        let g = label_cliques_max_degree(1, 1).unwrap();
        assert_eq!(g.r(), 2);
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(find_its(&g, 1, SearchBudget::default()).unwrap(), None);
        for (s, delta) in [(1, 2), (2, 2), (1, 3)] {
            let g = label_cliques_max_degree(s, delta).unwrap();
            assert_eq!(g.profile().max_degree, delta, "s={s} delta={delta}");
        }
    }

    #[test]
    fn bicliques_shape() {
        for delta in 1..=4 {
            let g = disjoint_bicliques(delta).unwrap();
            assert_eq!(g.r(), 2 * delta);
            assert_eq!(g.thickness(), 2 * delta - 1);
            assert_eq!(g.vertex_count(), 2 * delta * (2 * delta - 1));
            assert_eq!(g.edge_count(), (2 * delta - 1) * delta * delta);
            assert_eq!(g.profile().max_degree, delta);
        }
    }

    #[test]
    fn bicliques_have_no_independent_transversal() {
        for delta in 1..=3 {
            let g = disjoint_bicliques(delta).unwrap();
            assert_eq!(
                find_its(&g, 1, SearchBudget::default()).unwrap(),
                None,
                "delta={delta}"
            );
        }
    }

    #[test]
    fn random_zero_target_is_edgeless() {
        let g = random_instance(3, 4, &rat_int(0), 2, 7).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn random_is_deterministic_and_capped() {
        let d = rat(3, 2);
        let a = random_instance(3, 4, &d, 2, 42).unwrap();
        let b = random_instance(3, 4, &d, 2, 42).unwrap();
        assert_eq!(a, b);
        let c = random_instance(3, 4, &d, 2, 43).unwrap();
        assert_ne!(a, c);
        for g in [a, c] {
            let p = g.profile();
            assert!(p.max_block_avg <= d);
            assert!(p.local_degree <= 2);
        }
    }

    #[test]
    fn random_reaches_reachable_targets() {
        // target 2 with ample cap: greedy fills both blocks to average 2
        let g = random_instance(2, 4, &rat_int(2), 4, 5).unwrap();
        assert_eq!(g.profile().max_block_avg, rat_int(2));
    }

    #[test]
    fn random_infeasible_target_errors() {
        let e = random_instance(3, 4, &rat_int(5), 2, 1).unwrap_err();
        assert_eq!(
            e,
            GenError::InfeasibleTarget {
                target: "5".into(),
                max: "4".into()
            }
        );
    }

    #[test]
    fn bounded_incidence_respects_cap_and_hypothesis() {
        for seed in 0..5 {
            let g = bounded_incidence(3, 4, 1, seed).unwrap();
            let rep = count_its(&g, 1, 4, SearchBudget::default()).unwrap();
            assert!(rep.hypothesis_met, "seed={seed}");
            assert!(
                Rat::from_integer(rep.exact_count.clone().into()) >= rep.lower_bound,
                "seed={seed}"
            );
        }
    }

    #[test]
    fn bounded_incidence_large_s_is_edgeless() {
        // cap t^2/4s^2 = 16/144 < 1
        let g = bounded_incidence(3, 4, 3, 9).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn bound_holds_across_small_grid() {
        for r in 2..=3 {
            for t in 1..=5 {
                for s in 1..=t {
                    let g = bounded_incidence(r, t, s, 1234).unwrap();
                    let rep = count_its(&g, s, t, SearchBudget::default()).unwrap();
                    assert!(rep.hypothesis_met, "r={r} t={t} s={s}");
                    assert!(
                        Rat::from_integer(rep.exact_count.clone().into()) >= rep.lower_bound,
                        "r={r} t={t} s={s}: {} < {}",
                        rep.exact_count,
                        crate::math::rat_str(&rep.lower_bound)
                    );
                    assert!(!rep.exact_count.is_zero() || rep.lower_bound <= Rat::zero());
                }
            }
        }
    }

    #[test]
    fn generator_spec_round_trips() {
        let specs = vec![
            GeneratorSpec::LabelCliques { s: 2, d: 3 },
            GeneratorSpec::Random {
                r: 3,
                n: 4,
                avg_target: "3/2".into(),
                local_cap: 2,
                seed: 42,
            },
        ];
        for spec in specs {
            let text = serde_json::to_string(&spec).unwrap();
            let back: GeneratorSpec = serde_json::from_str(&text).unwrap();
            assert_eq!(back, spec);
            assert!(generate(&spec).is_ok());
        }
    }
}
