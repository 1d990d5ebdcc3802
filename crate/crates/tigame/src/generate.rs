//! Constructors and enumerators for the graph families the solver and
//! harness work on: paths, cycles, stars, triangle-free triple unions,
//! uniformly random labelled trees, and exhaustive lists of free trees and
//! forests up to isomorphism.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use thiserror::Error;

use crate::graph::{PartiallyPlayedGraph, VertexId};

/// Free-tree enumeration is capped here; the count grows quickly (551
/// shapes at 12 vertices).
pub const TREE_ENUM_CAP: u32 = 12;
/// Forest enumeration by edge count is capped here.
pub const FOREST_ENUM_CAP: u32 = 10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenerateError {
    #[error("a cycle needs at least 3 vertices, got {0}")]
    CycleTooShort(u32),
    #[error("enumeration of size {requested} is above the cap of {cap}")]
    SizeCap { requested: u32, cap: u32 },
    #[error("canonical codes are defined for trees only")]
    NotATree,
}

/// Path on `n` vertices (0 or 1 vertices give an edgeless graph).
pub fn path(n: u32) -> PartiallyPlayedGraph {
    let pairs: Vec<(u32, u32)> = (1..n).map(|i| (i - 1, i)).collect();
    PartiallyPlayedGraph::unclaimed(n, &pairs).expect("path edges are simple")
}

/// Cycle on `n >= 3` vertices.
pub fn cycle(n: u32) -> Result<PartiallyPlayedGraph, GenerateError> {
    if n < 3 {
        return Err(GenerateError::CycleTooShort(n));
    }
    let pairs: Vec<(u32, u32)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Ok(PartiallyPlayedGraph::unclaimed(n, &pairs).expect("cycle edges are simple"))
}

/// Star on `n` vertices: vertex 0 joined to all others.
pub fn star(n: u32) -> PartiallyPlayedGraph {
    let pairs: Vec<(u32, u32)> = (1..n).map(|i| (0, i)).collect();
    PartiallyPlayedGraph::unclaimed(n, &pairs).expect("star edges are simple")
}

/// Disjoint union of `k` paths on three vertices.
pub fn k_copies_p3(k: u32) -> PartiallyPlayedGraph {
    let mut pairs = Vec::new();
    for c in 0..k {
        let b = 3 * c;
        pairs.push((b, b + 1));
        pairs.push((b + 1, b + 2));
    }
    PartiallyPlayedGraph::unclaimed(3 * k, &pairs).expect("disjoint paths are simple")
}

/// Uniformly random labelled tree on `n` vertices, decoded from a random
/// Pruefer sequence.
pub fn random_labeled_tree<R: Rng>(n: u32, rng: &mut R) -> PartiallyPlayedGraph {
    if n < 2 {
        return PartiallyPlayedGraph::unclaimed(n, &[]).expect("no edges");
    }
    let seq: Vec<u32> = (0..n.saturating_sub(2))
        .map(|_| rng.gen_range(0..n))
        .collect();
    tree_from_pruefer(n, &seq)
}

/// Decodes a Pruefer sequence of length `n - 2` into the labelled tree it
/// encodes.
pub fn tree_from_pruefer(n: u32, seq: &[u32]) -> PartiallyPlayedGraph {
    assert_eq!(seq.len() as u32 + 2, n, "sequence length must be n - 2");
    let mut degree = vec![1u32; n as usize];
    for &x in seq {
        degree[x as usize] += 1;
    }
    let mut pairs = Vec::with_capacity(n as usize - 1);
    for &x in seq {
        let leaf = (0..n).find(|&v| degree[v as usize] == 1).expect("a leaf remains");
        pairs.push((leaf, x));
        degree[leaf as usize] -= 1;
        degree[x as usize] -= 1;
    }
    let rest: Vec<u32> = (0..n).filter(|&v| degree[v as usize] == 1).collect();
    pairs.push((rest[0], rest[1]));
    PartiallyPlayedGraph::unclaimed(n, &pairs).expect("decoded tree is simple")
}

/// Canonical form of a free tree: the encoding is rooted at the tree's
/// centre (taking the smaller of the two encodings when the centre is an
/// edge), so two trees get the same string exactly when they are isomorphic.
pub fn canonical_code(g: &PartiallyPlayedGraph) -> Result<String, GenerateError> {
    let stats = g.stats();
    if stats.k != 1 || stats.m + 1 != stats.n {
        return Err(GenerateError::NotATree);
    }
    let code = centers(g)
        .into_iter()
        .map(|c| rooted_code(g, c))
        .min()
        .expect("a tree has one or two centres");
    Ok(code)
}

fn centers(g: &PartiallyPlayedGraph) -> Vec<VertexId> {
    let mut degree: BTreeMap<VertexId, usize> = g
        .vertices()
        .map(|v| (v, g.degree(v).unwrap()))
        .collect();
    let mut alive: BTreeSet<VertexId> = g.vertices().collect();
    while alive.len() > 2 {
        let shed: Vec<VertexId> = alive
            .iter()
            .copied()
            .filter(|v| degree[v] <= 1)
            .collect();
        for v in shed {
            alive.remove(&v);
            for e in g.incident(v) {
                let w = g.edge(*e).unwrap().other(v);
                if alive.contains(&w) {
                    *degree.get_mut(&w).unwrap() -= 1;
                }
            }
        }
    }
    alive.into_iter().collect()
}

fn rooted_code(g: &PartiallyPlayedGraph, root: VertexId) -> String {
    fn go(g: &PartiallyPlayedGraph, v: VertexId, parent: Option<VertexId>) -> String {
        let mut kids: Vec<String> = g
            .incident(v)
            .iter()
            .map(|e| g.edge(*e).unwrap().other(v))
            .filter(|w| Some(*w) != parent)
            .map(|w| go(g, w, Some(v)))
            .collect();
        kids.sort();
        let mut out = String::from("(");
        for k in kids {
            out.push_str(&k);
        }
        out.push(')');
        out
    }
    go(g, root, None)
}

/// All free trees on `n` vertices, one representative per isomorphism
/// class, in canonical-code order.
pub fn all_trees(n: u32) -> Result<Vec<PartiallyPlayedGraph>, GenerateError> {
    if n > TREE_ENUM_CAP {
        return Err(GenerateError::SizeCap {
            requested: n,
            cap: TREE_ENUM_CAP,
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    // Grow by attaching one new leaf everywhere; every tree on k vertices
    // arises from one on k - 1 this way. Deduplicate by canonical code.
    let mut current: Vec<(String, Vec<(u32, u32)>)> = vec![("()".to_string(), Vec::new())];
    for size in 2..=n {
        let mut seen: BTreeMap<String, Vec<(u32, u32)>> = BTreeMap::new();
        for (_, edges) in &current {
            for attach in 0..size - 1 {
                let mut grown = edges.clone();
                grown.push((attach, size - 1));
                let g = PartiallyPlayedGraph::unclaimed(size, &grown)
                    .expect("grown tree is simple");
                let code = canonical_code(&g).expect("grown graph is a tree");
                seen.entry(code).or_insert(grown);
            }
        }
        current = seen.into_iter().collect();
    }
    Ok(current
        .into_iter()
        .map(|(_, edges)| {
            PartiallyPlayedGraph::unclaimed(n, &edges).expect("stored tree is simple")
        })
        .collect())
}

/// All forests with exactly `m` edges and no isolated vertices, one per
/// isomorphism class. Components are free trees with at least one edge.
pub fn all_forests(m: u32) -> Result<Vec<PartiallyPlayedGraph>, GenerateError> {
    if m > FOREST_ENUM_CAP {
        return Err(GenerateError::SizeCap {
            requested: m,
            cap: FOREST_ENUM_CAP,
        });
    }
    // Trees by edge count, i.e. on (edges + 1) vertices.
    let mut trees_by_edges: Vec<Vec<PartiallyPlayedGraph>> = Vec::new();
    for e in 0..=m {
        trees_by_edges.push(all_trees(e + 1)?);
    }
    let mut out = Vec::new();
    // Non-increasing component edge counts summing to m, then a
    // non-decreasing choice of tree index inside each run of equal counts,
    // so every multiset of components appears exactly once.
    fn assemble(
        remaining: u32,
        max_part: u32,
        min_index_for_part: &mut BTreeMap<u32, usize>,
        parts: &mut Vec<(u32, usize)>,
        trees_by_edges: &[Vec<PartiallyPlayedGraph>],
        out: &mut Vec<PartiallyPlayedGraph>,
    ) {
        if remaining == 0 {
            let mut pairs = Vec::new();
            let mut offset = 0u32;
            for &(edges, idx) in parts.iter() {
                let t = &trees_by_edges[edges as usize][idx];
                for (_, e) in t.edges() {
                    pairs.push((e.u.0 + offset, e.v.0 + offset));
                }
                offset += edges + 1;
            }
            out.push(
                PartiallyPlayedGraph::unclaimed(offset, &pairs)
                    .expect("disjoint union is simple"),
            );
            return;
        }
        for part in (1..=max_part.min(remaining)).rev() {
            let start = if max_part == part {
                *min_index_for_part.get(&part).unwrap_or(&0)
            } else {
                0
            };
            for idx in start..trees_by_edges[part as usize].len() {
                parts.push((part, idx));
                let saved = min_index_for_part.insert(part, idx);
                assemble(
                    remaining - part,
                    part,
                    min_index_for_part,
                    parts,
                    trees_by_edges,
                    out,
                );
                match saved {
                    Some(s) => {
                        min_index_for_part.insert(part, s);
                    }
                    None => {
                        min_index_for_part.remove(&part);
                    }
                }
                parts.pop();
            }
        }
    }
    assemble(
        m,
        m,
        &mut BTreeMap::new(),
        &mut Vec::new(),
        &trees_by_edges,
        &mut out,
    );
    Ok(out)
}

/// A few connected 3-regular graphs for exploring the game beyond forests.
pub fn cubic_graphs() -> Vec<(String, PartiallyPlayedGraph)> {
    let complete4 = PartiallyPlayedGraph::unclaimed(
        4,
        &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
    )
    .unwrap();
    let complete_bipartite33 = PartiallyPlayedGraph::unclaimed(
        6,
        &[
            (0, 3),
            (0, 4),
            (0, 5),
            (1, 3),
            (1, 4),
            (1, 5),
            (2, 3),
            (2, 4),
            (2, 5),
        ],
    )
    .unwrap();
    let prism = PartiallyPlayedGraph::unclaimed(
        6,
        &[
            (0, 1),
            (1, 2),
            (2, 0),
            (3, 4),
            (4, 5),
            (5, 3),
            (0, 3),
            (1, 4),
            (2, 5),
        ],
    )
    .unwrap();
    let mut cube_pairs = Vec::new();
    for v in 0u32..8 {
        for bit in 0..3 {
            let w = v ^ (1 << bit);
            if v < w {
                cube_pairs.push((v, w));
            }
        }
    }
    let cube = PartiallyPlayedGraph::unclaimed(8, &cube_pairs).unwrap();
    let mut petersen_pairs = Vec::new();
    for i in 0u32..5 {
        petersen_pairs.push((i, (i + 1) % 5));
        petersen_pairs.push((5 + i, 5 + (i + 2) % 5));
        petersen_pairs.push((i, 5 + i));
    }
    let petersen = PartiallyPlayedGraph::unclaimed(10, &petersen_pairs).unwrap();
    vec![
        ("complete-4".to_string(), complete4),
        ("complete-bipartite-3-3".to_string(), complete_bipartite33),
        ("prism".to_string(), prism),
        ("cube".to_string(), cube),
        ("petersen".to_string(), petersen),
    ]
}
