//! Partially played graphs: the substrate every other module works on.
//!
//! A [`PartiallyPlayedGraph`] is an undirected simple graph whose edges each
//! carry a [`Claim`]. Vertex ids may become sparse after surgery (vertices are
//! deleted, fresh ones are allocated past the current maximum), so both
//! vertices and edges live in ordered maps and all iteration is deterministic.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors produced while building, mutating or parsing graphs.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("vertex id {id} out of range (vertex count {n})")]
    VertexOutOfRange { id: u32, n: u32 },
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("edge {0} is already claimed")]
    AlreadyClaimed(EdgeId),
    #[error("graph is not a forest")]
    NotForest,
    #[error("vertex {0} still has incident edges")]
    VertexNotIsolated(VertexId),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Identifier of a vertex. Ids are stable for the lifetime of a graph but may
/// be sparse after surgery.
#[derive(
    Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize,
)]
pub struct VertexId(pub u32);

/// Identifier of an edge. Surgery never renumbers surviving edges, so an edge
/// keeps its id even when an endpoint is replaced by a fresh vertex.
#[derive(
    Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize,
)]
pub struct EdgeId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Ownership mark on an edge.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Claim {
    Unclaimed,
    Toucher,
    Isolator,
}

impl Claim {
    pub fn letter(self) -> char {
        match self {
            Claim::Unclaimed => 'U',
            Claim::Toucher => 'T',
            Claim::Isolator => 'I',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'U' => Some(Claim::Unclaimed),
            'T' => Some(Claim::Toucher),
            'I' => Some(Claim::Isolator),
            _ => None,
        }
    }
}

/// Degree-based vertex taxonomy.
///
/// Isolated vertices (degree 0) are permitted: they count as untouched but
/// never as leaves.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum VertexClass {
    Isolated,
    Leaf,
    Small,
    Big,
}

impl VertexClass {
    pub fn from_degree(degree: usize) -> Self {
        match degree {
            0 => VertexClass::Isolated,
            1 => VertexClass::Leaf,
            2 => VertexClass::Small,
            _ => VertexClass::Big,
        }
    }
}

impl fmt::Display for VertexClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VertexClass::Isolated => "isolated",
            VertexClass::Leaf => "leaf",
            VertexClass::Small => "small",
            VertexClass::Big => "big",
        };
        f.write_str(s)
    }
}

/// An edge with its two endpoints and current claim.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub claim: Claim,
}

impl Edge {
    pub fn touches(&self, w: VertexId) -> bool {
        self.u == w || self.v == w
    }

    /// The endpoint that is not `w`. Panics if `w` is not an endpoint.
    pub fn other(&self, w: VertexId) -> VertexId {
        if self.u == w {
            self.v
        } else {
            debug_assert_eq!(self.v, w);
            self.u
        }
    }
}

/// Aggregate counts used throughout the pruning bookkeeping.
///
/// `potential` is `m + 4k - 3l`: edge count plus four per component minus
/// three per leaf. `q` counts components that consist of exactly one edge.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct GraphStats {
    pub n: u32,
    pub m: u32,
    pub k: u32,
    pub l: u32,
    pub q: u32,
    pub potential: i64,
}

/// The three shapes of maximal paths in a forest.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum LocusKind {
    /// A whole component that is a path; both endpoints are leaves.
    PathComponent,
    /// A maximal path joining two big vertices.
    Branch,
    /// A maximal path joining a big vertex to a leaf.
    Twig,
}

impl fmt::Display for LocusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LocusKind::PathComponent => "path-component",
            LocusKind::Branch => "branch",
            LocusKind::Twig => "twig",
        };
        f.write_str(s)
    }
}

/// A maximal path in a forest whose interior vertices all have degree two.
///
/// The edges are listed in path order. For a twig the first edge is the one
/// incident to the big endpoint; for branches and path components the
/// orientation with the smaller first edge id is used. `ends` follows the
/// same orientation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PathLocus {
    pub kind: LocusKind,
    pub edges: Vec<EdgeId>,
    pub ends: (VertexId, VertexId),
    pub end_classes: (VertexClass, VertexClass),
}

impl PathLocus {
    /// Number of edges in the path.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    fn min_edge(&self) -> EdgeId {
        *self.edges.iter().min().expect("locus has at least one edge")
    }
}

/// An undirected simple graph with claim marks on edges.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PartiallyPlayedGraph {
    adj: BTreeMap<VertexId, Vec<EdgeId>>,
    edges: BTreeMap<EdgeId, Edge>,
    next_vertex: u32,
}

impl PartiallyPlayedGraph {
    /// Builds a graph on vertices `0..n` from `(u, v, claim)` triples. Edge
    /// ids are assigned in input order starting from 0.
    pub fn build(n: u32, spec: &[(u32, u32, Claim)]) -> Result<Self, GraphError> {
        let mut g = PartiallyPlayedGraph {
            adj: (0..n).map(|v| (VertexId(v), Vec::new())).collect(),
            edges: BTreeMap::new(),
            next_vertex: n,
        };
        let mut seen: BTreeSet<(u32, u32)> = BTreeSet::new();
        for (i, &(u, v, claim)) in spec.iter().enumerate() {
            for id in [u, v] {
                if id >= n {
                    return Err(GraphError::VertexOutOfRange { id, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(VertexId(u)));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge(VertexId(u), VertexId(v)));
            }
            let id = EdgeId(i as u32);
            g.edges.insert(
                id,
                Edge {
                    u: VertexId(u),
                    v: VertexId(v),
                    claim,
                },
            );
            g.adj.get_mut(&VertexId(u)).unwrap().push(id);
            g.adj.get_mut(&VertexId(v)).unwrap().push(id);
        }
        for list in g.adj.values_mut() {
            list.sort_unstable();
        }
        Ok(g)
    }

    /// Builds an unclaimed graph on vertices `0..n`.
    pub fn unclaimed(n: u32, pairs: &[(u32, u32)]) -> Result<Self, GraphError> {
        let spec: Vec<(u32, u32, Claim)> =
            pairs.iter().map(|&(u, v)| (u, v, Claim::Unclaimed)).collect();
        Self::build(n, &spec)
    }

    pub fn vertex_count(&self) -> u32 {
        self.adj.len() as u32
    }

    pub fn edge_count(&self) -> u32 {
        self.edges.len() as u32
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.adj.contains_key(&v)
    }

    /// Vertices in ascending id order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.keys().copied()
    }

    /// `(id, edge)` pairs in ascending id order.
    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &Edge)> + '_ {
        self.edges.iter().map(|(&id, e)| (id, e))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(&id)
    }

    pub fn require_edge(&self, id: EdgeId) -> Result<&Edge, GraphError> {
        self.edges.get(&id).ok_or(GraphError::UnknownEdge(id))
    }

    /// Incident edge ids of `v` in ascending order.
    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        self.adj.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn degree(&self, v: VertexId) -> Option<usize> {
        self.adj.get(&v).map(Vec::len)
    }

    pub fn classify_vertex(&self, v: VertexId) -> Result<VertexClass, GraphError> {
        self.degree(v)
            .map(VertexClass::from_degree)
            .ok_or(GraphError::UnknownVertex(v))
    }

    /// Marks an unclaimed edge for a player. Claims never revert or change.
    pub fn set_claim(&mut self, id: EdgeId, claim: Claim) -> Result<(), GraphError> {
        debug_assert_ne!(claim, Claim::Unclaimed, "claims are only ever added");
        let edge = self.edges.get_mut(&id).ok_or(GraphError::UnknownEdge(id))?;
        if edge.claim != Claim::Unclaimed {
            return Err(GraphError::AlreadyClaimed(id));
        }
        edge.claim = claim;
        Ok(())
    }

    pub fn claim(&self, id: EdgeId) -> Option<Claim> {
        self.edges.get(&id).map(|e| e.claim)
    }

    /// Ids of unclaimed edges in ascending order.
    pub fn unclaimed_edges(&self) -> Vec<EdgeId> {
        self.edges
            .iter()
            .filter(|(_, e)| e.claim == Claim::Unclaimed)
            .map(|(&id, _)| id)
            .collect()
    }

    /// Allocates a fresh vertex past every id ever used.
    pub(crate) fn fresh_vertex(&mut self) -> VertexId {
        let v = VertexId(self.next_vertex);
        self.next_vertex += 1;
        self.adj.insert(v, Vec::new());
        v
    }

    /// Replaces endpoint `from` of `edge` with `to`, preserving the claim.
    pub(crate) fn retarget(&mut self, edge: EdgeId, from: VertexId, to: VertexId) {
        let e = self.edges.get_mut(&edge).expect("retarget of unknown edge");
        if e.u == from {
            e.u = to;
        } else {
            debug_assert_eq!(e.v, from);
            e.v = to;
        }
        let old = self.adj.get_mut(&from).expect("unknown endpoint");
        old.retain(|&x| x != edge);
        let new = self.adj.get_mut(&to).expect("unknown endpoint");
        new.push(edge);
        new.sort_unstable();
    }

    pub(crate) fn remove_edge(&mut self, id: EdgeId) -> Result<Edge, GraphError> {
        let edge = self.edges.remove(&id).ok_or(GraphError::UnknownEdge(id))?;
        for w in [edge.u, edge.v] {
            if let Some(list) = self.adj.get_mut(&w) {
                list.retain(|&x| x != id);
            }
        }
        Ok(edge)
    }

    /// Removes a vertex that has no remaining incident edges.
    pub(crate) fn remove_isolated_vertex(&mut self, v: VertexId) -> Result<(), GraphError> {
        match self.adj.get(&v) {
            None => Err(GraphError::UnknownVertex(v)),
            Some(list) if !list.is_empty() => Err(GraphError::VertexNotIsolated(v)),
            Some(_) => {
                self.adj.remove(&v);
                Ok(())
            }
        }
    }

    /// Connected components as sorted vertex lists, ordered by smallest
    /// contained vertex.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        let mut out = Vec::new();
        for start in self.adj.keys().copied() {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen.insert(start);
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &eid in self.incident(v) {
                    let w = self.edges[&eid].other(v);
                    if seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn component_count(&self) -> u32 {
        self.components().len() as u32
    }

    /// True when the graph has no cycles.
    pub fn is_forest(&self) -> bool {
        self.edge_count() + self.component_count() == self.vertex_count()
    }

    pub fn stats(&self) -> GraphStats {
        let n = self.vertex_count();
        let m = self.edge_count();
        let comps = self.components();
        let k = comps.len() as u32;
        let l = self
            .adj
            .values()
            .filter(|list| list.len() == 1)
            .count() as u32;
        let q = comps
            .iter()
            .filter(|comp| {
                let edges: usize = comp.iter().map(|&v| self.incident(v).len()).sum();
                edges / 2 == 1
            })
            .count() as u32;
        let potential = i64::from(m) + 4 * i64::from(k) - 3 * i64::from(l);
        GraphStats {
            n,
            m,
            k,
            l,
            q,
            potential,
        }
    }

    /// Decomposes a forest into its maximal degree-two paths.
    ///
    /// Every edge lies in exactly one locus. Loci are ordered by their
    /// smallest edge id.
    pub fn find_loci(&self) -> Result<Vec<PathLocus>, GraphError> {
        if !self.is_forest() {
            return Err(GraphError::NotForest);
        }
        let mut assigned: BTreeSet<EdgeId> = BTreeSet::new();
        let mut loci = Vec::new();
        // Walk outward from every terminal (degree != 2) vertex.
        for (&start, list) in &self.adj {
            if list.len() == 2 {
                continue;
            }
            for &first in list {
                if assigned.contains(&first) {
                    continue;
                }
                let mut edges = vec![first];
                assigned.insert(first);
                let mut cur = self.edges[&first].other(start);
                while self.incident(cur).len() == 2 {
                    // Continue along the incident edge we did not arrive by.
                    let came_by = *edges.last().unwrap();
                    let next_edge = self
                        .incident(cur)
                        .iter()
                        .copied()
                        .find(|&e| e != came_by)
                        .expect("degree-2 vertex has a continuation");
                    edges.push(next_edge);
                    assigned.insert(next_edge);
                    cur = self.edges[&next_edge].other(cur);
                }
                loci.push(self.normalize_locus(edges, start, cur));
            }
        }
        loci.sort_by_key(|p| p.min_edge());
        Ok(loci)
    }

    fn normalize_locus(
        &self,
        mut edges: Vec<EdgeId>,
        mut a: VertexId,
        mut b: VertexId,
    ) -> PathLocus {
        let mut ca = VertexClass::from_degree(self.incident(a).len());
        let mut cb = VertexClass::from_degree(self.incident(b).len());
        let kind = match (ca, cb) {
            (VertexClass::Leaf, VertexClass::Leaf) => LocusKind::PathComponent,
            (VertexClass::Big, VertexClass::Big) => LocusKind::Branch,
            _ => LocusKind::Twig,
        };
        let flip = match (ca, cb) {
            // A twig is read from its big end.
            (VertexClass::Leaf, VertexClass::Big) => true,
            (VertexClass::Big, VertexClass::Leaf) => false,
            // Symmetric ends: orient so the first edge id is smallest.
            _ => edges.last() < edges.first(),
        };
        if flip {
            edges.reverse();
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut ca, &mut cb);
        }
        PathLocus {
            kind,
            edges,
            ends: (a, b),
            end_classes: (ca, cb),
        }
    }

    /// Edges of the graph-minus-Isolator-edges that are incident to a leaf of
    /// that reduced graph. Claimed Toucher edges can appear in the result;
    /// callers that want a move filter to unclaimed ones.
    pub fn meta_leaf_edges(&self) -> BTreeSet<EdgeId> {
        let mut meta_degree: BTreeMap<VertexId, usize> = BTreeMap::new();
        for (_, e) in self.edges() {
            if e.claim != Claim::Isolator {
                *meta_degree.entry(e.u).or_insert(0) += 1;
                *meta_degree.entry(e.v).or_insert(0) += 1;
            }
        }
        let meta_leaf =
            |v: VertexId| meta_degree.get(&v).copied().unwrap_or(0) == 1;
        self.edges()
            .filter(|(_, e)| e.claim != Claim::Isolator)
            .filter(|(_, e)| meta_leaf(e.u) || meta_leaf(e.v))
            .map(|(id, _)| id)
            .collect()
    }

    /// `(all, non_leaf)` counts of untouched vertices: vertices whose every
    /// incident edge is Isolator's. Isolated vertices are untouched. The
    /// second count skips vertices in `frozen_leaves`.
    pub fn untouched_counts(&self, frozen_leaves: &BTreeSet<VertexId>) -> (u32, u32) {
        let mut all = 0;
        let mut non_leaf = 0;
        for (&v, list) in &self.adj {
            let untouched = list
                .iter()
                .all(|eid| self.edges[eid].claim == Claim::Isolator);
            if untouched {
                all += 1;
                if !frozen_leaves.contains(&v) {
                    non_leaf += 1;
                }
            }
        }
        (all, non_leaf)
    }

    /// Vertices of degree exactly one.
    pub fn leaves(&self) -> BTreeSet<VertexId> {
        self.adj
            .iter()
            .filter(|(_, list)| list.len() == 1)
            .map(|(&v, _)| v)
            .collect()
    }

    /// Serialises to the plain text format (see [`PartiallyPlayedGraph::from_text`]).
    ///
    /// Vertex ids are re-densified in sorted order, so graphs fresh from
    /// `build` round-trip exactly.
    pub fn to_text(&self) -> String {
        let index: BTreeMap<VertexId, usize> = self
            .vertices()
            .enumerate()
            .map(|(i, v)| (v, i))
            .collect();
        let mut out = format!("{} {}\n", self.vertex_count(), self.edge_count());
        for (_, e) in self.edges() {
            out.push_str(&format!(
                "{} {} {}\n",
                index[&e.u],
                index[&e.v],
                e.claim.letter()
            ));
        }
        out
    }

    /// Parses the plain text format:
    ///
    /// ```text
    /// # comment lines start with '#'
    /// n m
    /// u v [U|T|I]      (m such lines, 0-based vertex ids, default U)
    /// ```
    ///
    /// Edge ids are assigned by line order.
    pub fn from_text(input: &str) -> Result<Self, GraphError> {
        let mut header: Option<(u32, u32)> = None;
        let mut spec: Vec<(u32, u32, Claim)> = Vec::new();
        for (lineno, raw) in input.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse = |tok: &str| -> Result<u32, GraphError> {
                tok.parse().map_err(|_| GraphError::Parse {
                    line: lineno + 1,
                    msg: format!("expected integer, got {tok:?}"),
                })
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match header {
                None => {
                    if fields.len() != 2 {
                        return Err(GraphError::Parse {
                            line: lineno + 1,
                            msg: "expected header \"n m\"".into(),
                        });
                    }
                    header = Some((parse(fields[0])?, parse(fields[1])?));
                }
                Some((_, m)) => {
                    if spec.len() as u32 == m {
                        return Err(GraphError::Parse {
                            line: lineno + 1,
                            msg: format!("more than {m} edge lines"),
                        });
                    }
                    if fields.len() < 2 || fields.len() > 3 {
                        return Err(GraphError::Parse {
                            line: lineno + 1,
                            msg: "expected \"u v [U|T|I]\"".into(),
                        });
                    }
                    let claim = match fields.get(2) {
                        None => Claim::Unclaimed,
                        Some(tok) => {
                            let c = tok.chars().next().unwrap();
                            if tok.len() != 1 {
                                return Err(GraphError::Parse {
                                    line: lineno + 1,
                                    msg: format!("bad claim {tok:?}"),
                                });
                            }
                            Claim::from_letter(c).ok_or(GraphError::Parse {
                                line: lineno + 1,
                                msg: format!("bad claim {tok:?}"),
                            })?
                        }
                    };
                    spec.push((parse(fields[0])?, parse(fields[1])?, claim));
                }
            }
        }
        let (n, m) = header.ok_or(GraphError::Parse {
            line: 0,
            msg: "empty input".into(),
        })?;
        if spec.len() as u32 != m {
            return Err(GraphError::Parse {
                line: input.lines().count(),
                msg: format!("expected {m} edges, found {}", spec.len()),
            });
        }
        Self::build(n, &spec)
    }
}
