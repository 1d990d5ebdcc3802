//! Value-preserving operators that shrink a partially played forest.
//!
//! Three operations are provided, together with exact accounting of how each
//! changes the counts `(m, k, l)` and the potential `m + 4k - 3l`:
//!
//! * [`remove_toucher_edge`] — cut a Toucher edge: delete its endpoints and
//!   re-attach every other incident edge to a fresh leaf;
//! * [`remove_isolator_subgraph`] — delete a set of Isolator edges together
//!   with the vertices that have no neighbour outside the set;
//! * [`remove_length1_components`] — sweep away single-edge components.
//!
//! Each operation returns the surviving-edge map explicitly. Edge ids are
//! never renumbered, so the map is the identity on survivors, but callers
//! that track positions across several reductions use it as the source of
//! truth for which edges are still alive.
//!
//! The `*_prediction` functions compute the expected accounting row from
//! local structure alone (endpoint classes, path shape, singleton count)
//! without touching the graph; the verification harness checks them against
//! the recomputed deltas on every small forest.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{
    Claim, EdgeId, GraphError, GraphStats, LocusKind, PartiallyPlayedGraph, PathLocus,
    VertexClass, VertexId,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SurgeryError {
    #[error("edge {0} is not a Toucher edge")]
    NotToucherEdge(EdgeId),
    #[error("edge {0} is not an Isolator edge")]
    NotIsolatorEdge(EdgeId),
    #[error("edge endpoint {0} is isolated; no accounting row covers it")]
    IsolatedEndpoint(VertexId),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Change in the aggregate counts caused by one operation.
///
/// The potential delta is always `dm + 4*dk - 3*dl`; the constructor enforces
/// it so a delta can never be internally inconsistent.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SurgeryDelta {
    pub dm: i64,
    pub dk: i64,
    pub dl: i64,
    pub dpotential: i64,
}

impl SurgeryDelta {
    pub fn new(dm: i64, dk: i64, dl: i64) -> Self {
        SurgeryDelta {
            dm,
            dk,
            dl,
            dpotential: dm + 4 * dk - 3 * dl,
        }
    }

    pub fn between(before: &GraphStats, after: &GraphStats) -> Self {
        SurgeryDelta::new(
            i64::from(after.m) - i64::from(before.m),
            i64::from(after.k) - i64::from(before.k),
            i64::from(after.l) - i64::from(before.l),
        )
    }
}

/// Map from surviving edge ids before an operation to their ids afterwards.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeMap(pub BTreeMap<EdgeId, EdgeId>);

impl EdgeMap {
    fn identity_on(graph: &PartiallyPlayedGraph) -> Self {
        EdgeMap(graph.edge_ids().map(|id| (id, id)).collect())
    }

    pub fn get(&self, old: EdgeId) -> Option<EdgeId> {
        self.0.get(&old).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Result of cutting one Toucher edge.
#[derive(Clone, Debug)]
pub struct ToucherCut {
    pub graph: PartiallyPlayedGraph,
    pub survivors: EdgeMap,
    pub delta: SurgeryDelta,
}

/// Result of deleting an Isolator edge set.
#[derive(Clone, Debug)]
pub struct IsolatorRemoval {
    pub graph: PartiallyPlayedGraph,
    pub survivors: EdgeMap,
    pub delta: SurgeryDelta,
    /// Vertices deleted because every incident edge lay inside the edge set.
    /// When the set is all of Isolator's edges these are exactly the
    /// vertices Isolator has already made untouched.
    pub internal: u32,
    /// Same, minus vertices that were leaves of the input graph. For a path
    /// this equals the number of interior vertices.
    pub non_leaf_internal: u32,
    /// Non-Isolator edges that died with a deleted vertex. The deletion rule
    /// makes this impossible, so the list is always empty; it is kept as a
    /// tripwire that callers assert on.
    pub collateral: Vec<EdgeId>,
}

/// Result of sweeping single-edge components.
#[derive(Clone, Debug)]
pub struct SingletonSweep {
    pub graph: PartiallyPlayedGraph,
    pub survivors: EdgeMap,
    pub delta: SurgeryDelta,
    /// How many single-edge components were removed.
    pub q: u32,
}

/// A predicted accounting row: the expected delta plus the profit guarantee
/// for the move kind it describes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ProfitRow {
    pub delta: SurgeryDelta,
    pub profit: i64,
}

/// Running profit account for one stop-and-reduce cycle of the chain
/// strategy: one entry per Toucher cut, one per removed Isolator path, plus
/// the singleton sweep.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProfitLedger {
    pub toucher_cuts: Vec<i64>,
    /// `(profit, interior_vertex_count)` of the removed Isolator path.
    pub path_removal: Option<(i64, u32)>,
    pub singleton_sweep: i64,
}

impl ProfitLedger {
    pub fn total(&self) -> i64 {
        self.toucher_cuts.iter().sum::<i64>()
            + self.path_removal.map_or(0, |(p, _)| p)
            + self.singleton_sweep
    }
}

/// Deletes the Toucher edge `e = uv` along with `u` and `v`, attaching every
/// other edge of `u` (resp. `v`) to its own fresh leaf vertex. Claims of
/// surviving edges are untouched.
pub fn remove_toucher_edge(
    g: &PartiallyPlayedGraph,
    e: EdgeId,
) -> Result<ToucherCut, SurgeryError> {
    let edge = g.require_edge(e)?;
    if edge.claim != Claim::Toucher {
        return Err(SurgeryError::NotToucherEdge(e));
    }
    let before = g.stats();
    let (u, v) = (edge.u, edge.v);
    let mut out = g.clone();
    out.remove_edge(e)?;
    for w in [u, v] {
        let incident: Vec<EdgeId> = out.incident(w).to_vec();
        for eid in incident {
            let fresh = out.fresh_vertex();
            out.retarget(eid, w, fresh);
        }
        out.remove_isolated_vertex(w)?;
    }
    let survivors = EdgeMap::identity_on(&out);
    let delta = SurgeryDelta::between(&before, &out.stats());
    Ok(ToucherCut {
        graph: out,
        survivors,
        delta,
    })
}

/// Deletes the Isolator edges `h` and every vertex all of whose incident
/// edges belong to `h`.
pub fn remove_isolator_subgraph(
    g: &PartiallyPlayedGraph,
    h: &BTreeSet<EdgeId>,
) -> Result<IsolatorRemoval, SurgeryError> {
    let mut h_vertices: BTreeSet<VertexId> = BTreeSet::new();
    for &id in h {
        let edge = g.require_edge(id)?;
        if edge.claim != Claim::Isolator {
            return Err(SurgeryError::NotIsolatorEdge(id));
        }
        h_vertices.insert(edge.u);
        h_vertices.insert(edge.v);
    }
    let before = g.stats();
    let leaves = g.leaves();
    let internal: BTreeSet<VertexId> = h_vertices
        .iter()
        .copied()
        .filter(|&w| g.incident(w).iter().all(|eid| h.contains(eid)))
        .collect();
    let non_leaf_internal = internal.iter().filter(|v| !leaves.contains(v)).count() as u32;

    let mut out = g.clone();
    for &id in h {
        out.remove_edge(id)?;
    }
    let mut collateral = Vec::new();
    for &w in &internal {
        for eid in out.incident(w).to_vec() {
            out.remove_edge(eid)?;
            collateral.push(eid);
        }
    }
    collateral.sort_unstable();
    collateral.dedup();
    for &w in &internal {
        out.remove_isolated_vertex(w)?;
    }
    let survivors = EdgeMap::identity_on(&out);
    let delta = SurgeryDelta::between(&before, &out.stats());
    Ok(IsolatorRemoval {
        graph: out,
        survivors,
        delta,
        internal: internal.len() as u32,
        non_leaf_internal,
        collateral,
    })
}

/// Removes every component that consists of a single edge, whatever its
/// claim.
pub fn remove_length1_components(g: &PartiallyPlayedGraph) -> SingletonSweep {
    let before = g.stats();
    let mut out = g.clone();
    let mut q = 0;
    for comp in g.components() {
        if comp.len() != 2 {
            continue;
        }
        let edges: Vec<EdgeId> = comp
            .iter()
            .flat_map(|&v| g.incident(v).iter().copied())
            .collect();
        // Two degree-1 endpoints listing the same edge twice.
        if edges.len() == 2 && edges[0] == edges[1] {
            out.remove_edge(edges[0]).expect("edge exists");
            for &v in &comp {
                out.remove_isolated_vertex(v).expect("endpoint isolated");
            }
            q += 1;
        }
    }
    let survivors = EdgeMap::identity_on(&out);
    let delta = SurgeryDelta::between(&before, &out.stats());
    SingletonSweep {
        graph: out,
        survivors,
        delta,
        q,
    }
}

/// Predicted accounting row for cutting edge `e`, from its endpoint classes
/// alone. The profit is `dpotential + 3` and is non-negative in every case.
pub fn toucher_cut_prediction(
    g: &PartiallyPlayedGraph,
    e: EdgeId,
) -> Result<ProfitRow, SurgeryError> {
    let edge = g.require_edge(e)?;
    let du = g.degree(edge.u).unwrap() as i64;
    let dv = g.degree(edge.v).unwrap() as i64;
    let mut pairs = [
        (VertexClass::from_degree(du as usize), du, edge.u),
        (VertexClass::from_degree(dv as usize), dv, edge.v),
    ];
    // Normalise to (smaller class, larger class) with Leaf < Small < Big.
    let rank = |c: VertexClass| match c {
        VertexClass::Isolated => 0,
        VertexClass::Leaf => 1,
        VertexClass::Small => 2,
        VertexClass::Big => 3,
    };
    pairs.sort_by_key(|&(c, _, _)| rank(c));
    let [(ca, da, va), (cb, db, _)] = pairs;
    use VertexClass::{Big, Isolated, Leaf, Small};
    let (dk, dl) = match (ca, cb) {
        (Isolated, _) | (_, Isolated) => return Err(SurgeryError::IsolatedEndpoint(va)),
        (Leaf, Leaf) => (-1, -2),
        (Leaf, Small) => (0, 0),
        (Leaf, Big) => (db - 2, db - 2),
        (Small, Small) => (1, 2),
        (Small, Big) => (db - 1, db),
        (Big, Big) => (da + db - 3, da + db - 2),
        _ => unreachable!("pairs are sorted by class"),
    };
    let delta = SurgeryDelta::new(-1, dk, dl);
    Ok(ProfitRow {
        delta,
        profit: delta.dpotential + 3,
    })
}

/// Predicted accounting row for deleting a whole locus as an Isolator path.
///
/// With `r + 1` edges the row depends only on the locus kind; the profit is
/// `dpotential + r - 1`, which comes out 0, 1, 2 for a path component, twig
/// and branch respectively.
pub fn isolator_path_prediction(locus: &PathLocus) -> ProfitRow {
    let len = locus.len() as i64;
    let r = len - 1;
    let (dk, dl) = match locus.kind {
        LocusKind::PathComponent => (-1, -2),
        LocusKind::Twig => (0, -1),
        LocusKind::Branch => (1, 0),
    };
    let delta = SurgeryDelta::new(-len, dk, dl);
    ProfitRow {
        delta,
        profit: delta.dpotential + r - 1,
    }
}

/// Predicted accounting row for sweeping `q` single-edge components. The
/// profit equals `q`.
pub fn singleton_sweep_prediction(q: u32) -> ProfitRow {
    let q = i64::from(q);
    let delta = SurgeryDelta::new(-q, -q, -2 * q);
    ProfitRow { delta, profit: q }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn claimed_path(n: u32, claims: &[(u32, Claim)]) -> PartiallyPlayedGraph {
        let pairs: Vec<(u32, u32)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        let mut g = PartiallyPlayedGraph::unclaimed(n, &pairs).unwrap();
        for &(e, c) in claims {
            g.set_claim(EdgeId(e), c).unwrap();
        }
        g
    }

    #[test]
    fn cut_middle_of_p4_gives_two_singletons() {
        let g = claimed_path(4, &[(1, Claim::Toucher)]);
        let cut = remove_toucher_edge(&g, EdgeId(1)).unwrap();
        assert_eq!(cut.delta, SurgeryDelta::new(-1, 1, 2));
        assert_eq!(cut.delta.dpotential, -3);
        assert_eq!(cut.graph.edge_count(), 2);
        assert_eq!(cut.graph.component_count(), 2);
        assert_eq!(cut.graph.stats().q, 2);
        // Surviving edges keep their ids and claims.
        assert_eq!(cut.survivors.get(EdgeId(0)), Some(EdgeId(0)));
        assert_eq!(cut.survivors.get(EdgeId(2)), Some(EdgeId(2)));
        assert_eq!(cut.survivors.get(EdgeId(1)), None);
        // Fresh vertices sit past the original range.
        assert!(cut.graph.vertices().any(|v| v.0 >= 4));
        assert!(!cut.graph.has_vertex(crate::graph::VertexId(1)));
    }

    #[test]
    fn cut_star_edge_splits_into_singletons() {
        // Star on 4 vertices, centre 0; cut the Toucher edge 0-1.
        let mut g =
            PartiallyPlayedGraph::unclaimed(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        g.set_claim(EdgeId(0), Claim::Toucher).unwrap();
        let cut = remove_toucher_edge(&g, EdgeId(0)).unwrap();
        assert_eq!(cut.delta, SurgeryDelta::new(-1, 1, 1));
        assert_eq!(cut.delta.dpotential, 0);
        assert_eq!(cut.graph.component_count(), 2);
        let row = toucher_cut_prediction(&g, EdgeId(0)).unwrap();
        assert_eq!(row.delta, cut.delta);
        assert_eq!(row.profit, 3);
    }

    #[test]
    fn cut_single_edge_component_empties_it() {
        let g = claimed_path(2, &[(0, Claim::Toucher)]);
        let cut = remove_toucher_edge(&g, EdgeId(0)).unwrap();
        assert_eq!(cut.delta, SurgeryDelta::new(-1, -1, -2));
        assert_eq!(cut.delta.dpotential, 1);
        assert_eq!(cut.graph.vertex_count(), 0);
        let row = toucher_cut_prediction(&g, EdgeId(0)).unwrap();
        assert_eq!(row.profit, 4);
    }

    #[test]
    fn cut_requires_toucher_claim() {
        let g = claimed_path(3, &[(0, Claim::Isolator)]);
        assert_eq!(
            remove_toucher_edge(&g, EdgeId(0)).unwrap_err(),
            SurgeryError::NotToucherEdge(EdgeId(0))
        );
        assert!(matches!(
            remove_toucher_edge(&g, EdgeId(9)),
            Err(SurgeryError::Graph(GraphError::UnknownEdge(_)))
        ));
    }

    #[test]
    fn cut_prediction_matches_recount_on_small_paths() {
        for n in 2..=7u32 {
            for e in 0..n - 1 {
                let g = claimed_path(n, &[(e, Claim::Toucher)]);
                let row = toucher_cut_prediction(&g, EdgeId(e)).unwrap();
                let cut = remove_toucher_edge(&g, EdgeId(e)).unwrap();
                assert_eq!(row.delta, cut.delta, "path n={n} edge {e}");
                assert!(row.profit >= 0);
            }
        }
    }

    #[test]
    fn remove_fully_isolator_path_component() {
        let g = claimed_path(
            4,
            &[(0, Claim::Isolator), (1, Claim::Isolator), (2, Claim::Isolator)],
        );
        let h: BTreeSet<EdgeId> = g.edge_ids().collect();
        let removal = remove_isolator_subgraph(&g, &h).unwrap();
        assert_eq!(removal.graph.vertex_count(), 0);
        assert_eq!(removal.delta, SurgeryDelta::new(-3, -1, -2));
        assert_eq!(removal.delta.dpotential, -1);
        assert_eq!(removal.internal, 4);
        assert_eq!(removal.non_leaf_internal, 2);
        assert!(removal.collateral.is_empty());
    }

    #[test]
    fn remove_isolator_twig_from_star() {
        // Centre 0 with leaves 1, 2 plus twig 0-3-4; Isolator holds the twig.
        let mut g = PartiallyPlayedGraph::unclaimed(
            5,
            &[(0, 1), (0, 2), (0, 3), (3, 4)],
        )
        .unwrap();
        g.set_claim(EdgeId(2), Claim::Isolator).unwrap();
        g.set_claim(EdgeId(3), Claim::Isolator).unwrap();
        let h = BTreeSet::from([EdgeId(2), EdgeId(3)]);
        let removal = remove_isolator_subgraph(&g, &h).unwrap();
        assert_eq!(removal.delta, SurgeryDelta::new(-2, 0, -1));
        assert_eq!(removal.delta.dpotential, 1);
        assert_eq!(removal.internal, 2); // 3 and 4
        assert_eq!(removal.non_leaf_internal, 1); // just 3
        assert_eq!(removal.graph.edge_count(), 2);
        // Prediction from the locus agrees.
        let loci = g.find_loci().unwrap();
        let twig = loci
            .iter()
            .find(|p| p.kind == LocusKind::Twig && p.len() == 2)
            .unwrap();
        let row = isolator_path_prediction(twig);
        assert_eq!(row.delta, removal.delta);
        assert_eq!(row.profit, 1);
    }

    #[test]
    fn remove_isolator_branch_between_brooms() {
        // 0 and 4 are degree-3; branch 0-3-4 claimed by Isolator.
        let mut g = PartiallyPlayedGraph::unclaimed(
            7,
            &[(0, 1), (0, 2), (4, 5), (4, 6), (0, 3), (3, 4)],
        )
        .unwrap();
        g.set_claim(EdgeId(4), Claim::Isolator).unwrap();
        g.set_claim(EdgeId(5), Claim::Isolator).unwrap();
        let h = BTreeSet::from([EdgeId(4), EdgeId(5)]);
        let removal = remove_isolator_subgraph(&g, &h).unwrap();
        assert_eq!(removal.delta, SurgeryDelta::new(-2, 1, 0));
        assert_eq!(removal.delta.dpotential, 2);
        assert_eq!(removal.internal, 1); // vertex 3
        assert_eq!(removal.non_leaf_internal, 1);
        assert_eq!(removal.graph.component_count(), 2);
        let loci = g.find_loci().unwrap();
        let branch = loci.iter().find(|p| p.kind == LocusKind::Branch).unwrap();
        let row = isolator_path_prediction(branch);
        assert_eq!(row.delta, removal.delta);
        assert_eq!(row.profit, 2);
    }

    #[test]
    fn isolator_removal_requires_isolator_claims() {
        let g = claimed_path(3, &[(0, Claim::Toucher)]);
        let h = BTreeSet::from([EdgeId(0)]);
        assert_eq!(
            remove_isolator_subgraph(&g, &h).unwrap_err(),
            SurgeryError::NotIsolatorEdge(EdgeId(0))
        );
    }

    #[test]
    fn empty_isolator_set_is_identity() {
        let g = claimed_path(4, &[]);
        let removal = remove_isolator_subgraph(&g, &BTreeSet::new()).unwrap();
        assert_eq!(removal.graph, g);
        assert_eq!(removal.delta, SurgeryDelta::new(0, 0, 0));
        assert_eq!(removal.internal, 0);
    }

    #[test]
    fn singleton_sweep_removes_only_single_edge_components() {
        // P2 + P2 + P3, one of the singletons claimed.
        let mut g = PartiallyPlayedGraph::unclaimed(
            7,
            &[(0, 1), (2, 3), (4, 5), (5, 6)],
        )
        .unwrap();
        g.set_claim(EdgeId(0), Claim::Isolator).unwrap();
        let sweep = remove_length1_components(&g);
        assert_eq!(sweep.q, 2);
        assert_eq!(sweep.delta, SurgeryDelta::new(-2, -2, -4));
        assert_eq!(sweep.delta.dpotential, 2);
        assert_eq!(sweep.graph.edge_count(), 2);
        let row = singleton_sweep_prediction(sweep.q);
        assert_eq!(row.delta, sweep.delta);
        assert_eq!(row.profit, 2);
    }

    #[test]
    fn claims_survive_surgery() {
        let g = claimed_path(
            5,
            &[(0, Claim::Isolator), (2, Claim::Toucher), (3, Claim::Isolator)],
        );
        let cut = remove_toucher_edge(&g, EdgeId(2)).unwrap();
        for (old, new) in &cut.survivors.0 {
            assert_eq!(
                g.claim(*old).unwrap(),
                cut.graph.claim(*new).unwrap(),
                "claim preserved for {old}"
            );
        }
        assert_eq!(cut.survivors.len(), 3);
    }
}
