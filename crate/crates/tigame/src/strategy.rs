//! Move-selection policies.
//!
//! Two Isolator policies with proven score floors are implemented alongside
//! reference movers used for evaluation:
//!
//! * [`ChainIsolator`] (CLI name `lemma`) plays the Isolator-first,
//!   leaf-discounted variant on forests. It grows one Isolator path at a
//!   time and, when blocked, shrinks a private copy of the board with the
//!   surgery operators, banking the captured interior vertices.
//! * [`MetaLeafIsolator`] (CLI name `theorem`) plays the Toucher-first
//!   variant on trees. It first claims edges pendant in the board minus its
//!   own claims, capturing one vertex per move, then hands the leftover
//!   unclaimed forest to the chain policy.
//! * [`OptimalMover`], [`GreedyToucher`] and [`RandomMover`] provide exact,
//!   heuristic and baseline opposition.
//!
//! [`best_response_score`] computes the score a policy guarantees against a
//! clairvoyant adversary by branching over every adversary reply.

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::game::{GameError, GameState, GameVariant, Player};
use crate::graph::{Claim, EdgeId, LocusKind, PartiallyPlayedGraph, PathLocus};
use crate::solver::{Solver, SolverError};
use crate::surgery::{
    remove_isolator_subgraph, remove_length1_components, remove_toucher_edge, ProfitLedger,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StrategyError {
    #[error("no legal moves available")]
    NoMoves,
    #[error("{name} plays the {expected} side")]
    WrongSide { name: String, expected: Player },
    #[error("{name} cannot play this position: {reason}")]
    UnsupportedPosition { name: String, reason: String },
    #[error("unknown strategy {0:?}")]
    UnknownName(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// A stateful move chooser for one side of one game. Implementations may
/// carry memory between calls; drivers clone them when they need to explore
/// alternative continuations.
pub trait Strategy {
    fn name(&self) -> &str;
    fn choose_move(&mut self, state: &GameState) -> Result<EdgeId, StrategyError>;
    fn box_clone(&self) -> Box<dyn Strategy>;
}

impl Clone for Box<dyn Strategy> {
    fn clone(&self) -> Self {
        self.box_clone()
    }
}

/// Builds a strategy from its CLI name: `optimal`, `greedy`, `theorem`,
/// `lemma`, or `random:<seed>`.
pub fn by_name(name: &str) -> Result<Box<dyn Strategy>, StrategyError> {
    if let Some(seed) = name.strip_prefix("random:") {
        let seed: u64 = seed
            .parse()
            .map_err(|_| StrategyError::UnknownName(name.to_string()))?;
        return Ok(Box::new(RandomMover::new(seed)));
    }
    match name {
        "optimal" => Ok(Box::new(OptimalMover::default())),
        "greedy" => Ok(Box::new(GreedyToucher)),
        "theorem" => Ok(Box::new(MetaLeafIsolator::new())),
        "lemma" => Ok(Box::new(ChainIsolator::new())),
        _ => Err(StrategyError::UnknownName(name.to_string())),
    }
}

/// Plays `start` to the end, consulting `toucher` and `isolator` on their
/// respective turns.
pub fn play_game(
    start: &GameState,
    toucher: &mut dyn Strategy,
    isolator: &mut dyn Strategy,
) -> Result<GameState, StrategyError> {
    let mut state = start.clone();
    while !state.is_terminal() {
        let mv = match state.to_move() {
            Player::Toucher => toucher.choose_move(&state)?,
            Player::Isolator => isolator.choose_move(&state)?,
        };
        state = state.apply_move(mv)?;
    }
    Ok(state)
}

/// Final score when `strategy` plays `side` and the opponent plays every
/// possible reply, settling on the one worst for `side`. This is the score
/// the strategy actually guarantees from `start`.
pub fn best_response_score(
    start: &GameState,
    strategy: &dyn Strategy,
    side: Player,
) -> Result<u32, StrategyError> {
    fn go(
        state: &GameState,
        strat: &mut Box<dyn Strategy>,
        side: Player,
    ) -> Result<u32, StrategyError> {
        if state.is_terminal() {
            return Ok(state.final_score()?);
        }
        if state.to_move() == side {
            let mv = strat.choose_move(state)?;
            return go(&state.apply_move(mv)?, strat, side);
        }
        let mut worst: Option<u32> = None;
        for mv in state.legal_moves() {
            let mut branch = strat.clone();
            let v = go(&state.apply_move(mv)?, &mut branch, side)?;
            worst = Some(match (worst, side) {
                (None, _) => v,
                // The adversary of Isolator pushes the score down; the
                // adversary of Toucher pushes it up.
                (Some(w), Player::Isolator) => w.min(v),
                (Some(w), Player::Toucher) => w.max(v),
            });
        }
        Ok(worst.expect("non-terminal position has moves"))
    }
    go(start, &mut strategy.box_clone(), side)
}

/// True when no chain-selection rule applies to the (unclaimed) forest:
/// every path component has at most two edges, every branch at most two and
/// every twig at most one. From such boards the chain policy just sweeps.
pub fn is_base_forest(g: &PartiallyPlayedGraph) -> Result<bool, StrategyError> {
    let loci = g.find_loci().map_err(GameError::from)?;
    Ok(select_case(&loci).is_none())
}

/// A locus predicate paired with the index of the edge to claim first.
type OpeningRule<'a> = (&'a dyn Fn(&PathLocus) -> bool, usize);

/// The chain policy's opening rules, in priority order. Returns the chosen
/// locus together with the index of the edge to claim first.
fn select_case(loci: &[PathLocus]) -> Option<(&PathLocus, usize)> {
    let rules: [OpeningRule; 5] = [
        (&|p| p.kind == LocusKind::PathComponent && p.len() == 3, 1),
        (&|p| p.kind == LocusKind::PathComponent && p.len() >= 4, 2),
        (&|p| p.kind == LocusKind::Branch && p.len() >= 3, 1),
        (&|p| p.kind == LocusKind::Twig && p.len() == 2, 0),
        (&|p| p.kind == LocusKind::Twig && p.len() >= 3, 1),
    ];
    for (rule, claim_index) in rules {
        if let Some(locus) = loci.iter().find(|p| rule(p)) {
            return Some((locus, claim_index));
        }
    }
    None
}

#[derive(Clone, Debug)]
enum ChainMode {
    Select,
    Extend {
        edges: Vec<EdgeId>,
        lo: usize,
        hi: usize,
    },
    Sweep,
}

/// The path-growing engine shared by both Isolator policies.
///
/// It keeps a private copy of the board (`virt`) that starts as the real
/// forest and shrinks over time. All claims — its own and the opponent's —
/// enter `virt` by mirroring the game history, so the copy always reflects
/// the real position restricted to the edges it still contains.
#[derive(Clone, Debug)]
struct ChainCore {
    virt: PartiallyPlayedGraph,
    cursor: usize,
    mode: ChainMode,
    cycles: Vec<ProfitLedger>,
}

impl ChainCore {
    fn new(virt: PartiallyPlayedGraph, cursor: usize) -> ChainCore {
        ChainCore {
            virt,
            cursor,
            mode: ChainMode::Select,
            cycles: Vec::new(),
        }
    }

    /// Copies claims made since the last call onto the private board.
    /// Claims on edges the private board no longer contains are skipped.
    fn mirror(&mut self, state: &GameState) {
        for &(player, edge) in &state.history()[self.cursor..] {
            if self.virt.edge(edge).is_some() {
                self.virt
                    .set_claim(edge, player.claim())
                    .expect("mirrored claim lands on an unclaimed edge");
            }
        }
        self.cursor = state.history().len();
        // Tripwire: every edge still on the private board must carry
        // exactly the claim the real board records for it.
        debug_assert!(
            self.virt
                .edges()
                .all(|(id, e)| state.graph().claim(id) == Some(e.claim)),
            "private board disagrees with the game history"
        );
    }

    /// Cuts every opposing edge, removes the path claimed so far, sweeps
    /// single-edge components, and banks the profit ledger of the cycle.
    fn reduce(&mut self) {
        let mut ledger = ProfitLedger::default();
        loop {
            let next = self
                .virt
                .edges()
                .find(|(_, e)| e.claim == Claim::Toucher)
                .map(|(id, _)| id);
            let Some(id) = next else { break };
            let cut = remove_toucher_edge(&self.virt, id).expect("edge is Toucher's");
            ledger.toucher_cuts.push(cut.delta.dpotential + 3);
            self.virt = cut.graph;
        }
        let path: BTreeSet<EdgeId> = self
            .virt
            .edges()
            .filter(|(_, e)| e.claim == Claim::Isolator)
            .map(|(id, _)| id)
            .collect();
        if !path.is_empty() {
            let removal =
                remove_isolator_subgraph(&self.virt, &path).expect("edges are Isolator's");
            assert!(
                removal.collateral.is_empty(),
                "removing the claimed path must not take other edges with it"
            );
            let r = removal.non_leaf_internal;
            ledger.path_removal = Some((removal.delta.dpotential + i64::from(r) - 1, r));
            self.virt = removal.graph;
        }
        let sweep = remove_length1_components(&self.virt);
        ledger.singleton_sweep = i64::from(sweep.q);
        self.virt = sweep.graph;
        let captured = i64::from(ledger.path_removal.map_or(0, |(_, r)| r));
        assert!(
            captured + ledger.total() >= 2,
            "a reduction cycle banks at least two: {ledger:?}"
        );
        self.cycles.push(ledger);
    }

    fn unclaimed_in_virt(&self, e: EdgeId) -> bool {
        self.virt.claim(e) == Some(Claim::Unclaimed)
    }

    fn choose(&mut self, state: &GameState) -> Result<EdgeId, StrategyError> {
        self.mirror(state);
        if let ChainMode::Extend { edges, lo, hi } = &self.mode {
            let (edges, mut lo, mut hi) = (edges.clone(), *lo, *hi);
            let low_side = (lo > 0 && self.unclaimed_in_virt(edges[lo - 1])).then(|| {
                lo -= 1;
                edges[lo]
            });
            let high_side = low_side.is_none()
                && hi + 1 < edges.len()
                && self.unclaimed_in_virt(edges[hi + 1]);
            let pick = low_side.or_else(|| {
                high_side.then(|| {
                    hi += 1;
                    edges[hi]
                })
            });
            match pick {
                Some(e) => {
                    self.mode = ChainMode::Extend { edges, lo, hi };
                    return Ok(e);
                }
                None => {
                    // Both ends blocked or exhausted: shrink and start over.
                    self.reduce();
                    self.mode = ChainMode::Select;
                }
            }
        }
        if matches!(self.mode, ChainMode::Select) {
            let loci = self
                .virt
                .find_loci()
                .expect("the private board stays a forest");
            match select_case(&loci) {
                Some((locus, idx)) => {
                    let edges = locus.edges.clone();
                    let e = edges[idx];
                    debug_assert!(self.unclaimed_in_virt(e));
                    self.mode = ChainMode::Extend {
                        edges,
                        lo: idx,
                        hi: idx,
                    };
                    return Ok(e);
                }
                None => self.mode = ChainMode::Sweep,
            }
        }
        // Sweep: lowest unclaimed edge still on the private board, falling
        // back to the real board once the private one is exhausted.
        if let Some(e) = self
            .virt
            .unclaimed_edges()
            .first()
            .copied()
            .or_else(|| state.legal_moves().first().copied())
        {
            Ok(e)
        } else {
            Err(StrategyError::NoMoves)
        }
    }
}

/// Isolator policy for the Isolator-first, leaf-discounted game on forests.
///
/// Guarantees a final score of at least `floor((m + 4k - 3l + 4) / 5)` where
/// `m`, `k`, `l` are the edge, component and leaf counts of the starting
/// forest.
#[derive(Clone, Debug)]
pub struct ChainIsolator {
    core: Option<ChainCore>,
}

impl ChainIsolator {
    pub fn new() -> ChainIsolator {
        ChainIsolator { core: None }
    }

    /// Profit ledgers of the reduction cycles run so far.
    pub fn cycles(&self) -> &[ProfitLedger] {
        self.core.as_ref().map_or(&[], |c| &c.cycles)
    }

    fn validate(&self, state: &GameState) -> Result<(), StrategyError> {
        let reject = |reason: &str| {
            Err(StrategyError::UnsupportedPosition {
                name: "lemma".to_string(),
                reason: reason.to_string(),
            })
        };
        if state.variant() != GameVariant::NonLeafIsolatorToucher {
            return reject("it plays the Isolator-first, leaf-discounted variant");
        }
        if !state.graph().is_forest() {
            return reject("the board must be a forest");
        }
        if state
            .graph()
            .edges()
            .any(|(_, e)| e.claim != Claim::Unclaimed)
        {
            return reject("it must play from the first move of the game");
        }
        Ok(())
    }
}

impl Default for ChainIsolator {
    fn default() -> Self {
        ChainIsolator::new()
    }
}

impl Strategy for ChainIsolator {
    fn name(&self) -> &str {
        "lemma"
    }

    fn choose_move(&mut self, state: &GameState) -> Result<EdgeId, StrategyError> {
        if state.to_move() != Player::Isolator {
            return Err(StrategyError::WrongSide {
                name: "lemma".to_string(),
                expected: Player::Isolator,
            });
        }
        if self.core.is_none() {
            self.validate(state)?;
            self.core = Some(ChainCore::new(state.graph().clone(), 0));
        }
        self.core.as_mut().unwrap().choose(state)
    }

    fn box_clone(&self) -> Box<dyn Strategy> {
        Box::new(self.clone())
    }
}

#[derive(Clone, Debug)]
enum MetaLeafPhase {
    Opening,
    Reduced(ChainCore),
}

/// Isolator policy for the Toucher-first game on trees.
///
/// While the board minus its own claims has a pendant edge it can take, it
/// takes the lowest one, making exactly one vertex untouched per move. When
/// no such edge is available it removes its claims and the opponent's edges
/// from a private copy, leaving exactly the unclaimed edges as a fresh
/// forest, and continues with the chain policy. Guarantees a final score of
/// at least `floor((n + 3) / 5)` on a tree with `n` vertices.
#[derive(Clone, Debug)]
pub struct MetaLeafIsolator {
    phase: MetaLeafPhase,
    validated: bool,
    opening_claims: u32,
    handoff_leaves: Option<u32>,
}

impl MetaLeafIsolator {
    pub fn new() -> MetaLeafIsolator {
        MetaLeafIsolator {
            phase: MetaLeafPhase::Opening,
            validated: false,
            opening_claims: 0,
            handoff_leaves: None,
        }
    }

    /// Number of pendant-edge claims made in the opening phase so far.
    pub fn opening_claims(&self) -> u32 {
        self.opening_claims
    }

    /// Leaf count of the reduced board at the moment the opening ended, if
    /// it has ended.
    pub fn handoff_leaves(&self) -> Option<u32> {
        self.handoff_leaves
    }

    fn validate(&self, state: &GameState) -> Result<(), StrategyError> {
        let reject = |reason: &str| {
            Err(StrategyError::UnsupportedPosition {
                name: "theorem".to_string(),
                reason: reason.to_string(),
            })
        };
        if state.variant() != GameVariant::ToucherIsolator {
            return reject("it plays the Toucher-first variant");
        }
        let stats = state.graph().stats();
        if !(state.graph().is_forest() && stats.k == 1) {
            return reject("the board must be a tree");
        }
        let toucher_claims = state
            .graph()
            .edges()
            .filter(|(_, e)| e.claim == Claim::Toucher)
            .count();
        let isolator_claims = state
            .graph()
            .edges()
            .filter(|(_, e)| e.claim == Claim::Isolator)
            .count();
        if isolator_claims != 0 || toucher_claims != 1 {
            return reject("it must play from its first move of the game");
        }
        Ok(())
    }

    fn opening_move(&mut self, state: &GameState) -> Option<EdgeId> {
        let g = state.graph();
        let candidate = g
            .meta_leaf_edges()
            .into_iter()
            .find(|&e| g.claim(e) == Some(Claim::Unclaimed))?;
        // Claiming a pendant edge of the board-minus-own-claims captures the
        // pendant endpoint; on a tree the other endpoint never falls at the
        // same time.
        let edge = g.edge(candidate).expect("candidate edge exists");
        let captures = [edge.u, edge.v]
            .into_iter()
            .filter(|&w| {
                g.incident(w)
                    .iter()
                    .all(|&f| f == candidate || g.claim(f) == Some(Claim::Isolator))
            })
            .count();
        assert_eq!(captures, 1, "one pendant claim captures exactly one vertex");
        self.opening_claims += 1;
        Some(candidate)
    }

    fn hand_off(&mut self, state: &GameState) -> ChainCore {
        let g = state.graph();
        let own: BTreeSet<EdgeId> = g
            .edges()
            .filter(|(_, e)| e.claim == Claim::Isolator)
            .map(|(id, _)| id)
            .collect();
        let removal = remove_isolator_subgraph(g, &own).expect("own claims are Isolator's");
        assert!(removal.collateral.is_empty());
        assert_eq!(
            removal.internal, self.opening_claims,
            "opening claims and captured vertices match one for one"
        );
        let mut reduced = removal.graph;
        let stats = reduced.stats();
        assert!(reduced.is_forest() && stats.k <= 1, "the remainder is one tree");
        assert!(
            reduced
                .vertices()
                .filter(|&v| reduced.incident(v).len() == 1)
                .all(|v| reduced.claim(reduced.incident(v)[0]) == Some(Claim::Toucher)),
            "hand-off happens only after every leaf of the remainder is touched"
        );
        self.handoff_leaves = Some(stats.l);
        loop {
            let next = reduced
                .edges()
                .find(|(_, e)| e.claim == Claim::Toucher)
                .map(|(id, _)| id);
            let Some(id) = next else { break };
            reduced = remove_toucher_edge(&reduced, id)
                .expect("edge is Toucher's")
                .graph;
        }
        let fresh: Vec<EdgeId> = reduced.edge_ids().collect();
        assert_eq!(
            fresh,
            state.graph().unclaimed_edges(),
            "the reduced board is exactly the unclaimed edges"
        );
        assert!(reduced.edges().all(|(_, e)| e.claim == Claim::Unclaimed));
        ChainCore::new(reduced, state.history().len())
    }
}

impl Default for MetaLeafIsolator {
    fn default() -> Self {
        MetaLeafIsolator::new()
    }
}

impl Strategy for MetaLeafIsolator {
    fn name(&self) -> &str {
        "theorem"
    }

    fn choose_move(&mut self, state: &GameState) -> Result<EdgeId, StrategyError> {
        if state.to_move() != Player::Isolator {
            return Err(StrategyError::WrongSide {
                name: "theorem".to_string(),
                expected: Player::Isolator,
            });
        }
        if !self.validated {
            self.validate(state)?;
            self.validated = true;
        }
        if let MetaLeafPhase::Opening = self.phase {
            if let Some(e) = self.opening_move(state) {
                return Ok(e);
            }
            self.phase = MetaLeafPhase::Reduced(self.hand_off(state));
        }
        match &mut self.phase {
            MetaLeafPhase::Reduced(core) => core.choose(state),
            MetaLeafPhase::Opening => unreachable!("opening either moved or handed off"),
        }
    }

    fn box_clone(&self) -> Box<dyn Strategy> {
        Box::new(self.clone())
    }
}

/// Plays perfectly for whichever side is to move, using the exact solver.
#[derive(Clone, Debug, Default)]
pub struct OptimalMover {
    solver: Solver,
}

impl OptimalMover {
    pub fn with_solver(solver: Solver) -> OptimalMover {
        OptimalMover { solver }
    }
}

impl Strategy for OptimalMover {
    fn name(&self) -> &str {
        "optimal"
    }

    fn choose_move(&mut self, state: &GameState) -> Result<EdgeId, StrategyError> {
        self.solver
            .optimal_move(state)?
            .ok_or(StrategyError::NoMoves)
    }

    fn box_clone(&self) -> Box<dyn Strategy> {
        Box::new(self.clone())
    }
}

/// Toucher heuristic: claim the edge that touches the most vertices not yet
/// touched, lowest edge id on ties.
#[derive(Clone, Debug, Default)]
pub struct GreedyToucher;

impl Strategy for GreedyToucher {
    fn name(&self) -> &str {
        "greedy"
    }

    fn choose_move(&mut self, state: &GameState) -> Result<EdgeId, StrategyError> {
        if state.to_move() != Player::Toucher {
            return Err(StrategyError::WrongSide {
                name: "greedy".to_string(),
                expected: Player::Toucher,
            });
        }
        let g = state.graph();
        let freshly_touched = |e: EdgeId| {
            let edge = g.edge(e).expect("legal move exists");
            [edge.u, edge.v]
                .into_iter()
                .filter(|&w| {
                    g.incident(w)
                        .iter()
                        .all(|&f| g.claim(f) != Some(Claim::Toucher))
                })
                .count()
        };
        let mut best: Option<(usize, EdgeId)> = None;
        for e in state.legal_moves() {
            let gain = freshly_touched(e);
            if best.is_none_or(|(bg, _)| gain > bg) {
                best = Some((gain, e));
            }
        }
        best.map(|(_, e)| e).ok_or(StrategyError::NoMoves)
    }

    fn box_clone(&self) -> Box<dyn Strategy> {
        Box::new(self.clone())
    }
}

/// Uniformly random legal moves from a seeded generator.
#[derive(Clone, Debug)]
pub struct RandomMover {
    name: String,
    rng: ChaCha8Rng,
}

impl RandomMover {
    pub fn new(seed: u64) -> RandomMover {
        RandomMover {
            name: format!("random:{seed}"),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Strategy for RandomMover {
    fn name(&self) -> &str {
        &self.name
    }

    fn choose_move(&mut self, state: &GameState) -> Result<EdgeId, StrategyError> {
        let moves = state.legal_moves();
        if moves.is_empty() {
            return Err(StrategyError::NoMoves);
        }
        Ok(moves[self.rng.gen_range(0..moves.len())])
    }

    fn box_clone(&self) -> Box<dyn Strategy> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{all_forests, all_trees, cycle, path, star};
    use crate::solver::minimax_reference;

    fn start(variant: GameVariant, g: &PartiallyPlayedGraph) -> GameState {
        GameState::new(variant, g.clone()).unwrap()
    }

    /// Plays back a fixed list of moves, for driving the opponent in traces.
    #[derive(Clone)]
    struct Scripted(Vec<EdgeId>, usize);

    impl Strategy for Scripted {
        fn name(&self) -> &str {
            "scripted"
        }
        fn choose_move(&mut self, _state: &GameState) -> Result<EdgeId, StrategyError> {
            let mv = self.0[self.1];
            self.1 += 1;
            Ok(mv)
        }
        fn box_clone(&self) -> Box<dyn Strategy> {
            Box::new(self.clone())
        }
    }

    fn isolator_moves(state: &GameState) -> Vec<EdgeId> {
        state
            .history()
            .iter()
            .filter(|(p, _)| *p == Player::Isolator)
            .map(|(_, e)| *e)
            .collect()
    }

    #[test]
    fn chain_opening_choices() {
        // Path components of length three take the middle edge.
        let s = start(GameVariant::NonLeafIsolatorToucher, &path(4));
        assert_eq!(ChainIsolator::new().choose_move(&s).unwrap(), EdgeId(1));
        // Longer path components take the third edge.
        let s = start(GameVariant::NonLeafIsolatorToucher, &path(6));
        assert_eq!(ChainIsolator::new().choose_move(&s).unwrap(), EdgeId(2));
        // A branch of length three takes its second edge.
        let brooms = PartiallyPlayedGraph::unclaimed(
            8,
            &[(0, 1), (0, 2), (4, 5), (4, 6), (0, 3), (3, 7), (7, 4)],
        )
        .unwrap();
        let s = start(GameVariant::NonLeafIsolatorToucher, &brooms);
        assert_eq!(ChainIsolator::new().choose_move(&s).unwrap(), EdgeId(5));
        // A twig of length two takes the edge at its attachment.
        let star_twig =
            PartiallyPlayedGraph::unclaimed(5, &[(0, 1), (0, 2), (0, 3), (3, 4)]).unwrap();
        let s = start(GameVariant::NonLeafIsolatorToucher, &star_twig);
        assert_eq!(ChainIsolator::new().choose_move(&s).unwrap(), EdgeId(2));
        // A twig of length three takes its second edge.
        let long_twig = PartiallyPlayedGraph::unclaimed(
            6,
            &[(0, 1), (0, 2), (0, 3), (3, 4), (4, 5)],
        )
        .unwrap();
        let s = start(GameVariant::NonLeafIsolatorToucher, &long_twig);
        assert_eq!(ChainIsolator::new().choose_move(&s).unwrap(), EdgeId(3));
    }

    #[test]
    fn chain_full_game_with_reduction_cycle() {
        // Opponent blocks both extension directions; the policy reduces,
        // finds the private board empty, and cleans up the real leftover.
        let s = start(GameVariant::NonLeafIsolatorToucher, &path(6));
        let mut isolator = ChainIsolator::new();
        let mut toucher = Scripted(vec![EdgeId(3), EdgeId(0)], 0);
        let final_state = play_game(&s, &mut toucher, &mut isolator).unwrap();
        assert_eq!(
            isolator_moves(&final_state),
            vec![EdgeId(2), EdgeId(1), EdgeId(4)]
        );
        assert_eq!(final_state.final_score().unwrap(), 1);
        assert_eq!(
            isolator.cycles(),
            &[ProfitLedger {
                toucher_cuts: vec![2, 0],
                path_removal: Some((0, 1)),
                singleton_sweep: 1,
            }]
        );
    }

    #[test]
    fn chain_meets_floor_on_small_forests() {
        for m in 1..=5u32 {
            for f in all_forests(m).unwrap() {
                let stats = f.stats();
                let floor = (stats.potential + 4).div_euclid(5).max(0) as u32;
                let s = start(GameVariant::NonLeafIsolatorToucher, &f);
                let got =
                    best_response_score(&s, &ChainIsolator::new(), Player::Isolator).unwrap();
                assert!(
                    got >= floor,
                    "forest m={m} {stats:?}: got {got}, floor {floor}"
                );
            }
        }
    }

    #[test]
    fn chain_rejects_bad_positions() {
        let wrong_variant = start(GameVariant::ToucherIsolator, &path(4));
        let wrong_variant = wrong_variant.apply_move(EdgeId(0)).unwrap();
        assert!(matches!(
            ChainIsolator::new().choose_move(&wrong_variant),
            Err(StrategyError::UnsupportedPosition { .. })
        ));
        let not_forest = start(GameVariant::NonLeafIsolatorToucher, &cycle(4).unwrap());
        assert!(matches!(
            ChainIsolator::new().choose_move(&not_forest),
            Err(StrategyError::UnsupportedPosition { .. })
        ));
        let midgame = GameState::from_position(
            GameVariant::NonLeafIsolatorToucher,
            PartiallyPlayedGraph::build(3, &[(0, 1, Claim::Isolator), (1, 2, Claim::Unclaimed)])
                .unwrap(),
            Player::Isolator,
        );
        assert!(matches!(
            ChainIsolator::new().choose_move(&midgame),
            Err(StrategyError::UnsupportedPosition { .. })
        ));
        let toucher_turn = start(GameVariant::ToucherIsolator, &path(4));
        assert!(matches!(
            ChainIsolator::new().choose_move(&toucher_turn),
            Err(StrategyError::WrongSide { .. })
        ));
    }

    #[test]
    fn meta_leaf_takes_pendants_on_a_star() {
        let s = start(GameVariant::ToucherIsolator, &star(4));
        let mut toucher = Scripted(vec![EdgeId(0), EdgeId(2)], 0);
        let mut isolator = MetaLeafIsolator::new();
        let final_state = play_game(&s, &mut toucher, &mut isolator).unwrap();
        assert_eq!(isolator_moves(&final_state), vec![EdgeId(1)]);
        assert_eq!(final_state.final_score().unwrap(), 1);
        assert_eq!(isolator.opening_claims(), 1);
        assert_eq!(isolator.handoff_leaves(), None);
    }

    #[test]
    fn meta_leaf_hands_off_to_the_chain_policy() {
        // On a path of five the opening stalls after one capture and the
        // remainder reduces to a single fresh edge, which gets swept.
        let s = start(GameVariant::ToucherIsolator, &path(5));
        let mut toucher = Scripted(vec![EdgeId(1), EdgeId(3)], 0);
        let mut isolator = MetaLeafIsolator::new();
        let final_state = play_game(&s, &mut toucher, &mut isolator).unwrap();
        assert_eq!(isolator_moves(&final_state), vec![EdgeId(0), EdgeId(2)]);
        assert_eq!(final_state.final_score().unwrap(), 1);
        assert_eq!(isolator.opening_claims(), 1);
        assert_eq!(isolator.handoff_leaves(), Some(2));
    }

    #[test]
    fn meta_leaf_meets_floor_on_small_trees() {
        // The floor formula starts at three vertices; on two the lone edge
        // goes to Toucher.
        for n in 3..=6u32 {
            for t in all_trees(n).unwrap() {
                let s = start(GameVariant::ToucherIsolator, &t);
                let got =
                    best_response_score(&s, &MetaLeafIsolator::new(), Player::Isolator).unwrap();
                let floor = (n + 3) / 5;
                assert!(
                    got >= floor,
                    "tree n={n}: got {got}, floor {floor}"
                );
            }
        }
    }

    #[test]
    fn meta_leaf_rejects_bad_positions() {
        let two_comps = start(GameVariant::ToucherIsolator, &k_copies_p3_local());
        let after_t = two_comps.apply_move(EdgeId(0)).unwrap();
        assert!(matches!(
            MetaLeafIsolator::new().choose_move(&after_t),
            Err(StrategyError::UnsupportedPosition { .. })
        ));
        let wrong_variant = start(GameVariant::NonLeafIsolatorToucher, &path(4));
        assert!(matches!(
            MetaLeafIsolator::new().choose_move(&wrong_variant),
            Err(StrategyError::UnsupportedPosition { .. })
        ));
    }

    fn k_copies_p3_local() -> PartiallyPlayedGraph {
        crate::generate::k_copies_p3(2)
    }

    #[test]
    fn optimal_mover_realises_the_game_value() {
        for g in [path(5), path(6), star(5)] {
            let s = start(GameVariant::ToucherIsolator, &g);
            let value = Solver::default().solve_state(&s).unwrap();
            for side in [Player::Toucher, Player::Isolator] {
                let got = best_response_score(&s, &OptimalMover::default(), side).unwrap();
                assert_eq!(got, value, "side {side}");
            }
        }
    }

    #[test]
    fn greedy_plays_toucher_reasonably() {
        let s = start(GameVariant::ToucherIsolator, &star(5));
        // Every star edge touches the centre plus one leaf: two fresh.
        assert_eq!(GreedyToucher.choose_move(&s).unwrap(), EdgeId(0));
        let after = s.apply_move(EdgeId(0)).unwrap().apply_move(EdgeId(1)).unwrap();
        // Centre already touched: every remaining edge frees one vertex.
        assert_eq!(GreedyToucher.choose_move(&after).unwrap(), EdgeId(2));
        assert!(matches!(
            GreedyToucher.choose_move(&s.apply_move(EdgeId(3)).unwrap()),
            Err(StrategyError::WrongSide { .. })
        ));
    }

    #[test]
    fn random_mover_is_reproducible_and_forks() {
        let s = start(GameVariant::ToucherIsolator, &path(7));
        let run = |mut t: Box<dyn Strategy>, mut i: Box<dyn Strategy>| {
            play_game(&s, t.as_mut(), i.as_mut()).unwrap().transcript()
        };
        let a = run(
            Box::new(RandomMover::new(5)),
            Box::new(RandomMover::new(9)),
        );
        let b = run(
            Box::new(RandomMover::new(5)),
            Box::new(RandomMover::new(9)),
        );
        assert_eq!(a, b);
        // A clone mid-stream continues identically.
        let mut orig = RandomMover::new(42);
        let mut state = s.clone();
        state = state.apply_move(orig.choose_move(&state).unwrap()).unwrap();
        state = state.apply_move(EdgeId(0)).unwrap();
        let mut fork = orig.box_clone();
        let from_orig = orig.choose_move(&state).unwrap();
        let from_fork = fork.choose_move(&state).unwrap();
        assert_eq!(from_orig, from_fork);
    }

    #[test]
    fn names_parse_and_report() {
        assert_eq!(by_name("optimal").unwrap().name(), "optimal");
        assert_eq!(by_name("greedy").unwrap().name(), "greedy");
        assert_eq!(by_name("theorem").unwrap().name(), "theorem");
        assert_eq!(by_name("lemma").unwrap().name(), "lemma");
        assert_eq!(by_name("random:17").unwrap().name(), "random:17");
        assert!(matches!(
            by_name("random:many"),
            Err(StrategyError::UnknownName(_))
        ));
        assert!(matches!(by_name("psychic"), Err(StrategyError::UnknownName(_))));
    }

    #[test]
    fn base_forest_detection() {
        assert!(is_base_forest(&path(3)).unwrap());
        assert!(is_base_forest(&star(5)).unwrap());
        assert!(!is_base_forest(&path(4)).unwrap());
        assert!(!is_base_forest(&path(6)).unwrap());
        assert!(is_base_forest(&crate::generate::k_copies_p3(3)).unwrap());
    }

    #[test]
    fn strategies_agree_with_reference_on_a_tiny_board() {
        // Sanity: driving the optimal mover through play_game reproduces the
        // solver's value against itself.
        let s = start(GameVariant::NonLeafIsolatorToucher, &path(4));
        let mut a = OptimalMover::default();
        let mut b = OptimalMover::default();
        let done = play_game(&s, &mut a, &mut b).unwrap();
        assert_eq!(
            done.final_score().unwrap(),
            minimax_reference(&s).unwrap()
        );
    }
}
