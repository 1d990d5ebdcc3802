//! Exact optimal play on small boards.
//!
//! The main engine packs the claim vector into a `u64` (two bits per edge)
//! and runs memoized minimax: Toucher minimizes the final number of scoring
//! untouched vertices, Isolator maximizes it. An alpha-beta version with a
//! bounded transposition table gives the same root values faster, and
//! [`minimax_reference`] is a deliberately naive recursion over full
//! [`GameState`] values kept around as an independent cross-check.
//!
//! Board size is capped (default 16 edges, hard limit 32) because the state
//! space grows as three to the number of edges.

use std::collections::HashMap;

use thiserror::Error;

use crate::game::{GameError, GameState, GameVariant, Player};
use crate::graph::{Claim, EdgeId, PartiallyPlayedGraph};

/// Two bits per edge slot inside the memo key.
const UNCLAIMED: u64 = 0b00;
const TOUCHER: u64 = 0b01;
const ISOLATOR: u64 = 0b10;

/// A key can hold at most 32 two-bit slots.
pub const HARD_EDGE_LIMIT: usize = 32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("board has {edges} edges, above the solver cap of {cap}")]
    CapExceeded { edges: usize, cap: usize },
    #[error("solver cap {0} exceeds the hard limit of {HARD_EDGE_LIMIT} edges")]
    InvalidCap(usize),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Exhaustive solver for positions with few enough edges.
#[derive(Clone, Copy, Debug)]
pub struct Solver {
    max_edges: usize,
}

impl Default for Solver {
    fn default() -> Self {
        Solver { max_edges: 16 }
    }
}

impl Solver {
    pub fn new(max_edges: usize) -> Result<Solver, SolverError> {
        if max_edges > HARD_EDGE_LIMIT {
            return Err(SolverError::InvalidCap(max_edges));
        }
        Ok(Solver { max_edges })
    }

    pub fn max_edges(&self) -> usize {
        self.max_edges
    }

    /// Value of the game started from scratch on `graph`.
    pub fn optimal_score(
        &self,
        variant: GameVariant,
        graph: &PartiallyPlayedGraph,
    ) -> Result<u32, SolverError> {
        let state = GameState::new(variant, graph.clone())?;
        self.solve_state(&state)
    }

    /// Value of an arbitrary mid-game position.
    pub fn solve_state(&self, state: &GameState) -> Result<u32, SolverError> {
        let engine = Engine::from_state(state, self.max_edges)?;
        let mut memo = HashMap::new();
        Ok(engine.solve(
            engine.root_key,
            engine.root_toucher_to_move,
            engine.remaining,
            &mut memo,
        ))
    }

    /// Same value as [`Solver::solve_state`], computed with alpha-beta
    /// pruning and a bound-aware transposition table.
    pub fn solve_state_alpha_beta(&self, state: &GameState) -> Result<u32, SolverError> {
        let engine = Engine::from_state(state, self.max_edges)?;
        let mut memo = HashMap::new();
        let beta = engine.score_ceiling() + 1;
        let v = engine.alpha_beta(
            engine.root_key,
            engine.root_toucher_to_move,
            engine.remaining,
            -1,
            beta,
            &mut memo,
        );
        Ok(v as u32)
    }

    /// An optimal move for the player to move, smallest edge id among ties.
    /// `None` when the position is terminal.
    pub fn optimal_move(&self, state: &GameState) -> Result<Option<EdgeId>, SolverError> {
        let engine = Engine::from_state(state, self.max_edges)?;
        if engine.remaining == 0 {
            return Ok(None);
        }
        let mut memo = HashMap::new();
        let toucher = engine.root_toucher_to_move;
        let mut best: Option<(u32, usize)> = None;
        for slot in 0..engine.slots.len() {
            if (engine.root_key >> (2 * slot)) & 0b11 != UNCLAIMED {
                continue;
            }
            let child = engine.root_key | (engine.claim_bits(toucher) << (2 * slot));
            let v = engine.solve(child, !toucher, engine.remaining - 1, &mut memo);
            let better = match best {
                None => true,
                Some((bv, _)) => {
                    if toucher {
                        v < bv
                    } else {
                        v > bv
                    }
                }
            };
            if better {
                best = Some((v, slot));
            }
        }
        Ok(best.map(|(_, slot)| engine.slots[slot]))
    }

    /// Optimal line from `state` to the end of the game, with the value it
    /// realises.
    pub fn principal_variation(
        &self,
        state: &GameState,
    ) -> Result<(Vec<(Player, EdgeId)>, u32), SolverError> {
        let mut line = Vec::new();
        let mut cur = state.clone();
        while let Some(mv) = self.optimal_move(&cur)? {
            line.push((cur.to_move(), mv));
            cur = cur.apply_move(mv)?;
        }
        Ok((line, cur.final_score()?))
    }

    /// Maps [`Solver::optimal_score`] over a stream of named boards. One bad
    /// instance doesn't abort the rest: each row carries its own result.
    pub fn value_profile<I>(
        &self,
        variant: GameVariant,
        instances: I,
    ) -> Vec<(String, Result<u32, SolverError>)>
    where
        I: IntoIterator<Item = (String, PartiallyPlayedGraph)>,
    {
        instances
            .into_iter()
            .map(|(name, g)| {
                let value = self.optimal_score(variant, &g);
                (name, value)
            })
            .collect()
    }
}

/// Unmemoized minimax over whole [`GameState`] values. Exponentially slow,
/// but it exercises completely different code paths from the packed engine,
/// which makes it a useful oracle in tests.
pub fn minimax_reference(state: &GameState) -> Result<u32, SolverError> {
    if state.is_terminal() {
        return Ok(state.final_score()?);
    }
    let mut best: Option<u32> = None;
    for mv in state.legal_moves() {
        let v = minimax_reference(&state.apply_move(mv)?)?;
        best = Some(match (best, state.to_move()) {
            (None, _) => v,
            (Some(b), Player::Toucher) => b.min(v),
            (Some(b), Player::Isolator) => b.max(v),
        });
    }
    Ok(best.expect("non-terminal position has moves"))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Bound {
    Exact,
    Lower,
    Upper,
}

/// Packed representation of one solving run: edge ids mapped to key slots,
/// vertices reduced to their incident slot lists plus a scoring flag.
struct Engine {
    slots: Vec<EdgeId>,
    incidences: Vec<Vec<usize>>,
    scoring: Vec<bool>,
    /// Isolated scoring vertices contribute to every terminal alike.
    base: u32,
    root_key: u64,
    root_toucher_to_move: bool,
    remaining: usize,
}

impl Engine {
    fn from_state(state: &GameState, cap: usize) -> Result<Engine, SolverError> {
        let g = state.graph();
        let slots: Vec<EdgeId> = g.edge_ids().collect();
        if slots.len() > cap {
            return Err(SolverError::CapExceeded {
                edges: slots.len(),
                cap,
            });
        }
        let slot_of: HashMap<EdgeId, usize> =
            slots.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut root_key = 0u64;
        let mut remaining = 0usize;
        for (i, &e) in slots.iter().enumerate() {
            let bits = match g.claim(e).unwrap() {
                Claim::Unclaimed => {
                    remaining += 1;
                    UNCLAIMED
                }
                Claim::Toucher => TOUCHER,
                Claim::Isolator => ISOLATOR,
            };
            root_key |= bits << (2 * i);
        }
        let mut incidences = Vec::new();
        let mut scoring = Vec::new();
        let mut base = 0;
        for v in g.vertices() {
            let scores = match state.variant() {
                GameVariant::ToucherIsolator => true,
                GameVariant::NonLeafIsolatorToucher => !state.frozen_leaves().contains(&v),
            };
            let inc: Vec<usize> = g.incident(v).iter().map(|e| slot_of[e]).collect();
            if inc.is_empty() {
                base += u32::from(scores);
            } else {
                incidences.push(inc);
                scoring.push(scores);
            }
        }
        Ok(Engine {
            slots,
            incidences,
            scoring,
            base,
            root_key,
            root_toucher_to_move: state.to_move() == Player::Toucher,
            remaining,
        })
    }

    fn claim_bits(&self, toucher: bool) -> u64 {
        if toucher {
            TOUCHER
        } else {
            ISOLATOR
        }
    }

    /// Largest score any terminal reachable from here could have.
    fn score_ceiling(&self) -> i64 {
        self.base as i64 + self.scoring.iter().filter(|&&s| s).count() as i64
    }

    fn evaluate(&self, key: u64) -> u32 {
        let mut score = self.base;
        for (inc, &scores) in self.incidences.iter().zip(&self.scoring) {
            if scores && inc.iter().all(|&s| (key >> (2 * s)) & 0b11 == ISOLATOR) {
                score += 1;
            }
        }
        score
    }

    fn solve(
        &self,
        key: u64,
        toucher: bool,
        remaining: usize,
        memo: &mut HashMap<u64, u32>,
    ) -> u32 {
        if remaining == 0 {
            return self.evaluate(key);
        }
        if let Some(&v) = memo.get(&key) {
            return v;
        }
        let bits = self.claim_bits(toucher);
        let mut best: Option<u32> = None;
        for slot in 0..self.slots.len() {
            if (key >> (2 * slot)) & 0b11 != UNCLAIMED {
                continue;
            }
            let v = self.solve(key | (bits << (2 * slot)), !toucher, remaining - 1, memo);
            best = Some(match best {
                None => v,
                Some(b) if toucher => b.min(v),
                Some(b) => b.max(v),
            });
        }
        let v = best.expect("remaining > 0 means an unclaimed slot exists");
        memo.insert(key, v);
        v
    }

    #[allow(clippy::too_many_arguments)]
    fn alpha_beta(
        &self,
        key: u64,
        toucher: bool,
        remaining: usize,
        mut alpha: i64,
        mut beta: i64,
        memo: &mut HashMap<u64, (Bound, i64)>,
    ) -> i64 {
        if remaining == 0 {
            return self.evaluate(key) as i64;
        }
        if let Some(&(bound, v)) = memo.get(&key) {
            match bound {
                Bound::Exact => return v,
                Bound::Lower => alpha = alpha.max(v),
                Bound::Upper => beta = beta.min(v),
            }
            if alpha >= beta {
                return v;
            }
        }
        let (alpha0, beta0) = (alpha, beta);
        let bits = self.claim_bits(toucher);
        let mut best: Option<i64> = None;
        for slot in 0..self.slots.len() {
            if (key >> (2 * slot)) & 0b11 != UNCLAIMED {
                continue;
            }
            let v = self.alpha_beta(
                key | (bits << (2 * slot)),
                !toucher,
                remaining - 1,
                alpha,
                beta,
                memo,
            );
            if toucher {
                best = Some(best.map_or(v, |b| b.min(v)));
                beta = beta.min(v);
            } else {
                best = Some(best.map_or(v, |b| b.max(v)));
                alpha = alpha.max(v);
            }
            if alpha >= beta {
                break;
            }
        }
        let v = best.expect("remaining > 0 means an unclaimed slot exists");
        let bound = if v <= alpha0 {
            Bound::Upper
        } else if v >= beta0 {
            Bound::Lower
        } else {
            Bound::Exact
        };
        memo.insert(key, (bound, v));
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn path(n: u32) -> PartiallyPlayedGraph {
        let pairs: Vec<(u32, u32)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        PartiallyPlayedGraph::unclaimed(n, &pairs).unwrap()
    }

    fn cycle(n: u32) -> PartiallyPlayedGraph {
        let pairs: Vec<(u32, u32)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        PartiallyPlayedGraph::unclaimed(n, &pairs).unwrap()
    }

    fn star(n: u32) -> PartiallyPlayedGraph {
        let pairs: Vec<(u32, u32)> = (1..n).map(|i| (0, i)).collect();
        PartiallyPlayedGraph::unclaimed(n, &pairs).unwrap()
    }

    fn triangle_matchings(k: u32) -> PartiallyPlayedGraph {
        let mut pairs = Vec::new();
        for c in 0..k {
            let b = 3 * c;
            pairs.push((b, b + 1));
            pairs.push((b + 1, b + 2));
        }
        PartiallyPlayedGraph::unclaimed(3 * k, &pairs).unwrap()
    }

    fn value(variant: GameVariant, g: &PartiallyPlayedGraph) -> u32 {
        Solver::default().optimal_score(variant, g).unwrap()
    }

    #[test]
    fn key_spot_values() {
        use GameVariant::*;
        assert_eq!(value(ToucherIsolator, &path(6)), 1);
        assert_eq!(value(ToucherIsolator, &cycle(5)), 1);
        assert_eq!(value(ToucherIsolator, &star(5)), 2);
        assert_eq!(value(NonLeafIsolatorToucher, &path(4)), 1);
        assert_eq!(value(NonLeafIsolatorToucher, &path(3)), 0);
    }

    #[test]
    fn path_values_follow_fifths_rule() {
        assert_eq!(value(GameVariant::ToucherIsolator, &path(2)), 0);
        for n in 3..=12u32 {
            assert_eq!(
                value(GameVariant::ToucherIsolator, &path(n)),
                (n + 3) / 5,
                "path on {n} vertices"
            );
        }
    }

    #[test]
    fn cycle_values_follow_fifths_rule() {
        for n in 3..=12u32 {
            assert_eq!(
                value(GameVariant::ToucherIsolator, &cycle(n)),
                (n + 1) / 5,
                "cycle on {n} vertices"
            );
        }
    }

    #[test]
    fn star_values_take_every_other_leaf() {
        for n in 2..=9u32 {
            assert_eq!(
                value(GameVariant::ToucherIsolator, &star(n)),
                (n - 1) / 2,
                "star on {n} vertices"
            );
        }
    }

    #[test]
    fn disjoint_triangles_with_missing_edge_score_one_each() {
        for k in 1..=3u32 {
            assert_eq!(value(GameVariant::ToucherIsolator, &triangle_matchings(k)), k);
        }
    }

    #[test]
    fn engine_matches_naive_reference() {
        for g in [path(5), path(6), star(5), cycle(4), triangle_matchings(2)] {
            for variant in [GameVariant::ToucherIsolator, GameVariant::NonLeafIsolatorToucher] {
                let state = GameState::new(variant, g.clone()).unwrap();
                assert_eq!(
                    Solver::default().solve_state(&state).unwrap(),
                    minimax_reference(&state).unwrap(),
                    "naive check on {variant}"
                );
            }
        }
    }

    #[test]
    fn alpha_beta_agrees_on_random_positions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let solver = Solver::default();
        for trial in 0..60 {
            let n = rng.gen_range(4..=8);
            let g = if trial % 2 == 0 { path(n) } else { cycle(n) };
            let mut state = GameState::new(GameVariant::ToucherIsolator, g).unwrap();
            let prefix = rng.gen_range(0..=state.legal_moves().len());
            for _ in 0..prefix {
                let moves = state.legal_moves();
                let mv = moves[rng.gen_range(0..moves.len())];
                state = state.apply_move(mv).unwrap();
            }
            assert_eq!(
                solver.solve_state(&state).unwrap(),
                solver.solve_state_alpha_beta(&state).unwrap(),
                "trial {trial}"
            );
        }
    }

    #[test]
    fn relabelling_does_not_change_value() {
        // Same path with vertices shuffled.
        let g1 = path(6);
        let g2 = PartiallyPlayedGraph::unclaimed(
            6,
            &[(3, 5), (5, 0), (0, 4), (4, 2), (2, 1)],
        )
        .unwrap();
        assert_eq!(
            value(GameVariant::ToucherIsolator, &g1),
            value(GameVariant::ToucherIsolator, &g2)
        );
    }

    #[test]
    fn optimal_move_prefers_smallest_edge_on_ties() {
        let state = GameState::new(GameVariant::ToucherIsolator, path(3)).unwrap();
        // Both edges are symmetric, so the tie must break to e0.
        assert_eq!(
            Solver::default().optimal_move(&state).unwrap(),
            Some(EdgeId(0))
        );
        let done = GameState::new(
            GameVariant::ToucherIsolator,
            PartiallyPlayedGraph::build(2, &[(0, 1, Claim::Toucher)]).unwrap(),
        )
        .unwrap();
        assert_eq!(Solver::default().optimal_move(&done).unwrap(), None);
    }

    #[test]
    fn principal_variation_realises_the_value() {
        for g in [path(6), star(5), cycle(5)] {
            let state = GameState::new(GameVariant::ToucherIsolator, g).unwrap();
            let solver = Solver::default();
            let expect = solver.solve_state(&state).unwrap();
            let (line, score) = solver.principal_variation(&state).unwrap();
            assert_eq!(score, expect);
            assert_eq!(line.len(), state.legal_moves().len());
            // Moves alternate starting with Toucher.
            for (i, (p, _)) in line.iter().enumerate() {
                let expect_player = if i % 2 == 0 {
                    Player::Toucher
                } else {
                    Player::Isolator
                };
                assert_eq!(*p, expect_player);
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let solver = Solver::new(4).unwrap();
        assert_eq!(
            solver
                .optimal_score(GameVariant::ToucherIsolator, &path(6))
                .unwrap_err(),
            SolverError::CapExceeded { edges: 5, cap: 4 }
        );
        assert_eq!(Solver::new(40).unwrap_err(), SolverError::InvalidCap(40));
    }

    #[test]
    fn mid_game_positions_solve_with_explicit_side() {
        // Remove a Toucher edge from a played position and re-pose it with
        // the side that was actually to move.
        let mut g = path(5);
        g.set_claim(EdgeId(1), Claim::Toucher).unwrap();
        g.set_claim(EdgeId(0), Claim::Isolator).unwrap();
        let state = GameState::from_position(
            GameVariant::ToucherIsolator,
            g,
            Player::Toucher,
        );
        let v = Solver::default().solve_state(&state).unwrap();
        assert_eq!(v, minimax_reference(&state).unwrap());
    }

    #[test]
    fn value_profile_tabulates_families() {
        let solver = Solver::default();
        let paths = solver.value_profile(
            GameVariant::ToucherIsolator,
            (3..=7).map(|n| (format!("path n={n}"), path(n))),
        );
        let values: Vec<u32> = paths.iter().map(|(_, v)| *v.as_ref().unwrap()).collect();
        assert_eq!(values, [1, 1, 1, 1, 2]);
        let cycles = solver.value_profile(
            GameVariant::ToucherIsolator,
            (3..=7).map(|n| (format!("cycle n={n}"), crate::generate::cycle(n).unwrap())),
        );
        let values: Vec<u32> = cycles.iter().map(|(_, v)| *v.as_ref().unwrap()).collect();
        assert_eq!(values, [0, 1, 1, 1, 1]);
        let triples = solver.value_profile(
            GameVariant::ToucherIsolator,
            (1..=3).map(|k| (format!("{k} triples"), crate::generate::k_copies_p3(k))),
        );
        let values: Vec<u32> = triples.iter().map(|(_, v)| *v.as_ref().unwrap()).collect();
        assert_eq!(values, [1, 2, 3]);
        assert_eq!(paths[0].0, "path n=3");
    }

    #[test]
    fn value_profile_keeps_going_past_bad_instances() {
        let solver = Solver::new(4).unwrap();
        let rows = solver.value_profile(
            GameVariant::ToucherIsolator,
            vec![
                ("small".to_string(), path(3)),
                ("too big".to_string(), path(12)),
                ("also small".to_string(), path(4)),
            ],
        );
        assert_eq!(rows[0].1, Ok(1));
        assert_eq!(
            rows[1].1,
            Err(SolverError::CapExceeded { edges: 11, cap: 4 })
        );
        assert_eq!(rows[2].1, Ok(1));
    }
}
