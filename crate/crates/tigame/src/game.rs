//! Game state for the edge-claiming game.
//!
//! Two players alternately claim unclaimed edges until none remain. A vertex
//! ends up *untouched* when every incident edge belongs to Isolator (so
//! isolated vertices are untouched by definition). Toucher wants few
//! untouched vertices, Isolator wants many.
//!
//! Two scoring variants are supported:
//!
//! * [`GameVariant::ToucherIsolator`] — Toucher moves first and every
//!   untouched vertex scores;
//! * [`GameVariant::NonLeafIsolatorToucher`] — Isolator moves first and only
//!   untouched vertices that were *not* leaves of the starting graph score.
//!
//! The set of starting leaves is frozen when the state is created, so
//! positions produced by graph surgery can carry their own notion of which
//! vertices are discounted.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::graph::{Claim, EdgeId, GraphError, PartiallyPlayedGraph, VertexId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("claim counts (toucher {toucher}, isolator {isolator}) cannot arise from alternating play")]
    InconsistentClaims { toucher: u32, isolator: u32 },
    #[error("game is not over yet: unclaimed edges remain")]
    NotTerminal,
    #[error("move out of turn: it is {expected}'s move")]
    NotYourTurn { expected: Player },
    #[error("transcript line {line}: {msg}")]
    BadTranscript { line: usize, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Which scoring rule and move order is in force.
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
pub enum GameVariant {
    /// Toucher moves first; all untouched vertices score.
    ToucherIsolator,
    /// Isolator moves first; untouched vertices that started as leaves are
    /// discounted.
    NonLeafIsolatorToucher,
}

impl GameVariant {
    pub fn first_player(self) -> Player {
        match self {
            GameVariant::ToucherIsolator => Player::Toucher,
            GameVariant::NonLeafIsolatorToucher => Player::Isolator,
        }
    }
}

impl fmt::Display for GameVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameVariant::ToucherIsolator => write!(f, "toucher-isolator"),
            GameVariant::NonLeafIsolatorToucher => write!(f, "non-leaf isolator-toucher"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, serde::Serialize, serde::Deserialize)]
pub enum Player {
    Toucher,
    Isolator,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Toucher => Player::Isolator,
            Player::Isolator => Player::Toucher,
        }
    }

    pub fn claim(self) -> Claim {
        match self {
            Player::Toucher => Claim::Toucher,
            Player::Isolator => Claim::Isolator,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Player::Toucher => 'T',
            Player::Isolator => 'I',
        }
    }

    pub fn from_letter(c: char) -> Option<Player> {
        match c {
            'T' => Some(Player::Toucher),
            'I' => Some(Player::Isolator),
            _ => None,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::Toucher => write!(f, "Toucher"),
            Player::Isolator => write!(f, "Isolator"),
        }
    }
}

/// A position in the game: the board, whose turn it is, and how the final
/// position will be scored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GameState {
    variant: GameVariant,
    graph: PartiallyPlayedGraph,
    to_move: Player,
    history: Vec<(Player, EdgeId)>,
    frozen_leaves: BTreeSet<VertexId>,
}

impl GameState {
    /// Starts a game on `graph`, deriving whose turn it is from the claim
    /// counts already on the board. With `j` claims in total the first
    /// player must own `ceil(j/2)` of them; anything else is rejected.
    pub fn new(variant: GameVariant, graph: PartiallyPlayedGraph) -> Result<GameState, GameError> {
        let toucher = graph
            .edges()
            .filter(|(_, e)| e.claim == Claim::Toucher)
            .count() as u32;
        let isolator = graph
            .edges()
            .filter(|(_, e)| e.claim == Claim::Isolator)
            .count() as u32;
        let (first, second) = match variant.first_player() {
            Player::Toucher => (toucher, isolator),
            Player::Isolator => (isolator, toucher),
        };
        let to_move = if first == second {
            variant.first_player()
        } else if first == second + 1 {
            variant.first_player().opponent()
        } else {
            return Err(GameError::InconsistentClaims { toucher, isolator });
        };
        Ok(GameState::from_position(variant, graph, to_move))
    }

    /// Builds a position with an explicit side to move, freezing the current
    /// leaves of `graph` as the discounted set. Positions obtained by
    /// surgery need this: deleting one claimed edge changes whose turn the
    /// claim counts would suggest.
    pub fn from_position(
        variant: GameVariant,
        graph: PartiallyPlayedGraph,
        to_move: Player,
    ) -> GameState {
        let frozen_leaves = graph.leaves();
        GameState {
            variant,
            graph,
            to_move,
            history: Vec::new(),
            frozen_leaves,
        }
    }

    /// Same as [`GameState::from_position`] but with a caller-chosen
    /// discounted vertex set.
    pub fn with_frozen_leaves(
        variant: GameVariant,
        graph: PartiallyPlayedGraph,
        to_move: Player,
        frozen_leaves: BTreeSet<VertexId>,
    ) -> GameState {
        GameState {
            variant,
            graph,
            to_move,
            history: Vec::new(),
            frozen_leaves,
        }
    }

    pub fn variant(&self) -> GameVariant {
        self.variant
    }

    pub fn graph(&self) -> &PartiallyPlayedGraph {
        &self.graph
    }

    pub fn to_move(&self) -> Player {
        self.to_move
    }

    pub fn history(&self) -> &[(Player, EdgeId)] {
        &self.history
    }

    pub fn frozen_leaves(&self) -> &BTreeSet<VertexId> {
        &self.frozen_leaves
    }

    /// Unclaimed edges in ascending id order.
    pub fn legal_moves(&self) -> Vec<EdgeId> {
        self.graph.unclaimed_edges()
    }

    pub fn is_terminal(&self) -> bool {
        self.graph.unclaimed_edges().is_empty()
    }

    /// Claims `edge` for the player to move and returns the resulting
    /// position.
    pub fn apply_move(&self, edge: EdgeId) -> Result<GameState, GameError> {
        let mut next = self.clone();
        next.graph.set_claim(edge, self.to_move.claim())?;
        next.history.push((self.to_move, edge));
        next.to_move = self.to_move.opponent();
        Ok(next)
    }

    /// Number of untouched vertices that score under this variant's rule.
    /// Only meaningful once every edge is claimed.
    pub fn final_score(&self) -> Result<u32, GameError> {
        if !self.is_terminal() {
            return Err(GameError::NotTerminal);
        }
        Ok(self.score_now())
    }

    /// The score the position would receive if it were terminal. Exposed for
    /// greedy heuristics that want to compare intermediate positions.
    pub fn score_now(&self) -> u32 {
        let (all, non_leaf) = self.graph.untouched_counts(&self.frozen_leaves);
        match self.variant {
            GameVariant::ToucherIsolator => all,
            GameVariant::NonLeafIsolatorToucher => non_leaf,
        }
    }

    /// One line per move: `T e4`, `I e2`, ...
    pub fn transcript(&self) -> String {
        let mut out = String::new();
        for (player, edge) in &self.history {
            out.push(player.letter());
            out.push(' ');
            out.push_str(&edge.to_string());
            out.push('\n');
        }
        out
    }

    /// Replays a transcript produced by [`GameState::transcript`] on top of
    /// this position, checking that each line's player really is the one to
    /// move.
    pub fn replay_transcript(&self, text: &str) -> Result<GameState, GameError> {
        let mut state = self.clone();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut parts = trimmed.split_whitespace();
            let who = parts
                .next()
                .and_then(|tok| {
                    let mut chars = tok.chars();
                    match (chars.next(), chars.next()) {
                        (Some(c), None) => Player::from_letter(c),
                        _ => None,
                    }
                })
                .ok_or_else(|| GameError::BadTranscript {
                    line,
                    msg: format!("expected player letter T or I in {trimmed:?}"),
                })?;
            let edge_tok = parts.next().ok_or_else(|| GameError::BadTranscript {
                line,
                msg: "missing edge".to_string(),
            })?;
            if parts.next().is_some() {
                return Err(GameError::BadTranscript {
                    line,
                    msg: format!("trailing tokens in {trimmed:?}"),
                });
            }
            let edge = edge_tok
                .strip_prefix('e')
                .and_then(|s| s.parse::<u32>().ok())
                .map(EdgeId)
                .ok_or_else(|| GameError::BadTranscript {
                    line,
                    msg: format!("bad edge token {edge_tok:?}"),
                })?;
            if who != state.to_move {
                return Err(GameError::NotYourTurn {
                    expected: state.to_move,
                });
            }
            state = state.apply_move(edge)?;
        }
        Ok(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: u32) -> PartiallyPlayedGraph {
        let pairs: Vec<(u32, u32)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        PartiallyPlayedGraph::unclaimed(n, &pairs).unwrap()
    }

    #[test]
    fn side_to_move_follows_claim_counts() {
        let mut g = path(4);
        g.set_claim(EdgeId(0), Claim::Toucher).unwrap();
        g.set_claim(EdgeId(2), Claim::Isolator).unwrap();
        let s = GameState::new(GameVariant::ToucherIsolator, g.clone()).unwrap();
        assert_eq!(s.to_move(), Player::Toucher);

        // One Toucher claim and none for Isolator: Isolator's turn.
        let mut g2 = path(4);
        g2.set_claim(EdgeId(1), Claim::Toucher).unwrap();
        let s2 = GameState::new(GameVariant::ToucherIsolator, g2).unwrap();
        assert_eq!(s2.to_move(), Player::Isolator);

        // Under the Isolator-first variant the same board is inconsistent.
        let mut g3 = path(4);
        g3.set_claim(EdgeId(1), Claim::Toucher).unwrap();
        assert_eq!(
            GameState::new(GameVariant::NonLeafIsolatorToucher, g3).unwrap_err(),
            GameError::InconsistentClaims {
                toucher: 1,
                isolator: 0
            }
        );
    }

    #[test]
    fn inconsistent_counts_rejected() {
        let mut g = path(5);
        g.set_claim(EdgeId(0), Claim::Isolator).unwrap();
        g.set_claim(EdgeId(1), Claim::Isolator).unwrap();
        assert_eq!(
            GameState::new(GameVariant::ToucherIsolator, g).unwrap_err(),
            GameError::InconsistentClaims {
                toucher: 0,
                isolator: 2
            }
        );
    }

    #[test]
    fn from_position_accepts_any_side() {
        let mut g = path(4);
        g.set_claim(EdgeId(1), Claim::Toucher).unwrap();
        // Claim counts would say Isolator, but surgery knows better.
        let s = GameState::from_position(GameVariant::ToucherIsolator, g, Player::Toucher);
        assert_eq!(s.to_move(), Player::Toucher);
    }

    #[test]
    fn alternation_splits_moves_evenly() {
        let mut s = GameState::new(GameVariant::ToucherIsolator, path(6)).unwrap();
        while !s.is_terminal() {
            let mv = s.legal_moves()[0];
            s = s.apply_move(mv).unwrap();
        }
        let toucher = s.history().iter().filter(|(p, _)| *p == Player::Toucher).count();
        let isolator = s.history().iter().filter(|(p, _)| *p == Player::Isolator).count();
        assert_eq!(toucher, 3); // ceil(5/2)
        assert_eq!(isolator, 2);

        let mut s = GameState::new(GameVariant::NonLeafIsolatorToucher, path(6)).unwrap();
        assert_eq!(s.to_move(), Player::Isolator);
        while !s.is_terminal() {
            let mv = *s.legal_moves().last().unwrap();
            s = s.apply_move(mv).unwrap();
        }
        let isolator = s.history().iter().filter(|(p, _)| *p == Player::Isolator).count();
        assert_eq!(isolator, 3);
    }

    #[test]
    fn hand_played_p4_scores_one_in_both_variants() {
        // Toucher first: T e1, I e0, T e2 leaves vertex 0 untouched.
        let mut s = GameState::new(GameVariant::ToucherIsolator, path(4)).unwrap();
        assert_eq!(s.final_score().unwrap_err(), GameError::NotTerminal);
        for mv in [EdgeId(1), EdgeId(0), EdgeId(2)] {
            s = s.apply_move(mv).unwrap();
        }
        assert_eq!(s.final_score().unwrap(), 1);

        // Isolator first: I e1, T e0, I e2 leaves vertex 2 (an interior
        // vertex) untouched; the untouched leaf 3 does not score.
        let mut s = GameState::new(GameVariant::NonLeafIsolatorToucher, path(4)).unwrap();
        for mv in [EdgeId(1), EdgeId(0), EdgeId(2)] {
            s = s.apply_move(mv).unwrap();
        }
        assert_eq!(s.final_score().unwrap(), 1);
        let (all, non_leaf) = (
            s.graph().untouched_counts(s.frozen_leaves()).0,
            s.graph().untouched_counts(s.frozen_leaves()).1,
        );
        assert_eq!(all, 2);
        assert_eq!(non_leaf, 1);
    }

    #[test]
    fn moves_must_hit_unclaimed_edges() {
        let s = GameState::new(GameVariant::ToucherIsolator, path(3)).unwrap();
        let s = s.apply_move(EdgeId(0)).unwrap();
        assert_eq!(
            s.apply_move(EdgeId(0)).unwrap_err(),
            GameError::Graph(GraphError::AlreadyClaimed(EdgeId(0)))
        );
    }

    #[test]
    fn empty_graph_is_terminal_with_score_zero() {
        let g = PartiallyPlayedGraph::unclaimed(0, &[]).unwrap();
        for variant in [GameVariant::ToucherIsolator, GameVariant::NonLeafIsolatorToucher] {
            let s = GameState::new(variant, g.clone()).unwrap();
            assert!(s.is_terminal());
            assert_eq!(s.final_score().unwrap(), 0);
        }
    }

    #[test]
    fn isolated_vertices_score_as_untouched() {
        // One edge plus a stranded vertex; Toucher claims the edge.
        let g = PartiallyPlayedGraph::build(3, &[(0, 1, Claim::Toucher)]).unwrap();
        let s = GameState::from_position(GameVariant::ToucherIsolator, g, Player::Isolator);
        assert!(s.is_terminal());
        assert_eq!(s.final_score().unwrap(), 1);
    }

    #[test]
    fn transcript_round_trips() {
        let mut s = GameState::new(GameVariant::ToucherIsolator, path(5)).unwrap();
        for mv in [EdgeId(1), EdgeId(3), EdgeId(0), EdgeId(2)] {
            s = s.apply_move(mv).unwrap();
        }
        let fresh = GameState::new(GameVariant::ToucherIsolator, path(5)).unwrap();
        let replayed = fresh.replay_transcript(&s.transcript()).unwrap();
        assert_eq!(replayed.graph(), s.graph());
        assert_eq!(replayed.history(), s.history());
    }

    #[test]
    fn replay_rejects_wrong_player_and_garbage() {
        let fresh = GameState::new(GameVariant::ToucherIsolator, path(4)).unwrap();
        assert_eq!(
            fresh.replay_transcript("I e0\n").unwrap_err(),
            GameError::NotYourTurn {
                expected: Player::Toucher
            }
        );
        assert!(matches!(
            fresh.replay_transcript("T pole\n").unwrap_err(),
            GameError::BadTranscript { line: 1, .. }
        ));
        assert!(matches!(
            fresh.replay_transcript("X e0\n").unwrap_err(),
            GameError::BadTranscript { line: 1, .. }
        ));
    }

    #[test]
    fn connected_score_never_exceeds_n_minus_2() {
        // Toucher's first claim touches two vertices, and on a connected
        // graph they stay touched; exhaustively play tiny paths.
        for n in 2..=5u32 {
            let mut stack = vec![GameState::new(GameVariant::ToucherIsolator, path(n)).unwrap()];
            while let Some(s) = stack.pop() {
                if s.is_terminal() {
                    assert!(s.final_score().unwrap() <= n - 2);
                    continue;
                }
                for mv in s.legal_moves() {
                    stack.push(s.apply_move(mv).unwrap());
                }
            }
        }
    }
}
