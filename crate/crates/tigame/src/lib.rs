//! Toucher-Isolator games on small graphs.
//!
//! Two players alternately claim edges of a graph. A vertex ends up
//! *untouched* when every incident edge belongs to Isolator; the score of a
//! finished game is the number of untouched vertices. Toucher moves first and
//! tries to minimise the score, Isolator maximises it. A second variant has
//! Isolator move first and only counts untouched vertices that are not leaves
//! of the starting forest.
//!
//! The crate provides:
//!
//! * [`graph`] — partially played graphs, vertex/path classification, stats;
//! * [`surgery`] — pruning operators that shrink a position while preserving
//!   its value, together with exact bookkeeping of the change;
//! * [`game`] — game states, legal moves, scoring and transcripts;
//! * [`solver`] — exact minimax values with memoisation and optional pruning;
//! * [`strategy`] — Isolator strategies with proven score floors, plus
//!   baseline opponents;
//! * [`generate`] — graph families including exhaustive small-tree and
//!   small-forest enumeration;
//! * [`harness`] — verification campaigns that recheck every formula and
//!   bookkeeping table on desk-scale instances;
//! * [`cli`] — the `tigame` command line.

pub mod cli;
pub mod game;
pub mod generate;
pub mod graph;
pub mod harness;
pub mod solver;
pub mod strategy;
pub mod surgery;

pub use game::{GameState, GameVariant, Player};
pub use graph::{Claim, EdgeId, GraphStats, PartiallyPlayedGraph, VertexClass, VertexId};
pub use solver::Solver;
