//! Verification campaigns: sweeps that check the solver, the accounting
//! rows, the position-shrinking equivalences and the strategy guarantees on
//! every instance small enough to solve exactly, plus negative controls that
//! prove the checks can fail.
//!
//! Each campaign produces a [`VerificationReport`]: a list of pass/fail rows
//! with expected and actual values, serialisable to JSON or CSV. Instances
//! inside a campaign are independent, so they run under rayon; row order is
//! deterministic regardless of thread count.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::game::{GameState, GameVariant, Player};
use crate::generate::{all_forests, all_trees, cycle, k_copies_p3, path, random_labeled_tree, star};
use crate::graph::{Claim, EdgeId, PartiallyPlayedGraph, VertexId};
use crate::solver::{minimax_reference, Solver};
use crate::strategy::{
    best_response_score, is_base_forest, play_game, ChainIsolator, GreedyToucher,
    MetaLeafIsolator,
};
use crate::surgery::{
    isolator_path_prediction, remove_isolator_subgraph, remove_length1_components,
    remove_toucher_edge, singleton_sweep_prediction, toucher_cut_prediction,
};

/// One checked fact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub instance: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
    pub note: String,
}

impl ReportRow {
    fn new(
        instance: impl Into<String>,
        expected: impl ToString,
        actual: impl ToString,
        pass: bool,
        note: impl Into<String>,
    ) -> ReportRow {
        ReportRow {
            instance: instance.into(),
            expected: expected.to_string(),
            actual: actual.to_string(),
            pass,
            note: note.into(),
        }
    }
}

/// Outcome of one campaign.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub experiment: String,
    pub params: BTreeMap<String, String>,
    pub rows: Vec<ReportRow>,
    pub pass: bool,
    pub wall_ms: u64,
    pub warning: Option<String>,
}

impl VerificationReport {
    pub fn from_rows(
        experiment: impl Into<String>,
        params: BTreeMap<String, String>,
        rows: Vec<ReportRow>,
        started: Instant,
    ) -> VerificationReport {
        let pass = rows.iter().all(|r| r.pass);
        let warning = rows
            .is_empty()
            .then(|| "no instances fell inside the configured ranges".to_string());
        VerificationReport {
            experiment: experiment.into(),
            params,
            rows,
            pass,
            wall_ms: started.elapsed().as_millis() as u64,
            warning,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

/// Flattens reports into CSV, one line per row.
pub fn to_csv(reports: &[VerificationReport]) -> String {
    fn field(s: &str) -> String {
        if s.contains([',', '"', '\n']) {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s.to_string()
        }
    }
    let mut out = String::from("experiment,instance,expected,actual,pass,note\n");
    for report in reports {
        for row in &report.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                field(&report.experiment),
                field(&row.instance),
                field(&row.expected),
                field(&row.actual),
                row.pass,
                field(&row.note),
            ));
        }
    }
    out
}

/// Ranges and budgets for the campaigns. The defaults cover everything the
/// exact solver can sweep in seconds.
#[derive(Clone, Debug)]
pub struct HarnessConfig {
    /// Paths and cycles are checked for 3..=this many vertices.
    pub max_path_cycle_n: u32,
    /// Every tree on 3..=this many vertices is checked against the value
    /// bounds.
    pub max_tree_n: u32,
    /// Every forest with up to this many edges is checked against the score
    /// floor.
    pub max_forest_edges: u32,
    /// Strategy guarantees are checked on trees up to this order...
    pub max_strategy_tree_n: u32,
    /// ...and forests up to this many edges.
    pub max_strategy_forest_edges: u32,
    /// Accounting rows are recomputed on every forest with up to this many
    /// edges.
    pub max_surgery_edges: u32,
    /// Sampled equivalence positions use boards of up to this many edges.
    pub max_equivalence_edges: u32,
    /// Number of sampled positions per property and size.
    pub equivalence_samples: u32,
    /// Number of sampled positions for the solver agreement check.
    pub agreement_samples: u32,
    pub seed: u64,
    /// Worker threads; `None` uses the rayon default.
    pub jobs: Option<usize>,
    /// Edge cap handed to the exact solver.
    pub solver_cap: usize,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            max_path_cycle_n: 12,
            max_tree_n: 9,
            max_forest_edges: 9,
            max_strategy_tree_n: 9,
            max_strategy_forest_edges: 9,
            max_surgery_edges: 8,
            max_equivalence_edges: 9,
            equivalence_samples: 200,
            agreement_samples: 500,
            seed: 2024,
            jobs: None,
            solver_cap: 16,
        }
    }
}

impl HarnessConfig {
    fn solver(&self) -> Solver {
        Solver::new(self.solver_cap).unwrap_or_default()
    }

    fn params(&self, keys: &[(&str, String)]) -> BTreeMap<String, String> {
        let mut map = BTreeMap::new();
        map.insert("seed".to_string(), self.seed.to_string());
        for (k, v) in keys {
            map.insert((*k).to_string(), v.clone());
        }
        map
    }
}

fn solve_or_note(solver: &Solver, variant: GameVariant, g: &PartiallyPlayedGraph) -> Result<u32, String> {
    solver.optimal_score(variant, g).map_err(|e| e.to_string())
}

/// Closed-form values for paths and cycles. The closed form starts at three
/// vertices: the two-vertex path is worth 0 (the first mover claims its only
/// edge), so it gets a pinned row of its own.
fn path_cycle_rows(cfg: &HarnessConfig, offset: i64) -> Vec<ReportRow> {
    let solver = cfg.solver();
    let mut rows: Vec<ReportRow> = Vec::new();
    if cfg.max_path_cycle_n >= 3 {
        let expected = offset;
        rows.push(
            match solve_or_note(&solver, GameVariant::ToucherIsolator, &path(2)) {
                Ok(v) => ReportRow::new(
                    "path n=2",
                    expected,
                    v,
                    i64::from(v) == expected,
                    "below the closed-form range",
                ),
                Err(e) => ReportRow::new("path n=2", expected, "-", false, e),
            },
        );
    }
    let formula_rows: Vec<ReportRow> = (3..=cfg.max_path_cycle_n)
        .collect::<Vec<_>>()
        .par_iter()
        .flat_map(|&n| {
            let mut rows = Vec::new();
            let expect_path = i64::from((n + 3) / 5) + offset;
            match solve_or_note(&solver, GameVariant::ToucherIsolator, &path(n)) {
                Ok(v) => rows.push(ReportRow::new(
                    format!("path n={n}"),
                    expect_path,
                    v,
                    i64::from(v) == expect_path,
                    "",
                )),
                Err(e) => rows.push(ReportRow::new(format!("path n={n}"), expect_path, "-", false, e)),
            }
            let expect_cycle = i64::from((n + 1) / 5) + offset;
            match cycle(n)
                .map_err(|e| e.to_string())
                .and_then(|g| solve_or_note(&solver, GameVariant::ToucherIsolator, &g))
            {
                Ok(v) => rows.push(ReportRow::new(
                    format!("cycle n={n}"),
                    expect_cycle,
                    v,
                    i64::from(v) == expect_cycle,
                    "",
                )),
                Err(e) => {
                    rows.push(ReportRow::new(format!("cycle n={n}"), expect_cycle, "-", false, e))
                }
            }
            rows
        })
        .collect();
    rows.extend(formula_rows);
    rows
}

pub fn verify_path_cycle_values(cfg: &HarnessConfig) -> VerificationReport {
    let started = Instant::now();
    let rows = path_cycle_rows(cfg, 0);
    VerificationReport::from_rows(
        "path-cycle-values",
        cfg.params(&[("max_n", cfg.max_path_cycle_n.to_string())]),
        rows,
        started,
    )
}

/// Every tree sits between the path value and half its non-root vertices,
/// with paths and stars attaining the two ends.
fn tree_bound_rows(cfg: &HarnessConfig, offset: i64) -> Vec<ReportRow> {
    let solver = cfg.solver();
    (3..=cfg.max_tree_n)
        .collect::<Vec<_>>()
        .par_iter()
        .flat_map(|&n| {
            let lower = i64::from((n + 3) / 5) + offset;
            let upper = i64::from((n - 1) / 2) + offset;
            let trees = match all_trees(n) {
                Ok(t) => t,
                Err(e) => {
                    return vec![ReportRow::new(
                        format!("trees n={n}"),
                        "enumeration",
                        "-",
                        false,
                        e.to_string(),
                    )]
                }
            };
            let mut rows = Vec::new();
            let mut values = Vec::new();
            for (i, t) in trees.iter().enumerate() {
                match solve_or_note(&solver, GameVariant::ToucherIsolator, t) {
                    Ok(v) => {
                        values.push(v);
                        let ok = lower <= i64::from(v) && i64::from(v) <= upper;
                        rows.push(ReportRow::new(
                            format!("tree n={n} #{i}"),
                            format!("{lower}..={upper}"),
                            v,
                            ok,
                            "",
                        ));
                    }
                    Err(e) => rows.push(ReportRow::new(
                        format!("tree n={n} #{i}"),
                        format!("{lower}..={upper}"),
                        "-",
                        false,
                        e,
                    )),
                }
            }
            if !values.is_empty() {
                let min = i64::from(*values.iter().min().unwrap());
                let max = i64::from(*values.iter().max().unwrap());
                rows.push(ReportRow::new(
                    format!("trees n={n} minimum"),
                    lower,
                    min,
                    min == lower,
                    "the path attains the lower end",
                ));
                let star_value =
                    solve_or_note(&solver, GameVariant::ToucherIsolator, &star(n))
                        .map(i64::from)
                        .unwrap_or(-1);
                rows.push(ReportRow::new(
                    format!("trees n={n} maximum"),
                    upper,
                    max,
                    max == upper && star_value == upper,
                    format!("star value {star_value}"),
                ));
            }
            rows
        })
        .collect()
}

pub fn verify_tree_value_bounds(cfg: &HarnessConfig) -> VerificationReport {
    let started = Instant::now();
    let rows = tree_bound_rows(cfg, 0);
    VerificationReport::from_rows(
        "tree-value-bounds",
        cfg.params(&[("max_n", cfg.max_tree_n.to_string())]),
        rows,
        started,
    )
}

/// Hand-checked individual values.
fn spot_value_rows(cfg: &HarnessConfig, offset: i64) -> Vec<ReportRow> {
    let solver = cfg.solver();
    let mut cases: Vec<(String, PartiallyPlayedGraph, i64)> = vec![(
        "path n=6".to_string(),
        path(6),
        1,
    )];
    for k in 1..=3u32 {
        cases.push((
            format!("{k} disjoint 3-vertex paths"),
            k_copies_p3(k),
            i64::from(k),
        ));
    }
    cases
        .into_par_iter()
        .map(|(name, g, expect)| {
            let expect = expect + offset;
            match solve_or_note(&solver, GameVariant::ToucherIsolator, &g) {
                Ok(v) => ReportRow::new(name, expect, v, i64::from(v) == expect, ""),
                Err(e) => ReportRow::new(name, expect, "-", false, e),
            }
        })
        .collect()
}

pub fn verify_spot_values(cfg: &HarnessConfig) -> VerificationReport {
    let started = Instant::now();
    let rows = spot_value_rows(cfg, 0);
    VerificationReport::from_rows("spot-values", cfg.params(&[]), rows, started)
}

/// The Isolator-first, leaf-discounted value of every small forest sits on
/// or above `floor((m + 4k - 3l + 4) / 5)`; boards where the chain policy
/// has no opening rule satisfy `m <= 3l - 4k`.
fn forest_floor_rows(cfg: &HarnessConfig, offset: i64) -> Vec<ReportRow> {
    let solver = cfg.solver();
    let mut rows: Vec<ReportRow> = (1..=cfg.max_forest_edges)
        .collect::<Vec<_>>()
        .par_iter()
        .flat_map(|&m| {
            let forests = match all_forests(m) {
                Ok(f) => f,
                Err(e) => {
                    return vec![ReportRow::new(
                        format!("forests m={m}"),
                        "enumeration",
                        "-",
                        false,
                        e.to_string(),
                    )]
                }
            };
            let mut rows = Vec::new();
            let mut bucket_min: BTreeMap<(u32, u32, u32), u32> = BTreeMap::new();
            for (i, f) in forests.iter().enumerate() {
                let stats = f.stats();
                let floor = (stats.potential + 4).div_euclid(5).max(0) + offset;
                match solve_or_note(&solver, GameVariant::NonLeafIsolatorToucher, f) {
                    Ok(v) => {
                        rows.push(ReportRow::new(
                            format!("forest m={m} #{i}"),
                            format!(">= {floor}"),
                            v,
                            i64::from(v) >= floor,
                            format!("k={} l={} potential={}", stats.k, stats.l, stats.potential),
                        ));
                        let entry = bucket_min.entry((stats.m, stats.k, stats.l)).or_insert(v);
                        *entry = (*entry).min(v);
                    }
                    Err(e) => rows.push(ReportRow::new(
                        format!("forest m={m} #{i}"),
                        format!(">= {floor}"),
                        "-",
                        false,
                        e,
                    )),
                }
                match is_base_forest(f) {
                    Ok(true) => {
                        let bound = 3 * i64::from(stats.l) - 4 * i64::from(stats.k);
                        rows.push(ReportRow::new(
                            format!("base forest m={m} #{i}"),
                            format!("m <= {bound}"),
                            stats.m,
                            i64::from(stats.m) + offset <= bound,
                            "no opening rule applies here",
                        ));
                    }
                    Ok(false) => {}
                    Err(e) => rows.push(ReportRow::new(
                        format!("base forest m={m} #{i}"),
                        "classification",
                        "-",
                        false,
                        e.to_string(),
                    )),
                }
            }
            for ((m, k, l), min) in bucket_min {
                let floor = ((i64::from(m) + 4 * i64::from(k) - 3 * i64::from(l) + 4)
                    .div_euclid(5))
                .max(0);
                rows.push(ReportRow::new(
                    format!("tightness m={m} k={k} l={l}"),
                    format!(">= {floor}"),
                    min,
                    true,
                    format!("actual minimum exceeds the floor by {}", i64::from(min) - floor),
                ));
            }
            rows
        })
        .collect();
    rows.sort_by(|a, b| a.instance.cmp(&b.instance));
    rows
}

pub fn verify_forest_score_floor(cfg: &HarnessConfig) -> VerificationReport {
    let started = Instant::now();
    let rows = forest_floor_rows(cfg, 0);
    VerificationReport::from_rows(
        "forest-score-floor",
        cfg.params(&[("max_edges", cfg.max_forest_edges.to_string())]),
        rows,
        started,
    )
}

/// Recomputes every accounting row on every small forest: cutting each edge
/// as Toucher's, removing each maximal path as Isolator's, and sweeping
/// single-edge components.
fn surgery_rows(cfg: &HarnessConfig, offset: i64) -> Vec<ReportRow> {
    let mut rows: Vec<ReportRow> = (1..=cfg.max_surgery_edges)
        .collect::<Vec<_>>()
        .par_iter()
        .flat_map(|&m| {
            let forests = match all_forests(m) {
                Ok(f) => f,
                Err(e) => {
                    return vec![ReportRow::new(
                        format!("forests m={m}"),
                        "enumeration",
                        "-",
                        false,
                        e.to_string(),
                    )]
                }
            };
            forests
                .iter()
                .enumerate()
                .flat_map(|(i, f)| {
                    let mut rows = Vec::new();
                    // Toucher cuts: prediction from endpoint classes must
                    // equal the recomputed delta.
                    let mut cut_fails = Vec::new();
                    for e in f.edge_ids() {
                        let mut g = f.clone();
                        g.set_claim(e, Claim::Toucher).unwrap();
                        let predicted = toucher_cut_prediction(&g, e).unwrap();
                        let actual = remove_toucher_edge(&g, e).unwrap();
                        let mut predicted_delta = predicted.delta;
                        predicted_delta.dpotential += offset;
                        if predicted_delta != actual.delta
                            || predicted.profit != actual.delta.dpotential + 3
                            || predicted.profit < 0
                        {
                            cut_fails.push(format!(
                                "{e}: predicted {:?} actual {:?}",
                                predicted.delta, actual.delta
                            ));
                        }
                    }
                    rows.push(ReportRow::new(
                        format!("cut accounting m={m} #{i}"),
                        "predictions match recounts",
                        format!("{} edges", f.edge_count()),
                        cut_fails.is_empty(),
                        cut_fails.join("; "),
                    ));
                    // Path removals: one per maximal degree-two path.
                    let mut path_fails = Vec::new();
                    let loci = f.find_loci().unwrap();
                    for locus in &loci {
                        let mut g = f.clone();
                        for &e in &locus.edges {
                            g.set_claim(e, Claim::Isolator).unwrap();
                        }
                        let predicted = isolator_path_prediction(locus);
                        let actual = remove_isolator_subgraph(
                            &g,
                            &locus.edges.iter().copied().collect(),
                        )
                        .unwrap();
                        let mut predicted_delta = predicted.delta;
                        predicted_delta.dpotential += offset;
                        let r = locus.len() as u32 - 1;
                        if predicted_delta != actual.delta
                            || actual.non_leaf_internal != r
                            || !actual.collateral.is_empty()
                            || predicted.profit < 0
                        {
                            path_fails.push(format!(
                                "{:?} len {}: predicted {:?} actual {:?} interiors {}",
                                locus.kind,
                                locus.len(),
                                predicted.delta,
                                actual.delta,
                                actual.non_leaf_internal,
                            ));
                        }
                    }
                    rows.push(ReportRow::new(
                        format!("path accounting m={m} #{i}"),
                        "predictions match recounts",
                        format!("{} paths", loci.len()),
                        path_fails.is_empty(),
                        path_fails.join("; "),
                    ));
                    // Singleton sweep.
                    let sweep = remove_length1_components(f);
                    let mut predicted = singleton_sweep_prediction(sweep.q);
                    predicted.delta.dpotential += offset * i64::from(sweep.q > 0);
                    let ok = predicted.delta == sweep.delta
                        && predicted.profit == i64::from(sweep.q);
                    rows.push(ReportRow::new(
                        format!("singleton accounting m={m} #{i}"),
                        "prediction matches recount",
                        format!("q={}", sweep.q),
                        ok,
                        "",
                    ));
                    rows
                })
                .collect::<Vec<_>>()
        })
        .collect();
    rows.extend(surgery_coverage_rows(cfg));
    rows
}

/// The exhaustive sweep is only exhaustive if it actually meets every
/// endpoint pairing a cut edge can have and every path shape a removal can
/// take; these rows would catch a generator regression that quietly
/// shrinks the table.
fn surgery_coverage_rows(cfg: &HarnessConfig) -> Vec<ReportRow> {
    if cfg.max_surgery_edges < 5 {
        return Vec::new();
    }
    let mut pairs = std::collections::BTreeSet::new();
    let mut kinds = std::collections::BTreeSet::new();
    let mut swept = false;
    for m in 1..=cfg.max_surgery_edges {
        let Ok(forests) = all_forests(m) else { continue };
        for f in &forests {
            for (_, e) in f.edges() {
                let mut c = [
                    f.classify_vertex(e.u).unwrap().to_string(),
                    f.classify_vertex(e.v).unwrap().to_string(),
                ];
                c.sort();
                pairs.insert(c.join("/"));
            }
            for locus in &f.find_loci().unwrap() {
                kinds.insert(locus.kind.to_string());
            }
            swept |= remove_length1_components(f).q > 0;
        }
    }
    let pairs = pairs.into_iter().collect::<Vec<_>>().join(" ");
    let kinds = kinds.into_iter().collect::<Vec<_>>().join(" ");
    let all_pairs = "big/big big/leaf big/small leaf/leaf leaf/small small/small";
    let all_kinds = "branch path-component twig";
    vec![
        ReportRow::new(
            "cut endpoint coverage",
            all_pairs,
            &pairs,
            pairs == all_pairs,
            "every endpoint pairing appears in the sweep",
        ),
        ReportRow::new(
            "path shape coverage",
            all_kinds,
            &kinds,
            kinds == all_kinds,
            "every removable path shape appears in the sweep",
        ),
        ReportRow::new(
            "singleton sweep coverage",
            "q > 0 somewhere",
            if swept { "q > 0 somewhere" } else { "q = 0 everywhere" },
            swept,
            "",
        ),
    ]
}

pub fn verify_surgery_accounting(cfg: &HarnessConfig) -> VerificationReport {
    let started = Instant::now();
    let rows = surgery_rows(cfg, 0);
    VerificationReport::from_rows(
        "surgery-accounting",
        cfg.params(&[("max_edges", cfg.max_surgery_edges.to_string())]),
        rows,
        started,
    )
}

/// A random forest, optionally with extra single-edge components appended.
fn random_forest_graph(
    rng: &mut ChaCha8Rng,
    edges: u32,
    singletons: u32,
) -> PartiallyPlayedGraph {
    let split = edges >= 5 && rng.gen_bool(0.4);
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    let mut base = 0u32;
    let add_tree = |edge_count: u32, base: &mut u32, pairs: &mut Vec<(u32, u32)>,
                    rng: &mut ChaCha8Rng| {
        let t = random_labeled_tree(edge_count + 1, rng);
        for (_, e) in t.edges() {
            pairs.push((e.u.0 + *base, e.v.0 + *base));
        }
        *base += edge_count + 1;
    };
    if split {
        let a = rng.gen_range(2..edges - 1);
        add_tree(a, &mut base, &mut pairs, rng);
        add_tree(edges - a, &mut base, &mut pairs, rng);
    } else {
        add_tree(edges, &mut base, &mut pairs, rng);
    }
    for _ in 0..singletons {
        pairs.push((base, base + 1));
        base += 2;
    }
    PartiallyPlayedGraph::unclaimed(base, &pairs).expect("sampled forest is simple")
}

fn random_prefix(rng: &mut ChaCha8Rng, start: GameState, max_moves: usize) -> GameState {
    let mut state = start;
    let depth = rng.gen_range(0..=max_moves.min(state.legal_moves().len()));
    for _ in 0..depth {
        let moves = state.legal_moves();
        if moves.is_empty() {
            break;
        }
        let mv = moves[rng.gen_range(0..moves.len())];
        state = state.apply_move(mv).expect("move is legal");
    }
    state
}

fn inherited_frozen(state: &GameState, survivor: &PartiallyPlayedGraph) -> std::collections::BTreeSet<VertexId> {
    state
        .frozen_leaves()
        .iter()
        .copied()
        .filter(|&v| survivor.has_vertex(v))
        .collect()
}

/// Sampled checks that the three board-shrinking operators preserve the
/// value of a position (up to the vertices they bank).
fn equivalence_rows(cfg: &HarnessConfig) -> Vec<ReportRow> {
    let solver = cfg.solver();
    let sizes: Vec<u32> = (3..=cfg.max_equivalence_edges).collect();
    sizes
        .par_iter()
        .flat_map(|&m| {
            let mut rows = Vec::new();
            // Property 1: cutting one Toucher edge, leaf-discounted variant.
            let mut fails = Vec::new();
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (u64::from(m) << 8) ^ 1);
            let mut checked = 0;
            while checked < cfg.equivalence_samples {
                let g = random_forest_graph(&mut rng, m, 0);
                let start = GameState::new(GameVariant::NonLeafIsolatorToucher, g).unwrap();
                let max_moves = start.legal_moves().len();
                let state = random_prefix(&mut rng, start, max_moves);
                let toucher_edges: Vec<EdgeId> = state
                    .graph()
                    .edges()
                    .filter(|(_, e)| e.claim == Claim::Toucher)
                    .map(|(id, _)| id)
                    .collect();
                if toucher_edges.is_empty() {
                    continue;
                }
                checked += 1;
                let e = toucher_edges[rng.gen_range(0..toucher_edges.len())];
                let cut = remove_toucher_edge(state.graph(), e).unwrap();
                let lhs = solver.solve_state(&state).unwrap();
                let shrunk = GameState::from_position(
                    GameVariant::NonLeafIsolatorToucher,
                    cut.graph,
                    state.to_move(),
                );
                let rhs = solver.solve_state(&shrunk).unwrap();
                if lhs != rhs {
                    fails.push(format!("sample {checked}: {lhs} vs {rhs} after cutting {e}"));
                }
            }
            rows.push(ReportRow::new(
                format!("cut equivalence m={m}"),
                format!("{} samples agree", cfg.equivalence_samples),
                format!("{} mismatches", fails.len()),
                fails.is_empty(),
                fails.join("; "),
            ));
            // Property 2: removing a set of Isolator edges banks exactly the
            // vertices that had no edge outside the set; both variants.
            for variant in [GameVariant::ToucherIsolator, GameVariant::NonLeafIsolatorToucher] {
                let tag = match variant {
                    GameVariant::ToucherIsolator => 2u64,
                    GameVariant::NonLeafIsolatorToucher => 3,
                };
                let mut fails = Vec::new();
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (u64::from(m) << 8) ^ tag);
                let mut checked = 0;
                while checked < cfg.equivalence_samples {
                    let g = random_forest_graph(&mut rng, m, 0);
                    let start = GameState::new(variant, g).unwrap();
                    let max_moves = start.legal_moves().len();
                    let state = random_prefix(&mut rng, start, max_moves);
                    let isolator_edges: Vec<EdgeId> = state
                        .graph()
                        .edges()
                        .filter(|(_, e)| e.claim == Claim::Isolator)
                        .map(|(id, _)| id)
                        .collect();
                    if isolator_edges.is_empty() {
                        continue;
                    }
                    checked += 1;
                    let mut subset: std::collections::BTreeSet<EdgeId> = isolator_edges
                        .iter()
                        .copied()
                        .filter(|_| rng.gen_bool(0.5))
                        .collect();
                    if subset.is_empty() {
                        subset = isolator_edges.iter().copied().collect();
                    }
                    let removal = remove_isolator_subgraph(state.graph(), &subset).unwrap();
                    let banked = match variant {
                        GameVariant::ToucherIsolator => removal.internal,
                        GameVariant::NonLeafIsolatorToucher => removal.non_leaf_internal,
                    };
                    let lhs = solver.solve_state(&state).unwrap();
                    let shrunk = GameState::with_frozen_leaves(
                        variant,
                        removal.graph.clone(),
                        state.to_move(),
                        inherited_frozen(&state, &removal.graph),
                    );
                    let rhs = solver.solve_state(&shrunk).unwrap();
                    if lhs != rhs + banked {
                        fails.push(format!(
                            "sample {checked}: {lhs} vs {rhs}+{banked} removing {} edges",
                            subset.len()
                        ));
                    }
                }
                rows.push(ReportRow::new(
                    format!("claimed-set equivalence m={m} ({variant})"),
                    format!("{} samples agree", cfg.equivalence_samples),
                    format!("{} mismatches", fails.len()),
                    fails.is_empty(),
                    fails.join("; "),
                ));
            }
            // Property 3: single-edge components never change the
            // leaf-discounted value.
            let mut fails = Vec::new();
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (u64::from(m) << 8) ^ 4);
            for sample in 0..cfg.equivalence_samples {
                let singletons = rng.gen_range(1..=2);
                let g = random_forest_graph(&mut rng, m, singletons);
                let start = GameState::new(GameVariant::NonLeafIsolatorToucher, g).unwrap();
                let max_moves = start.legal_moves().len();
                let state = random_prefix(&mut rng, start, max_moves);
                let sweep = remove_length1_components(state.graph());
                let lhs = solver.solve_state(&state).unwrap();
                let shrunk = GameState::with_frozen_leaves(
                    GameVariant::NonLeafIsolatorToucher,
                    sweep.graph.clone(),
                    state.to_move(),
                    inherited_frozen(&state, &sweep.graph),
                );
                let rhs = solver.solve_state(&shrunk).unwrap();
                if lhs != rhs {
                    fails.push(format!("sample {sample}: {lhs} vs {rhs} with q={}", sweep.q));
                }
            }
            rows.push(ReportRow::new(
                format!("singleton equivalence m={m}"),
                format!("{} samples agree", cfg.equivalence_samples),
                format!("{} mismatches", fails.len()),
                fails.is_empty(),
                fails.join("; "),
            ));
            rows
        })
        .collect()
}

pub fn verify_position_equivalence(cfg: &HarnessConfig) -> VerificationReport {
    let started = Instant::now();
    let rows = equivalence_rows(cfg);
    VerificationReport::from_rows(
        "position-equivalence",
        cfg.params(&[
            ("max_edges", cfg.max_equivalence_edges.to_string()),
            ("samples", cfg.equivalence_samples.to_string()),
        ]),
        rows,
        started,
    )
}

/// Both policies must meet their floors against a clairvoyant opponent, on
/// every tree and forest in range.
fn strategy_rows(cfg: &HarnessConfig) -> Vec<ReportRow> {
    let solver = cfg.solver();
    let mut rows: Vec<ReportRow> = (3..=cfg.max_strategy_tree_n)
        .collect::<Vec<_>>()
        .par_iter()
        .flat_map(|&n| {
            let trees = match all_trees(n) {
                Ok(t) => t,
                Err(e) => {
                    return vec![ReportRow::new(
                        format!("trees n={n}"),
                        "enumeration",
                        "-",
                        false,
                        e.to_string(),
                    )]
                }
            };
            trees
                .iter()
                .enumerate()
                .flat_map(|(i, t)| {
                    let floor = (n + 3) / 5;
                    let start =
                        GameState::new(GameVariant::ToucherIsolator, t.clone()).unwrap();
                    let mut rows = Vec::new();
                    let achieved =
                        best_response_score(&start, &MetaLeafIsolator::new(), Player::Isolator);
                    let value = solver.solve_state(&start).ok();
                    match achieved {
                        Ok(got) => rows.push(ReportRow::new(
                            format!("pendant policy tree n={n} #{i}"),
                            format!(">= {floor}"),
                            got,
                            got >= floor,
                            format!(
                                "optimal value {}; gap {}",
                                value.map_or("-".into(), |v| v.to_string()),
                                value.map_or("-".into(), |v| (v as i64 - got as i64).to_string()),
                            ),
                        )),
                        Err(e) => rows.push(ReportRow::new(
                            format!("pendant policy tree n={n} #{i}"),
                            format!(">= {floor}"),
                            "-",
                            false,
                            e.to_string(),
                        )),
                    }
                    // One deterministic playout to log the opening length
                    // against the reduced board's leaf count.
                    let mut iso = MetaLeafIsolator::new();
                    let mut tou = GreedyToucher;
                    if play_game(&start, &mut tou, &mut iso).is_ok() {
                        if let Some(l1) = iso.handoff_leaves() {
                            let r = iso.opening_claims();
                            rows.push(ReportRow::new(
                                format!("opening-vs-leaves tree n={n} #{i}"),
                                format!("opening+1 >= {l1}"),
                                r + 1,
                                r + 1 >= l1,
                                "greedy-opponent playout",
                            ));
                        }
                    }
                    rows
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let forest_rows: Vec<ReportRow> = (1..=cfg.max_strategy_forest_edges)
        .collect::<Vec<_>>()
        .par_iter()
        .flat_map(|&m| {
            let forests = match all_forests(m) {
                Ok(f) => f,
                Err(e) => {
                    return vec![ReportRow::new(
                        format!("forests m={m}"),
                        "enumeration",
                        "-",
                        false,
                        e.to_string(),
                    )]
                }
            };
            forests
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    let stats = f.stats();
                    let floor = (stats.potential + 4).div_euclid(5).max(0) as u32;
                    let start =
                        GameState::new(GameVariant::NonLeafIsolatorToucher, f.clone()).unwrap();
                    let value = solver.solve_state(&start).ok();
                    match best_response_score(&start, &ChainIsolator::new(), Player::Isolator) {
                        Ok(got) => ReportRow::new(
                            format!("chain policy forest m={m} #{i}"),
                            format!(">= {floor}"),
                            got,
                            got >= floor,
                            format!(
                                "optimal value {}; gap {}",
                                value.map_or("-".into(), |v| v.to_string()),
                                value.map_or("-".into(), |v| (v as i64 - got as i64).to_string()),
                            ),
                        ),
                        Err(e) => ReportRow::new(
                            format!("chain policy forest m={m} #{i}"),
                            format!(">= {floor}"),
                            "-",
                            false,
                            e.to_string(),
                        ),
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    rows.extend(forest_rows);
    rows
}

pub fn verify_strategy_guarantees(cfg: &HarnessConfig) -> VerificationReport {
    let started = Instant::now();
    let rows = strategy_rows(cfg);
    VerificationReport::from_rows(
        "strategy-guarantees",
        cfg.params(&[
            ("max_tree_n", cfg.max_strategy_tree_n.to_string()),
            ("max_forest_edges", cfg.max_strategy_forest_edges.to_string()),
        ]),
        rows,
        started,
    )
}

/// The packed engine, the naive recursion and the alpha-beta engine must
/// produce identical values.
fn agreement_rows(cfg: &HarnessConfig) -> Vec<ReportRow> {
    let solver = cfg.solver();
    let mut rows: Vec<ReportRow> = (1..=6u32.min(cfg.max_forest_edges))
        .collect::<Vec<_>>()
        .par_iter()
        .flat_map(|&m| {
            let forests = match all_forests(m) {
                Ok(f) => f,
                Err(e) => {
                    return vec![ReportRow::new(
                        format!("forests m={m}"),
                        "enumeration",
                        "-",
                        false,
                        e.to_string(),
                    )]
                }
            };
            let mut fails = Vec::new();
            let mut count = 0;
            for (i, f) in forests.iter().enumerate() {
                for variant in
                    [GameVariant::ToucherIsolator, GameVariant::NonLeafIsolatorToucher]
                {
                    let state = GameState::new(variant, f.clone()).unwrap();
                    let fast = solver.solve_state(&state);
                    let slow = minimax_reference(&state);
                    count += 1;
                    match (fast, slow) {
                        (Ok(a), Ok(b)) if a == b => {}
                        (a, b) => fails.push(format!("forest #{i} {variant}: {a:?} vs {b:?}")),
                    }
                }
            }
            vec![ReportRow::new(
                format!("memoized vs naive m={m}"),
                format!("{count} values agree"),
                format!("{} mismatches", fails.len()),
                fails.is_empty(),
                fails.join("; "),
            )]
        })
        .collect();
    // Alpha-beta on seeded random positions.
    if cfg.max_equivalence_edges < 3 || cfg.agreement_samples == 0 {
        return rows;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xA1FA);
    let mut fails = Vec::new();
    for sample in 0..cfg.agreement_samples {
        let m = rng.gen_range(3..=cfg.max_equivalence_edges);
        let variant = if rng.gen_bool(0.5) {
            GameVariant::ToucherIsolator
        } else {
            GameVariant::NonLeafIsolatorToucher
        };
        let g = random_forest_graph(&mut rng, m, 0);
        let start = GameState::new(variant, g).unwrap();
        let max_moves = start.legal_moves().len();
        let state = random_prefix(&mut rng, start, max_moves);
        let plain = solver.solve_state(&state).unwrap();
        let pruned = solver.solve_state_alpha_beta(&state).unwrap();
        if plain != pruned {
            fails.push(format!("sample {sample}: {plain} vs {pruned}"));
        }
    }
    rows.push(ReportRow::new(
        "alpha-beta vs memoized",
        format!("{} samples agree", cfg.agreement_samples),
        format!("{} mismatches", fails.len()),
        fails.is_empty(),
        fails.join("; "),
    ));
    rows
}

pub fn verify_solver_agreement(cfg: &HarnessConfig) -> VerificationReport {
    let started = Instant::now();
    let rows = agreement_rows(cfg);
    VerificationReport::from_rows(
        "solver-agreement",
        cfg.params(&[("samples", cfg.agreement_samples.to_string())]),
        rows,
        started,
    )
}

/// A campaign's row builder re-run with its expectations deliberately skewed.
type PerturbedRows<'a> = Box<dyn Fn() -> Vec<ReportRow> + Sync + 'a>;

/// Every closed-form check must fail when its expected values are shifted by
/// one; the ranges include instances where the bounds are tight.
pub fn verify_negative_controls(cfg: &HarnessConfig) -> VerificationReport {
    let started = Instant::now();
    let controls: Vec<(&str, PerturbedRows)> = vec![
        ("path-cycle-values", Box::new(|| path_cycle_rows(cfg, 1))),
        ("tree-value-bounds", Box::new(|| tree_bound_rows(cfg, 1))),
        ("spot-values", Box::new(|| spot_value_rows(cfg, 1))),
        ("forest-score-floor", Box::new(|| forest_floor_rows(cfg, 1))),
        ("surgery-accounting", Box::new(|| surgery_rows(cfg, 1))),
    ];
    let rows = controls
        .into_iter()
        .map(|(name, run)| {
            let perturbed = run();
            let broke = perturbed.iter().any(|r| !r.pass);
            ReportRow::new(
                format!("{name} shifted by +1"),
                "at least one row fails",
                format!(
                    "{} of {} rows fail",
                    perturbed.iter().filter(|r| !r.pass).count(),
                    perturbed.len()
                ),
                broke || perturbed.is_empty(),
                if perturbed.is_empty() {
                    "nothing in range to perturb".to_string()
                } else {
                    String::new()
                },
            )
        })
        .collect();
    VerificationReport::from_rows("negative-controls", cfg.params(&[]), rows, started)
}

/// Runs every campaign in a fixed order.
pub fn run_all(cfg: &HarnessConfig) -> Vec<VerificationReport> {
    let run = || {
        vec![
            verify_path_cycle_values(cfg),
            verify_tree_value_bounds(cfg),
            verify_spot_values(cfg),
            verify_forest_score_floor(cfg),
            verify_surgery_accounting(cfg),
            verify_position_equivalence(cfg),
            verify_strategy_guarantees(cfg),
            verify_solver_agreement(cfg),
            verify_negative_controls(cfg),
        ]
    };
    match cfg.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map(|pool| pool.install(run))
            .unwrap_or_else(|_| run()),
        None => run(),
    }
}
