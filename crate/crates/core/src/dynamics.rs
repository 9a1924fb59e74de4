//! Improving-response dynamics.
//!
//! One agent moves at a time. A run stops when no agent has an improving move
//! in the policy's search space, when a network repeats (NCG only; add-only
//! runs cannot cycle since the edge count grows), when a scripted schedule
//! runs out, or after `max_steps` moves.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::best_response::best_response_exact;
use crate::cost::{social_cost, Cost, GameConfig, Locality, Variant};
use crate::equilibrium::CheckLevel;
use crate::error::{Error, Result};
use crate::graph::{diameter, Node, OwnedGraph};
use crate::moves::{best_single_move, enumerate_single_moves, replay, MoveKind, MoveRecord};
use crate::oracle::Witness;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MovePolicy {
    /// The cheapest elementary move; ties go to the earliest in
    /// [`enumerate_single_moves`] order. In add-only games this is the best
    /// single edge purchase.
    BestSingleEdge,
    /// The first improving elementary move in [`enumerate_single_moves`]
    /// order, i.e. additions by ascending target first.
    FirstImprovingSingleMove,
    /// An exact best response.
    FullBestResponse,
}

impl MovePolicy {
    /// Equilibrium notion under which a converged run has no improving move.
    pub fn check_level(self) -> CheckLevel {
        match self {
            MovePolicy::FullBestResponse => CheckLevel::Exact,
            _ => CheckLevel::SingleMove,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScriptedMove {
    pub agent: Node,
    pub kind: MoveKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Activation {
    /// Each activation picks an agent uniformly at random.
    UniformRandom { seed: u64 },
    /// Agents are activated cyclically in this order.
    RoundRobin { order: Vec<Node> },
    /// Fixed moves; each must be legal and strictly improving.
    Scripted { schedule: Vec<ScriptedMove> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ActivationScheme {
    pub activation: Activation,
    pub policy: MovePolicy,
}

impl ActivationScheme {
    pub fn uniform_random(seed: u64, policy: MovePolicy) -> Self {
        Self {
            activation: Activation::UniformRandom { seed },
            policy,
        }
    }

    /// Round robin in the order `0, 1, ..., n - 1`.
    pub fn round_robin(n: usize, policy: MovePolicy) -> Self {
        Self {
            activation: Activation::RoundRobin {
                order: (0..n).collect(),
            },
            policy,
        }
    }

    pub fn scripted(schedule: Vec<ScriptedMove>) -> Self {
        Self {
            activation: Activation::Scripted { schedule },
            policy: MovePolicy::BestSingleEdge,
        }
    }

    pub fn schedule(&self) -> Option<&[ScriptedMove]> {
        match &self.activation {
            Activation::Scripted { schedule } => Some(schedule),
            _ => None,
        }
    }

    fn label(&self) -> String {
        match &self.activation {
            Activation::UniformRandom { seed } => format!("uniform_random({seed})"),
            Activation::RoundRobin { .. } => "round_robin".into(),
            Activation::Scripted { schedule } => format!("scripted({})", schedule.len()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Converged,
    CycleDetected,
    StepLimit,
    /// A scripted schedule ended while some agent could still improve.
    ScheduleExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DynamicsTrace {
    pub game: String,
    pub scheme: ActivationScheme,
    pub initial: Witness,
    #[serde(rename = "final")]
    pub final_graph: Witness,
    pub steps: Vec<MoveRecord>,
    pub outcome: Outcome,
    /// Round-robin sweeps in which some agent moved.
    pub rounds: usize,
    /// Agent activations, up to and including the last move.
    pub activations: usize,
    /// For a detected cycle, the step count at which the repeated network
    /// was first seen.
    pub cycle_start: Option<usize>,
    pub final_social_cost: Cost,
    pub final_diameter: u32,
    pub notes: Vec<&'static str>,
}

impl DynamicsTrace {
    pub fn csv_header() -> &'static str {
        "label,n,game,scheme,policy,steps,activations,rounds,outcome,final_social_cost,final_diameter"
    }

    pub fn csv_row(&self, label: &str) -> String {
        let mut out = String::new();
        let _ = write!(
            out,
            "{label},{},{},{},{:?},{},{},{},{:?},{},{}",
            self.initial.0.n(),
            self.game,
            self.scheme.label(),
            self.scheme.policy,
            self.steps.len(),
            self.activations,
            self.rounds,
            self.outcome,
            self.final_social_cost,
            self.final_diameter,
        );
        out
    }
}

/// Hash of the owned edge set; ownership matters, not just topology.
pub fn canonical_state_hash(g: &OwnedGraph) -> u64 {
    let mut h = DefaultHasher::new();
    g.n().hash(&mut h);
    for e in g.owned_edges() {
        e.hash(&mut h);
    }
    h.finish()
}

/// Visited networks of an NCG run, compared in full on hash collisions.
#[derive(Default)]
struct Visited {
    by_hash: HashMap<u64, Vec<(OwnedGraph, usize)>>,
}

impl Visited {
    /// Records `g` at `step`; returns the earlier step if `g` was seen before.
    fn visit(&mut self, g: &OwnedGraph, step: usize) -> Option<usize> {
        let bucket = self.by_hash.entry(canonical_state_hash(g)).or_default();
        if let Some((_, s)) = bucket.iter().find(|(h, _)| h == g) {
            return Some(*s);
        }
        bucket.push((g.clone(), step));
        None
    }
}

/// The move `u` makes under `policy`, if it has an improving one.
pub fn select_move(
    g: &OwnedGraph,
    u: Node,
    cfg: &GameConfig,
    policy: MovePolicy,
) -> Result<Option<MoveRecord>> {
    Ok(match policy {
        MovePolicy::BestSingleEdge => best_single_move(g, u, cfg)?.filter(MoveRecord::is_improving),
        MovePolicy::FirstImprovingSingleMove => enumerate_single_moves(g, u, cfg)?
            .into_iter()
            .find(MoveRecord::is_improving),
        MovePolicy::FullBestResponse => {
            let br = best_response_exact(g, u, cfg)?;
            br.improves().then(|| MoveRecord {
                agent: u,
                kind: MoveKind::from_strategies(g.owned_targets(u), &br.targets),
                cost_before: br.current_cost,
                cost_after: br.cost,
            })
        }
    })
}

struct Run {
    g: OwnedGraph,
    steps: Vec<MoveRecord>,
    visited: Option<Visited>,
    cycle_start: Option<usize>,
}

impl Run {
    /// Applies a move; returns true if the resulting network repeats.
    fn push(&mut self, rec: MoveRecord) -> Result<bool> {
        rec.kind.apply(&mut self.g, rec.agent)?;
        self.steps.push(rec);
        if let Some(v) = &mut self.visited {
            if let Some(s) = v.visit(&self.g, self.steps.len()) {
                self.cycle_start = Some(s);
                return Ok(true);
            }
        }
        Ok(false)
    }
}

pub fn run_dynamics(
    g0: &OwnedGraph,
    cfg: &GameConfig,
    scheme: &ActivationScheme,
    max_steps: usize,
) -> Result<DynamicsTrace> {
    cfg.validate()?;
    if max_steps == 0 {
        return Err(Error::InvalidConfig("max_steps must be positive".into()));
    }
    let n = g0.n();
    let mut run = Run {
        g: g0.clone(),
        steps: Vec::new(),
        visited: (cfg.variant == Variant::Ncg).then(Visited::default),
        cycle_start: None,
    };
    if let Some(v) = &mut run.visited {
        v.visit(g0, 0);
    }
    let policy = scheme.policy;
    let mut rounds = 0;
    let mut activations = 0;

    let outcome = match &scheme.activation {
        Activation::Scripted { schedule } => {
            let mut outcome = None;
            for (step, m) in schedule.iter().enumerate() {
                if run.steps.len() == max_steps {
                    outcome = Some(Outcome::StepLimit);
                    break;
                }
                let (_, rec) = replay(&run.g, m.agent, &m.kind, cfg)?;
                if !rec.is_improving() {
                    return Err(Error::NotImproving {
                        step,
                        agent: m.agent,
                        before: rec.cost_before.to_string(),
                        after: rec.cost_after.to_string(),
                    });
                }
                activations += 1;
                if run.push(rec)? {
                    outcome = Some(Outcome::CycleDetected);
                    break;
                }
            }
            match outcome {
                Some(o) => o,
                None => {
                    let stuck = (0..n)
                        .map(|u| select_move(&run.g, u, cfg, policy).map(|m| m.is_none()))
                        .collect::<Result<Vec<bool>>>()?;
                    if stuck.into_iter().all(|s| s) {
                        Outcome::Converged
                    } else {
                        Outcome::ScheduleExhausted
                    }
                }
            }
        }
        Activation::RoundRobin { order } => {
            if let Some(&bad) = order.iter().find(|&&u| u >= n) {
                return Err(Error::NodeOutOfRange { node: bad, n });
            }
            // `quiet` counts consecutive activations without a move
            let mut quiet = 0;
            let mut pending = 0;
            let mut moved_this_round = false;
            let mut outcome = Outcome::Converged;
            'sweeps: while !order.is_empty() {
                for &u in order {
                    if quiet >= order.len() {
                        break 'sweeps;
                    }
                    if run.steps.len() == max_steps {
                        outcome = Outcome::StepLimit;
                        break 'sweeps;
                    }
                    pending += 1;
                    match select_move(&run.g, u, cfg, policy)? {
                        Some(rec) => {
                            activations += pending;
                            pending = 0;
                            quiet = 0;
                            moved_this_round = true;
                            if run.push(rec)? {
                                outcome = Outcome::CycleDetected;
                                break 'sweeps;
                            }
                        }
                        None => quiet += 1,
                    }
                }
                if moved_this_round {
                    rounds += 1;
                }
                moved_this_round = false;
            }
            if moved_this_round {
                rounds += 1;
            }
            outcome
        }
        Activation::UniformRandom { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            // agents known to have no improving move in the current network
            let mut stuck = vec![false; n];
            let mut stuck_count = 0;
            let mut pending = 0;
            loop {
                if stuck_count == n {
                    break Outcome::Converged;
                }
                if run.steps.len() == max_steps {
                    break Outcome::StepLimit;
                }
                let u = rng.gen_range(0..n);
                pending += 1;
                if stuck[u] {
                    continue;
                }
                match select_move(&run.g, u, cfg, policy)? {
                    Some(rec) => {
                        activations += pending;
                        pending = 0;
                        stuck.iter_mut().for_each(|s| *s = false);
                        stuck_count = 0;
                        if run.push(rec)? {
                            break Outcome::CycleDetected;
                        }
                    }
                    None => {
                        stuck[u] = true;
                        stuck_count += 1;
                    }
                }
            }
        }
    };

    let mut notes = vec!["locality is measured in the network before each move"];
    if !matches!(scheme.activation, Activation::Scripted { .. }) {
        notes.push(match policy {
            MovePolicy::BestSingleEdge => {
                "moves: cheapest elementary move, ties to the lowest target"
            }
            MovePolicy::FirstImprovingSingleMove => {
                "moves: first improving elementary move by ascending target"
            }
            MovePolicy::FullBestResponse => {
                "moves: exact best response, ties to fewest edges then lexicographic"
            }
        });
    }
    if cfg.variant == Variant::Aog {
        notes.push("cycle detection off: add-only runs cannot revisit a network");
    }
    let Run {
        g,
        steps,
        cycle_start,
        ..
    } = run;
    Ok(DynamicsTrace {
        game: cfg.to_string(),
        scheme: scheme.clone(),
        initial: Witness(g0.clone()),
        final_social_cost: social_cost(&g, cfg),
        final_diameter: diameter(&g),
        final_graph: Witness(g),
        steps,
        outcome,
        rounds,
        activations,
        cycle_start,
        notes,
    })
}

fn add(agent: Node, target: Node) -> ScriptedMove {
    ScriptedMove {
        agent,
        kind: MoveKind::AddEdge(target),
    }
}

/// The adversarial schedule on the path `v_1 .. v_n` (node `v_i` has id
/// `i - 1`) that builds a network with quadratically many edges.
///
/// Under 2-locality the schedule ends with `v_n` buying `v_{n-2}`; otherwise
/// `v_{ceil(n/2)}` then buys `v_{n-1}` and `v_{n-1}` buys every third node
/// from `v_{ceil(n/2)+3}` up to `v_{n-5}`.
pub fn adversarial_schedule(n: usize, cfg: &GameConfig) -> Result<ActivationScheme> {
    if cfg.variant != Variant::Aog {
        return Err(Error::InvalidConfig(
            "the adversarial schedule is for add-only games".into(),
        ));
    }
    if n < 12 {
        return Err(Error::UnsupportedSize {
            n,
            reason: "the adversarial schedule needs at least 12 nodes",
        });
    }
    let v = |i: usize| i - 1;
    let c = n.div_ceil(2);
    let mut s = Vec::new();
    for i in 1..=c - 3 {
        s.push(add(v(i), v(i + 2)));
        for j in (1..i).rev() {
            s.push(add(v(j), v(i + 2)));
        }
    }
    for i in c + 1..=n - 2 {
        s.push(add(v(c - 1), v(i)));
    }
    s.push(add(v(n), v(n - 2)));
    if cfg.locality != Locality::Radius(2) {
        s.push(add(v(c), v(n - 1)));
        let mut i = c + 3;
        while i <= n - 5 {
            s.push(add(v(n - 1), v(i)));
            i += 3;
        }
    }
    Ok(ActivationScheme::scripted(s))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LinearTarget {
    /// An equilibrium of the (global) add-only game.
    DegaogNe,
    /// A 2-local equilibrium of the 2-local add-only game.
    Deg2aog2ne,
}

/// Short improving sequences from the path `v_1 .. v_n` to an equilibrium.
///
/// Both start with `v_1` buying `v_3, ..., v_{n-2}` and `v_n` buying
/// `v_{n-2}`. For [`LinearTarget::DegaogNe`] (`n = 1 mod 3`) `v_{n-1}` then
/// buys `v_2, v_5, ..., v_{n-5}`, for `n - 2 + (n - 7) / 3` moves in total.
pub fn scripted_linear_sequences(n: usize, which: LinearTarget) -> Result<ActivationScheme> {
    if n < 10 {
        return Err(Error::UnsupportedSize {
            n,
            reason: "linear sequences need at least 10 nodes",
        });
    }
    if which == LinearTarget::DegaogNe && n % 3 != 1 {
        return Err(Error::UnsupportedSize {
            n,
            reason: "the add-only equilibrium sequence needs n = 1 mod 3",
        });
    }
    let v = |i: usize| i - 1;
    let mut s: Vec<ScriptedMove> = (3..=n - 2).map(|i| add(v(1), v(i))).collect();
    s.push(add(v(n), v(n - 2)));
    if which == LinearTarget::DegaogNe {
        s.extend((2..=n - 5).step_by(3).map(|i| add(v(n - 1), v(i))));
    }
    Ok(ActivationScheme::scripted(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_path, build_star};

    #[test]
    fn hash_sees_ownership() {
        let g = OwnedGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let h = OwnedGraph::from_edges(3, [(1, 0), (1, 2)]).unwrap();
        assert_eq!(canonical_state_hash(&g), canonical_state_hash(&g.clone()));
        assert_ne!(canonical_state_hash(&g), canonical_state_hash(&h));
    }

    #[test]
    fn star_is_stable() {
        let s = build_star(6).unwrap();
        for policy in [MovePolicy::BestSingleEdge, MovePolicy::FullBestResponse] {
            for scheme in [
                ActivationScheme::round_robin(6, policy),
                ActivationScheme::uniform_random(3, policy),
            ] {
                let t = run_dynamics(&s, &GameConfig::ncg(), &scheme, 100).unwrap();
                assert_eq!(t.outcome, Outcome::Converged);
                assert!(t.steps.is_empty());
                assert_eq!(t.rounds, 0);
            }
        }
    }

    #[test]
    fn scripted_rejects_non_improving_moves() {
        let p = build_path(5).unwrap();
        let bad = ActivationScheme::scripted(vec![add(1, 3)]);
        let err = run_dynamics(&p, &GameConfig::aog(), &bad, 10).unwrap_err();
        assert!(
            matches!(
                err,
                Error::NotImproving {
                    step: 0,
                    agent: 1,
                    ..
                }
            ),
            "{err}"
        );
        let illegal = ActivationScheme::scripted(vec![add(0, 1)]);
        assert!(run_dynamics(&p, &GameConfig::aog(), &illegal, 10).is_err());
    }

    #[test]
    fn step_limit_is_an_outcome() {
        let p = build_path(8).unwrap();
        let scheme = ActivationScheme::round_robin(8, MovePolicy::BestSingleEdge);
        let t = run_dynamics(&p, &GameConfig::aog(), &scheme, 2).unwrap();
        assert_eq!(t.outcome, Outcome::StepLimit);
        assert_eq!(t.steps.len(), 2);
        assert!(run_dynamics(&p, &GameConfig::aog(), &scheme, 0).is_err());
    }
}
