//! Strategy changes and their exact evaluation.
//!
//! Every evaluation of a hypothetical strategy of agent `u` goes through
//! [`AgentView`]: distances from `u` in the deviated network equal
//! `1 + min` over `u`'s new neighbours of the distances in `g - u`, and
//! `g - u` does not depend on `u`'s strategy.

use std::collections::VecDeque;
use std::fmt;

use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::cost::{agent_cost, Cost, GameConfig, Rational, Variant};
use crate::error::{Error, Result};
use crate::graph::{bfs_into, bfs_without, Node, OwnedGraph, UNREACHABLE};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MoveKind {
    AddEdge(Node),
    DeleteEdge(Node),
    SwapEdge {
        old: Node,
        new: Node,
    },
    /// Replace the whole strategy by this (sorted) target set.
    ReplaceStrategy(Vec<Node>),
}

impl MoveKind {
    /// Strategy of `agent` after the move, sorted.
    pub fn resulting_strategy(&self, g: &OwnedGraph, agent: Node) -> Vec<Node> {
        let mut s = g.owned_targets(agent).to_vec();
        match self {
            MoveKind::AddEdge(t) => {
                if let Err(p) = s.binary_search(t) {
                    s.insert(p, *t);
                }
            }
            MoveKind::DeleteEdge(t) => s.retain(|x| x != t),
            MoveKind::SwapEdge { old, new } => {
                s.retain(|x| x != old);
                if let Err(p) = s.binary_search(new) {
                    s.insert(p, *new);
                }
            }
            MoveKind::ReplaceStrategy(targets) => {
                s = targets.clone();
                s.sort_unstable();
                s.dedup();
            }
        }
        s
    }

    /// Applies the move without checking game rules.
    pub fn apply(&self, g: &mut OwnedGraph, agent: Node) -> Result<()> {
        match self {
            MoveKind::AddEdge(t) => g.add_edge(agent, *t),
            MoveKind::DeleteEdge(t) => g.remove_edge(agent, *t),
            MoveKind::SwapEdge { old, new } => {
                g.remove_edge(agent, *old)?;
                if let Err(e) = g.add_edge(agent, *new) {
                    g.add_edge(agent, *old)?;
                    return Err(e);
                }
                Ok(())
            }
            MoveKind::ReplaceStrategy(targets) => g.set_strategy(agent, targets),
        }
    }

    /// Classifies a strategy change by its difference to the current strategy.
    pub fn from_strategies(current: &[Node], next: &[Node]) -> Self {
        let added: Vec<Node> = next
            .iter()
            .copied()
            .filter(|t| !current.contains(t))
            .collect();
        let removed: Vec<Node> = current
            .iter()
            .copied()
            .filter(|t| !next.contains(t))
            .collect();
        match (added.as_slice(), removed.as_slice()) {
            ([a], []) => MoveKind::AddEdge(*a),
            ([], [r]) => MoveKind::DeleteEdge(*r),
            ([a], [r]) => MoveKind::SwapEdge { old: *r, new: *a },
            _ => {
                let mut s = next.to_vec();
                s.sort_unstable();
                MoveKind::ReplaceStrategy(s)
            }
        }
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoveKind::AddEdge(t) => write!(f, "add {t}"),
            MoveKind::DeleteEdge(t) => write!(f, "delete {t}"),
            MoveKind::SwapEdge { old, new } => write!(f, "swap {old}->{new}"),
            MoveKind::ReplaceStrategy(ts) => write!(f, "replace {ts:?}"),
        }
    }
}

impl Serialize for MoveKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(None)?;
        match self {
            MoveKind::AddEdge(t) => {
                m.serialize_entry("type", "add")?;
                m.serialize_entry("target", t)?;
            }
            MoveKind::DeleteEdge(t) => {
                m.serialize_entry("type", "delete")?;
                m.serialize_entry("target", t)?;
            }
            MoveKind::SwapEdge { old, new } => {
                m.serialize_entry("type", "swap")?;
                m.serialize_entry("old", old)?;
                m.serialize_entry("new", new)?;
            }
            MoveKind::ReplaceStrategy(ts) => {
                m.serialize_entry("type", "replace")?;
                m.serialize_entry("targets", ts)?;
            }
        }
        m.end()
    }
}

/// One strategy change of one agent with its exact costs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MoveRecord {
    pub agent: Node,
    pub kind: MoveKind,
    #[serde(rename = "before")]
    pub cost_before: Cost,
    #[serde(rename = "after")]
    pub cost_after: Cost,
}

impl MoveRecord {
    #[inline]
    pub fn is_improving(&self) -> bool {
        self.cost_after < self.cost_before
    }
}

/// Non-neighbours of `u` that `u` may buy an edge to, measured in `g`.
pub fn candidate_targets(g: &OwnedGraph, u: Node, cfg: &GameConfig) -> Result<Vec<Node>> {
    g.check_node(u)?;
    let mut dist = vec![UNREACHABLE; g.n()];
    bfs_into(g, u, &mut dist, &mut VecDeque::new());
    Ok(candidates_from_row(g, u, cfg, &dist))
}

pub(crate) fn candidates_from_row(
    g: &OwnedGraph,
    u: Node,
    cfg: &GameConfig,
    dist: &[u32],
) -> Vec<Node> {
    (0..g.n())
        .filter(|&v| v != u && dist[v] > 1 && cfg.locality.admits(dist[v]))
        .collect()
}

/// Checks that `kind` is a legal strategy change for `agent` under `cfg`.
pub fn check_legal(g: &OwnedGraph, agent: Node, kind: &MoveKind, cfg: &GameConfig) -> Result<()> {
    g.check_node(agent)?;
    let illegal = |reason: String| Err(Error::IllegalMove { agent, reason });
    let current = g.owned_targets(agent);
    let next = kind.resulting_strategy(g, agent);
    let removed: Vec<Node> = current
        .iter()
        .copied()
        .filter(|t| !next.contains(t))
        .collect();
    let added: Vec<Node> = next
        .iter()
        .copied()
        .filter(|t| !current.contains(t))
        .collect();
    if let MoveKind::DeleteEdge(t) | MoveKind::SwapEdge { old: t, .. } = kind {
        if !current.contains(t) {
            return illegal(format!("does not own an edge to {t}"));
        }
    }
    if let MoveKind::AddEdge(t) | MoveKind::SwapEdge { new: t, .. } = kind {
        if current.contains(t) {
            return illegal(format!("already owns an edge to {t}"));
        }
    }
    if cfg.variant == Variant::Aog && !removed.is_empty() {
        return illegal("add-only games forbid deleting edges".into());
    }
    if added.is_empty() && removed.is_empty() {
        return illegal("strategy unchanged".into());
    }
    let candidates = candidate_targets(g, agent, cfg)?;
    for t in added {
        g.check_node(t)?;
        if candidates.binary_search(&t).is_err() {
            return illegal(format!("{t} is not a candidate target"));
        }
    }
    Ok(())
}

/// Cached distances in `g - u` used to price any strategy of `u`.
pub(crate) struct AgentView<'g> {
    g: &'g OwnedGraph,
    u: Node,
    rows: Vec<Option<Vec<u32>>>,
    incoming: Vec<Node>,
    queue: VecDeque<Node>,
}

impl<'g> AgentView<'g> {
    pub fn new(g: &'g OwnedGraph, u: Node) -> Self {
        Self {
            g,
            u,
            rows: vec![None; g.n()],
            incoming: g.incoming_owners(u).collect(),
            queue: VecDeque::new(),
        }
    }

    pub fn incoming(&self) -> &[Node] {
        &self.incoming
    }

    /// Distances from `x` in `g - u`.
    pub fn row(&mut self, x: Node) -> &[u32] {
        if self.rows[x].is_none() {
            let mut d = vec![UNREACHABLE; self.g.n()];
            bfs_without(self.g, x, self.u, &mut d, &mut self.queue);
            self.rows[x] = Some(d);
        }
        self.rows[x].as_deref().unwrap()
    }

    /// Degree `v` would have after `u` buys an edge to it.
    #[inline]
    pub fn degree_after_purchase(&self, v: Node) -> usize {
        let deg = self.g.deg(v);
        if self.g.has_edge(self.u, v) {
            deg
        } else {
            deg + 1
        }
    }

    pub fn price(&self, v: Node, cfg: &GameConfig) -> Rational {
        cfg.price.of_degree(self.degree_after_purchase(v))
    }

    /// Element-wise minimum of the `g - u` rows of `nodes`.
    pub fn min_rows(&mut self, nodes: impl IntoIterator<Item = Node>) -> Vec<u32> {
        let mut m = vec![UNREACHABLE; self.g.n()];
        for x in nodes {
            let r = self.row(x);
            for (a, &b) in m.iter_mut().zip(r) {
                if b < *a {
                    *a = b;
                }
            }
        }
        m
    }

    /// Distance sum of `u` given the minimum row over its neighbours.
    pub fn distance_from_min(&self, m: &[u32]) -> Option<u64> {
        let mut total = 0u64;
        for (w, &d) in m.iter().enumerate() {
            if w == self.u {
                continue;
            }
            if d == UNREACHABLE {
                return None;
            }
            total += u64::from(d) + 1;
        }
        Some(total)
    }

    /// Like [`distance_from_min`](Self::distance_from_min) with one extra neighbour `v`.
    pub fn distance_with_extra(&mut self, m: &[u32], v: Node) -> Option<u64> {
        let u = self.u;
        let r = self.row(v);
        let mut total = 0u64;
        for (w, (&a, &b)) in m.iter().zip(r).enumerate() {
            if w == u {
                continue;
            }
            let d = a.min(b);
            if d == UNREACHABLE {
                return None;
            }
            total += u64::from(d) + 1;
        }
        Some(total)
    }

    /// Exact cost of `u` playing `targets` with everyone else fixed.
    pub fn strategy_cost(&mut self, targets: &[Node], cfg: &GameConfig) -> Cost {
        let mut edge = Rational::zero();
        for &t in targets {
            edge += self.price(t, cfg);
        }
        let incoming = self.incoming.clone();
        let m = self.min_rows(incoming.into_iter().chain(targets.iter().copied()));
        let dist = if self.g.n() == 1 {
            Some(0)
        } else {
            self.distance_from_min(&m)
        };
        Cost::combine(edge, dist)
    }
}

/// All elementary deviations of `u`: additions, and for NCG deletions and swaps.
///
/// Additions come first in ascending target order, then deletions, then
/// swaps ordered by `(old, new)`.
pub fn enumerate_single_moves(
    g: &OwnedGraph,
    u: Node,
    cfg: &GameConfig,
) -> Result<Vec<MoveRecord>> {
    let before = agent_cost(g, u, cfg)?.total;
    let candidates = candidate_targets(g, u, cfg)?;
    let mut view = AgentView::new(g, u);
    let owned = g.owned_targets(u).to_vec();
    let current_edge = crate::cost::edge_cost(g, u, &cfg.price);

    let incoming = view.incoming().to_vec();
    let base = view.min_rows(incoming.iter().copied().chain(owned.iter().copied()));
    let mut out = Vec::new();
    for &v in &candidates {
        let dist = view.distance_with_extra(&base, v);
        let edge = current_edge + view.price(v, cfg);
        out.push(MoveRecord {
            agent: u,
            kind: MoveKind::AddEdge(v),
            cost_before: before,
            cost_after: Cost::combine(edge, dist),
        });
    }
    if cfg.variant == Variant::Ncg {
        let without: Vec<Vec<u32>> = owned
            .iter()
            .map(|&t| {
                let rest = incoming
                    .iter()
                    .copied()
                    .chain(owned.iter().copied().filter(|&x| x != t));
                view.min_rows(rest.collect::<Vec<_>>())
            })
            .collect();
        for (i, &t) in owned.iter().enumerate() {
            let edge = current_edge - view.price(t, cfg);
            let dist = if g.n() == 1 {
                Some(0)
            } else {
                view.distance_from_min(&without[i])
            };
            out.push(MoveRecord {
                agent: u,
                kind: MoveKind::DeleteEdge(t),
                cost_before: before,
                cost_after: Cost::combine(edge, dist),
            });
        }
        for (i, &t) in owned.iter().enumerate() {
            for &v in &candidates {
                let edge = current_edge - view.price(t, cfg) + view.price(v, cfg);
                let dist = view.distance_with_extra(&without[i], v);
                out.push(MoveRecord {
                    agent: u,
                    kind: MoveKind::SwapEdge { old: t, new: v },
                    cost_before: before,
                    cost_after: Cost::combine(edge, dist),
                });
            }
        }
    }
    Ok(out)
}

/// The cheapest elementary deviation of `u`, if any move exists.
///
/// Ties keep the earliest move in [`enumerate_single_moves`] order.
pub fn best_single_move(g: &OwnedGraph, u: Node, cfg: &GameConfig) -> Result<Option<MoveRecord>> {
    let moves = enumerate_single_moves(g, u, cfg)?;
    let mut best: Option<MoveRecord> = None;
    for m in moves {
        if best.as_ref().is_none_or(|b| m.cost_after < b.cost_after) {
            best = Some(m);
        }
    }
    Ok(best)
}

/// Replays `kind` on a copy of `g` and recomputes both costs from scratch.
pub fn replay(
    g: &OwnedGraph,
    agent: Node,
    kind: &MoveKind,
    cfg: &GameConfig,
) -> Result<(OwnedGraph, MoveRecord)> {
    check_legal(g, agent, kind, cfg)?;
    let before = agent_cost(g, agent, cfg)?.total;
    let mut next = g.clone();
    kind.apply(&mut next, agent)?;
    let after = agent_cost(&next, agent, cfg)?.total;
    Ok((
        next,
        MoveRecord {
            agent,
            kind: kind.clone(),
            cost_before: before,
            cost_after: after,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::Locality;

    fn path(n: usize) -> OwnedGraph {
        OwnedGraph::from_edges(n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    fn star(n: usize) -> OwnedGraph {
        OwnedGraph::from_edges(n, (1..n).map(|i| (0, i))).unwrap()
    }

    #[test]
    fn candidate_examples() {
        let p5 = path(5);
        assert_eq!(
            candidate_targets(&p5, 0, &GameConfig::local_ncg(2)).unwrap(),
            vec![2]
        );
        assert_eq!(
            candidate_targets(&p5, 0, &GameConfig::ncg()).unwrap(),
            vec![2, 3, 4]
        );
        assert_eq!(
            candidate_targets(&star(5), 1, &GameConfig::local_ncg(2)).unwrap(),
            vec![2, 3, 4]
        );
        assert!(candidate_targets(&p5, 7, &GameConfig::ncg()).is_err());
    }

    #[test]
    fn global_candidates_include_other_components() {
        let g = OwnedGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(
            candidate_targets(&g, 0, &GameConfig::ncg()).unwrap(),
            vec![2, 3]
        );
        assert!(candidate_targets(&g, 0, &GameConfig::local_ncg(3))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn star_center_moves() {
        let moves = enumerate_single_moves(&star(5), 0, &GameConfig::ncg()).unwrap();
        assert_eq!(moves.len(), 4);
        assert!(moves.iter().all(
            |m| matches!(m.kind, MoveKind::DeleteEdge(_)) && m.cost_after == Cost::Unreachable
        ));
    }

    #[test]
    fn p3_aog_single_addition() {
        let moves = enumerate_single_moves(&path(3), 0, &GameConfig::aog()).unwrap();
        assert_eq!(moves.len(), 1);
        assert_eq!(moves[0].kind, MoveKind::AddEdge(2));
    }

    #[test]
    fn single_moves_match_replay() {
        let g = OwnedGraph::from_edges(7, [(0, 1), (1, 2), (3, 2), (3, 4), (4, 5), (5, 0), (6, 3)])
            .unwrap();
        for cfg in [
            GameConfig::ncg(),
            GameConfig::local_ncg(2),
            GameConfig::aog(),
        ] {
            for u in 0..7 {
                for m in enumerate_single_moves(&g, u, &cfg).unwrap() {
                    let (_, r) = replay(&g, u, &m.kind, &cfg).unwrap();
                    assert_eq!(r, m, "{cfg} agent {u}");
                }
            }
        }
    }

    #[test]
    fn classify_diffs() {
        assert_eq!(
            MoveKind::from_strategies(&[1], &[1, 3]),
            MoveKind::AddEdge(3)
        );
        assert_eq!(
            MoveKind::from_strategies(&[1, 3], &[3]),
            MoveKind::DeleteEdge(1)
        );
        assert_eq!(
            MoveKind::from_strategies(&[1], &[4]),
            MoveKind::SwapEdge { old: 1, new: 4 }
        );
        assert_eq!(
            MoveKind::from_strategies(&[1], &[4, 5]),
            MoveKind::ReplaceStrategy(vec![4, 5])
        );
    }

    #[test]
    fn legality() {
        let p4 = path(4);
        let aog = GameConfig::aog();
        assert!(check_legal(&p4, 0, &MoveKind::DeleteEdge(1), &aog).is_err());
        assert!(check_legal(&p4, 0, &MoveKind::AddEdge(1), &aog).is_err());
        assert!(check_legal(&p4, 0, &MoveKind::AddEdge(3), &aog).is_ok());
        let local = GameConfig::new(Variant::Aog, Locality::Radius(2));
        assert!(check_legal(&p4, 0, &MoveKind::AddEdge(3), &local).is_err());
        // node 1 owns an edge to 2; 2 may not buy back towards 1
        assert!(check_legal(&p4, 2, &MoveKind::AddEdge(1), &GameConfig::ncg()).is_err());
        assert!(check_legal(
            &p4,
            1,
            &MoveKind::SwapEdge { old: 2, new: 3 },
            &GameConfig::ncg()
        )
        .is_ok());
    }
}
