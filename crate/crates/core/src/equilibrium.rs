use serde::Serialize;

use crate::best_response::best_response_exact;
use crate::cost::{GameConfig, Variant};
use crate::error::Result;
use crate::graph::{Node, OwnedGraph};
use crate::moves::{best_single_move, MoveKind, MoveRecord};
use crate::par::{self, Execution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CheckLevel {
    /// No strategy at all strictly improves any agent.
    Exact,
    /// No elementary move (add, delete, swap) strictly improves any agent.
    /// A necessary condition for equilibrium only.
    SingleMove,
}

impl CheckLevel {
    pub fn note(self) -> &'static str {
        match self {
            CheckLevel::Exact => "exact: every strategy of every agent was considered",
            CheckLevel::SingleMove => {
                "single-move: only additions, deletions and swaps were considered; \
                 this is a necessary condition for equilibrium, not a sufficient one"
            }
        }
    }
}

/// Notes on rule choices that apply to every verification under `cfg`.
pub fn rule_notes(cfg: &GameConfig) -> Vec<&'static str> {
    let mut notes = vec!["locality is measured in the network before the deviation"];
    if cfg.variant == Variant::Ncg && cfg.locality != crate::cost::Locality::Global {
        notes.push("locality restricts only new targets; any owned edge may be deleted");
    }
    notes
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquilibriumReport {
    pub is_equilibrium: bool,
    /// A strictly improving deviation when `is_equilibrium` is false.
    pub witness: Option<MoveRecord>,
    pub check_level: CheckLevel,
}

/// A strictly improving deviation of agent `u`, if one exists at `level`.
///
/// At [`CheckLevel::Exact`] an improving elementary move is reported when
/// one exists (no cap applies then); otherwise the exact best response is
/// computed, which fails with `CapExceeded` on large candidate universes.
pub fn improving_deviation(
    g: &OwnedGraph,
    u: Node,
    cfg: &GameConfig,
    level: CheckLevel,
) -> Result<Option<MoveRecord>> {
    if let Some(m) = best_single_move(g, u, cfg)? {
        if m.is_improving() {
            return Ok(Some(m));
        }
    }
    if level == CheckLevel::SingleMove {
        return Ok(None);
    }
    let br = best_response_exact(g, u, cfg)?;
    if !br.improves() {
        return Ok(None);
    }
    Ok(Some(MoveRecord {
        agent: u,
        kind: MoveKind::from_strategies(g.owned_targets(u), &br.targets),
        cost_before: br.current_cost,
        cost_after: br.cost,
    }))
}

pub fn verify_equilibrium(
    g: &OwnedGraph,
    cfg: &GameConfig,
    level: CheckLevel,
) -> Result<EquilibriumReport> {
    verify_equilibrium_with(g, cfg, level, Execution::default())
}

/// [`verify_equilibrium`] with explicit execution mode. The witness is
/// always the one of the lowest-indexed deviating agent.
pub fn verify_equilibrium_with(
    g: &OwnedGraph,
    cfg: &GameConfig,
    level: CheckLevel,
    exec: Execution,
) -> Result<EquilibriumReport> {
    cfg.validate()?;
    let found = par::find_map_first(exec, g.n(), |u| {
        match improving_deviation(g, u, cfg, level) {
            Ok(None) => None,
            Ok(Some(m)) => Some(Ok(m)),
            Err(e) => Some(Err(e)),
        }
    });
    let witness = found.transpose()?;
    Ok(EquilibriumReport {
        is_equilibrium: witness.is_none(),
        witness,
        check_level: level,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::replay;

    fn star(n: usize) -> OwnedGraph {
        OwnedGraph::from_edges(n, (1..n).map(|i| (0, i))).unwrap()
    }

    fn path(n: usize) -> OwnedGraph {
        OwnedGraph::from_edges(n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    #[test]
    fn stars_are_equilibria() {
        for n in 3..=8 {
            for cfg in [
                GameConfig::ncg(),
                GameConfig::aog(),
                GameConfig::local_ncg(2),
                GameConfig::local_aog(2),
            ] {
                let r = verify_equilibrium(&star(n), &cfg, CheckLevel::Exact).unwrap();
                assert!(r.is_equilibrium, "S_{n} under {cfg}");
            }
        }
    }

    #[test]
    fn p4_is_not_an_equilibrium() {
        let g = path(4);
        let cfg = GameConfig::ncg();
        let r = verify_equilibrium(&g, &cfg, CheckLevel::Exact).unwrap();
        assert!(!r.is_equilibrium);
        let w = r.witness.unwrap();
        assert!(matches!(w.kind, MoveKind::AddEdge(_)));
        let (_, replayed) = replay(&g, w.agent, &w.kind, &cfg).unwrap();
        assert_eq!(replayed, w);
        assert!(replayed.is_improving());
    }

    #[test]
    fn witnesses_replay() {
        let graphs = [
            path(6),
            OwnedGraph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap(),
            OwnedGraph::from_edges(6, [(1, 0), (2, 0), (3, 0), (4, 3), (5, 4)]).unwrap(),
        ];
        for g in &graphs {
            for cfg in [
                GameConfig::ncg(),
                GameConfig::local_aog(2),
                GameConfig::aog(),
            ] {
                let r = verify_equilibrium(g, &cfg, CheckLevel::Exact).unwrap();
                if let Some(w) = r.witness {
                    let (_, replayed) = replay(g, w.agent, &w.kind, &cfg).unwrap();
                    assert_eq!(replayed, w);
                    assert!(w.is_improving());
                }
            }
        }
    }

    #[test]
    fn execution_modes_agree() {
        let g = path(7);
        let cfg = GameConfig::local_ncg(2);
        let a =
            verify_equilibrium_with(&g, &cfg, CheckLevel::Exact, Execution::Sequential).unwrap();
        let b = verify_equilibrium_with(&g, &cfg, CheckLevel::Exact, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
