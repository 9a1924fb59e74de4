//! Exact best responses by exhaustive subset search.
//!
//! Computing a best response is NP-hard already in the 2-local games, so the
//! search is capped at [`GameConfig::universe_cap`] free targets.

use serde::Serialize;

use crate::cost::{Cost, GameConfig, Rational, Variant};
use crate::error::{Error, Result};
use crate::graph::{Node, OwnedGraph, UNREACHABLE};
use crate::moves::{candidate_targets, AgentView};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BestResponse {
    pub agent: Node,
    /// Sorted target set of the chosen strategy.
    pub targets: Vec<Node>,
    pub cost: Cost,
    pub current_cost: Cost,
}

impl BestResponse {
    pub fn improves(&self) -> bool {
        self.cost < self.current_cost
    }
}

/// Free targets of `u` (subsets of which are enumerated) and fixed ones.
pub(crate) fn strategy_universe(
    g: &OwnedGraph,
    u: Node,
    cfg: &GameConfig,
) -> Result<(Vec<Node>, Vec<Node>)> {
    let candidates = candidate_targets(g, u, cfg)?;
    let owned = g.owned_targets(u).to_vec();
    Ok(match cfg.variant {
        Variant::Ncg => {
            let mut free: Vec<Node> = candidates.into_iter().chain(owned).collect();
            free.sort_unstable();
            (free, Vec::new())
        }
        Variant::Aog => (candidates, owned),
    })
}

/// A cost-minimising strategy of `u` with all other strategies fixed.
///
/// NCG strategies range over subsets of current targets and candidate
/// targets; AOG strategies over supersets of the current strategy. Ties go to
/// the fewest edges, then to the lexicographically smallest target set.
pub fn best_response_exact(g: &OwnedGraph, u: Node, cfg: &GameConfig) -> Result<BestResponse> {
    g.check_node(u)?;
    let (free, fixed) = strategy_universe(g, u, cfg)?;
    if free.len() > cfg.universe_cap {
        return Err(Error::CapExceeded {
            agent: u,
            size: free.len(),
            cap: cfg.universe_cap,
        });
    }
    let mut view = AgentView::new(g, u);
    let current_cost = view.strategy_cost(g.owned_targets(u), cfg);

    let fixed_price: Rational = fixed.iter().map(|&t| view.price(t, cfg)).sum();
    let prices: Vec<Rational> = free.iter().map(|&t| view.price(t, cfg)).collect();
    let rows: Vec<Vec<u32>> = free.iter().map(|&t| view.row(t).to_vec()).collect();
    let base = view.min_rows(
        view.incoming()
            .to_vec()
            .into_iter()
            .chain(fixed.iter().copied()),
    );

    let mut search = Search {
        n: g.n(),
        u,
        free: &free,
        prices: &prices,
        rows: &rows,
        chosen: Vec::new(),
        best: None,
    };
    search.visit(0, &base, fixed_price);
    let (cost, chosen) = search
        .best
        .expect("the empty extension is always evaluated");
    let mut targets: Vec<Node> = fixed.iter().copied().chain(chosen).collect();
    targets.sort_unstable();
    Ok(BestResponse {
        agent: u,
        targets,
        cost,
        current_cost,
    })
}

struct Search<'a> {
    n: usize,
    u: Node,
    free: &'a [Node],
    prices: &'a [Rational],
    rows: &'a [Vec<u32>],
    chosen: Vec<Node>,
    best: Option<(Cost, Vec<Node>)>,
}

impl Search<'_> {
    fn evaluate(&self, m: &[u32], edge: Rational) -> Cost {
        if self.n == 1 {
            return Cost::Finite(edge);
        }
        let mut total = 0u64;
        for (w, &d) in m.iter().enumerate() {
            if w == self.u {
                continue;
            }
            if d == UNREACHABLE {
                return Cost::Unreachable;
            }
            total += u64::from(d) + 1;
        }
        Cost::combine(edge, Some(total))
    }

    fn better(&self, cost: Cost) -> bool {
        let Some((best_cost, best_set)) = &self.best else {
            return true;
        };
        match cost.cmp(best_cost) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            // fixed targets are shared, so comparing the chosen parts suffices
            std::cmp::Ordering::Equal => {
                (self.chosen.len(), &self.chosen) < (best_set.len(), best_set)
            }
        }
    }

    /// Visits the subset `chosen` and all its extensions by free indices >= `from`.
    fn visit(&mut self, from: usize, m: &[u32], edge: Rational) {
        let cost = self.evaluate(m, edge);
        if self.better(cost) {
            self.best = Some((cost, self.chosen.clone()));
        }
        let mut next = vec![0u32; self.n];
        for i in from..self.free.len() {
            for ((out, &a), &b) in next.iter_mut().zip(m).zip(&self.rows[i]) {
                *out = a.min(b);
            }
            self.chosen.push(self.free[i]);
            self.visit(i + 1, &next, edge + self.prices[i]);
            self.chosen.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::agent_cost;

    fn star(n: usize) -> OwnedGraph {
        OwnedGraph::from_edges(n, (1..n).map(|i| (0, i))).unwrap()
    }

    /// Independent brute force: rebuild the graph for every strategy.
    fn brute_force(g: &OwnedGraph, u: Node, cfg: &GameConfig) -> (Cost, Vec<Node>) {
        let (free, fixed) = strategy_universe(g, u, cfg).unwrap();
        let mut best: Option<(Cost, usize, Vec<Node>)> = None;
        for mask in 0u32..(1 << free.len()) {
            let mut s: Vec<Node> = fixed.clone();
            s.extend(
                (0..free.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| free[i]),
            );
            s.sort_unstable();
            let mut h = g.clone();
            h.set_strategy(u, &s).unwrap();
            let c = agent_cost(&h, u, cfg).unwrap().total;
            let key = (c, s.len(), s.clone());
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
        let b = best.unwrap();
        (b.0, b.2)
    }

    #[test]
    fn star_leaf_keeps_strategy() {
        for cfg in [
            GameConfig::ncg(),
            GameConfig::aog(),
            GameConfig::local_ncg(2),
        ] {
            let br = best_response_exact(&star(5), 2, &cfg).unwrap();
            assert!(br.targets.is_empty());
            assert_eq!(br.cost, br.current_cost);
        }
    }

    #[test]
    fn isolated_agent_connects() {
        let g = OwnedGraph::from_edges(5, [(1, 2), (2, 3), (3, 4)]).unwrap();
        let br = best_response_exact(&g, 0, &GameConfig::ncg()).unwrap();
        assert!(br.cost.is_finite());
        assert_eq!(br.current_cost, Cost::Unreachable);
    }

    #[test]
    fn matches_brute_force() {
        let g = OwnedGraph::from_edges(
            8,
            [
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 5),
                (5, 6),
                (6, 7),
                (2, 6),
                (7, 1),
            ],
        )
        .unwrap();
        for cfg in [
            GameConfig::ncg(),
            GameConfig::aog(),
            GameConfig::local_ncg(2),
            GameConfig::local_aog(2),
        ] {
            for u in 0..8 {
                let br = best_response_exact(&g, u, &cfg).unwrap();
                let (c, s) = brute_force(&g, u, &cfg);
                assert_eq!((br.cost, br.targets.clone()), (c, s), "{cfg} agent {u}");
                assert!(br.cost <= br.current_cost);
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let g = OwnedGraph::new(30);
        let err = best_response_exact(&g, 0, &GameConfig::ncg()).unwrap_err();
        assert_eq!(
            err,
            Error::CapExceeded {
                agent: 0,
                size: 29,
                cap: 20
            }
        );
    }
}
