//! Instance builders: stars, paths, cliques, the shipped example networks and
//! the set-cover reductions.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ball, Node, OwnedGraph};
use crate::io::parse_graph;

/// Node 0 owns an edge to every other node.
pub fn build_star(n: usize) -> Result<OwnedGraph> {
    if n < 2 {
        return Err(Error::UnsupportedSize {
            n,
            reason: "a star needs at least 2 nodes",
        });
    }
    OwnedGraph::from_edges(n, (1..n).map(|i| (0, i)))
}

/// Path 0 - 1 - ... - (n-1); node i owns the edge to i + 1.
pub fn build_path(n: usize) -> Result<OwnedGraph> {
    if n < 2 {
        return Err(Error::UnsupportedSize {
            n,
            reason: "a path needs at least 2 nodes",
        });
    }
    OwnedGraph::from_edges(n, (0..n - 1).map(|i| (i, i + 1)))
}

/// Complete graph; the lower endpoint owns each edge.
pub fn build_clique(n: usize) -> OwnedGraph {
    let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
    OwnedGraph::from_edges(n, edges).expect("clique edges are distinct")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Figure {
    /// Center-sponsored star on 7 nodes.
    Fig2a,
    /// Equilibrium of diameter 3 (degNCG and degAOG).
    Fig2b,
    /// 2-local equilibrium of diameter 4 (deg2NCG).
    Fig2c,
    /// 2-local equilibrium of diameter 5 (deg2AOG).
    Fig2d,
    /// Networks G1..G6 of the improving-response cycle.
    Fig3G1,
    Fig3G2,
    Fig3G3,
    Fig3G4,
    Fig3G5,
    Fig3G6,
}

impl Figure {
    pub const ALL: [Figure; 10] = [
        Figure::Fig2a,
        Figure::Fig2b,
        Figure::Fig2c,
        Figure::Fig2d,
        Figure::Fig3G1,
        Figure::Fig3G2,
        Figure::Fig3G3,
        Figure::Fig3G4,
        Figure::Fig3G5,
        Figure::Fig3G6,
    ];

    pub const CYCLE: [Figure; 6] = [
        Figure::Fig3G1,
        Figure::Fig3G2,
        Figure::Fig3G3,
        Figure::Fig3G4,
        Figure::Fig3G5,
        Figure::Fig3G6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2a => "fig2a",
            Figure::Fig2b => "fig2b",
            Figure::Fig2c => "fig2c",
            Figure::Fig2d => "fig2d",
            Figure::Fig3G1 => "fig3-g1",
            Figure::Fig3G2 => "fig3-g2",
            Figure::Fig3G3 => "fig3-g3",
            Figure::Fig3G4 => "fig3-g4",
            Figure::Fig3G5 => "fig3-g5",
            Figure::Fig3G6 => "fig3-g6",
        }
    }

    fn source(self) -> &'static str {
        match self {
            Figure::Fig2a => include_str!("../data/fig2a.txt"),
            Figure::Fig2b => include_str!("../data/fig2b.txt"),
            Figure::Fig2c => include_str!("../data/fig2c.txt"),
            Figure::Fig2d => include_str!("../data/fig2d.txt"),
            Figure::Fig3G1 => include_str!("../data/fig3_g1.txt"),
            Figure::Fig3G2 => include_str!("../data/fig3_g2.txt"),
            Figure::Fig3G3 => include_str!("../data/fig3_g3.txt"),
            Figure::Fig3G4 => include_str!("../data/fig3_g4.txt"),
            Figure::Fig3G5 => include_str!("../data/fig3_g5.txt"),
            Figure::Fig3G6 => include_str!("../data/fig3_g6.txt"),
        }
    }
}

impl std::str::FromStr for Figure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == key)
            .ok_or_else(|| format!("unknown figure `{s}`"))
    }
}

pub fn build_figure_network(which: Figure) -> OwnedGraph {
    parse_graph(which.source()).expect("shipped figure data parses")
}

/// Node id of a lettered node (`a` = 0, ..., `j` = 9) in the cycle networks.
pub fn cycle_node(letter: char) -> Node {
    assert!(
        letter.is_ascii_lowercase() && letter <= 'j',
        "no node `{letter}`"
    );
    letter as usize - 'a' as usize
}

/// The improving-response cycle G1 -> G2 -> ... -> G6 -> G1 as
/// `(agent, dropped target, new target)` swaps.
pub fn cycle_swaps() -> [(Node, Node, Node); 6] {
    let n = cycle_node;
    [
        (n('e'), n('h'), n('i')),
        (n('b'), n('i'), n('h')),
        (n('j'), n('i'), n('h')),
        (n('e'), n('i'), n('h')),
        (n('b'), n('h'), n('i')),
        (n('j'), n('h'), n('i')),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetCoverInstance {
    pub universe_size: usize,
    /// Every set sorted, of size `q`.
    pub sets: Vec<Vec<usize>>,
    pub q: usize,
}

impl SetCoverInstance {
    /// Checks that every set has exactly `q` distinct elements of the universe.
    pub fn new(universe_size: usize, q: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let mut clean = Vec::with_capacity(sets.len());
        for (j, mut set) in sets.into_iter().enumerate() {
            set.sort_unstable();
            set.dedup();
            if set.len() != q {
                return Err(Error::MalformedInstance(format!(
                    "set {j} has {} distinct elements, expected {q}",
                    set.len()
                )));
            }
            if let Some(&e) = set.iter().find(|&&e| e >= universe_size) {
                return Err(Error::MalformedInstance(format!(
                    "set {j} contains {e}, outside the universe of size {universe_size}"
                )));
            }
            clean.push(set);
        }
        Ok(SetCoverInstance {
            universe_size,
            sets: clean,
            q,
        })
    }

    pub fn is_cover(&self, chosen: &[usize]) -> bool {
        let mut covered = vec![false; self.universe_size];
        for &j in chosen {
            for &e in &self.sets[j] {
                covered[e] = true;
            }
        }
        covered.into_iter().all(|c| c)
    }

    /// Elements that no set contains.
    pub fn uncovered_elements(&self) -> Vec<usize> {
        let mut covered = vec![false; self.universe_size];
        for &e in self.sets.iter().flatten() {
            covered[e] = true;
        }
        (0..self.universe_size).filter(|&e| !covered[e]).collect()
    }
}

/// One set per vertex: its closed neighborhood. Requires a `q`-regular graph.
pub fn dominating_set_to_set_cover(g: &OwnedGraph, q: usize) -> Result<SetCoverInstance> {
    if (0..g.n()).any(|v| g.neighbors(v).len() != q) {
        return Err(Error::NotRegular);
    }
    let sets = (0..g.n())
        .map(|v| {
            let mut s = g.neighbors(v).to_vec();
            s.push(v);
            s
        })
        .collect();
    SetCoverInstance::new(g.n(), q + 1, sets)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "role", rename_all = "lowercase")]
pub enum Role {
    U,
    X,
    /// Node of set `index`.
    A {
        index: usize,
    },
    /// Node of element `index`.
    V {
        index: usize,
    },
    /// Pendant `r` (1-based) of element `index`.
    P {
        index: usize,
        r: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GadgetLayout {
    #[serde(skip)]
    pub graph: OwnedGraph,
    /// Role of every node, by node id.
    pub role_map: Vec<Role>,
    /// Node id of every role.
    #[serde(skip)]
    pub index_map: BTreeMap<Role, Node>,
    pub q: usize,
    pub ownership: &'static str,
}

impl GadgetLayout {
    pub fn u(&self) -> Node {
        self.index_map[&Role::U]
    }

    pub fn x(&self) -> Node {
        self.index_map[&Role::X]
    }

    /// Set indices of the set nodes among `targets`, in order.
    pub fn chosen_sets(&self, targets: &[Node]) -> Vec<usize> {
        targets
            .iter()
            .filter_map(|&t| match self.role_map.get(t) {
                Some(Role::A { index }) => Some(*index),
                _ => None,
            })
            .collect()
    }

    /// Checks the degree pattern around `u`: degree `q + 1` at distance 2,
    /// at least `q + 2` at distance 3.
    pub fn check_degrees(&self) -> Result<()> {
        let g = &self.graph;
        let u = self.u();
        let x = self.x();
        let bad = |v: Node, want: &str| {
            Err(Error::MalformedInstance(format!(
                "gadget node {v} ({:?}) has degree {}, expected {want}",
                self.role_map[v],
                g.neighbors(v).len()
            )))
        };
        for v in ball(g, u, 2)? {
            if g.neighbors(v).len() != self.q + 1 {
                return bad(v, &format!("{}", self.q + 1));
            }
        }
        for v in ball(g, u, 3)? {
            if g.neighbors(v).len() < self.q + 2 {
                return bad(v, &format!(">= {}", self.q + 2));
            }
        }
        if g.owner(u, x) != Some(x) {
            return Err(Error::MalformedInstance(
                "edge {u,x} must be owned by x".into(),
            ));
        }
        Ok(())
    }
}

/// Builds the network in which agent `u` best-responds by buying a minimum
/// set cover: `u - x`, `x - a_j` for every set, `a_j - v_i` for `i` in set
/// `j`, and `q + 1` pendants `p_i^r` per element node.
///
/// Node ids: `u` = 0, `x` = 1, then the set nodes, the element nodes and the
/// pendants. `{u, x}` is owned by `x`; every other edge by its smaller id.
pub fn set_cover_to_best_response_gadget(inst: &SetCoverInstance) -> Result<GadgetLayout> {
    let SetCoverInstance {
        universe_size: n,
        sets,
        q,
    } = inst;
    let (n, q, l) = (*n, *q, sets.len());
    if q < 4 {
        return Err(Error::MalformedInstance(format!("set size {q} is below 4")));
    }
    let checked = SetCoverInstance::new(n, q, sets.clone())?;
    if let Some(&e) = checked.uncovered_elements().first() {
        return Err(Error::MalformedInstance(format!(
            "element {e} lies in no set"
        )));
    }

    let mut role_map = vec![Role::U, Role::X];
    role_map.extend((0..l).map(|index| Role::A { index }));
    role_map.extend((0..n).map(|index| Role::V { index }));
    for index in 0..n {
        role_map.extend((1..=q + 1).map(|r| Role::P { index, r }));
    }
    let index_map: BTreeMap<Role, Node> =
        role_map.iter().enumerate().map(|(v, &r)| (r, v)).collect();
    let a = |j: usize| 2 + j;
    let v = |i: usize| 2 + l + i;

    let mut g = OwnedGraph::new(role_map.len());
    let mut link = |s: Node, t: Node| g.add_edge(s.min(t), s.max(t));
    for j in 0..l {
        link(1, a(j))?;
        for &i in &checked.sets[j] {
            link(a(j), v(i))?;
        }
    }
    for i in 0..n {
        for r in 1..=q + 1 {
            link(v(i), index_map[&Role::P { index: i, r }])?;
        }
    }
    g.add_edge(1, 0)?;

    let layout = GadgetLayout {
        graph: g,
        role_map,
        index_map,
        q,
        ownership: "{u,x} owned by x; every other edge owned by its smaller node id",
    };
    layout.check_degrees()?;
    Ok(layout)
}
