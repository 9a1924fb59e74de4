//! Brute-force ground truth for small instances.
//!
//! States on `n` nodes are numbered in base 3 over the pairs `(i, j)`, `i < j`,
//! in lexicographic order, the first pair being the least significant digit:
//! 0 = no edge, 1 = `i` owns the edge, 2 = `j` owns it.

use std::collections::{BTreeMap, HashSet, VecDeque};

use serde::{Serialize, Serializer};

use crate::constructions::SetCoverInstance;
use crate::cost::{
    ser_rational, social_cost, Cost, GameConfig, Locality, Price, Rational, Variant,
};
use crate::equilibrium::{verify_equilibrium_with, CheckLevel};
use crate::error::{Error, Result};
use crate::graph::{Node, OwnedGraph};
use crate::moves::candidate_targets;
use crate::par::{self, Execution};

pub const MAX_ENUMERATION_NODES: usize = 6;

fn check_enumerable(n: usize) -> Result<()> {
    if n > MAX_ENUMERATION_NODES {
        return Err(Error::UnsupportedSize {
            n,
            reason: "exhaustive enumeration supports at most 6 nodes",
        });
    }
    Ok(())
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

pub fn state_count(n: usize) -> u64 {
    3u64.pow((n * n.saturating_sub(1) / 2) as u32)
}

/// The network with index `idx` on `n` nodes.
pub fn decode_state(n: usize, idx: u64) -> OwnedGraph {
    Small::decode(n, &pairs(n), idx).to_graph()
}

/// Every ownership-labeled simple network on `n <= 6` nodes, by index.
pub fn enumerate_states(n: usize) -> Result<impl Iterator<Item = OwnedGraph>> {
    check_enumerable(n)?;
    let ps = pairs(n);
    Ok((0..state_count(n)).map(move |i| Small::decode(n, &ps, i).to_graph()))
}

/// Bitmask network on at most 8 nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Small {
    n: usize,
    adj: [u8; 8],
    owned: [u8; 8],
}

fn bits(mut m: u8) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            b
        })
    })
}

impl Small {
    fn decode(n: usize, pairs: &[(usize, usize)], mut idx: u64) -> Self {
        let mut s = Small {
            n,
            adj: [0; 8],
            owned: [0; 8],
        };
        for &(i, j) in pairs {
            match idx % 3 {
                1 => s.add(i, j),
                2 => s.add(j, i),
                _ => {}
            }
            idx /= 3;
        }
        s
    }

    fn from_graph(g: &OwnedGraph) -> Self {
        assert!(g.n() <= 8);
        let mut s = Small {
            n: g.n(),
            adj: [0; 8],
            owned: [0; 8],
        };
        for (o, t) in g.owned_edges() {
            s.add(o, t);
        }
        s
    }

    fn add(&mut self, o: usize, t: usize) {
        self.owned[o] |= 1 << t;
        self.adj[o] |= 1 << t;
        self.adj[t] |= 1 << o;
    }

    fn to_graph(self) -> OwnedGraph {
        let edges = (0..self.n).flat_map(|o| bits(self.owned[o]).map(move |t| (o, t)));
        OwnedGraph::from_edges(self.n, edges).expect("valid small network")
    }

    fn all(&self) -> u8 {
        ((1u16 << self.n) - 1) as u8
    }

    fn deg(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    /// Level sets of a BFS from `u`: `layers[d]` holds the nodes at distance `d`.
    fn layers(&self, u: usize) -> Vec<u8> {
        let mut seen = 1u8 << u;
        let mut frontier = seen;
        let mut layers = vec![frontier];
        loop {
            let next = bits(frontier).fold(0u8, |acc, v| acc | self.adj[v]) & !seen;
            if next == 0 {
                return layers;
            }
            seen |= next;
            frontier = next;
            layers.push(next);
        }
    }

    fn distance_sum(&self, u: usize) -> Option<u64> {
        let layers = self.layers(u);
        let reached = layers.iter().fold(0u8, |a, &l| a | l);
        if reached != self.all() {
            return None;
        }
        Some(
            layers
                .iter()
                .enumerate()
                .map(|(d, l)| d as u64 * u64::from(l.count_ones()))
                .sum(),
        )
    }

    fn eccentricity(&self, u: usize) -> u32 {
        (self.layers(u).len() - 1) as u32
    }

    fn is_connected(&self) -> bool {
        self.n <= 1 || self.layers(0).iter().fold(0u8, |a, &l| a | l) == self.all()
    }

    fn diameter(&self) -> u32 {
        (0..self.n).map(|u| self.eccentricity(u)).max().unwrap_or(0)
    }

    fn agent_cost(&self, u: usize, price: &Price) -> Cost {
        let deg_sum: usize = bits(self.owned[u]).map(|t| self.deg(t)).sum();
        let edge = price.total(deg_sum, self.owned[u].count_ones() as usize);
        Cost::combine(edge, self.distance_sum(u))
    }

    /// Social cost split into (owned-target degree sum, edge count, distance sum).
    fn social_parts(&self) -> Option<(usize, usize, u64)> {
        let mut deg_sum = 0;
        let mut edges = 0;
        let mut dist = 0;
        for u in 0..self.n {
            deg_sum += bits(self.owned[u]).map(|t| self.deg(t)).sum::<usize>();
            edges += self.owned[u].count_ones() as usize;
            dist += self.distance_sum(u)?;
        }
        Some((deg_sum, edges, dist))
    }

    fn social_cost(&self, price: &Price) -> Option<Rational> {
        self.social_parts()
            .map(|(d, m, dist)| price.total(d, m) + Rational::from_integer(dist as i64))
    }

    /// Same network with `u`'s strategy replaced by `targets`.
    fn with_strategy(&self, u: usize, targets: u8) -> Self {
        let mut s = *self;
        for t in bits(self.owned[u]) {
            s.adj[u] &= !(1 << t);
            s.adj[t] &= !(1 << u);
        }
        s.owned[u] = 0;
        for t in bits(targets) {
            s.add(u, t);
        }
        s
    }

    fn candidates(&self, u: usize, locality: Locality) -> u8 {
        let layers = self.layers(u);
        let non_nbrs = self.all() & !self.adj[u] & !(1 << u);
        match locality {
            Locality::Global => non_nbrs,
            Locality::Radius(k) => {
                layers.iter().take(k as usize + 1).fold(0, |a, &l| a | l) & non_nbrs
            }
        }
    }

    /// Whether some add, delete or swap strictly improves `u`.
    fn has_improving_single_move(&self, u: usize, cfg: &GameConfig) -> bool {
        let before = self.agent_cost(u, &cfg.price);
        let improves =
            |targets: u8| self.with_strategy(u, targets).agent_cost(u, &cfg.price) < before;
        let own = self.owned[u];
        let cand = self.candidates(u, cfg.locality);
        if bits(cand).any(|v| improves(own | 1 << v)) {
            return true;
        }
        if cfg.variant == Variant::Aog {
            return false;
        }
        bits(own).any(|t| {
            improves(own & !(1 << t)) || bits(cand).any(|v| improves(own & !(1 << t) | 1 << v))
        })
    }

    /// Whether any strategy at all strictly improves `u` (exhaustive).
    fn has_improving_strategy(&self, u: usize, cfg: &GameConfig) -> bool {
        let before = self.agent_cost(u, &cfg.price);
        let own = self.owned[u];
        let cand = self.candidates(u, cfg.locality);
        let (free, fixed) = match cfg.variant {
            Variant::Ncg => (cand | own, 0),
            Variant::Aog => (cand, own),
        };
        // iterate the submasks of `free`
        let mut sub = free;
        loop {
            let targets = sub | fixed;
            if targets != own && self.with_strategy(u, targets).agent_cost(u, &cfg.price) < before {
                return true;
            }
            if sub == 0 {
                return false;
            }
            sub = (sub - 1) & free;
        }
    }
}

/// Equilibrium test by exhaustive replay of every strategy of every agent.
///
/// Shares no code with [`crate::equilibrium`]; used to cross-check it.
pub fn is_equilibrium_by_replay(g: &OwnedGraph, cfg: &GameConfig) -> Result<bool> {
    if g.n() > 8 {
        return Err(Error::UnsupportedSize {
            n: g.n(),
            reason: "replay checking supports at most 8 nodes",
        });
    }
    let s = Small::from_graph(g);
    Ok((0..s.n).all(|u| !s.has_improving_strategy(u, cfg)))
}

fn ser_opt_rational<S: Serializer>(
    r: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => ser_rational(r, s),
        None => s.serialize_none(),
    }
}

/// Owned edges of a witness network, for reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness(pub OwnedGraph);

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let edges: Vec<(Node, Node)> = self.0.owned_edges().collect();
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("n", &self.0.n())?;
        m.serialize_entry("owned_edges", &edges)?;
        m.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnumerationSummary {
    pub n: usize,
    pub game: String,
    pub config: GameConfig,
    pub check_level: CheckLevel,
    pub states: u64,
    pub connected: u64,
    /// Connected states rejected by the single-move filter.
    pub single_move_rejected: u64,
    /// States that reached the exact check.
    pub exact_checked: u64,
    pub equilibrium_count: u64,
    #[serde(serialize_with = "ser_opt_rational")]
    pub opt_cost: Option<Rational>,
    #[serde(serialize_with = "ser_opt_rational")]
    pub best_eq_cost: Option<Rational>,
    #[serde(serialize_with = "ser_opt_rational")]
    pub worst_eq_cost: Option<Rational>,
    #[serde(serialize_with = "ser_opt_rational")]
    pub poa: Option<Rational>,
    #[serde(serialize_with = "ser_opt_rational")]
    pub pos: Option<Rational>,
    pub opt_witness: Option<Witness>,
    pub best_eq_witness: Option<Witness>,
    pub worst_eq_witness: Option<Witness>,
    /// Number of equilibria per diameter.
    pub diameter_histogram: BTreeMap<u32, u64>,
    /// State indices of all equilibria, ascending.
    #[serde(skip)]
    pub equilibria: Vec<u64>,
}

impl EnumerationSummary {
    pub fn max_eq_diameter(&self) -> Option<u32> {
        self.diameter_histogram.keys().next_back().copied()
    }
}

#[derive(Default)]
struct Partial {
    connected: u64,
    rejected: u64,
    checked: u64,
    opt: Option<(Rational, u64)>,
    best: Option<(Rational, u64)>,
    worst: Option<(Rational, u64)>,
    hist: BTreeMap<u32, u64>,
    equilibria: Vec<u64>,
}

/// Keeps the earlier entry on ties; `a` always precedes `b` in index order.
fn pick(
    a: Option<(Rational, u64)>,
    b: Option<(Rational, u64)>,
    want_max: bool,
) -> Option<(Rational, u64)> {
    match (a, b) {
        (Some(x), Some(y)) => {
            let take_y = if want_max { y.0 > x.0 } else { y.0 < x.0 };
            Some(if take_y { y } else { x })
        }
        (x, None) => x,
        (None, y) => y,
    }
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.connected += other.connected;
        self.rejected += other.rejected;
        self.checked += other.checked;
        self.opt = pick(self.opt, other.opt, false);
        self.best = pick(self.best, other.best, false);
        self.worst = pick(self.worst, other.worst, true);
        for (d, c) in other.hist {
            *self.hist.entry(d).or_default() += c;
        }
        self.equilibria.extend(other.equilibria);
        self
    }
}

const CHUNK: u64 = 1 << 14;

/// Equilibrium census over all networks on `n <= 6` nodes.
///
/// Every connected state first goes through a cheap single-move filter; the
/// survivors are verified exactly with [`crate::verify_equilibrium`].
pub fn equilibrium_census(
    n: usize,
    cfg: &GameConfig,
    exec: Execution,
) -> Result<EnumerationSummary> {
    check_enumerable(n)?;
    cfg.validate()?;
    let ps = pairs(n);
    let total = state_count(n);
    let fold = |range: std::ops::Range<u64>| -> Result<Partial> {
        let mut p = Partial::default();
        for idx in range {
            let s = Small::decode(n, &ps, idx);
            if !s.is_connected() {
                continue;
            }
            p.connected += 1;
            let cost = s.social_cost(&cfg.price).expect("connected");
            p.opt = pick(p.opt, Some((cost, idx)), false);
            if (0..n).any(|u| s.has_improving_single_move(u, cfg)) {
                p.rejected += 1;
                continue;
            }
            p.checked += 1;
            let report = verify_equilibrium_with(
                &s.to_graph(),
                cfg,
                CheckLevel::Exact,
                Execution::Sequential,
            )?;
            if report.is_equilibrium {
                p.best = pick(p.best, Some((cost, idx)), false);
                p.worst = pick(p.worst, Some((cost, idx)), true);
                *p.hist.entry(s.diameter()).or_default() += 1;
                p.equilibria.push(idx);
            }
        }
        Ok(p)
    };
    let merged = par::fold_chunks(exec, total, CHUNK, fold, |a, b| Ok(a?.merge(b?)))
        .transpose()?
        .unwrap_or_default();

    let witness = |e: Option<(Rational, u64)>| e.map(|(_, i)| Witness(decode_state(n, i)));
    let ratio = |e: Option<(Rational, u64)>| match (e, merged.opt) {
        (Some((c, _)), Some((o, _))) if o > Rational::from_integer(0) => Some(c / o),
        _ => None,
    };
    Ok(EnumerationSummary {
        n,
        game: cfg.to_string(),
        config: *cfg,
        check_level: CheckLevel::Exact,
        states: total,
        connected: merged.connected,
        single_move_rejected: merged.rejected,
        exact_checked: merged.checked,
        equilibrium_count: merged.equilibria.len() as u64,
        opt_cost: merged.opt.map(|e| e.0),
        best_eq_cost: merged.best.map(|e| e.0),
        worst_eq_cost: merged.worst.map(|e| e.0),
        poa: ratio(merged.worst),
        pos: ratio(merged.best),
        opt_witness: witness(merged.opt),
        best_eq_witness: witness(merged.best),
        worst_eq_witness: witness(merged.worst),
        diameter_histogram: merged.hist,
        equilibria: merged.equilibria,
    })
}

/// Minimum social cost over all connected networks on `n <= 6` nodes, with
/// the lowest-indexed minimiser.
pub fn optimal_social_cost(
    n: usize,
    cfg: &GameConfig,
    exec: Execution,
) -> Result<(Rational, OwnedGraph)> {
    check_enumerable(n)?;
    if n < 2 {
        return Err(Error::UnsupportedSize {
            n,
            reason: "optimal social cost needs at least 2 nodes",
        });
    }
    let ps = pairs(n);
    let fold = |range: std::ops::Range<u64>| {
        let mut best = None;
        for idx in range {
            let s = Small::decode(n, &ps, idx);
            if let Some(c) = s.social_cost(&cfg.price) {
                best = pick(best, Some((c, idx)), false);
            }
        }
        best
    };
    let (cost, idx) = par::fold_chunks(exec, state_count(n), CHUNK, fold, |a, b| pick(a, b, false))
        .flatten()
        .expect("some network is connected");
    Ok((cost, decode_state(n, idx)))
}

pub const DEFAULT_REACH_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reachability {
    /// Minimum social cost over all reachable networks.
    #[serde(serialize_with = "ser_rational")]
    pub best_cost: Rational,
    pub best: Witness,
    pub states: usize,
    /// Reachable networks in which no agent can improve.
    pub equilibrium_count: usize,
    #[serde(serialize_with = "ser_opt_rational")]
    pub best_eq_cost: Option<Rational>,
    #[serde(serialize_with = "ser_opt_rational")]
    pub worst_eq_cost: Option<Rational>,
}

fn submasks(set: &[Node]) -> impl Iterator<Item = Vec<Node>> + '_ {
    (1u32..1 << set.len()).map(move |m| {
        (0..set.len())
            .filter(|&i| m >> i & 1 == 1)
            .map(|i| set[i])
            .collect()
    })
}

/// Every network reachable from `g0` by strictly improving strategy changes
/// in an add-only game, explored breadth-first.
///
/// Fails with `BudgetExceeded` when more than `budget` states are reachable.
pub fn best_reachable(g0: &OwnedGraph, cfg: &GameConfig, budget: usize) -> Result<Reachability> {
    cfg.validate()?;
    if !cfg.is_add_only() {
        return Err(Error::InvalidConfig(
            "reachability search needs an add-only game".into(),
        ));
    }
    if !g0.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut seen: HashSet<OwnedGraph> = HashSet::from([g0.clone()]);
    let mut queue = VecDeque::from([g0.clone()]);
    let mut best: Option<(Rational, OwnedGraph)> = None;
    let mut eq_costs: Vec<Rational> = Vec::new();
    while let Some(g) = queue.pop_front() {
        let cost = social_cost(&g, cfg)
            .value()
            .expect("reachable networks stay connected");
        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, g.clone()));
        }
        let mut stuck = true;
        for u in 0..g.n() {
            let before = crate::cost::agent_cost(&g, u, cfg)?.total;
            let cand = candidate_targets(&g, u, cfg)?;
            if cand.len() > cfg.universe_cap {
                return Err(Error::CapExceeded {
                    agent: u,
                    size: cand.len(),
                    cap: cfg.universe_cap,
                });
            }
            for extra in submasks(&cand) {
                let mut h = g.clone();
                for &t in &extra {
                    h.add_edge(u, t)?;
                }
                if crate::cost::agent_cost(&h, u, cfg)?.total >= before {
                    continue;
                }
                stuck = false;
                if !seen.contains(&h) {
                    if seen.len() >= budget {
                        return Err(Error::BudgetExceeded { budget });
                    }
                    seen.insert(h.clone());
                    queue.push_back(h);
                }
            }
        }
        if stuck {
            eq_costs.push(cost);
        }
    }
    let (best_cost, best) = best.expect("g0 is reachable");
    Ok(Reachability {
        best_cost,
        best: Witness(best),
        states: seen.len(),
        equilibrium_count: eq_costs.len(),
        best_eq_cost: eq_costs.iter().min().copied(),
        worst_eq_cost: eq_costs.iter().max().copied(),
    })
}

/// First `k`-subset of `0..len` in lexicographic order satisfying `pred`.
fn first_combination(
    len: usize,
    k: usize,
    mut pred: impl FnMut(&[usize]) -> bool,
) -> Option<Vec<usize>> {
    if k > len {
        return None;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if pred(&idx) {
            return Some(idx);
        }
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if idx[i] < len - k + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetCover {
    pub size: usize,
    /// Indices of the chosen sets, ascending.
    pub sets: Vec<usize>,
}

/// Minimum set cover by subset enumeration (at most 20 sets), smallest size
/// first and lexicographically first among those. `None` if the sets do not
/// cover the universe.
pub fn min_set_cover(inst: &SetCoverInstance) -> Result<Option<SetCover>> {
    let l = inst.sets.len();
    if l > 20 {
        return Err(Error::UnsupportedSize {
            n: l,
            reason: "set cover enumeration supports at most 20 sets",
        });
    }
    if inst.universe_size > 128 {
        return Err(Error::UnsupportedSize {
            n: inst.universe_size,
            reason: "set cover enumeration supports universes of at most 128 elements",
        });
    }
    let full: u128 = if inst.universe_size == 128 {
        u128::MAX
    } else {
        (1u128 << inst.universe_size) - 1
    };
    let masks: Vec<u128> = inst
        .sets
        .iter()
        .map(|s| s.iter().fold(0, |m, &e| m | 1 << e))
        .collect();
    for k in 0..=l {
        let hit = first_combination(l, k, |c| c.iter().fold(0u128, |m, &j| m | masks[j]) == full);
        if let Some(sets) = hit {
            return Ok(Some(SetCover { size: k, sets }));
        }
    }
    Ok(None)
}

/// Minimum dominating set by subset enumeration (at most 20 nodes),
/// lexicographically first among the smallest.
pub fn min_dominating_set(g: &OwnedGraph) -> Result<Vec<Node>> {
    let n = g.n();
    if n > 20 {
        return Err(Error::UnsupportedSize {
            n,
            reason: "dominating set enumeration supports at most 20 nodes",
        });
    }
    let full: u32 = (1u32 << n) - 1;
    let closed: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(1u32 << v, |m, &w| m | 1 << w))
        .collect();
    for k in 0..=n {
        if let Some(set) =
            first_combination(n, k, |c| c.iter().fold(0, |m, &v| m | closed[v]) == full)
        {
            return Ok(set);
        }
    }
    unreachable!("the whole node set dominates")
}
