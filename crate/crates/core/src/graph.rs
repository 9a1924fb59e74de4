//! Ownership-labeled undirected networks.
//!
//! An [`OwnedGraph`] is the network induced by a strategy vector: every
//! undirected edge `{u, v}` carries exactly one owner, and the strategy of
//! agent `u` is the set of targets of the edges `u` owns. Distances are
//! always measured on the undirected view.

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub type Node = usize;

/// Hop count of an unreachable node. Larger than any feasible distance.
pub const UNREACHABLE: u32 = u32::MAX;

/// Adds two hop counts, keeping [`UNREACHABLE`] absorbing.
#[inline]
pub fn hop_add(a: u32, b: u32) -> u32 {
    if a == UNREACHABLE || b == UNREACHABLE {
        UNREACHABLE
    } else {
        a + b
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct OwnedGraph {
    n: usize,
    /// Sorted targets of the edges each node owns.
    owned: Vec<Vec<Node>>,
    /// Sorted undirected neighbourhoods.
    adj: Vec<Vec<Node>>,
}

fn insert_sorted(list: &mut Vec<Node>, v: Node) {
    if let Err(pos) = list.binary_search(&v) {
        list.insert(pos, v);
    }
}

fn remove_sorted(list: &mut Vec<Node>, v: Node) -> bool {
    match list.binary_search(&v) {
        Ok(pos) => {
            list.remove(pos);
            true
        }
        Err(_) => false,
    }
}

impl OwnedGraph {
    /// Empty network on `n` nodes.
    pub fn new(n: usize) -> Self {
        Self {
            n,
            owned: vec![Vec::new(); n],
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds a network from `(owner, target)` pairs.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Node, Node)>,
    {
        let mut g = Self::new(n);
        for (owner, target) in edges {
            g.add_edge(owner, target)?;
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.owned.iter().map(Vec::len).sum()
    }

    pub fn check_node(&self, v: Node) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { node: v, n: self.n })
        }
    }

    /// Targets of the edges owned by `u` (its strategy), sorted.
    #[inline]
    pub fn owned_targets(&self, u: Node) -> &[Node] {
        &self.owned[u]
    }

    /// Undirected neighbours of `u`, sorted.
    #[inline]
    pub fn neighbors(&self, u: Node) -> &[Node] {
        &self.adj[u]
    }

    /// Nodes owning an edge towards `u`.
    pub fn incoming_owners(&self, u: Node) -> impl Iterator<Item = Node> + '_ {
        self.adj[u]
            .iter()
            .copied()
            .filter(move |&w| self.owned[u].binary_search(&w).is_err())
    }

    #[inline]
    pub fn has_edge(&self, u: Node, v: Node) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Owner of the undirected edge `{u, v}`, if present.
    pub fn owner(&self, u: Node, v: Node) -> Option<Node> {
        if self.owned[u].binary_search(&v).is_ok() {
            Some(u)
        } else if self.owned[v].binary_search(&u).is_ok() {
            Some(v)
        } else {
            None
        }
    }

    /// Adds the edge `{owner, target}` bought by `owner`.
    ///
    /// Fails if either direction of the edge already exists.
    pub fn add_edge(&mut self, owner: Node, target: Node) -> Result<()> {
        self.check_node(owner)?;
        self.check_node(target)?;
        if owner == target {
            return Err(Error::SelfLoop(owner));
        }
        if self.has_edge(owner, target) {
            return Err(Error::DuplicateEdge {
                u: owner,
                v: target,
            });
        }
        insert_sorted(&mut self.owned[owner], target);
        insert_sorted(&mut self.adj[owner], target);
        insert_sorted(&mut self.adj[target], owner);
        Ok(())
    }

    /// Removes the edge `{owner, target}`, which must be owned by `owner`.
    pub fn remove_edge(&mut self, owner: Node, target: Node) -> Result<()> {
        self.check_node(owner)?;
        self.check_node(target)?;
        if !remove_sorted(&mut self.owned[owner], target) {
            return Err(Error::NotOwned { owner, target });
        }
        remove_sorted(&mut self.adj[owner], target);
        remove_sorted(&mut self.adj[target], owner);
        Ok(())
    }

    /// Replaces the whole strategy of `u`.
    pub fn set_strategy(&mut self, u: Node, targets: &[Node]) -> Result<()> {
        self.check_node(u)?;
        let old = std::mem::take(&mut self.owned[u]);
        for &t in &old {
            remove_sorted(&mut self.adj[u], t);
            remove_sorted(&mut self.adj[t], u);
        }
        for &t in targets {
            if let Err(e) = self.add_edge(u, t) {
                // restore the previous strategy before reporting
                for &t2 in &self.owned[u].clone() {
                    let _ = self.remove_edge(u, t2);
                }
                for &t2 in &old {
                    let _ = self.add_edge(u, t2);
                }
                return Err(e);
            }
        }
        Ok(())
    }

    /// All owned edges as `(owner, target)` pairs, sorted.
    pub fn owned_edges(&self) -> impl Iterator<Item = (Node, Node)> + '_ {
        self.owned
            .iter()
            .enumerate()
            .flat_map(|(u, ts)| ts.iter().map(move |&t| (u, t)))
    }

    /// Undirected edges as `(min, max)` pairs, sorted.
    pub fn undirected_edges(&self) -> Vec<(Node, Node)> {
        let mut edges: Vec<_> = self
            .owned_edges()
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        edges.sort_unstable();
        edges
    }

    pub fn degree(&self, v: Node) -> Result<usize> {
        self.check_node(v)?;
        Ok(self.adj[v].len())
    }

    #[inline]
    pub(crate) fn deg(&self, v: Node) -> usize {
        self.adj[v].len()
    }

    /// Same network with the node set relabeled by `perm` (`v -> perm[v]`).
    pub fn relabel(&self, perm: &[Node]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::InvalidConfig(format!(
                "permutation of length {} for {} nodes",
                perm.len(),
                self.n
            )));
        }
        Self::from_edges(self.n, self.owned_edges().map(|(u, v)| (perm[u], perm[v])))
    }

    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut dist = vec![UNREACHABLE; self.n];
        let mut queue = VecDeque::new();
        bfs_into(self, 0, &mut dist, &mut queue);
        dist.iter().all(|&d| d != UNREACHABLE)
    }
}

/// Shortest-path hop counts from one source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceRow {
    pub source: Node,
    pub dist: Vec<u32>,
}

impl DistanceRow {
    /// Sum of distances to all other nodes, `None` if some node is unreachable.
    pub fn sum(&self) -> Option<u64> {
        distance_sum(&self.dist)
    }
}

pub(crate) fn distance_sum(dist: &[u32]) -> Option<u64> {
    let mut total = 0u64;
    for &d in dist {
        if d == UNREACHABLE {
            return None;
        }
        total += u64::from(d);
    }
    Some(total)
}

/// Breadth-first search writing into caller-owned buffers.
pub(crate) fn bfs_into(g: &OwnedGraph, source: Node, dist: &mut [u32], queue: &mut VecDeque<Node>) {
    dist.fill(UNREACHABLE);
    queue.clear();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(x) = queue.pop_front() {
        let next = dist[x] + 1;
        for &y in g.neighbors(x) {
            if dist[y] == UNREACHABLE {
                dist[y] = next;
                queue.push_back(y);
            }
        }
    }
}

/// BFS that ignores every edge incident to `skip` (i.e. runs on `g - skip`).
pub(crate) fn bfs_without(
    g: &OwnedGraph,
    source: Node,
    skip: Node,
    dist: &mut [u32],
    queue: &mut VecDeque<Node>,
) {
    dist.fill(UNREACHABLE);
    queue.clear();
    if source == skip {
        return;
    }
    dist[source] = 0;
    queue.push_back(source);
    while let Some(x) = queue.pop_front() {
        let next = dist[x] + 1;
        for &y in g.neighbors(x) {
            if y != skip && dist[y] == UNREACHABLE {
                dist[y] = next;
                queue.push_back(y);
            }
        }
    }
}

pub fn bfs_distances(g: &OwnedGraph, source: Node) -> Result<DistanceRow> {
    g.check_node(source)?;
    let mut dist = vec![UNREACHABLE; g.n()];
    bfs_into(g, source, &mut dist, &mut VecDeque::new());
    Ok(DistanceRow { source, dist })
}

pub fn degree(g: &OwnedGraph, v: Node) -> Result<usize> {
    g.degree(v)
}

/// Nodes at distance exactly `k` from `u`, sorted.
pub fn ball(g: &OwnedGraph, u: Node, k: u32) -> Result<Vec<Node>> {
    let row = bfs_distances(g, u)?;
    Ok(row
        .dist
        .iter()
        .enumerate()
        .filter(|&(_, &d)| d == k)
        .map(|(v, _)| v)
        .collect())
}

/// Largest finite distance, or [`UNREACHABLE`] when disconnected.
pub fn diameter(g: &OwnedGraph) -> u32 {
    let mut dist = vec![UNREACHABLE; g.n()];
    let mut queue = VecDeque::new();
    let mut best = 0;
    for s in 0..g.n() {
        bfs_into(g, s, &mut dist, &mut queue);
        for &d in &dist {
            if d == UNREACHABLE {
                return UNREACHABLE;
            }
            best = best.max(d);
        }
    }
    best
}

/// BFS layers `L_0 = {root}, L_1, ...` of a connected network.
pub fn layer_decomposition(g: &OwnedGraph, root: Node) -> Result<Vec<Vec<Node>>> {
    let row = bfs_distances(g, root)?;
    let mut layers: Vec<Vec<Node>> = Vec::new();
    for (v, &d) in row.dist.iter().enumerate() {
        if d == UNREACHABLE {
            return Err(Error::Disconnected);
        }
        let d = d as usize;
        if layers.len() <= d {
            layers.resize_with(d + 1, Vec::new);
        }
        layers[d].push(v);
    }
    Ok(layers)
}

/// Bridge edges as `(min, max)` pairs, sorted (Tarjan low-link, iterative).
pub fn bridges(g: &OwnedGraph) -> Vec<(Node, Node)> {
    let n = g.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0;
    let mut out = Vec::new();
    // (node, parent, next neighbour index)
    let mut stack: Vec<(Node, Node, usize)> = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        stack.push((root, usize::MAX, 0));
        while let Some(top) = stack.len().checked_sub(1) {
            let (v, parent, idx) = stack[top];
            if let Some(&w) = g.neighbors(v).get(idx) {
                stack[top].2 += 1;
                if w == parent {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, v, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > disc[parent] {
                        out.push((parent.min(v), parent.max(v)));
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// All-pairs hop counts, with an incremental update for edge insertions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<u32>,
}

impl DistanceMatrix {
    pub fn compute(g: &OwnedGraph) -> Self {
        let n = g.n();
        let mut d = vec![UNREACHABLE; n * n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            bfs_into(g, s, &mut d[s * n..(s + 1) * n], &mut queue);
        }
        Self { n, d }
    }

    #[inline]
    pub fn get(&self, u: Node, v: Node) -> u32 {
        self.d[u * self.n + v]
    }

    #[inline]
    pub fn row(&self, u: Node) -> &[u32] {
        &self.d[u * self.n..(u + 1) * self.n]
    }

    /// Updates all distances after the undirected edge `{a, b}` was inserted.
    pub fn insert_edge(&mut self, a: Node, b: Node) {
        let n = self.n;
        let row_a: Vec<u32> = self.row(a).to_vec();
        let row_b: Vec<u32> = self.row(b).to_vec();
        for x in 0..n {
            let xa = row_a[x];
            let xb = row_b[x];
            if xa == UNREACHABLE && xb == UNREACHABLE {
                continue;
            }
            let row = &mut self.d[x * n..(x + 1) * n];
            for y in 0..n {
                let via_ab = hop_add(hop_add(xa, 1), row_b[y]);
                let via_ba = hop_add(hop_add(xb, 1), row_a[y]);
                let best = via_ab.min(via_ba);
                if best < row[y] {
                    row[y] = best;
                }
            }
        }
    }

    pub fn diameter(&self) -> u32 {
        self.d.iter().copied().max().unwrap_or(0)
    }

    /// Sum of all ordered-pair distances, `None` when disconnected.
    pub fn total(&self) -> Option<u64> {
        distance_sum(&self.d)
    }
}
