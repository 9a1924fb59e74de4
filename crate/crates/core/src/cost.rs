//! Degree-price cost function, social cost and quality ratios.
//!
//! The owner `u` of edge `{u, v}` pays `beta * deg(v) + gamma`, where
//! `deg(v)` is measured in the evaluated network (so it counts `{u, v}`
//! itself). The default `(beta, gamma) = (1, -1)` charges `v`'s degree
//! without the purchased edge. All arithmetic is exact.

use std::fmt;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{bfs_into, distance_sum, Node, OwnedGraph, UNREACHABLE};

pub type Rational = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Agents may add, delete and swap edges.
    Ncg,
    /// Add-only: agents never delete edges.
    Aog,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Locality {
    Global,
    /// New edges may only target nodes within this many hops.
    Radius(u32),
}

impl Locality {
    #[inline]
    pub fn admits(self, hops: u32) -> bool {
        match self {
            Locality::Global => true,
            Locality::Radius(k) => hops <= k,
        }
    }
}

/// Linear edge price `beta * deg + gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Price {
    #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
    pub beta: Rational,
    #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
    pub gamma: Rational,
}

impl Default for Price {
    fn default() -> Self {
        Self {
            beta: Rational::from_integer(1),
            gamma: Rational::from_integer(-1),
        }
    }
}

impl Price {
    pub fn new(beta: Rational, gamma: Rational) -> Self {
        Self { beta, gamma }
    }

    /// Price of an edge towards a node whose degree (including the edge) is `deg`.
    #[inline]
    pub fn of_degree(&self, deg: usize) -> Rational {
        self.beta * Rational::from_integer(deg as i64) + self.gamma
    }

    /// Total price of `count` edges whose targets have degree sum `deg_sum`.
    #[inline]
    pub fn total(&self, deg_sum: usize, count: usize) -> Rational {
        self.beta * Rational::from_integer(deg_sum as i64)
            + self.gamma * Rational::from_integer(count as i64)
    }
}

pub const DEFAULT_UNIVERSE_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GameConfig {
    pub variant: Variant,
    pub locality: Locality,
    pub price: Price,
    /// Largest candidate universe an exact best response will enumerate.
    pub universe_cap: usize,
}

impl GameConfig {
    pub fn new(variant: Variant, locality: Locality) -> Self {
        Self {
            variant,
            locality,
            price: Price::default(),
            universe_cap: DEFAULT_UNIVERSE_CAP,
        }
    }

    /// degNCG.
    pub fn ncg() -> Self {
        Self::new(Variant::Ncg, Locality::Global)
    }

    /// degAOG.
    pub fn aog() -> Self {
        Self::new(Variant::Aog, Locality::Global)
    }

    /// deg`k`NCG.
    pub fn local_ncg(k: u32) -> Self {
        Self::new(Variant::Ncg, Locality::Radius(k))
    }

    /// deg`k`AOG.
    pub fn local_aog(k: u32) -> Self {
        Self::new(Variant::Aog, Locality::Radius(k))
    }

    pub fn with_price(mut self, price: Price) -> Self {
        self.price = price;
        self
    }

    pub fn with_universe_cap(mut self, cap: usize) -> Self {
        self.universe_cap = cap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Locality::Radius(0) = self.locality {
            return Err(Error::InvalidConfig(
                "locality radius must be at least 1".into(),
            ));
        }
        Ok(())
    }

    #[inline]
    pub fn is_add_only(&self) -> bool {
        self.variant == Variant::Aog
    }
}

impl fmt::Display for GameConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.locality {
            Locality::Global => String::new(),
            Locality::Radius(k) => k.to_string(),
        };
        let v = match self.variant {
            Variant::Ncg => "NCG",
            Variant::Aog => "AOG",
        };
        write!(f, "deg{k}{v}")?;
        if self.price != Price::default() {
            write!(f, "[beta={}, gamma={}]", self.price.beta, self.price.gamma)?;
        }
        Ok(())
    }
}

/// A cost that is either finite or infinite (disconnected).
///
/// `Unreachable` orders above every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cost {
    Finite(Rational),
    Unreachable,
}

impl Cost {
    pub fn from_int(v: i64) -> Self {
        Cost::Finite(Rational::from_integer(v))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Cost::Finite(_))
    }

    pub fn value(&self) -> Option<Rational> {
        match *self {
            Cost::Finite(v) => Some(v),
            Cost::Unreachable => None,
        }
    }

    /// Edge cost plus an optional distance sum.
    pub fn combine(edge: Rational, distance: Option<u64>) -> Self {
        match distance {
            Some(d) => Cost::Finite(edge + Rational::from_integer(d as i64)),
            None => Cost::Unreachable,
        }
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(v) => write!(f, "{v}"),
            Cost::Unreachable => f.write_str("unreachable"),
        }
    }
}

/// JSON form of a rational: a number when integral, `"p/q"` otherwise.
pub fn rational_json(r: &Rational) -> serde_json::Value {
    if r.is_integer() {
        serde_json::Value::from(r.to_integer())
    } else {
        serde_json::Value::from(r.to_string())
    }
}

pub(crate) fn ser_rational<S: Serializer>(
    r: &Rational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    rational_json(r).serialize(s)
}

fn de_rational<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
    let v = serde_json::Value::deserialize(d)?;
    match &v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(Rational::from_integer)
            .ok_or_else(|| serde::de::Error::custom("expected an integer")),
        serde_json::Value::String(s) => parse_rational(s).map_err(serde::de::Error::custom),
        _ => Err(serde::de::Error::custom("expected a rational")),
    }
}

/// Parses `"3"`, `"-1"`, `"3/2"` or a finite decimal such as `"0.25"`.
pub fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in {s:?}"))?;
        let q: i64 = q
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in {s:?}"))?;
        if q == 0 {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.trim_start().starts_with('-');
        let int: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().map_err(|_| format!("bad number {s:?}"))?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 12 {
            return Err(format!("bad number {s:?}"));
        }
        let den = 10i64.pow(frac.len() as u32);
        let num: i64 = frac.parse().map_err(|_| format!("bad number {s:?}"))?;
        let frac = Rational::new(num, den);
        return Ok(if negative {
            Rational::from_integer(int) - frac
        } else {
            Rational::from_integer(int) + frac
        });
    }
    s.parse::<i64>()
        .map(Rational::from_integer)
        .map_err(|_| format!("bad number {s:?}"))
}

impl Serialize for Cost {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cost::Finite(v) => rational_json(v).serialize(s),
            Cost::Unreachable => s.serialize_str("unreachable"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostBreakdown {
    pub edge_cost: Rational,
    /// Sum of hop distances, `None` when some node is unreachable.
    pub distance_cost: Option<u64>,
    pub total: Cost,
}

impl Serialize for CostBreakdown {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CostBreakdown", 3)?;
        st.serialize_field("edge_cost", &rational_json(&self.edge_cost))?;
        match self.distance_cost {
            Some(d) => st.serialize_field("distance_cost", &d)?,
            None => st.serialize_field("distance_cost", "unreachable")?,
        }
        st.serialize_field("total", &self.total)?;
        st.end()
    }
}

/// Price `u` pays for the edges it currently owns.
pub fn edge_cost(g: &OwnedGraph, u: Node, price: &Price) -> Rational {
    let targets = g.owned_targets(u);
    let deg_sum: usize = targets.iter().map(|&v| g.deg(v)).sum();
    price.total(deg_sum, targets.len())
}

pub fn agent_cost(g: &OwnedGraph, u: Node, cfg: &GameConfig) -> Result<CostBreakdown> {
    g.check_node(u)?;
    let mut dist = vec![UNREACHABLE; g.n()];
    bfs_into(g, u, &mut dist, &mut Default::default());
    let edge = edge_cost(g, u, &cfg.price);
    let distance = distance_sum(&dist);
    Ok(CostBreakdown {
        edge_cost: edge,
        distance_cost: distance,
        total: Cost::combine(edge, distance),
    })
}

/// Sum of all agents' costs; `Unreachable` for a disconnected network.
pub fn social_cost(g: &OwnedGraph, cfg: &GameConfig) -> Cost {
    let mut dist = vec![UNREACHABLE; g.n()];
    let mut queue = Default::default();
    let mut distance_total = 0u64;
    let mut edge_total = Rational::zero();
    for u in 0..g.n() {
        bfs_into(g, u, &mut dist, &mut queue);
        match distance_sum(&dist) {
            Some(d) => distance_total += d,
            None => return Cost::Unreachable,
        }
        edge_total += edge_cost(g, u, &cfg.price);
    }
    Cost::combine(edge_total, Some(distance_total))
}

/// `cost(g) / best_reachable_cost`.
pub fn rho(g: &OwnedGraph, best_reachable_cost: Rational, cfg: &GameConfig) -> Result<Rational> {
    if !best_reachable_cost.is_positive() {
        return Err(Error::InvalidConfig(format!(
            "reference cost must be positive, got {best_reachable_cost}"
        )));
    }
    match social_cost(g, cfg) {
        Cost::Finite(c) => Ok(c / best_reachable_cost),
        Cost::Unreachable => Err(Error::Disconnected),
    }
}
