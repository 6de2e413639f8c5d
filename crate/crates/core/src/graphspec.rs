//! Closed, symmetric, reflexive edge relations on Baire space together with a
//! coloring by cyclic orders, and the truncation relations `E_n`.
//!
//! Two finitely presentable classes of closed relations are supported:
//! finite unions of clopen boxes `[u] × [v]` and finite explicit graphs whose
//! vertices are named points. Both always contain the diagonal, so every
//! vertex is adjacent to itself.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::baire::{Prefix, VertexPath};
use crate::error::{Error, Result};

pub mod fixtures;

/// The order of a cyclic generator: a prime power or infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Order {
    Finite(u64),
    Infinite,
}

impl Order {
    pub fn is_valid(&self) -> bool {
        match *self {
            Order::Infinite => true,
            Order::Finite(m) => is_prime_power(m),
        }
    }

    /// Brings an exponent into `{1, …, m-1}` for finite order `m`; `None` if it vanishes.
    pub fn normalize(&self, exponent: i64) -> Option<i64> {
        let e = match *self {
            Order::Infinite => exponent,
            Order::Finite(m) => exponent.rem_euclid(m as i64),
        };
        (e != 0).then_some(e)
    }

    /// Integer code used as the first coordinate of embedded points: `inf ↦ 0`.
    pub fn code(&self) -> u64 {
        match *self {
            Order::Infinite => 0,
            Order::Finite(m) => m,
        }
    }
}

pub fn is_prime_power(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            let mut r = m;
            while r.is_multiple_of(p) {
                r /= p;
            }
            return r == 1;
        }
        p += 1;
    }
    true
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") {
            return Ok(Order::Infinite);
        }
        let bad = || Error::InvalidOrder(s.to_string());
        let value = match s.split_once('^') {
            Some((p, k)) => {
                let p: u64 = p.trim().parse().map_err(|_| bad())?;
                let k: u32 = k.trim().parse().map_err(|_| bad())?;
                p.checked_pow(k).ok_or_else(bad)?
            }
            None => s.parse().map_err(|_| bad())?,
        };
        Ok(Order::Finite(value))
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Infinite => write!(f, "inf"),
            Order::Finite(m) => write!(f, "{m}"),
        }
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Order {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => Ok(Order::Finite(n)),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Orders keyed by the first coordinate of a point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    #[serde(default)]
    pub table: BTreeMap<u64, Order>,
    pub default: Order,
}

impl Coloring {
    pub fn uniform(order: Order) -> Self {
        Coloring {
            table: BTreeMap::new(),
            default: order,
        }
    }

    pub fn order_by_first(&self, first: u64) -> Order {
        self.table.get(&first).copied().unwrap_or(self.default)
    }

    pub fn order_of(&self, v: &VertexPath) -> Order {
        self.order_by_first(v.at(0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EdgeOracle {
    /// Union of the boxes `[u] × [v]`, symmetrized, plus the diagonal.
    ClopenBoxes { boxes: Vec<(Prefix, Prefix)> },
    /// Named points; the relation is the listed pairs plus the diagonal.
    Finite {
        vertices: BTreeMap<String, VertexPath>,
        edges: Vec<(String, String)>,
    },
}

#[derive(Debug, Clone, Default)]
struct FiniteIndex {
    names: HashMap<VertexPath, String>,
    edges: HashSet<(VertexPath, VertexPath)>,
    /// Both orientations of every off-diagonal edge.
    oriented: Vec<(VertexPath, VertexPath)>,
    /// Depth at which truncation is injective on the named vertices.
    separation: usize,
}

impl FiniteIndex {
    fn build(vertices: &BTreeMap<String, VertexPath>, edges: &[(String, String)]) -> Self {
        let names: HashMap<_, _> = vertices
            .iter()
            .map(|(name, v)| (v.clone(), name.clone()))
            .collect();
        let mut set = HashSet::new();
        for (x, y) in edges {
            if let (Some(u), Some(v)) = (vertices.get(x), vertices.get(y)) {
                if u != v {
                    set.insert((u.clone(), v.clone()));
                    set.insert((v.clone(), u.clone()));
                }
            }
        }
        let mut oriented: Vec<_> = set.iter().cloned().collect();
        oriented.sort();
        let points: Vec<&VertexPath> = names.keys().collect();
        let mut separation = 1;
        for (i, u) in points.iter().enumerate() {
            for v in &points[i + 1..] {
                if let Ok(m) = u.meet_length(v) {
                    separation = separation.max(m + 1);
                }
            }
        }
        FiniteIndex {
            names,
            edges: set,
            oriented,
            separation,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    coloring: Coloring,
    oracle: EdgeOracle,
}

/// The pair `(Γ, 𝔭)`: an edge oracle on Baire space and its coloring.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(from = "RawGraph", into = "RawGraph")]
pub struct GraphInstance {
    oracle: EdgeOracle,
    coloring: Coloring,
    index: FiniteIndex,
}

impl From<RawGraph> for GraphInstance {
    fn from(raw: RawGraph) -> Self {
        GraphInstance::new(raw.oracle, raw.coloring)
    }
}

impl From<GraphInstance> for RawGraph {
    fn from(g: GraphInstance) -> Self {
        RawGraph {
            coloring: g.coloring,
            oracle: g.oracle,
        }
    }
}

impl PartialEq for GraphInstance {
    fn eq(&self, other: &Self) -> bool {
        self.oracle == other.oracle && self.coloring == other.coloring
    }
}

impl GraphInstance {
    pub fn new(oracle: EdgeOracle, coloring: Coloring) -> Self {
        let index = match &oracle {
            EdgeOracle::Finite { vertices, edges } => FiniteIndex::build(vertices, edges),
            EdgeOracle::ClopenBoxes { .. } => FiniteIndex::default(),
        };
        GraphInstance {
            oracle,
            coloring,
            index,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: GraphInstance = serde_json::from_str(text)?;
        let violations = g.validate();
        if violations.is_empty() {
            Ok(g)
        } else {
            Err(Error::Invalid(violations))
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph instances always serialize")
    }

    pub fn oracle(&self) -> &EdgeOracle {
        &self.oracle
    }

    pub fn coloring(&self) -> &Coloring {
        &self.coloring
    }

    pub fn order_of(&self, v: &VertexPath) -> Order {
        self.coloring.order_of(v)
    }

    /// Named vertices of a finite oracle, in name order; empty for box oracles.
    pub fn named_vertices(&self) -> Vec<(&str, &VertexPath)> {
        match &self.oracle {
            EdgeOracle::Finite { vertices, .. } => {
                vertices.iter().map(|(n, v)| (n.as_str(), v)).collect()
            }
            EdgeOracle::ClopenBoxes { .. } => Vec::new(),
        }
    }

    pub fn vertex_named(&self, name: &str) -> Option<&VertexPath> {
        match &self.oracle {
            EdgeOracle::Finite { vertices, .. } => vertices.get(name),
            EdgeOracle::ClopenBoxes { .. } => None,
        }
    }

    pub fn name_of(&self, v: &VertexPath) -> Option<&str> {
        self.index.names.get(v).map(String::as_str)
    }

    fn require_named(&self, v: &VertexPath) -> Result<()> {
        match self.oracle {
            EdgeOracle::Finite { .. } if !self.index.names.contains_key(v) => {
                Err(Error::UnknownVertex(v.clone()))
            }
            _ => Ok(()),
        }
    }

    /// Exact membership of `{u, v}` in the closed edge relation.
    pub fn adjacent(&self, u: &VertexPath, v: &VertexPath) -> Result<bool> {
        self.require_named(u)?;
        self.require_named(v)?;
        if u == v {
            return Ok(true);
        }
        Ok(match &self.oracle {
            EdgeOracle::ClopenBoxes { boxes } => boxes.iter().any(|(p, q)| {
                (p.is_prefix_of(u) && q.is_prefix_of(v)) || (p.is_prefix_of(v) && q.is_prefix_of(u))
            }),
            EdgeOracle::Finite { .. } => self.index.edges.contains(&(u.clone(), v.clone())),
        })
    }

    /// Membership of `(a, b)` in `E_n`, where `n` is the common length.
    pub fn edge_at_depth(&self, a: &Prefix, b: &Prefix) -> Result<bool> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch {
                left: a.len(),
                right: b.len(),
            });
        }
        if a.is_empty() {
            return Err(Error::ZeroDepth);
        }
        if a == b {
            return Ok(true);
        }
        Ok(match &self.oracle {
            EdgeOracle::ClopenBoxes { boxes } => boxes.iter().any(|(p, q)| {
                (p.compatible(a) && q.compatible(b)) || (p.compatible(b) && q.compatible(a))
            }),
            EdgeOracle::Finite { .. } => self
                .index
                .oriented
                .iter()
                .any(|(x, y)| a.is_prefix_of(x) && b.is_prefix_of(y)),
        })
    }

    /// A depth from which `edge_at_depth` on the truncations of `u`, `v`
    /// agrees with `adjacent(u, v)`.
    pub fn stabilization_depth(&self, u: &VertexPath, v: &VertexPath) -> usize {
        let meet = u.meet_length(v).map(|m| m + 1).unwrap_or(1);
        let oracle_depth = match &self.oracle {
            EdgeOracle::ClopenBoxes { boxes } => boxes
                .iter()
                .map(|(p, q)| p.len().max(q.len()))
                .max()
                .unwrap_or(1),
            EdgeOracle::Finite { .. } => self.index.separation,
        };
        meet.max(oracle_depth).max(1)
    }

    /// Least `n ≥ 1` at which the truncations of a non-adjacent pair leave `E_n`.
    pub fn nonadjacency_depth(&self, u: &VertexPath, v: &VertexPath) -> Result<usize> {
        if self.adjacent(u, v)? {
            return Err(Error::AdjacentPair(u.clone(), v.clone()));
        }
        let bound = self.stabilization_depth(u, v);
        for n in 1..=bound {
            if !self.edge_at_depth(&u.truncate(n), &v.truncate(n))? {
                return Ok(n);
            }
        }
        Err(Error::NoSeparatingDepth(u.clone(), v.clone(), bound))
    }

    /// Structural problems with the instance; empty means valid.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (first, order) in &self.coloring.table {
            if !order.is_valid() {
                out.push(format!(
                    "coloring: order {order} for first coordinate {first} is not a prime power"
                ));
            }
        }
        if !self.coloring.default.is_valid() {
            out.push(format!(
                "coloring: default order {} is not a prime power",
                self.coloring.default
            ));
        }
        if let EdgeOracle::Finite { vertices, edges } = &self.oracle {
            let mut seen: HashMap<&VertexPath, &str> = HashMap::new();
            for (name, v) in vertices {
                if let Some(prev) = seen.insert(v, name) {
                    out.push(format!("vertices: {prev} and {name} name the same point {v}"));
                }
            }
            let listed: HashSet<(&str, &str)> =
                edges.iter().map(|(x, y)| (x.as_str(), y.as_str())).collect();
            for (x, y) in edges {
                for name in [x, y] {
                    if !vertices.contains_key(name) {
                        out.push(format!("edges: unknown vertex name {name}"));
                    }
                }
                if !listed.contains(&(y.as_str(), x.as_str())) {
                    out.push(format!("edges: [{x}, {y}] is listed without [{y}, {x}]"));
                }
            }
        }
        out
    }
}
