//! From a finite metric graph to a colored graph on Baire space.
//!
//! Each point `a` is sent to `η_a = (code(a), x(a,1), x(a,2), …)`, where
//! `x(a,n)` is the least index at distance `< 1/4ⁿ` from `a`. The induced
//! `d′(a,b) = 1/(lg(η_a ∧ η_b) + 2)` is an ultrametric in which the edge
//! relation stays closed, and `a ↦ η_a` is injective and color preserving.
//! [`MetricGraphInstance::verify_lemma`] checks all of this exhaustively.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baire::{Prefix, VertexPath};
use crate::error::{Error, Result};
use crate::graphspec::{Coloring, EdgeOracle, GraphInstance, Order};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawMetric {
    points: Vec<String>,
    metric: Vec<Vec<String>>,
    colors: Vec<Order>,
    #[serde(default)]
    edges: Vec<(usize, usize)>,
}

/// A finite metric space with a coloring and a symmetric edge relation.
/// The enumeration order of `points` is the well-order of the dense set.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraphInstance {
    pub points: Vec<String>,
    pub metric: Vec<Vec<BigRational>>,
    pub colors: Vec<Order>,
    /// Listed pairs; the diagonal is always part of the relation.
    pub edges: BTreeSet<(usize, usize)>,
}

fn quarter_pow(n: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << (2 * n))
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

impl MetricGraphInstance {
    pub fn new(
        points: Vec<String>,
        metric: Vec<Vec<BigRational>>,
        colors: Vec<Order>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        MetricGraphInstance {
            points,
            metric,
            colors,
            edges: edges.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawMetric = serde_json::from_str(text)?;
        let mut metric = Vec::with_capacity(raw.metric.len());
        for (i, row) in raw.metric.iter().enumerate() {
            let mut parsed = Vec::with_capacity(row.len());
            for (j, cell) in row.iter().enumerate() {
                let value: BigRational = cell
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("metric[{i}][{j}] = {cell:?} is not a rational")))?;
                parsed.push(value);
            }
            metric.push(parsed);
        }
        let inst = MetricGraphInstance::new(raw.points, metric, raw.colors, raw.edges);
        let violations = inst.validate();
        if violations.is_empty() {
            Ok(inst)
        } else {
            Err(Error::Invalid(violations))
        }
    }

    pub fn to_json(&self) -> String {
        let raw = RawMetric {
            points: self.points.clone(),
            metric: self
                .metric
                .iter()
                .map(|row| row.iter().map(|x| x.to_string()).collect())
                .collect(),
            colors: self.colors.clone(),
            edges: self.edges.iter().copied().collect(),
        };
        serde_json::to_string_pretty(&raw).expect("metric instances always serialize")
    }

    pub fn d(&self, a: usize, b: usize) -> &BigRational {
        &self.metric[a][b]
    }

    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        a == b || self.edges.contains(&(a, b))
    }

    pub fn code(&self, a: usize) -> u64 {
        self.colors[a].code()
    }

    /// Shape, metric axioms and edge symmetry; empty means valid.
    pub fn validate(&self) -> Vec<String> {
        let n = self.points.len();
        let mut out = Vec::new();
        if n == 0 {
            out.push("instance has no points".to_string());
        }
        if self.colors.len() != n {
            out.push(format!("{} colors for {n} points", self.colors.len()));
        }
        let names: HashSet<&String> = self.points.iter().collect();
        if names.len() != n {
            out.push("point names are not distinct".to_string());
        }
        if self.metric.len() != n || self.metric.iter().any(|r| r.len() != n) {
            out.push(format!("metric must be a {n}×{n} matrix"));
            return out;
        }
        for a in 0..n {
            if !self.d(a, a).is_zero() {
                out.push(format!("d({a},{a}) = {} ≠ 0", self.d(a, a)));
            }
            for b in 0..n {
                if self.d(a, b).is_negative() {
                    out.push(format!("d({a},{b}) is negative"));
                }
                if a < b && self.d(a, b) != self.d(b, a) {
                    out.push(format!("d({a},{b}) ≠ d({b},{a})"));
                }
                if a != b && self.d(a, b).is_zero() {
                    out.push(format!("d({a},{b}) = 0 for distinct points"));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.d(a, c) > &(self.d(a, b) + self.d(b, c)) {
                        out.push(format!("triangle inequality fails for ({a},{b},{c})"));
                    }
                }
            }
        }
        for &(a, b) in &self.edges {
            if a >= n || b >= n {
                out.push(format!("edge ({a},{b}) out of range"));
            } else if !self.edges.contains(&(b, a)) {
                out.push(format!("edge ({a},{b}) is listed without ({b},{a})"));
            }
        }
        out
    }

    /// `x(a, n)`: the least index at distance `< 1/4ⁿ` from `a`.
    pub fn nearest_index(&self, a: usize, n: usize) -> usize {
        let threshold = quarter_pow(n);
        (0..self.len())
            .find(|&j| self.d(a, j) < &threshold)
            .expect("a point is at distance 0 from itself")
    }

    /// `η_a`, stored up to the depth where it becomes constant at `a`.
    pub fn eta_of(&self, a: usize) -> VertexPath {
        let min_positive = (0..self.len())
            .filter(|&b| b != a)
            .map(|b| self.d(a, b))
            .min()
            .cloned();
        let mut seq = vec![self.code(a)];
        let mut n = 1;
        loop {
            let x = self.nearest_index(a, n);
            seq.push(x as u64);
            let isolated = match &min_positive {
                None => true,
                Some(m) => &quarter_pow(n) <= m,
            };
            if x == a && isolated {
                break;
            }
            n += 1;
        }
        VertexPath::new(seq, a as u64)
    }

    pub fn eta_table(&self) -> Vec<VertexPath> {
        (0..self.len()).map(|a| self.eta_of(a)).collect()
    }

    pub fn dprime(&self, a: usize, b: usize) -> BigRational {
        self.dprime_with(&self.eta_table(), a, b)
    }

    fn dprime_with(&self, etas: &[VertexPath], a: usize, b: usize) -> BigRational {
        match etas[a].meet_length(&etas[b]) {
            Ok(m) => rat(1, m as i64 + 2),
            Err(_) => BigRational::zero(),
        }
    }

    /// Least-index point whose `η` extends `nu`, if any. Callers needing a
    /// total function fall back to point 0.
    pub fn dense_witness(&self, nu: &Prefix) -> Option<usize> {
        self.dense_witness_with(&self.eta_table(), nu)
    }

    fn dense_witness_with(&self, etas: &[VertexPath], nu: &Prefix) -> Option<usize> {
        etas.iter().position(|eta| nu.is_prefix_of(eta))
    }

    /// `𝔭*(η)`: the first coordinate if some point carries that color code, else 1.
    pub fn pstar(&self, eta: &VertexPath) -> u64 {
        let first = eta.at(0);
        if (0..self.len()).any(|a| self.code(a) == first) {
            first
        } else {
            1
        }
    }

    /// The colored graph on Baire space with vertices `η_a` and edges `h(E)`.
    pub fn to_graph_instance(&self) -> Result<GraphInstance> {
        let mut table = BTreeMap::new();
        for &order in &self.colors {
            if !order.is_valid() {
                return Err(Error::InvalidOrder(order.to_string()));
            }
            if let Some(prev) = table.insert(order.code(), order) {
                if prev != order {
                    return Err(Error::InvalidParameter(format!(
                        "color code {} is shared by {prev} and {order}",
                        order.code()
                    )));
                }
            }
        }
        let etas = self.eta_table();
        let vertices = self
            .points
            .iter()
            .cloned()
            .zip(etas.iter().cloned())
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|(a, b)| a != b)
            .map(|&(a, b)| (self.points[a].clone(), self.points[b].clone()))
            .collect();
        Ok(GraphInstance::new(
            EdgeOracle::Finite { vertices, edges },
            Coloring {
                table,
                default: Order::Infinite,
            },
        ))
    }

    /// Exhaustive check of every conclusion of the construction.
    pub fn verify_lemma(&self) -> LemmaReport {
        let n = self.len();
        let etas = self.eta_table();
        let dmat: Vec<Vec<BigRational>> = (0..n)
            .map(|a| (0..n).map(|b| self.dprime_with(&etas, a, b)).collect())
            .collect();
        let dp = |a: usize, b: usize| dmat[a][b].clone();
        let depth_limit = etas.iter().map(|e| e.stable_depth()).max().unwrap_or(0) + 2;
        let mut report = LemmaReport::default();

        let mut fails = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let dab = dp(a, b);
                if dab.is_zero() != (a == b) || dab != dp(b, a) {
                    fails.push(format!("d′({a},{b}) breaks identity or symmetry"));
                }
                for c in 0..n {
                    if dmat[a][c] > *(&dab).max(&dmat[b][c]) {
                        fails.push(format!("strong triangle fails for ({a},{b},{c})"));
                    }
                }
            }
        }
        report.push(Clause::Ultrametric, fails);

        let mut fails = Vec::new();
        for b in 0..n {
            for depth in 1..=depth_limit {
                let nu = etas[b].truncate(depth);
                match self.dense_witness_with(&etas, &nu) {
                    None => fails.push(format!("no witness for η_{b}↾{depth}")),
                    Some(w) if dp(w, b) > rat(1, depth as i64 + 2) => fails.push(format!(
                        "witness {w} for η_{b}↾{depth} is at d′ {}",
                        dp(w, b)
                    )),
                    Some(_) => {}
                }
            }
        }
        report.push(Clause::Separable, fails);

        let mut fails = Vec::new();
        // Pullback bound: lg(η_a ∧ η_a′) > m ≥ 1 forces d(a, a′) < 2/4^m.
        for a in 0..n {
            for a2 in 0..n {
                if a == a2 {
                    continue;
                }
                let meet = etas[a].meet_length(&etas[a2]).unwrap_or(usize::MAX);
                for m in 1..meet.min(depth_limit + 1) {
                    if self.d(a, a2) >= &(quarter_pow(m) * BigInt::from(2)) {
                        fails.push(format!("d({a},{a2}) ≥ 2/4^{m} although η's agree past {m}"));
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if self.is_edge(a, b) {
                    continue;
                }
                let witness = (1..=depth_limit).find(|&m| {
                    let radius = rat(1, m as i64 + 2);
                    let ball = |x: usize| (0..n).filter(|&y| dmat[x][y] < radius).collect::<Vec<_>>();
                    let bb = ball(b);
                    ball(a)
                        .into_iter()
                        .all(|x| bb.iter().all(|&y| !self.is_edge(x, y)))
                });
                match witness {
                    Some(m) => {
                        report.closedness_witnesses.insert((a, b), m);
                    }
                    None => fails.push(format!("non-edge ({a},{b}) has no clean neighbourhood")),
                }
            }
        }
        report.push(Clause::Closed, fails);

        let mut fails = Vec::new();
        let distinct: HashSet<&VertexPath> = etas.iter().collect();
        if distinct.len() != n {
            fails.push("two points share the same η".to_string());
        }
        report.push(Clause::Injective, fails);

        let mut fails = Vec::new();
        match self.to_graph_instance() {
            Ok(g) => {
                for a in 0..n {
                    for b in 0..n {
                        if g.adjacent(&etas[a], &etas[b]) != Ok(self.is_edge(a, b)) {
                            fails.push(format!("edge status of ({a},{b}) changes under h"));
                        }
                    }
                }
            }
            Err(e) => fails.push(format!("cannot build image graph: {e}")),
        }
        report.push(Clause::EdgesPreserved, fails);

        let mut fails = Vec::new();
        for (a, eta) in etas.iter().enumerate() {
            if self.pstar(eta) != self.code(a) {
                fails.push(format!("𝔭*(η_{a}) = {} but code is {}", self.pstar(eta), self.code(a)));
            }
        }
        report.push(Clause::ColorPreserved, fails);

        let mut fails = Vec::new();
        let codes: BTreeSet<u64> = (0..n).map(|a| self.code(a)).collect();
        let unmatched = (0u64..).find(|c| !codes.contains(c)).unwrap();
        let mut probes = etas.clone();
        probes.push(VertexPath::constant(unmatched));
        for (i, x) in probes.iter().enumerate() {
            for y in &probes[..i] {
                if (x.at(0) == y.at(0)) != (self.pstar(x) == self.pstar(y)) {
                    fails.push(format!("𝔭* separates first coordinates wrongly at {x}, {y}"));
                }
            }
        }
        report.push(Clause::PstarCoherent, fails);

        report
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Clause {
    /// `d′` is an ultrametric.
    Ultrametric,
    /// The witnesses `a_ν` are within `1/(n+2)`.
    Separable,
    /// Non-edges have clean neighbourhoods, with the `2/4ⁿ` pullback bound.
    Closed,
    Injective,
    EdgesPreserved,
    ColorPreserved,
    PstarCoherent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClauseResult {
    pub clause: Clause,
    pub passed: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LemmaReport {
    pub clauses: Vec<ClauseResult>,
    /// Least `n` whose `1/(n+2)` balls around a non-edge contain no edge.
    pub closedness_witnesses: BTreeMap<(usize, usize), usize>,
}

impl LemmaReport {
    fn push(&mut self, clause: Clause, failures: Vec<String>) {
        self.clauses.push(ClauseResult {
            clause,
            passed: failures.is_empty(),
            failures,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }
}

const CORPUS_COLORS: [Order; 7] = [
    Order::Infinite,
    Order::Finite(2),
    Order::Finite(3),
    Order::Finite(4),
    Order::Finite(5),
    Order::Finite(8),
    Order::Finite(9),
];

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

fn matrix(n: usize, f: impl Fn(usize, usize) -> BigRational) -> Vec<Vec<BigRational>> {
    (0..n).map(|a| (0..n).map(|b| if a == b { BigRational::zero() } else { f(a, b) }).collect()).collect()
}

fn symmetric_edges(pairs: impl IntoIterator<Item = (usize, usize)>) -> Vec<(usize, usize)> {
    pairs.into_iter().flat_map(|(a, b)| [(a, b), (b, a)]).collect()
}

/// Two points at distance 1/10, both of order 2, not joined.
pub fn two_point() -> MetricGraphInstance {
    MetricGraphInstance::new(
        names(2),
        matrix(2, |_, _| rat(1, 10)),
        vec![Order::Finite(2); 2],
        [],
    )
}

/// Half graph on `a_0 … a_{s-1}, b_0 … b_{s-1}` under the discrete unit metric.
pub fn half_graph_metric(size: usize) -> MetricGraphInstance {
    let mut points: Vec<String> = (0..size).map(|i| format!("a{i}")).collect();
    points.extend((0..size).map(|j| format!("b{j}")));
    let n = 2 * size;
    let edges = symmetric_edges((0..size).flat_map(|i| (i + 1..size).map(move |j| (i, size + j))));
    MetricGraphInstance::new(points, matrix(n, |_, _| rat(1, 1)), vec![Order::Infinite; n], edges)
}

/// Points on a line at `x_i = i/den`, optionally all joined.
pub fn line(n: usize, den: i64, complete: bool, color: Order) -> MetricGraphInstance {
    let edges = if complete {
        symmetric_edges((0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))))
    } else {
        Vec::new()
    };
    MetricGraphInstance::new(
        names(n),
        matrix(n, |a, b| rat((a as i64 - b as i64).abs(), den)),
        vec![color; n],
        edges,
    )
}

/// A seeded random instance with `n` points. The metric is either points on a
/// line with rational coordinates, a random ultrametric, or a shortest-path
/// metric of random rational weights.
pub fn random_instance(seed: u64, n: usize) -> MetricGraphInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kind = rng.gen_range(0..3);
    let metric = match kind {
        0 => {
            let xs: Vec<BigRational> = (0..n)
                .map(|i| rat(4 * i as i64 + rng.gen_range(0..4), rng.gen_range(1..=40)))
                .collect();
            let mut m = matrix(n, |a, b| (&xs[a] - &xs[b]).abs());
            // Coordinates may collide; nudge collided points apart.
            for a in 0..n {
                for b in 0..n {
                    if a != b && m[a][b].is_zero() {
                        m[a][b] = rat(1, 1000);
                    }
                }
            }
            close_metric(m)
        }
        1 => {
            // Ultrametric from a random merge order: points merge at rising heights.
            let mut cluster: Vec<usize> = (0..n).collect();
            let mut m = matrix(n, |_, _| BigRational::zero());
            let mut height = rat(1, rng.gen_range(50..=200));
            for _ in 1..n {
                let roots: BTreeSet<usize> = cluster.iter().copied().collect();
                let roots: Vec<usize> = roots.into_iter().collect();
                let i = rng.gen_range(0..roots.len());
                let mut j = rng.gen_range(0..roots.len() - 1);
                if j >= i {
                    j += 1;
                }
                let (ri, rj) = (roots[i], roots[j]);
                for a in 0..n {
                    for b in 0..n {
                        if cluster[a] == ri && cluster[b] == rj {
                            m[a][b] = height.clone();
                            m[b][a] = height.clone();
                        }
                    }
                }
                for c in cluster.iter_mut() {
                    if *c == rj {
                        *c = ri;
                    }
                }
                height *= rat(rng.gen_range(2..=5), 1);
            }
            m
        }
        _ => {
            let m = matrix(n, |_, _| BigRational::zero());
            let mut m = m;
            for a in 0..n {
                for b in a + 1..n {
                    let w = rat(rng.gen_range(1..=30), rng.gen_range(1..=64));
                    m[a][b] = w.clone();
                    m[b][a] = w;
                }
            }
            close_metric(m)
        }
    };
    let palette = rng.gen_range(1..=3);
    let colors = (0..n)
        .map(|_| CORPUS_COLORS[rng.gen_range(0..CORPUS_COLORS.len())])
        .collect::<Vec<_>>();
    let colors = if palette == 1 { vec![colors[0]; n] } else { colors };
    let density = rng.gen_range(0..=10);
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_range(0..10) < density {
                pairs.push((a, b));
            }
        }
    }
    MetricGraphInstance::new(names(n), metric, colors, symmetric_edges(pairs))
}

/// Floyd–Warshall closure, turning positive weights into a metric.
fn close_metric(mut m: Vec<Vec<BigRational>>) -> Vec<Vec<BigRational>> {
    let n = m.len();
    for k in 0..n {
        for a in 0..n {
            for b in 0..n {
                let via = &m[a][k] + &m[k][b];
                if via < m[a][b] {
                    m[a][b] = via;
                }
            }
        }
    }
    m
}

/// The fixed verification corpus: hand-built extremes plus seeded random
/// instances of 2 to 32 points.
pub fn corpus(seed: u64) -> Vec<MetricGraphInstance> {
    let mut out = vec![
        two_point(),
        half_graph_metric(4),
        line(6, 7, true, Order::Finite(3)),
        line(6, 7, false, Order::Infinite),
        line(2, 1, true, Order::Finite(2)),
    ];
    let sizes = [2, 3, 4, 5, 6, 8, 10, 12, 16, 20, 24, 28, 32, 7, 9, 11, 13, 3, 4, 32];
    for (i, &n) in sizes.iter().enumerate() {
        out.push(random_instance(seed.wrapping_mul(1000).wrapping_add(i as u64), n));
    }
    out
}
