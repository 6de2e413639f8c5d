//! Seeded property suites and the acceptance run.
//!
//! Every suite is a list of criteria; each criterion counts how many
//! instances it checked and keeps the first few counterexamples verbatim.
//! Randomness comes from one ChaCha stream per (criterion, fixture, sample),
//! so reports are identical whether the work is spread over threads or not.

use std::collections::HashMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::baire::{Prefix, UltraValue, VertexPath};
use crate::embed::{self, MetricGraphInstance};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graphspec::{fixtures, EdgeOracle, GraphInstance, Order};
use crate::oracle::{oracle_equal, Alphabet, ClosureClass, Letter, Moves};
use crate::ultranorm::{distance, rn_key, two_sided, ultranorm};
use crate::words::{canonical, equal, reduce, reduce_by, truncate_word, NormalForm, Syllable, Truncation, Word};

pub const SUITES: [&str; 7] = [
    "baire",
    "graphspec",
    "words",
    "oracle-compare",
    "ultranorm",
    "embed",
    "acceptance",
];

const MAX_EXAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckConfig {
    /// Base sample count; individual criteria scale it down.
    pub samples: usize,
    pub seed: u64,
    /// Deepest truncation examined by the depth-indexed criteria.
    pub depth: usize,
    /// Letter bound for the brute-force oracle.
    pub max_len: usize,
    pub exec: Exec,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            samples: 1000,
            seed: 42,
            depth: 6,
            max_len: 12,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionReport {
    pub id: String,
    pub name: String,
    pub checked: u64,
    pub violations: u64,
    pub counterexamples: Vec<String>,
}

impl CriterionReport {
    /// No violations, and at least one instance was actually checked.
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.checked > 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub criteria: Vec<CriterionReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(CriterionReport::passed)
    }
}

pub fn run_suite(name: &str, cfg: &CheckConfig) -> Result<SuiteReport> {
    if cfg.depth == 0 {
        return Err(Error::ZeroDepth);
    }
    let criteria = match name {
        "baire" => vec![baire_tree(cfg), baire_truncation(cfg), baire_order(cfg)],
        "graphspec" => vec![adjacency_symmetry(cfg), ac7_truncation_graphs(cfg)],
        "words" => vec![confluence(cfg), group_laws(cfg), truncation_well_defined(cfg)],
        "oracle-compare" => vec![ac1_oracle_equivalence(cfg), oracle_symmetry(cfg)],
        "ultranorm" => vec![
            ac2_ultranorm_axioms(cfg),
            ac3_left_invariance(cfg),
            ac4_baire_extension(cfg),
            ac5_rn_density(cfg),
            strong_triangle(cfg),
            two_sided_metric(cfg),
        ],
        "embed" => vec![ac6_lemma(cfg), ac8_pipeline(cfg)],
        "acceptance" => acceptance(cfg),
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown suite {other}; expected one of {}",
                SUITES.join(", ")
            )))
        }
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        criteria,
    })
}

/// AC1 through AC8, in order.
pub fn acceptance(cfg: &CheckConfig) -> Vec<CriterionReport> {
    vec![
        ac1_oracle_equivalence(cfg),
        ac2_ultranorm_axioms(cfg),
        ac3_left_invariance(cfg),
        ac4_baire_extension(cfg),
        ac5_rn_density(cfg),
        ac6_lemma(cfg),
        ac7_truncation_graphs(cfg),
        ac8_pipeline(cfg),
    ]
}

#[derive(Debug, Default)]
struct Tally {
    checked: u64,
    violations: u64,
    examples: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(msg());
        }
    }

    fn fail(&mut self, msg: String) {
        self.violations += 1;
        if self.examples.len() < MAX_EXAMPLES {
            self.examples.push(msg);
        }
    }

    /// Unwraps `r`, counting an error as a failed check.
    fn ok<T>(&mut self, r: Result<T>, ctx: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.checked += 1;
                self.fail(format!("{}: {e}", ctx()));
                None
            }
        }
    }

    fn absorb(&mut self, other: Tally) {
        self.checked += other.checked;
        self.violations += other.violations;
        for e in other.examples {
            if self.examples.len() < MAX_EXAMPLES {
                self.examples.push(e);
            }
        }
    }

    fn merged(parts: Vec<Tally>) -> Tally {
        let mut t = Tally::default();
        for p in parts {
            t.absorb(p);
        }
        t
    }

    fn report(self, id: &str, name: &str) -> CriterionReport {
        CriterionReport {
            id: id.to_string(),
            name: name.to_string(),
            checked: self.checked,
            violations: self.violations,
            counterexamples: self.examples,
        }
    }
}

fn rng(seed: u64, salt: u64, fixture: usize, sample: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    r.set_stream(((fixture as u64) << 32) | sample as u64);
    r
}

/// A graph used by the sampled criteria, with the vertices words are drawn from.
struct Fixture {
    name: String,
    graph: GraphInstance,
    /// Named vertices of a finite oracle; empty for box oracles, whose
    /// vertices are drawn at random.
    pool: Vec<VertexPath>,
}

impl Fixture {
    fn new(name: impl Into<String>, graph: GraphInstance) -> Self {
        let pool = graph.named_vertices().into_iter().map(|(_, v)| v.clone()).collect();
        Fixture {
            name: name.into(),
            graph,
            pool,
        }
    }

    fn vertex(&self, rng: &mut ChaCha8Rng) -> VertexPath {
        if self.pool.is_empty() {
            fixtures::random_path(rng)
        } else {
            self.pool[rng.gen_range(0..self.pool.len())].clone()
        }
    }

    /// A vertex sharing its first `n` coordinates with `v`, if one is at hand.
    fn vertex_near(&self, v: &VertexPath, n: usize, rng: &mut ChaCha8Rng) -> VertexPath {
        let stem = v.truncate(n);
        if self.pool.is_empty() {
            let extra = rng.gen_range(0..=2);
            let mut prefix = stem.0.clone();
            prefix.extend((0..extra).map(|_| rng.gen_range(0..fixtures::RANDOM_ALPHABET)));
            VertexPath::new(prefix, rng.gen_range(0..fixtures::RANDOM_ALPHABET))
        } else {
            let near: Vec<&VertexPath> = self.pool.iter().filter(|u| stem.is_prefix_of(u)).collect();
            near[rng.gen_range(0..near.len())].clone()
        }
    }

    fn word(&self, rng: &mut ChaCha8Rng, max_syllables: usize, max_exp: i64) -> Word<VertexPath> {
        let len = rng.gen_range(0..=max_syllables);
        let mut syllables: Vec<Syllable<VertexPath>> = Vec::with_capacity(len);
        while syllables.len() < len {
            let v = self.vertex(rng);
            if syllables.last().is_some_and(|s| s.vertex == v) {
                continue;
            }
            let e = rng.gen_range(1..=max_exp) * if rng.gen_bool(0.5) { 1 } else { -1 };
            syllables.push(Syllable::new(v, e));
        }
        Word::from_syllables(syllables, &self.graph)
    }

    fn show(&self, w: &Word<VertexPath>) -> String {
        if self.pool.is_empty() {
            w.to_string()
        } else {
            w.render(|v| self.graph.name_of(v).unwrap_or("?").to_string())
        }
    }
}

/// Free, complete, half-graph(6) and three random box oracles.
fn suite_fixtures(seed: u64) -> Vec<Fixture> {
    let inf = Order::Infinite;
    let (two, three, four) = (Order::Finite(2), Order::Finite(3), Order::Finite(4));
    let mut out = vec![
        Fixture::new("free", fixtures::free(&[inf, inf, two, three])),
        Fixture::new("complete", fixtures::complete(&[two, three, four, inf])),
        Fixture::new("half-graph(6)", fixtures::half_graph(6).expect("size is positive")),
    ];
    for i in 0..3 {
        let s = seed.wrapping_add(i);
        out.push(Fixture::new(format!("random-boxes({s})"), fixtures::random_boxes(s)));
    }
    out
}

/// Runs `per_sample(fixture, rng)` for `count` samples on every fixture.
fn sampled<F>(cfg: &CheckConfig, salt: u64, count: usize, per_sample: F) -> Tally
where
    F: Fn(&Fixture, &mut ChaCha8Rng, &mut Tally) + Sync + Send,
{
    let fx = suite_fixtures(cfg.seed);
    let jobs: Vec<(usize, usize)> = (0..fx.len()).flat_map(|f| (0..count).map(move |s| (f, s))).collect();
    let parts = cfg.exec.map(&jobs, |&(f, s)| {
        let mut t = Tally::default();
        let mut r = rng(cfg.seed, salt, f, s);
        per_sample(&fx[f], &mut r, &mut t);
        t
    });
    Tally::merged(parts)
}

// ---------------------------------------------------------------- baire

fn random_triple(r: &mut ChaCha8Rng) -> [VertexPath; 3] {
    // Share a random stem so that meets are often long.
    let stem = fixtures::random_path(r);
    let mut one = || {
        if r.gen_bool(0.7) {
            let n = r.gen_range(0..=stem.stable_depth() + 1);
            let mut prefix = stem.truncate(n).0;
            prefix.extend((0..r.gen_range(0..=3)).map(|_| r.gen_range(0..fixtures::RANDOM_ALPHABET)));
            VertexPath::new(prefix, r.gen_range(0..fixtures::RANDOM_ALPHABET))
        } else {
            fixtures::random_path(r)
        }
    };
    [one(), one(), one()]
}

fn baire_tree(cfg: &CheckConfig) -> CriterionReport {
    let parts = cfg.exec.map_range(cfg.samples, |s| {
        let mut t = Tally::default();
        let [u, v, w] = random_triple(&mut rng(cfg.seed, 1, 0, s));
        if u != v && v != w && u != w {
            let m = |a: &VertexPath, b: &VertexPath| a.meet_length(b).expect("distinct");
            t.check(m(&u, &w) >= m(&u, &v).min(m(&v, &w)), || format!("tree property fails for {u}, {v}, {w}"));
            t.check(u.distance(&w) <= u.distance(&v).max(v.distance(&w)), || {
                format!("strong triangle fails for {u}, {v}, {w}")
            });
        }
        t
    });
    Tally::merged(parts).report("baire.tree", "meets form a tree; distance is an ultrametric")
}

fn baire_truncation(cfg: &CheckConfig) -> CriterionReport {
    let parts = cfg.exec.map_range(cfg.samples, |s| {
        let mut t = Tally::default();
        let [u, v, _] = random_triple(&mut rng(cfg.seed, 2, 0, s));
        match u.meet_length(&v) {
            Ok(m) => {
                t.check(u.truncate(m) == v.truncate(m), || format!("{u}, {v} differ below the meet {m}"));
                t.check(u.truncate(m + 1) != v.truncate(m + 1), || format!("{u}, {v} agree past the meet {m}"));
                t.check(u.distance(&v) == UltraValue::exp(m as u32 + 1), || format!("distance of {u}, {v}"));
            }
            Err(_) => t.check(u == v && u.distance(&v).is_zero(), || format!("meet undefined for {u} ≠ {v}")),
        }
        t
    });
    Tally::merged(parts).report("baire.truncation", "the meet is the first disagreement")
}

fn baire_order(cfg: &CheckConfig) -> CriterionReport {
    let parts = cfg.exec.map_range(cfg.samples, |s| {
        let mut t = Tally::default();
        let [u, v, w] = random_triple(&mut rng(cfg.seed, 3, 0, s));
        if let (Ok(uv), Ok(uw)) = (u.meet_length(&v), u.meet_length(&w)) {
            t.check((u.distance(&v) <= u.distance(&w)) == (uv >= uw), || {
                format!("distance order disagrees with meets for {u}, {v}, {w}")
            });
        }
        t
    });
    Tally::merged(parts).report("baire.order", "distance order reverses meet order")
}

// ------------------------------------------------------------ graphspec

fn adjacency_symmetry(cfg: &CheckConfig) -> CriterionReport {
    sampled(cfg, 10, cfg.samples / 5, |fx, r, t| {
        let (u, v) = (fx.vertex(r), fx.vertex(r));
        let g = &fx.graph;
        if let (Some(uv), Some(vu), Some(uu)) = (
            t.ok(g.adjacent(&u, &v), || fx.name.clone()),
            t.ok(g.adjacent(&v, &u), || fx.name.clone()),
            t.ok(g.adjacent(&u, &u), || fx.name.clone()),
        ) {
            t.check(uv == vu && uu, || format!("{}: adjacency of {u}, {v} not symmetric/reflexive", fx.name));
        }
    })
    .report("graphspec.adjacency", "adjacency is symmetric and reflexive")
}

/// Candidate prefixes of length `n` that can take part in an `E_n` pair.
///
/// For a box oracle whose boxes have length ≤ `L`, membership of a pair at
/// depth `n ≥ L` depends only on the first `L` coordinates, so heads of
/// length `min(n, L + 1)` over the used symbols plus one fresh symbol,
/// followed by two kinds of padding, exhaust the behaviour. For a finite
/// oracle, off-diagonal pairs only come from truncated vertices.
fn depth_candidates(g: &GraphInstance, n: usize) -> Vec<Prefix> {
    match g.oracle() {
        EdgeOracle::ClopenBoxes { boxes } => {
            let mut symbols: Vec<u64> = boxes
                .iter()
                .flat_map(|(p, q)| p.entries().iter().chain(q.entries()).copied())
                .collect();
            symbols.sort_unstable();
            symbols.dedup();
            let fresh = symbols.last().map_or(0, |m| m + 1);
            symbols.push(fresh);
            let box_len = boxes.iter().map(|(p, q)| p.len().max(q.len())).max().unwrap_or(0);
            let head = n.min(box_len + 1);
            let mut heads: Vec<Vec<u64>> = vec![vec![]];
            for _ in 0..head {
                heads = heads
                    .into_iter()
                    .flat_map(|h| {
                        symbols.iter().map(move |&s| {
                            let mut h = h.clone();
                            h.push(s);
                            h
                        })
                    })
                    .collect();
            }
            let pads: Vec<u64> = if head < n { vec![symbols[0], fresh] } else { vec![0] };
            heads
                .into_iter()
                .flat_map(|h| {
                    pads.iter().map(move |&pad| {
                        let mut p = h.clone();
                        p.resize(n, pad);
                        Prefix(p)
                    })
                })
                .collect()
        }
        EdgeOracle::Finite { .. } => {
            let mut out: Vec<Prefix> = g.named_vertices().iter().map(|(_, v)| v.truncate(n)).collect();
            let fresh = out.iter().map(|p| p.entries()[0]).max().unwrap_or(0) + 1;
            out.push(Prefix(vec![fresh; n]));
            out.sort();
            out.dedup();
            out
        }
    }
}

/// Concrete vertex pairs for the exactness check.
fn concrete_pairs(g: &GraphInstance, r: &mut ChaCha8Rng, count: usize) -> Vec<(VertexPath, VertexPath)> {
    match g.oracle() {
        EdgeOracle::Finite { .. } => {
            let vs: Vec<VertexPath> = g.named_vertices().iter().map(|(_, v)| (*v).clone()).collect();
            vs.iter()
                .flat_map(|u| vs.iter().map(move |v| (u.clone(), v.clone())))
                .collect()
        }
        EdgeOracle::ClopenBoxes { boxes } => {
            // Points just inside and just outside every box, plus random points.
            let mut points = Vec::new();
            for (p, q) in boxes {
                for stem in [p, q] {
                    for tail in 0..=fixtures::RANDOM_ALPHABET {
                        points.push(VertexPath::new(stem.0.clone(), tail));
                        let mut bent = stem.0.clone();
                        if let Some(last) = bent.last_mut() {
                            *last += 1;
                        }
                        points.push(VertexPath::new(bent, tail));
                    }
                }
            }
            points.sort();
            points.dedup();
            let mut out: Vec<(VertexPath, VertexPath)> = points
                .iter()
                .flat_map(|u| points.iter().map(move |v| (u.clone(), v.clone())))
                .collect();
            out.extend((0..count).map(|_| (fixtures::random_path(r), fixtures::random_path(r))));
            out
        }
    }
}

fn ac7_truncation_graphs(cfg: &CheckConfig) -> CriterionReport {
    let mut graphs: Vec<(String, GraphInstance)> = suite_fixtures(cfg.seed)
        .into_iter()
        .map(|f| (f.name, f.graph))
        .collect();
    for i in 0..5 {
        let s = cfg.seed.wrapping_add(100 + i);
        graphs.push((format!("random-boxes({s})"), fixtures::random_boxes(s)));
    }
    let horizon = cfg.depth + 2;
    let parts = cfg.exec.map_range(graphs.len(), |gi| {
        let (name, g) = &graphs[gi];
        let mut t = Tally::default();
        // Monotonicity: E_{n+1} projects into E_n.
        for n in 1..cfg.depth {
            let cands = depth_candidates(g, n + 1);
            for a in &cands {
                for b in &cands {
                    let Some(up) = t.ok(g.edge_at_depth(a, b), || name.clone()) else {
                        continue;
                    };
                    if !up {
                        continue;
                    }
                    let (a0, b0) = (a.truncate(n), b.truncate(n));
                    if let Some(down) = t.ok(g.edge_at_depth(&a0, &b0), || name.clone()) {
                        t.check(down, || format!("{name}: ({a}, {b}) ∈ E_{} but ({a0}, {b0}) ∉ E_{n}", n + 1));
                    }
                }
            }
        }
        // Exactness: non-edges separate for good, edges never do.
        let mut r = rng(cfg.seed, 70, gi, 0);
        for (u, v) in concrete_pairs(g, &mut r, cfg.samples / 5) {
            let Some(adj) = t.ok(g.adjacent(&u, &v), || name.clone()) else {
                continue;
            };
            if adj {
                for n in 1..=horizon {
                    if let Some(e) = t.ok(g.edge_at_depth(&u.truncate(n), &v.truncate(n)), || name.clone()) {
                        t.check(e, || format!("{name}: edge {u}, {v} missing from E_{n}"));
                    }
                }
                continue;
            }
            let Some(d) = t.ok(g.nonadjacency_depth(&u, &v), || format!("{name}: {u}, {v}")) else {
                continue;
            };
            for n in d..=horizon.max(d) {
                if let Some(e) = t.ok(g.edge_at_depth(&u.truncate(n), &v.truncate(n)), || name.clone()) {
                    t.check(!e, || format!("{name}: non-edge {u}, {v} returns to E_{n} after separating at {d}"));
                }
            }
        }
        t
    });
    Tally::merged(parts).report(
        "AC7",
        "E_n monotone in n; non-edges separate at a finite depth and stay separated",
    )
}

// ---------------------------------------------------------------- words

fn confluence(cfg: &CheckConfig) -> CriterionReport {
    sampled(cfg, 20, cfg.samples, |fx, r, t| {
        let w = fx.word(r, 8, 3);
        let g = &fx.graph;
        let Some(base) = t.ok(reduce(&w, g), || fx.show(&w)) else { return };
        let Some(canon) = t.ok(canonical(&w, g), || fx.show(&w)) else { return };
        for _ in 0..3 {
            let mut pick = |k: usize| r.gen_range(0..k);
            let Some(other) = t.ok(reduce_by(&w, g, &mut pick), || fx.show(&w)) else { return };
            t.check(other.len() == base.len(), || {
                format!("{}: {} reduces to {} and {} syllables", fx.name, fx.show(&w), base.len(), other.len())
            });
            if let Some(c) = t.ok(canonical(&other, g), || fx.show(&other)) {
                t.check(c == canon, || format!("{}: canonical form of {} depends on merge order", fx.name, fx.show(&w)));
            }
        }
    })
    .report("words.confluence", "reduction length and canonical form ignore merge order")
}

fn group_laws(cfg: &CheckConfig) -> CriterionReport {
    sampled(cfg, 21, cfg.samples, |fx, r, t| {
        let g = &fx.graph;
        let (u, v, w) = (fx.word(r, 6, 3), fx.word(r, 6, 3), fx.word(r, 6, 3));
        if let Some(c) = t.ok(canonical(&u.concat(&u.invert(g), g), g), || fx.show(&u)) {
            t.check(c.is_identity(), || format!("{}: u·u⁻¹ ≠ e for u = {}", fx.name, fx.show(&u)));
        }
        let left = u.concat(&v, g).concat(&w, g);
        let right = u.concat(&v.concat(&w, g), g);
        if let (Some(a), Some(b)) = (t.ok(canonical(&left, g), || fx.show(&left)), t.ok(canonical(&right, g), || fx.show(&right))) {
            t.check(a == b, || {
                format!("{}: associativity fails for {}, {}, {}", fx.name, fx.show(&u), fx.show(&v), fx.show(&w))
            });
        }
    })
    .report("words.group-laws", "inverses cancel and concatenation is associative")
}

/// Every 3-vertex finite graph: 8 edge subsets × orders in {2, 3, ∞}³.
fn three_vertex_graphs() -> Vec<GraphInstance> {
    let orders = [Order::Finite(2), Order::Finite(3), Order::Infinite];
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let mut out = Vec::new();
    for mask in 0..8u32 {
        let edges: Vec<(usize, usize)> = (0..3).filter(|i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
        for &x in &orders {
            for &y in &orders {
                for &z in &orders {
                    out.push(fixtures::finite_graph(&[x, y, z], &edges));
                }
            }
        }
    }
    out
}

/// All spellings with at most `syllables` syllables, consecutive vertices
/// distinct, exponents in {±1, ±2}.
fn small_words(g: &GraphInstance, syllables: usize) -> Vec<Word<VertexPath>> {
    let vs: Vec<VertexPath> = g.named_vertices().iter().map(|(_, v)| (*v).clone()).collect();
    let mut layer: Vec<Vec<Syllable<VertexPath>>> = vec![vec![]];
    let mut out = vec![Word::empty()];
    for _ in 0..syllables {
        let mut next = Vec::new();
        for w in &layer {
            for v in &vs {
                if w.last().is_some_and(|s: &Syllable<VertexPath>| &s.vertex == v) {
                    continue;
                }
                for e in [-2, -1, 1, 2] {
                    let mut x = w.clone();
                    x.push(Syllable::new(v.clone(), e));
                    next.push(x);
                }
            }
        }
        out.extend(next.iter().map(|s| Word::from_syllables(s.iter().cloned(), g)));
        layer = next;
    }
    out
}

fn graph_label(g: &GraphInstance) -> String {
    let orders: Vec<String> = g.named_vertices().iter().map(|(_, v)| g.order_of(v).to_string()).collect();
    let edges = match g.oracle() {
        EdgeOracle::Finite { edges, .. } => edges
            .iter()
            .filter(|(x, y)| x < y)
            .map(|(x, y)| format!("{x}{y}"))
            .collect::<Vec<_>>()
            .join(","),
        EdgeOracle::ClopenBoxes { .. } => String::new(),
    };
    format!("orders ({}) edges {{{edges}}}", orders.join(","))
}

fn truncation_well_defined(cfg: &CheckConfig) -> CriterionReport {
    let graphs = three_vertex_graphs();
    let parts = cfg.exec.map(&graphs, |g| {
        let mut t = Tally::default();
        let show = |w: &Word<VertexPath>| w.render(|v| g.name_of(v).unwrap_or("?").to_string());
        let mut classes: HashMap<NormalForm<VertexPath>, Vec<Word<VertexPath>>> = HashMap::new();
        for w in small_words(g, 4) {
            if let Some(c) = t.ok(canonical(&w, g), || show(&w)) {
                classes.entry(c).or_default().push(w);
            }
        }
        for n in 1..=cfg.depth {
            let Some(pres) = t.ok(Truncation::new(g, n), String::new) else { continue };
            for members in classes.values() {
                let mut images = members.iter().map(|w| {
                    truncate_word(w, n, g).and_then(|tw| canonical(&tw, &pres))
                });
                let Some(first) = images.next().and_then(|r| t.ok(r, String::new)) else { continue };
                for (w, img) in members.iter().skip(1).zip(images) {
                    if let Some(img) = t.ok(img, || show(w)) {
                        t.check(img == first, || {
                            format!("{}: {} and {} differ in G_{n}", graph_label(g), show(&members[0]), show(w))
                        });
                    }
                }
            }
        }
        t
    });
    Tally::merged(parts).report("words.truncation", "equal words stay equal in every G_n")
}

// --------------------------------------------------------------- oracle

/// Exact comparison of `equal` and `oracle_equal` over all pairs of a word
/// corpus, without enumerating the pairs.
///
/// Words are grouped by canonical form. Two descending closures meet exactly
/// when they share a member, so a member reached from two different classes
/// is a disagreement, and the absence of such members settles every pair
/// across classes. Within a class every pair must meet; that is immediate
/// when all members have the same set of shortest descendants, and otherwise
/// is checked pair by pair.
fn compare_corpus(g: &GraphInstance, words: &[Word<VertexPath>], max_len: usize, t: &mut Tally) {
    let show = |w: &Word<VertexPath>| w.render(|v| g.name_of(v).unwrap_or("?").to_string());
    let label = graph_label(g);
    let Some(alphabet) = t.ok(Alphabet::of_words(words, g), || label.clone()) else {
        return;
    };
    let mut class_of: HashMap<NormalForm<VertexPath>, usize> = HashMap::new();
    let mut classes: Vec<Vec<(usize, ClosureClass)>> = Vec::new();
    let mut owner: HashMap<Vec<Letter>, (usize, usize)> = HashMap::new();
    for (i, w) in words.iter().enumerate() {
        let Some(c) = t.ok(canonical(w, g), || show(w)) else { continue };
        let letters = alphabet.expand(w).expect("alphabet covers the corpus");
        let Some(closure) = t.ok(alphabet.closure_of_letters(letters, Moves::Descending, max_len), || show(w)) else {
            continue;
        };
        let next = classes.len();
        let k = *class_of.entry(c).or_insert(next);
        if k == next {
            classes.push(Vec::new());
        }
        for m in &closure.members {
            match owner.get(m) {
                None => {
                    owner.insert(m.clone(), (k, i));
                }
                Some(&(k2, j)) if k2 != k => t.fail(format!(
                    "{label}: {} and {} are unequal but the oracle joins them",
                    show(&words[j]),
                    show(w)
                )),
                Some(_) => {}
            }
        }
        classes[k].push((i, closure));
    }
    let n = words.len() as u64;
    t.checked += n * (n + 1) / 2;
    for members in &classes {
        let shortest = members[0].1.shortest();
        if members.iter().all(|(_, c)| c.shortest() == shortest) {
            continue;
        }
        for (a, (i, ci)) in members.iter().enumerate() {
            for (j, cj) in &members[a + 1..] {
                if !ci.intersects(cj) {
                    t.fail(format!(
                        "{label}: {} and {} are equal but the oracle separates them",
                        show(&words[*i]),
                        show(&words[*j])
                    ));
                }
            }
        }
    }
}

fn ac1_oracle_equivalence(cfg: &CheckConfig) -> CriterionReport {
    let graphs = three_vertex_graphs();
    let parts = cfg.exec.map_range(graphs.len(), |gi| {
        let g = &graphs[gi];
        let mut t = Tally::default();
        let words = small_words(g, 4);
        compare_corpus(g, &words, cfg.max_len, &mut t);
        // Direct spot checks of the two public entry points.
        let mut r = rng(cfg.seed, 30, gi, 0);
        for _ in 0..20 {
            let (a, b) = (&words[r.gen_range(0..words.len())], &words[r.gen_range(0..words.len())]);
            if let (Some(x), Some(y)) = (t.ok(equal(a, b, g), String::new), t.ok(oracle_equal(a, b, g, cfg.max_len), String::new)) {
                t.check(x == y, || format!("{}: equal and oracle_equal disagree on {a} vs {b}", graph_label(g)));
            }
        }
        t
    });
    Tally::merged(parts).report(
        "AC1",
        "equal agrees with the brute-force oracle on all short word pairs over 3-vertex graphs",
    )
}

fn oracle_symmetry(cfg: &CheckConfig) -> CriterionReport {
    let graphs = three_vertex_graphs();
    let parts = cfg.exec.map_range(graphs.len(), |gi| {
        let g = &graphs[gi];
        let mut t = Tally::default();
        let words = small_words(g, 3);
        let mut r = rng(cfg.seed, 31, gi, 0);
        for _ in 0..10 {
            let (a, b) = (&words[r.gen_range(0..words.len())], &words[r.gen_range(0..words.len())]);
            let ab = t.ok(oracle_equal(a, b, g, cfg.max_len), String::new);
            let ba = t.ok(oracle_equal(b, a, g, cfg.max_len), String::new);
            let ca = t.ok(canonical(a, g), String::new).map(NormalForm::into_word);
            if let (Some(ab), Some(ba), Some(ca)) = (ab, ba, ca) {
                t.check(ab == ba, || format!("{}: oracle not symmetric on {a}, {b}", graph_label(g)));
                if let Some(cb) = t.ok(oracle_equal(&ca, b, g, cfg.max_len), String::new) {
                    t.check(ab == cb, || format!("{}: canonicalizing {a} changes the oracle", graph_label(g)));
                }
            }
        }
        t
    });
    Tally::merged(parts).report("oracle.symmetry", "oracle ignores argument order and seed spelling")
}

// ------------------------------------------------------------ ultranorm

fn ac2_ultranorm_axioms(cfg: &CheckConfig) -> CriterionReport {
    sampled(cfg, 40, cfg.samples, |fx, r, t| {
        let g = &fx.graph;
        let (w1, w2) = (fx.word(r, 8, 3), fx.word(r, 8, 3));
        let prod = w1.concat(&w2, g);
        let ctx = || format!("{}: {} , {}", fx.name, fx.show(&w1), fx.show(&w2));
        let (Some(n1), Some(n2), Some(n12), Some(ni)) = (
            t.ok(ultranorm(&w1, g), ctx),
            t.ok(ultranorm(&w2, g), ctx),
            t.ok(ultranorm(&prod, g), ctx),
            t.ok(ultranorm(&w1.invert(g), g), ctx),
        ) else {
            return;
        };
        for (w, n) in [(&w1, &n1), (&w2, &n2), (&prod, &n12)] {
            if let Some(red) = t.ok(reduce(w, g), ctx) {
                t.check(n.value.is_zero() == red.is_empty(), || {
                    format!("{}: d = {} but {} reduces to {} syllables", fx.name, n.value, fx.show(w), red.len())
                });
            }
        }
        t.check(n12.value <= n1.value.max(n2.value), || {
            format!("{}: d(gh) = {} > max({}, {})", ctx(), n12.value, n1.value, n2.value)
        });
        t.check(n1.value == ni.value, || format!("{}: d(g) = {} but d(g⁻¹) = {}", ctx(), n1.value, ni.value));
    })
    .report("AC2", "ultranorm vanishes only at e, satisfies d(gh) ≤ max, and d(g) = d(g⁻¹)")
}

fn ac3_left_invariance(cfg: &CheckConfig) -> CriterionReport {
    sampled(cfg, 41, cfg.samples / 2, |fx, r, t| {
        let g = &fx.graph;
        let (k, x, y) = (fx.word(r, 6, 3), fx.word(r, 6, 3), fx.word(r, 6, 3));
        let ctx = || format!("{}: k = {}, g = {}, h = {}", fx.name, fx.show(&k), fx.show(&x), fx.show(&y));
        let shifted = t.ok(distance(&k.concat(&x, g), &k.concat(&y, g), g), ctx);
        let plain = t.ok(distance(&x, &y, g), ctx);
        if let (Some(a), Some(b)) = (shifted, plain) {
            t.check(a == b, || format!("{}: d(kg, kh) = {a} but d(g, h) = {b}", ctx()));
        }
    })
    .report("AC3", "distance is left-invariant")
}

fn ac4_baire_extension(cfg: &CheckConfig) -> CriterionReport {
    sampled(cfg, 42, cfg.samples / 5, |fx, r, t| {
        let g = &fx.graph;
        let (u, v) = (fx.vertex(r), fx.vertex(r));
        let d = t.ok(distance(&Word::generator(u.clone(), g), &Word::generator(v.clone(), g), g), || {
            format!("{}: {u}, {v}", fx.name)
        });
        if let Some(d) = d {
            t.check(d == u.distance(&v), || format!("{}: d({u}, {v}) = {d} but Baire distance is {}", fx.name, u.distance(&v)));
        }
    })
    .report("AC4", "the group metric extends the Baire metric on generators")
}

/// A word spelling an element whose canonical form agrees with that of `w`
/// up to depth `n`: each syllable's vertex is moved within its depth-`n` cone.
fn perturbed(fx: &Fixture, w: &Word<VertexPath>, n: usize, r: &mut ChaCha8Rng) -> Result<Word<VertexPath>> {
    let c = canonical(w, &fx.graph)?;
    let syllables: Vec<Syllable<VertexPath>> = c
        .word()
        .syllables()
        .iter()
        .map(|s| Syllable::new(fx.vertex_near(&s.vertex, n, r), s.exponent))
        .collect();
    Ok(Word::from_syllables(syllables, &fx.graph))
}

fn ac5_rn_density(cfg: &CheckConfig) -> CriterionReport {
    let depths = 1..cfg.depth.max(2);
    sampled(cfg, 43, cfg.samples / 5, move |fx, r, t| {
        let g = &fx.graph;
        let w = fx.word(r, 6, 3);
        for n in depths.clone() {
            let others = [perturbed(fx, &w, n, r), Ok(fx.word(r, 6, 3))];
            for other in others {
                let ctx = || format!("{}: {} at depth {n}", fx.name, fx.show(&w));
                let Some(x) = t.ok(other, ctx) else { continue };
                let (Some(k1), Some(k2)) = (t.ok(rn_key(&w, g, n), ctx), t.ok(rn_key(&x, g, n), ctx)) else {
                    continue;
                };
                if k1 != k2 {
                    continue;
                }
                if let Some(d) = t.ok(distance(&w, &x, g), ctx) {
                    t.check(d <= UltraValue::exp(n as u32 + 1), || {
                        format!("{}: {} and {} share R_{n} keys but d = {d}", fx.name, fx.show(&w), fx.show(&x))
                    });
                }
            }
        }
    })
    .report("AC5", "words with equal R_n keys lie within 2^-(n+1)")
}

fn strong_triangle(cfg: &CheckConfig) -> CriterionReport {
    sampled(cfg, 44, cfg.samples / 2, |fx, r, t| {
        let g = &fx.graph;
        let (x, y, z) = (fx.word(r, 6, 3), fx.word(r, 6, 3), fx.word(r, 6, 3));
        let ctx = || format!("{}: {}, {}, {}", fx.name, fx.show(&x), fx.show(&y), fx.show(&z));
        if let (Some(xz), Some(xy), Some(yz)) = (
            t.ok(distance(&x, &z, g), ctx),
            t.ok(distance(&x, &y, g), ctx),
            t.ok(distance(&y, &z, g), ctx),
        ) {
            t.check(xz <= xy.max(yz), || format!("{}: d(x,z) = {xz} > max({xy}, {yz})", ctx()));
        }
    })
    .report("ultranorm.strong-triangle", "distance satisfies the strong triangle inequality")
}

/// Symmetry, identity of indiscernibles and the triangle inequality for `D`.
fn check_two_sided<P: Fn(&Word<VertexPath>) -> String>(
    g: &GraphInstance,
    [x, y, z]: [&Word<VertexPath>; 3],
    show: P,
    label: &str,
    t: &mut Tally,
) {
    let ctx = || format!("{label}: {}, {}, {}", show(x), show(y), show(z));
    let (Some(xx), Some(xy), Some(yx), Some(yz), Some(xz), Some(same)) = (
        t.ok(two_sided(x, x, g), ctx),
        t.ok(two_sided(x, y, g), ctx),
        t.ok(two_sided(y, x, g), ctx),
        t.ok(two_sided(y, z, g), ctx),
        t.ok(two_sided(x, z, g), ctx),
        t.ok(equal(x, y, g), ctx),
    ) else {
        return;
    };
    t.check(xx.is_zero(), || format!("{}: D(x, x) = {xx}", ctx()));
    t.check(xy == yx, || format!("{}: D(x, y) = {xy} but D(y, x) = {yx}", ctx()));
    t.check(xy.is_zero() == same, || format!("{}: D(x, y) = {xy} but equal = {same}", ctx()));
    t.check(xz <= &xy + &yz, || format!("{}: D(x, z) = {xz} > {xy} + {yz}", ctx()));
}

fn two_sided_metric(cfg: &CheckConfig) -> CriterionReport {
    sampled(cfg, 45, cfg.samples / 5, |fx, r, t| {
        let (x, y, z) = (fx.word(r, 6, 3), fx.word(r, 6, 3), fx.word(r, 6, 3));
        // Make coincidences likely enough to exercise D = 0.
        let y = if r.gen_bool(0.2) { x.concat(&Word::empty(), &fx.graph) } else { y };
        check_two_sided(&fx.graph, [&x, &y, &z], |w| fx.show(w), &fx.name, t);
    })
    .report("ultranorm.two-sided", "D(g, h) = d(g, h) + d(g⁻¹, h⁻¹) is a metric")
}

// ---------------------------------------------------------------- embed

fn ac6_lemma(cfg: &CheckConfig) -> CriterionReport {
    let corpus = embed::corpus(cfg.seed);
    let parts = cfg.exec.map(&corpus, |inst| {
        let mut t = Tally::default();
        let report = inst.verify_lemma();
        for clause in &report.clauses {
            t.check(clause.passed, || {
                format!("{}-point instance: {:?} fails: {}", inst.len(), clause.clause, clause.failures.join("; "))
            });
        }
        t
    });
    let mut t = Tally::merged(parts);
    t.check(corpus.len() >= 20, || format!("corpus has only {} instances", corpus.len()));
    t.report("AC6", "every clause of the metric-to-ultrametric construction holds on the corpus")
}

fn ac8_instance(inst: &MetricGraphInstance, seed: u64, index: usize, samples: usize) -> Tally {
    let mut t = Tally::default();
    let label = format!("instance {index} ({} points)", inst.len());
    let Some(g) = t.ok(inst.to_graph_instance(), || label.clone()) else {
        return t;
    };
    let etas = inst.eta_table();
    for a in 0..inst.len() {
        for b in 0..inst.len() {
            let (ga, gb) = (Word::generator(etas[a].clone(), &g), Word::generator(etas[b].clone(), &g));
            if let Some(d) = t.ok(distance(&ga, &gb, &g), || label.clone()) {
                let want = etas[a].distance(&etas[b]);
                t.check(d == want, || format!("{label}: d(η_{a}, η_{b}) = {d} but Baire distance is {want}"));
            }
        }
    }
    let fx = Fixture::new(label.clone(), g);
    for s in 0..samples {
        let mut r = rng(seed, 80, index, s);
        let (x, y, z) = (fx.word(&mut r, 5, 3), fx.word(&mut r, 5, 3), fx.word(&mut r, 5, 3));
        check_two_sided(&fx.graph, [&x, &y, &z], |w| fx.show(w), &label, &mut t);
    }
    t
}

fn ac8_pipeline(cfg: &CheckConfig) -> CriterionReport {
    let corpus = embed::corpus(cfg.seed);
    let parts = cfg.exec.map_range(corpus.len(), |i| ac8_instance(&corpus[i], cfg.seed, i, cfg.samples / 5));
    Tally::merged(parts).report(
        "AC8",
        "the embedded graph's group metric extends the Baire metric and D is a metric",
    )
}
