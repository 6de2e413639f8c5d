//! Words in the generators of a graph product of cyclic groups.
//!
//! A [`Word`] is a sequence of syllables `a^α` with consecutive vertices
//! distinct and exponents normalized for the vertex order. [`reduce`] merges
//! pairs `a_p … a_q` with `a_p = a_q` whose in-between vertices all commute
//! with `a_p`, which yields a word with the minimum number of syllables.
//! [`canonical`] then picks the lexicographically least representative of the
//! commutation class, so two words spell the same element iff their
//! canonical forms coincide.
//!
//! Everything is generic over a [`Presentation`], which is implemented both
//! by [`GraphInstance`] (the group itself) and by [`Truncation`] (the
//! quotient graph products `G_n` over `(ω^n, E_n)`).

use std::fmt::{self, Debug, Display};
use std::hash::Hash;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::baire::{Prefix, VertexPath};
use crate::error::{Error, Result};
use crate::graphspec::{GraphInstance, Order};

/// Orders and commutation for a set of generators.
pub trait Presentation {
    type Vertex: Clone + Ord + Eq + Hash + Debug + Display;

    fn order(&self, v: &Self::Vertex) -> Order;

    /// Whether `a` and `b` are joined by an edge (always true for `a = b`).
    fn commute(&self, a: &Self::Vertex, b: &Self::Vertex) -> Result<bool>;
}

impl Presentation for GraphInstance {
    type Vertex = VertexPath;

    fn order(&self, v: &VertexPath) -> Order {
        self.order_of(v)
    }

    fn commute(&self, a: &VertexPath, b: &VertexPath) -> Result<bool> {
        self.adjacent(a, b)
    }
}

/// The graph product `G_n` over `(ω^n, E_n)` with the induced coloring.
#[derive(Debug, Clone, Copy)]
pub struct Truncation<'a> {
    pub graph: &'a GraphInstance,
    pub depth: usize,
}

impl<'a> Truncation<'a> {
    pub fn new(graph: &'a GraphInstance, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::ZeroDepth);
        }
        Ok(Truncation { graph, depth })
    }
}

impl Presentation for Truncation<'_> {
    type Vertex = Prefix;

    fn order(&self, v: &Prefix) -> Order {
        self.graph.coloring().order_by_first(v.entries()[0])
    }

    fn commute(&self, a: &Prefix, b: &Prefix) -> Result<bool> {
        self.graph.edge_at_depth(a, b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Syllable<V> {
    pub vertex: V,
    pub exponent: i64,
}

impl<V> Syllable<V> {
    pub fn new(vertex: V, exponent: i64) -> Self {
        Syllable { vertex, exponent }
    }
}

impl<V: Serialize> Serialize for Syllable<V> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (&self.vertex, self.exponent).serialize(s)
    }
}

impl<'de, V: Deserialize<'de>> Deserialize<'de> for Syllable<V> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (vertex, exponent) = <(V, i64)>::deserialize(d)?;
        Ok(Syllable { vertex, exponent })
    }
}

/// A word with consecutive vertices distinct and normalized exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Word<V> {
    syllables: Vec<Syllable<V>>,
}

impl<V> Default for Word<V> {
    fn default() -> Self {
        Word {
            syllables: Vec::new(),
        }
    }
}

impl<V: Clone + Eq> Word<V> {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a word from arbitrary syllables, merging equal neighbours and
    /// dropping exponents that vanish.
    pub fn from_syllables<P, I>(syllables: I, pres: &P) -> Self
    where
        P: Presentation<Vertex = V> + ?Sized,
        I: IntoIterator<Item = Syllable<V>>,
    {
        let mut w = Word::empty();
        for s in syllables {
            w.push(s, pres);
        }
        w
    }

    pub fn generator<P>(vertex: V, pres: &P) -> Self
    where
        P: Presentation<Vertex = V> + ?Sized,
    {
        Self::from_syllables([Syllable::new(vertex, 1)], pres)
    }

    fn push<P>(&mut self, s: Syllable<V>, pres: &P)
    where
        P: Presentation<Vertex = V> + ?Sized,
    {
        let order = pres.order(&s.vertex);
        match self.syllables.last_mut() {
            Some(last) if last.vertex == s.vertex => {
                match order.normalize(last.exponent + s.exponent) {
                    Some(e) => last.exponent = e,
                    None => {
                        self.syllables.pop();
                    }
                }
            }
            _ => {
                if let Some(e) = order.normalize(s.exponent) {
                    self.syllables.push(Syllable::new(s.vertex, e));
                }
            }
        }
    }

    pub fn syllables(&self) -> &[Syllable<V>] {
        &self.syllables
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Product `self · other` with boundary merging.
    pub fn concat<P>(&self, other: &Self, pres: &P) -> Self
    where
        P: Presentation<Vertex = V> + ?Sized,
    {
        let mut w = self.clone();
        for s in &other.syllables {
            w.push(s.clone(), pres);
        }
        w
    }

    pub fn invert<P>(&self, pres: &P) -> Self
    where
        P: Presentation<Vertex = V> + ?Sized,
    {
        Self::from_syllables(
            self.syllables
                .iter()
                .rev()
                .map(|s| Syllable::new(s.vertex.clone(), -s.exponent)),
            pres,
        )
    }

    pub fn render(&self, name: impl Fn(&V) -> String) -> String {
        if self.syllables.is_empty() {
            return "e".to_string();
        }
        self.syllables
            .iter()
            .map(|s| format!("{}^{}", name(&s.vertex), s.exponent))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl<V: Clone + Eq + DeserializeOwned> Word<V> {
    /// Parses `[[vertex, exponent], …]`, rejecting zero exponents.
    pub fn from_json<P>(text: &str, pres: &P) -> Result<Self>
    where
        P: Presentation<Vertex = V> + ?Sized,
    {
        let raw: Vec<Syllable<V>> = serde_json::from_str(text)?;
        if let Some(i) = raw.iter().position(|s| s.exponent == 0) {
            return Err(Error::Parse(format!("syllable {i} has exponent 0")));
        }
        Ok(Self::from_syllables(raw, pres))
    }
}

impl<V: Display + Clone + Eq> Display for Word<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(|v| v.to_string()))
    }
}

/// A word's syllables over a local table of its distinct vertices, with the
/// commutation matrix precomputed. Merging never introduces new vertices, so
/// the table stays valid throughout reduction.
struct Indexed<V> {
    vertices: Vec<V>,
    orders: Vec<Order>,
    /// Indices follow the total vertex order, since `vertices` is sorted.
    commute: Vec<Vec<bool>>,
    letters: Vec<(usize, i64)>,
}

impl<V: Clone + Ord> Indexed<V> {
    fn new<P>(w: &Word<V>, pres: &P) -> Result<Self>
    where
        P: Presentation<Vertex = V> + ?Sized,
    {
        let mut vertices: Vec<V> = w.syllables.iter().map(|s| s.vertex.clone()).collect();
        vertices.sort();
        vertices.dedup();
        let d = vertices.len();
        let mut commute = vec![vec![true; d]; d];
        for i in 0..d {
            // Surfaces vertices the oracle cannot resolve, even in one-letter words.
            pres.commute(&vertices[i], &vertices[i])?;
            for j in i + 1..d {
                let c = pres.commute(&vertices[i], &vertices[j])?;
                commute[i][j] = c;
                commute[j][i] = c;
            }
        }
        let orders = vertices.iter().map(|v| pres.order(v)).collect();
        let letters = w
            .syllables
            .iter()
            .map(|s| (vertices.binary_search(&s.vertex).unwrap(), s.exponent))
            .collect();
        Ok(Indexed {
            vertices,
            orders,
            commute,
            letters,
        })
    }

    /// All pairs `(p, q)` where `a_q` can be shuffled back onto `a_p`.
    fn mergeable_pairs(&self, first_only: bool) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let k = self.letters.len();
        for p in 0..k {
            let vp = self.letters[p].0;
            for q in p + 1..k {
                let vq = self.letters[q].0;
                if vq == vp {
                    out.push((p, q));
                    if first_only {
                        return out;
                    }
                    break;
                }
                if !self.commute[vp][vq] {
                    break;
                }
            }
        }
        out
    }

    fn merge(&mut self, p: usize, q: usize) {
        let (v, eq) = self.letters.remove(q);
        let merged = self.orders[v].normalize(self.letters[p].1 + eq);
        match merged {
            Some(e) => self.letters[p].1 = e,
            None => {
                self.letters.remove(p);
            }
        }
        // Removing syllables may bring equal vertices together.
        let mut out: Vec<(usize, i64)> = Vec::with_capacity(self.letters.len());
        for &(v, e) in &self.letters {
            match out.last_mut() {
                Some(last) if last.0 == v => match self.orders[v].normalize(last.1 + e) {
                    Some(s) => last.1 = s,
                    None => {
                        out.pop();
                    }
                },
                _ => out.push((v, e)),
            }
        }
        self.letters = out;
    }

    fn reduce_by(&mut self, pick: &mut dyn FnMut(usize) -> usize) {
        loop {
            let pairs = self.mergeable_pairs(false);
            if pairs.is_empty() {
                return;
            }
            let (p, q) = pairs[pick(pairs.len()) % pairs.len()];
            self.merge(p, q);
        }
    }

    fn reduce(&mut self) {
        while let Some(&(p, q)) = self.mergeable_pairs(true).first() {
            self.merge(p, q);
        }
    }

    /// Greedy lexicographically least shuffle of a reduced word.
    fn lex_least(&mut self) {
        let mut rest = std::mem::take(&mut self.letters);
        let mut out = Vec::with_capacity(rest.len());
        while !rest.is_empty() {
            let mut best: Option<usize> = None;
            for j in 0..rest.len() {
                let (vj, ej) = rest[j];
                let movable = rest[..j]
                    .iter()
                    .all(|&(vi, _)| vi != vj && self.commute[vi][vj]);
                if !movable {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some(b) => (vj, ej) < rest[b],
                };
                if better {
                    best = Some(j);
                }
            }
            // The first syllable is always movable.
            out.push(rest.remove(best.unwrap_or(0)));
        }
        self.letters = out;
    }

    fn into_word(self) -> Word<V> {
        Word {
            syllables: self
                .letters
                .into_iter()
                .map(|(v, e)| Syllable::new(self.vertices[v].clone(), e))
                .collect(),
        }
    }
}

/// Reduces `w` by leftmost merges until no mergeable pair remains.
pub fn reduce<P>(w: &Word<P::Vertex>, pres: &P) -> Result<Word<P::Vertex>>
where
    P: Presentation + ?Sized,
{
    let mut ix = Indexed::new(w, pres)?;
    ix.reduce();
    Ok(ix.into_word())
}

/// Reduction where `pick(k)` chooses which of the `k` currently mergeable
/// pairs to merge next. The resulting length does not depend on the choices.
pub fn reduce_by<P>(
    w: &Word<P::Vertex>,
    pres: &P,
    pick: &mut dyn FnMut(usize) -> usize,
) -> Result<Word<P::Vertex>>
where
    P: Presentation + ?Sized,
{
    let mut ix = Indexed::new(w, pres)?;
    ix.reduce_by(pick);
    Ok(ix.into_word())
}

/// The canonical normal form: reduced, then lexicographically least over its
/// commutation class (vertex order first, then exponent).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NormalForm<V>(pub Word<V>);

impl<V> NormalForm<V> {
    pub fn word(&self) -> &Word<V> {
        &self.0
    }

    pub fn into_word(self) -> Word<V> {
        self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.syllables.is_empty()
    }
}

pub fn canonical<P>(w: &Word<P::Vertex>, pres: &P) -> Result<NormalForm<P::Vertex>>
where
    P: Presentation + ?Sized,
{
    let mut ix = Indexed::new(w, pres)?;
    ix.reduce();
    ix.lex_least();
    Ok(NormalForm(ix.into_word()))
}

/// Whether the two words spell the same element.
pub fn equal<P>(w1: &Word<P::Vertex>, w2: &Word<P::Vertex>, pres: &P) -> Result<bool>
where
    P: Presentation + ?Sized,
{
    Ok(canonical(w1, pres)? == canonical(w2, pres)?)
}

/// Replaces every vertex by its length-`n` truncation: the image of `w` in `G_n`.
pub fn truncate_word(w: &Word<VertexPath>, n: usize, graph: &GraphInstance) -> Result<Word<Prefix>> {
    let pres = Truncation::new(graph, n)?;
    Ok(Word::from_syllables(
        w.syllables
            .iter()
            .map(|s| Syllable::new(s.vertex.truncate(n), s.exponent)),
        &pres,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphspec::fixtures;

    /// Vertices `a < b < c` as named in the fixtures.
    fn graph(orders: &[Order], edges: &[(usize, usize)]) -> GraphInstance {
        fixtures::finite_graph(orders, edges)
    }

    fn word(g: &GraphInstance, spec: &[(&str, i64)]) -> Word<VertexPath> {
        Word::from_syllables(
            spec.iter()
                .map(|&(n, e)| Syllable::new(g.vertex_named(n).unwrap().clone(), e)),
            g,
        )
    }

    fn names(g: &GraphInstance, w: &Word<VertexPath>) -> Vec<(String, i64)> {
        w.syllables()
            .iter()
            .map(|s| (g.name_of(&s.vertex).unwrap().to_string(), s.exponent))
            .collect()
    }

    fn spelled(spec: &[(&str, i64)]) -> Vec<(String, i64)> {
        spec.iter().map(|&(n, e)| (n.to_string(), e)).collect()
    }

    const INF: Order = Order::Infinite;

    #[test]
    fn vertex_order_matches_names() {
        let g = graph(&[INF, INF, INF], &[]);
        let a = g.vertex_named("a").unwrap();
        let b = g.vertex_named("b").unwrap();
        let c = g.vertex_named("c").unwrap();
        assert!(a < b && b < c);
    }

    #[test]
    fn concat_examples() {
        let g = graph(&[INF, INF], &[]);
        let w = word(&g, &[("a", 1)]).concat(&word(&g, &[("a", -1)]), &g);
        assert!(w.is_empty());

        let g2 = graph(&[Order::Finite(2), INF], &[]);
        let w = word(&g2, &[("a", 1)]).concat(&word(&g2, &[("a", 1)]), &g2);
        assert!(w.is_empty());

        // a^1 b^1 · b^1 a^1 with b of order 2: b cancels, a's merge.
        let g3 = graph(&[INF, Order::Finite(2)], &[]);
        let w = word(&g3, &[("a", 1), ("b", 1)]).concat(&word(&g3, &[("b", 1), ("a", 1)]), &g3);
        assert_eq!(names(&g3, &w), spelled(&[("a", 2)]));
    }

    #[test]
    fn invert_examples() {
        let g = graph(&[INF, INF], &[]);
        assert!(Word::<VertexPath>::empty().invert(&g).is_empty());
        let w = word(&g, &[("a", 1), ("b", 2)]).invert(&g);
        assert_eq!(names(&g, &w), spelled(&[("b", -2), ("a", -1)]));

        let g3 = graph(&[Order::Finite(3)], &[]);
        let w = word(&g3, &[("a", 1)]).invert(&g3);
        assert_eq!(names(&g3, &w), spelled(&[("a", 2)]));
    }

    #[test]
    fn reduce_examples() {
        let g = graph(&[Order::Finite(2), INF], &[(0, 1)]);
        let w = word(&g, &[("a", 1), ("b", 1), ("a", 1)]);
        assert_eq!(names(&g, &reduce(&w, &g).unwrap()), spelled(&[("b", 1)]));

        let g = graph(&[INF, INF], &[]);
        let w = word(&g, &[("a", 1), ("b", 1), ("a", -1)]);
        assert_eq!(reduce(&w, &g).unwrap(), w);

        // a b b^-1 a collapses already during construction.
        let w = word(&g, &[("a", 1), ("b", 1), ("b", -1), ("a", 1)]);
        assert_eq!(names(&g, &reduce(&w, &g).unwrap()), spelled(&[("a", 2)]));
    }

    #[test]
    fn reduce_cascades_after_deletion() {
        // a b c b^-1 a^-1 with c commuting with b only: b's cancel, then a's.
        let g = graph(&[INF, INF, Order::Finite(2)], &[(1, 2)]);
        let w = word(&g, &[("a", 1), ("b", 1), ("c", 1), ("b", -1), ("a", -1)]);
        assert_eq!(names(&g, &reduce(&w, &g).unwrap()), spelled(&[("a", 1), ("c", 1), ("a", -1)]));
    }

    #[test]
    fn canonical_examples() {
        let g = graph(&[INF, INF], &[(0, 1)]);
        let w = word(&g, &[("b", 1), ("a", 1)]);
        assert_eq!(names(&g, canonical(&w, &g).unwrap().word()), spelled(&[("a", 1), ("b", 1)]));

        let g = graph(&[INF, INF], &[]);
        let w = word(&g, &[("b", 1), ("a", 1)]);
        assert_eq!(names(&g, canonical(&w, &g).unwrap().word()), spelled(&[("b", 1), ("a", 1)]));

        // c commutes with a and b, which do not commute with each other:
        // the class is {c a b, a c b, a b c}, whose least member is a b c.
        let g = graph(&[INF, INF, INF], &[(0, 2), (1, 2)]);
        let w = word(&g, &[("c", 1), ("a", 1), ("b", 1)]);
        let got = canonical(&w, &g).unwrap();
        assert_eq!(names(&g, got.word()), spelled(&[("a", 1), ("b", 1), ("c", 1)]));
        assert_eq!(Some(got.into_word()), shuffle_class(&w, &g).into_iter().min_by(|x, y| lex_key(x).cmp(&lex_key(y))));
    }

    fn lex_key(w: &Word<VertexPath>) -> Vec<(VertexPath, i64)> {
        w.syllables().iter().map(|s| (s.vertex.clone(), s.exponent)).collect()
    }

    /// Every spelling reachable by swapping neighbouring commuting syllables.
    fn shuffle_class(w: &Word<VertexPath>, g: &GraphInstance) -> Vec<Word<VertexPath>> {
        let mut seen = vec![w.clone()];
        let mut i = 0;
        while i < seen.len() {
            let cur = seen[i].syllables().to_vec();
            for k in 0..cur.len().saturating_sub(1) {
                if g.adjacent(&cur[k].vertex, &cur[k + 1].vertex).unwrap() {
                    let mut next = cur.clone();
                    next.swap(k, k + 1);
                    let next = Word::from_syllables(next, g);
                    if !seen.contains(&next) {
                        seen.push(next);
                    }
                }
            }
            i += 1;
        }
        seen
    }

    #[test]
    fn canonical_is_least_in_shuffle_class() {
        let g = graph(&[INF, Order::Finite(3), INF, Order::Finite(2)], &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        let spellings: [&[(&str, i64)]; 3] = [
            &[("d", 1), ("c", -1), ("b", 2), ("a", 1)],
            &[("c", 2), ("a", -1), ("d", 1), ("b", 1), ("c", 1)],
            &[("b", 1), ("d", 1), ("a", 3), ("c", 1)],
        ];
        for spec in spellings {
            let w = reduce(&word(&g, spec), &g).unwrap();
            let class = shuffle_class(&w, &g);
            let least = class.iter().min_by(|x, y| lex_key(x).cmp(&lex_key(y))).unwrap();
            assert_eq!(canonical(&w, &g).unwrap().word(), least);
            for other in &class {
                assert_eq!(canonical(other, &g).unwrap().word(), least);
            }
        }
    }

    #[test]
    fn equal_examples() {
        let g = graph(&[INF, INF], &[(0, 1)]);
        let ab = word(&g, &[("a", 1), ("b", 1)]);
        let ba = word(&g, &[("b", 1), ("a", 1)]);
        assert!(equal(&ab, &ba, &g).unwrap());
        assert!(equal(&ab, &ab.concat(&Word::empty(), &g), &g).unwrap());

        let g = graph(&[INF, INF], &[]);
        let ab = word(&g, &[("a", 1), ("b", 1)]);
        let ba = word(&g, &[("b", 1), ("a", 1)]);
        assert!(!equal(&ab, &ba, &g).unwrap());
    }

    #[test]
    fn truncate_word_examples() {
        let g = GraphInstance::new(
            crate::graphspec::EdgeOracle::ClopenBoxes { boxes: vec![] },
            crate::graphspec::Coloring::uniform(INF),
        );
        let eta = VertexPath::new(vec![0, 1], 0);
        let nu = VertexPath::new(vec![0, 2], 0);
        let w = Word::from_syllables([Syllable::new(eta, -1), Syllable::new(nu, 1)], &g);
        assert!(truncate_word(&w, 1, &g).unwrap().is_empty());
        let t2 = truncate_word(&w, 2, &g).unwrap();
        assert_eq!(
            t2.syllables(),
            &[
                Syllable::new(Prefix(vec![0, 1]), -1),
                Syllable::new(Prefix(vec![0, 2]), 1)
            ]
        );
        assert_eq!(truncate_word(&w, 0, &g), Err(Error::ZeroDepth));
    }

    #[test]
    fn unknown_vertices_surface() {
        let g = graph(&[INF, INF], &[]);
        let stranger = VertexPath::constant(77);
        let w = Word::from_syllables(
            [
                Syllable::new(g.vertex_named("a").unwrap().clone(), 1),
                Syllable::new(stranger.clone(), 1),
            ],
            &g,
        );
        assert_eq!(reduce(&w, &g), Err(Error::UnknownVertex(stranger)));
    }

    #[test]
    fn json_words() {
        let g = graph(&[INF, Order::Finite(3)], &[]);
        let a = serde_json::to_string(g.vertex_named("a").unwrap()).unwrap();
        let b = serde_json::to_string(g.vertex_named("b").unwrap()).unwrap();
        let text = format!("[[{a}, 1], [{b}, -1], [{b}, 3]]");
        let w = Word::from_json(&text, &g).unwrap();
        assert_eq!(names(&g, &w), spelled(&[("a", 1), ("b", 2)]));
        let back = Word::from_json(&serde_json::to_string(&w).unwrap(), &g).unwrap();
        assert_eq!(back, w);
        assert!(Word::<VertexPath>::from_json(&format!("[[{a}, 0]]"), &g).is_err());
        assert!(Word::<VertexPath>::from_json("[[1, 2]]", &g).is_err());
    }
}
