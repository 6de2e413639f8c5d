//! Brute-force word problem by breadth-first search over letter words.
//!
//! Words are expanded into single letters: `a^α` becomes `|α|` copies of `a`
//! or `a⁻¹` for infinite order, and `α mod m` copies of `a` for finite order
//! `m`. The moves are the defining relations of the group, applied locally:
//!
//! 1. swap neighbouring letters whose distinct vertices are joined;
//! 2. delete (or insert) `x x⁻¹` for infinite-order `x`;
//! 3. delete (or insert) `a^m` for `a` of finite order `m`.
//!
//! With [`Moves::Full`] insertions are allowed up to `max_len` letters, which
//! explores the presentation directly. [`Moves::Descending`] only swaps and
//! deletes; it never leaves the length of the seed and is what the large
//! exhaustive comparisons use.
//!
//! Nothing here touches syllable reduction or canonical forms.

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::graphspec::Order;
use crate::words::{Presentation, Word};

/// `vertex index << 1 | inverse bit`.
pub type Letter = u16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Moves {
    Full,
    Descending,
}

/// The generators seen by the oracle, with their orders and commutation.
#[derive(Debug, Clone)]
pub struct Alphabet<V> {
    vertices: Vec<V>,
    orders: Vec<Order>,
    commute: Vec<Vec<bool>>,
}

impl<V: Clone + Ord> Alphabet<V> {
    pub fn new<P>(vertices: impl IntoIterator<Item = V>, pres: &P) -> Result<Self>
    where
        P: Presentation<Vertex = V> + ?Sized,
    {
        let mut vertices: Vec<V> = vertices.into_iter().collect();
        vertices.sort();
        vertices.dedup();
        let orders = vertices.iter().map(|v| pres.order(v)).collect();
        let mut commute = vec![vec![true; vertices.len()]; vertices.len()];
        for i in 0..vertices.len() {
            for j in 0..vertices.len() {
                if i != j {
                    commute[i][j] = pres.commute(&vertices[i], &vertices[j])?;
                }
            }
        }
        Ok(Alphabet {
            vertices,
            orders,
            commute,
        })
    }

    /// The alphabet of all vertices occurring in the given words.
    pub fn of_words<'a, P>(words: impl IntoIterator<Item = &'a Word<V>>, pres: &P) -> Result<Self>
    where
        P: Presentation<Vertex = V> + ?Sized,
        V: 'a,
    {
        let vertices = words
            .into_iter()
            .flat_map(|w| w.syllables().iter().map(|s| s.vertex.clone()));
        Self::new(vertices, pres)
    }

    pub fn vertices(&self) -> &[V] {
        &self.vertices
    }

    /// Letter expansion of a word; `None` if it uses a vertex outside the alphabet.
    pub fn expand(&self, w: &Word<V>) -> Option<Vec<Letter>> {
        let mut out = Vec::new();
        for s in w.syllables() {
            let v = self.vertices.binary_search(&s.vertex).ok()?;
            let (count, inverse) = match self.orders[v] {
                Order::Finite(m) => (s.exponent.rem_euclid(m as i64) as usize, false),
                Order::Infinite => (s.exponent.unsigned_abs() as usize, s.exponent < 0),
            };
            let letter = ((v as Letter) << 1) | inverse as Letter;
            out.extend(std::iter::repeat_n(letter, count));
        }
        Some(out)
    }

    fn vertex(letter: Letter) -> usize {
        (letter >> 1) as usize
    }

    fn neighbours(&self, w: &[Letter], moves: Moves, max_len: usize, out: &mut Vec<Vec<Letter>>) {
        for i in 0..w.len().saturating_sub(1) {
            let (a, b) = (Self::vertex(w[i]), Self::vertex(w[i + 1]));
            if a != b && self.commute[a][b] {
                let mut s = w.to_vec();
                s.swap(i, i + 1);
                out.push(s);
            }
            if w[i] ^ 1 == w[i + 1] {
                let mut s = w.to_vec();
                s.drain(i..i + 2);
                out.push(s);
            }
        }
        for i in 0..w.len() {
            if let Order::Finite(m) = self.orders[Self::vertex(w[i])] {
                let m = m as usize;
                if i + m <= w.len() && w[i..i + m].iter().all(|&x| x == w[i]) {
                    let mut s = w.to_vec();
                    s.drain(i..i + m);
                    out.push(s);
                }
            }
        }
        if moves == Moves::Full {
            for (v, order) in self.orders.iter().enumerate() {
                let x = (v as Letter) << 1;
                let insertions: Vec<Vec<Letter>> = match *order {
                    Order::Infinite => vec![vec![x, x | 1], vec![x | 1, x]],
                    Order::Finite(m) => vec![vec![x; m as usize]],
                };
                for ins in insertions {
                    if w.len() + ins.len() > max_len {
                        continue;
                    }
                    for pos in 0..=w.len() {
                        let mut s = Vec::with_capacity(w.len() + ins.len());
                        s.extend_from_slice(&w[..pos]);
                        s.extend_from_slice(&ins);
                        s.extend_from_slice(&w[pos..]);
                        out.push(s);
                    }
                }
            }
        }
    }

    /// Breadth-first closure of a letter word under the chosen moves.
    pub fn closure_of_letters(&self, seed: Vec<Letter>, moves: Moves, max_len: usize) -> Result<ClosureClass> {
        if seed.len() > max_len {
            return Err(Error::BoundTooSmall {
                needed: seed.len(),
                max_len,
            });
        }
        let mut members = HashSet::new();
        let mut queue = VecDeque::new();
        members.insert(seed.clone());
        queue.push_back(seed.clone());
        let mut scratch = Vec::new();
        while let Some(w) = queue.pop_front() {
            scratch.clear();
            self.neighbours(&w, moves, max_len, &mut scratch);
            for next in scratch.drain(..) {
                if !members.contains(&next) {
                    members.insert(next.clone());
                    queue.push_back(next);
                }
            }
        }
        Ok(ClosureClass {
            seed,
            members,
            max_len,
        })
    }

    pub fn closure(&self, w: &Word<V>, moves: Moves, max_len: usize) -> Result<ClosureClass> {
        let letters = self
            .expand(w)
            .ok_or_else(|| Error::InvalidParameter("word uses a vertex outside the alphabet".into()))?;
        self.closure_of_letters(letters, moves, max_len)
    }
}

/// All letter words reachable from a seed within the length bound.
#[derive(Debug, Clone)]
pub struct ClosureClass {
    pub seed: Vec<Letter>,
    pub members: HashSet<Vec<Letter>>,
    pub max_len: usize,
}

impl ClosureClass {
    pub fn contains(&self, letters: &[Letter]) -> bool {
        self.members.contains(letters)
    }

    pub fn contains_empty(&self) -> bool {
        self.members.contains(&Vec::new())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn intersects(&self, other: &ClosureClass) -> bool {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.members.iter().any(|w| large.members.contains(w))
    }

    /// Members of minimum length, sorted.
    pub fn shortest(&self) -> Vec<Vec<Letter>> {
        let min = self.members.iter().map(Vec::len).min().unwrap_or(0);
        let mut out: Vec<_> = self.members.iter().filter(|w| w.len() == min).cloned().collect();
        out.sort();
        out
    }
}

/// Closure of a single word over its own vertices.
pub fn closure<P>(w: &Word<P::Vertex>, pres: &P, max_len: usize, moves: Moves) -> Result<ClosureClass>
where
    P: Presentation + ?Sized,
{
    Alphabet::of_words([w], pres)?.closure(w, moves, max_len)
}

/// Whether the closures of the two words intersect, using the descending moves.
pub fn oracle_equal<P>(w1: &Word<P::Vertex>, w2: &Word<P::Vertex>, pres: &P, max_len: usize) -> Result<bool>
where
    P: Presentation + ?Sized,
{
    oracle_equal_with(w1, w2, pres, max_len, Moves::Descending)
}

pub fn oracle_equal_with<P>(
    w1: &Word<P::Vertex>,
    w2: &Word<P::Vertex>,
    pres: &P,
    max_len: usize,
    moves: Moves,
) -> Result<bool>
where
    P: Presentation + ?Sized,
{
    let alphabet = Alphabet::of_words([w1, w2], pres)?;
    let c1 = alphabet.closure(w1, moves, max_len)?;
    let c2 = alphabet.closure(w2, moves, max_len)?;
    Ok(c1.intersects(&c2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baire::VertexPath;
    use crate::graphspec::{fixtures, GraphInstance};
    use crate::words::{self, Syllable};

    const INF: Order = Order::Infinite;

    fn word(g: &GraphInstance, spec: &[(&str, i64)]) -> Word<VertexPath> {
        Word::from_syllables(
            spec.iter()
                .map(|&(n, e)| Syllable::new(g.vertex_named(n).unwrap().clone(), e)),
            g,
        )
    }

    fn raw_word(g: &GraphInstance, spec: &[(&str, i64)]) -> Vec<Letter> {
        let alphabet = Alphabet::new(g.named_vertices().into_iter().map(|(_, v)| v.clone()), g).unwrap();
        spec.iter()
            .flat_map(|&(n, e)| {
                let w = word(g, &[(n, e)]);
                alphabet.expand(&w).unwrap()
            })
            .collect()
    }

    #[test]
    fn cancelling_pair_reaches_empty() {
        let g = fixtures::free(&[INF, INF]);
        let alphabet = Alphabet::new(g.named_vertices().into_iter().map(|(_, v)| v.clone()), &g).unwrap();
        let letters = raw_word(&g, &[("a", 1), ("a", -1)]);
        assert_eq!(letters.len(), 2);
        for moves in [Moves::Full, Moves::Descending] {
            assert!(alphabet.closure_of_letters(letters.clone(), moves, 6).unwrap().contains_empty());
        }
    }

    #[test]
    fn aba_with_involution_reaches_b() {
        // a b a → a a b → b, with a of order 2 joined to b.
        let g = fixtures::finite_graph(&[Order::Finite(2), INF], &[(0, 1)]);
        let alphabet = Alphabet::new(g.named_vertices().into_iter().map(|(_, v)| v.clone()), &g).unwrap();
        let seed = raw_word(&g, &[("a", 1), ("b", 1), ("a", 1)]);
        let class = alphabet.closure_of_letters(seed, Moves::Full, 5).unwrap();
        assert!(class.contains(&raw_word(&g, &[("b", 1)])));
    }

    #[test]
    fn ab_and_ba_differ_without_edge() {
        let g = fixtures::free(&[INF, INF]);
        let ab = word(&g, &[("a", 1), ("b", 1)]);
        let ba = word(&g, &[("b", 1), ("a", 1)]);
        let class = closure(&ab, &g, 6, Moves::Full).unwrap();
        let alphabet = Alphabet::of_words([&ab], &g).unwrap();
        assert!(!class.contains(&alphabet.expand(&ba).unwrap()));
        assert!(class.len() > 1);
        assert!(!oracle_equal_with(&ab, &ba, &g, 6, Moves::Full).unwrap());
    }

    #[test]
    fn oracle_equal_examples() {
        let g = fixtures::complete(&[INF, INF]);
        let ab = word(&g, &[("a", 1), ("b", 1)]);
        let ba = word(&g, &[("b", 1), ("a", 1)]);
        assert!(oracle_equal(&ab, &ab, &g, 12).unwrap());
        assert!(oracle_equal(&ab, &ba, &g, 12).unwrap());

        let g3 = fixtures::free(&[Order::Finite(3)]);
        let a1 = word(&g3, &[("a", 1)]);
        let a2 = word(&g3, &[("a", 2)]);
        assert!(!oracle_equal_with(&a1, &a2, &g3, 8, Moves::Full).unwrap());
        assert!(!oracle_equal(&a1, &a2, &g3, 8).unwrap());
    }

    #[test]
    fn bound_too_small_is_an_error() {
        let g = fixtures::free(&[INF]);
        let w = word(&g, &[("a", 5)]);
        assert_eq!(
            closure(&w, &g, 4, Moves::Descending).unwrap_err(),
            Error::BoundTooSmall { needed: 5, max_len: 4 }
        );
    }

    #[test]
    fn closure_is_symmetric_and_seed_independent() {
        let g = fixtures::finite_graph(&[Order::Finite(2), INF, Order::Finite(3)], &[(0, 2), (1, 2)]);
        let w1 = word(&g, &[("c", 1), ("a", 1), ("b", -1), ("a", 1)]);
        let w2 = word(&g, &[("b", -1), ("c", 1)]);
        assert_eq!(
            oracle_equal(&w1, &w2, &g, 12).unwrap(),
            oracle_equal(&w2, &w1, &g, 12).unwrap()
        );
        let c = words::canonical(&w1, &g).unwrap().into_word();
        let alphabet = Alphabet::of_words([&w1, &w2], &g).unwrap();
        let from_raw = alphabet.closure(&w1, Moves::Full, 8).unwrap();
        let from_canonical = alphabet.closure(&c, Moves::Full, 8).unwrap();
        assert!(from_raw.intersects(&from_canonical));
        assert_eq!(from_raw.members, from_canonical.members);
    }

    /// Descending closures agree with the full presentation search on every
    /// pair of short words over small graphs.
    #[test]
    fn descending_agrees_with_full_on_short_words() {
        let orders = [Order::Finite(2), Order::Finite(3), INF];
        for edges in [vec![], vec![(0, 1)]] {
            for &oa in &orders {
                for &ob in &orders {
                    let g = fixtures::finite_graph(&[oa, ob], &edges);
                    let mut corpus = vec![Word::empty()];
                    for v in ["a", "b"] {
                        for e in [1, -1] {
                            corpus.push(word(&g, &[(v, e)]));
                            for (u, f) in [("a", 1), ("b", 1), ("a", -1), ("b", -1)] {
                                if u != v {
                                    corpus.push(word(&g, &[(v, e), (u, f)]));
                                }
                            }
                        }
                    }
                    let alphabet = Alphabet::of_words(&corpus, &g).unwrap();
                    let full: Vec<_> = corpus
                        .iter()
                        .map(|w| alphabet.closure(w, Moves::Full, 7).unwrap())
                        .collect();
                    let desc: Vec<_> = corpus
                        .iter()
                        .map(|w| alphabet.closure(w, Moves::Descending, 7).unwrap())
                        .collect();
                    for i in 0..corpus.len() {
                        for j in 0..corpus.len() {
                            let (w1, w2) = (&corpus[i], &corpus[j]);
                            let by_full = full[i].intersects(&full[j]);
                            let by_desc = desc[i].intersects(&desc[j]);
                            assert_eq!(by_full, by_desc, "{w1} vs {w2} over {:?}", g.oracle());
                            assert_eq!(by_desc, words::equal(w1, w2, &g).unwrap());
                        }
                    }
                }
            }
        }
    }
}
