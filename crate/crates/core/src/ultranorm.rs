//! The group ultranorm `d(g) = 2^-n(g)`, where `n(g)` is the least depth at
//! which the truncated image of `g` in `G_n` is nontrivial, together with the
//! left-invariant ultrametric `d(g, h) = d(g⁻¹h)`, the two-sided metric
//! `D(g, h) = d(g, h) + d(g⁻¹, h⁻¹)`, and the fingerprints of the relations
//! `R_n` that witness separability.

use num_rational::BigRational;

use crate::baire::{Prefix, UltraValue, VertexPath};
use crate::error::{Error, Result};
use crate::graphspec::GraphInstance;
use crate::words::{canonical, truncate_word, NormalForm, Truncation, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormResult {
    /// `n(g)`, or `None` for the identity.
    pub depth: Option<u32>,
    pub value: UltraValue,
    /// Canonical form of the element in the full group.
    pub canonical: NormalForm<VertexPath>,
    /// Canonical form of the truncation at depth `n(g)`; `None` for the identity.
    pub certificate: Option<NormalForm<Prefix>>,
}

/// A depth at which truncation preserves distinctness and (non)adjacency of
/// every pair of vertices of `c`, so the truncated word is still reduced.
pub fn norm_bound(c: &Word<VertexPath>, g: &GraphInstance) -> Result<usize> {
    let mut vertices: Vec<&VertexPath> = c.syllables().iter().map(|s| &s.vertex).collect();
    vertices.sort();
    vertices.dedup();
    let mut bound = 1;
    for (i, u) in vertices.iter().enumerate() {
        for v in &vertices[i + 1..] {
            bound = bound.max(u.meet_length(v)? + 1);
            if !g.adjacent(u, v)? {
                bound = bound.max(g.nonadjacency_depth(u, v)?);
            }
        }
    }
    Ok(bound)
}

pub fn ultranorm(w: &Word<VertexPath>, g: &GraphInstance) -> Result<NormResult> {
    let c = canonical(w, g)?;
    if c.is_identity() {
        return Ok(NormResult {
            depth: None,
            value: UltraValue::Zero,
            canonical: c,
            certificate: None,
        });
    }
    let bound = norm_bound(c.word(), g)?;
    for n in 1..=bound {
        let t = truncate_word(c.word(), n, g)?;
        let tc = canonical(&t, &Truncation::new(g, n)?)?;
        if !tc.is_identity() {
            return Ok(NormResult {
                depth: Some(n as u32),
                value: UltraValue::exp(n as u32),
                canonical: c,
                certificate: Some(tc),
            });
        }
    }
    Err(Error::NormBoundExceeded { bound })
}

/// `d(w1, w2) = d(w1⁻¹ w2)`.
pub fn distance(w1: &Word<VertexPath>, w2: &Word<VertexPath>, g: &GraphInstance) -> Result<UltraValue> {
    Ok(ultranorm(&w1.invert(g).concat(w2, g), g)?.value)
}

/// `D(w1, w2) = d(w1, w2) + d(w1⁻¹, w2⁻¹)`, exactly.
pub fn two_sided(w1: &Word<VertexPath>, w2: &Word<VertexPath>, g: &GraphInstance) -> Result<BigRational> {
    let left = distance(w1, w2, g)?;
    let right = distance(&w1.invert(g), &w2.invert(g), g)?;
    Ok(left.to_rational() + right.to_rational())
}

/// Fingerprint of the `R_n` class: the canonical form with vertices cut to depth `n`.
pub fn rn_key(w: &Word<VertexPath>, g: &GraphInstance, n: usize) -> Result<Vec<(Prefix, i64)>> {
    if n == 0 {
        return Err(Error::ZeroDepth);
    }
    Ok(canonical(w, g)?
        .word()
        .syllables()
        .iter()
        .map(|s| (s.vertex.truncate(n), s.exponent))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphspec::{fixtures, Coloring, EdgeOracle, Order};
    use crate::words::Syllable;
    use num_traits::{One, Zero};

    fn baire_free() -> GraphInstance {
        GraphInstance::new(
            EdgeOracle::ClopenBoxes { boxes: vec![] },
            Coloring::uniform(Order::Infinite),
        )
    }

    fn vp(prefix: &[u64], tail: u64) -> VertexPath {
        VertexPath::new(prefix.to_vec(), tail)
    }

    fn gen(g: &GraphInstance, v: VertexPath) -> Word<VertexPath> {
        Word::generator(v, g)
    }

    #[test]
    fn identity_has_zero_norm() {
        let g = baire_free();
        let r = ultranorm(&Word::empty(), &g).unwrap();
        assert_eq!(r.depth, None);
        assert_eq!(r.value, UltraValue::Zero);
        assert!(r.certificate.is_none());
    }

    #[test]
    fn quotient_of_close_generators() {
        let g = baire_free();
        let w = Word::from_syllables(
            [Syllable::new(vp(&[0, 0], 0), -1), Syllable::new(vp(&[0, 1], 0), 1)],
            &g,
        );
        let r = ultranorm(&w, &g).unwrap();
        assert_eq!(r.depth, Some(2));
        assert_eq!(r.value.decimal(), "0.25");
        assert_eq!(r.certificate.unwrap().word().len(), 2);
    }

    #[test]
    fn single_generator_has_norm_one_half() {
        for g in [
            baire_free(),
            fixtures::random_boxes(3),
            fixtures::complete(&[Order::Finite(2), Order::Finite(3)]),
        ] {
            let v = match g.named_vertices().first() {
                Some((_, v)) => (*v).clone(),
                None => vp(&[1, 2], 0),
            };
            let r = ultranorm(&gen(&g, v), &g).unwrap();
            assert_eq!(r.depth, Some(1));
            assert_eq!(r.value, UltraValue::exp(1));
        }
    }

    #[test]
    fn distance_examples() {
        let g = baire_free();
        let a = gen(&g, vp(&[0, 5], 1));
        let b = gen(&g, vp(&[0, 5, 7], 1));
        assert_eq!(distance(&a, &a, &g).unwrap(), UltraValue::Zero);
        assert_eq!(
            distance(&a, &b, &g).unwrap(),
            vp(&[0, 5], 1).distance(&vp(&[0, 5, 7], 1))
        );
        let w = a.concat(&b, &g);
        assert_eq!(distance(&Word::empty(), &w, &g).unwrap(), ultranorm(&w, &g).unwrap().value);
    }

    #[test]
    fn two_sided_examples() {
        let g = baire_free();
        let a = gen(&g, vp(&[0], 0));
        let b = gen(&g, vp(&[1], 0));
        assert!(two_sided(&a, &a, &g).unwrap().is_zero());
        assert!(two_sided(&a, &b, &g).unwrap().is_one());
        let g = fixtures::free(&[Order::Infinite, Order::Infinite]);
        let x = gen(&g, g.vertex_named("a").unwrap().clone());
        let y = gen(&g, g.vertex_named("b").unwrap().clone());
        let d = two_sided(&x, &y, &g).unwrap();
        assert!(d >= distance(&x, &y, &g).unwrap().to_rational());
        assert!(d < BigRational::from_integer(2.into()));
    }

    #[test]
    fn rn_keys() {
        let g = baire_free();
        let u = gen(&g, vp(&[0, 1, 2, 3], 0));
        let v = gen(&g, vp(&[0, 1, 2, 4], 0));
        assert_eq!(rn_key(&u, &g, 2).unwrap(), rn_key(&v, &g, 2).unwrap());
        assert_ne!(rn_key(&u, &g, 4).unwrap(), rn_key(&v, &g, 4).unwrap());
        let uu = u.concat(&v, &g);
        assert_ne!(rn_key(&u, &g, 1).unwrap(), rn_key(&uu, &g, 1).unwrap());

        // Perturb one vertex of a longer word beyond depth 3.
        let w = Word::from_syllables(
            [Syllable::new(vp(&[2], 0), 1), Syllable::new(vp(&[0, 1, 1, 1, 0], 2), -2)],
            &g,
        );
        let w2 = Word::from_syllables(
            [Syllable::new(vp(&[2], 0), 1), Syllable::new(vp(&[0, 1, 1, 2], 0), -2)],
            &g,
        );
        assert_eq!(rn_key(&w, &g, 3).unwrap(), rn_key(&w2, &g, 3).unwrap());
        assert!(distance(&w, &w2, &g).unwrap() <= UltraValue::exp(4));
        assert_eq!(rn_key(&w, &g, 0), Err(Error::ZeroDepth));
    }

    #[test]
    fn norm_depth_grows_with_nonadjacency_depth() {
        // [0,0] and [0,1] coincide at depth 1, so the commutator vanishes in
        // G_1; at depth 2 they are distinct and not joined.
        let g = GraphInstance::new(
            EdgeOracle::ClopenBoxes {
                boxes: vec![(Prefix(vec![0, 0]), Prefix(vec![0, 2]))],
            },
            Coloring::uniform(Order::Infinite),
        );
        let a = vp(&[0, 0], 0);
        let b = vp(&[0, 1], 0);
        let comm = Word::from_syllables(
            [
                Syllable::new(a.clone(), 1),
                Syllable::new(b.clone(), 1),
                Syllable::new(a, -1),
                Syllable::new(b, -1),
            ],
            &g,
        );
        assert_eq!(ultranorm(&comm, &g).unwrap().depth, Some(2));
    }
}
