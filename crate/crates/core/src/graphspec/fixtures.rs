//! Deterministic graph instances used by tests, suites and the CLI.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Coloring, EdgeOracle, GraphInstance, Order};
use crate::baire::{Prefix, VertexPath};
use crate::error::{Error, Result};

/// Symbols used by random box oracles and random points.
pub const RANDOM_ALPHABET: u64 = 3;

fn vertex_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("v{i}")
    }
}

fn binary_digits(i: usize, width: usize) -> impl Iterator<Item = u64> {
    (0..width).rev().map(move |bit| ((i >> bit) & 1) as u64)
}

fn width_for(count: usize) -> usize {
    let mut w = 1;
    while (1usize << w) < count {
        w += 1;
    }
    w
}

fn coloring_for(orders: &[Order]) -> Coloring {
    Coloring {
        table: orders.iter().map(|o| (o.code(), *o)).collect(),
        default: Order::Infinite,
    }
}

/// A finite explicit graph on `orders.len()` vertices named `a, b, c, …`.
///
/// Vertex `i` is the point `(code(order_i), binary digits of i, 0, 0, …)`, so
/// the coloring depends only on the first coordinate and distinct vertices
/// meet at depth at least 1 when they share an order.
pub fn finite_graph(orders: &[Order], edges: &[(usize, usize)]) -> GraphInstance {
    let width = width_for(orders.len());
    let mut vertices = BTreeMap::new();
    for (i, order) in orders.iter().enumerate() {
        let mut prefix = vec![order.code()];
        prefix.extend(binary_digits(i, width));
        // Tail 2 never equals a binary digit, so prefixes stay distinct.
        vertices.insert(vertex_name(i), VertexPath::new(prefix, 2));
    }
    let mut list = Vec::new();
    for &(i, j) in edges {
        if i != j {
            list.push((vertex_name(i), vertex_name(j)));
            list.push((vertex_name(j), vertex_name(i)));
        }
    }
    list.sort();
    list.dedup();
    GraphInstance::new(
        EdgeOracle::Finite {
            vertices,
            edges: list,
        },
        coloring_for(orders),
    )
}

/// Edge-free graph: the free product of the cyclic groups.
pub fn free(orders: &[Order]) -> GraphInstance {
    finite_graph(orders, &[])
}

/// Complete graph: the direct sum of the cyclic groups.
pub fn complete(orders: &[Order]) -> GraphInstance {
    let n = orders.len();
    let edges: Vec<_> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    finite_graph(orders, &edges)
}

/// Countable half graph on `a_0 … a_{s-1}, b_0 … b_{s-1}` with `a_i` joined to `b_j` iff `i < j`.
/// All generators have infinite order.
pub fn half_graph(size: usize) -> Result<GraphInstance> {
    if size == 0 {
        return Err(Error::InvalidParameter("half graph needs size ≥ 1".into()));
    }
    let width = width_for(size);
    let mut vertices = BTreeMap::new();
    for i in 0..size {
        for (side, tag) in [(0u64, "a"), (1, "b")] {
            let mut prefix = vec![0, side];
            prefix.extend(binary_digits(i, width));
            vertices.insert(format!("{tag}{i}"), VertexPath::new(prefix, 2));
        }
    }
    let mut edges = Vec::new();
    for i in 0..size {
        for j in i + 1..size {
            edges.push((format!("a{i}"), format!("b{j}")));
            edges.push((format!("b{j}"), format!("a{i}")));
        }
    }
    edges.sort();
    Ok(GraphInstance::new(
        EdgeOracle::Finite { vertices, edges },
        Coloring::uniform(Order::Infinite),
    ))
}

const RANDOM_ORDERS: [Order; 7] = [
    Order::Finite(2),
    Order::Finite(3),
    Order::Finite(4),
    Order::Finite(5),
    Order::Finite(7),
    Order::Finite(9),
    Order::Infinite,
];

fn random_prefix(rng: &mut ChaCha8Rng, min: usize, max: usize) -> Prefix {
    let len = rng.gen_range(min..=max);
    Prefix((0..len).map(|_| rng.gen_range(0..RANDOM_ALPHABET)).collect())
}

/// A seeded union of 2–5 clopen boxes with prefixes of length 1–3 over
/// `{0, 1, 2}` and random orders on the first coordinates.
pub fn random_boxes(seed: u64) -> GraphInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.gen_range(2..=5);
    let boxes = (0..count)
        .map(|_| (random_prefix(&mut rng, 1, 3), random_prefix(&mut rng, 1, 3)))
        .collect();
    let table = (0..RANDOM_ALPHABET)
        .map(|first| (first, *RANDOM_ORDERS.choose(&mut rng).unwrap()))
        .collect();
    GraphInstance::new(
        EdgeOracle::ClopenBoxes { boxes },
        Coloring {
            table,
            default: Order::Infinite,
        },
    )
}

/// A random point with prefix length ≤ 4 over `{0, 1, 2}`.
pub fn random_path<R: Rng>(rng: &mut R) -> VertexPath {
    let len = rng.gen_range(0..=4);
    let prefix = (0..len).map(|_| rng.gen_range(0..RANDOM_ALPHABET)).collect();
    VertexPath::new(prefix, rng.gen_range(0..RANDOM_ALPHABET))
}

/// Named constructor used by the CLI.
pub fn fixture(kind: &str, size: usize, orders: &[Order], seed: u64) -> Result<GraphInstance> {
    let orders: Vec<Order> = if orders.is_empty() {
        vec![Order::Infinite; size]
    } else if size != 0 && orders.len() != size {
        return Err(Error::InvalidParameter(format!(
            "{} orders given for size {size}",
            orders.len()
        )));
    } else {
        orders.to_vec()
    };
    if let Some(bad) = orders.iter().find(|o| !o.is_valid()) {
        return Err(Error::InvalidOrder(bad.to_string()));
    }
    match kind {
        "free" | "complete" if orders.is_empty() => Err(Error::InvalidParameter(
            "need at least one vertex".into(),
        )),
        "free" => Ok(free(&orders)),
        "complete" => Ok(complete(&orders)),
        "half-graph" => half_graph(size),
        "random-boxes" => Ok(random_boxes(seed)),
        other => Err(Error::InvalidParameter(format!("unknown fixture kind {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_two_generators() {
        let g = free(&[Order::Infinite, Order::Infinite]);
        assert!(g.validate().is_empty());
        assert_eq!(g.named_vertices().len(), 2);
        let a = g.vertex_named("a").unwrap();
        let b = g.vertex_named("b").unwrap();
        assert!(!g.adjacent(a, b).unwrap());
        assert_eq!(a.meet_length(b).unwrap(), 1);
    }

    #[test]
    fn klein_four() {
        let g = complete(&[Order::Finite(2), Order::Finite(2)]);
        assert!(g.validate().is_empty());
        let a = g.vertex_named("a").unwrap();
        let b = g.vertex_named("b").unwrap();
        assert!(g.adjacent(a, b).unwrap());
        assert_eq!(g.order_of(a), Order::Finite(2));
    }

    #[test]
    fn half_graph_edges() {
        let g = half_graph(4).unwrap();
        assert!(g.validate().is_empty());
        assert_eq!(g.named_vertices().len(), 8);
        for i in 0..4 {
            for j in 0..4 {
                let a = g.vertex_named(&format!("a{i}")).unwrap();
                let b = g.vertex_named(&format!("b{j}")).unwrap();
                assert_eq!(g.adjacent(a, b).unwrap(), i < j, "a{i} b{j}");
            }
        }
        assert!(half_graph(0).is_err());
    }

    #[test]
    fn random_boxes_are_deterministic() {
        assert_eq!(random_boxes(7), random_boxes(7));
        assert!(random_boxes(7).validate().is_empty());
    }

    #[test]
    fn mixed_orders_keep_coloring_by_first_coordinate() {
        let g = free(&[Order::Finite(2), Order::Infinite, Order::Finite(3)]);
        for (_, v) in g.named_vertices() {
            assert_eq!(g.order_of(v).code(), v.at(0));
        }
        assert_eq!(g.order_of(g.vertex_named("c").unwrap()), Order::Finite(3));
    }

    #[test]
    fn fixture_dispatch() {
        assert!(fixture("free", 2, &[], 0).is_ok());
        assert!(fixture("nope", 2, &[], 0).is_err());
        assert!(fixture("free", 2, &[Order::Finite(6), Order::Finite(2)], 0).is_err());
        assert!(fixture("complete", 3, &[Order::Finite(2)], 0).is_err());
    }
}
