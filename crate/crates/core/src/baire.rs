//! Points and finite prefixes of Baire space.
//!
//! A [`VertexPath`] is an eventually constant sequence of naturals, stored
//! canonically as a finite prefix followed by a tail value repeated forever.
//! The standard ultrametric on these points is `2^-(lg(u ∧ v) + 1)`, reported
//! exactly as an [`UltraValue`].

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite sequence of naturals, an element of `ω^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Prefix(pub Vec<u64>);

impl Prefix {
    pub fn new(entries: Vec<u64>) -> Self {
        Prefix(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    /// `self ◁ v`: the path starts with this prefix.
    pub fn is_prefix_of(&self, v: &VertexPath) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| v.at(i) == x)
    }

    /// One of the two sequences is an initial segment of the other.
    pub fn compatible(&self, other: &Prefix) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a == b)
    }

    pub fn truncate(&self, n: usize) -> Prefix {
        Prefix(self.0[..n.min(self.0.len())].to_vec())
    }
}

impl Ord for Prefix {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Prefix {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

impl From<Vec<u64>> for Prefix {
    fn from(v: Vec<u64>) -> Self {
        Prefix(v)
    }
}

#[derive(Deserialize, Serialize)]
struct RawPath {
    prefix: Vec<u64>,
    tail: u64,
}

/// An eventually constant point of `ω^ω`.
///
/// Always canonical: a nonempty prefix never ends in the tail value, so
/// structural equality is equality of sequences.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "RawPath", into = "RawPath")]
pub struct VertexPath {
    prefix: Vec<u64>,
    tail: u64,
}

impl From<RawPath> for VertexPath {
    fn from(raw: RawPath) -> Self {
        VertexPath::new(raw.prefix, raw.tail)
    }
}

impl From<VertexPath> for RawPath {
    fn from(v: VertexPath) -> Self {
        RawPath {
            prefix: v.prefix,
            tail: v.tail,
        }
    }
}

impl VertexPath {
    pub fn new(mut prefix: Vec<u64>, tail: u64) -> Self {
        while prefix.last() == Some(&tail) {
            prefix.pop();
        }
        VertexPath { prefix, tail }
    }

    pub fn constant(tail: u64) -> Self {
        VertexPath {
            prefix: Vec::new(),
            tail,
        }
    }

    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn tail(&self) -> u64 {
        self.tail
    }

    pub fn at(&self, n: usize) -> u64 {
        self.prefix.get(n).copied().unwrap_or(self.tail)
    }

    /// `v ↾ n`, the first `n` entries.
    pub fn truncate(&self, n: usize) -> Prefix {
        Prefix((0..n).map(|i| self.at(i)).collect())
    }

    /// `lg(u ∧ v)`, the length of the longest common prefix of two distinct points.
    pub fn meet_length(&self, other: &VertexPath) -> Result<usize> {
        if self == other {
            return Err(Error::UndefinedMeet(self.clone()));
        }
        // Beyond both prefixes only the tails remain, and those differ.
        let horizon = self.prefix.len().max(other.prefix.len());
        Ok((0..=horizon)
            .find(|&i| self.at(i) != other.at(i))
            .unwrap_or(horizon))
    }

    /// The standard metric `2^-(lg(u ∧ v) + 1)`, zero on the diagonal.
    pub fn distance(&self, other: &VertexPath) -> UltraValue {
        match self.meet_length(other) {
            Ok(n) => UltraValue::exp(n as u32 + 1),
            Err(_) => UltraValue::Zero,
        }
    }

    /// Depth at which the sequence has become constant.
    pub fn stable_depth(&self) -> usize {
        self.prefix.len()
    }
}

impl Ord for VertexPath {
    fn cmp(&self, other: &Self) -> Ordering {
        self.prefix
            .len()
            .cmp(&other.prefix.len())
            .then_with(|| self.prefix.cmp(&other.prefix))
            .then_with(|| self.tail.cmp(&other.tail))
    }
}

impl PartialOrd for VertexPath {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for VertexPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for x in &self.prefix {
            write!(f, "{x},")?;
        }
        write!(f, "{}*>", self.tail)
    }
}

/// An exact value that is either `0` or a power `2^-n` with `n ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum UltraValue {
    Zero,
    Exp { n: u32 },
}

impl UltraValue {
    pub fn exp(n: u32) -> Self {
        assert!(n >= 1, "UltraValue exponent must be positive");
        UltraValue::Exp { n }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, UltraValue::Zero)
    }

    pub fn to_rational(&self) -> BigRational {
        match *self {
            UltraValue::Zero => BigRational::zero(),
            UltraValue::Exp { n } => {
                BigRational::new(BigInt::one(), BigInt::one() << (n as usize))
            }
        }
    }

    /// Exact decimal expansion, e.g. `0.25` for `2^-2`.
    pub fn decimal(&self) -> String {
        match *self {
            UltraValue::Zero => "0".to_string(),
            UltraValue::Exp { n } => {
                // 2^-n = 5^n / 10^n
                let digits = BigUint::from(5u32).pow(n).to_string();
                format!("0.{digits:0>width$}", width = n as usize)
            }
        }
    }
}

impl Ord for UltraValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (UltraValue::Zero, UltraValue::Zero) => Ordering::Equal,
            (UltraValue::Zero, _) => Ordering::Less,
            (_, UltraValue::Zero) => Ordering::Greater,
            (UltraValue::Exp { n: a }, UltraValue::Exp { n: b }) => b.cmp(a),
        }
    }
}

impl PartialOrd for UltraValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for UltraValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UltraValue::Zero => write!(f, "0"),
            UltraValue::Exp { n } => write!(f, "2^-{n}"),
        }
    }
}
