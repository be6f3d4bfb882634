//! Validated linear triple systems.
//!
//! A [`TripleSystem`] is a set of 3-element blocks over the vertices `0..n`
//! in which every pair of vertices lies in at most one block. The pair table
//! built at construction time answers "which vertex completes this pair?" in
//! constant time, which is what the closure operator spends most of its time
//! doing.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Vertices are plain 0-based indices into the owning system.
pub type Vertex = usize;

const NO_THIRD: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("vertex {vertex} is out of range for a system on {n} vertices")]
    VertexOutOfRange { vertex: i64, n: usize },
    #[error("triple {0:?} repeats a vertex")]
    DegenerateTriple([i64; 3]),
    #[error("pair ({}, {}) is covered by both {first} and {second}", pair.0, pair.1)]
    DuplicatePairCoverage {
        pair: (Vertex, Vertex),
        first: Triple,
        second: Triple,
    },
    #[error("the two vertices of a pair must differ (got {0} twice)")]
    SameVertex(Vertex),
}

/// A block of the system. The vertices are kept in strictly increasing order,
/// so the derived ordering is the lexicographic one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "[Vertex; 3]", try_from = "[Vertex; 3]")]
pub struct Triple([Vertex; 3]);

impl Triple {
    pub fn new(a: Vertex, b: Vertex, c: Vertex) -> Result<Self, SystemError> {
        let mut v = [a, b, c];
        v.sort_unstable();
        if v[0] == v[1] || v[1] == v[2] {
            return Err(SystemError::DegenerateTriple([a as i64, b as i64, c as i64]));
        }
        Ok(Triple(v))
    }

    #[inline]
    pub fn vertices(&self) -> [Vertex; 3] {
        self.0
    }

    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        self.0.contains(&v)
    }

    /// The three pairs of the block, each as `(smaller, larger)`.
    pub fn pairs(&self) -> [(Vertex, Vertex); 3] {
        let [a, b, c] = self.0;
        [(a, b), (a, c), (b, c)]
    }

    /// Number of vertices shared with `other`.
    pub fn meet(&self, other: &Triple) -> usize {
        self.0.iter().filter(|v| other.contains(**v)).count()
    }
}

impl From<Triple> for [Vertex; 3] {
    fn from(t: Triple) -> Self {
        t.0
    }
}

impl TryFrom<[Vertex; 3]> for Triple {
    type Error = SystemError;

    fn try_from(v: [Vertex; 3]) -> Result<Self, Self::Error> {
        Triple::new(v[0], v[1], v[2])
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}, {}}}", self.0[0], self.0[1], self.0[2])
    }
}

/// A set of vertices, stored sorted and without repetitions.
///
/// Sets are ordered *shortlex*: smaller sets come first, and sets of equal
/// size compare lexicographically by their sorted members. Every witness
/// reported by the property checkers is the least failing candidate in this
/// order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<Vertex>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(Vec::new())
    }

    pub fn from_sorted_unchecked(members: Vec<Vertex>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        VertexSet(members)
    }

    pub fn members(&self) -> &[Vertex] {
        &self.0
    }

    pub fn into_members(self) -> Vec<Vertex> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.iter().all(|v| other.contains(*v))
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        self.0.iter().chain(other.0.iter()).copied().collect()
    }

    pub fn max(&self) -> Option<Vertex> {
        self.0.last().copied()
    }

    /// Fails with the first member that is not below `n`.
    pub fn check_range(&self, n: usize) -> Result<(), SystemError> {
        match self.0.iter().find(|&&v| v >= n) {
            Some(&v) => Err(SystemError::VertexOutOfRange { vertex: v as i64, n }),
            None => Ok(()),
        }
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        let mut v: Vec<Vertex> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }
}

impl From<Triple> for VertexSet {
    fn from(t: Triple) -> Self {
        VertexSet(t.0.to_vec())
    }
}

impl Ord for VertexSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for VertexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

/// An immutable, validated linear triple system.
#[derive(Clone, PartialEq, Eq)]
pub struct TripleSystem {
    n: usize,
    triples: Vec<Triple>,
    /// `pair_table[x * n + y]` is the third vertex of the block through
    /// `{x, y}`, or `NO_THIRD` when the pair is uncovered.
    pair_table: Vec<u32>,
}

impl fmt::Debug for TripleSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TripleSystem")
            .field("n", &self.n)
            .field("triples", &self.triples)
            .finish()
    }
}

/// Validates `triples` over the vertices `0..n` and builds the system.
///
/// Repeated copies of the same block are merged. Two distinct blocks that
/// share a pair violate linearity and are rejected.
pub fn build_system<I>(n: usize, triples: I) -> Result<TripleSystem, SystemError>
where
    I: IntoIterator<Item = [Vertex; 3]>,
{
    let mut blocks = Vec::new();
    for raw in triples {
        if let Some(&v) = raw.iter().find(|&&v| v >= n) {
            return Err(SystemError::VertexOutOfRange { vertex: v as i64, n });
        }
        blocks.push(Triple::new(raw[0], raw[1], raw[2])?);
    }
    blocks.sort_unstable();
    blocks.dedup();

    assert!(n < NO_THIRD as usize, "system too large for the pair table");
    let mut pair_table = vec![NO_THIRD; n * n];
    let mut owner: Vec<u32> = vec![u32::MAX; n * n];
    for (idx, t) in blocks.iter().enumerate() {
        let [a, b, c] = t.vertices();
        for (x, y, z) in [(a, b, c), (a, c, b), (b, c, a)] {
            let slot = x * n + y;
            if pair_table[slot] != NO_THIRD {
                return Err(SystemError::DuplicatePairCoverage {
                    pair: (x, y),
                    first: blocks[owner[slot] as usize],
                    second: *t,
                });
            }
            pair_table[slot] = z as u32;
            pair_table[y * n + x] = z as u32;
            owner[slot] = idx as u32;
        }
    }

    Ok(TripleSystem {
        n,
        triples: blocks,
        pair_table,
    })
}

impl Serialize for TripleSystem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("TripleSystem", 3)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("m", &self.triples.len())?;
        st.serialize_field("triples", &self.triples)?;
        st.end()
    }
}

impl TripleSystem {
    /// The system on `n` vertices with no blocks.
    pub fn empty(n: usize) -> Self {
        build_system(n, std::iter::empty()).expect("empty system is always valid")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Blocks in lexicographic order.
    #[inline]
    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.triples.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Unchecked lookup used on hot paths; `x != y`, both in range.
    #[inline]
    pub(crate) fn third(&self, x: Vertex, y: Vertex) -> Option<Vertex> {
        let z = self.pair_table[x * self.n + y];
        (z != NO_THIRD).then_some(z as Vertex)
    }

    /// The vertex completing `{x, y}` to a block, if the pair is covered.
    pub fn third_point(&self, x: Vertex, y: Vertex) -> Result<Option<Vertex>, SystemError> {
        if x == y {
            return Err(SystemError::SameVertex(x));
        }
        for v in [x, y] {
            if v >= self.n {
                return Err(SystemError::VertexOutOfRange { vertex: v as i64, n: self.n });
            }
        }
        Ok(self.third(x, y))
    }

    pub fn is_covered(&self, x: Vertex, y: Vertex) -> bool {
        x != y && x < self.n && y < self.n && self.third(x, y).is_some()
    }

    pub fn contains_triple(&self, t: &Triple) -> bool {
        let [a, b, c] = t.vertices();
        c < self.n && self.third(a, b) == Some(c)
    }

    /// Number of skeleton edges, i.e. covered pairs.
    pub fn covered_pairs(&self) -> usize {
        3 * self.triples.len()
    }

    /// Every pair of distinct vertices is covered.
    pub fn is_steiner(&self) -> bool {
        self.covered_pairs() == self.n * self.n.saturating_sub(1) / 2
    }

    /// Pairs not covered by any block, lexicographically sorted.
    pub fn uncovered_edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::new();
        for x in 0..self.n {
            for y in x + 1..self.n {
                if self.third(x, y).is_none() {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Vertices lying in at least one block.
    pub fn span(&self) -> VertexSet {
        self.triples.iter().flat_map(|t| t.vertices()).collect()
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.triples.iter().filter(|t| t.contains(v)).count()
    }
}
