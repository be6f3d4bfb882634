//! Parametric generators for the triple system families.
//!
//! Every generator uses a fixed vertex layout so that its output is
//! reproducible bit for bit; the layouts are documented on each function.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::system::{build_system, SystemError, TripleSystem, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("modulus {0} must be odd")]
    EvenModulus(usize),
    #[error("modulus {0} must be at least 3")]
    ModulusTooSmall(usize),
    #[error("{0} is not an odd prime")]
    NotOddPrime(usize),
    #[error("order {0} must be greater than 3")]
    OrderTooSmall(usize),
    #[error("keep index {index} out of range: the system has {available} uncovered edges")]
    KeepIndexOutOfRange { index: usize, available: usize },
    #[error("not a Latin square: {0}")]
    NotLatinSquare(String),
    #[error(transparent)]
    System(#[from] SystemError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    BoseSkolem,
    #[value(name = "spreading-6p3")]
    #[serde(rename = "spreading-6p3")]
    Spreading6p3,
    Crowning,
    CayleyLatin,
    StarExpansion,
}

/// A request for one member of a family. For [`Family::Crowning`] the
/// parameter is the prime of the spreading system being crowned.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub family: Family,
    pub modulus_or_order: usize,
    pub keep_set: Option<Vec<usize>>,
}

impl ConstructionParams {
    pub fn new(family: Family, modulus_or_order: usize) -> Self {
        ConstructionParams {
            family,
            modulus_or_order,
            keep_set: None,
        }
    }

    pub fn build(&self) -> Result<TripleSystem, ConstructionError> {
        let k = self.modulus_or_order;
        match self.family {
            Family::BoseSkolem => bose_skolem(k),
            Family::Spreading6p3 => spreading_6p3(k),
            Family::Crowning => crowning(&spreading_6p3(k)?, self.keep_set.as_deref()),
            Family::CayleyLatin => cayley_latin(k),
            Family::StarExpansion => star_expansion(k),
        }
    }
}

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn is_odd_prime(n: usize) -> bool {
    n % 2 == 1 && is_prime(n)
}

fn require_odd_prime(p: usize) -> Result<(), ConstructionError> {
    if is_odd_prime(p) {
        Ok(())
    } else {
        Err(ConstructionError::NotOddPrime(p))
    }
}

/// Steiner triple system on `3q` vertices over three copies of `Z_q`.
///
/// Layout: `a_i -> i`, `b_i -> q + i`, `c_i -> 2q + i`. Blocks are
/// `{a_i, b_i, c_i}` and, for `i != j`, `{a_i, a_j, b_k}`, `{b_i, b_j, c_k}`,
/// `{c_i, c_j, a_k}` where `k` is the midpoint `(i + j) / 2` in `Z_q`, i.e.
/// `(i + j) * (q + 1) / 2 mod q`. Any odd `q >= 3` works.
pub fn bose_skolem(q: usize) -> Result<TripleSystem, ConstructionError> {
    if q.is_multiple_of(2) {
        return Err(ConstructionError::EvenModulus(q));
    }
    if q < 3 {
        return Err(ConstructionError::ModulusTooSmall(q));
    }
    let half = q.div_ceil(2);
    let mut blocks = Vec::with_capacity(q * (3 * q - 1) / 2);
    for i in 0..q {
        blocks.push([i, q + i, 2 * q + i]);
    }
    for i in 0..q {
        for j in i + 1..q {
            let k = (i + j) * half % q;
            blocks.push([i, j, q + k]);
            blocks.push([q + i, q + j, 2 * q + k]);
            blocks.push([2 * q + i, 2 * q + j, k]);
        }
    }
    Ok(build_system(3 * q, blocks)?)
}

/// Vertex labels of the sparse spreading system on `6p + 3` vertices.
#[derive(Debug, Clone, Copy)]
pub struct Spreading6p3Layout {
    pub p: usize,
}

impl Spreading6p3Layout {
    pub fn a(&self, i: usize) -> Vertex {
        i % self.p
    }
    pub fn a_special(&self) -> Vertex {
        self.p
    }
    pub fn b(&self, i: usize) -> Vertex {
        self.p + 1 + i % self.p
    }
    pub fn b_special(&self) -> Vertex {
        2 * self.p + 1
    }
    pub fn c(&self, i: usize) -> Vertex {
        2 * self.p + 2 + i % self.p
    }
    pub fn c_special(&self) -> Vertex {
        3 * self.p + 2
    }
    pub fn alpha(&self, i: usize) -> Vertex {
        3 * self.p + 3 + i % self.p
    }
    pub fn beta(&self, i: usize) -> Vertex {
        4 * self.p + 3 + i % self.p
    }
    pub fn gamma(&self, i: usize) -> Vertex {
        5 * self.p + 3 + i % self.p
    }
}

/// Spreading linear triple system on `6p + 3` vertices with
/// `5p^2 + 6p + 1` blocks.
///
/// Layout (see [`Spreading6p3Layout`]): `a_i -> i` for `i < p`, `a -> p`,
/// `b_i -> p+1+i`, `b -> 2p+1`, `c_i -> 2p+2+i`, `c -> 3p+2`,
/// `alpha_i -> 3p+3+i`, `beta_i -> 4p+3+i`, `gamma_i -> 5p+3+i`.
pub fn spreading_6p3(p: usize) -> Result<TripleSystem, ConstructionError> {
    require_odd_prime(p)?;
    let l = Spreading6p3Layout { p };
    let (a, b, c) = (l.a_special(), l.b_special(), l.c_special());
    let mut blocks = Vec::with_capacity(5 * p * p + 6 * p + 1);

    // Reflection pairs {i, 2j - i} with i != j, each unordered pair once.
    let reflections = |j: usize| {
        (0..p).filter_map(move |i| {
            let r = (2 * j + p - i) % p;
            (i < r).then_some((i, r))
        })
    };

    for j in 0..p {
        // black
        blocks.push([a, l.a(j), l.beta(j)]);
        blocks.push([b, l.b(j), l.gamma(j)]);
        blocks.push([c, l.c(j), l.alpha(j)]);
        for (i, r) in reflections(j) {
            blocks.push([l.a(i), l.a(r), l.beta(j)]);
            blocks.push([l.b(i), l.b(r), l.gamma(j)]);
            blocks.push([l.c(i), l.c(r), l.alpha(j)]);
            // brown
            blocks.push([l.alpha(i), l.alpha(r), l.b(j)]);
            blocks.push([l.beta(i), l.beta(r), l.c(j)]);
            blocks.push([l.gamma(i), l.gamma(r), l.a(j)]);
        }
        // red
        blocks.push([a, l.alpha(j), l.b(j)]);
        blocks.push([b, l.beta(j), l.c(j)]);
        blocks.push([c, l.gamma(j), l.a(j)]);
        // blue
        blocks.push([a, l.gamma(j), l.c(j)]);
        blocks.push([b, l.alpha(j), l.a(j)]);
        blocks.push([c, l.beta(j), l.b(j)]);
    }
    // orange
    for i in 0..p {
        for j in 0..p {
            blocks.push([l.a(i), l.b(j), l.c(i + j)]);
            blocks.push([l.alpha(i), l.beta(j), l.gamma(i + j + 1)]);
        }
    }
    blocks.push([a, b, c]);

    Ok(build_system(6 * p + 3, blocks)?)
}

/// Attaches a fresh vertex `v(xy)` and the block `{x, y, v(xy)}` to each
/// selected uncovered pair. `keep` holds indices into
/// [`TripleSystem::uncovered_edges`]; `None` selects every uncovered pair.
/// Fresh vertices are numbered `n, n+1, ...` in lexicographic pair order.
pub fn crowning(sys: &TripleSystem, keep: Option<&[usize]>) -> Result<TripleSystem, ConstructionError> {
    let uncovered = sys.uncovered_edges();
    let chosen: Vec<usize> = match keep {
        None => (0..uncovered.len()).collect(),
        Some(idx) => {
            if let Some(&bad) = idx.iter().find(|&&i| i >= uncovered.len()) {
                return Err(ConstructionError::KeepIndexOutOfRange {
                    index: bad,
                    available: uncovered.len(),
                });
            }
            let mut v = idx.to_vec();
            v.sort_unstable();
            v.dedup();
            v
        }
    };
    let n = sys.n();
    let blocks = sys
        .triples()
        .iter()
        .map(|t| t.vertices())
        .chain(chosen.iter().enumerate().map(|(offset, &e)| {
            let (x, y) = uncovered[e];
            [x, y, n + offset]
        }));
    Ok(build_system(n + chosen.len(), blocks)?)
}

/// Tripartite system of the Cayley table of `Z_p`: rows `0..p`, columns
/// `p..2p`, symbols `2p..3p`, blocks `{i, p + j, 2p + (i + j mod p)}`.
pub fn cayley_latin(p: usize) -> Result<TripleSystem, ConstructionError> {
    require_odd_prime(p)?;
    let square: Vec<Vec<usize>> = (0..p).map(|i| (0..p).map(|j| (i + j) % p).collect()).collect();
    latin_square_system(&square)
}

/// Tripartite system of an arbitrary Latin square of order `s`: the block
/// `{i, s + j, 2s + square[i][j]}` for every cell.
pub fn latin_square_system(square: &[Vec<usize>]) -> Result<TripleSystem, ConstructionError> {
    let s = square.len();
    let mut col_seen = vec![vec![false; s]; s];
    for (i, row) in square.iter().enumerate() {
        if row.len() != s {
            return Err(ConstructionError::NotLatinSquare(format!(
                "row {i} has {} entries, expected {s}",
                row.len()
            )));
        }
        let mut row_seen = vec![false; s];
        for (j, &sym) in row.iter().enumerate() {
            if sym >= s {
                return Err(ConstructionError::NotLatinSquare(format!(
                    "symbol {sym} at ({i}, {j}) is not below {s}"
                )));
            }
            if std::mem::replace(&mut row_seen[sym], true) {
                return Err(ConstructionError::NotLatinSquare(format!("symbol {sym} repeats in row {i}")));
            }
            if std::mem::replace(&mut col_seen[j][sym], true) {
                return Err(ConstructionError::NotLatinSquare(format!("symbol {sym} repeats in column {j}")));
            }
        }
    }
    let blocks = square
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &sym)| [i, s + j, 2 * s + sym]));
    Ok(build_system(3 * s, blocks)?)
}

/// Subdivided complete graph: base vertices `0..m`, and for each pair
/// `i < j` an edge vertex `m + rank(i, j)` (lexicographic pair rank) with the
/// block `{i, j, m + rank(i, j)}`.
pub fn star_expansion(m: usize) -> Result<TripleSystem, ConstructionError> {
    if m <= 3 {
        return Err(ConstructionError::OrderTooSmall(m));
    }
    let mut blocks = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in i + 1..m {
            blocks.push([i, j, m + blocks.len()]);
        }
    }
    let n = m + blocks.len();
    Ok(build_system(n, blocks)?)
}

/// Label of the edge vertex for the base pair `{i, j}` in
/// [`star_expansion`]`(m)`.
pub fn star_edge_vertex(m: usize, i: usize, j: usize) -> Vertex {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    // pairs with first element < i, then offset within row i
    let before: usize = (0..i).map(|r| m - 1 - r).sum();
    m + before + (j - i - 1)
}
