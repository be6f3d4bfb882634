//! Exhaustive search for the smallest weakly spreading systems, and the
//! ordering certificate behind the `n - 3` lower bound.
//!
//! In a weakly spreading system the blocks can be listed so that the second
//! block meets the first and every later block meets the union of the
//! earlier ones in at least two vertices. The search generates exactly such
//! listings. Two rules keep every labelled system from being produced more
//! than once:
//!
//! * vertices are labelled in order of first appearance, so the first two
//!   blocks are always `{0,1,2}` and `{0,3,4}` and a fresh vertex always gets
//!   the next unused label;
//! * after the second block, the next block is always the available block
//!   whose two smallest vertices form the lexicographically least pair.
//!   Because fresh labels exceed every existing label, this key never changes
//!   once a block becomes available, and since availability only grows the
//!   greedy listing always completes whenever any listing does.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering as AtomicOrdering};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::closure::is_weakly_spreading;
use crate::system::{build_system, Triple, TripleSystem};

pub const MIN_SEARCH_ORDER: usize = 5;
pub const MAX_SEARCH_ORDER: usize = 12;
pub const DEFAULT_SEARCH_BUDGET: u64 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("order {0} is outside the supported range {MIN_SEARCH_ORDER}..={MAX_SEARCH_ORDER}")]
    OrderOutOfRange(usize),
    #[error("start count {start} must lie in 1..={max} for n = {n}")]
    InvalidStart { start: usize, n: usize, max: usize },
    #[error("node budget of {budget} exhausted while searching systems with {count} blocks")]
    BudgetExceeded { budget: u64, count: usize },
    #[error("no weakly spreading system on {0} vertices exists")]
    NotFound(usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub n: usize,
    /// Fewest blocks of a weakly spreading system spanning all `n` vertices.
    pub minimum: usize,
    /// Lexicographically least such system among the generated ones.
    pub witness: TripleSystem,
    pub nodes_explored: u64,
    /// Complete candidates that went through the weak spreading check.
    pub candidates_verified: u64,
    /// Every block count below `minimum` was refuted by search (counts 0 and
    /// 1 cannot span five vertices) rather than skipped on the strength of
    /// the `n - 3` bound.
    pub exhaustive_below: bool,
}

/// A listing of all blocks in which `sequence[1]` meets `sequence[0]` and
/// every later block meets the union of its predecessors in two vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TripleOrdering {
    pub sequence: Vec<Triple>,
}

impl TripleOrdering {
    /// Checks the overlap conditions (not that the listing covers a
    /// particular system).
    pub fn is_valid(&self) -> bool {
        let mut union: Vec<usize> = Vec::new();
        for (k, t) in self.sequence.iter().enumerate() {
            let shared = t.vertices().iter().filter(|v| union.contains(v)).count();
            let needed = match k {
                0 => 0,
                1 => 1,
                _ => 2,
            };
            if shared < needed {
                return false;
            }
            for v in t.vertices() {
                if !union.contains(&v) {
                    union.push(v);
                }
            }
        }
        true
    }
}

/// Finds an ordering of the blocks satisfying the overlap conditions.
///
/// Tries each first block and each block meeting it as the second; the rest
/// is filled greedily, which cannot get stuck if a completion exists because
/// a block that is available stays available.
pub fn ordering_witness(sys: &TripleSystem) -> Option<TripleOrdering> {
    let blocks = sys.triples();
    match blocks.len() {
        0 => return None,
        1 => return Some(TripleOrdering { sequence: blocks.to_vec() }),
        _ => {}
    }
    let mut inside = vec![false; sys.n()];
    let mut used = vec![false; blocks.len()];
    for (i, first) in blocks.iter().enumerate() {
        for (j, second) in blocks.iter().enumerate() {
            if i == j || first.meet(second) == 0 {
                continue;
            }
            inside.iter_mut().for_each(|x| *x = false);
            used.iter_mut().for_each(|x| *x = false);
            let mut sequence = vec![*first, *second];
            for v in first.vertices().into_iter().chain(second.vertices()) {
                inside[v] = true;
            }
            used[i] = true;
            used[j] = true;
            while sequence.len() < blocks.len() {
                let next = (0..blocks.len()).find(|&k| {
                    !used[k] && blocks[k].vertices().iter().filter(|&&v| inside[v]).count() >= 2
                });
                let Some(k) = next else { break };
                used[k] = true;
                sequence.push(blocks[k]);
                for v in blocks[k].vertices() {
                    inside[v] = true;
                }
            }
            if sequence.len() == blocks.len() {
                return Some(TripleOrdering { sequence });
            }
        }
    }
    None
}

type Block = [u8; 3];

fn block_mask(b: &Block) -> u16 {
    (1 << b[0]) | (1 << b[1]) | (1 << b[2])
}

/// Weak spreading on bitmasks: the union of every pair of blocks must absorb
/// all vertices by repeatedly adding blocks that meet it in two vertices.
fn masks_weakly_spreading(masks: &[u16], full: u16) -> bool {
    for i in 0..masks.len() {
        for j in i + 1..masks.len() {
            let mut set = masks[i] | masks[j];
            loop {
                let before = set;
                for &t in masks {
                    if (t & set).count_ones() == 2 {
                        set |= t;
                    }
                }
                if set == before {
                    break;
                }
            }
            if set != full {
                return false;
            }
        }
    }
    true
}

struct Shared {
    nodes: AtomicU64,
    budget: u64,
    aborted: AtomicBool,
}

impl Shared {
    fn tick(&self) -> bool {
        let used = self.nodes.fetch_add(1, AtomicOrdering::Relaxed) + 1;
        if used > self.budget {
            self.aborted.store(true, AtomicOrdering::Relaxed);
        }
        !self.aborted.load(AtomicOrdering::Relaxed)
    }
}

#[derive(Clone)]
struct Dfs<'a> {
    n: usize,
    m: usize,
    /// Bit `y` of `adj[x]` is set when `{x, y}` is already covered.
    adj: [u16; MAX_SEARCH_ORDER],
    blocks: Vec<Block>,
    /// Vertex count just before each block was placed.
    sizes_before: Vec<usize>,
    verts: usize,
    verified: u64,
    best: Option<Vec<Block>>,
    shared: &'a Shared,
}

impl<'a> Dfs<'a> {
    fn new(n: usize, m: usize, shared: &'a Shared) -> Self {
        Dfs {
            n,
            m,
            adj: [0; MAX_SEARCH_ORDER],
            blocks: Vec::with_capacity(m),
            sizes_before: Vec::with_capacity(m),
            verts: 0,
            verified: 0,
            best: None,
            shared,
        }
    }

    fn covered(&self, x: usize, y: usize) -> bool {
        self.adj[x] & (1 << y) != 0
    }

    fn push(&mut self, b: Block) {
        self.sizes_before.push(self.verts);
        let [x, y, z] = b.map(usize::from);
        self.adj[x] |= (1 << y) | (1 << z);
        self.adj[y] |= (1 << x) | (1 << z);
        self.adj[z] |= (1 << x) | (1 << y);
        self.verts = self.verts.max(z + 1);
        self.blocks.push(b);
    }

    fn pop(&mut self) {
        let b = self.blocks.pop().expect("pop on empty search stack");
        let [x, y, z] = b.map(usize::from);
        self.adj[x] &= !((1 << y) | (1 << z));
        self.adj[y] &= !((1 << x) | (1 << z));
        self.adj[z] &= !((1 << x) | (1 << y));
        self.verts = self.sizes_before.pop().expect("sizes track blocks");
    }

    /// Blocks that may be placed next, in the order they are tried.
    fn candidates(&self) -> Vec<Block> {
        let step = self.blocks.len();
        let remaining_after = self.m - step - 1;
        let mut out = Vec::new();
        for a in 0..self.verts {
            for b in a + 1..self.verts {
                if self.covered(a, b) || !self.greedy_allows(a, b) {
                    continue;
                }
                // a fresh third vertex
                if self.verts < self.n && self.n - self.verts - 1 <= remaining_after {
                    out.push([a as u8, b as u8, self.verts as u8]);
                }
                // an existing third vertex
                if self.n - self.verts <= remaining_after {
                    for c in b + 1..self.verts {
                        if !self.covered(a, c) && !self.covered(b, c) {
                            out.push([a as u8, b as u8, c as u8]);
                        }
                    }
                }
            }
        }
        out
    }

    /// A block keyed by `(a, b)` may come next only if no earlier block from
    /// the third one on was chosen while this one was already available
    /// with a smaller key.
    fn greedy_allows(&self, a: usize, b: usize) -> bool {
        (2..self.blocks.len()).all(|i| {
            self.sizes_before[i] <= b || {
                let prev = self.blocks[i];
                (usize::from(prev[0]), usize::from(prev[1])) < (a, b)
            }
        })
    }

    fn run(&mut self) {
        if self.shared.aborted.load(AtomicOrdering::Relaxed) {
            return;
        }
        if self.blocks.len() == self.m {
            if self.verts == self.n {
                self.verify_leaf();
            }
            return;
        }
        for cand in self.candidates() {
            if !self.shared.tick() {
                return;
            }
            self.push(cand);
            self.run();
            self.pop();
        }
    }

    fn verify_leaf(&mut self) {
        self.verified += 1;
        let masks: Vec<u16> = self.blocks.iter().map(block_mask).collect();
        let full = ((1u32 << self.n) - 1) as u16;
        if masks_weakly_spreading(&masks, full) {
            let mut sorted = self.blocks.clone();
            sorted.sort_unstable();
            if self.best.as_ref().is_none_or(|b| sorted < *b) {
                self.best = Some(sorted);
            }
        }
    }
}

struct CountOutcome {
    best: Option<Vec<Block>>,
    verified: u64,
}

/// Every canonical listing with exactly `m` blocks spanning `0..n`.
fn search_count(n: usize, m: usize, shared: &Shared) -> CountOutcome {
    let mut root = Dfs::new(n, m, shared);
    if m == 0 {
        return CountOutcome { best: None, verified: 0 };
    }
    shared.tick();
    root.push([0, 1, 2]);
    if m == 1 {
        root.run();
        return CountOutcome { best: root.best, verified: root.verified };
    }
    shared.tick();
    root.push([0, 3, 4]);
    if m == 2 {
        root.run();
        return CountOutcome { best: root.best, verified: root.verified };
    }

    let firsts = root.candidates();
    let results: Vec<(Option<Vec<Block>>, u64)> = firsts
        .par_iter()
        .map(|&cand| {
            let mut dfs = root.clone();
            if shared.tick() {
                dfs.push(cand);
                dfs.run();
            }
            (dfs.best, dfs.verified)
        })
        .collect();

    let mut out = CountOutcome { best: None, verified: 0 };
    for (best, verified) in results {
        out.verified += verified;
        if let Some(b) = best {
            if out.best.as_ref().is_none_or(|cur| b < *cur) {
                out.best = Some(b);
            }
        }
    }
    out
}

/// Smallest weakly spreading system spanning `n` vertices, for
/// `5 <= n <= 12`.
///
/// Block counts are tried upward from `start_at` (default `n - 3`, below
/// which no listable system exists). Only systems admitting a listing are
/// generated; this excludes the two disjoint blocks on six vertices, which
/// satisfy the definition only because their union is already everything. Each count is searched to completion, so
/// the witness and the node count do not depend on thread scheduling.
pub fn min_weakly_spreading(n: usize, start_at: Option<usize>, budget: u64) -> Result<SearchResult, SearchError> {
    if !(MIN_SEARCH_ORDER..=MAX_SEARCH_ORDER).contains(&n) {
        return Err(SearchError::OrderOutOfRange(n));
    }
    let start = start_at.unwrap_or(n - 3);
    if start < 1 || start > n - 3 {
        return Err(SearchError::InvalidStart { start, n, max: n - 3 });
    }
    let shared = Shared {
        nodes: AtomicU64::new(0),
        budget,
        aborted: AtomicBool::new(false),
    };
    let mut verified = 0;
    for m in start..=n * (n - 1) / 6 {
        let outcome = search_count(n, m, &shared);
        if shared.aborted.load(AtomicOrdering::Relaxed) {
            return Err(SearchError::BudgetExceeded { budget, count: m });
        }
        verified += outcome.verified;
        if let Some(best) = outcome.best {
            let witness = build_system(n, best.iter().map(|b| b.map(usize::from)))
                .expect("search only places blocks on uncovered pairs");
            debug_assert!(is_weakly_spreading(&witness).holds);
            return Ok(SearchResult {
                n,
                minimum: m,
                witness,
                nodes_explored: shared.nodes.load(AtomicOrdering::Relaxed),
                candidates_verified: verified,
                exhaustive_below: start <= 2,
            });
        }
    }
    Err(SearchError::NotFound(n))
}
