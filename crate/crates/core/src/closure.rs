//! The neighbourhood operator, its closure, and the exhaustive property
//! checkers built on top of them.
//!
//! All checkers are deterministic: candidates are examined in shortlex order
//! (by size, then lexicographically) and the reported witness is the first
//! failing candidate, no matter how the work is split between threads.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumerate::{binomial, ordered_scan, LexCombinations, Scan};
use crate::system::{SystemError, Triple, TripleSystem, Vertex, VertexSet};

/// Largest order accepted by the brute-force spreading check.
pub const BRUTE_FORCE_MAX_N: usize = 20;
/// Largest order accepted by the strong connectivity check.
pub const STRONG_CONNECTIVITY_MAX_N: usize = 26;
/// Default cap on the number of vertex sets the expander scan may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("brute-force mode enumerates 2^n subsets and is limited to n <= {BRUTE_FORCE_MAX_N} (got n = {0})")]
    ModeTooLarge(usize),
    #[error("strong connectivity enumerates 2^n partitions and is limited to n <= {STRONG_CONNECTIVITY_MAX_N} (got n = {0})")]
    TooLarge(usize),
    #[error("enumeration needs {required} sets but the budget is {budget}; sizes up to {size_reached} fit")]
    BudgetExceeded {
        size_reached: usize,
        required: u128,
        budget: u64,
    },
    #[error("no vertex sets to examine (n = {n}, max size = {max_size})")]
    NothingToEnumerate { n: usize, max_size: usize },
    #[error(transparent)]
    System(#[from] SystemError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpreadingMode {
    /// Every 3-set that is not a block.
    Reduced,
    /// Every set of size at least 3 that is not a block.
    BruteForce,
}

/// A failing candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Set(VertexSet),
    Triples(Triple, Triple),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyVerdict {
    pub holds: bool,
    /// Present exactly when the property fails.
    pub witness: Option<Witness>,
    /// Candidates examined, in enumeration order, up to and including the
    /// witness (or all of them when the property holds).
    pub checked_count: u64,
}

impl PropertyVerdict {
    fn from_scan(scan: Scan<Witness>) -> Self {
        PropertyVerdict {
            holds: scan.failure.is_none(),
            witness: scan.failure,
            checked_count: scan.examined,
        }
    }

    pub fn witness_set(&self) -> Option<&VertexSet> {
        match &self.witness {
            Some(Witness::Set(s)) => Some(s),
            _ => None,
        }
    }
}

/// Reusable state for running the closure many times on one system.
pub(crate) struct ClosureScratch {
    mark: Vec<u32>,
    epoch: u32,
    members: Vec<Vertex>,
}

impl ClosureScratch {
    pub(crate) fn new(n: usize) -> Self {
        ClosureScratch {
            mark: vec![0; n],
            epoch: 0,
            members: Vec::with_capacity(n),
        }
    }

    fn bump(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        self.members.clear();
    }

    /// Grows `seed` to its closure and returns the closure size. Each vertex
    /// is probed only against vertices that entered before it, so every
    /// internal pair is looked up once. Stops early once all `n` vertices are
    /// in.
    pub(crate) fn run<I>(&mut self, sys: &TripleSystem, seed: I) -> usize
    where
        I: IntoIterator<Item = Vertex>,
    {
        self.bump();
        let epoch = self.epoch;
        for v in seed {
            if self.mark[v] != epoch {
                self.mark[v] = epoch;
                self.members.push(v);
            }
        }
        let n = sys.n();
        let mut i = 0;
        while i < self.members.len() && self.members.len() < n {
            let v = self.members[i];
            for j in 0..i {
                if let Some(z) = sys.third(v, self.members[j]) {
                    if self.mark[z] != epoch {
                        self.mark[z] = epoch;
                        self.members.push(z);
                    }
                }
            }
            i += 1;
        }
        self.members.len()
    }

    pub(crate) fn members(&self) -> &[Vertex] {
        &self.members
    }
}

/// Vertices outside `s` that complete a pair of `s` to a block.
pub fn neighbourhood(sys: &TripleSystem, s: &VertexSet) -> Result<VertexSet, SystemError> {
    s.check_range(sys.n())?;
    let m = s.members();
    let mut out = Vec::new();
    for (i, &x) in m.iter().enumerate() {
        for &y in &m[i + 1..] {
            if let Some(z) = sys.third(x, y) {
                if !s.contains(z) {
                    out.push(z);
                }
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// The least superset of `s` with empty neighbourhood.
pub fn closure(sys: &TripleSystem, s: &VertexSet) -> Result<VertexSet, SystemError> {
    s.check_range(sys.n())?;
    let mut scratch = ClosureScratch::new(sys.n());
    scratch.run(sys, s.members().iter().copied());
    Ok(scratch.members().iter().copied().collect())
}

/// Checks that every nontrivial vertex set (size at least 3, not a block)
/// closes to the whole vertex set.
///
/// Closure is monotone, and any set of four or more vertices contains a
/// 3-subset that is not a block (two blocks inside a 4-set would share a
/// pair), so the reduced mode only needs the 3-sets. Both modes therefore
/// report the same verdict and, in shortlex order, the same witness.
pub fn is_spreading(sys: &TripleSystem, mode: SpreadingMode) -> Result<PropertyVerdict, CheckError> {
    match mode {
        SpreadingMode::Reduced => Ok(spreading_reduced(sys)),
        SpreadingMode::BruteForce => spreading_brute_force(sys),
    }
}

fn spreading_reduced(sys: &TripleSystem) -> PropertyVerdict {
    let n = sys.n();
    let scan = ordered_scan(n, |a, cutoff| {
        let mut scratch = ClosureScratch::new(n);
        let mut examined = 0;
        for b in a + 1..n {
            if cutoff.beaten(a) {
                break;
            }
            let closing = sys.third(a, b);
            for c in b + 1..n {
                if closing == Some(c) {
                    continue;
                }
                examined += 1;
                if scratch.run(sys, [a, b, c]) < n {
                    return Scan {
                        examined,
                        failure: Some(Witness::Set(VertexSet::from_sorted_unchecked(vec![a, b, c]))),
                    };
                }
            }
        }
        Scan { examined, failure: None }
    });
    PropertyVerdict::from_scan(scan)
}

/// Closure computed directly from the definition: keep absorbing any block
/// that meets the set in exactly two vertices.
fn mask_closure(block_masks: &[u32], mut set: u32) -> u32 {
    loop {
        let before = set;
        for &t in block_masks {
            if (t & set).count_ones() == 2 {
                set |= t;
            }
        }
        if set == before {
            return set;
        }
    }
}

fn block_masks(sys: &TripleSystem) -> Vec<u32> {
    sys.triples()
        .iter()
        .map(|t| t.vertices().iter().fold(0u32, |m, &v| m | (1 << v)))
        .collect()
}

fn mask_of(members: &[Vertex]) -> u32 {
    members.iter().fold(0u32, |m, &v| m | (1 << v))
}

fn spreading_brute_force(sys: &TripleSystem) -> Result<PropertyVerdict, CheckError> {
    let n = sys.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(CheckError::ModeTooLarge(n));
    }
    let blocks = block_masks(sys);
    let full: u32 = if n == 0 { 0 } else { u32::MAX >> (32 - n) };
    let mut examined = 0u64;
    for k in 3..=n {
        let mut combos = LexCombinations::new(0, n, k);
        while let Some(s) = combos.next_subset() {
            let set = mask_of(s);
            if k == 3 && blocks.contains(&set) {
                continue;
            }
            examined += 1;
            if mask_closure(&blocks, set) != full {
                return Ok(PropertyVerdict {
                    holds: false,
                    witness: Some(Witness::Set(VertexSet::from_sorted_unchecked(s.to_vec()))),
                    checked_count: examined,
                });
            }
        }
    }
    Ok(PropertyVerdict {
        holds: true,
        witness: None,
        checked_count: examined,
    })
}

/// Checks that the vertex set of every pair of distinct blocks closes to the
/// whole vertex set. Larger subfamilies contain such a pair and close to at
/// least as much, so pairs suffice. Systems with fewer than two blocks hold
/// vacuously with `checked_count == 0`.
pub fn is_weakly_spreading(sys: &TripleSystem) -> PropertyVerdict {
    let n = sys.n();
    let blocks = sys.triples();
    let scan = ordered_scan(blocks.len(), |i, cutoff| {
        let mut scratch = ClosureScratch::new(n);
        let mut examined = 0;
        for j in i + 1..blocks.len() {
            if cutoff.beaten(i) {
                break;
            }
            examined += 1;
            let seed = blocks[i].vertices().into_iter().chain(blocks[j].vertices());
            if scratch.run(sys, seed) < n {
                return Scan {
                    examined,
                    failure: Some(Witness::Triples(blocks[i], blocks[j])),
                };
            }
        }
        Scan { examined, failure: None }
    });
    PropertyVerdict::from_scan(scan)
}

/// Checks that every vertex set `U` with `|U| >= 4` and nonempty complement
/// meets some block in exactly two vertices.
///
/// Quantifying over all such `U` imposes the condition on both sides of a
/// partition whenever both sides have at least four vertices, and on the
/// large side only otherwise.
pub fn is_strongly_connected(sys: &TripleSystem) -> Result<PropertyVerdict, CheckError> {
    let n = sys.n();
    if n > STRONG_CONNECTIVITY_MAX_N {
        return Err(CheckError::TooLarge(n));
    }
    let blocks = block_masks(sys);
    // One group per (size, first element), in shortlex order.
    let groups: Vec<(usize, usize)> = (4..n)
        .flat_map(|k| (0..=n - k).map(move |a| (k, a)))
        .collect();
    let scan = ordered_scan(groups.len(), |g, cutoff| {
        let (k, a) = groups[g];
        let mut combos = LexCombinations::new(a + 1, n, k - 1);
        let mut examined = 0;
        while let Some(rest) = combos.next_subset() {
            if examined & 0xfff == 0 && cutoff.beaten(g) {
                break;
            }
            examined += 1;
            let u = (1u32 << a) | mask_of(rest);
            if !blocks.iter().any(|&t| (t & u).count_ones() == 2) {
                let mut members = Vec::with_capacity(k);
                members.push(a);
                members.extend_from_slice(rest);
                return Scan {
                    examined,
                    failure: Some(Witness::Set(VertexSet::from_sorted_unchecked(members))),
                };
            }
        }
        Scan { examined, failure: None }
    });
    Ok(PropertyVerdict::from_scan(scan))
}

/// Result of the exhaustive small-set expansion scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpanderReport {
    pub max_size: usize,
    pub sets_examined: u64,
    /// Minimum over all examined `V'` of `|N(V')| - (|V'| - 3)`.
    pub min_deficiency: i64,
    /// Minimum `|N(V')|` for each examined size.
    pub per_size_min_neighbourhood: BTreeMap<usize, usize>,
    /// Shortlex-least set attaining `min_deficiency`.
    pub worst_set: VertexSet,
    /// Minimum `|N(V')| / |V'|` over nontrivial sets (size at least 3, not a
    /// block); absent when no nontrivial set was examined.
    pub min_ratio: Option<Ratio<u64>>,
    pub ratio_set: Option<VertexSet>,
}

struct SizeStats {
    min_nb: usize,
    min_nb_set: Vec<Vertex>,
    nontrivial: Option<(usize, Vec<Vertex>)>,
    examined: u64,
}

impl SizeStats {
    /// Folds in `other`, which comes later in lexicographic order.
    fn merge(&mut self, other: SizeStats) {
        self.examined += other.examined;
        if other.min_nb < self.min_nb {
            self.min_nb = other.min_nb;
            self.min_nb_set = other.min_nb_set;
        }
        if let Some((nb, set)) = other.nontrivial {
            match &self.nontrivial {
                Some((best, _)) if *best <= nb => {}
                _ => self.nontrivial = Some((nb, set)),
            }
        }
    }
}

/// Enumerates every vertex set of size `1..=max_size` (default `n / 2`) and
/// records how much it expands.
pub fn expander_deficiency(
    sys: &TripleSystem,
    max_size: Option<usize>,
    budget: u64,
) -> Result<ExpanderReport, CheckError> {
    let n = sys.n();
    let max_size = max_size.unwrap_or(n / 2).min(n);
    if max_size == 0 {
        return Err(CheckError::NothingToEnumerate { n, max_size });
    }

    let mut required: u128 = 0;
    let mut size_reached = 0;
    for k in 1..=max_size {
        required = required.saturating_add(binomial(n, k));
        if required <= budget as u128 {
            size_reached = k;
        }
    }
    if required > budget as u128 {
        return Err(CheckError::BudgetExceeded {
            size_reached,
            required,
            budget,
        });
    }

    let groups: Vec<(usize, usize)> = (1..=max_size)
        .flat_map(|k| (0..=n - k).map(move |a| (k, a)))
        .collect();
    let stats: Vec<SizeStats> = {
        use rayon::prelude::*;
        groups
            .par_iter()
            .map(|&(k, a)| size_group_stats(sys, k, a))
            .collect()
    };

    let mut per_size: BTreeMap<usize, SizeStats> = BTreeMap::new();
    for (&(k, _), s) in groups.iter().zip(stats) {
        match per_size.get_mut(&k) {
            Some(acc) => acc.merge(s),
            None => {
                per_size.insert(k, s);
            }
        }
    }

    let mut sets_examined = 0;
    let mut best: Option<(i64, &Vec<Vertex>)> = None;
    let mut ratio: Option<(Ratio<u64>, &Vec<Vertex>)> = None;
    for (&k, s) in &per_size {
        sets_examined += s.examined;
        let def = s.min_nb as i64 - (k as i64 - 3);
        if best.is_none_or(|(d, _)| def < d) {
            best = Some((def, &s.min_nb_set));
        }
        if let Some((nb, set)) = &s.nontrivial {
            let r = Ratio::new(*nb as u64, k as u64);
            if ratio.as_ref().is_none_or(|(cur, _)| r < *cur) {
                ratio = Some((r, set));
            }
        }
    }
    let (min_deficiency, worst) = best.expect("at least one size examined");

    Ok(ExpanderReport {
        max_size,
        sets_examined,
        min_deficiency,
        per_size_min_neighbourhood: per_size.iter().map(|(&k, s)| (k, s.min_nb)).collect(),
        worst_set: VertexSet::from_sorted_unchecked(worst.clone()),
        min_ratio: ratio.as_ref().map(|(r, _)| *r),
        ratio_set: ratio.map(|(_, s)| VertexSet::from_sorted_unchecked(s.clone())),
    })
}

/// Neighbourhood sizes of all `k`-sets whose least element is `a`.
fn size_group_stats(sys: &TripleSystem, k: usize, a: Vertex) -> SizeStats {
    let n = sys.n();
    let mut member = vec![0u32; n];
    let mut seen = vec![0u32; n];
    let mut epoch = 0u32;
    let mut set = vec![0; k];
    set[0] = a;

    let mut stats = SizeStats {
        min_nb: usize::MAX,
        min_nb_set: Vec::new(),
        nontrivial: None,
        examined: 0,
    };
    let mut combos = LexCombinations::new(a + 1, n, k - 1);
    while let Some(rest) = combos.next_subset() {
        set[1..].copy_from_slice(rest);
        epoch += 1;
        for &v in &set {
            member[v] = epoch;
        }
        let mut nb = 0;
        for i in 0..k {
            for j in i + 1..k {
                if let Some(z) = sys.third(set[i], set[j]) {
                    if member[z] != epoch && seen[z] != epoch {
                        seen[z] = epoch;
                        nb += 1;
                    }
                }
            }
        }
        stats.examined += 1;
        if nb < stats.min_nb {
            stats.min_nb = nb;
            stats.min_nb_set = set.clone();
        }
        let is_block = k == 3 && sys.third(set[0], set[1]) == Some(set[2]);
        if k >= 3 && !is_block && stats.nontrivial.as_ref().is_none_or(|(best, _)| nb < *best) {
            stats.nontrivial = Some((nb, set.clone()));
        }
    }
    stats
}
