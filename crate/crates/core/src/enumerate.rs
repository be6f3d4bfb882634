//! Subset enumeration helpers shared by the exhaustive checkers.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// k-subsets of `lo..n` in lexicographic order, advanced in place.
pub struct LexCombinations {
    idx: Vec<usize>,
    n: usize,
    started: bool,
}

impl LexCombinations {
    pub fn new(lo: usize, n: usize, k: usize) -> Self {
        LexCombinations {
            idx: (lo..lo + k).collect(),
            n,
            started: false,
        }
    }

    /// Moves to the next subset; returns `None` once exhausted.
    pub fn next_subset(&mut self) -> Option<&[usize]> {
        let k = self.idx.len();
        if !self.started {
            self.started = true;
            return (self.idx.last().is_none_or(|&l| l < self.n)).then_some(&self.idx[..]);
        }
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.idx[i] < self.n - (k - i) {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                return Some(&self.idx[..]);
            }
        }
        None
    }
}

/// Result of scanning one ordered group of candidates.
pub struct Scan<W> {
    /// Candidates examined, up to and including the failure if there is one.
    pub examined: u64,
    pub failure: Option<W>,
}

/// Shared marker letting later groups give up once an earlier group failed.
pub struct Cutoff(AtomicUsize);

impl Cutoff {
    /// True when a group before `group` already produced a failure, so the
    /// result for `group` will be discarded.
    #[inline]
    pub fn beaten(&self, group: usize) -> bool {
        self.0.load(Ordering::Relaxed) < group
    }
}

/// Scans candidate groups `0..groups` in parallel and merges them as if they
/// had been scanned one after another: the reported failure is the first one
/// in group order, and `examined` counts everything before it.
pub fn ordered_scan<W, F>(groups: usize, f: F) -> Scan<W>
where
    W: Send,
    F: Fn(usize, &Cutoff) -> Scan<W> + Sync,
{
    let cutoff = Cutoff(AtomicUsize::new(usize::MAX));
    let results: Vec<Scan<W>> = (0..groups)
        .into_par_iter()
        .map(|g| {
            if cutoff.beaten(g) {
                return Scan { examined: 0, failure: None };
            }
            let r = f(g, &cutoff);
            if r.failure.is_some() {
                cutoff.0.fetch_min(g, Ordering::Relaxed);
            }
            r
        })
        .collect();

    let mut examined = 0;
    for r in results {
        examined += r.examined;
        if r.failure.is_some() {
            return Scan { examined, failure: r.failure };
        }
    }
    Scan { examined, failure: None }
}
