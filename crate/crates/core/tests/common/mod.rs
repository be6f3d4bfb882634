//! Slow, obviously-correct reference implementations working straight from
//! the block list, plus the corpus of systems shared by the test targets.
#![allow(dead_code)]

use linear_triples::{
    bose_skolem, build_system, cayley_latin, crowning, spreading_6p3, star_expansion, TripleSystem, VertexSet,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn blocks(sys: &TripleSystem) -> Vec<[usize; 3]> {
    sys.triples().iter().map(|t| t.vertices()).collect()
}

pub fn mask_of(set: &[usize]) -> u64 {
    set.iter().fold(0, |m, &v| m | 1 << v)
}

pub fn members(mask: u64) -> Vec<usize> {
    (0..64).filter(|&v| mask >> v & 1 == 1).collect()
}

fn hits(b: &[usize; 3], mask: u64) -> usize {
    b.iter().filter(|&&v| mask >> v & 1 == 1).count()
}

/// Adds whole blocks meeting the set in two or more vertices until nothing changes.
pub fn naive_closure(bl: &[[usize; 3]], mut mask: u64) -> u64 {
    loop {
        let before = mask;
        for b in bl {
            if hits(b, mask) >= 2 {
                mask |= mask_of(b);
            }
        }
        if mask == before {
            return mask;
        }
    }
}

pub fn naive_neighbourhood(bl: &[[usize; 3]], mask: u64) -> u64 {
    bl.iter()
        .filter(|b| hits(b, mask) == 2)
        .fold(0, |acc, b| acc | (mask_of(b) & !mask))
}

/// All k-subsets of `0..n` as masks, lexicographic by sorted member list.
pub fn lex_subsets(n: usize, k: usize) -> Vec<u64> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<u64>) {
        if cur.len() == k {
            out.push(mask_of(cur));
            return;
        }
        for v in start..n {
            if n - v < k - cur.len() {
                break;
            }
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// First non-block set of size at least 3, in size-then-lexicographic order,
/// whose closure misses a vertex.
pub fn naive_spreading_witness(sys: &TripleSystem) -> Option<Vec<usize>> {
    let n = sys.n();
    let bl = blocks(sys);
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let block_masks: Vec<u64> = bl.iter().map(|b| mask_of(b)).collect();
    for k in 3..=n {
        for s in lex_subsets(n, k) {
            if k == 3 && block_masks.contains(&s) {
                continue;
            }
            if naive_closure(&bl, s) != full {
                return Some(members(s));
            }
        }
    }
    None
}

/// Pair of distinct blocks whose union does not close to everything.
pub fn naive_weak_failure(sys: &TripleSystem) -> Option<([usize; 3], [usize; 3])> {
    let n = sys.n();
    let bl = blocks(sys);
    let full = (1u64 << n) - 1;
    for i in 0..bl.len() {
        for j in i + 1..bl.len() {
            if naive_closure(&bl, mask_of(&bl[i]) | mask_of(&bl[j])) != full {
                return Some((bl[i], bl[j]));
            }
        }
    }
    None
}

/// Strong connectivity straight from the definition: for every proper
/// bipartition with a side of size at least 4, some block meets that side in
/// exactly two vertices.
pub fn naive_strongly_connected(sys: &TripleSystem) -> bool {
    let n = sys.n();
    let bl = blocks(sys);
    let full = (1u64 << n) - 1;
    (1..full).all(|u| {
        let w = full & !u;
        [u, w].iter().all(|&side| side.count_ones() < 4 || bl.iter().any(|b| hits(b, side) == 2))
    })
}

/// `(min deficiency, min |N|/|V'| over nontrivial sets as (num, den))` over
/// all sets of size `1..=max_size`.
pub fn naive_expansion(sys: &TripleSystem, max_size: usize) -> (i64, Option<(u64, u64)>) {
    let n = sys.n();
    let bl = blocks(sys);
    let block_masks: Vec<u64> = bl.iter().map(|b| mask_of(b)).collect();
    let mut min_def = i64::MAX;
    let mut ratio: Option<(u64, u64)> = None;
    for s in 1u64..(1 << n) {
        let k = s.count_ones() as usize;
        if k > max_size {
            continue;
        }
        let nb = naive_neighbourhood(&bl, s).count_ones() as u64;
        min_def = min_def.min(nb as i64 - (k as i64 - 3));
        if k >= 3 && !(k == 3 && block_masks.contains(&s)) {
            let better = match ratio {
                None => true,
                Some((a, b)) => nb * b < a * k as u64,
            };
            if better {
                ratio = Some((nb, k as u64));
            }
        }
    }
    (min_def, ratio)
}

pub fn set(v: &[usize]) -> VertexSet {
    v.iter().copied().collect()
}

/// Linear system on `n` vertices: blocks drawn in random order, each kept
/// when it covers no pair twice, up to a random target count.
pub fn random_linear_system(rng: &mut ChaCha8Rng, n: usize) -> TripleSystem {
    let mut all = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                all.push([a, b, c]);
            }
        }
    }
    all.shuffle(rng);
    let target = rng.gen_range(0..=n * (n - 1) / 6);
    let mut used = vec![vec![false; n]; n];
    let mut chosen = Vec::new();
    for t in all {
        if chosen.len() == target {
            break;
        }
        let pairs = [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])];
        if pairs.iter().any(|&(x, y)| used[x][y]) {
            continue;
        }
        for (x, y) in pairs {
            used[x][y] = true;
        }
        chosen.push(t);
    }
    build_system(n, chosen).expect("greedy choice keeps linearity")
}

pub fn random_corpus(seed: u64, count: usize, max_n: usize) -> Vec<TripleSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(3..=max_n);
            random_linear_system(&mut rng, n)
        })
        .collect()
}

/// Every built-in construction at small parameters, labelled.
pub fn generated_systems() -> Vec<(String, TripleSystem)> {
    let mut out = Vec::new();
    for q in [3, 5, 7, 9, 11] {
        out.push((format!("bose_skolem({q})"), bose_skolem(q).unwrap()));
    }
    for p in [3, 5, 7] {
        out.push((format!("spreading_6p3({p})"), spreading_6p3(p).unwrap()));
        out.push((format!("cayley_latin({p})"), cayley_latin(p).unwrap()));
    }
    for m in [4, 5, 6] {
        out.push((format!("star_expansion({m})"), star_expansion(m).unwrap()));
    }
    let base = spreading_6p3(3).unwrap();
    out.push(("crowning(spreading_6p3(3))".into(), crowning(&base, None).unwrap()));
    out.push(("crowning(spreading_6p3(3), [0])".into(), crowning(&base, Some(&[0])).unwrap()));
    out.push((
        "crowning(spreading_6p3(3), [0..5])".into(),
        crowning(&base, Some(&[0, 1, 2, 3, 4])).unwrap(),
    ));
    out
}
