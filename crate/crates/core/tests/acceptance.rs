//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use linear_triples::cli::run;
use linear_triples::{
    bose_skolem, cayley_latin, closure, crowning, expander_deficiency, is_spreading, is_strongly_connected,
    is_weakly_spreading, lower_bound_constants, min_weakly_spreading, parse_system, restricted_sumset,
    serialize_system, spreading_6p3, star_expansion, sumset, tau, ResidueSet, SpreadingMode, TripleSystem, VertexSet,
    Witness,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{generated_systems, random_corpus};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    }};
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn steiner_counts() -> Outcome {
    for (q, expected) in [(3, 12), (5, 35), (7, 70), (9, 117)] {
        let sys = bose_skolem(q).map_err(|e| e.to_string())?;
        let n = 3 * q;
        ensure!(n * (n - 1) / 6 == expected, "formula disagrees at q = {q}");
        ensure!(sys.len() == expected, "bose_skolem({q}) has {} triples, want {expected}", sys.len());
        ensure!(sys.is_steiner(), "bose_skolem({q}) is not Steiner");
        // every pair covered exactly once, counted from the block list
        let mut cover = vec![0u32; n * n];
        for t in common::blocks(&sys) {
            for (x, y) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
                cover[x * n + y] += 1;
            }
        }
        ensure!(
            (0..n).all(|x| (x + 1..n).all(|y| cover[x * n + y] == 1)),
            "pair coverage count differs from 1 at q = {q}"
        );
    }
    Ok("q = 3, 5, 7, 9 give 12, 35, 70, 117 triples".into())
}

fn expander_small_primes() -> Outcome {
    let mut parts = Vec::new();
    for p in [3, 5, 7] {
        let sys = bose_skolem(p).unwrap();
        let report = expander_deficiency(&sys, None, linear_triples::closure::DEFAULT_ENUMERATION_BUDGET)
            .map_err(|e| e.to_string())?;
        ensure!(report.max_size == sys.n() / 2, "max size {}", report.max_size);
        ensure!(report.min_deficiency == 0, "p = {p}: min deficiency {}", report.min_deficiency);
        let worst = report.worst_set.members();
        ensure!(
            worst.len() == 3 && sys.contains_triple(&linear_triples::Triple::new(worst[0], worst[1], worst[2]).unwrap()),
            "p = {p}: deficiency 0 attained by {}, not a triple",
            report.worst_set
        );
        let total: usize = (1..=sys.n() / 2).map(|k| binom(sys.n(), k)).sum();
        ensure!(report.sets_examined == total as u64, "p = {p}: examined {}", report.sets_examined);
        parts.push(format!("n = {}: {} sets", sys.n(), total));
    }
    Ok(format!("min deficiency 0 at a triple ({})", parts.join(", ")))
}

fn spreading_construction() -> Outcome {
    let mut ratios = Vec::new();
    for (p, expected) in [(3usize, 64usize), (5, 156), (7, 288)] {
        ensure!(5 * p * p + 6 * p + 1 == expected, "formula at p = {p}");
        let sys = spreading_6p3(p).map_err(|e| e.to_string())?;
        ensure!(sys.n() == 6 * p + 3, "p = {p}: n = {}", sys.n());
        ensure!(sys.len() == expected, "p = {p}: {} triples, want {expected}", sys.len());
        let v = is_spreading(&sys, SpreadingMode::Reduced).map_err(|e| e.to_string())?;
        ensure!(v.holds, "p = {p}: not spreading, witness {:?}", v.witness);
        ratios.push(sys.len() as f64 / (sys.n() * sys.n()) as f64);
    }
    ensure!(
        ratios.windows(2).all(|w| w[0] > w[1]) && ratios.iter().all(|&r| r > 5.0 / 36.0),
        "ratios {ratios:?} do not decrease toward 5/36"
    );
    Ok(format!("64, 156, 288 triples, all spreading; ratios {ratios:.5?}"))
}

fn crowning_weak() -> Outcome {
    let base = spreading_6p3(3).unwrap();
    let full = crowning(&base, None).map_err(|e| e.to_string())?;
    ensure!((full.n(), full.len()) == (39, 82), "full crowning is ({}, {})", full.n(), full.len());
    ensure!(is_weakly_spreading(&full).holds, "full crowning is not weakly spreading");
    let partial = crowning(&base, Some(&[0, 1, 2, 3, 4])).map_err(|e| e.to_string())?;
    ensure!(
        (partial.n(), partial.len()) == (26, 69),
        "5-edge crowning is ({}, {})",
        partial.n(),
        partial.len()
    );
    ensure!(is_weakly_spreading(&partial).holds, "5-edge crowning is not weakly spreading");
    ensure!(common::naive_weak_failure(&partial).is_none(), "oracle rejects the 5-edge crowning");
    Ok("(39, 82) and (26, 69), both weakly spreading".into())
}

fn latin_construction() -> Outcome {
    for p in [3usize, 5, 7] {
        let sys = cayley_latin(p).map_err(|e| e.to_string())?;
        ensure!(sys.len() == p * p, "p = {p}: {} triples", sys.len());
        ensure!(9 * sys.len() == sys.n() * sys.n(), "p = {p}: count differs from (3p)^2/9");
        ensure!(is_weakly_spreading(&sys).holds, "p = {p}: not weakly spreading");
        let v = is_spreading(&sys, SpreadingMode::Reduced).map_err(|e| e.to_string())?;
        ensure!(!v.holds, "p = {p}: unexpectedly spreading");
        let Some(Witness::Set(w)) = &v.witness else {
            return Err(format!("p = {p}: witness {:?}", v.witness));
        };
        let class = w.members()[0] / p;
        ensure!(
            w.members().iter().all(|&x| x / p == class),
            "p = {p}: witness {w} spans several classes"
        );
    }
    Ok("p = 3, 5, 7: p^2 triples, weakly spreading, single-class spreading witness".into())
}

fn star_counterexample() -> Outcome {
    for m in [4usize, 5] {
        let sys = star_expansion(m).map_err(|e| e.to_string())?;
        let v = is_weakly_spreading(&sys);
        ensure!(!v.holds, "m = {m}: weakly spreading");
        match &v.witness {
            Some(Witness::Triples(a, b)) => ensure!(
                a.vertices().iter().filter(|&&x| x < m).any(|x| b.contains(*x)),
                "m = {m}: witness triples share no base vertex"
            ),
            w => return Err(format!("m = {m}: witness {w:?}")),
        }
        let ts = sys.triples();
        let mut pairs = 0;
        for i in 0..ts.len() {
            for j in i + 1..ts.len() {
                let u: VertexSet = VertexSet::from(ts[i]).union(&VertexSet::from(ts[j]));
                let cl = closure(&sys, &u).unwrap();
                ensure!(cl.len() > u.len(), "m = {m}: {} and {} generate nothing", ts[i], ts[j]);
                pairs += 1;
            }
        }
        ensure!(pairs == binom(binom(m, 2), 2), "pair count");
    }
    Ok("m = 4, 5: not weakly spreading, every pair of triples grows".into())
}

fn extremal_sharpness() -> Outcome {
    let mut parts = Vec::new();
    for n in 5..=10 {
        let start = Instant::now();
        let r = min_weakly_spreading(n, Some(1), linear_triples::extremal::DEFAULT_SEARCH_BUDGET)
            .map_err(|e| e.to_string())?;
        let took = start.elapsed();
        ensure!(r.minimum == n - 3, "n = {n}: minimum {}", r.minimum);
        ensure!(r.exhaustive_below, "n = {n}: smaller counts were not refuted");
        ensure!(is_weakly_spreading(&r.witness).holds, "n = {n}: witness fails");
        ensure!(r.witness.span().len() == n, "n = {n}: witness does not span");
        let limit = if n <= 8 { Duration::from_secs(60) } else { Duration::from_secs(1800) };
        ensure!(took < limit, "n = {n}: took {took:?}");
        parts.push(format!("{n}:{}", r.minimum));
    }
    Ok(format!("minimum = n - 3, exhaustive from one block ({})", parts.join(" ")))
}

fn numeric_constants() -> Outcome {
    let (_, t) = tau(1e-10).map_err(|e| e.to_string())?;
    ensure!((t - 0.51829).abs() <= 1e-4, "tau = {t}");
    let c = lower_bound_constants(t).map_err(|e| e.to_string())?;
    ensure!((c.edge_bound_coeff - 0.169).abs() <= 5e-4, "edge coefficient {}", c.edge_bound_coeff);
    ensure!((c.xi_sp_coeff - 0.1103).abs() <= 5e-4, "xi_sp coefficient {}", c.xi_sp_coeff);
    let naive = lower_bound_constants(1.0).map_err(|e| e.to_string())?;
    let exact = (13f64.sqrt() - 1.0) / 12.0;
    ensure!((naive.edge_bound_coeff - exact).abs() <= 1e-10, "naive coefficient {}", naive.edge_bound_coeff);
    Ok(format!(
        "tau {t:.6}, edge {:.6}, xi_sp {:.6}, naive {:.10}",
        c.edge_bound_coeff, c.xi_sp_coeff, naive.edge_bound_coeff
    ))
}

fn oracle_equivalence() -> Outcome {
    let mut corpus: Vec<TripleSystem> = vec![bose_skolem(3).unwrap(), bose_skolem(5).unwrap(), cayley_latin(3).unwrap()];
    corpus.extend(random_corpus(0x5eed, 100, 12));
    let mut failing = 0;
    for (i, sys) in corpus.iter().enumerate() {
        let r = is_spreading(sys, SpreadingMode::Reduced).map_err(|e| e.to_string())?;
        let b = is_spreading(sys, SpreadingMode::BruteForce).map_err(|e| e.to_string())?;
        ensure!(r.holds == b.holds, "system {i}: verdicts differ");
        ensure!(r.witness == b.witness, "system {i}: witnesses {:?} vs {:?}", r.witness, b.witness);
        if !r.holds {
            failing += 1;
        }
        if sys.n() <= 12 {
            let oracle = common::naive_spreading_witness(sys).map(|w| Witness::Set(common::set(&w)));
            ensure!(oracle == r.witness, "system {i}: oracle witness {oracle:?}, got {:?}", r.witness);
        }
    }
    Ok(format!("{} systems agree ({failing} failing)", corpus.len()))
}

fn implication_chain() -> Outcome {
    let mut systems: Vec<(String, TripleSystem)> =
        generated_systems().into_iter().filter(|(_, s)| s.n() <= 22).collect();
    systems.extend(random_corpus(0xc4a1, 60, 12).into_iter().enumerate().map(|(i, s)| (format!("random {i}"), s)));
    let mut steiner = 0;
    for (name, sys) in &systems {
        let sp = is_spreading(sys, SpreadingMode::Reduced).map_err(|e| e.to_string())?.holds;
        let sc = is_strongly_connected(sys).map_err(|e| e.to_string())?.holds;
        let ws = is_weakly_spreading(sys).holds;
        ensure!(!sp || sc, "{name}: spreading but not strongly connected");
        ensure!(!sc || ws, "{name}: strongly connected but not weakly spreading");
        if sys.is_steiner() {
            steiner += 1;
            ensure!(sp == sc, "{name}: Steiner system with spreading {sp} but strong connectivity {sc}");
        }
    }
    Ok(format!("{} systems, {steiner} Steiner", systems.len()))
}

const PRIMES: [u64; 11] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31];

fn random_residues(rng: &mut ChaCha8Rng, p: u64) -> ResidueSet {
    loop {
        let keep = rng.gen_range(0.05..1.0);
        let members: Vec<u64> = (0..p).filter(|_| rng.gen_bool(keep)).collect();
        if !members.is_empty() {
            return ResidueSet::new(p, members).unwrap();
        }
    }
}

fn sumset_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xcd_e4);
    for _ in 0..1000 {
        let p = PRIMES[rng.gen_range(0..PRIMES.len())];
        let (a, b) = (random_residues(&mut rng, p), random_residues(&mut rng, p));
        let s = sumset(&a, &b).map_err(|e| e.to_string())?;
        let bound = (p as usize).min(a.len() + b.len() - 1);
        ensure!(s.len() >= bound, "CD fails: p = {p}, {:?} + {:?}", a.members(), b.members());
    }
    for _ in 0..1000 {
        let p = PRIMES[rng.gen_range(0..PRIMES.len())];
        let a = random_residues(&mut rng, p);
        let s = restricted_sumset(&a);
        let bound = (p as i64).min(2 * a.len() as i64 - 3);
        ensure!(s.len() as i64 >= bound, "EH fails: p = {p}, {:?}", a.members());
    }
    Ok("1000 Cauchy-Davenport and 1000 Erdos-Heilbronn instances".into())
}

fn cli_code(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("lts").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned())
}

fn cli_round_trip() -> Outcome {
    for (name, sys) in generated_systems() {
        let text = serialize_system(&sys);
        let back = parse_system(&text).map_err(|e| format!("{name}: {e}"))?;
        ensure!(serialize_system(&back) == text, "{name}: round trip changed the file");
        ensure!(back.triples() == sys.triples() && back.n() == sys.n(), "{name}: round trip changed the system");
    }
    let fixtures = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");
    let cases = [
        ("sts9.lts", "spreading", 0),
        ("two_triples.lts", "spreading", 1),
        ("star4.lts", "weakly-spreading", 1),
        ("star4.lts", "linear", 0),
        ("malformed.lts", "linear", 2),
        ("missing.lts", "linear", 2),
        ("nonlinear.lts", "linear", 3),
    ];
    for (file, property, want) in cases {
        let path = format!("{fixtures}/{file}");
        let (code, _) = cli_code(&["check", "--input", &path, "--property", property]);
        ensure!(code == want, "check {file} --property {property}: exit {code}, want {want}");
    }
    let (code, _) = cli_code(&["check", "--property", "spreading"]);
    ensure!(code == 2, "missing --input: exit {code}");
    let (code, out) = cli_code(&["construct", "--family", "spreading-6p3", "--p", "3"]);
    ensure!(code == 0 && out == serialize_system(&spreading_6p3(3).unwrap()), "construct output differs");
    Ok("round trips on every construction; fixture exit codes 0, 1, 2, 3".into())
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    check: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "steiner validity and counts", limit: Duration::from_secs(1), check: steiner_counts },
        Criterion { id: 2, name: "expander deficiency for small primes", limit: Duration::from_secs(60), check: expander_small_primes },
        Criterion { id: 3, name: "spreading construction", limit: Duration::from_secs(120), check: spreading_construction },
        Criterion { id: 4, name: "crowning", limit: Duration::from_secs(30), check: crowning_weak },
        Criterion { id: 5, name: "latin construction", limit: Duration::from_secs(30), check: latin_construction },
        Criterion { id: 6, name: "star expansion counterexample", limit: Duration::from_secs(10), check: star_counterexample },
        Criterion { id: 7, name: "extremal sharpness n = 5..10", limit: Duration::from_secs(4 * 60 + 2 * 1800), check: extremal_sharpness },
        Criterion { id: 8, name: "numeric constants", limit: Duration::from_secs(1), check: numeric_constants },
        Criterion { id: 9, name: "reduced vs brute-force spreading", limit: Duration::from_secs(120), check: oracle_equivalence },
        Criterion { id: 10, name: "implication chain", limit: Duration::from_secs(600), check: implication_chain },
        Criterion { id: 11, name: "sumset lower bounds", limit: Duration::from_secs(5), check: sumset_properties },
        Criterion { id: 12, name: "cli round trip and exit codes", limit: Duration::from_secs(5), check: cli_round_trip },
    ];

    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        let result = match result {
            Ok(detail) if took > c.limit => Err(format!("{detail}; took {took:.2?}, limit {:?}", c.limit)),
            r => r,
        };
        match result {
            Ok(detail) => println!("PASS  criterion {:>2}  {:<38} {:>9.2?}  {detail}", c.id, c.name, took),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {:>2}  {:<38} {:>9.2?}  {why}", c.id, c.name, took);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
