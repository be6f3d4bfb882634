//! Command-line front end. Every subcommand prints a JSON report on stdout.
//!
//! Exit codes: 0 success or property holds, 1 property fails (the witness is
//! in the report), 2 usage, I/O or malformed input, 3 invalid system.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{bounds_report, construction_density, lower_bound_constants, tau};
use crate::closure::{
    closure, expander_deficiency, is_spreading, is_strongly_connected, is_weakly_spreading, neighbourhood,
    PropertyVerdict, SpreadingMode, Witness, DEFAULT_ENUMERATION_BUDGET,
};
use crate::constructions::{crowning, is_prime, ConstructionParams, Family};
use crate::extremal::{min_weakly_spreading, DEFAULT_SEARCH_BUDGET};
use crate::format::{parse_system, serialize_system, FormatError};
use crate::system::{TripleSystem, VertexSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "lts", version, about = "Linear triple systems: constructions, closure and spreading checks")]
struct Cli {
    /// Add wall-clock time to reports (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a system from one of the built-in families.
    Construct(ConstructArgs),
    /// Check a property of a system file.
    Check(CheckArgs),
    /// Print the closure and neighbourhood of a vertex set.
    Closure(ClosureArgs),
    /// Exhaustive expansion scan over small vertex sets.
    Expander(ExpanderArgs),
    /// Search for minimum weakly spreading systems.
    Search(SearchArgs),
    /// Numeric constants of the density bounds.
    Bounds(BoundsArgs),
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Modulus, prime or order, depending on the family.
    #[arg(long = "p")]
    p: usize,
    /// Crowning only: indices of the uncovered pairs to crown.
    #[arg(long, value_delimiter = ',')]
    keep: Option<Vec<usize>>,
    /// Crowning only: crown this system instead of the spreading system for `--p`.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit JSON instead of the `.lts` text format.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Property {
    Linear,
    Steiner,
    Spreading,
    WeaklySpreading,
    StrongConnectivity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Reduced,
    BruteForce,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    property: Property,
    #[arg(long, value_enum, default_value = "reduced")]
    mode: ModeArg,
}

#[derive(Args, Debug)]
struct ClosureArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    set: Vec<usize>,
}

#[derive(Args, Debug)]
struct ExpanderArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    max_size: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    budget: u64,
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// Minimum weakly spreading system (the only search offered).
    #[arg(long, required = true)]
    min_wsp: bool,
    #[arg(long = "n")]
    n: usize,
    #[arg(long)]
    start_at: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
    budget: u64,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    tau: bool,
    #[arg(long)]
    constants: bool,
    #[arg(long)]
    density: Option<usize>,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
}

/// A failure that ends the command with a diagnostic.
struct Fatal {
    code: i32,
    message: String,
}

impl Fatal {
    fn usage(message: impl ToString) -> Self {
        Fatal {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }
}

struct Outcome {
    report: Option<Value>,
    text: Option<String>,
    code: i32,
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
            } else {
                let _ = write!(stdout, "{rendered}");
            }
            return code;
        }
    };
    let echo: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();

    let threads = std::env::var("LTS_THREADS").ok().and_then(|v| v.parse::<usize>().ok());
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start worker threads: {e}");
            return EXIT_USAGE;
        }
    };

    let started = Instant::now();
    let mut notes = Vec::new();
    let result = pool.install(|| dispatch(&cli.command, &mut notes));
    for note in notes {
        let _ = writeln!(stderr, "note: {note}");
    }
    match result {
        Ok(out) => {
            if let Some(text) = out.text {
                let _ = write!(stdout, "{text}");
            }
            if let Some(mut report) = out.report {
                if let Value::Object(map) = &mut report {
                    map.insert("argv".into(), json!(echo));
                    if cli.timing {
                        map.insert("wall_time_ms".into(), json!(started.elapsed().as_secs_f64() * 1e3));
                    }
                }
                let rendered = serde_json::to_string_pretty(&report).expect("reports are plain JSON");
                let _ = writeln!(stdout, "{rendered}");
            }
            out.code
        }
        Err(fatal) => {
            let _ = writeln!(stderr, "error: {}", fatal.message);
            fatal.code
        }
    }
}

fn load(path: &Path) -> Result<TripleSystem, Fatal> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Fatal::usage(format!("cannot read {}: {e}", path.display())))?;
    parse_system(&text).map_err(|e| Fatal {
        code: match e {
            FormatError::Syntax { .. } => EXIT_USAGE,
            FormatError::Invalid { .. } => EXIT_INVALID,
        },
        message: format!("{}: {e}", path.display()),
    })
}

fn summary(sys: &TripleSystem) -> Value {
    json!({ "n": sys.n(), "m": sys.len(), "steiner": sys.is_steiner() })
}

fn dispatch(command: &Command, notes: &mut Vec<String>) -> Result<Outcome, Fatal> {
    match command {
        Command::Construct(a) => construct(a, notes),
        Command::Check(a) => check(a),
        Command::Closure(a) => closure_cmd(a),
        Command::Expander(a) => expander(a),
        Command::Search(a) => search(a),
        Command::Bounds(a) => bounds(a),
    }
}

fn construct(a: &ConstructArgs, notes: &mut Vec<String>) -> Result<Outcome, Fatal> {
    if a.keep.is_some() && a.family != Family::Crowning {
        return Err(Fatal::usage("--keep only applies to --family crowning"));
    }
    if a.family == Family::BoseSkolem && a.p % 2 == 1 && a.p >= 3 && !is_prime(a.p) {
        notes.push(format!(
            "{} is composite; the system is Steiner but the expansion guarantee needs a prime",
            a.p
        ));
    }
    let sys = match (&a.input, a.family) {
        (Some(path), Family::Crowning) => {
            let base = load(path)?;
            crowning(&base, a.keep.as_deref()).map_err(Fatal::usage)?
        }
        (Some(_), _) => return Err(Fatal::usage("--input only applies to --family crowning")),
        (None, family) => ConstructionParams {
            family,
            modulus_or_order: a.p,
            keep_set: a.keep.clone(),
        }
        .build()
        .map_err(Fatal::usage)?,
    };

    let body = if a.json {
        serde_json::to_string_pretty(&sys).expect("systems serialize") + "\n"
    } else {
        serialize_system(&sys)
    };
    match &a.out {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| Fatal::usage(format!("cannot write {}: {e}", path.display())))?;
            Ok(Outcome {
                report: Some(json!({
                    "command": "construct",
                    "family": a.family,
                    "parameter": a.p,
                    "system": summary(&sys),
                    "out": path.display().to_string(),
                })),
                text: None,
                code: EXIT_OK,
            })
        }
        None => Ok(Outcome {
            report: None,
            text: Some(body),
            code: EXIT_OK,
        }),
    }
}

fn steiner_verdict(sys: &TripleSystem) -> PropertyVerdict {
    let n = sys.n();
    let mut checked = 0;
    for x in 0..n {
        for y in x + 1..n {
            checked += 1;
            if !sys.is_covered(x, y) {
                return PropertyVerdict {
                    holds: false,
                    witness: Some(Witness::Set(VertexSet::from_sorted_unchecked(vec![x, y]))),
                    checked_count: checked,
                };
            }
        }
    }
    PropertyVerdict {
        holds: true,
        witness: None,
        checked_count: checked,
    }
}

fn check(a: &CheckArgs) -> Result<Outcome, Fatal> {
    let sys = load(&a.input)?;
    let mode = match a.mode {
        ModeArg::Reduced => SpreadingMode::Reduced,
        ModeArg::BruteForce => SpreadingMode::BruteForce,
    };
    let verdict = match a.property {
        Property::Linear => PropertyVerdict {
            holds: true,
            witness: None,
            checked_count: sys.len() as u64,
        },
        Property::Steiner => steiner_verdict(&sys),
        Property::Spreading => is_spreading(&sys, mode).map_err(Fatal::usage)?,
        Property::WeaklySpreading => is_weakly_spreading(&sys),
        Property::StrongConnectivity => is_strongly_connected(&sys).map_err(Fatal::usage)?,
    };
    let mut report = json!({
        "command": "check",
        "property": a.property,
        "system": summary(&sys),
        "verdict": verdict,
    });
    if a.property == Property::Spreading {
        report["mode"] = json!(mode);
    }
    Ok(Outcome {
        report: Some(report),
        text: None,
        code: if verdict.holds { EXIT_OK } else { EXIT_FAILS },
    })
}

fn closure_cmd(a: &ClosureArgs) -> Result<Outcome, Fatal> {
    let sys = load(&a.input)?;
    let set: VertexSet = a.set.iter().copied().collect();
    let cl = closure(&sys, &set).map_err(Fatal::usage)?;
    let nb = neighbourhood(&sys, &set).map_err(Fatal::usage)?;
    Ok(Outcome {
        report: Some(json!({
            "command": "closure",
            "system": summary(&sys),
            "set": set,
            "neighbourhood": nb,
            "closure": cl,
            "closure_size": cl.len(),
            "spans_all": cl.len() == sys.n(),
        })),
        text: None,
        code: EXIT_OK,
    })
}

fn expander(a: &ExpanderArgs) -> Result<Outcome, Fatal> {
    let sys = load(&a.input)?;
    let report = expander_deficiency(&sys, a.max_size, a.budget).map_err(Fatal::usage)?;
    let ratio = report.min_ratio.map(|r| {
        json!({
            "fraction": format!("{}/{}", r.numer(), r.denom()),
            "value": *r.numer() as f64 / *r.denom() as f64,
        })
    });
    Ok(Outcome {
        report: Some(json!({
            "command": "expander",
            "system": summary(&sys),
            "max_size": report.max_size,
            "sets_examined": report.sets_examined,
            "min_deficiency": report.min_deficiency,
            "worst_set": report.worst_set,
            "per_size_min_neighbourhood": report.per_size_min_neighbourhood,
            "min_ratio": ratio,
            "ratio_set": report.ratio_set,
        })),
        text: None,
        code: EXIT_OK,
    })
}

fn search(a: &SearchArgs) -> Result<Outcome, Fatal> {
    debug_assert!(a.min_wsp);
    let result = min_weakly_spreading(a.n, a.start_at, a.budget).map_err(Fatal::usage)?;
    Ok(Outcome {
        report: Some(json!({
            "command": "search",
            "n": result.n,
            "minimum": result.minimum,
            "lower_bound": result.n - 3,
            "witness": result.witness,
            "nodes_explored": result.nodes_explored,
            "candidates_verified": result.candidates_verified,
            "exhaustive_below": result.exhaustive_below,
        })),
        text: None,
        code: EXIT_OK,
    })
}

fn bounds(a: &BoundsArgs) -> Result<Outcome, Fatal> {
    let all = !a.tau && !a.constants && a.density.is_none();
    let mut report = json!({ "command": "bounds" });
    if a.tau || all {
        let (z, t) = tau(a.tolerance).map_err(Fatal::usage)?;
        report["tau"] = json!({ "argmax_z": z, "tau": t });
    }
    if a.constants || all {
        let mut r = bounds_report(a.tolerance).map_err(Fatal::usage)?;
        let naive = lower_bound_constants(1.0).map_err(Fatal::usage)?;
        r.naive_coeff = naive.edge_bound_coeff;
        report["constants"] = serde_json::to_value(&r).expect("plain numbers");
        report["naive_xi_sp_coeff"] = json!(naive.xi_sp_coeff);
    }
    if let Some(p) = a.density {
        let d = construction_density(p).map_err(Fatal::usage)?;
        report["density"] = json!({ "p": p, "n": d.n, "m": d.m, "ratio": d.ratio, "limit": 5.0 / 36.0 });
    }
    Ok(Outcome {
        report: Some(report),
        text: None,
        code: EXIT_OK,
    })
}
