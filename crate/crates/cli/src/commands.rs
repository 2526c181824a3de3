//! Argument definitions and the subcommand implementations.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_rational::Ratio;
use serde_json::{json, Map, Value};

use ulam_core::anticode::DEFAULT_SEARCH_BUDGET;
use ulam_core::bounds::{
    ball_size_upper, ceil_pow2_exponent, falling_factorial, intersection_bound_sum, prop5_bound,
    theorem1_bound,
};
use ulam_core::cover::DEFAULT_COVER_BUDGET;
use ulam_core::{
    ball_intersection, ball_size, count_vertex_covers, cover_count_bound, max_anticode,
    min_vertex_cover, ulam_distance, ulam_distance_oracle, ulam_graph, BallSpec, Permutation,
    ScanCap, SearchCap, SearchStatus, UndirectedGraph,
};

use crate::cache::{Cache, CacheEntry};
use crate::suites::{self, Outcome, Suite};
use crate::table;

pub const CACHE_DIR_ENV: &str = "ULAM_CACHE_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "ulam",
    version,
    about = "Exact computations for the Ulam metric on permutations"
)]
pub struct Cli {
    /// Worker threads for the parallel kernels [default: all cores]
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Raise the enumeration cap to n = 13 and the search cap to n = 7
    #[arg(long, global = true)]
    pub extended: bool,

    /// Directory of cached search results (ULAM_CACHE_DIR takes precedence)
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ulam distance between two permutations
    Dist {
        a: Permutation,
        b: Permutation,
        /// Also run the deletion-set search
        #[arg(long)]
        oracle: bool,
        /// Include the disagreement graph as an edge list
        #[arg(long)]
        graph: bool,
    },
    /// Size of a ball
    Ball {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        r: usize,
        /// Center of the ball [default: identity]
        #[arg(long)]
        center: Option<Permutation>,
    },
    /// Size of the intersection of two balls of radius k
    Intersect {
        a: Permutation,
        b: Permutation,
        #[arg(short)]
        k: usize,
        /// Follow the summary with one line per member
        #[arg(long)]
        members: bool,
    },
    /// Minimum vertex cover or cover census of an edge-list graph
    Cover(CoverArgs),
    /// Closed-form bounds for n and k
    Bounds {
        #[arg(short)]
        n: u64,
        #[arg(short)]
        k: u64,
        /// Constant in the exponent k + C k^(2/3), e.g. 1, 1/2 or 0.5
        #[arg(short = 'C', value_parser = parse_ratio)]
        c: Option<Ratio<BigUint>>,
    },
    /// Largest family of diameter at most k
    Search {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
        budget: u64,
        /// Include elapsed_ms and nodes_explored, which vary between runs
        #[arg(long)]
        timing: bool,
    },
    /// Run an invariant suite
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Compute f_k(n) for a range of n and k into a cache directory
    Table {
        #[arg(long)]
        n_max: u64,
        #[arg(long)]
        k_max: u64,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Jsonl)]
        format: Format,
        #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
        budget: u64,
    },
}

#[derive(Debug, Args)]
pub struct CoverArgs {
    /// Edge-list file: a `vertices edges` header, then one `u v` pair per line
    #[arg(long)]
    pub edges: PathBuf,
    /// Count the covers with m vertices
    #[arg(long, value_name = "M")]
    pub count: Option<usize>,
    /// Report a minimum cover (the default)
    #[arg(long, conflicts_with = "count")]
    pub min: bool,
    #[arg(long, default_value_t = DEFAULT_COVER_BUDGET)]
    pub budget: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    /// A verification check or monotonicity relation failed.
    Failed = 1,
    Usage = 2,
    /// A budget or cap stopped the computation short of an exact answer.
    Budget = 3,
}

/// Exit status for an error that escaped a command.
pub fn error_exit(err: &anyhow::Error) -> Exit {
    use ulam_core::Error as E;
    match err.downcast_ref::<E>() {
        Some(E::BudgetExceeded { .. } | E::CapExceeded { .. }) => Exit::Budget,
        Some(_) => Exit::Usage,
        None => Exit::Failed,
    }
}

/// Parses `3`, `3/4` or `0.75` into an exact nonnegative rational.
pub fn parse_ratio(text: &str) -> std::result::Result<Ratio<BigUint>, String> {
    let bad = || format!("expected a nonnegative rational such as 1, 1/2 or 0.5, got {text:?}");
    let text = text.trim();
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let whole: BigUint = if whole.is_empty() {
            BigUint::from(0u8)
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let frac_value: BigUint = frac.parse().map_err(|_| bad())?;
        let scale = BigUint::from(10u8).pow(frac.len() as u32);
        return Ok(Ratio::new(whole * &scale + frac_value, scale));
    }
    let r: Ratio<BigUint> = text.parse().map_err(|_| bad())?;
    Ok(r)
}

fn dec(x: impl ToString) -> Value {
    Value::String(x.to_string())
}

fn strings<T: ToString>(items: impl IntoIterator<Item = T>) -> Value {
    Value::Array(items.into_iter().map(dec).collect())
}

fn emit(out: &mut dyn Write, value: &Value) -> Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

struct Caps {
    scan: ScanCap,
    search: SearchCap,
    cache_dir: Option<PathBuf>,
}

fn source(command: &str) -> String {
    format!("ulam {command} {}", env!("CARGO_PKG_VERSION"))
}

/// Runs the parsed command, writing its records to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<Exit> {
    let ctx = Caps {
        scan: if cli.extended {
            ScanCap::Extended
        } else {
            ScanCap::Standard
        },
        search: if cli.extended {
            SearchCap::Extended
        } else {
            SearchCap::Standard
        },
        cache_dir: std::env::var_os(CACHE_DIR_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
            .or(cli.cache_dir),
    };
    match cli.command {
        Command::Dist {
            a,
            b,
            oracle,
            graph,
        } => dist(out, &a, &b, oracle, graph),
        Command::Ball { n, r, center } => ball(out, &ctx, n, r, center),
        Command::Intersect { a, b, k, members } => intersect(out, &ctx, &a, &b, k, members),
        Command::Cover(args) => cover(out, &args),
        Command::Bounds { n, k, c } => bounds(out, n, k, c.as_ref()),
        Command::Search {
            n,
            k,
            budget,
            timing,
        } => search(out, &ctx, n, k, budget, timing),
        Command::Verify {
            suite,
            n_max,
            budget,
            seed,
        } => verify(out, &ctx, suite, n_max, budget, seed),
        Command::Table {
            n_max,
            k_max,
            out: dir,
            format,
            budget,
        } => table_cmd(out, &ctx, n_max, k_max, &dir, format, budget),
    }
}

fn dist(
    out: &mut dyn Write,
    a: &Permutation,
    b: &Permutation,
    oracle: bool,
    graph: bool,
) -> Result<Exit> {
    let d = ulam_distance(a, b)?;
    let mut obj = Map::new();
    obj.insert("a".into(), dec(a));
    obj.insert("b".into(), dec(b));
    obj.insert("n".into(), dec(a.n()));
    obj.insert("distance".into(), dec(d));
    if oracle {
        obj.insert("oracle_distance".into(), dec(ulam_distance_oracle(a, b)?));
    }
    if graph {
        obj.insert(
            "graph".into(),
            Value::String(ulam_graph(a, b)?.to_edge_list()),
        );
    }
    emit(out, &Value::Object(obj))?;
    Ok(Exit::Success)
}

fn ball(
    out: &mut dyn Write,
    ctx: &Caps,
    n: usize,
    r: usize,
    center: Option<Permutation>,
) -> Result<Exit> {
    let center = center.unwrap_or_else(|| Permutation::identity(n));
    if center.n() != n {
        return Err(ulam_core::Error::SizeMismatch {
            expected: n,
            found: center.n(),
        }
        .into());
    }
    let size = ball_size(&BallSpec::new(center.clone(), r), ctx.scan)?;
    emit(
        out,
        &json!({ "n": dec(n), "radius": dec(r), "center": dec(&center), "size": dec(size) }),
    )?;
    Ok(Exit::Success)
}

fn intersect(
    out: &mut dyn Write,
    ctx: &Caps,
    a: &Permutation,
    b: &Permutation,
    k: usize,
    members: bool,
) -> Result<Exit> {
    let d = ulam_distance(a, b)?;
    let found = ball_intersection(a, b, k, members, ctx.scan)?;
    let mut obj = Map::new();
    obj.insert("a".into(), dec(a));
    obj.insert("b".into(), dec(b));
    obj.insert("n".into(), dec(a.n()));
    obj.insert("k".into(), dec(k));
    obj.insert("distance".into(), dec(d));
    obj.insert("size".into(), dec(&found.size));
    if k <= a.n() {
        let sum = intersection_bound_sum(a.n() as u64, k as u64)?;
        obj.insert("intersection_bound_sum".into(), dec(&sum));
    }
    emit(out, &Value::Object(obj))?;
    for m in found.members.into_iter().flatten() {
        emit(out, &json!({ "member": dec(m) }))?;
    }
    Ok(Exit::Success)
}

fn cover(out: &mut dyn Write, args: &CoverArgs) -> Result<Exit> {
    let text = fs::read_to_string(&args.edges)
        .with_context(|| format!("cannot read {}", args.edges.display()))?;
    let g = UndirectedGraph::from_edge_list(&text)?;
    let min = min_vertex_cover(&g, args.budget)?;
    let v = g.vertex_count();
    let mut obj = Map::new();
    obj.insert("vertices".into(), dec(v));
    obj.insert("edges".into(), dec(g.edge_count()));
    obj.insert("tau".into(), dec(min.tau));
    match args.count {
        Some(m) => {
            obj.insert("m".into(), dec(m));
            obj.insert(
                "count".into(),
                dec(count_vertex_covers(&g, m, args.budget)?),
            );
            if min.tau <= m && m <= v {
                obj.insert("bound".into(), dec(cover_count_bound(min.tau, v, m)?));
            }
        }
        None => {
            obj.insert("witness".into(), strings(min.witness.iter()));
        }
    }
    emit(out, &Value::Object(obj))?;
    Ok(Exit::Success)
}

fn bounds(out: &mut dyn Write, n: u64, k: u64, c: Option<&Ratio<BigUint>>) -> Result<Exit> {
    let mut obj = Map::new();
    obj.insert("n".into(), dec(n));
    obj.insert("k".into(), dec(k));
    obj.insert("conjectured_max".into(), dec(falling_factorial(n, k)?));
    obj.insert("ball_size_upper".into(), dec(ball_size_upper(n, k)?));
    if k >= 1 {
        obj.insert("prop5_bound".into(), dec(prop5_bound(n, k)?));
    }
    obj.insert(
        "intersection_bound_sum".into(),
        dec(intersection_bound_sum(n, k)?),
    );
    if let Some(c) = c {
        obj.insert("C".into(), dec(c));
        obj.insert("pow2_factor".into(), dec(ceil_pow2_exponent(k, c)));
        obj.insert("theorem1_bound".into(), dec(theorem1_bound(n, k, c)?));
    }
    emit(out, &Value::Object(obj))?;
    Ok(Exit::Success)
}

fn search(
    out: &mut dyn Write,
    ctx: &Caps,
    n: usize,
    k: usize,
    budget: u64,
    timing: bool,
) -> Result<Exit> {
    let report = max_anticode(n, k, budget, ctx.search)?;
    if report.clamped() {
        eprintln!(
            "note: k = {k} exceeds n - 1; searching k = {} (all of S_n)",
            report.search_k
        );
    }
    let mut obj = Map::new();
    obj.insert("n".into(), dec(n));
    obj.insert("k".into(), dec(k));
    obj.insert("best_size".into(), dec(&report.best_size));
    obj.insert("status".into(), Value::from(report.status.as_str()));
    obj.insert("conjectured".into(), dec(&report.conjectured));
    obj.insert(
        "matches_conjecture".into(),
        Value::from(report.matches_conjecture),
    );
    obj.insert(
        "witness_is_cylinder".into(),
        Value::from(report.witness_is_cylinder),
    );
    obj.insert("witness".into(), strings(report.witness.members()));
    if timing {
        obj.insert("elapsed_ms".into(), dec(report.elapsed_ms));
        obj.insert("nodes_explored".into(), dec(report.nodes_explored));
    }
    if let Some(dir) = &ctx.cache_dir {
        Cache::open(dir)?.store(CacheEntry::from_report(&report, &source("search")))?;
    }
    emit(out, &Value::Object(obj))?;
    Ok(match report.status {
        SearchStatus::Exact => Exit::Success,
        SearchStatus::LowerBound => Exit::Budget,
    })
}

fn verify(
    out: &mut dyn Write,
    ctx: &Caps,
    suite: Suite,
    n_max: usize,
    budget: u64,
    seed: u64,
) -> Result<Exit> {
    let settings = suites::Settings {
        n_max,
        budget,
        cap: ctx.search,
        seed,
    };
    let (mut checks, mut failed, mut inconclusive) = (0usize, 0usize, 0usize);
    suites::run(suite, &settings, &mut |check| {
        checks += 1;
        match check.outcome {
            Outcome::Pass => {}
            Outcome::Fail => failed += 1,
            Outcome::Inconclusive => inconclusive += 1,
        }
        serde_json::to_writer(&mut *out, &check)?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(())
    })?;
    emit(
        out,
        &json!({
            "suite": suite.name(),
            "n_max": dec(n_max),
            "checks": dec(checks),
            "failed": dec(failed),
            "inconclusive": dec(inconclusive),
            "passed": failed == 0 && inconclusive == 0,
        }),
    )?;
    Ok(if failed > 0 {
        Exit::Failed
    } else if inconclusive > 0 {
        Exit::Budget
    } else {
        Exit::Success
    })
}

fn table_cmd(
    out: &mut dyn Write,
    ctx: &Caps,
    n_max: u64,
    k_max: u64,
    dir: &PathBuf,
    format: Format,
    budget: u64,
) -> Result<Exit> {
    let cache = Cache::open(dir)?;
    let entries = table::fill(
        &cache,
        n_max,
        k_max,
        budget,
        ctx.search,
        &source("table"),
        |e, hit| {
            let how = if hit { "cached" } else { "computed" };
            eprintln!("f_{}({}) = {} [{}, {how}]", e.k, e.n, e.value, e.status);
        },
    )?;
    let exact = table::exact_table(&entries)?;
    let violations = table::monotonicity_violations(&exact);
    let summary = json!({
        "entries": dec(entries.len()),
        "exact": dec(exact.len()),
        "monotonicity_relations": dec(table::monotonicity_relations(&exact)),
        "monotonicity_violations": violations,
    });
    match format {
        Format::Jsonl => {
            for e in &entries {
                emit(
                    out,
                    &json!({ "n": dec(e.n), "k": dec(e.k), "value": e.value, "status": e.status }),
                )?;
            }
            emit(out, &summary)?;
        }
        Format::Csv => {
            writeln!(out, "{}", table::csv_header())?;
            for e in &entries {
                writeln!(out, "{}", table::csv_row(e))?;
            }
            eprintln!("{summary}");
        }
    }
    Ok(if !violations.is_empty() {
        Exit::Failed
    } else if exact.len() < entries.len() {
        Exit::Budget
    } else {
        Exit::Success
    })
}
