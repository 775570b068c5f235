//! Command-line front end: build curves, run the descent, count points,
//! decide ranks over quadratic fields, search for witness primes, and
//! reproduce the reference tables.
//!
//! Exit codes: 0 on exact success, 1 on validation errors or table
//! mismatches, 2 on undecided/interval results.

use clap::{Parser, Subcommand, ValueEnum};
use genus2_descent::counting::jacobian_order;
use genus2_descent::descent::{run_descent, DescentOptions};
use genus2_descent::family::{admissible, bad_primes, build_family, specialize, FamilyParams};
use genus2_descent::quadrank::{decide_rank_over_l, m_search, representatives_per_l};
use genus2_descent::report::{
    diff_tables, generate_table, parse_rational, poly_display, reference_table, CandidateView,
    DescentView, Report,
};
use num_rational::BigRational;
use serde::Serialize;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "g2descent",
    version,
    about = "Mordell-Weil ranks for a family of genus-2 jacobians by 2-isogeny descent"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    /// Include wall-clock timing in the report (breaks byte-identical output)
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Build the curve pair for a family member or raw parameters
    Build {
        #[arg(long, conflicts_with = "params")]
        n: Option<u32>,
        /// Raw parameters "U,V,W,Delta" (rationals like 3/4 allowed)
        #[arg(long)]
        params: Option<String>,
        /// Build even when the member is not admissible
        #[arg(long)]
        force: bool,
    },
    /// Mordell-Weil rank over the rationals by two-isogeny descent
    RankQ {
        #[arg(long)]
        n: u32,
        /// Height bound for the point-based certificate searches
        #[arg(long, default_value_t = 60)]
        search_bound: i64,
    },
    /// Mordell-Weil rank over the real quadratic field of √l
    RankL {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        l: u64,
        /// Pick the witness point from this m (default: smallest height)
        #[arg(long, allow_hyphen_values = true)]
        m: Option<String>,
    },
    /// Search rational m for suitable primes l with witness points
    SearchM {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 10)]
        num_bound: i64,
        #[arg(long, default_value_t = 10)]
        den_bound: i64,
        /// Keep primes with at most this many digits
        #[arg(long, default_value_t = 6)]
        l_digits: u32,
    },
    /// Point counts and the jacobian order at one good prime
    Count {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p: u64,
    },
    /// Regenerate the reference tables and diff against the checked-in data
    Reproduce {
        /// "all" or one of n0, n6, n9
        #[arg(long, default_value = "all")]
        table: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(threads) = std::env::var("G2DESCENT_THREADS") {
        if let Ok(t) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global();
        }
    }
    let started = Instant::now();
    match dispatch(&cli, started) {
        Ok((doc, text, code)) => {
            let rendered = match cli.format {
                Format::Json => doc,
                Format::Text => text,
            };
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, rendered + "\n") {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => {
                    let mut stdout = std::io::stdout();
                    let _ = writeln!(stdout, "{rendered}");
                }
            }
            ExitCode::from(code)
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn timing(cli: &Cli, started: Instant) -> Option<u64> {
    cli.timings.then(|| started.elapsed().as_millis() as u64)
}

fn render<I: Serialize, R: Serialize>(report: &Report<I, R>, text: String) -> (String, String) {
    (
        serde_json::to_string_pretty(report).expect("report serialises"),
        text,
    )
}


fn dispatch(cli: &Cli, started: Instant) -> Result<(String, String, u8), String> {
    match &cli.command {
        Command::Build { n, params, force } => {
            cmd_build(cli, started, *n, params.as_deref(), *force)
        }
        Command::RankQ { n, search_bound } => cmd_rank_q(cli, started, *n, *search_bound),
        Command::RankL { n, l, m } => cmd_rank_l(cli, started, *n, *l, m.as_deref()),
        Command::SearchM {
            n,
            num_bound,
            den_bound,
            l_digits,
        } => cmd_search_m(cli, started, *n, *num_bound, *den_bound, *l_digits),
        Command::Count { n, p } => cmd_count(cli, started, *n, *p),
        Command::Reproduce { table } => cmd_reproduce(cli, started, table),
    }
}

#[derive(Serialize)]
struct BuildInputs {
    n: Option<u32>,
    params: Option<String>,
    force: bool,
}

#[derive(Serialize)]
struct BuildResults {
    q: Option<i64>,
    r: Option<i64>,
    admissible: Option<bool>,
    diagnostics: Vec<String>,
    model_c: String,
    model_c_prime: String,
    bad_primes: Vec<u64>,
}

fn cmd_build(
    cli: &Cli,
    started: Instant,
    n: Option<u32>,
    params: Option<&str>,
    force: bool,
) -> Result<(String, String, u8), String> {
    let inputs = BuildInputs {
        n,
        params: params.map(str::to_owned),
        force,
    };
    let (pair, adm_info) = match (n, params) {
        (Some(n), None) => {
            let adm = admissible(n).map_err(|e| e.to_string())?;
            if !adm.ok && !force {
                return Err(format!(
                    "n = {n} is not admissible: {}",
                    adm.diagnostics.join("; ")
                ));
            }
            (specialize(n, force).map_err(|e| e.to_string())?, Some(adm))
        }
        (None, Some(raw)) => {
            let vals: Vec<BigRational> = raw
                .split(',')
                .map(|s| parse_rational(s).ok_or_else(|| format!("bad rational: {s}")))
                .collect::<Result<_, _>>()?;
            if vals.len() != 4 {
                return Err("--params needs exactly U,V,W,Delta".into());
            }
            let fp = FamilyParams::new(
                vals[0].clone(),
                vals[1].clone(),
                vals[2].clone(),
                vals[3].clone(),
            );
            build_family(&fp).map_err(|e| format!("{e}"))?;
            (
                genus2_descent::family::curve_pair_from_params(&fp).map_err(|e| e.to_string())?,
                None,
            )
        }
        _ => return Err("exactly one of --n or --params is required".into()),
    };
    let bad = bad_primes(&pair).map_err(|e| e.to_string())?;
    let results = BuildResults {
        q: pair.q,
        r: pair.r,
        admissible: adm_info.as_ref().map(|a| a.ok),
        diagnostics: adm_info.map(|a| a.diagnostics).unwrap_or_default(),
        model_c: format!(
            "Y² = ({})({})",
            poly_display(&pair.c.f2),
            poly_display(&pair.c.f4)
        ),
        model_c_prime: format!(
            "Y² = ({})({})",
            poly_display(&pair.c_prime.f2),
            poly_display(&pair.c_prime.f4)
        ),
        bad_primes: bad.iter().copied().collect(),
    };
    let text = format!(
        "C : {}\nC': {}\nq = {}, r = {}\nbad primes: {:?}",
        results.model_c,
        results.model_c_prime,
        results.q.map_or("-".into(), |v| v.to_string()),
        results.r.map_or("-".into(), |v| v.to_string()),
        results.bad_primes
    );
    let report = Report {
        command: "build".into(),
        inputs,
        results,
        log: Vec::new(),
        timing_ms: timing(cli, started),
    };
    let (json, text) = render(&report, text);
    Ok((json, text, 0))
}

#[derive(Serialize)]
struct RankQInputs {
    n: u32,
    search_bound: i64,
}

fn cmd_rank_q(
    cli: &Cli,
    started: Instant,
    n: u32,
    search_bound: i64,
) -> Result<(String, String, u8), String> {
    let pair = specialize(n, false).map_err(|e| e.to_string())?;
    let opts = DescentOptions {
        sigma_search_bound: search_bound,
        rational_point_bound: search_bound,
    };
    let outcome = run_descent(&pair, &opts).map_err(|e| e.to_string())?;
    let view = DescentView::new(&outcome);
    let exact = outcome.rank.exact;
    let text = format!(
        "rank over Q: {}{}\nI  = <{}> = {:?}\nI' = <{}> = {:?}\n{} applied rules",
        view.rank,
        if exact {
            "".to_string()
        } else {
            format!(" (interval up to {})", view.rank_upper)
        },
        view.group_i_generators.join(", "),
        view.group_i,
        view.group_i_prime_generators.join(", "),
        view.group_i_prime,
        outcome.state.log.len(),
    );
    let log: Vec<String> = outcome.state.log.iter().map(|e| e.to_string()).collect();
    let report = Report {
        command: "rank-q".into(),
        inputs: RankQInputs { n, search_bound },
        results: view,
        log,
        timing_ms: timing(cli, started),
    };
    let (json, text) = render(&report, text);
    Ok((json, text, if exact { 0 } else { 2 }))
}

#[derive(Serialize)]
struct RankLInputs {
    n: u32,
    l: u64,
    m: Option<String>,
}

#[derive(Serialize)]
struct RankLResults {
    rank: u32,
    conclusive: bool,
    detail: String,
    torsion_order: u32,
    torsion_witness: (u64, u64),
    torsion_witness_orders: (u64, u64),
    candidate: CandidateView,
}

fn cmd_rank_l(
    cli: &Cli,
    started: Instant,
    n: u32,
    l: u64,
    m: Option<&str>,
) -> Result<(String, String, u8), String> {
    let wanted_m = m
        .map(|s| parse_rational(s).ok_or_else(|| format!("bad rational: {s}")))
        .transpose()?;
    let all = m_search(n, 10, 10).map_err(|e| e.to_string())?;
    let candidate = match &wanted_m {
        Some(mv) => all.iter().find(|c| c.l == l && &c.m == mv).cloned(),
        None => representatives_per_l(&all).into_iter().find(|c| c.l == l),
    }
    .ok_or_else(|| format!("no witness candidate for l = {l} within the search bounds"))?;
    let (decision, torsion) = decide_rank_over_l(n, l, &candidate).map_err(|e| e.to_string())?;
    let results = RankLResults {
        rank: decision.rank,
        conclusive: decision.conclusive,
        detail: decision.detail.clone(),
        torsion_order: torsion.order,
        torsion_witness: torsion.witness,
        torsion_witness_orders: torsion.witness_orders,
        candidate: CandidateView::new(&candidate),
    };
    let text = format!(
        "rank over Q(√{l}): {}{}\ntorsion group has order {} (witness primes {:?} with orders {:?})\nwitness point: x = {}, y = {}·√{l}\n{}",
        results.rank,
        if results.conclusive {
            ""
        } else {
            " (inconclusive candidate)"
        },
        results.torsion_order,
        results.torsion_witness,
        results.torsion_witness_orders,
        results.candidate.x,
        results.candidate.y_coeff,
        results.detail,
    );
    let code = if decision.conclusive { 0 } else { 2 };
    let report = Report {
        command: "rank-l".into(),
        inputs: RankLInputs {
            n,
            l,
            m: m.map(str::to_owned),
        },
        results,
        log: Vec::new(),
        timing_ms: timing(cli, started),
    };
    let (json, text) = render(&report, text);
    Ok((json, text, code))
}

#[derive(Serialize)]
struct SearchMInputs {
    n: u32,
    num_bound: i64,
    den_bound: i64,
    l_digits: u32,
}

#[derive(Serialize)]
struct SearchMResults {
    primes: Vec<u64>,
    representatives: Vec<CandidateView>,
    all_candidates: Vec<CandidateView>,
}

fn cmd_search_m(
    cli: &Cli,
    started: Instant,
    n: u32,
    num_bound: i64,
    den_bound: i64,
    l_digits: u32,
) -> Result<(String, String, u8), String> {
    let cap = 10u64.pow(l_digits.min(18)) - 1;
    let all: Vec<_> = m_search(n, num_bound, den_bound)
        .map_err(|e| e.to_string())?
        .into_iter()
        .filter(|c| c.l <= cap)
        .collect();
    let reps = representatives_per_l(&all);
    let results = SearchMResults {
        primes: reps.iter().map(|c| c.l).collect(),
        representatives: reps.iter().map(CandidateView::new).collect(),
        all_candidates: all.iter().map(CandidateView::new).collect(),
    };
    let mut text = format!("suitable primes for n = {n}: {:?}\n", results.primes);
    for r in &results.representatives {
        text.push_str(&format!(
            "l = {}: m = {}, point x = {}, y = {}·√{}\n",
            r.l, r.m, r.x, r.y_coeff, r.l
        ));
    }
    let report = Report {
        command: "search-m".into(),
        inputs: SearchMInputs {
            n,
            num_bound,
            den_bound,
            l_digits,
        },
        results,
        log: Vec::new(),
        timing_ms: timing(cli, started),
    };
    let (json, text) = render(&report, text.trim_end().to_string());
    Ok((json, text, 0))
}

#[derive(Serialize)]
struct CountInputs {
    n: u32,
    p: u64,
}

#[derive(Serialize)]
struct CountResults {
    p: u64,
    n1: u64,
    n2: u64,
    a1: i64,
    a2: i64,
    jacobian_order: u64,
}

fn cmd_count(cli: &Cli, started: Instant, n: u32, p: u64) -> Result<(String, String, u8), String> {
    let pair = specialize(n, false).map_err(|e| e.to_string())?;
    let z = jacobian_order(&pair.c, p).map_err(|e| e.to_string())?;
    let results = CountResults {
        p: z.p,
        n1: z.n1,
        n2: z.n2,
        a1: z.a1,
        a2: z.a2,
        jacobian_order: z.jacobian_order,
    };
    let text = format!(
        "|C(F_{p})| = {}, |C(F_{p}²)| = {}, a1 = {}, a2 = {}, |J(F_{p})| = {}",
        results.n1, results.n2, results.a1, results.a2, results.jacobian_order
    );
    let report = Report {
        command: "count".into(),
        inputs: CountInputs { n, p },
        results,
        log: Vec::new(),
        timing_ms: timing(cli, started),
    };
    let (json, text) = render(&report, text);
    Ok((json, text, 0))
}

#[derive(Serialize)]
struct ReproduceInputs {
    table: String,
}

#[derive(Serialize)]
struct ReproduceResults {
    tables_checked: Vec<u32>,
    matches: bool,
    diffs: Vec<String>,
}

fn cmd_reproduce(cli: &Cli, started: Instant, table: &str) -> Result<(String, String, u8), String> {
    let ns: Vec<u32> = match table {
        "all" => vec![0, 6, 9],
        "n0" => vec![0],
        "n6" => vec![6],
        "n9" => vec![9],
        other => return Err(format!("unknown table {other}: use all, n0, n6 or n9")),
    };
    let mut diffs = Vec::new();
    for &n in &ns {
        let expected = reference_table(n).map_err(|e| e.to_string())?;
        let actual = generate_table(n, 999_983).map_err(|e| e.to_string())?;
        diffs.extend(diff_tables(&expected, &actual));
    }
    let matches = diffs.is_empty();
    let results = ReproduceResults {
        tables_checked: ns.clone(),
        matches,
        diffs: diffs.clone(),
    };
    let text = if matches {
        format!("all {} table block(s) match the reference data", ns.len())
    } else {
        format!("MISMATCH:\n{}", diffs.join("\n"))
    };
    let report = Report {
        command: "reproduce".into(),
        inputs: ReproduceInputs {
            table: table.to_string(),
        },
        results,
        log: Vec::new(),
        timing_ms: timing(cli, started),
    };
    let (json, text) = render(&report, text);
    Ok((json, text, if matches { 0 } else { 1 }))
}
