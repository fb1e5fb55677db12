//! The `tppforge` command line: `check`, `normalize`, `search`, `realize`
//! and `sweep`.
//!
//! Exit codes: 0 success, 1 a check came out false, 2 usage or input error,
//! 3 runtime error (overflow, time limit, failed verification).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand};
use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::group::{build_group_with, catalog_up_to, BuildOptions, Group, GroupSpec, IDENTITY};
use crate::realize::{matmul_via_group, IndexedMatrix, RealizeError, FUZZ_ENTRY_BOUND};
use crate::search::{enumeration_cap, search_max_triple, Pruning, SearchConfig, ENUM_CAP_VAR};
use crate::setcalc::ElementSet;
use crate::tpp::{
    bounds, minimal_disjointness_ok, normalize, q_intersections_trivial, tpp_check, TppTriple,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

pub const DEFAULT_SEED: u64 = 0x7e55_1e5e;

#[derive(Debug, Parser)]
#[command(
    name = "tppforge",
    version,
    about = "Triple Product Property triples in small finite groups"
)]
pub struct Cli {
    /// Suppress machine-readable record lines.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Seed for random matrix fuzzing.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Skip the associativity check for table files above order 256.
    #[arg(long, global = true)]
    pub skip_assoc: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a triple for the TPP, its bounds and the necessary conditions.
    Check { group: String, triple: PathBuf },
    /// Translate a TPP triple so that every set contains the identity.
    Normalize { group: String, triple: PathBuf },
    /// Search a group for the TPP triples maximizing |S|·|T|·|U|.
    Search {
        group: String,
        #[arg(long, default_value = "q-bound")]
        prune: Pruning,
        /// Seconds.
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = 1)]
        min_product: u64,
    },
    /// Multiply two matrices through the group ring of a TPP triple.
    Realize {
        group: String,
        triple: PathBuf,
        a: PathBuf,
        b: PathBuf,
    },
    /// Search and verify every catalog group up to an order.
    Sweep {
        #[arg(long, default_value_t = 8)]
        max_order: usize,
        #[arg(long, default_value = "q-bound")]
        prune: Pruning,
        /// Random matrix pairs per best triple for the realization check.
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

/// Result of one command.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CommandOutcome {
    pub exit_code: i32,
    pub report_text: String,
    pub machine_lines: Vec<String>,
    /// Diagnostic for stderr.
    pub error: Option<String>,
}

impl CommandOutcome {
    fn ok(code: i32, report_text: String, machine_lines: Vec<String>) -> Self {
        CommandOutcome {
            exit_code: code,
            report_text,
            machine_lines,
            error: None,
        }
    }

    fn fail(code: i32, message: impl Into<String>) -> Self {
        CommandOutcome {
            exit_code: code,
            error: Some(message.into()),
            ..Default::default()
        }
    }

    /// Standard output text: the report, then the record lines unless quiet.
    pub fn stdout(&self, quiet: bool) -> String {
        let mut out = self.report_text.clone();
        if !quiet {
            for line in &self.machine_lines {
                out.push_str(line);
                out.push('\n');
            }
        }
        out
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> (CommandOutcome, bool)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => {
            let quiet = cli.quiet;
            (run(&cli), quiet)
        }
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let outcome = if code == EXIT_OK {
                CommandOutcome::ok(EXIT_OK, rendered, Vec::new())
            } else {
                CommandOutcome::fail(EXIT_USAGE, rendered)
            };
            (outcome, true)
        }
    }
}

pub fn run(cli: &Cli) -> CommandOutcome {
    let options = BuildOptions {
        skip_large_associativity: cli.skip_assoc,
    };
    let result = match &cli.command {
        Command::Check { group, triple } => cmd_check(group, triple, options),
        Command::Normalize { group, triple } => cmd_normalize(group, triple, options),
        Command::Search {
            group,
            prune,
            time_limit,
            workers,
            min_product,
        } => cmd_search(group, *prune, *time_limit, *workers, *min_product, options),
        Command::Realize {
            group,
            triple,
            a,
            b,
        } => cmd_realize(group, triple, a, b, options),
        Command::Sweep {
            max_order,
            prune,
            trials,
            workers,
        } => cmd_sweep(*max_order, *prune, *trials, *workers, cli.seed),
    };
    result.unwrap_or_else(|e| e)
}

type Outcome = Result<CommandOutcome, CommandOutcome>;

fn load_group(spec: &str, options: BuildOptions) -> Result<Group, CommandOutcome> {
    let spec: GroupSpec = spec
        .parse()
        .map_err(|e| CommandOutcome::fail(EXIT_USAGE, format!("group {spec:?}: {e}")))?;
    build_group_with(&spec, options)
        .map_err(|e| CommandOutcome::fail(EXIT_USAGE, format!("group {spec}: {e}")))
}

fn read(path: &Path) -> Result<String, CommandOutcome> {
    fs::read_to_string(path)
        .map_err(|e| CommandOutcome::fail(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn load_triple<'g>(group: &'g Group, path: &Path) -> Result<TppTriple<'g>, CommandOutcome> {
    TppTriple::parse(group, &read(path)?)
        .map_err(|e| CommandOutcome::fail(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn load_matrix(path: &Path) -> Result<IndexedMatrix, CommandOutcome> {
    IndexedMatrix::parse(&read(path)?)
        .map_err(|e| CommandOutcome::fail(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn literal_field(set: &ElementSet) -> String {
    set.literal()
}

pub fn cmd_check(group: &str, triple: &Path, options: BuildOptions) -> Outcome {
    let group = load_group(group, options)?;
    let triple = load_triple(&group, triple)?;
    let holds = tpp_check(&triple);
    let disjoint = minimal_disjointness_ok(&triple);
    let q_trivial = q_intersections_trivial(&triple);
    let b = bounds(&triple);

    let mut text = String::new();
    let _ = writeln!(text, "group: {}", group.name());
    let _ = writeln!(text, "triple: {triple}");
    let _ = writeln!(text, "sizes: {}", triple.sizes().iter().join(" "));
    let _ = writeln!(text, "tpp: {holds}");
    let _ = writeln!(text, "minimal_disjointness: {disjoint}");
    let _ = writeln!(text, "q_intersections_trivial: {q_trivial}");
    let _ = writeln!(text, "sum_sizes: {}", b.sum_sizes);
    let _ = writeln!(text, "sum_q_sizes: {}", b.sum_q_sizes);
    let _ = writeln!(text, "limit: {}", b.limit);
    let _ = writeln!(text, "murthy_ok: {}", b.murthy_ok);
    let _ = writeln!(text, "q_bound_ok: {}", b.q_bound_ok);
    let line = format!(
        "check\tgroup={}\tS={}\tT={}\tU={}\ttpp={holds}\tdisjoint={disjoint}\tq_trivial={q_trivial}\tsum_sizes={}\tsum_q_sizes={}\tlimit={}",
        group.name(),
        literal_field(triple.s()),
        literal_field(triple.t()),
        literal_field(triple.u()),
        b.sum_sizes,
        b.sum_q_sizes,
        b.limit,
    );
    Ok(CommandOutcome::ok(
        if holds { EXIT_OK } else { EXIT_FALSE },
        text,
        vec![line],
    ))
}

pub fn cmd_normalize(group: &str, triple: &Path, options: BuildOptions) -> Outcome {
    let group = load_group(group, options)?;
    let triple = load_triple(&group, triple)?;
    let normalized = normalize(&triple).map_err(|e| {
        CommandOutcome::fail(
            EXIT_FALSE,
            format!("{e}; only TPP triples can be normalized with pairwise intersections {{1}}"),
        )
    })?;
    let line = format!(
        "normalize\tgroup={}\tS={}\tT={}\tU={}",
        group.name(),
        literal_field(normalized.s()),
        literal_field(normalized.t()),
        literal_field(normalized.u()),
    );
    Ok(CommandOutcome::ok(
        EXIT_OK,
        normalized.to_triple_text(),
        vec![line],
    ))
}

pub fn cmd_search(
    group: &str,
    pruning: Pruning,
    time_limit: Option<f64>,
    workers: usize,
    min_product: u64,
    options: BuildOptions,
) -> Outcome {
    let group = load_group(group, options)?;
    let time_limit = match time_limit {
        Some(s) if !(s.is_finite() && s >= 0.0) => {
            return Err(CommandOutcome::fail(
                EXIT_USAGE,
                format!("invalid --time-limit {s}"),
            ));
        }
        Some(s) => Some(Duration::from_secs_f64(s)),
        None => None,
    };
    if workers == 0 {
        return Err(CommandOutcome::fail(
            EXIT_USAGE,
            "--workers must be positive",
        ));
    }
    let config = SearchConfig {
        pruning,
        time_limit,
        min_product,
        workers,
    };
    let report = search_max_triple(&group, &config)
        .map_err(|e| CommandOutcome::fail(EXIT_USAGE, e.to_string()))?;
    let code = if report.completed {
        EXIT_OK
    } else {
        EXIT_RUNTIME
    };
    let mut outcome = CommandOutcome::ok(code, report.to_text(), report.machine_lines());
    if !report.completed {
        outcome.error =
            Some("time limit reached; report shows the best triples found so far".into());
    }
    Ok(outcome)
}

pub fn cmd_realize(
    group: &str,
    triple: &Path,
    a: &Path,
    b: &Path,
    options: BuildOptions,
) -> Outcome {
    let group = load_group(group, options)?;
    let triple = load_triple(&group, triple)?;
    let a = load_matrix(a)?;
    let b = load_matrix(b)?;
    let product = matmul_via_group(&a, &b, &triple).map_err(|e| {
        let code = match e {
            RealizeError::NotTpp => EXIT_FALSE,
            RealizeError::Overflow | RealizeError::EmbeddingCollision(_) => EXIT_RUNTIME,
            _ => EXIT_USAGE,
        };
        CommandOutcome::fail(code, e.to_string())
    })?;
    let expected = a
        .schoolbook(&b)
        .map_err(|e| CommandOutcome::fail(EXIT_RUNTIME, e.to_string()))?;
    let verdict = if product == expected {
        "MATCH"
    } else {
        "MISMATCH"
    };
    let mut text = product.to_text();
    text.push_str(verdict);
    text.push('\n');
    let line = format!(
        "realize\tgroup={}\tshape={}x{}x{}\tresult={verdict}",
        group.name(),
        a.rows().len(),
        a.cols().len(),
        b.cols().len()
    );
    Ok(CommandOutcome::ok(
        if product == expected {
            EXIT_OK
        } else {
            EXIT_FALSE
        },
        text,
        vec![line],
    ))
}

/// Checks a reported best triple: TPP, both bounds, normal form, and
/// `trials` random realizations against the schoolbook product.
fn verify_best(triple: &TppTriple<'_>, trials: usize, rng: &mut ChaCha8Rng) -> Result<(), String> {
    if !tpp_check(triple) {
        return Err("fails tpp_check".into());
    }
    let b = bounds(triple);
    if !(b.murthy_ok && b.q_bound_ok) {
        return Err(format!("violates a bound: {b:?}"));
    }
    let order = triple.group().order();
    let one = ElementSet::identity(order);
    let normalized = triple.sets().iter().all(|s| s.contains(IDENTITY))
        && [(0, 1), (1, 2), (0, 2)]
            .into_iter()
            .all(|(i, j)| triple.sets()[i].intersection(&triple.sets()[j]).unwrap() == one);
    if !normalized {
        return Err("is not normalized".into());
    }
    let [s, t, u] = triple.sets().each_ref().map(ElementSet::to_vec);
    for _ in 0..trials {
        let a = IndexedMatrix::random(&s, &t, FUZZ_ENTRY_BOUND, rng).map_err(|e| e.to_string())?;
        let bm = IndexedMatrix::random(&t, &u, FUZZ_ENTRY_BOUND, rng).map_err(|e| e.to_string())?;
        let got = matmul_via_group(&a, &bm, triple).map_err(|e| e.to_string())?;
        if got != a.schoolbook(&bm).map_err(|e| e.to_string())? {
            return Err("realization MISMATCH".into());
        }
    }
    Ok(())
}

pub fn cmd_sweep(
    max_order: usize,
    pruning: Pruning,
    trials: usize,
    workers: usize,
    seed: u64,
) -> Outcome {
    let cap = enumeration_cap();
    if max_order > cap {
        return Err(CommandOutcome::fail(
            EXIT_USAGE,
            format!("--max-order {max_order} exceeds the enumeration cap {cap} (set {ENUM_CAP_VAR} to raise it)"),
        ));
    }
    if workers == 0 {
        return Err(CommandOutcome::fail(
            EXIT_USAGE,
            "--workers must be positive",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = String::new();
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    let config = SearchConfig {
        pruning,
        workers,
        ..Default::default()
    };
    for spec in catalog_up_to(max_order) {
        let group = match build_group_with(&spec, BuildOptions::default()) {
            Ok(g) => g,
            Err(e) => {
                failures.push(format!("{spec}: {e}"));
                continue;
            }
        };
        let report = search_max_triple(&group, &config)
            .map_err(|e| CommandOutcome::fail(EXIT_USAGE, e.to_string()))?;
        let mut status = if report.completed { "ok" } else { "incomplete" }.to_string();
        if !report.completed {
            failures.push(format!("{spec}: search did not complete"));
        }
        for t in &report.best_triples {
            if let Err(why) = verify_best(t, trials, &mut rng) {
                failures.push(format!("{spec}: triple {t} {why}"));
                status = "FAIL".into();
            }
        }
        let realize = if status == "FAIL" {
            "MISMATCH"
        } else {
            "MATCH"
        };
        let _ = writeln!(
            text,
            "{spec}: order={} best_product={} best_count={} nodes_visited={} bounds={} realize={realize} elapsed_s={:.3}",
            group.order(),
            report.best_product,
            report.best_triples.len(),
            report.nodes_visited,
            if status == "FAIL" { "checked" } else { "ok" },
            report.elapsed.as_secs_f64(),
        );
        lines.push(format!(
            "sweep\tgroup={spec}\torder={}\tproduct={}\tcount={}\tpruning={pruning}\tvisited={}\tstatus={status}\trealize={realize}",
            group.order(),
            report.best_product,
            report.best_triples.len(),
            report.nodes_visited,
        ));
        lines.extend(report.machine_lines());
    }
    if failures.is_empty() {
        Ok(CommandOutcome::ok(EXIT_OK, text, lines))
    } else {
        let mut outcome = CommandOutcome::ok(EXIT_RUNTIME, text, lines);
        outcome.error = Some(failures.join("\n"));
        Ok(outcome)
    }
}
