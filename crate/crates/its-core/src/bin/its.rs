//! Command-line front end for the transversal blow-up toolkit.
//!
//! Subcommands cover the whole pipeline: `generate` builds instances,
//! `solve`/`count`/`verify` search, count and check them, `complement` and
//! `reduce` rewrite them, `factor` partitions them, and `sweep` measures
//! solver success rates across a thickness grid. Instances, candidates and
//! auxiliary graphs all share one JSON format, so any emitting command pipes
//! into any consuming one.
//!
//! Exit status: 0 when something was found (or the command plainly
//! succeeded), 1 when the answer is a verified "no" or a solver gave up,
//! 2 on usage and input errors.

use std::error::Error;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use its_core::aux::{blowup_aux_capped, consecutive_grouping, quotient_aux};
use its_core::factor::{find_factor, FactorConfig, Grouping};
use its_core::gen::{self, GeneratorSpec};
use its_core::graph::{verify_its, TransversalBlowup};
use its_core::io::{
    candidate_to_json, count_report_json, instance_to_json, parse_candidate, parse_instance,
    Instance,
};
use its_core::lll::{self, LllConfig};
use its_core::math::{parse_rat, rat_int, rat_str, Rat};
use its_core::nibble::{self, NibbleConfig, NibbleError};
use its_core::oracle::{self, OracleError, SearchBudget};

/// Independent transversal blow-ups in multipartite graphs.
#[derive(Parser)]
#[command(name = "its", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an instance from one of the named families.
    Generate(GenerateArgs),
    /// Search an instance for an independent transversal of s-sets.
    Solve(SolveArgs),
    /// Count the transversal blow-ups of an instance exactly.
    Count(CountArgs),
    /// Check a candidate selection against an instance.
    Verify(VerifyArgs),
    /// Emit the multipartite complement of an instance.
    Complement(ComplementArgs),
    /// Emit an auxiliary instance whose 1-transversals mirror the input.
    Reduce(ReduceArgs),
    /// Split every block into disjoint transversal blow-ups.
    Factor(FactorArgs),
    /// Measure solver success rates over a thickness grid, as CSV.
    Sweep(SweepArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(a) => run_generate(a),
        Command::Solve(a) => run_solve(a),
        Command::Count(a) => run_count(a),
        Command::Verify(a) => run_verify(a),
        Command::Complement(a) => run_complement(a),
        Command::Reduce(a) => run_reduce(a),
        Command::Factor(a) => run_factor(a),
        Command::Sweep(a) => run_sweep(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

type CliResult = Result<u8, Box<dyn Error>>;

fn read_instance_arg(path: &str) -> Result<Instance, Box<dyn Error>> {
    let text = if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        fs::read_to_string(path)?
    };
    Ok(parse_instance(&text)?)
}

fn read_candidate_arg(path: &str) -> Result<TransversalBlowup, Box<dyn Error>> {
    let text = if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        fs::read_to_string(path)?
    };
    Ok(parse_candidate(&text)?)
}

/// Writes `text` to the file when given, to stdout otherwise.
fn emit(text: &str, out: Option<&Path>) -> Result<(), Box<dyn Error>> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json(value: &Value, out: Option<&Path>) -> Result<(), Box<dyn Error>> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(&text, out)
}

fn parse_rat_arg(text: &str, what: &str) -> Result<Rat, Box<dyn Error>> {
    parse_rat(text).map_err(|e| format!("{what}: {e}").into())
}

// === generate ===

#[derive(Args)]
struct GenerateArgs {
    #[command(subcommand)]
    family: Family,
    /// Output file; stdout when omitted.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Family {
    /// D+1 blocks of s*D vertices; equal labels form cross-block cliques,
    /// so every vertex has degree D and no transversal of s-sets exists.
    LabelCliques {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        d: usize,
    },
    /// The same construction scaled so the maximum degree is `delta`.
    LabelCliquesMaxDegree {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        delta: usize,
    },
    /// 2*delta-1 complete bipartite copies sliced across 2*delta blocks;
    /// delta-regular with no transversal.
    DisjointBicliques {
        #[arg(long)]
        delta: usize,
    },
    /// Seeded random instance with average- and local-degree caps.
    Random {
        /// Number of blocks.
        #[arg(long)]
        r: usize,
        /// Vertices per block.
        #[arg(long)]
        n: usize,
        /// Per-block average-degree target (integer, fraction or decimal).
        #[arg(long)]
        avg: String,
        /// Maximum edges from one vertex into any single other block.
        #[arg(long, default_value_t = 1)]
        cap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Seeded random instance keeping each block incident to at most
    /// t^2/(4 s^2) edges.
    BoundedIncidence {
        /// Number of blocks.
        #[arg(long)]
        r: usize,
        /// Vertices per block.
        #[arg(long)]
        t: usize,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run_generate(args: GenerateArgs) -> CliResult {
    let (spec, default_s) = match args.family {
        Family::LabelCliques { s, d } => (GeneratorSpec::LabelCliques { s, d }, Some(s)),
        Family::LabelCliquesMaxDegree { s, delta } => {
            (GeneratorSpec::LabelCliquesMaxDegree { s, delta }, Some(s))
        }
        Family::DisjointBicliques { delta } => {
            (GeneratorSpec::DisjointBicliques { delta }, Some(1))
        }
        Family::Random {
            r,
            n,
            avg,
            cap,
            seed,
        } => (
            GeneratorSpec::Random {
                r,
                n,
                avg_target: avg,
                local_cap: cap,
                seed,
            },
            None,
        ),
        Family::BoundedIncidence { r, t, s, seed } => {
            (GeneratorSpec::BoundedIncidence { r, t, s, seed }, Some(s))
        }
    };
    let graph = gen::generate(&spec)?;
    let inst = Instance {
        graph,
        s: default_s,
    };
    emit(&instance_to_json(&inst), args.output.as_deref())?;
    Ok(0)
}

// === solve ===

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Solver {
    /// Exact backtracking search; answers "none" with certainty.
    Exhaustive,
    /// Prune blocks, then resample violated edges until independent.
    Lll,
    /// Randomized rounds that commit a few blocks at a time, then a
    /// single-shot finish.
    Nibble,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file; '-' reads standard input.
    #[arg(default_value = "-")]
    instance: String,
    #[arg(long, value_enum, default_value_t = Solver::Exhaustive)]
    solver: Solver,
    /// Picks per block; defaults to the instance's own s, then 1.
    #[arg(long)]
    s: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Node budget for the exhaustive search.
    #[arg(long, default_value_t = 100_000_000)]
    budget: u64,
    /// Resample budget for the single-shot solver and the nibble finish.
    #[arg(long, default_value_t = 10_000)]
    max_resamples: u64,
    /// Pruned block size; computed from the degree profile when omitted.
    #[arg(long)]
    prune_to: Option<usize>,
    /// Slack parameter driving the nibble schedule.
    #[arg(long, default_value = "1/2")]
    eps: String,
    /// Activation probability of each nibble round.
    #[arg(long, default_value = "3/20")]
    p: String,
    /// Degree bound for the nibble schedule; the instance's maximum block
    /// average when omitted.
    #[arg(long)]
    degree_bound: Option<String>,
    /// Forced number of nibble rounds instead of the terminal condition.
    #[arg(long)]
    rounds: Option<usize>,
    /// Retry cap per nibble round.
    #[arg(long, default_value_t = 50)]
    retries: u32,
    /// Run the whole nibble schedule even when the survivor graph is
    /// already thick enough for the single-shot finish.
    #[arg(long)]
    no_early_handoff: bool,
    /// Also delete survivors whose retention estimate hits zero.
    #[arg(long)]
    artificial_deletion: bool,
    /// Write one JSON object per nibble round to this file.
    #[arg(long)]
    round_log: Option<PathBuf>,
    /// Include per-block picks in the round log.
    #[arg(long)]
    verbose_rounds: bool,
    /// Write solver statistics as JSON to this file.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Write the found candidate here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn run_solve(args: SolveArgs) -> CliResult {
    let inst = read_instance_arg(&args.instance)?;
    let s = args.s.or(inst.s).unwrap_or(1);
    match args.solver {
        Solver::Exhaustive => {
            let found = match oracle::find_its(&inst.graph, s, SearchBudget::new(args.budget)) {
                Ok(found) => found,
                Err(OracleError::BudgetExceeded(n)) => {
                    eprintln!("search gave up: node budget of {n} exhausted");
                    return Ok(1);
                }
                Err(e @ OracleError::BlockTooThin { .. }) => {
                    eprintln!("no ITS exists: {e}");
                    return Ok(1);
                }
                Err(e) => return Err(e.into()),
            };
            if let Some(path) = &args.stats {
                let doc = json!({ "solver": "exhaustive", "found": found.is_some() });
                emit_json(&doc, Some(path))?;
            }
            match found {
                Some(its) => report_found(&inst, &its, args.output.as_deref()),
                None => {
                    eprintln!("no ITS exists");
                    Ok(1)
                }
            }
        }
        Solver::Lll => {
            let config = LllConfig {
                a: args.prune_to,
                max_resamples: args.max_resamples,
                seed: args.seed,
            };
            let result = lll::solve(&inst.graph, s, &config)?;
            eprintln!(
                "prune a={} feasible={} iterations={} resamples={}",
                result.stats.a,
                result.stats.feasible,
                result.stats.iterations,
                result.stats.resamples
            );
            if let Some(path) = &args.stats {
                let doc = json!({
                    "solver": "lll",
                    "found": result.its.is_some(),
                    "stats": result.stats.to_json(),
                });
                emit_json(&doc, Some(path))?;
            }
            match result.its {
                Some(its) => report_found(&inst, &its, args.output.as_deref()),
                None => {
                    eprintln!("solver gave up after {} resamples", result.stats.resamples);
                    Ok(1)
                }
            }
        }
        Solver::Nibble => {
            let eps = parse_rat_arg(&args.eps, "--eps")?;
            let p = parse_rat_arg(&args.p, "--p")?;
            let d = match &args.degree_bound {
                Some(text) => Some(parse_rat_arg(text, "--degree-bound")?),
                None => None,
            };
            let config = NibbleConfig {
                d,
                p,
                t_star_override: args.rounds,
                max_round_retries: args.retries,
                seed: args.seed,
                artificial_deletion: args.artificial_deletion,
                early_handoff: !args.no_early_handoff,
                terminal_max_resamples: args.max_resamples,
            };
            let result = match nibble::solve(&inst.graph, s, &eps, &config) {
                Ok(result) => result,
                Err(
                    e @ (NibbleError::RetriesExhausted { .. }
                    | NibbleError::ScheduleDiverged { .. }),
                ) => {
                    eprintln!("solver gave up: {e}");
                    return Ok(1);
                }
                Err(e) => return Err(e.into()),
            };
            if let Some(path) = &args.round_log {
                let mut lines = String::new();
                for record in &result.rounds {
                    lines.push_str(&record.to_json(args.verbose_rounds).to_string());
                    lines.push('\n');
                }
                fs::write(path, lines)?;
            }
            eprintln!(
                "rounds={} handoff_round={} hypothesis_ok={} local_degree_ok={}",
                result.rounds.len(),
                result
                    .handoff_round
                    .map_or_else(|| "none".to_string(), |t| t.to_string()),
                result.hypothesis_ok,
                result.local_degree_ok
            );
            if let Some(path) = &args.stats {
                let doc = json!({
                    "solver": "nibble",
                    "found": result.its.is_some(),
                    "rounds": result.rounds.len(),
                    "handoff_round": result.handoff_round,
                    "hypothesis_ok": result.hypothesis_ok,
                    "local_degree_ok": result.local_degree_ok,
                    "schedule": {
                        "t_star": result.schedule.t_star,
                        "eps": rat_str(&result.schedule.eps),
                        "p": rat_str(&result.schedule.p),
                        "d": rat_str(&result.schedule.d),
                    },
                    "terminal": result.terminal.as_ref().map(|t| t.to_json()),
                });
                emit_json(&doc, Some(path))?;
            }
            match result.its {
                Some(its) => report_found(&inst, &its, args.output.as_deref()),
                None => {
                    eprintln!("solver gave up in the single-shot finish");
                    Ok(1)
                }
            }
        }
    }
}

/// Re-verifies a solver's output before printing it; no solver is trusted.
fn report_found(inst: &Instance, its: &TransversalBlowup, out: Option<&Path>) -> CliResult {
    let report = verify_its(&inst.graph, its);
    if !report.ok() {
        eprintln!("solver output failed verification:");
        for violation in &report.violations {
            eprintln!("  {violation}");
        }
        return Ok(1);
    }
    emit(&candidate_to_json(its), out)?;
    Ok(0)
}

// === count ===

#[derive(Args)]
struct CountArgs {
    /// Instance file; '-' reads standard input.
    #[arg(default_value = "-")]
    instance: String,
    /// Picks per block; defaults to the instance's own s, then 1.
    #[arg(long)]
    s: Option<usize>,
    /// Thickness the lower bound is evaluated at; the instance's own
    /// thickness when omitted.
    #[arg(long)]
    t: Option<usize>,
    #[arg(long, default_value_t = 100_000_000)]
    budget: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn run_count(args: CountArgs) -> CliResult {
    let inst = read_instance_arg(&args.instance)?;
    let s = args.s.or(inst.s).unwrap_or(1);
    let t = args.t.unwrap_or_else(|| inst.graph.thickness());
    let report = match oracle::count_its(&inst.graph, s, t, SearchBudget::new(args.budget)) {
        Ok(report) => report,
        Err(OracleError::BudgetExceeded(n)) => {
            eprintln!("count gave up: node budget of {n} exhausted");
            return Ok(1);
        }
        Err(e) => return Err(e.into()),
    };
    emit_json(&count_report_json(&report), args.output.as_deref())?;
    Ok(0)
}

// === verify ===

#[derive(Args)]
struct VerifyArgs {
    /// Instance file; '-' reads standard input.
    #[arg(default_value = "-")]
    instance: String,
    /// Candidate file; '-' reads standard input.
    #[arg(long)]
    candidate: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn run_verify(args: VerifyArgs) -> CliResult {
    let inst = read_instance_arg(&args.instance)?;
    let cand = read_candidate_arg(&args.candidate)?;
    let report = verify_its(&inst.graph, &cand);
    let doc = json!({
        "ok": report.ok(),
        "violations": report
            .violations
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>(),
    });
    emit_json(&doc, args.output.as_deref())?;
    Ok(if report.ok() { 0 } else { 1 })
}

// === complement ===

#[derive(Args)]
struct ComplementArgs {
    /// Instance file; '-' reads standard input.
    #[arg(default_value = "-")]
    instance: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn run_complement(args: ComplementArgs) -> CliResult {
    let inst = read_instance_arg(&args.instance)?;
    let out = Instance {
        graph: inst.graph.complement(),
        s: inst.s,
    };
    emit(&instance_to_json(&out), args.output.as_deref())?;
    Ok(0)
}

// === reduce ===

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ReduceMode {
    /// One auxiliary vertex per s-subset of each block.
    Blowup,
    /// One auxiliary vertex per prescribed s-group of each block.
    Quotient,
}

#[derive(Args)]
struct ReduceArgs {
    /// Instance file; '-' reads standard input.
    #[arg(default_value = "-")]
    instance: String,
    #[arg(long, value_enum, default_value_t = ReduceMode::Blowup)]
    mode: ReduceMode,
    /// Picks per block; defaults to the instance's own s, then 1.
    #[arg(long)]
    s: Option<usize>,
    /// JSON file holding the per-block vertex groups (quotient mode);
    /// consecutive runs of s vertices when omitted.
    #[arg(long)]
    groups: Option<PathBuf>,
    /// Abort instead of building more auxiliary vertices than this.
    #[arg(long, default_value_t = 1_000_000)]
    cap: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn run_reduce(args: ReduceArgs) -> CliResult {
    let inst = read_instance_arg(&args.instance)?;
    let s = args.s.or(inst.s).unwrap_or(1);
    let aux_inst = match args.mode {
        ReduceMode::Blowup => {
            if args.groups.is_some() {
                return Err("--groups only applies to quotient mode".into());
            }
            blowup_aux_capped(&inst.graph, s, args.cap)?.to_instance()
        }
        ReduceMode::Quotient => {
            let grouping = match &args.groups {
                Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
                None => consecutive_grouping(&inst.graph, s)?,
            };
            quotient_aux(&inst.graph, &grouping)?.to_instance()
        }
    };
    emit(&instance_to_json(&aux_inst), args.output.as_deref())?;
    Ok(0)
}

// === factor ===

#[derive(Args)]
struct FactorArgs {
    /// Instance file; '-' reads standard input.
    #[arg(default_value = "-")]
    instance: String,
    /// Picks per block; defaults to the instance's own s, then 1.
    #[arg(long)]
    s: Option<usize>,
    /// JSON file holding the per-block vertex groups; consecutive runs of
    /// s vertices when omitted.
    #[arg(long)]
    groups: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000_000)]
    budget: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn run_factor(args: FactorArgs) -> CliResult {
    let inst = read_instance_arg(&args.instance)?;
    let s = args.s.or(inst.s).unwrap_or(1);
    let grouping = match &args.groups {
        Some(path) => Grouping::Prescribed(serde_json::from_str(&fs::read_to_string(path)?)?),
        None => Grouping::Consecutive,
    };
    let config = FactorConfig {
        grouping,
        budget: SearchBudget::new(args.budget),
    };
    let report = match find_factor(&inst.graph, s, &config) {
        Ok(report) => report,
        Err(its_core::factor::FactorError::Oracle(OracleError::BudgetExceeded(n))) => {
            eprintln!("factor search gave up: node budget of {n} exhausted");
            return Ok(1);
        }
        Err(e) => return Err(e.into()),
    };
    let members: Option<Vec<Value>> = report.factor.as_ref().map(|members| {
        members
            .iter()
            .map(|m| serde_json::from_str(&candidate_to_json(m)).expect("candidate JSON parses"))
            .collect()
    });
    let doc = json!({
        "found": report.factor.is_some(),
        "members": members,
        "thickness_hypothesis": report.thickness_hypothesis,
        "local_hypothesis": report.local_hypothesis,
        "stuck": report.stuck,
        "augment_calls": report.augment_calls,
        "relocations": report.relocations,
    });
    emit_json(&doc, args.output.as_deref())?;
    match &report.stuck {
        None => Ok(0),
        Some(vertex) => {
            eprintln!("no factor found: augmentation stuck at {vertex:?}");
            Ok(1)
        }
    }
}

// === sweep ===

#[derive(Args)]
struct SweepArgs {
    /// Blocks per generated instance.
    #[arg(long, default_value_t = 4)]
    r: usize,
    /// Picks per block; comma-separated for a grid.
    #[arg(long, value_delimiter = ',', default_values_t = [1])]
    s: Vec<usize>,
    /// Average-degree targets; comma-separated for a grid.
    #[arg(long, value_delimiter = ',', default_values_t = [2])]
    d: Vec<usize>,
    /// Local-degree cap of the generated instances.
    #[arg(long, default_value_t = 1)]
    cap: usize,
    /// Thickness step within [s*D, (s+2)*D].
    #[arg(long, default_value_t = 1)]
    step: usize,
    /// Instances per (s, D, thickness) cell; trial k uses seed+k.
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Solver::Lll)]
    solver: Solver,
    /// Slack parameter when the nibble solver is selected.
    #[arg(long, default_value = "1/2")]
    eps: String,
    /// Activation probability when the nibble solver is selected.
    #[arg(long, default_value = "3/20")]
    p: String,
    #[arg(long, default_value_t = 10_000)]
    max_resamples: u64,
    /// Node budget when the exhaustive solver is selected.
    #[arg(long, default_value_t = 100_000_000)]
    budget: u64,
    /// Worker threads; 0 lets the pool decide.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone)]
struct SweepCell {
    s: usize,
    d: usize,
    thickness: usize,
}

struct SweepRow {
    cell: SweepCell,
    trials: usize,
    successes: usize,
    mean_rounds: f64,
}

fn run_sweep(args: SweepArgs) -> CliResult {
    if args.trials < 1 {
        return Err("--trials must be at least 1".into());
    }
    if args.step < 1 {
        return Err("--step must be at least 1".into());
    }
    if args.s.is_empty() || args.d.is_empty() || args.d.contains(&0) {
        return Err("the (s, D) grid must be nonempty with D >= 1".into());
    }
    let eps = parse_rat_arg(&args.eps, "--eps")?;
    let p = parse_rat_arg(&args.p, "--p")?;

    let mut cells = Vec::new();
    for &s in &args.s {
        for &d in &args.d {
            let mut thickness = s * d;
            while thickness <= (s + 2) * d {
                cells.push(SweepCell { s, d, thickness });
                thickness += args.step;
            }
        }
    }

    let run_all = || -> Vec<Result<SweepRow, String>> {
        cells
            .par_iter()
            .map(|&cell| run_sweep_cell(&args, cell, &eps, &p))
            .collect()
    };
    let rows = if args.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(args.jobs)
            .build()?
            .install(run_all)
    } else {
        run_all()
    };

    let mut csv = String::from("thickness,D,s,r,trials,successes,mean_rounds\n");
    for row in rows {
        let row = row.map_err(|e| -> Box<dyn Error> { e.into() })?;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{:.3}\n",
            row.cell.thickness,
            row.cell.d,
            row.cell.s,
            args.r,
            row.trials,
            row.successes,
            row.mean_rounds
        ));
    }
    emit(&csv, args.output.as_deref())?;
    Ok(0)
}

/// Runs every trial of one grid cell; a trial succeeds only when the
/// solver's output passes verification.
fn run_sweep_cell(
    args: &SweepArgs,
    cell: SweepCell,
    eps: &Rat,
    p: &Rat,
) -> Result<SweepRow, String> {
    let mut successes = 0usize;
    let mut rounds_total = 0f64;
    for k in 0..args.trials {
        let seed = args.seed + k as u64;
        let graph = gen::random_instance(
            args.r,
            cell.thickness,
            &rat_int(cell.d as i64),
            args.cap,
            seed,
        )
        .map_err(|e| e.to_string())?;
        let outcome = match args.solver {
            Solver::Exhaustive => {
                match oracle::find_its(&graph, cell.s, SearchBudget::new(args.budget)) {
                    Ok(Some(its)) => Some((its, 0.0)),
                    _ => None,
                }
            }
            Solver::Lll => {
                // The grid deliberately spans thicknesses below the default
                // prune target, so prune to the full block size instead of
                // erroring out down there.
                let config = LllConfig {
                    a: Some(cell.thickness.max(cell.s)),
                    max_resamples: args.max_resamples,
                    seed,
                };
                match lll::solve(&graph, cell.s, &config) {
                    Ok(result) => {
                        let rounds = result.stats.iterations as f64;
                        result.its.map(|its| (its, rounds))
                    }
                    Err(_) => None,
                }
            }
            Solver::Nibble => {
                let config = NibbleConfig {
                    seed,
                    p: p.clone(),
                    terminal_max_resamples: args.max_resamples,
                    ..NibbleConfig::default()
                };
                match nibble::solve(&graph, cell.s, eps, &config) {
                    Ok(result) => {
                        let rounds = result.rounds.len() as f64;
                        result.its.map(|its| (its, rounds))
                    }
                    Err(_) => None,
                }
            }
        };
        if let Some((its, rounds)) = outcome {
            if verify_its(&graph, &its).ok() {
                successes += 1;
                rounds_total += rounds;
            }
        }
    }
    let mean_rounds = if successes > 0 {
        rounds_total / successes as f64
    } else {
        0.0
    };
    Ok(SweepRow {
        cell,
        trials: args.trials,
        successes,
        mean_rounds,
    })
}
