use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crossing_forest::gen::{self, Kind};
use crossing_forest::lp::{
    build_dual, build_primal, build_separation, build_threshold, build_weighted_primal, export_text, LpInstance,
};
use crossing_forest::num::{ceil_sqrt, parse_rational, pow2_neg, Rational};
use crossing_forest::pipeline::{build_tree, Mode, Options, Run};
use crossing_forest::{canonical_ranges, io, svg, verify, Error, PointSet, RangeSpace};

/// Perturbation scale applied to input points by `--perturb`.
const INPUT_PERTURBATION_BITS: u32 = 40;
const THREADS_VAR: &str = "CROSSING_FOREST_THREADS";

#[derive(Parser)]
#[command(name = "crossing-forest", version, about = "Spanning trees with low crossing number")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated point set as JSON.
    Gen(GenArgs),
    /// Build a spanning tree and print its report.
    Run(RunArgs),
    /// Build one linear program and write it in text form.
    Lp(LpArgs),
    /// Run the independent checks on an instance.
    Verify(VerifyArgs),
    /// Brute-force the optimal crossing number (at most 8 points).
    Oracle(OracleArgs),
}

#[derive(Args)]
struct Input {
    /// Point file (JSON array of coordinates) or, with --abstract, a set system.
    #[arg(long = "in", value_name = "PATH", conflicts_with = "gen", required_unless_present = "gen")]
    input: Option<PathBuf>,
    /// Generator spec `kind:n` with kind one of grid, uniform, circle, moment-curve.
    #[arg(long, value_name = "KIND:N")]
    gen: Option<String>,
    /// Read --in as a set system `{"ground": n, "sets": [...]}`.
    #[arg(long = "abstract", requires = "input")]
    abstract_: bool,
    /// Seed for generated points (defaults to --seed where present).
    #[arg(long)]
    gen_seed: Option<u64>,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Symbolically perturb input points before use.
    #[arg(long)]
    perturb: bool,
}

#[derive(Args)]
struct GenArgs {
    /// `kind:n`
    spec: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value = "randomized")]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Threshold used at every level instead of the minimal feasible one (e.g. 3 or 7/2).
    #[arg(long = "t", value_name = "T")]
    t: Option<String>,
    /// Append a verification block to the report.
    #[arg(long)]
    verify: bool,
    /// Write the first level's primal program to PATH.
    #[arg(long, value_name = "PATH")]
    dump_lp: Option<PathBuf>,
    /// Write the canonical ranges, one hex bitset per line, to PATH.
    #[arg(long, value_name = "PATH")]
    dump_ranges: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
    /// Number of most-crossed lines drawn in the SVG.
    #[arg(long, default_value_t = 0)]
    lines: usize,
    /// Independent runs with seeds seed, seed+1, ...; the report becomes an array.
    #[arg(long, default_value_t = 1)]
    trials: u64,
    /// Zero the timing fields so identical configurations print identical bytes.
    #[arg(long)]
    no_timings: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Program {
    Primal,
    Weighted,
    Dual,
    Threshold,
    Separation,
}

#[derive(Args)]
struct LpArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value_t = Program::Primal)]
    program: Program,
    /// Threshold; defaults to ceil(sqrt n).
    #[arg(long = "t", value_name = "T")]
    t: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value = "randomized")]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_gen_spec(spec: &str) -> anyhow::Result<(Kind, usize)> {
    let (kind, n) = spec.split_once(':').with_context(|| format!("generator spec {spec:?} is not kind:n"))?;
    let n: usize = n.parse().with_context(|| format!("bad point count in {spec:?}"))?;
    Ok((kind.parse()?, n))
}

fn load(input: &Input, seed: u64) -> anyhow::Result<RangeSpace> {
    if input.abstract_ {
        let path = input.input.as_deref().expect("clap requires --in");
        return io::read_set_system(path).with_context(|| format!("reading {}", path.display()));
    }
    let points = load_points(input, seed)?;
    Ok(canonical_ranges(&points)?)
}

fn load_points(input: &Input, seed: u64) -> anyhow::Result<PointSet> {
    let points = match (&input.input, &input.gen) {
        (Some(path), _) => {
            let coords = io::read_coords(path).with_context(|| format!("reading {}", path.display()))?;
            if input.perturb {
                let raw = PointSet::new_unchecked(
                    coords.into_iter().enumerate().map(|(i, c)| crossing_forest::Point::new(i, c)).collect(),
                )?;
                return Ok(gen::perturb(&raw, &pow2_neg(INPUT_PERTURBATION_BITS))?);
            }
            PointSet::from_coords(coords)?
        }
        (None, Some(spec)) => {
            let (kind, n) = parse_gen_spec(spec)?;
            let points = gen::generate(kind, n, input.gen_seed.unwrap_or(seed), input.dim)?;
            if input.perturb {
                gen::perturb(&points, &pow2_neg(INPUT_PERTURBATION_BITS))?
            } else {
                points
            }
        }
        (None, None) => bail!("one of --in or --gen is required"),
    };
    Ok(points)
}

fn parse_t(t: &Option<String>) -> anyhow::Result<Option<Rational>> {
    t.as_deref().map(|s| parse_rational(s).with_context(|| format!("bad threshold {s:?}"))).transpose()
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn to_json(value: &impl serde::Serialize) -> anyhow::Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

fn cmd_gen(args: &GenArgs) -> anyhow::Result<()> {
    let (kind, n) = parse_gen_spec(&args.spec)?;
    let points = gen::generate(kind, n, args.seed, args.dim)?;
    emit(&args.out, &io::points_to_json(&points))
}

fn one_run(space: &RangeSpace, args: &RunArgs, seed: u64) -> anyhow::Result<Run> {
    let opts = Options { mode: args.mode, seed, t_override: parse_t(&args.t)?, ..Options::default() };
    let mut run = build_tree(space, &opts)?;
    if args.verify {
        run.report.verification = Some(verify::verification_block(space, &run)?);
    }
    if args.no_timings {
        run.report.timings_ms.total = 0;
        run.report.timings_ms.ranges = 0;
        run.report.timings_ms.levels.iter_mut().for_each(|t| *t = 0);
    }
    Ok(run)
}

fn cmd_run(args: &RunArgs) -> anyhow::Result<()> {
    if args.trials == 0 {
        bail!("--trials must be at least 1");
    }
    let started = std::time::Instant::now();
    let space = load(&args.input, args.seed)?;
    let ranges_ms = if args.no_timings { 0 } else { started.elapsed().as_millis() as u64 };
    log::info!("{} points, {} canonical ranges", space.ground_size(), space.len());
    if let Some(path) = &args.dump_ranges {
        write_file(path, &space.dump_hex())?;
    }
    if let Some(path) = &args.dump_lp {
        let t = match parse_t(&args.t)? {
            Some(t) => t,
            None => crossing_forest::lp::min_feasible_t(&space, Default::default())?,
        };
        let lp = match args.mode {
            Mode::Randomized => build_primal(&space, &t)?,
            Mode::DeterministicPlanar => build_weighted_primal(&space, &t)?,
        };
        write_file(path, &export_text(&lp))?;
    }
    let mut runs: Vec<Run> = (0..args.trials)
        .into_par_iter()
        .map(|i| one_run(&space, args, args.seed.wrapping_add(i)))
        .collect::<anyhow::Result<_>>()?;
    for run in &mut runs {
        run.report.timings_ms.ranges = ranges_ms;
        run.report.timings_ms.total += ranges_ms;
    }
    if let Some(path) = &args.svg {
        let points = space.points().ok_or(Error::NotGeometric)?;
        let picture = svg::render_svg(points, &runs[0].tree.edges, Some(&space), args.lines)?;
        write_file(path, &picture)?;
    }
    let text = if args.trials == 1 {
        to_json(&runs[0].report)?
    } else {
        to_json(&runs.iter().map(|r| &r.report).collect::<Vec<_>>())?
    };
    emit(&args.out, &text)
}

fn cmd_lp(args: &LpArgs) -> anyhow::Result<()> {
    let space = load(&args.input, 0)?;
    let t = match parse_t(&args.t)? {
        Some(t) => t,
        None => Rational::from_integer(ceil_sqrt(space.ground_size() as u64).into()),
    };
    let lp: LpInstance = match args.program {
        Program::Primal => build_primal(&space, &t)?,
        Program::Weighted => build_weighted_primal(&space, &t)?,
        Program::Dual => build_dual(&space, &t)?,
        Program::Threshold => build_threshold(&space)?,
        Program::Separation => build_separation(&space)?,
    };
    emit(&args.out, &export_text(&lp))
}

fn cmd_verify(args: &VerifyArgs) -> anyhow::Result<()> {
    let space = load(&args.input, args.seed)?;
    let opts = Options { mode: args.mode, seed: args.seed, ..Options::default() };
    let run = build_tree(&space, &opts)?;
    let block = verify::verification_block(&space, &run)?;
    let passed = block["passed"] == json!(true);
    emit(&args.out, &to_json(&block)?)?;
    if !passed {
        bail!("verification failed");
    }
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> anyhow::Result<()> {
    let space = load(&args.input, 0)?;
    let res = verify::brute_force_opt_tree(&space)?;
    let value: Value = json!({
        "n": space.ground_size(),
        "ranges": space.len(),
        "t_opt": res.t_opt,
        "witness": res.witness.edges,
        "examined": res.examined,
    });
    emit(&args.out, &to_json(&value)?)
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(text) = std::env::var(THREADS_VAR) {
        let threads: usize = text.trim().parse().with_context(|| format!("{THREADS_VAR}={text:?} is not a count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global()?;
    }
    Ok(())
}

/// 2 for instances the algorithm cannot handle, 1 for everything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::Infeasible
            | Error::Unbounded
            | Error::Degenerate(_)
            | Error::NonPlanarSupport(..)
            | Error::RetriesExhausted { .. }
            | Error::Disconnected
            | Error::ShortcutVerification { .. }
            | Error::InvalidSolution(_),
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Run(args) => cmd_run(args),
        Command::Lp(args) => cmd_lp(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Oracle(args) => cmd_oracle(args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
