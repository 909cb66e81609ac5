use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use prv_core::arena::{product, GameArena};
use prv_core::bench::{self, BenchOptions};
use prv_core::emptiness::witness_to_play_report;
use prv_core::generators::{gen_from_cnf, gen_intersection, gen_random, RandomSpec};
use prv_core::io::{parse_arena, parse_dimacs, parse_moore, write_arena};
use prv_core::verifier::{compute_pareto_set, verify, Algorithm, MAX_ENUMERATED_OBJECTIVES};

/// Pareto-rational verification of single-player parity games.
#[derive(Parser)]
#[command(name = "prv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether every Pareto-optimal play of an arena is won.
    ///
    /// Exits with 0 on positive instances, 1 on negative ones and 2 on
    /// errors.
    Verify(VerifyArgs),
    /// Print an arena of one of the built-in families.
    Generate(GenerateArgs),
    /// Time the algorithms on a family of instances and write CSV.
    Bench(BenchArgs),
    /// Restrict an arena to the plays consistent with a Moore strategy.
    Product {
        arena: PathBuf,
        strategy: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Naive,
    Antichain,
    Counterexample,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Naive => Algorithm::Naive,
            AlgorithmArg::Antichain => Algorithm::Antichain,
            AlgorithmArg::Counterexample => Algorithm::Counterexample,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Arena in SPGAME format.
    file: PathBuf,
    #[arg(long, short, value_enum, default_value = "counterexample")]
    algorithm: AlgorithmArg,
    /// Print the counterexample play of a negative instance.
    #[arg(long)]
    witness: bool,
    /// Print the certificate of a positive instance.
    #[arg(long)]
    certificate: bool,
    /// Also compute and print the Pareto set.
    #[arg(long)]
    pareto: bool,
    /// Moore strategy for the system, applied before verifying.
    #[arg(long)]
    strategy: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Intersection,
    Random,
    Cnf,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    kind: Kind,
    /// Number of intersection copies.
    #[arg(long, default_value_t = 1)]
    copies: usize,
    /// Duplicate the crossing-order objectives for every copy.
    #[arg(long)]
    per_copy_objectives: bool,
    /// Make a Pareto-optimal play of every copy losing.
    #[arg(long)]
    negative: bool,
    #[arg(long, default_value_t = 10)]
    vertices: usize,
    #[arg(long, default_value_t = 3)]
    objectives: usize,
    #[arg(long, default_value_t = 4)]
    max_priority: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    min_out_degree: usize,
    #[arg(long, default_value_t = 4)]
    max_out_degree: usize,
    /// DIMACS CNF file for the `cnf` kind.
    #[arg(long)]
    dimacs: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Intersection,
    IntersectionPerCopy,
    Random,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "intersection")]
    family: Family,
    /// Copy counts for the intersection families.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 4])]
    copies: Vec<usize>,
    #[arg(long)]
    negative: bool,
    /// Vertex count of random instances.
    #[arg(long, default_value_t = 500)]
    vertices: usize,
    /// Objective counts of random instances.
    #[arg(long, value_delimiter = ',', default_values_t = [6usize])]
    objectives: Vec<usize>,
    #[arg(long, default_value_t = 4)]
    max_priority: u32,
    #[arg(long, default_value_t = 1)]
    min_out_degree: usize,
    #[arg(long, default_value_t = 4)]
    max_out_degree: usize,
    /// Random instances per objective count, or runs per intersection
    /// instance.
    #[arg(long, default_value_t = 1)]
    repetitions: u64,
    /// First seed of random instances.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also time the naive algorithm.
    #[arg(long)]
    naive: bool,
    /// Compute the Pareto set size and the ratio of lost payoffs.
    #[arg(long)]
    with_stats: bool,
    #[arg(long)]
    workers: Option<usize>,
    /// CSV destination; standard output if absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Per-round CSV of the slowest counterexample run.
    #[arg(long)]
    iterations: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_arena(path: &Path) -> Result<GameArena> {
    parse_arena(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => io::stdout().write_all(text.as_bytes()).context("cannot write to standard output"),
    }
}

fn run_verify(args: &VerifyArgs) -> Result<bool> {
    let mut arena = load_arena(&args.file)?;
    if let Some(path) = &args.strategy {
        let machine = parse_moore(&read(path)?).with_context(|| format!("{}", path.display()))?;
        arena = product(&arena, &machine).context("cannot apply the strategy")?;
    }
    if !arena.is_single_player() {
        bail!("the arena has system vertices; supply a strategy with --strategy");
    }
    let algorithm = Algorithm::from(args.algorithm);
    let result = verify(&arena, algorithm)?;

    let mut out = String::new();
    out.push_str(if result.positive { "positive\n" } else { "negative\n" });
    if args.pareto {
        if arena.objective_count() > MAX_ENUMERATED_OBJECTIVES {
            out.push_str("P_G = (too many objectives to enumerate)\n");
        } else {
            out.push_str(&format!("P_G = {}\n", compute_pareto_set(&arena)?));
        }
    }
    if args.certificate {
        if let Some(certificate) = &result.certificate {
            out.push_str(&format!("certificate = {certificate}\n"));
        }
    }
    if args.witness {
        if let Some(lasso) = &result.counterexample {
            let report = witness_to_play_report(&arena, lasso)?;
            out.push_str(&format!("counterexample = {}\n", report.trace));
            out.push_str(&format!("counterexample payoff = {}\n", report.extended));
        }
    }
    let stats = &result.stats;
    out.push_str(&format!("algorithm = {algorithm}\n"));
    out.push_str(&format!("emptiness calls = {}\n", stats.emptiness_calls));
    out.push_str(&format!("iterations = {}\n", stats.iterations));
    let trajectory: Vec<String> = stats.antichain_sizes.iter().map(ToString::to_string).collect();
    out.push_str(&format!("|A| trajectory = [{}]\n", trajectory.join(",")));
    out.push_str(&format!("wall time = {:.6}s\n", stats.wall_time.as_secs_f64()));
    emit(&out, None)?;
    Ok(result.positive)
}

fn run_generate(args: &GenerateArgs) -> Result<()> {
    let arena = match args.kind {
        Kind::Intersection => gen_intersection(args.copies, args.per_copy_objectives, args.negative)?,
        Kind::Random => gen_random(&RandomSpec {
            vertices: args.vertices,
            objectives: args.objectives,
            max_priority: args.max_priority,
            seed: args.seed,
            out_degree: args.min_out_degree..=args.max_out_degree,
        })?,
        Kind::Cnf => {
            let Some(path) = &args.dimacs else {
                bail!("the cnf kind needs --dimacs <file>");
            };
            gen_from_cnf(&parse_dimacs(&read(path)?).with_context(|| format!("{}", path.display()))?)
        }
    };
    emit(&write_arena(&arena), args.output.as_deref())
}

fn run_bench(args: &BenchArgs) -> Result<()> {
    let instances = match args.family {
        Family::Intersection | Family::IntersectionPerCopy => {
            let per_copy = matches!(args.family, Family::IntersectionPerCopy);
            let once = bench::intersection_instances(&args.copies, per_copy, args.negative)?;
            (0..args.repetitions).flat_map(|_| once.clone()).collect()
        }
        Family::Random => {
            let base = RandomSpec {
                vertices: args.vertices,
                objectives: 0,
                max_priority: args.max_priority,
                seed: 0,
                out_degree: args.min_out_degree..=args.max_out_degree,
            };
            let seeds: Vec<u64> = (args.seed..args.seed + args.repetitions).collect();
            bench::random_instances(&base, &args.objectives, &seeds)?
        }
    };
    let options = BenchOptions {
        naive: args.naive,
        with_stats: args.with_stats,
        workers: args.workers,
        ..Default::default()
    };
    let measured = bench::run(&instances, &options)?;
    let rows: Vec<_> = measured.iter().map(|m| m.row.clone()).collect();
    let mut csv = Vec::new();
    bench::write_rows(&rows, &mut csv)?;
    emit(std::str::from_utf8(&csv)?, args.output.as_deref())?;
    if let Some(path) = &args.iterations {
        if let Some(slowest) = bench::slowest_counterexample_run(&measured) {
            let file = fs::File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
            bench::write_iterations(&slowest.trace, file)?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Verify(args) => Ok(if run_verify(&args)? { ExitCode::SUCCESS } else { ExitCode::from(1) }),
        Command::Generate(args) => run_generate(&args).map(|_| ExitCode::SUCCESS),
        Command::Bench(args) => run_bench(&args).map(|_| ExitCode::SUCCESS),
        Command::Product { arena, strategy, output } => {
            let arena = load_arena(&arena)?;
            let machine = parse_moore(&read(&strategy)?).with_context(|| format!("{}", strategy.display()))?;
            let restricted = product(&arena, &machine)?;
            emit(&write_arena(&restricted), output.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
