use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use rigmod::constructions::{build_attribute_partition, couple_hat, AttrPartitionConfig, PartitionMode};
use rigmod::graph::{
    project, read_edge_list, read_incidence, sample_er, sample_incidence, write_edge_list, write_incidence,
};
use rigmod::harness::{self, GridPoint, Regime, SweepConfig, Table, VerifyOptions, TRUNCATION_A};
use rigmod::modularity::{best_restricted, exact_modularity, louvain, score, ModularityReport, DEFAULT_LEVELS};
use rigmod::{stats, Graph, Partition, RigParams};

#[derive(Parser)]
#[command(
    name = "rigmod",
    version,
    about = "Modularity experiments on random intersection graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample G(n, m, p) (or an Erdős–Rényi graph with --er).
    Generate(GenerateArgs),
    /// Score a supplied partition.
    Score {
        /// Edge-list file.
        graph: PathBuf,
        /// Partition file (one line of comma-separated block indices).
        partition: PathBuf,
        #[command(flatten)]
        out: ReportOut,
    },
    /// Exact optimum by enumeration, or the best k-block partition with --blocks.
    Exact {
        graph: PathBuf,
        #[arg(long)]
        blocks: Option<usize>,
        #[arg(long, default_value_t = rigmod::modularity::DEFAULT_EXACT_LIMIT)]
        max_n: usize,
        #[command(flatten)]
        out: ReportOut,
    },
    Louvain {
        graph: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_LEVELS)]
        levels: usize,
        #[command(flatten)]
        out: ReportOut,
    },
    /// Clique-cover statistics of an incidence file.
    Stats {
        incidence: PathBuf,
        #[arg(long, default_value_t = TRUNCATION_A)]
        threshold: usize,
    },
    /// Partition by exclusive attribute members, scored on the projection.
    AttrPartition {
        incidence: PathBuf,
        /// Membership probability the incidence was sampled with.
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value = "nonempty_exclusive")]
        mode: PartitionMode,
    },
    /// Thinned coupling: writes G and Ĝ as edge lists.
    Couple {
        incidence: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        g_out: PathBuf,
        #[arg(long)]
        hat_out: PathBuf,
    },
    Sweep(SweepArgs),
    /// Per-group summary statistics of a sweep CSV.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        group_by: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, requires_all = ["x", "y"])]
        svg: Option<PathBuf>,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        y: Option<String>,
    },
    /// Randomized invariant self-check; exits nonzero on any failure.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 40)]
        instances: usize,
        /// Corrupt the scorer to confirm the suite catches it.
        #[arg(long, hide = true)]
        mutate_scorer: bool,
    },
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    m: usize,
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample G(n, q) instead.
    #[arg(long, conflicts_with_all = ["m", "p"])]
    er: Option<f64>,
    /// Write the incidence here (not available with --er).
    #[arg(long, conflicts_with = "er")]
    incidence: Option<PathBuf>,
    /// Edge-list destination; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportOut {
    /// Per-block CSV destination.
    #[arg(long)]
    blocks: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value = "custom")]
    regime: Regime,
    /// Named grid; also sets the regime and replication count unless overridden.
    #[arg(long, conflicts_with = "grid")]
    preset: Option<String>,
    /// File of `n m p` lines.
    #[arg(long)]
    grid: Option<PathBuf>,
    /// Single grid point given inline.
    #[arg(long, requires_all = ["m", "p"], conflicts_with_all = ["grid", "preset"])]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value = "nonempty_exclusive")]
    mode: PartitionMode,
    /// Fill runtime_ms (makes reruns differ).
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    memory_cap: Option<f64>,
}

fn open(path: &Path) -> anyhow::Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn load_graph(path: &Path) -> anyhow::Result<Graph> {
    read_edge_list(open(path)?).with_context(|| format!("reading {}", path.display()))
}

fn emit_report(graph: &Graph, report: &ModularityReport, out: &ReportOut) -> anyhow::Result<()> {
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    report.write_summary(graph, &mut lock)?;
    writeln!(lock, "partition={}", report.partition)?;
    if let Some(path) = &out.blocks {
        let mut w = create(path)?;
        report.write_blocks_csv(&mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn generate(args: GenerateArgs) -> anyhow::Result<()> {
    let graph = match args.er {
        Some(q) => sample_er(args.n, q, args.seed)?,
        None => {
            let inc = sample_incidence(&RigParams::new(args.n, args.m, args.p, args.seed)?)?;
            if let Some(path) = &args.incidence {
                let mut w = create(path)?;
                write_incidence(&inc, &mut w)?;
                w.flush()?;
            }
            project(&inc)
        }
    };
    match &args.out {
        Some(path) => {
            let mut w = create(path)?;
            write_edge_list(&graph, &mut w)?;
            w.flush()?;
        }
        None => write_edge_list(&graph, io::stdout().lock())?,
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> anyhow::Result<()> {
    let (mut regime, grid, mut reps) = (args.regime, Vec::new(), 1);
    let grid = if let Some(name) = &args.preset {
        let Some((r, g, n)) = harness::preset(name) else {
            bail!("unknown preset {name:?}; choose one of {}", harness::PRESETS.join(", "));
        };
        if regime == Regime::Custom {
            regime = r;
        }
        reps = n;
        g
    } else if let Some(path) = &args.grid {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        GridPoint::parse_grid(&text)?
    } else if let (Some(n), Some(m), Some(p)) = (args.n, args.m, args.p) {
        vec![GridPoint { n, m, p }]
    } else {
        grid
    };
    let mut config = SweepConfig::new(regime, grid, args.reps.unwrap_or(reps), args.seed);
    config.epsilon = args.epsilon;
    config.mode = args.mode;
    config.record_timing = args.timings;
    config.output = args.out;
    if let Some(cap) = args.memory_cap {
        config.memory_cap = cap;
    }
    let rows = harness::run_sweep(&config)?;
    match &config.output {
        Some(path) => {
            let mut w = create(path)?;
            harness::write_csv(&rows, &mut w)?;
            w.flush()?;
        }
        None => harness::write_csv(&rows, io::stdout().lock())?,
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Generate(args) => generate(args)?,
        Command::Score { graph, partition, out } => {
            let g = load_graph(&graph)?;
            let text = std::fs::read_to_string(&partition)?;
            let p = Partition::parse(&text)?;
            emit_report(&g, &score(&g, &p)?, &out)?;
        }
        Command::Exact {
            graph,
            blocks,
            max_n,
            out,
        } => {
            let g = load_graph(&graph)?;
            let report = match blocks {
                Some(k) => best_restricted(&g, k)?,
                None => exact_modularity(&g, max_n)?,
            };
            emit_report(&g, &report, &out)?;
        }
        Command::Louvain {
            graph,
            seed,
            levels,
            out,
        } => {
            let g = load_graph(&graph)?;
            emit_report(&g, &louvain(&g, seed, levels)?, &out)?;
        }
        Command::Stats { incidence, threshold } => {
            let inc = read_incidence(open(&incidence)?)?;
            stats::write_summary(&inc, threshold, io::stdout().lock())?;
        }
        Command::AttrPartition {
            incidence,
            p,
            epsilon,
            mode,
        } => {
            let inc = read_incidence(open(&incidence)?)?;
            let params = RigParams::new(inc.n(), inc.m(), p, 0)?;
            let built = build_attribute_partition(&inc, &params, &AttrPartitionConfig::new(epsilon, mode)?)?;
            let g = project(&inc);
            println!("{}", built.partition);
            let report = score(&g, &built.partition)?;
            let mut lock = io::stdout().lock();
            report.write_summary(&g, &mut lock)?;
            writeln!(lock, "selected_attributes={}", built.selected.len())?;
            writeln!(lock, "remainder={}", built.remainder)?;
        }
        Command::Couple {
            incidence,
            seed,
            g_out,
            hat_out,
        } => {
            let inc = read_incidence(open(&incidence)?)?;
            let c = couple_hat(&inc, seed);
            for (graph, path) in [(&c.g, &g_out), (&c.g_hat, &hat_out)] {
                let mut w = create(path)?;
                write_edge_list(graph, &mut w)?;
                w.flush()?;
            }
            println!("delta={}", c.delta);
        }
        Command::Sweep(args) => sweep(args)?,
        Command::Report {
            input,
            group_by,
            out,
            svg,
            x,
            y,
        } => {
            let table = Table::read(open(&input)?)?;
            let summaries = harness::report(&table, &group_by)?;
            match &out {
                Some(path) => {
                    let mut w = create(path)?;
                    harness::write_summary_csv(&summaries, &group_by, &mut w)?;
                    w.flush()?;
                }
                None => harness::write_summary_csv(&summaries, &group_by, io::stdout().lock())?,
            }
            if let (Some(path), Some(x), Some(y)) = (svg, x, y) {
                let doc = harness::render_svg(&table, &group_by, &x, &y)?;
                std::fs::write(&path, doc).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Verify {
            seed,
            instances,
            mutate_scorer,
        } => {
            let outcomes = harness::verify(&VerifyOptions {
                seed,
                instances,
                mutate_scorer,
            });
            let width = outcomes.iter().map(|c| c.name.len()).max().unwrap_or(0);
            for c in &outcomes {
                let verdict = if c.passed { "PASS" } else { "FAIL" };
                println!("{verdict}  {:width$}  {}", c.name, c.detail);
            }
            if outcomes.iter().any(|c| !c.passed) {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain().any(|cause| {
        let io_err = cause
            .downcast_ref::<io::Error>()
            .or_else(|| match cause.downcast_ref::<rigmod::RigError>() {
                Some(rigmod::RigError::Io(e)) => Some(e),
                _ => None,
            });
        io_err.is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe)
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) if is_broken_pipe(&err) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
