use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use skeleton_nav::harness::{
    emit_census_csv, emit_csv, run_scenarios, size_census, trace_query, Epsilon, HarnessError, Scenario, SkeletonKind,
};
use skeleton_nav::harness::build_instance;

/// Skeleton-graph navigation experiments.
#[derive(Parser)]
#[command(name = "skeleton-nav", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenarios and write one CSV row per query plus aggregates.
    Run {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
        /// Output CSV; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Skeleton sizes over consecutive seeds.
    Census {
        scenario: PathBuf,
        #[arg(long, default_value_t = 20)]
        seeds: usize,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-delivery log of one query's skeleton search.
    Trace {
        scenario: PathBuf,
        #[arg(long, default_value_t = 0)]
        query: usize,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Awake nodes as `id provenance` lines.
    Skeleton {
        scenario: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Skeleton settings that replace the scenario file's.
#[derive(Args, Clone, Default)]
struct Overrides {
    /// Uniform skeleton with this epsilon, or `auto`.
    #[arg(long, conflicts_with = "adaptive")]
    epsilon: Option<String>,
    /// Strip width.
    #[arg(long)]
    width: Option<f64>,
    /// Diagonal street shift.
    #[arg(long, conflicts_with = "adaptive")]
    shift: Option<f64>,
    /// Prune uniform streets to shortest paths.
    #[arg(long, conflicts_with = "adaptive")]
    prune: bool,
    /// Adaptive (quadtree) skeleton.
    #[arg(long)]
    adaptive: bool,
    /// Add Voronoi streets between point dangers (adaptive only).
    #[arg(long, requires = "adaptive")]
    voronoi: bool,
}

impl Overrides {
    fn apply(&self, mut s: Scenario) -> Result<Scenario, HarnessError> {
        let bad = |reason: String| HarnessError::Config { line: 0, reason };
        if self.adaptive {
            let width = self.width.or(match s.skeleton {
                SkeletonKind::Adaptive { width, .. } | SkeletonKind::Uniform { width, .. } => width,
                SkeletonKind::Full => None,
            });
            s.skeleton = SkeletonKind::Adaptive { width, voronoi: self.voronoi };
            return Ok(s);
        }
        let uniform = self.epsilon.is_some() || self.shift.is_some() || self.prune;
        match &mut s.skeleton {
            SkeletonKind::Uniform { epsilon, width, shift, prune } => {
                if let Some(e) = &self.epsilon {
                    *epsilon = parse_epsilon(e).ok_or_else(|| bad(format!("bad --epsilon `{e}`")))?;
                }
                *width = self.width.or(*width);
                *shift = self.shift.unwrap_or(*shift);
                *prune |= self.prune;
            }
            SkeletonKind::Adaptive { width, .. } => *width = self.width.or(*width),
            SkeletonKind::Full if uniform => {
                let epsilon = match &self.epsilon {
                    Some(e) => parse_epsilon(e).ok_or_else(|| bad(format!("bad --epsilon `{e}`")))?,
                    None => Epsilon::Fixed(0.05),
                };
                s.skeleton = SkeletonKind::Uniform { epsilon, width: self.width, shift: self.shift.unwrap_or(0.0), prune: self.prune };
            }
            SkeletonKind::Full => {}
        }
        Ok(s)
    }
}

fn parse_epsilon(v: &str) -> Option<Epsilon> {
    if v == "auto" {
        Some(Epsilon::Auto)
    } else {
        v.parse().ok().map(Epsilon::Fixed)
    }
}

fn load(path: &Path, overrides: &Overrides) -> Result<Scenario, HarnessError> {
    overrides.apply(Scenario::parse(&std::fs::read_to_string(path)?)?)
}

fn output(out: &Option<PathBuf>) -> Result<Box<dyn Write>, HarnessError> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Run { scenarios, overrides, out } => {
            let parsed = scenarios.iter().map(|p| load(p, &overrides)).collect::<Result<Vec<_>, _>>()?;
            let records = run_scenarios(&parsed).into_iter().collect::<Result<Vec<_>, _>>()?;
            emit_csv(&records, output(&out)?)
        }
        Command::Census { scenario, seeds, overrides, out } => {
            let s = load(&scenario, &overrides)?;
            let table = size_census(&s, seeds)?;
            emit_census_csv(&table, s.n, output(&out)?)
        }
        Command::Trace { scenario, query, overrides, out } => {
            let run = trace_query(&load(&scenario, &overrides)?, query)?;
            let mut w = output(&out)?;
            run.write_trace(&mut w)?;
            Ok(w.flush()?)
        }
        Command::Skeleton { scenario, overrides, out } => {
            let inst = build_instance(&load(&scenario, &overrides)?)?;
            let mut w = output(&out)?;
            inst.skeleton.dump(&mut w)?;
            Ok(w.flush()?)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
