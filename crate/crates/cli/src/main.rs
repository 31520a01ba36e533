//! `lamina`: command-line driver for the lamina-core pipelines.
//!
//! Exit codes: 0 on success, 1 when a run fails validation (the first
//! witness goes to stderr), 2 on usage errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lamina_core::io::{execute, RunConfig};
use lamina_core::Error;

#[derive(Parser, Debug)]
#[command(
    name = "lamina",
    version,
    about = "Tree codings, laminations and random planar maps"
)]
struct Cli {
    /// Run configuration file; flags given on the command line override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Uniform Dyck excursion of length 2n.
    SampleExcursion(Common),
    /// Uniform rooted 2k-angulation with n faces.
    SampleMap(SampleMap),
    /// Plane tree coded by an excursion.
    Tree(Source),
    /// Chords of the contour or label lamination as CSV.
    Lamination(Lam),
    /// SVG picture of a lamination.
    Render(Render),
    /// Box-counting dimension estimate.
    Dim(Dim),
    /// One row of the sample-restricted D* distance.
    BrownianMap(BrownianMap),
    /// Bottleneck scan over a seed range.
    Bottleneck(Bottleneck),
    /// Invariant suite over a seed range.
    Verify(Verify),
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Source {
    #[command(flatten)]
    common: Common,
    /// Excursion file to read instead of sampling.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SampleMap {
    #[command(flatten)]
    common: Common,
    /// Face half-degree.
    #[arg(long)]
    k: Option<usize>,
    /// CSV with the ball-growth exponent.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Lam {
    #[command(flatten)]
    source: Source,
    /// contour | label
    #[arg(long)]
    relation: Option<String>,
    /// consecutive | all-pairs
    #[arg(long)]
    rule: Option<String>,
}

#[derive(Args, Debug)]
struct Render {
    #[command(flatten)]
    lam: Lam,
    /// klein | poincare
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    width: Option<u32>,
}

#[derive(Args, Debug)]
struct Dim {
    #[command(flatten)]
    lam: Lam,
    /// lamination | endpoints | ladder
    #[arg(long)]
    target: Option<String>,
    /// Dyadic levels `a..b`.
    #[arg(long)]
    scales: Option<String>,
}

#[derive(Args, Debug)]
struct BrownianMap {
    #[command(flatten)]
    common: Common,
    /// Number of sampled times.
    #[arg(long)]
    sample: Option<usize>,
    /// Index of the source among the sampled times.
    #[arg(long)]
    source: Option<usize>,
}

#[derive(Args, Debug)]
struct Bottleneck {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Seed range `a..b`.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    lmax: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Verify {
    #[arg(long)]
    n: Option<usize>,
    /// Seed range `a..b`.
    #[arg(long)]
    seeds: Option<String>,
    /// JSON report.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn set<T>(slot: &mut Option<T>, value: Option<T>) {
    if value.is_some() {
        *slot = value;
    }
}

impl Common {
    fn apply(self, cfg: &mut RunConfig) {
        set(&mut cfg.n, self.n);
        set(&mut cfg.seed, self.seed);
        set(&mut cfg.out, self.out);
    }
}

impl Source {
    fn apply(self, cfg: &mut RunConfig) {
        self.common.apply(cfg);
        set(&mut cfg.input, self.input);
    }
}

impl Lam {
    fn apply(self, cfg: &mut RunConfig) {
        self.source.apply(cfg);
        set(&mut cfg.relation, self.relation);
        set(&mut cfg.rule, self.rule);
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::SampleExcursion(_) => "sample-excursion",
            Command::SampleMap(_) => "sample-map",
            Command::Tree(_) => "tree",
            Command::Lamination(_) => "lamination",
            Command::Render(_) => "render",
            Command::Dim(_) => "dim",
            Command::BrownianMap(_) => "brownian-map",
            Command::Bottleneck(_) => "bottleneck",
            Command::Verify(_) => "verify",
        }
    }

    fn apply(self, cfg: &mut RunConfig) {
        match self {
            Command::SampleExcursion(a) => a.apply(cfg),
            Command::SampleMap(a) => {
                a.common.apply(cfg);
                set(&mut cfg.k, a.k);
                set(&mut cfg.stats, a.stats);
            }
            Command::Tree(a) => a.apply(cfg),
            Command::Lamination(a) => a.apply(cfg),
            Command::Render(a) => {
                a.lam.apply(cfg);
                set(&mut cfg.model, a.model);
                set(&mut cfg.width, a.width);
            }
            Command::Dim(a) => {
                a.lam.apply(cfg);
                set(&mut cfg.target, a.target);
                set(&mut cfg.scales, a.scales);
            }
            Command::BrownianMap(a) => {
                a.common.apply(cfg);
                set(&mut cfg.sample, a.sample);
                set(&mut cfg.source, a.source);
            }
            Command::Bottleneck(a) => {
                set(&mut cfg.n, a.n);
                set(&mut cfg.k, a.k);
                set(&mut cfg.seeds, a.seeds);
                set(&mut cfg.delta, a.delta);
                set(&mut cfg.lmax, a.lmax);
                set(&mut cfg.out, a.out);
            }
            Command::Verify(a) => {
                set(&mut cfg.n, a.n);
                set(&mut cfg.seeds, a.seeds);
                set(&mut cfg.out, a.out);
            }
        }
    }
}

fn usage_error(err: &Error) -> bool {
    matches!(
        err,
        Error::InvalidArgument(_)
            | Error::InvalidSize(_)
            | Error::OutOfRange { .. }
            | Error::UnsupportedK(_)
    )
}

fn config_from(cli: Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => match &cli.command {
            Some(c) => RunConfig::new(c.name()),
            None => {
                return Err(Error::InvalidArgument(
                    "a subcommand or --config is required".into(),
                ))
            }
        },
    };
    if let Some(command) = cli.command {
        if cli.config.is_some() && cfg.command != command.name() {
            return Err(Error::InvalidArgument(format!(
                "config is for {:?}, not {:?}",
                cfg.command,
                command.name()
            )));
        }
        command.apply(&mut cfg);
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = config_from(cli).and_then(|cfg| execute(&cfg));
    match outcome {
        Ok(outcome) => {
            println!("{}", outcome.report.trim_end());
            for file in &outcome.files {
                println!("wrote {}", file.display());
            }
            match outcome.failure {
                Some(witness) => {
                    eprintln!("validation failed: {witness}");
                    ExitCode::from(1)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            if usage_error(&err) {
                eprintln!("run `lamina --help` for usage");
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
