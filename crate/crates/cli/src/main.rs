//! `weylstat` command-line tool.
//!
//! Exit codes: 0 success, 2 configuration error, 3 enumeration budget
//! exceeded, 4 I/O failure.

mod config;
mod dispatch;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Command, Format, RunConfig, What};

pub const THREADS_ENV: &str = "WEYLSTAT_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Io(String),
}

impl From<weylstat::Error> for CliError {
    fn from(e: weylstat::Error) -> Self {
        match e {
            weylstat::Error::BudgetExceeded(m) => CliError::Budget(format!("budget exceeded: {m}")),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "weylstat",
    version,
    about = "Inversions and descents of random Weyl group elements"
)]
struct Cli {
    /// Worker threads. The WEYLSTAT_THREADS environment variable overrides this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone, Default)]
struct GroupArgs {
    /// Group as FAMILY:N[:P], e.g. "B:5:1/2".
    #[arg(long)]
    group: Option<String>,
    /// S, B or D.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Sign bias as a rational such as 1/4.
    #[arg(long)]
    p: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
struct ProductArgs {
    /// Comma-separated components, e.g. "S:250,B:250:1/2".
    #[arg(long)]
    group: String,
}

#[derive(Args, Debug, Clone, Default)]
struct OutArgs {
    /// Output file. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format. Inferred from the --out extension when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug, Clone, Default)]
struct McArgs {
    /// Number of replications.
    #[arg(long = "R")]
    replications: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated grid coordinates.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    grid: Option<Vec<f64>>,
}

#[derive(Args, Debug, Clone, Default)]
struct EvltArgs {
    /// Draws per maximum. Defaults to floor(n/(ln n)^2).
    #[arg(long)]
    k: Option<usize>,
    /// Replace group draws by exact Gumbel draws.
    #[arg(long)]
    self_test: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Draw elements and their statistics.
    Sample {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        o: OutArgs,
    },
    /// Closed-form moments.
    Moments {
        #[command(flatten)]
        g: GroupArgs,
        #[command(flatten)]
        o: OutArgs,
    },
    /// Exhaustive enumeration with exact weights.
    Enumerate {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long, value_enum, default_value_t = What::Elements)]
        what: What,
        #[command(flatten)]
        o: OutArgs,
    },
    /// Bivariate CLT experiment.
    Clt {
        #[command(flatten)]
        g: GroupArgs,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        o: OutArgs,
    },
    /// Gumbel limit of coordinatewise maxima.
    Evlt {
        #[command(flatten)]
        g: GroupArgs,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        e: EvltArgs,
        #[command(flatten)]
        o: OutArgs,
    },
    /// Quality of the Hájek projection of the inversion count.
    Hajek {
        #[command(flatten)]
        g: GroupArgs,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        o: OutArgs,
    },
    ProductSample {
        #[command(flatten)]
        g: ProductArgs,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        o: OutArgs,
    },
    ProductMoments {
        #[command(flatten)]
        g: ProductArgs,
        #[command(flatten)]
        o: OutArgs,
    },
    ProductEnumerate {
        #[command(flatten)]
        g: ProductArgs,
        #[arg(long, value_enum, default_value_t = What::Elements)]
        what: What,
        #[command(flatten)]
        o: OutArgs,
    },
    ProductClt {
        #[command(flatten)]
        g: ProductArgs,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        o: OutArgs,
    },
    ProductEvlt {
        #[command(flatten)]
        g: ProductArgs,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        e: EvltArgs,
        #[command(flatten)]
        o: OutArgs,
    },
    /// Run from a JSON RunConfig file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn build(command: Command, g: GroupArgs, o: OutArgs) -> RunConfig {
    let mut c = RunConfig::new(command);
    c.group = g.group;
    c.family = g.family;
    c.n = g.n;
    c.p = g.p;
    c.out = o.out;
    c.format = o.format;
    c
}

fn product(command: Command, g: ProductArgs, o: OutArgs) -> RunConfig {
    build(
        command,
        GroupArgs {
            group: Some(g.group),
            ..Default::default()
        },
        o,
    )
}

fn with_mc(mut c: RunConfig, mc: McArgs) -> RunConfig {
    c.replications = mc.replications;
    c.seed = mc.seed;
    c.grid = mc.grid;
    c
}

fn with_evlt(mut c: RunConfig, e: EvltArgs) -> RunConfig {
    c.k = e.k;
    c.self_test = e.self_test;
    c
}

fn to_config(cmd: Cmd) -> Result<RunConfig, CliError> {
    Ok(match cmd {
        Cmd::Sample { g, count, seed, o } => {
            let mut c = build(Command::Sample, g, o);
            c.count = Some(count);
            c.seed = seed;
            c
        }
        Cmd::Moments { g, o } => build(Command::Moments, g, o),
        Cmd::Enumerate { g, what, o } => {
            let mut c = build(Command::Enumerate, g, o);
            c.what = what;
            c
        }
        Cmd::Clt { g, mc, o } => with_mc(build(Command::Clt, g, o), mc),
        Cmd::Evlt { g, mc, e, o } => with_evlt(with_mc(build(Command::Evlt, g, o), mc), e),
        Cmd::Hajek { g, mc, o } => with_mc(build(Command::Hajek, g, o), mc),
        Cmd::ProductSample { g, count, seed, o } => {
            let mut c = product(Command::ProductSample, g, o);
            c.count = Some(count);
            c.seed = seed;
            c
        }
        Cmd::ProductMoments { g, o } => product(Command::ProductMoments, g, o),
        Cmd::ProductEnumerate { g, what, o } => {
            let mut c = product(Command::ProductEnumerate, g, o);
            c.what = what;
            c
        }
        Cmd::ProductClt { g, mc, o } => with_mc(product(Command::ProductClt, g, o), mc),
        Cmd::ProductEvlt { g, mc, e, o } => {
            with_evlt(with_mc(product(Command::ProductEvlt, g, o), mc), e)
        }
        Cmd::Run { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::Io(format!("{}: {e}", config.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", config.display())))?
        }
    })
}

fn threads(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{THREADS_ENV}={v} is not a thread count"))),
        Err(_) => Ok(flag),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut config = to_config(cli.cmd)?;
    if cli.threads.is_some() {
        config.threads = cli.threads;
    }
    if let Some(n) = threads(config.threads)? {
        if n == 0 {
            return Err(CliError::Config("thread count must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let out = dispatch::dispatch(&config)?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    match &config.out {
        Some(path) => std::fs::write(path, out.body)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{}", out.body);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 and usage text on stderr for bad flags.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
