use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fano_check::report::{self, Bundle, RunConfig};

#[derive(Parser)]
#[command(name = "fano-check", version, about = "Exact checks for the quintic del Pezzo threefold and its quintic curves")]
struct Cli {
    /// Flat key=value file; flags given here override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Comma-separated primes.
    #[arg(long, global = true)]
    primes: Option<String>,
    #[arg(long, global = true)]
    ext_bound: Option<usize>,
    #[arg(long, global = true)]
    sunit_bound: Option<i64>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write JSON lines here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Smoothness, group actions, orbits, normalization and lines.
    VerifyV5,
    /// Smoothness, stabilizers, rigidity and line loci of the quintic curves.
    VerifyQuintics,
    /// Enumerated counts against closed formulas.
    Count {
        /// pgl2, ga or gm; all three when omitted.
        kind: Option<String>,
        q: Option<u64>,
    },
    /// Reduction types of a Gm or Ga curve; the full battery without arguments.
    Reduce {
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<String>,
        /// Overrides --primes for this command.
        #[arg(long)]
        p: Option<String>,
    },
    /// Counts of curves with good reduction outside S.
    Shafarevich {
        #[arg(long, default_value = "2,5")]
        s: String,
    },
    /// Integrality, normality and smoothness of the degree-22 model over Z.
    VerifyV22OverZ,
}

fn list(s: &str) -> fano_check::Result<Vec<u64>> {
    let mut c = RunConfig::default();
    c.set("primes", s)?;
    Ok(c.primes)
}

fn config(cli: &Cli) -> fano_check::Result<RunConfig> {
    let mut c = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| fano_check::Error::Parse(format!("{}: {e}", path.display())))?;
        c.apply_text(&text)?;
    }
    if let Some(v) = cli.seed {
        c.seed = v;
    }
    if let Some(v) = &cli.primes {
        c.primes = list(v)?;
    }
    if let Some(v) = cli.ext_bound {
        c.ext_bound = v;
    }
    if let Some(v) = cli.sunit_bound {
        c.sunit_bound = v;
    }
    if let Some(v) = cli.jobs {
        c.jobs = v;
    }
    c.validate()?;
    Ok(c)
}

fn run(cli: &Cli, cfg: &RunConfig) -> fano_check::Result<Bundle> {
    match &cli.command {
        Command::VerifyV5 => report::cmd_verify_v5(cfg),
        Command::VerifyQuintics => report::cmd_verify_quintics(cfg),
        Command::Count { kind, q } => {
            let single = match (kind, q) {
                (Some(k), Some(q)) => Some((report::parse_count_type(k)?, *q)),
                (None, None) => None,
                _ => return Err(fano_check::Error::Invalid("count takes both a type and q, or neither".into())),
            };
            report::cmd_count(cfg, single)
        }
        Command::Reduce { u, xi, p } => {
            let target = report::parse_reduce_target(u.as_deref(), xi.as_deref())?;
            report::cmd_reduce(cfg, target, p.as_deref().map(list).transpose()?)
        }
        Command::Shafarevich { s } => report::cmd_shafarevich(cfg, &list(s)?),
        Command::VerifyV22OverZ => report::cmd_verify_v22_over_z(cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(64);
        }
    };
    if cli.print_config {
        print!("{}", cfg.to_text());
        return ExitCode::SUCCESS;
    }
    let bundle = match run(&cli, &cfg) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(64);
        }
    };
    let lines = bundle.json_lines();
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &lines) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(64);
            }
        }
        None => print!("{lines}"),
    }
    println!("{}", serde_json::to_string(&bundle.summary(cfg.seed)).unwrap());
    ExitCode::from(bundle.exit_code() as u8)
}
