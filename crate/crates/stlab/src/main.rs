use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stlab::config::{parse_group_id, HaarRequest, MomentMethodChoice};
use stlab::{parse_config_as, run, CliError, Command, RunConfig};

#[derive(Parser)]
#[command(name = "stlab", version, about = "Twisted Lefschetz groups and Sato-Tate statistics")]
struct Cli {
    /// Worker threads; 0 uses every available core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Twist spaces, component surjectivity and power/product checks.
    Lefschetz {
        #[arg(long)]
        config: PathBuf,
        /// Restart budget for the isometry search.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace moments of a catalog group by quadrature or Monte Carlo.
    HaarMoments {
        #[arg(long)]
        group: String,
        #[arg(long, default_value = "mixture")]
        component: String,
        #[arg(long, default_value = "quad")]
        method: String,
        #[arg(long, default_value_t = 8)]
        k: usize,
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normalized Frobenius traces of a curve, as CSV.
    Count {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Moment, distribution and per-class tests on trace data.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        /// Precomputed trace CSV; otherwise the configured curve is counted.
        #[arg(long)]
        traces: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Invariant checks over every module.
    Selftest,
}

fn load(path: &Path, command: Command) -> Result<(RunConfig, String), CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let cfg = parse_config_as(&text, Some(command)).map_err(|mut e| {
        e.message = format!("{}: {}", path.display(), e.message);
        e
    })?;
    Ok((cfg, text))
}

fn prepare(sub: Sub) -> Result<(RunConfig, String, Option<PathBuf>), CliError> {
    Ok(match sub {
        Sub::Lefschetz { config, budget, out } => {
            let (mut cfg, text) = load(&config, Command::Lefschetz)?;
            if let Some(b) = budget {
                cfg.search.budget = b;
            }
            let out = out.or(cfg.out.clone());
            (cfg, text, out)
        }
        Sub::HaarMoments { group, component, method, k, n, seed, out } => {
            let id = parse_group_id(&format!("{group}/{component}")).map_err(CliError::Usage)?;
            let method: MomentMethodChoice = method.parse().map_err(CliError::Usage)?;
            let mut cfg = RunConfig::bare(Command::HaarMoments);
            cfg.seed = seed;
            cfg.policy.k_max = k;
            cfg.haar = Some(HaarRequest { id, method, k_max: k, samples: n });
            let text = format!("haar-moments group={id} method={method:?} k={k} n={n} seed={seed}");
            (cfg, text, out)
        }
        Sub::Count { config, out } => {
            let (cfg, text) = load(&config, Command::Count)?;
            let out = out.or(cfg.out.clone());
            (cfg, text, out)
        }
        Sub::Analyze { config, traces, out } => {
            let (mut cfg, text) = load(&config, Command::Analyze)?;
            if traces.is_some() {
                cfg.traces = traces;
            }
            if cfg.traces.is_none() && (cfg.curve.is_none() || cfg.p_max.is_none()) {
                return Err(CliError::Usage("analyze needs --traces or a curve with p_max".into()));
            }
            let out = out.or(cfg.out.clone());
            (cfg, text, out)
        }
        Sub::Selftest => (RunConfig::bare(Command::Selftest), "selftest".to_string(), None),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = prepare(cli.command).and_then(|(cfg, text, out)| {
        let outcome = run(&cfg, &text, cli.threads)?;
        match out {
            Some(path) => fs::write(&path, &outcome.artifact).map_err(|e| CliError::io(&path, e))?,
            None => match io::stdout().lock().write_all(outcome.artifact.as_bytes()) {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => return Err(CliError::io(Path::new("<stdout>"), e)),
                _ => {}
            },
        }
        Ok(outcome.exit_code)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(2)
        }
    }
}
