mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rsff_core::arith::{count_reversal_solutions, scan_reversal_counts};
use rsff_core::char_sums::CharSpec;
use rsff_core::experiments::{deviation_trend, distribution, verify_all, OutputFormat, RunConfig};
use rsff_core::vaughan::{default_uv, sigma1, sigma2, VaughanParams};
use rsff_core::Poly;

use config::{parse_residues, FileConfig};

#[derive(Parser, Debug)]
#[command(name = "rsff", version, about = "Rudin-Shapiro digit sums over F_q[t]: exhaustive scans and identity checks")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Field characteristic (odd prime).
    #[arg(long, global = true)]
    p: Option<u32>,
    /// Extension degree.
    #[arg(long, global = true)]
    e: Option<usize>,
    /// Monic irreducible modulus, residues constant term first, e.g. "1,0,1".
    #[arg(long, global = true)]
    modulus: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads.
    #[arg(long, global = true, env = "RSFF_JOBS")]
    jobs: Option<usize>,
    /// Largest enumeration allowed.
    #[arg(long, global = true)]
    cap: Option<u64>,
    /// Seed for random Vaughan weights.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// `key = value` file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Counts of R(f) = gamma over irreducible f of degree n.
    Distribution {
        #[arg(long)]
        n: usize,
    },
    /// Relative deviation of the distribution for each n.
    Trend {
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Run the verification matrix.
    Verify {
        /// star|lin-red|tau|tau-moment|gauss|rank-qa|rank-bab|vaughan|distribution|nf|all
        #[arg(long)]
        lemma: Option<String>,
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        /// Exponent slack for the reported tau growth term.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Type I / type II sums for psi(R).
    Sigma {
        #[arg(value_enum)]
        which: Which,
        #[arg(long)]
        n: usize,
        /// Defaults to the (u, v) choice for n.
        #[arg(long, requires = "v")]
        u: Option<usize>,
        #[arg(long, requires = "u")]
        v: Option<usize>,
        /// Character parameter beta, as an element string.
        #[arg(long, default_value = "1")]
        beta: String,
    },
    /// Number of a of degree n with a* a = f.
    NfCount {
        #[arg(long)]
        n: usize,
        /// Single target f (coefficients, constant first); all f otherwise.
        #[arg(long)]
        f: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Which {
    Sigma1,
    Sigma2,
}

/// Flags over file over defaults.
fn resolve(global: &Global, command: &Command) -> anyhow::Result<RunConfig> {
    let file = match &global.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let d = RunConfig::default();
    let mut c = RunConfig {
        p: global.p.or(file.get("p")?).unwrap_or(d.p),
        e: global.e.or(file.get("e")?).unwrap_or(d.e),
        modulus: match global.modulus.clone().or(file.get("modulus")?) {
            Some(s) => Some(parse_residues(&s)?),
            None => None,
        },
        format: match global.format {
            Some(Format::Json) => OutputFormat::Json,
            Some(Format::Csv) => OutputFormat::Csv,
            None => file.get("format")?.unwrap_or(d.format),
        },
        jobs: global.jobs.or(file.get("jobs")?),
        cap: global.cap.or(file.get("cap")?).unwrap_or(d.cap),
        seed: global.seed.or(file.get("seed")?).unwrap_or(d.seed),
        n_min: file.get("n_min")?.unwrap_or(d.n_min),
        n_max: file.get("n_max")?.unwrap_or(d.n_max),
        lemma: file.get("lemma")?.unwrap_or(d.lemma),
        epsilon: file.get("epsilon")?.unwrap_or(d.epsilon),
    };
    match command {
        Command::Trend { n_min, n_max } => {
            c.n_min = n_min.unwrap_or(c.n_min.max(2));
            c.n_max = n_max.unwrap_or(c.n_max);
        }
        Command::Verify { lemma, n_min, n_max, epsilon } => {
            if let Some(l) = lemma {
                c.lemma = l.parse()?;
            }
            c.n_min = n_min.unwrap_or(c.n_min);
            c.n_max = n_max.unwrap_or(c.n_max);
            c.epsilon = epsilon.unwrap_or(c.epsilon);
        }
        _ => {}
    }
    c.validate()?;
    Ok(c)
}

fn emit_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn emit_csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn emit<T: Serialize>(format: OutputFormat, rows: &[T]) -> anyhow::Result<()> {
    match format {
        OutputFormat::Json => emit_json(&rows),
        OutputFormat::Csv => emit_csv(rows),
    }
}

/// `Ok(true)` when every check passed.
fn run(cli: Cli) -> anyhow::Result<bool> {
    let config = resolve(&cli.global, &cli.command)?;
    if let Some(jobs) = config.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().context("building thread pool")?;
    }
    let field = config.field()?;
    match cli.command {
        Command::Distribution { n } => {
            let table = distribution(&field, n, config.cap)?;
            match config.format {
                OutputFormat::Json => emit_json(&table)?,
                OutputFormat::Csv => print!("{}", table.to_csv()?),
            }
            Ok(table.invariants_hold())
        }
        Command::Trend { .. } => {
            let rows = deviation_trend(&field, config.n_min, config.n_max, config.cap)?;
            emit(config.format, &rows)?;
            Ok(rows.iter().all(|r| r.invariants_ok))
        }
        Command::Verify { .. } => {
            let report = verify_all(&config)?;
            match config.format {
                OutputFormat::Json => emit_json(&report)?,
                OutputFormat::Csv => emit_csv(&report.cells)?,
            }
            Ok(report.pass)
        }
        Command::Sigma { which, n, u, v, beta } => {
            let (u, v) = match (u, v) {
                (Some(u), Some(v)) => (u, v),
                _ => default_uv(n)?,
            };
            let params = VaughanParams::new(n, u, v)?;
            let chi = CharSpec::new(&field, field.parse_element(&beta)?);
            let rep = match which {
                Which::Sigma1 => sigma1(&field, &params, &chi, config.cap)?,
                Which::Sigma2 => sigma2(&field, &params, &chi, config.cap)?,
            };
            emit(config.format, &[rep])?;
            Ok(true)
        }
        Command::NfCount { n, f } => {
            let reports = match f {
                Some(text) => vec![count_reversal_solutions(&Poly::parse(&text, &field)?, n, &field, config.cap)?],
                None => scan_reversal_counts(&field, n, config.cap)?,
            };
            emit(config.format, &reports)?;
            Ok(reports.iter().all(|r| r.pass))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

