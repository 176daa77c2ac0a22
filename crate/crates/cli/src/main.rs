use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hua_core::campaign::{
    merge, run_campaign, CampaignConfig, CampaignError, Suite, VerificationReport,
};
use hua_core::domains::DomainSpec;

/// Reproducible verification campaigns for Hua operators on classical domains.
#[derive(Parser)]
#[command(name = "hua-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: VerifySuite,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run a demonstration campaign.
    Demo {
        #[arg(value_enum)]
        which: Demo,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Operate on saved JSON reports.
    Report {
        #[command(subcommand)]
        action: ReportAction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifySuite {
    Kernel,
    Hypergeom,
    Dirichlet,
    Embeddings,
}

#[derive(Clone, Copy, ValueEnum)]
enum Demo {
    Counterexample,
}

#[derive(Subcommand)]
enum ReportAction {
    /// Merge several JSON reports into one.
    Merge {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        output: OutputOpts,
    },
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    Json,
    #[default]
    Text,
}

#[derive(Args)]
struct OutputOpts {
    /// Write the JSON report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Format of the report printed to stdout.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct RunOpts {
    /// Domain, e.g. `I:2,3`, `II:2`, `III:4`, `IV:2`.
    #[arg(long)]
    domain: Option<DomainSpec>,
    /// Number of sample points.
    #[arg(long)]
    points: Option<usize>,
    /// Seed for every random draw of the campaign.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tolerance replacing the default of every upper-bound check.
    #[arg(long)]
    tol: Option<f64>,
    /// Monte-Carlo samples per Poisson estimate.
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    output: OutputOpts,
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("HUA_LAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("HUA_LAB_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn emit(report: &VerificationReport, output: &OutputOpts) -> Result<(), String> {
    if let Some(path) = &output.out {
        std::fs::write(path, report.to_json() + "\n")
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    match output.format {
        Format::Json => println!("{}", report.to_json()),
        Format::Text => print!("{}", report.to_text()),
    }
    Ok(())
}

fn run(suite: Suite, opts: &RunOpts) -> Result<VerificationReport, CampaignError> {
    let config = CampaignConfig {
        suite,
        domain: opts.domain,
        points: opts.points,
        seed: opts.seed,
        tol: opts.tol,
        samples: opts.samples,
    };
    run_campaign(&config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let (report, output) = match &cli.command {
        Command::Verify { suite, opts } => {
            let suite = match suite {
                VerifySuite::Kernel => Suite::Kernel,
                VerifySuite::Hypergeom => Suite::Hypergeom,
                VerifySuite::Dirichlet => Suite::Dirichlet,
                VerifySuite::Embeddings => Suite::Embeddings,
            };
            (run(suite, opts), &opts.output)
        }
        Command::Demo {
            which: Demo::Counterexample,
            opts,
        } => (run(Suite::Counterexample, opts), &opts.output),
        Command::Report {
            action: ReportAction::Merge { inputs, output },
        } => {
            let reports: Result<Vec<_>, _> = inputs
                .iter()
                .map(|p| {
                    std::fs::read_to_string(p)
                        .map_err(|e| {
                            CampaignError::Config(format!("cannot read {}: {e}", p.display()))
                        })
                        .and_then(|s| VerificationReport::from_json(&s))
                })
                .collect();
            (reports.map(|r| merge(&r)), output)
        }
    };
    let report = match report {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&report, output) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
