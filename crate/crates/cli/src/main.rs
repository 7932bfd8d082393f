use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pir_lattice::channel::ChannelRealization;
use pir_lattice::harness::{
    fading_sweep, gap_scan, plot_results, rates_table, run_experiment, run_identity_suite,
    write_csv, ExperimentConfig, ExperimentResult, HarnessError, RateRow,
};
use pir_lattice::privacy::{verify_privacy_exact, MAX_ENUMERATION};

/// Coefficient pairs checked by `privacy-check` besides the non-fading rule.
const PRIVACY_COEFFICIENTS: [[i64; 2]; 3] = [[1, 1], [2, 3], [-1, 2]];

#[derive(Parser)]
#[command(
    name = "pir-lattice",
    version,
    about = "Lattice-coded PIR over the Gaussian MAC"
)]
struct Cli {
    /// Worker threads for Monte Carlo runs (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config and write result.json.
    Simulate {
        config: PathBuf,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Print (or write) the rate and gap table as CSV.
    Rates {
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
        /// Comma-separated transmit powers.
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 10.0, 100.0])]
        powers: Vec<f64>,
        /// CSV file to write instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the gap bound on N = 2..20 and 50 log-spaced powers in [0.01, 100].
    GapScan {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized checks of the modulo-lattice identities and the reference counterexample.
    VerifyIdentities {
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact check that each server's query law does not depend on the index.
    PrivacyCheck {
        #[arg(long, default_value_t = 10)]
        m_max: usize,
    },
    /// Draw SVG figures from result files.
    Plot {
        #[arg(required = true)]
        results: Vec<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Best partitions and coefficient pairs for a fixed set of fading gains.
    FadingSweep {
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        gains: Vec<f64>,
        #[arg(long)]
        power: f64,
        #[arg(long, default_value_t = 3)]
        a_max: i64,
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
}

/// Outcome of a subcommand: `Ok(true)` passes, `Ok(false)` is a failed check.
type Outcome = Result<bool, HarnessError>;

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn emit_csv(rows: &[RateRow], out: Option<&Path>) -> Result<(), HarnessError> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(io_err(path))?;
            write_csv(rows, BufWriter::new(file))
        }
        None => write_csv(rows, io::stdout().lock()),
    }
}

fn simulate(config: &Path, out: &Path) -> Outcome {
    let cfg = ExperimentConfig::load(config)?;
    let result = run_experiment(&cfg)?;
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    let path = out.join("result.json");
    result.save(&path)?;
    println!(
        "rounds={} block_errors={} block_error_rate={:.6} sigma_eq={:.6} (analytic {:.6}) wall_time={:.3}s",
        result.rounds,
        result.block_errors,
        result.block_error_rate,
        result.empirical_sigma_eq,
        result.analytic_sigma_eq,
        result.wall_time_secs
    );
    println!("wrote {}", path.display());
    Ok(true)
}

fn verify_identities(trials: usize, seed: u64) -> Outcome {
    let report = run_identity_suite(trials, seed)?;
    for s in &report.identities {
        println!(
            "{:<14} trials={} failures={}",
            s.kind.name(),
            s.trials,
            s.failures
        );
        if let Some(f) = &s.first_failure {
            println!("  first failure: lhs={:?} rhs={:?}", f.lhs, f.rhs);
        }
    }
    println!("{}", report.counterexample.line());
    Ok(report.passed())
}

fn privacy_check(m_max: usize) -> Outcome {
    if m_max == 0 || m_max > MAX_ENUMERATION {
        return Err(HarnessError::Config {
            field: "m_max",
            message: format!("must be in 1..={MAX_ENUMERATION}, got {m_max}"),
        });
    }
    let mut all = true;
    for m in 1..=m_max {
        let mut row = vec![("nonfading".to_string(), verify_privacy_exact(m, None)?)];
        for a in PRIVACY_COEFFICIENTS {
            row.push((
                format!("a=({},{})", a[0], a[1]),
                verify_privacy_exact(m, Some(a))?,
            ));
        }
        let ok = row.iter().all(|(_, ok)| *ok);
        all &= ok;
        let detail: Vec<String> = row
            .iter()
            .map(|(name, ok)| format!("{name}:{}", if *ok { "ok" } else { "FAIL" }))
            .collect();
        println!("M={m:<2} {}", detail.join(" "));
    }
    println!("{}", if all { "PASS" } else { "FAIL" });
    Ok(all)
}

fn plot(results: &[PathBuf], out: &Path) -> Outcome {
    let loaded = results
        .iter()
        .map(|p| ExperimentResult::load(p))
        .collect::<Result<Vec<_>, _>>()?;
    for path in plot_results(&loaded, out)? {
        println!("wrote {}", path.display());
    }
    Ok(true)
}

fn sweep(gains: Vec<f64>, power: f64, a_max: i64, top: usize) -> Outcome {
    let channel = ChannelRealization::with_gains(gains)?;
    let rows = fading_sweep(&channel, power, a_max, top)?;
    let mut out = io::stdout().lock();
    let write = |out: &mut io::StdoutLock<'_>| -> io::Result<()> {
        writeln!(out, "rate,first,second,a1,a2,h1,h2")?;
        for r in &rows {
            let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.rate,
                join(&r.first),
                join(&r.second),
                r.coefficients[0],
                r.coefficients[1],
                r.effective_gains[0],
                r.effective_gains[1]
            )?;
        }
        Ok(())
    };
    write(&mut out).map_err(io_err(Path::new("<stdout>")))?;
    Ok(true)
}

fn run(cli: Cli) -> Outcome {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| HarnessError::Config {
                field: "threads",
                message: e.to_string(),
            })?;
    }
    match cli.command {
        Command::Simulate { config, out } => simulate(&config, &out),
        Command::Rates {
            n_min,
            n_max,
            powers,
            out,
        } => {
            emit_csv(&rates_table(n_min..=n_max, &powers)?, out.as_deref())?;
            Ok(true)
        }
        Command::GapScan { out } => {
            let rows = gap_scan()?;
            emit_csv(&rows, out.as_deref())?;
            let failures = rows.iter().filter(|r| !r.ok).count();
            eprintln!("{} rows, {} outside the bound", rows.len(), failures);
            Ok(failures == 0)
        }
        Command::VerifyIdentities { trials, seed } => verify_identities(trials, seed),
        Command::PrivacyCheck { m_max } => privacy_check(m_max),
        Command::Plot { results, out } => plot(&results, &out),
        Command::FadingSweep {
            gains,
            power,
            a_max,
            top,
        } => sweep(gains, power, a_max, top),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
