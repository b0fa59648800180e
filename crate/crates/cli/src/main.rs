use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use locstab_cli::{parse_range, plot, scans, CliError, Config, Overrides};

#[derive(Parser)]
#[command(name = "locstab", version, about = "Verification suites and scans for local stability numerics")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Base RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Slack for inequality fuzz checks.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Largest Hilbert-space dimension a scan may build.
    #[arg(long = "cap-dim", global = true)]
    cap_dim: Option<usize>,
    /// key=value file with seed, tol, out, cap-dim. Flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a verification suite and write results.json.
    Verify { suite: String },
    /// Parameter scans.
    #[command(subcommand)]
    Scan(Scan),
    /// List the fixture registry.
    Fixtures,
    /// Convert a scan CSV into a gnuplot data file.
    PlotData {
        csv: PathBuf,
        /// Columns to keep, comma separated.
        #[arg(long, value_delimiter = ',')]
        columns: Vec<String>,
        /// Columns to add as log10.
        #[arg(long, value_delimiter = ',')]
        log: Vec<String>,
    },
}

#[derive(Subcommand)]
enum Scan {
    /// Correlation and CMI decay of Gibbs chains.
    Gibbs {
        #[arg(long, default_value = "0.1:2.0:0.1")]
        beta: String,
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// tfim or ising.
        #[arg(long, default_value = "tfim")]
        model: String,
    },
    /// Recovery error against radius.
    Stability {
        #[arg(long, default_value = "0.3")]
        beta: String,
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
    /// Davies relaxation and recovery depth.
    Lindblad {
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        j: f64,
        #[arg(long, default_value_t = 0.5)]
        h: f64,
        #[arg(long, default_value_t = 10.0)]
        tmax: f64,
        #[arg(long, default_value_t = 12)]
        mmax: usize,
    },
}

fn config(c: &Common) -> Result<Config, CliError> {
    let file = match &c.config {
        Some(p) => Overrides::from_file(p)?,
        None => Overrides::default(),
    };
    let flags = Overrides {
        seed: c.seed,
        tol: c.tol,
        out: c.out.clone(),
        cap_dim: c.cap_dim,
    };
    Ok(flags.resolve(&file))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let cfg = config(&cli.common)?;
    match cli.cmd {
        Cmd::Verify { suite } => {
            let res = locstab_cli::run_suite(&suite, &cfg)?;
            for c in &res.checks {
                println!(
                    "{} {:<28} measured {:<12.6e} expected {:<12.6e} tol {:.0e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.id,
                    c.measured,
                    c.expected,
                    c.tol
                );
            }
            println!(
                "{}: {}/{} checks passed in {:.2}s; wrote {}",
                res.suite,
                res.checks.len() - res.failed().len(),
                res.checks.len(),
                res.wall_time.as_secs_f64(),
                cfg.out.join("results.json").display()
            );
            Ok(res.pass)
        }
        Cmd::Scan(s) => {
            let out = match s {
                Scan::Gibbs { beta, n, model } => scans::gibbs(&model, n, &parse_range(&beta)?, &cfg)?,
                Scan::Stability { beta, n } => scans::stability(n, &parse_range(&beta)?, &cfg)?,
                Scan::Lindblad { beta, n, j, h, tmax, mmax } => scans::lindblad(n, j, h, beta, tmax, mmax, &cfg)?,
            };
            out.write(&cfg)?;
            println!("{}", out.summary);
            for (f, _) in &out.files {
                println!("wrote {}", cfg.out.join(f).display());
            }
            Ok(true)
        }
        Cmd::Fixtures => {
            println!("{:<24} {:>3} {:>6} {:<12} description", "name", "n", "beta", "dims");
            for f in locstab::models::fixture_registry() {
                println!(
                    "{:<24} {:>3} {:>6} {:<12} {}",
                    f.name,
                    f.n,
                    f.beta.map_or("-".into(), |b| b.to_string()),
                    format!("{:?}", f.dims),
                    f.provenance
                );
            }
            Ok(true)
        }
        Cmd::PlotData { csv, columns, log } => {
            let text = std::fs::read_to_string(&csv).map_err(|_| CliError::ParseFailure(csv.display().to_string()))?;
            let data = plot::plot_data(&text, &columns, &log)?;
            let path = cfg.out.join(csv.with_extension("dat").file_name().unwrap_or_default());
            locstab_cli::write_file(&path, &data)?;
            println!("wrote {}", path.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = std::env::var("LOCSTAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
