//! `nfield`: experiment runner for the neural-field MacKay pipeline.

mod config;
mod experiments;
mod manifest;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use config::{ExperimentConfig, RawConfig};
use neurofield::kernel::{constants, DogParams};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "nfield",
    version,
    about = "Neural-field simulation: stationary states, residue-series kernels, retinal figures, exact controls"
)]
struct Cli {
    /// Number of worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a config file.
    Run {
        /// Path to a key = value config file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory for artifacts and the manifest.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override a config entry: section.key=value (repeatable).
        #[arg(long = "override", value_name = "SECTION.KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run a verification suite and write a CSV report.
    Verify {
        /// Suite: kernels, analytic, dynamics, control, symmetry, figures, all.
        suite: String,
        /// Output directory for the report (and zero-table CSVs).
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Print version, defaults and the canonical kernel constants.
    Info,
}

fn init_threads(threads: usize) {
    if threads > 0 {
        // ignore failure when a pool already exists (e.g. repeated init)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    init_threads(cli.threads);

    match cli.command {
        Command::Run {
            config,
            out,
            overrides,
        } => {
            let mut raw = match &config {
                Some(path) => RawConfig::load(path)?,
                None => RawConfig::parse("")?,
            };
            for o in &overrides {
                raw.apply_override(o)?;
            }
            let cfg = ExperimentConfig::resolve(raw)?;
            let manifest = experiments::run(&cfg, &out)
                .with_context(|| format!("experiment {}", cfg.kind.name()))?;
            println!(
                "{}: ok in {:.1}s, {} artifacts -> {}",
                cfg.kind.name(),
                manifest.wall_seconds,
                manifest.artifacts.len(),
                out.display()
            );
            Ok(())
        }
        Command::Verify { suite, out } => run_verify(&suite, &out),
        Command::Info => {
            println!("nfield {}", env!("CARGO_PKG_VERSION"));
            let p = DogParams::canonical();
            let c = constants(&p).unwrap();
            println!(
                "canonical kernel: kappa=1, sigma1={:.12}, sigma2={:.12}",
                p.sigma1(),
                p.sigma2()
            );
            println!(
                "constants: mu_0={:.12}, mu_c={:.12}, q_c={:.12}, ||omega||_1={:.12}",
                c.mu_0, c.mu_c, c.q_c, c.l1_norm
            );
            println!("grid default: L=10, n=2000 (dx=0.01); solver tol 1e-10, cap 500");
            println!("threads: {}", rayon::current_num_threads());
            Ok(())
        }
    }
}

fn run_verify(suite: &str, out: &std::path::Path) -> Result<()> {
    use neurofield::verify;
    std::fs::create_dir_all(out)?;
    let results = if suite == "all" {
        verify::run_all()
    } else {
        let r = verify::run_suite(suite);
        if r.is_empty() {
            bail!(
                "unknown suite {suite:?}; expected one of {:?} or all",
                verify::suite_names()
            );
        }
        r
    };

    let mut csv = String::from("id,name,pass,seconds,detail\n");
    for r in &results {
        println!("{}", r.line());
        csv.push_str(&format!(
            "{},{},{},{:.3},\"{}\"\n",
            r.id,
            r.name,
            r.pass,
            r.seconds,
            r.detail.replace('"', "'")
        ));
    }
    let report = out.join(format!("verify_{suite}.csv"));
    std::fs::write(&report, csv)?;

    // the analytic suite also exports the zero tables it certified
    if suite == "analytic" || suite == "all" {
        use neurofield::analytic::{locate_zeros, SeriesKind};
        let tk = locate_zeros(SeriesKind::K, 20).map_err(|e| anyhow::anyhow!("{e}"))?;
        let tb = locate_zeros(SeriesKind::BHeaviside, 20).map_err(|e| anyhow::anyhow!("{e}"))?;
        std::fs::write(out.join("kernel_zeros.csv"), tk.to_csv())?;
        std::fs::write(out.join("heaviside_zeros.csv"), tb.to_csv())?;
    }

    let failed: Vec<&str> = results.iter().filter(|r| !r.pass).map(|r| r.name).collect();
    if !failed.is_empty() {
        bail!("failed criteria: {}", failed.join(", "));
    }
    println!("report -> {}", report.display());
    Ok(())
}
