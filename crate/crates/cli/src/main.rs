use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use workbench_cli::grid::{ehae_check, genus2, hae_check, CheckOutcome};
use workbench_cli::pipeline::{resolve_output, MANIFEST_FILE};
use workbench_cli::{report, run_pipeline, WorkbenchConfig, WorkbenchError};

#[derive(Parser)]
#[command(name = "workbench", version, about = "Periods, mirror maps and anomaly checks for one-parameter families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on a family config.
    Run {
        config: PathBuf,
        /// Truncation order N.
        #[arg(long)]
        order: Option<u32>,
        #[arg(long)]
        precision_bits: Option<u32>,
        /// Relative tolerance of the finite-difference curvature check.
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long, env = "WORKBENCH_OUT")]
        out: Option<PathBuf>,
    },
    /// Print the tables of a finished run.
    Report { manifest: PathBuf },
    /// Holomorphic anomaly residual on a sampled grid.
    HaeCheck {
        grid: PathBuf,
        #[arg(long, default_value_t = 2)]
        genus: u32,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
    },
    /// Extended anomaly residual with open-string data.
    EhaeCheck {
        grid: PathBuf,
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        holes: u32,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
    },
    /// Integrate F_2 from F_1 and a propagator.
    Genus2 {
        grid: PathBuf,
        #[arg(long)]
        propagator: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
        #[arg(long, env = "WORKBENCH_OUT")]
        out: Option<PathBuf>,
    },
}

fn print_check(name: &str, c: &CheckOutcome) {
    println!(
        "{name}: max {:e} mean {:e} tolerance {:e} -> {}",
        c.max,
        c.mean,
        c.tolerance,
        if c.passed() { "pass" } else { "FAIL" }
    );
}

fn run(cli: Cli) -> Result<(), WorkbenchError> {
    match cli.command {
        Command::Run {
            config,
            order,
            precision_bits,
            tolerance,
            out,
        } => {
            let mut cfg = WorkbenchConfig::load(&config)?;
            if let Some(n) = order {
                cfg.order = n;
            }
            if let Some(p) = precision_bits {
                cfg.precision_bits = p;
            }
            if let Some(t) = tolerance {
                cfg.tolerances.fd_relative = t;
            }
            let dir = resolve_output(out, &cfg);
            let manifest = run_pipeline(&cfg, &dir)?;
            for s in &manifest.stages {
                println!("{:<18} {:>9.3}s", s.stage, s.seconds);
            }
            println!("manifest {}", dir.join(MANIFEST_FILE).display());
        }
        Command::Report { manifest } => print!("{}", report(&manifest)?),
        Command::HaeCheck { grid, genus, tolerance } => {
            let c = hae_check(&grid, genus, tolerance)?;
            print_check("hae", &c);
            c.into_result("hae-check")?;
        }
        Command::EhaeCheck {
            grid,
            genus,
            holes,
            tolerance,
        } => {
            let c = ehae_check(&grid, genus, holes, tolerance)?;
            print_check("ehae", &c);
            c.into_result("ehae-check")?;
        }
        Command::Genus2 {
            grid,
            propagator,
            tolerance,
            out,
        } => {
            let dir = out.unwrap_or_else(|| PathBuf::from("workbench-out"));
            let target = dir.join("genus2_grid.json");
            let c = genus2(&grid, &propagator, tolerance, &target)?;
            print_check("genus2 hae", &c);
            println!("wrote {}", target.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
