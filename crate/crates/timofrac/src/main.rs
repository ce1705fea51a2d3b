use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use timofrac::commands;
use timofrac::config::load_config;
use timofrac::error::Result;
use timofrac::output::{CheckRow, Outcome};
use timofrac::selftest::{selftest, SelftestOptions};
use timofrac_core::fraccalc::{mittag_leffler2, DEFAULT_TERM_BUDGET};

/// Fractional Timoshenko beam simulator with energy-estimate verification.
#[derive(Debug, Parser)]
#[command(name = "timofrac", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the configured scenario, check it and write CSV traces.
    Run { config: PathBuf },
    /// Spatial and temporal refinement study against the exact solution.
    Converge {
        config: PathBuf,
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// A priori estimates over the zero, manufactured and random cases.
    VerifyEnergy { config: PathBuf },
    /// Continuous dependence over seeded perturbation directions.
    Perturb { config: PathBuf },
    /// Evaluate the Mittag-Leffler function E_{beta,mu}(x).
    Mlf {
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
    },
    /// Built-in oracle, Gronwall and identity checks.
    Selftest {
        /// Term budget of the Mittag-Leffler series (negative control).
        #[arg(long, default_value_t = DEFAULT_TERM_BUDGET)]
        ml_term_budget: usize,
        /// Disable the constraint projection (negative control).
        #[arg(long)]
        no_projection: bool,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

fn cell(v: Option<f64>) -> String {
    v.map(|v| format!("{v:e}")).unwrap_or_default()
}

fn print_rows(o: &Outcome) {
    println!("check,lhs,rhs,ratio,pass");
    for r in &o.rows {
        let pass = match r.pass {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "",
        };
        println!("{},{},{},{},{pass}", r.check, cell(r.lhs), cell(r.rhs), cell(r.ratio));
    }
}

fn summarize(o: &Outcome) -> i32 {
    let failed: Vec<&CheckRow> = o.failures().collect();
    if failed.is_empty() {
        eprintln!("all checks passed");
    } else {
        for r in failed {
            eprintln!("FAIL: {}", r.check);
        }
    }
    o.exit_code()
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run { config } => {
            let cfg = load_config(&config)?;
            let o = commands::run(&cfg)?;
            print_rows(&o);
            eprintln!("traces written to {}", cfg.output_dir.display());
            Ok(summarize(&o))
        }
        Command::Converge { config, levels } => {
            let cfg = load_config(&config)?;
            let s = commands::converge(&cfg, levels)?;
            println!("level,dx,dt,err_theta,err_phi,order_x,order_t");
            for r in &s.rows {
                println!(
                    "{},{:e},{:e},{:e},{:e},{},{}",
                    r.level,
                    r.dx,
                    r.dt,
                    r.err_theta,
                    r.err_phi,
                    cell(r.order_x),
                    cell(r.order_t)
                );
            }
            Ok(summarize(&s.outcome))
        }
        Command::VerifyEnergy { config } => {
            let cfg = load_config(&config)?;
            let o = commands::verify_energy(&cfg)?;
            print_rows(&o);
            Ok(summarize(&o))
        }
        Command::Perturb { config } => {
            let cfg = load_config(&config)?;
            let o = commands::perturb(&cfg)?;
            print_rows(&o);
            Ok(summarize(&o))
        }
        Command::Mlf { beta, mu, x } => {
            let v = mittag_leffler2(beta, mu, x)?;
            println!("{v:.17e}");
            Ok(0)
        }
        Command::Selftest {
            ml_term_budget,
            no_projection,
            seed,
        } => {
            let o = selftest(SelftestOptions {
                ml_term_budget,
                project: !no_projection,
                gronwall_seed: seed,
                ..SelftestOptions::default()
            })?;
            print_rows(&o);
            Ok(summarize(&o))
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
