use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use condensate_linear::acceptance::selftest;
use condensate_linear::config::RunConfig;
use condensate_linear::output::to_json;
use condensate_linear::pipeline::{
    report_exit_code, run_analyze, run_evolve, run_gamma, run_operator, run_reconstruct, run_scan, summary_json,
};
use condensate_linear::{Error, Result};

#[derive(Parser)]
#[command(name = "condensate", version, about = "Linearized condensate/phonon kinetics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for the random test vectors of `selftest`.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the damping function on the grid.
    Gamma,
    /// Assemble the linearized operator and report its structure.
    Operator,
    /// Evolve the initial data in the decoupled time τ.
    Evolve,
    /// Map back to physical time and reconstruct m_c(t).
    Reconstruct,
    /// Full run: asymptotic state, decay fits and every output file.
    Analyze,
    /// Scan m_c0 for the admissibility threshold.
    ScanDepletion,
    /// Run the acceptance suite twice and compare the outputs.
    Selftest,
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::config("--config", "this command needs a configuration file"))?;
    let cfg = RunConfig::load(path)?;
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<i32> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::config("--threads", e.to_string()))?;
    }
    let out = cli.out.as_deref();
    match cli.command {
        Command::Gamma => {
            let t = run_gamma(&load(cli)?, out)?;
            println!("{} values, converged: {}", t.values.len(), t.converged);
        }
        Command::Operator => print!("{}", to_json(&run_operator(&load(cli)?, out)?)),
        Command::Evolve => {
            let r = run_evolve(&load(cli)?, out)?;
            println!("{} τ samples, {} sectors", r.tau.len(), r.series.len());
        }
        Command::Reconstruct => {
            let r = run_reconstruct(&load(cli)?, out)?;
            print!("{}", to_json(&summary_json(&r)));
            return Ok(report_exit_code(&r));
        }
        Command::Analyze => {
            let a = run_analyze(&load(cli)?, out)?;
            print!("{}", to_json(&a.analysis));
            return Ok(report_exit_code(&a.report));
        }
        Command::ScanDepletion => {
            let s = run_scan(&load(cli)?, out)?;
            println!("m_c0,verdict,margin_or_tau_star");
            for r in &s.rows {
                let v = if r.admissible { "admissible" } else { "breakdown" };
                println!("{},{v},{}", r.m_c0, r.margin_or_tau_star);
            }
            match s.threshold {
                Some(t) => println!("threshold m_c0* = {t:.9} (sup g = {:.9})", s.sup_g),
                None => println!("every m_c0 > 0 is admissible"),
            }
        }
        Command::Selftest => {
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("selftest-out"));
            let checks = selftest(cli.seed, &dir)?;
            for c in &checks {
                println!("{}", c.line());
            }
            let failed = checks.iter().filter(|c| !c.pass).count();
            println!("{} of {} criteria pass; outputs in {}", checks.len() - failed, checks.len(), dir.display());
            return Ok(if failed == 0 { 0 } else { 1 });
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
