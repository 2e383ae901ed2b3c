use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use urbgk::config::{ConfigOverrides, RunConfig};
use urbgk::io::{self, ConvergenceTable, Profile, Quantity};
use urbgk::problems::{problem, PROBLEM_NAMES};
use urbgk::solver::Simulation;
use urbgk::Error;

#[derive(Parser)]
#[command(name = "urbgk", version, about = "Ultra-relativistic kinetic finite-volume solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one problem to its end time.
    Run {
        /// TOML file with the same keys as the flags.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        flags: ConfigOverrides,
    },
    /// Run a problem at several resolutions and print the error table of n.
    Convergence {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Cell counts, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        resolutions: Vec<usize>,
        #[command(flatten)]
        flags: ConfigOverrides,
    },
    /// Write the exact solution of a problem sampled at cell centres.
    RiemannExact {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        nx: Option<usize>,
        #[arg(long)]
        ny: Option<usize>,
        /// Sample time; the problem's end time by default.
        #[arg(long)]
        t: Option<f64>,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report the differences between two profile files.
    Compare { a: PathBuf, b: PathBuf },
    /// List the built-in problems.
    Problems,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonPhysicalState { .. } => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config, flags } => {
            let cfg = RunConfig::resolve(config.as_deref(), flags)?;
            let outcome = io::execute(&cfg)?;
            let m = &outcome.manifest;
            println!("{} finished at t = {} after {} steps", cfg.problem, m.final_time, m.steps);
            println!("conservation drift {:?}", m.conservation_drift);
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            if let Ok(n) = io::solution_norms(&outcome.simulation, Quantity::Density) {
                println!("n error l1 = {:.6e}, l2 = {:.6e}", n.l1, n.l2);
            }
        }
        Command::Convergence { config, resolutions, flags } => {
            let mut rows = Vec::new();
            for &nx in &resolutions {
                let flags = ConfigOverrides { nx: Some(nx), ny: None, out: None, ..flags.clone() };
                let cfg = RunConfig::resolve(config.as_deref(), flags)?;
                let mut sim = Simulation::new(cfg.problem()?, cfg.solver, cfg.mode)?;
                sim.advance_to(cfg.t_end)?;
                rows.push((nx, io::solution_norms(&sim, Quantity::Density)?));
            }
            print!("{}", ConvergenceTable::new(&rows));
        }
        Command::RiemannExact { problem: name, nx, ny, t, out } => {
            let p = problem(&name)?;
            let nx = nx.unwrap_or(p.grid.nx);
            let p = p.with_resolution(nx, ny);
            let t = t.unwrap_or(p.t_end);
            let cells = io::exact_cells(&p, t)?;
            match out {
                Some(path) => {
                    io::write_profile(&path, &p.grid, &cells)?;
                    println!("wrote {}", path.display());
                }
                None => io::write_profile_to(std::io::stdout().lock(), &p.grid, &cells)
                    .map_err(|source| Error::Io { path: "<stdout>".into(), source })?,
            }
        }
        Command::Compare { a, b } => {
            let (pa, pb) = (Profile::read(&a)?, Profile::read(&b)?);
            println!("{:>6}  {:>12}  {:>12}", "column", "l1", "l2");
            for (name, n) in io::compare_profiles(&pa, &pb)? {
                println!("{name:>6}  {:>12.6e}  {:>12.6e}", n.l1, n.l2);
            }
        }
        Command::Problems => {
            for name in PROBLEM_NAMES {
                println!("{name}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_physical_states_exit_with_two() {
        assert_eq!(exit_code(&Error::NonPhysicalState { cell: Some((3, 0)), reason: "negative pressure".into() }), 2);
        assert_eq!(exit_code(&Error::Config("bad".into())), 1);
    }
}
