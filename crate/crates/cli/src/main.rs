use acqudit_core::run::{kernels_to_dir, run_to_dir, CellOutcome};
use acqudit_core::{validate, Error, RunConfig};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "acqudit", version, about = "Optimal impurity transport through a phonon bath")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides solver.tol from the config.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Built-in invariant checks.
    Validate {
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Single t_f from grid.t_f (any sweep list is ignored).
    Solve(RunArgs),
    /// Every t_f in the config's sweep list.
    Sweep(RunArgs),
    /// Like sweep, also prints the comparison table.
    Compare(RunArgs),
    /// Dump kernels and matrix-element tables.
    Kernels(RunArgs),
}

fn load(args: &RunArgs) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(tol) = args.tol {
        cfg.solver.tol = tol;
        cfg.validate()?;
    }
    Ok(cfg)
}

fn print_cells(cells: &[CellOutcome]) {
    println!("{:>10} {:>12} {:>12} {:>12} {:>9} {:>8}", "t_f", "P_opt", "P_const", "P_cdf", "adiabatic", "speed_ok");
    for c in cells {
        println!(
            "{:>10.4} {:>12.8} {:>12.8} {:>12.8} {:>9} {:>8}",
            c.t_f, c.result.survival, c.survival_const, c.survival_cdf, c.adiabatic, c.speed_ok
        );
    }
}

fn dispatch(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Validate { tol } => {
            let checks = validate::run_suite(tol)?;
            let mut failed = 0;
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                failed += usize::from(!c.passed);
            }
            if failed > 0 {
                return Err(Error::Domain(format!("{failed} validation checks failed")));
            }
        }
        Command::Solve(args) => {
            let mut cfg = load(&args)?;
            cfg.sweep = None;
            let cells = run_to_dir("solve", &cfg, &args.out)?;
            print_cells(&cells);
        }
        Command::Sweep(args) => {
            let cfg = load(&args)?;
            if cfg.sweep.is_none() {
                return Err(Error::config("sweep", "sweep needs a list of t_f values"));
            }
            run_to_dir("sweep", &cfg, &args.out)?;
        }
        Command::Compare(args) => {
            let cfg = load(&args)?;
            let cells = run_to_dir("compare", &cfg, &args.out)?;
            print_cells(&cells);
        }
        Command::Kernels(args) => {
            let cfg = load(&args)?;
            kernels_to_dir(&cfg, &args.out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(1);
        }
    }
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
