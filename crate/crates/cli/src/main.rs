mod args;
mod commands;
mod failure;
mod output;

use clap::Parser;

use args::{Cli, Command};
use failure::Failure;

/// Caps rayon's pool from `CHAINFORGE_THREADS`.
fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("CHAINFORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("CHAINFORGE_THREADS={v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    configure_threads()?;
    let g = &cli.global;
    match &cli.command {
        Command::Extend {
            problem,
            backend,
            precision,
            report,
        } => commands::extend(g, problem, *backend, *precision, report.as_deref()),
        Command::Spectrum { chain } => commands::spectrum(g, chain),
        Command::Sweep { chain, regions } => commands::sweep(g, chain, regions),
        Command::Encode {
            chain,
            regions,
            time,
            offset,
        } => commands::encode(g, chain, regions, time, *offset),
        Command::Bounds { n, p } => commands::bounds_cmd(g, n, *p),
        Command::Create {
            chain,
            bulk,
            output,
            time,
            target,
        } => commands::create(g, chain, bulk, output, time, target.as_deref()),
        Command::Verify {
            chain,
            problem,
            samples,
        } => commands::verify(g, chain, problem.as_deref(), *samples),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(f) = run(&cli) {
        eprintln!("chainforge: {f}");
        std::process::exit(f.exit_code());
    }
}
