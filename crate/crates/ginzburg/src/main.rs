use std::process::ExitCode;

use clap::Parser;
use ginzburg::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("GINZBURG_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: GINZBURG_THREADS ignored: {e}");
        }
    }
    let outcome = run(&cli.command);
    match &cli.command.common().out {
        Some(path) if outcome.code != 2 => {
            if let Err(e) = std::fs::write(path, &outcome.output) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        _ if outcome.code == 2 => eprint!("{}", outcome.output),
        _ => print!("{}", outcome.output),
    }
    ExitCode::from(outcome.code as u8)
}
