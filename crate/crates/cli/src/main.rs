use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;

use ulam_cli::{error_exit, run, Cli, Exit};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot start {threads} threads: {e}");
            return ExitCode::from(Exit::Usage as u8);
        }
    }
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let status = match run(cli, &mut out) {
        Ok(status) => status,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            error_exit(&e)
        }
    };
    if let Err(e) = out.flush() {
        eprintln!("error: {e}");
        return ExitCode::from(Exit::Failed as u8);
    }
    ExitCode::from(status as u8)
}
