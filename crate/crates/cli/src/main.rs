use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use bergman_lab::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            let written = match &out.output {
                Some(path) => std::fs::write(path, &out.artifact),
                None => std::io::stdout().write_all(out.artifact.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: writing output: {e}");
                return ExitCode::from(1);
            }
            if let Some(summary) = &out.summary {
                eprint!("{summary}");
            }
            ExitCode::from(out.exit_code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
