use std::process::ExitCode;

use billiards_cli::format::to_json;
use billiards_cli::{run, Cli, CliError};
use clap::Parser;

fn write(path: &std::path::Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli.command).and_then(|o| {
        if let Some((p, text)) = &o.csv {
            write(p, text)?;
        }
        if let Some((p, text)) = &o.svg {
            write(p, text)?;
        }
        let json = to_json(&o.report);
        match &cli.out {
            Some(p) => write(p, &json),
            None => {
                print!("{json}");
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
