use std::process::ExitCode;

use clap::Parser;

use tradenet_cli::config::Cli;
use tradenet_cli::{run, write_artifacts, CliError, RunConfig, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (command, args) = cli.command.split();
    let config = RunConfig::resolve(command, &args)?;
    if args.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    eprintln!("config: {}", serde_json::to_string(&config)?);

    let outcome = run(&config)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    write_artifacts(&config.out_dir, &outcome.artifacts)?;
    eprintln!(
        "wrote {} file(s) to {}",
        outcome.artifacts.len(),
        config.out_dir.display()
    );
    Ok(())
}
