use std::process::ExitCode;

use qst_cli::{execute, CliError, RunConfig, Status};

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("QST_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().map_err(|_| {
        CliError::Usage(format!(
            "QST_THREADS must be a non-negative integer, got `{raw}`"
        ))
    })?;
    // 0 keeps rayon's default of one worker per core
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure {threads} threads: {e}")))?;
    }
    Ok(())
}

fn run() -> Result<Status, CliError> {
    configure_threads()?;
    let cfg = RunConfig::parse_from(std::env::args_os())?;
    execute(&cfg)
}

fn main() -> ExitCode {
    match run() {
        Ok(Status::Success) => ExitCode::SUCCESS,
        Ok(Status::ChecksFailed) => ExitCode::from(1),
        Err(e @ CliError::Clap(_)) => {
            if let CliError::Clap(inner) = &e {
                let _ = inner.print();
            }
            ExitCode::from(e.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
