use std::process::ExitCode;

use hotplug_cache::cli::{self, EXIT_USAGE};

fn main() -> ExitCode {
    match cli::run(std::env::args_os()) {
        Ok(outcome) => ExitCode::from(outcome.code as u8),
        Err(err) => {
            if let Some(clap_err) = err.downcast_ref::<clap::Error>() {
                let _ = clap_err.print();
                return ExitCode::from(if clap_err.use_stderr() { EXIT_USAGE as u8 } else { 0 });
            }
            eprintln!("error: {err:#}");
            eprintln!("run `hotplug --help` for usage");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
