//! Command-line front end for the `skewlqu` toolkit.

pub mod args;
pub mod config;
pub mod run;
pub mod state_file;

pub use config::{parse_args, RunCommand, RunConfig, UsageError};
pub use run::{error_exit_code, run};
pub use state_file::{load_state, LoadedState};

/// Parses `argv`, runs, and returns the process exit status.
pub fn main_with(argv: Vec<std::ffi::OsString>, out: &mut dyn std::io::Write) -> i32 {
    let cfg = match parse_args(argv) {
        Ok(cfg) => cfg,
        Err(usage) => {
            usage.print();
            return usage.exit_code();
        }
    };
    match run(&cfg, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            error_exit_code(&e)
        }
    }
}
