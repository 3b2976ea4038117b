use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;
use skewlqu::verify::{Claim2Mode, ReportFormat};
use skewlqu::Subsystem;

use crate::args::{Cli, Command, CommonArgs, ModeArg, OutFormat, SideArg, VerifyTarget};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunCommand {
    Skew,
    Q,
    Lqu,
    Steer,
    Verify(VerifyTarget),
}

/// Fully resolved command line.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: RunCommand,
    pub n_a: usize,
    pub n_b: usize,
    pub trials: u64,
    /// `None` means the equally spaced default.
    pub spectrum: Option<Vec<f64>>,
    pub restarts: usize,
    pub tol: f64,
    pub master_seed: u64,
    pub kraus_count: usize,
    pub bases_per_trial: usize,
    pub out_path: Option<PathBuf>,
    pub out_format: ReportFormat,
    pub state_file: Option<PathBuf>,
    pub basis_file: Option<PathBuf>,
    pub mode: Claim2Mode,
    pub side: Subsystem,
    pub timing: bool,
}

/// Usage problem; carries clap's rendered message (help text included).
#[derive(Debug)]
pub struct UsageError(pub clap::Error);

impl UsageError {
    /// 0 for `--help` / `--version`, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        self.0.exit_code()
    }

    pub fn print(&self) {
        let _ = self.0.print();
    }
}

pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(UsageError)?;
    let (command, common) = match cli.command {
        Command::Skew(c) => (RunCommand::Skew, c),
        Command::Q(c) => (RunCommand::Q, c),
        Command::Lqu(c) => (RunCommand::Lqu, c),
        Command::Steer(c) => (RunCommand::Steer, c),
        Command::Verify { target, common } => (RunCommand::Verify(target), common),
    };
    Ok(resolve(command, common))
}

fn resolve(command: RunCommand, c: CommonArgs) -> RunConfig {
    RunConfig {
        command,
        n_a: c.dim_a as usize,
        n_b: c.dim_b as usize,
        trials: c.trials,
        spectrum: c.spectrum.map(|s| s.0),
        restarts: c.restarts as usize,
        tol: c.tol,
        master_seed: c.seed,
        kraus_count: c.kraus as usize,
        bases_per_trial: c.bases as usize,
        out_path: c.out,
        out_format: match c.format {
            OutFormat::Json => ReportFormat::JsonLines,
            OutFormat::Csv => ReportFormat::Csv,
        },
        state_file: c.state_file,
        basis_file: c.basis_file,
        mode: match c.mode {
            ModeArg::Argmin => Claim2Mode::ArgminK,
            ModeArg::Random => Claim2Mode::RandomK,
        },
        side: match c.side {
            SideArg::A => Subsystem::A,
            SideArg::B => Subsystem::B,
        },
        timing: c.timing,
    }
}
