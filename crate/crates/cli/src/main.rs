use std::process::ExitCode;

fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let code = skewlqu_cli::main_with(std::env::args_os().collect(), &mut stdout.lock());
    ExitCode::from(u8::try_from(code).unwrap_or(1))
}
