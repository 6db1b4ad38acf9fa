use std::io::IsTerminal;
use std::process::ExitCode;

fn main() -> ExitCode {
    let color = dial_cli::color_enabled(std::io::stderr().is_terminal());
    let code = dial_cli::run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr(), color);
    ExitCode::from(code as u8)
}
