use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(iqdisc_cli::run(std::env::args_os()))
}
