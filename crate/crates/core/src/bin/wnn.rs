use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(eeg_wnn::cli::run(std::env::args_os()))
}
