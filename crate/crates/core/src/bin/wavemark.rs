use std::io;
use std::panic;
use std::process::ExitCode;

use wavemark::cli;

fn main() -> ExitCode {
    let code = panic::catch_unwind(|| {
        let stdout = io::stdout();
        let stderr = io::stderr();
        cli::run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
    })
    .unwrap_or(cli::EXIT_INTERNAL);
    ExitCode::from(code as u8)
}
