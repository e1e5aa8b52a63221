use std::io;
use std::process::ExitCode;

use clap::Parser;
use qss_cli::{execute, Cli, EXIT_ERROR};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR as u8 } else { 0 });
        }
    };
    let code = execute(&cli, &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}
