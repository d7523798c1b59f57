use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use nicel_cli::commands::EXIT_INPUT_ERROR;
use nicel_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let code = match run(cli, &mut out) {
        Ok(outcome) => outcome.code(),
        // a closed pipe (`nicel ... | head`) is not an input error
        Err(e) if e.chain().any(|c| c.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)) => 0,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            EXIT_INPUT_ERROR
        }
    };
    let _ = out.flush();
    ExitCode::from(code as u8)
}
