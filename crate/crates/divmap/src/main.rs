use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use divmap::cli::{run, Cli, Console};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    let result = run(
        &cli,
        &mut Console {
            out: &mut out,
            err: &mut err,
        },
    );
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(err, "divmap: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
