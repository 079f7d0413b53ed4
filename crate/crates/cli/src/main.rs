use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use rnc_cli::{run, Cli, EXIT_INPUT_ERROR};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap uses 2 for usage errors, which here means the hyperplane case
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT_ERROR as u8 } else { 0 });
        }
    };
    let out = run(&cli.command);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(out.code as u8)
}
