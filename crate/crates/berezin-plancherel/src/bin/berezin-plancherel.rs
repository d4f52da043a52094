//! Command-line entry point; see `berezin_plancherel::cli`.

use std::io::Write;

fn main() {
    let run = berezin_plancherel::cli::run(std::env::args_os());
    let _ = std::io::stdout().write_all(run.stdout.as_bytes());
    let _ = std::io::stderr().write_all(run.stderr.as_bytes());
    std::process::exit(run.code);
}
