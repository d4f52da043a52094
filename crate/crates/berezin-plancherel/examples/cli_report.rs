//! Drives the command-line front end in process and prints its JSON report.
//!
//! Run with `cargo run --example cli_report`.

fn main() {
    let run = berezin_plancherel::cli::run(["berezin-plancherel", "support", "--p", "2", "--q", "8", "--alpha", "0.5"]);
    print!("{}", run.stdout);
    eprint!("{}", run.stderr);
    println!("exit code {}", run.code);
}
