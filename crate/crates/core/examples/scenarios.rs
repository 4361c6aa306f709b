//! Replays every bundled demo and prints its verdicts as records.
//!
//! Run with `cargo run --example scenarios`, or a single demo with
//! `cargo run --example scenarios -- peres-tatiana`.

use qgas::cli::{run_command, CliConfig, Command, Format};
use qgas::demos;

/// Returns the records output of each demo.
pub fn run(only: Option<&str>) -> Vec<(&'static str, String)> {
    let mut out = Vec::new();
    for demo in demos::DEMOS.iter().filter(|d| only.is_none_or(|n| n == d.name)) {
        let config = CliConfig::new(Command::Demo(demo.name.to_string())).with_format(Format::Records);
        let result = run_command(&config);
        println!("# {} ({}) exit {}", demo.name, demo.summary, result.code);
        for line in result.stdout.lines().filter(|l| l.starts_with("verdict")) {
            println!("{line}");
        }
        eprint!("{}", result.stderr);
        out.push((demo.name, result.stdout));
    }
    out
}

fn main() {
    let only = std::env::args().nth(1);
    run(only.as_deref());
}
