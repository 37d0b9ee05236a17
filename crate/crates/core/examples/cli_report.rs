//! Run with: cargo run --example cli_report
//!
//! Builds a run configuration, runs a battery and prints the report lines.

use fano_check::report::{cmd_shafarevich, RunConfig};

fn main() -> fano_check::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.apply_text("seed = 1\nsunit_bound = 4\n")?;
    print!("{}", cfg.to_text());
    let bundle = cmd_shafarevich(&cfg, &[2, 5])?;
    print!("{}", bundle.json_lines());
    println!("exit code {}", bundle.exit_code());
    Ok(())
}
