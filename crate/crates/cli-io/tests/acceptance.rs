//! One line per acceptance criterion; exits nonzero if any fails.

use cli_io::suite::{format_row, run_suite};

const SEED: u64 = cli_io::cli::DEFAULT_SEED;

fn main() {
    let only: Vec<String> = std::env::var("ACCEPTANCE_ONLY").map(|s| s.split(',').map(str::to_string).collect()).unwrap_or_default();
    let rows = run_suite(SEED, &only);
    for r in &rows {
        println!("{}", format_row(r));
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    println!("acceptance: {} passed, {failed} failed", rows.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
