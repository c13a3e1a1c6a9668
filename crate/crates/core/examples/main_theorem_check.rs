//! Randomized agreement check of the two routes through the library API.
//!
//! ```text
//! cargo run --release --example main_theorem_check -- 2000 17
//! ```

use nsdiv::cli::{verify, RankPolicy, VerifyOptions};

fn main() {
    let mut args = std::env::args().skip(1);
    let trials = args.next().and_then(|s| s.parse().ok()).unwrap_or(200);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(42);
    let opts = VerifyOptions { trials, seed, ranks: RankPolicy::Mixed, ..VerifyOptions::default() };

    let report = verify(&opts).expect("valid options");
    print!("{}", report.render_table());
    std::process::exit(if report.passed { 0 } else { 2 });
}
