//! Writes a problem file, reads it back through the strict parser and
//! computes a report, as the `compute` subcommand does.
//!
//! ```text
//! cargo run --example problem_file -- out.json
//! nsdiv compute --input out.json --f relative-entropy,chi-squared --atoms
//! ```

use nsdiv::algebra::{random_state, AlgebraSpec, RankProfile};
use nsdiv::cli::{compute, load_problem, ComputeOptions, ProblemFile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| std::env::temp_dir().join("nsdiv-problem.json").display().to_string());

    let spec = AlgebraSpec::new([(2, 1.0), (1, 0.5)])?;
    let phi = random_state(&spec, 1, &RankProfile::Full)?;
    let omega = random_state(&spec, 2, &RankProfile::PerBlock(vec![1, 1]))?;
    std::fs::write(&path, ProblemFile::from_elements(&spec, phi.h(), omega.h(), false).to_json())?;
    println!("wrote {path}");

    let problem = load_problem(path.as_ref())?;
    let opts = ComputeOptions {
        divergences: vec!["relative-entropy".into(), "chi-squared".into(), "total-variation".into()],
        atoms: true,
        ..ComputeOptions::default()
    };
    print!("{}", compute(&problem, &opts)?.render_table());
    Ok(())
}
