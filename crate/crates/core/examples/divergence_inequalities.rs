//! `D ≤ ln(1 + χ²)` and `D ≤ (TV + χ²)/2` on random faithful pairs, showing
//! the slack of each bound.

use nsdiv::cli::{inequalities, InequalityOptions};
use nsdiv::ExtReal;

fn main() {
    let report =
        inequalities(&InequalityOptions { trials: 50, ..InequalityOptions::default() }).expect("valid options");
    let slack = |bound: ExtReal, d: ExtReal| match (bound, d) {
        (ExtReal::Finite(b), ExtReal::Finite(x)) => b - x,
        _ => f64::INFINITY,
    };
    // one-dimensional algebras give identical states and zero slack
    let nontrivial: Vec<_> = report.trials.iter().filter(|t| t.chi_squared.to_f64() > 1e-12).collect();
    let min_log = nontrivial.iter().map(|t| slack(t.log_bound, t.relative_entropy)).fold(f64::INFINITY, f64::min);
    let min_mixed = nontrivial.iter().map(|t| slack(t.mixed_bound, t.relative_entropy)).fold(f64::INFINITY, f64::min);
    for t in report.trials.iter().take(8) {
        println!(
            "trial {:>2} dims {:?}: D = {:.6}  ln(1+χ²) = {:.6}  (TV+χ²)/2 = {:.6}",
            t.trial, t.dims, t.relative_entropy, t.log_bound, t.mixed_bound
        );
    }
    println!(
        "smallest slack over {} nontrivial pairs: {min_log:.3e} (log bound), {min_mixed:.3e} (mixed bound)",
        nontrivial.len()
    );
    println!("violations: {}", report.log_bound_violations + report.mixed_bound_violations);
}
