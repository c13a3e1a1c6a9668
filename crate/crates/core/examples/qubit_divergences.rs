//! Every catalog divergence for a commuting qubit pair, on both routes.
//!
//! ```text
//! cargo run --example qubit_divergences
//! ```

use nsdiv::algebra::{validate_state, AlgebraSpec, Element};
use nsdiv::divergence::{catalog, quantum_f_div_direct, quantum_f_div_ns, CATALOG};

fn main() -> nsdiv::Result<()> {
    let spec = AlgebraSpec::matrix_algebra(2);
    let phi = validate_state(&spec, &Element::from_real_diagonals(&spec, &[&[0.5, 0.5]])?, false)?;
    let omega = validate_state(&spec, &Element::from_real_diagonals(&spec, &[&[0.75, 0.25]])?, false)?;

    println!("{:<18} {:>20} {:>20}", "f", "ns", "direct");
    for name in CATALOG {
        let f = catalog(name, Some(1.5))?;
        let ns = quantum_f_div_ns(&spec, &phi, &omega, &f)?;
        let direct = quantum_f_div_direct(&spec, &phi, &omega, &f)?;
        println!("{:<18} {:>20.15} {:>20.15}", f.label(), ns.value, direct.value);
    }
    println!("0.5 ln(4/3) = {:.15}", 0.5 * (4.0f64 / 3.0).ln());
    Ok(())
}
