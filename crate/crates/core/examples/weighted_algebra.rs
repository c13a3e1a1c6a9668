//! Nussbaum-Szkoła atoms on a weighted direct sum `M_2 ⊕ M_1` with
//! rank-deficient states.

use nsdiv::algebra::{random_state, AlgebraSpec, RankProfile};
use nsdiv::divergence::{catalog, divergence_from_ns, quantum_f_div_direct};
use nsdiv::nsdist::ns_distributions;

fn main() -> nsdiv::Result<()> {
    let spec = AlgebraSpec::new([(2, 1.0), (1, 2.5)])?;
    let phi = random_state(&spec, 3, &RankProfile::PerBlock(vec![1, 1]))?;
    let omega = random_state(&spec, 4, &RankProfile::Full)?;
    let ns = ns_distributions(&spec, &phi, &omega)?;

    println!("{:>5} {:>2} {:>2} {:>12} {:>12} {:>12} {:>12}", "block", "i", "j", "overlap", "nu", "f_phi", "f_omega");
    for a in &ns.atoms {
        println!(
            "{:>5} {:>2} {:>2} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            a.block, a.i, a.j, a.overlap, a.nu, a.fphi, a.fomega
        );
    }
    println!("Σ f_phi ν = {:.15}, Σ f_omega ν = {:.15}", ns.phi_total(), ns.omega_total());
    println!("ω(1 - s(φ)) = {:.6}, φ(1 - s(ω)) = {:.6}", ns.omega_off_phi_support, ns.phi_off_omega_support);

    let f = catalog("chi-squared", None)?;
    println!(
        "chi-squared: ns {} / direct {}",
        divergence_from_ns(&ns, &f)?.value,
        quantum_f_div_direct(&spec, &phi, &omega, &f)?.value
    );
    Ok(())
}
