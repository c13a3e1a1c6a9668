//! Pure states with different supports: the relative entropy is +∞ and the
//! infinity is carried entirely by the `f'(+∞)` boundary term.

use nsdiv::algebra::{validate_state, AlgebraSpec, Element, C64};
use nsdiv::divergence::{catalog, quantum_f_div_direct, quantum_f_div_ns};
use nsdiv::nsdist::{ns_distributions, support_defects_direct};

fn main() -> nsdiv::Result<()> {
    let spec = AlgebraSpec::matrix_algebra(2);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let zero = Element::projector(&spec, 0, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)])?;
    let plus = Element::projector(&spec, 0, &[C64::new(s, 0.0), C64::new(s, 0.0)])?;
    let phi = validate_state(&spec, &zero, false)?;
    let omega = validate_state(&spec, &plus, false)?;

    let ns = ns_distributions(&spec, &phi, &omega)?;
    let direct = support_defects_direct(&spec, &phi, &omega)?;
    println!("ω(1 - s(φ)): ns {:.15}  direct {:.15}", ns.omega_off_phi_support, direct.0);
    println!("φ(1 - s(ω)): ns {:.15}  direct {:.15}", ns.phi_off_omega_support, direct.1);

    for name in ["relative-entropy", "total-variation", "neg-log"] {
        let f = catalog(name, None)?;
        for r in [quantum_f_div_ns(&spec, &phi, &omega, &f)?, quantum_f_div_direct(&spec, &phi, &omega, &f)?] {
            println!(
                "{name:<17} {:<7} value {:>15.12}  main {:>15.12}  f(0+) term {:>15.12}  f'(+inf) term {:>15.12}",
                format!("{:?}", r.route),
                r.value,
                r.term_main,
                r.term_f0,
                r.term_fpinf
            );
        }
    }
    Ok(())
}
