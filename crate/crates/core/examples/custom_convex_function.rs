//! A user-supplied convex function: the squared Hellinger generator
//! `(√t - 1)²`, with `f(0+) = 1` and `f'(+∞) = 1`.

use nsdiv::algebra::{random_state, AlgebraSpec, RankProfile};
use nsdiv::divergence::{quantum_f_div_direct, quantum_f_div_ns, values_agree};
use nsdiv::{ConvexFunctionSpec, ExtReal};

fn main() -> nsdiv::Result<()> {
    let hellinger =
        ConvexFunctionSpec::new("hellinger", |t| (t.sqrt() - 1.0).powi(2), ExtReal::Finite(1.0), ExtReal::Finite(1.0));
    assert!(hellinger.is_midpoint_convex_on(&[0.0, 0.1, 0.5, 1.0, 2.0, 10.0]));

    let spec = AlgebraSpec::new([(3, 1.0), (2, 0.5)])?;
    for seed in 0..5 {
        let phi = random_state(&spec, seed, &RankProfile::PerBlock(vec![2, 2]))?;
        let omega = random_state(&spec, 100 + seed, &RankProfile::PerBlock(vec![3, 1]))?;
        let a = quantum_f_div_ns(&spec, &phi, &omega, &hellinger)?;
        let b = quantum_f_div_direct(&spec, &phi, &omega, &hellinger)?;
        println!(
            "seed {seed}: ns {:.12} direct {:.12} (boundary {:.6} + {:.6}) agree: {}",
            a.value,
            b.value,
            a.term_f0,
            a.term_fpinf,
            values_agree(a.value, b.value, 1e-8)
        );
    }
    Ok(())
}
