//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode, Output};
use std::time::Instant;

use nalgebra::DVector;
use nsdiv::algebra::{
    conjugate, random_state, random_unitary, validate_state, AlgebraSpec, CMatrix, Element, RankProfile, C64,
};
use nsdiv::cli::{verification_catalog, InequalityReport, VerifyReport};
use nsdiv::divergence::{
    catalog, divergence_from_ns, quantum_f_div_direct, quantum_f_div_ns, values_agree, ConvexFunctionSpec, CATALOG,
};
use nsdiv::nsdist::{build_ns, ns_distributions, simultaneous_spectrum, support_defects_direct, BlockPair};
use nsdiv::ExtReal;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn nsdiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsdiv")).args(args).output().expect("binary runs")
}

const VERIFY_ARGS: [&str; 13] = [
    "verify",
    "--trials",
    "500",
    "--seed",
    "42",
    "--max-dim",
    "4",
    "--max-blocks",
    "3",
    "--ranks",
    "mixed",
    "--output",
    "json",
];
const INEQUALITY_ARGS: [&str; 7] = ["inequalities", "--trials", "200", "--seed", "7", "--output", "json"];

fn run_verify() -> Result<(VerifyReport, f64, Vec<u8>), String> {
    let start = Instant::now();
    let out = nsdiv(&VERIFY_ARGS);
    let secs = start.elapsed().as_secs_f64();
    let report = serde_json::from_slice(&out.stdout).map_err(|e| format!("unreadable verify report: {e}"))?;
    Ok((report, secs, out.stdout))
}

fn all_functions() -> Vec<ConvexFunctionSpec> {
    CATALOG.iter().map(|n| catalog(n, Some(1.5)).unwrap()).collect()
}

fn finite(v: ExtReal) -> Result<f64, String> {
    v.as_finite().ok_or_else(|| "unexpected +inf".to_string())
}

fn diag_state(spec: &AlgebraSpec, d: &[&[f64]]) -> nsdiv::State {
    validate_state(spec, &Element::from_real_diagonals(spec, d).unwrap(), false).unwrap()
}

fn criterion_1(report: &VerifyReport, secs: f64) -> Outcome {
    ensure!(report.summary.trials == 500, "ran {} trials", report.summary.trials);
    ensure!(report.summary.failures == 0, "{} failing trials", report.summary.failures);
    ensure!(secs < 60.0, "took {secs:.1} s");
    Ok(format!(
        "500 trials, 0 failures, max relative delta {:.1e}, {secs:.2} s",
        report.summary.max_relative_delta.to_f64()
    ))
}

fn criterion_2(report: &VerifyReport) -> Outcome {
    let mut worst = 0.0f64;
    for t in &report.trials {
        for v in t.ns_totals {
            worst = worst.max((finite(v)? - 1.0).abs());
        }
    }
    ensure!(worst <= 1e-10, "normalization off by {worst:e}");
    Ok(format!("max |total - 1| = {worst:.1e}"))
}

fn criterion_3() -> Outcome {
    let spec = AlgebraSpec::matrix_algebra(2);
    let phi = diag_state(&spec, &[&[0.5, 0.5]]);
    let omega = diag_state(&spec, &[&[0.75, 0.25]]);
    // q f(p/q) summed by hand over the two diagonal entries
    let expected = [
        ("relative-entropy", 0.75 * (2.0f64 / 3.0) * (2.0f64 / 3.0).ln() + 0.25 * 2.0 * 2.0f64.ln()),
        ("chi-squared", 0.75 * (2.0f64 / 3.0 - 1.0).powi(2) + 0.25 * (2.0f64 - 1.0).powi(2)),
        ("total-variation", 0.75 * (2.0f64 / 3.0 - 1.0).abs() + 0.25 * (2.0f64 - 1.0).abs()),
    ];
    ensure!((expected[0].1 - 0.5 * (4.0f64 / 3.0).ln()).abs() < 1e-15, "hand sum disagrees with closed form");
    for (name, want) in expected {
        let f = catalog(name, None).unwrap();
        for r in
            [quantum_f_div_ns(&spec, &phi, &omega, &f).unwrap(), quantum_f_div_direct(&spec, &phi, &omega, &f).unwrap()]
        {
            let got = finite(r.value)?;
            ensure!((got - want).abs() <= 1e-10, "{name} on {:?} route: {got} vs {want}", r.route);
        }
    }

    // dim-1 algebras against Σ_k t_k q_k f(p_k/q_k) with the boundary conventions
    let mut checked = 0;
    for seed in 0..60u64 {
        let weights: Vec<f64> =
            (0..1 + seed as usize % 6).map(|k| 0.5 + 0.25 * ((seed as usize + k) % 7) as f64).collect();
        let spec = AlgebraSpec::abelian(&weights).unwrap();
        let n = weights.len();
        let ranks = |s: u64| RankProfile::PerBlock((0..n).map(|k| usize::from((s >> k) & 3 != 0 || k == 0)).collect());
        let phi = random_state(&spec, 1000 + seed, &ranks(seed.wrapping_mul(2654435761))).unwrap();
        let omega = random_state(&spec, 2000 + seed, &ranks(seed.wrapping_mul(40503) + 1)).unwrap();
        for f in all_functions() {
            let mut want = ExtReal::ZERO;
            for (k, &t) in weights.iter().enumerate() {
                let p = phi.h().blocks()[k][(0, 0)].re;
                let q = omega.h().blocks()[k][(0, 0)].re;
                let term = match (p > 0.0, q > 0.0) {
                    (true, true) => ExtReal::Finite(q * f.eval(p / q).unwrap()),
                    (false, true) => {
                        if f.f0().is_infinite() {
                            ExtReal::PosInf
                        } else {
                            ExtReal::Finite(q * f.f0().to_f64())
                        }
                    }
                    (true, false) => {
                        if f.fpinf().is_infinite() {
                            ExtReal::PosInf
                        } else {
                            ExtReal::Finite(p * f.fpinf().to_f64())
                        }
                    }
                    (false, false) => ExtReal::ZERO,
                };
                want = want
                    + match term {
                        ExtReal::Finite(x) => ExtReal::Finite(t * x),
                        ExtReal::PosInf => ExtReal::PosInf,
                    };
            }
            for r in [
                quantum_f_div_ns(&spec, &phi, &omega, &f).unwrap(),
                quantum_f_div_direct(&spec, &phi, &omega, &f).unwrap(),
            ] {
                ensure!(
                    values_agree(r.value, want, 1e-12),
                    "abelian {} on {:?}: {} vs {want}",
                    f.label(),
                    r.route,
                    r.value
                );
            }
            checked += 1;
        }
    }
    Ok(format!("qubit RE/chi2/TV exact on both routes; {checked} abelian cases within 1e-12"))
}

fn criterion_4() -> Outcome {
    let spec = AlgebraSpec::matrix_algebra(2);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let zero = Element::projector(&spec, 0, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
    let plus = Element::projector(&spec, 0, &[C64::new(s, 0.0), C64::new(s, 0.0)]).unwrap();
    let phi = validate_state(&spec, &zero, false).unwrap();
    let omega = validate_state(&spec, &plus, false).unwrap();

    let re = catalog("relative-entropy", None).unwrap();
    for r in
        [quantum_f_div_ns(&spec, &phi, &omega, &re).unwrap(), quantum_f_div_direct(&spec, &phi, &omega, &re).unwrap()]
    {
        ensure!(r.value == ExtReal::PosInf, "relative entropy {} on {:?}", r.value, r.route);
        ensure!(r.term_fpinf == ExtReal::PosInf, "term_fpinf {} on {:?}", r.term_fpinf, r.route);
    }
    let ns = ns_distributions(&spec, &phi, &omega).unwrap();
    let direct = support_defects_direct(&spec, &phi, &omega).unwrap();
    for (name, v) in [
        ("ns ω(1-s(φ))", ns.omega_off_phi_support),
        ("ns φ(1-s(ω))", ns.phi_off_omega_support),
        ("direct ω(1-s(φ))", direct.0),
        ("direct φ(1-s(ω))", direct.1),
    ] {
        ensure!((v - 0.5).abs() <= 1e-12, "{name} = {v}");
    }
    let tv = catalog("total-variation", None).unwrap();
    let a = finite(quantum_f_div_ns(&spec, &phi, &omega, &tv).unwrap().value)?;
    let b = finite(quantum_f_div_direct(&spec, &phi, &omega, &tv).unwrap().value)?;
    ensure!((a - b).abs() <= 1e-10, "TV routes {a} vs {b}");
    Ok(format!("RE = +inf on both routes, defects 0.5, TV = {a:.12}"))
}

fn criterion_5() -> Outcome {
    let spec = AlgebraSpec::new([(3, 1.0), (2, 0.7), (1, 1.8)]).unwrap();
    let mut worst = 0.0f64;
    for seed in 0..50u64 {
        let ranks = if seed % 2 == 0 {
            RankProfile::Full
        } else {
            RankProfile::PerBlock(vec![1 + seed as usize % 3, seed as usize % 3, (seed as usize / 3) % 2])
        };
        let s = random_state(&spec, 500 + seed, &ranks).unwrap();
        for f in all_functions() {
            for r in [quantum_f_div_ns(&spec, &s, &s, &f).unwrap(), quantum_f_div_direct(&spec, &s, &s, &f).unwrap()] {
                let d = (finite(r.value)? - f.at_one()).abs();
                ensure!(d <= 1e-10, "{} on {:?}, seed {seed}: off by {d:e}", f.label(), r.route);
                worst = worst.max(d);
            }
        }
    }
    Ok(format!("50 states, max |S(ω,ω) - f(1)| = {worst:.1e}"))
}

fn criterion_6(report: &VerifyReport) -> Outcome {
    let functions = verification_catalog();
    let mut finite_values = 0;
    for t in &report.trials {
        for d in &t.divergences {
            let f =
                functions.iter().find(|f| f.label() == d.name).ok_or_else(|| format!("unknown label {}", d.name))?;
            for v in [d.ns, d.direct] {
                if let ExtReal::Finite(x) = v {
                    ensure!(x >= f.at_one() - 1e-9, "trial {} {}: {x} < f(1)", t.trial, d.name);
                    finite_values += 1;
                }
            }
        }
    }
    Ok(format!("{finite_values} finite values all >= f(1) - 1e-9"))
}

fn criterion_7() -> Outcome {
    let out = nsdiv(&INEQUALITY_ARGS);
    let report: InequalityReport = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    ensure!(report.trials.len() == 200, "ran {} trials", report.trials.len());
    let violations = report.log_bound_violations + report.mixed_bound_violations;
    ensure!(violations == 0 && out.status.code() == Some(0), "{violations} violations");
    Ok(format!("200 full-rank trials, 0 violations ({} vacuous)", report.vacuous))
}

fn rotate_within(basis: &CMatrix, group: &[usize], r: &CMatrix) -> CMatrix {
    let mut out = basis.clone();
    for (a, &ca) in group.iter().enumerate() {
        let mut col = DVector::<C64>::zeros(basis.nrows());
        for (b, &cb) in group.iter().enumerate() {
            col += basis.column(cb) * r[(b, a)];
        }
        out.set_column(ca, &col);
    }
    out
}

fn degenerate_groups(values: &[f64]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = vec![];
    for (i, &v) in values.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if (values[g[0]] - v).abs() <= 1e-12 => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups.into_iter().filter(|g| g.len() > 1).collect()
}

fn criterion_8() -> Outcome {
    let spec = AlgebraSpec::new([(4, 1.0), (2, 0.5), (1, 1.5)]).unwrap();
    let mut pairs = 0;
    for seed in 0..40u64 {
        let ranks = |s: u64| {
            if s.is_multiple_of(3) {
                RankProfile::Full
            } else {
                RankProfile::PerBlock(vec![1 + s as usize % 4, s as usize % 3, s as usize % 2])
            }
        };
        let phi = random_state(&spec, 3 * seed, &ranks(seed)).unwrap();
        let omega = random_state(&spec, 3 * seed + 1, &ranks(seed / 2)).unwrap();
        let u = random_unitary(&spec, 3 * seed + 2);
        let phi_u = validate_state(&spec, &conjugate(&u, phi.h()), false).unwrap();
        let omega_u = validate_state(&spec, &conjugate(&u, omega.h()), false).unwrap();
        for f in all_functions() {
            let a = quantum_f_div_ns(&spec, &phi, &omega, &f).unwrap().value;
            let b = quantum_f_div_ns(&spec, &phi_u, &omega_u, &f).unwrap().value;
            let c = quantum_f_div_direct(&spec, &phi, &omega, &f).unwrap().value;
            let d = quantum_f_div_direct(&spec, &phi_u, &omega_u, &f).unwrap().value;
            ensure!(
                values_agree(a, b, 1e-9) && values_agree(c, d, 1e-9),
                "covariance {} seed {seed}: {a} {b} {c} {d}",
                f.label()
            );
            pairs += 1;
        }
    }

    let spec = AlgebraSpec::new([(4, 1.0), (3, 0.6)]).unwrap();
    let phi = validate_state(
        &spec,
        &Element::from_real_diagonals(&spec, &[&[0.1, 0.1, 0.1, 0.2], &[0.3, 0.3, 0.0]]).unwrap(),
        true,
    )
    .unwrap();
    let omega_h = conjugate(
        &random_unitary(&spec, 5),
        &Element::from_real_diagonals(&spec, &[&[0.15, 0.15, 0.05, 0.0], &[0.2, 0.2, 0.2]]).unwrap(),
    );
    let omega = validate_state(&spec, &omega_h, true).unwrap();
    let sim = simultaneous_spectrum(&spec, &phi, &omega).unwrap();
    let base = build_ns(&spec, &sim).unwrap();
    let mut rotated = sim.clone();
    for (k, b) in sim.blocks.iter().enumerate() {
        let mut u = b.u.clone();
        for (g, group) in degenerate_groups(&b.alpha).iter().enumerate() {
            let r = random_unitary(&AlgebraSpec::matrix_algebra(group.len()), 70 + g as u64).into_blocks().remove(0);
            u = rotate_within(&u, group, &r);
        }
        let mut v = b.v.clone();
        for (g, group) in degenerate_groups(&b.beta).iter().enumerate() {
            let r = random_unitary(&AlgebraSpec::matrix_algebra(group.len()), 90 + g as u64).into_blocks().remove(0);
            v = rotate_within(&v, group, &r);
        }
        rotated.blocks[k] = BlockPair::new(b.weight, b.alpha.clone(), u, b.beta.clone(), v).unwrap();
    }
    let moved = build_ns(&spec, &rotated).unwrap();
    for f in all_functions() {
        let a = divergence_from_ns(&base, &f).unwrap().value;
        let b = divergence_from_ns(&moved, &f).unwrap().value;
        ensure!(values_agree(a, b, 1e-9), "degenerate basis change moved {}: {a} vs {b}", f.label());
    }
    Ok(format!("{pairs} covariance checks and degenerate-basis invariance within 1e-9"))
}

fn criterion_9() -> Outcome {
    // states built from known spectra and eigenbases, so the oracle needs no eigensolver
    let mut worst = 0.0f64;
    for n in 1..=5usize {
        let spec = AlgebraSpec::matrix_algebra(n);
        let raw = |s: f64| -> Vec<f64> { (0..n).map(|i| 1.0 + i as f64 + s * (i * i) as f64).collect() };
        let norm = |v: Vec<f64>| -> Vec<f64> {
            let t: f64 = v.iter().sum();
            v.into_iter().map(|x| x / t).collect()
        };
        let (p, q) = (norm(raw(0.3)), norm(raw(0.7).into_iter().rev().collect()));
        let e = random_unitary(&spec, 11 + n as u64).into_blocks().remove(0);
        let f = random_unitary(&spec, 29 + n as u64).into_blocks().remove(0);
        let density = |basis: &CMatrix, w: &[f64]| -> Element {
            let d = CMatrix::from_diagonal(&DVector::from_iterator(n, w.iter().map(|&x| C64::new(x, 0.0))));
            Element::from_blocks(&spec, vec![basis * d * basis.adjoint()]).unwrap()
        };
        let phi = validate_state(&spec, &density(&e, &p), false).unwrap();
        let omega = validate_state(&spec, &density(&f, &q), false).unwrap();
        let ns = ns_distributions(&spec, &phi, &omega).unwrap();

        // atoms are indexed by ascending eigenvalue
        let order = |w: &[f64]| {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| w[a].total_cmp(&w[b]));
            idx
        };
        let (ip, jq) = (order(&p), order(&q));
        ensure!(ns.atoms.len() == n * n, "expected {} atoms, got {}", n * n, ns.atoms.len());
        for a in &ns.atoms {
            let (ei, fj) = (ip[a.i], jq[a.j]);
            let overlap = e.column(ei).dotc(&f.column(fj)).norm_sqr();
            let dp = (a.fphi * a.nu - p[ei] * overlap).abs();
            let dq = (a.fomega * a.nu - q[fj] * overlap).abs();
            worst = worst.max(dp).max(dq);
        }
    }
    ensure!(worst <= 1e-12, "atom mismatch {worst:e}");
    Ok(format!("dims 1..5, max atom deviation {worst:.1e}"))
}

fn criterion_10(verify_bytes: &[u8]) -> Outcome {
    let dir = std::env::temp_dir().join(format!("nsdiv-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let input = dir.join("problem.json");
    write_problem(&input)?;
    let input = input.to_string_lossy().into_owned();
    let compute_args = [
        "compute",
        "--input",
        &input,
        "--f",
        "relative-entropy,chi-squared,total-variation,neg-log,power",
        "--alpha",
        "1.5",
        "--atoms",
        "--renyi",
        "2",
        "--output",
        "json",
    ];
    for args in [&compute_args[..], &INEQUALITY_ARGS[..]] {
        let (a, b) = (nsdiv(args), nsdiv(args));
        ensure!(!a.stdout.is_empty() && a.stdout == b.stdout, "{} output differs between runs", args[0]);
    }
    let again = nsdiv(&VERIFY_ARGS);
    ensure!(again.stdout == verify_bytes, "verify output differs between runs");
    std::fs::remove_dir_all(&dir).ok();
    Ok("compute, verify and inequalities reports byte-identical".into())
}

fn write_problem(path: &Path) -> Result<(), String> {
    let spec = AlgebraSpec::new([(2, 1.0), (1, 0.5)]).unwrap();
    let phi = random_state(&spec, 1, &RankProfile::Full).unwrap();
    let omega = random_state(&spec, 2, &RankProfile::PerBlock(vec![1, 1])).unwrap();
    let file = nsdiv::cli::ProblemFile::from_elements(&spec, phi.h(), omega.h(), true);
    std::fs::write(path, file.to_json()).map_err(|e| e.to_string())
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    })
}

fn main() -> ExitCode {
    // failures are reported through the criterion lines
    std::panic::set_hook(Box::new(|_| {}));
    let verify = run_verify();
    let with_verify = |f: &dyn Fn(&VerifyReport, f64, &[u8]) -> Outcome| -> Outcome {
        match &verify {
            Ok((report, secs, bytes)) => guarded(|| f(report, *secs, bytes)),
            Err(e) => Err(e.clone()),
        }
    };
    let results: Vec<(&str, Outcome)> = vec![
        ("main theorem: ns and direct routes agree", with_verify(&|r, s, _| criterion_1(r, s))),
        ("ns normalization", with_verify(&|r, _, _| criterion_2(r))),
        ("commuting and abelian reductions", guarded(criterion_3)),
        ("singular support", guarded(criterion_4)),
        ("self-divergence", guarded(criterion_5)),
        ("jensen bound", with_verify(&|r, _, _| criterion_6(r))),
        ("divergence inequalities", guarded(criterion_7)),
        ("unitary covariance and degenerate invariance", guarded(criterion_8)),
        ("B(H) atoms against the two-basis formula", guarded(criterion_9)),
        ("determinism", with_verify(&|_, _, b| criterion_10(b))),
    ];

    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("PASS  {:>2}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:>2}. {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
