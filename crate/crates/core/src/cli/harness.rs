//! Randomized checks: agreement of the two routes, and the classical
//! divergence inequalities transported to quantum states.

use std::fmt::Write as _;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::algebra::{random_state, AlgebraSpec, RankProfile, State};
use crate::divergence::{
    catalog, classical_f_div, divergence_from_ns, relative_modular_spectrum, values_agree, ClassicalAtom,
    ConvexFunctionSpec,
};
use crate::error::Result;
use crate::extreal::ExtReal;
use crate::nsdist::{ns_distributions, support_defects_direct};

/// Tolerance on `∫ f_φ dν = ∫ f_ω dν = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-10;
/// Tolerance between the two support-defect computations.
pub const DEFECT_TOL: f64 = 1e-9;
/// Slack in the lower bound `S_f ≥ f(1)`.
pub const JENSEN_TOL: f64 = 1e-9;
/// Tolerance for the abelian reduction to the classical formula.
pub const ABELIAN_TOL: f64 = 1e-12;
/// Exponent of the power-family member included in every trial.
pub const VERIFY_POWER_ALPHA: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankPolicy {
    Full,
    Mixed,
}

impl std::str::FromStr for RankPolicy {
    type Err = CliError;

    fn from_str(s: &str) -> std::result::Result<Self, CliError> {
        match s {
            "full" => Ok(RankPolicy::Full),
            "mixed" => Ok(RankPolicy::Mixed),
            other => Err(CliError::Usage(format!("unknown rank policy {other:?}, expected full or mixed"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub trials: usize,
    pub seed: u64,
    pub max_blocks: usize,
    pub max_dim: usize,
    pub weight_range: (f64, f64),
    pub ranks: RankPolicy,
    pub tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            trials: 500,
            seed: 42,
            max_blocks: 3,
            max_dim: 4,
            weight_range: (0.5, 2.0),
            ranks: RankPolicy::Mixed,
            tol: 1e-8,
        }
    }
}

impl VerifyOptions {
    fn validate(&self) -> std::result::Result<(), CliError> {
        if self.trials == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        if self.max_blocks == 0 || self.max_dim == 0 {
            return Err(CliError::Usage("--max-blocks and --max-dim must be at least 1".into()));
        }
        let (lo, hi) = self.weight_range;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(CliError::Usage(format!("invalid weight range {lo}:{hi}")));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(CliError::Usage("--tol must be positive".into()));
        }
        Ok(())
    }
}

/// A randomly drawn algebra with two states.
#[derive(Debug, Clone)]
pub struct TrialCase {
    pub algebra: AlgebraSpec,
    pub phi: State,
    pub omega: State,
    pub phi_ranks: Vec<usize>,
    pub omega_ranks: Vec<usize>,
}

fn draw_ranks(rng: &mut ChaCha20Rng, dims: &[usize], policy: RankPolicy) -> Vec<usize> {
    if policy == RankPolicy::Full || rng.random_bool(0.5) {
        return dims.to_vec();
    }
    let mut ranks: Vec<usize> = dims.iter().map(|&d| rng.random_range(0..=d)).collect();
    if ranks.iter().all(|&r| r == 0) {
        let k = rng.random_range(0..dims.len());
        ranks[k] = 1;
    }
    ranks
}

/// Draws trial `index`. The stream depends only on `(seed, index)`.
pub fn random_trial(opts: &VerifyOptions, index: usize) -> Result<TrialCase> {
    let mut rng = ChaCha20Rng::seed_from_u64(opts.seed);
    rng.set_stream(index as u64);
    let num_blocks = rng.random_range(1..=opts.max_blocks);
    let (lo, hi) = opts.weight_range;
    let blocks: Vec<(usize, f64)> = (0..num_blocks)
        .map(|_| {
            let dim = rng.random_range(1..=opts.max_dim);
            let weight = if lo == hi { lo } else { rng.random_range(lo..hi) };
            (dim, weight)
        })
        .collect();
    let algebra = AlgebraSpec::new(blocks)?;
    let dims = algebra.dims();
    let phi_ranks = draw_ranks(&mut rng, &dims, opts.ranks);
    let omega_ranks = draw_ranks(&mut rng, &dims, opts.ranks);
    let phi = random_state(&algebra, rng.next_u64(), &RankProfile::PerBlock(phi_ranks.clone()))?;
    let omega = random_state(&algebra, rng.next_u64(), &RankProfile::PerBlock(omega_ranks.clone()))?;
    Ok(TrialCase { algebra, phi, omega, phi_ranks, omega_ranks })
}

/// The divergences every trial evaluates.
pub fn verification_catalog() -> Vec<ConvexFunctionSpec> {
    ["relative-entropy", "chi-squared", "total-variation", "neg-log"]
        .into_iter()
        .map(|n| catalog(n, None).expect("catalog entry"))
        .chain(std::iter::once(catalog("power", Some(VERIFY_POWER_ALPHA)).expect("catalog entry")))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialDivergence {
    pub name: String,
    pub ns: ExtReal,
    pub direct: ExtReal,
    pub agree: bool,
    /// Both values are at least `f(1) − 1e−9`.
    pub jensen: bool,
    /// On an all-dimension-1 algebra: agreement with the classical formula.
    pub abelian: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub dims: Vec<usize>,
    pub weights: Vec<f64>,
    pub phi_ranks: Vec<usize>,
    pub omega_ranks: Vec<usize>,
    /// `(∫ f_φ dν, ∫ f_ω dν)`.
    pub ns_totals: [ExtReal; 2],
    pub ns_defects: [ExtReal; 2],
    pub direct_defects: [ExtReal; 2],
    pub normalized: bool,
    pub defects_agree: bool,
    pub divergences: Vec<TrialDivergence>,
    pub error: Option<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub trials: usize,
    pub failures: usize,
    pub agreement_failures: usize,
    pub normalization_failures: usize,
    pub defect_failures: usize,
    pub jensen_failures: usize,
    pub abelian_failures: usize,
    pub errors: usize,
    pub infinite_pairs: usize,
    pub max_relative_delta: ExtReal,
    pub max_normalization_error: ExtReal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub options: VerifyOptions,
    pub summary: VerifySummary,
    pub trials: Vec<TrialRecord>,
    pub passed: bool,
}

/// The classical formula on an abelian algebra: atoms `(t_k, h_φ(k), h_ω(k))`.
fn abelian_value(case: &TrialCase, f: &ConvexFunctionSpec) -> Result<ExtReal> {
    let atoms: Vec<ClassicalAtom> = case
        .algebra
        .blocks()
        .iter()
        .zip(case.phi.h().blocks().iter().zip(case.omega.h().blocks()))
        .map(|(b, (p, q))| ClassicalAtom { nu: b.weight, p: p[(0, 0)].re, q: q[(0, 0)].re })
        .collect();
    classical_f_div(&atoms, f)
}

fn relative_delta(a: ExtReal, b: ExtReal) -> f64 {
    match (a, b) {
        (ExtReal::Finite(x), ExtReal::Finite(y)) => (x - y).abs() / x.abs().max(1.0),
        (ExtReal::PosInf, ExtReal::PosInf) => 0.0,
        _ => f64::INFINITY,
    }
}

fn run_trial(opts: &VerifyOptions, index: usize, functions: &[ConvexFunctionSpec]) -> TrialRecord {
    let mut record = TrialRecord {
        trial: index,
        dims: vec![],
        weights: vec![],
        phi_ranks: vec![],
        omega_ranks: vec![],
        ns_totals: [ExtReal::ZERO; 2],
        ns_defects: [ExtReal::ZERO; 2],
        direct_defects: [ExtReal::ZERO; 2],
        normalized: false,
        defects_agree: false,
        divergences: vec![],
        error: None,
        passed: false,
    };
    if let Err(e) = fill_trial(opts, index, functions, &mut record) {
        record.error = Some(e.to_string());
        record.passed = false;
    }
    record
}

fn fill_trial(
    opts: &VerifyOptions,
    index: usize,
    functions: &[ConvexFunctionSpec],
    record: &mut TrialRecord,
) -> Result<()> {
    let case = random_trial(opts, index)?;
    record.dims = case.algebra.dims();
    record.weights = case.algebra.weights();
    record.phi_ranks = case.phi_ranks.clone();
    record.omega_ranks = case.omega_ranks.clone();

    let ns = ns_distributions(&case.algebra, &case.phi, &case.omega)?;
    let modular = relative_modular_spectrum(&case.algebra, &case.phi, &case.omega)?;
    let direct_defects = support_defects_direct(&case.algebra, &case.phi, &case.omega)?;

    let (pt, qt) = (ns.phi_total(), ns.omega_total());
    record.ns_totals = [ExtReal::Finite(pt), ExtReal::Finite(qt)];
    record.normalized = (pt - 1.0).abs() <= NORMALIZATION_TOL && (qt - 1.0).abs() <= NORMALIZATION_TOL;
    record.ns_defects = [ExtReal::Finite(ns.omega_off_phi_support), ExtReal::Finite(ns.phi_off_omega_support)];
    record.direct_defects = [ExtReal::Finite(direct_defects.0), ExtReal::Finite(direct_defects.1)];
    record.defects_agree = (ns.omega_off_phi_support - direct_defects.0).abs() <= DEFECT_TOL
        && (ns.phi_off_omega_support - direct_defects.1).abs() <= DEFECT_TOL;

    let abelian = case.algebra.dims().iter().all(|&d| d == 1);
    let mut all_ok = record.normalized && record.defects_agree;
    for f in functions {
        let a = divergence_from_ns(&ns, f)?.value;
        let b = modular.divergence(f)?.value;
        let agree = values_agree(a, b, opts.tol);
        let floor = ExtReal::Finite(f.at_one() - JENSEN_TOL);
        let jensen = a >= floor && b >= floor;
        let abelian = if abelian {
            let c = abelian_value(&case, f)?;
            Some(relative_delta(a, c) <= ABELIAN_TOL && relative_delta(b, c) <= ABELIAN_TOL)
        } else {
            None
        };
        all_ok &= agree && jensen && abelian.unwrap_or(true);
        record.divergences.push(TrialDivergence { name: f.label(), ns: a, direct: b, agree, jensen, abelian });
    }
    record.passed = all_ok;
    Ok(())
}

/// Checks agreement of the two routes on random algebras and state pairs.
pub fn verify(opts: &VerifyOptions) -> std::result::Result<VerifyReport, CliError> {
    opts.validate()?;
    let functions = verification_catalog();
    let trials: Vec<TrialRecord> = (0..opts.trials).into_par_iter().map(|i| run_trial(opts, i, &functions)).collect();

    let mut s = VerifySummary { trials: trials.len(), ..Default::default() };
    let mut max_delta = 0.0f64;
    let mut max_norm = 0.0f64;
    for t in &trials {
        s.failures += usize::from(!t.passed);
        s.errors += usize::from(t.error.is_some());
        if t.error.is_some() {
            continue;
        }
        s.normalization_failures += usize::from(!t.normalized);
        s.defect_failures += usize::from(!t.defects_agree);
        for d in &t.divergences {
            s.agreement_failures += usize::from(!d.agree);
            s.jensen_failures += usize::from(!d.jensen);
            s.abelian_failures += usize::from(d.abelian == Some(false));
            s.infinite_pairs += usize::from(d.ns.is_infinite() && d.direct.is_infinite());
            max_delta = max_delta.max(relative_delta(d.ns, d.direct));
        }
        for x in &t.ns_totals {
            max_norm = max_norm.max((x.to_f64() - 1.0).abs());
        }
    }
    s.max_relative_delta = ExtReal::from(max_delta);
    s.max_normalization_error = ExtReal::from(max_norm);
    let passed = s.failures == 0;
    Ok(VerifyReport { options: opts.clone(), summary: s, trials, passed })
}

impl VerifyReport {
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let o = &self.options;
        let s = &self.summary;
        let _ = writeln!(
            out,
            "verify: trials {} seed {} max-blocks {} max-dim {} weights {}:{} ranks {:?} tol {:e}",
            o.trials, o.seed, o.max_blocks, o.max_dim, o.weight_range.0, o.weight_range.1, o.ranks, o.tol
        );
        let _ = writeln!(out, "route agreement failures   {}", s.agreement_failures);
        let _ = writeln!(out, "normalization failures     {}", s.normalization_failures);
        let _ = writeln!(out, "support defect mismatches  {}", s.defect_failures);
        let _ = writeln!(out, "jensen bound failures      {}", s.jensen_failures);
        let _ = writeln!(out, "abelian reduction failures {}", s.abelian_failures);
        let _ = writeln!(out, "trial errors               {}", s.errors);
        let _ = writeln!(out, "pairs where both are +inf  {}", s.infinite_pairs);
        let _ = writeln!(out, "max relative delta         {:.3e}", s.max_relative_delta.to_f64());
        let _ = writeln!(out, "max normalization error    {:.3e}", s.max_normalization_error.to_f64());
        for t in self.trials.iter().filter(|t| !t.passed) {
            let _ = writeln!(
                out,
                "FAILED trial {}: dims {:?} ranks {:?}/{:?} {}",
                t.trial,
                t.dims,
                t.phi_ranks,
                t.omega_ranks,
                t.error.as_deref().unwrap_or("")
            );
            for d in t.divergences.iter().filter(|d| !d.agree || !d.jensen || d.abelian == Some(false)) {
                let _ = writeln!(out, "  {}: ns {} direct {}", d.name, d.ns, d.direct);
            }
        }
        let _ = writeln!(out, "failures: {} / {}", s.failures, s.trials);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityOptions {
    pub trials: usize,
    pub seed: u64,
    pub max_blocks: usize,
    pub max_dim: usize,
    pub weight_range: (f64, f64),
    pub tol: f64,
}

impl Default for InequalityOptions {
    fn default() -> Self {
        InequalityOptions { trials: 200, seed: 7, max_blocks: 3, max_dim: 4, weight_range: (0.5, 2.0), tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityTrial {
    pub trial: usize,
    pub dims: Vec<usize>,
    pub relative_entropy: ExtReal,
    pub chi_squared: ExtReal,
    pub total_variation: ExtReal,
    /// `ln(1 + χ²)`.
    pub log_bound: ExtReal,
    /// `(TV + χ²) / 2`.
    pub mixed_bound: ExtReal,
    pub log_bound_holds: bool,
    pub mixed_bound_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub options: InequalityOptions,
    pub trials: Vec<InequalityTrial>,
    pub log_bound_violations: usize,
    pub mixed_bound_violations: usize,
    pub vacuous: usize,
    pub passed: bool,
}

/// `lhs ≤ rhs + tol`, vacuous when `rhs = +∞`.
fn bounded(lhs: ExtReal, rhs: ExtReal, tol: f64) -> bool {
    match (lhs, rhs) {
        (_, ExtReal::PosInf) => true,
        (ExtReal::PosInf, _) => false,
        (ExtReal::Finite(x), ExtReal::Finite(y)) => x <= y + tol,
    }
}

fn inequality_trial(opts: &InequalityOptions, index: usize) -> Result<InequalityTrial> {
    let vo = VerifyOptions {
        trials: opts.trials,
        seed: opts.seed,
        max_blocks: opts.max_blocks,
        max_dim: opts.max_dim,
        weight_range: opts.weight_range,
        ranks: RankPolicy::Full,
        tol: opts.tol,
    };
    let case = random_trial(&vo, index)?;
    let ns = ns_distributions(&case.algebra, &case.phi, &case.omega)?;
    let value = |name: &str| -> Result<ExtReal> { Ok(divergence_from_ns(&ns, &catalog(name, None)?)?.value) };
    let d = value("relative-entropy")?;
    let chi = value("chi-squared")?;
    let tv = value("total-variation")?;
    let log_bound = match chi {
        ExtReal::Finite(c) => ExtReal::Finite(c.ln_1p()),
        ExtReal::PosInf => ExtReal::PosInf,
    };
    let mixed_bound = match (tv, chi) {
        (ExtReal::Finite(t), ExtReal::Finite(c)) => ExtReal::Finite(0.5 * (t + c)),
        _ => ExtReal::PosInf,
    };
    Ok(InequalityTrial {
        trial: index,
        dims: case.algebra.dims(),
        relative_entropy: d,
        chi_squared: chi,
        total_variation: tv,
        log_bound,
        mixed_bound,
        log_bound_holds: bounded(d, log_bound, opts.tol),
        mixed_bound_holds: bounded(d, mixed_bound, opts.tol),
    })
}

/// Checks `D ≤ ln(1 + χ²)` and `D ≤ (TV + χ²)/2` on random full-rank pairs.
pub fn inequalities(opts: &InequalityOptions) -> std::result::Result<InequalityReport, CliError> {
    if opts.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let trials = (0..opts.trials).into_par_iter().map(|i| inequality_trial(opts, i)).collect::<Result<Vec<_>>>()?;
    let log_bound_violations = trials.iter().filter(|t| !t.log_bound_holds).count();
    let mixed_bound_violations = trials.iter().filter(|t| !t.mixed_bound_holds).count();
    let vacuous = trials.iter().filter(|t| t.chi_squared.is_infinite()).count();
    Ok(InequalityReport {
        options: opts.clone(),
        passed: log_bound_violations == 0 && mixed_bound_violations == 0,
        trials,
        log_bound_violations,
        mixed_bound_violations,
        vacuous,
    })
}

impl InequalityReport {
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let o = &self.options;
        let _ = writeln!(out, "inequalities: trials {} seed {} tol {:e}", o.trials, o.seed, o.tol);
        let tightest = |f: fn(&InequalityTrial) -> (ExtReal, ExtReal)| {
            self.trials
                .iter()
                .filter_map(|t| {
                    let (lhs, rhs) = f(t);
                    Some(rhs.as_finite()? - lhs.as_finite()?)
                })
                .fold(f64::INFINITY, f64::min)
        };
        let _ = writeln!(
            out,
            "D <= ln(1 + chi2)        violations {}  smallest gap {:.3e}",
            self.log_bound_violations,
            tightest(|t| (t.relative_entropy, t.log_bound))
        );
        let _ = writeln!(
            out,
            "D <= (TV + chi2) / 2     violations {}  smallest gap {:.3e}",
            self.mixed_bound_violations,
            tightest(|t| (t.relative_entropy, t.mixed_bound))
        );
        let _ = writeln!(out, "vacuous (chi2 = +inf)    {}", self.vacuous);
        let _ = writeln!(out, "status: {}", if self.passed { "ok" } else { "VIOLATED" });
        out
    }
}
