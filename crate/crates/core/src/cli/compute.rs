use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::problem::{AlgebraDesc, BlockDesc, Problem};
use super::CliError;
use crate::divergence::{
    catalog, divergence_from_ns, relative_modular_spectrum, values_agree, ConvexFunctionSpec, DivergenceResult,
};
use crate::extreal::ExtReal;
use crate::nsdist::{ns_distributions, support_defects_direct};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RouteChoice {
    Ns,
    Direct,
    Both,
}

impl RouteChoice {
    fn ns(self) -> bool {
        matches!(self, RouteChoice::Ns | RouteChoice::Both)
    }

    fn direct(self) -> bool {
        matches!(self, RouteChoice::Direct | RouteChoice::Both)
    }
}

impl std::str::FromStr for RouteChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "ns" => Ok(RouteChoice::Ns),
            "direct" => Ok(RouteChoice::Direct),
            "both" => Ok(RouteChoice::Both),
            other => Err(CliError::Usage(format!("unknown route {other:?}, expected ns, direct or both"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComputeOptions {
    pub divergences: Vec<String>,
    /// Exponent for the `power` family.
    pub alpha: Option<f64>,
    pub route: RouteChoice,
    pub tol: f64,
    /// Include the Nussbaum-Szkoła atom table.
    pub atoms: bool,
    /// Petz-Rényi order in `(1, 2]`.
    pub renyi: Option<f64>,
}

impl Default for ComputeOptions {
    fn default() -> Self {
        ComputeOptions {
            divergences: vec!["relative-entropy".into()],
            alpha: None,
            route: RouteChoice::Both,
            tol: 1e-8,
            atoms: false,
            renyi: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceEntry {
    pub name: String,
    pub f_at_one: ExtReal,
    pub ns: Option<DivergenceResult>,
    pub direct: Option<DivergenceResult>,
    /// `|ns − direct|`, only when both routes ran.
    pub delta: Option<ExtReal>,
    pub agree: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenyiEntry {
    pub alpha: f64,
    pub ns: Option<ExtReal>,
    pub direct: Option<ExtReal>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectPair {
    /// `ω(1 − s(φ))`.
    pub omega_off_phi_support: ExtReal,
    /// `φ(1 − s(ω))`.
    pub phi_off_omega_support: ExtReal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomRow {
    pub block: usize,
    pub i: usize,
    pub j: usize,
    pub nu: ExtReal,
    pub fphi: ExtReal,
    pub fomega: ExtReal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComputeReport {
    pub algebra: AlgebraDesc,
    pub route: RouteChoice,
    pub tol: f64,
    /// `(∫ f_φ dν, ∫ f_ω dν)`.
    pub ns_totals: Option<[ExtReal; 2]>,
    pub ns_defects: Option<DefectPair>,
    pub direct_defects: Option<DefectPair>,
    pub divergences: Vec<DivergenceEntry>,
    pub renyi: Option<RenyiEntry>,
    pub atoms: Option<Vec<AtomRow>>,
    pub passed: bool,
}

fn delta(a: ExtReal, b: ExtReal) -> ExtReal {
    match (a, b) {
        (ExtReal::Finite(x), ExtReal::Finite(y)) => ExtReal::Finite((x - y).abs()),
        (ExtReal::PosInf, ExtReal::PosInf) => ExtReal::ZERO,
        _ => ExtReal::PosInf,
    }
}

/// `ln(S_{t^α}) / (α − 1)`.
fn renyi_from_power(value: ExtReal, alpha: f64) -> ExtReal {
    match value {
        ExtReal::Finite(s) => ExtReal::Finite(s.ln() / (alpha - 1.0)),
        ExtReal::PosInf => ExtReal::PosInf,
    }
}

fn invalid(path: &str, e: crate::error::Error) -> CliError {
    CliError::Validation { path: path.into(), source: e }
}

/// Computes the requested divergences of a parsed problem.
pub fn compute(problem: &Problem, opts: &ComputeOptions) -> Result<ComputeReport, CliError> {
    if opts.divergences.is_empty() {
        return Err(CliError::Usage("no divergence requested".into()));
    }
    let functions = opts
        .divergences
        .iter()
        .map(|name| catalog(name, opts.alpha).map_err(|e| invalid("--f", e)))
        .collect::<Result<Vec<ConvexFunctionSpec>, _>>()?;
    let renyi_fn = opts.renyi.map(|a| catalog("power", Some(a)).map_err(|e| invalid("--renyi", e))).transpose()?;

    let Problem { algebra, phi, omega } = problem;
    let ns = if opts.route.ns() { Some(ns_distributions(algebra, phi, omega)?) } else { None };
    let modular = if opts.route.direct() { Some(relative_modular_spectrum(algebra, phi, omega)?) } else { None };

    let mut entries = Vec::with_capacity(functions.len());
    let mut passed = true;
    for f in &functions {
        let ns_result = ns.as_ref().map(|n| divergence_from_ns(n, f)).transpose()?;
        let direct_result = modular.as_ref().map(|m| m.divergence(f)).transpose()?;
        let (d, agree) = match (&ns_result, &direct_result) {
            (Some(a), Some(b)) => (Some(delta(a.value, b.value)), Some(values_agree(a.value, b.value, opts.tol))),
            _ => (None, None),
        };
        passed &= agree.unwrap_or(true);
        entries.push(DivergenceEntry {
            name: f.label(),
            f_at_one: ExtReal::Finite(f.at_one()),
            ns: ns_result,
            direct: direct_result,
            delta: d,
            agree,
        });
    }

    let renyi = match &renyi_fn {
        Some(f) => {
            let alpha = f.parameter().expect("power carries its exponent");
            let ns_value = ns.as_ref().map(|n| divergence_from_ns(n, f)).transpose()?;
            let direct_value = modular.as_ref().map(|m| m.divergence(f)).transpose()?;
            Some(RenyiEntry {
                alpha,
                ns: ns_value.map(|r| renyi_from_power(r.value, alpha)),
                direct: direct_value.map(|r| renyi_from_power(r.value, alpha)),
            })
        }
        None => None,
    };

    let direct_defects = if opts.route.direct() {
        let (a, b) = support_defects_direct(algebra, phi, omega)?;
        Some(DefectPair { omega_off_phi_support: ExtReal::Finite(a), phi_off_omega_support: ExtReal::Finite(b) })
    } else {
        None
    };

    Ok(ComputeReport {
        algebra: AlgebraDesc {
            blocks: algebra.blocks().iter().map(|b| BlockDesc { dim: b.dim, weight: b.weight }).collect(),
        },
        route: opts.route,
        tol: opts.tol,
        ns_totals: ns.as_ref().map(|n| [ExtReal::Finite(n.phi_total()), ExtReal::Finite(n.omega_total())]),
        ns_defects: ns.as_ref().map(|n| DefectPair {
            omega_off_phi_support: ExtReal::Finite(n.omega_off_phi_support),
            phi_off_omega_support: ExtReal::Finite(n.phi_off_omega_support),
        }),
        direct_defects,
        divergences: entries,
        renyi,
        atoms: match (&ns, opts.atoms) {
            (Some(n), true) => Some(
                n.atoms
                    .iter()
                    .map(|a| AtomRow {
                        block: a.block,
                        i: a.i,
                        j: a.j,
                        nu: ExtReal::Finite(a.nu),
                        fphi: ExtReal::Finite(a.fphi),
                        fomega: ExtReal::Finite(a.fomega),
                    })
                    .collect(),
            ),
            _ => None,
        },
        passed,
    })
}

fn opt(x: Option<ExtReal>) -> String {
    x.map(|v| format!("{v:.12}")).unwrap_or_else(|| "-".into())
}

impl ComputeReport {
    /// Human-readable table.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let blocks: Vec<String> = self.algebra.blocks.iter().map(|b| format!("M{}[t={}]", b.dim, b.weight)).collect();
        let _ = writeln!(out, "algebra: {}", blocks.join(" + "));
        if let Some([p, q]) = self.ns_totals {
            let _ = writeln!(out, "ns totals: phi {p:.12}  omega {q:.12}");
        }
        for (label, d) in [("ns", &self.ns_defects), ("direct", &self.direct_defects)] {
            if let Some(d) = d {
                let _ = writeln!(
                    out,
                    "support defects ({label}): omega(1-s(phi)) {:.12}  phi(1-s(omega)) {:.12}",
                    d.omega_off_phi_support, d.phi_off_omega_support
                );
            }
        }
        let _ = writeln!(
            out,
            "{:<20} {:>20} {:>20} {:>12} {:>20} {:>20} {:>20}",
            "divergence", "ns", "direct", "delta", "main", "f(0+) term", "f'(inf) term"
        );
        for e in &self.divergences {
            let terms = e.ns.or(e.direct);
            let _ = writeln!(
                out,
                "{:<20} {:>20} {:>20} {:>12} {:>20} {:>20} {:>20}",
                e.name,
                opt(e.ns.map(|r| r.value)),
                opt(e.direct.map(|r| r.value)),
                e.delta.map(|d| format!("{:.2e}", d.to_f64())).unwrap_or_else(|| "-".into()),
                opt(terms.map(|r| r.term_main)),
                opt(terms.map(|r| r.term_f0)),
                opt(terms.map(|r| r.term_fpinf)),
            );
        }
        if let Some(r) = &self.renyi {
            let _ = writeln!(out, "petz-renyi(alpha={}): ns {}  direct {}", r.alpha, opt(r.ns), opt(r.direct));
        }
        if let Some(atoms) = &self.atoms {
            let _ =
                writeln!(out, "{:>5} {:>3} {:>3} {:>20} {:>20} {:>20}", "block", "i", "j", "nu", "f_phi", "f_omega");
            for a in atoms {
                let _ = writeln!(
                    out,
                    "{:>5} {:>3} {:>3} {:>20.12} {:>20.12} {:>20.12}",
                    a.block, a.i, a.j, a.nu, a.fphi, a.fomega
                );
            }
        }
        let _ = writeln!(out, "status: {}", if self.passed { "ok" } else { "ROUTES DISAGREE" });
        out
    }
}
