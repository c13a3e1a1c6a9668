//! Classical and quantum f-divergences.
//!
//! The quantum divergence is
//!
//! ```text
//! S_f(φ‖ω) = ⟨⟨ξ_ω | f(Δ_{φ,ω}) ξ_ω⟩⟩ + f(0⁺) ω(1 − s(φ)) + f′(+∞) φ(1 − s(ω))
//! ```
//!
//! and is computed two ways: from the Nussbaum-Szkoła atoms as a classical
//! divergence, and from an explicit eigendecomposition of the relative
//! modular operator in the matrix-unit basis. The two routes share no
//! intermediate spectral data beyond the states themselves.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSpec, CMatrix, State, C64};
use crate::error::{Error, Result};
use crate::extreal::{ext_add, ext_scale, ExtReal};
use crate::nsdist::{ns_distributions, support_defects_direct, NsOutput};
use crate::spectral::{hermitian_eigen, w_apply};
use crate::tolerance;

/// Names accepted by [`catalog`].
pub const CATALOG: [&str; 5] = ["relative-entropy", "chi-squared", "total-variation", "neg-log", "power"];

/// A convex `f: (0, ∞) → ℝ` with its limits `f(0⁺)` and `f′(+∞) = lim f(t)/t`.
#[derive(Clone)]
pub struct ConvexFunctionSpec {
    name: String,
    parameter: Option<f64>,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    f0: ExtReal,
    fpinf: ExtReal,
}

impl fmt::Debug for ConvexFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexFunctionSpec")
            .field("name", &self.name)
            .field("parameter", &self.parameter)
            .field("f0", &self.f0)
            .field("fpinf", &self.fpinf)
            .finish()
    }
}

impl ConvexFunctionSpec {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f0: ExtReal,
        fpinf: ExtReal,
    ) -> Self {
        ConvexFunctionSpec { name: name.into(), parameter: None, eval: Arc::new(eval), f0, fpinf }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn parameter(&self) -> Option<f64> {
        self.parameter
    }

    /// Name with its parameter, e.g. `power(1.5)`.
    pub fn label(&self) -> String {
        match self.parameter {
            Some(p) => format!("{}({p})", self.name),
            None => self.name.clone(),
        }
    }

    /// `f(0⁺)`.
    pub fn f0(&self) -> ExtReal {
        self.f0
    }

    /// `f′(+∞)`.
    pub fn fpinf(&self) -> ExtReal {
        self.fpinf
    }

    /// `f(t)`; a non-finite result is a numerical failure, not a `+∞`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let y = (self.eval)(t);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFinite(format!("{}({t}) = {y}", self.label())))
        }
    }

    pub fn at_one(&self) -> f64 {
        (self.eval)(1.0)
    }

    /// Midpoint convexity on every pair of the given points.
    pub fn is_midpoint_convex_on(&self, points: &[f64]) -> bool {
        points.iter().all(|&s| {
            points.iter().all(|&t| {
                let mid = (self.eval)(0.5 * (s + t));
                mid <= 0.5 * ((self.eval)(s) + (self.eval)(t)) + 1e-9
            })
        })
    }
}

/// Looks up a convex function by name. `power` takes its exponent in `(1, 2]`.
pub fn catalog(name: &str, parameter: Option<f64>) -> Result<ConvexFunctionSpec> {
    use ExtReal::{Finite, PosInf};
    let spec = match name {
        "relative-entropy" => ConvexFunctionSpec::new(name, |t: f64| t * t.ln(), Finite(0.0), PosInf),
        "chi-squared" => ConvexFunctionSpec::new(name, |t: f64| (t - 1.0) * (t - 1.0), Finite(1.0), PosInf),
        "total-variation" => ConvexFunctionSpec::new(name, |t: f64| (t - 1.0).abs(), Finite(1.0), Finite(1.0)),
        "neg-log" => ConvexFunctionSpec::new(name, |t: f64| -t.ln(), PosInf, Finite(0.0)),
        "power" => {
            let alpha = parameter.ok_or_else(|| Error::InvalidParameter("power needs an exponent".into()))?;
            if !(alpha > 1.0 && alpha <= 2.0) {
                return Err(Error::InvalidParameter(format!("power exponent {alpha} is outside (1, 2]")));
            }
            let mut f = ConvexFunctionSpec::new(name, move |t: f64| t.powf(alpha), Finite(0.0), PosInf);
            f.parameter = Some(alpha);
            return Ok(f);
        }
        other => return Err(Error::UnknownDivergence(other.to_string())),
    };
    Ok(spec)
}

/// Which computation produced a [`DivergenceResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Ns,
    Direct,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Ns => "ns",
            Route::Direct => "direct",
        })
    }
}

/// The value of a divergence together with its three terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceResult {
    pub value: ExtReal,
    pub term_main: ExtReal,
    pub term_f0: ExtReal,
    pub term_fpinf: ExtReal,
    pub route: Route,
}

impl DivergenceResult {
    fn from_terms(term_main: f64, term_f0: ExtReal, term_fpinf: ExtReal, route: Route) -> Self {
        let term_main = ExtReal::Finite(term_main);
        DivergenceResult {
            value: ext_add(ext_add(term_main, term_f0), term_fpinf),
            term_main,
            term_f0,
            term_fpinf,
            route,
        }
    }
}

/// One point of a discrete measure with densities `p`, `q` against `ν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalAtom {
    pub nu: f64,
    pub p: f64,
    pub q: f64,
}

/// `limit · mass`, with masses at round-off level treated as exactly zero.
fn boundary_term(mass: f64, limit: ExtReal) -> Result<ExtReal> {
    let mass = if mass <= tolerance::BOUNDARY_MASS { 0.0 } else { mass };
    ext_scale(mass, limit)
}

/// Terms `(Σ_{p,q>0} q f(p/q) ν, f(0⁺)·mass, f′(+∞)·mass)` of a classical divergence.
pub fn classical_f_div_terms(atoms: &[ClassicalAtom], f: &ConvexFunctionSpec) -> Result<(f64, ExtReal, ExtReal)> {
    let mut main = 0.0;
    let mut mass_f0 = 0.0;
    let mut mass_fpinf = 0.0;
    for (index, a) in atoms.iter().enumerate() {
        for (label, x) in [("nu", a.nu), ("p", a.p), ("q", a.q)] {
            if !(x.is_finite() && x >= 0.0) {
                return Err(Error::InvalidAtom { index, reason: format!("{label} = {x}") });
            }
        }
        match (a.p > 0.0, a.q > 0.0) {
            (true, true) => main += a.q * f.eval(a.p / a.q)? * a.nu,
            (false, true) => mass_f0 += a.q * a.nu,
            (true, false) => mass_fpinf += a.p * a.nu,
            // 0 f(0/0) = 0
            (false, false) => {}
        }
    }
    Ok((main, boundary_term(mass_f0, f.f0)?, boundary_term(mass_fpinf, f.fpinf)?))
}

/// `D_f(p dν ‖ q dν)`.
pub fn classical_f_div(atoms: &[ClassicalAtom], f: &ConvexFunctionSpec) -> Result<ExtReal> {
    let (main, a, b) = classical_f_div_terms(atoms, f)?;
    Ok(ext_add(ext_add(ExtReal::Finite(main), a), b))
}

/// Classical divergence of the Nussbaum-Szkoła pair already built in `ns`.
pub fn divergence_from_ns(ns: &NsOutput, f: &ConvexFunctionSpec) -> Result<DivergenceResult> {
    let atoms: Vec<ClassicalAtom> =
        ns.atoms.iter().map(|a| ClassicalAtom { nu: a.nu, p: a.fphi, q: a.fomega }).collect();
    let (main, t0, tinf) = classical_f_div_terms(&atoms, f)?;
    Ok(DivergenceResult::from_terms(main, t0, tinf, Route::Ns))
}

/// `S_f(φ‖ω)` as the classical divergence of the Nussbaum-Szkoła distributions.
pub fn quantum_f_div_ns(
    spec: &AlgebraSpec,
    phi: &State,
    omega: &State,
    f: &ConvexFunctionSpec,
) -> Result<DivergenceResult> {
    divergence_from_ns(&ns_distributions(spec, phi, omega)?, f)
}

/// Superoperator of `Δ^{1/2}: x ↦ ξ_φ x w(ξ_ω)` per block, acting on
/// row-major vectorized matrices.
pub fn relative_modular_half(spec: &AlgebraSpec, phi: &State, omega: &State) -> Result<Vec<CMatrix>> {
    spec.check(phi.xi())?;
    let w = w_apply(spec, omega.xi())?;
    Ok(phi
        .xi()
        .blocks()
        .iter()
        .zip(w.blocks())
        .map(|(left, right)| {
            let n = left.nrows();
            // (left · x · right)_{ab} = Σ_{cd} left_{ac} x_{cd} right_{db}
            CMatrix::from_fn(n * n, n * n, |r, c| {
                let (a, b) = (r / n, r % n);
                let (cc, d) = (c / n, c % n);
                left[(a, cc)] * right[(d, b)]
            })
        })
        .collect())
}

/// Spectral resolution of `Δ_{φ,ω}` restricted to what `⟨⟨ξ_ω|f(Δ)ξ_ω⟩⟩` needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularSpectrum {
    /// Per block: eigenvalues `λ_m` of `Δ` and spectral weights `|⟨Ψ_m, ξ_ω⟩_τ|²`.
    pub blocks: Vec<ModularBlock>,
    /// `(ω(1 − s(φ)), φ(1 − s(ω)))`.
    pub defects: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModularBlock {
    pub eigenvalues: Vec<f64>,
    pub weights: Vec<f64>,
    /// Eigenvalues at or below this count as zero.
    pub cut: f64,
}

impl ModularSpectrum {
    /// `Σ_{λ_m > 0} f(λ_m) |⟨Ψ_m, ξ_ω⟩_τ|²` summed over blocks.
    pub fn main_term(&self, f: &ConvexFunctionSpec) -> Result<f64> {
        let mut total = 0.0;
        for b in &self.blocks {
            for (&l, &w) in b.eigenvalues.iter().zip(&b.weights) {
                if l > b.cut {
                    total += f.eval(l)? * w;
                }
            }
        }
        Ok(total)
    }

    pub fn divergence(&self, f: &ConvexFunctionSpec) -> Result<DivergenceResult> {
        let main = self.main_term(f)?;
        let t0 = boundary_term(self.defects.0, f.f0())?;
        let tinf = boundary_term(self.defects.1, f.fpinf())?;
        Ok(DivergenceResult::from_terms(main, t0, tinf, Route::Direct))
    }
}

/// Builds `Δ = (Δ^{1/2})* Δ^{1/2}` per block and diagonalizes it.
///
/// Matrix units scaled by `t_k^{-1/2}` are orthonormal for `τ(a* b)`, so the
/// superoperator matrix is the same in either basis; only the pairing with
/// `ξ_ω` picks up the weight `t_k`.
pub fn relative_modular_spectrum(spec: &AlgebraSpec, phi: &State, omega: &State) -> Result<ModularSpectrum> {
    let halves = relative_modular_half(spec, phi, omega)?;
    let mut blocks = Vec::with_capacity(halves.len());
    for ((half, xi), blk) in halves.iter().zip(omega.xi().blocks()).zip(spec.blocks()) {
        let delta = half.adjoint() * half;
        let eig = hermitian_eigen(&delta)?;
        let vec_xi: Vec<C64> = xi.row_iter().flat_map(|r| r.iter().copied().collect::<Vec<_>>()).collect();
        let weights = (0..eig.dim())
            .map(|m| {
                let psi = eig.vectors.column(m);
                let overlap: C64 = psi.iter().zip(&vec_xi).map(|(p, x)| p.conj() * x).sum();
                blk.weight * overlap.norm_sqr()
            })
            .collect();
        let cut = tolerance::support_cut(eig.max_value());
        blocks.push(ModularBlock { eigenvalues: eig.values, weights, cut });
    }
    let defects = support_defects_direct(spec, phi, omega)?;
    Ok(ModularSpectrum { blocks, defects })
}

/// `S_f(φ‖ω)` from the spectral resolution of the relative modular operator.
pub fn quantum_f_div_direct(
    spec: &AlgebraSpec,
    phi: &State,
    omega: &State,
    f: &ConvexFunctionSpec,
) -> Result<DivergenceResult> {
    relative_modular_spectrum(spec, phi, omega)?.divergence(f)
}

/// Both finite and within `tol · max(1, |a|)`, or both `+∞`.
pub fn values_agree(a: ExtReal, b: ExtReal, tol: f64) -> bool {
    match (a, b) {
        (ExtReal::Finite(x), ExtReal::Finite(y)) => (x - y).abs() <= tol * x.abs().max(1.0),
        (ExtReal::PosInf, ExtReal::PosInf) => true,
        _ => false,
    }
}
