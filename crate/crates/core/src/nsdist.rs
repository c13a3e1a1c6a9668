//! Nussbaum-Szkoła distributions on a finite semifinite algebra.
//!
//! In block `k`, write `ξ_φ = Σ_i α_i u_i u_i*` and `ξ_ω = Σ_j β_j v_j v_j*`.
//! Left multiplication by `ξ_φ` and right multiplication by `ξ_ω` are
//! diagonalized jointly by the rank-one matrices `u_i v_j*`. The map
//! `U(a)(k, i, j) = u_i* a_k v_j` with counting measure `μ({(k,i,j)}) = t_k`
//! is unitary from `L₂(M, τ)` onto `L₂(X, μ)`, and turns `ξ_φ`, `ξ_ω` into
//! the coordinate functions `g_φ = α_i`, `g_ω = β_j`.
//!
//! The densities are `f_φ = α_i²`, `f_ω = β_j²`, and the measure `ν` is
//! `t_k · |⟨u_i, v_j⟩|²` except on atoms where both densities vanish.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::{trace, AlgebraSpec, CMatrix, State};
use crate::error::{Error, Result};
use crate::spectral::{kernel_projection, BlockSpectrum};

/// Joint spectral data of `ξ_φ` (left) and `ξ_ω` (right) on one block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPair {
    pub weight: f64,
    /// Eigenvalues of `ξ_φ`, zero outside the support.
    pub alpha: Vec<f64>,
    pub u: CMatrix,
    /// Eigenvalues of `ξ_ω`, zero outside the support.
    pub beta: Vec<f64>,
    pub v: CMatrix,
    /// `overlap[(i, j)] = |⟨u_i, v_j⟩|²`, doubly stochastic.
    pub overlap: DMatrix<f64>,
}

impl BlockPair {
    /// Assembles a pair from two eigenbases and recomputes the overlaps.
    pub fn new(weight: f64, alpha: Vec<f64>, u: CMatrix, beta: Vec<f64>, v: CMatrix) -> Result<Self> {
        let n = alpha.len();
        if beta.len() != n || u.shape() != (n, n) || v.shape() != (n, n) {
            return Err(Error::ShapeMismatch(format!(
                "inconsistent block data: {} alphas, {} betas, u {:?}, v {:?}",
                n,
                beta.len(),
                u.shape(),
                v.shape()
            )));
        }
        if alpha.iter().chain(&beta).any(|&x| !(x >= 0.0 && x.is_finite())) {
            return Err(Error::NonFinite(
                "eigenvalues of vector representatives must be finite and nonnegative".into(),
            ));
        }
        let inner = u.adjoint() * &v;
        let overlap = DMatrix::from_fn(n, n, |i, j| inner[(i, j)].norm_sqr());
        Ok(BlockPair { weight, alpha, u, beta, v, overlap })
    }

    fn from_spectra(weight: f64, phi: &BlockSpectrum, omega: &BlockSpectrum) -> Result<Self> {
        Self::new(weight, phi.clamped_values(), phi.vectors.clone(), omega.clamped_values(), omega.vectors.clone())
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    /// Largest deviation of an overlap row or column sum from 1.
    pub fn stochastic_defect(&self) -> f64 {
        let n = self.dim();
        let rows = (0..n).map(|i| (self.overlap.row(i).sum() - 1.0).abs());
        let cols = (0..n).map(|j| (self.overlap.column(j).sum() - 1.0).abs());
        rows.chain(cols).fold(0.0, f64::max)
    }
}

/// Simultaneous diagonalization data for a pair of states, one entry per block.
#[derive(Debug, Clone, PartialEq)]
pub struct SimultaneousSpectrum {
    pub blocks: Vec<BlockPair>,
}

/// One point `(k, i, j)` of the finite measure space `X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub block: usize,
    pub i: usize,
    pub j: usize,
    /// `ν({(k, i, j)})`.
    pub nu: f64,
    /// `f_φ = α_i²`.
    pub fphi: f64,
    /// `f_ω = β_j²`.
    pub fomega: f64,
    pub overlap: f64,
}

/// The measure `ν` and the densities `f_φ`, `f_ω` as a list of atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NsOutput {
    /// Atoms in `(block, i, j)` lexicographic order, including null atoms.
    pub atoms: Vec<Atom>,
    /// `ω(1 − s(φ)) = ∫_{f_φ = 0} f_ω dν`.
    pub omega_off_phi_support: f64,
    /// `φ(1 − s(ω)) = ∫_{f_ω = 0} f_φ dν`.
    pub phi_off_omega_support: f64,
}

impl NsOutput {
    /// `∫ f_φ dν`, which equals 1 for a state.
    pub fn phi_total(&self) -> f64 {
        self.atoms.iter().map(|a| a.fphi * a.nu).sum()
    }

    /// `∫ f_ω dν`.
    pub fn omega_total(&self) -> f64 {
        self.atoms.iter().map(|a| a.fomega * a.nu).sum()
    }

    /// Point masses `(f_φ ν, f_ω ν)` of the two classical distributions.
    pub fn masses(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.atoms.iter().map(|a| (a.fphi * a.nu, a.fomega * a.nu))
    }
}

/// Diagonalizes `ξ_φ` and `ξ_ω` block by block and records their overlaps.
pub fn simultaneous_spectrum(spec: &AlgebraSpec, phi: &State, omega: &State) -> Result<SimultaneousSpectrum> {
    spec.check(phi.h())?;
    spec.check(omega.h())?;
    let blocks = spec
        .blocks()
        .iter()
        .zip(phi.xi_spectrum().blocks.iter().zip(&omega.xi_spectrum().blocks))
        .map(|(b, (p, o))| BlockPair::from_spectra(b.weight, p, o))
        .collect::<Result<Vec<_>>>()?;
    Ok(SimultaneousSpectrum { blocks })
}

/// Builds the atoms of `(X, ν)` with the densities `f_φ`, `f_ω`.
///
/// On `{f_ω > 0}` the density of `ν` is `|Uξ_ω|²/f_ω`, on
/// `{f_φ > 0, f_ω = 0}` it is `|Uξ_φ|²/f_φ`; with `Uξ_ω(k,i,j) = β_j ⟨u_i, v_j⟩`
/// and `Uξ_φ(k,i,j) = α_i ⟨u_i, v_j⟩` both reduce to `t_k · |⟨u_i, v_j⟩|²`.
pub fn build_ns(spec: &AlgebraSpec, sim: &SimultaneousSpectrum) -> Result<NsOutput> {
    if sim.blocks.len() != spec.num_blocks() {
        return Err(Error::ShapeMismatch(format!(
            "spectrum has {} blocks, algebra has {}",
            sim.blocks.len(),
            spec.num_blocks()
        )));
    }
    let mut atoms = Vec::with_capacity(sim.blocks.iter().map(|b| b.dim() * b.dim()).sum());
    let mut omega_off_phi_support = 0.0;
    let mut phi_off_omega_support = 0.0;
    for (k, (pair, blk)) in sim.blocks.iter().zip(spec.blocks()).enumerate() {
        if pair.dim() != blk.dim {
            return Err(Error::ShapeMismatch(format!(
                "block {k}: spectrum of size {} for dimension {}",
                pair.dim(),
                blk.dim
            )));
        }
        for (i, &a) in pair.alpha.iter().enumerate() {
            for (j, &b) in pair.beta.iter().enumerate() {
                let overlap = pair.overlap[(i, j)];
                let nu = if a > 0.0 || b > 0.0 { blk.weight * overlap } else { 0.0 };
                let atom = Atom { block: k, i, j, nu, fphi: a * a, fomega: b * b, overlap };
                if a == 0.0 {
                    omega_off_phi_support += atom.fomega * nu;
                }
                if b == 0.0 {
                    phi_off_omega_support += atom.fphi * nu;
                }
                atoms.push(atom);
            }
        }
    }
    Ok(NsOutput { atoms, omega_off_phi_support, phi_off_omega_support })
}

/// Convenience: [`simultaneous_spectrum`] followed by [`build_ns`].
pub fn ns_distributions(spec: &AlgebraSpec, phi: &State, omega: &State) -> Result<NsOutput> {
    build_ns(spec, &simultaneous_spectrum(spec, phi, omega)?)
}

/// `(ω(1 − s(φ)), φ(1 − s(ω)))` computed as trace pairings with kernel
/// projections, without going through the atoms.
pub fn support_defects_direct(spec: &AlgebraSpec, phi: &State, omega: &State) -> Result<(f64, f64)> {
    let off_phi = trace(spec, &omega.h().mul(&kernel_projection(spec, phi)))?.re;
    let off_omega = trace(spec, &phi.h().mul(&kernel_projection(spec, omega)))?.re;
    Ok((off_phi.clamp(0.0, 1.0), off_omega.clamp(0.0, 1.0)))
}
