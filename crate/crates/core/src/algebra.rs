//! Finite-dimensional semifinite von Neumann algebras.
//!
//! An algebra is a direct sum of full matrix blocks `M_{n_1} ⊕ … ⊕ M_{n_K}`
//! carrying the faithful trace `τ(x) = Σ_k t_k · Tr(x_k)` with positive
//! weights `t_k`. In finite dimensions the algebra, its `L_p` spaces and the
//! standard Hilbert space `L_2(M, τ)` coincide as sets, so [`Element`] serves
//! for all of them.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::spectral::{self, BlockSpectrum, SpectralData};
use crate::tolerance;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// One matrix block `M_n` with trace weight `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    pub dim: usize,
    pub weight: f64,
}

/// A weighted direct sum of matrix blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraSpec {
    blocks: Vec<Block>,
}

impl AlgebraSpec {
    /// Builds an algebra from `(dim, weight)` pairs.
    pub fn new(blocks: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let blocks: Vec<Block> = blocks.into_iter().map(|(dim, weight)| Block { dim, weight }).collect();
        if blocks.is_empty() {
            return Err(Error::InvalidAlgebra("at least one block is required".into()));
        }
        for (k, b) in blocks.iter().enumerate() {
            if b.dim == 0 {
                return Err(Error::InvalidAlgebra(format!("block {k} has dimension 0")));
            }
            if !(b.weight.is_finite() && b.weight > 0.0) {
                return Err(Error::InvalidAlgebra(format!(
                    "block {k} has weight {}, expected a finite positive real",
                    b.weight
                )));
            }
        }
        Ok(AlgebraSpec { blocks })
    }

    /// `B(ℂⁿ)` with the usual trace.
    pub fn matrix_algebra(n: usize) -> Self {
        Self::new([(n, 1.0)]).expect("n must be positive")
    }

    /// The abelian algebra `ℂ^K` with point weights.
    pub fn abelian(weights: &[f64]) -> Result<Self> {
        Self::new(weights.iter().map(|&w| (1, w)))
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.dim).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.weight).collect()
    }

    /// Checks that `x` has one block of the right shape per algebra block.
    pub fn check(&self, x: &Element) -> Result<()> {
        if x.blocks.len() != self.blocks.len() {
            return Err(Error::ShapeMismatch(format!(
                "element has {} blocks, algebra has {}",
                x.blocks.len(),
                self.blocks.len()
            )));
        }
        for (k, (m, b)) in x.blocks.iter().zip(&self.blocks).enumerate() {
            if m.nrows() != b.dim || m.ncols() != b.dim {
                return Err(Error::ShapeMismatch(format!(
                    "block {k} is {}x{}, expected {}x{}",
                    m.nrows(),
                    m.ncols(),
                    b.dim,
                    b.dim
                )));
            }
        }
        Ok(())
    }
}

/// An element of the algebra: one square complex matrix per block.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    blocks: Vec<CMatrix>,
}

impl Element {
    /// Validates shapes against `spec` and rejects non-finite entries.
    pub fn from_blocks(spec: &AlgebraSpec, blocks: Vec<CMatrix>) -> Result<Self> {
        let x = Element { blocks };
        spec.check(&x)?;
        for (k, b) in x.blocks.iter().enumerate() {
            if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite(format!("block {k} has a non-finite entry")));
            }
        }
        Ok(x)
    }

    pub(crate) fn from_blocks_unchecked(blocks: Vec<CMatrix>) -> Self {
        Element { blocks }
    }

    pub fn zeros(spec: &AlgebraSpec) -> Self {
        Element { blocks: spec.blocks.iter().map(|b| CMatrix::zeros(b.dim, b.dim)).collect() }
    }

    pub fn identity(spec: &AlgebraSpec) -> Self {
        Element { blocks: spec.blocks.iter().map(|b| CMatrix::identity(b.dim, b.dim)).collect() }
    }

    /// Block-diagonal element with the given real diagonals.
    pub fn from_real_diagonals(spec: &AlgebraSpec, diagonals: &[&[f64]]) -> Result<Self> {
        let blocks = diagonals
            .iter()
            .map(|d| {
                let n = d.len();
                CMatrix::from_fn(n, n, |i, j| if i == j { C64::new(d[i], 0.0) } else { C64::new(0.0, 0.0) })
            })
            .collect();
        Self::from_blocks(spec, blocks)
    }

    /// `|ψ⟩⟨ψ|` in a single-block algebra.
    pub fn projector(spec: &AlgebraSpec, block: usize, psi: &[C64]) -> Result<Self> {
        let mut x = Self::zeros(spec);
        let target = x.blocks.get_mut(block).ok_or_else(|| Error::ShapeMismatch(format!("no block {block}")))?;
        if psi.len() != target.nrows() {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} for a {}-dimensional block",
                psi.len(),
                target.nrows()
            )));
        }
        let v = nalgebra::DVector::from_column_slice(psi);
        *target = &v * v.adjoint();
        Ok(x)
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<CMatrix> {
        self.blocks
    }

    fn zip_with(&self, other: &Element, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Element {
        assert_eq!(self.blocks.len(), other.blocks.len(), "block count mismatch");
        Element { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect() }
    }

    pub fn add(&self, other: &Element) -> Element {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.zip_with(other, |a, b| a - b)
    }

    /// Blockwise matrix product.
    pub fn mul(&self, other: &Element) -> Element {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Element {
        Element { blocks: self.blocks.iter().map(|b| b * C64::new(c, 0.0)).collect() }
    }

    pub fn adjoint(&self) -> Element {
        Element { blocks: self.blocks.iter().map(|b| b.adjoint()).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().flat_map(|b| b.iter()).map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &Element) -> f64 {
        self.sub(other).max_abs()
    }

    /// Checks `U*U = 1` per block within the functional-calculus tolerance.
    pub fn check_unitary(&self) -> Result<()> {
        for (k, u) in self.blocks.iter().enumerate() {
            let n = u.nrows();
            let deviation = (u.adjoint() * u - CMatrix::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if u.ncols() != n || deviation > tolerance::FUNC_CALC {
                return Err(Error::NotUnitary { block: k, deviation });
            }
        }
        Ok(())
    }
}

/// `τ(x) = Σ_k t_k Tr(x_k)`.
pub fn trace(spec: &AlgebraSpec, x: &Element) -> Result<C64> {
    spec.check(x)?;
    Ok(spec.blocks.iter().zip(&x.blocks).map(|(b, m)| m.trace() * b.weight).sum())
}

/// `⟨a, b⟩ = τ(a* b)`, conjugate-linear in `a`.
pub fn inner(spec: &AlgebraSpec, a: &Element, b: &Element) -> Result<C64> {
    spec.check(a)?;
    spec.check(b)?;
    // Tr(a* b) = Σ_ij conj(a_ij) b_ij, without forming the product.
    Ok(spec
        .blocks
        .iter()
        .zip(a.blocks.iter().zip(&b.blocks))
        .map(|(blk, (x, y))| x.iter().zip(y.iter()).map(|(p, q)| p.conj() * q).sum::<C64>() * blk.weight)
        .sum())
}

/// A normal state given by its density `h` and vector representative `ξ = h^{1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    h: Element,
    xi: Element,
    xi_spectrum: SpectralData,
}

impl State {
    /// Density `h ∈ L₁(M, τ)₊` with `τ(h) = 1`.
    pub fn h(&self) -> &Element {
        &self.h
    }

    /// Vector representative `ξ ∈ L₂(M, τ)₊` with `ξ² = h`.
    pub fn xi(&self) -> &Element {
        &self.xi
    }

    /// Eigenpairs of `ξ`: square roots of the cleaned eigenvalues of `h`
    /// together with the eigenvectors of `h`.
    pub fn xi_spectrum(&self) -> &SpectralData {
        &self.xi_spectrum
    }

    /// `φ(x) = τ(h x)`.
    pub fn expect(&self, spec: &AlgebraSpec, x: &Element) -> Result<f64> {
        Ok(trace(spec, &self.h.mul(x))?.re)
    }
}

/// Validates a density and builds the corresponding [`State`].
///
/// Eigenvalues of magnitude at most `PSD · λmax` are set to zero and the
/// cleaned density is rescaled to exact unit trace.
pub fn validate_state(spec: &AlgebraSpec, h: &Element, renormalize: bool) -> Result<State> {
    spec.check(h)?;
    let data = spectral::eigh(spec, h)?;

    let lambda_max = data.blocks.iter().map(BlockSpectrum::max_value).fold(0.0, f64::max);
    let psd_cut = tolerance::PSD * lambda_max;
    for (k, b) in data.blocks.iter().enumerate() {
        if let Some(&low) = b.values.first() {
            if low < -psd_cut {
                return Err(Error::NotPositive { block: k, eigenvalue: low });
            }
        }
    }

    let tr = trace(spec, h)?.re;
    if tr.abs() < tolerance::NORM || lambda_max <= 0.0 {
        return Err(Error::ZeroTrace);
    }
    if !renormalize && (tr - 1.0).abs() > tolerance::NORM {
        return Err(Error::NotNormalized { trace: tr });
    }

    let mut cleaned = data;
    for b in &mut cleaned.blocks {
        for l in &mut b.values {
            if l.abs() <= psd_cut {
                *l = 0.0;
            }
        }
    }
    let cleaned_trace: f64 =
        spec.blocks.iter().zip(&cleaned.blocks).map(|(blk, b)| blk.weight * b.values.iter().sum::<f64>()).sum();
    for b in &mut cleaned.blocks {
        for l in &mut b.values {
            *l /= cleaned_trace;
        }
    }

    let h = cleaned.reconstruct();
    let xi_spectrum = SpectralData {
        blocks: cleaned
            .blocks
            .iter()
            .map(|b| BlockSpectrum { values: b.values.iter().map(|l| l.sqrt()).collect(), vectors: b.vectors.clone() })
            .collect(),
    };
    let xi = xi_spectrum.reconstruct();
    Ok(State { h, xi, xi_spectrum })
}

/// Rank of each block's density in [`random_state`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RankProfile {
    Full,
    PerBlock(Vec<usize>),
}

fn gaussian_matrix(rng: &mut ChaCha20Rng, rows: usize, cols: usize) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * scale, im * scale)
    })
}

/// Draws `h_k = G_k G_k*` with `G_k` a `dim_k × r_k` complex Gaussian matrix,
/// normalized by `τ(h)`. Deterministic in `(spec, seed, ranks)`.
pub fn random_state(spec: &AlgebraSpec, seed: u64, ranks: &RankProfile) -> Result<State> {
    let ranks: Vec<usize> = match ranks {
        RankProfile::Full => spec.dims(),
        RankProfile::PerBlock(r) => {
            if r.len() != spec.num_blocks() {
                return Err(Error::InvalidRankProfile(format!("{} ranks for {} blocks", r.len(), spec.num_blocks())));
            }
            for (k, (&rank, dim)) in r.iter().zip(spec.dims()).enumerate() {
                if rank > dim {
                    return Err(Error::InvalidRankProfile(format!("rank {rank} exceeds dimension {dim} in block {k}")));
                }
            }
            r.clone()
        }
    };
    if ranks.iter().all(|&r| r == 0) {
        return Err(Error::InvalidRankProfile("all ranks are zero".into()));
    }

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let blocks: Vec<CMatrix> = spec
        .blocks
        .iter()
        .zip(&ranks)
        .map(|(b, &r)| {
            if r == 0 {
                return CMatrix::zeros(b.dim, b.dim);
            }
            let g = gaussian_matrix(&mut rng, b.dim, r);
            let h = &g * g.adjoint();
            // exact Hermitian symmetry
            (&h + h.adjoint()) * C64::new(0.5, 0.0)
        })
        .collect();
    let h = Element { blocks };
    let tr = trace(spec, &h)?.re;
    validate_state(spec, &h.scale(1.0 / tr), true)
}

/// Haar-like random unitary per block (QR of a complex Gaussian matrix).
pub fn random_unitary(spec: &AlgebraSpec, seed: u64) -> Element {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let blocks = spec
        .blocks
        .iter()
        .map(|b| {
            let g = gaussian_matrix(&mut rng, b.dim, b.dim);
            let qr = g.qr();
            let (q, r) = (qr.q(), qr.r());
            // fix column phases so the distribution does not depend on QR conventions
            let mut q = q;
            for j in 0..b.dim {
                let d = r[(j, j)];
                let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
                q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
            }
            q
        })
        .collect();
    Element { blocks }
}

/// `U x U*` blockwise.
pub fn conjugate(u: &Element, x: &Element) -> Element {
    u.mul(x).mul(&u.adjoint())
}
