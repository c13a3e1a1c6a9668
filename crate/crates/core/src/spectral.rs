//! Hermitian eigendecomposition and functional calculus on block elements.
//!
//! Everything that decides whether an eigenvalue is zero goes through
//! [`crate::tolerance::in_support`].

use nalgebra::DMatrix;

use crate::algebra::{AlgebraSpec, CMatrix, Element, State, C64};
use crate::error::{Error, Result};
use crate::tolerance;

/// Eigenpairs of one Hermitian block, eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpectrum {
    pub values: Vec<f64>,
    /// Unitary matrix whose `i`-th column belongs to `values[i]`.
    pub vectors: CMatrix,
}

impl BlockSpectrum {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Largest eigenvalue, or 0 for an empty block.
    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// `V · diag(g(λ)) · V*`.
    pub fn reconstruct_with(&self, g: impl Fn(f64) -> f64) -> Result<CMatrix> {
        let n = self.dim();
        let mut gv = Vec::with_capacity(n);
        for &lambda in &self.values {
            let y = g(lambda);
            if !y.is_finite() {
                return Err(Error::NonFinite(format!("function evaluates to {y} at eigenvalue {lambda}")));
            }
            gv.push(y);
        }
        let mut scaled = self.vectors.clone();
        for (j, &y) in gv.iter().enumerate() {
            scaled.column_mut(j).scale_mut(y);
        }
        Ok(&scaled * self.vectors.adjoint())
    }

    /// Eigenvalues with everything at or below the support cut set to 0.
    pub fn clamped_values(&self) -> Vec<f64> {
        let max = self.max_value();
        self.values.iter().map(|&l| if tolerance::in_support(l, max) { l } else { 0.0 }).collect()
    }

    /// Indicator of the support for each eigenvalue.
    pub fn support_mask(&self) -> Vec<bool> {
        let max = self.max_value();
        self.values.iter().map(|&l| tolerance::in_support(l, max)).collect()
    }
}

/// Per-block eigendecomposition of a Hermitian element.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub blocks: Vec<BlockSpectrum>,
}

impl SpectralData {
    /// Applies `g` blockwise to the spectrum and reassembles the element.
    pub fn map(&self, g: impl Fn(f64) -> f64) -> Result<Element> {
        let blocks = self.blocks.iter().map(|b| b.reconstruct_with(&g)).collect::<Result<Vec<_>>>()?;
        Ok(Element::from_blocks_unchecked(blocks))
    }

    pub fn reconstruct(&self) -> Element {
        self.map(|x| x).expect("eigenvalues are finite")
    }
}

/// Dense Hermitian eigensolver for a single matrix.
///
/// The input is symmetrized before solving; eigenvalues come back ascending,
/// ties kept in solver order.
pub fn hermitian_eigen(m: &CMatrix) -> Result<BlockSpectrum> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::ShapeMismatch(format!("{}x{} matrix is not square", n, m.ncols())));
    }
    if n == 0 {
        return Ok(BlockSpectrum { values: vec![], vectors: CMatrix::zeros(0, 0) });
    }
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.try_symmetric_eigen(f64::EPSILON, 10_000).ok_or(Error::EigenSolver(n))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(BlockSpectrum { values, vectors })
}

/// Largest deviation `|x − x*|` relative to the largest entry magnitude.
pub(crate) fn hermitian_deviation(m: &CMatrix) -> f64 {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let dev = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    dev / scale
}

pub(crate) fn check_hermitian(x: &Element) -> Result<()> {
    for (k, b) in x.blocks().iter().enumerate() {
        let deviation = hermitian_deviation(b);
        if deviation > tolerance::HERMITIAN {
            return Err(Error::NotHermitian { block: k, deviation });
        }
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian element, block by block.
pub fn eigh(spec: &AlgebraSpec, x: &Element) -> Result<SpectralData> {
    spec.check(x)?;
    check_hermitian(x)?;
    let blocks = x.blocks().iter().map(hermitian_eigen).collect::<Result<Vec<_>>>()?;
    Ok(SpectralData { blocks })
}

/// `g(x) = Σ g(λ) E_x({λ})`, block by block.
pub fn func_calc(spec: &AlgebraSpec, x: &Element, g: impl Fn(f64) -> f64) -> Result<Element> {
    eigh(spec, x)?.map(g)
}

/// Pseudo-inverse of a positive element: `1/λ` on the support, `0` on the kernel.
pub fn w_apply(spec: &AlgebraSpec, x: &Element) -> Result<Element> {
    let data = eigh(spec, x)?;
    let blocks = data
        .blocks
        .iter()
        .map(|b| {
            let max = b.max_value();
            b.reconstruct_with(|l| if tolerance::in_support(l, max) { 1.0 / l } else { 0.0 })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Element::from_blocks_unchecked(blocks))
}

fn spectral_indicator(s: &State, keep_support: bool) -> Element {
    let blocks = s
        .xi_spectrum()
        .blocks
        .iter()
        .map(|b| {
            let n = b.dim();
            let mask = b.support_mask();
            let mut p = CMatrix::zeros(n, n);
            for (j, &inside) in mask.iter().enumerate() {
                if inside == keep_support {
                    let v = b.vectors.column(j);
                    p += v * v.adjoint();
                }
            }
            p
        })
        .collect();
    Element::from_blocks_unchecked(blocks)
}

/// Projection onto the range of `ξ` (equivalently of `h`).
pub fn support_projection(spec: &AlgebraSpec, s: &State) -> Element {
    debug_assert!(spec.check(s.h()).is_ok());
    spectral_indicator(s, true)
}

/// `1 − s(ω)`, built from the kernel eigenvectors directly so that a
/// full-rank state yields an exact zero.
pub fn kernel_projection(spec: &AlgebraSpec, s: &State) -> Element {
    debug_assert!(spec.check(s.h()).is_ok());
    spectral_indicator(s, false)
}

/// Spectral data of `U x U*` given that of `x`.
pub fn conjugate_spectral(u: &Element, d: &SpectralData) -> Result<SpectralData> {
    if u.blocks().len() != d.blocks.len() {
        return Err(Error::ShapeMismatch(format!(
            "unitary has {} blocks, spectral data has {}",
            u.blocks().len(),
            d.blocks.len()
        )));
    }
    u.check_unitary()?;
    let blocks = u
        .blocks()
        .iter()
        .zip(&d.blocks)
        .map(|(ub, b)| {
            if ub.nrows() != b.dim() {
                return Err(Error::ShapeMismatch(format!(
                    "unitary block {}x{} vs spectrum of size {}",
                    ub.nrows(),
                    ub.ncols(),
                    b.dim()
                )));
            }
            Ok(BlockSpectrum { values: b.values.clone(), vectors: ub * &b.vectors })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralData { blocks })
}
