//! Numerical tolerances shared by every module.
//!
//! All thresholds that decide whether a quantity is "zero" live here so the
//! support of a state means the same thing in every computation.

/// Hermiticity, relative to the largest entry magnitude of the block.
pub const HERMITIAN: f64 = 1e-10;

/// Positive semidefiniteness, relative to the largest eigenvalue of the
/// density. Eigenvalues with magnitude below this are set to exactly zero.
pub const PSD: f64 = 1e-10;

/// Deviation of `τ(h)` from 1.
pub const NORM: f64 = 1e-9;

/// Functional-calculus reconstruction accuracy (`ξ² = h`, `V*V = I`, ...).
pub const FUNC_CALC: f64 = 1e-10;

/// Faithfulness of the trace on random elements.
pub const FAITHFUL: f64 = 1e-12;

/// Support threshold, relative to the largest eigenvalue of the same block.
pub const SUPPORT: f64 = 1e-12;

/// Absolute floor for the support threshold, so an all-zero block has empty support.
pub const SUPPORT_FLOOR: f64 = 1e-300;

/// Probability mass at or below this is treated as zero before it is
/// multiplied by an infinite boundary limit `f(0⁺)` or `f′(+∞)`.
///
/// States are normalized to total mass 1, so this is an absolute threshold.
pub const BOUNDARY_MASS: f64 = 1e-14;

/// Cut-off below which an eigenvalue `λ` of a block whose largest eigenvalue
/// is `lambda_max` counts as zero.
pub fn support_cut(lambda_max: f64) -> f64 {
    (SUPPORT * lambda_max).max(SUPPORT_FLOOR)
}

/// Whether `lambda` lies in the support, i.e. strictly above [`support_cut`].
pub fn in_support(lambda: f64, lambda_max: f64) -> bool {
    lambda > support_cut(lambda_max)
}
