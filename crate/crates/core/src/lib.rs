//! # nsdiv
//!
//! Quantum f-divergences of two states on a finite-dimensional algebra with a
//! weighted trace, computed by two independent routes:
//!
//! - **Nussbaum-Szkoła route**: the two states are turned into a pair of
//!   classical distributions `f_φ dν`, `f_ω dν` on a finite set, and the
//!   classical f-divergence of that pair is evaluated ([`nsdist`],
//!   [`divergence::quantum_f_div_ns`]).
//! - **Direct route**: the relative modular operator `Δ_{φ,ω}` is built as a
//!   `n² × n²` superoperator per block, diagonalized, and
//!   `⟨⟨ξ_ω | f(Δ) ξ_ω⟩⟩` plus the two support terms is summed
//!   ([`divergence::quantum_f_div_direct`]).
//!
//! Algebras are finite direct sums of matrix blocks with arbitrary positive
//! trace weights, `τ(x) = Σ_k t_k Tr(x_k)`. This covers `B(ℂⁿ)`, abelian
//! algebras and weighted traces.
//!
//! ```
//! use nsdiv::algebra::{validate_state, AlgebraSpec, Element};
//! use nsdiv::divergence::{catalog, quantum_f_div_direct, quantum_f_div_ns};
//!
//! let spec = AlgebraSpec::matrix_algebra(2);
//! let phi = validate_state(&spec, &Element::from_real_diagonals(&spec, &[&[0.5, 0.5]])?, false)?;
//! let omega = validate_state(&spec, &Element::from_real_diagonals(&spec, &[&[0.75, 0.25]])?, false)?;
//! let f = catalog("relative-entropy", None)?;
//!
//! let a = quantum_f_div_ns(&spec, &phi, &omega, &f)?.value.as_finite().unwrap();
//! let b = quantum_f_div_direct(&spec, &phi, &omega, &f)?.value.as_finite().unwrap();
//! assert!((a - 0.5 * (4.0f64 / 3.0).ln()).abs() < 1e-12);
//! assert!((a - b).abs() < 1e-10);
//! # Ok::<(), nsdiv::Error>(())
//! ```
//!
//! Divergence values live in `(−∞, +∞]` and are carried as [`ExtReal`].

pub mod algebra;
pub mod cli;
pub mod divergence;
pub mod error;
pub mod extreal;
pub mod nsdist;
pub mod spectral;
pub mod tolerance;

pub use algebra::{AlgebraSpec, Element, RankProfile, State};
pub use divergence::{catalog, ConvexFunctionSpec, DivergenceResult, Route};
pub use error::{Error, Result};
pub use extreal::ExtReal;
pub use nsdist::NsOutput;
