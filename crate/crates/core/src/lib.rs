//! Hyperbolic divisor sums and the exponential-sum machinery behind their
//! error term.
//!
//! * [`divisor`]: sieve of `τ(n)`, `D(x)`, `ψ`, `Δ(x)`
//! * [`hypersum`]: `T(x) = Σ_{n≤x} τ(⌊x/n⌋)τ(n)` by three exact methods
//! * [`constants`]: `C₁`, `C₂`, `C₃` with certified tails
//! * [`errfit`]: residual grids and exponent fits
//! * [`vaaler`]: trigonometric approximation of `ψ`
//! * [`expsum`]: perturbed three-dimensional exponential sums and bound checks
//! * [`diophantine`]: spacing counts for the double large sieve
//! * [`vandercorput`]: Kusmin–Landau, B-process and endpoint-independence checks
//! * [`io`]: CSV and grid parsing

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod diophantine;
pub mod divisor;
pub mod errfit;
pub mod error;
pub mod expsum;
pub mod hypersum;
pub mod io;
pub mod numeric;
pub mod vaaler;
pub mod vandercorput;

pub use constants::{compute_c1, compute_c2, compute_c3, Constants, RigorousValue, TailMode};
pub use divisor::{delta, delta_via_psi, divisor_summatory, psi, DivisorTable};
pub use error::{Error, Result};
pub use hypersum::{residual, t_exact, TsumMethod};
pub use num_complex::Complex64;
