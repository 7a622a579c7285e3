//! Perturbed three-dimensional exponential sums
//!
//! ```text
//! S(H,M,N) = Σ_{m∼M} Σ_{n∼N} a(m,n) Σ_{h∼H} b(h) e(X (mn+δ)^β/(MN)^β · h^α/H^α)
//! ```
//!
//! their maximal variant `S*`, the weighted quadruple sum used for the
//! divisor problem, the right-hand sides of the matching upper bounds, and
//! empirical checkers that report `|sum| / bound` ratios.
//!
//! All ranges are dyadic, `d ∼ D` meaning `D < d ≤ 2D`. Implied constants are
//! taken to be 1.

mod bounds;
mod checks;
mod maxsum;
mod sweep;

pub use bounds::{theoretical_bound, BoundKind, BoundParams};
pub use checks::{double_large_sieve_check, maximal_inequality_check, MAXIMAL_MIN_QUADRATURE};
pub use maxsum::{convex_hull, diameter, max_partial_sum, max_partial_sum_with, MaxSumMethod};
pub use sweep::{bound_sweep, standard_grid, SweepItem, SweepReport};

use crate::error::{Error, Result};
use crate::numeric::{dyadic, e, splitmix64, unit_from_hash, ComplexSum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Largest number of terms a direct evaluation may sum.
pub const TERM_BUDGET: u64 = 1_000_000_000;

const COEFF_SLACK: f64 = 1e-12;

/// Coefficient generator indexed by `(i, j)`; single-index families use `j = 0`.
#[derive(Clone)]
pub enum Coefficients {
    Constant(Complex64),
    /// `e(θ)` with `θ` hashed from `(seed, i, j)`; independent of evaluation order.
    RandomUnimodular {
        seed: u64,
        conjugate: bool,
    },
    Custom(Arc<dyn Fn(u64, u64) -> Complex64 + Send + Sync>),
}

impl Coefficients {
    pub fn ones() -> Self {
        Coefficients::Constant(Complex64::new(1.0, 0.0))
    }

    pub fn zeros() -> Self {
        Coefficients::Constant(Complex64::new(0.0, 0.0))
    }

    pub fn random(seed: u64) -> Self {
        Coefficients::RandomUnimodular {
            seed,
            conjugate: false,
        }
    }

    pub fn at(&self, i: u64, j: u64) -> Complex64 {
        match self {
            Coefficients::Constant(c) => *c,
            Coefficients::RandomUnimodular { seed, conjugate } => {
                let h = splitmix64(splitmix64(seed ^ splitmix64(i)) ^ j);
                let z = e(unit_from_hash(h));
                if *conjugate {
                    z.conj()
                } else {
                    z
                }
            }
            Coefficients::Custom(f) => f(i, j),
        }
    }

    /// Complex conjugate of every coefficient.
    pub fn conj(&self) -> Self {
        match self {
            Coefficients::Constant(c) => Coefficients::Constant(c.conj()),
            Coefficients::RandomUnimodular { seed, conjugate } => Coefficients::RandomUnimodular {
                seed: *seed,
                conjugate: !conjugate,
            },
            Coefficients::Custom(f) => {
                let f = Arc::clone(f);
                Coefficients::Custom(Arc::new(move |i, j| f(i, j).conj()))
            }
        }
    }

    fn checked_at(&self, i: u64, j: u64) -> Result<Complex64> {
        let z = self.at(i, j);
        if !(z.norm() <= 1.0 + COEFF_SLACK) {
            return Err(Error::Domain(format!(
                "coefficient at ({i}, {j}) has modulus {} > 1",
                z.norm()
            )));
        }
        Ok(z)
    }

    fn label(&self) -> String {
        match self {
            Coefficients::Constant(c) => format!("constant({},{})", c.re, c.im),
            Coefficients::RandomUnimodular { seed, conjugate } => {
                format!("random(seed={seed},conj={conjugate})")
            }
            Coefficients::Custom(_) => "custom".into(),
        }
    }
}

impl fmt::Debug for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Parameters of `S(H, M, N)`.
#[derive(Debug, Clone)]
pub struct ExpSumSpec {
    pub h: u64,
    pub m: u64,
    pub n: u64,
    pub x: f64,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub coeff_a: Coefficients,
    pub coeff_b: Coefficients,
}

impl ExpSumSpec {
    /// Spec with unit coefficients and no perturbation.
    pub fn new(h: u64, m: u64, n: u64, x: f64, alpha: f64, beta: f64) -> Self {
        Self {
            h,
            m,
            n,
            x,
            alpha,
            beta,
            delta: 0.0,
            coeff_a: Coefficients::ones(),
            coeff_b: Coefficients::ones(),
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_coefficients(mut self, a: Coefficients, b: Coefficients) -> Self {
        self.coeff_a = a;
        self.coeff_b = b;
        self
    }

    /// Number of `(h, m, n)` terms.
    pub fn terms(&self) -> Option<u64> {
        self.h.checked_mul(self.m)?.checked_mul(self.n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.h == 0 || self.m == 0 || self.n == 0 {
            return Err(Error::Domain("H, M, N must be positive".into()));
        }
        // X = 1 is admitted so the single-term sums are reachable
        if !(self.x >= 1.0) || !self.x.is_finite() {
            return Err(Error::Domain(format!(
                "X must be at least 1, got {}",
                self.x
            )));
        }
        if !self.alpha.is_finite() || !self.beta.is_finite() || !self.delta.is_finite() {
            return Err(Error::Domain("alpha, beta, delta must be finite".into()));
        }
        let mn = self.m as f64 * self.n as f64;
        if self.delta.abs() > mn {
            return Err(Error::Domain(format!(
                "|delta| = {} exceeds MN = {mn}",
                self.delta.abs()
            )));
        }
        match self.terms() {
            Some(t) if t <= TERM_BUDGET => Ok(()),
            _ => Err(Error::Capacity(format!(
                "H·M·N exceeds the term budget {TERM_BUDGET}"
            ))),
        }
    }

    /// `α(α−1)β ≠ 0` and `α(α−1)β ≠ 1`: the parameter sets on which the bound
    /// checkers assert.
    pub fn is_nondegenerate(&self) -> bool {
        let p = self.alpha * (self.alpha - 1.0) * self.beta;
        p != 0.0 && p != 1.0
    }

    fn outer_weight(&self, m: u64, n: u64) -> f64 {
        let mn = self.m as f64 * self.n as f64;
        ((m as f64 * n as f64 + self.delta) / mn).powf(self.beta)
    }

    fn inner_weights(&self) -> Vec<f64> {
        let hf = self.h as f64;
        dyadic(self.h)
            .map(|h| (h as f64 / hf).powf(self.alpha))
            .collect()
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        [
            ("H", self.h as f64),
            ("M", self.m as f64),
            ("N", self.n as f64),
            ("X", self.x),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("delta", self.delta),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }
}

/// Direct evaluation of `S(H, M, N)`.
pub fn eval_s(spec: &ExpSumSpec) -> Result<Complex64> {
    spec.validate()?;
    let weights = spec.inner_weights();
    let b: Vec<Complex64> = dyadic(spec.h)
        .map(|h| spec.coeff_b.checked_at(h, 0))
        .collect::<Result<_>>()?;
    let rows: Vec<Result<Complex64>> = dyadic(spec.m)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|m| {
            let mut row = ComplexSum::new();
            for n in dyadic(spec.n) {
                let a = spec.coeff_a.checked_at(m, n)?;
                let u = spec.x * spec.outer_weight(m, n);
                let inner: ComplexSum = weights
                    .iter()
                    .zip(&b)
                    .map(|(&v, &bh)| bh * e(u * v))
                    .collect();
                row.add(a * inner.value());
            }
            Ok(row.value())
        })
        .collect();
    let mut total = ComplexSum::new();
    for r in rows {
        total.add(r?);
    }
    Ok(total.value())
}

/// `S*(H, M, N) = Σ_{m,n} |Σ_h e(…)|*`; coefficients are ignored (all 1).
pub fn eval_s_star(spec: &ExpSumSpec) -> Result<f64> {
    spec.validate()?;
    let weights = spec.inner_weights();
    let rows: Vec<f64> = dyadic(spec.m)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|m| {
            let mut buf = Vec::with_capacity(weights.len());
            let mut row = crate::numeric::KahanSum::new();
            for n in dyadic(spec.n) {
                let u = spec.x * spec.outer_weight(m, n);
                buf.clear();
                buf.extend(weights.iter().map(|&v| e(u * v)));
                // buf is nonempty because H ≥ 1
                row.add(max_partial_sum(&buf).unwrap_or(0.0));
            }
            row.value()
        })
        .collect();
    Ok(rows
        .into_iter()
        .collect::<crate::numeric::KahanSum>()
        .value())
}

/// Parameters of the weighted quadruple sum
/// `Σ_{h∼H} h⁻¹ Σ_{d₁∼D₁} Σ_{d₂∼D₂} Σ_{l∼L} e(hx / (l(d₁d₂+δ)))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrakSpec {
    pub x: f64,
    pub d1: u64,
    pub d2: u64,
    pub l: u64,
    pub h: u64,
    pub delta: u8,
}

impl FrakSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.x > 1.0) || !self.x.is_finite() {
            return Err(Error::Domain(format!("x must exceed 1, got {}", self.x)));
        }
        if self.d1 == 0 || self.d2 == 0 || self.l == 0 || self.h == 0 {
            return Err(Error::Domain("D1, D2, L, H must be positive".into()));
        }
        if self.delta > 1 {
            return Err(Error::Domain("delta must be 0 or 1".into()));
        }
        let terms = self
            .h
            .checked_mul(self.d1)
            .and_then(|t| t.checked_mul(self.d2))
            .and_then(|t| t.checked_mul(self.l));
        match terms {
            Some(t) if t <= TERM_BUDGET => Ok(()),
            _ => Err(Error::Capacity(format!(
                "H·D1·D2·L exceeds the term budget {TERM_BUDGET}"
            ))),
        }
    }

    /// The `D` fed to the bound: `D₁D₂`.
    pub fn d(&self) -> u64 {
        self.d1 * self.d2
    }

    /// `Σ_{h∼H} D₁D₂L / h`, the triangle-inequality bound.
    pub fn trivial_bound(&self) -> f64 {
        let count = (self.d1 * self.d2 * self.l) as f64;
        dyadic(self.h).map(|h| count / h as f64).sum()
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        [
            ("x", self.x),
            ("D1", self.d1 as f64),
            ("D2", self.d2 as f64),
            ("L", self.l as f64),
            ("H", self.h as f64),
            ("delta", self.delta as f64),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }
}

/// Direct evaluation of the weighted quadruple sum.
pub fn eval_frak_s(spec: &FrakSpec) -> Result<Complex64> {
    spec.validate()?;
    let delta = spec.delta as u64;
    let rows: Vec<Complex64> = dyadic(spec.h)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|h| {
            let hx = h as f64 * spec.x;
            let mut acc = ComplexSum::new();
            for d1 in dyadic(spec.d1) {
                for d2 in dyadic(spec.d2) {
                    let q = d1 * d2 + delta;
                    for l in dyadic(spec.l) {
                        acc.add(e(hx / (l * q) as f64));
                    }
                }
            }
            acc.value() / h as f64
        })
        .collect();
    Ok(rows.into_iter().collect::<ComplexSum>().value())
}

/// Outcome of one empirical bound check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheckReport {
    pub kind: String,
    pub params: BTreeMap<String, f64>,
    pub sum_modulus: f64,
    #[serde(rename = "bound")]
    pub bound_value: f64,
    pub ratio: f64,
}

impl BoundCheckReport {
    pub fn new(
        kind: impl Into<String>,
        params: BTreeMap<String, f64>,
        sum_modulus: f64,
        bound_value: f64,
    ) -> Result<Self> {
        if !(bound_value > 0.0) || !bound_value.is_finite() {
            return Err(Error::Numeric(format!(
                "bound must be positive, got {bound_value}"
            )));
        }
        Ok(Self {
            kind: kind.into(),
            params,
            sum_modulus,
            bound_value,
            ratio: sum_modulus / bound_value,
        })
    }
}
