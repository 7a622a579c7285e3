//! Empirical checks of the bilinear (double large sieve) inequality and the
//! maximal partial-sum inequality.

use super::{max_partial_sum, BoundCheckReport};
use crate::diophantine::count_close_pairs_sorted;
use crate::error::{Error, Result};
use crate::numeric::{e, gauss_legendre, ComplexSum};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Smallest quadrature budget accepted by [`maximal_inequality_check`].
pub const MAXIMAL_MIN_QUADRATURE: usize = 1000;

const COEFF_SLACK: f64 = 1e-12;

fn ordered_close_pairs(values: &[f64], window: f64) -> u64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    count_close_pairs_sorted(&sorted, window)
}

/// `|S| / (X^{1/2} B₁^{1/2} B₂^{1/2})` for `S = Σ_k Σ_l a(k) b(l) e(X u(k) v(l))`,
/// where `B₁`, `B₂` count ordered pairs within `1/X` in `u` and in `v`.
pub fn double_large_sieve_check(
    u: &[f64],
    v: &[f64],
    a: &[Complex64],
    b: &[Complex64],
    x: f64,
) -> Result<BoundCheckReport> {
    if u.is_empty() || v.is_empty() {
        return Err(Error::Domain("u and v must be nonempty".into()));
    }
    if a.len() != u.len() || b.len() != v.len() {
        return Err(Error::Domain(
            "coefficient lengths must match u and v".into(),
        ));
    }
    if !(x >= 1.0) || !x.is_finite() {
        return Err(Error::Domain(format!("X must be at least 1, got {x}")));
    }
    if u.iter().chain(v).any(|t| !t.is_finite()) {
        return Err(Error::Domain("u and v must be finite".into()));
    }
    if a.iter().chain(b).any(|z| !(z.norm() <= 1.0 + COEFF_SLACK)) {
        return Err(Error::Domain(
            "coefficients must have modulus at most 1".into(),
        ));
    }
    let mut s = ComplexSum::new();
    for (&uk, &ak) in u.iter().zip(a) {
        let row: ComplexSum = v
            .iter()
            .zip(b)
            .map(|(&vl, &bl)| bl * e(x * uk * vl))
            .collect();
        s.add(ak * row.value());
    }
    let window = 1.0 / x;
    let b1 = ordered_close_pairs(u, window);
    let b2 = ordered_close_pairs(v, window);
    let mut params = BTreeMap::new();
    params.insert("K".to_string(), u.len() as f64);
    params.insert("L".to_string(), v.len() as f64);
    params.insert("X".to_string(), x);
    params.insert("B1".to_string(), b1 as f64);
    params.insert("B2".to_string(), b2 as f64);
    let bound = x.sqrt() * (b1 as f64).sqrt() * (b2 as f64).sqrt();
    BoundCheckReport::new("double_large_sieve", params, s.value().norm(), bound)
}

/// `(|Σ z|*)^k / [(1 + log N)^{k−1} ∫_{−1/2}^{1/2} |Σ z_n e(nt)|^k 𝓛(t) dt]`
/// with `𝓛(t) = min{N, 1/(2|t|)}`.
///
/// The integral is split at `t = 0` and at the kinks `±1/(2N)` of `𝓛`, and
/// each piece uses composite Gauss–Legendre panels narrow enough to resolve
/// the oscillation of the trigonometric polynomial. The inner pieces get a
/// denser panel share than their length alone would give them.
pub fn maximal_inequality_check(
    z: &[Complex64],
    k: f64,
    quadrature_points: usize,
) -> Result<BoundCheckReport> {
    if z.is_empty() {
        return Err(Error::Domain("sequence must be nonempty".into()));
    }
    if !(k >= 1.0) || !k.is_finite() {
        return Err(Error::Domain(format!("k must be at least 1, got {k}")));
    }
    if quadrature_points < MAXIMAL_MIN_QUADRATURE {
        return Err(Error::Domain(format!(
            "need at least {MAXIMAL_MIN_QUADRATURE} quadrature points, got {quadrature_points}"
        )));
    }
    let n = z.len();
    let nf = n as f64;
    let lhs = max_partial_sum(z)?.powf(k);

    let poly = |t: f64| -> f64 {
        let s: ComplexSum = z
            .iter()
            .enumerate()
            .map(|(i, &zn)| zn * e((i + 1) as f64 * t))
            .collect();
        s.value().norm().powf(k)
    };
    let weight = |t: f64| -> f64 {
        let a = t.abs();
        if a == 0.0 {
            nf
        } else {
            nf.min(1.0 / (2.0 * a))
        }
    };
    let kink = 1.0 / (2.0 * nf);
    let panels_total = (quadrature_points / 8).max(1);
    let mut integral = 0.0;
    for (lo, hi) in [(-0.5, -kink), (-kink, 0.0), (0.0, kink), (kink, 0.5)] {
        if hi <= lo {
            continue;
        }
        let len = hi - lo;
        // outer pieces share the budget by length; inner pieces get a quarter each
        let share = if lo.abs() < kink + 1e-300 && hi.abs() <= kink {
            panels_total / 4
        } else {
            (panels_total as f64 * len) as usize
        };
        let resolve = (4.0 * nf * len).ceil() as usize;
        let panels = share.max(resolve).max(4);
        integral += gauss_legendre(|t| poly(t) * weight(t), lo, hi, panels);
    }
    let rhs = (1.0 + nf.ln()).powf(k - 1.0) * integral;
    let mut params = BTreeMap::new();
    params.insert("N".to_string(), nf);
    params.insert("k".to_string(), k);
    params.insert("quadrature_points".to_string(), quadrature_points as f64);
    if lhs == 0.0 {
        // all-zero sequence: report the trivial ratio against a unit bound
        return BoundCheckReport::new("maximal_inequality", params, 0.0, rhs.max(1.0));
    }
    BoundCheckReport::new("maximal_inequality", params, lhs, rhs)
}
