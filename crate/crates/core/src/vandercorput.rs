//! Numerical checks of the van der Corput toolkit: the Kusmin–Landau bound,
//! the stationary-phase (B-process) transformation for monomial phases, and
//! the endpoint-independent reparametrisation `(L, L₁, ρ)`.

use crate::error::{Error, Result};
use crate::expsum::BoundCheckReport;
use crate::numeric::{dist_to_int, e, ComplexSum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// `f(x) = X (x/M)^α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpec {
    pub alpha: f64,
    pub x: f64,
    pub m: u64,
}

impl PhaseSpec {
    pub fn new(alpha: f64, x: f64, m: u64) -> Self {
        Self { alpha, x, m }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.x * (t / self.m as f64).powf(self.alpha)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let m = self.m as f64;
        self.x * self.alpha * (t / m).powf(self.alpha - 1.0) / m
    }

    pub fn second(&self, t: f64) -> f64 {
        let m = self.m as f64;
        self.x * self.alpha * (self.alpha - 1.0) * (t / m).powf(self.alpha - 2.0) / (m * m)
    }

    /// The unique `x` with `f'(x) = r`: `M (rM/(αX))^{1/(α−1)}`.
    pub fn stationary_point(&self, r: f64) -> f64 {
        let m = self.m as f64;
        m * (r * m / (self.alpha * self.x)).powf(1.0 / (self.alpha - 1.0))
    }

    fn negated(&self) -> Self {
        Self {
            x: -self.x,
            ..*self
        }
    }
}

/// A phase with monotone derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Phase {
    /// `f(n) = slope·n + offset`
    Linear {
        slope: f64,
        offset: f64,
    },
    Monomial(PhaseSpec),
}

impl Phase {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Phase::Linear { slope, offset } => slope * t + offset,
            Phase::Monomial(p) => p.value(t),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            Phase::Linear { slope, .. } => *slope,
            Phase::Monomial(p) => p.derivative(t),
        }
    }
}

/// Weight `g(x) = scale · (x/M)^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    pub scale: f64,
    pub exponent: f64,
}

impl Weight {
    pub const UNIT: Weight = Weight {
        scale: 1.0,
        exponent: 0.0,
    };
    pub const ZERO: Weight = Weight {
        scale: 0.0,
        exponent: 0.0,
    };

    fn at(&self, t: f64, m: f64) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.scale * (t / m).powf(self.exponent)
        }
    }
}

/// `|Σ_{n=a}^{b} e(f(n))| · λ`, after checking `‖f'(n)‖ ≥ λ` at every `n`.
pub fn kusmin_landau_ratio(phase: &Phase, a: u64, b: u64, lambda: f64) -> Result<BoundCheckReport> {
    if !(lambda > 0.0 && lambda <= 0.5) {
        return Err(Error::Domain(format!(
            "lambda must lie in (0, 1/2], got {lambda}"
        )));
    }
    if a > b {
        return Err(Error::Domain(format!("empty range {a}..={b}")));
    }
    let mut acc = ComplexSum::new();
    for n in a..=b {
        let t = n as f64;
        let gap = dist_to_int(phase.derivative(t));
        if gap < lambda {
            return Err(Error::Precondition(format!(
                "‖f'({n})‖ = {gap} is below lambda = {lambda}"
            )));
        }
        acc.add(e(phase.value(t)));
    }
    let modulus = acc.value().norm();
    let mut params = BTreeMap::new();
    params.insert("a".to_string(), a as f64);
    params.insert("b".to_string(), b as f64);
    params.insert("lambda".to_string(), lambda);
    BoundCheckReport::new("kusmin_landau", params, modulus, 1.0 / lambda)
}

/// Direct sum against its stationary-phase expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BProcessResult {
    pub lhs: Complex64,
    pub main_term: Complex64,
    pub error_budget: f64,
    pub discrepancy: f64,
    /// Number of stationary points, endpoint ones counted as 1/2.
    pub stationary_points: f64,
    /// `T` in `f'' ≥ T/M²`.
    pub t: f64,
}

impl BProcessResult {
    /// `discrepancy / error_budget`, or 0 when both vanish.
    pub fn ratio(&self) -> f64 {
        if self.error_budget == 0.0 {
            if self.discrepancy == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.discrepancy / self.error_budget
        }
    }
}

/// Integers in `[lo, hi]` with the ∑* weight: 1/2 at an integral endpoint.
fn starred_integers(lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> {
    let first = lo.ceil() as i64;
    let last = hi.floor() as i64;
    (first..=last).map(move |k| {
        let kf = k as f64;
        let w = if kf == lo || kf == hi { 0.5 } else { 1.0 };
        (kf, w)
    })
}

/// Compare `Σ*_{a≤n≤b} g(n) e(f(n))` with
/// `Σ*_{f'(a)≤r≤f'(b)} g(x_r) e(f(x_r) − r x_r + 1/8) / √f''(x_r)`.
///
/// When `f'' < 0` the phase is negated, the comparison made, and both sums
/// conjugated back.
pub fn b_process_compare(
    phase: &PhaseSpec,
    weight: &Weight,
    a: f64,
    b: f64,
) -> Result<BProcessResult> {
    if phase.m == 0 {
        return Err(Error::Domain("M must be positive".into()));
    }
    if phase.alpha == 0.0 || phase.alpha == 1.0 || !phase.alpha.is_finite() {
        return Err(Error::Domain(format!(
            "alpha must avoid 0 and 1, got {}",
            phase.alpha
        )));
    }
    if !(phase.x != 0.0) || !phase.x.is_finite() {
        return Err(Error::Domain("X must be finite and nonzero".into()));
    }
    let m = phase.m as f64;
    if !(a >= m && a < b && b <= 2.0 * m) {
        return Err(Error::Domain(format!(
            "need M <= a < b <= 2M, got [{a}, {b}] with M = {m}"
        )));
    }
    let (sa, sb) = (phase.second(a), phase.second(b));
    if sa == 0.0 || sb == 0.0 || sa.signum() != sb.signum() {
        return Err(Error::Domain("f'' changes sign on [a, b]".into()));
    }
    let flip = sa < 0.0;
    let f = if flip { phase.negated() } else { *phase };

    // x^{α−2} is monotone, so the minimum of f'' sits at an endpoint
    let t = m * m * f.second(a).min(f.second(b));
    let u = weight.at(a, m).abs().max(weight.at(b, m).abs());

    let mut lhs = ComplexSum::new();
    for (n, w) in starred_integers(a, b) {
        lhs.add(w * weight.at(n, m) * e(f.value(n)));
    }
    let (da, db) = (f.derivative(a), f.derivative(b));
    let mut main = ComplexSum::new();
    let mut count = 0.0;
    for (r, w) in starred_integers(da, db) {
        let xr = f.stationary_point(r);
        let phase_r = f.value(xr) - r * xr + 0.125;
        main.add(w * weight.at(xr, m) / f.second(xr).sqrt() * e(phase_r));
        count += w;
    }
    let r_term = |mu: f64| {
        let d = dist_to_int(f.derivative(mu));
        if d == 0.0 {
            0.0
        } else {
            (m / t.sqrt()).min(1.0 / d)
        }
    };
    let error_budget =
        u * (r_term(a) + r_term(b)) + u * ((db - da + 2.0).ln() + m / t + t / (m * m) + 1.0);
    let (mut lhs, mut main) = (lhs.value(), main.value());
    if flip {
        lhs = lhs.conj();
        main = main.conj();
    }
    Ok(BProcessResult {
        lhs,
        main_term: main,
        error_budget,
        discrepancy: (lhs - main).norm(),
        stationary_points: count,
        t,
    })
}

/// Endpoint-independent parameters for `Σ e(x (m/M)^α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DependenceParams {
    pub alpha: f64,
    pub x: f64,
    pub m: u64,
    pub l: u64,
    pub l1: u64,
    /// `ᾱ = α/(α−1)`
    pub alpha_bar: f64,
}

impl DependenceParams {
    /// `ρ(x) = (1−α)(LM/|α|)^{ᾱ} x^{1/(1−α)}`.
    pub fn rho(&self, x: f64) -> f64 {
        let base = self.l as f64 * self.m as f64 / self.alpha.abs();
        (1.0 - self.alpha) * base.powf(self.alpha_bar) * x.powf(1.0 / (1.0 - self.alpha))
    }

    /// Range of `|ρ(x)|/X` over `x ∈ [X, 2X]` (attained at the endpoints).
    pub fn rho_ratio_range(&self) -> (f64, f64) {
        let a = self.rho(self.x).abs() / self.x;
        let b = self.rho(2.0 * self.x).abs() / self.x;
        (a.min(b), a.max(b))
    }

    /// `L/(X/M)` and `L₁/(X/M)`.
    pub fn scale_ratios(&self) -> (f64, f64) {
        let s = self.x / self.m as f64;
        (self.l as f64 / s, self.l1 as f64 / s)
    }

    /// The window `[2^{−|α|−1}|α|/2, 2^{|α|+3}|α|]` both scale ratios must lie in.
    pub fn admissible_ratio_window(&self) -> (f64, f64) {
        let a = self.alpha.abs();
        (2f64.powf(-a - 1.0) * a / 2.0, 2f64.powf(a + 3.0) * a)
    }
}

/// `L = ⌊2^{−|α|−1}|α|X/M⌋`, `L₁ = ⌊2^{|α|+2}|α|X/M⌋`.
pub fn dependence_params(alpha: f64, x: f64, m: u64) -> Result<DependenceParams> {
    if alpha == 0.0 || alpha == 1.0 || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "alpha must avoid 0 and 1, got {alpha}"
        )));
    }
    if !(x > 0.0) || !x.is_finite() || m == 0 {
        return Err(Error::Domain("X and M must be positive".into()));
    }
    let a = alpha.abs();
    let s = a * x / m as f64;
    let l = (2f64.powf(-a - 1.0) * s).floor();
    let l1 = (2f64.powf(a + 2.0) * s).floor();
    if l < 1.0 {
        return Err(Error::Domain(format!("L = {l} < 1; X/M is too small")));
    }
    Ok(DependenceParams {
        alpha,
        x,
        m,
        l: l as u64,
        l1: l1 as u64,
        alpha_bar: alpha / (alpha - 1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kusmin_landau_examples() {
        let half = Phase::Linear {
            slope: 0.5,
            offset: 0.0,
        };
        let r = kusmin_landau_ratio(&half, 1, 10, 0.5).unwrap();
        assert!(r.sum_modulus < 1e-12);
        let quarter = Phase::Linear {
            slope: 0.25,
            offset: 0.0,
        };
        let r = kusmin_landau_ratio(&quarter, 1, 4, 0.25).unwrap();
        assert!(r.sum_modulus < 1e-12);
        let err = kusmin_landau_ratio(&quarter, 1, 4, 0.3).unwrap_err();
        assert!(matches!(err, Error::Precondition(ref s) if s.contains("f'(1)")));
        assert!(kusmin_landau_ratio(&quarter, 1, 4, 0.0).is_err());
    }

    #[test]
    fn kusmin_landau_linear_geometric_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let theta: f64 = rng.gen_range(-3.0..3.0);
            let lambda = dist_to_int(theta);
            if lambda < 1e-3 {
                continue;
            }
            let phase = Phase::Linear {
                slope: theta,
                offset: rng.gen_range(0.0..1.0),
            };
            let b = rng.gen_range(1..400);
            let r = kusmin_landau_ratio(&phase, 1, b, lambda).unwrap();
            let closed = 1.0 / (std::f64::consts::PI * lambda).sin();
            assert!(r.sum_modulus <= closed + 1e-9);
            assert!(r.ratio <= 0.5 + 1e-9, "{r:?}");
        }
    }

    #[test]
    fn b_process_zero_weight() {
        let p = PhaseSpec::new(2.0, 100.0, 50);
        let r = b_process_compare(&p, &Weight::ZERO, 51.0, 100.0).unwrap();
        assert_eq!(r.lhs, Complex64::new(0.0, 0.0));
        assert_eq!(r.main_term, Complex64::new(0.0, 0.0));
        assert_eq!(r.ratio(), 0.0);
    }

    #[test]
    fn b_process_reference_case() {
        let p = PhaseSpec::new(2.0, 100.0, 50);
        let r = b_process_compare(&p, &Weight::UNIT, 51.0, 100.0).unwrap();
        assert!(r.discrepancy <= 10.0 * r.error_budget, "{r:?}");
        // f'(x) = 0.08x runs over [4.08, 8]: r = 5, 6, 7 and a halved 8
        assert_eq!(r.stationary_points, 3.5);
    }

    #[test]
    fn b_process_concave_phase_is_conjugated() {
        let p = PhaseSpec::new(0.5, 3000.0, 40);
        let r = b_process_compare(&p, &Weight::UNIT, 40.0, 80.0).unwrap();
        let direct: ComplexSum = starred_integers(40.0, 80.0)
            .map(|(n, w)| w * e(p.value(n)))
            .collect();
        assert!((r.lhs - direct.value()).norm() < 1e-9);
        assert!(r.discrepancy <= 10.0 * r.error_budget, "{r:?}");
    }

    #[test]
    fn b_process_domain_errors() {
        let p = PhaseSpec::new(2.0, 100.0, 50);
        assert!(b_process_compare(&p, &Weight::UNIT, 40.0, 100.0).is_err());
        assert!(b_process_compare(&p, &Weight::UNIT, 60.0, 60.0).is_err());
        assert!(
            b_process_compare(&PhaseSpec::new(1.0, 100.0, 50), &Weight::UNIT, 50.0, 100.0).is_err()
        );
    }

    #[test]
    fn stationary_points_solve_derivative() {
        for alpha in [1.5, 2.0, 3.0, -1.0, 0.5] {
            let p = PhaseSpec::new(alpha, 12345.0, 100);
            let (lo, hi) = (p.derivative(100.0), p.derivative(200.0));
            let (lo, hi) = (lo.min(hi), lo.max(hi));
            for (r, _) in starred_integers(lo, hi) {
                let xr = p.stationary_point(r);
                assert!(((p.derivative(xr) - r) / r).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dependence_example() {
        let d = dependence_params(-1.0, 1000.0, 10).unwrap();
        assert_eq!((d.l, d.l1), (25, 800));
        assert!((d.rho(1000.0) - 1000.0).abs() < 1e-9);
        assert!(dependence_params(2.0, 1.0, 10).is_err());
        assert!(dependence_params(1.0, 1000.0, 10).is_err());
    }

    #[test]
    fn dependence_ratios() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..300 {
            let alpha = [-2.0, -1.0, -0.5, 0.5, 1.5, 2.0, 3.0][rng.gen_range(0..7)];
            let m = rng.gen_range(1..500u64);
            let x = m as f64 * 10f64.powf(rng.gen_range(1.5..4.0));
            let Ok(d) = dependence_params(alpha, x, m) else {
                continue;
            };
            assert!(d.l <= d.l1);
            let (lo, hi) = d.admissible_ratio_window();
            let (rl, rl1) = d.scale_ratios();
            assert!(rl >= lo && rl <= hi && rl1 >= lo && rl1 <= hi);
            let (a, b) = d.rho_ratio_range();
            assert!(a > 0.0 && b.is_finite());
        }
    }
}
