//! Certified evaluation of
//!
//! * `C₁ = Σ τ(d) / (d(d+1))`
//! * `C₃ = Σ τ(d) (log d / d − log(d+1)/(d+1))`
//! * `C₂ = (2γ − 1) C₁ − C₃`
//!
//! Every value carries a tail: a bound on `|true − value|`.
//!
//! `Crude` truncates the series and bounds the remainder with `τ(d) ≤ 2√d`.
//!
//! `Abel` writes the remainder as a Stieltjes integral against
//! `D(t) = t log t + (2γ−1)t + Δ(t)`. The main-term integral is done in closed
//! form, the boundary term `−Δ(D) f(D)` is exact (read from the table), and
//! only `∫ Δ(t) f'(t) dt` is bounded, using `|Δ(t)| ≤ √t + 4`. That envelope
//! is checked numerically by the test suite rather than proved.

use crate::divisor::{dirichlet_main_term, DivisorTable};
use crate::error::{Error, Result};
use crate::numeric::{KahanSum, EULER_GAMMA};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Additive constant in the envelope `|Δ(t)| ≤ √t + DELTA_ENVELOPE_CONST`.
pub const DELTA_ENVELOPE_CONST: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailMode {
    Crude,
    Abel,
    /// Not a truncated series; the tail is whatever the caller supplied.
    Exact,
}

impl fmt::Display for TailMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TailMode::Crude => "crude",
            TailMode::Abel => "abel",
            TailMode::Exact => "exact",
        })
    }
}

impl FromStr for TailMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "crude" => Ok(TailMode::Crude),
            "abel" => Ok(TailMode::Abel),
            other => Err(Error::Parse(format!("unknown tail mode {other:?}"))),
        }
    }
}

/// A value together with a certified bound on its error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigorousValue {
    pub value: f64,
    pub tail: f64,
    pub cutoff: u64,
    pub mode: TailMode,
}

impl RigorousValue {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            tail: 0.0,
            cutoff: 0,
            mode: TailMode::Exact,
        }
    }

    pub fn with_tail(mut self, tail: f64) -> Self {
        self.tail = tail;
        self
    }

    /// True when the intervals `value ± tail` overlap.
    pub fn agrees_with(&self, other: &RigorousValue) -> bool {
        (self.value - other.value).abs() <= self.tail + other.tail
    }
}

fn check_cutoff(table: &DivisorTable, cutoff: u64) -> Result<()> {
    if cutoff == 0 {
        return Err(Error::Range("cutoff must be at least 1".into()));
    }
    if cutoff > table.limit() {
        return Err(Error::Range(format!(
            "cutoff {cutoff} exceeds table limit {}",
            table.limit()
        )));
    }
    Ok(())
}

fn c1_term(d: f64) -> f64 {
    1.0 / (d * (d + 1.0))
}

/// `log d / d − log(d+1)/(d+1)`, written as `[log d − d log(1+1/d)] / (d(d+1))`
/// to avoid cancellation at large `d`.
fn c3_term(d: f64) -> f64 {
    (d.ln() - d * (1.0 / d).ln_1p()) / (d * (d + 1.0))
}

fn partial_sum(table: &DivisorTable, cutoff: u64, term: fn(f64) -> f64) -> f64 {
    let acc: KahanSum = table.tau_slice()[..cutoff as usize]
        .iter()
        .enumerate()
        .map(|(i, &t)| t as f64 * term((i + 1) as f64))
        .collect();
    acc.value()
}

/// `Li₂(−ε)` for `0 < ε ≤ 1`.
fn dilog_neg(eps: f64) -> f64 {
    if eps == 1.0 {
        return -PI * PI / 12.0;
    }
    let mut acc = KahanSum::new();
    let mut pow = 1.0;
    for k in 1..10_000u32 {
        pow *= -eps;
        let term = pow / (k as f64 * k as f64);
        acc.add(term);
        if term.abs() < 1e-20 {
            break;
        }
    }
    acc.value()
}

/// `Δ` at an integer point, read from the table.
fn delta_at(table: &DivisorTable, d: u64) -> f64 {
    table.prefix(d) as f64 - dirichlet_main_term(d as f64)
}

/// `∫_D^∞ (log t + 2γ) / (t(t+1)) dt`.
fn c1_main_tail(d: f64) -> f64 {
    let eps = 1.0 / d;
    let log_part = -eps.ln() * eps.ln_1p() - dilog_neg(eps);
    log_part + 2.0 * EULER_GAMMA * eps.ln_1p()
}

/// `∫_D^∞ (log t/t − log(t+1)/(t+1)) (log t + 2γ) dt`.
fn c3_main_tail(d: f64) -> f64 {
    // ∫_D^{D+1} (log t / t)(log t + 2γ) dt = [log³t/3 + γ log²t]
    let a = d.ln();
    let h = (1.0 / d).ln_1p();
    let b = a + h;
    let near = h * (b * b + a * b + a * a) / 3.0 + EULER_GAMMA * h * (a + b);
    // ∫_{D+1}^∞ (log s / s) · (−log(1 − 1/s)) ds, expanded in powers of 1/s
    let big_a = d + 1.0;
    let la = big_a.ln();
    let mut far = KahanSum::new();
    let mut pow = 1.0;
    for k in 1..10_000u32 {
        pow /= big_a;
        let k = k as f64;
        let term = pow / k * (la / k + 1.0 / (k * k));
        far.add(term);
        if term < 1e-20 {
            break;
        }
    }
    near + far.value()
}

/// `C₁` truncated at `cutoff`, with the tail bound for `mode`.
pub fn compute_c1(table: &DivisorTable, cutoff: u64, mode: TailMode) -> Result<RigorousValue> {
    check_cutoff(table, cutoff)?;
    let partial = partial_sum(table, cutoff, c1_term);
    let d = cutoff as f64;
    let (value, tail) = match mode {
        // Σ_{d>D} 2√d/d² ≤ 2∫_D^∞ t^{-3/2} dt
        TailMode::Crude => (partial, 4.0 / d.sqrt()),
        TailMode::Abel => {
            let boundary = -delta_at(table, cutoff) * c1_term(d);
            // |f'(t)| ≤ 2/t³, ∫_D^∞ (√t + 4)·2/t³ dt
            let tail = 4.0 / 3.0 * d.powf(-1.5) + DELTA_ENVELOPE_CONST / (d * d);
            (partial + c1_main_tail(d) + boundary, tail)
        }
        TailMode::Exact => return Err(Error::Domain("exact is not a tail mode".into())),
    };
    Ok(RigorousValue {
        value,
        tail,
        cutoff,
        mode,
    })
}

/// `C₃` truncated at `cutoff`, with the tail bound for `mode`.
pub fn compute_c3(table: &DivisorTable, cutoff: u64, mode: TailMode) -> Result<RigorousValue> {
    check_cutoff(table, cutoff)?;
    let partial = partial_sum(table, cutoff, c3_term);
    let d = cutoff as f64;
    let (value, tail) = match mode {
        TailMode::Crude => {
            // 0 < g(d) ≤ log d / d² for d ≥ 3, and t^{-3/2} log t decreases
            // past e^{2/3}: Σ_{d>D} 2√d log d/d² ≤ 4(log D + 2)/√D.
            let base = cutoff.max(3);
            let b = base as f64;
            let mut tail = 4.0 * (b.ln() + 2.0) / b.sqrt();
            // d = 2, 3 fall outside that range; τ(2) = τ(3) = 2
            for k in cutoff + 1..=3 {
                tail += 2.0 * c3_term(k as f64).abs();
            }
            (partial, tail)
        }
        TailMode::Abel => {
            let boundary = -delta_at(table, cutoff) * c3_term(d);
            // |f'(t)| ≤ (2 log t + 5)/t³ for t ≥ 1
            let l = d.ln();
            let tail = 4.0 / 3.0 * d.powf(-1.5) * (l + 19.0 / 6.0)
                + DELTA_ENVELOPE_CONST / (d * d) * (l + 3.0);
            (partial + c3_main_tail(d) + boundary, tail)
        }
        TailMode::Exact => return Err(Error::Domain("exact is not a tail mode".into())),
    };
    Ok(RigorousValue {
        value,
        tail,
        cutoff,
        mode,
    })
}

/// `C₂ = (2γ − 1) C₁ − C₃`, tails combined linearly.
pub fn compute_c2(c1: &RigorousValue, c3: &RigorousValue) -> RigorousValue {
    let k = 2.0 * EULER_GAMMA - 1.0;
    RigorousValue {
        value: k * c1.value - c3.value,
        tail: k * c1.tail + c3.tail,
        cutoff: c1.cutoff.min(c3.cutoff),
        mode: if c1.mode == c3.mode {
            c1.mode
        } else {
            TailMode::Exact
        },
    }
}

/// All three constants at one cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub c1: RigorousValue,
    pub c2: RigorousValue,
    pub c3: RigorousValue,
}

impl Constants {
    pub fn compute(table: &DivisorTable, cutoff: u64, mode: TailMode) -> Result<Self> {
        let c1 = compute_c1(table, cutoff, mode)?;
        let c3 = compute_c3(table, cutoff, mode)?;
        Ok(Self {
            c1,
            c2: compute_c2(&c1, &c3),
            c3,
        })
    }

    pub fn report(&self) -> ConstantsReport {
        ConstantsReport {
            c1: self.c1.value,
            c1_tail: self.c1.tail,
            c3: self.c3.value,
            c3_tail: self.c3.tail,
            c2: self.c2.value,
            c2_tail: self.c2.tail,
            cutoff: self.c1.cutoff,
            mode: self.c1.mode,
        }
    }
}

/// Flat JSON shape of [`Constants`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub c1: f64,
    pub c1_tail: f64,
    pub c3: f64,
    pub c3_tail: f64,
    pub c2: f64,
    pub c2_tail: f64,
    pub cutoff: u64,
    pub mode: TailMode,
}
