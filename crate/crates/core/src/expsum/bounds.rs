//! Right-hand sides of the exponential-sum bounds with implied constant 1.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `(HMN)^{1+ε} {(X/(MNH²))^{1/4} + (MN)^{-1/4} + H^{-1/2} + X^{-1/2}}`
    ThmS,
    /// `(HMN)^{1+ε} {(X/(MNH²))^{1/4} + H^{-1/2} + X^{-1}}`
    ThmSstar,
    /// Seven-term bound for the weighted quadruple sum, in `x`, `D`, `H`.
    Proposition,
    /// `(HMN)^{1+ε} {(X/(HNM²))^{1/4} + M^{-1/2} + X^{-1}}`, inner variable `m`.
    Rs3d,
}

impl BoundKind {
    pub const ALL: [BoundKind; 4] = [
        BoundKind::ThmS,
        BoundKind::ThmSstar,
        BoundKind::Proposition,
        BoundKind::Rs3d,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BoundKind::ThmS => "thm_S",
            BoundKind::ThmSstar => "thm_Sstar",
            BoundKind::Proposition => "proposition",
            BoundKind::Rs3d => "rs3d",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown bound kind {s:?}")))
    }
}

/// Inputs to [`theoretical_bound`]. The three-variable kinds read `h`, `m`,
/// `n`, `x`; the proposition reads `x`, `d`, `h`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub h: f64,
    pub m: f64,
    pub n: f64,
    pub x: f64,
    pub d: f64,
}

impl BoundParams {
    pub fn triple(h: f64, m: f64, n: f64, x: f64) -> Self {
        Self { h, m, n, x, d: 0.0 }
    }

    pub fn proposition(x: f64, d: f64, h: f64) -> Self {
        Self {
            h,
            x,
            d,
            ..Self::default()
        }
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("{name} must be positive, got {v}")))
    }
}

/// The literal bound expression for `kind`.
pub fn theoretical_bound(kind: BoundKind, p: &BoundParams, eps: f64) -> Result<f64> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::Domain(format!("epsilon must be >= 0, got {eps}")));
    }
    match kind {
        BoundKind::ThmS | BoundKind::ThmSstar | BoundKind::Rs3d => {
            let h = positive("H", p.h)?;
            let m = positive("M", p.m)?;
            let n = positive("N", p.n)?;
            let x = positive("X", p.x)?;
            let scale = (h * m * n).powf(1.0 + eps);
            let brace = match kind {
                BoundKind::ThmS => {
                    (x / (m * n * h * h)).powf(0.25)
                        + (m * n).powf(-0.25)
                        + h.powf(-0.5)
                        + x.powf(-0.5)
                }
                BoundKind::ThmSstar => (x / (m * n * h * h)).powf(0.25) + h.powf(-0.5) + 1.0 / x,
                _ => (x / (h * n * m * m)).powf(0.25) + m.powf(-0.5) + 1.0 / x,
            };
            Ok(scale * brace)
        }
        BoundKind::Proposition => {
            let x = positive("x", p.x)?;
            let d = positive("D", p.d)?;
            let h = positive("H", p.h)?;
            if !(x > 1.0) {
                return Err(Error::Domain(format!(
                    "proposition requires x > 1, got {x}"
                )));
            }
            if !(d >= 1.0 && d < x) {
                return Err(Error::Domain(format!(
                    "proposition requires 1 <= D < x, got D = {d}"
                )));
            }
            let terms = x.powf(11.0 / 30.0) * h.powf(0.25) * d.powf(3.0 / 8.0)
                + x.powf(7.0 / 30.0) * d.powf(0.75)
                + x.powf(23.0 / 60.0) * h.sqrt() * d.powf(0.25)
                + x.powf(4.0 / 15.0) * h.sqrt() * d.sqrt()
                + x.powf(-0.25) * h.powf(-0.5) * d.powf(1.25)
                + d
                + x.powf(-0.4) * h * d.powf(1.5);
            Ok(terms * x.powf(eps))
        }
    }
}
