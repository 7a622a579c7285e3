//! Trigonometric approximation of the sawtooth `ψ` with a Fejér-kernel
//! error envelope.

use crate::divisor::psi;
use crate::error::{Error, Result};
use crate::numeric::KahanSum;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Below this `|t|` the factor `πt·cot(πt)` is taken from its Taylor series.
const SERIES_SWITCH: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VaalerEval {
    pub x: f64,
    pub h: u32,
    pub approx: f64,
    pub true_psi: f64,
    pub envelope: f64,
}

impl VaalerEval {
    pub fn new(x: f64, h: u32) -> Result<Self> {
        Ok(Self {
            x,
            h,
            approx: psi_vaaler(x, h)?,
            true_psi: psi(x),
            envelope: vaaler_envelope(x, h)?,
        })
    }

    /// Whether `|ψ − approx| ≤ envelope + slack`.
    pub fn within(&self, slack: f64) -> bool {
        (self.true_psi - self.approx).abs() <= self.envelope + slack
    }
}

/// `Φ(t) = πt(1 − |t|) cot(πt) + |t|` on `(−1, 1)`.
pub fn phi(t: f64) -> Result<f64> {
    if !(t.abs() < 1.0) {
        return Err(Error::Domain(format!("phi requires |t| < 1, got {t}")));
    }
    let a = t.abs();
    let x = PI * a;
    let x_cot_x = if a < SERIES_SWITCH {
        let x2 = x * x;
        1.0 - x2 / 3.0 - x2 * x2 / 45.0
    } else {
        x / x.tan()
    };
    Ok((1.0 - a) * x_cot_x + a)
}

fn check_h(h: u32) -> Result<()> {
    if h == 0 {
        return Err(Error::Domain("H must be at least 1".into()));
    }
    Ok(())
}

/// `−Σ_{h=1}^{H} Φ(h/(H+1)) sin(2πhx)/(πh)`, the `±h` pairs of the complex form.
pub fn psi_vaaler(x: f64, h: u32) -> Result<f64> {
    check_h(h)?;
    let r = x - x.floor();
    let scale = h as f64 + 1.0;
    let mut acc = KahanSum::new();
    for k in 1..=h {
        let kf = k as f64;
        let w = phi(kf / scale)?;
        acc.add(w * (2.0 * PI * kf * r).sin() / (PI * kf));
    }
    Ok(-acc.value())
}

/// `(1/(2H+2)) Σ_{|h|≤H} (1 − |h|/(H+1)) e(hx)`, evaluated as a cosine sum.
pub fn vaaler_envelope(x: f64, h: u32) -> Result<f64> {
    check_h(h)?;
    let r = x - x.floor();
    let scale = h as f64 + 1.0;
    let mut acc = KahanSum::new();
    acc.add(1.0);
    for k in 1..=h {
        let kf = k as f64;
        acc.add(2.0 * (1.0 - kf / scale) * (2.0 * PI * kf * r).cos());
    }
    Ok((acc.value() / (2.0 * scale)).max(0.0))
}

/// Closed Fejér form `(sin(π(H+1)x) / sin(πx))² / ((H+1)(2H+2))`; `None` at integers.
pub fn vaaler_envelope_fejer(x: f64, h: u32) -> Result<Option<f64>> {
    check_h(h)?;
    let r = x - x.floor();
    let s = (PI * r).sin();
    if r == 0.0 || s.abs() < 1e-300 {
        return Ok(None);
    }
    let scale = h as f64 + 1.0;
    let q = (PI * scale * r).sin() / s;
    Ok(Some(q * q / (scale * 2.0 * scale)))
}
