//! Residual grids for `T(x) − C₁ x log x − C₂ x` and power-law fits of the
//! residual size.

use crate::constants::Constants;
use crate::divisor::DivisorTable;
use crate::error::{Error, Result};
use crate::hypersum::{check_constants, residual_from_t, t_exact, TsumMethod};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Exponent of the known upper bound for `R(x)`.
pub const THEOREM_EXPONENT: f64 = 17.0 / 30.0;

/// One row of a residual grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub x: u64,
    #[serde(rename = "T")]
    pub t: u64,
    #[serde(rename = "R")]
    pub r: f64,
}

/// `(x, T(x), R(x))` for every distinct `x`, in increasing order.
pub fn residual_grid(
    table: &DivisorTable,
    constants: &Constants,
    xs: &[u64],
) -> Result<Vec<ResidualRow>> {
    check_constants(&constants.c1, &constants.c2)?;
    let mut xs = xs.to_vec();
    xs.sort_unstable();
    xs.dedup();
    xs.par_iter()
        .map(|&x| {
            let t = t_exact(table, x, TsumMethod::Blocked)?;
            let r = residual_from_t(&constants.c1, &constants.c2, x, t);
            Ok(ResidualRow {
                x,
                t,
                r: r.residual,
            })
        })
        .collect()
}

/// `{base^k : lo ≤ k ≤ hi}`.
pub fn geometric_grid(base: u64, lo: u32, hi: u32) -> Vec<u64> {
    (lo..=hi).filter_map(|k| base.checked_pow(k)).collect()
}

/// Least-squares fit of `log|R| = θ log x + log c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub points: Vec<ResidualRow>,
    pub theta_hat: f64,
    pub c_hat: f64,
    /// `max |R(x)| / x^{17/30}` over all points.
    pub max_normalized: f64,
    /// Rows with `R = 0`, left out of the fit.
    pub zero_rows: usize,
}

pub fn fit_exponent(points: &[ResidualRow]) -> Result<FitReport> {
    let mut points = points.to_vec();
    points.sort_by_key(|p| p.x);
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.r != 0.0 && p.r.is_finite() && p.x > 0)
        .map(|p| ((p.x as f64).ln(), p.r.abs().ln()))
        .collect();
    if usable.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 rows with R != 0, got {}",
            usable.len()
        )));
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all rows share one x".into()));
    }
    let theta_hat = sxy / sxx;
    let c_hat = (my - theta_hat * mx).exp();
    let max_normalized = points
        .iter()
        .map(|p| p.r.abs() / (p.x as f64).powf(THEOREM_EXPONENT))
        .fold(0.0, f64::max);
    let zero_rows = points.iter().filter(|p| p.r == 0.0).count();
    Ok(FitReport {
        points,
        theta_hat,
        c_hat,
        max_normalized,
        zero_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{RigorousValue, TailMode};
    use proptest::prelude::*;

    fn synthetic(c: f64, theta: f64) -> Vec<ResidualRow> {
        geometric_grid(2, 4, 20)
            .into_iter()
            .enumerate()
            .map(|(i, x)| ResidualRow {
                x,
                t: 0,
                r: if i % 2 == 0 { 1.0 } else { -1.0 } * c * (x as f64).powf(theta),
            })
            .collect()
    }

    #[test]
    fn exact_power_laws() {
        let f = fit_exponent(&synthetic(1.0, 0.5)).unwrap();
        assert!((f.theta_hat - 0.5).abs() < 1e-10);
        let f = fit_exponent(&synthetic(3.0, 0.4)).unwrap();
        assert!((f.theta_hat - 0.4).abs() < 1e-10);
        assert!((f.c_hat - 3.0).abs() < 1e-8);
    }

    #[test]
    fn zero_rows_and_insufficient_data() {
        let mut pts = synthetic(1.0, 0.3);
        pts[0].r = 0.0;
        pts[5].r = 0.0;
        let f = fit_exponent(&pts).unwrap();
        assert_eq!(f.zero_rows, 2);
        assert!((f.theta_hat - 0.3).abs() < 1e-10);
        let few = &synthetic(1.0, 0.3)[..2];
        assert!(matches!(fit_exponent(few), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn grid_rows() {
        let table = DivisorTable::new(1 << 17).unwrap();
        let c = Constants::compute(&table, 1 << 17, TailMode::Abel).unwrap();
        let rows = residual_grid(&table, &c, &[10, 4, 1, 4]).unwrap();
        assert_eq!(
            rows.iter().map(|r| (r.x, r.t)).collect::<Vec<_>>(),
            vec![(1, 1), (4, 12), (10, 39)]
        );
        assert!((rows[0].r - (1.0 - c.c2.value)).abs() < 1e-15);
        let loose = Constants {
            c1: RigorousValue::exact(1.0).with_tail(1.0),
            ..c
        };
        assert!(residual_grid(&table, &loose, &[4]).is_err());
        let shuffled = residual_grid(&table, &c, &[4000, 17, 999, 3]).unwrap();
        let sorted = residual_grid(&table, &c, &[3, 17, 999, 4000]).unwrap();
        assert_eq!(shuffled, sorted);
    }

    proptest! {
        #[test]
        fn scale_equivariance(scale in 1e-3f64..1e3, theta in 0.1f64..0.9) {
            let base = fit_exponent(&synthetic(1.7, theta)).unwrap();
            let scaled: Vec<ResidualRow> = synthetic(1.7, theta)
                .into_iter()
                .map(|p| ResidualRow { r: p.r * scale, ..p })
                .collect();
            let s = fit_exponent(&scaled).unwrap();
            prop_assert!((s.theta_hat - base.theta_hat).abs() < 1e-10);
            prop_assert!((s.c_hat / base.c_hat / scale - 1.0).abs() < 1e-9);
        }
    }
}
