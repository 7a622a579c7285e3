use super::{
    eval_frak_s, eval_s, eval_s_star, theoretical_bound, BoundCheckReport, BoundKind, BoundParams,
    Coefficients, ExpSumSpec, FrakSpec,
};
use crate::error::{Error, Result};
use crate::numeric::splitmix64;
use rayon::prelude::*;
use serde::Serialize;

/// One grid point of a sweep.
#[derive(Debug, Clone)]
pub enum SweepItem {
    Triple(ExpSumSpec),
    Frak(FrakSpec),
}

/// Reports in grid order, plus the points that failed to evaluate.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub kind: BoundKind,
    pub reports: Vec<BoundCheckReport>,
    /// `(grid index, error message)`
    pub failures: Vec<(usize, String)>,
    pub max_ratio: f64,
}

fn check_point(kind: BoundKind, item: &SweepItem, eps: f64) -> Result<BoundCheckReport> {
    match (kind, item) {
        (BoundKind::ThmS, SweepItem::Triple(s)) => {
            let v = eval_s(s)?;
            let p = BoundParams::triple(s.h as f64, s.m as f64, s.n as f64, s.x);
            BoundCheckReport::new(
                kind.name(),
                s.params(),
                v.norm(),
                theoretical_bound(kind, &p, eps)?,
            )
        }
        (BoundKind::ThmSstar, SweepItem::Triple(s)) => {
            let v = eval_s_star(s)?;
            let p = BoundParams::triple(s.h as f64, s.m as f64, s.n as f64, s.x);
            BoundCheckReport::new(
                kind.name(),
                s.params(),
                v,
                theoretical_bound(kind, &p, eps)?,
            )
        }
        (BoundKind::Rs3d, SweepItem::Triple(s)) => {
            if s.delta != 0.0 {
                return Err(Error::Domain(
                    "rs3d sums are unperturbed; delta must be 0".into(),
                ));
            }
            // Σ_{m,n} |Σ_h …|*: the maximal sum runs over h, so h plays the
            // inner variable and m, n the two outer ones.
            let v = eval_s_star(s)?;
            let p = BoundParams::triple(s.m as f64, s.h as f64, s.n as f64, s.x);
            BoundCheckReport::new(
                kind.name(),
                s.params(),
                v,
                theoretical_bound(kind, &p, eps)?,
            )
        }
        (BoundKind::Proposition, SweepItem::Frak(f)) => {
            let v = eval_frak_s(f)?;
            let p = BoundParams::proposition(f.x, f.d() as f64, f.h as f64);
            BoundCheckReport::new(
                kind.name(),
                f.params(),
                v.norm(),
                theoretical_bound(kind, &p, eps)?,
            )
        }
        _ => Err(Error::Domain(format!(
            "grid item does not fit bound kind {kind}"
        ))),
    }
}

/// Evaluate every grid point against `kind`. Points that fail are skipped and
/// recorded; the report order follows the grid order.
pub fn bound_sweep(kind: BoundKind, grid: &[SweepItem], eps: f64) -> Result<SweepReport> {
    if grid.is_empty() {
        return Err(Error::Domain("sweep grid is empty".into()));
    }
    let results: Vec<Result<BoundCheckReport>> = grid
        .par_iter()
        .map(|item| check_point(kind, item, eps))
        .collect();
    let mut reports = Vec::with_capacity(grid.len());
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e) => failures.push((i, e.to_string())),
        }
    }
    let max_ratio = reports.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(SweepReport {
        kind,
        reports,
        failures,
        max_ratio,
    })
}

/// Scales used by [`standard_grid`].
pub const GRID_SCALES: [u64; 4] = [4, 8, 16, 32];
pub const GRID_X: [f64; 4] = [10.0, 100.0, 1000.0, 10_000.0];

/// The reference grid for `kind`: `H, M, N ∈ {4, 8, 16, 32}`,
/// `X ∈ {10, …, 10⁴}`, `α = 1/2`, `β = 3/2`, random unimodular coefficients.
/// Perturbed kinds use `δ = 1`, `rs3d` uses `δ = 0`. The proposition grid
/// instead ranges over `x ∈ {10⁴, 10⁵, 10⁶}` and small `D₁, D₂, L, H`
/// with `L²D ≤ x`.
pub fn standard_grid(kind: BoundKind, seed: u64) -> Vec<SweepItem> {
    let mut items = Vec::new();
    if kind == BoundKind::Proposition {
        for x in [1e4, 1e5, 1e6] {
            for d1 in [2u64, 4, 8] {
                for d2 in [2u64, 4, 8] {
                    for l in [2u64, 4, 8] {
                        for h in [2u64, 4] {
                            if ((l * l * d1 * d2) as f64) <= x {
                                for delta in [0u8, 1] {
                                    items.push(SweepItem::Frak(FrakSpec {
                                        x,
                                        d1,
                                        d2,
                                        l,
                                        h,
                                        delta,
                                    }));
                                }
                            }
                        }
                    }
                }
            }
        }
        return items;
    }
    let delta = if kind == BoundKind::Rs3d { 0.0 } else { 1.0 };
    let mut idx = 0u64;
    for &h in &GRID_SCALES {
        for &m in &GRID_SCALES {
            for &n in &GRID_SCALES {
                for &x in &GRID_X {
                    let sa = splitmix64(seed ^ (2 * idx));
                    let sb = splitmix64(seed ^ (2 * idx + 1));
                    idx += 1;
                    let spec = ExpSumSpec::new(h, m, n, x, 0.5, 1.5)
                        .with_delta(delta)
                        .with_coefficients(Coefficients::random(sa), Coefficients::random(sb));
                    items.push(SweepItem::Triple(spec));
                }
            }
        }
    }
    items
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point() {
        let grid = vec![SweepItem::Triple(ExpSumSpec::new(1, 1, 1, 2.0, 0.5, 1.5))];
        let r = bound_sweep(BoundKind::ThmS, &grid, 0.0).unwrap();
        assert_eq!(r.reports.len(), 1);
        assert!(r.failures.is_empty());
        assert!(bound_sweep(BoundKind::ThmS, &[], 0.0).is_err());
    }

    #[test]
    fn zero_coefficients_give_zero_ratios() {
        let grid: Vec<SweepItem> = [4u64, 8]
            .iter()
            .map(|&h| {
                SweepItem::Triple(
                    ExpSumSpec::new(h, 4, 4, 100.0, 0.5, 1.5)
                        .with_coefficients(Coefficients::zeros(), Coefficients::random(1)),
                )
            })
            .collect();
        let r = bound_sweep(BoundKind::ThmS, &grid, 0.0).unwrap();
        assert!(r.reports.iter().all(|p| p.ratio == 0.0));
        assert_eq!(r.max_ratio, 0.0);
    }

    #[test]
    fn mismatched_items_are_recorded() {
        let grid = vec![
            SweepItem::Frak(FrakSpec {
                x: 100.0,
                d1: 1,
                d2: 1,
                l: 1,
                h: 1,
                delta: 0,
            }),
            SweepItem::Triple(ExpSumSpec::new(2, 2, 2, 10.0, 0.5, 1.5).with_delta(1.0)),
            SweepItem::Triple(ExpSumSpec::new(2, 2, 2, 10.0, 0.5, 1.5)),
        ];
        let r = bound_sweep(BoundKind::Rs3d, &grid, 0.0).unwrap();
        assert_eq!(r.reports.len(), 1);
        assert_eq!(
            r.failures.iter().map(|f| f.0).collect::<Vec<_>>(),
            vec![0, 1]
        );
    }

    #[test]
    fn grids_are_deterministic() {
        let a = bound_sweep(
            BoundKind::ThmS,
            &standard_grid(BoundKind::ThmS, 9)[..20],
            0.0,
        )
        .unwrap();
        let b = bound_sweep(
            BoundKind::ThmS,
            &standard_grid(BoundKind::ThmS, 9)[..20],
            0.0,
        )
        .unwrap();
        assert_eq!(a.reports, b.reports);
        assert_eq!(standard_grid(BoundKind::ThmSstar, 0).len(), 256);
        assert!(!standard_grid(BoundKind::Proposition, 0).is_empty());
    }
}
