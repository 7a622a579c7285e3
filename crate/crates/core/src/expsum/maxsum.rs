//! Maximal partial sums `max_{N₁≤N₂} |Σ_{n=N₁}^{N₂} z_n|`.
//!
//! Every contiguous sum is a difference of two prefix sums `P_j − P_i`
//! (`P_0 = 0`), so the maximum is the diameter of the prefix point set. The
//! diameter is attained between hull vertices and found by rotating calipers.

use crate::error::{Error, Result};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxSumMethod {
    /// All `O(len²)` subintervals.
    Naive,
    /// Convex hull of the prefix points plus rotating calipers.
    Hull,
}

pub fn max_partial_sum(z: &[Complex64]) -> Result<f64> {
    max_partial_sum_with(z, MaxSumMethod::Hull)
}

pub fn max_partial_sum_with(z: &[Complex64], method: MaxSumMethod) -> Result<f64> {
    if z.is_empty() {
        return Err(Error::Domain(
            "maximal partial sum of an empty sequence".into(),
        ));
    }
    Ok(match method {
        MaxSumMethod::Naive => naive(z),
        MaxSumMethod::Hull => diameter(&prefix_points(z)),
    })
}

fn naive(z: &[Complex64]) -> f64 {
    let mut best = 0.0f64;
    for start in 0..z.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for w in &z[start..] {
            acc += w;
            best = best.max(acc.norm());
        }
    }
    best
}

fn prefix_points(z: &[Complex64]) -> Vec<(f64, f64)> {
    let mut pts = Vec::with_capacity(z.len() + 1);
    let mut acc = Complex64::new(0.0, 0.0);
    pts.push((0.0, 0.0));
    for w in z {
        acc += w;
        pts.push((acc.re, acc.im));
    }
    pts
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Andrew's monotone chain; counter-clockwise, collinear points dropped.
pub fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Largest pairwise distance of a planar point set.
pub fn diameter(points: &[(f64, f64)]) -> f64 {
    let hull = convex_hull(points);
    match hull.len() {
        0 | 1 => 0.0,
        2 => dist(hull[0], hull[1]),
        k => {
            let mut best = 0.0f64;
            let mut j = 1;
            for i in 0..k {
                let ni = (i + 1) % k;
                // advance j while the area against edge (i, i+1) keeps growing
                loop {
                    let nj = (j + 1) % k;
                    if cross(hull[i], hull[ni], hull[nj]).abs()
                        > cross(hull[i], hull[ni], hull[j]).abs()
                    {
                        j = nj;
                    } else {
                        break;
                    }
                }
                best = best
                    .max(dist(hull[i], hull[j]))
                    .max(dist(hull[ni], hull[j]));
            }
            best
        }
    }
}
