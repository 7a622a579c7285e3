//! Exact evaluation of `T(x) = Σ_{n≤x} τ(⌊x/n⌋)τ(n)` and its residual
//! against `C₁ x log x + C₂ x`.

use crate::constants::RigorousValue;
use crate::divisor::DivisorTable;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Largest `x` accepted by [`TsumMethod::Naive2d`].
pub const NAIVE2D_MAX: u64 = 1_000_000;

/// Largest constant tail accepted by [`residual`].
pub const MAX_CONSTANT_TAIL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TsumMethod {
    /// `Σ_{n₁n₂≤x} τ(⌊x/(n₁n₂)⌋)`, `O(x log x)`.
    Naive2d,
    /// `Σ_{n≤x} τ(⌊x/n⌋)τ(n)`, `O(x)`.
    Single,
    /// Plateau walk over constant `⌊x/n⌋`, `O(√x)`.
    Blocked,
}

impl TsumMethod {
    pub const ALL: [TsumMethod; 3] = [TsumMethod::Naive2d, TsumMethod::Single, TsumMethod::Blocked];
}

impl fmt::Display for TsumMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TsumMethod::Naive2d => "naive2d",
            TsumMethod::Single => "single",
            TsumMethod::Blocked => "blocked",
        })
    }
}

impl FromStr for TsumMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive2d" => Ok(TsumMethod::Naive2d),
            "single" => Ok(TsumMethod::Single),
            "blocked" => Ok(TsumMethod::Blocked),
            other => Err(Error::Parse(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TsumRecord {
    pub x: u64,
    pub t_value: u64,
    pub residual: f64,
}

/// `T(x)` by the requested method. All methods use integer arithmetic only.
pub fn t_exact(table: &DivisorTable, x: u64, method: TsumMethod) -> Result<u64> {
    table.check(x)?;
    match method {
        TsumMethod::Naive2d => {
            if x > NAIVE2D_MAX {
                return Err(Error::Capacity(format!(
                    "naive2d supports x <= {NAIVE2D_MAX}, got {x}"
                )));
            }
            Ok(t_naive2d(table, x))
        }
        TsumMethod::Single => Ok(t_single(table, x)),
        TsumMethod::Blocked => Ok(t_blocked(table, x)),
    }
}

fn t_naive2d(table: &DivisorTable, x: u64) -> u64 {
    let mut total = 0u64;
    for n1 in 1..=x {
        let m = x / n1;
        for n2 in 1..=m {
            // ⌊x/(n₁n₂)⌋ = ⌊⌊x/n₁⌋/n₂⌋
            total += table.tau(m / n2) as u64;
        }
    }
    total
}

fn t_single(table: &DivisorTable, x: u64) -> u64 {
    (1..=x)
        .map(|n| table.tau(x / n) as u64 * table.tau(n) as u64)
        .sum()
}

fn t_blocked(table: &DivisorTable, x: u64) -> u64 {
    let mut total = 0u64;
    let mut n = 1u64;
    while n <= x {
        let q = x / n;
        let hi = x / q;
        total += table.tau(q) as u64 * (table.prefix(hi) - table.prefix(n - 1));
        n = hi + 1;
    }
    total
}

/// Number of pairs `(n₁, n₂)` with `n₁n₂ ≤ x`, i.e. `D(x)`, counted by the
/// same loop structure as the naive double sum.
pub fn count_hyperbola_pairs(x: u64) -> u64 {
    (1..=x).map(|n1| x / n1).sum()
}

/// Residual `T(x) − C₁ x log x − C₂ x`, with the uncertainty inherited from
/// the constants' tails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub x: u64,
    pub t_value: u64,
    pub residual: f64,
    /// `c1.tail · x log x + c2.tail · x`
    pub uncertainty: f64,
}

impl From<Residual> for TsumRecord {
    fn from(r: Residual) -> Self {
        TsumRecord {
            x: r.x,
            t_value: r.t_value,
            residual: r.residual,
        }
    }
}

pub(crate) fn check_constants(c1: &RigorousValue, c2: &RigorousValue) -> Result<()> {
    for (name, c) in [("c1", c1), ("c2", c2)] {
        if !(c.tail <= MAX_CONSTANT_TAIL) {
            return Err(Error::Precision(format!(
                "{name} tail {:e} exceeds {MAX_CONSTANT_TAIL:e}",
                c.tail
            )));
        }
    }
    Ok(())
}

pub(crate) fn residual_from_t(
    c1: &RigorousValue,
    c2: &RigorousValue,
    x: u64,
    t_value: u64,
) -> Residual {
    let xf = x as f64;
    let xlogx = xf * xf.ln();
    Residual {
        x,
        t_value,
        residual: t_value as f64 - c1.value * xlogx - c2.value * xf,
        uncertainty: c1.tail * xlogx + c2.tail * xf,
    }
}

/// `R(x) = T(x) − C₁x log x − C₂x`, with `T` from the blocked method.
pub fn residual(
    table: &DivisorTable,
    c1: &RigorousValue,
    c2: &RigorousValue,
    x: u64,
) -> Result<Residual> {
    check_constants(c1, c2)?;
    let t = t_exact(table, x, TsumMethod::Blocked)?;
    Ok(residual_from_t(c1, c2, x, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::TailMode;

    // T(x) straight from the double sum, τ by trial division.
    fn t_oracle(x: u64) -> u64 {
        let tau = |n: u64| (1..=n).filter(|&d| n.is_multiple_of(d)).count() as u64;
        let mut total = 0;
        for n1 in 1..=x {
            for n2 in 1..=x {
                if n1 * n2 <= x {
                    total += tau(x / (n1 * n2));
                }
            }
        }
        total
    }

    #[test]
    fn spot_values_all_methods() {
        let t = DivisorTable::new(100).unwrap();
        for m in TsumMethod::ALL {
            assert_eq!(t_exact(&t, 1, m).unwrap(), 1);
            assert_eq!(t_exact(&t, 4, m).unwrap(), 12);
            assert_eq!(t_exact(&t, 10, m).unwrap(), 39);
        }
        for x in [1, 4, 10, 37] {
            assert_eq!(t_exact(&t, x, TsumMethod::Single).unwrap(), t_oracle(x));
        }
    }

    #[test]
    fn methods_agree() {
        let t = DivisorTable::new(3000).unwrap();
        for x in 1..=3000 {
            let a = t_exact(&t, x, TsumMethod::Naive2d).unwrap();
            let b = t_exact(&t, x, TsumMethod::Single).unwrap();
            let c = t_exact(&t, x, TsumMethod::Blocked).unwrap();
            assert_eq!(a, b, "x = {x}");
            assert_eq!(b, c, "x = {x}");
        }
    }

    #[test]
    fn not_monotone() {
        // stepping x to 13 moves ⌊13/n⌋ off 4 and 6 onto primes, so T drops
        let t = DivisorTable::new(30).unwrap();
        assert_eq!(t_exact(&t, 12, TsumMethod::Single).unwrap(), 59);
        assert_eq!(t_exact(&t, 13, TsumMethod::Single).unwrap(), 57);
        assert_eq!(t_oracle(13), 57);
    }

    #[test]
    fn pair_count_symmetric() {
        // every (n1, n2) with n1 n2 <= x counted exactly once
        let t = DivisorTable::new(500).unwrap();
        for x in [1u64, 4, 10, 99, 500] {
            let mut brute = 0;
            for a in 1..=x {
                for b in 1..=x {
                    if a * b <= x {
                        brute += 1;
                        assert!(b * a <= x);
                    }
                }
            }
            assert_eq!(count_hyperbola_pairs(x), brute);
            assert_eq!(count_hyperbola_pairs(x), t.prefix(x));
        }
    }

    #[test]
    fn errors() {
        let t = DivisorTable::new(10).unwrap();
        assert!(matches!(
            t_exact(&t, 11, TsumMethod::Blocked),
            Err(Error::Range(_))
        ));
        assert!(matches!(
            t_exact(&t, 0, TsumMethod::Single),
            Err(Error::Range(_))
        ));
        let big = DivisorTable::new(NAIVE2D_MAX + 1).unwrap();
        assert!(matches!(
            t_exact(&big, NAIVE2D_MAX + 1, TsumMethod::Naive2d),
            Err(Error::Capacity(_))
        ));
        let loose = RigorousValue::exact(1.0).with_tail(1e-3);
        let ok = RigorousValue::exact(1.0);
        assert!(matches!(
            residual(&t, &loose, &ok, 5),
            Err(Error::Precision(_))
        ));
    }

    #[test]
    fn residual_at_one() {
        let t = DivisorTable::new(10).unwrap();
        let c1 = RigorousValue::exact(0.7);
        let c2 = RigorousValue::exact(0.25);
        let r = residual(&t, &c1, &c2, 1).unwrap();
        assert_eq!(r.residual, 1.0 - 0.25);
        assert_eq!(r.uncertainty, 0.0);
        assert_eq!(TailMode::Crude.to_string(), "crude");
    }

    #[test]
    fn method_parse_roundtrip() {
        for m in TsumMethod::ALL {
            assert_eq!(m.to_string().parse::<TsumMethod>().unwrap(), m);
        }
        assert!("fast".parse::<TsumMethod>().is_err());
    }
}
