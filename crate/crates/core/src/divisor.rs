//! Divisor-function table, the summatory function `D(x) = Σ_{n≤x} τ(n)`,
//! the sawtooth `ψ` and the Dirichlet error `Δ(x)`.

use crate::error::{Error, Result};
use crate::numeric::{KahanSum, EULER_GAMMA};

/// Default upper bound on the sieve length.
pub const DEFAULT_MEMORY_CAP: u64 = 1 << 27;

/// Environment variable that overrides [`DEFAULT_MEMORY_CAP`].
pub const MEMORY_CAP_ENV: &str = "TAUSUM_MAX_SIEVE";

/// Largest `x` for which `delta_via_psi` divides in double precision.
pub const PSI_DIVISION_CAP: u64 = 1 << 46;

/// Memory cap in force: the environment override if it parses, else the default.
pub fn memory_cap() -> u64 {
    std::env::var(MEMORY_CAP_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<u64>().ok())
        .filter(|&c| c > 0)
        .unwrap_or(DEFAULT_MEMORY_CAP)
}

/// `τ(n)` for `1 ≤ n ≤ limit` and the exact prefix sums `D(n)`.
///
/// Immutable after construction; share it freely between threads.
#[derive(Debug, Clone)]
pub struct DivisorTable {
    limit: u64,
    // index 0 is unused padding so that tau[n] is τ(n)
    tau: Vec<u32>,
    prefix: Vec<u64>,
}

impl DivisorTable {
    /// Sieve with the cap from [`memory_cap`].
    pub fn new(limit: u64) -> Result<Self> {
        Self::with_cap(limit, memory_cap())
    }

    /// Linear sieve: every `n` is visited once as `p·m` with `p` the least
    /// prime factor of `n`, and `τ` is updated from the exponent of `p`.
    pub fn with_cap(limit: u64, cap: u64) -> Result<Self> {
        if limit == 0 {
            return Err(Error::Capacity("sieve limit must be at least 1".into()));
        }
        if limit > cap {
            return Err(Error::Capacity(format!(
                "sieve limit {limit} exceeds memory cap {cap}"
            )));
        }
        let n = limit as usize;
        let mut tau = vec![0u32; n + 1];
        // exponent of the least prime factor
        let mut lp_exp = vec![0u8; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        tau[1] = 1;
        for i in 2..=n {
            if tau[i] == 0 {
                tau[i] = 2;
                lp_exp[i] = 1;
                primes.push(i as u32);
            }
            for &p in &primes {
                let p = p as usize;
                let Some(ip) = i.checked_mul(p).filter(|&ip| ip <= n) else {
                    break;
                };
                if i % p == 0 {
                    let k = lp_exp[i] as u32;
                    // τ(i·p) = τ(i)·(k+2)/(k+1)
                    tau[ip] = tau[i] / (k + 1) * (k + 2);
                    lp_exp[ip] = lp_exp[i] + 1;
                    break;
                }
                tau[ip] = tau[i] * 2;
                lp_exp[ip] = 1;
            }
        }
        drop(lp_exp);
        let mut prefix = vec![0u64; n + 1];
        let mut acc = 0u64;
        for i in 1..=n {
            acc += tau[i] as u64;
            prefix[i] = acc;
        }
        Ok(Self { limit, tau, prefix })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// `τ(n)`; panics when `n` is zero or above the limit.
    pub fn tau(&self, n: u64) -> u32 {
        assert!(
            n >= 1 && n <= self.limit,
            "tau({n}) outside table 1..={}",
            self.limit
        );
        self.tau[n as usize]
    }

    /// `D(n)` with `D(0) = 0`; panics above the limit.
    pub fn prefix(&self, n: u64) -> u64 {
        self.prefix[n as usize]
    }

    /// Divisor counts `τ(1..=limit)`.
    pub fn tau_slice(&self) -> &[u32] {
        &self.tau[1..]
    }

    /// Prefix sums `D(1..=limit)`.
    pub fn prefix_slice(&self) -> &[u64] {
        &self.prefix[1..]
    }

    pub(crate) fn check(&self, x: u64) -> Result<()> {
        if x == 0 {
            return Err(Error::Range("x must be at least 1".into()));
        }
        if x > self.limit {
            return Err(Error::Range(format!(
                "x = {x} exceeds table limit {}",
                self.limit
            )));
        }
        Ok(())
    }
}

/// `D(x)` read from the table.
pub fn divisor_summatory(table: &DivisorTable, x: u64) -> Result<u64> {
    table.check(x)?;
    Ok(table.prefix(x))
}

/// Table-free `D(x) = 2 Σ_{n≤√x} ⌊x/n⌋ − ⌊√x⌋²`.
pub fn divisor_summatory_hyperbola(x: u64) -> u64 {
    let r = isqrt(x);
    let s: u64 = (1..=r).map(|n| x / n).sum();
    2 * s - r * r
}

/// Integer square root (floor).
pub fn isqrt(x: u64) -> u64 {
    if x < 2 {
        return x;
    }
    let mut r = (x as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|v| v > x) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|v| v <= x) {
        r += 1;
    }
    r
}

/// Sawtooth `ψ(t) = {t} − 1/2`, in `[−1/2, 1/2)`.
pub fn psi(t: f64) -> f64 {
    t - t.floor() - 0.5
}

/// Main term `x(log x + 2γ − 1)` of `D(x)`.
pub fn dirichlet_main_term(x: f64) -> f64 {
    x * (x.ln() + 2.0 * EULER_GAMMA - 1.0)
}

/// `Δ(x) = D(x) − x(log x + 2γ − 1)`.
pub fn delta(table: &DivisorTable, x: u64) -> Result<f64> {
    table.check(x)?;
    Ok(table.prefix(x) as f64 - dirichlet_main_term(x as f64))
}

/// `−2 Σ_{n≤√x} ψ(x/n)`, the oscillating part of `Δ(x)`.
///
/// The fractional part is taken from the exact remainder `x mod n`, so the
/// result does not depend on the size of `x`; the double-precision cap is
/// still enforced for callers that rely on it.
pub fn delta_via_psi(x: u64) -> Result<f64> {
    if x == 0 {
        return Err(Error::Domain("x must be at least 1".into()));
    }
    if x > PSI_DIVISION_CAP {
        return Err(Error::Range(format!(
            "x = {x} exceeds the double-precision cap 2^46"
        )));
    }
    let r = isqrt(x);
    let s: KahanSum = (1..=r).map(|n| (x % n) as f64 / n as f64 - 0.5).collect();
    Ok(-2.0 * s.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tau_trial(n: u64) -> u32 {
        (1..=n).filter(|&d| n.is_multiple_of(d)).count() as u32
    }

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn limit_one() {
        let t = DivisorTable::new(1).unwrap();
        assert_eq!(t.tau_slice(), &[1]);
        assert_eq!(t.prefix_slice(), &[1]);
    }

    #[test]
    fn small_values_match_trial_division() {
        let t = DivisorTable::new(2000).unwrap();
        for n in 1..=2000 {
            assert_eq!(t.tau(n), tau_trial(n), "tau({n})");
        }
        assert_eq!(t.tau(12), 6);
        assert_eq!(t.prefix(10), 27);
        assert_eq!(
            t.prefix(10),
            (1..=10).map(|n| tau_trial(n) as u64).sum::<u64>()
        );
    }

    #[test]
    fn capacity_errors() {
        assert!(matches!(DivisorTable::new(0), Err(Error::Capacity(_))));
        assert!(matches!(
            DivisorTable::with_cap(11, 10),
            Err(Error::Capacity(_))
        ));
        assert!(DivisorTable::with_cap(10, 10).is_ok());
    }

    #[test]
    fn table_invariants() {
        let t = DivisorTable::new(100_000).unwrap();
        assert_eq!(t.tau(1), 1);
        for w in t.prefix_slice().windows(2) {
            assert!(w[1] > w[0]);
        }
        for n in 2..=t.limit() {
            assert_eq!(t.prefix(n) - t.prefix(n - 1), t.tau(n) as u64);
        }
        // primes have exactly two divisors
        for p in [2u64, 3, 5, 7, 97, 7919, 99_991] {
            assert_eq!(t.tau(p), 2);
        }
        // multiplicativity on coprime pairs
        for a in 1..300u64 {
            for b in 1..300u64 {
                if gcd(a, b) == 1 {
                    assert_eq!(t.tau(a * b), t.tau(a) * t.tau(b));
                }
            }
        }
    }

    #[test]
    fn summatory_examples_and_hyperbola() {
        let t = DivisorTable::new(100_000).unwrap();
        assert_eq!(divisor_summatory(&t, 1).unwrap(), 1);
        assert_eq!(divisor_summatory(&t, 10).unwrap(), 27);
        assert_eq!(divisor_summatory(&t, 100).unwrap(), 482);
        assert_eq!(divisor_summatory_hyperbola(10), 27);
        assert_eq!(divisor_summatory_hyperbola(100), 482);
        for x in 1..=100_000 {
            assert_eq!(t.prefix(x), divisor_summatory_hyperbola(x));
        }
        assert!(matches!(
            divisor_summatory(&t, 100_001),
            Err(Error::Range(_))
        ));
        assert!(matches!(divisor_summatory(&t, 0), Err(Error::Range(_))));
    }

    #[test]
    fn psi_values() {
        assert_eq!(psi(7.0), -0.5);
        assert_eq!(psi(3.25), -0.25);
        assert_eq!(psi(0.5), 0.0);
        assert_eq!(psi(-2.0), -0.5);
        assert!((psi(-0.25) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn delta_examples() {
        let t = DivisorTable::new(100).unwrap();
        let two_minus_two_gamma = 2.0 - 2.0 * EULER_GAMMA;
        assert!((delta(&t, 1).unwrap() - two_minus_two_gamma).abs() < 1e-15);
        assert!((delta(&t, 1).unwrap() - 0.845_568_670).abs() < 1e-9);
        assert!((delta(&t, 10).unwrap() - 2.429_835).abs() < 1e-6);
        assert!((delta(&t, 100).unwrap() - 6.039_84).abs() < 1e-5);
    }

    #[test]
    fn delta_via_psi_examples() {
        assert_eq!(delta_via_psi(1).unwrap(), 1.0);
        // -2(ψ(10) + ψ(5) + ψ(10/3)) = -2(-1/2 - 1/2 - 1/6)
        assert!((delta_via_psi(10).unwrap() - 7.0 / 3.0).abs() < 1e-14);
        let t = DivisorTable::new(1_000_000).unwrap();
        let v = delta_via_psi(1_000_000).unwrap();
        assert!((v - delta(&t, 1_000_000).unwrap()).abs() <= 4.0);
        assert!(delta_via_psi(0).is_err());
        assert!(delta_via_psi(PSI_DIVISION_CAP + 1).is_err());
    }

    #[test]
    fn isqrt_edges() {
        for x in 0..10_000u64 {
            let r = isqrt(x);
            assert!(r * r <= x && (r + 1) * (r + 1) > x);
        }
        assert_eq!(isqrt(u64::MAX), u32::MAX as u64);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn psi_is_periodic(t in -1e6f64..1e6, k in -1000i32..1000) {
                let a = psi(t);
                let b = psi(t + k as f64);
                prop_assert!((a - b).abs() < 1e-9 || (a - b).abs() > 1.0 - 1e-9);
                prop_assert!((-0.5..0.5).contains(&a));
            }

            #[test]
            fn psi_at_integers(n in -1_000_000i64..1_000_000) {
                prop_assert_eq!(psi(n as f64), -0.5);
            }
        }
    }
}
