//! Closed-form extremal values, all in checked 128-bit integer arithmetic.
//!
//! Every evaluator rejects parameters outside the hypothesis under which the
//! corresponding bound is a theorem.

use serde::Serialize;

use crate::error::{Error, Result};

/// `C(a, b)`, zero whenever `b < 0`, `b > a` or `a < 0`.
pub fn binom(a: i64, b: i64) -> Result<u128> {
    if a < 0 || b < 0 || b > a {
        return Ok(0);
    }
    let b = b.min(a - b) as u128;
    let a = a as u128;
    let mut acc = 1u128;
    for i in 0..b {
        // acc = C(a, i); multiply by (a - i) / (i + 1) without leaving the integers
        let g = gcd(acc, i + 1);
        let (reduced, div) = (acc / g, (i + 1) / g);
        acc = reduced.checked_mul((a - i) / div).ok_or(Error::Overflow("binom"))?;
    }
    Ok(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn factorial(n: u64) -> Result<u128> {
    (1..=n as u128).try_fold(1u128, |acc, x| acc.checked_mul(x).ok_or(Error::Overflow("factorial")))
}

fn mul(a: u128, b: u128) -> Result<u128> {
    a.checked_mul(b).ok_or(Error::Overflow("bound product"))
}

fn add(a: u128, b: u128) -> Result<u128> {
    a.checked_add(b).ok_or(Error::Overflow("bound sum"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Ekr,
    Family,
    Cross,
    Strict,
    Pm,
}

impl BoundKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ekr" => Ok(Self::Ekr),
            "family" => Ok(Self::Family),
            "cross" => Ok(Self::Cross),
            "strict" => Ok(Self::Strict),
            "pm" => Ok(Self::Pm),
            _ => Err(Error::Unknown {
                kind: "bound",
                name: s.to_string(),
                available: "ekr, family, cross, strict, pm".into(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundValue {
    pub kind: BoundKind,
    #[serde(with = "crate::report::decimal")]
    pub value: u128,
    pub n: u32,
    pub k: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
}

fn require_single(n: u32, k: u32) -> Result<()> {
    if k < 1 || n < 2 * k {
        return Err(Error::Hypothesis(format!("need n >= 2k >= 2, got n = {n}, k = {k}")));
    }
    Ok(())
}

fn require_pair(n: u32, k: u32, l: u32) -> Result<()> {
    if l < 1 || k < l || n < k + l {
        return Err(Error::Hypothesis(format!("need k >= l >= 1 and n >= k + l, got n = {n}, k = {k}, l = {l}")));
    }
    Ok(())
}

fn single(kind: BoundKind, n: u32, k: u32, value: u128) -> BoundValue {
    BoundValue { kind, value, n, k, l: None, m: None }
}

/// Largest intersecting family of k-sets: `C(n-1, k-1)`.
pub fn ekr_bound(n: u32, k: u32) -> Result<BoundValue> {
    require_single(n, k)?;
    Ok(single(BoundKind::Ekr, n, k, binom(n as i64 - 1, k as i64 - 1)?))
}

/// Largest summed intersection over an intersecting family:
/// `C(C(n-1,k-1), 2) + (n-1) · C(C(n-2,k-2), 2)`.
pub fn omega_intersecting_bound(n: u32, k: u32) -> Result<BoundValue> {
    require_single(n, k)?;
    let (n, k) = (n as i64, k as i64);
    let outer = binom(n - 1, k - 1)?;
    let inner = binom(n - 2, k - 2)?;
    let value = add(choose2(outer)?, mul((n - 1) as u128, choose2(inner)?)?)?;
    Ok(single(BoundKind::Family, n as u32, k as u32, value))
}

fn choose2(x: u128) -> Result<u128> {
    if x < 2 {
        return Ok(0);
    }
    // one of x, x-1 is even
    if x.is_multiple_of(2) {
        mul(x / 2, x - 1)
    } else {
        mul(x, (x - 1) / 2)
    }
}

/// Largest summed intersection over a cross-intersecting pair of k- and l-set families:
/// `C(n-1,k-1) C(n-1,l-1) + (n-1) C(n-2,k-2) C(n-2,l-2)`.
pub fn omega_cross_bound(n: u32, k: u32, l: u32) -> Result<BoundValue> {
    require_pair(n, k, l)?;
    let (ni, ki, li) = (n as i64, k as i64, l as i64);
    let first = mul(binom(ni - 1, ki - 1)?, binom(ni - 1, li - 1)?)?;
    let second = mul((ni - 1) as u128, mul(binom(ni - 2, ki - 2)?, binom(ni - 2, li - 2)?)?)?;
    Ok(BoundValue { kind: BoundKind::Cross, value: add(first, second)?, n, k, l: Some(l), m: None })
}

/// Strict (equal pairs excluded) variant for two k-set families:
/// `C(n-1,k-1)(C(n-1,k-1)-1) + (n-1) C(n-2,k-2)(C(n-2,k-2)-1)`.
pub fn omega_strict_bound(n: u32, k: u32) -> Result<BoundValue> {
    require_single(n, k)?;
    let (ni, ki) = (n as i64, k as i64);
    let outer = binom(ni - 1, ki - 1)?;
    let inner = binom(ni - 2, ki - 2)?;
    // x(x-1) vanishes at x = 0
    let value = add(mul(outer, outer.saturating_sub(1))?, mul((ni - 1) as u128, mul(inner, inner.saturating_sub(1))?)?)?;
    Ok(single(BoundKind::Strict, n, k, value))
}

/// Number of ordered star pairs meeting in exactly `m` elements:
/// `C(n-1,m-1) C(n-m,k-m) C(n-k,l-m)`.
pub fn pm_star_count(n: u32, k: u32, l: u32, m: u32) -> Result<u128> {
    require_pair(n, k, l)?;
    if m < 1 || m > l {
        return Err(Error::Hypothesis(format!("need 1 <= m <= l = {l}, got m = {m}")));
    }
    let (n, k, l, m) = (n as i64, k as i64, l as i64, m as i64);
    mul(mul(binom(n - 1, m - 1)?, binom(n - m, k - m)?)?, binom(n - k, l - m)?)
}

pub fn pm_star_bound(n: u32, k: u32, l: u32, m: u32) -> Result<BoundValue> {
    Ok(BoundValue { kind: BoundKind::Pm, value: pm_star_count(n, k, l, m)?, n, k, l: Some(l), m: Some(m) })
}

/// The per-pair cyclic-order multiplicity `(n-k-l+m)! (k-m)! m! (l-m)!`.
pub fn representation_multiplicity(n: u32, k: u32, l: u32, m: u32) -> Result<u128> {
    if m > k.min(l) || n + m < k + l {
        return Err(Error::Hypothesis(format!("multiplicity undefined for n = {n}, k = {k}, l = {l}, m = {m}")));
    }
    let rest = (n + m - k - l) as u64;
    [rest, (k - m) as u64, m as u64, (l - m) as u64]
        .into_iter()
        .try_fold(1u128, |acc, x| mul(acc, factorial(x)?))
}

/// Whether `Σ_m m · pm_star_count(n,k,l,m)` equals [`omega_cross_bound`].
pub fn star_identity_check(n: u32, k: u32, l: u32) -> Result<bool> {
    let rhs = omega_cross_bound(n, k, l)?.value;
    let mut lhs = 0u128;
    for m in 1..=l {
        lhs = add(lhs, mul(m as u128, pm_star_count(n, k, l, m)?)?)?;
    }
    Ok(lhs == rhs)
}

/// All `(n, k, l)` with `k >= l >= 1`, `n >= k + l` and `n <= n_max`.
pub fn pair_configs(n_max: u32) -> impl Iterator<Item = (u32, u32, u32)> {
    (2..=n_max).flat_map(move |n| (1..n).flat_map(move |k| (1..=k).filter(move |&l| k + l <= n).map(move |l| (n, k, l))))
}

/// All `(n, k)` with `n >= 2k >= 2` and `n <= n_max`.
pub fn single_configs(n_max: u32) -> impl Iterator<Item = (u32, u32)> {
    (2..=n_max).flat_map(|n| (1..=n / 2).map(move |k| (n, k)))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Pascal-triangle oracle, independent of the multiplicative formula.
    fn pascal(rows: usize) -> Vec<Vec<u128>> {
        let mut t = vec![vec![1u128]];
        for r in 1..rows {
            let prev = &t[r - 1];
            let mut row = vec![1u128; r + 1];
            for c in 1..r {
                row[c] = prev[c - 1] + prev[c];
            }
            t.push(row);
        }
        t
    }

    #[test]
    fn binom_examples() {
        assert_eq!(binom(5, 2).unwrap(), 10);
        assert_eq!(binom(3, -1).unwrap(), 0);
        assert_eq!(binom(10, 2).unwrap(), 45);
        assert_eq!(binom(-1, 0).unwrap(), 0);
        assert_eq!(binom(2, 3).unwrap(), 0);
        assert_eq!(binom(0, 0).unwrap(), 1);
    }

    #[test]
    fn binom_matches_pascal() {
        let t = pascal(120);
        for (a, row) in t.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                assert_eq!(binom(a as i64, b as i64).unwrap(), v, "C({a},{b})");
            }
        }
    }

    #[test]
    fn binom_overflow_is_an_error() {
        assert!(binom(130, 65).unwrap() > 0);
        assert_eq!(binom(200, 100), Err(Error::Overflow("binom")));
    }

    #[test]
    fn ekr_examples() {
        assert_eq!(ekr_bound(4, 2).unwrap().value, 3);
        assert_eq!(ekr_bound(6, 3).unwrap().value, 10);
        assert_eq!(ekr_bound(5, 1).unwrap().value, 1);
        assert!(matches!(ekr_bound(5, 3), Err(Error::Hypothesis(_))));
        assert!(matches!(ekr_bound(5, 0), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn intersecting_bound_examples() {
        assert_eq!(omega_intersecting_bound(5, 2).unwrap().value, 6);
        assert_eq!(omega_intersecting_bound(6, 3).unwrap().value, 75);
        assert_eq!(omega_intersecting_bound(7, 2).unwrap().value, 15);
        assert_eq!(omega_intersecting_bound(8, 3).unwrap().value, 315);
        for n in 2..30 {
            assert_eq!(omega_intersecting_bound(n, 1).unwrap().value, 0);
        }
        assert!(matches!(omega_intersecting_bound(3, 2), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn cross_bound_examples() {
        assert_eq!(omega_cross_bound(5, 2, 2).unwrap().value, 20);
        assert_eq!(omega_cross_bound(4, 2, 2).unwrap().value, 12);
        assert_eq!(omega_cross_bound(6, 3, 2).unwrap().value, 70);
        assert_eq!(omega_cross_bound(3, 2, 1).unwrap().value, 2);
        assert!(matches!(omega_cross_bound(6, 2, 3), Err(Error::Hypothesis(_))));
        assert!(matches!(omega_cross_bound(4, 3, 2), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn strict_bound_examples() {
        assert_eq!(omega_strict_bound(5, 2).unwrap().value, 12);
        assert_eq!(omega_strict_bound(6, 3).unwrap().value, 150);
        for n in 2..30 {
            assert_eq!(omega_strict_bound(n, 1).unwrap().value, 0);
        }
    }

    #[test]
    fn pm_examples() {
        assert_eq!(pm_star_count(5, 2, 2, 1).unwrap(), 12);
        assert_eq!(pm_star_count(5, 2, 2, 2).unwrap(), 4);
        assert_eq!(pm_star_count(6, 3, 2, 2).unwrap(), 20);
        assert!(matches!(pm_star_count(6, 3, 2, 3), Err(Error::Hypothesis(_))));
        assert!(matches!(pm_star_count(6, 3, 2, 0), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn multiplicity_examples() {
        assert_eq!(representation_multiplicity(5, 2, 2, 1).unwrap(), 2);
        assert_eq!(representation_multiplicity(5, 2, 2, 2).unwrap(), 12);
    }

    #[test]
    fn star_identity_examples() {
        assert!(star_identity_check(5, 2, 2).unwrap());
        assert!(star_identity_check(6, 3, 2).unwrap());
        assert_eq!(pm_star_count(6, 3, 2, 1).unwrap(), 30);
    }

    #[test]
    fn star_identity_sweep_to_twenty() {
        let mut count = 0;
        for (n, k, l) in pair_configs(20) {
            assert!(star_identity_check(n, k, l).unwrap(), "({n},{k},{l})");
            count += 1;
        }
        assert!(count > 500);
    }

    #[test]
    fn strict_is_twice_family_and_cross_minus_diagonal() {
        for (n, k) in single_configs(40) {
            let strict = omega_strict_bound(n, k).unwrap().value;
            assert_eq!(strict, 2 * omega_intersecting_bound(n, k).unwrap().value, "({n},{k})");
            let diag = k as u128 * binom(n as i64 - 1, k as i64 - 1).unwrap();
            assert_eq!(strict, omega_cross_bound(n, k, k).unwrap().value - diag, "({n},{k})");
        }
    }

    #[test]
    fn large_parameters_stay_exact_or_error() {
        // C(62,31) ~ 4.65e17 squared fits in 128 bits
        assert!(omega_intersecting_bound(63, 31).is_ok());
        assert!(omega_cross_bound(63, 31, 31).is_ok());
    }
}
