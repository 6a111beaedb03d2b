// SPDX-License-Identifier: Apache-2.0

//! Integer primitives: Kronecker symbols, squarefree sieving, fundamental
//! discriminants and the splitting of rational primes in quadratic fields.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Real or imaginary quadratic field (equivalently, sign of the discriminant).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    Real,
    Imaginary,
}

impl Signature {
    /// Rank of the unit group of the ring of integers.
    pub fn unit_rank(self) -> u32 {
        match self {
            Signature::Real => 1,
            Signature::Imaginary => 0,
        }
    }

    pub fn sign(self) -> i64 {
        match self {
            Signature::Real => 1,
            Signature::Imaginary => -1,
        }
    }

    pub fn of(d: i64) -> Signature {
        if d > 0 {
            Signature::Real
        } else {
            Signature::Imaginary
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Signature::Real => "real",
            Signature::Imaginary => "imaginary",
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Signature {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "real" | "totally-real" | "totally_real" => Ok(Signature::Real),
            "imaginary" | "complex" => Ok(Signature::Imaginary),
            other => Err(format!("unknown signature '{other}'")),
        }
    }
}

/// Discriminant of a quadratic field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct FundamentalDiscriminant(i64);

impl FundamentalDiscriminant {
    pub fn new(d: i64) -> Result<Self> {
        if is_fundamental(d) {
            Ok(FundamentalDiscriminant(d))
        } else {
            Err(Error::NotFundamental(d))
        }
    }

    /// Caller guarantees `d` is fundamental.
    pub(crate) fn new_unchecked(d: i64) -> Self {
        debug_assert!(is_fundamental(d), "{d}");
        FundamentalDiscriminant(d)
    }

    pub fn get(self) -> i64 {
        self.0
    }

    pub fn abs(self) -> u64 {
        self.0.unsigned_abs()
    }

    pub fn signature(self) -> Signature {
        Signature::of(self.0)
    }
}

impl TryFrom<i64> for FundamentalDiscriminant {
    type Error = Error;

    fn try_from(d: i64) -> Result<Self> {
        FundamentalDiscriminant::new(d)
    }
}

impl From<FundamentalDiscriminant> for i64 {
    fn from(d: FundamentalDiscriminant) -> i64 {
        d.0
    }
}

impl fmt::Display for FundamentalDiscriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Decomposition type of a rational prime in a quadratic field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitType {
    Split,
    Inert,
    Ramified,
}

pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

pub fn is_square(n: u64) -> bool {
    let r = isqrt(n);
    r * r == n
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut q = 3;
    while q * q <= n {
        if n.is_multiple_of(q) {
            return false;
        }
        q += 2;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| is_prime(p)).collect()
}

/// Squarefree test by trial division.
pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut n = n;
    let mut q = 2u64;
    while q * q <= n {
        if n.is_multiple_of(q) {
            n /= q;
            if n.is_multiple_of(q) {
                return false;
            }
        }
        q += 1;
    }
    true
}

/// Jacobi symbol (a|n) for odd n > 0.
fn jacobi(a: u64, n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    let (mut a, mut n) = (a % n, n);
    let mut sign = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Kronecker symbol (d|n) for n ≥ 1.
pub fn kronecker_symbol(d: i64, n: u64) -> i8 {
    assert!(n > 0, "kronecker symbol needs a positive modulus");
    let mut n = n;
    let mut result = 1i8;
    let twos = n.trailing_zeros();
    if twos > 0 {
        if d % 2 == 0 {
            return 0;
        }
        n >>= twos;
        let r = d.rem_euclid(8);
        if twos % 2 == 1 && (r == 3 || r == 5) {
            result = -result;
        }
    }
    if n == 1 {
        return result;
    }
    let a = d.rem_euclid(n as i64) as u64;
    result * jacobi(a, n)
}

/// Whether `d` is the discriminant of a quadratic field.
pub fn is_fundamental(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    if d.rem_euclid(4) == 1 {
        return is_squarefree(d.unsigned_abs());
    }
    if d.rem_euclid(4) != 0 {
        return false;
    }
    let m = d / 4;
    matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
}

/// Squarefree flags for `0..limit`, one byte per integer.
pub struct SquarefreeSieve {
    flags: Vec<bool>,
}

/// Env var capping sieve allocations, in megabytes.
pub const MEMORY_CAP_ENV: &str = "CLSQ_MAX_MEMORY_MB";

/// Rejects sieve sizes that would exceed the `CLSQ_MAX_MEMORY_MB` cap.
pub fn check_memory(limit: u64) -> Result<()> {
    let cap = std::env::var(MEMORY_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok());
    check_memory_cap(limit, cap)
}

fn check_memory_cap(limit: u64, cap_mb: Option<u64>) -> Result<()> {
    let Some(cap_mb) = cap_mb else {
        return Ok(());
    };
    let needed_mb = limit.div_ceil(1 << 20);
    if needed_mb > cap_mb {
        return Err(Error::MemoryCap {
            limit,
            needed_mb,
            cap_mb,
        });
    }
    Ok(())
}

impl SquarefreeSieve {
    pub fn new(limit: u64) -> Self {
        let n = limit as usize;
        let mut flags = vec![true; n];
        if n > 0 {
            flags[0] = false;
        }
        let mut p = 2usize;
        while p * p < n {
            let sq = p * p;
            let mut k = sq;
            while k < n {
                flags[k] = false;
                k += sq;
            }
            p += 1;
        }
        SquarefreeSieve { flags }
    }

    pub fn limit(&self) -> u64 {
        self.flags.len() as u64
    }

    pub fn is_squarefree(&self, n: u64) -> bool {
        self.flags[n as usize]
    }

    /// Fundamental test for |d| < limit.
    pub fn is_fundamental(&self, d: i64) -> bool {
        if d == 0 || d == 1 {
            return false;
        }
        let n = d.unsigned_abs();
        debug_assert!(n < self.limit());
        match d.rem_euclid(4) {
            1 => self.flags[n as usize],
            0 => {
                let m = d / 4;
                matches!(m.rem_euclid(4), 2 | 3) && self.flags[(n / 4) as usize]
            }
            _ => false,
        }
    }

    /// All fundamental d of the signature with 0 < |d| < x, increasing |d|.
    pub fn fundamental(&self, x: u64, signature: Signature) -> impl Iterator<Item = FundamentalDiscriminant> + '_ {
        let x = x.min(self.limit());
        let sign = signature.sign();
        (1..x).filter_map(move |n| {
            let d = sign * n as i64;
            self.is_fundamental(d)
                .then(|| FundamentalDiscriminant::new_unchecked(d))
        })
    }
}

/// All fundamental discriminants d of the given signature with 0 < |d| < x.
pub fn enumerate_fundamental(x: u64, signature: Signature) -> Vec<FundamentalDiscriminant> {
    let sieve = SquarefreeSieve::new(x);
    sieve.fundamental(x, signature).collect()
}

pub fn splitting_type(d: FundamentalDiscriminant, p: u64) -> SplitType {
    let d = d.get();
    if d.rem_euclid(p as i64) == 0 {
        return SplitType::Ramified;
    }
    if p == 2 {
        return if d.rem_euclid(8) == 1 {
            SplitType::Split
        } else {
            SplitType::Inert
        };
    }
    match kronecker_symbol(d, p) {
        1 => SplitType::Split,
        _ => SplitType::Inert,
    }
}

fn odd_prime_factors(n: u64) -> Vec<u64> {
    let mut n = n;
    let mut out = Vec::new();
    let mut q = 3;
    while q * q <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 2;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Residues of fundamental discriminants modulo 16.
const FUNDAMENTAL_RESIDUES_MOD_16: [i64; 6] = [1, 5, 8, 9, 12, 13];

/// Exact number of fundamental d with 0 < ±d < x and d ≡ d0 (mod 16·core²),
/// where `core` is odd and squarefree and the sign comes from `signature`.
pub fn count_fundamental_in_progression(x: u64, d0: i64, core: u64, signature: Signature) -> Result<u64> {
    let sieve = SquarefreeSieve::new(x);
    count_fundamental_in_progression_with(&sieve, x, d0, core, signature)
}

pub fn count_fundamental_in_progression_with(
    sieve: &SquarefreeSieve,
    x: u64,
    d0: i64,
    core: u64,
    signature: Signature,
) -> Result<u64> {
    if core == 0 || core.is_multiple_of(2) || !is_squarefree(core) {
        return Err(Error::BadProgressionModulus(core));
    }
    let modulus = 16 * core * core;
    let m = modulus as i64;
    let r = d0.rem_euclid(m);
    let admissible = FUNDAMENTAL_RESIDUES_MOD_16.contains(&(r % 16))
        && odd_prime_factors(core).iter().all(|&p| r % (p * p) as i64 != 0);
    if !admissible {
        return Err(Error::InadmissibleResidue { residue: d0, modulus });
    }
    let x = x.min(sieve.limit());
    let sign = signature.sign();
    // first n ≥ 1 with sign·n ≡ r (mod m)
    let start = (sign * r).rem_euclid(m);
    let start = if start == 0 { m } else { start } as u64;
    Ok((start..x)
        .step_by(modulus as usize)
        .filter(|&n| sieve.is_fundamental(sign * n as i64))
        .count() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_fundamental(d: i64) -> bool {
        if d == 0 || d == 1 || (d > 0 && is_square(d as u64)) {
            return false;
        }
        let sqf = |n: i64| {
            let n = n.unsigned_abs();
            (2..=n).take_while(|q| q * q <= n).all(|q| !n.is_multiple_of(q * q))
        };
        (d.rem_euclid(4) == 1 && sqf(d))
            || (d.rem_euclid(4) == 0 && matches!((d / 4).rem_euclid(4), 2 | 3) && sqf(d / 4))
    }

    fn pow_mod(b: i64, e: u64, m: i64) -> i64 {
        let mut r = 1i64;
        let mut b = b.rem_euclid(m);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % m;
            }
            b = b * b % m;
            e >>= 1;
        }
        r
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker_symbol(5, 5), 0);
        for n in 1..50 {
            assert_eq!(kronecker_symbol(1, n), 1);
        }
        assert_eq!(kronecker_symbol(-23, 2), 1);
        assert_eq!(kronecker_symbol(-23, 5), -1);
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        for p in primes_up_to(97).into_iter().filter(|&p| p > 2) {
            for d in -500i64..=500 {
                let e = pow_mod(d, (p - 1) / 2, p as i64);
                let expected = match e {
                    0 => 0,
                    1 => 1,
                    _ => -1,
                };
                assert_eq!(kronecker_symbol(d, p), expected, "d={d} p={p}");
            }
        }
    }

    #[test]
    fn kronecker_is_multiplicative() {
        for d in [-23i64, -4, 5, 12, 229, -163, 8] {
            for m in 1..40u64 {
                for n in 1..40u64 {
                    assert_eq!(
                        kronecker_symbol(d, m * n),
                        kronecker_symbol(d, m) * kronecker_symbol(d, n)
                    );
                }
            }
        }
    }

    #[test]
    fn fundamental_examples() {
        assert!(is_fundamental(5));
        assert!(!is_fundamental(9));
        assert!(is_fundamental(12));
        assert!(is_fundamental(-23));
        assert!(!is_fundamental(1));
        assert!(!is_fundamental(0));
        assert!(!is_fundamental(-1));
        assert!(!is_fundamental(4));
    }

    #[test]
    fn fundamental_matches_definition() {
        let sieve = SquarefreeSieve::new(10_001);
        for d in -10_000i64..=10_000 {
            let expected = brute_fundamental(d);
            assert_eq!(is_fundamental(d), expected, "{d}");
            assert_eq!(sieve.is_fundamental(d), expected, "{d}");
        }
    }

    #[test]
    fn enumerate_examples() {
        let im: Vec<i64> = enumerate_fundamental(10, Signature::Imaginary)
            .into_iter()
            .map(|d| d.get())
            .collect();
        assert_eq!(im, vec![-3, -4, -7, -8]);
        let re: Vec<i64> = enumerate_fundamental(10, Signature::Real)
            .into_iter()
            .map(|d| d.get())
            .collect();
        assert_eq!(re, vec![5, 8]);
        assert!(enumerate_fundamental(3, Signature::Real).is_empty());
    }

    #[test]
    fn splitting_examples() {
        let d = FundamentalDiscriminant::new(-23).unwrap();
        assert_eq!(splitting_type(d, 2), SplitType::Split);
        assert_eq!(splitting_type(d, 23), SplitType::Ramified);
        assert_eq!(
            splitting_type(FundamentalDiscriminant::new(5).unwrap(), 2),
            SplitType::Inert
        );
        assert_eq!(
            splitting_type(FundamentalDiscriminant::new(-4).unwrap(), 2),
            SplitType::Ramified
        );
    }

    #[test]
    fn progression_examples() {
        // 5, 21, 37, 53, 69, 85 are all squarefree and ≡ 1 mod 4
        assert_eq!(count_fundamental_in_progression(100, 5, 1, Signature::Real).unwrap(), 6);
        assert_eq!(count_fundamental_in_progression(16, 8, 1, Signature::Real).unwrap(), 1);
        assert!(matches!(
            count_fundamental_in_progression(100, 4, 1, Signature::Real),
            Err(Error::InadmissibleResidue { .. })
        ));
        assert!(matches!(
            count_fundamental_in_progression(100, 5, 9, Signature::Real),
            Err(Error::BadProgressionModulus(9))
        ));
        assert!(matches!(
            count_fundamental_in_progression(1000, 9 * 16 + 9, 3, Signature::Real),
            Err(Error::InadmissibleResidue { .. })
        ));
    }

    #[test]
    fn progression_matches_brute_force() {
        for core in [1u64, 3, 5, 15] {
            let m = (16 * core * core) as i64;
            for sig in [Signature::Real, Signature::Imaginary] {
                for d0 in 0..m {
                    let Ok(n) = count_fundamental_in_progression(3000, d0, core, sig) else {
                        continue;
                    };
                    let brute = (1..3000i64)
                        .map(|k| sig.sign() * k)
                        .filter(|&d| d.rem_euclid(m) == d0 && is_fundamental(d))
                        .count() as u64;
                    assert_eq!(n, brute, "core={core} d0={d0} {sig}");
                }
            }
        }
    }

    #[test]
    fn memory_cap_is_respected() {
        assert!(check_memory_cap(1 << 19, Some(1)).is_ok());
        assert!(check_memory_cap(10 << 20, None).is_ok());
        assert!(matches!(
            check_memory_cap(10 << 20, Some(1)),
            Err(Error::MemoryCap { .. })
        ));
    }
}
