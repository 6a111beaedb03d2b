// SPDX-License-Identifier: Apache-2.0

//! Exact limiting averages and densities, the local mass table, and the
//! identities that tie the conditioned and unconditioned averages together.

use num_rational::Ratio;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::arith::{is_prime, Signature};
use crate::cubic::LocalCubicType;
use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

fn r(n: i128) -> Rational {
    Rational::from_integer(n)
}

fn frac(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

fn pow3(e: u32) -> Rational {
    r(3i128.pow(e))
}

/// Renders `n/d`, or `n` when the denominator is 1.
pub fn format_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &Rational) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// A set S of distinct primes and optionally the subset S₁ of split primes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SConfig {
    primes: Vec<u64>,
    split: Option<Vec<u64>>,
}

impl SConfig {
    pub fn new(primes: Vec<u64>) -> Result<Self> {
        for (i, &p) in primes.iter().enumerate() {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            if primes[..i].contains(&p) {
                return Err(Error::DuplicatePrime(p));
            }
        }
        Ok(SConfig { primes, split: None })
    }

    pub fn empty() -> Self {
        SConfig {
            primes: Vec::new(),
            split: None,
        }
    }

    pub fn with_split(mut self, split: Vec<u64>) -> Result<Self> {
        if split.iter().any(|p| !self.primes.contains(p)) {
            return Err(Error::SplitNotSubset);
        }
        for (i, &p) in split.iter().enumerate() {
            if split[..i].contains(&p) {
                return Err(Error::DuplicatePrime(p));
            }
        }
        self.split = Some(split);
        Ok(self)
    }

    /// S₁ = S.
    pub fn all_split(self) -> Self {
        let split = self.primes.clone();
        SConfig {
            split: Some(split),
            ..self
        }
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn split(&self) -> Option<&[u64]> {
        self.split.as_deref()
    }

    /// Every subset S₁ ⊆ S, in bitmask order over `primes()`.
    pub fn split_patterns(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        (0u32..1 << self.primes.len()).map(move |mask| {
            self.primes
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &p)| p)
                .collect()
        })
    }

    fn s_len(&self) -> u32 {
        self.primes.len() as u32
    }

    fn s1_len(&self) -> u32 {
        self.split.as_ref().map_or(0, |s| s.len() as u32)
    }
}

impl fmt::Display for SConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_primes(&self.primes))?;
        if let Some(s1) = &self.split {
            write!(f, " (split {})", format_primes(s1))?;
        }
        Ok(())
    }
}

/// Primes joined by ';', or "-" for the empty set.
pub fn format_primes(primes: &[u64]) -> String {
    if primes.is_empty() {
        "-".to_string()
    } else {
        primes.iter().map(u64::to_string).collect::<Vec<_>>().join(";")
    }
}

/// One row of the local mass table: a maximal cubic Z_p-algebra shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalMassRow {
    pub local_type: LocalCubicType,
    pub aut_order: u32,
    /// the p-power discriminant
    pub disc_p: u64,
}

/// Maximal cubic étale algebras over Z_p that are not totally ramified.
/// The ramified ones are Z_p × (ramified quadratic ring): two for odd p, six
/// for p = 2.
pub fn local_mass_rows(p: u64) -> Vec<LocalMassRow> {
    let row = |local_type, aut_order, disc_p| LocalMassRow {
        local_type,
        aut_order,
        disc_p,
    };
    let mut rows = vec![
        row(LocalCubicType::Split111, 6, 1),
        row(LocalCubicType::Partial12, 2, 1),
        row(LocalCubicType::Inert3, 3, 1),
    ];
    let ramified: &[u64] = if p == 2 { &[4, 4, 8, 8, 8, 8] } else { &[p, p] };
    rows.extend(ramified.iter().map(|&disc| row(LocalCubicType::Ram21, 2, disc)));
    rows
}

/// Σ 1/(|Aut R| · Disc_p R) over the rows whose type lies in `types`.
pub fn local_mass(p: u64, types: &[LocalCubicType]) -> Result<Rational> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if types.contains(&LocalCubicType::Ram111Tot) {
        return Err(Error::TotallyRamified);
    }
    Ok(local_mass_rows(p)
        .into_iter()
        .filter(|row| types.contains(&row.local_type))
        .map(|row| frac(1, row.aut_order as i128 * row.disc_p as i128))
        .sum())
}

/// The local types of maximal, not totally ramified cubic algebras.
pub const NOT_TOTALLY_RAMIFIED: [LocalCubicType; 4] = [
    LocalCubicType::Split111,
    LocalCubicType::Partial12,
    LocalCubicType::Inert3,
    LocalCubicType::Ram21,
];

fn prod<I: IntoIterator<Item = Rational>>(it: I) -> Rational {
    it.into_iter().fold(Rational::one(), |acc, x| acc * x)
}

/// ∏_{p ∈ S} (2 + 1/(p+1)).
fn non_inert_product(primes: &[u64]) -> Rational {
    prod(primes.iter().map(|&p| r(2) + frac(1, p as i128 + 1)))
}

/// ∏_{p ∈ S} (1 + p/(p+1)) = Avg 3^{|S₁|}.
pub fn avg_three_pow_split(primes: &[u64]) -> Rational {
    prod(primes.iter().map(|&p| r(1) + frac(p as i128, p as i128 + 1)))
}

/// Limit of the average of |Cl(K)_S[3]|.
pub fn predicted_avg_cl(s: &SConfig, signature: Signature) -> Rational {
    let e = s.s_len() + signature.unit_rank();
    r(1) + non_inert_product(s.primes()) / pow3(e)
}

/// c′ with 3^{r∞} c′ = 1.
fn c_prime(signature: Signature) -> Rational {
    frac(1, 3i128.pow(signature.unit_rank()))
}

/// Limit of the average of |Cl(K)_S[3]| over fields whose split set in S is
/// exactly S₁ (or all of S when no pattern is set).
pub fn predicted_avg_cl_conditioned(s: &SConfig, signature: Signature) -> Rational {
    let s1 = s.split().map_or(s.s_len(), |x| x.len() as u32);
    r(1) + c_prime(signature) / pow3(s1)
}

pub fn predicted_avg_selmer(s: &SConfig, signature: Signature) -> Rational {
    let n = s.s_len();
    pow3(n) + pow3(n + signature.unit_rank()) * avg_three_pow_split(s.primes())
}

/// 3^{r∞+|S₁|+|S|} + 3^{|S|}.
pub fn predicted_avg_selmer_conditioned(s: &SConfig, signature: Signature) -> Rational {
    let n = s.s_len();
    let s1 = s.split().map_or(n, |x| x.len() as u32);
    pow3(signature.unit_rank() + s1 + n) + pow3(n)
}

pub fn predicted_avg_sunits(s: &SConfig, signature: Signature) -> Rational {
    pow3(s.s_len() + signature.unit_rank()) * avg_three_pow_split(s.primes())
}

/// ρ(S₁): the proportion of fundamental discriminants (of either fixed
/// signature) whose split primes in S are exactly S₁.
pub fn predicted_density_quad(s: &SConfig) -> Rational {
    let split = s.split().unwrap_or(&[]);
    prod(s.primes().iter().map(|&p| {
        let p = p as i128;
        if split.contains(&(p as u64)) {
            frac(p, 2 * (p + 1))
        } else {
            frac(p + 2, 2 * (p + 1))
        }
    }))
}

/// c∞ · 3^{-|S|} · ∏(2 + 1/(p+1)): the number of nowhere totally ramified
/// cubic fields with no prime of S inert, per ζ(2)⁻¹ X.
pub fn predicted_cubic_density(s: &SConfig, signature: Signature) -> Rational {
    let c_inf = match signature {
        Signature::Real => frac(1, 12),
        Signature::Imaginary => frac(1, 4),
    };
    c_inf * non_inert_product(s.primes()) / pow3(s.s_len())
}

/// (p/(p+1)) · mass of the types other than inert: the proportion of cubic
/// fields in which p is not inert.
pub fn non_inert_local_factor(p: u64) -> Rational {
    let types = [
        LocalCubicType::Split111,
        LocalCubicType::Partial12,
        LocalCubicType::Ram21,
    ];
    let mass = local_mass(p, &types).expect("p is prime");
    frac(p as i128, p as i128 + 1) * mass
}

/// The identities behind the unconditioned averages, checked exactly for
/// both signatures.
pub fn consistency_identities(s: &SConfig) -> bool {
    let patterns: Vec<SConfig> = s
        .split_patterns()
        .map(|s1| s.clone().with_split(s1).expect("pattern is a subset"))
        .collect();
    let total: Rational = patterns.iter().map(predicted_density_quad).sum();
    if total != Rational::one() {
        return false;
    }
    let n = s.s_len();
    [Signature::Real, Signature::Imaginary].into_iter().all(|sig| {
        let unconditioned = SConfig {
            split: None,
            ..s.clone()
        };
        let weighted = |f: &dyn Fn(&SConfig) -> Rational| -> Rational {
            patterns.iter().map(|c| predicted_density_quad(c) * f(c)).sum()
        };
        let cl = weighted(&|c| predicted_avg_cl_conditioned(c, sig));
        let selmer = weighted(&|c| predicted_avg_selmer_conditioned(c, sig));
        let avg_pow = weighted(&|c| pow3(c.s1_len()));
        cl == predicted_avg_cl(&unconditioned, sig)
            && selmer == predicted_avg_selmer(&unconditioned, sig)
            && pow3(sig.unit_rank() + n) * avg_pow == predicted_avg_sunits(&unconditioned, sig)
            && avg_pow == avg_three_pow_split(s.primes())
    })
}

/// Every limit for one (S, signature), for display.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictionTable {
    pub rows: Vec<(String, Rational)>,
}

pub fn prediction_table(s: &SConfig, signature: Signature) -> PredictionTable {
    let mut rows = Vec::new();
    let plain = SConfig {
        split: None,
        ..s.clone()
    };
    rows.push(("cl".to_string(), predicted_avg_cl(&plain, signature)));
    rows.push(("selmer".to_string(), predicted_avg_selmer(&plain, signature)));
    rows.push(("sunits".to_string(), predicted_avg_sunits(&plain, signature)));
    rows.push(("avg_3pow_s1".to_string(), avg_three_pow_split(s.primes())));
    rows.push(("cubic_density".to_string(), predicted_cubic_density(&plain, signature)));
    if s.split().is_some() {
        rows.push(("cl_conditioned".to_string(), predicted_avg_cl_conditioned(s, signature)));
        rows.push((
            "selmer_conditioned".to_string(),
            predicted_avg_selmer_conditioned(s, signature),
        ));
        rows.push(("split_density".to_string(), predicted_density_quad(s)));
    }
    PredictionTable { rows }
}
