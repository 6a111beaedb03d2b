// SPDX-License-Identifier: Apache-2.0

//! Binary quadratic forms of fundamental discriminant and the form class
//! group they realize.
//!
//! Definite forms are reduced in the usual sense and each class has a unique
//! reduced representative. Indefinite forms are reduced in the sense of
//! `0 < b < √D`, `√D - b < 2|a| < √D + b`; the reduced forms of a class form a
//! single cycle under the neighbour step [`QuadraticForm::rho`], and the
//! lexicographically least member of that cycle represents the class. For
//! `D > 0` this computes the narrow class group.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

use crate::abgrp::{decompose, FiniteGroup};
use crate::arith::{isqrt, splitting_type, FundamentalDiscriminant, Signature, SplitType};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadraticForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Returns (g, x, y) with a·x + b·y = g = gcd(a, b) ≥ 0.
fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

impl QuadraticForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        QuadraticForm { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        let d = (self.b as i128) * (self.b as i128) - 4 * (self.a as i128) * (self.c as i128);
        d as i64
    }

    /// The identity form (1, b, c) of discriminant `d` with b ∈ {0, 1}.
    pub fn principal(d: i64) -> Self {
        let b = d.rem_euclid(2);
        QuadraticForm::new(1, b, (b * b - d) / 4)
    }

    pub fn inverse(&self) -> Self {
        QuadraticForm::new(self.a, -self.b, self.c)
    }

    pub fn is_primitive(&self) -> bool {
        gcd(gcd(self.a, self.b), self.c) == 1
    }

    /// The form obtained by the substitution x ↦ x + k·y.
    fn translate(&self, k: i64) -> Self {
        let (a, b, c, k) = (self.a as i128, self.b as i128, self.c as i128, k as i128);
        QuadraticForm::new(self.a, (b + 2 * a * k) as i64, (a * k * k + b * k + c) as i64)
    }

    pub fn is_reduced(&self) -> bool {
        let d = self.disc();
        if d < 0 {
            let (a, b, c) = (self.a, self.b, self.c);
            a > 0 && b.abs() <= a && a <= c && !(b < 0 && (b == -a || a == c))
        } else {
            self.is_reduced_indefinite(isqrt(d as u64) as i64)
        }
    }

    fn is_reduced_indefinite(&self, s: i64) -> bool {
        let a2 = 2 * self.a.abs();
        self.b > 0 && self.b <= s && a2 + self.b > s && a2 - self.b <= s
    }

    fn reduce_definite(self) -> Self {
        let mut f = self;
        loop {
            if !(-f.a < f.b && f.b <= f.a) {
                let k = (f.a - f.b).div_euclid(2 * f.a);
                f = f.translate(k);
            }
            if f.a > f.c {
                f = QuadraticForm::new(f.c, -f.b, f.a);
                continue;
            }
            if f.b < 0 && (f.a == f.c || f.b == -f.a) {
                f.b = -f.b;
            }
            return f;
        }
    }

    /// One step of the indefinite reduction operator; `s = ⌊√D⌋`.
    pub fn rho(&self, s: i64) -> Self {
        let d = self.disc() as i128;
        let c = self.c;
        let m = 2 * c.abs();
        let r = if c.abs() > s {
            c.abs() - (c.abs() + self.b).rem_euclid(m)
        } else {
            s - (s + self.b).rem_euclid(m)
        };
        let r128 = r as i128;
        QuadraticForm::new(c, r, ((r128 * r128 - d) / (4 * c as i128)) as i64)
    }

    /// Some reduced form properly equivalent to `self` (`D > 0`).
    fn to_reduced_indefinite(self, s: i64) -> Self {
        let mut f = self;
        // Buchmann-Vollmer: reduction takes O(log) steps, bounded well below this.
        for _ in 0..10_000 {
            if f.is_reduced_indefinite(s) {
                return f;
            }
            f = f.rho(s);
        }
        panic!("indefinite reduction failed to terminate for {self}");
    }

    /// The reduced cycle containing the reduced indefinite form `self`.
    pub fn cycle(&self) -> Vec<QuadraticForm> {
        let s = isqrt(self.disc() as u64) as i64;
        let start = self.to_reduced_indefinite(s);
        let mut out = vec![start];
        let mut f = start.rho(s);
        while f != start {
            out.push(f);
            f = f.rho(s);
        }
        out
    }

    /// Canonical representative of the class of `self`.
    pub fn reduce(&self) -> Result<Self> {
        let d = self.disc();
        if d == 0 || (d > 0 && crate::arith::is_square(d as u64)) {
            return Err(Error::SquareDiscriminant(d));
        }
        if !self.is_primitive() {
            return Err(Error::NotPrimitive {
                a: self.a,
                b: self.b,
                c: self.c,
            });
        }
        if d < 0 {
            let f = if self.a < 0 {
                QuadraticForm::new(-self.a, -self.b, -self.c)
            } else {
                *self
            };
            // a negative definite input is replaced by its negative
            Ok(f.reduce_definite())
        } else {
            Ok(self.cycle().into_iter().min().unwrap())
        }
    }

    /// Gauss composition; the result is a reduced form (canonical for `D < 0`,
    /// some member of the product cycle for `D > 0`).
    pub fn compose(&self, other: &QuadraticForm) -> Result<QuadraticForm> {
        let (d1, d2) = (self.disc(), other.disc());
        if d1 != d2 {
            return Err(Error::DiscriminantMismatch(d1, d2));
        }
        let f = compose_raw(self, other);
        Ok(if d1 < 0 {
            f.reduce_definite()
        } else {
            f.to_reduced_indefinite(isqrt(d1 as u64) as i64)
        })
    }
}

/// Dirichlet composition of two forms of the same discriminant (unreduced).
fn compose_raw(f: &QuadraticForm, g: &QuadraticForm) -> QuadraticForm {
    let d = f.disc() as i128;
    let (a1, b1) = (f.a as i128, f.b as i128);
    let (a2, b2, c2) = (g.a as i128, g.b as i128, g.c as i128);
    let s = (b1 + b2) / 2;
    // e = gcd(a1, a2, s) = u·a1 + v·a2 + w·s; only v and w are needed
    let (g1, _, v1) = xgcd(a1, a2);
    let (e, x, w) = xgcd(g1, s);
    let v = x * v1;
    let a3 = a1 * a2 / (e * e);
    let b3 = b2 + 2 * a2 / e * (v * (s - b2) - w * c2);
    let m = 2 * a3.abs();
    let b3 = b3.rem_euclid(m);
    let b3 = if b3 > a3.abs() { b3 - m } else { b3 };
    let c3 = (b3 * b3 - d) / (4 * a3);
    debug_assert_eq!(b3 * b3 - 4 * a3 * c3, d);
    QuadraticForm::new(a3 as i64, b3 as i64, c3 as i64)
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// All reduced forms of discriminant `d` (fundamental), in increasing order.
pub fn reduced_forms(d: FundamentalDiscriminant) -> Vec<QuadraticForm> {
    let d = d.get();
    let mut out = Vec::new();
    if d < 0 {
        let n = -d;
        let mut a = 1i64;
        while 3 * a * a <= n {
            for b in (-a + 1)..=a {
                if (b - d) % 2 != 0 {
                    continue;
                }
                let num = b * b - d;
                if num % (4 * a) != 0 {
                    continue;
                }
                let c = num / (4 * a);
                if c < a || (c == a && b < 0) {
                    continue;
                }
                out.push(QuadraticForm::new(a, b, c));
            }
            a += 1;
        }
    } else {
        let s = isqrt(d as u64) as i64;
        let mut b = 2 - d.rem_euclid(2);
        while b <= s {
            let n = (d - b * b) / 4;
            let lo = ((s + 2 - b) / 2).max(1);
            let hi = (s + b) / 2;
            for a in lo..=hi {
                if n % a == 0 {
                    out.push(QuadraticForm::new(a, b, -n / a));
                    out.push(QuadraticForm::new(-a, b, n / a));
                }
            }
            b += 2;
        }
    }
    out.sort_unstable();
    out
}

/// Reduced forms of every fundamental discriminant with sign `signature` and
/// `lo ≤ |d| < hi`, bucketed by `|d| - lo`. `keep(|d|)` filters discriminants.
pub fn reduced_forms_in_range(
    lo: u64,
    hi: u64,
    signature: Signature,
    keep: impl Fn(u64) -> bool,
) -> Vec<Vec<QuadraticForm>> {
    let width = hi.saturating_sub(lo) as usize;
    let mut buckets: Vec<Vec<QuadraticForm>> = vec![Vec::new(); width];
    if width == 0 {
        return buckets;
    }
    let (lo_i, hi_i) = (lo as i64, hi as i64);
    match signature {
        Signature::Imaginary => {
            // |d| = 4ac - b² with |b| ≤ a ≤ c
            let mut a = 1i64;
            while 3 * a * a < hi_i {
                for b in (-a + 1)..=a {
                    let cmin = ((lo_i + b * b + 4 * a - 1) / (4 * a)).max(a);
                    let mut c = cmin;
                    loop {
                        let n = 4 * a * c - b * b;
                        if n >= hi_i {
                            break;
                        }
                        if !(c == a && b < 0) && keep(n as u64) {
                            buckets[(n - lo_i) as usize].push(QuadraticForm::new(a, b, c));
                        }
                        c += 1;
                    }
                }
                a += 1;
            }
        }
        Signature::Real => {
            // D = b² + 4|a||c|, reduced: b ≤ √D, √D - b < 2|a| < √D + b
            let s_lo = isqrt(lo) as i64;
            let s_hi = isqrt(hi) as i64;
            for b in 1..=s_hi {
                let a_lo = ((s_lo - b) / 2).max(1);
                let a_hi = (s_hi + b) / 2;
                for a in a_lo..=a_hi {
                    let cmin = ((lo_i - b * b).max(4 * a) + 4 * a - 1) / (4 * a);
                    let mut c = cmin.max(1);
                    loop {
                        let n = b * b + 4 * a * c;
                        if n >= hi_i {
                            break;
                        }
                        let s = isqrt(n as u64) as i64;
                        if b <= s && 2 * a + b > s && 2 * a - b <= s && keep(n as u64) {
                            let bucket = &mut buckets[(n - lo_i) as usize];
                            bucket.push(QuadraticForm::new(a, b, -c));
                            bucket.push(QuadraticForm::new(-a, b, c));
                        }
                        c += 1;
                    }
                }
            }
        }
    }
    for bucket in &mut buckets {
        bucket.sort_unstable();
    }
    buckets
}

/// The form class group of a fundamental discriminant, realized on the set of
/// reduced forms (or reduced cycles when `D > 0`).
pub struct FormClassGroup {
    disc: i64,
    sqrt_floor: i64,
    reps: Vec<QuadraticForm>,
    /// every reduced form, sorted, with its class index
    lookup: Vec<(QuadraticForm, u32)>,
    identity: usize,
}

impl FormClassGroup {
    pub fn new(d: FundamentalDiscriminant) -> Self {
        Self::from_reduced_forms(d, reduced_forms(d))
    }

    /// `forms` must be exactly the reduced forms of discriminant `d`, sorted.
    pub fn from_reduced_forms(d: FundamentalDiscriminant, forms: Vec<QuadraticForm>) -> Self {
        let disc = d.get();
        let sqrt_floor = if disc > 0 { isqrt(disc as u64) as i64 } else { 0 };
        let (reps, lookup) = if disc < 0 {
            let lookup = forms.iter().enumerate().map(|(i, f)| (*f, i as u32)).collect();
            (forms, lookup)
        } else {
            let mut class_of = vec![u32::MAX; forms.len()];
            let mut reps = Vec::new();
            let index = |f: &QuadraticForm| forms.binary_search(f).expect("reduced form missing");
            for start in 0..forms.len() {
                if class_of[start] != u32::MAX {
                    continue;
                }
                let id = reps.len() as u32;
                // forms are sorted, so the first unvisited member is the cycle minimum
                reps.push(forms[start]);
                let mut i = start;
                loop {
                    class_of[i] = id;
                    i = index(&forms[i].rho(sqrt_floor));
                    if i == start {
                        break;
                    }
                }
            }
            let lookup = forms.into_iter().zip(class_of).collect();
            (reps, lookup)
        };
        let mut group = FormClassGroup {
            disc,
            sqrt_floor,
            reps,
            lookup,
            identity: 0,
        };
        group.identity = group.class_of_reduced(&group.reduce_any(&QuadraticForm::principal(disc)));
        group
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn class_number(&self) -> usize {
        self.reps.len()
    }

    pub fn representatives(&self) -> &[QuadraticForm] {
        &self.reps
    }

    fn reduce_any(&self, f: &QuadraticForm) -> QuadraticForm {
        if self.disc < 0 {
            f.reduce_definite()
        } else {
            f.to_reduced_indefinite(self.sqrt_floor)
        }
    }

    fn class_of_reduced(&self, f: &QuadraticForm) -> usize {
        let i = self
            .lookup
            .binary_search_by(|(g, _)| g.cmp(f))
            .unwrap_or_else(|_| panic!("{f} is not a reduced form of {}", self.disc));
        self.lookup[i].1 as usize
    }

    /// Index of the class containing `f` (a primitive form of this discriminant).
    pub fn class_of(&self, f: &QuadraticForm) -> usize {
        debug_assert_eq!(f.disc(), self.disc);
        self.class_of_reduced(&self.reduce_any(f))
    }

    pub fn pow(&self, x: usize, e: u64) -> usize {
        let mut result = self.identity;
        let mut base = x;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = self.op(result, base);
            }
            base = self.op(base, base);
            e >>= 1;
        }
        result
    }
}

impl FiniteGroup for FormClassGroup {
    fn identity(&self) -> usize {
        self.identity
    }

    fn op(&self, x: usize, y: usize) -> usize {
        let f = compose_raw(&self.reps[x], &self.reps[y]);
        self.class_of(&f)
    }

    fn order(&self) -> usize {
        self.reps.len()
    }
}

/// Cyclic decomposition of a class group plus the discrete logs of the classes
/// of primes above the chosen rational primes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroupPresentation {
    pub invariants: Vec<u64>,
    /// prime → exponent vector of [𝔭]; absent for inert primes
    pub marked: Vec<(u64, Option<Vec<i64>>)>,
}

impl ClassGroupPresentation {
    pub fn order(&self) -> u64 {
        self.invariants.iter().product()
    }

    pub fn mark(&self, p: u64) -> Option<&[i64]> {
        self.marked
            .iter()
            .find(|(q, _)| *q == p)
            .and_then(|(_, v)| v.as_deref())
    }
}

/// A form (p, b, (b²-d)/4p) for a prime above p, or `None` if p is inert.
pub fn prime_form(d: FundamentalDiscriminant, p: u64) -> Option<QuadraticForm> {
    if splitting_type(d, p) == SplitType::Inert {
        return None;
    }
    let dd = d.get() as i128;
    let p = p as i128;
    let b = (0..2 * p)
        .find(|&b| (b * b - dd).rem_euclid(4 * p) == 0)
        .expect("non-inert prime has a square root of d mod 4p");
    Some(QuadraticForm::new(p as i64, b as i64, ((b * b - dd) / (4 * p)) as i64))
}

fn marked_classes(group: &FormClassGroup, d: FundamentalDiscriminant, primes: &[u64]) -> Vec<Option<usize>> {
    primes
        .iter()
        .map(|&p| prime_form(d, p).map(|f| group.class_of(&f)))
        .collect()
}

fn attach_marks(primes: &[u64], classes: &[Option<usize>], logs: Vec<Vec<i64>>) -> Vec<(u64, Option<Vec<i64>>)> {
    let mut logs = logs.into_iter();
    primes
        .iter()
        .zip(classes)
        .map(|(&p, c)| (p, c.map(|_| logs.next().unwrap())))
        .collect()
}

/// Full class group (narrow when d > 0) with the classes of primes above `primes`.
pub fn class_group(d: FundamentalDiscriminant, primes: &[u64]) -> ClassGroupPresentation {
    let group = FormClassGroup::new(d);
    class_group_of(&group, d, primes)
}

pub fn class_group_of(group: &FormClassGroup, d: FundamentalDiscriminant, primes: &[u64]) -> ClassGroupPresentation {
    let classes = marked_classes(group, d, primes);
    let marks: Vec<usize> = classes.iter().flatten().copied().collect();
    let (invariants, logs) = decompose(group, 0..group.order(), group.order(), &marks);
    ClassGroupPresentation {
        invariants,
        marked: attach_marks(primes, &classes, logs),
    }
}

/// The 3-Sylow subgroup with the projections of the prime classes. The
/// 3-torsion of any quotient by prime classes is read off from this alone.
pub fn three_sylow_of(group: &FormClassGroup, d: FundamentalDiscriminant, primes: &[u64]) -> ClassGroupPresentation {
    let h = group.order() as u64;
    let mut sylow = 1u64;
    while h.is_multiple_of(sylow * 3) {
        sylow *= 3;
    }
    if sylow == 1 {
        return ClassGroupPresentation {
            invariants: Vec::new(),
            marked: primes
                .iter()
                .map(|&p| (p, prime_form(d, p).map(|_| Vec::new())))
                .collect(),
        };
    }
    let cofactor = h / sylow;
    let classes = marked_classes(group, d, primes);
    let marks: Vec<usize> = classes.iter().flatten().map(|&c| group.pow(c, cofactor)).collect();
    let candidates = (0..group.order()).map(|x| group.pow(x, cofactor));
    let (invariants, logs) = decompose(group, candidates, sylow as usize, &marks);
    ClassGroupPresentation {
        invariants,
        marked: attach_marks(primes, &classes, logs),
    }
}

/// Class numbers by brute-force count of reduced forms (test oracle helper).
pub fn count_reduced_forms(d: i64) -> usize {
    let mut seen = HashMap::new();
    let n = -d;
    for a in 1..=n {
        for b in -a..=a {
            if (b * b - d) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b - d) / (4 * a);
            let f = QuadraticForm::new(a, b, c);
            if f.is_primitive() && f.is_reduced() {
                seen.insert(f, ());
            }
        }
        if 3 * a * a > n {
            break;
        }
    }
    seen.len()
}
