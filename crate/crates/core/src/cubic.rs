// SPDX-License-Identifier: Apache-2.0

//! Cubic fields of fundamental discriminant, tabulated through reduced
//! integral binary cubic forms, and their local behaviour at small primes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

use crate::arith::{isqrt, FundamentalDiscriminant, Signature, SquarefreeSieve};

/// f(x, y) = a x³ + b x² y + c x y² + d y³.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BinaryCubicForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

/// Coefficients of the Hessian covariant P x² + Q x y + R y².
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hessian {
    pub p: i128,
    pub q: i128,
    pub r: i128,
}

impl BinaryCubicForm {
    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        BinaryCubicForm { a, b, c, d }
    }

    pub fn coefficients(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn disc(&self) -> i128 {
        disc_cubic(self)
    }

    pub fn hessian(&self) -> Hessian {
        let [a, b, c, d] = self.coefficients().map(|x| x as i128);
        Hessian {
            p: b * b - 3 * a * c,
            q: b * c - 9 * a * d,
            r: c * c - 3 * b * d,
        }
    }

    pub fn eval(&self, x: i128, y: i128) -> i128 {
        let [a, b, c, d] = self.coefficients().map(|v| v as i128);
        ((a * x + b * y) * x + c * y * y) * x + d * y * y * y
    }

    pub fn negate(&self) -> Self {
        BinaryCubicForm::new(-self.a, -self.b, -self.c, -self.d)
    }

    /// The substitution f(αx + βy, γx + δy).
    pub fn transform(&self, alpha: i64, beta: i64, gamma: i64, delta: i64) -> Self {
        let mul2 = |p: [i128; 2], q: [i128; 2]| [p[0] * q[0], p[0] * q[1] + p[1] * q[0], p[1] * q[1]];
        let mul3 = |p: [i128; 3], q: [i128; 2]| {
            [
                p[0] * q[0],
                p[0] * q[1] + p[1] * q[0],
                p[1] * q[1] + p[2] * q[0],
                p[2] * q[1],
            ]
        };
        let l1 = [alpha as i128, beta as i128];
        let l2 = [gamma as i128, delta as i128];
        let terms = [
            mul3(mul2(l1, l1), l1),
            mul3(mul2(l1, l1), l2),
            mul3(mul2(l1, l2), l2),
            mul3(mul2(l2, l2), l2),
        ];
        let mut out = [0i128; 4];
        for (coef, term) in self.coefficients().iter().zip(terms) {
            for k in 0..4 {
                out[k] += *coef as i128 * term[k];
            }
        }
        let [a, b, c, d] = out.map(|x| i64::try_from(x).expect("cubic form coefficient overflow"));
        BinaryCubicForm::new(a, b, c, d)
    }

    /// True iff f has a linear factor over Q (including f = 0 or a zero end
    /// coefficient).
    pub fn is_reducible(&self) -> bool {
        if self.a == 0 || self.d == 0 {
            return true;
        }
        // a root [q : s] in lowest terms has s | a and q | d
        let ds = divisors(self.a.unsigned_abs());
        let dq = divisors(self.d.unsigned_abs());
        ds.iter().any(|&s| {
            dq.iter().any(|&q| {
                let (q, s) = (q as i128, s as i128);
                self.eval(q, s) == 0 || self.eval(-q, s) == 0
            })
        })
    }

    pub fn is_primitive(&self) -> bool {
        self.coefficients().iter().fold(0u64, |g, &x| gcd(g, x.unsigned_abs())) == 1
    }
}

impl fmt::Display for BinaryCubicForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.a, self.b, self.c, self.d)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut k = 1;
    while k * k <= n {
        if n.is_multiple_of(k) {
            small.push(k);
            if k * k != n {
                large.push(n / k);
            }
        }
        k += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn disc_cubic(f: &BinaryCubicForm) -> i128 {
    let [a, b, c, d] = f.coefficients().map(|x| x as i128);
    18 * a * b * c * d + b * b * c * c - 4 * a * c * c * c - 4 * b * b * b * d - 27 * a * a * d * d
}

/// Decomposition type of p in the cubic ring of a form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalCubicType {
    /// p = 𝔭₁𝔭₂𝔭₃
    Split111,
    /// p = 𝔭₁𝔭₂ with residue degrees 1 and 2
    Partial12,
    /// p stays prime: the unramified cubic extension of Q_p
    Inert3,
    /// p = 𝔭₁²𝔭₂
    Ram21,
    /// p = 𝔭³
    Ram111Tot,
}

impl LocalCubicType {
    pub const ALL: [LocalCubicType; 5] = [
        LocalCubicType::Split111,
        LocalCubicType::Partial12,
        LocalCubicType::Inert3,
        LocalCubicType::Ram21,
        LocalCubicType::Ram111Tot,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LocalCubicType::Split111 => "split_111",
            LocalCubicType::Partial12 => "partial_12",
            LocalCubicType::Inert3 => "inert_3",
            LocalCubicType::Ram21 => "ram_21",
            LocalCubicType::Ram111Tot => "ram_111_tot",
        }
    }
}

impl fmt::Display for LocalCubicType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Coefficients of f(x, 1) mod p, highest degree first.
fn reduce_mod(f: &BinaryCubicForm, p: u64) -> [i128; 4] {
    f.coefficients().map(|x| (x as i128).rem_euclid(p as i128))
}

/// Multiplicity of r as a root of the polynomial `poly` (highest degree
/// first) over F_p.
fn root_multiplicity(poly: &[i128], r: i128, p: i128) -> usize {
    let mut poly: Vec<i128> = poly.to_vec();
    while poly.first() == Some(&0) {
        poly.remove(0);
    }
    let mut mult = 0;
    while poly.len() > 1 {
        // synthetic division by (x - r)
        let mut quotient = Vec::with_capacity(poly.len() - 1);
        let mut acc = 0i128;
        for &c in &poly[..poly.len() - 1] {
            acc = (acc * r + c) % p;
            quotient.push(acc);
        }
        let rem = (acc * r + poly[poly.len() - 1]) % p;
        if rem != 0 {
            break;
        }
        mult += 1;
        poly = quotient;
    }
    mult
}

/// Multiplicities of the projective roots of f over F_p; `None` if f ≡ 0.
pub fn projective_roots_mod(f: &BinaryCubicForm, p: u64) -> Option<Vec<usize>> {
    let coeffs = reduce_mod(f, p);
    if coeffs.iter().all(|&c| c == 0) {
        return None;
    }
    let mut roots = Vec::new();
    // [1 : 0] is a root of multiplicity = number of leading zero coefficients
    let at_infinity = coeffs.iter().take_while(|&&c| c == 0).count();
    if at_infinity > 0 {
        roots.push(at_infinity);
    }
    let p_i = p as i128;
    for r in 0..p_i {
        let m = root_multiplicity(&coeffs, r, p_i);
        if m > 0 {
            roots.push(m);
        }
    }
    Some(roots)
}

/// Local type of the cubic ring of f at p. Assumes the ring is maximal at p.
pub fn local_type(f: &BinaryCubicForm, p: u64) -> LocalCubicType {
    let Some(roots) = projective_roots_mod(f, p) else {
        return LocalCubicType::Ram111Tot;
    };
    if roots.contains(&3) {
        LocalCubicType::Ram111Tot
    } else if roots.contains(&2) {
        LocalCubicType::Ram21
    } else {
        match roots.len() {
            3 => LocalCubicType::Split111,
            1 => LocalCubicType::Partial12,
            0 => LocalCubicType::Inert3,
            _ => unreachable!("two simple roots force a third"),
        }
    }
}

/// Whether the cubic ring of f is maximal at p, via Dedekind's criterion on
/// the monic polynomial of aθ after moving a unit value of f to [1 : 0].
pub fn is_maximal_at(f: &BinaryCubicForm, p: u64) -> bool {
    let p_i = p as i128;
    if reduce_mod(f, p).iter().all(|&c| c == 0) {
        return false;
    }
    if f.disc() % (p_i * p_i) != 0 {
        return true;
    }
    let g = if f.a as i128 % p_i != 0 {
        *f
    } else {
        // f(r, 1) is a unit for some r, since f has at most three roots mod p
        // and p² | disc excludes three distinct ones
        let Some(r) = (0..p_i).find(|&r| f.eval(r, 1).rem_euclid(p_i) != 0) else {
            return true;
        };
        f.transform(r as i64, 1, 1, 0)
    };
    let [a, b, c, d] = g.coefficients().map(|x| x as i128);
    let monic = |x: i128, m: i128| -> i128 {
        let v = ((x + b) % m * x % m + a * c % m) % m * x % m + a * a % m * d % m;
        v.rem_euclid(m)
    };
    let derivative = |x: i128| (3 * x * x + 2 * b * x + a * c).rem_euclid(p_i);
    (0..p_i).all(|r| monic(r, p_i) != 0 || derivative(r) != 0 || monic(r, p_i * p_i) != 0)
}

/// An isomorphism class of cubic fields, with its canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubicFieldRecord {
    pub canonical_form: BinaryCubicForm,
    pub disc: i64,
    pub signature: Signature,
    pub local_types: Vec<(u64, LocalCubicType)>,
}

impl CubicFieldRecord {
    fn new(form: BinaryCubicForm) -> Self {
        let disc = form.disc() as i64;
        CubicFieldRecord {
            canonical_form: form,
            disc,
            signature: Signature::of(disc),
            local_types: Vec::new(),
        }
    }

    /// Records the local types at `primes`, replacing earlier ones.
    pub fn with_local_types(mut self, primes: &[u64]) -> Self {
        self.local_types = primes
            .iter()
            .map(|&p| (p, local_type(&self.canonical_form, p)))
            .collect();
        self
    }

    pub fn local_type(&self, p: u64) -> LocalCubicType {
        self.local_types
            .iter()
            .find(|(q, _)| *q == p)
            .map(|(_, t)| *t)
            .unwrap_or_else(|| local_type(&self.canonical_form, p))
    }

    /// True iff no prime of `primes` is inert.
    pub fn avoids_inert(&self, primes: &[u64]) -> bool {
        primes.iter().all(|&p| self.local_type(p) != LocalCubicType::Inert3)
    }
}

/// Matrices with entries in [-2, 2] and determinant ±1, as (α, β, γ, δ).
fn small_unimodular() -> &'static [(i64, i64, i64, i64)] {
    use std::sync::OnceLock;
    static SET: OnceLock<Vec<(i64, i64, i64, i64)>> = OnceLock::new();
    SET.get_or_init(|| {
        let mut out = Vec::new();
        for a in -2i64..=2 {
            for b in -2..=2 {
                for c in -2..=2 {
                    for d in -2..=2 {
                        if (a * d - b * c).abs() == 1 {
                            out.push((a, b, c, d));
                        }
                    }
                }
            }
        }
        out
    })
}

const DOMAIN_SLACK: f64 = 1e-9;

fn hessian_reduced(f: &BinaryCubicForm) -> bool {
    let h = f.hessian();
    h.q.abs() <= h.p && h.p <= h.r
}

/// Real roots of a x³ + b x² + c x + d (a ≠ 0), polished by Newton steps.
fn real_roots(f: &BinaryCubicForm) -> Vec<f64> {
    let [a, b, c, d] = f.coefficients().map(|x| x as f64);
    let (b, c, d) = (b / a, c / a, d / a);
    // x = t - b/3: t³ + pt + q
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let shift = -b / 3.0;
    let disc = q * q / 4.0 + p * p * p / 27.0;
    let mut roots = if disc > 0.0 {
        let s = disc.sqrt();
        vec![(-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt() + shift]
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = if m == 0.0 {
            0.0
        } else {
            (3.0 * q / (p * m)).clamp(-1.0, 1.0)
        };
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + shift)
            .collect()
    };
    for x in &mut roots {
        for _ in 0..3 {
            let fx = ((*x + b) * *x + c) * *x + d;
            let dfx = (3.0 * *x + 2.0 * b) * *x + c;
            if dfx != 0.0 {
                *x -= fx / dfx;
            }
        }
    }
    roots
}

/// The root of f(x, 1) in the upper half plane, for negative discriminant.
fn upper_root(f: &BinaryCubicForm) -> (f64, f64) {
    let theta = real_roots(f)[0];
    let [a, b, c, _] = f.coefficients().map(|x| x as f64);
    // f(x, 1) / (x - θ) = a x² + (b + aθ) x + (c + bθ + aθ²)
    let qb = b + a * theta;
    let qc = c + theta * qb;
    let re = -qb / (2.0 * a);
    let im = (4.0 * a * qc - qb * qb).max(0.0).sqrt() / (2.0 * a);
    (re, im)
}

fn root_in_domain(f: &BinaryCubicForm) -> bool {
    let (re, im) = upper_root(f);
    re.abs() <= 0.5 + DOMAIN_SLACK && re * re + im * im >= 1.0 - DOMAIN_SLACK
}

fn in_domain(f: &BinaryCubicForm, positive: bool) -> bool {
    if positive {
        hessian_reduced(f)
    } else {
        root_in_domain(f)
    }
}

/// Least reduced form GL₂(Z)-equivalent to f among small translates; a
/// complete invariant of the class when f itself is reduced.
pub fn canonical_form(f: &BinaryCubicForm) -> BinaryCubicForm {
    let positive = f.disc() > 0;
    small_unimodular()
        .iter()
        .map(|&(a, b, c, d)| {
            let g = f.transform(a, b, c, d);
            if g.a < 0 {
                g.negate()
            } else {
                g
            }
        })
        .filter(|g| in_domain(g, positive))
        .min()
        .unwrap_or(*f)
}

fn accept(f: &BinaryCubicForm, x: u64, sieve: &SquarefreeSieve, out: &mut Vec<BinaryCubicForm>) {
    let disc = f.disc();
    if disc == 0 || disc.unsigned_abs() >= x as u128 || !sieve.is_fundamental(disc as i64) {
        return;
    }
    if f.is_reducible() {
        return;
    }
    out.push(canonical_form(f));
}

/// Forms with leading coefficient a, positive discriminant below x, and a
/// reduced Hessian. Parametrized by P = b² - 3ac and the leading coefficient
/// G₀ of the cubic covariant, both invariant under x ↦ x + ky, through the
/// syzygy 4P³ = G₀² + 27 a² D.
fn sweep_positive(a: i64, x: u64, sieve: &SquarefreeSieve) -> Vec<BinaryCubicForm> {
    let mut out = Vec::new();
    let x_i = x as i128;
    let a_i = a as i128;
    let step = 27 * a_i * a_i;
    let p_max = isqrt(x) as i64;
    for b0 in 0..3 * a {
        let first = (b0 * b0).rem_euclid(3 * a);
        let mut p = if first == 0 { 3 * a } else { first };
        while p <= p_max {
            let c = (b0 * b0 - p) / (3 * a);
            let (bi, ci, pi) = (b0 as i128, c as i128, p as i128);
            let residue = (2 * bi * bi * bi - 9 * a_i * bi * ci).rem_euclid(step);
            let g_bound = isqrt((4 * pi * pi * pi) as u64) as i128;
            // G₀ ≡ residue (mod 27a²), |G₀| ≤ 2 P^{3/2}
            let mut g0 = -g_bound + (residue + g_bound).rem_euclid(step);
            while g0 <= g_bound {
                let disc = 4 * pi * pi * pi - g0 * g0;
                if disc > 0 && disc < step * x_i {
                    let d = (g0 - 2 * bi * bi * bi + 9 * a_i * bi * ci) / step;
                    let f = BinaryCubicForm::new(a, b0, c, d as i64);
                    let q = f.hessian().q;
                    let k = (pi - q).div_euclid(2 * pi);
                    let f = f.transform(1, k as i64, 0, 1);
                    let h = f.hessian();
                    if h.p <= h.r {
                        accept(&f, x, sieve, &mut out);
                    }
                }
                g0 += step;
            }
            p += 3 * a;
        }
    }
    out
}

/// Forms with leading coefficient a, negative discriminant above -x, and the
/// complex root of f(x, 1) in the standard fundamental domain.
fn sweep_negative(a: i64, x: u64, sieve: &SquarefreeSieve) -> Vec<BinaryCubicForm> {
    let mut out = Vec::new();
    let xf = x as f64;
    let af = a as f64;
    // |D| = 4a⁴ Im(ω)² |θ - ω|⁴ with Im(ω)² ≥ 3/4
    let t_max = (xf / (3.0 * af.powi(4))).powf(0.25) * (1.0 + 1e-9);
    let y_max = t_max.min((xf / (4.0 * af.powi(4))).powf(1.0 / 6.0) * (1.0 + 1e-9));
    let theta_max = 0.5 + t_max;
    let b_max = (af * (1.0 + theta_max)).ceil() as i64;
    let c_max = (af * (theta_max + 0.25 + y_max * y_max)).ceil() as i64 + 1;
    let a2 = a as i128 * a as i128;
    for b in -b_max..=b_max {
        for c in -c_max..=c_max {
            let (ai, bi, ci) = (a as i128, b as i128, c as i128);
            // disc(d) = qa d² + qb d + qc
            let qa = -27 * a2;
            let qb = 18 * ai * bi * ci - 4 * bi * bi * bi;
            let qc = bi * bi * ci * ci - 4 * ai * ci * ci * ci;
            let (qa_f, qb_f, qc_f) = (qa as f64, qb as f64, qc as f64);
            // disc(d) > -x between the roots of qa d² + qb d + qc + x
            let outer = qb_f * qb_f - 4.0 * qa_f * (qc_f + xf);
            if outer < 0.0 {
                continue;
            }
            let centre = -qb_f / (2.0 * qa_f);
            let half = outer.sqrt() / (2.0 * qa_f.abs());
            let lo = (centre - half).floor() as i64 - 1;
            let hi = (centre + half).ceil() as i64 + 1;
            // disc(d) ≥ 0 between the roots of disc itself: skip that stretch
            let inner = qb_f * qb_f - 4.0 * qa_f * qc_f;
            let (skip_lo, skip_hi) = if inner > 0.0 {
                let h = inner.sqrt() / (2.0 * qa_f.abs());
                ((centre - h).ceil() as i64 + 1, (centre + h).floor() as i64 - 1)
            } else {
                (1, 0)
            };
            let mut d = lo;
            while d <= hi {
                if d == skip_lo && skip_lo <= skip_hi {
                    d = skip_hi + 1;
                    continue;
                }
                let di = d as i128;
                let disc = (qa * di + qb) * di + qc;
                if disc < 0 && -disc < x as i128 && sieve.is_fundamental(disc as i64) {
                    let f = BinaryCubicForm::new(a, b, c, d);
                    if root_in_domain(&f) {
                        accept(&f, x, sieve, &mut out);
                    }
                }
                d += 1;
            }
        }
    }
    out
}

/// Cubic fields with fundamental discriminant, 0 < |disc| < x, and the given
/// signature (Real = totally real), sorted by |disc| then canonical form.
pub fn enumerate_cubic_fields(x: u64, signature: Signature) -> Vec<CubicFieldRecord> {
    let sieve = SquarefreeSieve::new(x);
    enumerate_cubic_fields_with(&sieve, x, signature)
}

pub fn enumerate_cubic_fields_with(sieve: &SquarefreeSieve, x: u64, signature: Signature) -> Vec<CubicFieldRecord> {
    assert!(sieve.limit() >= x, "sieve too short");
    let xf = x as f64;
    let leading: Vec<i64> = match signature {
        // 729 a⁴ ≤ 16 D
        Signature::Real => (1..)
            .take_while(|&a: &i64| 729 * (a as u128).pow(4) < 16 * x as u128)
            .collect(),
        // 27 a⁴ ≤ 16 |D|
        Signature::Imaginary => {
            let bound = (16.0 * xf / 27.0).powf(0.25) as i64 + 1;
            (1..=bound).collect()
        }
    };
    let mut forms: Vec<BinaryCubicForm> = leading
        .into_par_iter()
        .flat_map_iter(|a| match signature {
            Signature::Real => sweep_positive(a, x, sieve),
            Signature::Imaginary => sweep_negative(a, x, sieve),
        })
        .collect();
    forms.par_sort_unstable_by_key(|f| (f.disc().unsigned_abs(), *f));
    forms.dedup();
    forms.into_iter().map(CubicFieldRecord::new).collect()
}

/// Cubic fields of fundamental discriminant grouped by discriminant.
pub struct CubicTable {
    limit: u64,
    by_disc: HashMap<i64, Vec<CubicFieldRecord>>,
}

impl CubicTable {
    /// Both signatures, |disc| < x, with local types at `primes` precomputed.
    pub fn new(sieve: &SquarefreeSieve, x: u64, primes: &[u64]) -> Self {
        let mut by_disc: HashMap<i64, Vec<CubicFieldRecord>> = HashMap::new();
        for signature in [Signature::Real, Signature::Imaginary] {
            for record in enumerate_cubic_fields_with(sieve, x, signature) {
                let record = record.with_local_types(primes);
                by_disc.entry(record.disc).or_default().push(record);
            }
        }
        CubicTable { limit: x, by_disc }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn fields(&self, d: i64) -> &[CubicFieldRecord] {
        self.by_disc.get(&d).map_or(&[], |v| v.as_slice())
    }

    pub fn count_matching(&self, d: i64, primes: &[u64]) -> u64 {
        debug_assert!(d.unsigned_abs() < self.limit);
        self.fields(d).iter().filter(|r| r.avoids_inert(primes)).count() as u64
    }

    pub fn len(&self) -> usize {
        self.by_disc.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_disc.is_empty()
    }
}

/// Number of cubic fields of discriminant d in which no prime of `primes` is
/// inert.
pub fn count_matching_cubics(d: FundamentalDiscriminant, primes: &[u64]) -> u64 {
    enumerate_cubic_fields(d.abs() + 1, d.signature())
        .iter()
        .filter(|r| r.disc == d.get() && r.avoids_inert(primes))
        .count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{is_fundamental, is_prime};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use std::collections::BTreeMap;

    const X3_X_1: BinaryCubicForm = BinaryCubicForm::new(1, 0, -1, -1);

    #[test]
    fn discriminant_examples() {
        assert_eq!(disc_cubic(&X3_X_1), -23);
        assert_eq!(disc_cubic(&BinaryCubicForm::new(1, 0, 0, 0)), 0);
        assert_eq!(disc_cubic(&BinaryCubicForm::new(1, 0, -4, -1)), 229);
    }

    #[test]
    fn hessian_syzygy() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..1000 {
            let f = BinaryCubicForm::new(
                rng.gen_range(-50..=50),
                rng.gen_range(-50..=50),
                rng.gen_range(-50..=50),
                rng.gen_range(-50..=50),
            );
            let h = f.hessian();
            let disc = f.disc();
            assert_eq!(h.q * h.q - 4 * h.p * h.r, -3 * disc);
            let [a, b, c, d] = f.coefficients().map(|x| x as i128);
            let g0 = 2 * b * b * b - 9 * a * b * c + 27 * a * a * d;
            assert_eq!(4 * h.p * h.p * h.p, g0 * g0 + 27 * disc * a * a);
        }
    }

    #[test]
    fn enumeration_examples() {
        let complex = enumerate_cubic_fields(30, Signature::Imaginary);
        assert_eq!(complex.len(), 1);
        assert_eq!(complex[0].disc, -23);
        assert_eq!(canonical_form(&X3_X_1), complex[0].canonical_form);

        let real = enumerate_cubic_fields(230, Signature::Real);
        assert_eq!(real.len(), 1);
        assert_eq!(real[0].disc, 229);

        assert!(enumerate_cubic_fields(23, Signature::Imaginary).is_empty());
    }

    #[test]
    fn local_type_examples() {
        assert_eq!(local_type(&X3_X_1, 2), LocalCubicType::Inert3);
        assert_eq!(local_type(&X3_X_1, 5), LocalCubicType::Partial12);
        assert_eq!(local_type(&X3_X_1, 23), LocalCubicType::Ram21);
        // x³ - x has three roots mod 5
        assert_eq!(
            local_type(&BinaryCubicForm::new(1, 0, -1, 0), 5),
            LocalCubicType::Split111
        );
        // leading coefficient divisible by p: the root at infinity counts
        assert_eq!(local_type(&BinaryCubicForm::new(2, 0, -1, 1), 2), LocalCubicType::Ram21);
    }

    #[test]
    fn maximality_examples() {
        for p in [2, 3, 5, 23] {
            assert!(is_maximal_at(&X3_X_1, p));
        }
        let f = BinaryCubicForm::new(1, 0, -3, -1);
        assert_eq!(f.disc(), 81);
        assert!(is_maximal_at(&f, 3));
        assert!(!is_fundamental(81));
        // Z[2θ] for θ³ = θ + 1 has index 8
        assert!(!is_maximal_at(&BinaryCubicForm::new(1, 0, -4, -8), 2));
        assert!(!BinaryCubicForm::new(2, 0, -2, -2).is_primitive());
        assert!(!is_maximal_at(&BinaryCubicForm::new(2, 0, -2, -2), 2));
    }

    #[test]
    fn count_matching_examples() {
        let d = |x| FundamentalDiscriminant::new(x).unwrap();
        assert_eq!(count_matching_cubics(d(-23), &[]), 1);
        assert_eq!(count_matching_cubics(d(-23), &[2]), 0);
        assert_eq!(count_matching_cubics(d(-4), &[]), 0);
    }

    /// Non-maximality by moving a multiple root to [1 : 0] and testing p² | a.
    fn maximal_by_root_shift(f: &BinaryCubicForm, p: u64) -> bool {
        let p2 = (p * p) as i128;
        let coeffs = reduce_mod(f, p);
        if coeffs.iter().all(|&c| c == 0) {
            return false;
        }
        if coeffs[0] == 0 && coeffs[1] == 0 && (f.a as i128) % p2 != 0 {
            return true;
        }
        if coeffs[0] == 0 && coeffs[1] == 0 {
            return false;
        }
        for r in 0..p as i64 {
            if root_multiplicity(&coeffs, r as i128, p as i128) >= 2 {
                let g = f.transform(r, 1, 1, 0);
                if (g.a as i128) % p2 == 0 {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn maximality_matches_root_shift() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let mut non_maximal = 0;
        for _ in 0..20000 {
            let f = BinaryCubicForm::new(
                rng.gen_range(-12..=12),
                rng.gen_range(-12..=12),
                rng.gen_range(-12..=12),
                rng.gen_range(-12..=12),
            );
            if f.disc() == 0 {
                continue;
            }
            for p in [2u64, 3, 5, 7] {
                let dedekind = is_maximal_at(&f, p);
                assert_eq!(dedekind, maximal_by_root_shift(&f, p), "{f} at {p}");
                non_maximal += !dedekind as usize;
            }
        }
        assert!(non_maximal > 1000);
    }

    #[test]
    fn fundamental_discriminant_forces_maximality() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(13);
        for _ in 0..20000 {
            let f = BinaryCubicForm::new(
                rng.gen_range(-9..=9),
                rng.gen_range(-9..=9),
                rng.gen_range(-9..=9),
                rng.gen_range(-9..=9),
            );
            let disc = f.disc();
            if disc == 0 || disc.unsigned_abs() > i64::MAX as u128 || !is_fundamental(disc as i64) {
                continue;
            }
            for p in (2..60).filter(|&p| is_prime(p)) {
                assert!(is_maximal_at(&f, p));
                assert_ne!(local_type(&f, p), LocalCubicType::Ram111Tot);
            }
        }
    }

    proptest! {
        #[test]
        fn disc_invariant_under_unimodular_maps(
            coeffs in prop::array::uniform4(-30i64..=30),
            steps in prop::collection::vec((0u8..3, -3i64..=3), 1..8),
        ) {
            // a word in x ↦ x + ky, swap, and y ↦ -y
            let mut m = [1i64, 0, 0, 1];
            for (kind, k) in steps {
                let g = match kind {
                    0 => [1, k, 0, 1],
                    1 => [0, 1, 1, 0],
                    _ => [1, 0, 0, -1],
                };
                m = [
                    m[0] * g[0] + m[1] * g[2],
                    m[0] * g[1] + m[1] * g[3],
                    m[2] * g[0] + m[3] * g[2],
                    m[2] * g[1] + m[3] * g[3],
                ];
            }
            let f = BinaryCubicForm::new(coeffs[0], coeffs[1], coeffs[2], coeffs[3]);
            let g = f.transform(m[0], m[1], m[2], m[3]);
            prop_assert_eq!(f.disc(), g.disc());
        }

        #[test]
        fn root_multiplicities_are_consistent(
            coeffs in prop::array::uniform4(-40i64..=40),
            p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]),
        ) {
            let f = BinaryCubicForm::new(coeffs[0], coeffs[1], coeffs[2], coeffs[3]);
            if let Some(roots) = projective_roots_mod(&f, p) {
                let total: usize = roots.iter().sum();
                prop_assert!(total <= 3);
                // unramified: simple roots only, and residue degrees 1+1+1, 1+2 or 3
                if f.disc().rem_euclid(p as i128) != 0 {
                    prop_assert!(roots.iter().all(|&m| m == 1));
                    prop_assert!(matches!(roots.len(), 0 | 1 | 3));
                    prop_assert_eq!(total + 2 * (roots.len() == 1) as usize + 3 * roots.is_empty() as usize, 3);
                }
            }
        }
    }

    #[test]
    fn table_counts_match_direct_counts() {
        let sieve = SquarefreeSieve::new(2000);
        let table = CubicTable::new(&sieve, 2000, &[2, 3]);
        for d in [-23i64, -31, -104, -59, -83, 229, 257, 316, -4, 5] {
            let fd = FundamentalDiscriminant::new(d).unwrap();
            for primes in [&[][..], &[2], &[3], &[2, 3]] {
                assert_eq!(table.count_matching(d, primes), count_matching_cubics(fd, primes));
            }
        }
    }

    // --- independent oracle: box search with root-matching isomorphism ---

    #[derive(Clone, Copy, Debug)]
    struct C(f64, f64);
    impl std::ops::Add for C {
        type Output = C;
        fn add(self, o: C) -> C {
            C(self.0 + o.0, self.1 + o.1)
        }
    }
    impl std::ops::Sub for C {
        type Output = C;
        fn sub(self, o: C) -> C {
            C(self.0 - o.0, self.1 - o.1)
        }
    }
    impl std::ops::Mul for C {
        type Output = C;
        fn mul(self, o: C) -> C {
            C(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
        }
    }

    fn all_roots(f: &BinaryCubicForm) -> [C; 3] {
        let r = real_roots(f);
        if f.disc() > 0 {
            [C(r[0], 0.0), C(r[1], 0.0), C(r[2], 0.0)]
        } else {
            let (re, im) = upper_root(f);
            [C(r[0], 0.0), C(re, im), C(re, -im)]
        }
    }

    /// Möbius matrix sending z1, z2, z3 to w1, w2, w3 (up to scale).
    fn mobius(z: [C; 3], w: [C; 3]) -> [C; 4] {
        // M_z sends z1, z2, z3 to 0, ∞, 1
        let to_std = |z: [C; 3]| -> [C; 4] {
            let [z1, z2, z3] = z;
            let k1 = z3 - z2;
            let k2 = z3 - z1;
            [k1, C(0.0, 0.0) - k1 * z1, k2, C(0.0, 0.0) - k2 * z2]
        };
        let m = to_std(z);
        let n = to_std(w);
        // inverse of n (adjugate)
        let ninv = [n[3], C(0.0, 0.0) - n[1], C(0.0, 0.0) - n[2], n[0]];
        [
            ninv[0] * m[0] + ninv[1] * m[2],
            ninv[0] * m[1] + ninv[1] * m[3],
            ninv[2] * m[0] + ninv[3] * m[2],
            ninv[2] * m[1] + ninv[3] * m[3],
        ]
    }

    fn isomorphic(f: &BinaryCubicForm, g: &BinaryCubicForm) -> bool {
        let rf = all_roots(f);
        let rg = all_roots(g);
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for perm in perms {
            // roots of g are M⁻¹·(roots of f) for g = f∘M
            let m = mobius([rg[perm[0]], rg[perm[1]], rg[perm[2]]], rf);
            let det = m[0] * m[3] - m[1] * m[2];
            let scale = {
                // det = s², normalize to det ±1
                let r = (det.0 * det.0 + det.1 * det.1).sqrt().sqrt();
                let phase = det.1.atan2(det.0) / 2.0;
                C(r * phase.cos(), r * phase.sin())
            };
            for flip in [false, true] {
                let s = if flip { C(scale.1, -scale.0) } else { scale };
                let inv = {
                    let n = s.0 * s.0 + s.1 * s.1;
                    C(s.0 / n, -s.1 / n)
                };
                let e: Vec<C> = m.iter().map(|&x| x * inv).collect();
                if e.iter().any(|z| z.1.abs() > 1e-6 || (z.0 - z.0.round()).abs() > 1e-6) {
                    continue;
                }
                let [al, be, ga, de] = [0, 1, 2, 3].map(|i| e[i].0.round() as i64);
                if (al * de - be * ga).abs() != 1 {
                    continue;
                }
                let h = f.transform(al, be, ga, de);
                if h == *g || h.negate() == *g {
                    return true;
                }
            }
        }
        false
    }

    /// Discriminant → number of isomorphism classes, from a plain box search.
    fn box_search(x: u64, negative: bool) -> BTreeMap<i64, usize> {
        let mut classes: BTreeMap<i64, Vec<BinaryCubicForm>> = BTreeMap::new();
        for a in 1..=10i64 {
            for b in -30..=30i64 {
                for c in -30..=30i64 {
                    let (ai, bi, ci) = (a as i128, b as i128, c as i128);
                    let qa = -27 * ai * ai;
                    let qb = 18 * ai * bi * ci - 4 * bi * bi * bi;
                    let qc = bi * bi * ci * ci - 4 * ai * ci * ci * ci;
                    for d in -200..=200i64 {
                        let disc = (qa * d as i128 + qb) * d as i128 + qc;
                        if disc == 0 || disc.unsigned_abs() >= x as u128 || (disc < 0) != negative {
                            continue;
                        }
                        let disc = disc as i64;
                        if !is_fundamental(disc) {
                            continue;
                        }
                        let f = BinaryCubicForm::new(a, b, c, d);
                        if f.is_reducible() {
                            continue;
                        }
                        let known = classes.entry(disc).or_default();
                        if !known.iter().any(|g| isomorphic(g, &f)) {
                            known.push(f);
                        }
                    }
                }
            }
        }
        classes.into_iter().map(|(d, v)| (d, v.len())).collect()
    }

    fn tally(records: &[CubicFieldRecord]) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for r in records {
            *out.entry(r.disc).or_insert(0) += 1;
        }
        out
    }

    #[test]
    fn complex_enumeration_matches_box_search() {
        let records = enumerate_cubic_fields(2000, Signature::Imaginary);
        assert_eq!(tally(&records), box_search(2000, true));
    }

    #[test]
    fn real_enumeration_matches_box_search() {
        let records = enumerate_cubic_fields(2000, Signature::Real);
        assert_eq!(tally(&records), box_search(2000, false));
    }

    #[test]
    fn enumeration_is_reduced_and_canonical() {
        for sig in [Signature::Real, Signature::Imaginary] {
            for r in enumerate_cubic_fields(5000, sig) {
                let f = r.canonical_form;
                assert!(f.a > 0);
                assert!(in_domain(&f, r.disc > 0));
                assert_eq!(canonical_form(&f), f);
            }
        }
    }
}
