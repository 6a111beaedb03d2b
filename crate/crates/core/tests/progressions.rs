// SPDX-License-Identifier: Apache-2.0

use clsq::arith::{count_fundamental_in_progression_with, enumerate_fundamental, Signature, SquarefreeSieve};
use clsq::census::{progression_share, ZETA_2};
use clsq::predict::to_f64;

const X: u64 = 1_000_000;

#[test]
fn fundamental_count_matches_asymptotic() {
    for sig in [Signature::Real, Signature::Imaginary] {
        let n = enumerate_fundamental(X, sig).len() as f64;
        let expected = X as f64 / (2.0 * ZETA_2);
        assert!((n / expected - 1.0).abs() < 0.005, "{sig}: {n} vs {expected}");
    }
}

#[test]
fn admissible_classes_partition_and_match_share() {
    let sieve = SquarefreeSieve::new(X);
    for sig in [Signature::Real, Signature::Imaginary] {
        let total = enumerate_fundamental(X, sig).len() as u64;
        for core in [1u64, 3, 5] {
            let modulus = 16 * core * core;
            let expected = to_f64(&progression_share(core)) * X as f64 / (2.0 * ZETA_2);
            // classes divisible by p² for p | core hold no fundamental d
            let mut sum = 0;
            let mut classes = 0;
            for d0 in 0..modulus as i64 {
                let Ok(n) = count_fundamental_in_progression_with(&sieve, X, d0, core, sig) else {
                    continue;
                };
                assert!(
                    (n as f64 / expected - 1.0).abs() < 0.05,
                    "{sig} core {core} d0 {d0}: {n} vs {expected:.1}"
                );
                sum += n;
                classes += 1;
            }
            assert_eq!(sum, total, "{sig} core {core}");
            // 6 classes mod 16, times p² - 1 for each p | core
            let want: u64 = 6 * [3u64, 5]
                .iter()
                .filter(|&&p| core % p == 0)
                .map(|p| p * p - 1)
                .product::<u64>();
            assert_eq!(classes, want);
        }
    }
}
