// SPDX-License-Identifier: Apache-2.0

//! Sweeps over fundamental discriminants: running sums of class group,
//! Selmer and S-unit sizes, the field-by-field comparison against cubic
//! fields, and report rendering.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::abgrp::{quotient_three_torsion, selmer_size, sunit_size, QuotientInput, SUnitSizeInput};
use crate::arith::{check_memory, splitting_type, FundamentalDiscriminant, Signature, SplitType, SquarefreeSieve};
use crate::cubic::{enumerate_cubic_fields_with, CubicTable};
use crate::error::{Error, Result};
use crate::predict::{
    avg_three_pow_split, format_primes, format_rational, predicted_avg_cl, predicted_avg_cl_conditioned,
    predicted_avg_selmer, predicted_avg_selmer_conditioned, predicted_avg_sunits, predicted_cubic_density,
    predicted_density_quad, to_f64, Rational, SConfig,
};
use crate::quadform::{reduced_forms_in_range, three_sylow_of, ClassGroupPresentation, FormClassGroup};

/// Width of the |d| ranges handed to workers.
pub const CHUNK: u64 = 1 << 14;

/// ζ(2), used only when rendering densities.
pub const ZETA_2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

/// Sums for the fields whose split primes in S are exactly one pattern S₁.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternAccumulator {
    pub field_count: u64,
    /// fields with some prime of S ramified
    pub ramified_count: u64,
    pub sum_cl3: u128,
    /// fields entering the unit and Selmer sums (all but d = -3)
    pub unit_field_count: u64,
    pub sum_selmer: u128,
}

impl PatternAccumulator {
    fn merge(&mut self, other: &PatternAccumulator) {
        self.field_count += other.field_count;
        self.ramified_count += other.ramified_count;
        self.sum_cl3 += other.sum_cl3;
        self.unit_field_count += other.unit_field_count;
        self.sum_selmer += other.sum_selmer;
    }
}

/// Running sums over the fields of one signature with |d| < x.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusAccumulator {
    pub primes: Vec<u64>,
    pub signature: Signature,
    /// exclusive bound on |d|
    pub x: u64,
    /// whether class groups were computed (otherwise only split data)
    pub class_groups: bool,
    pub field_count: u64,
    pub sum_cl3: u128,
    pub unit_field_count: u64,
    pub sum_selmer: u128,
    pub sum_sunits: u128,
    pub sum_3pow_s1: u128,
    pub ramified_count: u64,
    /// keyed by S₁, listed in the order of `primes`
    pub patterns: BTreeMap<Vec<u64>, PatternAccumulator>,
    pub max_disc_seen: u64,
    /// discriminants left out of the unit and Selmer sums
    pub flagged: Vec<i64>,
}

impl CensusAccumulator {
    pub fn new(primes: &[u64], signature: Signature, class_groups: bool) -> Self {
        CensusAccumulator {
            primes: primes.to_vec(),
            signature,
            x: 0,
            class_groups,
            field_count: 0,
            sum_cl3: 0,
            unit_field_count: 0,
            sum_selmer: 0,
            sum_sunits: 0,
            sum_3pow_s1: 0,
            ramified_count: 0,
            patterns: BTreeMap::new(),
            max_disc_seen: 0,
            flagged: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.field_count == 0
    }

    /// Commutative and associative.
    pub fn merge(&mut self, other: &CensusAccumulator) {
        assert_eq!(self.primes, other.primes, "merging censuses over different S");
        assert_eq!(self.signature, other.signature);
        assert_eq!(self.class_groups, other.class_groups);
        self.x = self.x.max(other.x);
        self.field_count += other.field_count;
        self.sum_cl3 += other.sum_cl3;
        self.unit_field_count += other.unit_field_count;
        self.sum_selmer += other.sum_selmer;
        self.sum_sunits += other.sum_sunits;
        self.sum_3pow_s1 += other.sum_3pow_s1;
        self.ramified_count += other.ramified_count;
        for (k, v) in &other.patterns {
            self.patterns.entry(k.clone()).or_default().merge(v);
        }
        self.max_disc_seen = self.max_disc_seen.max(other.max_disc_seen);
        self.flagged.extend(&other.flagged);
        self.flagged.sort_unstable();
        self.flagged.dedup();
    }

    /// Adds one field; `cl3` is |Cl(K)_S[3]| when class groups are tracked.
    fn record(&mut self, d: FundamentalDiscriminant, split: &[SplitType], cl3: u64) {
        let s1: Vec<u64> = self
            .primes
            .iter()
            .zip(split)
            .filter(|(_, t)| **t == SplitType::Split)
            .map(|(&p, _)| p)
            .collect();
        let ramified = split.contains(&SplitType::Ramified);
        let size = SUnitSizeInput::new(self.signature, self.primes.len() as u32, s1.len() as u32).expect("S₁ ⊆ S");
        let pattern = self.patterns.entry(s1.clone()).or_default();
        pattern.field_count += 1;
        pattern.ramified_count += ramified as u64;
        pattern.sum_cl3 += cl3 as u128;
        self.field_count += 1;
        self.sum_cl3 += cl3 as u128;
        self.ramified_count += ramified as u64;
        self.sum_3pow_s1 += 3u128.pow(s1.len() as u32);
        self.max_disc_seen = self.max_disc_seen.max(d.abs());
        // Q(√-3) has extra cube roots of unity
        if d.get() == -3 {
            self.flagged.push(-3);
            return;
        }
        let sunits = sunit_size(&size);
        let selmer = selmer_size(&size, cl3).expect("3-torsion size is a power of 3");
        debug_assert_eq!(selmer, sunits * cl3);
        self.unit_field_count += 1;
        self.sum_sunits += sunits as u128;
        self.sum_selmer += selmer as u128;
        pattern.unit_field_count += 1;
        pattern.sum_selmer += selmer as u128;
    }
}

/// Per-field data shared by every S ⊆ the tracked primes.
struct FieldData {
    d: FundamentalDiscriminant,
    split: Vec<SplitType>,
    sylow: Option<ClassGroupPresentation>,
}

impl FieldData {
    /// |Cl(K)_S[3]| for the primes selected by `index` (positions in the
    /// tracked list).
    fn cl3(&self, index: &[usize]) -> u64 {
        let Some(sylow) = &self.sylow else {
            return 1;
        };
        if sylow.invariants.is_empty() {
            return 1;
        }
        let gens: Vec<Vec<i64>> = index.iter().filter_map(|&i| sylow.marked[i].1.clone()).collect();
        let q = QuotientInput::new(sylow.invariants.clone(), gens).expect("marks match invariants");
        quotient_three_torsion(&q)
    }
}

/// Fields of the chunk [lo, hi) in increasing |d|.
fn chunk_fields(
    sieve: &SquarefreeSieve,
    lo: u64,
    hi: u64,
    signature: Signature,
    primes: &[u64],
    class_groups: bool,
) -> Vec<FieldData> {
    let sign = signature.sign();
    let keep = |n: u64| sieve.is_fundamental(sign * n as i64);
    let split_of = |d| primes.iter().map(|&p| splitting_type(d, p)).collect();
    if !class_groups {
        return (lo.max(1)..hi)
            .filter(|&n| keep(n))
            .map(|n| {
                let d = FundamentalDiscriminant::new_unchecked(sign * n as i64);
                FieldData {
                    d,
                    split: split_of(d),
                    sylow: None,
                }
            })
            .collect();
    }
    let buckets = reduced_forms_in_range(lo, hi, signature, keep);
    buckets
        .into_iter()
        .enumerate()
        .filter(|(i, _)| keep(lo + *i as u64))
        .map(|(i, forms)| {
            let d = FundamentalDiscriminant::new_unchecked(sign * (lo + i as u64) as i64);
            let group = FormClassGroup::from_reduced_forms(d, forms);
            FieldData {
                d,
                split: split_of(d),
                sylow: Some(three_sylow_of(&group, d, primes)),
            }
        })
        .collect()
}

/// [lo, hi) ranges covering [1, x), cut at every checkpoint.
fn chunks(x: u64, checkpoints: &[u64]) -> Vec<(u64, u64)> {
    let mut cuts: Vec<u64> = checkpoints.iter().copied().filter(|&c| c > 1 && c < x).collect();
    cuts.push(x);
    cuts.sort_unstable();
    cuts.dedup();
    let mut out = Vec::new();
    let mut lo = 1;
    for cut in cuts {
        while lo < cut {
            let hi = (lo + CHUNK).min(cut);
            out.push((lo, hi));
            lo = hi;
        }
    }
    out
}

/// Powers of ten below x, then x.
pub fn decade_checkpoints(x: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut c = 10u64;
    while c < x {
        out.push(c);
        c *= 10;
    }
    out.push(x);
    out
}

fn positions(all: &[u64], subset: &[u64]) -> Vec<usize> {
    subset
        .iter()
        .map(|p| all.iter().position(|q| q == p).expect("prime tracked"))
        .collect()
}

fn union_primes(configs: &[SConfig]) -> Vec<u64> {
    let mut all: Vec<u64> = Vec::new();
    for c in configs {
        for &p in c.primes() {
            if !all.contains(&p) {
                all.push(p);
            }
        }
    }
    all
}

/// One sweep over |d| < x for several prime sets at once, with snapshots at
/// each checkpoint. Returns, for each checkpoint in increasing order, one
/// accumulator per config.
pub fn run_classgroup_sweep(
    x: u64,
    checkpoints: &[u64],
    configs: &[SConfig],
    signature: Signature,
    class_groups: bool,
) -> Result<Vec<(u64, Vec<CensusAccumulator>)>> {
    check_memory(x)?;
    let sieve = SquarefreeSieve::new(x);
    let all = union_primes(configs);
    let index: Vec<Vec<usize>> = configs.iter().map(|c| positions(&all, c.primes())).collect();
    let ranges = chunks(x, checkpoints);
    let per_chunk: Vec<Vec<CensusAccumulator>> = ranges
        .par_iter()
        .map(|&(lo, hi)| range_accumulators(&sieve, lo, hi, configs, &all, &index, signature, class_groups))
        .collect();

    let mut running: Vec<CensusAccumulator> = configs
        .iter()
        .map(|c| CensusAccumulator::new(c.primes(), signature, class_groups))
        .collect();
    let mut snapshots = Vec::new();
    let mut wanted: Vec<u64> = checkpoints.iter().copied().filter(|&c| c <= x).collect();
    wanted.push(x);
    wanted.sort_unstable();
    wanted.dedup();
    let mut next = 0;
    for (&(_, hi), accs) in ranges.iter().zip(&per_chunk) {
        for (r, a) in running.iter_mut().zip(accs) {
            r.merge(a);
        }
        while next < wanted.len() && wanted[next] <= hi {
            if wanted[next] == hi {
                snapshots.push((hi, running.clone()));
            }
            next += 1;
        }
    }
    // checkpoints at or below 1 see no fields
    for &c in &wanted {
        if !snapshots.iter().any(|(x, _)| *x == c) {
            let mut empty: Vec<CensusAccumulator> = configs
                .iter()
                .map(|cfg| CensusAccumulator::new(cfg.primes(), signature, class_groups))
                .collect();
            for e in &mut empty {
                e.x = c;
            }
            snapshots.push((c, empty));
        }
    }
    snapshots.sort_by_key(|(x, _)| *x);
    Ok(snapshots)
}

/// One accumulator per config over lo ≤ |d| < hi.
#[allow(clippy::too_many_arguments)]
fn range_accumulators(
    sieve: &SquarefreeSieve,
    lo: u64,
    hi: u64,
    configs: &[SConfig],
    all: &[u64],
    index: &[Vec<usize>],
    signature: Signature,
    class_groups: bool,
) -> Vec<CensusAccumulator> {
    let fields = chunk_fields(sieve, lo, hi, signature, all, class_groups);
    configs
        .iter()
        .zip(index)
        .map(|(config, idx)| {
            let mut acc = CensusAccumulator::new(config.primes(), signature, class_groups);
            acc.x = hi;
            for field in &fields {
                if !field_matches(config, field, idx) {
                    continue;
                }
                let split: Vec<SplitType> = idx.iter().map(|&i| field.split[i]).collect();
                acc.record(field.d, &split, field.cl3(idx));
            }
            acc
        })
        .collect()
}

/// A split condition restricts to fields whose split set in S is exactly S₁.
fn field_matches(config: &SConfig, field: &FieldData, idx: &[usize]) -> bool {
    let Some(s1) = config.split() else {
        return true;
    };
    config
        .primes()
        .iter()
        .zip(idx)
        .all(|(p, &i)| (field.split[i] == SplitType::Split) == s1.contains(p))
}

/// Census over fundamental |d| < x of one signature. With a split pattern
/// set on `s`, only fields whose split primes in S are exactly S₁ count.
pub fn run_classgroup_census(x: u64, s: &SConfig, signature: Signature) -> Result<CensusAccumulator> {
    let mut snaps = run_classgroup_sweep(x, &[], std::slice::from_ref(s), signature, true)?;
    Ok(snaps.pop().expect("final snapshot").1.pop().expect("one config"))
}

/// Split data only (no class groups): enough for densities and unit sizes.
pub fn run_split_census(x: u64, s: &SConfig, signature: Signature) -> Result<CensusAccumulator> {
    let mut snaps = run_classgroup_sweep(x, &[], std::slice::from_ref(s), signature, false)?;
    Ok(snaps.pop().expect("final snapshot").1.pop().expect("one config"))
}

/// Number of cubic fields of fundamental discriminant with |disc| < x and
/// the given signature in which no prime of S is inert.
pub fn run_cubic_census(x: u64, s: &SConfig, signature: Signature) -> Result<u64> {
    check_memory(x)?;
    let sieve = SquarefreeSieve::new(x);
    Ok(enumerate_cubic_fields_with(&sieve, x, signature)
        .iter()
        .filter(|r| r.avoids_inert(s.primes()))
        .count() as u64)
}

/// One discriminant where the two sides disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub d: i64,
    pub primes: Vec<u64>,
    pub forms_side: u64,
    pub cubic_side: u64,
}

/// Field-by-field comparison of |Cl(K)_S[3]| with 1 + 2·#{cubic fields}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub x: u64,
    pub primes: Vec<u64>,
    pub checked: u64,
    /// (d, |Cl(K)_S[3]|) for every d where it exceeds 1
    pub nontrivial: Vec<(i64, u64)>,
    pub mismatches: Vec<Mismatch>,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    /// Deterministic CSV rendering: a summary line, then one row per
    /// discriminant with nontrivial 3-torsion.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,S,cl3,matching_cubics\n");
        let s = format_primes(&self.primes);
        for &(d, cl3) in &self.nontrivial {
            let _ = writeln!(out, "{d},{s},{cl3},{}", (cl3 - 1) / 2);
        }
        for m in &self.mismatches {
            let _ = writeln!(out, "{},{s},{},mismatch:{}", m.d, m.forms_side, m.cubic_side);
        }
        let _ = writeln!(
            out,
            "# X={} checked={} mismatches={}",
            self.x,
            self.checked,
            self.mismatches.len()
        );
        out
    }
}

/// (fields checked, nontrivial 3-torsion, mismatches) for one chunk and config.
type ChunkCheck = (u64, Vec<(i64, u64)>, Vec<Mismatch>);

/// Compares both sides for every fundamental |d| < x, both signatures, for
/// each prime set.
pub fn crosscheck_hasse_many(x: u64, configs: &[SConfig]) -> Result<Vec<CrosscheckReport>> {
    check_memory(x)?;
    let sieve = SquarefreeSieve::new(x);
    let all = union_primes(configs);
    let table = CubicTable::new(&sieve, x, &all);
    let index: Vec<Vec<usize>> = configs.iter().map(|c| positions(&all, c.primes())).collect();
    let mut reports: Vec<CrosscheckReport> = configs
        .iter()
        .map(|c| CrosscheckReport {
            x,
            primes: c.primes().to_vec(),
            checked: 0,
            nontrivial: Vec::new(),
            mismatches: Vec::new(),
        })
        .collect();
    for signature in [Signature::Imaginary, Signature::Real] {
        let ranges = chunks(x, &[]);
        let per_chunk: Vec<Vec<ChunkCheck>> = ranges
            .par_iter()
            .map(|&(lo, hi)| {
                let fields = chunk_fields(&sieve, lo, hi, signature, &all, true);
                configs
                    .iter()
                    .zip(&index)
                    .map(|(config, idx)| {
                        let mut nontrivial = Vec::new();
                        let mut mismatches = Vec::new();
                        for field in &fields {
                            let forms_side = field.cl3(idx);
                            let cubic_side = 1 + 2 * table.count_matching(field.d.get(), config.primes());
                            if forms_side > 1 {
                                nontrivial.push((field.d.get(), forms_side));
                            }
                            if forms_side != cubic_side {
                                mismatches.push(Mismatch {
                                    d: field.d.get(),
                                    primes: config.primes().to_vec(),
                                    forms_side,
                                    cubic_side,
                                });
                            }
                        }
                        (fields.len() as u64, nontrivial, mismatches)
                    })
                    .collect()
            })
            .collect();
        for chunk in per_chunk {
            for (report, (checked, nontrivial, mismatches)) in reports.iter_mut().zip(chunk) {
                report.checked += checked;
                report.nontrivial.extend(nontrivial);
                report.mismatches.extend(mismatches);
            }
        }
    }
    Ok(reports)
}

pub fn crosscheck_hasse(x: u64, s: &SConfig) -> Result<CrosscheckReport> {
    Ok(crosscheck_hasse_many(x, std::slice::from_ref(s))?.remove(0))
}

/// One line of a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub theorem: String,
    pub signature: Signature,
    pub primes: Vec<u64>,
    /// the split pattern S₁ for conditioned rows
    pub split: Option<Vec<u64>>,
    pub x: u64,
    pub empirical: f64,
    /// exact limit, as "n/d"
    pub predicted: String,
    pub predicted_decimal: f64,
    pub deviation: f64,
}

impl ReportRow {
    pub fn relative_deviation(&self) -> f64 {
        if self.predicted_decimal == 0.0 {
            self.deviation
        } else {
            self.deviation / self.predicted_decimal.abs()
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub rows: Vec<ReportRow>,
    pub crosscheck: Vec<CrosscheckSummary>,
    /// discriminants left out of unit and Selmer averages
    pub flagged: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrosscheckSummary {
    pub x: u64,
    pub primes: Vec<u64>,
    pub checked: u64,
    pub mismatches: u64,
}

impl From<&CrosscheckReport> for CrosscheckSummary {
    fn from(r: &CrosscheckReport) -> Self {
        CrosscheckSummary {
            x: r.x,
            primes: r.primes.clone(),
            checked: r.checked,
            mismatches: r.mismatches.len() as u64,
        }
    }
}

fn ratio(num: u128, den: u64) -> f64 {
    num as f64 / den as f64
}

fn row(
    theorem: &str,
    signature: Signature,
    primes: &[u64],
    split: Option<Vec<u64>>,
    x: u64,
    empirical: f64,
    predicted: Rational,
) -> ReportRow {
    let predicted_decimal = to_f64(&predicted);
    ReportRow {
        theorem: theorem.to_string(),
        signature,
        primes: primes.to_vec(),
        split,
        x,
        empirical,
        predicted: format_rational(&predicted),
        predicted_decimal,
        deviation: (empirical - predicted_decimal).abs(),
    }
}

/// Empirical averages against their limits. Rows for a split pattern that
/// saw no field are omitted.
pub fn render_report(acc: &CensusAccumulator) -> Result<CensusReport> {
    if acc.is_empty() {
        return Err(Error::EmptyAccumulator);
    }
    let sig = acc.signature;
    let s = SConfig::new(acc.primes.clone())?;
    let p = &acc.primes;
    let n = acc.field_count;
    let mut rows = Vec::new();
    if acc.class_groups {
        rows.push(row(
            "cl3_avg",
            sig,
            p,
            None,
            acc.x,
            ratio(acc.sum_cl3, n),
            predicted_avg_cl(&s, sig),
        ));
        if let Some(all) = acc.patterns.get(p) {
            let cond = s.clone().all_split();
            rows.push(row(
                "cl3_avg_split",
                sig,
                p,
                Some(p.clone()),
                acc.x,
                ratio(all.sum_cl3, all.field_count),
                predicted_avg_cl_conditioned(&cond, sig),
            ));
            if all.unit_field_count > 0 {
                rows.push(row(
                    "selmer_avg_split",
                    sig,
                    p,
                    Some(p.clone()),
                    acc.x,
                    ratio(all.sum_selmer, all.unit_field_count),
                    predicted_avg_selmer_conditioned(&cond, sig),
                ));
            }
        }
        if acc.unit_field_count > 0 {
            rows.push(row(
                "selmer_avg",
                sig,
                p,
                None,
                acc.x,
                ratio(acc.sum_selmer, acc.unit_field_count),
                predicted_avg_selmer(&s, sig),
            ));
        }
    }
    for pattern in s.split_patterns() {
        let count = acc.patterns.get(&pattern).map_or(0, |a| a.field_count);
        let cond = s.clone().with_split(pattern.clone())?;
        rows.push(row(
            "split_density",
            sig,
            p,
            Some(pattern),
            acc.x,
            count as f64 / n as f64,
            predicted_density_quad(&cond),
        ));
    }
    rows.push(row(
        "split_weight_avg",
        sig,
        p,
        None,
        acc.x,
        ratio(acc.sum_3pow_s1, n),
        avg_three_pow_split(p),
    ));
    if acc.unit_field_count > 0 {
        rows.push(row(
            "sunit_avg",
            sig,
            p,
            None,
            acc.x,
            ratio(acc.sum_sunits, acc.unit_field_count),
            predicted_avg_sunits(&s, sig),
        ));
    }
    rows.sort_by(|a, b| a.theorem.cmp(&b.theorem).then(a.x.cmp(&b.x)));
    Ok(CensusReport {
        rows,
        crosscheck: Vec::new(),
        flagged: acc.flagged.clone(),
    })
}

/// Cubic field count against c∞ · 3^{-|S|} ∏(2 + 1/(p+1)) · X / ζ(2).
pub fn cubic_density_row(x: u64, s: &SConfig, signature: Signature, count: u64) -> ReportRow {
    row(
        "cubic_density",
        signature,
        s.primes(),
        None,
        x,
        count as f64 * ZETA_2 / x as f64,
        predicted_cubic_density(s, signature),
    )
}

impl CensusReport {
    pub fn merge(&mut self, other: CensusReport) {
        self.rows.extend(other.rows);
        self.rows.sort_by(|a, b| {
            a.theorem
                .cmp(&b.theorem)
                .then(a.signature.as_str().cmp(b.signature.as_str()))
                .then(a.primes.cmp(&b.primes))
                .then(a.split.cmp(&b.split))
                .then(a.x.cmp(&b.x))
        });
        self.crosscheck.extend(other.crosscheck);
        self.flagged.extend(other.flagged);
        self.flagged.sort_unstable();
        self.flagged.dedup();
    }

    pub const CSV_HEADER: &'static str = "theorem,signature,S,S1,X,empirical,predicted,deviation";

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let s1 = r.split.as_deref().map_or("*".to_string(), format_primes);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.6},{},{:.6}",
                r.theorem,
                r.signature,
                format_primes(&r.primes),
                s1,
                r.x,
                r.empirical,
                r.predicted,
                r.deviation
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Fraction of fundamental discriminants of one sign falling in a single
/// admissible class modulo 16·core², as a multiple of X/(2ζ(2)).
pub fn progression_share(core: u64) -> Rational {
    let mut share = Rational::new(1, 6);
    let mut n = core;
    let mut q = 3;
    while q * q <= n {
        if n.is_multiple_of(q) {
            share /= Rational::from_integer((q * q - 1) as i128);
            n /= q;
        }
        q += 2;
    }
    if n > 1 {
        share /= Rational::from_integer((n * n - 1) as i128);
    }
    share
}
