// SPDX-License-Identifier: Apache-2.0

//! Finite abelian groups given by relations, their quotients, and the sizes
//! of S-unit groups and relaxed Selmer groups modulo cubes.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::arith::Signature;
use crate::error::{Error, Result};

/// A finite abelian group whose elements are numbered `0..order()`.
pub trait FiniteGroup {
    fn identity(&self) -> usize;
    fn op(&self, x: usize, y: usize) -> usize;
    fn order(&self) -> usize;
}

/// Smith normal form `U·A·V = diag` together with the column transform `V`.
#[derive(Clone, Debug)]
pub struct Smith {
    /// diagonal entries (nonnegative, each dividing the next); length = columns
    pub diagonal: Vec<i128>,
    pub column_transform: Vec<Vec<i128>>,
}

pub fn smith_normal_form(rows: &[Vec<i64>], ncols: usize) -> Smith {
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| {
            assert_eq!(r.len(), ncols, "ragged relation matrix");
            r.iter().map(|&x| x as i128).collect()
        })
        .collect();
    let nrows = a.len();
    let mut v: Vec<Vec<i128>> = (0..ncols)
        .map(|i| (0..ncols).map(|j| (i == j) as i128).collect())
        .collect();

    let swap_cols = |a: &mut Vec<Vec<i128>>, v: &mut Vec<Vec<i128>>, i: usize, j: usize| {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
    };
    // col_j -= q·col_t
    let sub_col = |a: &mut Vec<Vec<i128>>, v: &mut Vec<Vec<i128>>, j: usize, t: usize, q: i128| {
        for row in a.iter_mut() {
            row[j] -= q * row[t];
        }
        for row in v.iter_mut() {
            row[j] -= q * row[t];
        }
    };

    let mut diagonal = vec![0i128; ncols];
    for t in 0..ncols.min(nrows) {
        // pivot: smallest nonzero entry of the remaining block
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        swap_cols(&mut a, &mut v, t, pj);
        loop {
            let mut again = false;
            for i in t + 1..nrows {
                let q = a[i][t].div_euclid(a[t][t]);
                if q != 0 {
                    let pivot_row = a[t].clone();
                    for (x, p) in a[i].iter_mut().zip(&pivot_row) {
                        *x -= q * p;
                    }
                }
                if a[i][t] != 0 {
                    a.swap(t, i);
                    again = true;
                }
            }
            for j in t + 1..ncols {
                let q = a[t][j].div_euclid(a[t][t]);
                if q != 0 {
                    sub_col(&mut a, &mut v, j, t, q);
                }
                if a[t][j] != 0 {
                    swap_cols(&mut a, &mut v, t, j);
                    again = true;
                }
            }
            if again {
                continue;
            }
            // divisibility: fold an offending row into the pivot row
            let p = a[t][t];
            let bad = (t + 1..nrows).find(|&i| a[i][t + 1..].iter().any(|&x| x % p != 0));
            match bad {
                Some(i) => {
                    let row = a[i].clone();
                    for (x, y) in a[t].iter_mut().zip(&row) {
                        *x += y;
                    }
                }
                None => break,
            }
        }
        diagonal[t] = a[t][t].abs();
    }
    Smith {
        diagonal,
        column_transform: v,
    }
}

/// Invariant factors (> 1, in divisibility order) of Z^ncols / rowspace.
pub fn smith_invariants(rows: &[Vec<i64>], ncols: usize) -> Result<Vec<u64>> {
    let smith = smith_normal_form(rows, ncols);
    if smith.diagonal.contains(&0) {
        return Err(Error::InfiniteGroup);
    }
    Ok(smith
        .diagonal
        .into_iter()
        .filter(|&x| x > 1)
        .map(|x| x as u64)
        .collect())
}

/// Cyclic decomposition of the subgroup generated by `candidates` (stopping
/// once it has `target_order` elements) and the coordinates of `marks` in it.
///
/// The subgroup is grown one generator at a time: each new generator x gets
/// the relation n·x = (vector of x^n in the old subgroup), where n is the
/// least power landing in it. Smith reduction of those relations gives the
/// invariants, and its column transform carries each exponent vector over.
/// Every mark must lie in the generated subgroup.
pub fn decompose<G: FiniteGroup>(
    group: &G,
    candidates: impl IntoIterator<Item = usize>,
    target_order: usize,
    marks: &[usize],
) -> (Vec<u64>, Vec<Vec<i64>>) {
    let e = group.identity();
    let mut members: HashMap<usize, Vec<i64>> = HashMap::new();
    members.insert(e, Vec::new());
    let mut elements = vec![e];
    let mut relations: Vec<Vec<i64>> = Vec::new();
    for x in candidates {
        if elements.len() >= target_order {
            break;
        }
        if members.contains_key(&x) {
            continue;
        }
        let k = relations.len();
        let mut y = x;
        let mut n = 1i64;
        while !members.contains_key(&y) {
            y = group.op(y, x);
            n += 1;
        }
        let mut row: Vec<i64> = members[&y].iter().map(|&c| -c).collect();
        row.resize(k, 0);
        row.push(n);
        relations.push(row);
        let old = elements.clone();
        let mut power = e;
        for i in 1..n {
            power = group.op(power, x);
            for &h in &old {
                let z = group.op(h, power);
                let mut vec = members[&h].clone();
                vec.resize(k, 0);
                vec.push(i);
                members.insert(z, vec);
                elements.push(z);
            }
        }
    }
    debug_assert_eq!(elements.len(), target_order);

    let k = relations.len();
    for row in &mut relations {
        row.resize(k, 0);
    }
    let smith = smith_normal_form(&relations, k);
    let keep: Vec<usize> = (0..k).filter(|&i| smith.diagonal[i] > 1).collect();
    let invariants = keep.iter().map(|&i| smith.diagonal[i] as u64).collect();
    let logs = marks
        .iter()
        .map(|m| {
            let mut x = members
                .get(m)
                .expect("marked element outside the generated subgroup")
                .clone();
            x.resize(k, 0);
            keep.iter()
                .map(|&j| {
                    let coord: i128 = (0..k).map(|i| x[i] as i128 * smith.column_transform[i][j]).sum();
                    coord.rem_euclid(smith.diagonal[j]) as i64
                })
                .collect()
        })
        .collect();
    (invariants, logs)
}

/// An ambient group given by cyclic invariants, and elements to quotient by.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientInput {
    invariants: Vec<u64>,
    generators: Vec<Vec<i64>>,
}

impl QuotientInput {
    pub fn new(invariants: Vec<u64>, generators: Vec<Vec<i64>>) -> Result<Self> {
        let k = invariants.len();
        let mut generators = generators;
        for g in &mut generators {
            if g.len() != k {
                return Err(Error::VectorLength {
                    got: g.len(),
                    expected: k,
                });
            }
            for (x, &n) in g.iter_mut().zip(&invariants) {
                *x = x.rem_euclid(n as i64);
            }
        }
        Ok(QuotientInput { invariants, generators })
    }

    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    /// Invariants of the quotient group.
    pub fn quotient_invariants(&self) -> Vec<u64> {
        let k = self.invariants.len();
        let mut rows: Vec<Vec<i64>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| if i == j { self.invariants[i] as i64 } else { 0 })
                    .collect()
            })
            .collect();
        rows.extend(self.generators.iter().cloned());
        smith_invariants(&rows, k).expect("quotient of a finite group is finite")
    }
}

/// Size of the 3-torsion of (ambient group) / ⟨generators⟩.
pub fn quotient_three_torsion(q: &QuotientInput) -> u64 {
    q.quotient_invariants()
        .into_iter()
        .map(|n| if n % 3 == 0 { 3 } else { 1 })
        .product()
}

/// Signature and the sizes of S and of its split part S₁.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SUnitSizeInput {
    pub signature: Signature,
    pub s_size: u32,
    pub s1_size: u32,
}

impl SUnitSizeInput {
    pub fn new(signature: Signature, s_size: u32, s1_size: u32) -> Result<Self> {
        if s1_size > s_size {
            return Err(Error::SplitNotSubset);
        }
        Ok(SUnitSizeInput {
            signature,
            s_size,
            s1_size,
        })
    }

    fn exponent(&self) -> u32 {
        self.signature.unit_rank() + self.s_size + self.s1_size
    }
}

/// |O_{K,S}^× / cubes| for K ≠ Q(√-3).
pub fn sunit_size(x: &SUnitSizeInput) -> u64 {
    3u64.pow(x.exponent())
}

/// |Sel_3^S(K)| from the exact sequence 0 → units/cubes → Sel → Cl_S[3] → 0.
pub fn selmer_size(x: &SUnitSizeInput, cl_s_3: u64) -> Result<u64> {
    if !is_power_of_three(cl_s_3) {
        return Err(Error::NotPowerOfThree(cl_s_3));
    }
    Ok(sunit_size(x) * cl_s_3)
}

pub fn is_power_of_three(n: u64) -> bool {
    let mut n = n;
    if n == 0 {
        return false;
    }
    while n.is_multiple_of(3) {
        n /= 3;
    }
    n == 1
}
