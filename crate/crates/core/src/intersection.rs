//! Partition/transversal matrices `A(t,k,v)`, inclusion matrices `B(t,h,k)`
//! and rank reports against the closed-form rank predictions.

use std::time::Instant;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{choose, colex_rank, enumerate_partitions, ksubsets, visit_transversals, BalancedPartition};
use crate::error::{Error, Result};
use crate::linalg::{exact_rank, ExactMatrix};

fn check_shape(t: usize, k: usize, v: &[usize]) -> Result<()> {
    if k == 0 || v.len() != k {
        return Err(Error::InvalidSizes(format!("expected {k} block sizes, got {v:?}")));
    }
    if v.contains(&0) {
        return Err(Error::InvalidSizes(format!("zero block size in {v:?}")));
    }
    if v.iter().sum::<usize>() != t {
        return Err(Error::SizeVectorSum { t, sizes: v.to_vec() });
    }
    Ok(())
}

/// `(t/k, ..., t/k)`, or an error when `k` does not divide `t`.
pub fn balanced_sizes(t: usize, k: usize) -> Result<Vec<usize>> {
    if k == 0 || !t.is_multiple_of(k) {
        return Err(Error::NotDivisible { t, k });
    }
    Ok(vec![t / k; k])
}

fn transversal_row(p: &BalancedPartition, cols: usize) -> Vec<BigRational> {
    let mut row = vec![BigRational::zero(); cols];
    visit_transversals(p, |s| row[colex_rank(s)] = BigRational::one());
    row
}

/// The 0/1 matrix with rows indexed by the canonical partitions of `[t]`
/// with block sizes `v` and columns by colex-ordered k-subsets; an entry is
/// 1 iff the subset is a transversal of the partition.
pub fn build_a(t: usize, k: usize, v: &[usize]) -> Result<ExactMatrix> {
    check_shape(t, k, v)?;
    let partitions = enumerate_partitions(t, v)?;
    let cols = choose(t, k);
    let rows: Vec<Vec<BigRational>> = partitions.par_iter().map(|p| transversal_row(p, cols)).collect();
    if rows.is_empty() {
        return Ok(ExactMatrix::zeros(0, cols));
    }
    ExactMatrix::from_rows(rows)
}

/// `A(t,k,v) x` computed partition by partition without materialising `A`.
pub fn apply_a(t: usize, k: usize, v: &[usize], x: &[BigRational]) -> Result<Vec<BigRational>> {
    check_shape(t, k, v)?;
    if x.len() != choose(t, k) {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for {} k-subsets",
            x.len(),
            choose(t, k)
        )));
    }
    let partitions = enumerate_partitions(t, v)?;
    Ok(partitions
        .par_iter()
        .map(|p| {
            let mut acc = BigRational::zero();
            visit_transversals(p, |s| acc += &x[colex_rank(s)]);
            acc
        })
        .collect())
}

/// Inclusion matrix: rows are h-subsets, columns k-subsets (both colex),
/// entry 1 iff the column set is contained in the row set.
pub fn build_b(t: usize, h: usize, k: usize) -> Result<ExactMatrix> {
    if !(t > h && h >= k && k >= 2) {
        return Err(Error::InvalidParameter(format!(
            "inclusion matrix needs t > h >= k >= 2, got t={t}, h={h}, k={k}"
        )));
    }
    let cols = choose(t, k);
    let rows: Vec<Vec<BigRational>> = ksubsets(t, h)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|big| {
            let mut row = vec![BigRational::zero(); cols];
            for pick in ksubsets(h, k) {
                let sub: Vec<usize> = pick.iter().map(|&i| big[i - 1]).collect();
                row[colex_rank(&sub)] = BigRational::one();
            }
            row
        })
        .collect();
    ExactMatrix::from_rows(rows)
}

/// Where an instance sits relative to what is known about the rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// The predicted rank is a theorem for these parameters.
    Proven,
    /// Balanced, k = 3, below the proven threshold t >= 12.
    Unguaranteed,
    /// Balanced with k >= 4: no explicit threshold is known.
    Empirical,
    /// Some block is smaller than k; no prediction is attached.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub t: usize,
    pub k: usize,
    pub v: Vec<usize>,
    pub row_count: usize,
    pub col_count: usize,
    pub computed_rank: usize,
    pub predicted_rank: Option<usize>,
    pub matches: Option<bool>,
    pub regime: Regime,
    pub balanced: bool,
    pub wall_time_ms: u128,
}

/// `C(t,k) - t + 1` for constant `v`, `C(t,k)` otherwise; `None` when some
/// `v_i < k` or `k < 2`.
pub fn predicted_rank(t: usize, k: usize, v: &[usize]) -> Option<usize> {
    if k < 2 || v.iter().any(|&x| x < k) {
        return None;
    }
    let full = choose(t, k);
    if v.iter().all(|&x| x == v[0]) {
        Some(full + 1 - t)
    } else {
        Some(full)
    }
}

pub fn regime(t: usize, k: usize, v: &[usize]) -> Regime {
    if predicted_rank(t, k, v).is_none() {
        return Regime::Degenerate;
    }
    let balanced = v.iter().all(|&x| x == v[0]);
    match (balanced, k) {
        (false, _) => Regime::Proven,
        (true, 2) => Regime::Proven,
        (true, 3) if t >= 12 => Regime::Proven,
        (true, 3) => Regime::Unguaranteed,
        (true, _) => Regime::Empirical,
    }
}

pub fn verify_rank_theorem(t: usize, k: usize, v: &[usize]) -> Result<RankReport> {
    let start = Instant::now();
    let a = build_a(t, k, v)?;
    let computed_rank = exact_rank(&a);
    let predicted = predicted_rank(t, k, v);
    Ok(RankReport {
        t,
        k,
        v: v.to_vec(),
        row_count: a.rows(),
        col_count: a.cols(),
        computed_rank,
        predicted_rank: predicted,
        matches: predicted.map(|p| p == computed_rank),
        regime: regime(t, k, v),
        balanced: v.iter().all(|&x| x == v[0]),
        wall_time_ms: start.elapsed().as_millis(),
    })
}
