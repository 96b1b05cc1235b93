//! Dense matrices over the rationals with exact rank, affine solving and
//! nullspace computation.
//!
//! Exact elimination runs in two stages. A pass modulo the prime
//! `2^61 - 1` selects rows that are linearly independent modulo the prime,
//! hence independent over the rationals (a non-vanishing minor mod `p` is a
//! non-zero integer). Those rows are then reduced exactly by fraction-free
//! Gauss-Jordan elimination over the integers, which yields an integral
//! nullspace basis. Finally every row of the full matrix is multiplied
//! against that basis; a row that does not vanish is added to the selection
//! and the exact stage repeats. The result is exact regardless of the prime.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{common_denominator, serde_rational_vec};

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigRational::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<BigRational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let n = rows.len();
        Ok(Self {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigRational) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [BigRational] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<BigRational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let cols = other.cols;
        let data: Vec<BigRational> = (0..self.rows)
            .into_par_iter()
            .flat_map_iter(|i| {
                let row = self.row(i);
                (0..cols).map(move |j| {
                    let mut acc = BigRational::zero();
                    for (l, a) in row.iter().enumerate() {
                        if !a.is_zero() {
                            let b = other.get(l, j);
                            if !b.is_zero() {
                                acc += a * b;
                            }
                        }
                    }
                    acc
                })
            })
            .collect();
        Ok(Self { rows: self.rows, cols, data })
    }

    pub fn mul_vec(&self, x: &[BigRational]) -> Result<Vec<BigRational>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .into_par_iter()
            .map(|i| dot(self.row(i), x))
            .collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn trace(&self) -> BigRational {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn row_sums(&self) -> Vec<BigRational> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<BigRational> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j)).sum())
            .collect()
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch("column counts differ".into()));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Each row scaled by the lcm of its denominators.
    pub fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).into_par_iter().map(|i| integerize(self.row(i))).collect()
    }
}

pub fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

fn integerize(row: &[BigRational]) -> Vec<BigInt> {
    let den = common_denominator(row);
    row.iter()
        .map(|x| {
            if x.is_zero() {
                BigInt::zero()
            } else {
                x.numer() * (&den / x.denom())
            }
        })
        .collect()
}

fn int_dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let mut acc = BigInt::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

const PRIME: u64 = (1 << 61) - 1;

fn mod_prime(x: &BigInt) -> u64 {
    if x.is_zero() {
        return 0;
    }
    let r = (x.magnitude() % PRIME).to_u64().expect("residue fits u64");
    if x.sign() == Sign::Minus && r != 0 {
        PRIME - r
    } else {
        r
    }
}

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64) -> u64 {
    pow_mod(a, PRIME - 2)
}

/// Indices of rows (in input order) forming a maximal independent set mod `PRIME`.
fn modular_independent_rows(rows: &[Vec<BigInt>], cols: usize) -> Vec<usize> {
    let residues: Vec<Vec<u64>> = rows
        .par_iter()
        .map(|r| r.iter().map(mod_prime).collect())
        .collect();
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut chosen = Vec::new();
    for (idx, row) in residues.into_iter().enumerate() {
        if basis.len() == cols {
            break;
        }
        let mut row = row;
        for (pivot, b) in &basis {
            let f = row[*pivot];
            if f != 0 {
                let neg = PRIME - f;
                for (x, &y) in row.iter_mut().zip(b) {
                    if y != 0 {
                        *x = (*x + mul_mod(neg, y)) % PRIME;
                    }
                }
            }
        }
        if let Some(pivot) = row.iter().position(|&x| x != 0) {
            let inv = inv_mod(row[pivot]);
            for x in row.iter_mut() {
                *x = mul_mod(*x, inv);
            }
            basis.push((pivot, row));
            chosen.push(idx);
        }
    }
    chosen
}

/// Result of fraction-free Gauss-Jordan on linearly independent rows.
///
/// Every pivot row `i` has `rows[i][pivot_cols[i]] == det` and zero in all
/// other pivot columns.
struct ReducedRows {
    rows: Vec<Vec<BigInt>>,
    pivot_cols: Vec<usize>,
    det: BigInt,
}

/// Fraction-free Gauss-Jordan elimination (Bareiss update applied to every
/// row, above and below the pivot). Pivot choice: the non-zero entry of the
/// current column with the fewest bits, ties broken by row position.
fn fraction_free_gauss_jordan(mut rows: Vec<Vec<BigInt>>, cols: usize) -> ReducedRows {
    let n = rows.len();
    let mut prev = BigInt::one();
    let mut pivot_cols = Vec::new();
    let mut next = 0usize;
    for c in 0..cols {
        if next == n {
            break;
        }
        let candidate = (next..n)
            .filter(|&i| !rows[i][c].is_zero())
            .min_by_key(|&i| (rows[i][c].bits(), i));
        let Some(p) = candidate else { continue };
        rows.swap(next, p);
        let (head, tail) = rows.split_at_mut(next);
        let (pivot_row, tail) = tail.split_first_mut().expect("pivot row");
        let piv = pivot_row[c].clone();
        let prev_ref = &prev;
        let pivot_ref: &Vec<BigInt> = pivot_row;
        head.par_iter_mut()
            .chain(tail.par_iter_mut())
            .for_each(|row| bareiss_update(row, pivot_ref, &piv, c, prev_ref));
        prev = piv;
        pivot_cols.push(c);
        next += 1;
    }
    rows.truncate(next);
    ReducedRows {
        rows,
        pivot_cols,
        det: prev,
    }
}

fn bareiss_update(row: &mut [BigInt], pivot_row: &[BigInt], piv: &BigInt, c: usize, prev: &BigInt) {
    let factor = std::mem::take(&mut row[c]);
    let prev_is_one = prev.is_one();
    for (j, x) in row.iter_mut().enumerate() {
        if j == c {
            continue;
        }
        let p = &pivot_row[j];
        if x.is_zero() && (factor.is_zero() || p.is_zero()) {
            continue;
        }
        let mut v = &*x * piv;
        if !factor.is_zero() && !p.is_zero() {
            v -= &factor * p;
        }
        if !prev_is_one {
            debug_assert!((&v % prev).is_zero(), "inexact fraction-free division");
            v /= prev;
        }
        *x = v;
    }
}

/// Integral nullspace basis of the reduced system restricted to the first
/// `cols` columns.
fn nullspace_from_reduced(reduced: &ReducedRows, cols: usize) -> Vec<Vec<BigInt>> {
    let mut is_pivot = vec![false; cols];
    for &c in &reduced.pivot_cols {
        if c < cols {
            is_pivot[c] = true;
        }
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![BigInt::zero(); cols];
            v[f] = reduced.det.clone();
            for (row, &pc) in reduced.rows.iter().zip(&reduced.pivot_cols) {
                if pc < cols {
                    v[pc] = -&row[f];
                }
            }
            primitive(v)
        })
        .collect()
}

fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
    v
}

/// Indices of an independent subset of `rows` spanning the whole row space.
fn spanning_rows(rows: &[Vec<BigInt>], cols: usize) -> Vec<usize> {
    let mut chosen = modular_independent_rows(rows, cols);
    loop {
        if chosen.len() == cols {
            return chosen;
        }
        let selected: Vec<Vec<BigInt>> = chosen.iter().map(|&i| rows[i].clone()).collect();
        let reduced = fraction_free_gauss_jordan(selected, cols);
        debug_assert_eq!(reduced.rows.len(), chosen.len(), "modular selection must be independent");
        let null = nullspace_from_reduced(&reduced, cols);
        let offender = rows
            .par_iter()
            .enumerate()
            .find_first(|(_, r)| null.iter().any(|n| !int_dot(r, n).is_zero()))
            .map(|(i, _)| i);
        match offender {
            None => return chosen,
            Some(i) => {
                chosen.push(i);
                chosen.sort_unstable();
            }
        }
    }
}

/// Rank of `m` over the rationals.
pub fn exact_rank(m: &ExactMatrix) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    spanning_rows(&m.integer_rows(), m.cols).len()
}

/// Rank of a list of equal-length rational vectors (as rows).
pub fn rank_of_vectors(vectors: &[Vec<BigRational>]) -> Result<usize> {
    if vectors.is_empty() {
        return Ok(0);
    }
    let m = ExactMatrix::from_rows(vectors.to_vec())?;
    Ok(exact_rank(&m))
}

/// Particular solution plus nullspace basis of `M x = b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionSpace {
    #[serde(with = "serde_rational_vec")]
    pub particular: Vec<BigRational>,
    #[serde(with = "nullspace_serde")]
    pub nullspace_basis: Vec<Vec<BigRational>>,
    pub system_rank: usize,
}

impl SolutionSpace {
    pub fn nullity(&self) -> usize {
        self.nullspace_basis.len()
    }

    /// Re-checks `M * particular == b` and `M * n == 0` by multiplication.
    pub fn verify(&self, m: &ExactMatrix, b: &[BigRational]) -> bool {
        let Ok(mx) = m.mul_vec(&self.particular) else { return false };
        if mx != b {
            return false;
        }
        self.nullspace_basis.iter().all(|n| {
            m.mul_vec(n)
                .map(|v| v.iter().all(Zero::is_zero))
                .unwrap_or(false)
        }) && self.particular.len() == m.cols()
            && self.nullity() + self.system_rank == m.cols()
    }
}

mod nullspace_serde {
    use super::*;
    use crate::rational::{format_rational, parse_rational};
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vec<BigRational>], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|row| row.iter().map(format_rational).collect::<Vec<_>>()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<BigRational>>, D::Error> {
        let raw = Vec::<Vec<String>>::deserialize(d)?;
        raw.iter()
            .map(|row| {
                row.iter()
                    .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

/// Outcome of [`solve_affine`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum AffineSolution {
    Feasible(SolutionSpace),
    /// `witness` is a left combination `y` with `y^T M = 0` and `y . b = 1`.
    Infeasible {
        #[serde(with = "serde_rational_vec")]
        witness: Vec<BigRational>,
    },
}

impl AffineSolution {
    pub fn is_feasible(&self) -> bool {
        matches!(self, AffineSolution::Feasible(_))
    }

    pub fn solution_space(&self) -> Option<&SolutionSpace> {
        match self {
            AffineSolution::Feasible(s) => Some(s),
            AffineSolution::Infeasible { .. } => None,
        }
    }
}

/// Solves `M x = b` exactly.
pub fn solve_affine(m: &ExactMatrix, b: &[BigRational]) -> Result<AffineSolution> {
    if b.len() != m.rows {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            m.rows
        )));
    }
    let n = m.cols;
    let augmented: Vec<Vec<BigInt>> = (0..m.rows)
        .into_par_iter()
        .map(|i| {
            let mut row: Vec<BigRational> = m.row(i).to_vec();
            row.push(b[i].clone());
            integerize(&row)
        })
        .collect();
    let mut chosen = modular_independent_rows(&augmented, n + 1);
    loop {
        let selected: Vec<Vec<BigInt>> = chosen.iter().map(|&i| augmented[i].clone()).collect();
        let reduced = fraction_free_gauss_jordan(selected.clone(), n + 1);
        if reduced.pivot_cols.last() == Some(&n) {
            let witness = infeasibility_witness(&selected, m, b, &chosen)?;
            return Ok(AffineSolution::Infeasible { witness });
        }
        let mut particular = vec![BigRational::zero(); n];
        for (row, &pc) in reduced.rows.iter().zip(&reduced.pivot_cols) {
            particular[pc] = BigRational::new(row[n].clone(), reduced.det.clone());
        }
        let null_int = nullspace_from_reduced(&reduced, n);
        let offender = augmented
            .par_iter()
            .enumerate()
            .find_first(|(_, r)| {
                let (lhs, rhs) = r.split_at(n);
                null_int.iter().any(|v| !int_dot(lhs, v).is_zero())
                    || dot_int_rat(lhs, &particular) != BigRational::from_integer(rhs[0].clone())
            })
            .map(|(i, _)| i);
        if let Some(i) = offender {
            chosen.push(i);
            chosen.sort_unstable();
            continue;
        }
        let nullspace_basis = null_int
            .into_iter()
            .map(|v| v.into_iter().map(BigRational::from_integer).collect())
            .collect();
        return Ok(AffineSolution::Feasible(SolutionSpace {
            particular,
            nullspace_basis,
            system_rank: chosen.len(),
        }));
    }
}

fn dot_int_rat(a: &[BigInt], x: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (ai, xi) in a.iter().zip(x) {
        if !ai.is_zero() && !xi.is_zero() {
            acc += xi * ai;
        }
    }
    acc
}

/// Finds `y` supported on the selected rows with `y^T M = 0`, `y . b = 1`.
fn infeasibility_witness(
    selected: &[Vec<BigInt>],
    m: &ExactMatrix,
    b: &[BigRational],
    chosen: &[usize],
) -> Result<Vec<BigRational>> {
    // selected[j] = s_j * [M_row | b_row]; solve sum_j z_j selected[j] = e_last,
    // then y_{chosen[j]} = z_j * s_j.
    let width = m.cols + 1;
    let mut system = ExactMatrix::zeros(width, selected.len());
    for (j, row) in selected.iter().enumerate() {
        for (i, x) in row.iter().enumerate() {
            system.set(i, j, BigRational::from_integer(x.clone()));
        }
    }
    let mut target = vec![BigRational::zero(); width];
    target[m.cols] = BigRational::one();
    let z = match solve_affine(&system, &target)? {
        AffineSolution::Feasible(space) => space.particular,
        AffineSolution::Infeasible { .. } => {
            return Err(Error::InvalidParameter("inconsistent infeasibility certificate".into()))
        }
    };
    let mut y = vec![BigRational::zero(); m.rows];
    for (j, &row_idx) in chosen.iter().enumerate() {
        let mut augmented = m.row(row_idx).to_vec();
        augmented.push(b[row_idx].clone());
        y[row_idx] = &z[j] * row_scale(&augmented, &selected[j]);
    }
    Ok(y)
}

/// Scale `s` with `integer_row = s * rational_row`.
fn row_scale(rational_row: &[BigRational], integer_row: &[BigInt]) -> BigRational {
    rational_row
        .iter()
        .zip(integer_row)
        .find(|(q, _)| !q.is_zero())
        .map(|(q, z)| BigRational::from_integer(z.clone()) / q)
        .unwrap_or_else(BigRational::one)
}

/// Maximum number of affinely independent points among `vectors`.
pub fn affine_rank(vectors: &[Vec<BigRational>]) -> Result<usize> {
    let Some(first) = vectors.first() else { return Ok(0) };
    if vectors.iter().any(|v| v.len() != first.len()) {
        return Err(Error::DimensionMismatch("vectors differ in length".into()));
    }
    let diffs: Vec<Vec<BigRational>> = vectors[1..]
        .iter()
        .map(|v| first.iter().zip(v).map(|(a, b)| a - b).collect())
        .collect();
    Ok(1 + rank_of_vectors(&diffs)?)
}

/// True iff `x` is an affine combination of `vectors`.
pub fn in_affine_span(x: &[BigRational], vectors: &[Vec<BigRational>]) -> Result<bool> {
    if vectors.is_empty() {
        return Ok(false);
    }
    let d = x.len();
    if vectors.iter().any(|v| v.len() != d) {
        return Err(Error::DimensionMismatch("vectors differ in length".into()));
    }
    let m = vectors.len();
    let mut system = ExactMatrix::zeros(d + 1, m);
    for (j, v) in vectors.iter().enumerate() {
        for (i, a) in v.iter().enumerate() {
            system.set(i, j, a.clone());
        }
        system.set(d, j, BigRational::one());
    }
    let mut rhs = x.to_vec();
    rhs.push(BigRational::one());
    Ok(solve_affine(&system, &rhs)?.is_feasible())
}

/// True iff every vector of `candidates` lies in the linear span of `span`.
pub fn in_linear_span(candidates: &[Vec<BigRational>], span: &[Vec<BigRational>]) -> Result<bool> {
    if candidates.is_empty() {
        return Ok(true);
    }
    let base = rank_of_vectors(span)?;
    let mut all = span.to_vec();
    all.extend(candidates.iter().cloned());
    Ok(rank_of_vectors(&all)? == base)
}

/// Signed magnitude helper used by reports.
pub fn max_abs(values: &[BigRational]) -> BigRational {
    values
        .iter()
        .map(|v| v.abs())
        .max()
        .unwrap_or_else(BigRational::zero)
}
