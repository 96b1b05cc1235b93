//! Weighted k-uniform hypergraphs on `[n]`, the random models `G_k(n,p)`
//! and `C_k(n,p)`, cut and induced edge weights, the type-z density
//! identity, and Monte Carlo checks of the cut property and of `D_1`.
//!
//! Randomness: every generator is driven by ChaCha8 seeded with
//! `seed_from_u64(seed)`. Stream 0 supplies edge decisions (the k-set of
//! colex rank `r` consumes the 64-bit word at position `r`, so sampling is
//! order independent), stream 1 the optional vertex shuffle, and stream
//! `2 + i` the i-th Monte Carlo trial.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{choose, ksubsets, next_colex, unrank_into};
use crate::error::{Error, Result};
use crate::rational::{int, is_probability, serde_rational, serde_rational_vec, to_f64};

const EDGE_STREAM: u64 = 0;
const SHUFFLE_STREAM: u64 = 1;
const TRIAL_STREAM_BASE: u64 = 2;
const SAMPLE_CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Indicator,
    Fractional,
}

/// Weight vector indexed by colex rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Weights {
    Indicator(Vec<bool>),
    Fractional(Vec<BigRational>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedHypergraph {
    n: usize,
    k: usize,
    weights: Weights,
}

impl WeightedHypergraph {
    fn check_len(n: usize, k: usize, len: usize) -> Result<()> {
        if k == 0 || k > n {
            return Err(Error::InvalidParameter(format!("need 1 <= k <= n, got n={n}, k={k}")));
        }
        if len != choose(n, k) {
            return Err(Error::DimensionMismatch(format!(
                "{len} weights for C({n},{k}) = {} k-sets",
                choose(n, k)
            )));
        }
        Ok(())
    }

    pub fn from_indicator(n: usize, k: usize, edges: Vec<bool>) -> Result<Self> {
        Self::check_len(n, k, edges.len())?;
        Ok(Self { n, k, weights: Weights::Indicator(edges) })
    }

    pub fn from_fractional(n: usize, k: usize, weights: Vec<BigRational>) -> Result<Self> {
        Self::check_len(n, k, weights.len())?;
        Ok(Self { n, k, weights: Weights::Fractional(weights) })
    }

    /// Indicator hypergraph with the given colex ranks as edges.
    pub fn from_edge_ranks(n: usize, k: usize, ranks: &[usize]) -> Result<Self> {
        Self::check_len(n, k, choose(n, k))?;
        let mut edges = vec![false; choose(n, k)];
        for &r in ranks {
            if r >= edges.len() {
                return Err(Error::IndexOutOfRange { index: r.to_string(), limit: edges.len().to_string() });
            }
            edges[r] = true;
        }
        Ok(Self { n, k, weights: Weights::Indicator(edges) })
    }

    pub fn empty(n: usize, k: usize) -> Result<Self> {
        Self::check_len(n, k, choose(n, k))?;
        Ok(Self { n, k, weights: Weights::Indicator(vec![false; choose(n, k)]) })
    }

    pub fn complete(n: usize, k: usize) -> Result<Self> {
        Self::check_len(n, k, choose(n, k))?;
        Ok(Self { n, k, weights: Weights::Indicator(vec![true; choose(n, k)]) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn mode(&self) -> Mode {
        match self.weights {
            Weights::Indicator(_) => Mode::Indicator,
            Weights::Fractional(_) => Mode::Fractional,
        }
    }

    pub fn len(&self) -> usize {
        choose(self.n, self.k)
    }

    pub fn is_empty(&self) -> bool {
        match &self.weights {
            Weights::Indicator(w) => !w.contains(&true),
            Weights::Fractional(w) => w.iter().all(Zero::is_zero),
        }
    }

    pub fn weight(&self, rank: usize) -> BigRational {
        match &self.weights {
            Weights::Indicator(w) => {
                if w[rank] {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }
            Weights::Fractional(w) => w[rank].clone(),
        }
    }

    /// Number of k-sets with nonzero weight.
    pub fn edge_count(&self) -> usize {
        match &self.weights {
            Weights::Indicator(w) => w.par_iter().filter(|&&e| e).count(),
            Weights::Fractional(w) => w.par_iter().filter(|x| !x.is_zero()).count(),
        }
    }

    pub fn total_weight(&self) -> BigRational {
        self.sum_weights(0..self.len(), |r, emit| emit(r))
    }

    /// Sums the weights of every rank emitted by `visit` over `items`,
    /// in parallel and exactly.
    fn sum_weights<I, F>(&self, items: I, visit: F) -> BigRational
    where
        I: IntoParallelIterator,
        F: Fn(I::Item, &mut dyn FnMut(usize)) + Sync + Send,
    {
        match &self.weights {
            Weights::Indicator(w) => {
                let count: u64 = items
                    .into_par_iter()
                    .map(|item| {
                        let mut c = 0u64;
                        visit(item, &mut |r| c += w[r] as u64);
                        c
                    })
                    .sum();
                BigRational::from_integer(BigInt::from(count))
            }
            Weights::Fractional(w) => items
                .into_par_iter()
                .map(|item| {
                    let mut acc = BigRational::zero();
                    visit(item, &mut |r| {
                        if !w[r].is_zero() {
                            acc += &w[r]
                        }
                    });
                    acc
                })
                .reduce(BigRational::zero, |a, b| a + b),
        }
    }
}

/// `C(e - 1, i + 1)` tabulated for fast colex ranking of small sets.
struct RankTable {
    n: usize,
    table: Vec<usize>,
}

impl RankTable {
    fn new(n: usize, k: usize) -> Self {
        let mut table = vec![0; k * (n + 1)];
        for i in 0..k {
            for e in 1..=n {
                table[i * (n + 1) + e] = choose(e - 1, i + 1);
            }
        }
        Self { n, table }
    }

    fn rank(&self, sorted: &[usize]) -> usize {
        sorted.iter().enumerate().map(|(i, &e)| self.table[i * (self.n + 1) + e]).sum()
    }
}

fn validate_vertex_set(n: usize, set: &[usize]) -> Result<Vec<usize>> {
    let mut s = set.to_vec();
    s.sort_unstable();
    if s.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::MalformedSubset(format!("repeated vertex in {set:?}")));
    }
    if let Some(&bad) = s.iter().find(|&&v| v == 0 || v > n) {
        return Err(Error::IndexOutOfRange { index: bad.to_string(), limit: n.to_string() });
    }
    Ok(s)
}

/// Checks that the classes are disjoint subsets of `[n]`; returns them sorted.
fn validate_classes(n: usize, classes: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    let mut seen = vec![false; n + 1];
    let mut out = Vec::with_capacity(classes.len());
    for c in classes {
        let c = validate_vertex_set(n, c)?;
        for &v in &c {
            if seen[v] {
                return Err(Error::MalformedSubset(format!("vertex {v} lies in two classes")));
            }
            seen[v] = true;
        }
        out.push(c);
    }
    Ok(out)
}

/// Partition of `[n]` into classes `V_1..V_r`, with `alpha_i = |V_i| / n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutSpec {
    n: usize,
    classes: Vec<Vec<usize>>,
    #[serde(with = "serde_rational_vec")]
    alpha: Vec<BigRational>,
}

impl CutSpec {
    pub fn new(n: usize, classes: Vec<Vec<usize>>) -> Result<Self> {
        let classes = validate_classes(n, &classes)?;
        let covered: usize = classes.iter().map(Vec::len).sum();
        if covered != n {
            return Err(Error::MalformedSubset(format!("classes cover {covered} of {n} vertices")));
        }
        if classes.iter().any(Vec::is_empty) {
            return Err(Error::InvalidSizes("empty class".into()));
        }
        let alpha = classes.iter().map(|c| BigRational::new(c.len().into(), n.into())).collect();
        Ok(Self { n, classes, alpha })
    }

    /// Classes of consecutive vertices with the given sizes.
    pub fn consecutive(n: usize, sizes: &[usize]) -> Result<Self> {
        if sizes.iter().sum::<usize>() != n {
            return Err(Error::SizeVectorSum { t: n, sizes: sizes.to_vec() });
        }
        let mut next = 1;
        let classes = sizes
            .iter()
            .map(|&s| {
                let c: Vec<usize> = (next..next + s).collect();
                next += s;
                c
            })
            .collect();
        Self::new(n, classes)
    }

    /// `t` equal classes `{1..n/t}, {n/t+1..2n/t}, ...`.
    pub fn equipartition(n: usize, t: usize) -> Result<Self> {
        if t == 0 || !n.is_multiple_of(t) {
            return Err(Error::NotDivisible { t: n, k: t });
        }
        Self::consecutive(n, &vec![n / t; t])
    }

    /// Uniformly random partition with the given class sizes.
    pub fn random<R: RngCore>(n: usize, sizes: &[usize], rng: &mut R) -> Result<Self> {
        if sizes.iter().sum::<usize>() != n {
            return Err(Error::SizeVectorSum { t: n, sizes: sizes.to_vec() });
        }
        let mut perm: Vec<usize> = (1..=n).collect();
        perm.shuffle(rng);
        let mut rest = &perm[..];
        let classes = sizes
            .iter()
            .map(|&s| {
                let (head, tail) = rest.split_at(s);
                rest = tail;
                head.to_vec()
            })
            .collect();
        Self::new(n, classes)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn alpha(&self) -> &[BigRational] {
        &self.alpha
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }
}

/// Class sizes `alpha_i n`, which must be positive integers summing to `n`.
pub fn sizes_from_alpha(n: usize, alpha: &[BigRational]) -> Result<Vec<usize>> {
    let sizes = alpha
        .iter()
        .map(|a| {
            let s = a * int(n as i64);
            if !s.is_integer() || !s.is_positive() {
                return Err(Error::InvalidSizes(format!("alpha_i n = {s} is not a positive integer")));
            }
            Ok(s.to_integer().to_usize().unwrap_or(usize::MAX))
        })
        .collect::<Result<Vec<_>>>()?;
    if sizes.iter().sum::<usize>() != n {
        return Err(Error::SizeVectorSum { t: n, sizes });
    }
    Ok(sizes)
}

/// Calls `emit` with the colex rank of every k-set taking exactly one vertex
/// from each of `classes`, whose first vertex is `v0` (from `classes[0]`).
fn for_each_transversal(classes: &[&[usize]], v0: usize, table: &RankTable, emit: &mut dyn FnMut(usize)) {
    let k = classes.len();
    if classes[1..].iter().any(|c| c.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; k];
    let mut sorted = vec![0usize; k];
    loop {
        sorted[0] = v0;
        for i in 1..k {
            sorted[i] = classes[i][idx[i]];
        }
        sorted.sort_unstable();
        emit(table.rank(&sorted));
        let mut pos = k - 1;
        loop {
            if pos == 0 {
                return;
            }
            idx[pos] += 1;
            if idx[pos] < classes[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos -= 1;
        }
    }
}

/// `e(U)`: total weight of the k-sets inside `u`.
pub fn edge_weight_within(h: &WeightedHypergraph, u: &[usize]) -> Result<BigRational> {
    let u = validate_vertex_set(h.n, u)?;
    let k = h.k;
    if u.len() < k {
        return Ok(BigRational::zero());
    }
    let table = RankTable::new(h.n, k);
    // split by the position of the largest element; the rest is a
    // (k-1)-subset of the earlier positions
    Ok(h.sum_weights((k - 1)..u.len(), |top, emit| {
        let mut pick: Vec<usize> = (1..k).collect();
        let mut set = vec![0usize; k];
        set[k - 1] = u[top];
        loop {
            for (slot, &p) in set.iter_mut().zip(&pick) {
                *slot = u[p - 1];
            }
            emit(table.rank(&set));
            if !next_colex(&mut pick, top) {
                break;
            }
        }
    }))
}

/// Total weight of the k-sets with one vertex in each of `classes`
/// (`classes.len() == k`; the classes must be disjoint).
fn transversal_weight(h: &WeightedHypergraph, classes: &[&[usize]], table: &RankTable) -> BigRational {
    h.sum_weights(classes[0].to_vec(), |v0, emit| for_each_transversal(classes, v0, table, emit))
}

/// `e(V_1, ..., V_r)`: weight of the k-sets whose vertices lie in k distinct
/// classes. Classes must be disjoint subsets of `[n]` but need not cover it.
pub fn crossing_weight(h: &WeightedHypergraph, classes: &[Vec<usize>]) -> Result<BigRational> {
    let classes = validate_classes(h.n, classes)?;
    let r = classes.len();
    let table = RankTable::new(h.n, h.k);
    let mut total = BigRational::zero();
    for pick in ksubsets(r, h.k) {
        let chosen: Vec<&[usize]> = pick.iter().map(|&i| classes[i - 1].as_slice()).collect();
        total += transversal_weight(h, &chosen, &table);
    }
    Ok(total)
}

pub fn cut_weight(h: &WeightedHypergraph, cut: &CutSpec) -> Result<BigRational> {
    if cut.n != h.n {
        return Err(Error::DimensionMismatch(format!("cut on {} vertices, hypergraph on {}", cut.n, h.n)));
    }
    crossing_weight(h, &cut.classes)
}

/// `sum_{S nonempty} (-1)^(k - |S|) e(union_{i in S} V_i)` over exactly `k`
/// disjoint classes; equals [`crossing_weight`] of the same classes.
pub fn inclusion_exclusion_cut(h: &WeightedHypergraph, classes: &[Vec<usize>]) -> Result<BigRational> {
    let k = h.k;
    if classes.len() != k {
        return Err(Error::InvalidParameter(format!("need exactly {k} classes, got {}", classes.len())));
    }
    let classes = validate_classes(h.n, classes)?;
    let mut total = BigRational::zero();
    for mask in 1u32..(1 << k) {
        let union: Vec<usize> = (0..k)
            .filter(|i| mask & (1 << i) != 0)
            .flat_map(|i| classes[i].iter().copied())
            .collect();
        let e = edge_weight_within(h, &union)?;
        if (k - mask.count_ones() as usize).is_multiple_of(2) {
            total += e;
        } else {
            total -= e;
        }
    }
    Ok(total)
}

/// `ceil(p * 2^64)`: a 64-bit word `w` decides an edge iff `w < threshold`,
/// which happens with probability exactly `threshold / 2^64`.
fn threshold(p: &BigRational) -> u128 {
    let scaled = p * BigRational::from_integer(BigInt::one() << 64);
    scaled.ceil().to_integer().to_u128().unwrap_or(u128::MAX)
}

fn check_probability(p: &BigRational, max: &BigRational) -> Result<()> {
    if !is_probability(p) || p > max {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, {max}]")));
    }
    Ok(())
}

/// Fills an indicator vector in colex order, calling `decide(set, word)`
/// with each k-set and its edge word.
fn sample_indicator<F>(n: usize, k: usize, seed: u64, decide: F) -> Vec<bool>
where
    F: Fn(&[usize], u64) -> bool + Sync,
{
    let mut out = vec![false; choose(n, k)];
    out.par_chunks_mut(SAMPLE_CHUNK).enumerate().for_each(|(c, slice)| {
        let start = c * SAMPLE_CHUNK;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(EDGE_STREAM);
        rng.set_word_pos(2 * start as u128);
        let mut set = vec![0usize; k];
        unrank_into(start, k, n, &mut set);
        for (i, slot) in slice.iter_mut().enumerate() {
            if i > 0 {
                next_colex(&mut set, n);
            }
            *slot = decide(&set, rng.next_u64());
        }
    });
    out
}

/// `G_k(n,p)`: every k-set is an edge independently with probability `p`.
pub fn sample_gnp(n: usize, k: usize, p: &BigRational, seed: u64) -> Result<WeightedHypergraph> {
    check_probability(p, &BigRational::one())?;
    WeightedHypergraph::check_len(n, k, choose(n, k))?;
    let th = threshold(p);
    let edges = sample_indicator(n, k, seed, |_, w| (w as u128) < th);
    WeightedHypergraph::from_indicator(n, k, edges)
}

/// The planted halves of `C_k(n,p)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl Bipartition {
    /// `A` given explicitly; `B` is its complement in `[n]`.
    pub fn from_a(n: usize, a: &[usize]) -> Result<Self> {
        let a = validate_vertex_set(n, a)?;
        if !n.is_multiple_of(2) || a.len() != n / 2 {
            return Err(Error::InvalidParameter(format!("|A| = {} but n/2 = {}/2", a.len(), n)));
        }
        let mut in_a = vec![false; n + 1];
        a.iter().for_each(|&v| in_a[v] = true);
        let b = (1..=n).filter(|&v| !in_a[v]).collect();
        Ok(Self { a, b })
    }

    fn membership(&self, n: usize) -> Vec<bool> {
        let mut in_a = vec![false; n + 1];
        self.a.iter().for_each(|&v| in_a[v] = true);
        in_a
    }
}

fn planted_probabilities(k: usize, p: &BigRational) -> Vec<BigRational> {
    (0..=k).map(|j| p * BigRational::new(BigInt::from(2 * j), BigInt::from(k))).collect()
}

fn check_ckp(n: usize, k: usize, p: &BigRational) -> Result<()> {
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("n = {n} must be even")));
    }
    check_probability(p, &BigRational::new(1.into(), 2.into()))?;
    WeightedHypergraph::check_len(n, k, choose(n, k))
}

/// `C_k(n,p)`: a k-set with `j` vertices in `A` is an edge with probability
/// `2pj/k`. Without `shuffle`, `A = {1..n/2}`; with it, `A` is the image of
/// that set under a seeded uniform permutation.
pub fn sample_ckp(n: usize, k: usize, p: &BigRational, seed: u64, shuffle: bool) -> Result<(WeightedHypergraph, Bipartition)> {
    check_ckp(n, k, p)?;
    let a: Vec<usize> = if shuffle {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(SHUFFLE_STREAM);
        let mut perm: Vec<usize> = (1..=n).collect();
        perm.shuffle(&mut rng);
        perm[..n / 2].to_vec()
    } else {
        (1..=n / 2).collect()
    };
    let parts = Bipartition::from_a(n, &a)?;
    let in_a = parts.membership(n);
    let thresholds: Vec<u128> = planted_probabilities(k, p).iter().map(threshold).collect();
    let edges = sample_indicator(n, k, seed, |set, w| {
        let j = set.iter().filter(|&&v| in_a[v]).count();
        (w as u128) < thresholds[j]
    });
    Ok((WeightedHypergraph::from_indicator(n, k, edges)?, parts))
}

/// The expectation of `C_k(n,p)` for the planted set `a`: weight `2pj/k`
/// on every k-set with `j` vertices in `a`.
pub fn exact_ckp_weights(n: usize, k: usize, p: &BigRational, a: &[usize]) -> Result<WeightedHypergraph> {
    check_ckp(n, k, p)?;
    let in_a = Bipartition::from_a(n, a)?.membership(n);
    let probs = planted_probabilities(k, p);
    let weights = ksubsets(n, k)
        .map(|s| probs[s.iter().filter(|&&v| in_a[v]).count()].clone())
        .collect();
    WeightedHypergraph::from_fractional(n, k, weights)
}

/// `(z_1, ..., z_r)`, positive with `sum z_i = r/2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeZVector {
    #[serde(with = "serde_rational_vec")]
    z: Vec<BigRational>,
}

impl TypeZVector {
    pub fn new(z: Vec<BigRational>) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::InvalidParameter("empty type vector".into()));
        }
        if z.iter().any(|x| !x.is_positive()) {
            return Err(Error::InvalidParameter("type vector entries must be positive".into()));
        }
        let sum: BigRational = z.iter().sum();
        if sum != BigRational::new(z.len().into(), 2.into()) {
            return Err(Error::InvalidParameter(format!("type vector sums to {sum}, not r/2")));
        }
        Ok(Self { z })
    }

    pub fn r(&self) -> usize {
        self.z.len()
    }

    pub fn values(&self) -> &[BigRational] {
        &self.z
    }
}

fn masks_of_size(r: usize, size: usize) -> impl Iterator<Item = u32> {
    (0u32..(1 << r)).filter(move |m| m.count_ones() as usize == size)
}

fn check_rk(r: usize, k: usize, z_len: usize) -> Result<()> {
    if k == 0 || r < k || r > 20 {
        return Err(Error::InvalidParameter(format!("need 1 <= k <= r <= 20, got r={r}, k={k}")));
    }
    if z_len != r {
        return Err(Error::DimensionMismatch(format!("type vector of length {z_len} for r = {r}")));
    }
    Ok(())
}

/// `s_{r,k,j} = sum_{K in C([r],k)} sum_{J in C(K,j)} prod_J z prod_{K-J} (1 - z)`.
pub fn s_rkj(r: usize, k: usize, j: usize, z: &TypeZVector) -> Result<BigRational> {
    check_rk(r, k, z.r())?;
    if j > k {
        return Ok(BigRational::zero());
    }
    let one = BigRational::one();
    let mut total = BigRational::zero();
    for kmask in masks_of_size(r, k) {
        for jmask in masks_of_size(r, j).filter(|m| m & !kmask == 0) {
            let mut term = BigRational::one();
            for (i, zi) in z.z.iter().enumerate() {
                if jmask & (1 << i) != 0 {
                    term *= zi;
                } else if kmask & (1 << i) != 0 {
                    term *= &one - zi;
                }
            }
            total += term;
        }
    }
    Ok(total)
}

/// Expected crossing density of a type-z balanced r-cut of `C_k(n,p)`:
/// `(1 / C(r,k)) sum_j (2pj/k) s_{r,k,j}`.
pub fn type_z_density(r: usize, k: usize, p: &BigRational, z: &TypeZVector) -> Result<BigRational> {
    check_rk(r, k, z.r())?;
    let mut total = BigRational::zero();
    for j in 1..=k {
        total += BigRational::new(BigInt::from(2 * j), BigInt::from(k)) * s_rkj(r, k, j, z)?;
    }
    Ok(total * p / int(choose(r, k) as i64))
}

const MONOMIAL_MAX_R: usize = 7;

/// `sum_j (2j/k) s_{r,k,j}` expanded as a multilinear polynomial in
/// `z_1..z_r`; multiply by `p` for the density numerator. Keys are bitmasks
/// of the variables in each monomial (bit `i` is `z_{i+1}`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialExpansion {
    pub r: usize,
    pub k: usize,
    pub coefficients: BTreeMap<u32, BigRational>,
}

impl MonomialExpansion {
    /// Coefficient of `prod_{i in vars} z_i` (1-based indices).
    pub fn coefficient(&self, vars: &[usize]) -> BigRational {
        let mask = vars.iter().fold(0u32, |m, &i| m | (1 << (i - 1)));
        self.coefficients.get(&mask).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Nonzero monomials as (1-based variable list, coefficient).
    pub fn terms(&self) -> Vec<(Vec<usize>, BigRational)> {
        self.coefficients
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(&m, c)| ((0..self.r).filter(|i| m & (1 << i) != 0).map(|i| i + 1).collect(), c.clone()))
            .collect()
    }

    /// True iff every monomial of degree at least 2 has coefficient 0.
    pub fn higher_terms_vanish(&self) -> bool {
        self.coefficients.iter().all(|(m, c)| m.count_ones() < 2 || c.is_zero())
    }

    /// `p` times the polynomial evaluated at `z`.
    pub fn evaluate(&self, z: &[BigRational], p: &BigRational) -> BigRational {
        let mut total = BigRational::zero();
        for (&m, c) in &self.coefficients {
            let mut term = c.clone();
            for (i, zi) in z.iter().enumerate() {
                if m & (1 << i) != 0 {
                    term *= zi;
                }
            }
            total += term;
        }
        total * p
    }
}

pub fn monomial_coefficients(r: usize, k: usize) -> Result<MonomialExpansion> {
    if k < 2 || r < k {
        return Err(Error::InvalidParameter(format!("need r >= k >= 2, got r={r}, k={k}")));
    }
    if r > MONOMIAL_MAX_R {
        return Err(Error::TooLarge(format!("r = {r} exceeds the expansion limit {MONOMIAL_MAX_R}")));
    }
    let mut coefficients: BTreeMap<u32, BigRational> = BTreeMap::new();
    for kmask in masks_of_size(r, k) {
        // J ranges over nonempty subsets of K; prod_{K-J} (1 - z) expands over L
        let mut jmask = kmask;
        while jmask != 0 {
            let weight = BigRational::new(BigInt::from(2 * jmask.count_ones()), BigInt::from(k));
            let rest = kmask & !jmask;
            let mut lmask = rest;
            loop {
                let sign = if lmask.count_ones() % 2 == 0 { weight.clone() } else { -weight.clone() };
                *coefficients.entry(jmask | lmask).or_insert_with(BigRational::zero) += sign;
                if lmask == 0 {
                    break;
                }
                lmask = (lmask - 1) & rest;
            }
            jmask = (jmask - 1) & kmask;
        }
    }
    Ok(MonomialExpansion { r, k, coefficients })
}

/// Model used for the per-edge Bernoulli variances of Monte Carlo checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceModel {
    /// Every k-set an edge with probability `p`.
    Uniform,
    /// `C_k(n,p)` with the given planted set `A`.
    Planted(Vec<usize>),
}

impl VarianceModel {
    fn label(&self, h: &WeightedHypergraph) -> &'static str {
        match (h.mode(), self) {
            (Mode::Fractional, _) => "exact",
            (_, VarianceModel::Uniform) => "uniform",
            (_, VarianceModel::Planted(_)) => "planted",
        }
    }
}

/// Number of k-sets counted by `groups`, split by how many of their vertices
/// lie in `A`: `groups` lists `(a_i, b_i)` = (in-A, outside-A) sizes; a
/// k-set takes one vertex from each of k distinct groups. Index = j.
fn transversal_profile(groups: &[(usize, usize)], k: usize) -> Vec<BigInt> {
    // dp[m][j]: ways to pick m groups with j in-A vertices
    let mut dp = vec![vec![BigInt::zero(); k + 1]; k + 1];
    dp[0][0] = BigInt::one();
    for &(a, b) in groups {
        for m in (0..k).rev() {
            for j in (0..=m).rev() {
                if dp[m][j].is_zero() {
                    continue;
                }
                let cur = dp[m][j].clone();
                dp[m + 1][j + 1] += &cur * a;
                dp[m + 1][j] += cur * b;
            }
        }
    }
    dp.swap_remove(k)
}

/// Profile of the k-subsets of a set with `a` vertices in `A` and `b` outside.
fn subset_profile(a: usize, b: usize, k: usize) -> Vec<BigInt> {
    (0..=k)
        .map(|j| BigInt::from(crate::combinatorics::binomial(a as u64, j as i64) * crate::combinatorics::binomial(b as u64, (k - j) as i64)))
        .collect()
}

/// `(mean, variance)` of a sum of independent edges with the given profile.
fn profile_moments(profile: &[BigInt], k: usize, p: &BigRational, planted: bool) -> (BigRational, BigRational) {
    let one = BigRational::one();
    let probs = if planted { planted_probabilities(k, p) } else { vec![p.clone(); k + 1] };
    let mut mean = BigRational::zero();
    let mut var = BigRational::zero();
    for (count, q) in profile.iter().zip(&probs) {
        let c = BigRational::from_integer(count.clone());
        mean += &c * q;
        var += c * q * (&one - q);
    }
    (mean, var)
}

fn groups_for(classes: &[&[usize]], in_a: Option<&[bool]>) -> Vec<(usize, usize)> {
    classes
        .iter()
        .map(|c| match in_a {
            Some(m) => {
                let a = c.iter().filter(|&&v| m[v]).count();
                (a, c.len() - a)
            }
            None => (0, c.len()),
        })
        .collect()
}

fn z_score(deviation: &BigRational, variance: &BigRational) -> f64 {
    if variance.is_zero() {
        if deviation.is_zero() {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        to_f64(&deviation.abs()) / to_f64(variance).sqrt()
    }
}

/// `|deviation| <= tolerance * sqrt(variance)`, decided exactly by squaring.
fn within(deviation: &BigRational, variance: &BigRational, tolerance: &BigRational) -> bool {
    deviation * deviation <= tolerance * tolerance * variance
}

fn norm(h: &WeightedHypergraph) -> BigRational {
    BigRational::from_integer(num_traits::pow(BigInt::from(h.n), h.k))
}

/// One inspected cut.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutTrial {
    pub index: usize,
    #[serde(with = "serde_rational")]
    pub weight: BigRational,
    #[serde(with = "serde_rational")]
    pub deviation: BigRational,
    #[serde(with = "serde_rational")]
    pub variance: BigRational,
    pub normalized_deviation: f64,
    pub z_score: f64,
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutCheckReport {
    pub n: usize,
    pub k: usize,
    #[serde(with = "serde_rational")]
    pub p: BigRational,
    #[serde(with = "serde_rational_vec")]
    pub alpha: Vec<BigRational>,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    #[serde(with = "serde_rational")]
    pub tolerance: BigRational,
    pub variance_model: String,
    /// `p * e_k(sizes)`, i.e. `p n^k sum_{|S|=k} prod_{i in S} alpha_i`.
    #[serde(with = "serde_rational")]
    pub target: BigRational,
    #[serde(with = "serde_rational")]
    pub max_abs_deviation: BigRational,
    pub max_normalized_deviation: f64,
    pub mean_normalized_deviation: f64,
    pub max_z: f64,
    pub failures: usize,
    pub passed: bool,
    pub results: Vec<CutTrial>,
}

/// Weight of `cut` against the target `p e_k(sizes)` with its variance.
pub fn evaluate_cut(
    h: &WeightedHypergraph,
    p: &BigRational,
    cut: &CutSpec,
    tolerance: &BigRational,
    model: &VarianceModel,
) -> Result<CutTrial> {
    let weight = cut_weight(h, cut)?;
    let classes: Vec<&[usize]> = cut.classes.iter().map(Vec::as_slice).collect();
    let uniform = transversal_profile(&groups_for(&classes, None), h.k);
    let target = p * BigRational::from_integer(uniform[0].clone());
    let variance = match (h.mode(), model) {
        (Mode::Fractional, _) => BigRational::zero(),
        (_, VarianceModel::Uniform) => profile_moments(&uniform, h.k, p, false).1,
        (_, VarianceModel::Planted(a)) => {
            let in_a = Bipartition::from_a(h.n, a)?.membership(h.n);
            let profile = transversal_profile(&groups_for(&classes, Some(&in_a)), h.k);
            profile_moments(&profile, h.k, p, true).1
        }
    };
    let deviation = &weight - &target;
    Ok(CutTrial {
        index: 0,
        normalized_deviation: to_f64(&(&deviation / norm(h))),
        z_score: z_score(&deviation, &variance),
        within: within(&deviation, &variance, tolerance),
        weight,
        deviation,
        variance,
    })
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(TRIAL_STREAM_BASE + trial as u64);
    rng
}

/// Samples `trials` uniform cuts of shape `alpha` and compares each cut
/// weight with `p e_k(alpha n)`, passing a cut when its deviation is at most
/// `tolerance` standard deviations under `model`.
pub fn check_p_alpha(
    h: &WeightedHypergraph,
    p: &BigRational,
    alpha: &[BigRational],
    trials: usize,
    seed: u64,
    tolerance: &BigRational,
    model: &VarianceModel,
) -> Result<CutCheckReport> {
    check_probability(p, &BigRational::one())?;
    let sizes = sizes_from_alpha(h.n, alpha)?;
    if sizes.len() < h.k {
        return Err(Error::InvalidParameter(format!("{} classes cannot carry a {}-set", sizes.len(), h.k)));
    }
    let results = (0..trials)
        .map(|i| {
            let cut = CutSpec::random(h.n, &sizes, &mut trial_rng(seed, i))?;
            let mut trial = evaluate_cut(h, p, &cut, tolerance, model)?;
            trial.index = i;
            Ok(trial)
        })
        .collect::<Result<Vec<_>>>()?;
    let target = {
        let groups: Vec<(usize, usize)> = sizes.iter().map(|&s| (0, s)).collect();
        p * BigRational::from_integer(transversal_profile(&groups, h.k)[0].clone())
    };
    let max_abs_deviation = results.iter().map(|t| t.deviation.abs()).max().unwrap_or_else(BigRational::zero);
    let failures = results.iter().filter(|t| !t.within).count();
    Ok(CutCheckReport {
        n: h.n,
        k: h.k,
        p: p.clone(),
        alpha: alpha.to_vec(),
        sizes,
        trials,
        seed,
        tolerance: tolerance.clone(),
        variance_model: model.label(h).to_string(),
        target,
        max_normalized_deviation: to_f64(&(&max_abs_deviation / norm(h))),
        max_abs_deviation,
        mean_normalized_deviation: if trials == 0 {
            0.0
        } else {
            results.iter().map(|t| t.normalized_deviation.abs()).sum::<f64>() / trials as f64
        },
        max_z: results.iter().map(|t| t.z_score).fold(0.0, f64::max),
        failures,
        passed: failures == 0,
        results,
    })
}

/// `e(U)` for one vertex set against the quasi-random target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct D1Sample {
    pub size: usize,
    #[serde(with = "serde_rational")]
    pub edge_weight: BigRational,
    /// `p C(|U|, k)`: the exact mean of `e(U)` in `G_k(n,p)`; the centre of the test.
    #[serde(with = "serde_rational")]
    pub expected: BigRational,
    /// `p |U|^k / k!`: the asymptotic form; reported, not tested.
    #[serde(with = "serde_rational")]
    pub asymptotic_target: BigRational,
    #[serde(with = "serde_rational")]
    pub deviation: BigRational,
    #[serde(with = "serde_rational")]
    pub asymptotic_deviation: BigRational,
    #[serde(with = "serde_rational")]
    pub variance: BigRational,
    pub normalized_deviation: f64,
    pub z_score: f64,
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct D1Report {
    pub n: usize,
    pub k: usize,
    #[serde(with = "serde_rational")]
    pub p: BigRational,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    #[serde(with = "serde_rational")]
    pub tolerance: BigRational,
    pub variance_model: String,
    pub max_normalized_deviation: f64,
    pub max_z: f64,
    pub failures: usize,
    pub passed: bool,
    pub samples: Vec<D1Sample>,
}

pub fn d1_deviation(
    h: &WeightedHypergraph,
    p: &BigRational,
    u: &[usize],
    tolerance: &BigRational,
    model: &VarianceModel,
) -> Result<D1Sample> {
    let u = validate_vertex_set(h.n, u)?;
    let k = h.k;
    let edge_weight = edge_weight_within(h, &u)?;
    let expected = p * BigRational::from_integer(BigInt::from(crate::combinatorics::binomial(u.len() as u64, k as i64)));
    let asymptotic_target = p * BigRational::new(
        num_traits::pow(BigInt::from(u.len()), k),
        BigInt::from(crate::combinatorics::factorial(k as u64)),
    );
    let variance = match (h.mode(), model) {
        (Mode::Fractional, _) => BigRational::zero(),
        (_, VarianceModel::Uniform) => profile_moments(&subset_profile(0, u.len(), k), k, p, false).1,
        (_, VarianceModel::Planted(a)) => {
            let in_a = Bipartition::from_a(h.n, a)?.membership(h.n);
            let inside = u.iter().filter(|&&v| in_a[v]).count();
            profile_moments(&subset_profile(inside, u.len() - inside, k), k, p, true).1
        }
    };
    let deviation = &edge_weight - &expected;
    Ok(D1Sample {
        size: u.len(),
        asymptotic_deviation: &edge_weight - &asymptotic_target,
        normalized_deviation: to_f64(&(&deviation / norm(h))),
        z_score: z_score(&deviation, &variance),
        within: within(&deviation, &variance, tolerance),
        edge_weight,
        expected,
        asymptotic_target,
        deviation,
        variance,
    })
}

/// Samples `trials` uniform vertex sets of each size and tests `e(U)`.
pub fn check_d1(
    h: &WeightedHypergraph,
    p: &BigRational,
    sizes: &[usize],
    trials: usize,
    seed: u64,
    tolerance: &BigRational,
    model: &VarianceModel,
) -> Result<D1Report> {
    check_probability(p, &BigRational::one())?;
    if let Some(&bad) = sizes.iter().find(|&&s| s == 0 || s > h.n) {
        return Err(Error::InvalidParameter(format!("set size {bad} outside 1..={}", h.n)));
    }
    let mut samples = Vec::with_capacity(sizes.len() * trials);
    for (si, &size) in sizes.iter().enumerate() {
        for i in 0..trials {
            let mut rng = trial_rng(seed, si * trials + i);
            let mut perm: Vec<usize> = (1..=h.n).collect();
            perm.shuffle(&mut rng);
            samples.push(d1_deviation(h, p, &perm[..size], tolerance, model)?);
        }
    }
    let failures = samples.iter().filter(|s| !s.within).count();
    Ok(D1Report {
        n: h.n,
        k: h.k,
        p: p.clone(),
        sizes: sizes.to_vec(),
        trials,
        seed,
        tolerance: tolerance.clone(),
        variance_model: model.label(h).to_string(),
        max_normalized_deviation: samples.iter().map(|s| s.normalized_deviation.abs()).fold(0.0, f64::max),
        max_z: samples.iter().map(|s| s.z_score).fold(0.0, f64::max),
        failures,
        passed: failures == 0,
        samples,
    })
}
