//! Solutions of the fractional balanced-cut system `A x = p (t/k)^k 1`:
//! the uniform vector `u`, the planted vectors `v(A)`, the exact solution
//! space and the check that it is the affine span of those vectors; density
//! vectors of hypergraph equipartitions, quotient graphs and the cut norm.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{choose, colex_rank, enumerate_partitions, ksubsets, partition_count, visit_partitions, visit_transversals};
use crate::error::{Error, Result};
use crate::hypergraph::{crossing_weight, cut_weight, CutSpec, WeightedHypergraph};
use crate::intersection::{balanced_sizes, build_a};
use crate::linalg::{in_linear_span, rank_of_vectors, solve_affine, AffineSolution, SolutionSpace};
use crate::rational::{common_denominator, int, is_probability, serde_rational, serde_rational_vec};

/// How a solution vector was produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    UniformP,
    Planted { a: Vec<usize> },
    General,
}

/// Vector on the colex-ordered k-subsets of `[t]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionVector {
    pub t: usize,
    pub k: usize,
    #[serde(with = "serde_rational")]
    pub p: BigRational,
    #[serde(with = "serde_rational_vec")]
    pub entries: Vec<BigRational>,
    pub provenance: Provenance,
}

impl SolutionVector {
    pub fn general(t: usize, k: usize, p: BigRational, entries: Vec<BigRational>) -> Result<Self> {
        if entries.len() != choose(t, k) {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for C({t},{k}) = {}",
                entries.len(),
                choose(t, k)
            )));
        }
        Ok(Self { t, k, p, entries, provenance: Provenance::General })
    }

    /// All entries in `[0, 1]`, i.e. realisable as edge probabilities.
    pub fn is_realizable(&self) -> bool {
        self.entries.iter().all(is_probability)
    }
}

pub fn make_u(t: usize, k: usize, p: &BigRational) -> SolutionVector {
    SolutionVector {
        t,
        k,
        p: p.clone(),
        entries: vec![p.clone(); choose(t, k)],
        provenance: Provenance::UniformP,
    }
}

/// Entry of `S` is `2pj/k` with `j = |S ∩ A|`.
pub fn make_v(t: usize, k: usize, p: &BigRational, a: &[usize]) -> Result<SolutionVector> {
    let mut a = a.to_vec();
    a.sort_unstable();
    a.dedup();
    if !t.is_multiple_of(2) || a.len() != t / 2 || a.iter().any(|&x| x == 0 || x > t) {
        return Err(Error::InvalidParameter(format!("need t even and A a (t/2)-subset of [t], got t={t}, A={a:?}")));
    }
    let mut in_a = vec![false; t + 1];
    a.iter().for_each(|&x| in_a[x] = true);
    let entries = ksubsets(t, k)
        .map(|s| {
            let j = s.iter().filter(|&&x| in_a[x]).count();
            p * BigRational::new(BigInt::from(2 * j), BigInt::from(k))
        })
        .collect();
    Ok(SolutionVector { t, k, p: p.clone(), entries, provenance: Provenance::Planted { a } })
}

fn balanced_rhs(t: usize, k: usize, p: &BigRational) -> BigRational {
    p * BigRational::from_integer(num_traits::pow(BigInt::from(t / k), k))
}

/// The balanced system in sparse form: for each balanced partition of `[t]`
/// the colex columns of its transversals.
pub struct BalancedSystem {
    t: usize,
    k: usize,
    rows: Vec<Vec<u32>>,
}

impl BalancedSystem {
    pub fn new(t: usize, k: usize) -> Result<Self> {
        let sizes = balanced_sizes(t, k)?;
        let mut rows = Vec::new();
        visit_partitions(t, &sizes, |p| {
            let mut cols = Vec::with_capacity((t / k).pow(k as u32));
            visit_transversals(p, |s| cols.push(colex_rank(s) as u32));
            rows.push(cols);
        })?;
        Ok(Self { t, k, rows })
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// `p (t/k)^k`, the common right-hand side.
    pub fn rhs(&self, p: &BigRational) -> BigRational {
        balanced_rhs(self.t, self.k, p)
    }

    /// `A x`, exact; uses machine integers after clearing denominators when
    /// the scaled entries are small enough.
    pub fn apply(&self, x: &[BigRational]) -> Result<Vec<BigRational>> {
        if x.len() != choose(self.t, self.k) {
            return Err(Error::DimensionMismatch(format!("vector of length {} for {} columns", x.len(), choose(self.t, self.k))));
        }
        let den = common_denominator(x);
        let scaled: Vec<BigInt> = x.iter().map(|v| v.numer() * (&den / v.denom())).collect();
        let per_row = self.rows.first().map_or(0, Vec::len) as i64;
        let small: Option<Vec<i64>> = scaled.iter().map(|v| v.to_i64().filter(|a| a.abs() <= i64::MAX / per_row.max(1) / 2)).collect();
        let sums: Vec<BigInt> = match small {
            Some(ints) => self.rows.par_iter().map(|cols| BigInt::from(cols.iter().map(|&c| ints[c as usize]).sum::<i64>())).collect(),
            None => self.rows.par_iter().map(|cols| cols.iter().map(|&c| &scaled[c as usize]).sum()).collect(),
        };
        Ok(sums.into_iter().map(|s| BigRational::new(s, den.clone())).collect())
    }

    /// True iff `A x = p (t/k)^k 1`.
    pub fn is_solution(&self, x: &[BigRational], p: &BigRational) -> Result<bool> {
        let rhs = self.rhs(p);
        Ok(self.apply(x)?.iter().all(|v| *v == rhs))
    }
}

pub fn is_pstar_solution(x: &SolutionVector, t: usize, k: usize, p: &BigRational) -> Result<bool> {
    BalancedSystem::new(t, k)?.is_solution(&x.entries, p)
}

/// Particular solution and nullspace of the balanced system.
pub fn solution_space(t: usize, k: usize, p: &BigRational) -> Result<SolutionSpace> {
    let a = build_a(t, k, &balanced_sizes(t, k)?)?;
    let rhs = balanced_rhs(t, k, p);
    match solve_affine(&a, &vec![rhs; a.rows()])? {
        AffineSolution::Feasible(space) => Ok(space),
        // u is always a solution, so this cannot happen for valid input
        AffineSolution::Infeasible { .. } => Err(Error::InvalidParameter("balanced system is infeasible".into())),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub t: usize,
    pub k: usize,
    #[serde(with = "serde_rational")]
    pub p: BigRational,
    /// Number of planted vectors `v(A)` checked (one per `A`).
    pub planted_vectors: usize,
    /// (a) `u` and every `v(A)` solve the system.
    pub all_are_solutions: bool,
    /// (b) affinely independent points among `{u} ∪ {v(A)}`.
    pub affine_rank_points: usize,
    /// Dimension of their affine hull: `affine_rank_points - 1`.
    pub affine_direction_dimension: usize,
    pub expected_affine_rank_points: usize,
    pub system_rank: usize,
    pub nullity: usize,
    /// (c) every nullspace basis vector lies in `span{v(A) - u}`.
    pub nullspace_in_span: bool,
    pub passed: bool,
}

/// Checks that the solutions of the balanced system are exactly the affine
/// combinations of `u` and the planted vectors.
pub fn verify_structure_theorem(t: usize, k: usize, p: &BigRational) -> Result<StructureReport> {
    if !t.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("t = {t} must be even")));
    }
    let system = BalancedSystem::new(t, k)?;
    let u = make_u(t, k, p);
    let planted: Vec<SolutionVector> = ksubsets(t, t / 2)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|a| make_v(t, k, p, a))
        .collect::<Result<_>>()?;
    let mut all_are_solutions = system.is_solution(&u.entries, p)?;
    for v in &planted {
        all_are_solutions &= system.is_solution(&v.entries, p)?;
    }
    let diffs: Vec<Vec<BigRational>> = planted
        .iter()
        .map(|v| v.entries.iter().zip(&u.entries).map(|(a, b)| a - b).collect())
        .collect();
    let affine_rank_points = 1 + rank_of_vectors(&diffs)?;
    let space = solution_space(t, k, p)?;
    let nullspace_in_span = in_linear_span(&space.nullspace_basis, &diffs)?;
    let passed = all_are_solutions && affine_rank_points == t && nullspace_in_span;
    Ok(StructureReport {
        t,
        k,
        p: p.clone(),
        planted_vectors: planted.len(),
        all_are_solutions,
        affine_rank_points,
        affine_direction_dimension: affine_rank_points - 1,
        expected_affine_rank_points: t,
        system_rank: space.system_rank,
        nullity: space.nullity(),
        nullspace_in_span,
        passed,
    })
}

/// Cut densities `d_K` of an equipartition of a hypergraph into `t` parts,
/// indexed by colex-ordered `K ∈ C([t], k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityVector {
    pub n: usize,
    pub t: usize,
    pub k: usize,
    #[serde(with = "serde_rational_vec")]
    pub entries: Vec<BigRational>,
    /// Some `d_K > 1` (possible only for weights above 1).
    pub exceeds_one: bool,
}

pub fn density_vector(h: &WeightedHypergraph, parts: &CutSpec) -> Result<DensityVector> {
    let (n, k, t) = (h.n(), h.k(), parts.r());
    if parts.n() != n {
        return Err(Error::DimensionMismatch(format!("partition of {} vertices, hypergraph on {n}", parts.n())));
    }
    if parts.classes().iter().any(|c| c.len() != n / t) || n % t != 0 {
        return Err(Error::NotDivisible { t: n, k: t });
    }
    if t < k {
        return Err(Error::InvalidParameter(format!("{t} parts cannot carry a {k}-set")));
    }
    let scale = BigRational::from_integer(num_traits::pow(BigInt::from(n / t), k));
    let entries = ksubsets(t, k)
        .map(|kset| {
            let chosen: Vec<Vec<usize>> = kset.iter().map(|&i| parts.classes()[i - 1].clone()).collect();
            Ok(crossing_weight(h, &chosen)? / &scale)
        })
        .collect::<Result<Vec<_>>>()?;
    let exceeds_one = entries.iter().any(|d| *d > BigRational::one());
    Ok(DensityVector { n, t, k, entries, exceeds_one })
}

const EXHAUSTIVE_CUT_LIMIT: u64 = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaReport {
    /// `max |cut weight - p (n/k)^k| / n^k` over the inspected cuts.
    #[serde(with = "serde_rational")]
    pub delta: BigRational,
    pub cuts_inspected: usize,
    pub exhaustive: bool,
    /// Seed of the sampled cuts; absent when exhaustive.
    pub seed: Option<u64>,
}

/// Largest normalised deviation of a balanced k-cut weight from
/// `p (n/k)^k`; every balanced cut is inspected when there are at most
/// 200000 of them, otherwise `trials` uniform cuts are sampled.
pub fn delta_closeness(h: &WeightedHypergraph, p: &BigRational, trials: usize, seed: u64) -> Result<DeltaReport> {
    let (n, k) = (h.n(), h.k());
    let sizes = balanced_sizes(n, k)?;
    let target = p * BigRational::from_integer(num_traits::pow(BigInt::from(n / k), k));
    let norm = BigRational::from_integer(num_traits::pow(BigInt::from(n), k));
    let deviation = |cut: &CutSpec| -> Result<BigRational> { Ok((cut_weight(h, cut)? - &target).abs()) };
    let exhaustive = partition_count(n, &sizes)?.to_u64().is_some_and(|c| c <= EXHAUSTIVE_CUT_LIMIT);
    let cuts: Vec<CutSpec> = if exhaustive {
        enumerate_partitions(n, &sizes)?
            .iter()
            .map(|p| CutSpec::new(n, p.blocks().to_vec()))
            .collect::<Result<_>>()?
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..trials).map(|_| CutSpec::random(n, &sizes, &mut rng)).collect::<Result<_>>()?
    };
    let worst = cuts
        .par_iter()
        .map(deviation)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or_else(BigRational::zero);
    Ok(DeltaReport {
        delta: worst / norm,
        cuts_inspected: cuts.len(),
        exhaustive,
        seed: (!exhaustive).then_some(seed),
    })
}

/// Symmetric, zero-diagonal weighted graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    n: usize,
    w: Vec<BigRational>,
}

impl WeightedGraph {
    pub fn new(n: usize, w: Vec<BigRational>) -> Result<Self> {
        if w.len() != n * n {
            return Err(Error::DimensionMismatch(format!("{} weights for {n} vertices", w.len())));
        }
        for i in 0..n {
            if !w[i * n + i].is_zero() {
                return Err(Error::InvalidParameter(format!("nonzero diagonal at {i}")));
            }
            for j in 0..i {
                if w[i * n + j] != w[j * n + i] {
                    return Err(Error::InvalidParameter(format!("asymmetric weight at ({i},{j})")));
                }
            }
        }
        Ok(Self { n, w })
    }

    /// From the strict upper triangle listed row by row.
    pub fn from_upper(n: usize, upper: &[BigRational]) -> Result<Self> {
        if upper.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::DimensionMismatch(format!("{} upper-triangle weights for {n} vertices", upper.len())));
        }
        let mut w = vec![BigRational::zero(); n * n];
        let mut it = upper.iter();
        for i in 0..n {
            for j in i + 1..n {
                let x = it.next().expect("length checked").clone();
                w[i * n + j] = x.clone();
                w[j * n + i] = x;
            }
        }
        Ok(Self { n, w })
    }

    pub fn complete(n: usize) -> Self {
        let w = (0..n * n).map(|x| if x / n == x % n { BigRational::zero() } else { BigRational::one() }).collect();
        Self { n, w }
    }

    pub fn empty(n: usize) -> Self {
        Self { n, w: vec![BigRational::zero(); n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, i: usize, j: usize) -> &BigRational {
        &self.w[i * self.n + j]
    }

    pub fn upper(&self) -> Vec<BigRational> {
        (0..self.n).flat_map(|i| (i + 1..self.n).map(move |j| (i, j))).map(|(i, j)| self.weight(i, j).clone()).collect()
    }

    /// `e(S,T) = sum_{i in S} sum_{j in T} w(i,j)` over ordered pairs.
    pub fn e(&self, s: &[usize], t: &[usize]) -> BigRational {
        s.iter().flat_map(|&i| t.iter().map(move |&j| (i, j))).map(|(i, j)| self.weight(i, j)).sum()
    }
}

/// `G[P]`: weight of `(u, v)` is the density `e(V_i, V_j) / |V_i||V_j|` of
/// their parts, and 0 inside a part. Parts are 1-based vertex lists.
pub fn quotient_graph(g: &WeightedGraph, parts: &CutSpec) -> Result<WeightedGraph> {
    let n = g.n;
    let t = parts.r();
    if parts.n() != n {
        return Err(Error::DimensionMismatch(format!("partition of {} vertices, graph on {n}", parts.n())));
    }
    if !n.is_multiple_of(t) || parts.classes().iter().any(|c| c.len() != n / t) {
        return Err(Error::NotDivisible { t: n, k: t });
    }
    let zero_based: Vec<Vec<usize>> = parts.classes().iter().map(|c| c.iter().map(|v| v - 1).collect()).collect();
    let mut part_of = vec![0; n];
    for (i, c) in zero_based.iter().enumerate() {
        c.iter().for_each(|&v| part_of[v] = i);
    }
    let mut density = vec![BigRational::zero(); t * t];
    for i in 0..t {
        for j in 0..t {
            if i != j {
                let size = int((zero_based[i].len() * zero_based[j].len()) as i64);
                density[i * t + j] = g.e(&zero_based[i], &zero_based[j]) / size;
            }
        }
    }
    let w = (0..n * n).map(|x| density[part_of[x / n] * t + part_of[x % n]].clone()).collect();
    WeightedGraph::new(n, w)
}

pub const CUT_NORM_EXACT_LIMIT: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutNormMode {
    /// Exhaustive over all `S`, `n <= 14`.
    Exact,
    /// Alternating maximisation from random starts: a lower bound only.
    Heuristic { restarts: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutNormReport {
    pub n: usize,
    #[serde(with = "serde_rational")]
    pub value: BigRational,
    /// False when `value` is only a lower bound.
    pub exact: bool,
    /// Maximising pair (0-based vertices).
    pub s: Vec<usize>,
    pub t: Vec<usize>,
}

/// Difference matrix scaled to integers: `(rows, denominator)`.
fn integer_difference(g1: &WeightedGraph, g2: &WeightedGraph) -> (Vec<BigInt>, BigInt) {
    let diff: Vec<BigRational> = g1.w.iter().zip(&g2.w).map(|(a, b)| a - b).collect();
    let den = common_denominator(&diff);
    let scaled = diff.iter().map(|v| v.numer() * (&den / v.denom())).collect();
    (scaled, den)
}

/// For column sums `c_j` the best `T` is all positive or all negative columns.
fn best_t(c: &[BigInt]) -> (BigInt, Vec<usize>) {
    let pos: BigInt = c.iter().filter(|x| x.is_positive()).sum();
    let neg: BigInt = -c.iter().filter(|x| x.is_negative()).sum::<BigInt>();
    if pos >= neg {
        (pos, (0..c.len()).filter(|&j| c[j].is_positive()).collect())
    } else {
        (neg, (0..c.len()).filter(|&j| c[j].is_negative()).collect())
    }
}

/// `d_box(G1, G2) = max_{S,T} |e_1(S,T) - e_2(S,T)| / n^2`.
pub fn cut_norm(g1: &WeightedGraph, g2: &WeightedGraph, mode: CutNormMode) -> Result<CutNormReport> {
    if g1.n != g2.n {
        return Err(Error::DimensionMismatch(format!("graphs on {} and {} vertices", g1.n, g2.n)));
    }
    let n = g1.n;
    let (d, den) = integer_difference(g1, g2);
    let (best, s, t, exact) = match mode {
        CutNormMode::Exact => {
            if n > CUT_NORM_EXACT_LIMIT {
                return Err(Error::TooLarge(format!(
                    "exact cut norm needs n <= {CUT_NORM_EXACT_LIMIT}, got {n}; use the heuristic mode"
                )));
            }
            let (best, s, t) = exact_cut_norm(&d, n);
            (best, s, t, true)
        }
        CutNormMode::Heuristic { restarts, seed } => {
            let (best, s, t) = heuristic_cut_norm(&d, n, restarts.max(1), seed);
            (best, s, t, false)
        }
    };
    let value = if n == 0 { BigRational::zero() } else { BigRational::new(best, den * BigInt::from(n * n)) };
    Ok(CutNormReport { n, value, exact, s, t })
}

/// Walks all `S` in Gray-code order, keeping `c_j = sum_{i in S} d(i,j)`.
fn exact_cut_norm(d: &[BigInt], n: usize) -> (BigInt, Vec<usize>, Vec<usize>) {
    // i128 suffices unless entries are huge; fall back to BigInt otherwise
    let bound = d.iter().map(|x| x.abs()).max().unwrap_or_default() * BigInt::from(n * n + 1);
    if let Some(small) = bound.to_i128().and(d.iter().map(ToPrimitive::to_i128).collect::<Option<Vec<i128>>>()) {
        let mut c = vec![0i128; n];
        let mut in_s = vec![false; n];
        let (mut best, mut best_mask) = (0i128, 0u64);
        let mut mask = 0u64;
        for step in 1u64..(1u64 << n) {
            let i = step.trailing_zeros() as usize;
            let sign = if in_s[i] { -1 } else { 1 };
            in_s[i] = !in_s[i];
            mask ^= 1 << i;
            for j in 0..n {
                c[j] += sign * small[i * n + j];
            }
            let pos: i128 = c.iter().filter(|&&x| x > 0).sum();
            let neg: i128 = -c.iter().filter(|&&x| x < 0).sum::<i128>();
            let value = pos.max(neg);
            if value > best {
                best = value;
                best_mask = mask;
            }
        }
        let s: Vec<usize> = (0..n).filter(|&i| best_mask & (1 << i) != 0).collect();
        let c: Vec<BigInt> = (0..n).map(|j| s.iter().map(|&i| &d[i * n + j]).sum()).collect();
        let (value, t) = best_t(&c);
        debug_assert_eq!(value, BigInt::from(best));
        return (value, s, t);
    }
    let mut best = (BigInt::zero(), Vec::new(), Vec::new());
    for mask in 1u64..(1u64 << n) {
        let s: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let c: Vec<BigInt> = (0..n).map(|j| s.iter().map(|&i| &d[i * n + j]).sum()).collect();
        let (value, t) = best_t(&c);
        if value > best.0 {
            best = (value, s, t);
        }
    }
    best
}

fn heuristic_cut_norm(d: &[BigInt], n: usize, restarts: usize, seed: u64) -> (BigInt, Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (BigInt::zero(), Vec::new(), Vec::new());
    let column_sums = |s: &[usize]| -> Vec<BigInt> { (0..n).map(|j| s.iter().map(|&i| &d[i * n + j]).sum()).collect() };
    let row_sums = |t: &[usize]| -> Vec<BigInt> { (0..n).map(|i| t.iter().map(|&j| &d[i * n + j]).sum()).collect() };
    for _ in 0..restarts {
        let mut s: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
        if s.is_empty() && n > 0 {
            s.push(rng.random_range(0..n));
        }
        let mut current = BigInt::from(-1);
        loop {
            let (v1, t) = best_t(&column_sums(&s));
            let (v2, s2) = best_t(&row_sums(&t));
            if v2 <= current {
                break;
            }
            current = v2.clone();
            if v1 > best.0 {
                best = (v1, s.clone(), t.clone());
            }
            if v2 > best.0 {
                best = (v2.clone(), s2.clone(), t.clone());
            }
            s = s2;
        }
    }
    best
}
