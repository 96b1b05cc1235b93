//! k-subsets of `[t] = {1, ..., t}` in colexicographic order, set partitions
//! of `[t]` with prescribed block sizes, and exact binomial arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact binomial coefficient; zero when `r < 0` or `r > n`.
pub fn binomial(n: u64, r: i64) -> BigUint {
    if r < 0 || r as u64 > n {
        return BigUint::zero();
    }
    let r = (r as u64).min(n - r as u64);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Machine-word binomial for indexing. Panics if the value does not fit.
pub fn choose(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    usize::try_from(acc).expect("binomial coefficient overflows usize")
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// A k-subset of `[t]`, elements strictly increasing and 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KSubset {
    t: usize,
    elements: Vec<usize>,
}

impl KSubset {
    pub fn new(t: usize, mut elements: Vec<usize>) -> Result<Self> {
        elements.sort_unstable();
        if elements.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::MalformedSubset(format!("repeated element in {elements:?}")));
        }
        if let Some(&bad) = elements.iter().find(|&&e| e == 0 || e > t) {
            return Err(Error::MalformedSubset(format!("element {bad} outside [1, {t}]")));
        }
        Ok(Self { t, elements })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn k(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn rank(&self) -> usize {
        colex_rank(&self.elements)
    }
}

impl fmt::Display for KSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// Colex rank of a sorted, 1-based subset: `sum_i C(e_i - 1, i)`.
pub fn colex_rank(sorted: &[usize]) -> usize {
    sorted
        .iter()
        .enumerate()
        .map(|(i, &e)| choose(e - 1, i + 1))
        .sum()
}

pub fn ksubset_rank(s: &KSubset) -> usize {
    s.rank()
}

pub fn ksubset_unrank(index: usize, t: usize, k: usize) -> Result<KSubset> {
    let total = choose(t, k);
    if index >= total {
        return Err(Error::IndexOutOfRange {
            index: index.to_string(),
            limit: total.to_string(),
        });
    }
    let mut elements = vec![0; k];
    unrank_into(index, k, t, &mut elements);
    Ok(KSubset { t, elements })
}

/// Writes the colex-unranked subset into `out` (len k), largest element last.
pub fn unrank_into(mut index: usize, k: usize, t: usize, out: &mut [usize]) {
    let mut hi = t;
    for pos in (0..k).rev() {
        // largest e with C(e - 1, pos + 1) <= index
        let mut e = hi;
        while choose(e - 1, pos + 1) > index {
            e -= 1;
        }
        out[pos] = e;
        index -= choose(e - 1, pos + 1);
        hi = e - 1;
    }
}

/// Iterator over all k-subsets of `[t]` in colex order, yielding sorted
/// 1-based element slices by value.
pub struct Combinations {
    t: usize,
    current: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(t: usize, k: usize) -> Self {
        Self {
            t,
            current: (1..=k).collect(),
            done: k > t,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        self.done = !next_colex(&mut self.current, self.t);
        Some(out)
    }
}

/// Advances a sorted subset of `[t]` to its colex successor in place;
/// returns false (leaving `current` unspecified) after the last subset.
pub fn next_colex(current: &mut [usize], t: usize) -> bool {
    let k = current.len();
    for i in 0..k {
        let limit = if i + 1 < k { current[i + 1] } else { t + 1 };
        if current[i] + 1 < limit {
            current[i] += 1;
            for (j, slot) in current.iter_mut().enumerate().take(i) {
                *slot = j + 1;
            }
            return true;
        }
    }
    false
}

/// All k-subsets of `[t]` in colex order.
pub fn ksubsets(t: usize, k: usize) -> Combinations {
    Combinations::new(t, k)
}

/// Partition of `[t]` into blocks whose sizes are given by `sizes`.
///
/// Block `i` has size `sizes[i]`. Blocks of equal size are unordered; the
/// canonical representative lists them by increasing minimum element in the
/// positions of `sizes` that carry that size.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BalancedPartition {
    t: usize,
    sizes: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl BalancedPartition {
    /// Builds and canonicalises a partition from explicit blocks.
    pub fn from_blocks(t: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; t + 1];
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidSizes("empty block".into()));
            }
            for &x in b {
                if x == 0 || x > t {
                    return Err(Error::MalformedSubset(format!("vertex {x} outside [1, {t}]")));
                }
                if std::mem::replace(&mut seen[x], true) {
                    return Err(Error::MalformedSubset(format!("vertex {x} in two blocks")));
                }
            }
        }
        if seen[1..].iter().any(|s| !s) {
            return Err(Error::MalformedSubset("blocks do not cover the ground set".into()));
        }
        let sizes: Vec<usize> = blocks.iter().map(Vec::len).collect();
        canonicalize(&sizes, &mut blocks);
        Ok(Self { t, sizes, blocks })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// `labels[x]` is the block index of vertex `x` (index 0 unused).
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![usize::MAX; self.t + 1];
        for (i, b) in self.blocks.iter().enumerate() {
            for &x in b {
                labels[x] = i;
            }
        }
        labels
    }

    /// Blocks are disjoint, cover `[t]`, and match `sizes`.
    pub fn is_valid(&self) -> bool {
        let mut seen = vec![false; self.t + 1];
        for (b, &s) in self.blocks.iter().zip(&self.sizes) {
            if b.len() != s {
                return false;
            }
            for &x in b {
                if x == 0 || x > self.t || std::mem::replace(&mut seen[x], true) {
                    return false;
                }
            }
        }
        self.blocks.len() == self.sizes.len() && seen[1..].iter().all(|&s| s)
    }
}

impl fmt::Display for BalancedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let xs: Vec<String> = b.iter().map(|x| x.to_string()).collect();
                format!("{{{}}}", xs.join(","))
            })
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

fn canonicalize(sizes: &[usize], blocks: &mut [Vec<usize>]) {
    let mut by_size: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &s) in sizes.iter().enumerate() {
        by_size.entry(s).or_default().push(i);
    }
    for positions in by_size.values() {
        let mut group: Vec<Vec<usize>> = positions.iter().map(|&i| std::mem::take(&mut blocks[i])).collect();
        group.sort_by_key(|b| b[0]);
        for (&i, b) in positions.iter().zip(group) {
            blocks[i] = b;
        }
    }
}

fn validate_sizes(t: usize, sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() {
        return Err(Error::InvalidSizes("empty size vector".into()));
    }
    if sizes.contains(&0) {
        return Err(Error::InvalidSizes(format!("zero block size in {sizes:?}")));
    }
    if sizes.iter().sum::<usize>() != t {
        return Err(Error::SizeVectorSum { t, sizes: sizes.to_vec() });
    }
    Ok(())
}

/// `t! / (prod v_i! * prod_m c_m!)` where `c_m` counts blocks of size `m`.
pub fn partition_count(t: usize, sizes: &[usize]) -> Result<BigUint> {
    validate_sizes(t, sizes)?;
    let mut denom = BigUint::one();
    let mut multiplicity: BTreeMap<usize, u64> = BTreeMap::new();
    for &s in sizes {
        denom *= factorial(s as u64);
        *multiplicity.entry(s).or_default() += 1;
    }
    for &c in multiplicity.values() {
        denom *= factorial(c);
    }
    Ok(factorial(t as u64) / denom)
}

/// Calls `visit` once for every canonical partition of `[t]` with block
/// sizes `sizes`.
///
/// Size groups are processed in increasing size order. Each group first
/// picks its vertex pool from the remaining vertices (as a combination),
/// then splits the pool into equal blocks, each block seeded by the smallest
/// unused pool vertex. Every canonical partition is reached exactly once.
pub fn visit_partitions<F: FnMut(&BalancedPartition)>(t: usize, sizes: &[usize], mut visit: F) -> Result<()> {
    validate_sizes(t, sizes)?;
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &s) in sizes.iter().enumerate() {
        groups.entry(s).or_default().push(i);
    }
    let groups: Vec<(usize, Vec<usize>)> = groups.into_iter().collect();
    let mut state = PartitionBuilder {
        t,
        sizes: sizes.to_vec(),
        groups,
        used: vec![false; t + 1],
        blocks: vec![Vec::new(); sizes.len()],
    };
    state.group(0, &mut visit);
    Ok(())
}

pub fn enumerate_partitions(t: usize, sizes: &[usize]) -> Result<Vec<BalancedPartition>> {
    let mut out = Vec::new();
    visit_partitions(t, sizes, |p| out.push(p.clone()))?;
    Ok(out)
}

struct PartitionBuilder {
    t: usize,
    sizes: Vec<usize>,
    groups: Vec<(usize, Vec<usize>)>,
    used: Vec<bool>,
    blocks: Vec<Vec<usize>>,
}

impl PartitionBuilder {
    fn group<F: FnMut(&BalancedPartition)>(&mut self, g: usize, visit: &mut F) {
        if g == self.groups.len() {
            let p = BalancedPartition {
                t: self.t,
                sizes: self.sizes.clone(),
                blocks: self.blocks.clone(),
            };
            debug_assert!(p.is_valid());
            visit(&p);
            return;
        }
        let size = self.groups[g].0;
        let pool_size = size * self.groups[g].1.len();
        let available: Vec<usize> = (1..=self.t).filter(|&x| !self.used[x]).collect();
        if g + 1 == self.groups.len() {
            // last group takes everything left
            debug_assert_eq!(available.len(), pool_size);
            self.split_pool(g, &available, 0, visit);
            return;
        }
        for pick in ksubsets(available.len(), pool_size) {
            let pool: Vec<usize> = pick.iter().map(|&i| available[i - 1]).collect();
            self.split_pool(g, &pool, 0, visit);
        }
    }

    /// Fills blocks `positions[slot..]` of group `g` from the unused vertices of `pool`.
    fn split_pool<F: FnMut(&BalancedPartition)>(&mut self, g: usize, pool: &[usize], slot: usize, visit: &mut F) {
        let size = self.groups[g].0;
        let count = self.groups[g].1.len();
        if slot == count {
            self.group(g + 1, visit);
            return;
        }
        let position = self.groups[g].1[slot];
        let free: Vec<usize> = pool.iter().copied().filter(|&x| !self.used[x]).collect();
        let seed = free[0];
        let rest = &free[1..];
        for pick in ksubsets(rest.len(), size - 1) {
            let mut block = Vec::with_capacity(size);
            block.push(seed);
            block.extend(pick.iter().map(|&i| rest[i - 1]));
            for &x in &block {
                self.used[x] = true;
            }
            self.blocks[position] = block;
            self.split_pool(g, pool, slot + 1, visit);
            for &x in &self.blocks[position] {
                self.used[x] = false;
            }
        }
        self.blocks[position] = Vec::new();
    }
}

/// True iff `s` meets every block of `p` in exactly one element.
pub fn is_transversal(s: &KSubset, p: &BalancedPartition) -> Result<bool> {
    if s.t() != p.t() {
        return Err(Error::DimensionMismatch(format!(
            "subset over [{}] vs partition over [{}]",
            s.t(),
            p.t()
        )));
    }
    if s.k() != p.blocks().len() {
        return Err(Error::DimensionMismatch(format!(
            "|S| = {} but partition has {} blocks",
            s.k(),
            p.blocks().len()
        )));
    }
    Ok(is_transversal_labels(s.elements(), &p.labels()))
}

/// Transversal test against a precomputed label table (see [`BalancedPartition::labels`]).
pub fn is_transversal_labels(elements: &[usize], labels: &[usize]) -> bool {
    let mut hit = 0u64;
    for &x in elements {
        let bit = 1u64 << labels[x];
        if hit & bit != 0 {
            return false;
        }
        hit |= bit;
    }
    true
}

/// Visits every transversal of `p` as a sorted element list.
pub fn visit_transversals<F: FnMut(&[usize])>(p: &BalancedPartition, mut visit: F) {
    let blocks = p.blocks();
    let mut pick = vec![0usize; blocks.len()];
    let mut buf = vec![0usize; blocks.len()];
    loop {
        for (slot, (b, &i)) in buf.iter_mut().zip(blocks.iter().zip(&pick)) {
            *slot = b[i];
        }
        buf.sort_unstable();
        visit(&buf);
        let mut pos = 0;
        loop {
            if pos == blocks.len() {
                return;
            }
            pick[pos] += 1;
            if pick[pos] < blocks[pos].len() {
                break;
            }
            pick[pos] = 0;
            pos += 1;
        }
    }
}

/// Product of block sizes, i.e. the number of transversals.
pub fn transversal_count(sizes: &[usize]) -> usize {
    sizes.iter().product()
}

/// Convenience for tests and reports: `binomial` as `u64` when it fits.
pub fn binomial_u64(n: u64, r: i64) -> Option<u64> {
    binomial(n, r).to_u64()
}
