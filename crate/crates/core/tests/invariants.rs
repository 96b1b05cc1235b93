//! Property and cross-check tests against independent naive oracles.

use std::collections::BTreeSet;

use hypercut_core::combinatorics::{choose, enumerate_partitions, ksubsets, partition_count};
use hypercut_core::hypergraph::{
    check_d1, crossing_weight, cut_weight, inclusion_exclusion_cut, monomial_coefficients, sample_ckp, sample_gnp,
    type_z_density, CutSpec, TypeZVector, VarianceModel, WeightedHypergraph,
};
use hypercut_core::intersection::{balanced_sizes, build_a};
use hypercut_core::linalg::{exact_rank, ExactMatrix};
use hypercut_core::rational::{int, ratio};
use hypercut_core::structure::{
    cut_norm, make_u, make_v, BalancedSystem, CutNormMode, WeightedGraph,
};
use hypercut_core::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Textbook rational Gaussian elimination.
fn naive_rank(rows: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] / &m[rank][c];
                for j in c..cols {
                    let d = &f * &m[rank][j];
                    m[r][j] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn to_matrix(rows: &[Vec<i64>]) -> ExactMatrix {
    ExactMatrix::from_i64_rows(rows).unwrap()
}

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..7, 1usize..7).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-3i64..4, c), r))
}

/// Either all random or a product of thin factors, so low ranks occur.
fn low_rank_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..8, 1usize..8, 1usize..4).prop_flat_map(|(r, c, inner)| {
        (
            prop::collection::vec(prop::collection::vec(-3i64..4, inner), r),
            prop::collection::vec(prop::collection::vec(-3i64..4, c), inner),
        )
            .prop_map(move |(a, b)| {
                (0..r).map(|i| (0..c).map(|j| (0..inner).map(|l| a[i][l] * b[l][j]).sum()).collect()).collect()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_agrees_with_naive_and_transpose(rows in small_matrix()) {
        let m = to_matrix(&rows);
        let r = exact_rank(&m);
        prop_assert_eq!(r, naive_rank(&m.integer_rows().iter().map(|row| row.iter().cloned().map(BigRational::from_integer).collect()).collect::<Vec<_>>()));
        prop_assert_eq!(r, exact_rank(&m.transpose()));
        prop_assert_eq!(r, exact_rank(&m.transpose().mul(&m).unwrap()));
    }

    #[test]
    fn low_rank_products(rows in low_rank_matrix()) {
        let m = to_matrix(&rows);
        let r = exact_rank(&m);
        let rational: Vec<Vec<BigRational>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
        prop_assert_eq!(r, naive_rank(&rational));
        prop_assert!(r <= m.rows().min(m.cols()));
    }

    #[test]
    fn crossing_weight_matches_inclusion_exclusion_and_brute_force(
        n in 4usize..11,
        k in 2usize..4,
        seed in any::<u64>(),
    ) {
        prop_assume!(k <= n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights: Vec<BigRational> = (0..choose(n, k)).map(|_| ratio(rng.random_range(0..5), rng.random_range(1..4))).collect();
        let h = WeightedHypergraph::from_fractional(n, k, weights.clone()).unwrap();
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..=k)).collect();
        // class k collects unassigned vertices
        let classes: Vec<Vec<usize>> = (0..k).map(|c| (1..=n).filter(|&v| labels[v - 1] == c).collect()).collect();
        let brute: BigRational = ksubsets(n, k)
            .zip(&weights)
            .filter(|(s, _)| s.iter().map(|&v| labels[v - 1]).collect::<BTreeSet<_>>().len() == k && s.iter().all(|&v| labels[v - 1] < k))
            .map(|(_, w)| w.clone())
            .sum();
        prop_assert_eq!(crossing_weight(&h, &classes).unwrap(), brute.clone());
        prop_assert_eq!(inclusion_exclusion_cut(&h, &classes).unwrap(), brute);
    }

    #[test]
    fn type_z_density_is_p_and_matches_monomials(r in 2usize..7, k in 2usize..7, seed in any::<u64>()) {
        prop_assume!(k <= r);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<BigRational> = (0..r).map(|_| ratio(rng.random_range(1..20), rng.random_range(1..20))).collect();
        let total: BigRational = raw.iter().sum();
        let z: Vec<BigRational> = raw.iter().map(|x| x * ratio(r as i64, 2) / &total).collect();
        let p = ratio(rng.random_range(1..10), 20);
        let tz = TypeZVector::new(z.clone()).unwrap();
        let density = type_z_density(r, k, &p, &tz).unwrap();
        prop_assert_eq!(&density, &p);
        let poly = monomial_coefficients(r, k).unwrap();
        prop_assert_eq!(poly.evaluate(&z, &p), density * int(choose(r, k) as i64));
    }
}

/// Distinct unordered block families over all labelings with the given
/// block sizes.
fn naive_partitions(t: usize, sizes: &[usize]) -> BTreeSet<BTreeSet<Vec<usize>>> {
    let r = sizes.len();
    let mut out = BTreeSet::new();
    let mut labels = vec![0usize; t];
    loop {
        let blocks: Vec<Vec<usize>> = (0..r).map(|b| (1..=t).filter(|&v| labels[v - 1] == b).collect()).collect();
        if blocks.iter().zip(sizes).all(|(b, &s)| b.len() == s) {
            out.insert(blocks.into_iter().collect());
        }
        let mut i = 0;
        while i < t {
            labels[i] += 1;
            if labels[i] < r {
                break;
            }
            labels[i] = 0;
            i += 1;
        }
        if i == t {
            return out;
        }
    }
}

#[test]
fn partitions_match_naive_enumeration() {
    for (t, sizes) in [
        (4, vec![2, 2]),
        (6, vec![3, 3]),
        (6, vec![2, 2, 2]),
        (7, vec![3, 4]),
        (8, vec![4, 4]),
        (9, vec![3, 3, 3]),
        (9, vec![2, 3, 4]),
        (10, vec![5, 5]),
        (10, vec![4, 6]),
    ] {
        let expected = naive_partitions(t, &sizes);
        let got: BTreeSet<BTreeSet<Vec<usize>>> = enumerate_partitions(t, &sizes)
            .unwrap()
            .iter()
            .map(|p| p.blocks().iter().cloned().collect())
            .collect();
        assert_eq!(got, expected, "t={t} sizes={sizes:?}");
        assert_eq!(partition_count(t, &sizes).unwrap(), expected.len().into());
    }
}

#[test]
fn balanced_intersection_matrix_invariants() {
    for (t, k) in [(4, 2), (6, 2), (8, 2), (6, 3), (9, 3), (8, 4)] {
        let a = build_a(t, k, &balanced_sizes(t, k).unwrap()).unwrap();
        let rank = exact_rank(&a);
        assert!(rank >= choose(t - 1, k), "rank {rank} below C({},{k}) at t={t}", t - 1);
        let sums = a.column_sums();
        assert!(sums.iter().all(|s| *s == sums[0]), "column sums differ at ({t},{k})");
        let row_sums = a.row_sums();
        let transversals = int(num_traits::pow(t as i64 / k as i64, k));
        assert!(row_sums.iter().all(|s| *s == transversals));
    }
}

#[test]
fn planted_vectors_solve_the_explicit_system() {
    let p = ratio(1, 4);
    for (t, k) in [(4, 2), (6, 2), (8, 2), (6, 3), (8, 4), (10, 2)] {
        let a = build_a(t, k, &balanced_sizes(t, k).unwrap()).unwrap();
        let rhs = &p * int(num_traits::pow(t as i64 / k as i64, k));
        let system = BalancedSystem::new(t, k).unwrap();
        let solves = |x: &[BigRational]| a.mul_vec(x).unwrap().iter().all(|y| *y == rhs);
        let u = make_u(t, k, &p);
        assert!(solves(&u.entries) && system.is_solution(&u.entries, &p).unwrap());
        for set in ksubsets(t, t / 2) {
            let v = make_v(t, k, &p, &set).unwrap();
            assert!(solves(&v.entries), "v({set:?}) at ({t},{k})");
            assert!(system.is_solution(&v.entries, &p).unwrap());
            let mut bumped = v.entries.clone();
            bumped[0] += ratio(1, 7);
            assert!(!system.is_solution(&bumped, &p).unwrap());
        }
    }
}

fn random_graph(n: usize, rng: &mut ChaCha8Rng) -> WeightedGraph {
    let upper: Vec<BigRational> = (0..n * (n - 1) / 2).map(|_| ratio(rng.random_range(-4..5), rng.random_range(1..4))).collect();
    WeightedGraph::from_upper(n, &upper).unwrap()
}

#[test]
fn cut_norm_is_a_pseudometric() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let (g1, g2, g3) = (random_graph(8, &mut rng), random_graph(8, &mut rng), random_graph(8, &mut rng));
        let d = |a: &WeightedGraph, b: &WeightedGraph| cut_norm(a, b, CutNormMode::Exact).unwrap().value;
        assert!(d(&g1, &g1).is_zero());
        assert_eq!(d(&g1, &g2), d(&g2, &g1));
        assert!(d(&g1, &g3) <= d(&g1, &g2) + d(&g2, &g3));
        let heuristic = cut_norm(&g1, &g2, CutNormMode::Heuristic { restarts: 8, seed: 3 }).unwrap();
        assert!(!heuristic.exact && heuristic.value <= d(&g1, &g2) && heuristic.value.is_positive());
    }
}

#[test]
fn sampling_is_reproducible() {
    let p = ratio(3, 10);
    assert_eq!(sample_gnp(20, 3, &p, 5).unwrap(), sample_gnp(20, 3, &p, 5).unwrap());
    assert_ne!(sample_gnp(20, 3, &p, 5).unwrap(), sample_gnp(20, 3, &p, 6).unwrap());
    assert_eq!(sample_ckp(20, 3, &p, 5, true).unwrap(), sample_ckp(20, 3, &p, 5, true).unwrap());
    assert_eq!(sample_gnp(40, 3, &int(0), 1).unwrap().edge_count(), 0);
    assert_eq!(sample_gnp(12, 3, &BigRational::one(), 1).unwrap().edge_count(), choose(12, 3));
}

#[test]
fn gnp_edge_counts_concentrate() {
    let (n, k) = (40, 3);
    let p = 0.3;
    let m = choose(n, k) as f64;
    let (mean, sd) = (m * p, (m * p * (1.0 - p)).sqrt());
    let inside = (0..1000u64)
        .filter(|&seed| {
            let edges = sample_gnp(n, k, &ratio(3, 10), seed).unwrap().edge_count() as f64;
            (edges - mean).abs() <= 3.0 * sd
        })
        .count();
    // 3 sigma holds with probability 0.9973 per seed
    assert!(inside >= 990, "{inside}/1000 seeds within 3 sigma");
}

#[test]
fn ckp_pair_densities() {
    let (n, p) = (100, ratio(1, 4));
    let (h, parts) = sample_ckp(n, 2, &p, 7, true).unwrap();
    let mut in_a = vec![false; n + 1];
    parts.a.iter().for_each(|&v| in_a[v] = true);
    let (mut aa, mut ab, mut bb) = (0usize, 0usize, 0usize);
    for (rank, s) in ksubsets(n, 2).enumerate() {
        if h.weight(rank).is_zero() {
            continue;
        }
        match (in_a[s[0]], in_a[s[1]]) {
            (true, true) => aa += 1,
            (false, false) => bb += 1,
            _ => ab += 1,
        }
    }
    assert_eq!(bb, 0);
    let within = |count: usize, pairs: f64, q: f64| (count as f64 - pairs * q).abs() <= 5.0 * (pairs * q * (1.0 - q)).sqrt();
    assert!(within(aa, 1225.0, 0.5), "A-internal {aa}");
    assert!(within(ab, 2500.0, 0.25), "crossing {ab}");
    let cut = CutSpec::new(n, vec![parts.a.clone(), parts.b.clone()]).unwrap();
    assert_eq!(cut_weight(&h, &cut).unwrap(), int(ab as i64));
}

#[test]
fn d1_accepts_uniform_random_hypergraphs() {
    // a G(n,p) sample, checked at 4 standard deviations over 30 random sets
    let p = ratio(3, 10);
    let h = sample_gnp(60, 3, &p, 2).unwrap();
    let report = check_d1(&h, &p, &[20, 30, 40], 10, 9, &int(4), &VarianceModel::Uniform).unwrap();
    assert!(report.passed, "max z {}", report.max_z);
}
