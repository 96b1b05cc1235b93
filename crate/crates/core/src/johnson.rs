//! Johnson scheme `J(t,k)`: the matrices `W_0..W_k`, their closed-form
//! eigenvalues, the Gram matrix `C = A^T A` of the balanced intersection
//! matrix written as `sum_i alpha_i W_i`, its spectrum, and the alternating
//! sum `P_j(k)` together with the brute-force count of good functions it
//! equals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, choose, colex_rank, enumerate_partitions, factorial, ksubsets, visit_transversals};
use crate::error::{Error, Result};
use crate::intersection::balanced_sizes;
use crate::linalg::{exact_rank, ExactMatrix};
use crate::rational::{serde_bigint_vec, serde_rational_vec};

/// `W_i` of `J(t,k)`: rows and columns are colex k-subsets, entry 1 iff the
/// two subsets meet in exactly `k - i` points.
#[derive(Debug, Clone)]
pub struct SchemeMatrix {
    pub t: usize,
    pub k: usize,
    pub i: usize,
    pub matrix: ExactMatrix,
}

pub fn build_w(t: usize, k: usize, i: usize) -> Result<SchemeMatrix> {
    if !(i <= k && k <= t) {
        return Err(Error::InvalidParameter(format!(
            "scheme matrix needs 0 <= i <= k <= t, got t={t}, k={k}, i={i}"
        )));
    }
    let subsets: Vec<Vec<usize>> = ksubsets(t, k).collect();
    let n = subsets.len();
    let mut matrix = ExactMatrix::zeros(n, n);
    for (x, a) in subsets.iter().enumerate() {
        for (y, b) in subsets.iter().enumerate() {
            if intersection_size(a, b) == k - i {
                matrix.set(x, y, BigRational::one());
            }
        }
    }
    Ok(SchemeMatrix { t, k, i, matrix })
}

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Binomial with an integer (possibly negative) top: the polynomial
/// `n (n-1) ... (n-r+1) / r!`, zero for `r < 0`.
fn binomial_poly(n: i64, r: i64) -> BigInt {
    if r < 0 {
        return BigInt::zero();
    }
    if n >= 0 {
        return BigInt::from(binomial(n as u64, r));
    }
    let mut acc = BigInt::one();
    for i in 0..r {
        acc *= n - i;
    }
    acc / BigInt::from(factorial(r as u64))
}

/// Eigenvalue `p_i(j)` of `W_i` on the j-th eigenspace:
/// `sum_{r=0}^{i} (-1)^{i-r} C(k-r, i-r) C(t-k+r-j, r) C(k-j, r)`.
pub fn eigenvalue_p(t: usize, k: usize, i: usize, j: usize) -> Result<BigInt> {
    if i > k || j > k {
        return Err(Error::InvalidParameter(format!("need 0 <= i, j <= k, got i={i}, j={j}, k={k}")));
    }
    let (t, k, i, j) = (t as i64, k as i64, i as i64, j as i64);
    let mut acc = BigInt::zero();
    for r in 0..=i {
        let term = binomial_poly(k - r, i - r) * binomial_poly(t - k + r - j, r) * binomial_poly(k - j, r);
        if (i - r) % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// `C(t,j) - C(t,j-1)`, with `C(t,-1) = 0`.
pub fn multiplicity(t: usize, j: usize) -> BigInt {
    BigInt::from(binomial(t as u64, j as i64)) - BigInt::from(binomial(t as u64, j as i64 - 1))
}

fn check_balanced(t: usize, k: usize) -> Result<usize> {
    if k == 0 || !t.is_multiple_of(k) {
        return Err(Error::NotDivisible { t, k });
    }
    let m = t / k;
    if m < 2 {
        return Err(Error::InvalidParameter(format!("need t/k >= 2, got t={t}, k={k}")));
    }
    Ok(m)
}

fn fact(n: usize) -> BigInt {
    BigInt::from(factorial(n as u64))
}

/// Number of balanced k-cuts of `[t]` of which two k-sets meeting in
/// `k - i` points are both transversals:
/// `i! (t-k-i)! / ((t/k-1)!^(k-i) (t/k-2)!^i)`.
pub fn alpha(t: usize, k: usize, i: usize) -> Result<BigRational> {
    let m = check_balanced(t, k)?;
    if i > k {
        return Err(Error::InvalidParameter(format!("need i <= k, got i={i}, k={k}")));
    }
    let num = fact(i) * fact(t - k - i);
    let den = num_traits::pow(fact(m - 1), k - i) * num_traits::pow(fact(m - 2), i);
    Ok(BigRational::new(num, den))
}

/// Normalised coefficient `i! (t/k-1)^i prod_{s=k+i}^{2k-1} (t-s)`.
pub fn alpha_star(t: usize, k: usize, i: usize) -> Result<BigRational> {
    let m = check_balanced(t, k)?;
    if i > k {
        return Err(Error::InvalidParameter(format!("need i <= k, got i={i}, k={k}")));
    }
    if t < 2 * k {
        return Err(Error::InvalidParameter(format!("need t >= 2k, got t={t}, k={k}")));
    }
    let mut acc = fact(i) * num_traits::pow(BigInt::from(m - 1), i);
    for s in (k + i)..(2 * k) {
        acc *= BigInt::from(t - s);
    }
    Ok(BigRational::from_integer(acc))
}

/// The normalising factor `(t/k-1)!^k / (t-2k)!` relating `alpha` and `alpha_star`.
pub fn alpha_normalizer(t: usize, k: usize) -> Result<BigRational> {
    let m = check_balanced(t, k)?;
    if t < 2 * k {
        return Err(Error::InvalidParameter(format!("need t >= 2k, got t={t}, k={k}")));
    }
    Ok(BigRational::new(num_traits::pow(fact(m - 1), k), fact(t - 2 * k)))
}

/// Spectrum of `C = sum_i alpha_i W_i` for the balanced intersection matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeSpectrum {
    pub t: usize,
    pub k: usize,
    #[serde(with = "serde_rational_vec")]
    pub lambdas: Vec<BigRational>,
    #[serde(with = "serde_rational_vec")]
    pub lambda_stars: Vec<BigRational>,
    #[serde(with = "serde_bigint_vec")]
    pub multiplicities: Vec<BigInt>,
    #[serde(with = "serde_rational_vec")]
    pub alphas: Vec<BigRational>,
    #[serde(with = "serde_rational_vec")]
    pub alpha_stars: Vec<BigRational>,
}

impl SchemeSpectrum {
    /// Indices `j` with `lambda(j) == 0`.
    pub fn zero_eigenvalues(&self) -> Vec<usize> {
        (0..self.lambdas.len()).filter(|&j| self.lambdas[j].is_zero()).collect()
    }

    /// `C(t,k)` minus the multiplicities of the zero eigenvalues.
    pub fn implied_rank(&self) -> BigInt {
        let total: BigInt = self.multiplicities.iter().sum();
        let zero: BigInt = self.zero_eigenvalues().iter().map(|&j| &self.multiplicities[j]).sum();
        total - zero
    }

    /// `lambda(1) == 0` and every other `lambda(j) > 0`.
    pub fn has_expected_signs(&self) -> bool {
        self.lambdas.iter().enumerate().all(|(j, l)| if j == 1 { l.is_zero() } else { l.is_positive() })
    }
}

pub fn gram_spectrum(t: usize, k: usize) -> Result<SchemeSpectrum> {
    check_balanced(t, k)?;
    let alphas: Vec<BigRational> = (0..=k).map(|i| alpha(t, k, i)).collect::<Result<_>>()?;
    let alpha_stars: Vec<BigRational> = (0..=k).map(|i| alpha_star(t, k, i)).collect::<Result<_>>()?;
    let mut lambdas = Vec::with_capacity(k + 1);
    let mut lambda_stars = Vec::with_capacity(k + 1);
    for j in 0..=k {
        let mut l = BigRational::zero();
        let mut ls = BigRational::zero();
        for i in 0..=k {
            let p = BigRational::from_integer(eigenvalue_p(t, k, i, j)?);
            l += &alphas[i] * &p;
            ls += &alpha_stars[i] * &p;
        }
        lambdas.push(l);
        lambda_stars.push(ls);
    }
    let multiplicities = (0..=k).map(|j| multiplicity(t, j)).collect();
    Ok(SchemeSpectrum {
        t,
        k,
        lambdas,
        lambda_stars,
        multiplicities,
        alphas,
        alpha_stars,
    })
}

/// `A^T A` for the balanced `A(t,k,(t/k,...,t/k))`. Since `A` is 0/1 the
/// entry `(X,Y)` is the number of partitions with both `X` and `Y`
/// transversal, accumulated as machine integers partition by partition.
pub fn gram_matrix(t: usize, k: usize) -> Result<ExactMatrix> {
    let v = balanced_sizes(t, k)?;
    let partitions = enumerate_partitions(t, &v)?;
    let n = choose(t, k);
    let counts = partitions
        .par_iter()
        .fold(
            || vec![0u64; n * n],
            |mut acc, p| {
                let mut cols = Vec::new();
                visit_transversals(p, |s| cols.push(colex_rank(s)));
                for &x in &cols {
                    for &y in &cols {
                        acc[x * n + y] += 1;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; n * n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    ExactMatrix::from_vec(n, n, counts.into_iter().map(|c| BigRational::from_integer(BigInt::from(c))).collect())
}

const GRAM_LIMIT: usize = 300;

fn check_gram_size(t: usize, k: usize) -> Result<()> {
    if choose(t, k) > GRAM_LIMIT {
        return Err(Error::TooLarge(format!(
            "C({t},{k}) = {} exceeds the explicit Gram limit {GRAM_LIMIT}",
            choose(t, k)
        )));
    }
    Ok(())
}

/// `sum_i alpha_i W_i` assembled entrywise.
pub fn scheme_combination(t: usize, k: usize, coefficients: &[BigRational]) -> Result<ExactMatrix> {
    let subsets: Vec<Vec<usize>> = ksubsets(t, k).collect();
    let n = subsets.len();
    let mut m = ExactMatrix::zeros(n, n);
    for (x, a) in subsets.iter().enumerate() {
        for (y, b) in subsets.iter().enumerate() {
            m.set(x, y, coefficients[k - intersection_size(a, b)].clone());
        }
    }
    Ok(m)
}

/// True iff `A^T A == sum_i alpha_i W_i` entrywise.
pub fn verify_gram_decomposition(t: usize, k: usize) -> Result<bool> {
    check_gram_size(t, k)?;
    let gram = gram_matrix(t, k)?;
    let alphas: Vec<BigRational> = (0..=k).map(|i| alpha(t, k, i)).collect::<Result<_>>()?;
    Ok(gram == scheme_combination(t, k, &alphas)?)
}

/// True iff `prod_j (C - lambda(j) I) == 0` for the explicit Gram matrix.
pub fn verify_annihilation(t: usize, k: usize) -> Result<bool> {
    check_gram_size(t, k)?;
    let gram = gram_matrix(t, k)?;
    let spectrum = gram_spectrum(t, k)?;
    let n = gram.rows();
    let mut product = ExactMatrix::identity(n);
    for l in &spectrum.lambdas {
        let shifted = gram.sub(&ExactMatrix::identity(n).scale(l))?;
        product = product.mul(&shifted)?;
    }
    Ok(product.is_zero())
}

/// Nullity of `C - lambda(j) I` next to the multiplicity the closed form
/// assigns to that eigenvalue (summed over coinciding eigenvalues).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullityCheck {
    pub j: usize,
    pub nullity: usize,
    pub expected: usize,
}

pub fn eigenspace_nullities(t: usize, k: usize) -> Result<Vec<NullityCheck>> {
    check_gram_size(t, k)?;
    let gram = gram_matrix(t, k)?;
    let spectrum = gram_spectrum(t, k)?;
    let n = gram.rows();
    let mut out = Vec::new();
    for (j, l) in spectrum.lambdas.iter().enumerate() {
        let shifted = gram.sub(&ExactMatrix::identity(n).scale(l))?;
        let nullity = n - exact_rank(&shifted);
        let expected: BigInt = spectrum
            .lambdas
            .iter()
            .zip(&spectrum.multiplicities)
            .filter(|(other, _)| *other == l)
            .map(|(_, m)| m.clone())
            .sum();
        out.push(NullityCheck {
            j,
            nullity,
            expected: expected.try_into().unwrap_or(usize::MAX),
        });
    }
    Ok(out)
}

/// `P_j(k) = sum_{s=0}^{j} (-1)^s C(j,s) k^(j-s) (s+k-j)! / (k-j)!`.
pub fn leading_coefficient(j: usize, k: usize) -> Result<BigInt> {
    if j > k {
        return Err(Error::InvalidParameter(format!("need j <= k, got j={j}, k={k}")));
    }
    let mut acc = BigInt::zero();
    for s in 0..=j {
        let term = BigInt::from(binomial(j as u64, s as i64))
            * num_traits::pow(BigInt::from(k), j - s)
            * (fact(s + k - j) / fact(k - j));
        if s % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

const GOOD_FUNCTION_MAX_K: usize = 8;

/// Brute-force count of the functions `f: Z_j -> Z_k` that are good at every
/// point. `f` is good at `i` when for some `s` in `0..=j-2` the cyclic
/// interval `{f(i), ..., f(i)+s} (mod k)` has more than `s + 1` preimages.
pub fn count_good_functions(j: usize, k: usize) -> Result<u64> {
    if j == 0 || j > k {
        return Err(Error::InvalidParameter(format!("need 1 <= j <= k, got j={j}, k={k}")));
    }
    if k > GOOD_FUNCTION_MAX_K {
        return Err(Error::TooLarge(format!("k = {k} exceeds the brute-force limit {GOOD_FUNCTION_MAX_K}")));
    }
    let total = (k as u64).pow(j as u32);
    let per_head = total / k as u64;
    let count = (0..k as u64)
        .into_par_iter()
        .map(|head| {
            let mut values = vec![0usize; j];
            let mut hist = vec![0usize; k];
            let mut good = 0u64;
            for tail in 0..per_head {
                let mut code = head * per_head + tail;
                hist.iter_mut().for_each(|h| *h = 0);
                for v in values.iter_mut() {
                    *v = (code % k as u64) as usize;
                    code /= k as u64;
                    hist[*v] += 1;
                }
                if values.iter().all(|&y| good_at(y, &hist, j, k)) {
                    good += 1;
                }
            }
            good
        })
        .sum();
    Ok(count)
}

fn good_at(y: usize, hist: &[usize], j: usize, k: usize) -> bool {
    let mut preimage = 0;
    for s in 0..j.saturating_sub(1) {
        preimage += hist[(y + s) % k];
        if preimage > s + 1 {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{enumerate_partitions, is_transversal_labels};
    use crate::rational::int;

    fn p(t: usize, k: usize, i: usize, j: usize) -> i64 {
        eigenvalue_p(t, k, i, j).unwrap().try_into().unwrap()
    }

    #[test]
    fn scheme_matrix_basics() {
        let (t, k) = (7, 3);
        let w0 = build_w(t, k, 0).unwrap().matrix;
        assert_eq!(w0, ExactMatrix::identity(35));
        let mut sum = ExactMatrix::zeros(35, 35);
        for i in 0..=k {
            let w = build_w(t, k, i).unwrap().matrix;
            assert!(w.is_symmetric());
            let expected = int((choose(k, i) * choose(t - k, i)) as i64);
            assert!(w.row_sums().iter().all(|s| *s == expected));
            sum = sum.add(&w).unwrap();
        }
        assert!(sum.entries().iter().all(|x| x.is_one()));
        assert!(build_w(3, 4, 0).is_err());
        assert!(build_w(7, 3, 4).is_err());
    }

    #[test]
    fn eigenvalues_of_w_are_realised() {
        // W_i times any vector of the j-th eigenspace is p_i(j) times it; check
        // via nullities of W_i - p_i(j) I at t=7, k=3
        let (t, k) = (7, 3);
        for i in 0..=k {
            let w = build_w(t, k, i).unwrap().matrix;
            for j in 0..=k {
                let l = BigRational::from_integer(eigenvalue_p(t, k, i, j).unwrap());
                let shifted = w.sub(&ExactMatrix::identity(35).scale(&l)).unwrap();
                let nullity = 35 - exact_rank(&shifted);
                let expected: i64 = (0..=k)
                    .filter(|&jj| eigenvalue_p(t, k, i, jj).unwrap() == eigenvalue_p(t, k, i, j).unwrap())
                    .map(|jj| i64::try_from(multiplicity(t, jj)).unwrap())
                    .sum();
                assert_eq!(nullity as i64, expected, "i={i} j={j}");
            }
        }
    }

    #[test]
    fn eigenvalue_examples() {
        for j in 0..=3 {
            assert_eq!(p(12, 3, 0, j), 1);
        }
        assert_eq!(p(12, 3, 3, 3), -1);
        assert_eq!(p(12, 3, 2, 3), 3);
        assert_eq!(p(12, 3, 1, 3), -3);
        assert_eq!(p(12, 3, 1, 1), 15);
    }

    #[test]
    fn multiplicity_examples() {
        assert_eq!(multiplicity(10, 0), BigInt::one());
        assert_eq!(multiplicity(10, 1), BigInt::from(9));
        for (t, k) in [(8, 2), (12, 3), (16, 4)] {
            let total: BigInt = (0..=k).map(|j| multiplicity(t, j)).sum();
            assert_eq!(total, BigInt::from(choose(t, k)));
        }
    }

    /// Brute force: balanced k-cuts of [t] with both `x` and `y` transversal.
    fn brute_alpha(t: usize, k: usize, x: &[usize], y: &[usize]) -> i64 {
        enumerate_partitions(t, &vec![t / k; k])
            .unwrap()
            .iter()
            .filter(|p| {
                let labels = p.labels();
                is_transversal_labels(x, &labels) && is_transversal_labels(y, &labels)
            })
            .count() as i64
    }

    #[test]
    fn alpha_matches_brute_force_counts() {
        assert_eq!(alpha(6, 3, 0).unwrap(), int(6));
        assert_eq!(alpha(6, 3, 3).unwrap(), int(6));
        assert_eq!(brute_alpha(6, 3, &[1, 2, 3], &[1, 2, 3]), 6);
        assert_eq!(brute_alpha(6, 3, &[1, 2, 3], &[4, 5, 6]), 6);
        for (t, k) in [(6, 2), (8, 2), (6, 3), (9, 3), (8, 4)] {
            let x: Vec<usize> = (1..=k).collect();
            for i in 0..=k {
                // keep k - i points of x and replace i of them by points outside x
                let mut y: Vec<usize> = (1..=k - i).collect();
                y.extend((k + 1)..=(k + i));
                assert_eq!(alpha(t, k, i).unwrap(), int(brute_alpha(t, k, &x, &y)), "t={t} k={k} i={i}");
            }
        }
        assert!(alpha(7, 3, 0).is_err());
        assert!(alpha(3, 3, 0).is_err());
    }

    #[test]
    fn alpha_star_routes_agree() {
        for k in 2..=5 {
            for m in 2..=6 {
                let t = k * m;
                let norm = alpha_normalizer(t, k).unwrap();
                let first = &alpha_star(t, k, 0).unwrap() / &alpha(t, k, 0).unwrap();
                for i in 0..=k {
                    let a = alpha(t, k, i).unwrap();
                    assert_eq!(alpha_star(t, k, i).unwrap(), &a * &norm);
                    assert_eq!(&alpha_star(t, k, i).unwrap() / &a, first);
                }
            }
        }
        assert_eq!(alpha_star(12, 3, 0).unwrap(), int(504));
        assert_eq!(alpha_star(12, 3, 3).unwrap(), int(162));
    }

    #[test]
    fn spectrum_k3_t12() {
        let s = gram_spectrum(12, 3).unwrap();
        assert!(s.lambda_stars[1].is_zero());
        assert!(s.lambda_stars[2].is_positive());
        assert!(s.lambda_stars[3].is_positive());
        assert!(s.has_expected_signs());
        assert_eq!(s.implied_rank(), BigInt::from(209));
    }

    #[test]
    fn gram_decomposition_small() {
        assert!(verify_gram_decomposition(6, 2).unwrap());
        assert!(verify_gram_decomposition(6, 3).unwrap());
        assert!(verify_gram_decomposition(8, 2).unwrap());
        assert!(matches!(verify_gram_decomposition(15, 3), Err(Error::TooLarge(_))));
    }

    #[test]
    fn gram_matrix_equals_explicit_product() {
        use crate::intersection::build_a;
        for (t, k) in [(6, 2), (8, 2), (6, 3)] {
            let a = build_a(t, k, &balanced_sizes(t, k).unwrap()).unwrap();
            assert_eq!(gram_matrix(t, k).unwrap(), a.transpose().mul(&a).unwrap());
        }
    }

    /// Hand-expanded k = 3 eigenvalue polynomials, indexed `[j][i]`.
    fn table_k3(t: i64) -> [[i64; 4]; 4] {
        let c2 = |n: i64| n * (n - 1) / 2;
        let c3 = |n: i64| n * (n - 1) * (n - 2) / 6;
        [
            [1, -3 + 3 * (t - 2), 3 - 6 * (t - 2) + 3 * c2(t - 1), -1 + 3 * (t - 2) - 3 * c2(t - 1) + c3(t)],
            [1, -3 + 2 * (t - 3), 3 - 4 * (t - 3) + c2(t - 2), -1 + 2 * (t - 3) - c2(t - 2)],
            [1, -3 + (t - 4), 3 - 2 * (t - 4), -1 + (t - 4)],
            [1, -3, 3, -1],
        ]
    }

    #[test]
    fn k3_eigenvalue_table() {
        for t in [12usize, 15, 18] {
            let table = table_k3(t as i64);
            for j in 0..=3 {
                for i in 0..=3 {
                    assert_eq!(p(t, 3, i, j), table[j][i], "t={t} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn lambda_star_degree_ratio() {
        // the ratio approaches 2^(2k-j) slowly: at t = 10k it is still up to
        // 1.48 times that for k = 5, so the comparison runs at t = 40k
        for k in 2..=5usize {
            let t = 40 * k;
            let (a, b) = (gram_spectrum(t, k).unwrap(), gram_spectrum(2 * t, k).unwrap());
            for j in (0..=k).filter(|&j| j != 1) {
                let ratio = crate::rational::to_f64(&(&b.lambda_stars[j] / &a.lambda_stars[j]));
                let scale = 2f64.powi((2 * k - j) as i32);
                assert!(ratio > 0.8 * scale && ratio < 1.2 * scale, "k={k} j={j} ratio={ratio}");
            }
        }
    }

    #[test]
    fn nullities_match_multiplicities() {
        for (t, k) in [(6, 2), (8, 2), (6, 3)] {
            for c in eigenspace_nullities(t, k).unwrap() {
                assert_eq!(c.nullity, c.expected, "t={t} k={k} j={}", c.j);
            }
        }
        assert!(verify_annihilation(6, 3).unwrap());
    }

    #[test]
    fn trace_two_ways() {
        for (t, k) in [(6, 2), (8, 2), (6, 3)] {
            let c = gram_matrix(t, k).unwrap();
            let s = gram_spectrum(t, k).unwrap();
            let via_alpha = &s.alphas[0] * int(choose(t, k) as i64);
            let via_spectrum: BigRational = s
                .lambdas
                .iter()
                .zip(&s.multiplicities)
                .map(|(l, m)| l * BigRational::from_integer(m.clone()))
                .sum();
            assert_eq!(c.trace(), via_alpha);
            assert_eq!(c.trace(), via_spectrum);
        }
    }

    #[test]
    fn leading_coefficient_examples() {
        for k in 0..=12 {
            assert_eq!(leading_coefficient(0, k).unwrap(), BigInt::one());
        }
        for k in 1..=12 {
            assert!(leading_coefficient(1, k).unwrap().is_zero());
        }
        assert_eq!(leading_coefficient(2, 3).unwrap(), BigInt::from(3));
        assert!(leading_coefficient(4, 3).is_err());
    }

    #[test]
    fn good_function_examples() {
        assert_eq!(count_good_functions(2, 2).unwrap(), 2);
        assert_eq!(count_good_functions(2, 3).unwrap(), 3);
        assert_eq!(count_good_functions(1, 4).unwrap(), 0);
        assert!(count_good_functions(0, 4).is_err());
        for k in 2..=6 {
            for j in 2..=k {
                assert_eq!(BigInt::from(count_good_functions(j, k).unwrap()), leading_coefficient(j, k).unwrap());
            }
        }
        assert!(count_good_functions(3, 2).is_err());
        assert!(count_good_functions(2, 9).is_err());
    }

    #[test]
    fn constant_functions_are_good() {
        for k in 2..=6 {
            for j in 2..=k {
                let mut hist = vec![0; k];
                for y in 0..k {
                    hist.iter_mut().for_each(|h| *h = 0);
                    hist[y] = j;
                    assert!(good_at(y, &hist, j, k));
                }
            }
        }
    }
}
