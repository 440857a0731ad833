//! Harmonic analysis on the symmetric group S(d): irreducible characters,
//! dimensions, Young-diagram contents, Jucys-Murphy elements, the q-weighted
//! sum over the group, strictly monotone factorizations, and monotone walk
//! counting on the transposition Cayley graph.
//!
//! All group algebra arithmetic uses the crate-wide right-to-left composition
//! convention. Young diagrams are read in English notation (rows top to
//! bottom), so the content of a cell is its column index minus its row index.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::combinat::{word_norm, IntegerPartition, Permutation};
use crate::exactalg::{br_int, BigRational, UniPolynomial};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymCharError(pub String);

impl fmt::Display for SymCharError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn err<T>(msg: &str) -> Result<T, SymCharError> {
    Err(SymCharError(String::from(msg)))
}

/// Dimension of the irreducible S(d)-representation V^lambda, by the hook
/// length formula. Satisfies `sum over lambda of dim^2 = d!`.
pub fn hook_dimension(lam: &IntegerPartition) -> u64 {
    let d = lam.weight();
    let rows = lam.parts();
    // Column lengths of the conjugate diagram.
    let col_len = |j: usize| rows.iter().filter(|&&r| r > j).count();
    let mut hooks: u128 = 1;
    for (i, &row) in rows.iter().enumerate() {
        for j in 0..row {
            let arm = row - j - 1;
            let leg = col_len(j) - i - 1;
            hooks *= (arm + leg + 1) as u128;
        }
    }
    (crate::combinat::factorial(d) / hooks) as u64
}

/// Sorted multiset of contents (column minus row) of the cells of a diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContentMultiset {
    values: Vec<i64>,
}

impl ContentMultiset {
    pub fn values(&self) -> &[i64] {
        &self.values
    }
}

/// Contents of a Young diagram, sorted ascending.
pub fn contents(lam: &IntegerPartition) -> ContentMultiset {
    let mut values = Vec::with_capacity(lam.weight());
    for (i, &row) in lam.parts().iter().enumerate() {
        for j in 0..row {
            values.push(j as i64 - i as i64);
        }
    }
    values.sort_unstable();
    ContentMultiset { values }
}

/// The polynomial `prod over cells (N + content)`, degree |lambda|.
pub fn content_product(lam: &IntegerPartition) -> UniPolynomial {
    let mut p = UniPolynomial::one();
    for &c in contents(lam).values() {
        p = p.mul(&UniPolynomial::from_int_coeffs(&[c, 1]));
    }
    p
}

/// Elementary symmetric polynomial e_r evaluated on the contents of lambda.
pub fn elementary_on_contents(r: usize, lam: &IntegerPartition) -> i64 {
    let xs = contents(lam);
    // dp[k] = e_k of the values seen so far.
    let mut dp = vec![0i64; r + 1];
    dp[0] = 1;
    for &x in xs.values() {
        for k in (1..=r).rev() {
            dp[k] += x * dp[k - 1];
        }
    }
    dp[r]
}

/// Complete homogeneous symmetric polynomial h_r on the contents of lambda.
pub fn complete_on_contents(r: usize, lam: &IntegerPartition) -> i64 {
    let xs = contents(lam);
    // dp[k] = h_k of the values seen so far; each new value may repeat.
    let mut dp = vec![0i64; r + 1];
    dp[0] = 1;
    for &x in xs.values() {
        for k in 1..=r {
            dp[k] += x * dp[k - 1];
        }
    }
    dp[r]
}

/// Irreducible character chi^lambda evaluated on the class alpha, by the
/// Murnaghan-Nakayama rule on beta-numbers (first-column hook lengths):
/// removing a border strip of length t moves one beta-number down by t, with
/// sign (-1)^(number of beta-numbers jumped over).
pub fn mn_character(
    lam: &IntegerPartition,
    alpha: &IntegerPartition,
) -> Result<i64, SymCharError> {
    if lam.weight() != alpha.weight() {
        return err("character arguments must partition the same integer");
    }
    if lam.weight() == 0 {
        return Ok(1);
    }
    let rows = lam.len();
    // Beta-numbers, kept sorted descending.
    let beta: Vec<usize> = lam
        .parts()
        .iter()
        .enumerate()
        .map(|(i, &part)| part + (rows - 1 - i))
        .collect();
    let mut memo: BTreeMap<(Vec<usize>, usize), i64> = BTreeMap::new();
    Ok(mn_recurse(&beta, alpha.parts(), 0, &mut memo))
}

fn mn_recurse(
    beta: &[usize],
    parts: &[usize],
    idx: usize,
    memo: &mut BTreeMap<(Vec<usize>, usize), i64>,
) -> i64 {
    if idx == parts.len() {
        return 1;
    }
    let key = (beta.to_vec(), idx);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let t = parts[idx];
    let mut total = 0i64;
    for (pos, &b) in beta.iter().enumerate() {
        if b < t || beta.contains(&(b - t)) {
            continue;
        }
        let target = b - t;
        let jumped = beta.iter().filter(|&&x| x < b && x > target).count();
        let sign = if jumped % 2 == 0 { 1 } else { -1 };
        let mut next: Vec<usize> = beta.to_vec();
        next[pos] = target;
        next.sort_unstable_by(|a, b| b.cmp(a));
        total += sign * mn_recurse(&next, parts, idx + 1, memo);
    }
    memo.insert(key, total);
    total
}

/// An element of the group algebra of S(d) with coefficients in Q[q].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAlgebraElement {
    degree: usize,
    terms: BTreeMap<Permutation, UniPolynomial>,
}

impl GroupAlgebraElement {
    pub fn zero(degree: usize) -> Self {
        GroupAlgebraElement {
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// The identity permutation with coefficient 1.
    pub fn identity(degree: usize) -> Self {
        GroupAlgebraElement::from_term(Permutation::identity(degree), UniPolynomial::one())
    }

    pub fn from_term(p: Permutation, coeff: UniPolynomial) -> Self {
        let degree = p.degree();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(p, coeff);
        }
        GroupAlgebraElement { degree, terms }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Permutation, UniPolynomial> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of a permutation (zero when absent).
    pub fn coeff(&self, p: &Permutation) -> UniPolynomial {
        self.terms.get(p).cloned().unwrap_or_else(UniPolynomial::zero)
    }

    fn insert_scaled(&mut self, p: Permutation, coeff: UniPolynomial) {
        if coeff.is_zero() {
            return;
        }
        let merged = match self.terms.get(&p) {
            Some(old) => old.add(&coeff),
            None => coeff,
        };
        if merged.is_zero() {
            self.terms.remove(&p);
        } else {
            self.terms.insert(p, merged);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SymCharError> {
        if self.degree != other.degree {
            return err("group algebra degrees differ");
        }
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.insert_scaled(p.clone(), c.clone());
        }
        Ok(out)
    }

    /// Convolution product under the global convention: the term for (p, q)
    /// lands on the permutation x -> p(q(x)).
    pub fn mul(&self, other: &Self) -> Result<Self, SymCharError> {
        if self.degree != other.degree {
            return err("group algebra degrees differ");
        }
        let mut out = GroupAlgebraElement::zero(self.degree);
        for (p, cp) in &self.terms {
            for (q, cq) in &other.terms {
                out.insert_scaled(p.compose(q), cp.mul(cq));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &UniPolynomial) -> Self {
        let mut out = GroupAlgebraElement::zero(self.degree);
        for (p, cp) in &self.terms {
            out.insert_scaled(p.clone(), cp.mul(c));
        }
        out
    }
}

/// The Jucys-Murphy element J_j = sum of transpositions (i j) for i < j;
/// J_1 = 0.
pub fn jm_element(j: usize, d: usize) -> Result<GroupAlgebraElement, SymCharError> {
    if j == 0 || j > d {
        return err("Jucys-Murphy index out of range");
    }
    let mut out = GroupAlgebraElement::zero(d);
    for i in 1..j {
        out.insert_scaled(Permutation::transposition(d, i, j), UniPolynomial::one());
    }
    Ok(out)
}

/// The level sum L_r = sum of all permutations with word norm r. Empty (zero
/// element) when r >= d, since the norm in S(d) is at most d-1.
pub fn sphere_sum(r: usize, d: usize) -> GroupAlgebraElement {
    let mut out = GroupAlgebraElement::zero(d);
    if r >= d {
        return out;
    }
    for p in Permutation::all(d) {
        if word_norm(&p) == r {
            out.insert_scaled(p, UniPolynomial::one());
        }
    }
    out
}

/// The q-weighted group sum: sum over all permutations of q^(word norm).
pub fn gamma_element(d: usize) -> GroupAlgebraElement {
    let mut out = GroupAlgebraElement::zero(d);
    for p in Permutation::all(d) {
        let norm = word_norm(&p);
        out.insert_scaled(p, UniPolynomial::monomial(br_int(1), norm));
    }
    out
}

/// The same element as a product of commuting factors (identity + q J_k),
/// k = 1..d; equality with `gamma_element` is asserted by tests.
pub fn gamma_by_jucys_product(d: usize) -> Result<GroupAlgebraElement, SymCharError> {
    let q = UniPolynomial::variable();
    let mut acc = GroupAlgebraElement::identity(d);
    for k in 1..=d {
        let factor = GroupAlgebraElement::identity(d).add(&jm_element(k, d)?.scale(&q))?;
        acc = acc.mul(&factor)?;
    }
    Ok(acc)
}

/// The elementary symmetric polynomial e_r evaluated on all d Jucys-Murphy
/// elements, expanded in the group algebra.
pub fn elementary_in_jucys(r: usize, d: usize) -> Result<GroupAlgebraElement, SymCharError> {
    // dp[k] = e_k(J_1..J_j) after processing J_j; the J's commute, so the
    // one-pass elementary-symmetric recurrence applies verbatim.
    let mut dp: Vec<GroupAlgebraElement> = Vec::with_capacity(r + 1);
    dp.push(GroupAlgebraElement::identity(d));
    for _ in 0..r {
        dp.push(GroupAlgebraElement::zero(d));
    }
    for j in 1..=d {
        let jj = jm_element(j, d)?;
        for k in (1..=r).rev() {
            let bump = dp[k - 1].mul(&jj)?;
            dp[k] = dp[k].add(&bump)?;
        }
    }
    Ok(dp.pop().expect("dp has r+1 entries"))
}

/// The unique factorization of p into transpositions (i_1,j_1)...(i_r,j_r)
/// with strictly increasing labels j_1 < j_2 < ... and r = word_norm(p);
/// the product under the global convention recovers p.
pub fn strictly_monotone_factorization(p: &Permutation) -> Vec<(usize, usize)> {
    let d = p.degree();
    let mut cur = p.clone();
    let mut reversed = Vec::new();
    loop {
        // Largest symbol still moved; peeling (p^-1(m), m) fixes it.
        let Some(m) = (1..=d).rev().find(|&x| cur.apply(x) != x) else {
            break;
        };
        let i = cur.inverse().apply(m);
        reversed.push((i, m));
        cur = cur.compose(&Permutation::transposition(d, i, m));
    }
    reversed.reverse();
    reversed
}

/// Number of walks rho -> sigma of the given length on the transposition
/// Cayley graph whose edge labels (the larger moved symbol) are weakly
/// (or, with `strict`, strictly) increasing along the walk.
pub fn count_monotone_walks(
    rho: &Permutation,
    sigma: &Permutation,
    length: usize,
    strict: bool,
) -> Result<u64, SymCharError> {
    if rho.degree() != sigma.degree() {
        return err("walk endpoints must have the same degree");
    }
    // A walk rho, rho.t1, ..., sigma corresponds to a monotone factorization
    // t1 ... tL of rho^-1 sigma, counted by peeling the last (largest-label)
    // factor.
    let pi = rho.inverse().compose(sigma);
    let d = pi.degree();
    let mut memo: BTreeMap<(Vec<usize>, usize, usize), u64> = BTreeMap::new();
    Ok(walk_count(&pi, length, d, strict, &mut memo))
}

/// The product `prod_i binom(2 a_i, a_i) / a_i` over the parts of `alpha`.
///
/// This is one closed-form candidate for the minimal-length monotone walk
/// count of a permutation with cycle type `alpha`; it disagrees with direct
/// enumeration already at `alpha = (3)` (20/3 against a true count of 2), so
/// callers must treat `count_monotone_walks` as ground truth and surface this
/// value only for comparison.
pub fn central_binomial_product(alpha: &IntegerPartition) -> Result<BigRational, SymCharError> {
    let mut out = BigRational::one();
    for &a in alpha.parts() {
        if a == 0 {
            return err("partition parts must be positive");
        }
        out *= BigRational::new(binomial(2 * a, a), BigInt::from(a));
    }
    Ok(out)
}

/// The product `prod_i Catalan(a_i - 1) = prod_i binom(2 a_i - 2, a_i - 1) / a_i`
/// over the parts of `alpha`: the Catalan-number closed form that matches
/// direct minimal-walk enumeration on cycles.
pub fn catalan_product(alpha: &IntegerPartition) -> Result<BigRational, SymCharError> {
    let mut out = BigRational::one();
    for &a in alpha.parts() {
        if a == 0 {
            return err("partition parts must be positive");
        }
        out *= BigRational::new(binomial(2 * a - 2, a - 1), BigInt::from(a));
    }
    Ok(out)
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut out = BigInt::one();
    for i in 0..k.min(n - k) {
        out = out * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    out
}

fn walk_count(
    pi: &Permutation,
    remaining: usize,
    cap: usize,
    strict: bool,
    memo: &mut BTreeMap<(Vec<usize>, usize, usize), u64>,
) -> u64 {
    if remaining == 0 {
        return u64::from(pi.is_identity());
    }
    let key = (pi.images().to_vec(), remaining, cap);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let d = pi.degree();
    let mut total = 0u64;
    for j in 2..=cap.min(d) {
        for i in 1..j {
            let next = pi.compose(&Permutation::transposition(d, i, j));
            let next_cap = if strict { j - 1 } else { j };
            total += walk_count(&next, remaining - 1, next_cap, strict, memo);
        }
    }
    memo.insert(key, total);
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::{cycle_type, sign};
    use crate::exactalg::br;
    use proptest::prelude::*;
    use std::collections::BTreeMap as StdBTreeMap;

    fn ptn(parts: &[usize]) -> IntegerPartition {
        IntegerPartition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn closed_form_walk_products() {
        // The two closed-form candidates diverge at (3): 20/3 against the
        // true count 2.
        assert_eq!(central_binomial_product(&ptn(&[3])).unwrap(), br(20, 3));
        assert_eq!(catalan_product(&ptn(&[3])).unwrap(), br(2, 1));

        // Direct enumeration at minimal length matches the Catalan product
        // on every class of S(d), d <= 5.
        for d in 1..=5usize {
            for alpha in IntegerPartition::all(d) {
                let pi = alpha.representative();
                let id = Permutation::identity(d);
                let w0 = count_monotone_walks(&id, &pi, word_norm(&pi), false).unwrap();
                assert_eq!(
                    BigRational::from_integer(w0.into()),
                    catalan_product(&alpha).unwrap(),
                    "class {alpha:?}"
                );
            }
        }
    }

    fn perm(images: &[usize]) -> Permutation {
        Permutation::from_images(images.to_vec()).unwrap()
    }

    #[test]
    fn hook_dimension_examples() {
        assert_eq!(hook_dimension(&ptn(&[4])), 1);
        assert_eq!(hook_dimension(&ptn(&[1, 1, 1, 1])), 1);
        assert_eq!(hook_dimension(&ptn(&[2, 2])), 2);
        assert_eq!(hook_dimension(&ptn(&[2, 1])), 2);
        assert_eq!(hook_dimension(&ptn(&[3, 2])), 5);
        // Sum of squared dimensions is d!.
        for d in 1..=8 {
            let total: u128 = IntegerPartition::all(d)
                .iter()
                .map(|lam| (hook_dimension(lam) as u128).pow(2))
                .sum();
            assert_eq!(total, crate::combinat::factorial(d));
        }
    }

    #[test]
    fn contents_examples() {
        assert_eq!(contents(&ptn(&[3])).values(), &[0, 1, 2]);
        assert_eq!(contents(&ptn(&[1, 1, 1])).values(), &[-2, -1, 0]);
        assert_eq!(contents(&ptn(&[2, 1])).values(), &[-1, 0, 1]);
    }

    #[test]
    fn content_product_examples() {
        // (3): N(N+1)(N+2) = 2N + 3N^2 + N^3.
        assert_eq!(
            content_product(&ptn(&[3])),
            UniPolynomial::from_int_coeffs(&[0, 2, 3, 1])
        );
        // (2,1): N(N+1)(N-1) = -N + N^3.
        assert_eq!(
            content_product(&ptn(&[2, 1])),
            UniPolynomial::from_int_coeffs(&[0, -1, 0, 1])
        );
        assert_eq!(
            content_product(&ptn(&[1])),
            UniPolynomial::from_int_coeffs(&[0, 1])
        );
    }

    #[test]
    fn symmetric_function_evaluations() {
        assert_eq!(elementary_on_contents(1, &ptn(&[2, 1])), 0);
        // e_r on (d) is e_r(0, 1, ..., d-1).
        assert_eq!(elementary_on_contents(2, &ptn(&[4])), 11); // e_2(0,1,2,3)
        assert_eq!(complete_on_contents(2, &ptn(&[2])), 1); // h_2(0,1)
        assert_eq!(elementary_on_contents(0, &ptn(&[3, 1])), 1);
        assert_eq!(complete_on_contents(0, &ptn(&[3, 1])), 1);
        // e_r vanishes beyond the number of cells.
        assert_eq!(elementary_on_contents(4, &ptn(&[2, 1])), 0);
    }

    #[test]
    fn mn_character_examples() {
        assert_eq!(mn_character(&ptn(&[2, 1]), &ptn(&[3])).unwrap(), -1);
        // Trivial and sign characters.
        for alpha in IntegerPartition::all(5) {
            assert_eq!(mn_character(&ptn(&[5]), &alpha).unwrap(), 1);
            let expect = if (5 - alpha.len()) % 2 == 0 { 1 } else { -1 };
            assert_eq!(
                mn_character(&ptn(&[1, 1, 1, 1, 1]), &alpha).unwrap(),
                expect
            );
        }
        // Character at the identity class is the dimension.
        for d in 1..=7 {
            let ones = ptn(&vec![1; d]);
            for lam in IntegerPartition::all(d) {
                assert_eq!(
                    mn_character(&lam, &ones).unwrap(),
                    hook_dimension(&lam) as i64
                );
            }
        }
        assert!(mn_character(&ptn(&[2]), &ptn(&[3])).is_err());
    }

    #[test]
    fn character_row_orthogonality() {
        for d in 1..=7 {
            let classes = IntegerPartition::all(d);
            let lams = IntegerPartition::all(d);
            // Precompute the full table.
            let mut table: Vec<Vec<i64>> = Vec::new();
            for lam in &lams {
                table.push(
                    classes
                        .iter()
                        .map(|alpha| mn_character(lam, alpha).unwrap())
                        .collect(),
                );
            }
            let sizes: Vec<i128> = classes.iter().map(|a| a.class_size() as i128).collect();
            for (li, _) in lams.iter().enumerate() {
                for (mi, _) in lams.iter().enumerate() {
                    let dot: i128 = (0..classes.len())
                        .map(|k| sizes[k] * (table[li][k] as i128) * (table[mi][k] as i128))
                        .sum();
                    let expect = if li == mi {
                        crate::combinat::factorial(d) as i128
                    } else {
                        0
                    };
                    assert_eq!(dot, expect, "orthogonality failed at d={d}");
                }
            }
        }
    }

    #[test]
    fn jm_element_examples() {
        assert!(jm_element(1, 3).unwrap().is_zero());
        assert_eq!(
            jm_element(2, 3).unwrap(),
            GroupAlgebraElement::from_term(
                Permutation::transposition(3, 1, 2),
                UniPolynomial::one()
            )
        );
        let j3 = jm_element(3, 3).unwrap();
        assert_eq!(j3.terms().len(), 2);
        assert_eq!(
            j3.coeff(&Permutation::transposition(3, 1, 3)),
            UniPolynomial::one()
        );
        assert_eq!(
            j3.coeff(&Permutation::transposition(3, 2, 3)),
            UniPolynomial::one()
        );
        assert!(jm_element(4, 3).is_err());
        assert!(jm_element(0, 3).is_err());
    }

    #[test]
    fn sphere_sum_examples() {
        assert_eq!(sphere_sum(0, 4), GroupAlgebraElement::identity(4));
        let l1 = sphere_sum(1, 3);
        assert_eq!(l1.terms().len(), 3);
        let l2 = sphere_sum(2, 3);
        assert_eq!(l2.terms().len(), 2);
        assert_eq!(l2.coeff(&perm(&[2, 3, 1])), UniPolynomial::one());
        assert_eq!(l2.coeff(&perm(&[3, 1, 2])), UniPolynomial::one());
        assert!(sphere_sum(3, 3).is_zero());
        assert!(sphere_sum(7, 3).is_zero());
    }

    #[test]
    fn gamma_element_matches_levels() {
        let g3 = gamma_element(3);
        let q = UniPolynomial::variable();
        let expect = GroupAlgebraElement::identity(3)
            .add(&sphere_sum(1, 3).scale(&q))
            .unwrap()
            .add(&sphere_sum(2, 3).scale(&q.pow(2)))
            .unwrap();
        assert_eq!(g3, expect);
        assert_eq!(gamma_element(1), GroupAlgebraElement::identity(1));
    }

    #[test]
    fn gamma_product_identity() {
        for d in 1..=6 {
            assert_eq!(gamma_by_jucys_product(d).unwrap(), gamma_element(d));
        }
    }

    #[test]
    fn jucys_identity() {
        for d in 1..=6 {
            for r in 0..d {
                assert_eq!(
                    elementary_in_jucys(r, d).unwrap(),
                    sphere_sum(r, d),
                    "e_{r}(J) != L_{r} at d={d}"
                );
            }
            // Beyond the top level both sides vanish.
            assert!(elementary_in_jucys(d, d).unwrap().is_zero() || d == 1);
        }
    }

    #[test]
    fn content_series_inverse() {
        // prod(1 + q c) * sum_r (-q)^r h_r(contents) = 1 + O(q^(R+1)).
        let r_max = 6;
        for d in 1..=6 {
            for lam in IntegerPartition::all(d) {
                let mut prod = UniPolynomial::one();
                for &c in contents(&lam).values() {
                    prod = prod.mul(&UniPolynomial::from_int_coeffs(&[1, c]));
                }
                let mut series = UniPolynomial::zero();
                for r in 0..=r_max {
                    let sign = if r % 2 == 0 { 1 } else { -1 };
                    let coeff = br_int(sign * complete_on_contents(r, &lam));
                    series = series.add(&UniPolynomial::monomial(coeff, r));
                }
                let product = prod.mul(&series);
                for k in 0..=r_max {
                    let expect = br_int(i64::from(k == 0));
                    assert_eq!(product.coeff(k), expect, "lambda={lam} k={k}");
                }
            }
        }
    }

    #[test]
    fn factorization_examples() {
        assert!(strictly_monotone_factorization(&Permutation::identity(4)).is_empty());
        assert_eq!(
            strictly_monotone_factorization(&Permutation::transposition(2, 1, 2)),
            vec![(1, 2)]
        );
        assert_eq!(
            strictly_monotone_factorization(&perm(&[2, 3, 1])),
            vec![(1, 2), (2, 3)]
        );
    }

    #[test]
    fn factorization_postconditions() {
        for d in 1..=6 {
            for p in Permutation::all(d) {
                let factors = strictly_monotone_factorization(&p);
                assert_eq!(factors.len(), word_norm(&p));
                // Strictly increasing labels.
                assert!(factors.windows(2).all(|w| w[0].1 < w[1].1));
                // Product recovers p under the global convention.
                let mut prod = Permutation::identity(d);
                for &(i, j) in &factors {
                    prod = prod.compose(&Permutation::transposition(d, i, j));
                }
                assert_eq!(prod, p);
            }
        }
    }

    #[test]
    fn factorization_uniqueness_d4() {
        // Enumerate every strictly monotone product in S(4); since each of
        // the d! label/partner choices yields a distinct product, every
        // permutation must be hit exactly once, by its own factorization.
        let d = 4;
        let mut seen: StdBTreeMap<Permutation, Vec<(usize, usize)>> = StdBTreeMap::new();
        // Choices per label j: skip (0) or pick i < j.
        let mut stack: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
        for j in 2..=d {
            let mut next = Vec::new();
            for f in &stack {
                next.push(f.clone());
                for i in 1..j {
                    let mut g = f.clone();
                    g.push((i, j));
                    next.push(g);
                }
            }
            stack = next;
        }
        assert_eq!(stack.len(), 24);
        for factors in stack {
            let mut prod = Permutation::identity(d);
            for &(i, j) in &factors {
                prod = prod.compose(&Permutation::transposition(d, i, j));
            }
            assert!(
                seen.insert(prod, factors).is_none(),
                "two strictly monotone factorizations for one permutation"
            );
        }
        assert_eq!(seen.len(), 24);
        for (p, factors) in seen {
            assert_eq!(strictly_monotone_factorization(&p), factors);
        }
    }

    #[test]
    fn walk_count_examples() {
        let id3 = Permutation::identity(3);
        assert_eq!(count_monotone_walks(&id3, &id3, 0, false).unwrap(), 1);
        let t = Permutation::transposition(3, 1, 2);
        assert_eq!(count_monotone_walks(&id3, &t, 1, false).unwrap(), 1);
        let c3 = perm(&[2, 3, 1]);
        assert_eq!(count_monotone_walks(&id3, &c3, 2, false).unwrap(), 2);
        assert_eq!(count_monotone_walks(&id3, &c3, 2, true).unwrap(), 1);
        assert!(count_monotone_walks(&id3, &Permutation::identity(4), 2, false).is_err());
    }

    #[test]
    fn walk_parity_vanishing() {
        for d in 1..=4 {
            let all = Permutation::all(d);
            for p in &all {
                let norm = word_norm(p);
                for len in 0..=(norm + 3) {
                    if (len + norm) % 2 == 1 || len < norm {
                        assert_eq!(
                            count_monotone_walks(&Permutation::identity(d), p, len, false)
                                .unwrap(),
                            0
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn strict_walks_reproduce_uniqueness() {
        // Exactly one strict walk of minimal length for every target.
        for d in 1..=5 {
            for p in Permutation::all(d) {
                assert_eq!(
                    count_monotone_walks(&Permutation::identity(d), &p, word_norm(&p), true)
                        .unwrap(),
                    1
                );
            }
        }
    }

    proptest! {
        #[test]
        fn character_is_a_class_function(seed in 0u64..2000) {
            let d = 2 + (seed % 4) as usize;
            let all = Permutation::all(d);
            let p = &all[(seed as usize * 31) % all.len()];
            let g = &all[(seed as usize * 17) % all.len()];
            let conj = g.compose(p).compose(&g.inverse());
            for lam in IntegerPartition::all(d) {
                prop_assert_eq!(
                    mn_character(&lam, &cycle_type(p)).unwrap(),
                    mn_character(&lam, &cycle_type(&conj)).unwrap()
                );
            }
        }

        #[test]
        fn walk_counts_shift_invariance(seed in 0u64..500) {
            // Counts depend only on rho^-1 sigma.
            let d = 2 + (seed % 3) as usize;
            let all = Permutation::all(d);
            let rho = &all[(seed as usize * 13) % all.len()];
            let sigma = &all[(seed as usize * 29) % all.len()];
            let g = &all[(seed as usize * 7) % all.len()];
            let pi = rho.inverse().compose(sigma);
            let len = word_norm(&pi) + 2;
            let a = count_monotone_walks(rho, sigma, len, false).unwrap();
            let b = count_monotone_walks(&g.compose(rho), &g.compose(sigma), len, false).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn sign_character_matches_sign(seed in 0u64..500) {
            let d = 1 + (seed % 5) as usize;
            let all = Permutation::all(d);
            let p = &all[(seed as usize * 11) % all.len()];
            let lam = IntegerPartition::new(vec![1; d]).unwrap();
            prop_assert_eq!(
                mn_character(&lam, &cycle_type(p)).unwrap(),
                sign(p)
            );
        }
    }
}
