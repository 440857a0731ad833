//! Exact Weingarten tables for matrix-entry integration over the classical
//! compact groups and the circular ensembles.
//!
//! The construction is one theme with per-group variations. Each group acts
//! on a tensor power, the commutant is spanned by invariant vectors indexed
//! by combinatorial labels (set partitions, permutations of `[d]`, or
//! pairings of `[2d]`), and the Gram matrix of those vectors is known in
//! closed form as a polynomial in the rank parameter. The Weingarten table
//! is the inverse of that Gram matrix in the stable range, or its
//! Moore-Penrose pseudoinverse below it, compressed to one representative
//! value per class label whenever the weights are a class function.
//!
//! Solved tables are certified, not trusted: the class ansatz reduces the
//! inversion to a small linear system, and the solution is then substituted
//! back into every row of the full Gram system. Because class labels are
//! invariant under simultaneous translation of both indices, the all-rows
//! check against the identity column is equivalent to the full matrix
//! identity `G W = I`, so a returned table is correct independently of the
//! centrality argument that motivated the ansatz.
//!
//! Pseudoinverse tables run a consistency check instead: the computed
//! weights must be a class function (a signed class function for the
//! symplectic group), and the entrywise matrix is carried alongside the
//! class summary so unstable-range integration loses nothing.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::combinat::{
    coset_type, cycle_type, enumerate_pairings, enumerate_set_partitions, fiber_type,
    longest_decreasing_subsequence, pairing_to_permutation, sign, CombinatError, IndexSequence,
    IntegerPartition, Pairing, Permutation, SetPartition,
};
use crate::exactalg::{
    br_int, evaluate, invert_symmetric, pseudo_invert_gram, BigRational, ExactAlgError,
    ExactMatrix, RationalFunction, UniPolynomial,
};
use crate::integrate::{delta_pairing_word, delta_prime_word};
use crate::symchar::{content_product, count_monotone_walks, hook_dimension, mn_character, SymCharError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeingartenError(pub String);

impl fmt::Display for WeingartenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<CombinatError> for WeingartenError {
    fn from(e: CombinatError) -> Self {
        WeingartenError(e.0)
    }
}

impl From<ExactAlgError> for WeingartenError {
    fn from(e: ExactAlgError) -> Self {
        WeingartenError(e.to_string())
    }
}

impl From<SymCharError> for WeingartenError {
    fn from(e: SymCharError) -> Self {
        WeingartenError(e.0)
    }
}

fn err<T>(msg: &str) -> Result<T, WeingartenError> {
    Err(WeingartenError(String::from(msg)))
}

/// The matrix ensembles with exact Weingarten tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[allow(clippy::upper_case_acronyms)]
pub enum GroupKind {
    /// S(N) in its permutation-matrix representation.
    SymmetricPermRep,
    /// U(N); monomials mix plain and conjugated entries.
    UnitaryAdjoint,
    /// O(N), real orthogonal matrices.
    Orthogonal,
    /// Sp(N), the compact symplectic group as 2N x 2N unitary matrices
    /// preserving the skew form J.
    Symplectic,
    /// Circular orthogonal ensemble: symmetric unitary N x N matrices.
    COE,
    /// Circular symplectic ensemble: self-dual unitary 2N x 2N matrices.
    CSE,
}

impl GroupKind {
    pub fn parse(text: &str) -> Result<GroupKind, WeingartenError> {
        match text {
            "S" => Ok(GroupKind::SymmetricPermRep),
            "U" => Ok(GroupKind::UnitaryAdjoint),
            "O" => Ok(GroupKind::Orthogonal),
            "Sp" => Ok(GroupKind::Symplectic),
            "COE" => Ok(GroupKind::COE),
            "CSE" => Ok(GroupKind::CSE),
            other => Err(WeingartenError(format!(
                "unknown group {other:?} (expected S, U, O, Sp, COE, or CSE)"
            ))),
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GroupKind::SymmetricPermRep => "S",
            GroupKind::UnitaryAdjoint => "U",
            GroupKind::Orthogonal => "O",
            GroupKind::Symplectic => "Sp",
            GroupKind::COE => "COE",
            GroupKind::CSE => "CSE",
        };
        write!(f, "{s}")
    }
}

/// Whether a table is a rational function of the rank parameter or an exact
/// number at one fixed rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Regime {
    Symbolic,
    Numeric(i64),
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Symbolic => write!(f, "symbolic"),
            Regime::Numeric(n) => write!(f, "numeric(N={n})"),
        }
    }
}

/// Label of one invariant vector: the index set depends on the group.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InvariantLabel {
    /// Set partition of `[d]` (symmetric group).
    Blocks(SetPartition),
    /// Permutation of `[d]` (unitary group).
    Perm(Permutation),
    /// Pairing of `[2d]` (orthogonal and symplectic groups).
    Pair(Pairing),
}

impl fmt::Display for InvariantLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvariantLabel::Blocks(b) => write!(f, "{b}"),
            InvariantLabel::Perm(p) => write!(f, "{p}"),
            InvariantLabel::Pair(p) => write!(f, "{p}"),
        }
    }
}

/// Gram matrix of the invariant vectors of one group at one degree, together
/// with the label order its rows and columns follow.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix<F> {
    group: GroupKind,
    degree: usize,
    labels: Vec<InvariantLabel>,
    matrix: ExactMatrix<F>,
}

impl<F> GramMatrix<F> {
    pub fn group(&self) -> GroupKind {
        self.group
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn labels(&self) -> &[InvariantLabel] {
        &self.labels
    }

    pub fn matrix(&self) -> &ExactMatrix<F> {
        &self.matrix
    }

    pub fn label_index(&self, label: &InvariantLabel) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

impl GramMatrix<RationalFunction> {
    /// Evaluates every entry at an integer rank; errors on a pole (the
    /// symbolic Grams are polynomial, so this only guards misuse).
    pub fn evaluate_at(&self, n: i64) -> Result<GramMatrix<BigRational>, WeingartenError> {
        let at = br_int(n);
        let mut out = ExactMatrix::zero(self.matrix.rows(), self.matrix.cols());
        for i in 0..self.matrix.rows() {
            for j in 0..self.matrix.cols() {
                out.set(i, j, evaluate(self.matrix.get(i, j), &at)?);
            }
        }
        Ok(GramMatrix {
            group: self.group,
            degree: self.degree,
            labels: self.labels.clone(),
            matrix: out,
        })
    }
}

fn factorial_br(d: usize) -> BigRational {
    let mut acc = BigRational::one();
    for k in 1..=d {
        acc *= br_int(k as i64);
    }
    acc
}

fn int_pow_br(base: i64, exp: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..exp {
        acc *= br_int(base);
    }
    acc
}

/// Powers `z^0 ..= z^kmax` of a rational function.
fn rf_powers(z: &RationalFunction, kmax: usize) -> Vec<RationalFunction> {
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(RationalFunction::one());
    for k in 1..=kmax {
        out.push(out[k - 1].mul(z));
    }
    out
}

/// The pairing `{{1,2},{3,4},...}` of `[2d]`; its flattened permutation is
/// the identity, which makes it the natural base point for coset types.
pub fn trivial_pairing(d: usize) -> Pairing {
    Pairing::new((0..d).map(|r| (2 * r + 1, 2 * r + 2)).collect())
        .expect("consecutive pairs form a pairing")
}

/// A pairing whose coset type relative to the trivial pairing is `mu`: per
/// part `k`, the cyclic shift pairing `{2,3},{4,5},...,{2k,1}` on a block of
/// `2k` fresh points, so the union with the trivial pairs is one cycle of
/// length `2k`.
pub fn representative_pairing(mu: &IntegerPartition) -> Pairing {
    let mut pairs = Vec::with_capacity(mu.weight());
    let mut offset = 0usize;
    for &k in mu.parts() {
        for r in 1..k {
            pairs.push((offset + 2 * r, offset + 2 * r + 1));
        }
        pairs.push((offset + 2 * k, offset + 1));
        offset += 2 * k;
    }
    Pairing::new(pairs).expect("block construction yields a pairing")
}

/// The staircase permutation of `[2d]` with coset type `mu`: per part `k`,
/// the block permutation with one-line images `(1, 2k, 2, 3, ..., 2k-1)`.
/// Every staircase is even, so it carries no symplectic sign of its own.
pub fn coset_representative(mu: &IntegerPartition) -> Permutation {
    let mut images = Vec::with_capacity(2 * mu.weight());
    let mut offset = 0usize;
    for &k in mu.parts() {
        images.push(offset + 1);
        images.push(offset + 2 * k);
        for j in 3..=2 * k {
            images.push(offset + j - 1);
        }
        offset += 2 * k;
    }
    Permutation::from_images(images).expect("staircase blocks form a permutation")
}

/// Coset type of a pair of pairings: the join of their pair systems, read
/// off as the coset type of `p_s^{-1} p_t` under the flattened-permutation
/// identification. Symmetric in its arguments.
pub fn pairing_class(s: &Pairing, t: &Pairing) -> Result<IntegerPartition, WeingartenError> {
    let ps = pairing_to_permutation(s);
    let pt = pairing_to_permutation(t);
    Ok(coset_type(&ps.inverse().compose(&pt))?)
}

/// Gram matrix of the symmetric-group invariant vectors: indicators of fiber
/// set partitions. Diagonal with entries `N(N-1)...(N-#blocks+1)`.
pub fn gram_symmetric(d: usize) -> Result<GramMatrix<RationalFunction>, WeingartenError> {
    if d == 0 {
        return err("degree must be positive");
    }
    let parts = enumerate_set_partitions(d, d);
    let k = parts.len();
    let matrix = ExactMatrix::from_fn(k, k, |i, j| {
        if i == j {
            RationalFunction::from_polynomial(UniPolynomial::falling_factorial(
                parts[i].block_count(),
            ))
        } else {
            RationalFunction::zero()
        }
    });
    Ok(GramMatrix {
        group: GroupKind::SymmetricPermRep,
        degree: d,
        labels: parts.into_iter().map(InvariantLabel::Blocks).collect(),
        matrix,
    })
}

/// Gram matrix of the unitary-group invariant vectors, indexed by
/// permutations of `[d]`: entry `N^{#cycles(rho^{-1} sigma)}`.
pub fn gram_unitary(d: usize) -> Result<GramMatrix<RationalFunction>, WeingartenError> {
    if d == 0 {
        return err("degree must be positive");
    }
    let perms = Permutation::all(d);
    let k = perms.len();
    let matrix = ExactMatrix::from_fn(k, k, |i, j| {
        let c = perms[i].inverse().compose(&perms[j]).cycle_count();
        RationalFunction::from_polynomial(UniPolynomial::monomial(BigRational::one(), c))
    });
    Ok(GramMatrix {
        group: GroupKind::UnitaryAdjoint,
        degree: d,
        labels: perms.into_iter().map(InvariantLabel::Perm).collect(),
        matrix,
    })
}

/// Gram matrix of the orthogonal-group invariant vectors, indexed by
/// pairings of `[2d]`: entry `N^{#parts of the joint coset type}`.
pub fn gram_orthogonal(d: usize) -> Result<GramMatrix<RationalFunction>, WeingartenError> {
    if d == 0 {
        return err("degree must be positive");
    }
    let pairings = enumerate_pairings(2 * d)?;
    let k = pairings.len();
    let mut matrix = ExactMatrix::zero(k, k);
    for i in 0..k {
        for j in 0..k {
            let parts = pairing_class(&pairings[i], &pairings[j])?.len();
            matrix.set(
                i,
                j,
                RationalFunction::from_polynomial(UniPolynomial::monomial(
                    BigRational::one(),
                    parts,
                )),
            );
        }
    }
    Ok(GramMatrix {
        group: GroupKind::Orthogonal,
        degree: d,
        labels: pairings.into_iter().map(InvariantLabel::Pair).collect(),
        matrix,
    })
}

const BRUTE_FORCE_LIMIT: u128 = 10_000_000;

/// Streams every word of the given length over `[alphabet]` through `f`
/// without materializing the full list.
fn for_each_word(len: usize, alphabet: usize, mut f: impl FnMut(&[usize])) {
    let mut word = vec![1usize; len];
    loop {
        f(&word);
        let mut pos = len;
        loop {
            if pos == 0 {
                return;
            }
            if word[pos - 1] < alphabet {
                word[pos - 1] += 1;
                break;
            }
            word[pos - 1] = 1;
            pos -= 1;
        }
    }
}

/// Gram matrix by literal summation over index words, with no closed-form
/// shortcuts: the honest oracle the symbolic Grams are tested against.
///
/// Summation cost is `alphabet^positions` where the alphabet is `N` (`2N`
/// for the symplectic group) and the position count is `d` for S and U or
/// `2d` for O and Sp; the call is rejected when that exceeds `10^7`, and the
/// error carries the computed cost. The circular ensembles have no
/// Gram-matrix route. The delta symbols match `integrate::delta_pairing`
/// and `integrate::delta_prime`.
pub fn gram_bruteforce(
    group: GroupKind,
    d: usize,
    n: usize,
) -> Result<GramMatrix<BigRational>, WeingartenError> {
    if d == 0 || n == 0 {
        return err("degree and rank must be positive");
    }
    let (alphabet, positions) = match group {
        GroupKind::SymmetricPermRep | GroupKind::UnitaryAdjoint => (n, d),
        GroupKind::Orthogonal => (n, 2 * d),
        GroupKind::Symplectic => (2 * n, 2 * d),
        GroupKind::COE | GroupKind::CSE => {
            return err("circular ensembles have no Gram-matrix route");
        }
    };
    let cost = (alphabet as u128)
        .checked_pow(positions as u32)
        .unwrap_or(u128::MAX);
    if cost > BRUTE_FORCE_LIMIT {
        return Err(WeingartenError(format!(
            "brute-force cost {cost} exceeds limit {BRUTE_FORCE_LIMIT}"
        )));
    }
    match group {
        GroupKind::SymmetricPermRep => {
            let parts = enumerate_set_partitions(d, d);
            let index: BTreeMap<&SetPartition, usize> =
                parts.iter().enumerate().map(|(k, p)| (p, k)).collect();
            let mut diag = vec![0i64; parts.len()];
            for_each_word(d, n, |w| {
                let i = IndexSequence::new(w.to_vec(), n).expect("word entries stay in range");
                diag[index[&fiber_type(&i)]] += 1;
            });
            let k = parts.len();
            let matrix = ExactMatrix::from_fn(k, k, |i, j| {
                if i == j {
                    br_int(diag[i])
                } else {
                    BigRational::zero()
                }
            });
            Ok(GramMatrix {
                group,
                degree: d,
                labels: parts.into_iter().map(InvariantLabel::Blocks).collect(),
                matrix,
            })
        }
        GroupKind::UnitaryAdjoint => {
            let perms = Permutation::all(d);
            let k = perms.len();
            let mut acc = vec![vec![0i64; k]; k];
            for_each_word(d, n, |w| {
                for a in 0..k {
                    for b in a..k {
                        let matches = (1..=d)
                            .all(|x| w[perms[a].apply(x) - 1] == w[perms[b].apply(x) - 1]);
                        if matches {
                            acc[a][b] += 1;
                        }
                    }
                }
            });
            let matrix = ExactMatrix::from_fn(k, k, |i, j| {
                br_int(if i <= j { acc[i][j] } else { acc[j][i] })
            });
            Ok(GramMatrix {
                group,
                degree: d,
                labels: perms.into_iter().map(InvariantLabel::Perm).collect(),
                matrix,
            })
        }
        GroupKind::Orthogonal => {
            let pairings = enumerate_pairings(2 * d)?;
            let k = pairings.len();
            let mut acc = vec![vec![0i64; k]; k];
            let mut passing: Vec<usize> = Vec::with_capacity(k);
            for_each_word(2 * d, n, |w| {
                passing.clear();
                for (idx, p) in pairings.iter().enumerate() {
                    if delta_pairing_word(p.pairs(), w) {
                        passing.push(idx);
                    }
                }
                for &a in &passing {
                    for &b in &passing {
                        acc[a][b] += 1;
                    }
                }
            });
            let matrix = ExactMatrix::from_fn(k, k, |i, j| br_int(acc[i][j]));
            Ok(GramMatrix {
                group,
                degree: d,
                labels: pairings.into_iter().map(InvariantLabel::Pair).collect(),
                matrix,
            })
        }
        GroupKind::Symplectic => {
            let pairings = enumerate_pairings(2 * d)?;
            let k = pairings.len();
            let mut acc = vec![vec![0i64; k]; k];
            let mut nonzero: Vec<(usize, i64)> = Vec::with_capacity(k);
            for_each_word(2 * d, 2 * n, |w| {
                nonzero.clear();
                for (idx, p) in pairings.iter().enumerate() {
                    let v = delta_prime_word(p.pairs(), w, n);
                    if v != 0 {
                        nonzero.push((idx, v as i64));
                    }
                }
                for &(a, va) in &nonzero {
                    for &(b, vb) in &nonzero {
                        acc[a][b] += va * vb;
                    }
                }
            });
            let matrix = ExactMatrix::from_fn(k, k, |i, j| br_int(acc[i][j]));
            Ok(GramMatrix {
                group,
                degree: d,
                labels: pairings.into_iter().map(InvariantLabel::Pair).collect(),
                matrix,
            })
        }
        GroupKind::COE | GroupKind::CSE => unreachable!("rejected above"),
    }
}

/// Entrywise weight matrix carried by tables whose weights are not a plain
/// class function of one label (restricted bases, signed classes): `weights`
/// is indexed by `labels` on both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct EntrywiseDetail {
    pub labels: Vec<InvariantLabel>,
    pub weights: ExactMatrix<BigRational>,
}

impl EntrywiseDetail {
    pub fn index_of(&self, label: &InvariantLabel) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// A Weingarten table: one representative weight per class label, plus the
/// full entrywise matrix when the class summary alone would be lossy.
///
/// `stable` records whether the rank parameter is at or above the degree, so
/// the Gram matrix is invertible and the weights come from a true inverse
/// rather than a pseudoinverse.
#[derive(Debug, Clone, PartialEq)]
pub struct WeingartenTable {
    group: GroupKind,
    degree: usize,
    regime: Regime,
    stable: bool,
    entries: BTreeMap<IntegerPartition, RationalFunction>,
    detail: Option<EntrywiseDetail>,
}

impl WeingartenTable {
    pub fn group(&self) -> GroupKind {
        self.group
    }

    /// Tensor degree `d`; for the circular ensembles this is the number of
    /// canonical pairs, i.e. the summation group is `S(2d)`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn stable(&self) -> bool {
        self.stable
    }

    pub fn entries(&self) -> &BTreeMap<IntegerPartition, RationalFunction> {
        &self.entries
    }

    pub fn entry(&self, class: &IntegerPartition) -> Option<&RationalFunction> {
        self.entries.get(class)
    }

    pub fn detail(&self) -> Option<&EntrywiseDetail> {
        self.detail.as_ref()
    }

    fn class_value(&self, class: &IntegerPartition) -> Result<RationalFunction, WeingartenError> {
        self.entries.get(class).cloned().ok_or_else(|| {
            WeingartenError(format!("class {class} missing from {} table", self.group))
        })
    }

    /// Weingarten weight attached to a pair of permutations of `[d]`
    /// (unitary group). With entrywise detail the lookup is positional and a
    /// permutation outside the stored basis weighs zero; otherwise the
    /// weight is the class value at `cycle_type(rho^{-1} sigma)`.
    pub fn perm_pair_weight(
        &self,
        rho: &Permutation,
        sigma: &Permutation,
    ) -> Result<RationalFunction, WeingartenError> {
        if self.group != GroupKind::UnitaryAdjoint {
            return err("permutation pairs index unitary tables only");
        }
        if rho.degree() != self.degree || sigma.degree() != self.degree {
            return err("permutation degree does not match the table degree");
        }
        if let Some(det) = &self.detail {
            let i = det.index_of(&InvariantLabel::Perm(rho.clone()));
            let j = det.index_of(&InvariantLabel::Perm(sigma.clone()));
            return Ok(match (i, j) {
                (Some(i), Some(j)) => {
                    RationalFunction::from_rational(det.weights.get(i, j).clone())
                }
                _ => RationalFunction::zero(),
            });
        }
        self.class_value(&cycle_type(&rho.inverse().compose(sigma)))
    }

    /// Weingarten weight attached to a pair of pairings of `[2d]`
    /// (orthogonal and symplectic groups). Symplectic class values carry the
    /// sign of `p_s^{-1} p_t` on top of the class value; entrywise detail
    /// already stores the signed weights.
    pub fn pairing_pair_weight(
        &self,
        s: &Pairing,
        t: &Pairing,
    ) -> Result<RationalFunction, WeingartenError> {
        if self.group != GroupKind::Orthogonal && self.group != GroupKind::Symplectic {
            return err("pairing pairs index orthogonal and symplectic tables only");
        }
        if s.size() != self.degree || t.size() != self.degree {
            return err("pairing size does not match the table degree");
        }
        if let Some(det) = &self.detail {
            let i = det
                .index_of(&InvariantLabel::Pair(s.clone()))
                .ok_or_else(|| WeingartenError(String::from("pairing missing from detail")))?;
            let j = det
                .index_of(&InvariantLabel::Pair(t.clone()))
                .ok_or_else(|| WeingartenError(String::from("pairing missing from detail")))?;
            return Ok(RationalFunction::from_rational(
                det.weights.get(i, j).clone(),
            ));
        }
        let value = self.class_value(&pairing_class(s, t)?)?;
        if self.group == GroupKind::Symplectic {
            let ps = pairing_to_permutation(s);
            let pt = pairing_to_permutation(t);
            if sign(&ps.inverse().compose(&pt)) < 0 {
                return Ok(value.neg());
            }
        }
        Ok(value)
    }

    /// Weingarten weight attached to one permutation of `[2d]` (circular
    /// ensembles): the class value at its coset type, with the sign of the
    /// permutation as an extra factor for the CSE.
    pub fn circular_weight(&self, sigma: &Permutation) -> Result<RationalFunction, WeingartenError> {
        if self.group != GroupKind::COE && self.group != GroupKind::CSE {
            return err("single permutations index circular-ensemble tables only");
        }
        if sigma.degree() != 2 * self.degree {
            return err("permutation degree does not match 2d for the circular table");
        }
        let value = self.class_value(&coset_type(sigma)?)?;
        if self.group == GroupKind::CSE && sign(sigma) < 0 {
            return Ok(value.neg());
        }
        Ok(value)
    }

    /// JSON form of a class-summary table. Tables carrying entrywise detail
    /// do not serialize (the summary alone would change integration results
    /// for restricted bases); rebuild them from parameters instead.
    pub fn to_json(&self) -> Result<serde_json::Value, WeingartenError> {
        if self.detail.is_some() {
            return err("entrywise tables do not serialize; rebuild from parameters");
        }
        let mut entries = Vec::with_capacity(self.entries.len());
        for (class, value) in &self.entries {
            let mut e = serde_json::Map::new();
            e.insert(
                String::from("class"),
                serde_json::Value::Array(
                    class
                        .parts()
                        .iter()
                        .map(|&p| serde_json::Value::from(p as u64))
                        .collect(),
                ),
            );
            e.insert(String::from("value"), value.to_json());
            entries.push(serde_json::Value::Object(e));
        }
        let mut map = serde_json::Map::new();
        map.insert(
            String::from("format"),
            serde_json::Value::from("weingarten-table-v1"),
        );
        map.insert(String::from("group"), serde_json::Value::from(self.group.to_string()));
        map.insert(String::from("degree"), serde_json::Value::from(self.degree as u64));
        let regime = match self.regime {
            Regime::Symbolic => serde_json::Value::from("symbolic"),
            Regime::Numeric(n) => serde_json::Value::from(n),
        };
        map.insert(String::from("regime"), regime);
        map.insert(String::from("stable"), serde_json::Value::from(self.stable));
        map.insert(String::from("entries"), serde_json::Value::Array(entries));
        Ok(serde_json::Value::Object(map))
    }

    pub fn from_json(v: &serde_json::Value) -> Result<WeingartenTable, WeingartenError> {
        let schema = |msg: &str| WeingartenError(format!("table schema: {msg}"));
        let obj = v.as_object().ok_or_else(|| schema("expected object"))?;
        if obj.get("format").and_then(|f| f.as_str()) != Some("weingarten-table-v1") {
            return Err(schema("missing or unknown format tag"));
        }
        let group = GroupKind::parse(
            obj.get("group")
                .and_then(|g| g.as_str())
                .ok_or_else(|| schema("missing group"))?,
        )?;
        let degree = obj
            .get("degree")
            .and_then(|d| d.as_u64())
            .ok_or_else(|| schema("missing degree"))? as usize;
        let regime = match obj.get("regime") {
            Some(serde_json::Value::String(s)) if s == "symbolic" => Regime::Symbolic,
            Some(serde_json::Value::Number(n)) => {
                Regime::Numeric(n.as_i64().ok_or_else(|| schema("bad numeric regime"))?)
            }
            _ => return Err(schema("missing regime")),
        };
        let stable = obj
            .get("stable")
            .and_then(|s| s.as_bool())
            .ok_or_else(|| schema("missing stable flag"))?;
        let raw_entries = obj
            .get("entries")
            .and_then(|e| e.as_array())
            .ok_or_else(|| schema("missing entries"))?;
        let mut entries = BTreeMap::new();
        for item in raw_entries {
            let e = item.as_object().ok_or_else(|| schema("entry must be an object"))?;
            let parts = e
                .get("class")
                .and_then(|c| c.as_array())
                .ok_or_else(|| schema("entry missing class"))?
                .iter()
                .map(|p| p.as_u64().map(|v| v as usize))
                .collect::<Option<Vec<usize>>>()
                .ok_or_else(|| schema("class parts must be integers"))?;
            let class = IntegerPartition::new(parts)?;
            let value = RationalFunction::from_json(
                e.get("value").ok_or_else(|| schema("entry missing value"))?,
            )?;
            entries.insert(class, value);
        }
        Ok(WeingartenTable {
            group,
            degree,
            regime,
            stable,
            entries,
            detail: None,
        })
    }
}

/// Solves a small dense linear system over rational functions by
/// Gauss-Jordan elimination; the class systems this serves are tiny.
fn solve_dense(
    mut a: Vec<Vec<RationalFunction>>,
    mut b: Vec<RationalFunction>,
) -> Result<Vec<RationalFunction>, WeingartenError> {
    let n = a.len();
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return err("class system is singular");
        };
        a.swap(k, piv);
        b.swap(k, piv);
        let inv = RationalFunction::one().checked_div(&a[k][k])?;
        for j in 0..n {
            a[k][j] = a[k][j].mul(&inv);
        }
        b[k] = b[k].mul(&inv);
        for i in 0..n {
            if i == k || a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].clone();
            for j in 0..n {
                a[i][j] = a[i][j].sub(&f.mul(&a[k][j]));
            }
            b[i] = b[i].sub(&f.mul(&b[k]));
        }
    }
    Ok(b)
}

fn identity_class(d: usize) -> IntegerPartition {
    IntegerPartition::new(vec![1; d]).expect("all-ones partition is valid")
}

/// Central-ansatz Weingarten weights for the unitary group at parameter `z`
/// (a variable or a constant): solves the class-collapsed system
/// `sum_sigma z^{#cycles(rho^{-1} sigma)} w(type sigma) = [rho = id]` over
/// representatives, then certifies the solution against every row of the
/// full `d! x d!` Gram system. Translation invariance of cycle types makes
/// the certified base column equivalent to the full `G W = I`.
fn central_class_table_unitary(
    d: usize,
    z: &RationalFunction,
) -> Result<BTreeMap<IntegerPartition, RationalFunction>, WeingartenError> {
    let classes = IntegerPartition::all(d);
    let class_index: BTreeMap<&IntegerPartition, usize> =
        classes.iter().enumerate().map(|(k, c)| (c, k)).collect();
    let perms = Permutation::all(d);
    let zpow = rf_powers(z, d);
    let m = classes.len();
    let mut counts = vec![vec![vec![0u64; d + 1]; m]; m];
    for (b, beta) in classes.iter().enumerate() {
        let rep_inv = beta.representative().inverse();
        for sigma in &perms {
            let a = class_index[&cycle_type(sigma)];
            let c = rep_inv.compose(sigma).cycle_count();
            counts[b][a][c] += 1;
        }
    }
    let system: Vec<Vec<RationalFunction>> = counts
        .iter()
        .map(|row| {
            row.iter()
                .map(|cell| {
                    let mut acc = RationalFunction::zero();
                    for (c, &k) in cell.iter().enumerate() {
                        if k > 0 {
                            acc = acc.add(&zpow[c].scale(&br_int(k as i64)));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let ident = identity_class(d);
    let rhs: Vec<RationalFunction> = classes
        .iter()
        .map(|beta| {
            if *beta == ident {
                RationalFunction::one()
            } else {
                RationalFunction::zero()
            }
        })
        .collect();
    let solution = solve_dense(system, rhs)?;
    let table: BTreeMap<IntegerPartition, RationalFunction> = classes
        .iter()
        .cloned()
        .zip(solution.iter().cloned())
        .collect();
    // Certificate: every row of the full Gram system, not just the class
    // representatives used for the solve.
    for rho in &perms {
        let rho_inv = rho.inverse();
        let mut cell = vec![vec![0u64; d + 1]; m];
        for sigma in &perms {
            let a = class_index[&cycle_type(sigma)];
            let c = rho_inv.compose(sigma).cycle_count();
            cell[a][c] += 1;
        }
        let mut acc = RationalFunction::zero();
        for (a, per_class) in cell.iter().enumerate() {
            for (c, &k) in per_class.iter().enumerate() {
                if k > 0 {
                    acc = acc.add(&zpow[c].mul(&solution[a]).scale(&br_int(k as i64)));
                }
            }
        }
        let expect = if rho.is_identity() {
            RationalFunction::one()
        } else {
            RationalFunction::zero()
        };
        if acc != expect {
            return err("unitary certificate failed: solved weights do not invert the Gram matrix");
        }
    }
    Ok(table)
}

/// Central-ansatz Weingarten weights for the orthogonal group at parameter
/// `z`: same scheme as the unitary solve over pairings of `[2d]` with coset
/// types as class labels, certified against every row of the
/// `(2d-1)!! x (2d-1)!!` Gram system.
fn central_class_table_orthogonal(
    d: usize,
    z: &RationalFunction,
) -> Result<BTreeMap<IntegerPartition, RationalFunction>, WeingartenError> {
    let classes = IntegerPartition::all(d);
    let class_index: BTreeMap<&IntegerPartition, usize> =
        classes.iter().enumerate().map(|(k, c)| (c, k)).collect();
    let pairings = enumerate_pairings(2 * d)?;
    let zpow = rf_powers(z, d);
    let m = classes.len();
    // Class of each pairing relative to the trivial base point, whose
    // flattened permutation is the identity.
    let tau_class: Vec<usize> = pairings
        .iter()
        .map(|t| Ok(class_index[&coset_type(&pairing_to_permutation(t))?]))
        .collect::<Result<_, WeingartenError>>()?;
    let mut counts = vec![vec![vec![0u64; d + 1]; m]; m];
    for (b, beta) in classes.iter().enumerate() {
        let rep_inv = pairing_to_permutation(&representative_pairing(beta)).inverse();
        for (t, tau) in pairings.iter().enumerate() {
            let parts = coset_type(&rep_inv.compose(&pairing_to_permutation(tau)))?.len();
            counts[b][tau_class[t]][parts] += 1;
        }
    }
    let system: Vec<Vec<RationalFunction>> = counts
        .iter()
        .map(|row| {
            row.iter()
                .map(|cell| {
                    let mut acc = RationalFunction::zero();
                    for (c, &k) in cell.iter().enumerate() {
                        if k > 0 {
                            acc = acc.add(&zpow[c].scale(&br_int(k as i64)));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let ident = identity_class(d);
    let rhs: Vec<RationalFunction> = classes
        .iter()
        .map(|beta| {
            if *beta == ident {
                RationalFunction::one()
            } else {
                RationalFunction::zero()
            }
        })
        .collect();
    let solution = solve_dense(system, rhs)?;
    let table: BTreeMap<IntegerPartition, RationalFunction> = classes
        .iter()
        .cloned()
        .zip(solution.iter().cloned())
        .collect();
    let trivial = trivial_pairing(d);
    for s in &pairings {
        let ps_inv = pairing_to_permutation(s).inverse();
        let mut cell = vec![vec![0u64; d + 1]; m];
        for (t, tau) in pairings.iter().enumerate() {
            let parts = coset_type(&ps_inv.compose(&pairing_to_permutation(tau)))?.len();
            cell[tau_class[t]][parts] += 1;
        }
        let mut acc = RationalFunction::zero();
        for (a, per_class) in cell.iter().enumerate() {
            for (c, &k) in per_class.iter().enumerate() {
                if k > 0 {
                    acc = acc.add(&zpow[c].mul(&solution[a]).scale(&br_int(k as i64)));
                }
            }
        }
        let expect = if *s == trivial {
            RationalFunction::one()
        } else {
            RationalFunction::zero()
        };
        if acc != expect {
            return err(
                "orthogonal certificate failed: solved weights do not invert the Gram matrix",
            );
        }
    }
    Ok(table)
}

fn rf_variable() -> RationalFunction {
    RationalFunction::from_polynomial(UniPolynomial::variable())
}

/// Unitary Weingarten function of a cycle type, by the character sum
/// `sum_{lambda |- d} chi^lambda(alpha) dim(lambda) / (d! prod_cells
/// (N + content))`: an independent route from the Gram solves, used to
/// cross-check them.
pub fn wg_unitary(alpha: &IntegerPartition) -> Result<RationalFunction, WeingartenError> {
    let d = alpha.weight();
    if d == 0 {
        return Ok(RationalFunction::one());
    }
    let dfact = factorial_br(d);
    let mut acc = RationalFunction::zero();
    for lam in IntegerPartition::all(d) {
        let chi = mn_character(&lam, alpha)?;
        if chi == 0 {
            continue;
        }
        let coeff = br_int(chi) * br_int(hook_dimension(&lam) as i64) / dfact.clone();
        let term = RationalFunction::new(UniPolynomial::constant(coeff), content_product(&lam))?;
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// Orthogonal Weingarten function of a coset type, symbolic in the rank.
pub fn wg_orthogonal(mu: &IntegerPartition) -> Result<RationalFunction, WeingartenError> {
    let d = mu.weight();
    if d == 0 {
        return Ok(RationalFunction::one());
    }
    let table = central_class_table_orthogonal(d, &rf_variable())?;
    table
        .get(mu)
        .cloned()
        .ok_or_else(|| WeingartenError(format!("coset type {mu} missing from orthogonal table")))
}

/// Symplectic Weingarten function of a coset type: `(-1)^{|mu|}` times the
/// orthogonal function with the rank substituted by `-2N`. The value is the
/// table entry at a representative pairing pair, whose sign factor is +1.
pub fn wg_symplectic(mu: &IntegerPartition) -> Result<RationalFunction, WeingartenError> {
    let d = mu.weight();
    if d == 0 {
        return Ok(RationalFunction::one());
    }
    let base = wg_orthogonal(mu)?;
    let shifted = base.substitute(&UniPolynomial::from_int_coeffs(&[0, -2]))?;
    Ok(if d % 2 == 1 { shifted.neg() } else { shifted })
}

/// Class values for a circular ensemble at half-degree `m` (the summation
/// group is `S(2m)`): the orthogonal solve at the shifted parameter
/// `N + 1` (COE) or `1 - 2N` with a global `(-1)^m` (CSE). A singular solve
/// at a numeric shifted parameter is a pole of the ensemble's Weingarten
/// function and surfaces as an error.
pub(crate) fn circular_class_values(
    m: usize,
    group: GroupKind,
    regime: Regime,
) -> Result<BTreeMap<IntegerPartition, RationalFunction>, WeingartenError> {
    if group != GroupKind::COE && group != GroupKind::CSE {
        return err("circular class values are for COE and CSE only");
    }
    let negate = group == GroupKind::CSE && m % 2 == 1;
    let raw = match regime {
        Regime::Symbolic => {
            let base = central_class_table_orthogonal(m, &rf_variable())?;
            let shift = if group == GroupKind::COE {
                UniPolynomial::from_int_coeffs(&[1, 1])
            } else {
                UniPolynomial::from_int_coeffs(&[1, -2])
            };
            let mut out = BTreeMap::new();
            for (mu, value) in base {
                out.insert(mu, value.substitute(&shift)?);
            }
            out
        }
        Regime::Numeric(n) => {
            let at = if group == GroupKind::COE { n + 1 } else { 1 - 2 * n };
            central_class_table_orthogonal(m, &RationalFunction::from_rational(br_int(at)))
                .map_err(|e| {
                    WeingartenError(format!(
                        "{group} weights at shifted parameter {at}: {e}"
                    ))
                })?
        }
    };
    if !negate {
        return Ok(raw);
    }
    Ok(raw.into_iter().map(|(mu, v)| (mu, v.neg())).collect())
}

/// COE Weingarten weight of a permutation of `[2m]`: the orthogonal class
/// value of its coset type at rank `N + 1`, with no sign factor.
pub fn wg_coe(sigma: &Permutation, regime: Regime) -> Result<RationalFunction, WeingartenError> {
    if sigma.degree() % 2 != 0 {
        return err("circular weights need a permutation of even degree");
    }
    let m = sigma.degree() / 2;
    if m == 0 {
        return Ok(RationalFunction::one());
    }
    let values = circular_class_values(m, GroupKind::COE, regime)?;
    let mu = coset_type(sigma)?;
    values
        .get(&mu)
        .cloned()
        .ok_or_else(|| WeingartenError(format!("coset type {mu} missing from COE values")))
}

/// CSE Weingarten weight of a permutation of `[2m]`: the sign of the
/// permutation times the symplectic class value at half-integer rank
/// `N - 1/2`, i.e. `(-1)^m sgn(sigma)` times the orthogonal value at
/// `1 - 2N`.
pub fn wg_cse(sigma: &Permutation, regime: Regime) -> Result<RationalFunction, WeingartenError> {
    if sigma.degree() % 2 != 0 {
        return err("circular weights need a permutation of even degree");
    }
    let m = sigma.degree() / 2;
    if m == 0 {
        return Ok(RationalFunction::one());
    }
    let values = circular_class_values(m, GroupKind::CSE, regime)?;
    let mu = coset_type(sigma)?;
    let value = values
        .get(&mu)
        .cloned()
        .ok_or_else(|| WeingartenError(format!("coset type {mu} missing from CSE values")))?;
    Ok(if sign(sigma) < 0 { value.neg() } else { value })
}

/// Leading coefficients of the large-N expansion of the unitary Weingarten
/// function: entry `k` counts the weakly monotone transposition walks from
/// `rho` to `sigma` of length `|rho^{-1} sigma| + 2k`, which is the
/// coefficient of `N^{-2k}` in `(-1)^{|pi|} N^{d + |pi|} Wg(type(pi))`.
pub fn wg_unitary_asymptotic(
    rho: &Permutation,
    sigma: &Permutation,
    k_max: usize,
) -> Result<Vec<u64>, WeingartenError> {
    let pi = rho.inverse().compose(sigma);
    let base = crate::combinat::word_norm(&pi);
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        out.push(count_monotone_walks(rho, sigma, base + 2 * k, false)?);
    }
    Ok(out)
}

fn table_symmetric(d: usize, regime: Regime) -> Result<WeingartenTable, WeingartenError> {
    let mut entries = BTreeMap::new();
    let mut stable = true;
    for blocks in 1..=d {
        let class = IntegerPartition::new(vec![blocks])?;
        let value = match regime {
            Regime::Symbolic => RationalFunction::new(
                UniPolynomial::one(),
                UniPolynomial::falling_factorial(blocks),
            )?,
            Regime::Numeric(n) => {
                let at = UniPolynomial::falling_factorial(blocks).eval(&br_int(n));
                if at.is_zero() {
                    // Fewer symbols than blocks: the invariant vector is zero
                    // and the pseudoinverse assigns weight zero.
                    stable = false;
                    RationalFunction::zero()
                } else {
                    RationalFunction::from_rational(BigRational::one() / at)
                }
            }
        };
        entries.insert(class, value);
    }
    if let Regime::Numeric(n) = regime {
        stable = (n as usize) >= d;
    }
    Ok(WeingartenTable {
        group: GroupKind::SymmetricPermRep,
        degree: d,
        regime,
        stable,
        entries,
        detail: None,
    })
}

/// Checks that an entrywise weight matrix over permutation labels is a class
/// function of `cycle_type(rho^{-1} sigma)` and returns the class summary.
fn summarize_perm_weights(
    perms: &[Permutation],
    weights: &ExactMatrix<BigRational>,
) -> Result<BTreeMap<IntegerPartition, RationalFunction>, WeingartenError> {
    let mut by_class: BTreeMap<IntegerPartition, BigRational> = BTreeMap::new();
    for (i, p) in perms.iter().enumerate() {
        let p_inv = p.inverse();
        for (j, q) in perms.iter().enumerate() {
            let class = cycle_type(&p_inv.compose(q));
            let w = weights.get(i, j);
            match by_class.get(&class) {
                None => {
                    by_class.insert(class, w.clone());
                }
                Some(seen) if seen == w => {}
                Some(_) => {
                    return err("pseudoinverse weights are not a class function");
                }
            }
        }
    }
    Ok(by_class
        .into_iter()
        .map(|(c, w)| (c, RationalFunction::from_rational(w)))
        .collect())
}

/// Checks that an entrywise weight matrix over pairing labels is a class
/// function of the joint coset type, up to the symplectic sign factor when
/// `signed` is set, and returns the (sign-stripped) class summary.
fn summarize_pairing_weights(
    pairings: &[Pairing],
    weights: &ExactMatrix<BigRational>,
    signed: bool,
) -> Result<BTreeMap<IntegerPartition, RationalFunction>, WeingartenError> {
    let flat: Vec<Permutation> = pairings.iter().map(pairing_to_permutation).collect();
    let mut by_class: BTreeMap<IntegerPartition, BigRational> = BTreeMap::new();
    for i in 0..pairings.len() {
        let pi_inv = flat[i].inverse();
        for j in 0..pairings.len() {
            let rel = pi_inv.compose(&flat[j]);
            let class = coset_type(&rel)?;
            let mut w = weights.get(i, j).clone();
            if signed && sign(&rel) < 0 {
                w = -w;
            }
            match by_class.get(&class) {
                None => {
                    by_class.insert(class, w);
                }
                Some(seen) if *seen == w => {}
                Some(_) => {
                    return err(if signed {
                        "pseudoinverse weights are not a signed class function"
                    } else {
                        "pseudoinverse weights are not a class function"
                    });
                }
            }
        }
    }
    Ok(by_class
        .into_iter()
        .map(|(c, w)| (c, RationalFunction::from_rational(w)))
        .collect())
}

fn table_unitary(d: usize, regime: Regime) -> Result<WeingartenTable, WeingartenError> {
    match regime {
        Regime::Symbolic => {
            let entries = central_class_table_unitary(d, &rf_variable())?;
            Ok(WeingartenTable {
                group: GroupKind::UnitaryAdjoint,
                degree: d,
                regime,
                stable: true,
                entries,
                detail: None,
            })
        }
        Regime::Numeric(n) if (n as usize) >= d => {
            let entries =
                central_class_table_unitary(d, &RationalFunction::from_rational(br_int(n)))?;
            Ok(WeingartenTable {
                group: GroupKind::UnitaryAdjoint,
                degree: d,
                regime,
                stable: true,
                entries,
                detail: None,
            })
        }
        Regime::Numeric(n) => {
            // Below the stable range the Gram matrix is singular; take the
            // pseudoinverse of the exact numeric Gram matrix.
            let perms = Permutation::all(d);
            let k = perms.len();
            let gram = ExactMatrix::from_fn(k, k, |i, j| {
                int_pow_br(n, perms[i].inverse().compose(&perms[j]).cycle_count())
            });
            let weights = pseudo_invert_gram(&gram)?;
            let entries = summarize_perm_weights(&perms, &weights)?;
            Ok(WeingartenTable {
                group: GroupKind::UnitaryAdjoint,
                degree: d,
                regime,
                stable: false,
                entries,
                detail: Some(EntrywiseDetail {
                    labels: perms.into_iter().map(InvariantLabel::Perm).collect(),
                    weights,
                }),
            })
        }
    }
}

fn table_orthogonal(d: usize, regime: Regime) -> Result<WeingartenTable, WeingartenError> {
    match regime {
        Regime::Symbolic => {
            let entries = central_class_table_orthogonal(d, &rf_variable())?;
            Ok(WeingartenTable {
                group: GroupKind::Orthogonal,
                degree: d,
                regime,
                stable: true,
                entries,
                detail: None,
            })
        }
        Regime::Numeric(n) if (n as usize) >= d => {
            let entries =
                central_class_table_orthogonal(d, &RationalFunction::from_rational(br_int(n)))?;
            Ok(WeingartenTable {
                group: GroupKind::Orthogonal,
                degree: d,
                regime,
                stable: true,
                entries,
                detail: None,
            })
        }
        Regime::Numeric(n) => {
            let pairings = enumerate_pairings(2 * d)?;
            let k = pairings.len();
            let mut gram = ExactMatrix::zero(k, k);
            for i in 0..k {
                for j in 0..k {
                    let parts = pairing_class(&pairings[i], &pairings[j])?.len();
                    gram.set(i, j, int_pow_br(n, parts));
                }
            }
            let weights = pseudo_invert_gram(&gram)?;
            let entries = summarize_pairing_weights(&pairings, &weights, false)?;
            Ok(WeingartenTable {
                group: GroupKind::Orthogonal,
                degree: d,
                regime,
                stable: false,
                entries,
                detail: Some(EntrywiseDetail {
                    labels: pairings.into_iter().map(InvariantLabel::Pair).collect(),
                    weights,
                }),
            })
        }
    }
}

fn table_symplectic(d: usize, regime: Regime) -> Result<WeingartenTable, WeingartenError> {
    match regime {
        Regime::Symbolic => {
            let base = central_class_table_orthogonal(d, &rf_variable())?;
            let shift = UniPolynomial::from_int_coeffs(&[0, -2]);
            let mut entries = BTreeMap::new();
            for (mu, value) in base {
                let shifted = value.substitute(&shift)?;
                entries.insert(mu, if d % 2 == 1 { shifted.neg() } else { shifted });
            }
            Ok(WeingartenTable {
                group: GroupKind::Symplectic,
                degree: d,
                regime,
                stable: true,
                entries,
                detail: None,
            })
        }
        Regime::Numeric(n) if (n as usize) >= d => {
            let base = central_class_table_orthogonal(
                d,
                &RationalFunction::from_rational(br_int(-2 * n)),
            )?;
            let entries = base
                .into_iter()
                .map(|(mu, v)| (mu, if d % 2 == 1 { v.neg() } else { v }))
                .collect();
            Ok(WeingartenTable {
                group: GroupKind::Symplectic,
                degree: d,
                regime,
                stable: true,
                entries,
                detail: None,
            })
        }
        Regime::Numeric(n) => {
            // No closed-form Gram is assumed below the stable range: the
            // signed Gram matrix is built by literal summation, then
            // pseudoinverted. The weights must be a signed class function.
            let gram = gram_bruteforce(GroupKind::Symplectic, d, n as usize)?;
            let pairings: Vec<Pairing> = gram
                .labels()
                .iter()
                .map(|l| match l {
                    InvariantLabel::Pair(p) => p.clone(),
                    _ => unreachable!("symplectic labels are pairings"),
                })
                .collect();
            let weights = pseudo_invert_gram(gram.matrix())?;
            let entries = summarize_pairing_weights(&pairings, &weights, true)?;
            Ok(WeingartenTable {
                group: GroupKind::Symplectic,
                degree: d,
                regime,
                stable: false,
                entries,
                detail: Some(EntrywiseDetail {
                    labels: gram.labels().to_vec(),
                    weights,
                }),
            })
        }
    }
}

fn table_circular(group: GroupKind, m: usize, n: i64) -> Result<WeingartenTable, WeingartenError> {
    let entries = circular_class_values(m, group, Regime::Numeric(n))?;
    Ok(WeingartenTable {
        group,
        degree: m,
        regime: Regime::Numeric(n),
        stable: (n as usize) >= m,
        entries,
        detail: None,
    })
}

/// Builds the Weingarten table of a group at one degree, symbolic in the
/// rank or at a fixed numeric rank.
///
/// Symbolic tables exist for S, U, O, and Sp; the circular ensembles are
/// numeric-only at the table level (their per-permutation weights are
/// available symbolically through `wg_coe` and `wg_cse`). Numeric tables
/// below the stable range `N >= d` switch to the pseudoinverse route and
/// carry entrywise detail; stable-range numeric tables are certified
/// inversions, like the symbolic ones.
pub fn wg_table_from_gram(
    group: GroupKind,
    degree: usize,
    regime: Regime,
) -> Result<WeingartenTable, WeingartenError> {
    if degree == 0 {
        return err("degree must be positive");
    }
    if let Regime::Numeric(n) = regime {
        if n < 1 {
            return err("rank parameter must be positive");
        }
    }
    match group {
        GroupKind::SymmetricPermRep => table_symmetric(degree, regime),
        GroupKind::UnitaryAdjoint => table_unitary(degree, regime),
        GroupKind::Orthogonal => table_orthogonal(degree, regime),
        GroupKind::Symplectic => table_symplectic(degree, regime),
        GroupKind::COE | GroupKind::CSE => match regime {
            Regime::Symbolic => err("circular-ensemble tables are numeric-only"),
            Regime::Numeric(n) => table_circular(group, degree, n),
        },
    }
}

/// Unitary Weingarten table below the stable range via the restricted-basis
/// route: invariant vectors are kept only for permutations with no
/// decreasing subsequence of length `N + 1`, whose Gram matrix is
/// invertible; all other permutations weigh zero. The resulting projection
/// must agree exactly with the pseudoinverse route's projection, which the
/// acceptance suite checks; the weight matrices themselves differ and are
/// not a class function, so the entrywise detail is authoritative and
/// `entries` stores the identity-row value at the first basis member of
/// each class that has one.
pub fn wg_unitary_baik_rains(d: usize, n: i64) -> Result<WeingartenTable, WeingartenError> {
    if d == 0 {
        return err("degree must be positive");
    }
    if n < 1 {
        return err("rank parameter must be positive");
    }
    let basis: Vec<Permutation> = Permutation::all(d)
        .into_iter()
        .filter(|p| longest_decreasing_subsequence(p) <= n as usize)
        .collect();
    let k = basis.len();
    let gram = ExactMatrix::from_fn(k, k, |i, j| {
        int_pow_br(n, basis[i].inverse().compose(&basis[j]).cycle_count())
    });
    let weights = invert_symmetric(&gram)?;
    let mut entries = BTreeMap::new();
    for alpha in IntegerPartition::all(d) {
        if let Some(j) = basis.iter().position(|p| cycle_type(p) == alpha) {
            entries.insert(
                alpha,
                RationalFunction::from_rational(weights.get(0, j).clone()),
            );
        }
    }
    Ok(WeingartenTable {
        group: GroupKind::UnitaryAdjoint,
        degree: d,
        regime: Regime::Numeric(n),
        stable: (n as usize) >= d,
        entries,
        detail: Some(EntrywiseDetail {
            labels: basis.into_iter().map(InvariantLabel::Perm).collect(),
            weights,
        }),
    })
}

/// Memoizing store for Weingarten tables, keyed by group, degree, and
/// regime. Table construction is pure, so sharing is safe.
#[derive(Debug, Default)]
pub struct WgCache {
    tables: BTreeMap<(GroupKind, usize, Regime), WeingartenTable>,
}

impl WgCache {
    pub fn new() -> Self {
        WgCache {
            tables: BTreeMap::new(),
        }
    }

    /// Returns the cached table, building it on first use.
    pub fn get(
        &mut self,
        group: GroupKind,
        degree: usize,
        regime: Regime,
    ) -> Result<&WeingartenTable, WeingartenError> {
        let key = (group, degree, regime);
        if !self.tables.contains_key(&key) {
            let table = wg_table_from_gram(group, degree, regime)?;
            self.tables.insert(key, table);
        }
        Ok(self.tables.get(&key).expect("just inserted"))
    }

    /// Stores a prebuilt table (for example one deserialized from disk)
    /// under its own parameters.
    pub fn insert(&mut self, table: WeingartenTable) {
        let key = (table.group(), table.degree(), table.regime());
        self.tables.insert(key, table);
    }

    /// Returns the cached table without building a missing one.
    pub fn get_if_present(
        &self,
        group: GroupKind,
        degree: usize,
        regime: Regime,
    ) -> Option<&WeingartenTable> {
        self.tables.get(&(group, degree, regime))
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }
}

#[cfg(test)]
mod tests {
    extern crate std;

    use super::*;
    use crate::exactalg::br;

    fn rf(num: &[i64], den: &[i64]) -> RationalFunction {
        RationalFunction::new(
            UniPolynomial::from_int_coeffs(num),
            UniPolynomial::from_int_coeffs(den),
        )
        .expect("test fraction is well formed")
    }

    fn part(parts: &[usize]) -> IntegerPartition {
        IntegerPartition::new(parts.to_vec()).expect("test partition is valid")
    }

    #[test]
    fn gram_symmetric_examples() {
        let g = gram_symmetric(2).unwrap();
        assert_eq!(g.labels().len(), 2);
        // Finest partition first: {{1},{2}}, then {{1,2}}.
        let singles = SetPartition::new(vec![vec![1], vec![2]]).unwrap();
        let joined = SetPartition::new(vec![vec![1, 2]]).unwrap();
        assert_eq!(g.labels()[0], InvariantLabel::Blocks(singles));
        assert_eq!(g.labels()[1], InvariantLabel::Blocks(joined));
        assert_eq!(*g.matrix().get(0, 0), rf(&[0, -1, 1], &[1])); // N(N-1)
        assert_eq!(*g.matrix().get(1, 1), rf(&[0, 1], &[1])); // N
        assert_eq!(*g.matrix().get(0, 1), RationalFunction::zero());

        let g3 = gram_symmetric(3).unwrap();
        assert_eq!(g3.labels().len(), 5);
        for (i, label) in g3.labels().iter().enumerate() {
            let InvariantLabel::Blocks(p) = label else {
                panic!("symmetric labels are set partitions")
            };
            let expect = RationalFunction::from_polynomial(UniPolynomial::falling_factorial(
                p.block_count(),
            ));
            assert_eq!(*g3.matrix().get(i, i), expect);
        }
    }

    #[test]
    fn gram_unitary_examples() {
        let g = gram_unitary(2).unwrap();
        let nn = rf(&[0, 0, 1], &[1]);
        let n = rf(&[0, 1], &[1]);
        assert_eq!(*g.matrix().get(0, 0), nn);
        assert_eq!(*g.matrix().get(0, 1), n);
        assert_eq!(*g.matrix().get(1, 0), n);
        assert_eq!(*g.matrix().get(1, 1), nn);

        let g3 = gram_unitary(3).unwrap();
        for i in 0..6 {
            assert_eq!(*g3.matrix().get(i, i), rf(&[0, 0, 0, 1], &[1]));
        }
    }

    #[test]
    fn gram_orthogonal_example_and_determinant() {
        let g = gram_orthogonal(2).unwrap();
        assert_eq!(g.labels().len(), 3);
        let zz = rf(&[0, 0, 1], &[1]);
        let z = rf(&[0, 1], &[1]);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { zz.clone() } else { z.clone() };
                assert_eq!(*g.matrix().get(i, j), expect);
            }
        }
        // Cofactor determinant equals the eigenvalue product
        // (z^2 + 2z)(z^2 - z)^2.
        let m = g.matrix();
        let det = m.get(0, 0).mul(
            &m.get(1, 1)
                .mul(m.get(2, 2))
                .sub(&m.get(1, 2).mul(m.get(2, 1))),
        )
        .sub(
            &m.get(0, 1).mul(
                &m.get(1, 0)
                    .mul(m.get(2, 2))
                    .sub(&m.get(1, 2).mul(m.get(2, 0))),
            ),
        )
        .add(
            &m.get(0, 2).mul(
                &m.get(1, 0)
                    .mul(m.get(2, 1))
                    .sub(&m.get(1, 1).mul(m.get(2, 0))),
            ),
        );
        let lam1 = rf(&[0, 2, 1], &[1]);
        let lam2 = rf(&[0, -1, 1], &[1]);
        assert_eq!(det, lam1.mul(&lam2).mul(&lam2));
    }

    #[test]
    fn pairing_representatives_hit_their_classes() {
        for d in 1..=5 {
            for mu in IntegerPartition::all(d) {
                let rep = representative_pairing(&mu);
                let class = pairing_class(&trivial_pairing(d), &rep).unwrap();
                assert_eq!(class, mu, "pairing representative for {mu}");

                let stair = coset_representative(&mu);
                assert_eq!(coset_type(&stair).unwrap(), mu, "staircase for {mu}");
                assert_eq!(sign(&stair), 1, "staircases are even");
            }
        }
    }

    #[test]
    fn gram_bruteforce_examples() {
        let u = gram_bruteforce(GroupKind::UnitaryAdjoint, 2, 3).unwrap();
        assert_eq!(*u.matrix().get(0, 0), br_int(9));
        assert_eq!(*u.matrix().get(0, 1), br_int(3));
        assert_eq!(*u.matrix().get(1, 0), br_int(3));
        assert_eq!(*u.matrix().get(1, 1), br_int(9));

        let s = gram_bruteforce(GroupKind::SymmetricPermRep, 2, 2).unwrap();
        assert_eq!(*s.matrix().get(0, 0), br_int(2));
        assert_eq!(*s.matrix().get(1, 1), br_int(2));
        assert_eq!(*s.matrix().get(0, 1), BigRational::zero());

        let o = gram_bruteforce(GroupKind::Orthogonal, 1, 2).unwrap();
        assert_eq!(*o.matrix().get(0, 0), br_int(2));

        let sp = gram_bruteforce(GroupKind::Symplectic, 1, 2).unwrap();
        assert_eq!(*sp.matrix().get(0, 0), br_int(4));
    }

    #[test]
    fn gram_bruteforce_rejects_infeasible_and_circular() {
        let e = gram_bruteforce(GroupKind::Orthogonal, 4, 10).unwrap_err();
        assert!(e.0.contains("exceeds limit"), "got: {e}");
        assert!(e.0.contains("100000000"), "cost should be reported: {e}");
        assert!(gram_bruteforce(GroupKind::COE, 1, 2).is_err());
    }

    #[test]
    fn gram_bruteforce_matches_symbolic() {
        for d in 1..=3 {
            for n in [d as i64, d as i64 + 1] {
                let sym = gram_symmetric(d).unwrap().evaluate_at(n).unwrap();
                let brute = gram_bruteforce(GroupKind::SymmetricPermRep, d, n as usize).unwrap();
                assert_eq!(sym.matrix(), brute.matrix(), "S d={d} n={n}");

                let uni = gram_unitary(d).unwrap().evaluate_at(n).unwrap();
                let brute = gram_bruteforce(GroupKind::UnitaryAdjoint, d, n as usize).unwrap();
                assert_eq!(uni.matrix(), brute.matrix(), "U d={d} n={n}");
            }
        }
        for d in 1..=3 {
            for n in [2i64, 3] {
                let orth = gram_orthogonal(d).unwrap().evaluate_at(n).unwrap();
                let brute = gram_bruteforce(GroupKind::Orthogonal, d, n as usize).unwrap();
                assert_eq!(orth.matrix(), brute.matrix(), "O d={d} n={n}");
            }
        }
    }

    #[test]
    fn unitary_table_matches_known_values() {
        let table = wg_table_from_gram(GroupKind::UnitaryAdjoint, 2, Regime::Symbolic).unwrap();
        assert!(table.stable());
        assert_eq!(*table.entry(&part(&[1, 1])).unwrap(), rf(&[1], &[-1, 0, 1]));
        assert_eq!(*table.entry(&part(&[2])).unwrap(), rf(&[-1], &[0, -1, 0, 1]));
    }

    #[test]
    fn wg_unitary_character_route_examples() {
        assert_eq!(wg_unitary(&part(&[1])).unwrap(), rf(&[1], &[0, 1]));
        assert_eq!(wg_unitary(&part(&[1, 1])).unwrap(), rf(&[1], &[-1, 0, 1]));
        assert_eq!(wg_unitary(&part(&[2])).unwrap(), rf(&[-1], &[0, -1, 0, 1]));
        // 2 / (N(N^2-1)(N^2-4)) = 2 / (N^5 - 5N^3 + 4N).
        assert_eq!(
            wg_unitary(&part(&[3])).unwrap(),
            rf(&[2], &[0, 4, 0, -5, 0, 1])
        );
    }

    #[test]
    fn unitary_routes_agree_up_to_degree_four() {
        for d in 1..=4 {
            let table = wg_table_from_gram(GroupKind::UnitaryAdjoint, d, Regime::Symbolic).unwrap();
            for alpha in IntegerPartition::all(d) {
                assert_eq!(
                    *table.entry(&alpha).unwrap(),
                    wg_unitary(&alpha).unwrap(),
                    "class {alpha} at degree {d}"
                );
            }
        }
    }

    #[test]
    fn literal_matrix_inverse_matches_central_tables() {
        use crate::exactalg::invert_symmetric_bareiss;
        for d in 1..=3 {
            let gram = gram_unitary(d).unwrap();
            let inv = invert_symmetric_bareiss(gram.matrix()).unwrap();
            let table = wg_table_from_gram(GroupKind::UnitaryAdjoint, d, Regime::Symbolic).unwrap();
            let perms: Vec<Permutation> = gram
                .labels()
                .iter()
                .map(|l| match l {
                    InvariantLabel::Perm(p) => p.clone(),
                    _ => unreachable!(),
                })
                .collect();
            for (i, p) in perms.iter().enumerate() {
                for (j, q) in perms.iter().enumerate() {
                    let expect = table.entry(&cycle_type(&p.inverse().compose(q))).unwrap();
                    assert_eq!(inv.get(i, j), expect, "U d={d} entry ({i},{j})");
                }
            }
        }
        let gram = gram_orthogonal(2).unwrap();
        let inv = invert_symmetric_bareiss(gram.matrix()).unwrap();
        let table = wg_table_from_gram(GroupKind::Orthogonal, 2, Regime::Symbolic).unwrap();
        let pairings: Vec<Pairing> = gram
            .labels()
            .iter()
            .map(|l| match l {
                InvariantLabel::Pair(p) => p.clone(),
                _ => unreachable!(),
            })
            .collect();
        for (i, s) in pairings.iter().enumerate() {
            for (j, t) in pairings.iter().enumerate() {
                let expect = table.entry(&pairing_class(s, t).unwrap()).unwrap();
                assert_eq!(inv.get(i, j), expect, "O d=2 entry ({i},{j})");
            }
        }
    }

    #[test]
    fn orthogonal_table_matches_known_values() {
        let t1 = wg_table_from_gram(GroupKind::Orthogonal, 1, Regime::Symbolic).unwrap();
        assert_eq!(*t1.entry(&part(&[1])).unwrap(), rf(&[1], &[0, 1]));

        let t2 = wg_table_from_gram(GroupKind::Orthogonal, 2, Regime::Symbolic).unwrap();
        // Denominator z(z-1)(z+2) = z^3 + z^2 - 2z.
        assert_eq!(
            *t2.entry(&part(&[1, 1])).unwrap(),
            rf(&[1, 1], &[0, -2, 1, 1])
        );
        assert_eq!(*t2.entry(&part(&[2])).unwrap(), rf(&[-1], &[0, -2, 1, 1]));
    }

    #[test]
    fn symplectic_values_match_known_values() {
        assert_eq!(wg_symplectic(&part(&[1])).unwrap(), rf(&[1], &[0, 2]));
        // 1 / (4N(N-1)(2N+1)) = 1 / (8N^3 - 4N^2 - 4N).
        assert_eq!(
            wg_symplectic(&part(&[2])).unwrap(),
            rf(&[1], &[0, -4, -4, 8])
        );
        assert_eq!(
            wg_symplectic(&part(&[1, 1])).unwrap(),
            rf(&[-1, 2], &[0, -4, -4, 8])
        );
    }

    #[test]
    fn symplectic_stable_table_matches_signed_inverse_of_brute_gram() {
        for n in [2i64, 3] {
            let d = 2;
            let table = wg_table_from_gram(GroupKind::Symplectic, d, Regime::Numeric(n)).unwrap();
            assert!(table.stable());
            let gram = gram_bruteforce(GroupKind::Symplectic, d, n as usize).unwrap();
            let inv = invert_symmetric(gram.matrix()).unwrap();
            let pairings: Vec<Pairing> = gram
                .labels()
                .iter()
                .map(|l| match l {
                    InvariantLabel::Pair(p) => p.clone(),
                    _ => unreachable!(),
                })
                .collect();
            for (i, s) in pairings.iter().enumerate() {
                for (j, t) in pairings.iter().enumerate() {
                    let expect = table.pairing_pair_weight(s, t).unwrap();
                    let got = RationalFunction::from_rational(inv.get(i, j).clone());
                    assert_eq!(got, expect, "Sp d=2 n={n} entry ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn symplectic_unstable_table_is_signed_pseudoinverse() {
        // d=2, N=1: the Gram matrix is singular, so this exercises the
        // brute-force + pseudoinverse + sign-centrality path.
        let table = wg_table_from_gram(GroupKind::Symplectic, 2, Regime::Numeric(1)).unwrap();
        assert!(!table.stable());
        assert!(table.detail().is_some());
        let gram = gram_bruteforce(GroupKind::Symplectic, 2, 1).unwrap();
        let w = table.detail().unwrap();
        // G W G = G certifies the pseudoinverse on the singular Gram.
        let gwg = gram
            .matrix()
            .mul(&w.weights)
            .unwrap()
            .mul(gram.matrix())
            .unwrap();
        assert_eq!(gwg, *gram.matrix());
    }

    #[test]
    fn circular_weights_match_known_values() {
        let id2 = Permutation::identity(2);
        let swap = Permutation::from_images(vec![2, 1]).unwrap();
        assert_eq!(wg_coe(&id2, Regime::Symbolic).unwrap(), rf(&[1], &[1, 1]));
        assert_eq!(wg_coe(&swap, Regime::Symbolic).unwrap(), rf(&[1], &[1, 1]));
        assert_eq!(wg_coe(&id2, Regime::Numeric(2)).unwrap(), rf(&[1], &[3]));

        // CSE: identity weighs 1/(2N-1)... with the (-1)^m twist:
        // (-1) * 1/(1-2N) = 1/(2N-1); the swap picks up sgn = -1.
        assert_eq!(wg_cse(&id2, Regime::Symbolic).unwrap(), rf(&[1], &[-1, 2]));
        assert_eq!(wg_cse(&swap, Regime::Symbolic).unwrap(), rf(&[-1], &[-1, 2]));
        assert_eq!(wg_cse(&id2, Regime::Numeric(1)).unwrap(), RationalFunction::one());
    }

    #[test]
    fn circular_pole_surfaces_as_error() {
        // The orthogonal value for the full cycle at degree 3 has a pole at
        // z = 2, which the COE hits at N = 1.
        let wg3 = wg_orthogonal(&part(&[3])).unwrap();
        assert!(evaluate(&wg3, &br_int(2)).is_err());
        let sigma = coset_representative(&part(&[3]));
        assert!(wg_coe(&sigma, Regime::Numeric(1)).is_err());
    }

    #[test]
    fn numeric_stable_tables_match_symbolic_evaluation() {
        for d in 1..=3usize {
            for group in [
                GroupKind::SymmetricPermRep,
                GroupKind::UnitaryAdjoint,
                GroupKind::Orthogonal,
                GroupKind::Symplectic,
            ] {
                let sym = wg_table_from_gram(group, d, Regime::Symbolic).unwrap();
                for n in [d as i64, d as i64 + 1] {
                    let num = wg_table_from_gram(group, d, Regime::Numeric(n)).unwrap();
                    assert!(num.stable());
                    for (class, value) in num.entries() {
                        let expect = evaluate(sym.entry(class).unwrap(), &br_int(n)).unwrap();
                        assert_eq!(
                            value.as_constant().unwrap(),
                            expect,
                            "{group} d={d} n={n} class {class}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn unstable_unitary_table_is_quarter_at_rank_one() {
        let table = wg_table_from_gram(GroupKind::UnitaryAdjoint, 2, Regime::Numeric(1)).unwrap();
        assert!(!table.stable());
        let quarter = RationalFunction::from_rational(br(1, 4));
        assert_eq!(*table.entry(&part(&[1, 1])).unwrap(), quarter);
        assert_eq!(*table.entry(&part(&[2])).unwrap(), quarter);
        let detail = table.detail().unwrap();
        assert_eq!(detail.labels.len(), 2);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(*detail.weights.get(i, j), br(1, 4));
            }
        }
    }

    #[test]
    fn unstable_pseudoinverse_tables_build_up_to_degree_four() {
        for d in 2..=4usize {
            for n in 1..d as i64 {
                let table =
                    wg_table_from_gram(GroupKind::UnitaryAdjoint, d, Regime::Numeric(n)).unwrap();
                assert!(!table.stable(), "U d={d} n={n}");
                assert!(table.detail().is_some());
            }
        }
        for d in 2..=4usize {
            for n in 1..d as i64 {
                let table =
                    wg_table_from_gram(GroupKind::Orthogonal, d, Regime::Numeric(n)).unwrap();
                assert!(!table.stable(), "O d={d} n={n}");
                assert!(table.detail().is_some());
            }
        }
    }

    #[test]
    fn baik_rains_examples() {
        let t = wg_unitary_baik_rains(2, 1).unwrap();
        assert!(!t.stable());
        let detail = t.detail().unwrap();
        assert_eq!(detail.labels.len(), 1);
        assert_eq!(*detail.weights.get(0, 0), BigRational::one());
        assert_eq!(t.entries().len(), 1);
        assert_eq!(
            *t.entry(&part(&[1, 1])).unwrap(),
            RationalFunction::one()
        );

        let t32 = wg_unitary_baik_rains(3, 2).unwrap();
        assert_eq!(t32.detail().unwrap().labels.len(), 5);
        assert_eq!(t32.entries().len(), 3);

        // At or above the stable range the basis is all of S(d) and the
        // weights agree with the central table.
        let t22 = wg_unitary_baik_rains(2, 2).unwrap();
        assert!(t22.stable());
        let central = wg_table_from_gram(GroupKind::UnitaryAdjoint, 2, Regime::Numeric(2)).unwrap();
        for (class, value) in t22.entries() {
            assert_eq!(value, central.entry(class).unwrap());
        }
    }

    #[test]
    fn baik_rains_weights_are_not_a_class_function_at_degree_three() {
        // The restricted-basis weights genuinely depend on more than the
        // cycle type, which is why the entrywise detail exists.
        let t = wg_unitary_baik_rains(3, 2).unwrap();
        let d = t.detail().unwrap();
        let perms: Vec<Permutation> = d
            .labels
            .iter()
            .map(|l| match l {
                InvariantLabel::Perm(p) => p.clone(),
                _ => unreachable!(),
            })
            .collect();
        let mut by_class: BTreeMap<IntegerPartition, BigRational> = BTreeMap::new();
        let mut varies = false;
        for (i, p) in perms.iter().enumerate() {
            for (j, q) in perms.iter().enumerate() {
                let class = cycle_type(&p.inverse().compose(q));
                let w = d.weights.get(i, j).clone();
                if let Some(seen) = by_class.get(&class) {
                    if *seen != w {
                        varies = true;
                    }
                } else {
                    by_class.insert(class, w);
                }
            }
        }
        assert!(varies);
    }

    #[test]
    fn orthogonal_sign_pattern_of_leading_terms() {
        // Leading term of the orthogonal Weingarten function of alpha |- d:
        // sign (-1)^(d - len(alpha)), order z^-(2d - len(alpha)).
        for d in 1..=3usize {
            for alpha in IntegerPartition::all(d) {
                let w = wg_orthogonal(&alpha).unwrap();
                let num_deg = w.num().degree().expect("nonzero");
                let den_deg = w.den().degree().expect("nonzero");
                assert_eq!(den_deg - num_deg, 2 * d - alpha.len(), "order for {alpha}");
                let lead = w.num().leading_coeff().unwrap() / w.den().leading_coeff().unwrap();
                let expect_negative = (d - alpha.len()) % 2 == 1;
                assert_eq!(
                    lead < BigRational::zero(),
                    expect_negative,
                    "sign for {alpha}"
                );
            }
        }
    }

    #[test]
    fn asymptotic_counts_match_series_expansion() {
        // (-1)^{|pi|} N^{d+|pi|} Wg(type pi) expands into the walk counts at
        // even offsets and zeros at odd offsets.
        for d in 1..=3usize {
            let id = Permutation::identity(d);
            for alpha in IntegerPartition::all(d) {
                let sigma = alpha.representative();
                let counts = wg_unitary_asymptotic(&id, &sigma, 2).unwrap();
                let norm = crate::combinat::word_norm(&sigma);
                let wg = wg_unitary(&alpha).unwrap();
                let mut f = wg.mul(&RationalFunction::from_polynomial(UniPolynomial::monomial(
                    BigRational::one(),
                    d + norm,
                )));
                if norm % 2 == 1 {
                    f = f.neg();
                }
                let series = f.series_at_infinity(5).unwrap();
                for (k, &count) in counts.iter().enumerate() {
                    assert_eq!(
                        series[2 * k],
                        br_int(count as i64),
                        "walk count k={k} for {alpha}"
                    );
                }
                assert_eq!(series[1], BigRational::zero());
                assert_eq!(series[3], BigRational::zero());
            }
        }
    }

    #[test]
    fn asymptotic_examples() {
        let id1 = Permutation::identity(1);
        assert_eq!(wg_unitary_asymptotic(&id1, &id1, 2).unwrap(), vec![1, 0, 0]);
        let id2 = Permutation::identity(2);
        let swap = Permutation::from_images(vec![2, 1]).unwrap();
        assert_eq!(wg_unitary_asymptotic(&id2, &id2, 2).unwrap(), vec![1, 1, 1]);
        assert_eq!(wg_unitary_asymptotic(&id2, &swap, 2).unwrap(), vec![1, 1, 1]);
        let id3 = Permutation::identity(3);
        let cyc = Permutation::from_images(vec![2, 3, 1]).unwrap();
        assert_eq!(
            wg_unitary_asymptotic(&id3, &cyc, 2).unwrap(),
            vec![2, 10, 42]
        );
    }

    #[test]
    fn table_json_round_trip() {
        let table = wg_table_from_gram(GroupKind::UnitaryAdjoint, 3, Regime::Symbolic).unwrap();
        let json = table.to_json().unwrap();
        let back = WeingartenTable::from_json(&json).unwrap();
        assert_eq!(back, table);

        let numeric = wg_table_from_gram(GroupKind::Orthogonal, 2, Regime::Numeric(5)).unwrap();
        let back = WeingartenTable::from_json(&numeric.to_json().unwrap()).unwrap();
        assert_eq!(back, numeric);

        // Entrywise tables refuse to serialize.
        let unstable = wg_table_from_gram(GroupKind::UnitaryAdjoint, 2, Regime::Numeric(1)).unwrap();
        assert!(unstable.to_json().is_err());
    }

    #[test]
    fn cache_builds_once_and_serves_all_groups() {
        let mut cache = WgCache::new();
        assert!(cache.is_empty());
        let first = cache
            .get(GroupKind::UnitaryAdjoint, 2, Regime::Symbolic)
            .unwrap()
            .clone();
        let second = cache
            .get(GroupKind::UnitaryAdjoint, 2, Regime::Symbolic)
            .unwrap()
            .clone();
        assert_eq!(first, second);
        assert_eq!(cache.len(), 1);
        assert!(cache.get(GroupKind::COE, 2, Regime::Symbolic).is_err());
        assert_eq!(cache.len(), 1, "failed builds are not cached");
    }

    #[test]
    fn group_kind_parse_round_trip() {
        for g in [
            GroupKind::SymmetricPermRep,
            GroupKind::UnitaryAdjoint,
            GroupKind::Orthogonal,
            GroupKind::Symplectic,
            GroupKind::COE,
            GroupKind::CSE,
        ] {
            assert_eq!(GroupKind::parse(&g.to_string()).unwrap(), g);
        }
        assert!(GroupKind::parse("SU").is_err());
    }
}
