//! Haar integrals of matrix-entry monomials for every supported group, via
//! the Weingarten summation formulas, plus independent oracles: the full
//! group sum for the symmetric group and explicit projection matrices for
//! the tensor representations.
//!
//! Index conventions. A monomial over a real-type group is a list of
//! (row, column) pairs; the row word 𝐢 and column word 𝐣 are matched by
//! pairings through the delta symbols. Unitary-type monomials carry separate
//! conjugated and plain factor lists. All deltas follow the crate-wide
//! convention delta_{i, i'rho} <=> i(x) = i'(rho(x)).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::combinat::{
    coset_type, enumerate_pairings, enumerate_set_partitions, fiber_type, sign, CombinatError,
    IndexSequence, IntegerPartition, Pairing, Permutation,
};
use crate::exactalg::{
    br_int, BigRational, ExactAlgError, ExactMatrix, RationalFunction, UniPolynomial,
};
use crate::weingarten::{
    circular_class_values, wg_table_from_gram, GroupKind, InvariantLabel, Regime, WeingartenError,
    WeingartenTable, WgCache,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegrateError(pub String);

impl fmt::Display for IntegrateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<CombinatError> for IntegrateError {
    fn from(e: CombinatError) -> Self {
        IntegrateError(e.0)
    }
}

impl From<ExactAlgError> for IntegrateError {
    fn from(e: ExactAlgError) -> Self {
        IntegrateError(e.to_string())
    }
}

impl From<WeingartenError> for IntegrateError {
    fn from(e: WeingartenError) -> Self {
        IntegrateError(e.0)
    }
}

fn err<T>(msg: &str) -> Result<T, IntegrateError> {
    Err(IntegrateError(String::from(msg)))
}

/// A product of unitary matrix entries: conjugated factors U̅_{i(x) j(x)}
/// and plain factors U_{i'(x) j'(x)}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitaryMonomial {
    conj_pairs: Vec<(usize, usize)>,
    plain_pairs: Vec<(usize, usize)>,
}

impl UnitaryMonomial {
    pub fn new(
        conj_pairs: Vec<(usize, usize)>,
        plain_pairs: Vec<(usize, usize)>,
    ) -> Result<Self, IntegrateError> {
        if conj_pairs
            .iter()
            .chain(plain_pairs.iter())
            .any(|&(i, j)| i == 0 || j == 0)
        {
            return err("monomial indices are 1-based and must be positive");
        }
        Ok(UnitaryMonomial {
            conj_pairs,
            plain_pairs,
        })
    }

    pub fn conj_pairs(&self) -> &[(usize, usize)] {
        &self.conj_pairs
    }

    pub fn plain_pairs(&self) -> &[(usize, usize)] {
        &self.plain_pairs
    }

    pub fn conj_degree(&self) -> usize {
        self.conj_pairs.len()
    }

    pub fn plain_degree(&self) -> usize {
        self.plain_pairs.len()
    }

    pub fn max_index(&self) -> usize {
        self.conj_pairs
            .iter()
            .chain(self.plain_pairs.iter())
            .map(|&(i, j)| i.max(j))
            .max()
            .unwrap_or(1)
    }
}

/// A product of real-type matrix entries R_{i(1)j(1)} ... R_{i(k)j(k)}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealMonomial {
    pairs: Vec<(usize, usize)>,
}

impl RealMonomial {
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self, IntegrateError> {
        if pairs.iter().any(|&(i, j)| i == 0 || j == 0) {
            return err("monomial indices are 1-based and must be positive");
        }
        Ok(RealMonomial { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn max_index(&self) -> usize {
        self.pairs
            .iter()
            .map(|&(i, j)| i.max(j))
            .max()
            .unwrap_or(1)
    }

    /// Row word (first coordinates) in an alphabet large enough to hold it.
    pub fn row_word(&self, alphabet: usize) -> Result<IndexSequence, IntegrateError> {
        Ok(IndexSequence::new(
            self.pairs.iter().map(|&(i, _)| i).collect(),
            alphabet,
        )?)
    }

    /// Column word (second coordinates).
    pub fn col_word(&self, alphabet: usize) -> Result<IndexSequence, IntegrateError> {
        Ok(IndexSequence::new(
            self.pairs.iter().map(|&(_, j)| j).collect(),
            alphabet,
        )?)
    }
}

/// Parse failure for the monomial text grammar, locating the offending
/// token by its 1-based byte column in the original input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialParseError {
    pub token: String,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for MonomialParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at column {}: {:?}",
            self.message, self.column, self.token
        )
    }
}

fn parse_err<T>(token: &str, column: usize, message: &str) -> Result<T, MonomialParseError> {
    Err(MonomialParseError {
        token: String::from(token),
        column,
        message: String::from(message),
    })
}

/// Parses a semicolon-separated pair list "i,j;k,l;..." starting at byte
/// offset `base` of the full input (for error columns). Whitespace is
/// insignificant. An empty or all-whitespace body is an empty list.
fn parse_pair_list(
    body: &str,
    base: usize,
) -> Result<Vec<(usize, usize)>, MonomialParseError> {
    let mut out = Vec::new();
    if body.trim().is_empty() {
        return Ok(out);
    }
    let mut cursor = 0usize;
    for chunk in body.split(';') {
        let column = base + cursor + 1;
        let token = chunk.trim();
        if token.is_empty() {
            return parse_err(chunk, column, "empty index pair");
        }
        let mut nums = Vec::new();
        for part in token.split(',') {
            let p = part.trim();
            match p.parse::<usize>() {
                Ok(v) if v >= 1 => nums.push(v),
                _ => return parse_err(token, column, "expected positive integer pair i,j"),
            }
        }
        if nums.len() != 2 {
            return parse_err(token, column, "expected exactly two indices i,j");
        }
        out.push((nums[0], nums[1]));
        cursor += chunk.len() + 1;
    }
    Ok(out)
}

/// Parses the real-group monomial grammar: "1,2;1,3;2,2;2,3".
pub fn parse_real_monomial(text: &str) -> Result<RealMonomial, MonomialParseError> {
    let pairs = parse_pair_list(text, 0)?;
    RealMonomial::new(pairs).map_err(|e| MonomialParseError {
        token: String::from(text),
        column: 1,
        message: e.0,
    })
}

/// Parses the unitary-type monomial grammar:
/// "conj:1,1;2,2;3,3 plain:1,2;2,3;3,1". Either section may be empty; both
/// markers are required, in either order.
pub fn parse_unitary_monomial(text: &str) -> Result<UnitaryMonomial, MonomialParseError> {
    let conj_at = match text.find("conj:") {
        Some(p) => p,
        None => return parse_err(text, 1, "missing conj: section"),
    };
    let plain_at = match text.find("plain:") {
        Some(p) => p,
        None => return parse_err(text, 1, "missing plain: section"),
    };
    let head = &text[..conj_at.min(plain_at)];
    if !head.trim().is_empty() {
        return parse_err(head.trim(), 1, "unexpected text before sections");
    }
    let (conj_body, conj_base, plain_body, plain_base) = if conj_at < plain_at {
        (
            &text[conj_at + 5..plain_at],
            conj_at + 5,
            &text[plain_at + 6..],
            plain_at + 6,
        )
    } else {
        (
            &text[conj_at + 5..],
            conj_at + 5,
            &text[plain_at + 6..conj_at],
            plain_at + 6,
        )
    };
    let conj = parse_pair_list(conj_body, conj_base)?;
    let plain = parse_pair_list(plain_body, plain_base)?;
    UnitaryMonomial::new(conj, plain).map_err(|e| MonomialParseError {
        token: String::from(text),
        column: 1,
        message: e.0,
    })
}

/// Delta symbol of a pairing on one index word: 1 iff the word is constant
/// on every pair of sigma.
pub fn delta_pairing(sigma: &Pairing, i: &IndexSequence) -> Result<i8, IntegrateError> {
    if i.len() != 2 * sigma.size() {
        return err("index word length must be twice the pairing size");
    }
    Ok(delta_pairing_word(sigma.pairs(), i.entries()) as i8)
}

/// Slice kernel behind `delta_pairing`: positions in `pairs` are 1-based
/// into `w`. No length checks; callers stream validated words.
pub(crate) fn delta_pairing_word(pairs: &[(usize, usize)], w: &[usize]) -> bool {
    pairs.iter().all(|&(a, b)| w[a - 1] == w[b - 1])
}

/// Skew bilinear form ⟨e_a, e_b⟩_J on basis vectors of C^{2N}:
/// +1 if b = a + N, −1 if a = b + N, 0 otherwise.
fn j_form(a: usize, b: usize, half: usize) -> i8 {
    if b == a + half {
        1
    } else if a == b + half {
        -1
    } else {
        0
    }
}

/// Signed delta symbol of a pairing on one index word over [2N]: the product
/// over canonical pairs (a, b) of ⟨e_{i(a)}, e_{i(b)}⟩_J.
pub fn delta_prime(sigma: &Pairing, i: &IndexSequence) -> Result<i8, IntegrateError> {
    if i.len() != 2 * sigma.size() {
        return err("index word length must be twice the pairing size");
    }
    if i.alphabet() % 2 != 0 {
        return err("signed delta needs an even alphabet 2N");
    }
    Ok(delta_prime_word(sigma.pairs(), i.entries(), i.alphabet() / 2))
}

/// Slice kernel behind `delta_prime`: positions in `pairs` are 1-based into
/// `w`, whose letters live in `[2 * half]`.
pub(crate) fn delta_prime_word(pairs: &[(usize, usize)], w: &[usize], half: usize) -> i8 {
    let mut out = 1i8;
    for &(a, b) in pairs {
        let v = j_form(w[a - 1], w[b - 1], half);
        if v == 0 {
            return 0;
        }
        out *= v;
    }
    out
}

/// Permutation delta symbol matching two words: 1 iff i(sigma(r)) = j(r)
/// for every position r.
pub fn delta_perm(
    sigma: &Permutation,
    i: &IndexSequence,
    j: &IndexSequence,
) -> Result<i8, IntegrateError> {
    if i.len() != sigma.degree() || j.len() != sigma.degree() {
        return err("word lengths must match the permutation degree");
    }
    for r in 1..=sigma.degree() {
        if i.get(sigma.apply(r)) != j.get(r) {
            return Ok(0);
        }
    }
    Ok(1)
}

/// One exact integral value. The value is a rational function of N in the
/// symbolic regime and a constant in a numeric regime. `stable` records
/// whether the value comes from the invertible-Gram range: a symbolic value
/// is the stable-range rational function, valid at every rank at or above
/// the monomial's degree; a numeric value below that range is still exact
/// but comes from the pseudoinverse table.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralResult {
    pub value: RationalFunction,
    pub regime: Regime,
    pub stable: bool,
}

impl IntegralResult {
    fn exact(value: RationalFunction, regime: Regime) -> Self {
        IntegralResult {
            value,
            regime,
            stable: true,
        }
    }

    fn zero(regime: Regime) -> Self {
        IntegralResult::exact(RationalFunction::zero(), regime)
    }

    fn one(regime: Regime) -> Self {
        IntegralResult::exact(RationalFunction::one(), regime)
    }
}

fn check_alphabet(max_index: usize, bound: usize, what: &str) -> Result<(), IntegrateError> {
    if max_index > bound {
        return Err(IntegrateError(format!(
            "index {max_index} exceeds the {what} alphabet [{bound}]: insufficient alphabet"
        )));
    }
    Ok(())
}

fn stable_at(regime: Regime, degree: usize) -> bool {
    match regime {
        Regime::Symbolic => true,
        Regime::Numeric(n) => n >= degree as i64,
    }
}

/// Integral of `prod_x u_{i(x) j(x)}` over S(N) in the permutation-matrix
/// representation: zero unless the two words have the same fiber partition,
/// else the reciprocal falling factorial at the number of blocks.
pub fn integrate_symmetric_group(
    i: &IndexSequence,
    j: &IndexSequence,
    regime: Regime,
) -> Result<IntegralResult, IntegrateError> {
    if i.len() != j.len() {
        return err("the two index words must have equal length");
    }
    if i.is_empty() {
        return Ok(IntegralResult::one(regime));
    }
    if let Regime::Numeric(n) = regime {
        if n < 1 {
            return err("rank parameter must be positive");
        }
        check_alphabet(word_max(i), n as usize, "permutation-matrix")?;
        check_alphabet(word_max(j), n as usize, "permutation-matrix")?;
    }
    let stable = stable_at(regime, i.len());
    if fiber_type(i) != fiber_type(j) {
        return Ok(IntegralResult {
            value: RationalFunction::zero(),
            regime,
            stable,
        });
    }
    let blocks = fiber_type(i).block_count();
    let ff = UniPolynomial::falling_factorial(blocks);
    let value = match regime {
        Regime::Symbolic => RationalFunction::new(UniPolynomial::one(), ff)?,
        Regime::Numeric(n) => {
            let at = ff.eval(&br_int(n));
            if at.is_zero() {
                return err("insufficient alphabet: more index values than symbols");
            }
            RationalFunction::from_rational(BigRational::one() / at)
        }
    };
    Ok(IntegralResult {
        value,
        regime,
        stable,
    })
}

/// Literal group average over all N! permutation matrices; the oracle
/// `integrate_symmetric_group` is tested against.
pub fn integrate_symmetric_group_oracle(
    i: &IndexSequence,
    j: &IndexSequence,
    n: usize,
) -> Result<BigRational, IntegrateError> {
    if i.len() != j.len() {
        return err("the two index words must have equal length");
    }
    if n == 0 || n > 8 {
        return err("group-sum oracle supports 1 <= N <= 8");
    }
    if !i.is_empty() {
        check_alphabet(word_max(i), n, "permutation-matrix")?;
        check_alphabet(word_max(j), n, "permutation-matrix")?;
    }
    let mut hits = 0i64;
    let mut total = 0i64;
    for g in Permutation::all(n) {
        total += 1;
        if (1..=i.len()).all(|x| g.apply(j.get(x)) == i.get(x)) {
            hits += 1;
        }
    }
    Ok(br_int(hits) / br_int(total))
}

fn word_max(i: &IndexSequence) -> usize {
    i.entries().iter().copied().max().unwrap_or(0)
}

/// Permutations whose matching delta against the two words is 1: the set
/// `{rho : a(rho(x)) = b(x) for all x}`. Both sums over S(d) collapse to
/// these sets before any Weingarten value is touched.
fn matching_permutations(a: &[usize], b: &[usize]) -> Vec<Permutation> {
    let d = a.len();
    Permutation::all(d)
        .into_iter()
        .filter(|rho| (1..=d).all(|x| a[rho.apply(x) - 1] == b[x - 1]))
        .collect()
}

/// Integral of a mixed monomial in entries of a Haar-unitary matrix:
/// `E[prod u_{plain} prod conj(u_{conj})]`, via the double sum over
/// permutation pairs delta-matching conjugated to plain indices, weighted by
/// the unitary Weingarten table. Unbalanced degrees integrate to zero.
pub fn integrate_unitary(
    m: &UnitaryMonomial,
    regime: Regime,
) -> Result<IntegralResult, IntegrateError> {
    let mut cache = WgCache::new();
    integrate_unitary_with(&mut cache, m, regime)
}

/// As `integrate_unitary`, sharing a table cache across calls.
pub fn integrate_unitary_with(
    cache: &mut WgCache,
    m: &UnitaryMonomial,
    regime: Regime,
) -> Result<IntegralResult, IntegrateError> {
    if let Regime::Numeric(n) = regime {
        if n < 1 {
            return err("rank parameter must be positive");
        }
        check_alphabet(m.max_index(), n as usize, "unitary")?;
    }
    if m.conj_degree() != m.plain_degree() {
        return Ok(IntegralResult::zero(regime));
    }
    let d = m.plain_degree();
    if d == 0 {
        return Ok(IntegralResult::one(regime));
    }
    let conj_rows: Vec<usize> = m.conj_pairs().iter().map(|p| p.0).collect();
    let conj_cols: Vec<usize> = m.conj_pairs().iter().map(|p| p.1).collect();
    let plain_rows: Vec<usize> = m.plain_pairs().iter().map(|p| p.0).collect();
    let plain_cols: Vec<usize> = m.plain_pairs().iter().map(|p| p.1).collect();
    // delta_{i, i'rho}: conjugated indices match plain indices through rho.
    let rhos = matching_permutations(&plain_rows, &conj_rows);
    if rhos.is_empty() {
        return Ok(IntegralResult::zero(regime));
    }
    let sigmas = matching_permutations(&plain_cols, &conj_cols);
    if sigmas.is_empty() {
        return Ok(IntegralResult::zero(regime));
    }
    let table = cache.get(GroupKind::UnitaryAdjoint, d, regime)?;
    let mut value = RationalFunction::zero();
    for rho in &rhos {
        for sigma in &sigmas {
            value = value.add(&table.perm_pair_weight(rho, sigma)?);
        }
    }
    Ok(IntegralResult {
        value,
        regime,
        stable: table.stable(),
    })
}

/// Pairings whose plain delta on the word is 1.
fn matching_pairings(w: &[usize]) -> Result<Vec<Pairing>, IntegrateError> {
    Ok(enumerate_pairings(w.len())?
        .into_iter()
        .filter(|p| delta_pairing_word(p.pairs(), w))
        .collect())
}

/// Integral of `E[prod r_{i(x) j(x)}]` over the orthogonal group: zero for
/// odd length, else the double sum over pairings of the row and column
/// words, weighted by the orthogonal Weingarten table.
pub fn integrate_orthogonal(
    m: &RealMonomial,
    regime: Regime,
) -> Result<IntegralResult, IntegrateError> {
    let mut cache = WgCache::new();
    integrate_orthogonal_with(&mut cache, m, regime)
}

/// As `integrate_orthogonal`, sharing a table cache across calls.
pub fn integrate_orthogonal_with(
    cache: &mut WgCache,
    m: &RealMonomial,
    regime: Regime,
) -> Result<IntegralResult, IntegrateError> {
    if let Regime::Numeric(n) = regime {
        if n < 1 {
            return err("rank parameter must be positive");
        }
        check_alphabet(m.max_index(), n as usize, "orthogonal")?;
    }
    if m.is_empty() {
        return Ok(IntegralResult::one(regime));
    }
    if m.len() % 2 != 0 {
        return Ok(IntegralResult::zero(regime));
    }
    let d = m.len() / 2;
    let rows: Vec<usize> = m.pairs().iter().map(|p| p.0).collect();
    let cols: Vec<usize> = m.pairs().iter().map(|p| p.1).collect();
    let sigmas = matching_pairings(&rows)?;
    if sigmas.is_empty() {
        return Ok(IntegralResult::zero(regime));
    }
    let taus = matching_pairings(&cols)?;
    if taus.is_empty() {
        return Ok(IntegralResult::zero(regime));
    }
    let table = cache.get(GroupKind::Orthogonal, d, regime)?;
    let mut value = RationalFunction::zero();
    for sigma in &sigmas {
        for tau in &taus {
            value = value.add(&table.pairing_pair_weight(sigma, tau)?);
        }
    }
    Ok(IntegralResult {
        value,
        regime,
        stable: table.stable(),
    })
}

/// Signed pairings: those whose J-form delta on the word is nonzero, with
/// the sign.
fn signed_pairings(w: &[usize], half: usize) -> Result<Vec<(Pairing, i8)>, IntegrateError> {
    Ok(enumerate_pairings(w.len())?
        .into_iter()
        .filter_map(|p| {
            let v = delta_prime_word(p.pairs(), w, half);
            (v != 0).then_some((p, v))
        })
        .collect())
}

/// Integral of `E[prod s_{i(x) j(x)}]` over the compact symplectic group of
/// 2N x 2N matrices: the signed double sum over pairings, weighted by the
/// symplectic Weingarten table.
///
/// Indices are encoded over `[2 * encoded_half]`: `encoded_half` plays the
/// role of N, so index `k <= encoded_half` means the k-th base coordinate
/// and `k + encoded_half` means its J-partner N + k. A symbolic result is
/// the rational function valid at every rank `N >= encoded_half`; a numeric
/// regime must have `n == encoded_half`, making the indices literal.
pub fn integrate_symplectic(
    m: &RealMonomial,
    encoded_half: usize,
    regime: Regime,
) -> Result<IntegralResult, IntegrateError> {
    let mut cache = WgCache::new();
    integrate_symplectic_with(&mut cache, m, encoded_half, regime)
}

/// As `integrate_symplectic`, sharing a table cache across calls.
pub fn integrate_symplectic_with(
    cache: &mut WgCache,
    m: &RealMonomial,
    encoded_half: usize,
    regime: Regime,
) -> Result<IntegralResult, IntegrateError> {
    if let Regime::Numeric(n) = regime {
        if n < 1 {
            return err("rank parameter must be positive");
        }
    }
    if m.is_empty() {
        return Ok(IntegralResult::one(regime));
    }
    if encoded_half == 0 {
        return err("encoding half must be positive");
    }
    if let Regime::Numeric(n) = regime {
        if n as usize != encoded_half {
            return Err(IntegrateError(format!(
                "symplectic indices are encoded over [2*{encoded_half}]; numeric rank {n} must equal the encoding half"
            )));
        }
    }
    check_alphabet(m.max_index(), 2 * encoded_half, "symplectic")?;
    if m.len() % 2 != 0 {
        return Ok(IntegralResult::zero(regime));
    }
    let d = m.len() / 2;
    let rows: Vec<usize> = m.pairs().iter().map(|p| p.0).collect();
    let cols: Vec<usize> = m.pairs().iter().map(|p| p.1).collect();
    let sigmas = signed_pairings(&rows, encoded_half)?;
    if sigmas.is_empty() {
        return Ok(IntegralResult::zero(regime));
    }
    let taus = signed_pairings(&cols, encoded_half)?;
    if taus.is_empty() {
        return Ok(IntegralResult::zero(regime));
    }
    let table = cache.get(GroupKind::Symplectic, d, regime)?;
    let mut value = RationalFunction::zero();
    for (sigma, ds) in &sigmas {
        for (tau, dt) in &taus {
            let w = table.pairing_pair_weight(sigma, tau)?;
            let signed = match ds * dt {
                1 => w,
                -1 => w.neg(),
                _ => unreachable!("deltas are nonzero"),
            };
            value = value.add(&signed);
        }
    }
    Ok(IntegralResult {
        value,
        regime,
        stable: table.stable(),
    })
}

/// Shared single-sum evaluator for the circular ensembles: the words
/// concatenate the index pairs of the plain entries (i) and of the
/// conjugated entries (j); the sum runs over all of S(2n) with the matching
/// delta and the ensemble's per-permutation weight.
fn integrate_circular(
    group: GroupKind,
    i: &IndexSequence,
    j: &IndexSequence,
    regime: Regime,
) -> Result<IntegralResult, IntegrateError> {
    if i.len() % 2 != 0 || j.len() % 2 != 0 {
        return err("circular-ensemble words concatenate index pairs and must have even length");
    }
    if let Regime::Numeric(n) = regime {
        if n < 1 {
            return err("rank parameter must be positive");
        }
        let bound = if group == GroupKind::COE {
            n as usize
        } else {
            2 * n as usize
        };
        let what = if group == GroupKind::COE { "COE" } else { "CSE" };
        check_alphabet(word_max(i).max(word_max(j)), bound, what)?;
    }
    if i.len() != j.len() {
        return Ok(IntegralResult::zero(regime));
    }
    if i.is_empty() {
        return Ok(IntegralResult::one(regime));
    }
    let m = i.len() / 2;
    let matching = matching_permutations(i.entries(), j.entries());
    if matching.is_empty() {
        return Ok(IntegralResult::zero(regime));
    }
    let values = circular_class_values(m, group, regime)?;
    let mut value = RationalFunction::zero();
    for sigma in &matching {
        let class = coset_type(sigma)?;
        let w = values.get(&class).cloned().ok_or_else(|| {
            IntegrateError(format!("coset type {class} missing from {group} values"))
        })?;
        let term = if group == GroupKind::CSE && sign(sigma) < 0 {
            w.neg()
        } else {
            w
        };
        value = value.add(&term);
    }
    Ok(IntegralResult {
        value,
        regime,
        stable: stable_at(regime, m),
    })
}

/// Integral of a mixed COE monomial `E[v_{i(1)i(2)} ... conj(v_{j(1)j(2)}
/// ...)]`, where the word `i` concatenates the index pairs of the plain
/// entries and `j` those of the conjugated entries. Unbalanced word lengths
/// integrate to zero.
pub fn integrate_coe(
    i: &IndexSequence,
    j: &IndexSequence,
    regime: Regime,
) -> Result<IntegralResult, IntegrateError> {
    integrate_circular(GroupKind::COE, i, j, regime)
}

/// Integral of a mixed CSE monomial over the 2N x 2N self-dual matrices,
/// with words as in `integrate_coe`. The per-permutation weight carries the
/// permutation's sign, which is what makes the matrix's antisymmetry come
/// out of the formula.
pub fn integrate_cse(
    i: &IndexSequence,
    j: &IndexSequence,
    regime: Regime,
) -> Result<IntegralResult, IntegrateError> {
    integrate_circular(GroupKind::CSE, i, j, regime)
}

const PROJECTION_ENTRY_LIMIT: u128 = 10_000_000;

/// Tensor-word alphabet and length for one group's projection at degree `d`
/// and rank `n`: the representation the monomials of that shape live in.
fn projection_shape(
    group: GroupKind,
    d: usize,
    n: usize,
) -> Result<(usize, usize), IntegrateError> {
    match group {
        GroupKind::SymmetricPermRep => Ok((n, d)),
        GroupKind::UnitaryAdjoint => Ok((n, 2 * d)),
        GroupKind::Orthogonal => Ok((n, 2 * d)),
        GroupKind::Symplectic => Ok((2 * n, 2 * d)),
        GroupKind::COE | GroupKind::CSE => {
            err("circular ensembles have no tensor projection route")
        }
    }
}

fn linear_index(word: &[usize], alphabet: usize) -> usize {
    word.iter().fold(0, |acc, &x| acc * alphabet + (x - 1))
}

/// Invariant coordinates and exact weight matrix of a numeric Weingarten
/// table: columns of A in the same order as the weight matrix's labels.
fn invariant_columns(
    table: &WeingartenTable,
    n: usize,
) -> Result<(Vec<Vec<i8>>, ExactMatrix<BigRational>), IntegrateError> {
    let d = table.degree();
    let (alphabet, positions) = projection_shape(table.group(), d, n)?;
    let rows = (alphabet as u128)
        .checked_pow(positions as u32)
        .unwrap_or(u128::MAX);
    if rows.saturating_mul(rows) > PROJECTION_ENTRY_LIMIT {
        return Err(IntegrateError(format!(
            "projection would have {} entries, over the limit {PROJECTION_ENTRY_LIMIT}",
            rows.saturating_mul(rows)
        )));
    }
    let rows = rows as usize;

    // Labels and weights: entrywise detail wins; otherwise enumerate the
    // full label set and read class values.
    let (labels, weights): (Vec<InvariantLabel>, ExactMatrix<BigRational>) =
        if let Some(det) = table.detail() {
            (det.labels.clone(), det.weights.clone())
        } else {
            match table.group() {
                GroupKind::SymmetricPermRep => {
                    let parts = enumerate_set_partitions(d, d);
                    let k = parts.len();
                    let mut w = ExactMatrix::zero(k, k);
                    for (idx, p) in parts.iter().enumerate() {
                        let class = IntegerPartition::new(vec![p.block_count()])?;
                        let value = table
                            .entry(&class)
                            .and_then(|v| v.as_constant())
                            .ok_or_else(|| {
                                IntegrateError(String::from(
                                    "numeric table entry must be constant",
                                ))
                            })?;
                        w.set(idx, idx, value);
                    }
                    (parts.into_iter().map(InvariantLabel::Blocks).collect(), w)
                }
                GroupKind::UnitaryAdjoint => {
                    let perms = Permutation::all(d);
                    let k = perms.len();
                    let mut w = ExactMatrix::zero(k, k);
                    for a in 0..k {
                        for b in 0..k {
                            let value = table
                                .perm_pair_weight(&perms[a], &perms[b])?
                                .as_constant()
                                .ok_or_else(|| {
                                    IntegrateError(String::from(
                                        "numeric table entry must be constant",
                                    ))
                                })?;
                            w.set(a, b, value);
                        }
                    }
                    (perms.into_iter().map(InvariantLabel::Perm).collect(), w)
                }
                GroupKind::Orthogonal | GroupKind::Symplectic => {
                    let pairings = enumerate_pairings(2 * d)?;
                    let k = pairings.len();
                    let mut w = ExactMatrix::zero(k, k);
                    for a in 0..k {
                        for b in 0..k {
                            let value = table
                                .pairing_pair_weight(&pairings[a], &pairings[b])?
                                .as_constant()
                                .ok_or_else(|| {
                                    IntegrateError(String::from(
                                        "numeric table entry must be constant",
                                    ))
                                })?;
                            w.set(a, b, value);
                        }
                    }
                    (pairings.into_iter().map(InvariantLabel::Pair).collect(), w)
                }
                GroupKind::COE | GroupKind::CSE => unreachable!("no projection route"),
            }
        };

    // A: one row per tensor word, one signed 0/1 column per invariant.
    let k = labels.len();
    let mut a = vec![vec![0i8; k]; rows];
    let mut word = vec![1usize; positions];
    let half = alphabet / 2;
    loop {
        let r = linear_index(&word, alphabet);
        for (c, label) in labels.iter().enumerate() {
            a[r][c] = match (table.group(), label) {
                (GroupKind::SymmetricPermRep, InvariantLabel::Blocks(p)) => {
                    let seq = IndexSequence::new(word.clone(), alphabet)?;
                    (fiber_type(&seq) == *p) as i8
                }
                (GroupKind::UnitaryAdjoint, InvariantLabel::Perm(rho)) => {
                    // Row word = plain-row indices u then conjugated-row
                    // indices v; the invariant operator has coordinate
                    // [u = v compose rho].
                    let (u, v) = word.split_at(d);
                    (1..=d).all(|x| u[x - 1] == v[rho.apply(x) - 1]) as i8
                }
                (GroupKind::Orthogonal, InvariantLabel::Pair(p)) => {
                    delta_pairing_word(p.pairs(), &word) as i8
                }
                (GroupKind::Symplectic, InvariantLabel::Pair(p)) => {
                    delta_prime_word(p.pairs(), &word, half)
                }
                _ => return err("label kind does not match the table's group"),
            };
        }
        let mut pos = positions;
        loop {
            if pos == 0 {
                return Ok((a, weights));
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

/// Exact projection matrix `A W A^T` of a numeric Weingarten table onto the
/// invariant subspace of the group's tensor representation. Every
/// matrix-entry integral of the matching shape is an entry of this matrix;
/// the result is an exact orthogonal projection whether the table is a true
/// inverse or a pseudoinverse.
pub fn projection_from_table(
    table: &WeingartenTable,
) -> Result<ExactMatrix<BigRational>, IntegrateError> {
    let Regime::Numeric(n) = table.regime() else {
        return err("projections are numeric: build the table at a numeric rank");
    };
    let (a, w) = invariant_columns(table, n as usize)?;
    let rows = a.len();
    let k = w.rows();
    // B = W A^T, then P = A B; A's entries are -1/0/1 so both products are
    // signed accumulations.
    let mut b = ExactMatrix::zero(k, rows);
    for c in 0..k {
        for (r, row) in a.iter().enumerate() {
            let mut acc = BigRational::zero();
            for (cc, &coord) in row.iter().enumerate() {
                match coord {
                    0 => {}
                    1 => acc += w.get(c, cc),
                    -1 => acc -= w.get(c, cc),
                    _ => unreachable!("coordinates are signs"),
                }
            }
            b.set(c, r, acc);
        }
    }
    let mut p = ExactMatrix::zero(rows, rows);
    for (r, row) in a.iter().enumerate() {
        for rr in 0..rows {
            let mut acc = BigRational::zero();
            for (c, &coord) in row.iter().enumerate() {
                match coord {
                    0 => {}
                    1 => acc += b.get(c, rr),
                    -1 => acc -= b.get(c, rr),
                    _ => unreachable!("coordinates are signs"),
                }
            }
            p.set(r, rr, acc);
        }
    }
    Ok(p)
}

/// Projection matrix of a group's degree-`d` tensor representation at
/// numeric rank `n`, through the group's standard table (pseudoinverse
/// below the stable range). For the unitary group the representation is
/// conjugation on operators, so words have length 2d: plain-entry row
/// indices, then conjugated-entry row indices.
pub fn projection_matrix(
    group: GroupKind,
    d: usize,
    n: usize,
) -> Result<ExactMatrix<BigRational>, IntegrateError> {
    let table = wg_table_from_gram(group, d, Regime::Numeric(n as i64))?;
    projection_from_table(&table)
}

/// One matrix element of the projection, read from the assembled matrix:
/// the integral of the monomial whose row word is `i` and column word is
/// `j`. Must equal the summation-formula evaluator's output exactly.
pub fn monomial_entry_from_projection(
    group: GroupKind,
    d: usize,
    n: usize,
    i: &IndexSequence,
    j: &IndexSequence,
) -> Result<BigRational, IntegrateError> {
    let (alphabet, positions) = projection_shape(group, d, n)?;
    if i.len() != positions || j.len() != positions {
        return Err(IntegrateError(format!(
            "projection words at degree {d} have length {positions}"
        )));
    }
    check_alphabet(word_max(i).max(word_max(j)), alphabet, "projection")?;
    let p = projection_matrix(group, d, n)?;
    Ok(p
        .get(
            linear_index(i.entries(), alphabet),
            linear_index(j.entries(), alphabet),
        )
        .clone())
}
