//! Floating-point Monte Carlo oracle: Haar-distributed samples from the
//! classical compact matrix groups and the circular ensembles, sample-mean
//! estimation of matrix-entry monomials, and statistical comparison against
//! exact values.
//!
//! Sampling runs on independent per-chunk random streams derived from
//! `(seed, chunk index)` and reduces the chunk statistics in a fixed order,
//! so a given `(group, N, n_samples, seed)` always produces bitwise-identical
//! estimates on one build, no matter how many threads run the chunks.

use std::fmt;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use wg_core::exactalg::BigRational;
use wg_core::integrate::{
    integrate_coe, integrate_cse, integrate_orthogonal, integrate_symplectic, integrate_unitary,
    RealMonomial, UnitaryMonomial,
};
use wg_core::combinat::IndexSequence;
use wg_core::weingarten::{GroupKind, Regime};

/// Every sample must be orthonormal to this max-norm tolerance.
pub const TOL_ORTHONORMAL: f64 = 1e-12;
/// Skew-form preservation tolerance for symplectic samples.
pub const TOL_SYMPLECTIC_FORM: f64 = 1e-10;
/// Symmetry (COE) and antisymmetry (CSE) tolerance.
pub const TOL_SYMMETRY: f64 = 1e-12;
/// Accept an estimate whose z-score against the exact value is at most this;
/// under normality a false failure has probability below 1e-6 per test.
pub const Z_THRESHOLD: f64 = 5.0;

/// Samples per work chunk; estimates depend on this constant (it fixes the
/// substream layout), so it is part of the reproducibility contract.
const CHUNK: u64 = 4096;

/// Gram-Schmidt declares a draw singular below this column norm and the
/// sampler redraws; for Gaussian matrices at these dimensions this is a
/// probability-zero event in practice.
const SINGULAR_NORM: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaarMcError(pub String);

impl fmt::Display for HaarMcError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for HaarMcError {}

fn err<T>(msg: String) -> Result<T, HaarMcError> {
    Err(HaarMcError(msg))
}

/// One sampled matrix: row-major complex entries, the ensemble it came from,
/// and the rank parameter N. The matrix dimension is N for U/O/COE and 2N
/// for Sp/CSE.
#[derive(Debug, Clone)]
pub struct MatrixSample {
    group: GroupKind,
    rank: usize,
    dim: usize,
    entries: Vec<Complex64>,
}

impl MatrixSample {
    pub fn group(&self) -> GroupKind {
        self.group
    }

    /// The rank parameter N of the ensemble.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The matrix dimension (N, or 2N for symplectic-type ensembles).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry at 1-based (row, col), matching the index convention of the
    /// monomial language.
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        assert!(
            (1..=self.dim).contains(&row) && (1..=self.dim).contains(&col),
            "matrix index ({row}, {col}) outside [{}]",
            self.dim
        );
        self.entries[(row - 1) * self.dim + (col - 1)]
    }

    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    /// Max-norm of (S* S - I): how far the columns are from orthonormal.
    pub fn orthonormality_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..d {
                    acc += self.at(k, i).conj() * self.at(k, j);
                }
                if i == j {
                    acc -= Complex64::new(1.0, 0.0);
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    /// Max-norm residual of the ensemble's defining structure beyond
    /// orthonormality: realness for O, the skew form for Sp, symmetry for
    /// the COE, antisymmetry for the CSE; zero for plain unitary samples.
    pub fn structure_residual(&self) -> f64 {
        let d = self.dim;
        match self.group {
            GroupKind::UnitaryAdjoint => 0.0,
            GroupKind::Orthogonal => {
                let mut worst = 0.0f64;
                for e in &self.entries {
                    worst = worst.max(e.im.abs());
                }
                worst
            }
            GroupKind::Symplectic => {
                // max |(tS J S - J)_{ij}| with J the block form
                // [[0, I], [-I, 0]].
                let half = d / 2;
                let mut worst = 0.0f64;
                for i in 0..d {
                    for j in 0..d {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..half {
                            acc += self.at(k, i) * self.at(k + half, j);
                            acc -= self.at(k + half, i) * self.at(k, j);
                        }
                        if j == i + half {
                            acc -= Complex64::new(1.0, 0.0);
                        }
                        if i == j + half {
                            acc += Complex64::new(1.0, 0.0);
                        }
                        worst = worst.max(acc.norm());
                    }
                }
                worst
            }
            GroupKind::COE => {
                let mut worst = 0.0f64;
                for i in 0..d {
                    for j in 0..d {
                        worst = worst.max((self.at(i, j) - self.at(j, i)).norm());
                    }
                }
                worst
            }
            GroupKind::CSE => {
                let mut worst = 0.0f64;
                for i in 0..d {
                    for j in 0..d {
                        worst = worst.max((self.at(i, j) + self.at(j, i)).norm());
                    }
                }
                worst
            }
            GroupKind::SymmetricPermRep => 0.0,
        }
    }
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(gaussian(rng), gaussian(rng))
}

/// Two-pass modified Gram-Schmidt over the columns of a `dim x dim` matrix,
/// in place. The implicit triangular factor has positive real diagonal
/// (every diagonal entry is a column norm), which is precisely the phase
/// normalization that makes the orthonormal factor of a Gaussian matrix
/// Haar distributed. Returns false on a numerically singular draw.
fn orthonormalize(a: &mut [Complex64], dim: usize) -> bool {
    for j in 0..dim {
        for _pass in 0..2 {
            for k in 0..j {
                let mut proj = Complex64::new(0.0, 0.0);
                for i in 0..dim {
                    proj += a[i * dim + k].conj() * a[i * dim + j];
                }
                for i in 0..dim {
                    let t = a[i * dim + k] * proj;
                    a[i * dim + j] -= t;
                }
            }
        }
        let norm = (0..dim)
            .map(|i| a[i * dim + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if norm < SINGULAR_NORM {
            return false;
        }
        for i in 0..dim {
            a[i * dim + j] /= norm;
        }
    }
    true
}

fn check_sample(s: &MatrixSample) {
    let ortho = s.orthonormality_residual();
    assert!(
        ortho <= TOL_ORTHONORMAL,
        "{} sample failed orthonormality: residual {ortho:e}",
        s.group
    );
    let tol = match s.group {
        GroupKind::Symplectic => TOL_SYMPLECTIC_FORM,
        _ => TOL_SYMMETRY,
    };
    let structure = s.structure_residual();
    assert!(
        structure <= tol,
        "{} sample failed its structure check: residual {structure:e}",
        s.group
    );
}

/// Haar-distributed U(N): complex Gaussian matrix, orthonormalized with the
/// positive-diagonal convention.
pub fn sample_haar_unitary(n: usize, rng: &mut impl Rng) -> MatrixSample {
    assert!(n >= 1, "rank must be positive");
    loop {
        let mut a: Vec<Complex64> = (0..n * n).map(|_| complex_gaussian(rng)).collect();
        if !orthonormalize(&mut a, n) {
            continue;
        }
        let s = MatrixSample {
            group: GroupKind::UnitaryAdjoint,
            rank: n,
            dim: n,
            entries: a,
        };
        check_sample(&s);
        return s;
    }
}

/// Haar-distributed O(N): real Gaussian matrix, orthonormalized with the
/// positive-diagonal convention. Entries stay exactly real.
pub fn sample_haar_orthogonal(n: usize, rng: &mut impl Rng) -> MatrixSample {
    assert!(n >= 1, "rank must be positive");
    loop {
        let mut a: Vec<Complex64> = (0..n * n)
            .map(|_| Complex64::new(gaussian(rng), 0.0))
            .collect();
        if !orthonormalize(&mut a, n) {
            continue;
        }
        let s = MatrixSample {
            group: GroupKind::Orthogonal,
            rank: n,
            dim: n,
            entries: a,
        };
        check_sample(&s);
        return s;
    }
}

/// A quaternion a + b j stored as two complex components, with j z = conj(z) j.
#[derive(Clone, Copy)]
struct Quat {
    a: Complex64,
    b: Complex64,
}

impl Quat {
    fn zero() -> Quat {
        Quat {
            a: Complex64::new(0.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    fn conj(self) -> Quat {
        Quat {
            a: self.a.conj(),
            b: -self.b,
        }
    }

    fn mul(self, o: Quat) -> Quat {
        Quat {
            a: self.a * o.a - self.b * o.b.conj(),
            b: self.a * o.b + self.b * o.a.conj(),
        }
    }

    fn add(self, o: Quat) -> Quat {
        Quat {
            a: self.a + o.a,
            b: self.b + o.b,
        }
    }

    fn sub(self, o: Quat) -> Quat {
        Quat {
            a: self.a - o.a,
            b: self.b - o.b,
        }
    }

    fn norm_sqr(self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    fn scale(self, s: f64) -> Quat {
        Quat {
            a: self.a * s,
            b: self.b * s,
        }
    }
}

/// Two-pass modified Gram-Schmidt over H^n, treating columns as vectors in a
/// right quaternion module (projection coefficients multiply on the right).
fn quat_orthonormalize(q: &mut [Quat], n: usize) -> bool {
    for j in 0..n {
        for _pass in 0..2 {
            for k in 0..j {
                let mut proj = Quat::zero();
                for i in 0..n {
                    proj = proj.add(q[i * n + k].conj().mul(q[i * n + j]));
                }
                for i in 0..n {
                    let t = q[i * n + k].mul(proj);
                    q[i * n + j] = q[i * n + j].sub(t);
                }
            }
        }
        let norm = (0..n).map(|i| q[i * n + j].norm_sqr()).sum::<f64>().sqrt();
        if norm < SINGULAR_NORM {
            return false;
        }
        for i in 0..n {
            q[i * n + j] = q[i * n + j].scale(1.0 / norm);
        }
    }
    true
}

/// Haar-distributed Sp(N) inside U(2N): quaternion Gaussian matrix,
/// quaternionic Gram-Schmidt, then the block embedding
/// q = a + b j  ->  [[a, b], [-conj(b), conj(a)]],
/// whose image satisfies tS J S = J with J = [[0, I], [-I, 0]].
pub fn sample_haar_symplectic(n: usize, rng: &mut impl Rng) -> MatrixSample {
    assert!(n >= 1, "rank must be positive");
    loop {
        let mut q: Vec<Quat> = (0..n * n)
            .map(|_| Quat {
                a: complex_gaussian(rng),
                b: complex_gaussian(rng),
            })
            .collect();
        if !quat_orthonormalize(&mut q, n) {
            continue;
        }
        let dim = 2 * n;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..n {
            for j in 0..n {
                let v = q[i * n + j];
                entries[i * dim + j] = v.a;
                entries[i * dim + (j + n)] = v.b;
                entries[(i + n) * dim + j] = -v.b.conj();
                entries[(i + n) * dim + (j + n)] = v.a.conj();
            }
        }
        let s = MatrixSample {
            group: GroupKind::Symplectic,
            rank: n,
            dim,
            entries,
        };
        check_sample(&s);
        return s;
    }
}

/// COE draw: V = U tU for Haar U in U(N); symmetric unitary. One triangle
/// is computed and mirrored, so the symmetry holds exactly, not merely to
/// rounding error.
pub fn sample_coe(n: usize, rng: &mut impl Rng) -> MatrixSample {
    let u = sample_haar_unitary(n, rng);
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in i..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += u.at(i, k) * u.at(j, k);
            }
            entries[i * n + j] = acc;
            entries[j * n + i] = acc;
        }
    }
    let s = MatrixSample {
        group: GroupKind::COE,
        rank: n,
        dim: n,
        entries,
    };
    check_sample(&s);
    s
}

/// CSE draw: H = V J tV for Haar V in U(2N); antisymmetric unitary. One
/// triangle is computed and mirrored with a sign flip, so entries that the
/// antisymmetry forces to zero (the diagonal) are exactly zero rather than
/// one-sided rounding noise, which would bias vanishing moments.
pub fn sample_cse(n: usize, rng: &mut impl Rng) -> MatrixSample {
    let dim = 2 * n;
    let u = sample_haar_unitary(dim, rng);
    // (J tV)[k][j] = tV[k+n][j] = V[j][k+n] for k < n, else -V[j][k-n].
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in (i + 1)..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += u.at(i, k) * u.at(j, k + n);
            }
            for k in n..dim {
                acc -= u.at(i, k) * u.at(j, k - n);
            }
            entries[i * dim + j] = acc;
            entries[j * dim + i] = -acc;
        }
    }
    let s = MatrixSample {
        group: GroupKind::CSE,
        rank: n,
        dim,
        entries,
    };
    check_sample(&s);
    s
}

/// One draw from the requested ensemble at rank N.
pub fn sample(group: GroupKind, n: usize, rng: &mut impl Rng) -> Result<MatrixSample, HaarMcError> {
    if n == 0 {
        return err(String::from("rank must be positive"));
    }
    Ok(match group {
        GroupKind::UnitaryAdjoint => sample_haar_unitary(n, rng),
        GroupKind::Orthogonal => sample_haar_orthogonal(n, rng),
        GroupKind::Symplectic => sample_haar_symplectic(n, rng),
        GroupKind::COE => sample_coe(n, rng),
        GroupKind::CSE => sample_cse(n, rng),
        GroupKind::SymmetricPermRep => {
            return err(String::from(
                "the symmetric group evaluator is exact; Monte Carlo covers U, O, Sp, COE, CSE",
            ))
        }
    })
}

/// A monomial in matrix entries for Monte Carlo estimation: complex-entry
/// ensembles (U, COE, CSE) take plain and conjugated factors; real-type
/// monomials (O, and Sp over literal indices in [2N]) take a plain factor
/// list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum McMonomial {
    Complex(UnitaryMonomial),
    Real(RealMonomial),
}

impl McMonomial {
    fn max_index(&self) -> usize {
        match self {
            McMonomial::Complex(m) => m.max_index(),
            McMonomial::Real(m) => m.max_index(),
        }
    }
}

fn eval_monomial(s: &MatrixSample, m: &McMonomial) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    match m {
        McMonomial::Real(rm) => {
            for &(i, j) in rm.pairs() {
                acc *= s.entry(i, j);
            }
        }
        McMonomial::Complex(um) => {
            for &(i, j) in um.plain_pairs() {
                acc *= s.entry(i, j);
            }
            for &(i, j) in um.conj_pairs() {
                acc *= s.entry(i, j).conj();
            }
        }
    }
    acc
}

/// The index alphabet and required monomial flavor for a group at rank N.
fn validate_monomial(group: GroupKind, m: &McMonomial, n: usize) -> Result<usize, HaarMcError> {
    let (dim, want_complex) = match group {
        GroupKind::UnitaryAdjoint => (n, true),
        GroupKind::Orthogonal => (n, false),
        GroupKind::Symplectic => (2 * n, false),
        GroupKind::COE => (n, true),
        GroupKind::CSE => (2 * n, true),
        GroupKind::SymmetricPermRep => {
            return err(String::from(
                "the symmetric group evaluator is exact; Monte Carlo covers U, O, Sp, COE, CSE",
            ))
        }
    };
    let is_complex = matches!(m, McMonomial::Complex(_));
    if is_complex != want_complex {
        return err(format!(
            "group {group} takes a {} monomial",
            if want_complex {
                "conj:/plain: sectioned"
            } else {
                "plain pair-list"
            }
        ));
    }
    if m.max_index() > dim {
        return err(format!(
            "monomial index {} exceeds the matrix dimension {dim} for {group} at N={n}",
            m.max_index()
        ));
    }
    Ok(dim)
}

/// Exact Haar moment of the same monomial, for comparison with an estimate.
pub fn exact_moment(group: GroupKind, m: &McMonomial, n: usize) -> Result<BigRational, HaarMcError> {
    let dim = validate_monomial(group, m, n)?;
    let regime = Regime::Numeric(n as i64);
    let value = match (group, m) {
        (GroupKind::UnitaryAdjoint, McMonomial::Complex(um)) => integrate_unitary(um, regime),
        (GroupKind::Orthogonal, McMonomial::Real(rm)) => integrate_orthogonal(rm, regime),
        (GroupKind::Symplectic, McMonomial::Real(rm)) => integrate_symplectic(rm, n, regime),
        (GroupKind::COE, McMonomial::Complex(um)) | (GroupKind::CSE, McMonomial::Complex(um)) => {
            // The plain factors form the first index word, the conjugated
            // factors the second; each entry contributes its (row, col) pair.
            let flatten = |pairs: &[(usize, usize)]| {
                let mut w = Vec::with_capacity(2 * pairs.len());
                for &(i, j) in pairs {
                    w.push(i);
                    w.push(j);
                }
                IndexSequence::new(w, dim)
            };
            let i = flatten(um.plain_pairs()).map_err(|e| HaarMcError(e.0))?;
            let j = flatten(um.conj_pairs()).map_err(|e| HaarMcError(e.0))?;
            if group == GroupKind::COE {
                integrate_coe(&i, &j, regime)
            } else {
                integrate_cse(&i, &j, regime)
            }
        }
        _ => unreachable!("flavor validated above"),
    }
    .map_err(|e| HaarMcError(e.0))?;
    value
        .value
        .as_constant()
        .ok_or_else(|| HaarMcError(String::from("numeric integral must be constant")))
}

/// Sample mean, standard error, and provenance of one Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorResult {
    pub mean: Complex64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

/// Monte Carlo estimate of a monomial moment over `n_samples` i.i.d. draws.
/// Deterministic for fixed (group, monomial, N, n_samples, seed): chunk k
/// samples from stream k of a ChaCha generator keyed by the seed, and the
/// chunk sums reduce in index order.
pub fn estimate_monomial(
    group: GroupKind,
    m: &McMonomial,
    n: usize,
    n_samples: u64,
    seed: u64,
) -> Result<EstimatorResult, HaarMcError> {
    if n == 0 {
        return err(String::from("rank must be positive"));
    }
    if n_samples < 100 {
        return err(format!(
            "need at least 100 samples for a standard error, got {n_samples}"
        ));
    }
    validate_monomial(group, m, n)?;

    let n_chunks = n_samples.div_ceil(CHUNK);
    let stats: Vec<(Complex64, f64)> = (0..n_chunks)
        .into_par_iter()
        .map(|k| {
            let count = CHUNK.min(n_samples - k * CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let mut sum = Complex64::new(0.0, 0.0);
            let mut sum_sq = 0.0f64;
            for _ in 0..count {
                let s = sample(group, n, &mut rng).expect("group validated");
                let v = eval_monomial(&s, m);
                sum += v;
                sum_sq += v.norm_sqr();
            }
            (sum, sum_sq)
        })
        .collect();

    let mut sum = Complex64::new(0.0, 0.0);
    let mut sum_sq = 0.0f64;
    for (s, q) in stats {
        sum += s;
        sum_sq += q;
    }
    let count = n_samples as f64;
    let mean = sum / count;
    // Unbiased sample variance of the draws, clamped against cancellation.
    let var = ((sum_sq - count * mean.norm_sqr()) / (count - 1.0)).max(0.0);
    let std_error = (var / count).sqrt();
    Ok(EstimatorResult {
        mean,
        std_error,
        n_samples,
        seed,
    })
}

/// z-score of an estimate against the exact value: |mean - exact| / stderr.
/// A degenerate estimator (zero standard error) scores 0 when it hit the
/// exact value and infinity otherwise.
pub fn compare(exact: &BigRational, est: &EstimatorResult) -> f64 {
    let exact_f = exact.to_f64().unwrap_or(f64::NAN);
    let dev = (est.mean - Complex64::new(exact_f, 0.0)).norm();
    if est.std_error > 0.0 {
        dev / est.std_error
    } else if dev == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use wg_core::exactalg::br;
    use wg_core::integrate::{parse_real_monomial, parse_unitary_monomial};

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn complex_monomial(text: &str) -> McMonomial {
        McMonomial::Complex(parse_unitary_monomial(text).unwrap())
    }

    fn real_monomial(text: &str) -> McMonomial {
        McMonomial::Real(parse_real_monomial(text).unwrap())
    }

    #[test]
    fn samplers_satisfy_their_constraints() {
        let mut r = rng(7);
        for n in 1..=4usize {
            for _ in 0..25 {
                let u = sample_haar_unitary(n, &mut r);
                assert!(u.orthonormality_residual() <= TOL_ORTHONORMAL);

                let o = sample_haar_orthogonal(n, &mut r);
                assert!(o.orthonormality_residual() <= TOL_ORTHONORMAL);
                assert_eq!(o.structure_residual(), 0.0);

                let s = sample_haar_symplectic(n, &mut r);
                assert!(s.orthonormality_residual() <= TOL_ORTHONORMAL);
                assert!(s.structure_residual() <= TOL_SYMPLECTIC_FORM);
                assert_eq!(s.dim(), 2 * n);

                let v = sample_coe(n, &mut r);
                assert!(v.orthonormality_residual() <= TOL_ORTHONORMAL);
                assert!(v.structure_residual() <= TOL_SYMMETRY);

                let h = sample_cse(n, &mut r);
                assert!(h.orthonormality_residual() <= TOL_ORTHONORMAL);
                assert!(h.structure_residual() <= TOL_SYMMETRY);
            }
        }
    }

    #[test]
    fn unitary_rank_one_is_a_uniform_phase() {
        let mut r = rng(11);
        let mut sum = Complex64::new(0.0, 0.0);
        let trials = 10_000usize;
        for _ in 0..trials {
            let u = sample_haar_unitary(1, &mut r);
            let z = u.entry(1, 1);
            assert!((z.norm() - 1.0).abs() <= 1e-12);
            sum += z;
        }
        // E[u] = 0 with per-component variance 1/2: 5 sigma on the modulus.
        let mean = sum / trials as f64;
        assert!(mean.norm() <= 5.0 / (trials as f64 / 2.0).sqrt());
    }

    #[test]
    fn orthogonal_rank_one_is_a_fair_sign() {
        let mut r = rng(13);
        let mut sum = 0.0f64;
        let trials = 10_000usize;
        for _ in 0..trials {
            let o = sample_haar_orthogonal(1, &mut r);
            let x = o.entry(1, 1).re;
            assert!((x.abs() - 1.0).abs() <= 1e-12);
            sum += x;
        }
        assert!((sum / trials as f64).abs() <= 5.0 / (trials as f64).sqrt());
    }

    #[test]
    fn second_moments_match_one_over_n() {
        // E|U_11|^2 = 1/N and E[R_11^2] = 1/N.
        for (group, text) in [
            (GroupKind::UnitaryAdjoint, "conj:1,1 plain:1,1"),
            (GroupKind::Orthogonal, "1,1;1,1"),
        ] {
            let m = if group == GroupKind::UnitaryAdjoint {
                complex_monomial(text)
            } else {
                real_monomial(text)
            };
            for n in 2..=3usize {
                let est = estimate_monomial(group, &m, n, 20_000, 29).unwrap();
                let exact = br(1, n as i64);
                assert!(
                    compare(&exact, &est) <= Z_THRESHOLD,
                    "{group} N={n}: mean {} stderr {}",
                    est.mean,
                    est.std_error
                );
            }
        }
    }

    #[test]
    fn left_translation_does_not_move_estimates() {
        // f(U) = Re(U_11 U_22) under U -> PU for the transposition matrix P
        // swapping rows 1 and 2: the difference estimator has mean zero.
        let mut r = rng(17);
        let trials = 20_000usize;
        let mut sum = 0.0f64;
        let mut sum_sq = 0.0f64;
        for _ in 0..trials {
            let u = sample_haar_unitary(3, &mut r);
            let f_u = (u.entry(1, 1) * u.entry(2, 2)).re;
            let f_pu = (u.entry(2, 1) * u.entry(1, 2)).re;
            let d = f_pu - f_u;
            sum += d;
            sum_sq += d * d;
        }
        let mean = sum / trials as f64;
        let var = ((sum_sq - trials as f64 * mean * mean) / (trials as f64 - 1.0)).max(0.0);
        let stderr = (var / trials as f64).sqrt();
        assert!(mean.abs() <= 5.0 * stderr.max(1e-12));
    }

    #[test]
    fn link_monomial_estimate_matches_exact_value() {
        let m = complex_monomial("conj:1,1;2,2;3,3 plain:1,2;2,3;3,1");
        let est = estimate_monomial(GroupKind::UnitaryAdjoint, &m, 3, 50_000, 41).unwrap();
        let exact = exact_moment(GroupKind::UnitaryAdjoint, &m, 3).unwrap();
        assert_eq!(exact, br(1, 60));
        assert!(compare(&exact, &est) <= Z_THRESHOLD);
    }

    #[test]
    fn orthogonal_degree_four_estimate_matches_exact_value() {
        let m = real_monomial("1,2;1,3;2,2;2,3");
        let est = estimate_monomial(GroupKind::Orthogonal, &m, 3, 50_000, 43).unwrap();
        let exact = exact_moment(GroupKind::Orthogonal, &m, 3).unwrap();
        assert_eq!(exact, br(-1, 30));
        assert!(compare(&exact, &est) <= Z_THRESHOLD);
    }

    #[test]
    fn odd_monomials_average_to_zero() {
        let m = real_monomial("1,1;1,2;2,1");
        let est = estimate_monomial(GroupKind::Orthogonal, &m, 3, 20_000, 47).unwrap();
        let exact = exact_moment(GroupKind::Orthogonal, &m, 3).unwrap();
        assert_eq!(exact, br(0, 1));
        assert!(compare(&exact, &est) <= Z_THRESHOLD);
    }

    #[test]
    fn coe_diagonal_second_moment() {
        let m = complex_monomial("conj:1,1 plain:1,1");
        for n in [2usize, 3, 5] {
            let est = estimate_monomial(GroupKind::COE, &m, n, 20_000, 53).unwrap();
            let exact = exact_moment(GroupKind::COE, &m, n).unwrap();
            assert_eq!(exact, br(2, n as i64 + 1));
            assert!(compare(&exact, &est) <= Z_THRESHOLD, "N={n}");
        }
    }

    #[test]
    fn cse_moments_track_the_antisymmetry() {
        let offdiag = complex_monomial("conj:1,2 plain:1,2");
        let est = estimate_monomial(GroupKind::CSE, &offdiag, 2, 20_000, 59).unwrap();
        let exact = exact_moment(GroupKind::CSE, &offdiag, 2).unwrap();
        assert_eq!(exact, br(1, 3));
        assert!(compare(&exact, &est) <= Z_THRESHOLD);

        // The diagonal vanishes identically, so the estimator is degenerate
        // at the exact value.
        let diag = complex_monomial("conj:1,1 plain:1,1");
        let est = estimate_monomial(GroupKind::CSE, &diag, 2, 1_000, 61).unwrap();
        assert_eq!(est.mean, Complex64::new(0.0, 0.0));
        let exact = exact_moment(GroupKind::CSE, &diag, 2).unwrap();
        assert_eq!(exact, br(0, 1));
        assert_eq!(compare(&exact, &est), 0.0);
    }

    #[test]
    fn symplectic_worked_monomial_estimate() {
        // Literal indices over [2N] at N = 2.
        let m = real_monomial("1,1;2,4;3,2;4,3");
        let est = estimate_monomial(GroupKind::Symplectic, &m, 2, 50_000, 67).unwrap();
        let exact = exact_moment(GroupKind::Symplectic, &m, 2).unwrap();
        assert_eq!(exact, br(1, 40));
        assert!(compare(&exact, &est) <= Z_THRESHOLD);
    }

    #[test]
    fn estimates_are_bitwise_reproducible() {
        let m = complex_monomial("conj:1,1 plain:1,1");
        let a = estimate_monomial(GroupKind::UnitaryAdjoint, &m, 2, 5_000, 71).unwrap();
        let b = estimate_monomial(GroupKind::UnitaryAdjoint, &m, 2, 5_000, 71).unwrap();
        assert_eq!(a.mean.re.to_bits(), b.mean.re.to_bits());
        assert_eq!(a.mean.im.to_bits(), b.mean.im.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());

        let c = estimate_monomial(GroupKind::UnitaryAdjoint, &m, 2, 5_000, 72).unwrap();
        assert_ne!(a.mean.re.to_bits(), c.mean.re.to_bits());
    }

    #[test]
    fn compare_arithmetic() {
        let est = EstimatorResult {
            mean: Complex64::new(1.0 / 60.0 + 2.0 * 0.001, 0.0),
            std_error: 0.001,
            n_samples: 100,
            seed: 0,
        };
        let z = compare(&br(1, 60), &est);
        assert!((z - 2.0).abs() <= 1e-9);

        let degenerate = EstimatorResult {
            mean: Complex64::new(0.5, 0.0),
            std_error: 0.0,
            n_samples: 100,
            seed: 0,
        };
        assert_eq!(compare(&br(1, 2), &degenerate), 0.0);
        assert_eq!(compare(&br(1, 3), &degenerate), f64::INFINITY);
    }

    #[test]
    fn estimator_guards() {
        let m = complex_monomial("conj:1,1 plain:1,1");
        assert!(estimate_monomial(GroupKind::UnitaryAdjoint, &m, 2, 99, 1).is_err());
        assert!(estimate_monomial(GroupKind::SymmetricPermRep, &m, 2, 1_000, 1).is_err());
        // Flavor mismatch both ways.
        assert!(estimate_monomial(GroupKind::Orthogonal, &m, 2, 1_000, 1).is_err());
        let rm = real_monomial("1,1;1,1");
        assert!(estimate_monomial(GroupKind::UnitaryAdjoint, &rm, 2, 1_000, 1).is_err());
        // Out-of-range index.
        let wide = complex_monomial("conj:1,3 plain:1,3");
        assert!(estimate_monomial(GroupKind::UnitaryAdjoint, &wide, 2, 1_000, 1).is_err());
        // Symplectic indices run over [2N]: max index 4 is fine at N = 2.
        let sp = real_monomial("1,4;1,4");
        assert!(estimate_monomial(GroupKind::Symplectic, &sp, 2, 100, 1).is_ok());
    }
}
