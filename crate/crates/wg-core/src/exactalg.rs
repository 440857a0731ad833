//! Exact arithmetic: arbitrary-precision rationals, univariate polynomials,
//! reduced rational functions in one indeterminate, and exact linear algebra
//! (inverse and Moore-Penrose pseudoinverse of symmetric matrices) over both
//! coefficient fields.
//!
//! Canonical forms, fixed here and relied on everywhere:
//!
//! - `UniPolynomial`: ascending coefficients, no trailing zeros; the zero
//!   polynomial is the empty sequence.
//! - `RationalFunction`: `gcd(num, den) = 1` and monic denominator, so
//!   structural equality is mathematical equality.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub use num_rational::BigRational;

/// Shorthand for an integer as a `BigRational`.
pub fn br_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Shorthand for the fraction `p/q` as a `BigRational`.
pub fn br(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactAlgError {
    ZeroDenominator,
    DivisionByZero,
    /// Polynomial division left a nonzero remainder where theory promised
    /// exactness; indicates a singular or mis-shaped input.
    InexactDivision,
    Singular {
        rank: usize,
    },
    NotSymmetric,
    NotSquare,
    Pole {
        at: BigRational,
    },
    /// Series expansion at infinity requires numerator degree <= denominator
    /// degree.
    ImproperSeries {
        num_degree: usize,
        den_degree: usize,
    },
    SizeMismatch,
    Schema(String),
}

impl fmt::Display for ExactAlgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactAlgError::ZeroDenominator => write!(f, "zero denominator"),
            ExactAlgError::DivisionByZero => write!(f, "division by zero"),
            ExactAlgError::InexactDivision => write!(f, "polynomial division was not exact"),
            ExactAlgError::Singular { rank } => {
                write!(f, "singular matrix (rank {rank})")
            }
            ExactAlgError::NotSymmetric => write!(f, "matrix is not symmetric"),
            ExactAlgError::NotSquare => write!(f, "matrix is not square"),
            ExactAlgError::Pole { at } => write!(f, "pole at parameter value {at}"),
            ExactAlgError::ImproperSeries {
                num_degree,
                den_degree,
            } => write!(
                f,
                "series at infinity needs numerator degree {num_degree} <= denominator degree {den_degree}"
            ),
            ExactAlgError::SizeMismatch => write!(f, "operand size mismatch"),
            ExactAlgError::Schema(msg) => write!(f, "schema error: {msg}"),
        }
    }
}

/// A univariate polynomial over `BigRational`, ascending coefficients.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UniPolynomial {
    coeffs: Vec<BigRational>,
}

impl UniPolynomial {
    /// Builds a polynomial, trimming trailing zeros.
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        UniPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UniPolynomial::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        UniPolynomial::new(vec![c])
    }

    /// The indeterminate itself.
    pub fn variable() -> Self {
        UniPolynomial::new(vec![BigRational::zero(), BigRational::one()])
    }

    /// `c * x^k`.
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = c;
        UniPolynomial::new(coeffs)
    }

    /// Integer-coefficient convenience constructor, ascending degree.
    pub fn from_int_coeffs(coeffs: &[i64]) -> Self {
        UniPolynomial::new(coeffs.iter().map(|&c| br_int(c)).collect())
    }

    /// The falling factorial `x(x-1)...(x-k+1)`; `k = 0` gives 1.
    pub fn falling_factorial(k: usize) -> Self {
        let mut p = UniPolynomial::one();
        for j in 0..k {
            p = p.mul(&UniPolynomial::new(vec![br_int(-(j as i64)), BigRational::one()]));
        }
        p
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero beyond the stored length).
    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        UniPolynomial::new(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - other.coeff(k)).collect();
        UniPolynomial::new(coeffs)
    }

    pub fn neg(&self) -> Self {
        UniPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return UniPolynomial::zero();
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        UniPolynomial::new(coeffs)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        UniPolynomial::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, mut e: usize) -> Self {
        let mut base = self.clone();
        let mut acc = UniPolynomial::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Horner evaluation.
    pub fn eval(&self, at: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * at + c;
        }
        acc
    }

    /// Substitutes another polynomial for the indeterminate.
    pub fn compose(&self, sub: &UniPolynomial) -> Self {
        let mut acc = UniPolynomial::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(sub).add(&UniPolynomial::constant(c.clone()));
        }
        acc
    }

    /// Quotient and remainder of division by a nonzero polynomial.
    pub fn div_rem(&self, den: &Self) -> Result<(Self, Self), ExactAlgError> {
        let dd = den.degree().ok_or(ExactAlgError::DivisionByZero)?;
        let lead = den.leading_coeff().expect("nonzero divisor").clone();
        let mut rem = self.coeffs.clone();
        if rem.len() < dd + 1 {
            return Ok((UniPolynomial::zero(), self.clone()));
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let q = &rem[k] / &lead;
            if q.is_zero() {
                continue;
            }
            for (j, dc) in den.coeffs.iter().enumerate() {
                let idx = k - dd + j;
                let sub = dc * &q;
                rem[idx] -= sub;
            }
            quot[k - dd] = q;
        }
        Ok((UniPolynomial::new(quot), UniPolynomial::new(rem)))
    }

    /// Division that must leave no remainder; errors loudly otherwise.
    pub fn exact_div(&self, den: &Self) -> Result<Self, ExactAlgError> {
        let (q, r) = self.div_rem(den)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(ExactAlgError::InexactDivision)
        }
    }

    /// Greatest common divisor: the primitive integer form with positive
    /// leading coefficient (1 for coprime inputs), via a primitive
    /// pseudo-remainder sequence over the integers.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return normalize_sign(other.clone());
        }
        if other.is_zero() {
            return normalize_sign(self.clone());
        }
        let mut a = int_primitive(&to_int_coeffs(self));
        let mut b = int_primitive(&to_int_coeffs(other));
        if a.len() < b.len() {
            core::mem::swap(&mut a, &mut b);
        }
        while !b.is_empty() {
            let r = int_pseudo_rem(&a, &b);
            a = b;
            b = int_primitive(&r);
        }
        let coeffs: Vec<BigRational> = a.iter().map(|c| BigRational::from_integer(c.clone())).collect();
        normalize_sign(UniPolynomial::new(coeffs))
    }

    /// Renders with the given variable name, descending powers, e.g.
    /// `N^5 - 5N^3 + 4N`.
    pub fn format_with_var(&self, var: &str) -> String {
        if self.is_zero() {
            return String::from("0");
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else if c.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let unit_coeff = mag.is_one() && k > 0;
            if !unit_coeff {
                if mag.is_integer() {
                    out.push_str(&mag.to_string());
                } else {
                    out.push_str(&format!("({mag})"));
                }
            }
            if k == 1 {
                out.push_str(var);
            } else if k > 1 {
                out.push_str(&format!("{var}^{k}"));
            }
        }
        out
    }

    /// Number of nonzero printed terms.
    fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }
}

impl fmt::Display for UniPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format_with_var("N"))
    }
}

impl core::ops::Add for UniPolynomial {
    type Output = UniPolynomial;
    fn add(self, rhs: Self) -> Self {
        UniPolynomial::add(&self, &rhs)
    }
}

impl core::ops::Sub for UniPolynomial {
    type Output = UniPolynomial;
    fn sub(self, rhs: Self) -> Self {
        UniPolynomial::sub(&self, &rhs)
    }
}

impl core::ops::Mul for UniPolynomial {
    type Output = UniPolynomial;
    fn mul(self, rhs: Self) -> Self {
        UniPolynomial::mul(&self, &rhs)
    }
}

impl core::ops::Neg for UniPolynomial {
    type Output = UniPolynomial;
    fn neg(self) -> Self {
        UniPolynomial::neg(&self)
    }
}

impl Zero for UniPolynomial {
    fn zero() -> Self {
        UniPolynomial::zero()
    }
    fn is_zero(&self) -> bool {
        UniPolynomial::is_zero(self)
    }
}

impl One for UniPolynomial {
    fn one() -> Self {
        UniPolynomial::one()
    }
}

fn to_int_coeffs(p: &UniPolynomial) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for c in p.coeffs() {
        lcm = lcm.lcm(c.denom());
    }
    p.coeffs().iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect()
}

fn int_primitive(p: &[BigInt]) -> Vec<BigInt> {
    let mut content = BigInt::zero();
    for c in p {
        content = content.gcd(c);
    }
    if content.is_zero() {
        return Vec::new();
    }
    let mut out: Vec<BigInt> = p.iter().map(|c| c / &content).collect();
    while out.last().is_some_and(Zero::is_zero) {
        out.pop();
    }
    out
}

/// Pseudo-remainder of integer polynomials: repeatedly cancels the leading
/// term after scaling by the divisor's leading coefficient, staying in Z[x].
fn int_pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lb = b[db].clone();
    let mut r: Vec<BigInt> = a.to_vec();
    while r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c = &*c * &lb;
        }
        for j in 0..=db {
            let sub = &lr * &b[j];
            r[dr - db + j] -= sub;
        }
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
        if r.is_empty() {
            break;
        }
    }
    r
}

fn normalize_sign(p: UniPolynomial) -> UniPolynomial {
    match p.leading_coeff() {
        Some(lead) if lead.is_negative() => p.neg(),
        _ => p,
    }
}

/// A reduced rational function: `gcd(num, den) = 1`, monic denominator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalFunction {
    num: UniPolynomial,
    den: UniPolynomial,
}

/// Returns the unique reduced, monic-denominator representative of
/// `num / den`.
pub fn rf_normalize(
    num: UniPolynomial,
    den: UniPolynomial,
) -> Result<RationalFunction, ExactAlgError> {
    if den.is_zero() {
        return Err(ExactAlgError::ZeroDenominator);
    }
    if num.is_zero() {
        return Ok(RationalFunction {
            num: UniPolynomial::zero(),
            den: UniPolynomial::one(),
        });
    }
    let g = num.gcd(&den);
    let mut num = num.exact_div(&g)?;
    let mut den = den.exact_div(&g)?;
    let lead = den.leading_coeff().expect("nonzero denominator").clone();
    if !lead.is_one() {
        let inv = BigRational::one() / lead;
        num = num.scale(&inv);
        den = den.scale(&inv);
    }
    Ok(RationalFunction { num, den })
}

impl RationalFunction {
    pub fn new(num: UniPolynomial, den: UniPolynomial) -> Result<Self, ExactAlgError> {
        rf_normalize(num, den)
    }

    pub fn from_polynomial(p: UniPolynomial) -> Self {
        RationalFunction {
            num: p,
            den: UniPolynomial::one(),
        }
    }

    pub fn from_rational(c: BigRational) -> Self {
        RationalFunction::from_polynomial(UniPolynomial::constant(c))
    }

    pub fn zero() -> Self {
        RationalFunction::from_polynomial(UniPolynomial::zero())
    }

    pub fn one() -> Self {
        RationalFunction::from_polynomial(UniPolynomial::one())
    }

    pub fn num(&self) -> &UniPolynomial {
        &self.num
    }

    pub fn den(&self) -> &UniPolynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Exact rational constant, if the function is constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        if self.num.is_constant() && self.den.is_constant() {
            Some(self.num.coeff(0) / self.den.coeff(0))
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        rf_normalize(num, den).expect("denominators stay nonzero")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        rf_normalize(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("denominators stay nonzero")
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ExactAlgError> {
        if other.is_zero() {
            return Err(ExactAlgError::DivisionByZero);
        }
        rf_normalize(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        RationalFunction {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Substitutes a polynomial for the indeterminate.
    pub fn substitute(&self, sub: &UniPolynomial) -> Result<Self, ExactAlgError> {
        rf_normalize(self.num.compose(sub), self.den.compose(sub))
    }

    /// Coefficients of `x^0, x^-1, ..., x^-(terms-1)` in the expansion at
    /// infinity; requires numerator degree <= denominator degree.
    pub fn series_at_infinity(&self, terms: usize) -> Result<Vec<BigRational>, ExactAlgError> {
        if self.is_zero() {
            return Ok(vec![BigRational::zero(); terms]);
        }
        let n = self.num.degree().expect("nonzero numerator");
        let m = self.den.degree().expect("nonzero denominator");
        if n > m {
            return Err(ExactAlgError::ImproperSeries {
                num_degree: n,
                den_degree: m,
            });
        }
        // f = x^(n-m) * A(1/x)/B(1/x) with A, B the coefficient reversals;
        // B(0) is the leading denominator coefficient, so the series divides.
        let a = |i: usize| {
            if i <= n {
                self.num.coeff(n - i)
            } else {
                BigRational::zero()
            }
        };
        let b = |i: usize| {
            if i <= m {
                self.den.coeff(m - i)
            } else {
                BigRational::zero()
            }
        };
        let b0 = b(0);
        let shift = m - n;
        let mut c: Vec<BigRational> = Vec::new();
        let mut out = Vec::with_capacity(terms);
        for t in 0..terms {
            if t < shift {
                out.push(BigRational::zero());
                continue;
            }
            let k = t - shift;
            let mut acc = a(k);
            for (j, ck) in c.iter().enumerate() {
                acc -= b(k - j) * ck;
            }
            let ck = acc / &b0;
            c.push(ck.clone());
            out.push(ck);
        }
        Ok(out)
    }

    /// JSON value per the schema `{"num": ["p/q", ...], "den": [...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let ser = |p: &UniPolynomial| {
            serde_json::Value::Array(
                p.coeffs()
                    .iter()
                    .map(|c| serde_json::Value::String(format!("{}/{}", c.numer(), c.denom())))
                    .collect(),
            )
        };
        let mut map = serde_json::Map::new();
        map.insert(String::from("num"), ser(&self.num));
        map.insert(String::from("den"), ser(&self.den));
        serde_json::Value::Object(map)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, ExactAlgError> {
        let obj = v
            .as_object()
            .ok_or_else(|| ExactAlgError::Schema(String::from("expected object")))?;
        let parse_poly = |key: &str| -> Result<UniPolynomial, ExactAlgError> {
            let arr = obj
                .get(key)
                .and_then(|x| x.as_array())
                .ok_or_else(|| ExactAlgError::Schema(format!("missing array field {key}")))?;
            let mut coeffs = Vec::with_capacity(arr.len());
            for item in arr {
                let s = item
                    .as_str()
                    .ok_or_else(|| ExactAlgError::Schema(String::from("coefficient must be a string")))?;
                coeffs.push(parse_big_rational(s)?);
            }
            Ok(UniPolynomial::new(coeffs))
        };
        rf_normalize(parse_poly("num")?, parse_poly("den")?)
    }

    /// Plain display with an explicit variable name.
    pub fn format_with_var(&self, var: &str) -> String {
        let (num, den) = self.integer_primitive_parts();
        if den.is_constant() {
            let q = den.coeff(0);
            if q.is_one() {
                return num.format_with_var(var);
            }
            if num.is_constant() {
                return format!("{}/{}", num.coeff(0), q);
            }
            return format!("({})/{}", num.format_with_var(var), q);
        }
        let num_str = if num.is_constant() || num.term_count() == 1 {
            num.format_with_var(var)
        } else {
            format!("({})", num.format_with_var(var))
        };
        let den_single_plain = den.term_count() == 1
            && den.leading_coeff().map(One::is_one).unwrap_or(false);
        let den_str = if den_single_plain {
            den.format_with_var(var)
        } else {
            format!("({})", den.format_with_var(var))
        };
        format!("{num_str}/{den_str}")
    }

    /// Rescales to coprime integer-coefficient numerator and denominator with
    /// positive denominator leading coefficient (display form).
    fn integer_primitive_parts(&self) -> (UniPolynomial, UniPolynomial) {
        let mut lcm = BigInt::one();
        for c in self.num.coeffs().iter().chain(self.den.coeffs()) {
            lcm = lcm.lcm(c.denom());
        }
        let scale = BigRational::from_integer(lcm);
        let num_i: Vec<BigInt> = self.num.coeffs().iter().map(|c| (c * &scale).to_integer()).collect();
        let den_i: Vec<BigInt> = self.den.coeffs().iter().map(|c| (c * &scale).to_integer()).collect();
        let mut content = BigInt::zero();
        for c in num_i.iter().chain(den_i.iter()) {
            content = content.gcd(c);
        }
        if content.is_zero() {
            content = BigInt::one();
        }
        if den_i.last().map(Signed::is_negative).unwrap_or(false) {
            content = -content;
        }
        let to_poly = |v: Vec<BigInt>| {
            UniPolynomial::new(
                v.into_iter()
                    .map(|c| BigRational::from_integer(c / &content))
                    .collect(),
            )
        };
        (to_poly(num_i), to_poly(den_i))
    }
}

/// Exact value of a rational function at a point; errors on poles.
pub fn evaluate(rf: &RationalFunction, at: &BigRational) -> Result<BigRational, ExactAlgError> {
    let den = rf.den.eval(at);
    if den.is_zero() {
        return Err(ExactAlgError::Pole { at: at.clone() });
    }
    Ok(rf.num.eval(at) / den)
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format_with_var("N"))
    }
}

impl core::ops::Add for RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: Self) -> Self {
        RationalFunction::add(&self, &rhs)
    }
}

impl core::ops::Sub for RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: Self) -> Self {
        RationalFunction::sub(&self, &rhs)
    }
}

impl core::ops::Mul for RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: Self) -> Self {
        RationalFunction::mul(&self, &rhs)
    }
}

impl core::ops::Div for RationalFunction {
    type Output = RationalFunction;
    /// Panics on a zero divisor; use `checked_div` where that can happen.
    fn div(self, rhs: Self) -> Self {
        self.checked_div(&rhs).expect("division by zero rational function")
    }
}

impl core::ops::Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> Self {
        RationalFunction::neg(&self)
    }
}

impl Zero for RationalFunction {
    fn zero() -> Self {
        RationalFunction::zero()
    }
    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
}

impl One for RationalFunction {
    fn one() -> Self {
        RationalFunction::one()
    }
}

fn parse_big_rational(s: &str) -> Result<BigRational, ExactAlgError> {
    let bad = |_| ExactAlgError::Schema(format!("bad rational literal: {s}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(bad)?;
            let q: BigInt = q.trim().parse().map_err(bad)?;
            if q.is_zero() {
                return Err(ExactAlgError::ZeroDenominator);
            }
            Ok(BigRational::new(p, q))
        }
        None => {
            let p: BigInt = s.trim().parse().map_err(bad)?;
            Ok(BigRational::from_integer(p))
        }
    }
}

/// The exact coefficient fields matrices run over, as a bound alias:
/// `BigRational` satisfies it out of the box and `RationalFunction` through
/// the operator impls below. `Div` panics on a zero divisor, so every
/// division site checks `is_zero` first.
pub trait Field:
    Clone
    + PartialEq
    + Zero
    + One
    + core::ops::Neg<Output = Self>
    + core::ops::Sub<Output = Self>
    + core::ops::Div<Output = Self>
{
}

impl<T> Field for T where
    T: Clone
        + PartialEq
        + Zero
        + One
        + core::ops::Neg<Output = Self>
        + core::ops::Sub<Output = Self>
        + core::ops::Div<Output = Self>
{
}

/// A dense row-major matrix over an exact coefficient field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> ExactMatrix<F> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ExactMatrix { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        ExactMatrix::from_fn(rows, cols, |_, _| F::zero())
    }

    pub fn identity(n: usize) -> Self {
        ExactMatrix::from_fn(n, n, |i, j| if i == j { F::one() } else { F::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        ExactMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, ExactAlgError> {
        if self.cols != other.rows {
            return Err(ExactAlgError::SizeMismatch);
        }
        Ok(ExactMatrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = F::zero();
            for k in 0..self.cols {
                if self.get(i, k).is_zero() || other.get(k, j).is_zero() {
                    continue;
                }
                acc = acc + self.get(i, k).clone() * other.get(k, j).clone();
            }
            acc
        }))
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Rank by forward elimination with full pivot search.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let n = m.rows.min(m.cols);
        let mut r = 0;
        for step in 0..n {
            let mut pivot = None;
            'search: for i in step..m.rows {
                for j in step..m.cols {
                    if !m.get(i, j).is_zero() {
                        pivot = Some((i, j));
                        break 'search;
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break };
            m.swap_rows(step, pi);
            m.swap_cols(step, pj);
            r += 1;
            let inv_piv = F::one() / m.get(step, step).clone();
            for i in step + 1..m.rows {
                if m.get(i, step).is_zero() {
                    continue;
                }
                let factor = m.get(i, step).clone() * inv_piv.clone();
                for j in step..m.cols {
                    let v = m.get(i, j).clone() - factor.clone() * m.get(step, j).clone();
                    m.set(i, j, v);
                }
            }
        }
        r
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// Column indices of a maximal independent set of columns, in order
    /// (the pivot columns of the row echelon form).
    pub fn pivot_columns(&self) -> Vec<usize> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, pr);
            pivots.push(col);
            let inv_piv = F::one() / m.get(row, col).clone();
            for i in row + 1..m.rows {
                if m.get(i, col).is_zero() {
                    continue;
                }
                let factor = m.get(i, col).clone() * inv_piv.clone();
                for j in col..m.cols {
                    let v = m.get(i, j).clone() - factor.clone() * m.get(row, j).clone();
                    m.set(i, j, v);
                }
            }
            row += 1;
        }
        pivots
    }

    /// Submatrix formed by the given columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        ExactMatrix::from_fn(self.rows, cols.len(), |i, j| self.get(i, cols[j]).clone())
    }
}

/// Exact inverse of a symmetric matrix by Gauss-Jordan elimination over the
/// coefficient field.
pub fn invert_symmetric<F: Field>(m: &ExactMatrix<F>) -> Result<ExactMatrix<F>, ExactAlgError> {
    if m.rows != m.cols {
        return Err(ExactAlgError::NotSquare);
    }
    if !m.is_symmetric() {
        return Err(ExactAlgError::NotSymmetric);
    }
    gauss_jordan_invert(m)
}

/// Gauss-Jordan inversion (no symmetry requirement); used internally on
/// non-symmetric cores as well.
fn gauss_jordan_invert<F: Field>(m: &ExactMatrix<F>) -> Result<ExactMatrix<F>, ExactAlgError> {
    let n = m.rows;
    let mut left = m.clone();
    let mut right = ExactMatrix::<F>::identity(n);
    for k in 0..n {
        let Some(pr) = (k..n).find(|&i| !left.get(i, k).is_zero()) else {
            return Err(ExactAlgError::Singular { rank: m.rank() });
        };
        left.swap_rows(k, pr);
        right.swap_rows(k, pr);
        let inv_piv = F::one() / left.get(k, k).clone();
        for j in 0..n {
            left.set(k, j, left.get(k, j).clone() * inv_piv.clone());
            right.set(k, j, right.get(k, j).clone() * inv_piv.clone());
        }
        for i in 0..n {
            if i == k || left.get(i, k).is_zero() {
                continue;
            }
            let factor = left.get(i, k).clone();
            for j in 0..n {
                let lv = left.get(i, j).clone() - factor.clone() * left.get(k, j).clone();
                left.set(i, j, lv);
                let rv = right.get(i, j).clone() - factor.clone() * right.get(k, j).clone();
                right.set(i, j, rv);
            }
        }
    }
    Ok(right)
}

/// Moore-Penrose pseudoinverse of a symmetric positive semidefinite matrix
/// over the rationals, via a maximal independent column set: with C the pivot
/// columns of M, the pseudoinverse is C (C^T M C)^-1 C^T.
pub fn pseudo_invert_gram(
    m: &ExactMatrix<BigRational>,
) -> Result<ExactMatrix<BigRational>, ExactAlgError> {
    if m.rows != m.cols {
        return Err(ExactAlgError::NotSquare);
    }
    if !m.is_symmetric() {
        return Err(ExactAlgError::NotSymmetric);
    }
    let pivots = m.pivot_columns();
    if pivots.len() == m.rows {
        return gauss_jordan_invert(m);
    }
    if pivots.is_empty() {
        return Ok(ExactMatrix::zero(m.rows, m.cols));
    }
    let c = m.select_columns(&pivots);
    let core = c.transpose().mul(&m.mul(&c)?)?;
    let core_inv = gauss_jordan_invert(&core)?;
    c.mul(&core_inv)?.mul(&c.transpose())
}

/// Exact inverse of a matrix of rational functions by fraction-free
/// Bareiss-Jordan elimination over the polynomial ring: denominators are
/// cleared once up front, every interior division is an exact polynomial
/// division, and rational functions reappear only in the final
/// normalization pass.
pub fn invert_symmetric_bareiss(
    m: &ExactMatrix<RationalFunction>,
) -> Result<ExactMatrix<RationalFunction>, ExactAlgError> {
    if m.rows != m.cols {
        return Err(ExactAlgError::NotSquare);
    }
    if !m.is_symmetric() {
        return Err(ExactAlgError::NotSymmetric);
    }
    let n = m.rows;
    // Clear denominators with one global polynomial multiple.
    let mut scale = UniPolynomial::one();
    for e in &m.data {
        let g = scale.gcd(e.den());
        scale = scale.mul(&e.den().exact_div(&g)?);
    }
    let mut b: Vec<Vec<UniPolynomial>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(2 * n);
        for j in 0..n {
            let e = m.get(i, j);
            row.push(e.num().mul(&scale.exact_div(e.den())?));
        }
        for j in 0..n {
            row.push(if i == j {
                UniPolynomial::one()
            } else {
                UniPolynomial::zero()
            });
        }
        b.push(row);
    }
    // One-step fraction-free Jordan elimination: after processing column k,
    // column k is zero off the pivot row, and every division by the previous
    // pivot is exact (entries are minors of the scaled input).
    let mut prev = UniPolynomial::one();
    for k in 0..n {
        if b[k][k].is_zero() {
            let Some(pr) = (k + 1..n).find(|&i| !b[i][k].is_zero()) else {
                let left = ExactMatrix::from_fn(n, n, |i, j| {
                    RationalFunction::from_polynomial(b[i][j].clone())
                });
                return Err(ExactAlgError::Singular { rank: left.rank() });
            };
            b.swap(k, pr);
        }
        let piv = b[k][k].clone();
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = b[i][k].clone();
            if f.is_zero() {
                for j in 0..2 * n {
                    b[i][j] = piv.mul(&b[i][j]).exact_div(&prev)?;
                }
            } else {
                for j in 0..2 * n {
                    b[i][j] = piv.mul(&b[i][j]).sub(&f.mul(&b[k][j])).exact_div(&prev)?;
                }
            }
        }
        prev = piv;
    }
    // Left block is now diagonal; row i of the inverse is the right block
    // divided by its diagonal entry, times the original scale.
    let mut out = ExactMatrix::zero(n, n);
    for i in 0..n {
        let diag = b[i][i].clone();
        if diag.is_zero() {
            return Err(ExactAlgError::Singular { rank: i });
        }
        for j in 0..n {
            out.set(i, j, rf_normalize(scale.mul(&b[i][n + j]), diag.clone())?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(coeffs: &[i64]) -> UniPolynomial {
        UniPolynomial::from_int_coeffs(coeffs)
    }

    fn rf(num: &[i64], den: &[i64]) -> RationalFunction {
        rf_normalize(poly(num), poly(den)).unwrap()
    }

    #[test]
    fn rf_normalize_examples() {
        // (2N+2)/(2N^2-2) reduces to 1/(N-1).
        assert_eq!(rf(&[2, 2], &[-2, 0, 2]), rf(&[1], &[-1, 1]));
        // 0/(N^3+1) is the canonical zero.
        assert_eq!(rf(&[0], &[1, 0, 0, 1]), RationalFunction::zero());
        // N/1 is already canonical.
        let n = rf(&[0, 1], &[1]);
        assert_eq!(n.num(), &poly(&[0, 1]));
        assert_eq!(n.den(), &UniPolynomial::one());
        assert!(rf_normalize(poly(&[1]), UniPolynomial::zero()).is_err());
    }

    #[test]
    fn gcd_examples() {
        let g = poly(&[-1, 0, 1]).gcd(&poly(&[1, 1]));
        assert_eq!(g, poly(&[1, 1]));
        assert_eq!(poly(&[3]).gcd(&poly(&[0, 6])), poly(&[1]));
        assert_eq!(poly(&[0, 2]).gcd(&poly(&[0, 0, 4])), poly(&[0, 1]));
        assert_eq!(UniPolynomial::zero().gcd(&poly(&[0, -3])), poly(&[0, 3]));
    }

    #[test]
    fn exact_div_detects_remainders() {
        assert_eq!(poly(&[-1, 0, 1]).exact_div(&poly(&[1, 1])).unwrap(), poly(&[-1, 1]));
        assert_eq!(
            poly(&[1, 1]).exact_div(&poly(&[0, 1])),
            Err(ExactAlgError::InexactDivision)
        );
    }

    #[test]
    fn falling_factorial_values() {
        assert_eq!(UniPolynomial::falling_factorial(0), UniPolynomial::one());
        assert_eq!(UniPolynomial::falling_factorial(1), poly(&[0, 1]));
        assert_eq!(UniPolynomial::falling_factorial(2), poly(&[0, -1, 1]));
        assert_eq!(
            UniPolynomial::falling_factorial(3).eval(&br_int(5)),
            br_int(60)
        );
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(evaluate(&rf(&[1], &[-1, 1]), &br_int(3)).unwrap(), br(1, 2));
        // Wg((3)) denominator: N^5 - 5N^3 + 4N.
        let wg3 = rf(&[2], &[0, 4, 0, -5, 0, 1]);
        assert_eq!(evaluate(&wg3, &br_int(3)).unwrap(), br(1, 60));
        assert_eq!(
            evaluate(&rf(&[1], &[-1, 1]), &br_int(1)),
            Err(ExactAlgError::Pole { at: br_int(1) })
        );
        // -1/(z(z-1)(z+2)) at z = -4 is 1/40.
        let o2 = rf(&[-1], &[0, -2, 1, 1]);
        assert_eq!(evaluate(&o2, &br_int(-4)).unwrap(), br(1, 40));
    }

    #[test]
    fn substitute_shifts_parameter() {
        // 1/z at z = N+1 gives 1/(N+1).
        let f = rf(&[1], &[0, 1]);
        assert_eq!(f.substitute(&poly(&[1, 1])).unwrap(), rf(&[1], &[1, 1]));
        // -1/(z(z-1)(z+2)) at z = -2N has value 1/40 at N=2.
        let o2 = rf(&[-1], &[0, -2, 1, 1]);
        let sp = o2.substitute(&poly(&[0, -2])).unwrap();
        assert_eq!(evaluate(&sp, &br_int(2)).unwrap(), br(1, 40));
    }

    #[test]
    fn series_at_infinity_examples() {
        // 1/(N^2 - 1) = N^-2 + N^-4 + ...
        let f = rf(&[1], &[-1, 0, 1]);
        let s = f.series_at_infinity(6).unwrap();
        let expect: Vec<BigRational> =
            [0, 0, 1, 0, 1, 0].iter().map(|&c| br_int(c)).collect();
        assert_eq!(s, expect);
        // (N+1)/N^2 = N^-1 + N^-2.
        let g = rf(&[1, 1], &[0, 0, 1]);
        let s = g.series_at_infinity(4).unwrap();
        let expect: Vec<BigRational> = [0, 1, 1, 0].iter().map(|&c| br_int(c)).collect();
        assert_eq!(s, expect);
        assert!(rf(&[0, 0, 1], &[0, 1]).series_at_infinity(2).is_err());
    }

    #[test]
    fn display_matches_cli_forms() {
        let wg3 = rf(&[2], &[0, 4, 0, -5, 0, 1]);
        assert_eq!(wg3.format_with_var("N"), "2/(N^5 - 5N^3 + 4N)");
        let o2 = rf(&[-1], &[0, -2, 1, 1]);
        assert_eq!(o2.format_with_var("N"), "-1/(N^3 + N^2 - 2N)");
        assert_eq!(rf(&[1], &[3]).format_with_var("N"), "1/3");
        assert_eq!(rf(&[1], &[0, 1]).format_with_var("N"), "1/N");
        assert_eq!(rf(&[0, 1], &[1]).format_with_var("N"), "N");
        assert_eq!(RationalFunction::zero().format_with_var("N"), "0");
        assert_eq!(rf(&[1], &[0, 2]).format_with_var("N"), "1/(2N)");
        assert_eq!(rf(&[1, 1], &[0, -1, 1]).format_with_var("z"), "(z + 1)/(z^2 - z)");
        // Scaling clears rational coefficients: (1/2)/((1/2)N) prints 1/N.
        let f = rf_normalize(
            UniPolynomial::constant(br(1, 2)),
            UniPolynomial::new(vec![BigRational::zero(), br(1, 2)]),
        )
        .unwrap();
        assert_eq!(f.format_with_var("N"), "1/N");
    }

    #[test]
    fn json_round_trip() {
        let wg3 = rf(&[2], &[0, 4, 0, -5, 0, 1]);
        let v = wg3.to_json();
        assert_eq!(RationalFunction::from_json(&v).unwrap(), wg3);
        let s = serde_json::to_string(&v).unwrap();
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(RationalFunction::from_json(&back).unwrap(), wg3);
        assert!(RationalFunction::from_json(&serde_json::Value::Null).is_err());
    }

    #[test]
    fn invert_symmetric_examples() {
        // Degree-2 unitary Gram [[N^2, N], [N, N^2]].
        let n2 = RationalFunction::from_polynomial(poly(&[0, 0, 1]));
        let n1 = RationalFunction::from_polynomial(poly(&[0, 1]));
        let g = ExactMatrix::from_fn(2, 2, |i, j| if i == j { n2.clone() } else { n1.clone() });
        let w = invert_symmetric(&g).unwrap();
        assert_eq!(w.get(0, 0), &rf(&[1], &[-1, 0, 1]));
        assert_eq!(w.get(0, 1), &rf(&[-1], &[0, -1, 0, 1]));
        assert_eq!(w.get(1, 0), w.get(0, 1));
        assert_eq!(g.mul(&w).unwrap(), ExactMatrix::identity(2));

        let id = ExactMatrix::<BigRational>::identity(3);
        assert_eq!(invert_symmetric(&id).unwrap(), id);

        // diag(N, N(N-1)) inverts to diag(1/N, 1/(N(N-1))).
        let d = ExactMatrix::from_fn(2, 2, |i, j| {
            if i != j {
                RationalFunction::zero()
            } else if i == 0 {
                RationalFunction::from_polynomial(poly(&[0, 1]))
            } else {
                RationalFunction::from_polynomial(poly(&[0, -1, 1]))
            }
        });
        let di = invert_symmetric(&d).unwrap();
        assert_eq!(di.get(0, 0), &rf(&[1], &[0, 1]));
        assert_eq!(di.get(1, 1), &rf(&[1], &[0, -1, 1]));
        assert!(di.get(0, 1).is_zero());
    }

    #[test]
    fn invert_symmetric_error_paths() {
        let ones = ExactMatrix::from_fn(2, 2, |_, _| br_int(1));
        assert_eq!(
            invert_symmetric(&ones),
            Err(ExactAlgError::Singular { rank: 1 })
        );
        let mut asym = ExactMatrix::<BigRational>::identity(2);
        asym.set(0, 1, br_int(5));
        assert_eq!(invert_symmetric(&asym), Err(ExactAlgError::NotSymmetric));
        let rect = ExactMatrix::<BigRational>::zero(2, 3);
        assert_eq!(invert_symmetric(&rect), Err(ExactAlgError::NotSquare));
    }

    #[test]
    fn bareiss_matches_gauss_jordan() {
        let n2 = RationalFunction::from_polynomial(poly(&[0, 0, 1]));
        let n1 = RationalFunction::from_polynomial(poly(&[0, 1]));
        let g = ExactMatrix::from_fn(2, 2, |i, j| if i == j { n2.clone() } else { n1.clone() });
        assert_eq!(invert_symmetric_bareiss(&g).unwrap(), invert_symmetric(&g).unwrap());

        // A denser symmetric polynomial matrix.
        let entries = |i: usize, j: usize| -> RationalFunction {
            let base = poly(&[(i + j) as i64, 1]);
            if i == j {
                RationalFunction::from_polynomial(base.mul(&poly(&[3, 0, 1])))
            } else {
                RationalFunction::from_polynomial(base)
            }
        };
        let m = ExactMatrix::from_fn(4, 4, |i, j| {
            if i <= j {
                entries(i, j)
            } else {
                entries(j, i)
            }
        });
        let w1 = invert_symmetric_bareiss(&m).unwrap();
        let w2 = invert_symmetric(&m).unwrap();
        assert_eq!(w1, w2);
        assert_eq!(m.mul(&w1).unwrap(), ExactMatrix::identity(4));
    }

    #[test]
    fn bareiss_reports_singularity_with_rank() {
        let one = RationalFunction::one();
        let ones = ExactMatrix::from_fn(3, 3, |_, _| one.clone());
        assert_eq!(
            invert_symmetric_bareiss(&ones),
            Err(ExactAlgError::Singular { rank: 1 })
        );
    }

    #[test]
    fn pseudo_invert_examples() {
        // Invertible input: agrees with plain inversion.
        let m = ExactMatrix::from_fn(2, 2, |i, j| if i == j { br_int(2) } else { br_int(1) });
        assert_eq!(pseudo_invert_gram(&m).unwrap(), invert_symmetric(&m).unwrap());
        // Rank-1 all-ones matrix.
        let ones = ExactMatrix::from_fn(2, 2, |_, _| br_int(1));
        let w = pseudo_invert_gram(&ones).unwrap();
        assert_eq!(w, ExactMatrix::from_fn(2, 2, |_, _| br(1, 4)));
        // Zero matrix.
        let z = ExactMatrix::<BigRational>::zero(3, 3);
        assert_eq!(pseudo_invert_gram(&z).unwrap(), z);
        let mut asym = ExactMatrix::<BigRational>::identity(2);
        asym.set(0, 1, br_int(5));
        assert_eq!(pseudo_invert_gram(&asym), Err(ExactAlgError::NotSymmetric));
    }

    #[test]
    fn pseudo_inverse_satisfies_penrose_identities() {
        // M = B^T B for a rectangular integer B is PSD and rank deficient.
        let cases: Vec<Vec<Vec<i64>>> = vec![
            vec![vec![1, 2, 3], vec![2, 4, 6]],
            vec![vec![1, 0, 1, 1], vec![0, 1, 1, -1]],
            vec![vec![2, -1, 0, 3, 1], vec![1, 1, 1, 0, 0], vec![3, 0, 1, 3, 1]],
        ];
        for rows in cases {
            let b = ExactMatrix::from_fn(rows.len(), rows[0].len(), |i, j| br_int(rows[i][j]));
            let m = b.transpose().mul(&b).unwrap();
            let w = pseudo_invert_gram(&m).unwrap();
            let mw = m.mul(&w).unwrap();
            let wm = w.mul(&m).unwrap();
            assert_eq!(m.mul(&w).unwrap().mul(&m).unwrap(), m);
            assert_eq!(w.mul(&m).unwrap().mul(&w).unwrap(), w);
            assert_eq!(mw.transpose(), mw);
            assert_eq!(wm.transpose(), wm);
        }
    }

    #[test]
    fn rank_and_pivot_columns() {
        let m = ExactMatrix::from_fn(3, 3, |i, j| br_int([[1, 2, 3], [2, 4, 6], [0, 0, 1]][i][j]));
        assert_eq!(m.rank(), 2);
        assert_eq!(m.pivot_columns(), vec![0, 2]);
        assert_eq!(ExactMatrix::<BigRational>::identity(4).rank(), 4);
        assert_eq!(ExactMatrix::<BigRational>::zero(2, 2).rank(), 0);
    }

    proptest! {
        #[test]
        fn field_axioms_big_rational(a in -20i64..20, b in -20i64..20, c in 1i64..20) {
            let x = br(a, c);
            let y = br(b, c);
            let z = br(a + b, c + 1);
            prop_assert_eq!((&x + &y) + &z, &x + (&y + &z));
            prop_assert_eq!(&x * (&y + &z), &x * &y + &x * &z);
            if !Zero::is_zero(&x) {
                prop_assert_eq!(BigRational::one() / &x * &x, BigRational::one());
            }
        }

        #[test]
        fn field_axioms_rational_function(a in -9i64..9, b in -9i64..9, c in -9i64..9) {
            let x = rf(&[a, 1], &[1, 0, 1]);
            let y = rf(&[b, 0, 1], &[2, 1]);
            let z = rf(&[c], &[1, 1]);
            prop_assert_eq!(x.add(&y).add(&z), x.add(&y.add(&z)));
            prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
            if !x.is_zero() {
                prop_assert_eq!(RationalFunction::one().checked_div(&x).unwrap().mul(&x), RationalFunction::one());
            }
        }

        #[test]
        fn inversion_round_trip(seed in 0u64..300) {
            // Small random symmetric integer matrices; skip the singular ones.
            let n = 2 + (seed % 3) as usize;
            let mut vals = seed;
            let mut next = || {
                vals = vals.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((vals >> 33) % 11) as i64 - 5
            };
            let mut m = ExactMatrix::<BigRational>::zero(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let v = br_int(next());
                    m.set(i, j, v.clone());
                    m.set(j, i, v);
                }
            }
            match invert_symmetric(&m) {
                Ok(w) => {
                    prop_assert_eq!(m.mul(&w).unwrap(), ExactMatrix::identity(n));
                    prop_assert_eq!(w.mul(&m).unwrap(), ExactMatrix::identity(n));
                }
                Err(ExactAlgError::Singular { rank }) => prop_assert!(rank < n),
                Err(other) => prop_assert!(false, "unexpected error {:?}", other),
            }
        }

        #[test]
        fn arithmetic_commutes_with_evaluation(a in -8i64..8, b in -8i64..8, at in -5i64..5) {
            let f = rf(&[a, 1], &[1, 0, 1]);
            let g = rf(&[b, 2], &[3, 1]);
            let x = br_int(at);
            let fg = f.mul(&g);
            let sum = f.add(&g);
            if let (Ok(fv), Ok(gv)) = (evaluate(&f, &x), evaluate(&g, &x)) {
                prop_assert_eq!(evaluate(&fg, &x).unwrap(), &fv * &gv);
                prop_assert_eq!(evaluate(&sum, &x).unwrap(), &fv + &gv);
            }
        }

        #[test]
        fn series_matches_large_point_evaluation(num0 in -6i64..6, num1 in -6i64..6) {
            // Compare the truncated series against evaluation at a large
            // point: the tail is O(x^-(k+1)).
            let f = rf(&[num0, num1], &[1, 0, 0, 1]);
            let terms = 6usize;
            let series = f.series_at_infinity(terms).unwrap();
            let x = br_int(10_000);
            let mut approx = BigRational::zero();
            let mut pow = BigRational::one();
            for c in &series {
                approx += c * &pow;
                pow /= &x;
            }
            let exact = evaluate(&f, &x).unwrap();
            let err = (&exact - &approx).abs();
            let bound = BigRational::new(BigInt::one(), BigInt::from(10u8).pow(4 * (terms as u32) - 2));
            prop_assert!(err < bound, "series tail too large: {}", err);
        }
    }
}
