//! Exact engine for Weingarten calculus on the classical compact groups.
//!
//! Weingarten functions of `S(N)`, `U(N)`, `O(N)`, `Sp(N)` and the circular
//! ensembles COE/CSE are computed as exact rational functions of the rank
//! parameter, and Haar integrals of matrix-entry monomials are evaluated from
//! them. Every value is exact: arithmetic runs over arbitrary-precision
//! rationals, univariate polynomials, and reduced rational functions, never
//! floating point.
//!
//! The crate is `no_std` (with `alloc`); sampling-based verification and the
//! command-line front end live in the companion `wg-cli` crate.
//!
//! Module layout:
//!
//! - [`combinat`]: permutations, integer partitions, set partitions, pairings,
//!   index sequences, and their classification maps (cycle type, fiber type,
//!   coset type).
//! - [`exactalg`]: big rationals, univariate polynomials, canonical rational
//!   functions, exact dense matrices, fraction-free inversion, and a
//!   Moore-Penrose pseudoinverse for symmetric matrices.
//! - [`symchar`]: characters of `S(d)`, contents, Jucys-Murphy elements, the
//!   gamma element, strictly monotone factorizations, and monotone walk counts.
//! - [`weingarten`]: Gram matrices of tensor invariants and Weingarten tables
//!   for all supported groups, symbolic and numeric.
//! - [`integrate`]: Haar-integral evaluators for matrix-entry monomials, plus
//!   explicit projection-matrix oracles.
//!
//! One global convention is used everywhere: permutations compose right to
//! left, `(pq)(x) = p(q(x))`, and all index sets are 1-based.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod combinat;
pub mod exactalg;
pub mod integrate;
pub mod symchar;
pub mod weingarten;
