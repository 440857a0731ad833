//! Core combinatorial objects: permutations, integer partitions, set
//! partitions, pairings, and index sequences, together with their
//! classification maps (cycle type, fiber type, coset type).
//!
//! Conventions, fixed once for the whole crate:
//!
//! - All ground sets are 1-based: `[d] = {1, ..., d}`.
//! - Permutations compose right to left: `compose(p, q)` maps `x` to `p(q(x))`.
//! - Enumerations are deterministic: set partitions in descending
//!   restricted-growth-string order (finest first), pairings by
//!   smallest-unpaired-first recursion, permutations in lexicographic order of
//!   one-line notation.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Error type for invalid combinatorial constructions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinatError(pub String);

impl fmt::Display for CombinatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn err<T>(msg: &str) -> Result<T, CombinatError> {
    Err(CombinatError(String::from(msg)))
}

/// A permutation of `[d]` in one-line notation: `images[x-1] = p(x)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from 1-based one-line notation, checking that the
    /// images form a bijection of `[d]`.
    pub fn from_images(images: Vec<usize>) -> Result<Self, CombinatError> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &v in &images {
            if v == 0 || v > d {
                return err("permutation image out of range");
            }
            if seen[v - 1] {
                return err("permutation image repeated");
            }
            seen[v - 1] = true;
        }
        Ok(Permutation { images })
    }

    /// The identity of `S(d)`.
    pub fn identity(d: usize) -> Self {
        Permutation {
            images: (1..=d).collect(),
        }
    }

    /// The transposition `(i j)` in `S(d)`.
    pub fn transposition(d: usize, i: usize, j: usize) -> Self {
        let mut images: Vec<usize> = (1..=d).collect();
        images.swap(i - 1, j - 1);
        Permutation { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Applies the permutation: `p.apply(x) = p(x)`.
    pub fn apply(&self, x: usize) -> usize {
        self.images[x - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(k, &v)| v == k + 1)
    }

    /// Right-to-left composition: `compose(p, q)(x) = p(q(x))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: other.images.iter().map(|&x| self.images[x - 1]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.images.len()];
        for (k, &v) in self.images.iter().enumerate() {
            images[v - 1] = k + 1;
        }
        Permutation { images }
    }

    /// Disjoint cycles, each rotated to start at its minimum, sorted by length
    /// descending then by starting point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let d = self.degree();
        let mut seen = vec![false; d];
        let mut cycles = Vec::new();
        for start in 1..=d {
            if seen[start - 1] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x - 1] {
                seen[x - 1] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            cycles.push(cycle);
        }
        cycles.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        cycles
    }

    /// Number of disjoint cycles, fixed points included.
    pub fn cycle_count(&self) -> usize {
        self.cycles().len()
    }

    /// All permutations of `[d]` in lexicographic one-line order.
    pub fn all(d: usize) -> Vec<Permutation> {
        let mut images: Vec<usize> = (1..=d).collect();
        let mut out = Vec::new();
        loop {
            out.push(Permutation {
                images: images.clone(),
            });
            if !next_lex(&mut images) {
                break;
            }
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        write!(f, "(")?;
        for &v in &self.images {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        write!(f, ")")
    }
}

/// Advances `v` to its lexicographic successor; returns false at the last one.
fn next_lex(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Cycle type of a permutation: disjoint-cycle lengths, fixed points included,
/// sorted weakly decreasing.
pub fn cycle_type(p: &Permutation) -> IntegerPartition {
    let mut parts: Vec<usize> = p.cycles().iter().map(Vec::len).collect();
    parts.sort_unstable_by(|a, b| b.cmp(a));
    IntegerPartition { parts }
}

/// Word norm `|p| = d - #cycles(p)`: the minimal number of transpositions
/// whose product is `p`.
pub fn word_norm(p: &Permutation) -> usize {
    p.degree() - p.cycle_count()
}

/// Sign of a permutation: `(-1)^word_norm(p)`.
pub fn sign(p: &Permutation) -> i64 {
    if word_norm(p) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// An integer partition: weakly decreasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntegerPartition {
    parts: Vec<usize>,
}

impl IntegerPartition {
    /// Builds a partition, sorting the parts; zero parts are rejected.
    pub fn new(mut parts: Vec<usize>) -> Result<Self, CombinatError> {
        if parts.iter().any(|&p| p == 0) {
            return err("partition parts must be positive");
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(IntegerPartition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// The weight `d = sum of parts`.
    pub fn weight(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// All partitions of `d`, in descending lexicographic order, `(d)` first.
    pub fn all(d: usize) -> Vec<IntegerPartition> {
        let mut out = Vec::new();
        let mut stack = Vec::new();
        gen_partitions(d, d, &mut stack, &mut out);
        out
    }

    /// A canonical permutation of cycle type `self`: consecutive cycles
    /// `(1 2 .. a1)(a1+1 ..) ...`.
    pub fn representative(&self) -> Permutation {
        let d = self.weight();
        let mut images: Vec<usize> = (1..=d).collect();
        let mut base = 0;
        for &a in &self.parts {
            for k in 0..a {
                images[base + k] = base + 1 + (k + 1) % a;
            }
            base += a;
        }
        Permutation { images }
    }

    /// Size of the conjugacy class of `S(d)` with this cycle type:
    /// `d! / (prod parts * prod multiplicities!)`.
    pub fn class_size(&self) -> u128 {
        let d = self.weight();
        let mut z: u128 = 1;
        for &a in &self.parts {
            z *= a as u128;
        }
        let mut mult = 1u128;
        let mut run = 1u128;
        for w in self.parts.windows(2) {
            if w[0] == w[1] {
                run += 1;
                mult *= run;
            } else {
                run = 1;
            }
        }
        factorial(d) / (z * mult)
    }
}

impl fmt::Display for IntegerPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, &p) in self.parts.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn gen_partitions(
    remaining: usize,
    max_part: usize,
    stack: &mut Vec<usize>,
    out: &mut Vec<IntegerPartition>,
) {
    if remaining == 0 {
        out.push(IntegerPartition {
            parts: stack.clone(),
        });
        return;
    }
    let hi = remaining.min(max_part);
    for part in (1..=hi).rev() {
        stack.push(part);
        gen_partitions(remaining - part, part, stack, out);
        stack.pop();
    }
}

/// A set partition of `[d]`: disjoint nonempty blocks covering `[d]`,
/// canonically ordered (blocks by minimum element, elements ascending).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetPartition {
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Builds a set partition of `[d]` where `d` is the total element count,
    /// checking disjointness and cover, and canonicalizing the order.
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Result<Self, CombinatError> {
        let d: usize = blocks.iter().map(Vec::len).sum();
        let mut seen = vec![false; d];
        for block in &mut blocks {
            if block.is_empty() {
                return err("set partition blocks must be nonempty");
            }
            block.sort_unstable();
            for &x in block.iter() {
                if x == 0 || x > d {
                    return err("set partition element out of range");
                }
                if seen[x - 1] {
                    return err("set partition element repeated");
                }
                seen[x - 1] = true;
            }
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(SetPartition { blocks })
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn ground_size(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, block) in self.blocks.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (j, &x) in block.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

/// A sequence `i : [d] -> [N]`, 1-based on both sides.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexSequence {
    entries: Vec<usize>,
    alphabet: usize,
}

impl IndexSequence {
    pub fn new(entries: Vec<usize>, alphabet: usize) -> Result<Self, CombinatError> {
        if entries.iter().any(|&v| v == 0 || v > alphabet) {
            return err("index sequence entry out of alphabet range");
        }
        Ok(IndexSequence { entries, alphabet })
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn get(&self, x: usize) -> usize {
        self.entries[x - 1]
    }

    /// All of `Fun(d, N)` in odometer order (last coordinate fastest).
    pub fn all(d: usize, alphabet: usize) -> Vec<IndexSequence> {
        let mut out = Vec::new();
        let mut cur = vec![1usize; d];
        loop {
            out.push(IndexSequence {
                entries: cur.clone(),
                alphabet,
            });
            let mut k = d;
            loop {
                if k == 0 {
                    return out;
                }
                if cur[k - 1] < alphabet {
                    cur[k - 1] += 1;
                    break;
                }
                cur[k - 1] = 1;
                k -= 1;
            }
        }
    }
}

/// Fiber type of an index sequence: the set partition of `[d]` whose blocks
/// are the nonempty level sets `{x : i(x) = v}`.
pub fn fiber_type(i: &IndexSequence) -> SetPartition {
    let mut blocks_by_value: Vec<Vec<usize>> = vec![Vec::new(); i.alphabet()];
    for (pos, &v) in i.entries().iter().enumerate() {
        blocks_by_value[v - 1].push(pos + 1);
    }
    let blocks: Vec<Vec<usize>> = blocks_by_value.into_iter().filter(|b| !b.is_empty()).collect();
    SetPartition::new(blocks).expect("level sets always form a set partition")
}

/// All set partitions of `[d]` with at most `max_blocks` blocks, in descending
/// restricted-growth-string lexicographic order (finest partitions first).
pub fn enumerate_set_partitions(d: usize, max_blocks: usize) -> Vec<SetPartition> {
    assert!(d >= 1 && max_blocks >= 1);
    let mut out = Vec::new();
    let mut rgs = vec![0usize; d];
    gen_rgs(1, 0, max_blocks, &mut rgs, &mut out);
    out
}

fn gen_rgs(pos: usize, max_used: usize, max_blocks: usize, rgs: &mut Vec<usize>, out: &mut Vec<SetPartition>) {
    let d = rgs.len();
    if pos == d {
        let blocks_n = max_used + 1;
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); blocks_n];
        for (k, &b) in rgs.iter().enumerate() {
            blocks[b].push(k + 1);
        }
        out.push(SetPartition { blocks });
        return;
    }
    // Descending lexicographic order on the growth string: new block first.
    let hi = (max_used + 1).min(max_blocks - 1);
    for v in (0..=hi).rev() {
        rgs[pos] = v;
        gen_rgs(pos + 1, max_used.max(v), max_blocks, rgs, out);
    }
}

/// A pairing (perfect matching) of `[2d]`, stored canonically: each pair
/// `(a, b)` with `a < b`, pairs sorted by first element. Flattening gives the
/// one-line permutation with `sigma(2r-1) < sigma(2r)` and
/// `sigma(1) < sigma(3) < ...`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pairing {
    pairs: Vec<(usize, usize)>,
}

impl Pairing {
    /// Builds a pairing of `[2d]` from unordered pairs, canonicalizing.
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self, CombinatError> {
        let two_d = 2 * pairs.len();
        let mut seen = vec![false; two_d];
        let mut canon: Vec<(usize, usize)> = Vec::with_capacity(pairs.len());
        for (x, y) in pairs {
            if x == y || x == 0 || y == 0 || x > two_d || y > two_d {
                return err("pairing element out of range");
            }
            if seen[x - 1] || seen[y - 1] {
                return err("pairing element repeated");
            }
            seen[x - 1] = true;
            seen[y - 1] = true;
            canon.push((x.min(y), x.max(y)));
        }
        canon.sort_unstable();
        Ok(Pairing { pairs: canon })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Number of pairs `d` (ground set is `[2d]`).
    pub fn size(&self) -> usize {
        self.pairs.len()
    }

    /// The partner of `x` in the pairing.
    pub fn partner(&self, x: usize) -> usize {
        for &(a, b) in &self.pairs {
            if a == x {
                return b;
            }
            if b == x {
                return a;
            }
        }
        unreachable!("element not in pairing")
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, &(a, b)) in self.pairs.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{{a},{b}}}")?;
        }
        write!(f, "}}")
    }
}

/// All `(2d-1)!!` pairings of `[two_d]`, by smallest-unpaired-first recursion;
/// the partner of the smallest element increases in the outermost loop.
pub fn enumerate_pairings(two_d: usize) -> Result<Vec<Pairing>, CombinatError> {
    if two_d == 0 || two_d % 2 != 0 {
        return err("pairings require even ground set");
    }
    let mut out = Vec::new();
    let mut free: Vec<usize> = (1..=two_d).collect();
    let mut acc = Vec::new();
    gen_pairings(&mut free, &mut acc, &mut out);
    Ok(out)
}

fn gen_pairings(free: &mut Vec<usize>, acc: &mut Vec<(usize, usize)>, out: &mut Vec<Pairing>) {
    if free.is_empty() {
        out.push(Pairing { pairs: acc.clone() });
        return;
    }
    let a = free[0];
    for k in 1..free.len() {
        let b = free[k];
        let mut rest: Vec<usize> = free[1..k].to_vec();
        rest.extend_from_slice(&free[k + 1..]);
        acc.push((a, b));
        gen_pairings(&mut rest, acc, out);
        acc.pop();
    }
}

/// Identifies a pairing with a permutation of `[2d]` by flattening its
/// canonical form: the one-line images are `(a1, b1, a2, b2, ...)`.
pub fn pairing_to_permutation(p: &Pairing) -> Permutation {
    let mut images = Vec::with_capacity(2 * p.size());
    for &(a, b) in p.pairs() {
        images.push(a);
        images.push(b);
    }
    Permutation::from_images(images).expect("canonical pairing flattens to a permutation")
}

/// Recovers the pairing from any permutation whose consecutive image pairs
/// partition `[2d]` (inverse of `pairing_to_permutation` on canonical forms).
pub fn permutation_to_pairing(s: &Permutation) -> Result<Pairing, CombinatError> {
    if s.degree() % 2 != 0 {
        return err("pairings require even ground set");
    }
    let pairs: Vec<(usize, usize)> = (0..s.degree() / 2)
        .map(|r| (s.apply(2 * r + 1), s.apply(2 * r + 2)))
        .collect();
    Pairing::new(pairs)
}

/// Coset type of a permutation `s` of `[2d]`: build the multigraph on `[2d]`
/// with edges `{2i-1, 2i}` and `{s(2i-1), s(2i)}`; its connected components
/// have even sizes `2 mu_1 >= 2 mu_2 >= ...`, and the coset type is `mu`.
pub fn coset_type(s: &Permutation) -> Result<IntegerPartition, CombinatError> {
    let two_d = s.degree();
    if two_d % 2 != 0 {
        return err("coset type requires a permutation of even degree");
    }
    let mut uf = UnionFind::new(two_d);
    for i in 0..two_d / 2 {
        uf.union(2 * i, 2 * i + 1);
        uf.union(s.apply(2 * i + 1) - 1, s.apply(2 * i + 2) - 1);
    }
    let mut sizes: Vec<usize> = vec![0; two_d];
    for x in 0..two_d {
        sizes[uf.find(x)] += 1;
    }
    let mut parts: Vec<usize> = sizes.into_iter().filter(|&c| c > 0).map(|c| c / 2).collect();
    parts.sort_unstable_by(|a, b| b.cmp(a));
    Ok(IntegerPartition { parts })
}

/// Number of connected components of the coset-type graph, `kappa(s)`.
pub fn kappa(s: &Permutation) -> Result<usize, CombinatError> {
    Ok(coset_type(s)?.len())
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx != ry {
            self.parent[rx] = ry;
        }
    }
}

/// Length of the longest strictly decreasing subsequence of the one-line
/// notation, by patience sorting on negated values. Membership in the
/// Baik-Rains basis `S_N(d)` is `longest_decreasing_subsequence(p) <= N`.
pub fn longest_decreasing_subsequence(p: &Permutation) -> usize {
    // Tails of strictly increasing subsequences of the negated sequence;
    // binary search keeps the whole pass O(d log d).
    let mut tails: Vec<i64> = Vec::new();
    for &v in p.images() {
        let x = -(v as i64);
        let pos = tails.partition_point(|&t| t < x);
        if pos == tails.len() {
            tails.push(x);
        } else {
            tails[pos] = x;
        }
    }
    tails.len()
}
