//! Binary pairwise energies of the form
//! `E(S) = c + Σ_p u_p·s_p + Σ_{p<q} w_pq·s_p·s_q` over `S ∈ {0,1}^n`.
//!
//! Each unordered pair is stored once, so `w_pq` is the sum of both
//! off-diagonal entries of a symmetric coefficient matrix. Pairs are kept
//! sorted lexicographically and every evaluation sums terms in the same
//! order (constant, unaries by index, pairs by `(p, q)`), which makes
//! energies bit-for-bit reproducible.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// A single quadratic term `w·s_p·s_q` with `p < q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair {
    pub p: usize,
    pub q: usize,
    pub w: f64,
}

impl Pair {
    pub fn new(p: usize, q: usize, w: f64) -> Self {
        Pair { p, q, w }
    }

    /// Nonpositive coefficients are submodular; zero counts as submodular.
    #[inline]
    pub fn is_submodular(&self) -> bool {
        self.w <= 0.0
    }
}

/// Binary pairwise energy.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryEnergy {
    unary: Vec<f64>,
    pairs: Vec<Pair>,
    constant: f64,
}

impl BinaryEnergy {
    /// Validates and canonicalizes the terms. Pairs may be given in any
    /// order but must satisfy `p < q < num_vars` and be unique.
    pub fn new(unary: Vec<f64>, mut pairs: Vec<Pair>, constant: f64) -> Result<Self> {
        let n = unary.len();
        if !constant.is_finite() {
            return Err(Error::NonFinite { what: "constant" });
        }
        if unary.iter().any(|u| !u.is_finite()) {
            return Err(Error::NonFinite { what: "unary" });
        }
        for pair in &pairs {
            if pair.p >= pair.q {
                return Err(Error::PairOrder { p: pair.p, q: pair.q });
            }
            if pair.q >= n {
                return Err(Error::IndexOutOfRange { index: pair.q, num_vars: n });
            }
            if !pair.w.is_finite() {
                return Err(Error::NonFinite { what: "pairwise" });
            }
        }
        pairs.sort_by_key(|pr| (pr.p, pr.q));
        if let Some(dup) = pairs.windows(2).find(|w| (w[0].p, w[0].q) == (w[1].p, w[1].q)) {
            return Err(Error::DuplicatePair { p: dup[0].p, q: dup[0].q });
        }
        Ok(BinaryEnergy { unary, pairs, constant })
    }

    /// Energy with `n` variables and every coefficient zero.
    pub fn zero(n: usize) -> Self {
        BinaryEnergy { unary: vec![0.0; n], pairs: Vec::new(), constant: 0.0 }
    }

    #[inline]
    pub fn num_vars(&self) -> usize {
        self.unary.len()
    }

    #[inline]
    pub fn unary(&self) -> &[f64] {
        &self.unary
    }

    /// Pairwise terms in lexicographic `(p, q)` order.
    #[inline]
    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    #[inline]
    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// True when every pairwise coefficient is `≤ 0`.
    pub fn is_submodular(&self) -> bool {
        self.pairs.iter().all(Pair::is_submodular)
    }

    /// `E(S)`, summed in canonical order.
    pub fn eval(&self, s: &Labeling) -> Result<f64> {
        self.check_len(s.len())?;
        Ok(self.eval_unchecked(s))
    }

    pub(crate) fn eval_unchecked(&self, s: &Labeling) -> f64 {
        let bits = s.bits();
        let mut acc = self.constant;
        for (u, &b) in self.unary.iter().zip(bits) {
            if b {
                acc += u;
            }
        }
        for pair in &self.pairs {
            if bits[pair.p] && bits[pair.q] {
                acc += pair.w;
            }
        }
        acc
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.num_vars() {
            return Err(Error::Dimension { expected: self.num_vars(), found: len });
        }
        Ok(())
    }

    /// Splits the pairwise terms by sign: `w ≤ 0` stays with the unaries and
    /// constant in the submodular part, `w > 0` goes to the supermodular list.
    pub fn decompose(&self) -> Decomposition {
        let (sub_pairs, sup_pairs): (Vec<Pair>, Vec<Pair>) = self.pairs.iter().partition(|pair| pair.is_submodular());
        Decomposition {
            sub: BinaryEnergy { unary: self.unary.clone(), pairs: sub_pairs, constant: self.constant },
            sup_pairs,
        }
    }

    /// Adjacency list: for every variable, its `(neighbour, w)` pairs.
    pub fn neighbours(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.num_vars()];
        for pair in &self.pairs {
            adj[pair.p].push((pair.q, pair.w));
            adj[pair.q].push((pair.p, pair.w));
        }
        adj
    }
}

/// Accumulates terms in any order, merging duplicate pairs and folding
/// diagonal terms `w·s_p·s_p` into the unary (since `s² = s`).
#[derive(Debug, Clone, Default)]
pub struct EnergyBuilder {
    unary: Vec<f64>,
    pairs: BTreeMap<(usize, usize), f64>,
    constant: f64,
}

impl EnergyBuilder {
    pub fn new(num_vars: usize) -> Self {
        EnergyBuilder { unary: vec![0.0; num_vars], pairs: BTreeMap::new(), constant: 0.0 }
    }

    pub fn num_vars(&self) -> usize {
        self.unary.len()
    }

    pub fn add_constant(&mut self, c: f64) -> &mut Self {
        self.constant += c;
        self
    }

    pub fn add_unary(&mut self, p: usize, u: f64) -> Result<&mut Self> {
        let n = self.num_vars();
        *self.unary.get_mut(p).ok_or(Error::IndexOutOfRange { index: p, num_vars: n })? += u;
        Ok(self)
    }

    pub fn add_pairwise(&mut self, p: usize, q: usize, w: f64) -> Result<&mut Self> {
        let n = self.num_vars();
        for index in [p, q] {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, num_vars: n });
            }
        }
        if p == q {
            self.unary[p] += w;
        } else {
            *self.pairs.entry((p.min(q), p.max(q))).or_insert(0.0) += w;
        }
        Ok(self)
    }

    /// Finishes the energy. Pairs whose accumulated coefficient is exactly
    /// zero are kept; they are harmless and dropping them would change the
    /// sparsity pattern depending on cancellation.
    pub fn build(self) -> Result<BinaryEnergy> {
        let pairs = self.pairs.into_iter().map(|((p, q), w)| Pair { p, q, w }).collect();
        BinaryEnergy::new(self.unary, pairs, self.constant)
    }
}

/// `E = E_sub + E_sup`: submodular energy (all unaries, constant and `w ≤ 0`
/// pairs) plus the list of strictly positive pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub sub: BinaryEnergy,
    pub sup_pairs: Vec<Pair>,
}

impl Decomposition {
    pub fn num_vars(&self) -> usize {
        self.sub.num_vars()
    }

    /// `Σ w⁺_pq·s_p·s_q` over the supermodular pairs.
    pub fn eval_sup(&self, s: &Labeling) -> Result<f64> {
        self.sub.check_len(s.len())?;
        let bits = s.bits();
        Ok(self.sup_pairs.iter().filter(|pr| bits[pr.p] && bits[pr.q]).map(|pr| pr.w).sum())
    }
}

/// A point of `{0,1}^n`; `true` is foreground.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Labeling {
    bits: Vec<bool>,
}

impl Labeling {
    pub fn zeros(n: usize) -> Self {
        Labeling { bits: vec![false; n] }
    }

    pub fn ones(n: usize) -> Self {
        Labeling { bits: vec![true; n] }
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        Labeling { bits }
    }

    /// From 0/1 values; anything nonzero is foreground.
    pub fn from_bits(bits: &[u8]) -> Self {
        Labeling { bits: bits.iter().map(|&b| b != 0).collect() }
    }

    /// Variable `p` takes bit `p` of `code`. Only meaningful for `n ≤ 64`.
    pub fn from_code(code: u64, n: usize) -> Self {
        Labeling { bits: (0..n).map(|p| (code >> p) & 1 == 1).collect() }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, p: usize) -> bool {
        self.bits[p]
    }

    #[inline]
    pub fn set(&mut self, p: usize, value: bool) {
        self.bits[p] = value;
    }

    /// `s_p` as a real, for linear algebra.
    #[inline]
    pub fn value(&self, p: usize) -> f64 {
        if self.bits[p] {
            1.0
        } else {
            0.0
        }
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn into_bools(self) -> Vec<bool> {
        self.bits
    }
}

impl fmt::Debug for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Labeling(")?;
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}

/// Number of positions where `a` and `b` differ.
pub fn hamming(a: &Labeling, b: &Labeling) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::Dimension { expected: a.len(), found: b.len() });
    }
    Ok(a.bits.iter().zip(&b.bits).filter(|(x, y)| x != y).count())
}

/// Unary encoding of `λ·hamming(S, s0)`: returns `(d, c)` with
/// `c + Σ d_p·s_p = λ·hamming(S, s0)` for every `S`.
pub fn hamming_unaries(s0: &Labeling, lambda: f64) -> Result<(Vec<f64>, f64)> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::Parameter { name: "lambda", reason: "must be finite and nonnegative" });
    }
    let d = s0.bits.iter().map(|&b| if b { -lambda } else { lambda }).collect();
    let c = lambda * s0.count_ones() as f64;
    Ok((d, c))
}
