//! Multivariate polynomials truncated at a fixed total degree.
//!
//! A [`TruncatedPolynomial`] in `n` variables of order `r` stores the
//! `C(n+r, n)` coefficients densely, indexed by the graded-lexicographic
//! enumeration of exponents returned by [`enumerate_indices`]. Products,
//! powers and compositions are always truncated back to degree `r`, so the
//! type models the ring of `r`-jets at the origin.
//!
//! Layout tables (index lookup and the multiplication table) are shared
//! per `(n, r)` via [`Basis::get`].

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{JetError, Result};
use crate::scalar::Scalar;

/// Exponent vector of a monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The unit index `e_i`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn vars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Binomial coefficient in exact integer arithmetic.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Number of monomials of degree `<= r` in `n` variables.
pub fn monomial_count(n: usize, r: usize) -> usize {
    binomial((n + r) as u64, n as u64) as usize
}

/// All exponent vectors with total degree `<= r`, by degree and then
/// lexicographically descending within a degree.
pub fn enumerate_indices(n: usize, r: usize) -> Vec<MultiIndex> {
    assert!(n >= 1, "need at least one variable");
    let mut out = Vec::with_capacity(monomial_count(n, r));
    let mut buf = vec![0u32; n];
    for deg in 0..=r as u32 {
        push_degree(&mut buf, 0, deg, &mut out);
    }
    out
}

fn push_degree(buf: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == buf.len() {
        buf[pos] = remaining;
        out.push(MultiIndex(buf.to_vec()));
        return;
    }
    for e in (0..=remaining).rev() {
        buf[pos] = e;
        push_degree(buf, pos + 1, remaining - e, out);
    }
    buf[pos] = 0;
}

/// Shared layout data for polynomials in `n` variables of order `r`.
#[derive(Debug)]
pub struct Basis {
    n: usize,
    order: usize,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
    /// `(i, j, k)`: monomial `i` times monomial `j` is monomial `k`.
    mul_table: Vec<(u32, u32, u32)>,
    /// Start position of each degree block, plus a final sentinel.
    degree_starts: Vec<usize>,
}

impl Basis {
    fn build(n: usize, order: usize) -> Basis {
        let indices = enumerate_indices(n, order);
        let lookup: HashMap<MultiIndex, usize> = indices
            .iter()
            .enumerate()
            .map(|(k, a)| (a.clone(), k))
            .collect();
        let mut mul_table = Vec::new();
        for (i, a) in indices.iter().enumerate() {
            let da = a.degree() as usize;
            for (j, b) in indices.iter().enumerate() {
                if da + b.degree() as usize > order {
                    // Indices are sorted by degree, nothing further fits.
                    break;
                }
                let sum = MultiIndex(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect());
                mul_table.push((i as u32, j as u32, lookup[&sum] as u32));
            }
        }
        let mut degree_starts = vec![0; order + 2];
        for d in 0..=order {
            degree_starts[d + 1] = monomial_count(n, d);
        }
        Basis {
            n,
            order,
            indices,
            lookup,
            mul_table,
            degree_starts,
        }
    }

    /// Cached basis for `(n, r)`.
    pub fn get(n: usize, order: usize) -> Arc<Basis> {
        type Cache = Mutex<HashMap<(usize, usize), Arc<Basis>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry((n, order))
            .or_insert_with(|| Arc::new(Basis::build(n, order)))
            .clone()
    }

    pub fn vars(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.lookup.get(alpha).copied()
    }

    /// Range of positions holding monomials of exactly degree `d`.
    pub fn degree_range(&self, d: usize) -> std::ops::Range<usize> {
        self.degree_starts[d]..self.degree_starts[d + 1]
    }
}

/// Polynomial in `n` variables truncated at total degree `r`.
#[derive(Clone)]
pub struct TruncatedPolynomial<S> {
    basis: Arc<Basis>,
    coeffs: Vec<S>,
}

impl<S: fmt::Debug> fmt::Debug for TruncatedPolynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TruncatedPolynomial")
            .field("n", &self.basis.n)
            .field("r", &self.basis.order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl<S: PartialEq> PartialEq for TruncatedPolynomial<S> {
    fn eq(&self, other: &Self) -> bool {
        self.basis.n == other.basis.n
            && self.basis.order == other.basis.order
            && self.coeffs == other.coeffs
    }
}

impl<S: Scalar> TruncatedPolynomial<S> {
    pub fn zero(n: usize, r: usize) -> Self {
        let basis = Basis::get(n, r);
        let coeffs = vec![S::zero(); basis.len()];
        TruncatedPolynomial { basis, coeffs }
    }

    pub fn constant(n: usize, r: usize, c: S) -> Self {
        let mut p = Self::zero(n, r);
        p.coeffs[0] = c;
        p
    }

    /// The coordinate function `x_i` (zero when `r == 0`).
    pub fn variable(n: usize, r: usize, i: usize) -> Self {
        assert!(i < n, "variable index {i} out of range for {n} variables");
        let mut p = Self::zero(n, r);
        if r >= 1 {
            p.coeffs[1 + i] = S::one();
        }
        p
    }

    /// `c · x^alpha`, or zero if `alpha` exceeds the order.
    pub fn monomial(n: usize, r: usize, alpha: &MultiIndex, c: S) -> Self {
        let mut p = Self::zero(n, r);
        if let Some(k) = p.basis.position(alpha) {
            p.coeffs[k] = c;
        }
        p
    }

    pub fn from_coeffs(n: usize, r: usize, coeffs: Vec<S>) -> Result<Self> {
        let basis = Basis::get(n, r);
        if coeffs.len() != basis.len() {
            return Err(JetError::Length {
                expected: basis.len(),
                got: coeffs.len(),
            });
        }
        Ok(TruncatedPolynomial { basis, coeffs })
    }

    /// Builds from sparse `(exponents, coefficient)` terms; terms above the
    /// order are dropped.
    pub fn from_terms(n: usize, r: usize, terms: &[(&[u32], f64)]) -> Self {
        let mut p = Self::zero(n, r);
        for (exps, c) in terms {
            assert_eq!(exps.len(), n, "exponent vector has wrong length");
            if let Some(k) = p.basis.position(&MultiIndex(exps.to_vec())) {
                p.coeffs[k] += S::from_f64(*c);
            }
        }
        p
    }

    pub fn vars(&self) -> usize {
        self.basis.vars()
    }

    pub fn order(&self) -> usize {
        self.basis.order()
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [S] {
        &mut self.coeffs
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> S {
        self.basis
            .position(alpha)
            .map_or(S::zero(), |k| self.coeffs[k])
    }

    pub fn constant_term(&self) -> S {
        self.coeffs[0]
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T) -> TruncatedPolynomial<T> {
        TruncatedPolynomial {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    fn assert_compatible(&self, other: &Self) {
        assert!(
            self.vars() == other.vars() && self.order() == other.order(),
            "polynomial shape mismatch: (n={}, r={}) vs (n={}, r={})",
            self.vars(),
            self.order(),
            other.vars(),
            other.order()
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| a + b)
            .collect();
        TruncatedPolynomial {
            basis: self.basis.clone(),
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| a - b)
            .collect();
        TruncatedPolynomial {
            basis: self.basis.clone(),
            coeffs,
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c)
    }

    pub fn scale(&self, c: S) -> Self {
        self.map(|a| a * c)
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Self, c: S) {
        self.assert_compatible(other);
        for (a, &b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * c;
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let mut coeffs = vec![S::zero(); self.coeffs.len()];
        for &(i, j, k) in &self.basis.mul_table {
            let a = self.coeffs[i as usize];
            if a.is_zero() {
                continue;
            }
            coeffs[k as usize] += a * other.coeffs[j as usize];
        }
        TruncatedPolynomial {
            basis: self.basis.clone(),
            coeffs,
        }
    }

    /// Drops every coefficient of degree above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        assert!(
            order <= self.order(),
            "cannot raise the order by truncation"
        );
        let basis = Basis::get(self.vars(), order);
        let coeffs = self.coeffs[..basis.len()].to_vec();
        TruncatedPolynomial { basis, coeffs }
    }

    /// Formal partial derivative in variable `i` (0-based); the result is
    /// stored at order `r - 1` (order 0 when `r == 0`).
    pub fn partial(&self, i: usize) -> Self {
        let n = self.vars();
        assert!(i < n, "variable index {i} out of range for {n} variables");
        let r = self.order();
        let out_order = r.saturating_sub(1);
        let mut out = Self::zero(n, out_order);
        if r == 0 {
            return out;
        }
        for (k, alpha) in self.basis.indices.iter().enumerate() {
            let e = alpha.0[i];
            if e == 0 {
                continue;
            }
            let mut lowered = alpha.0.clone();
            lowered[i] -= 1;
            let pos = out.basis.lookup[&MultiIndex(lowered)];
            out.coeffs[pos] = self.coeffs[k] * S::from_f64(e as f64);
        }
        out
    }

    /// `self^e` for a real exponent, via the binomial series around the
    /// constant term. Requires a strictly positive constant term.
    pub fn pow_real(&self, e: f64) -> Result<Self> {
        let c0 = self.constant_term();
        if c0.re().is_nan() || c0.re() <= 0.0 {
            return Err(JetError::Domain(format!(
                "real power needs a positive constant term, got {:?}",
                c0
            )));
        }
        let n = self.vars();
        let r = self.order();
        // self = c0 (1 + q) with q(0) = 0
        let mut q = self.scale(S::one() / c0);
        q.coeffs[0] = S::zero();
        let mut sum = Self::constant(n, r, S::one());
        let mut term = Self::constant(n, r, S::one());
        let mut binom = 1.0;
        for k in 0..r {
            term = term.mul(&q);
            binom *= (e - k as f64) / (k as f64 + 1.0);
            sum.add_scaled(&term, S::from_f64(binom));
        }
        Ok(sum.scale(c0.powf(e)))
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn recip(&self) -> Result<Self> {
        let c0 = self.constant_term();
        if c0.re() == 0.0 {
            return Err(JetError::Domain(
                "reciprocal of a polynomial with vanishing constant term".into(),
            ));
        }
        let n = self.vars();
        let r = self.order();
        let inv0 = S::one() / c0;
        // 1/(c0 (1 + q)) = inv0 * sum (-q)^k
        let mut mq = self.scale(-inv0);
        mq.coeffs[0] = S::zero();
        let mut sum = Self::constant(n, r, S::one());
        let mut term = Self::constant(n, r, S::one());
        for _ in 0..r {
            term = term.mul(&mq);
            sum = sum.add(&term);
        }
        Ok(sum.scale(inv0))
    }

    /// Largest coefficient magnitude (real parts).
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.re().abs()).fold(0.0, f64::max)
    }
}

/// A tuple of truncated polynomials sharing `n` and `r`: the `r`-jet at 0
/// of a map `R^n -> R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct JetMap<S> {
    n: usize,
    order: usize,
    components: Vec<TruncatedPolynomial<S>>,
}

impl<S: Scalar> JetMap<S> {
    pub fn new(n: usize, order: usize, components: Vec<TruncatedPolynomial<S>>) -> Self {
        for c in &components {
            assert!(
                c.vars() == n && c.order() == order,
                "jet map component has shape (n={}, r={}), expected (n={n}, r={order})",
                c.vars(),
                c.order()
            );
        }
        JetMap {
            n,
            order,
            components,
        }
    }

    /// The jet of the identity map of `R^n`.
    pub fn identity(n: usize, order: usize) -> Self {
        let components = (0..n)
            .map(|i| TruncatedPolynomial::variable(n, order, i))
            .collect();
        JetMap {
            n,
            order,
            components,
        }
    }

    pub fn source_dim(&self) -> usize {
        self.n
    }

    pub fn target_dim(&self) -> usize {
        self.components.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn components(&self) -> &[TruncatedPolynomial<S>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &TruncatedPolynomial<S> {
        &self.components[i]
    }

    pub fn into_components(self) -> Vec<TruncatedPolynomial<S>> {
        self.components
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T + Copy) -> JetMap<T> {
        JetMap {
            n: self.n,
            order: self.order,
            components: self.components.iter().map(|c| c.map(f)).collect(),
        }
    }

    pub fn truncate(&self, order: usize) -> Self {
        JetMap {
            n: self.n,
            order,
            components: self.components.iter().map(|c| c.truncate(order)).collect(),
        }
    }

    pub fn has_zero_constant(&self) -> bool {
        self.components.iter().all(|c| c.constant_term().is_zero())
    }

    /// The order-`r` truncation of `self ∘ inner`.
    ///
    /// `inner` maps `R^n -> R^k` where `k` is the source dimension of
    /// `self`, and must vanish at the origin. Monomials of the outer map
    /// are evaluated through a cache of products of inner components.
    pub fn compose(&self, inner: &JetMap<S>) -> Result<JetMap<S>> {
        if inner.target_dim() != self.n {
            return Err(JetError::Config(format!(
                "composition needs inner target dimension {}, got {}",
                self.n,
                inner.target_dim()
            )));
        }
        if inner.order != self.order {
            return Err(JetError::Config(format!(
                "composition order mismatch: outer {}, inner {}",
                self.order, inner.order
            )));
        }
        if !inner.has_zero_constant() {
            return Err(JetError::Domain(
                "inner map of a jet composition must vanish at the origin".into(),
            ));
        }
        let n = inner.n;
        let r = self.order;
        let outer_basis = Basis::get(self.n, r);
        // monomials[k] = inner^(outer_basis.indices[k])
        let mut monomials: Vec<TruncatedPolynomial<S>> = Vec::with_capacity(outer_basis.len());
        monomials.push(TruncatedPolynomial::constant(n, r, S::one()));
        for beta in outer_basis.indices().iter().skip(1) {
            let j = beta.0.iter().position(|&e| e > 0).expect("nonzero index");
            let mut lower = beta.0.clone();
            lower[j] -= 1;
            let prev = outer_basis.lookup[&MultiIndex(lower)];
            let next = monomials[prev].mul(&inner.components[j]);
            monomials.push(next);
        }
        let components = self
            .components
            .iter()
            .map(|outer| {
                let mut acc = TruncatedPolynomial::zero(n, r);
                for (c, mono) in outer.coeffs.iter().zip(&monomials) {
                    if !c.is_zero() {
                        acc.add_scaled(mono, *c);
                    }
                }
                acc
            })
            .collect();
        Ok(JetMap {
            n,
            order: r,
            components,
        })
    }
}

/// Dimension of the space of `r`-jets at 0 of maps into a `d`-dimensional
/// manifold: `d · C(n+r, n)`.
pub fn fiber_dimension(n: usize, r: usize, d: usize) -> usize {
    d * monomial_count(n, r)
}
