//! Polynomial differential operators in n variables over Q(zeta_N), with the
//! finite-order diagonal group action and twisted commutators.
//!
//! Operators are kept in normal order (all position variables to the left of
//! all derivatives). Position exponents may be negative: the same Leibniz
//! calculus covers Laurent coefficients, which the geometry module needs for
//! chart changes and the orbifold module for operators like (1/z) d.

use crate::mat::Mat;
use crate::scalars::{rat_int, Cyclotomic, Rat};
use crate::CoreError;
use num::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// A normal-ordered monomial y^a d^b.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial {
    pub pos: Vec<i64>,
    pub der: Vec<u32>,
}

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial {
            pos: vec![0; n],
            der: vec![0; n],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.pos.iter().all(|&a| a == 0) && self.der.iter().all(|&b| b == 0)
    }

    /// Total degree: |a| + |b| (absolute values on the Laurent side).
    pub fn degree(&self) -> u64 {
        self.pos.iter().map(|a| a.unsigned_abs()).sum::<u64>()
            + self.der.iter().map(|&b| b as u64).sum::<u64>()
    }

    /// Euler weight a - b per variable; preserved by composition and by the
    /// diagonal action.
    pub fn weight(&self) -> Vec<i64> {
        self.pos
            .iter()
            .zip(self.der.iter())
            .map(|(&a, &b)| a - b as i64)
            .collect()
    }
}

/// Finite-order diagonal group element: eigenvalues on the coordinates plus a
/// fiber action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalAction {
    pub lambdas: Vec<Cyclotomic>,
    pub fiber: Mat,
    pub order: u32,
}

impl DiagonalAction {
    pub fn new(lambdas: Vec<Cyclotomic>, fiber: Mat, order: u32) -> Result<Self, CoreError> {
        for l in &lambdas {
            let o = l
                .root_of_unity_order(order)
                .ok_or_else(|| CoreError::Invalid("coordinate eigenvalue is not a root of unity of the stated order".into()))?;
            if order % o != 0 {
                return Err(CoreError::Invalid("eigenvalue order does not divide the group element order".into()));
            }
        }
        if fiber.pow(order as u32) != Mat::identity(fiber.nrows()) {
            return Err(CoreError::Invalid("fiber^order is not the identity".into()));
        }
        Ok(DiagonalAction { lambdas, fiber, order })
    }

    pub fn identity(n: usize, rank: usize) -> Self {
        DiagonalAction {
            lambdas: vec![Cyclotomic::one(); n],
            fiber: Mat::identity(rank),
            order: 1,
        }
    }

    /// Scalar action with the given eigenvalues and trivial fiber.
    pub fn scalar(lambdas: Vec<Cyclotomic>, order: u32) -> Result<Self, CoreError> {
        Self::new(lambdas, Mat::identity(1), order)
    }

    pub fn nvars(&self) -> usize {
        self.lambdas.len()
    }

    pub fn inverse(&self) -> Self {
        DiagonalAction {
            lambdas: self.lambdas.iter().map(|l| l.inv().expect("root of unity")).collect(),
            fiber: self.fiber.inverse().expect("finite order fiber"),
            order: self.order,
        }
    }

    /// Real codimension of the fixed subspace: 2 #{i : lambda_i != 1}.
    pub fn codim(&self) -> usize {
        2 * self.lambdas.iter().filter(|l| !l.is_one()).count()
    }

    pub fn is_identity_on_coords(&self) -> bool {
        self.lambdas.iter().all(|l| l.is_one())
    }

    pub fn lambda_pow(&self, i: usize, e: i64) -> Cyclotomic {
        let l = if e >= 0 {
            self.lambdas[i].clone()
        } else {
            self.lambdas[i].inv().expect("root of unity")
        };
        l.pow(e.unsigned_abs() as u32)
    }
}

/// Normal-ordered polynomial (or Laurent) differential operator with matrix
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalDiffOp {
    nvars: usize,
    rank: usize,
    terms: BTreeMap<Monomial, Mat>,
}

/// Falling factorial c (c-1) ... (c-k+1) as an exact rational.
fn falling(c: i64, k: u32) -> Rat {
    let mut acc = Rat::one();
    for j in 0..k as i64 {
        acc *= rat_int(c - j);
    }
    acc
}

fn binom(n: u32, k: u32) -> Rat {
    let mut acc = Rat::one();
    for j in 0..k {
        acc *= rat_int((n - j) as i64);
        acc /= rat_int((j + 1) as i64);
    }
    acc
}

impl FormalDiffOp {
    pub fn zero(nvars: usize, rank: usize) -> Self {
        FormalDiffOp {
            nvars,
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(nvars: usize, rank: usize) -> Self {
        Self::monomial(nvars, rank, Monomial::one(nvars), Mat::identity(rank))
    }

    pub fn monomial(nvars: usize, rank: usize, m: Monomial, coeff: Mat) -> Self {
        assert_eq!(m.pos.len(), nvars);
        assert_eq!(coeff.nrows(), rank);
        let mut op = Self::zero(nvars, rank);
        op.add_term(m, coeff);
        op
    }

    /// Scalar monomial c y^a d^b.
    pub fn scalar_monomial(nvars: usize, pos: Vec<i64>, der: Vec<u32>, c: Cyclotomic) -> Self {
        Self::monomial(nvars, 1, Monomial { pos, der }, Mat::scalar(1, c))
    }

    /// The coordinate operator y_i.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut pos = vec![0; nvars];
        pos[i] = 1;
        Self::scalar_monomial(nvars, pos, vec![0; nvars], Cyclotomic::one())
    }

    /// The derivative operator d_i.
    pub fn deriv(nvars: usize, i: usize) -> Self {
        let mut der = vec![0; nvars];
        der[i] = 1;
        Self::scalar_monomial(nvars, vec![0; nvars], der, Cyclotomic::one())
    }

    pub fn constant(nvars: usize, c: Cyclotomic) -> Self {
        Self::scalar_monomial(nvars, vec![0; nvars], vec![0; nvars], c)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Mat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Mat {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| Mat::zeros(self.rank, self.rank))
    }

    fn add_term(&mut self, m: Monomial, coeff: Mat) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let s = &*existing + &coeff;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(m, coeff);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        assert_eq!(self.rank, other.rank);
        let mut out = self.clone();
        for (m, c) in other.terms.iter() {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Cyclotomic::from_int(-1)))
    }

    pub fn scale(&self, c: &Cyclotomic) -> Self {
        let mut out = Self::zero(self.nvars, self.rank);
        for (m, coeff) in self.terms.iter() {
            out.add_term(m.clone(), coeff.scale(c));
        }
        out
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        self.scale(&Cyclotomic::from_rat(r.clone()))
    }

    /// Derivative order.
    pub fn order(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.der.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Total degree (position + derivative).
    pub fn degree(&self) -> u64 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn has_negative_powers(&self) -> bool {
        self.terms.keys().any(|m| m.pos.iter().any(|&a| a < 0))
    }

    /// Normal-ordered product self . other via iterated Leibniz rewriting.
    pub fn compose(&self, other: &Self) -> Result<Self, CoreError> {
        if self.nvars != other.nvars || self.rank != other.rank {
            return Err(CoreError::DimensionMismatch);
        }
        let n = self.nvars;
        let mut out = Self::zero(n, self.rank);
        for (m1, c1) in self.terms.iter() {
            for (m2, c2) in other.terms.iter() {
                let coeff = c1 * c2;
                // d^b y^c = sum_k binom(b,k) falling(c,k) y^{c-k} d^{b-k}
                let mut stack: Vec<(usize, Rat, Vec<i64>, Vec<u32>)> =
                    vec![(0, Rat::one(), Vec::new(), Vec::new())];
                while let Some((i, factor, pos_acc, der_acc)) = stack.pop() {
                    if i == n {
                        let m = Monomial {
                            pos: (0..n).map(|j| m1.pos[j] + pos_acc[j]).collect(),
                            der: (0..n).map(|j| m2.der[j] + der_acc[j]).collect(),
                        };
                        out.add_term(m, coeff.scale(&Cyclotomic::from_rat(factor)));
                        continue;
                    }
                    let b = m1.der[i];
                    let c = m2.pos[i];
                    for k in 0..=b {
                        let f = binom(b, k) * falling(c, k);
                        if f.is_zero() {
                            continue;
                        }
                        let mut pos2 = pos_acc.clone();
                        let mut der2 = der_acc.clone();
                        pos2.push(c - k as i64);
                        der2.push(b - k);
                        stack.push((i + 1, factor.clone() * f, pos2, der2));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Action of the diagonal group element on operators: the monomial
    /// y^a d^b picks up the weight prod_i lambda_i^{b_i - a_i} and the
    /// coefficient is conjugated by the fiber action.
    pub fn gamma_act(&self, g: &DiagonalAction) -> Self {
        assert_eq!(g.nvars(), self.nvars);
        let fiber_inv = g.fiber.inverse().expect("finite order fiber");
        let mut out = Self::zero(self.nvars, self.rank);
        for (m, c) in self.terms.iter() {
            let mut w = Cyclotomic::one();
            for i in 0..self.nvars {
                w = &w * &g.lambda_pow(i, m.der[i] as i64 - m.pos[i]);
            }
            let conj = &(&g.fiber * c) * &fiber_inv;
            out.add_term(m.clone(), conj.scale(&w));
        }
        out
    }

    /// The gamma-commutator A . B - B . gamma(A). Its span equals the image
    /// of the twisted Hochschild boundary on 1-chains: AB - gamma^{-1}(B)A is
    /// minus the commutator of (gamma^{-1}(B), A).
    pub fn twisted_commutator(&self, other: &Self, g: &DiagonalAction) -> Result<Self, CoreError> {
        let lhs = self.compose(other)?;
        let rhs = other.compose(&self.gamma_act(g))?;
        Ok(lhs.sub(&rhs))
    }

    /// Exact action on a polynomial vector.
    pub fn apply(&self, p: &PolyVec) -> Result<PolyVec, CoreError> {
        if p.nvars != self.nvars || p.rank != self.rank {
            return Err(CoreError::DimensionMismatch);
        }
        let n = self.nvars;
        let mut out = PolyVec::zero(n, self.rank);
        for (m, coeff) in self.terms.iter() {
            for (e, v) in p.terms.iter() {
                let mut factor = Rat::one();
                let mut shifted = vec![0i64; n];
                for i in 0..n {
                    factor *= falling(e[i], m.der[i]);
                    shifted[i] = e[i] - m.der[i] as i64 + m.pos[i];
                }
                if factor.is_zero() {
                    continue;
                }
                let mut col = Vec::with_capacity(self.rank);
                for r in 0..self.rank {
                    let mut acc = Cyclotomic::zero();
                    for k in 0..self.rank {
                        acc = &acc + &(coeff.get(r, k) * &v[k]);
                    }
                    col.push(acc.scale(&factor));
                }
                out.add_term(shifted, col);
            }
        }
        Ok(out)
    }

    /// Tensor with an operator in disjoint variables: self acts on the first
    /// block, other on the second.
    pub fn tensor(&self, other: &Self) -> Self {
        assert_eq!(self.rank, 1, "tensor products are supported for scalar operators");
        assert_eq!(other.rank, 1);
        let n = self.nvars + other.nvars;
        let mut out = Self::zero(n, 1);
        for (m1, c1) in self.terms.iter() {
            for (m2, c2) in other.terms.iter() {
                let m = Monomial {
                    pos: m1.pos.iter().chain(m2.pos.iter()).cloned().collect(),
                    der: m1.der.iter().chain(m2.der.iter()).cloned().collect(),
                };
                out.add_term(m, c1 * c2);
            }
        }
        out
    }
}

/// Laurent polynomial vector over Q(zeta_N); the oracle backend for `apply`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyVec {
    nvars: usize,
    rank: usize,
    terms: BTreeMap<Vec<i64>, Vec<Cyclotomic>>,
}

impl PolyVec {
    pub fn zero(nvars: usize, rank: usize) -> Self {
        PolyVec {
            nvars,
            rank,
            terms: BTreeMap::new(),
        }
    }

    /// Scalar monomial c y^e.
    pub fn monomial(nvars: usize, e: Vec<i64>, c: Cyclotomic) -> Self {
        let mut p = Self::zero(nvars, 1);
        p.add_term(e, vec![c]);
        p
    }

    pub fn add_term(&mut self, e: Vec<i64>, v: Vec<Cyclotomic>) {
        assert_eq!(e.len(), self.nvars);
        assert_eq!(v.len(), self.rank);
        if v.iter().all(|c| c.is_zero()) {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(existing) => {
                for (x, y) in existing.iter_mut().zip(v.iter()) {
                    *x = &*x + y;
                }
                if existing.iter().all(|c| c.is_zero()) {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, v);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Vec<Cyclotomic>)> {
        self.terms.iter()
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, m: &Monomial, nvars: usize) -> fmt::Result {
    let mut wrote = false;
    for i in 0..nvars {
        if m.pos[i] != 0 {
            if wrote {
                write!(f, " ")?;
            }
            if nvars == 1 {
                write!(f, "y")?;
            } else {
                write!(f, "y{}", i + 1)?;
            }
            if m.pos[i] != 1 {
                write!(f, "^{}", m.pos[i])?;
            }
            wrote = true;
        }
    }
    for i in 0..nvars {
        if m.der[i] != 0 {
            if wrote {
                write!(f, " ")?;
            }
            if nvars == 1 {
                write!(f, "d")?;
            } else {
                write!(f, "d{}", i + 1)?;
            }
            if m.der[i] != 1 {
                write!(f, "^{}", m.der[i])?;
            }
            wrote = true;
        }
    }
    if !wrote {
        write!(f, "1")?;
    }
    Ok(())
}

impl fmt::Display for FormalDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if self.rank == 1 {
                let s = c.get(0, 0);
                if m.is_identity() {
                    write!(f, "{}", s)?;
                    continue;
                }
                if !s.is_one() {
                    if s.as_rational().is_some() {
                        write!(f, "{} ", s)?;
                    } else {
                        write!(f, "({}) ", s)?;
                    }
                }
            } else {
                write!(f, "[{}] ", c.to_string().replace('\n', "; "))?;
            }
            write_monomial(f, m, self.nvars)?;
        }
        Ok(())
    }
}
