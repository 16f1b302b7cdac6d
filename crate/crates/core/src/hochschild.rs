//! Normalized gamma-twisted Hochschild complex of the polynomial
//! differential-operator algebra.
//!
//! Chains are finite combinations of elementary tensors of scalar operators;
//! tensors with an identity entry in a slot >= 1 are identified with zero
//! (normalized complex). The boundary twists the last face by gamma^{-1},
//! the unique choice under which the gamma-trace is a 0-cocycle for the
//! action convention of the weyl module.

use crate::gtrace::{det_factor, gamma_trace};
use crate::linalg::{self, SolveOutcome};
use crate::scalars::Cyclotomic;
use crate::weyl::{DiagonalAction, FormalDiffOp, Monomial};
use crate::CoreError;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedChain {
    nvars: usize,
    degree: usize,
    terms: BTreeMap<Vec<Monomial>, Cyclotomic>,
}

impl TwistedChain {
    pub fn zero(nvars: usize, degree: usize) -> Self {
        TwistedChain {
            nvars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// The elementary tensor A_0 x ... x A_k, expanded over the monomial
    /// tensor basis. Operators must be scalar (rank 1).
    pub fn from_tensor(slots: &[FormalDiffOp]) -> Result<Self, CoreError> {
        if slots.is_empty() {
            return Err(CoreError::Invalid("empty tensor".into()));
        }
        let nvars = slots[0].nvars();
        for s in slots {
            if s.nvars() != nvars {
                return Err(CoreError::DimensionMismatch);
            }
            if s.rank() != 1 {
                return Err(CoreError::Invalid("chains take scalar operators".into()));
            }
        }
        let mut out = Self::zero(nvars, slots.len() - 1);
        let mut stack: Vec<(usize, Vec<Monomial>, Cyclotomic)> =
            vec![(0, Vec::new(), Cyclotomic::one())];
        while let Some((i, tuple, coeff)) = stack.pop() {
            if i == slots.len() {
                out.add_term(tuple, coeff);
                continue;
            }
            for (m, c) in slots[i].terms() {
                let mut t = tuple.clone();
                t.push(m.clone());
                stack.push((i + 1, t, &coeff * c.get(0, 0)));
            }
        }
        Ok(out)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Monomial>, &Cyclotomic)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, tuple: Vec<Monomial>, coeff: Cyclotomic) {
        debug_assert_eq!(tuple.len(), self.degree + 1);
        if coeff.is_zero() {
            return;
        }
        // normalized complex: degenerate tensors vanish
        if tuple.iter().skip(1).any(|m| m.is_identity()) {
            return;
        }
        match self.terms.get_mut(&tuple) {
            Some(c) => {
                let s = &*c + &coeff;
                if s.is_zero() {
                    self.terms.remove(&tuple);
                } else {
                    *c = s;
                }
            }
            None => {
                self.terms.insert(tuple, coeff);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree);
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (t, c) in other.terms.iter() {
            out.add_term(t.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Cyclotomic::from_int(-1)))
    }

    pub fn scale(&self, c: &Cyclotomic) -> Self {
        let mut out = Self::zero(self.nvars, self.degree);
        for (t, x) in self.terms.iter() {
            out.add_term(t.clone(), x * c);
        }
        out
    }

    /// A degree-0 chain is an operator.
    pub fn to_operator(&self) -> Result<FormalDiffOp, CoreError> {
        if self.degree != 0 {
            return Err(CoreError::Invalid("to_operator needs a degree-0 chain".into()));
        }
        let mut op = FormalDiffOp::zero(self.nvars, 1);
        for (t, c) in self.terms.iter() {
            op = op.add(&FormalDiffOp::scalar_monomial(
                self.nvars,
                t[0].pos.clone(),
                t[0].der.clone(),
                c.clone(),
            ));
        }
        Ok(op)
    }

    /// Elementwise sum of monomial Euler weights; preserved by the boundary.
    fn term_weight(tuple: &[Monomial], nvars: usize) -> Vec<i64> {
        let mut w = vec![0i64; nvars];
        for m in tuple {
            for (acc, x) in w.iter_mut().zip(m.weight()) {
                *acc += x;
            }
        }
        w
    }
}

fn mono_op(nvars: usize, m: &Monomial) -> FormalDiffOp {
    FormalDiffOp::scalar_monomial(nvars, m.pos.clone(), m.der.clone(), Cyclotomic::one())
}

/// b^gamma: inner faces compose adjacent slots, the last face wraps A_k
/// around through gamma^{-1}: (-1)^k gamma^{-1}(A_k) A_0 x A_1 x ... x A_{k-1}.
pub fn boundary(c: &TwistedChain, g: &DiagonalAction) -> Result<TwistedChain, CoreError> {
    if c.degree == 0 {
        return Err(CoreError::DegreeZeroBoundary);
    }
    if g.nvars() != c.nvars {
        return Err(CoreError::DimensionMismatch);
    }
    if g.fiber.nrows() != 1 {
        return Err(CoreError::Invalid("chains pair with scalar fiber actions".into()));
    }
    let k = c.degree;
    let n = c.nvars;
    let mut out = TwistedChain::zero(n, k - 1);
    for (tuple, coeff) in c.terms.iter() {
        for i in 0..k {
            let sign = if i % 2 == 0 {
                coeff.clone()
            } else {
                &Cyclotomic::zero() - coeff
            };
            let prod = mono_op(n, &tuple[i]).compose(&mono_op(n, &tuple[i + 1]))?;
            for (m, mc) in prod.terms() {
                let mut t: Vec<Monomial> = Vec::with_capacity(k);
                t.extend_from_slice(&tuple[..i]);
                t.push(m.clone());
                t.extend_from_slice(&tuple[i + 2..]);
                out.add_term(t, &sign * mc.get(0, 0));
            }
        }
        let sign = if k % 2 == 0 {
            coeff.clone()
        } else {
            &Cyclotomic::zero() - coeff
        };
        let wrapped = mono_op(n, &tuple[k])
            .gamma_act(&g.inverse())
            .compose(&mono_op(n, &tuple[0]))?;
        for (m, mc) in wrapped.terms() {
            let mut t: Vec<Monomial> = Vec::with_capacity(k);
            t.push(m.clone());
            t.extend_from_slice(&tuple[1..k]);
            out.add_term(t, &sign * mc.get(0, 0));
        }
    }
    Ok(out)
}

fn permutations_with_sign(k: usize) -> Vec<(Vec<usize>, i32)> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..k).collect();
    fn rec(perm: &mut Vec<usize>, i: usize, out: &mut Vec<(Vec<usize>, i32)>) {
        let k = perm.len();
        if i == k {
            let mut inv = 0;
            for a in 0..k {
                for b in a + 1..k {
                    if perm[a] > perm[b] {
                        inv += 1;
                    }
                }
            }
            out.push((perm.clone(), if inv % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for j in i..k {
            perm.swap(i, j);
            rec(perm, i + 1, out);
            perm.swap(i, j);
        }
    }
    rec(&mut perm, 0, &mut out);
    out
}

/// The antisymmetrized generator cycle over the gamma-fixed coordinates:
/// sum over permutations of sign(eps) 1 x u_{eps(1)} x ... with the slot list
/// (d_i, y_i) per fixed direction i. When every direction is twisted the
/// cycle is the degree-0 chain 1.
pub fn generator_cycle(n: usize, g: &DiagonalAction) -> TwistedChain {
    assert_eq!(g.nvars(), n);
    let fixed: Vec<usize> = (0..n).filter(|&i| g.lambdas[i].is_one()).collect();
    let mut slots: Vec<Monomial> = Vec::with_capacity(2 * fixed.len());
    for &i in &fixed {
        let mut der = vec![0u32; n];
        der[i] = 1;
        slots.push(Monomial { pos: vec![0; n], der });
        let mut pos = vec![0i64; n];
        pos[i] = 1;
        slots.push(Monomial { pos, der: vec![0; n] });
    }
    let k = slots.len();
    let mut out = TwistedChain::zero(n, k);
    if k == 0 {
        out.add_term(vec![Monomial::one(n)], Cyclotomic::one());
        return out;
    }
    for (perm, sign) in permutations_with_sign(k) {
        let mut tuple = Vec::with_capacity(k + 1);
        tuple.push(Monomial::one(n));
        for &j in &perm {
            tuple.push(slots[j].clone());
        }
        out.add_term(tuple, Cyclotomic::from_int(sign as i64));
    }
    out
}

/// All monomials with nonnegative exponents and total degree <= bound.
fn monomials_up_to(nvars: usize, bound: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; 2 * nvars];
    fn rec(nvars: usize, bound: u32, i: usize, used: u32, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == 2 * nvars {
            out.push(Monomial {
                pos: exps[..nvars].iter().map(|&e| e as i64).collect(),
                der: exps[nvars..].to_vec(),
            });
            return;
        }
        for e in 0..=(bound - used) {
            exps[i] = e;
            rec(nvars, bound, i + 1, used + e, exps, out);
        }
        exps[i] = 0;
    }
    rec(nvars, bound, 0, 0, &mut exps, &mut out);
    out
}

/// Solves target = lambda* . 1 + span of twisted commutators of monomial
/// pairs within the degree bound; returns lambda* (always 0 when `with_unit`
/// is false). None means the truncated system is inconsistent.
fn commutator_membership(
    target: &FormalDiffOp,
    g: &DiagonalAction,
    degree_bound: u32,
    with_unit: bool,
) -> Result<Option<Cyclotomic>, CoreError> {
    let n = target.nvars();
    // weight components of the target
    let mut components: BTreeMap<Vec<i64>, Vec<(Monomial, Cyclotomic)>> = BTreeMap::new();
    for (m, c) in target.terms() {
        components
            .entry(m.weight())
            .or_default()
            .push((m.clone(), c.get(0, 0).clone()));
    }
    if with_unit {
        components.entry(vec![0; n]).or_default();
    }
    // commutators of monomial pairs, grouped by their pure weight
    let monos = monomials_up_to(n, degree_bound);
    let mut span: BTreeMap<Vec<i64>, Vec<FormalDiffOp>> = BTreeMap::new();
    for m1 in &monos {
        for m2 in &monos {
            if m1.degree() + m2.degree() > degree_bound as u64 {
                continue;
            }
            let w: Vec<i64> = m1
                .weight()
                .iter()
                .zip(m2.weight())
                .map(|(a, b)| a + b)
                .collect();
            if !components.contains_key(&w) {
                continue;
            }
            let k = mono_op(n, m1).twisted_commutator(&mono_op(n, m2), g)?;
            if !k.is_zero() {
                span.entry(w).or_default().push(k);
            }
        }
    }
    let mut lambda_star = Cyclotomic::zero();
    for (w, targets) in components.iter() {
        let unit_here = with_unit && w.iter().all(|&x| x == 0);
        let empty = Vec::new();
        let cols = span.get(w).unwrap_or(&empty);
        if targets.is_empty() && !unit_here {
            continue;
        }
        // row index: all monomials in the supports
        let mut row_index: BTreeMap<Monomial, usize> = BTreeMap::new();
        for k in cols {
            for (m, _) in k.terms() {
                let next = row_index.len();
                row_index.entry(m.clone()).or_insert(next);
            }
        }
        for (m, _) in targets {
            let next = row_index.len();
            row_index.entry(m.clone()).or_insert(next);
        }
        if unit_here {
            let next = row_index.len();
            row_index.entry(Monomial::one(n)).or_insert(next);
        }
        let nrows = row_index.len();
        let ncols = cols.len() + if unit_here { 1 } else { 0 };
        let mut rows = vec![vec![Cyclotomic::zero(); ncols]; nrows];
        for (j, k) in cols.iter().enumerate() {
            for (m, c) in k.terms() {
                rows[row_index[m]][j] = c.get(0, 0).clone();
            }
        }
        if unit_here {
            rows[row_index[&Monomial::one(n)]][ncols - 1] = Cyclotomic::one();
        }
        let mut rhs = vec![Cyclotomic::zero(); nrows];
        for (m, c) in targets {
            rhs[row_index[m]] = c.clone();
        }
        match linalg::solve(&rows, &rhs) {
            SolveOutcome::Solution(x) => {
                if unit_here {
                    lambda_star = x[ncols - 1].clone();
                }
            }
            SolveOutcome::Inconsistent(_) => return Ok(None),
        }
    }
    Ok(Some(lambda_star))
}

/// The class of A in HH_0 = D / span(twisted commutators) relative to the
/// basis class [1], for a fully twisted gamma (isolated case).
pub fn hh0_class(
    a: &FormalDiffOp,
    g: &DiagonalAction,
    degree_bound: u32,
) -> Result<Cyclotomic, CoreError> {
    if a.rank() != 1 {
        return Err(CoreError::Invalid("hh0_class takes scalar operators".into()));
    }
    if a.has_negative_powers() {
        return Err(CoreError::Invalid("hh0_class takes polynomial operators".into()));
    }
    if g.fiber.nrows() != 1 {
        return Err(CoreError::Invalid("hh0_class pairs with scalar fiber actions".into()));
    }
    det_factor(g)?; // all lambda_i != 1
    if a.degree() > degree_bound as u64 {
        return Err(CoreError::Invalid("operator exceeds the degree bound".into()));
    }
    // lambda* exists: A - Tr(A)/Tr(1) . 1 is killed by the trace, and the
    // membership solve below reconstructs it independently.
    match commutator_membership(a, g, degree_bound, true)? {
        Some(l) => Ok(l),
        None => Err(CoreError::RaiseDegreeBound),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundaryResult {
    Boundary,
    /// Witnessed by a functional that kills all boundaries but not the chain.
    NotBoundary,
    /// The truncated solve failed and no obstruction applies at this bound.
    Inconclusive,
}

/// All length-`len` monomial tuples with prescribed total weight, total
/// degree <= bound, slots >= 1 non-identity.
fn tuples_of_weight(
    nvars: usize,
    len: usize,
    bound: u32,
    weight: &[i64],
) -> Vec<Vec<Monomial>> {
    let monos = monomials_up_to(nvars, bound);
    let mut out = Vec::new();
    let mut cur: Vec<Monomial> = Vec::new();
    fn rec(
        monos: &[Monomial],
        len: usize,
        bound: u32,
        weight: &[i64],
        cur: &mut Vec<Monomial>,
        used: u64,
        out: &mut Vec<Vec<Monomial>>,
    ) {
        if cur.len() == len {
            if TwistedChain::term_weight(cur, weight.len()) == weight {
                out.push(cur.clone());
            }
            return;
        }
        for m in monos {
            if cur.len() >= 1 && m.is_identity() {
                continue;
            }
            if used + m.degree() > bound as u64 {
                continue;
            }
            cur.push(m.clone());
            rec(monos, len, bound, weight, cur, used + m.degree(), out);
            cur.pop();
        }
    }
    rec(&monos, len, bound, weight, &mut cur, 0, &mut out);
    out
}

/// Decides whether c is a boundary within the truncation. A nonzero pairing
/// with a boundary-killing functional (the gamma-trace in degree 0, the
/// resolution-comparison functional in degree 2) certifies NotBoundary; a
/// successful truncated solve certifies Boundary; otherwise Inconclusive.
pub fn is_boundary(
    c: &TwistedChain,
    g: &DiagonalAction,
    degree_bound: u32,
) -> Result<BoundaryResult, CoreError> {
    if g.nvars() != c.nvars {
        return Err(CoreError::DimensionMismatch);
    }
    if g.fiber.nrows() != 1 {
        return Err(CoreError::Invalid("chains pair with scalar fiber actions".into()));
    }
    if c.is_zero() {
        return Ok(BoundaryResult::Boundary);
    }
    if c.degree == 0 && g.lambdas.iter().all(|l| !l.is_one()) {
        let op = c.to_operator()?;
        if !gamma_trace(&op, g)?.value.is_zero() {
            return Ok(BoundaryResult::NotBoundary);
        }
    }
    if c.degree == 2 && c.nvars == 1 && g.is_identity_on_coords() {
        if !koszul::tau(c)?.is_zero() {
            return Ok(BoundaryResult::NotBoundary);
        }
    }
    // truncated solve b(x) = c, weight by weight
    let mut components: BTreeMap<Vec<i64>, Vec<(Vec<Monomial>, Cyclotomic)>> = BTreeMap::new();
    for (t, coeff) in c.terms.iter() {
        components
            .entry(TwistedChain::term_weight(t, c.nvars))
            .or_default()
            .push((t.clone(), coeff.clone()));
    }
    let mut witness = TwistedChain::zero(c.nvars, c.degree + 1);
    for (w, targets) in components.iter() {
        let cands = tuples_of_weight(c.nvars, c.degree + 2, degree_bound, w);
        let mut images: Vec<TwistedChain> = Vec::new();
        let mut kept: Vec<Vec<Monomial>> = Vec::new();
        for t in cands {
            let mut x = TwistedChain::zero(c.nvars, c.degree + 1);
            x.add_term(t.clone(), Cyclotomic::one());
            if x.is_zero() {
                continue;
            }
            let img = boundary(&x, g)?;
            if !img.is_zero() {
                images.push(img);
                kept.push(t);
            }
        }
        let mut row_index: BTreeMap<Vec<Monomial>, usize> = BTreeMap::new();
        for img in &images {
            for (t, _) in img.terms.iter() {
                let next = row_index.len();
                row_index.entry(t.clone()).or_insert(next);
            }
        }
        for (t, _) in targets {
            let next = row_index.len();
            row_index.entry(t.clone()).or_insert(next);
        }
        let nrows = row_index.len();
        let mut rows = vec![vec![Cyclotomic::zero(); images.len()]; nrows];
        for (j, img) in images.iter().enumerate() {
            for (t, coeff) in img.terms.iter() {
                rows[row_index[t]][j] = coeff.clone();
            }
        }
        let mut rhs = vec![Cyclotomic::zero(); nrows];
        for (t, coeff) in targets {
            rhs[row_index[t]] = coeff.clone();
        }
        match linalg::solve(&rows, &rhs) {
            SolveOutcome::Solution(x) => {
                for (j, t) in kept.iter().enumerate() {
                    witness.add_term(t.clone(), x[j].clone());
                }
            }
            SolveOutcome::Inconsistent(_) => return Ok(BoundaryResult::Inconclusive),
        }
    }
    if &boundary(&witness, g)? == c {
        Ok(BoundaryResult::Boundary)
    } else {
        Ok(BoundaryResult::Inconclusive)
    }
}

/// Degree-2 boundary-killing functional for the untwisted one-variable
/// algebra, built by comparison with the Koszul resolution. The dual pairing
/// with the generator cycle is -1, so a nonzero value certifies a chain is
/// not a boundary at any truncation.
pub mod koszul {
    use super::*;

    /// Element of A x V x A over the monomial basis; the middle slot is the
    /// resolution generator X (position) or Xi (derivative).
    type Ava = BTreeMap<(Monomial, u8, Monomial), Cyclotomic>;
    /// Element of A x L2 x A; the middle slot X wedge Xi is one-dimensional.
    type Ala = BTreeMap<(Monomial, Monomial), Cyclotomic>;

    const X: u8 = 0;
    const XI: u8 = 1;

    fn add_to(map: &mut Ava, key: (Monomial, u8, Monomial), c: Cyclotomic) {
        if c.is_zero() {
            return;
        }
        match map.get_mut(&key) {
            Some(v) => {
                let s = &*v + &c;
                if s.is_zero() {
                    map.remove(&key);
                } else {
                    *v = s;
                }
            }
            None => {
                map.insert(key, c);
            }
        }
    }

    fn mono1(pos: i64, der: u32) -> Monomial {
        Monomial {
            pos: vec![pos],
            der: vec![der],
        }
    }

    /// Comparison map in degree 1 on the monomial x^a xi^b:
    /// sum_{i<a} x^i (X) x^{a-1-i} xi^b + sum_{j<b} x^a xi^j (Xi) xi^{b-1-j}.
    fn phi1_monomial(m: &Monomial, c: &Cyclotomic, out: &mut Ava) {
        let a = m.pos[0];
        let b = m.der[0];
        debug_assert!(a >= 0);
        for i in 0..a {
            add_to(out, (mono1(i, 0), X, mono1(a - 1 - i, b)), c.clone());
        }
        for j in 0..b {
            add_to(out, (mono1(a, j), XI, mono1(0, b - 1 - j)), c.clone());
        }
    }

    fn phi1_op(op: &FormalDiffOp) -> Ava {
        let mut out = Ava::new();
        for (m, c) in op.terms() {
            phi1_monomial(m, c.get(0, 0), &mut out);
        }
        out
    }

    /// Left action u -> p u on the outer slots (operator composition).
    fn left_mul(p: &Monomial, t: &Ava) -> Ava {
        let mut out = Ava::new();
        let pop = mono_op(1, p);
        for ((u, s, v), c) in t.iter() {
            let prod = pop.compose(&mono_op(1, u)).expect("same algebra");
            for (m, mc) in prod.terms() {
                add_to(&mut out, (m.clone(), *s, v.clone()), c * mc.get(0, 0));
            }
        }
        out
    }

    fn right_mul(t: &Ava, p: &Monomial) -> Ava {
        let mut out = Ava::new();
        let pop = mono_op(1, p);
        for ((u, s, v), c) in t.iter() {
            let prod = mono_op(1, v).compose(&pop).expect("same algebra");
            for (m, mc) in prod.terms() {
                add_to(&mut out, (u.clone(), *s, m.clone()), c * mc.get(0, 0));
            }
        }
        out
    }

    fn sub_ava(a: &Ava, b: &Ava) -> Ava {
        let mut out = a.clone();
        for (k, c) in b.iter() {
            add_to(&mut out, k.clone(), &Cyclotomic::zero() - c);
        }
        out
    }

    /// d2(u (X^Xi) v) = ux (Xi) v - u (Xi) xv - u xi (X) v + u (X) xi v,
    /// products expanded in normal order.
    fn d2_basis(u: &Monomial, v: &Monomial) -> Ava {
        let mut out = Ava::new();
        let uop = mono_op(1, u);
        let vop = mono_op(1, v);
        let x = mono_op(1, &mono1(1, 0));
        let xi = mono_op(1, &mono1(0, 1));
        let parts: [(FormalDiffOp, u8, bool, i64); 4] = [
            (uop.compose(&x).expect("same algebra"), XI, true, 1),
            (x.compose(&vop).expect("same algebra"), XI, false, -1),
            (uop.compose(&xi).expect("same algebra"), X, true, -1),
            (xi.compose(&vop).expect("same algebra"), X, false, 1),
        ];
        for (prod, slot, on_left, sign) in parts {
            for (m, c) in prod.terms() {
                let key = if on_left {
                    (m.clone(), slot, v.clone())
                } else {
                    (u.clone(), slot, m.clone())
                };
                add_to(&mut out, key, c.get(0, 0).scale(&crate::scalars::rat_int(sign)));
            }
        }
        out
    }

    /// Degree-2 comparison: the unique z with d2 z = a1 Phi1(a2)
    /// - Phi1(a1 a2) + Phi1(a1) a2 within the degree truncation.
    fn phi2(a1: &Monomial, a2: &Monomial) -> Result<Ala, CoreError> {
        let prod = mono_op(1, a1).compose(&mono_op(1, a2))?;
        let r = sub_ava(
            &{
                let mut acc = left_mul(a1, &phi1_op(&mono_op(1, a2)));
                for (k, c) in right_mul(&phi1_op(&mono_op(1, a1)), a2) {
                    add_to(&mut acc, k, c);
                }
                acc
            },
            &phi1_op(&prod),
        );
        if r.is_empty() {
            return Ok(Ala::new());
        }
        let dbound = a1.degree() + a2.degree();
        // weight bookkeeping: u (X^Xi) v carries weight w(u) + w(v), and the
        // X / Xi slots carry +1 / -1 in A x V x A
        let wanted: i64 = a1.weight()[0] + a2.weight()[0];
        let mut cand: Vec<(Monomial, Monomial)> = Vec::new();
        for du in 0..=dbound {
            for dv in 0..=(dbound - du) {
                for au in 0..=du {
                    for av in 0..=dv {
                        let u = mono1(au as i64, (du - au) as u32);
                        let v = mono1(av as i64, (dv - av) as u32);
                        if u.weight()[0] + v.weight()[0] == wanted {
                            cand.push((u, v));
                        }
                    }
                }
            }
        }
        let mut row_index: BTreeMap<(Monomial, u8, Monomial), usize> = BTreeMap::new();
        let images: Vec<Ava> = cand.iter().map(|(u, v)| d2_basis(u, v)).collect();
        for img in &images {
            for (k, _) in img.iter() {
                let next = row_index.len();
                row_index.entry(k.clone()).or_insert(next);
            }
        }
        for (k, _) in r.iter() {
            let next = row_index.len();
            row_index.entry(k.clone()).or_insert(next);
        }
        let nrows = row_index.len();
        let mut rows = vec![vec![Cyclotomic::zero(); images.len()]; nrows];
        for (j, img) in images.iter().enumerate() {
            for (k, c) in img.iter() {
                rows[row_index[k]][j] = c.clone();
            }
        }
        let mut rhs = vec![Cyclotomic::zero(); nrows];
        for (k, c) in r.iter() {
            rhs[row_index[k]] = c.clone();
        }
        match linalg::solve(&rows, &rhs) {
            SolveOutcome::Solution(x) => {
                let mut z = Ala::new();
                for (j, (u, v)) in cand.iter().enumerate() {
                    if !x[j].is_zero() {
                        z.insert((u.clone(), v.clone()), x[j].clone());
                    }
                }
                Ok(z)
            }
            SolveOutcome::Inconsistent(_) => Err(CoreError::Invalid(
                "resolution comparison system is inconsistent".into(),
            )),
        }
    }

    /// Constant term of v a0 u summed over the Phi2 expansion of (a1, a2).
    pub fn tau(c: &TwistedChain) -> Result<Cyclotomic, CoreError> {
        if c.degree() != 2 || c.nvars() != 1 {
            return Err(CoreError::Invalid("tau is a degree-2 functional in one variable".into()));
        }
        if c.terms().any(|(t, _)| t.iter().any(|m| m.pos[0] < 0)) {
            return Err(CoreError::Invalid("tau takes polynomial chains".into()));
        }
        let mut cache: BTreeMap<(Monomial, Monomial), Ala> = BTreeMap::new();
        let mut acc = Cyclotomic::zero();
        for (tuple, coeff) in c.terms() {
            let key = (tuple[1].clone(), tuple[2].clone());
            if !cache.contains_key(&key) {
                let z = phi2(&key.0, &key.1)?;
                cache.insert(key.clone(), z);
            }
            let z = &cache[&key];
            for ((u, v), zc) in z.iter() {
                let prod = mono_op(1, v)
                    .compose(&mono_op(1, &tuple[0]))?
                    .compose(&mono_op(1, u))?;
                let eps = prod.coeff(&Monomial::one(1)).get(0, 0).clone();
                if !eps.is_zero() {
                    acc = &acc + &(&(coeff * zc) * &eps);
                }
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain1(slots: &[FormalDiffOp]) -> TwistedChain {
        TwistedChain::from_tensor(slots).unwrap()
    }

    fn d() -> FormalDiffOp {
        FormalDiffOp::deriv(1, 0)
    }

    fn y() -> FormalDiffOp {
        FormalDiffOp::var(1, 0)
    }

    fn one() -> FormalDiffOp {
        FormalDiffOp::identity(1, 1)
    }

    fn g_minus() -> DiagonalAction {
        DiagonalAction::scalar(vec![Cyclotomic::from_int(-1)], 2).unwrap()
    }

    fn g_i() -> DiagonalAction {
        DiagonalAction::scalar(vec![Cyclotomic::zeta(4, 1)], 4).unwrap()
    }

    #[test]
    fn degree_zero_boundary_errors() {
        let c = chain1(&[y()]);
        assert!(matches!(
            boundary(&c, &DiagonalAction::identity(1, 1)),
            Err(CoreError::DegreeZeroBoundary)
        ));
    }

    #[test]
    fn boundary_of_one_tensor_y_with_twist() {
        // b(1 x y) = y - gamma^{-1}(y) = 2y at lambda = -1
        let c = chain1(&[one(), y()]);
        let b = boundary(&c, &g_minus()).unwrap();
        let expected = chain1(&[y().scale(&Cyclotomic::from_int(2))]);
        assert_eq!(b, expected);
    }

    #[test]
    fn generator_is_cycle_untwisted() {
        let id = DiagonalAction::identity(1, 1);
        let c = generator_cycle(1, &id);
        let expected = chain1(&[one(), d(), y()]).sub(&chain1(&[one(), y(), d()]));
        assert_eq!(c, expected);
        assert!(boundary(&c, &id).unwrap().is_zero());
    }

    #[test]
    fn generator_fully_twisted_is_one() {
        let c = generator_cycle(1, &g_minus());
        assert_eq!(c.degree(), 0);
        assert_eq!(c.to_operator().unwrap(), one());
    }

    #[test]
    fn generator_mixed_twist() {
        let g = DiagonalAction::scalar(
            vec![Cyclotomic::one(), Cyclotomic::from_int(-1)],
            2,
        )
        .unwrap();
        let c = generator_cycle(2, &g);
        assert_eq!(c.degree(), 2);
        assert_eq!(c.num_terms(), 2);
        assert!(boundary(&c, &g).unwrap().is_zero());
    }

    #[test]
    fn b_squared_vanishes() {
        // deterministic pseudo-random degree-3 chains over mixed twists
        let ops = [y(), d(), y().compose(&d()).unwrap(), y().compose(&y()).unwrap()];
        for g in [DiagonalAction::identity(1, 1), g_minus(), g_i()] {
            let mut idx = 1usize;
            for _ in 0..6 {
                let pick = |i: &mut usize| {
                    *i = (*i * 5 + 3) % ops.len();
                    ops[*i].clone()
                };
                let c = chain1(&[pick(&mut idx), pick(&mut idx), pick(&mut idx), pick(&mut idx)]);
                let bb = boundary(&boundary(&c, &g).unwrap(), &g).unwrap();
                assert!(bb.is_zero());
            }
        }
    }

    #[test]
    fn hh0_examples() {
        let g = g_minus();
        assert_eq!(hh0_class(&one(), &g, 6).unwrap(), Cyclotomic::one());
        let yd = y().compose(&d()).unwrap();
        assert_eq!(hh0_class(&yd, &g, 6).unwrap(), Cyclotomic::from_ratio(-1, 2));
        let y2d2 = yd.compose(&yd).unwrap().sub(&yd);
        assert_eq!(hh0_class(&y2d2, &g, 8).unwrap(), Cyclotomic::from_ratio(1, 2));
    }

    #[test]
    fn hh0_matches_trace_ratio() {
        for g in [g_minus(), g_i()] {
            let samples = [
                y().compose(&d()).unwrap(),
                d().compose(&d()).unwrap().compose(&y()).unwrap().compose(&y()).unwrap(),
                y().compose(&y()).unwrap().compose(&d()).unwrap().add(&one().scale(&Cyclotomic::zeta(4, 1))),
            ];
            for a in &samples {
                let l = hh0_class(a, &g, 8).unwrap();
                let t = gamma_trace(a, &g).unwrap();
                assert_eq!(&l * &t.det_factor, t.value, "op {}", a);
            }
        }
    }

    #[test]
    fn commutator_is_boundary() {
        let g = g_i();
        let a = y().compose(&d()).unwrap();
        let b = y().compose(&y()).unwrap().compose(&d()).unwrap();
        let k = a.twisted_commutator(&b, &g).unwrap();
        let c = chain1(&[k]);
        assert_eq!(is_boundary(&c, &g, 6).unwrap(), BoundaryResult::Boundary);
    }

    #[test]
    fn unit_is_not_a_boundary_when_twisted() {
        let c = chain1(&[one()]);
        for bound in [2, 4, 6, 8] {
            assert_eq!(
                is_boundary(&c, &g_minus(), bound).unwrap(),
                BoundaryResult::NotBoundary
            );
        }
    }

    #[test]
    fn generator_two_cycle_is_not_a_boundary() {
        let id = DiagonalAction::identity(1, 1);
        let c = generator_cycle(1, &id);
        assert_eq!(is_boundary(&c, &id, 6).unwrap(), BoundaryResult::NotBoundary);
    }

    #[test]
    fn degree_one_boundary_is_recognized() {
        let id = DiagonalAction::identity(1, 1);
        let x = chain1(&[y(), d(), y()]);
        let c = boundary(&x, &id).unwrap();
        assert!(!c.is_zero());
        assert_eq!(is_boundary(&c, &id, 4).unwrap(), BoundaryResult::Boundary);
    }

    #[test]
    fn tau_pairs_with_generator() {
        let id = DiagonalAction::identity(1, 1);
        let c = generator_cycle(1, &id);
        assert_eq!(koszul::tau(&c).unwrap(), Cyclotomic::from_int(-1));
    }

    #[test]
    fn tau_kills_boundaries() {
        let id = DiagonalAction::identity(1, 1);
        let ops = [y(), d(), y().compose(&d()).unwrap(), d().compose(&d()).unwrap()];
        let mut idx = 2usize;
        for _ in 0..5 {
            let pick = |i: &mut usize| {
                *i = (*i * 7 + 1) % ops.len();
                ops[*i].clone()
            };
            let w = chain1(&[pick(&mut idx), pick(&mut idx), pick(&mut idx), pick(&mut idx)]);
            let b = boundary(&w, &id).unwrap();
            if b.degree() == 2 && !b.is_zero() {
                assert!(koszul::tau(&b).unwrap().is_zero(), "chain {:?}", w);
            }
        }
    }

    #[test]
    fn trace_kills_degree_zero_boundaries() {
        let g = g_i();
        let x = chain1(&[y().compose(&d()).unwrap(), y()]);
        let b = boundary(&x, &g).unwrap();
        let op = b.to_operator().unwrap();
        assert!(gamma_trace(&op, &g).unwrap().value.is_zero());
    }

    #[test]
    fn two_variable_boundary_squared() {
        let g = DiagonalAction::scalar(
            vec![Cyclotomic::from_int(-1), Cyclotomic::zeta(3, 1)],
            6,
        )
        .unwrap();
        let y1 = FormalDiffOp::var(2, 0);
        let d2op = FormalDiffOp::deriv(2, 1);
        let c = TwistedChain::from_tensor(&[y1.clone(), d2op.clone(), y1.compose(&d2op).unwrap()]).unwrap();
        let bb = boundary(&boundary(&c, &g).unwrap(), &g).unwrap();
        assert!(bb.is_zero());
    }
}
