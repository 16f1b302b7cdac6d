//! Finite-group averaging on the cp1 models: invariant Lefschetz numbers via
//! the averaging projector, elementwise and classwise averages, inertia
//! strata, and the geometric-versus-algebraic classifier for operators on the
//! invariant model of the cyclic quotient C/Z_m.

use crate::geometry::{cohomology_matrices, GlobalDiffOp, GroupElement, ModelSpace};
use crate::lefschetz::{lefschetz_cohomological, lefschetz_fixed_point};
use crate::linalg::{pair, solve, SolveOutcome};
use crate::mat::Mat;
use crate::scalars::Cyclotomic;
use crate::weyl::{FormalDiffOp, PolyVec};
use crate::CoreError;

/// A finite subgroup of the model symmetries, closed under composition.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    elements: Vec<GroupElement>,
    k: i64,
}

impl FiniteGroup {
    /// Closes the generators under composition; the identity is always
    /// included. Errors if the closure exceeds the bound of 64 elements.
    pub fn generate(space: &ModelSpace, generators: &[GroupElement]) -> Result<Self, CoreError> {
        let k = space.bundle_degree()?;
        let mut elements = vec![GroupElement::identity()];
        let mut frontier = elements.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for g in &frontier {
                for h in generators {
                    let p = h.compose(g, k);
                    if !elements.contains(&p) {
                        elements.push(p.clone());
                        next.push(p);
                    }
                }
            }
            if elements.len() > 64 {
                return Err(CoreError::Invalid("group closure exceeds 64 elements".into()));
            }
            frontier = next;
        }
        let group = FiniteGroup { elements, k };
        group.check_axioms()?;
        Ok(group)
    }

    fn check_axioms(&self) -> Result<(), CoreError> {
        for g in &self.elements {
            if !self.elements.contains(&g.inverse(self.k)) {
                return Err(CoreError::Invalid("closure is missing an inverse".into()));
            }
            for h in &self.elements {
                if !self.elements.contains(&g.compose(h, self.k)) {
                    return Err(CoreError::Invalid("closure is not multiplicatively closed".into()));
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn bundle_degree(&self) -> i64 {
        self.k
    }

    /// Conjugacy classes as index sets into `elements`.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.elements.len()];
        let mut classes = Vec::new();
        for i in 0..self.elements.len() {
            if seen[i] {
                continue;
            }
            let mut class = Vec::new();
            for h in &self.elements {
                let conj = h
                    .compose(&self.elements[i], self.k)
                    .compose(&h.inverse(self.k), self.k);
                let j = self
                    .elements
                    .iter()
                    .position(|e| *e == conj)
                    .expect("closure");
                if !seen[j] {
                    seen[j] = true;
                    class.push(j);
                }
            }
            classes.push(class);
        }
        classes
    }

    pub fn centralizer_order(&self, i: usize) -> usize {
        let g = &self.elements[i];
        self.elements
            .iter()
            .filter(|h| h.compose(g, self.k) == g.compose(h, self.k))
            .count()
    }
}

/// True if g D g^{-1} = D for every element.
pub fn is_invariant(
    group: &FiniteGroup,
    d: &GlobalDiffOp,
    space: &ModelSpace,
) -> Result<bool, CoreError> {
    for g in group.elements() {
        if &d.transform(g, space)? != d {
            return Ok(false);
        }
    }
    Ok(true)
}

fn averaging_projectors(
    group: &FiniteGroup,
    space: &ModelSpace,
) -> Result<(Mat, Mat), CoreError> {
    let id = GlobalDiffOp::identity(space);
    let mut p0 = Mat::zeros(space.h0_dim(), space.h0_dim());
    let mut p1 = Mat::zeros(space.h1_dim(), space.h1_dim());
    for g in group.elements() {
        let (m0, m1) = cohomology_matrices(&id, g, space)?;
        p0 = &p0 + &m0;
        p1 = &p1 + &m1;
    }
    let inv_order = Cyclotomic::from_ratio(1, group.order() as i64);
    Ok((p0.scale(&inv_order), p1.scale(&inv_order)))
}

/// Alternating trace of P_G . D on cohomology, P_G = (1/|G|) sum of the
/// group action; equals the trace of D on the invariant subspace.
pub fn invariant_lefschetz(
    group: &FiniteGroup,
    d: &GlobalDiffOp,
    space: &ModelSpace,
) -> Result<Cyclotomic, CoreError> {
    if !is_invariant(group, d, space)? {
        return Err(CoreError::NotInvariant);
    }
    let (p0, p1) = averaging_projectors(group, space)?;
    let (d0, d1) = cohomology_matrices(d, &GroupElement::identity(), space)?;
    Ok(&(&p0 * &d0).trace() - &(&p1 * &d1).trace())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AverageForm {
    Elementwise,
    Classwise,
}

fn element_lefschetz(
    g: &GroupElement,
    d: &GlobalDiffOp,
    space: &ModelSpace,
) -> Result<Cyclotomic, CoreError> {
    // elements acting trivially on the space contribute cohomologically
    let trivial_on_space = matches!(g, GroupElement::Rot { q, .. } if q.is_one());
    if trivial_on_space {
        lefschetz_cohomological(g, d, space)
    } else {
        Ok(lefschetz_fixed_point(g, d, space)?.0)
    }
}

/// (1/|G|) sum of gamma-Lefschetz numbers, elementwise or grouped by
/// conjugacy class with weights 1/|C(gamma)|.
pub fn average_lefschetz(
    group: &FiniteGroup,
    d: &GlobalDiffOp,
    space: &ModelSpace,
    form: AverageForm,
) -> Result<Cyclotomic, CoreError> {
    if !is_invariant(group, d, space)? {
        return Err(CoreError::NotInvariant);
    }
    let mut total = Cyclotomic::zero();
    match form {
        AverageForm::Elementwise => {
            for g in group.elements() {
                total = &total + &element_lefschetz(g, d, space)?;
            }
            Ok(total.scale(&crate::scalars::rat(1, group.order() as i64)))
        }
        AverageForm::Classwise => {
            for class in group.conjugacy_classes() {
                let rep = &group.elements()[class[0]];
                let v = element_lefschetz(rep, d, space)?;
                let weight = crate::scalars::rat(1, group.centralizer_order(class[0]) as i64);
                total = &total + &v.scale(&weight);
            }
            Ok(total)
        }
    }
}

#[derive(Clone, Debug)]
pub struct InertiaStratum {
    pub representative: GroupElement,
    /// Labels of the isolated fixed points; empty for the identity stratum.
    pub fixed_points: Vec<String>,
    pub whole_space: bool,
    /// Real codimension of the stratum.
    pub codim: u32,
    /// Order of the representative (the m bookkeeping, reported only).
    pub multiplicity: u32,
    pub class_size: usize,
    pub centralizer_order: usize,
}

pub fn inertia_strata(
    group: &FiniteGroup,
    space: &ModelSpace,
) -> Result<Vec<InertiaStratum>, CoreError> {
    let k = group.bundle_degree();
    let mut strata = Vec::new();
    for class in group.conjugacy_classes() {
        let rep = group.elements()[class[0]].clone();
        let trivial_on_space = matches!(&rep, GroupElement::Rot { q, .. } if q.is_one());
        let (fixed_points, whole_space, codim) = if trivial_on_space {
            (Vec::new(), true, 0)
        } else {
            let pts = rep.fixed_points(space)?;
            (pts.into_iter().map(|p| p.label).collect(), false, 2)
        };
        strata.push(InertiaStratum {
            multiplicity: rep.order(k, 1000)?,
            representative: rep,
            fixed_points,
            whole_space,
            codim,
            class_size: class.len(),
            centralizer_order: group.centralizer_order(class[0]),
        });
    }
    Ok(strata)
}

/// An operator on the invariant model of C/Z_m: given as a Laurent-coefficient
/// expression in the upstairs coordinate z, required to map invariants
/// (powers of u = z^m) to invariants up to the working degree.
#[derive(Clone, Debug)]
pub struct InvariantOperatorProblem {
    pub m: u32,
    pub op: FormalDiffOp,
    /// Invariant monomials u^0..u^degree_bound form the working basis.
    pub degree_bound: u32,
}

impl InvariantOperatorProblem {
    pub fn new(m: u32, op: FormalDiffOp) -> Result<Self, CoreError> {
        if m == 0 || op.nvars() != 1 || op.rank() != 1 {
            return Err(CoreError::Invalid("need a scalar operator and m >= 1".into()));
        }
        Ok(InvariantOperatorProblem {
            m,
            op,
            degree_bound: 12,
        })
    }

    /// Matrix of the operator on u^0..u^degree_bound; rows run over u^0..u^rows-1.
    /// Errors if some image is not an invariant polynomial.
    fn matrix(&self, rows: usize) -> Result<Vec<Vec<Cyclotomic>>, CoreError> {
        op_matrix_on_invariants(&self.op, self.m, self.degree_bound, rows)
    }
}

fn op_matrix_on_invariants(
    op: &FormalDiffOp,
    m: u32,
    degree_bound: u32,
    rows: usize,
) -> Result<Vec<Vec<Cyclotomic>>, CoreError> {
    let cols = degree_bound as usize + 1;
    let mut out = vec![vec![Cyclotomic::zero(); cols]; rows];
    for j in 0..cols {
        let image = op.apply(&PolyVec::monomial(
            1,
            vec![(m as i64) * j as i64],
            Cyclotomic::one(),
        ))?;
        for (e, v) in image.terms() {
            if v[0].is_zero() {
                continue;
            }
            let t = e[0];
            if t < 0 || t % m as i64 != 0 {
                return Err(CoreError::NotInvariant);
            }
            let r = (t / m as i64) as usize;
            if r >= rows {
                return Err(CoreError::Invalid("image degree exceeds the row bound".into()));
            }
            out[r][j] = v[0].clone();
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraicOrder {
    Order(u32),
    ExceedsBound,
}

/// Least N such that every (N+1)-fold iterated commutator of P with
/// multiplications by invariant powers u^p vanishes; this is the classical
/// differential order of P on the invariant model.
pub fn algebraic_order(p: &InvariantOperatorProblem, n_max: u32) -> Result<AlgebraicOrder, CoreError> {
    // probe multipliers u, u^2, u^3
    let multipliers: Vec<FormalDiffOp> = (1..=3)
        .map(|e| {
            FormalDiffOp::scalar_monomial(1, vec![(p.m as i64) * e], vec![0], Cyclotomic::one())
        })
        .collect();
    let mut current = vec![p.op.clone()];
    for n in 0..=n_max {
        let mut next = Vec::new();
        let mut all_zero = true;
        for c in &current {
            for f in &multipliers {
                let comm = f.compose(c)?.sub(&c.compose(f)?);
                if !comm.is_zero() {
                    all_zero = false;
                    next.push(comm);
                }
            }
        }
        if all_zero {
            return Ok(AlgebraicOrder::Order(n));
        }
        current = next;
    }
    Ok(AlgebraicOrder::ExceedsBound)
}

#[derive(Clone, Debug)]
pub enum GeometricResult {
    /// Coefficients of the generator words reproducing P exactly.
    Geometric { witness: Vec<Cyclotomic> },
    /// Functional on matrix entries annihilating every generator word but
    /// not P, relative to the recorded bounds.
    NotGeometric {
        certificate: Vec<Cyclotomic>,
        degree_bound: u32,
        order_bound: u32,
    },
}

impl GeometricResult {
    pub fn is_geometric(&self) -> bool {
        matches!(self, GeometricResult::Geometric { .. })
    }
}

/// Membership of P in the algebra generated by multiplication by u and the
/// invariant Euler field u d_u, tested exactly on the invariant monomial
/// basis. The generated algebra is spanned by the words u^a (u d_u)^b, so
/// those with a + b <= order_bound form the candidate set.
pub fn is_geometric(
    p: &InvariantOperatorProblem,
    order_bound: u32,
) -> Result<GeometricResult, CoreError> {
    let rows = (p.degree_bound + order_bound) as usize + 1;
    let target = p.matrix(rows)?;
    let u_op = FormalDiffOp::var(1, 0);
    let e_op = u_op.compose(&FormalDiffOp::deriv(1, 0))?;
    let mut words = Vec::new();
    for a in 0..=order_bound {
        for b in 0..=(order_bound - a) {
            let mut w = FormalDiffOp::identity(1, 1);
            for _ in 0..a {
                w = w.compose(&u_op)?;
            }
            for _ in 0..b {
                w = w.compose(&e_op)?;
            }
            words.push(w);
        }
    }
    // flatten: one linear row per matrix entry, one column per word
    let word_mats: Vec<Vec<Vec<Cyclotomic>>> = words
        .iter()
        .map(|w| op_matrix_on_invariants(w, 1, p.degree_bound, rows))
        .collect::<Result<_, _>>()?;
    let cols = p.degree_bound as usize + 1;
    let mut sys_rows = Vec::with_capacity(rows * cols);
    let mut rhs = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let row: Vec<Cyclotomic> = word_mats.iter().map(|wm| wm[r][c].clone()).collect();
            sys_rows.push(row);
            rhs.push(target[r][c].clone());
        }
    }
    match solve(&sys_rows, &rhs) {
        SolveOutcome::Solution(x) => Ok(GeometricResult::Geometric { witness: x }),
        SolveOutcome::Inconsistent(y) => {
            // re-check the certificate against the raw word matrices
            for wm in &word_mats {
                let col: Vec<Cyclotomic> = (0..rows)
                    .flat_map(|r| (0..cols).map(move |c| (r, c)))
                    .map(|(r, c)| wm[r][c].clone())
                    .collect();
                debug_assert!(pair(&y, &col).is_zero());
            }
            debug_assert!(!pair(&y, &rhs).is_zero());
            Ok(GeometricResult::NotGeometric {
                certificate: y,
                degree_bound: p.degree_bound,
                order_bound,
            })
        }
    }
}
