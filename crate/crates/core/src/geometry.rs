//! CP^1 model geometries with equivariant line bundles O(k): two-chart
//! operator calculus, exact cohomology representations, and finite group
//! elements (rotations and the dihedral flip z -> a/z).
//!
//! Conventions, fixed once for every module:
//! chart-0 coordinate z, chart-infinity coordinate v = 1/z, and O(k) sections
//! identified by s_inf(v) = v^k s_0(1/v). A rotation with parameter q acts on
//! sections by (g.s)(z) = rho s(q z), so H^0 has weights diag(rho, rho q,
//! ..., rho q^k), the local eigenvalue at 0 is q^{-1} and at infinity q, and
//! the fiber weights at (0, infinity) are (rho, rho q^k).

use crate::mat::Mat;
use crate::scalars::Cyclotomic;
use crate::weyl::{DiagonalAction, FormalDiffOp, PolyVec};
use crate::CoreError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelSpace {
    Cp1 { k: i64, w: i64 },
    Product(Box<ModelSpace>, Box<ModelSpace>),
}

pub fn make_cp1(k: i64, w: i64) -> ModelSpace {
    ModelSpace::Cp1 { k, w }
}

pub fn product(s1: ModelSpace, s2: ModelSpace) -> Result<ModelSpace, CoreError> {
    match (&s1, &s2) {
        (ModelSpace::Cp1 { .. }, ModelSpace::Cp1 { .. }) => {
            Ok(ModelSpace::Product(Box::new(s1), Box::new(s2)))
        }
        _ => Err(CoreError::Invalid("products combine cp1 factors".into())),
    }
}

impl ModelSpace {
    pub fn bundle_degree(&self) -> Result<i64, CoreError> {
        match self {
            ModelSpace::Cp1 { k, .. } => Ok(*k),
            _ => Err(CoreError::Invalid("not a cp1 space".into())),
        }
    }

    pub fn weight(&self) -> Result<i64, CoreError> {
        match self {
            ModelSpace::Cp1 { w, .. } => Ok(*w),
            _ => Err(CoreError::Invalid("not a cp1 space".into())),
        }
    }

    pub fn h0_dim(&self) -> usize {
        match self {
            ModelSpace::Cp1 { k, .. } => {
                if *k >= 0 {
                    (*k + 1) as usize
                } else {
                    0
                }
            }
            ModelSpace::Product(a, b) => a.h0_dim() * b.h0_dim() + a.h1_dim() * b.h1_dim(),
        }
    }

    pub fn h1_dim(&self) -> usize {
        match self {
            ModelSpace::Cp1 { k, .. } => {
                if *k <= -2 {
                    (-*k - 1) as usize
                } else {
                    0
                }
            }
            ModelSpace::Product(a, b) => a.h0_dim() * b.h1_dim() + a.h1_dim() * b.h0_dim(),
        }
    }

    /// The standard rotation element for this space: z -> zeta_N^w z.
    pub fn rotation(&self, n: u64) -> Result<GroupElement, CoreError> {
        let w = self.weight()?;
        Ok(GroupElement::rot(Cyclotomic::zeta(n, w), Cyclotomic::one()))
    }
}

/// Finite group element on the cp1 model. Rot: s -> rho s(q z). Flip:
/// s -> rho z^k s(a/z) (defined for even k so jets at its fixed points exist).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupElement {
    Rot { q: Cyclotomic, rho: Cyclotomic },
    Flip { a: Cyclotomic, rho: Cyclotomic },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixedPointKind {
    Zero,
    Infinity,
    /// A fixed point z0 of z -> a/z, with z0^2 = a, in its centered chart.
    FlipPoint(Cyclotomic),
}

#[derive(Clone, Debug)]
pub struct FixedPointInfo {
    pub label: String,
    pub kind: FixedPointKind,
    /// Coordinate eigenvalue of the element at the point.
    pub lambda: Cyclotomic,
    /// Fiber weight in the local trivialization used by jet_at.
    pub fiber: Cyclotomic,
}

impl GroupElement {
    pub fn rot(q: Cyclotomic, rho: Cyclotomic) -> Self {
        GroupElement::Rot { q, rho }
    }

    pub fn flip(a: Cyclotomic, rho: Cyclotomic) -> Self {
        GroupElement::Flip { a, rho }
    }

    pub fn identity() -> Self {
        GroupElement::Rot {
            q: Cyclotomic::one(),
            rho: Cyclotomic::one(),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, GroupElement::Rot { q, rho } if q.is_one() && rho.is_one())
    }

    /// Composition self after other; the fiber bookkeeping depends on the
    /// bundle degree k.
    pub fn compose(&self, other: &Self, k: i64) -> Self {
        use GroupElement::*;
        match (self, other) {
            (Rot { q: q1, rho: r1 }, Rot { q: q2, rho: r2 }) => Rot {
                q: q1 * q2,
                rho: r1 * r2,
            },
            // (Rot o Flip) s (z) = r1 r2 q1^k z^k s((a2/q1)/z)
            (Rot { q: q1, rho: r1 }, Flip { a: a2, rho: r2 }) => Flip {
                a: &a2.clone() / q1,
                rho: &(r1 * r2) * &int_pow(q1, k),
            },
            (Flip { a: a1, rho: r1 }, Rot { q: q2, rho: r2 }) => Flip {
                a: q2 * a1,
                rho: r1 * r2,
            },
            // (Flip o Flip) s (z) = r1 r2 a1^k s((a2/a1) z)
            (Flip { a: a1, rho: r1 }, Flip { a: a2, rho: r2 }) => Rot {
                q: &a2.clone() / a1,
                rho: &(r1 * r2) * &int_pow(a1, k),
            },
        }
    }

    pub fn inverse(&self, k: i64) -> Self {
        use GroupElement::*;
        match self {
            Rot { q, rho } => Rot {
                q: q.inv().expect("root of unity"),
                rho: rho.inv().expect("root of unity"),
            },
            Flip { a, rho } => Flip {
                a: a.clone(),
                rho: &rho.inv().expect("root of unity") * &int_pow(a, -k),
            },
        }
    }

    /// Multiplicative order; errors if it exceeds the probe bound.
    pub fn order(&self, k: i64, bound: u32) -> Result<u32, CoreError> {
        let mut acc = self.clone();
        for n in 1..=bound {
            if acc.is_identity() {
                return Ok(n);
            }
            acc = self.compose(&acc, k);
        }
        Err(CoreError::Invalid("group element order exceeds probe bound".into()))
    }

    /// Action matrix on H^0(O(k)) in the basis {z^0, ..., z^k}.
    pub fn h0_matrix(&self, space: &ModelSpace) -> Result<Mat, CoreError> {
        let k = space.bundle_degree()?;
        let dim = space.h0_dim();
        let mut m = Mat::zeros(dim, dim);
        match self {
            GroupElement::Rot { q, rho } => {
                for i in 0..dim {
                    m.set(i, i, rho * &q.pow(i as u32));
                }
            }
            GroupElement::Flip { a, rho } => {
                // z^i -> rho a^i z^{k-i}
                for i in 0..dim {
                    let j = (k as usize) - i;
                    m.set(j, i, rho * &int_pow(a, i as i64));
                }
            }
        }
        Ok(m)
    }

    /// Action matrix on the Cech H^1 basis {z^{k+1}, ..., z^{-1}} for k <= -2.
    pub fn h1_matrix(&self, space: &ModelSpace) -> Result<Mat, CoreError> {
        let k = space.bundle_degree()?;
        let dim = space.h1_dim();
        let mut m = Mat::zeros(dim, dim);
        let exps: Vec<i64> = (k + 1..=-1).collect();
        match self {
            GroupElement::Rot { q, rho } => {
                for (i, &e) in exps.iter().enumerate() {
                    m.set(i, i, rho * &int_pow(q, e));
                }
            }
            GroupElement::Flip { a, rho } => {
                // z^e -> rho a^e z^{k-e}
                for (i, &e) in exps.iter().enumerate() {
                    let target = k - e;
                    let j = (target - (k + 1)) as usize;
                    m.set(j, i, rho * &int_pow(a, e));
                }
            }
        }
        Ok(m)
    }

    /// Isolated fixed points with local eigenvalue and fiber weight.
    pub fn fixed_points(&self, space: &ModelSpace) -> Result<Vec<FixedPointInfo>, CoreError> {
        let k = space.bundle_degree()?;
        match self {
            GroupElement::Rot { q, rho } => {
                if q.is_one() {
                    return Err(CoreError::NonIsolatedFixedSet);
                }
                Ok(vec![
                    FixedPointInfo {
                        label: "0".into(),
                        kind: FixedPointKind::Zero,
                        lambda: q.inv()?,
                        fiber: rho.clone(),
                    },
                    FixedPointInfo {
                        label: "inf".into(),
                        kind: FixedPointKind::Infinity,
                        lambda: q.clone(),
                        fiber: rho * &int_pow(q, k),
                    },
                ])
            }
            GroupElement::Flip { a, rho } => {
                let z0 = sqrt_root_of_unity(a)?;
                let minus_z0 = &Cyclotomic::zero() - &z0;
                let mk = |z: Cyclotomic, label: String| FixedPointInfo {
                    label,
                    lambda: Cyclotomic::from_int(-1),
                    fiber: rho * &int_pow(&z, k),
                    kind: FixedPointKind::FlipPoint(z),
                };
                Ok(vec![
                    mk(z0, "flip+".into()),
                    mk(minus_z0, "flip-".into()),
                ])
            }
        }
    }

    /// The one-variable diagonal action at a fixed point, for the gamma-trace.
    pub fn local_action(&self, p: &FixedPointInfo, space: &ModelSpace) -> Result<DiagonalAction, CoreError> {
        let k = space.bundle_degree()?;
        let order = self.order(k, 1000)?;
        DiagonalAction::new(
            vec![p.lambda.clone()],
            Mat::scalar(1, p.fiber.clone()),
            order,
        )
    }
}

fn int_pow(c: &Cyclotomic, e: i64) -> Cyclotomic {
    if e >= 0 {
        c.pow(e as u32)
    } else {
        c.inv().expect("nonzero").pow((-e) as u32)
    }
}

/// Exact square root of a root of unity: zeta_M^j -> zeta_{2M}^j.
fn sqrt_root_of_unity(a: &Cyclotomic) -> Result<Cyclotomic, CoreError> {
    let order = a
        .root_of_unity_order(1000)
        .ok_or_else(|| CoreError::Invalid("flip parameter must be a root of unity".into()))?;
    for j in 0..order {
        if *a == Cyclotomic::zeta(order as u64, j as i64) {
            return Ok(Cyclotomic::zeta(2 * order as u64, j as i64));
        }
    }
    Err(CoreError::Invalid("no primitive-root representation found".into()))
}

/// Chart-infinity form of a chart-0 operator on O(k): substitute z -> 1/v,
/// d_z -> -v^2 d_v, and conjugate by the transition v^k. The result is
/// Laurent in general; globality is exactly the absence of negative powers.
pub fn chart_infinity(chart0: &FormalDiffOp, k: i64) -> Result<FormalDiffOp, CoreError> {
    if chart0.nvars() != 1 || chart0.rank() != 1 {
        return Err(CoreError::Invalid("cp1 operators are scalar in one variable".into()));
    }
    let neg_v2_dv = FormalDiffOp::scalar_monomial(1, vec![2], vec![1], Cyclotomic::from_int(-1));
    let mut subst = FormalDiffOp::zero(1, 1);
    for (m, c) in chart0.terms() {
        let mut term = FormalDiffOp::scalar_monomial(1, vec![-m.pos[0]], vec![0], c.get(0, 0).clone());
        for _ in 0..m.der[0] {
            term = term.compose(&neg_v2_dv)?;
        }
        subst = subst.add(&term);
    }
    let vk = FormalDiffOp::scalar_monomial(1, vec![k], vec![0], Cyclotomic::one());
    let v_minus_k = FormalDiffOp::scalar_monomial(1, vec![-k], vec![0], Cyclotomic::one());
    Ok(vk.compose(&subst)?.compose(&v_minus_k)?)
}

/// A differential operator on O(k) given in both charts; construction fails
/// unless the chart-infinity form is again polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalDiffOp {
    chart0: FormalDiffOp,
    chart_inf: FormalDiffOp,
}

impl GlobalDiffOp {
    pub fn new(chart0: FormalDiffOp, space: &ModelSpace) -> Result<Self, CoreError> {
        let k = space.bundle_degree()?;
        if chart0.has_negative_powers() {
            return Err(CoreError::NotGlobal);
        }
        let chart_inf = chart_infinity(&chart0, k)?;
        if chart_inf.has_negative_powers() {
            return Err(CoreError::NotGlobal);
        }
        Ok(GlobalDiffOp { chart0, chart_inf })
    }

    pub fn identity(space: &ModelSpace) -> Self {
        let _ = space;
        GlobalDiffOp {
            chart0: FormalDiffOp::identity(1, 1),
            chart_inf: FormalDiffOp::identity(1, 1),
        }
    }

    pub fn chart0(&self) -> &FormalDiffOp {
        &self.chart0
    }

    pub fn chart_inf(&self) -> &FormalDiffOp {
        &self.chart_inf
    }

    pub fn order(&self) -> u32 {
        self.chart0.order()
    }

    pub fn add(&self, other: &Self) -> Self {
        GlobalDiffOp {
            chart0: self.chart0.add(&other.chart0),
            chart_inf: self.chart_inf.add(&other.chart_inf),
        }
    }

    pub fn scale(&self, c: &Cyclotomic) -> Self {
        GlobalDiffOp {
            chart0: self.chart0.scale(c),
            chart_inf: self.chart_inf.scale(c),
        }
    }

    pub fn compose(&self, other: &Self) -> Result<Self, CoreError> {
        Ok(GlobalDiffOp {
            chart0: self.chart0.compose(&other.chart0)?,
            chart_inf: self.chart_inf.compose(&other.chart_inf)?,
        })
    }

    /// Conjugation by a group element: D -> g D g^{-1} in the chart-0 form.
    pub fn transform(&self, g: &GroupElement, space: &ModelSpace) -> Result<Self, CoreError> {
        let k = space.bundle_degree()?;
        match g {
            GroupElement::Rot { q, .. } => {
                // g M_z g^{-1} = q M_z, g d g^{-1} = q^{-1} d
                let mut out = FormalDiffOp::zero(1, 1);
                for (m, c) in self.chart0.terms() {
                    let w = int_pow(q, m.pos[0] - m.der[0] as i64);
                    out = out.add(&FormalDiffOp::scalar_monomial(
                        1,
                        m.pos.clone(),
                        m.der.clone(),
                        &c.get(0, 0).clone() * &w,
                    ));
                }
                GlobalDiffOp::new(out, space)
            }
            GroupElement::Flip { a, .. } => {
                // substitution z -> a/z, d -> -(z^2/a) d, then transition z^k
                let ainv = a.inv()?;
                let sub_d = FormalDiffOp::scalar_monomial(1, vec![2], vec![1], &Cyclotomic::zero() - &ainv);
                let mut subst = FormalDiffOp::zero(1, 1);
                for (m, c) in self.chart0.terms() {
                    let mut term = FormalDiffOp::scalar_monomial(
                        1,
                        vec![-m.pos[0]],
                        vec![0],
                        &c.get(0, 0).clone() * &int_pow(a, m.pos[0]),
                    );
                    for _ in 0..m.der[0] {
                        term = term.compose(&sub_d)?;
                    }
                    subst = subst.add(&term);
                }
                let zk = FormalDiffOp::scalar_monomial(1, vec![k], vec![0], Cyclotomic::one());
                let z_minus_k = FormalDiffOp::scalar_monomial(1, vec![-k], vec![0], Cyclotomic::one());
                let conj = zk.compose(&subst)?.compose(&z_minus_k)?;
                GlobalDiffOp::new(conj, space)
            }
        }
    }
}

/// Chart-infinity representation of a chart-0 operator.
pub fn change_chart(d: &GlobalDiffOp, space: &ModelSpace) -> Result<FormalDiffOp, CoreError> {
    let _ = space.bundle_degree()?;
    Ok(d.chart_inf.clone())
}

fn op_matrix(op: &FormalDiffOp, exps: &[i64], keep: impl Fn(i64) -> bool) -> Result<Mat, CoreError> {
    let dim = exps.len();
    let mut m = Mat::zeros(dim, dim);
    for (col, &e) in exps.iter().enumerate() {
        let image = op.apply(&PolyVec::monomial(1, vec![e], Cyclotomic::one()))?;
        for (mono, v) in image.terms() {
            let t = mono[0];
            if !keep(t) {
                continue;
            }
            let row = exps
                .iter()
                .position(|&x| x == t)
                .ok_or_else(|| CoreError::Invalid("operator leaves the cohomology basis".into()))?;
            m.set(row, col, v[0].clone());
        }
    }
    Ok(m)
}

/// Exact matrices of g . D on H^0 and H^1 in the monomial bases.
pub fn cohomology_matrices(
    d: &GlobalDiffOp,
    g: &GroupElement,
    space: &ModelSpace,
) -> Result<(Mat, Mat), CoreError> {
    let k = space.bundle_degree()?;
    let h0_exps: Vec<i64> = if k >= 0 { (0..=k).collect() } else { Vec::new() };
    let h1_exps: Vec<i64> = if k <= -2 { (k + 1..=-1).collect() } else { Vec::new() };
    let d0 = op_matrix(&d.chart0, &h0_exps, |t| {
        // global operators preserve polynomial degree <= k
        debug_assert!((0..=k).contains(&t));
        true
    })?;
    let d1 = op_matrix(&d.chart0, &h1_exps, |t| t < 0 && t > k)?;
    let g0 = g.h0_matrix(space)?;
    let g1 = g.h1_matrix(space)?;
    Ok((&g0 * &d0, &g1 * &d1))
}

/// Exact local operator in the centered coordinate at a fixed point.
///
/// At 0 and infinity this is the chart form. At a flip fixed point the
/// operator must be polynomial in A = z d - k/2 (even k); in the centered
/// coordinate u = (z - z0)/(z + z0) with frame (z + z0)^k,
/// A = (1 - u^2)/2 d_u + (k/2) u, independent of z0.
pub fn jet_at(
    d: &GlobalDiffOp,
    p: &FixedPointKind,
    space: &ModelSpace,
) -> Result<FormalDiffOp, CoreError> {
    let k = space.bundle_degree()?;
    match p {
        FixedPointKind::Zero => Ok(d.chart0.clone()),
        FixedPointKind::Infinity => Ok(d.chart_inf.clone()),
        FixedPointKind::FlipPoint(_) => {
            if k % 2 != 0 {
                return Err(CoreError::UnsupportedFlipJet);
            }
            for (m, _) in d.chart0.terms() {
                if m.pos[0] != m.der[0] as i64 {
                    return Err(CoreError::UnsupportedFlipJet);
                }
            }
            // A in the centered chart
            let half = Cyclotomic::from_ratio(1, 2);
            let a_u = FormalDiffOp::scalar_monomial(1, vec![0], vec![1], half.clone())
                .add(&FormalDiffOp::scalar_monomial(
                    1,
                    vec![2],
                    vec![1],
                    &Cyclotomic::zero() - &half,
                ))
                .add(&FormalDiffOp::scalar_monomial(
                    1,
                    vec![1],
                    vec![0],
                    Cyclotomic::from_int(k / 2),
                ));
            // D = sum_i c_i z^i d^i = sum_i c_i falling(A + k/2, i)
            let mut out = FormalDiffOp::zero(1, 1);
            for (m, c) in d.chart0.terms() {
                let i = m.der[0];
                let mut prod = FormalDiffOp::identity(1, 1).scale(c.get(0, 0));
                for r in 0..i {
                    let shift = FormalDiffOp::constant(
                        1,
                        Cyclotomic::from_int(k / 2 - r as i64),
                    );
                    prod = prod.compose(&a_u.add(&shift))?;
                }
                out = out.add(&prod);
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z_d() -> FormalDiffOp {
        FormalDiffOp::var(1, 0).compose(&FormalDiffOp::deriv(1, 0)).unwrap()
    }

    fn d_op() -> FormalDiffOp {
        FormalDiffOp::deriv(1, 0)
    }

    fn mono(pos: i64, der: u32, c: i64) -> FormalDiffOp {
        FormalDiffOp::scalar_monomial(1, vec![pos], vec![der], Cyclotomic::from_int(c))
    }

    #[test]
    fn cohomology_dimensions() {
        assert_eq!(make_cp1(0, 1).h0_dim(), 1);
        assert_eq!(make_cp1(0, 1).h1_dim(), 0);
        assert_eq!(make_cp1(2, 1).h0_dim(), 3);
        assert_eq!(make_cp1(-2, 1).h1_dim(), 1);
        assert_eq!(make_cp1(-1, 1).h0_dim() + make_cp1(-1, 1).h1_dim(), 0);
        // Riemann-Roch: dim H0 - dim H1 = k + 1
        for k in -4..=4 {
            let s = make_cp1(k, 1);
            assert_eq!(s.h0_dim() as i64 - s.h1_dim() as i64, k + 1);
        }
    }

    #[test]
    fn change_chart_examples() {
        // z d on O(0) -> -v d
        let e = chart_infinity(&z_d(), 0).unwrap();
        assert_eq!(e, mono(1, 1, -1));
        // z d on O(2) -> 2 - v d
        let e = chart_infinity(&z_d(), 2).unwrap();
        assert_eq!(e, mono(1, 1, -1).add(&mono(0, 0, 2)));
        // d on O(2) -> -v^2 d + 2v
        let e = chart_infinity(&d_op(), 2).unwrap();
        assert_eq!(e, mono(2, 1, -1).add(&mono(1, 0, 2)));
        // z^2 d - k z is the third sl2 generator: on O(2) it goes to -d
        let s = make_cp1(2, 1);
        let f = mono(2, 1, 1).add(&mono(1, 0, -2));
        let g = GlobalDiffOp::new(f, &s).unwrap();
        assert_eq!(g.chart_inf(), &mono(0, 1, -1));
    }

    #[test]
    fn chart_change_is_an_involution() {
        for k in [-3i64, 0, 2, 4] {
            for op in [z_d(), d_op().compose(&d_op()).unwrap(), mono(2, 1, 3)] {
                let inf = chart_infinity(&op, k).unwrap();
                let back = chart_infinity(&inf, k).unwrap();
                assert_eq!(back, op, "k={}", k);
            }
        }
    }

    #[test]
    fn globality_detection() {
        let s = make_cp1(0, 1);
        // z^2 d is not global on O(0)
        assert!(matches!(
            GlobalDiffOp::new(mono(2, 1, 1).add(&mono(1, 0, 1)), &s),
            Err(CoreError::NotGlobal)
        ));
        // but z^2 d - 0 z ... on O(2) the combination z^2 d - 2 z is global
        let s2 = make_cp1(2, 1);
        assert!(GlobalDiffOp::new(mono(2, 1, 1).add(&mono(1, 0, -2)), &s2).is_ok());
    }

    #[test]
    fn h0_matrices() {
        let s = make_cp1(2, 1);
        let d = GlobalDiffOp::new(z_d(), &s).unwrap();
        let (h0, _) = cohomology_matrices(&d, &GroupElement::identity(), &s).unwrap();
        let mut expected = Mat::zeros(3, 3);
        expected.set(1, 1, Cyclotomic::one());
        expected.set(2, 2, Cyclotomic::from_int(2));
        assert_eq!(h0, expected);

        // identity operator with gamma = zeta_3: diag(1, z, z^2)
        let g = GroupElement::rot(Cyclotomic::zeta(3, 1), Cyclotomic::one());
        let id = GlobalDiffOp::identity(&s);
        let (h0, _) = cohomology_matrices(&id, &g, &s).unwrap();
        for i in 0..3 {
            assert_eq!(h0.get(i, i), &Cyclotomic::zeta(3, i as i64));
        }

        // d on O(2): strictly lower shift, zero trace
        let dd = GlobalDiffOp::new(d_op(), &s).unwrap();
        let (h0, _) = cohomology_matrices(&dd, &GroupElement::identity(), &s).unwrap();
        assert!(h0.trace().is_zero());
        assert_eq!(h0.get(0, 1), &Cyclotomic::one());
        assert_eq!(h0.get(1, 2), &Cyclotomic::from_int(2));
    }

    #[test]
    fn h1_action_on_negative_bundle() {
        let s = make_cp1(-3, 1);
        let g = GroupElement::rot(Cyclotomic::zeta(4, 1), Cyclotomic::one());
        let id = GlobalDiffOp::identity(&s);
        let (h0, h1) = cohomology_matrices(&id, &g, &s).unwrap();
        assert_eq!(h0.nrows(), 0);
        assert_eq!(h1.nrows(), 2);
        // basis z^{-2}, z^{-1} with weights q^{-2}, q^{-1}
        assert_eq!(h1.get(0, 0), &Cyclotomic::zeta(4, -2));
        assert_eq!(h1.get(1, 1), &Cyclotomic::zeta(4, -1));
    }

    #[test]
    fn jet_examples() {
        let s0 = make_cp1(0, 1);
        let d = GlobalDiffOp::new(z_d(), &s0).unwrap();
        assert_eq!(jet_at(&d, &FixedPointKind::Zero, &s0).unwrap(), z_d());

        let s2 = make_cp1(2, 1);
        let d = GlobalDiffOp::new(z_d(), &s2).unwrap();
        let j = jet_at(&d, &FixedPointKind::Infinity, &s2).unwrap();
        assert_eq!(j, mono(1, 1, -1).add(&mono(0, 0, 2)));

        // z^2 d^2 at infinity on O(2): y^2 d^2 - 2 y d + 2
        let z2d2 = mono(2, 2, 1);
        let d = GlobalDiffOp::new(z2d2, &s2).unwrap();
        let j = jet_at(&d, &FixedPointKind::Infinity, &s2).unwrap();
        assert_eq!(j, mono(2, 2, 1).add(&mono(1, 1, -2)).add(&mono(0, 0, 2)));
    }

    #[test]
    fn rotation_fixed_points() {
        let s = make_cp1(2, 1);
        let g = GroupElement::rot(Cyclotomic::zeta(4, 1), Cyclotomic::one());
        let pts = g.fixed_points(&s).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].lambda, Cyclotomic::zeta(4, -1));
        assert_eq!(pts[0].fiber, Cyclotomic::one());
        assert_eq!(pts[1].lambda, Cyclotomic::zeta(4, 1));
        assert_eq!(pts[1].fiber, Cyclotomic::zeta(4, 2));
        assert!(matches!(
            GroupElement::identity().fixed_points(&s),
            Err(CoreError::NonIsolatedFixedSet)
        ));
    }

    #[test]
    fn flip_group_laws() {
        let k = 0i64;
        let f = GroupElement::flip(Cyclotomic::one(), Cyclotomic::one());
        assert!(f.compose(&f, k).is_identity());
        assert_eq!(f.order(k, 10).unwrap(), 2);
        let r = GroupElement::rot(Cyclotomic::from_int(-1), Cyclotomic::one());
        // flip . rot . flip = rot^{-1}
        let conj = f.compose(&r.compose(&f, k), k);
        assert_eq!(conj, r.inverse(k));
        // dihedral of order 4 closes
        let fr = f.compose(&r, k);
        assert_eq!(fr.order(k, 10).unwrap(), 2);
    }

    #[test]
    fn flip_fixed_points_and_jets() {
        let s = make_cp1(0, 1);
        let f = GroupElement::flip(Cyclotomic::one(), Cyclotomic::one());
        let pts = f.fixed_points(&s).unwrap();
        assert_eq!(pts.len(), 2);
        for p in &pts {
            assert_eq!(p.lambda, Cyclotomic::from_int(-1));
            assert_eq!(p.fiber, Cyclotomic::one());
        }
        // A = z d on O(0): jet at a flip point is (1 - u^2)/2 d
        let d = GlobalDiffOp::new(z_d(), &s).unwrap();
        let j = jet_at(&d, &pts[0].kind, &s).unwrap();
        let half = Cyclotomic::from_ratio(1, 2);
        let expected = FormalDiffOp::scalar_monomial(1, vec![0], vec![1], half.clone()).add(
            &FormalDiffOp::scalar_monomial(1, vec![2], vec![1], &Cyclotomic::zero() - &half),
        );
        assert_eq!(j, expected);
        // non-diagonal operators have no flip jet
        let dd = GlobalDiffOp::new(d_op().compose(&d_op()).unwrap(), &s).unwrap();
        assert!(matches!(
            jet_at(&dd, &pts[0].kind, &s),
            Err(CoreError::UnsupportedFlipJet)
        ));
    }

    #[test]
    fn equivariance_of_matrices() {
        let s = make_cp1(3, 1);
        let g = GroupElement::rot(Cyclotomic::zeta(6, 1), Cyclotomic::one());
        let d = GlobalDiffOp::new(z_d().compose(&z_d()).unwrap().add(&d_op()), &s).unwrap();
        let g0 = g.h0_matrix(&s).unwrap();
        let (h0d, _) = cohomology_matrices(&d, &GroupElement::identity(), &s).unwrap();
        let transformed = d.transform(&g, &s).unwrap();
        let (h0t, _) = cohomology_matrices(&transformed, &GroupElement::identity(), &s).unwrap();
        let lhs = &(&g0 * &h0d) * &g0.inverse().unwrap();
        assert_eq!(lhs, h0t);
    }

    #[test]
    fn sl2_closes_in_matrix_representation() {
        let k = 4i64;
        let s = make_cp1(k, 1);
        let e = GlobalDiffOp::new(d_op(), &s).unwrap();
        let h = GlobalDiffOp::new(
            mono(1, 1, 2).add(&mono(0, 0, -k)),
            &s,
        )
        .unwrap(); // 2 z d - k
        let f = GlobalDiffOp::new(mono(2, 1, 1).add(&mono(1, 0, -k)), &s).unwrap();
        let id = GroupElement::identity();
        let (me, _) = cohomology_matrices(&e, &id, &s).unwrap();
        let (mh, _) = cohomology_matrices(&h, &id, &s).unwrap();
        let (mf, _) = cohomology_matrices(&f, &id, &s).unwrap();
        // d lowers degree and z^2 d - k z raises it:
        // [h, e] = -2e, [h, f] = 2f, [e, f] = h
        let comm = |a: &Mat, b: &Mat| &(a * b) + &(b * a).scale(&Cyclotomic::from_int(-1));
        assert_eq!(comm(&mh, &me), me.scale(&Cyclotomic::from_int(-2)));
        assert_eq!(comm(&mh, &mf), mf.scale(&Cyclotomic::from_int(2)));
        assert_eq!(comm(&me, &mf), mh);
    }

    #[test]
    fn product_dimensions() {
        let p = product(make_cp1(1, 1), make_cp1(1, 1)).unwrap();
        assert_eq!(p.h0_dim(), 4);
        assert!(product(p.clone(), make_cp1(0, 1)).is_err());
    }
}
