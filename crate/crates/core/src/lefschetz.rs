//! Both sides of the fixed-point trace identity on the cp1 models: the
//! cohomological gamma-Lefschetz number of a global operator and the sum of
//! local gamma-traces at the isolated fixed points, with an exact comparison
//! report.

use crate::geometry::{
    cohomology_matrices, jet_at, GlobalDiffOp, GroupElement, ModelSpace,
};
use crate::gtrace::{gamma_trace, GammaTraceResult};
use crate::scalars::Cyclotomic;
use crate::CoreError;

#[derive(Clone, Debug)]
pub struct PointContribution {
    pub label: String,
    pub trace: GammaTraceResult,
    /// Fiber weight times the local gamma-trace of the jet.
    pub contribution: Cyclotomic,
}

#[derive(Clone, Debug)]
pub struct LefschetzReport {
    pub lhs: Cyclotomic,
    pub rhs: Cyclotomic,
    pub per_point: Vec<PointContribution>,
    pub equal: bool,
}

/// Sum_j (-1)^j tr(g . D on H^j), exactly.
pub fn lefschetz_cohomological(
    g: &GroupElement,
    d: &GlobalDiffOp,
    space: &ModelSpace,
) -> Result<Cyclotomic, CoreError> {
    let (h0, h1) = cohomology_matrices(d, g, space)?;
    Ok(&h0.trace() - &h1.trace())
}

/// Sum over isolated fixed points of fiber-weighted local gamma-traces.
/// The fiber weight enters as the 1x1 fiber block of the local action.
pub fn lefschetz_fixed_point(
    g: &GroupElement,
    d: &GlobalDiffOp,
    space: &ModelSpace,
) -> Result<(Cyclotomic, Vec<PointContribution>), CoreError> {
    let pts = g.fixed_points(space)?;
    let mut total = Cyclotomic::zero();
    let mut per_point = Vec::new();
    for p in pts {
        let jet = jet_at(d, &p.kind, space)?;
        let action = g.local_action(&p, space)?;
        let tr = gamma_trace(&jet, &action)?;
        total = &total + &tr.value;
        per_point.push(PointContribution {
            label: p.label,
            contribution: tr.value.clone(),
            trace: tr,
        });
    }
    Ok((total, per_point))
}

/// Exact comparison of the two sides for a nontrivial group element.
pub fn verify_theorem(
    g: &GroupElement,
    d: &GlobalDiffOp,
    space: &ModelSpace,
) -> Result<LefschetzReport, CoreError> {
    let lhs = lefschetz_cohomological(g, d, space)?;
    let (rhs, per_point) = lefschetz_fixed_point(g, d, space)?;
    let equal = lhs == rhs;
    Ok(LefschetzReport {
        lhs,
        rhs,
        per_point,
        equal,
    })
}

/// Product spaces via the Kuenneth rule: the left side multiplies the two
/// cohomological alternating traces, the right side replaces each factor with
/// a nontrivial element by its fixed-point sum.
pub fn verify_theorem_product(
    g1: &GroupElement,
    d1: &GlobalDiffOp,
    s1: &ModelSpace,
    g2: &GroupElement,
    d2: &GlobalDiffOp,
    s2: &ModelSpace,
) -> Result<LefschetzReport, CoreError> {
    let lc1 = lefschetz_cohomological(g1, d1, s1)?;
    let lc2 = lefschetz_cohomological(g2, d2, s2)?;
    let lhs = &lc1 * &lc2;
    let mut per_point = Vec::new();
    let mut factor = |g: &GroupElement,
                      d: &GlobalDiffOp,
                      s: &ModelSpace,
                      tag: &str|
     -> Result<Cyclotomic, CoreError> {
        if g.is_identity() {
            lefschetz_cohomological(g, d, s)
        } else {
            let (v, pts) = lefschetz_fixed_point(g, d, s)?;
            for mut p in pts {
                p.label = format!("{}:{}", tag, p.label);
                per_point.push(p);
            }
            Ok(v)
        }
    };
    let r1 = factor(g1, d1, s1, "1")?;
    let r2 = factor(g2, d2, s2, "2")?;
    let rhs = &r1 * &r2;
    let equal = lhs == rhs;
    Ok(LefschetzReport {
        lhs,
        rhs,
        per_point,
        equal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_cp1;
    use crate::weyl::FormalDiffOp;

    fn mono(pos: i64, der: u32, c: i64) -> FormalDiffOp {
        FormalDiffOp::scalar_monomial(1, vec![pos], vec![der], Cyclotomic::from_int(c))
    }

    fn z_d() -> FormalDiffOp {
        mono(1, 1, 1)
    }

    fn rot(n: u64, e: i64) -> GroupElement {
        GroupElement::rot(Cyclotomic::zeta(n, e), Cyclotomic::one())
    }

    #[test]
    fn identity_operator_on_o1() {
        let s = make_cp1(1, 1);
        let d = GlobalDiffOp::identity(&s);
        let r = verify_theorem(&rot(4, 1), &d, &s).unwrap();
        let expected = &Cyclotomic::one() + &Cyclotomic::zeta(4, 1);
        assert!(r.equal);
        assert_eq!(r.lhs, expected);
        assert_eq!(r.rhs, expected);
    }

    #[test]
    fn euler_operator_on_o0() {
        let s = make_cp1(0, 1);
        let d = GlobalDiffOp::new(z_d(), &s).unwrap();
        let r = verify_theorem(&rot(2, 1), &d, &s).unwrap();
        assert!(r.equal);
        assert!(r.lhs.is_zero());
        // per-point masses -1/4 at 0 and +1/4 at infinity
        assert_eq!(r.per_point[0].contribution, Cyclotomic::from_ratio(-1, 4));
        assert_eq!(r.per_point[1].contribution, Cyclotomic::from_ratio(1, 4));
    }

    #[test]
    fn second_order_on_o2() {
        let s = make_cp1(2, 1);
        let d = GlobalDiffOp::new(mono(2, 2, 1), &s).unwrap();
        let r = verify_theorem(&rot(2, 1), &d, &s).unwrap();
        assert!(r.equal);
        assert_eq!(r.lhs, Cyclotomic::from_int(2));
        assert_eq!(r.per_point[0].contribution, Cyclotomic::from_ratio(1, 4));
        assert_eq!(r.per_point[1].contribution, Cyclotomic::from_ratio(7, 4));
    }

    #[test]
    fn character_sum_on_o3() {
        let s = make_cp1(3, 1);
        let d = GlobalDiffOp::identity(&s);
        let r = verify_theorem(&rot(3, 1), &d, &s).unwrap();
        assert!(r.equal);
        // 1 + z3 + z3^2 + 1 = 1
        assert_eq!(r.lhs, Cyclotomic::one());
    }

    #[test]
    fn h1_side_on_negative_bundle() {
        let s = make_cp1(-2, 1);
        let d = GlobalDiffOp::identity(&s);
        let r = verify_theorem(&rot(4, 1), &d, &s).unwrap();
        assert!(r.equal);
        // H0 = 0, H1 = span{z^{-1}} with weight q^{-1}: lhs = -q^{-1} = i
        assert_eq!(r.lhs, Cyclotomic::zeta(4, 1));
    }

    #[test]
    fn nonisolated_identity_errors() {
        let s = make_cp1(0, 1);
        let d = GlobalDiffOp::identity(&s);
        assert!(matches!(
            verify_theorem(&GroupElement::identity(), &d, &s),
            Err(CoreError::NonIsolatedFixedSet)
        ));
    }

    #[test]
    fn additivity() {
        let s = make_cp1(2, 1);
        let d1 = GlobalDiffOp::new(z_d(), &s).unwrap();
        let d2 = GlobalDiffOp::new(mono(0, 1, 3), &s).unwrap();
        let g = rot(4, 1);
        let a = lefschetz_fixed_point(&g, &d1, &s).unwrap().0;
        let b = lefschetz_fixed_point(&g, &d2, &s).unwrap().0;
        let sum = lefschetz_fixed_point(&g, &d1.add(&d2), &s).unwrap().0;
        assert_eq!(sum, &a + &b);
    }

    #[test]
    fn conjugation_invariance_of_lhs() {
        let s = make_cp1(3, 1);
        let d = GlobalDiffOp::new(z_d().compose(&z_d()).unwrap(), &s).unwrap();
        let g = rot(6, 1);
        let transformed = d.transform(&g, &s).unwrap();
        assert_eq!(
            lefschetz_cohomological(&g, &d, &s).unwrap(),
            lefschetz_cohomological(&g, &transformed, &s).unwrap()
        );
    }

    #[test]
    fn flip_cases() {
        let s = make_cp1(0, 1);
        let f = GroupElement::flip(Cyclotomic::one(), Cyclotomic::one());
        let id = GlobalDiffOp::identity(&s);
        let r = verify_theorem(&f, &id, &s).unwrap();
        assert!(r.equal);
        assert_eq!(r.lhs, Cyclotomic::one());
        // A^2 with A = z d: both sides vanish
        let a2 = GlobalDiffOp::new(z_d().compose(&z_d()).unwrap(), &s).unwrap();
        let r = verify_theorem(&f, &a2, &s).unwrap();
        assert!(r.equal, "lhs={} rhs={}", r.lhs, r.rhs);
        assert!(r.lhs.is_zero());
    }

    #[test]
    fn small_grid_agrees() {
        // spot grid over bundle degree, twist order, and linearization weight
        for k in [-3i64, -2, 0, 1, 2] {
            let ops: Vec<FormalDiffOp> = vec![
                FormalDiffOp::identity(1, 1),
                z_d(),
                z_d().compose(&z_d()).unwrap(),
            ];
            for n in [2u64, 3, 4, 6] {
                for w in [1i64, 2] {
                    let s = make_cp1(k, w);
                    let g = s.rotation(n).unwrap();
                    if g.is_identity() {
                        continue;
                    }
                    for op in &ops {
                        let d = GlobalDiffOp::new(op.clone(), &s).unwrap();
                        let r = verify_theorem(&g, &d, &s).unwrap();
                        assert!(r.equal, "k={} n={} w={} lhs={} rhs={}", k, n, w, r.lhs, r.rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn product_multiplicativity() {
        let s = make_cp1(0, 1);
        let d1 = GlobalDiffOp::new(z_d(), &s).unwrap();
        let id = GlobalDiffOp::identity(&s);
        let r = verify_theorem_product(
            &GroupElement::identity(),
            &d1,
            &s,
            &rot(2, 1),
            &id,
            &s,
        )
        .unwrap();
        assert!(r.equal);
        assert!(r.lhs.is_zero());
        assert!(r.rhs.is_zero());
    }
}
