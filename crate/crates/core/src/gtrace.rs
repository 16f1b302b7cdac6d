//! The gamma-twisted trace on formal differential operators, in closed form
//! over Q(zeta_N).
//!
//! For a fully twisted diagonal element (all eigenvalues != 1) the trace of
//! the diagonal monomial y^b d^b is prod_i b_i! mu_i^{b_i} / (1 - mu_i)^{b_i+1}
//! with mu_i = lambda_i^{-1}: the Abel-regularized trace of gamma . y^b d^b on the polynomial module.
//! Off-diagonal monomials contribute nothing, and matrix coefficients enter
//! through tr(fiber . M). The normalization Tr(1) = 1/det(1 - gamma^{-1})
//! matches the twisted cocycle evaluation on the generator cycle.

use crate::scalars::{rat_int, Cyclotomic, Rat};
use crate::weyl::{DiagonalAction, FormalDiffOp, Monomial};
use crate::CoreError;
use num::One;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaTraceResult {
    pub value: Cyclotomic,
    /// 1/det(1 - gamma^{-1}) on the twisted directions.
    pub det_factor: Cyclotomic,
    /// tr(fiber . M) for the identity-monomial coefficient M.
    pub fiber_trace: Cyclotomic,
}

/// Exact prod_i 1/(1 - lambda_i^{-1}); errors if some eigenvalue is 1.
pub fn det_factor(g: &DiagonalAction) -> Result<Cyclotomic, CoreError> {
    let mut acc = Cyclotomic::one();
    for l in &g.lambdas {
        if l.is_one() {
            return Err(CoreError::UntwistedDirection);
        }
        let denom = &Cyclotomic::one() - &l.inv()?;
        acc = &acc * &denom.inv()?;
    }
    Ok(acc)
}

/// Closed-form trace of the scalar monomial y^b d^b against the twist mu.
fn diagonal_monomial_trace(der: &[u32], mus: &[Cyclotomic]) -> Cyclotomic {
    let mut acc = Cyclotomic::one();
    for (b, mu) in der.iter().zip(mus.iter()) {
        let mut fact = Rat::one();
        for j in 1..=*b {
            fact *= rat_int(j as i64);
        }
        let one_minus = &Cyclotomic::one() - mu;
        let denom = one_minus.pow(b + 1).inv().expect("mu != 1");
        let num = mu.pow(*b);
        acc = &acc * &(&num * &denom).scale(&fact);
    }
    acc
}

/// The gamma-trace of a polynomial operator under a fully twisted action.
pub fn gamma_trace(a: &FormalDiffOp, g: &DiagonalAction) -> Result<GammaTraceResult, CoreError> {
    if g.nvars() != a.nvars() {
        return Err(CoreError::DimensionMismatch);
    }
    let det = det_factor(g)?;
    let mus: Vec<Cyclotomic> = g
        .lambdas
        .iter()
        .map(|l| l.inv().expect("root of unity"))
        .collect();
    let mut value = Cyclotomic::zero();
    for (m, coeff) in a.terms() {
        let diagonal = m
            .pos
            .iter()
            .zip(m.der.iter())
            .all(|(&p, &d)| p == d as i64);
        if !diagonal {
            continue;
        }
        let fc = (&g.fiber * coeff).trace();
        if fc.is_zero() {
            continue;
        }
        value = &value + &(&fc * &diagonal_monomial_trace(&m.der, &mus));
    }
    let fiber_trace = (&g.fiber * &a.coeff(&Monomial::one(a.nvars()))).trace();
    Ok(GammaTraceResult {
        value,
        det_factor: det,
        fiber_trace,
    })
}

/// Checks the twisted trace law Tr(A . B) = Tr(B . gamma(A)), equivalently
/// Tr(A . B) = Tr(gamma^{-1}(B) . A). This is the rearrangement forced by the
/// action convention: conjugating A across the twist inserts one factor of
/// gamma, so the trace kills every twisted commutator A B - B gamma(A).
pub fn trace_property_check(
    a: &FormalDiffOp,
    b: &FormalDiffOp,
    g: &DiagonalAction,
) -> Result<bool, CoreError> {
    let lhs = gamma_trace(&a.compose(b)?, g)?;
    let rhs = gamma_trace(&b.compose(&a.gamma_act(g))?, g)?;
    let alt = gamma_trace(&b.gamma_act(&g.inverse()).compose(a)?, g)?;
    Ok(lhs.value == rhs.value && lhs.value == alt.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::FormalDiffOp;

    fn minus_one() -> DiagonalAction {
        DiagonalAction::scalar(vec![Cyclotomic::from_int(-1)], 2).unwrap()
    }

    #[test]
    fn det_factor_examples() {
        assert_eq!(det_factor(&minus_one()).unwrap(), Cyclotomic::from_ratio(1, 2));
        // lambda = i: 1/(1+i) = (1-i)/2
        let gi = DiagonalAction::scalar(vec![Cyclotomic::zeta(4, 1)], 4).unwrap();
        let expected = &Cyclotomic::from_ratio(1, 2) - &Cyclotomic::zeta(4, 1).scale(&crate::scalars::rat(1, 2));
        assert_eq!(det_factor(&gi).unwrap(), expected);
        // two twisted directions at -1
        let g2 = DiagonalAction::scalar(
            vec![Cyclotomic::from_int(-1), Cyclotomic::from_int(-1)],
            2,
        )
        .unwrap();
        assert_eq!(det_factor(&g2).unwrap(), Cyclotomic::from_ratio(1, 4));
    }

    #[test]
    fn untwisted_direction_is_an_error() {
        let g = DiagonalAction::scalar(vec![Cyclotomic::one()], 1).unwrap();
        assert!(matches!(det_factor(&g), Err(CoreError::UntwistedDirection)));
    }

    #[test]
    fn trace_examples() {
        let g = minus_one();
        let one = FormalDiffOp::identity(1, 1);
        let r = gamma_trace(&one, &g).unwrap();
        assert_eq!(r.value, Cyclotomic::from_ratio(1, 2));
        assert_eq!(r.value, r.det_factor);

        // Tr(y d) at mu = -1: mu/(1-mu)^2 = -1/4
        let yd = FormalDiffOp::var(1, 0).compose(&FormalDiffOp::deriv(1, 0)).unwrap();
        let r = gamma_trace(&yd, &g).unwrap();
        assert_eq!(r.value, Cyclotomic::from_ratio(-1, 4));

        // off-diagonal monomial contributes 0
        let y2d = FormalDiffOp::scalar_monomial(1, vec![2], vec![1], Cyclotomic::one());
        assert!(gamma_trace(&y2d, &g).unwrap().value.is_zero());
    }

    #[test]
    fn trace_law_simple() {
        let g = minus_one();
        let d = FormalDiffOp::deriv(1, 0);
        let y = FormalDiffOp::var(1, 0);
        assert!(trace_property_check(&d, &y, &g).unwrap());
        let one = FormalDiffOp::identity(1, 1);
        assert!(trace_property_check(&one, &one, &g).unwrap());
    }

    // lambda = i distinguishes the twist direction: Tr(d y) = -i/2 equals
    // Tr(y . gamma(d)) = lambda Tr(y d), not lambda^{-1} Tr(y d).
    #[test]
    fn trace_law_asymmetric_twist() {
        let g = DiagonalAction::scalar(vec![Cyclotomic::zeta(4, 1)], 4).unwrap();
        let d = FormalDiffOp::deriv(1, 0);
        let y = FormalDiffOp::var(1, 0);
        let dy = gamma_trace(&d.compose(&y).unwrap(), &g).unwrap().value;
        let half_i = Cyclotomic::zeta(4, 1).scale(&crate::scalars::rat(1, 2));
        assert_eq!(dy, &Cyclotomic::zero() - &half_i);
        assert!(trace_property_check(&d, &y, &g).unwrap());
        let wrong = gamma_trace(
            &y.compose(&d.gamma_act(&g.inverse())).unwrap(),
            &g,
        )
        .unwrap()
        .value;
        assert_ne!(dy, wrong);
    }

    #[test]
    fn trace_kills_twisted_commutators() {
        let g = DiagonalAction::scalar(vec![Cyclotomic::zeta(3, 1)], 3).unwrap();
        let ops = [
            FormalDiffOp::deriv(1, 0),
            FormalDiffOp::var(1, 0),
            FormalDiffOp::scalar_monomial(1, vec![2], vec![1], Cyclotomic::zeta(3, 2)),
            FormalDiffOp::scalar_monomial(1, vec![1], vec![2], Cyclotomic::from_int(5)),
        ];
        for a in &ops {
            for b in &ops {
                let k = a.twisted_commutator(b, &g).unwrap();
                assert!(gamma_trace(&k, &g).unwrap().value.is_zero());
            }
        }
    }

    // Abel-summation oracle for the closed form: the partial sums
    //   S_K = sum_{j<=K} binom(j, b) b! (t mu)^j
    // evaluated at rational t in (0,1) converge geometrically to
    //   b! (t mu)^b / (1 - t mu)^{b+1},
    // which pins the trace of y^b d^b at t = 1.
    #[test]
    fn abel_summation_oracle() {
        use crate::scalars::rat;
        for (num, den) in [(1i64, 2i64), (2, 3), (3, 4)] {
            for lam in [Cyclotomic::from_int(-1), Cyclotomic::zeta(4, 1), Cyclotomic::zeta(3, 1)] {
                let mu = lam.inv().unwrap();
                let t = Cyclotomic::from_rat(rat(num, den));
                let tmu = &t * &mu;
                for b in 0u32..4 {
                    let mut fact = Rat::one();
                    for j in 1..=b {
                        fact *= rat_int(j as i64);
                    }
                    let closed = {
                        let denom = (&Cyclotomic::one() - &tmu).pow(b + 1).inv().unwrap();
                        (&tmu.pow(b) * &denom).scale(&fact)
                    };
                    // exact partial sums
                    let mut partial = Cyclotomic::zero();
                    let mut pow = Cyclotomic::one();
                    let mut errs = Vec::new();
                    for j in 0..=60u32 {
                        if j >= b {
                            // binom(j, b) * b!
                            let mut c = Rat::one();
                            for r in 0..b {
                                c *= rat_int((j - r) as i64);
                            }
                            partial = &partial + &pow.scale(&c);
                        }
                        pow = &pow * &tmu;
                        if j % 20 == 19 {
                            let err = (&closed - &partial).to_complex().norm();
                            errs.push(err);
                        }
                    }
                    // geometric convergence to the closed form; the tail at
                    // K is C(K,b) b! t^K, so the bound is loose at t = 3/4
                    assert!(errs[2] < 1e-2, "b={} t={}/{} err={}", b, num, den, errs[2]);
                    assert!(errs[0] > errs[1] && errs[1] > errs[2]);
                    assert!(errs[2] < 1e-3 * errs[0].max(1.0));
                }
            }
        }
    }

    #[test]
    fn multiplicativity_across_variables() {
        let g1 = minus_one();
        let g2 = DiagonalAction::scalar(vec![Cyclotomic::zeta(4, 1)], 4).unwrap();
        let g12 = DiagonalAction::scalar(
            vec![Cyclotomic::from_int(-1), Cyclotomic::zeta(4, 1)],
            4,
        )
        .unwrap();
        let a1 = FormalDiffOp::var(1, 0)
            .compose(&FormalDiffOp::deriv(1, 0))
            .unwrap()
            .add(&FormalDiffOp::identity(1, 1));
        let a2 = FormalDiffOp::scalar_monomial(1, vec![2], vec![2], Cyclotomic::from_int(3));
        let joint = a1.tensor(&a2);
        let lhs = gamma_trace(&joint, &g12).unwrap().value;
        let rhs = &gamma_trace(&a1, &g1).unwrap().value * &gamma_trace(&a2, &g2).unwrap().value;
        assert_eq!(lhs, rhs);
    }
}
