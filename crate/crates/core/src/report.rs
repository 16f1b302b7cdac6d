//! Machine-readable report rows: exact cyclotomic values paired with decimal
//! embeddings, plus the convention block that makes every number in a report
//! reproducible from the file alone.

use crate::geometry::GroupElement;
use crate::lefschetz::LefschetzReport;
use crate::scalars::Cyclotomic;
use serde::Serialize;

/// A scalar in both exact-string and decimal forms.
#[derive(Clone, Debug, Serialize)]
pub struct ExactValue {
    pub exact: String,
    pub re: f64,
    pub im: f64,
}

impl ExactValue {
    pub fn of(c: &Cyclotomic) -> Self {
        let z = c.to_complex();
        ExactValue {
            exact: c.to_string(),
            re: z.re,
            im: z.im,
        }
    }
}

/// The conventions every report is computed under.
#[derive(Clone, Debug, Serialize)]
pub struct ConventionBlock {
    pub action: &'static str,
    pub transition: &'static str,
    pub fiber_weights: &'static str,
}

pub fn convention_block() -> ConventionBlock {
    ConventionBlock {
        action: "(g.s)(z) = rho s(q z); rotations have q = zeta_N^w",
        transition: "s_inf(v) = v^k s_0(1/v), v = 1/z",
        fiber_weights: "(rho, rho q^k) at (0, inf); rho z0^k at flip points",
    }
}

pub fn describe_element(g: &GroupElement) -> String {
    match g {
        GroupElement::Rot { q, rho } => format!("rot(q={}, rho={})", q, rho),
        GroupElement::Flip { a, rho } => format!("flip(a={}, rho={})", a, rho),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PointRow {
    pub label: String,
    pub contribution: ExactValue,
}

#[derive(Clone, Debug, Serialize)]
pub struct LefschetzRow {
    pub case: String,
    pub gamma: String,
    pub operator: String,
    pub space: String,
    pub lhs: ExactValue,
    pub rhs: ExactValue,
    pub equal: bool,
    pub per_point: Vec<PointRow>,
}

impl LefschetzRow {
    pub fn new(
        case: String,
        gamma: &GroupElement,
        operator: String,
        space: String,
        r: &LefschetzReport,
    ) -> Self {
        LefschetzRow {
            case,
            gamma: describe_element(gamma),
            operator,
            space,
            lhs: ExactValue::of(&r.lhs),
            rhs: ExactValue::of(&r.rhs),
            equal: r.equal,
            per_point: r
                .per_point
                .iter()
                .map(|p| PointRow {
                    label: p.label.clone(),
                    contribution: ExactValue::of(&p.contribution),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyReport {
    pub m: u32,
    pub operator: String,
    pub algebraic_order: String,
    pub is_geometric: bool,
    pub certificate: Vec<ExactValue>,
    pub degree_bound: u32,
    pub order_bound: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct HeatRow {
    pub t: f64,
    pub re: f64,
    pub im: f64,
    pub err: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_value_round_trip() {
        let c = Cyclotomic::zeta(4, 1);
        let v = ExactValue::of(&c);
        assert!((v.im - 1.0).abs() < 1e-12);
        assert!(v.re.abs() < 1e-12);
        assert!(!v.exact.is_empty());
    }

    #[test]
    fn rows_serialize() {
        let row = HeatRow {
            t: 1e-3,
            re: 0.5,
            im: 0.0,
            err: 1e-9,
        };
        let s = serde_json::to_string(&row).unwrap();
        assert!(s.contains("\"t\":0.001"));
    }
}
