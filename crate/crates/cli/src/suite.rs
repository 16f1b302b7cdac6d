//! Suite configuration and runners over the exact verification modules.

use crate::parser::parse_operator;
use lefschetz_core::geometry::{make_cp1, GlobalDiffOp, GroupElement, ModelSpace};
use lefschetz_core::gtrace::{det_factor, gamma_trace, trace_property_check};
use lefschetz_core::heat::{smalltime_limit, HeatConfig};
use lefschetz_core::hochschild::{
    boundary, generator_cycle, hh0_class, is_boundary, BoundaryResult, TwistedChain,
};
use lefschetz_core::lefschetz::{lefschetz_cohomological, lefschetz_fixed_point, verify_theorem};
use lefschetz_core::orbifold::{
    algebraic_order, average_lefschetz, invariant_lefschetz, is_geometric, AlgebraicOrder,
    AverageForm, FiniteGroup, InvariantOperatorProblem,
};
use lefschetz_core::report::{convention_block, ExactValue, HeatRow};
use lefschetz_core::weyl::{DiagonalAction, FormalDiffOp, Monomial};
use lefschetz_core::{CoreError, Cyclotomic};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const SUITE_NAMES: &[&str] = &[
    "lefschetz",
    "averaging",
    "hochschild",
    "gtrace",
    "heat",
    "classify",
];

fn default_weights() -> Vec<i64> {
    vec![1, 2]
}
fn default_orders() -> Vec<u64> {
    vec![2, 3, 4, 6]
}
fn default_operators() -> Vec<String> {
    vec!["d".into(), "z d".into(), "z^2 d^2".into(), "z d z d".into()]
}
fn default_bound() -> u32 {
    6
}
fn default_k_min() -> i64 {
    -3
}
fn default_k_max() -> i64 {
    4
}
fn default_heat_t() -> Vec<f64> {
    vec![4e-3, 2e-3, 1e-3, 5e-4]
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub suites: Vec<String>,
    #[serde(default = "default_k_min")]
    pub k_min: i64,
    #[serde(default = "default_k_max")]
    pub k_max: i64,
    #[serde(default = "default_weights")]
    pub weights: Vec<i64>,
    #[serde(default = "default_orders")]
    pub group_orders: Vec<u64>,
    #[serde(default = "default_operators")]
    pub operators: Vec<String>,
    #[serde(default = "default_bound")]
    pub degree_bound: u32,
    #[serde(default = "default_heat_t")]
    pub heat_t: Vec<f64>,
    /// Negative control: computes the fixed-point side with the wrong
    /// linearization weight, which must fail the comparison.
    #[serde(default)]
    pub wrong_linearization: bool,
    #[serde(default)]
    pub out: Option<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suites: SUITE_NAMES.iter().map(|s| s.to_string()).collect(),
            k_min: default_k_min(),
            k_max: default_k_max(),
            weights: default_weights(),
            group_orders: default_orders(),
            operators: default_operators(),
            degree_bound: default_bound(),
            heat_t: default_heat_t(),
            wrong_linearization: false,
            out: None,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.suites.is_empty() {
            return Err("empty suite list".into());
        }
        for s in &self.suites {
            if !SUITE_NAMES.contains(&s.as_str()) {
                return Err(format!("unknown suite '{}'", s));
            }
        }
        if self.k_min > self.k_max {
            return Err("k_min exceeds k_max".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseResult {
    pub suite: String,
    pub case: String,
    pub pass: bool,
    pub lhs: Option<ExactValue>,
    pub rhs: Option<ExactValue>,
    pub detail: String,
}

impl CaseResult {
    fn ok(suite: &str, case: String) -> Self {
        CaseResult {
            suite: suite.into(),
            case,
            pass: true,
            lhs: None,
            rhs: None,
            detail: String::new(),
        }
    }

    fn with_sides(mut self, lhs: &Cyclotomic, rhs: &Cyclotomic) -> Self {
        self.pass = lhs == rhs;
        if !self.pass {
            self.detail = format!("lhs = {} but rhs = {}", lhs, rhs);
        }
        self.lhs = Some(ExactValue::of(lhs));
        self.rhs = Some(ExactValue::of(rhs));
        self
    }

    fn fail(mut self, detail: String) -> Self {
        self.pass = false;
        self.detail = detail;
        self
    }
}

#[derive(Default)]
pub struct SuiteOutput {
    pub results: Vec<CaseResult>,
    pub heat_rows: Vec<HeatRow>,
}

fn parsed_operators(cfg: &SuiteConfig) -> Result<Vec<(String, FormalDiffOp)>, String> {
    cfg.operators
        .iter()
        .map(|src| {
            parse_operator(src, false)
                .map(|op| (src.clone(), op))
                .map_err(|e| format!("operator '{}': {}", src, e))
        })
        .collect()
}

pub fn run_lefschetz(cfg: &SuiteConfig, out: &mut SuiteOutput) -> Result<(), String> {
    let ops = parsed_operators(cfg)?;
    for k in cfg.k_min..=cfg.k_max {
        for &w in &cfg.weights {
            let s = make_cp1(k, w);
            for &n in &cfg.group_orders {
                let g = s.rotation(n).map_err(|e| e.to_string())?;
                if g.is_identity() {
                    continue;
                }
                for (src, op) in &ops {
                    let d = match GlobalDiffOp::new(op.clone(), &s) {
                        Ok(d) => d,
                        Err(CoreError::NotGlobal) => continue,
                        Err(e) => return Err(e.to_string()),
                    };
                    let case = format!("O({}) w={} N={} op={}", k, w, n, src);
                    let result = if cfg.wrong_linearization {
                        // negative control: fixed-point side at weight w+1
                        let s_bad = make_cp1(k, w + 1);
                        let g_bad = s_bad.rotation(n).map_err(|e| e.to_string())?;
                        let lhs = lefschetz_cohomological(&g, &d, &s).map_err(|e| e.to_string())?;
                        if g_bad.is_identity() {
                            continue;
                        }
                        let rhs = lefschetz_fixed_point(&g_bad, &d, &s)
                            .map_err(|e| e.to_string())?
                            .0;
                        CaseResult::ok("lefschetz", case).with_sides(&lhs, &rhs)
                    } else {
                        let r = verify_theorem(&g, &d, &s).map_err(|e| e.to_string())?;
                        CaseResult::ok("lefschetz", case).with_sides(&r.lhs, &r.rhs)
                    };
                    out.results.push(result);
                }
            }
        }
    }
    Ok(())
}

pub fn run_averaging(cfg: &SuiteConfig, out: &mut SuiteOutput) -> Result<(), String> {
    let mut cases: Vec<(String, ModelSpace, FiniteGroup)> = Vec::new();
    for &n in &cfg.group_orders {
        for k in 0..=4i64 {
            let s = make_cp1(k, 1);
            let g = FiniteGroup::generate(&s, &[s.rotation(n).map_err(|e| e.to_string())?])
                .map_err(|e| e.to_string())?;
            cases.push((format!("Z{} on O({})", n, k), s, g));
        }
    }
    let s0 = make_cp1(0, 1);
    let d4 = FiniteGroup::generate(
        &s0,
        &[
            GroupElement::rot(Cyclotomic::from_int(-1), Cyclotomic::one()),
            GroupElement::flip(Cyclotomic::one(), Cyclotomic::one()),
        ],
    )
    .map_err(|e| e.to_string())?;
    cases.push(("dihedral(4) on O(0)".into(), s0, d4));
    for (name, s, group) in cases {
        let h = GlobalDiffOp::new(
            parse_operator("z d z d", false).map_err(|e| e.to_string())?,
            &s,
        )
        .map_err(|e| e.to_string())?;
        for (opname, d) in [("1", GlobalDiffOp::identity(&s)), ("z d z d", h)] {
            let case = format!("{} op={}", name, opname);
            let inv = invariant_lefschetz(&group, &d, &s).map_err(|e| e.to_string())?;
            let elem =
                average_lefschetz(&group, &d, &s, AverageForm::Elementwise).map_err(|e| e.to_string())?;
            let class =
                average_lefschetz(&group, &d, &s, AverageForm::Classwise).map_err(|e| e.to_string())?;
            let mut r = CaseResult::ok("averaging", case).with_sides(&inv, &elem);
            if r.pass && class != inv {
                r = r.fail(format!("classwise = {} but invariant = {}", class, inv));
            }
            out.results.push(r);
        }
    }
    Ok(())
}

pub fn run_gtrace(out: &mut SuiteOutput) -> Result<(), String> {
    let actions = [
        ("-1", DiagonalAction::scalar(vec![Cyclotomic::from_int(-1)], 2).unwrap()),
        ("i", DiagonalAction::scalar(vec![Cyclotomic::zeta(4, 1)], 4).unwrap()),
        ("zeta3", DiagonalAction::scalar(vec![Cyclotomic::zeta(3, 1)], 3).unwrap()),
    ];
    let monos: Vec<FormalDiffOp> = (0..=2)
        .flat_map(|a| {
            (0..=2).map(move |b| {
                FormalDiffOp::scalar_monomial(1, vec![a], vec![b as u32], Cyclotomic::from_int(2))
            })
        })
        .collect();
    for (lname, g) in &actions {
        for (i, a) in monos.iter().enumerate() {
            for (j, b) in monos.iter().enumerate() {
                let case = format!("law lambda={} pair=({},{})", lname, i, j);
                let ok = trace_property_check(a, b, g).map_err(|e| e.to_string())?;
                let k = a.twisted_commutator(b, g).map_err(|e| e.to_string())?;
                let kz = gamma_trace(&k, g).map_err(|e| e.to_string())?.value.is_zero();
                let r = CaseResult::ok("gtrace", case);
                out.results.push(if ok && kz {
                    r
                } else {
                    r.fail("trace law violated".into())
                });
            }
        }
    }
    for n in 2..=12u64 {
        let g = DiagonalAction::scalar(vec![Cyclotomic::zeta(n, 1)], n as u32).unwrap();
        let tr = gamma_trace(&FormalDiffOp::identity(1, 1), &g).map_err(|e| e.to_string())?;
        let df = det_factor(&g).map_err(|e| e.to_string())?;
        out.results.push(
            CaseResult::ok("gtrace", format!("Tr(1) = det factor at N={}", n))
                .with_sides(&tr.value, &df),
        );
    }
    Ok(())
}

pub fn run_hochschild(cfg: &SuiteConfig, out: &mut SuiteOutput) -> Result<(), String> {
    let g = DiagonalAction::scalar(vec![Cyclotomic::from_int(-1)], 2).unwrap();
    let gi = DiagonalAction::scalar(vec![Cyclotomic::zeta(4, 1)], 4).unwrap();
    // b . b = 0 on a deterministic family
    let mut idx = 0;
    for degree in 1..=3usize {
        for shift in 0..4i64 {
            let mut c = TwistedChain::zero(1, degree);
            let tuple: Vec<Monomial> = (0..=degree)
                .map(|s| Monomial {
                    pos: vec![(s as i64 + shift) % 3],
                    der: vec![(s as u32 + 1) % 2],
                })
                .collect();
            c.add_term(tuple, Cyclotomic::from_int(1 + shift));
            let b = boundary(&c, &g).map_err(|e| e.to_string())?;
            let ok = if b.degree() > 0 {
                boundary(&b, &g).map_err(|e| e.to_string())?.is_zero()
            } else {
                true
            };
            let r = CaseResult::ok("hochschild", format!("b.b = 0 case {}", idx));
            out.results.push(if ok { r } else { r.fail("b.b != 0".into()) });
            idx += 1;
        }
    }
    // hh0 matches the trace ratio
    let samples = [
        "z d",
        "z^2 d^2",
        "z d + 3",
        "z^3 d^3 - z d",
        "2 z^2 d^2 + z d + 1",
    ];
    for src in samples {
        let a = parse_operator(src, false).map_err(|e| e.to_string())?;
        for (lname, twist) in [("-1", &g), ("i", &gi)] {
            let case = format!("hh0 lambda={} op={}", lname, src);
            let class = hh0_class(&a, twist, cfg.degree_bound).map_err(|e| e.to_string())?;
            let tr = gamma_trace(&a, twist).map_err(|e| e.to_string())?;
            let expected = tr
                .value
                .checked_div(&tr.det_factor)
                .map_err(|e| e.to_string())?;
            out.results
                .push(CaseResult::ok("hochschild", case).with_sides(&class, &expected));
        }
    }
    // the generator cycle is closed and not a boundary
    let z = generator_cycle(1, &g);
    let nb = is_boundary(&z, &g, 8).map_err(|e| e.to_string())?;
    let r = CaseResult::ok("hochschild", "generator is not a boundary".into());
    out.results.push(if nb == BoundaryResult::NotBoundary {
        r
    } else {
        r.fail(format!("got {:?}", nb))
    });
    Ok(())
}

pub fn run_heat(cfg: &SuiteConfig, out: &mut SuiteOutput) -> Result<(), String> {
    let mut hc = HeatConfig::default_1d();
    hc.t_schedule = cfg.heat_t.clone();
    hc.validate().map_err(|e| e.to_string())?;
    let phi = hc.ball_cutoff();
    for (lname, lam) in [
        ("-1", Cyclotomic::from_int(-1)),
        ("zeta3", Cyclotomic::zeta(3, 1)),
        ("i", Cyclotomic::zeta(4, 1)),
    ] {
        let g = DiagonalAction::scalar(vec![lam.clone()], 12).unwrap();
        let target = det_factor(&g).map_err(|e| e.to_string())?.to_complex();
        let lc = lam.to_complex();
        let r = smalltime_limit(
            &[Complex64::new(lc.re, lc.im)],
            &phi,
            &hc,
            Complex64::new(target.re, target.im),
            1e-6,
        )
        .map_err(|e| e.to_string())?;
        for (t, v) in &r.values {
            out.heat_rows.push(HeatRow {
                t: *t,
                re: v.re,
                im: v.im,
                err: (v - r.target).norm(),
            });
        }
        let case = format!("small-time limit lambda={}", lname);
        let cr = CaseResult::ok("heat", case);
        out.results.push(if r.pass {
            cr
        } else {
            cr.fail(format!("report: {:?}", r))
        });
    }
    Ok(())
}

pub fn run_classify_suite(out: &mut SuiteOutput) -> Result<(), String> {
    let p = InvariantOperatorProblem::new(
        2,
        parse_operator("(1/z) d", true).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let ord = algebraic_order(&p, 6).map_err(|e| e.to_string())?;
    let geo = is_geometric(&p, 6).map_err(|e| e.to_string())?;
    let r = CaseResult::ok("classify", "(1/z) d: order 1, not geometric".into());
    out.results.push(
        if ord == AlgebraicOrder::Order(1) && !geo.is_geometric() {
            r
        } else {
            r.fail(format!("order = {:?}, geometric = {}", ord, geo.is_geometric()))
        },
    );
    let q = InvariantOperatorProblem::new(2, parse_operator("z d", false).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let r = CaseResult::ok("classify", "z d: geometric".into());
    out.results.push(
        if is_geometric(&q, 6).map_err(|e| e.to_string())?.is_geometric() {
            r
        } else {
            r.fail("z d reported non-geometric".into())
        },
    );
    Ok(())
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteOutput, String> {
    cfg.validate()?;
    let mut out = SuiteOutput::default();
    for s in &cfg.suites {
        match s.as_str() {
            "lefschetz" => run_lefschetz(cfg, &mut out)?,
            "averaging" => run_averaging(cfg, &mut out)?,
            "hochschild" => run_hochschild(cfg, &mut out)?,
            "gtrace" => run_gtrace(&mut out)?,
            "heat" => run_heat(cfg, &mut out)?,
            "classify" => run_classify_suite(&mut out)?,
            _ => unreachable!("validated"),
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct Report<'a> {
    convention: lefschetz_core::report::ConventionBlock,
    cases: &'a [CaseResult],
}

pub fn write_reports(out: &SuiteOutput, path_prefix: &str) -> std::io::Result<()> {
    let report = Report {
        convention: convention_block(),
        cases: &out.results,
    };
    let json = serde_json::to_string_pretty(&report).expect("serializable");
    std::fs::write(format!("{}.json", path_prefix), json)?;
    let mut csv = String::from("suite,case,pass,lhs,rhs,detail\n");
    for r in &out.results {
        csv.push_str(&format!(
            "{},{:?},{},{},{},{:?}\n",
            r.suite,
            r.case,
            r.pass,
            r.lhs.as_ref().map(|v| v.exact.clone()).unwrap_or_default(),
            r.rhs.as_ref().map(|v| v.exact.clone()).unwrap_or_default(),
            r.detail
        ));
    }
    std::fs::write(format!("{}.csv", path_prefix), csv)?;
    if !out.heat_rows.is_empty() {
        let mut hcsv = String::from("t,re,im,err\n");
        for h in &out.heat_rows {
            hcsv.push_str(&format!("{},{},{},{}\n", h.t, h.re, h.im, h.err));
        }
        std::fs::write(format!("{}.heat.csv", path_prefix), hcsv)?;
    }
    Ok(())
}
