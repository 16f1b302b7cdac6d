//! Command-line front end: exact verification suites, operator classification,
//! and the numerical heat-kernel cross-check.

mod parser;
mod suite;

use clap::{Args, Parser, Subcommand};
use lefschetz_core::orbifold::{algebraic_order, is_geometric, AlgebraicOrder, GeometricResult, InvariantOperatorProblem};
use lefschetz_core::report::{ClassifyReport, ExactValue};
use suite::{run_suite, write_reports, SuiteConfig, SuiteOutput, SUITE_NAMES};

#[derive(Parser)]
#[command(name = "lefschetz", about = "Exact equivariant Lefschetz verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one verification suite with optional restrictions
    Verify(VerifyArgs),
    /// Classify an invariant operator on C/Z_m as geometric or not
    Classify(ClassifyArgs),
    /// Run the full suite from a JSON config (or the built-in defaults)
    Suite(SuiteArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// One of: lefschetz, averaging, hochschild, gtrace, heat
    name: String,
    /// Restrict to a single bundle degree
    #[arg(long)]
    k: Option<i64>,
    /// Restrict to a single rotation weight
    #[arg(long)]
    w: Option<i64>,
    /// Restrict to a single cyclic group order
    #[arg(long)]
    group: Option<u64>,
    /// Use only this operator expression
    #[arg(long)]
    op: Option<String>,
    /// Degree bound for Hochschild solves
    #[arg(long)]
    bound: Option<u32>,
    /// Report path prefix (writes PREFIX.json and PREFIX.csv)
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Orbifold order m of C/Z_m
    #[arg(long, default_value_t = 2)]
    m: u32,
    /// Operator expression; (1/z) is allowed here
    #[arg(long)]
    op: String,
    /// Word-length bound for the geometric membership test
    #[arg(long, default_value_t = 6)]
    bound: u32,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct SuiteArgs {
    /// JSON config file; defaults run every suite
    #[arg(long)]
    config: Option<String>,
    /// Report path prefix (overrides the config's `out`)
    #[arg(long)]
    out: Option<String>,
}

fn finish(out: &SuiteOutput, path: Option<&str>) -> i32 {
    if let Some(prefix) = path {
        if let Err(e) = write_reports(out, prefix) {
            eprintln!("error: could not write reports: {}", e);
            return 2;
        }
    }
    let failures: Vec<_> = out.results.iter().filter(|r| !r.pass).collect();
    for f in &failures {
        eprintln!("FAIL [{}] {}: {}", f.suite, f.case, f.detail);
    }
    println!(
        "{} cases, {} passed, {} failed",
        out.results.len(),
        out.results.len() - failures.len(),
        failures.len()
    );
    if failures.is_empty() {
        0
    } else {
        1
    }
}

fn cmd_verify(a: &VerifyArgs) -> i32 {
    if !SUITE_NAMES.contains(&a.name.as_str()) {
        eprintln!("error: unknown suite '{}'", a.name);
        return 2;
    }
    let mut cfg = SuiteConfig::default();
    cfg.suites = vec![a.name.clone()];
    if let Some(k) = a.k {
        cfg.k_min = k;
        cfg.k_max = k;
    }
    if let Some(w) = a.w {
        cfg.weights = vec![w];
    }
    if let Some(n) = a.group {
        cfg.group_orders = vec![n];
    }
    if let Some(op) = &a.op {
        cfg.operators = vec![op.clone()];
    }
    if let Some(b) = a.bound {
        cfg.degree_bound = b;
    }
    match run_suite(&cfg) {
        Ok(out) => finish(&out, a.out.as_deref()),
        Err(e) => {
            eprintln!("error: {}", e);
            2
        }
    }
}

fn cmd_classify(a: &ClassifyArgs) -> i32 {
    let op = match parser::parse_operator(&a.op, true) {
        Ok(op) => op,
        Err(e) => {
            eprintln!("error: {}", e);
            return 2;
        }
    };
    // report the normal-ordered form when it prints cleanly
    let printed = parser::print_operator(&op).unwrap_or_else(|_| a.op.clone());
    let p = match InvariantOperatorProblem::new(a.m, op) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {}", e);
            return 2;
        }
    };
    let ord = match algebraic_order(&p, a.bound.max(1)) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {}", e);
            return 2;
        }
    };
    let geo = match is_geometric(&p, a.bound) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {}", e);
            return 2;
        }
    };
    let (is_geo, cert, order_bound) = match &geo {
        GeometricResult::Geometric { .. } => (true, Vec::new(), a.bound),
        GeometricResult::NotGeometric {
            certificate,
            order_bound,
            ..
        } => (
            false,
            certificate.iter().map(ExactValue::of).collect(),
            *order_bound,
        ),
    };
    let report = ClassifyReport {
        m: a.m,
        operator: printed,
        algebraic_order: match ord {
            AlgebraicOrder::Order(n) => n.to_string(),
            AlgebraicOrder::ExceedsBound => format!("> {}", a.bound),
        },
        is_geometric: is_geo,
        certificate: cert,
        degree_bound: p.degree_bound,
        order_bound,
    };
    let json = serde_json::to_string_pretty(&report).expect("serializable");
    if let Some(path) = &a.out {
        if let Err(e) = std::fs::write(path, json) {
            eprintln!("error: could not write report: {}", e);
            return 2;
        }
    } else {
        println!("{}", json);
    }
    0
}

fn cmd_suite(a: &SuiteArgs) -> i32 {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: could not read config '{}': {}", path, e);
                    return 2;
                }
            };
            match serde_json::from_str::<SuiteConfig>(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: invalid config: {}", e);
                    return 2;
                }
            }
        }
        None => SuiteConfig::default(),
    };
    if let Some(out) = &a.out {
        cfg.out = Some(out.clone());
    }
    if let Err(e) = cfg.validate() {
        eprintln!("error: invalid config: {}", e);
        return 2;
    }
    match run_suite(&cfg) {
        Ok(out) => finish(&out, cfg.out.as_deref()),
        Err(e) => {
            eprintln!("error: {}", e);
            2
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Suite(a) => cmd_suite(a),
    };
    std::process::exit(code);
}
