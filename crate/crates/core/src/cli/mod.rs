//! Scenario files, reports and the reproduction tasks behind the
//! `contracta` command-line tool.

pub mod report;
pub mod reproduce;
pub mod scenario;
pub mod svg;

use std::fmt;
use std::path::Path;
use std::time::Instant;

use crate::certificate::compute_certificate;
use crate::error::Error;
use crate::metric::set_distance;
use crate::onestep::{iterate, SeedLabel, SetSequence, SystemModel};
use crate::planner::{approximate_cmax1, epsilon_plan, select_lambda, ApproximationResult, IterationPlan, Strategy};
use crate::polytope::{validate_cset, CSetPolytope};
use crate::seeds::{accept_user_seed, polytopic_inner_seed, EllipsoidSeed};

pub use report::{Report, Table, Warning};
pub use reproduce::{reproduce, Reproduction, REPRODUCE_NAMES};
pub use scenario::{Scenario, SeedSpec, SystemSpec, TaskKind, TaskSpec};
pub use svg::render_svg;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Validation,
    Computation,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Parse => 2,
            ErrorKind::Validation => 3,
            ErrorKind::Computation => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunError {
    pub kind: ErrorKind,
    pub message: String,
}

impl RunError {
    pub fn parse(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Parse,
            message: message.into(),
        }
    }

    pub fn validation(e: impl fmt::Display) -> Self {
        Self {
            kind: ErrorKind::Validation,
            message: e.to_string(),
        }
    }

    fn computation(op: &str) -> impl Fn(Error) -> Self + '_ {
        move |e| Self {
            kind: ErrorKind::Computation,
            message: format!("{op}: {e}"),
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ErrorKind::Parse => "parse error",
            ErrorKind::Validation => "validation error",
            ErrorKind::Computation => "computation error",
        };
        write!(f, "{kind}: {}", self.message)
    }
}

impl std::error::Error for RunError {}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub svg: Option<String>,
    pub csv: Option<String>,
}

pub fn load_scenario(path: &Path) -> Result<Scenario, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::parse(format!("{}: {e}", path.display())))?;
    Scenario::parse(&text).map_err(|e| RunError::parse(format!("{}: {e}", path.display())))
}

pub fn run_reproduce(name: &str, svg: bool, csv: bool) -> Result<Outcome, RunError> {
    if !REPRODUCE_NAMES.contains(&name) {
        return Err(RunError::validation(format!(
            "unknown reproduction '{name}', expected one of {}",
            REPRODUCE_NAMES.join(", ")
        )));
    }
    let start = Instant::now();
    let Reproduction { mut report, svg: drawing } = reproduce(name).map_err(RunError::computation(name))?;
    report.timing_ms = start.elapsed().as_secs_f64() * 1e3;
    let csv = csv.then(|| report.to_csv());
    Ok(Outcome {
        report,
        svg: if svg { drawing } else { None },
        csv,
    })
}

fn build_system(s: &Scenario) -> Result<SystemModel, RunError> {
    let spec = s
        .system
        .as_ref()
        .ok_or_else(|| RunError::validation("this task needs a \"system\" block"))?;
    SystemModel::from_polytopes(spec.a.clone(), spec.b.clone(), spec.x.clone(), spec.u.clone()).map_err(RunError::validation)
}

/// The seed set and the rate it is certified for.
fn build_seed(sys: &SystemModel, s: &Scenario, report: &mut Report) -> Result<(CSetPolytope, f64), RunError> {
    let spec = s
        .seed
        .as_ref()
        .ok_or_else(|| RunError::validation("this task needs a \"seed\" block"))?;
    let out = match (&spec.polytope, &spec.ellipsoid) {
        (Some(p), None) => {
            let c = validate_cset(p.clone()).map_err(RunError::validation)?;
            (accept_user_seed(sys, spec.lambda, &c).map_err(RunError::validation)?, spec.lambda)
        }
        (None, Some(e)) => {
            let seed = EllipsoidSeed {
                k: e.k.clone(),
                p: e.p.clone(),
                beta: e.beta,
                lambda: spec.lambda,
            };
            let (c, lam) = polytopic_inner_seed(sys, &seed).map_err(RunError::validation)?;
            if lam > spec.lambda {
                report.warn(
                    "seed-rate-inflated",
                    &format!("polytopic seed is certified for lambda = {lam}, above the ellipsoid's {}", spec.lambda),
                );
            }
            (c, lam)
        }
        _ => return Err(RunError::validation("seed needs exactly one of \"polytope\" or \"ellipsoid\"")),
    };
    report.seed_set = Some(out.0.as_polytope().clone());
    report.seed_lambda = Some(out.1);
    Ok(out)
}

fn record_sequence(report: &mut Report, name: &str, seq: &SetSequence) -> Result<(), RunError> {
    for (j, e) in seq.entries.iter().enumerate() {
        let prev = j.checked_sub(1).map(|p| &seq.entries[p]);
        let rec = report::IterationRecord::of(name, j, e, prev).map_err(RunError::computation("iteration record"))?;
        report.iterations.push(rec);
    }
    Ok(())
}

fn record_plan(report: &mut Report, plan: &IterationPlan) {
    report.scalar("lambda", plan.lambda);
    report.scalar("k", plan.k as f64);
    report.scalar("delta", plan.delta);
    report.scalar("d_cx", plan.d_cx);
    report.scalar("eta", plan.eta);
    if let Some(sel) = &plan.selection {
        report.scalar("lambda_star", sel.lambda_star);
        report.scalar("branch_value", sel.branch_value);
        report.scalar("conservatism_ratio", sel.conservatism_ratio(plan.lambda));
    }
    report.certificate = Some(plan.certificate);
    report.plan = Some(plan.clone());
}

fn record_approximation(report: &mut Report, res: &ApproximationResult) -> Result<Vec<CSetPolytope>, RunError> {
    report.scalar("k_star", res.k_star as f64);
    record_sequence(report, "from_x", &res.from_x)?;
    record_sequence(report, "from_c", &res.from_c)?;
    report.approximation = Some(res.into());
    Ok(vec![
        res.from_x.entries[0].clone(),
        res.from_x.last().clone(),
        res.terminal.clone(),
        res.from_c.entries[0].clone(),
    ])
}

fn plan_and_approximate(
    sys: &SystemModel,
    plan: IterationPlan,
    c: &CSetPolytope,
    strategy: Option<Strategy>,
    report: &mut Report,
) -> Result<Vec<CSetPolytope>, RunError> {
    record_plan(report, &plan);
    match strategy {
        Some(st) => {
            let res = approximate_cmax1(sys, &plan, c, st).map_err(RunError::computation("approximate_cmax1"))?;
            record_approximation(report, &res)
        }
        None => Ok(vec![sys.x().clone(), c.clone()]),
    }
}

/// Execute the scenario's task.
pub fn run_scenario(s: &Scenario) -> Result<Outcome, RunError> {
    if let TaskSpec::Reproduce { name } = &s.task {
        let mut out = run_reproduce(name, s.output.svg, s.output.csv)?;
        out.report.scenario = Some(s.clone());
        return Ok(out);
    }
    let start = Instant::now();
    let mut report = Report::new(s.task.kind().name());
    report.scenario = Some(s.clone());

    let drawn: Vec<CSetPolytope> = match &s.task {
        TaskSpec::Distance { c, d } => {
            let c = validate_cset(c.clone()).map_err(RunError::validation)?;
            let d = validate_cset(d.clone()).map_err(RunError::validation)?;
            if c.dim() != d.dim() {
                return Err(RunError::validation("distance operands differ in dimension"));
            }
            let r = set_distance(&c, &d).map_err(RunError::computation("set_distance"))?;
            report.scalar("distance", r.distance);
            report.scalar("mu_out", r.mu_out);
            report.scalar("mu_in", r.mu_in);
            report.distance = Some(r);
            vec![c, d]
        }
        task => {
            let sys = build_system(s)?;
            if s.output.svg && sys.n() != 2 {
                return Err(RunError::validation(format!("SVG output needs a planar system, got n = {}", sys.n())));
            }
            report.check("controllable", sys.controllable());
            match task {
                TaskSpec::Certify { lambda } => {
                    let cert = compute_certificate(&sys, *lambda).map_err(RunError::computation("compute_certificate"))?;
                    for (k, v) in [
                        ("lambda", cert.lambda),
                        ("r_x_lo", cert.r_x_lo),
                        ("r_x_hi", cert.r_x_hi),
                        ("r_u_lo", cert.r_u_lo),
                        ("alpha", cert.alpha),
                        ("sigma_min", cert.sigma_min),
                        ("sigma_max", cert.sigma_max),
                        ("rho_hat", cert.rho_hat),
                        ("eta", cert.eta),
                    ] {
                        report.scalar(k, v);
                    }
                    report.certificate = Some(cert);
                    vec![sys.x().clone()]
                }
                TaskSpec::PlanEpsilon { epsilon, lambda, strategy } => {
                    let (c, seed_lambda) = build_seed(&sys, s, &mut report)?;
                    let lam = lambda.unwrap_or(seed_lambda);
                    let plan = epsilon_plan(&sys, lam, &c, *epsilon).map_err(RunError::computation("epsilon_plan"))?;
                    plan_and_approximate(&sys, plan, &c, *strategy, &mut report)?
                }
                TaskSpec::SelectLambda { mu, lambda_star, strategy } => {
                    let (c, seed_lambda) = build_seed(&sys, s, &mut report)?;
                    let lam = lambda_star.unwrap_or(seed_lambda);
                    let plan = select_lambda(&sys, lam, &c, *mu).map_err(RunError::computation("select_lambda"))?;
                    plan_and_approximate(&sys, plan, &c, *strategy, &mut report)?
                }
                TaskSpec::Iterate { lambda, k, from } => {
                    let (d, label) = match from {
                        scenario::IterateFrom::X => (sys.x().clone(), SeedLabel::FromX),
                        scenario::IterateFrom::Seed => (build_seed(&sys, s, &mut report)?.0, SeedLabel::FromSeedC),
                    };
                    let seq = iterate(&sys, *lambda, &d, *k, label).map_err(RunError::computation("iterate"))?;
                    record_sequence(&mut report, "sequence", &seq)?;
                    seq.entries
                }
                TaskSpec::Distance { .. } | TaskSpec::Reproduce { .. } => unreachable!("handled above"),
            }
        }
    };

    if report.tables.is_empty() {
        if report.iterations.is_empty() {
            let mut t = Table::new("values", &["quantity", "value"]);
            for (k, v) in &report.scalars {
                t.push([k.clone(), v.to_string()]);
            }
            report.tables.push(t);
        } else {
            let d = report.iterations[0].bounds.len();
            let mut cols = vec!["sequence".to_string(), "j".into(), "facets".into(), "distance_to_previous".into()];
            for i in 0..d {
                cols.push(format!("lo{i}"));
                cols.push(format!("hi{i}"));
            }
            let mut t = Table {
                name: "iterations".into(),
                columns: cols,
                rows: Vec::new(),
            };
            for rec in &report.iterations {
                let mut row = vec![
                    rec.sequence.clone(),
                    rec.j.to_string(),
                    rec.facets.to_string(),
                    rec.distance_to_previous.map(|v| v.to_string()).unwrap_or_default(),
                ];
                for b in &rec.bounds {
                    row.push(b[0].to_string());
                    row.push(b[1].to_string());
                }
                t.rows.push(row);
            }
            report.tables.push(t);
        }
    }

    let svg = if s.output.svg {
        Some(render_svg(&drawn).map_err(RunError::validation)?)
    } else {
        None
    };
    report.timing_ms = start.elapsed().as_secs_f64() * 1e3;
    let csv = s.output.csv.then(|| report.to_csv());
    Ok(Outcome { report, svg, csv })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
  "system": {
    "A": [[1.1]], "B": [[1.0]],
    "X": {"H": [[1.0], [-1.0]], "b": [10.0, 10.0]},
    "U": {"H": [[1.0], [-1.0]], "b": [1.0, 1.0]}
  },
  "seed": {"polytope": {"H": [[1.0], [-1.0]], "b": [2.0, 2.0]}, "lambda": 0.98},
  TASK
}"#;

    fn run(task: &str) -> Result<Outcome, RunError> {
        run_scenario(&Scenario::parse(&BASE.replace("TASK", task)).unwrap())
    }

    #[test]
    fn certify_reports_eta() {
        let out = run(r#""task": {"certify": {"lambda": 0.8}}"#).unwrap();
        assert!((out.report.scalars["eta"] - 10.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn select_lambda_pipeline() {
        let out = run(r#""task": {"select-lambda": {"mu": 0.8333333333333334, "strategy": "adaptive-inclusion"}}"#).unwrap();
        let s = &out.report.scalars;
        assert_eq!(s["k"], 30.0);
        assert!((s["lambda"] - 0.9971).abs() < 5e-4);
        assert_eq!(s["k_star"], 23.0);
    }

    #[test]
    fn error_classes() {
        let e = run(r#""task": {"certify": {"lambda": 1.5}}"#).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Computation);
        let bad_seed = BASE
            .replace("\"b\": [2.0, 2.0]}, \"lambda\": 0.98", "\"b\": [2.0, 2.0]}, \"lambda\": 0.5")
            .replace("TASK", r#""task": {"plan-epsilon": {"epsilon": 0.1}}"#);
        let e = run_scenario(&Scenario::parse(&bad_seed).unwrap()).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Validation);
        assert_eq!(run_reproduce("nope", false, false).unwrap_err().kind, ErrorKind::Validation);
        let svg_1d = BASE.replace("TASK", r#""task": {"certify": {"lambda": 0.8}}, "output": {"svg": true}"#);
        assert_eq!(run_scenario(&Scenario::parse(&svg_1d).unwrap()).unwrap_err().kind, ErrorKind::Validation);
    }

    #[test]
    fn iterate_records_every_entry() {
        let out = run(r#""task": {"iterate": {"lambda": 0.8, "k": 3}}, "output": {"csv": true}"#).unwrap();
        assert_eq!(out.report.iterations.len(), 4);
        let csv = out.csv.unwrap();
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn rerun_reproduces_numbers() {
        let task = r#""task": {"plan-epsilon": {"epsilon": 0.05, "lambda": 0.8, "strategy": "apriori-bound"}}"#;
        let a = run(task).unwrap().report;
        let b = run_scenario(a.scenario.as_ref().unwrap()).unwrap().report;
        assert_eq!(a.scalars, b.scalars);
        assert_eq!(a.iterations, b.iterations);
    }
}
