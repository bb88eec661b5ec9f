use std::collections::BTreeMap;

use serde::Serialize;

use crate::certificate::ContractionCertificate;
use crate::error::Result;
use crate::metric::DistanceResult;
use crate::planner::{ApproximationResult, InclusionRecord, IterationPlan, Strategy};
use crate::polytope::{CSetPolytope, HPolytope};

use super::scenario::Scenario;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Warning {
    pub code: String,
    pub message: String,
}

/// A rectangular table, emitted as CSV on request.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        self.rows.push(row.into_iter().collect());
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
    }
}

/// One entry of an iterated sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub sequence: String,
    pub j: usize,
    pub facets: usize,
    /// `[min xᵢ, max xᵢ]` per coordinate.
    pub bounds: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance_to_previous: Option<f64>,
    pub set: HPolytope,
}

impl IterationRecord {
    pub fn of(sequence: &str, j: usize, set: &CSetPolytope, prev: Option<&CSetPolytope>) -> Result<Self> {
        let d = set.dim();
        let mut bounds = Vec::with_capacity(d);
        for i in 0..d {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            let hi = set.support(&e)?;
            e[i] = -1.0;
            let lo = -set.support(&e)?;
            bounds.push([lo, hi]);
        }
        let distance_to_previous = match prev {
            Some(p) => Some(crate::metric::set_distance(p, set)?.distance),
            None => None,
        };
        Ok(Self {
            sequence: sequence.into(),
            j,
            facets: set.num_facets(),
            bounds,
            distance_to_previous,
            set: set.as_polytope().clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproximationSummary {
    pub strategy: Strategy,
    pub lambda: f64,
    pub k_star: usize,
    pub contractive: bool,
    pub terminal: HPolytope,
    pub relations: Vec<InclusionRecord>,
}

impl From<&ApproximationResult> for ApproximationSummary {
    fn from(r: &ApproximationResult) -> Self {
        Self {
            strategy: r.strategy,
            lambda: r.lambda,
            k_star: r.k_star,
            contractive: r.contractive,
            terminal: r.terminal.as_polytope().clone(),
            relations: r.relations.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Report {
    pub task: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_set: Option<HPolytope>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<ContractionCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plan: Option<IterationPlan>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub approximation: Option<ApproximationSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<DistanceResult>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub iterations: Vec<IterationRecord>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub scalars: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub checks: BTreeMap<String, bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tables: Vec<Table>,
    pub warnings: Vec<Warning>,
    pub timing_ms: f64,
}

impl Report {
    pub fn new(task: &str) -> Self {
        Self {
            task: task.into(),
            ..Default::default()
        }
    }

    pub fn scalar(&mut self, name: &str, v: f64) {
        self.scalars.insert(name.into(), v);
    }

    pub fn check(&mut self, name: &str, ok: bool) {
        self.checks.insert(name.into(), ok);
    }

    pub fn warn(&mut self, code: &str, message: &str) {
        self.warnings.push(Warning {
            code: code.into(),
            message: message.into(),
        });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are always serializable")
    }

    /// All tables as CSV, separated by blank lines.
    pub fn to_csv(&self) -> String {
        self.tables.iter().map(Table::to_csv).collect::<Vec<_>>().join("\n")
    }
}
