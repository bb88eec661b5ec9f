use std::fmt;

use serde::{Deserialize, Serialize};

use crate::numerics::DenseMatrix;
use crate::planner::Strategy;
use crate::polytope::HPolytope;

/// A problem file: the system, one task, an optional seed and output options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemSpec>,
    pub task: TaskSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<SeedSpec>,
    #[serde(default)]
    pub output: OutputOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    #[serde(rename = "A")]
    pub a: DenseMatrix,
    #[serde(rename = "B")]
    pub b: DenseMatrix,
    #[serde(rename = "X")]
    pub x: HPolytope,
    #[serde(rename = "U")]
    pub u: HPolytope,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IterateFrom {
    #[default]
    X,
    Seed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskSpec {
    Certify {
        lambda: f64,
    },
    PlanEpsilon {
        epsilon: f64,
        /// Defaults to the seed's rate.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        strategy: Option<Strategy>,
    },
    SelectLambda {
        mu: f64,
        /// Defaults to the seed's rate.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda_star: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        strategy: Option<Strategy>,
    },
    Iterate {
        lambda: f64,
        k: usize,
        #[serde(default)]
        from: IterateFrom,
    },
    Distance {
        #[serde(rename = "C")]
        c: HPolytope,
        #[serde(rename = "D")]
        d: HPolytope,
    },
    Reproduce {
        name: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    Certify,
    PlanEpsilon,
    SelectLambda,
    Iterate,
    Distance,
    Reproduce,
}

impl TaskKind {
    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Certify => "certify",
            TaskKind::PlanEpsilon => "plan-epsilon",
            TaskKind::SelectLambda => "select-lambda",
            TaskKind::Iterate => "iterate",
            TaskKind::Distance => "distance",
            TaskKind::Reproduce => "reproduce",
        }
    }
}

impl TaskSpec {
    pub fn kind(&self) -> TaskKind {
        match self {
            TaskSpec::Certify { .. } => TaskKind::Certify,
            TaskSpec::PlanEpsilon { .. } => TaskKind::PlanEpsilon,
            TaskSpec::SelectLambda { .. } => TaskKind::SelectLambda,
            TaskSpec::Iterate { .. } => TaskKind::Iterate,
            TaskSpec::Distance { .. } => TaskKind::Distance,
            TaskSpec::Reproduce { .. } => TaskKind::Reproduce,
        }
    }
}

/// Either `{"polytope": {H, b}, "lambda": λ}` or
/// `{"ellipsoid": {K, P, beta}, "lambda": λ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polytope: Option<HPolytope>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ellipsoid: Option<EllipsoidSpec>,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EllipsoidSpec {
    #[serde(rename = "K")]
    pub k: DenseMatrix,
    #[serde(rename = "P")]
    pub p: DenseMatrix,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
    #[serde(default)]
    pub svg: bool,
    #[serde(default)]
    pub csv: bool,
}

/// A scenario that failed to parse, with the 1-based position of the fault.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        serde_json::from_str(text).map_err(|e| ParseError {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario values are always serializable")
    }
}
