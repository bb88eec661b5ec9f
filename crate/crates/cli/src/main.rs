use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use contracta_core::cli::{load_scenario, run_reproduce, run_scenario, Outcome, RunError, TaskKind};
use contracta_core::tol;

/// Polyhedral λ-contractive sets for constrained linear systems.
#[derive(Parser)]
#[command(name = "contracta", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Write the report here instead of stdout; SVG and CSV go next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Render the computed planar sets as SVG.
    #[arg(long, global = true)]
    svg: bool,
    /// Emit tables as CSV.
    #[arg(long, global = true)]
    csv: bool,
    /// Feasibility tolerance for every LP-based test.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Contraction certificate at a given rate.
    Certify,
    /// Iteration bound for an ε-approximation.
    Plan,
    /// Choose λ for a μ-approximation of the maximal invariant set.
    SelectLambda,
    /// Iterate the one-step map.
    Iterate,
    /// Distance between two C-sets.
    Distance,
    /// Recompute one of the reference results.
    Reproduce {
        /// table1a, table1b, lambda-selection, rotation-distances or stabilizable
        name: String,
    },
}

impl Command {
    fn kind(&self) -> TaskKind {
        match self {
            Command::Certify => TaskKind::Certify,
            Command::Plan => TaskKind::PlanEpsilon,
            Command::SelectLambda => TaskKind::SelectLambda,
            Command::Iterate => TaskKind::Iterate,
            Command::Distance => TaskKind::Distance,
            Command::Reproduce { .. } => TaskKind::Reproduce,
        }
    }
}

fn sibling(out: Option<&Path>, stem: &str, ext: &str) -> PathBuf {
    match out {
        Some(p) => p.with_extension(ext),
        None => PathBuf::from(format!("{stem}.{ext}")),
    }
}

fn write(path: &Path, text: &str) -> Result<(), RunError> {
    std::fs::write(path, text).map_err(|e| RunError::validation(format!("cannot write {}: {e}", path.display())))
}

fn execute(cli: &Cli) -> Result<(Outcome, Option<String>), RunError> {
    let c = &cli.common;
    if let Some(t) = c.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(RunError::validation(format!("--tol must be positive, got {t}")));
        }
        tol::set_feas(t);
    }
    match (&cli.command, &c.scenario) {
        (Command::Reproduce { name }, None) => Ok((run_reproduce(name, c.svg, c.csv)?, None)),
        (cmd, Some(path)) => {
            let mut s = load_scenario(path)?;
            if s.task.kind() != cmd.kind() {
                return Err(RunError::validation(format!(
                    "subcommand expects a {} task, the scenario holds {}",
                    cmd.kind().name(),
                    s.task.kind().name()
                )));
            }
            if let Command::Reproduce { name } = cmd {
                if let contracta_core::cli::TaskSpec::Reproduce { name: n } = &s.task {
                    if n != name {
                        return Err(RunError::validation(format!("scenario reproduces {n}, not {name}")));
                    }
                }
            }
            s.output.svg |= c.svg;
            s.output.csv |= c.csv;
            let report_path = s.output.report.clone();
            Ok((run_scenario(&s)?, report_path))
        }
        (_, None) => Err(RunError::validation("--scenario <path> is required for this subcommand")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stem = match &cli.command {
        Command::Reproduce { name } => name.clone(),
        cmd => cmd.kind().name().to_string(),
    };
    let result = execute(&cli).and_then(|(outcome, scenario_out)| {
        let out = cli.common.out.clone().or(scenario_out.map(PathBuf::from));
        match &out {
            Some(p) => write(p, &outcome.report.to_json())?,
            None => println!("{}", outcome.report.to_json()),
        }
        if let Some(svg) = &outcome.svg {
            write(&sibling(out.as_deref(), &stem, "svg"), svg)?;
        }
        if let Some(csv) = &outcome.csv {
            write(&sibling(out.as_deref(), &stem, "csv"), csv)?;
        }
        for w in &outcome.report.warnings {
            eprintln!("warning [{}]: {}", w.code, w.message);
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.kind.exit_code() as u8)
        }
    }
}
