use std::fmt::{self, Display};
use std::fs;
use std::path::{Path, PathBuf};

use epfield::connection::{max_curvature_defect, reconstruct, reduce, DiscreteField, ReducedField, FLAT_TOL};
use epfield::harmonic::{conservation_checks, fe_residual_sup, solve, HarmonicProblem, Preset, SolverConfig, SweepOrder};
use epfield::lie::GroupElement;
use epfield::mesh::{Mesh, Vertex};
use epfield::noether::{noether_currents, noether_residuals};
use epfield::par::Execution;
use epfield::variational::{el_residuals, ep_residuals, CovectorMap, LagrangianPair};
use nalgebra::DMatrix;
use thiserror::Error;

use crate::format::{self, FormatError, Payload};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;
pub const EXIT_MALFORMED: i32 = 3;
pub const EXIT_NOT_FLAT: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: FormatError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: expected {expected} file")]
    WrongKind { path: PathBuf, expected: &'static str },
    #[error("invalid argument --{flag}: {reason}")]
    Argument { flag: &'static str, reason: String },
    #[error(transparent)]
    Core(#[from] epfield::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(epfield::Error::NoConvergence { .. } | epfield::Error::DegenerateNeighborSum { .. }) => {
                EXIT_NO_CONVERGENCE
            }
            CliError::Core(epfield::Error::NotFlat { .. }) => EXIT_NOT_FLAT,
            _ => EXIT_MALFORMED,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// `key = value` lines; entries with a verdict count towards the exit status.
#[derive(Debug, Default)]
pub struct Report {
    lines: Vec<(String, String)>,
    failed: Vec<String>,
}

impl Report {
    pub fn info(&mut self, key: &str, value: impl Display) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    /// Records `value` and fails the report when it exceeds `tol`.
    pub fn check(&mut self, key: &str, value: f64, tol: f64) {
        self.info(key, format!("{value:e}"));
        if !(value <= tol) {
            self.failed.push(key.to_string());
        }
    }

    fn residual_map(&mut self, key: &str, map: &CovectorMap, tol: f64) {
        self.check(&format!("{key}_sup"), map.sup_norm(), tol);
        if let Some((v, _)) = map.worst() {
            self.info(&format!("{key}_worst_vertex"), v);
        }
    }

    pub fn passed(&self) -> bool {
        self.failed.is_empty()
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        }
    }
}

impl Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.lines {
            writeln!(f, "{k} = {v}")?;
        }
        writeln!(f, "status = {}", if self.passed() { "ok" } else { "fail" })?;
        if !self.passed() {
            writeln!(f, "failed = {}", self.failed.join(","))?;
        }
        Ok(())
    }
}

/// Thresholds and numerical settings shared by the residual checks.
#[derive(Debug, Clone, Copy)]
pub struct CheckSettings {
    pub residual_tol: f64,
    pub flat_tol: f64,
    pub fd_step: f64,
    pub execution: Execution,
}

impl Default for CheckSettings {
    fn default() -> Self {
        CheckSettings { residual_tol: 1e-8, flat_tol: FLAT_TOL, fd_step: 1e-5, execution: Execution::default() }
    }
}

impl CheckSettings {
    fn pair(&self) -> LagrangianPair<epfield::variational::HarmonicLagrangian> {
        LagrangianPair::harmonic().with_fd_step(self.fd_step).with_execution(self.execution)
    }
}

pub fn read_payload(path: &Path) -> Result<Payload> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    format::parse(&text).map_err(|source| CliError::Format { path: path.into(), source })
}

pub fn read_field(path: &Path) -> Result<DiscreteField> {
    match read_payload(path)? {
        Payload::Field(f) => Ok(f),
        Payload::Connection(_) => Err(CliError::WrongKind { path: path.into(), expected: "a field" }),
    }
}

pub fn read_connection(path: &Path) -> Result<ReducedField> {
    match read_payload(path)? {
        Payload::Connection(c) => Ok(c),
        Payload::Field(_) => Err(CliError::WrongKind { path: path.into(), expected: "a connection" }),
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source })
}

/// Parses `n²` comma-separated numbers, row-major, into a rotation.
pub fn parse_group_element(text: &str, n: usize) -> Result<GroupElement> {
    let bad = |reason: String| CliError::Argument { flag: "base-g0", reason };
    let values = text
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| bad(format!("'{}' is not a number", t.trim()))))
        .collect::<Result<Vec<_>>>()?;
    if values.len() != n * n {
        return Err(bad(format!("expected {} numbers, found {}", n * n, values.len())));
    }
    GroupElement::new(DMatrix::from_row_slice(n, n, &values)).map_err(|e| bad(e.to_string()))
}

/// Where the boundary data of `solve` comes from.
pub enum BoundarySource {
    Preset { preset: Preset, mesh: Mesh, n: usize, seed: u64 },
    File(PathBuf),
}

pub struct SolveArgs {
    pub boundary: BoundarySource,
    pub solver: SolverConfig,
    pub checks: CheckSettings,
    pub out: Option<PathBuf>,
}

pub fn cmd_solve(args: &SolveArgs) -> Result<Report> {
    let problem = match &args.boundary {
        BoundarySource::Preset { preset, mesh, n, seed } => preset.problem(*mesh, *n, *seed)?,
        BoundarySource::File(path) => HarmonicProblem::from_field(&read_field(path)?),
    };
    let solution = solve(&problem, &args.solver)?;
    let text = format::write_field(&solution.field);
    // Every number below is recomputed from the serialised field.
    let field = match &args.out {
        Some(path) => {
            write(path, &text)?;
            read_field(path)?
        }
        None => match format::parse(&text).expect("own output parses") {
            Payload::Field(f) => f,
            Payload::Connection(_) => unreachable!(),
        },
    };
    let mut report = Report::default();
    report.info("sweeps", solution.sweeps);
    report.info(
        "order",
        match args.solver.order {
            SweepOrder::RowMajor => "row-major",
            SweepOrder::RedBlack => "red-black",
        },
    );
    field_checks(&mut report, &field, &args.checks)?;
    Ok(report)
}

fn field_checks(report: &mut Report, field: &DiscreteField, s: &CheckSettings) -> Result<()> {
    let mesh = field.mesh();
    report.info("kind", "field");
    report.info("n", field.dim());
    report.info("width", mesh.width());
    report.info("height", mesh.height());
    let omega = reduce(field);
    report.check("curvature_defect_max", max_curvature_defect(&omega), s.flat_tol);
    let (fe, at) = fe_residual_sup(field, s.execution);
    report.check("fe_residual_sup", fe, s.residual_tol);
    report.info("fe_residual_worst_vertex", at);

    let pair = s.pair();
    report.residual_map("el_residual", &el_residuals(&pair, field), s.residual_tol);
    report.residual_map("ep_residual", &ep_residuals(&pair, &omega), s.residual_tol);
    let currents = noether_currents(&pair, field);
    report.residual_map("noether_residual", &noether_residuals(&currents), s.residual_tol);
    report.info("noether_redundancy_defect", format!("{:e}", currents.redundancy_defect()));

    let c = conservation_checks(field)?;
    report.check("conslaw", c.conslaw, s.residual_tol);
    report.check("mv1", c.mv1, s.residual_tol);
    report.check("mv2", c.mv2, s.residual_tol);
    report.check("epharm", c.epharm, s.residual_tol);
    report.check("codiff", c.codiff, s.residual_tol);
    report.check("integrability", c.integrability, s.flat_tol);
    Ok(())
}

fn connection_checks(report: &mut Report, omega: &ReducedField, s: &CheckSettings) {
    let mesh = omega.mesh();
    report.info("kind", "connection");
    report.info("n", omega.dim());
    report.info("width", mesh.width());
    report.info("height", mesh.height());
    report.check("curvature_defect_max", max_curvature_defect(omega), s.flat_tol);
    report.residual_map("ep_residual", &ep_residuals(&s.pair(), omega), s.residual_tol);
}

pub fn cmd_check(path: &Path, settings: &CheckSettings) -> Result<Report> {
    let mut report = Report::default();
    match read_payload(path)? {
        Payload::Field(field) => field_checks(&mut report, &field, settings)?,
        Payload::Connection(omega) => connection_checks(&mut report, &omega, settings),
    }
    Ok(report)
}

pub fn cmd_reduce(input: &Path, out: &Path) -> Result<Report> {
    let field = read_field(input)?;
    let omega = reduce(&field);
    write(out, &format::write_connection(&omega))?;
    let mut report = Report::default();
    report.info("edges", omega.east_values().len() + omega.north_values().len());
    report.info("curvature_defect_max", format!("{:e}", max_curvature_defect(&read_connection(out)?)));
    Ok(report)
}

/// Rebuilds a field from a flat connection with `φ(0,0) = g0` (identity by default).
pub fn cmd_reconstruct(input: &Path, base_g0: Option<&str>, flat_tol: f64, out: &Path) -> Result<Report> {
    let omega = read_connection(input)?;
    let g0 = match base_g0 {
        Some(text) => parse_group_element(text, omega.dim())?,
        None => GroupElement::identity(omega.dim()),
    };
    let field = reconstruct(&omega, Vertex::new(0, 0), &g0, flat_tol)?;
    write(out, &format::write_field(&field))?;
    let back = reduce(&read_field(out)?);
    let mut report = Report::default();
    report.info("vertices", field.values().len());
    report.info("curvature_defect_max", format!("{:e}", max_curvature_defect(&omega)));
    report.info("reduction_round_trip", format!("{:e}", back.max_distance(&omega)));
    Ok(report)
}
