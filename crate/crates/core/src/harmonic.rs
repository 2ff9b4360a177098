//! Discrete harmonic maps into SO(n): the constrained relaxation
//! `φ_{i,j} ← polar(W_{i,j})`, `W` the sum of the four neighbours, its
//! symmetric multipliers, the discrete momenta, and the conservation checks
//! satisfied by solutions.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::connection::{reduce, DiscreteField, ReducedField};
use crate::error::{Error, Result};
use crate::forms::Cochain;
use crate::lie::{geodesic, polar_project, Covector, GroupElement};
use crate::mesh::{Cell, Mesh, Side, Vertex};
use crate::par::{self, Execution};
use crate::variational::{ExpSide, Lagrangian, LagrangianPair};

/// Relation between the direct momenta and the Legendre covectors of the
/// harmonic `l` under the trace pairing: `M = LEGENDRE_SCALE · μ`.
pub const LEGENDRE_SCALE: f64 = -2.0;

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn antisym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m - m.transpose()) * 0.5
}

/// Dirichlet problem: boundary values on every non-interior vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicProblem {
    mesh: Mesh,
    n: usize,
    boundary: Vec<Option<GroupElement>>,
    /// Lattice spacing. Only recorded: the multipliers absorb `−1/h²`.
    pub spacing: f64,
}

impl HarmonicProblem {
    pub fn new(mesh: Mesh, mut boundary: impl FnMut(Vertex) -> GroupElement) -> Result<Self> {
        let values: Vec<_> = mesh.vertices().map(|v| (!mesh.is_interior(v)).then(|| boundary(v))).collect();
        let n = values.iter().flatten().next().map_or(0, GroupElement::dim);
        if let Some(g) = values.iter().flatten().find(|g| g.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: g.dim() });
        }
        Ok(HarmonicProblem { mesh, n, boundary: values, spacing: 1.0 })
    }

    /// Boundary values taken from a field; interior values are ignored.
    pub fn from_field(field: &DiscreteField) -> Self {
        HarmonicProblem::new(field.mesh(), |v| field.get(v).clone()).expect("field of one dimension")
    }

    pub fn mesh(&self) -> Mesh {
        self.mesh
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn boundary_value(&self, v: Vertex) -> Option<&GroupElement> {
        self.boundary[self.mesh.vertex_index(v)].as_ref()
    }

    /// Problem with boundary `g·(boundary)`.
    pub fn left_translated(&self, g: &GroupElement) -> Self {
        let boundary = self.boundary.iter().map(|b| b.as_ref().map(|x| g * x)).collect();
        HarmonicProblem { boundary, ..self.clone() }
    }

    fn corner(&self, i: usize, j: usize) -> &DMatrix<f64> {
        self.boundary_value(Vertex::new(i, j)).expect("boundary vertex").matrix()
    }

    /// Initial field: boundary values, interior from the bilinearly blended
    /// (Coons) interpolation of the four sides, projected onto SO(n).
    pub fn initial_field(&self) -> DiscreteField {
        let (w, h) = (self.mesh.width() - 1, self.mesh.height() - 1);
        DiscreteField::from_fn(self.mesh, |v| {
            if let Some(b) = self.boundary_value(v) {
                return b.clone();
            }
            let (s, t) = (v.i as f64 / w as f64, v.j as f64 / h as f64);
            let blend = self.corner(v.i, 0) * (1.0 - t)
                + self.corner(v.i, h) * t
                + self.corner(0, v.j) * (1.0 - s)
                + self.corner(w, v.j) * s
                - (self.corner(0, 0) * ((1.0 - s) * (1.0 - t))
                    + self.corner(w, 0) * (s * (1.0 - t))
                    + self.corner(0, h) * ((1.0 - s) * t)
                    + self.corner(w, h) * (s * t));
            polar_project(&blend).unwrap_or_else(|_| GroupElement::identity(self.n))
        })
    }
}

/// Boundary presets for experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    /// A single seeded random rotation on the whole boundary.
    Constant,
    /// Rotation by an angle growing linearly along the perimeter, `turns` full
    /// turns in total, in the first coordinate plane.
    Twist { turns: f64 },
    /// Seeded random rotations at the corners, joined by geodesics along each side.
    RandomSmooth,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(Preset::Constant),
            "twist" => Ok(Preset::Twist { turns: 1.0 }),
            "random-smooth" => Ok(Preset::RandomSmooth),
            other => Err(Error::InvalidInput(format!("unknown preset '{other}' (expected constant, twist or random-smooth)"))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::Constant => f.write_str("constant"),
            Preset::Twist { .. } => f.write_str("twist"),
            Preset::RandomSmooth => f.write_str("random-smooth"),
        }
    }
}

impl Preset {
    pub fn problem(self, mesh: Mesh, n: usize, seed: u64) -> Result<HarmonicProblem> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("group dimension {n} must be at least 2")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match self {
            Preset::Constant => {
                let g = GroupElement::random(n, &mut rng);
                HarmonicProblem::new(mesh, |_| g.clone())
            }
            Preset::Twist { turns } => {
                let (w, h) = (mesh.width() - 1, mesh.height() - 1);
                let perimeter = (2 * (w + h)) as f64;
                HarmonicProblem::new(mesh, |v| {
                    let s = perimeter_position(w, h, v);
                    plane_rotation(n, 2.0 * PI * turns * s / perimeter)
                })
            }
            Preset::RandomSmooth => {
                let corners: Vec<GroupElement> = (0..4).map(|_| GroupElement::random(n, &mut rng)).collect();
                let (w, h) = (mesh.width() - 1, mesh.height() - 1);
                let [c00, c10, c11, c01] = [&corners[0], &corners[1], &corners[2], &corners[3]];
                let mut err = None;
                let p = HarmonicProblem::new(mesh, |v| {
                    let (s, t) = (v.i as f64 / w as f64, v.j as f64 / h as f64);
                    let r = if v.j == 0 {
                        geodesic(c00, c10, s)
                    } else if v.j == h {
                        geodesic(c01, c11, s)
                    } else if v.i == 0 {
                        geodesic(c00, c01, t)
                    } else {
                        geodesic(c10, c11, t)
                    };
                    r.unwrap_or_else(|e| {
                        err = Some(e);
                        GroupElement::identity(n)
                    })
                })?;
                match err {
                    Some(e) => Err(e),
                    None => Ok(p),
                }
            }
        }
    }
}

/// Arclength of a boundary vertex along the anticlockwise perimeter from `(0,0)`.
fn perimeter_position(w: usize, h: usize, v: Vertex) -> f64 {
    let s = if v.j == 0 {
        v.i
    } else if v.i == w {
        w + v.j
    } else if v.j == h {
        w + h + (w - v.i)
    } else {
        2 * w + h + (h - v.j)
    };
    s as f64
}

/// Rotation by `angle` in the plane of the first two coordinates.
pub fn plane_rotation(n: usize, angle: f64) -> GroupElement {
    let mut m = DMatrix::identity(n, n);
    let (s, c) = angle.sin_cos();
    m[(0, 0)] = c;
    m[(0, 1)] = -s;
    m[(1, 0)] = s;
    m[(1, 1)] = c;
    GroupElement::new(m).expect("plane rotation is orthogonal")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepOrder {
    /// In-place Gauss-Seidel, row by row.
    #[default]
    RowMajor,
    /// Checkerboard ordering; each colour is updated concurrently.
    RedBlack,
}

impl FromStr for SweepOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "row-major" => Ok(SweepOrder::RowMajor),
            "red-black" => Ok(SweepOrder::RedBlack),
            other => Err(Error::InvalidInput(format!("unknown sweep order '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_sweeps: usize,
    pub order: SweepOrder,
    pub execution: Execution,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { tol: 1e-10, max_sweeps: 10_000, order: SweepOrder::RowMajor, execution: Execution::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSolution {
    pub field: DiscreteField,
    /// `Λ_{i,j}` at interior vertices.
    pub multipliers: BTreeMap<Vertex, DMatrix<f64>>,
    pub sweeps: usize,
    /// Sup-norm of the field-equation residual at termination.
    pub residual: f64,
}

/// `W_{i,j} = φ_{i+1,j} + φ_{i−1,j} + φ_{i,j+1} + φ_{i,j−1}`.
pub fn neighbor_sum(field: &DiscreteField, v: Vertex) -> DMatrix<f64> {
    let Vertex { i, j } = v;
    field.at(i + 1, j).matrix() + field.at(i - 1, j).matrix() + field.at(i, j + 1).matrix() + field.at(i, j - 1).matrix()
}

fn relax(field: &DiscreteField, v: Vertex) -> Result<GroupElement> {
    polar_project(&neighbor_sum(field, v)).map_err(|e| match e {
        Error::DegenerateNeighborSum { sigma_min, .. } => Error::DegenerateNeighborSum { sigma_min, at: Some(v) },
        other => other,
    })
}

/// One relaxation sweep over the interior.
pub fn sweep(field: &mut DiscreteField, order: SweepOrder, execution: Execution) -> Result<()> {
    let mesh = field.mesh();
    match order {
        SweepOrder::RowMajor => {
            for v in mesh.interior_vertices().collect::<Vec<_>>() {
                let g = relax(field, v)?;
                field.set(v, g);
            }
        }
        SweepOrder::RedBlack => {
            for colour in 0..2 {
                let cells: Vec<Vertex> = mesh.interior_vertices().filter(|v| (v.i + v.j) % 2 == colour).collect();
                let snapshot = &*field;
                let updates = par::map_slice(execution, &cells, |v| relax(snapshot, *v));
                for (v, g) in cells.into_iter().zip(updates) {
                    field.set(v, g?);
                }
            }
        }
    }
    Ok(())
}

/// `Λ_{i,j} = sym(φ_{i,j}ᵀ W_{i,j})` at an interior vertex.
pub fn multiplier(field: &DiscreteField, v: Vertex) -> Result<DMatrix<f64>> {
    check_interior(field.mesh(), v)?;
    Ok(sym(&(field.get(v).matrix().transpose() * neighbor_sum(field, v))))
}

/// Multipliers at all interior vertices.
pub fn multipliers(field: &DiscreteField, execution: Execution) -> BTreeMap<Vertex, DMatrix<f64>> {
    let interior: Vec<Vertex> = field.mesh().interior_vertices().collect();
    let values = par::map_slice(execution, &interior, |v| multiplier(field, *v).expect("interior"));
    interior.into_iter().zip(values).collect()
}

fn check_interior(mesh: Mesh, v: Vertex) -> Result<()> {
    if mesh.contains(v) && mesh.is_interior(v) {
        Ok(())
    } else {
        Err(Error::StencilOverflow(v))
    }
}

/// `W_{i,j} − φ_{i,j}Λ`.
pub fn fe_residual(field: &DiscreteField, lambda: &DMatrix<f64>, v: Vertex) -> Result<DMatrix<f64>> {
    check_interior(field.mesh(), v)?;
    Ok(neighbor_sum(field, v) - field.get(v).matrix() * lambda)
}

/// `max_v ‖W_v − φ_v Λ_v‖_max` with the vertex attaining it, `Λ_v` from [`multiplier`].
pub fn fe_residual_sup(field: &DiscreteField, execution: Execution) -> (f64, Vertex) {
    let interior: Vec<Vertex> = field.mesh().interior_vertices().collect();
    let values = par::map_slice(execution, &interior, |v| {
        let lambda = multiplier(field, *v).expect("interior");
        fe_residual(field, &lambda, *v).expect("interior").amax()
    });
    interior
        .into_iter()
        .zip(values)
        .fold((0.0, Vertex::new(1, 1)), |best, (v, r)| if r > best.0 { (r, v) } else { best })
}

/// Relaxes from the blended initial guess until the field-equation residual
/// is at most `cfg.tol`.
pub fn solve(problem: &HarmonicProblem, cfg: &SolverConfig) -> Result<HarmonicSolution> {
    let mut field = problem.initial_field();
    let mut residual = f64::INFINITY;
    let mut worst = Vertex::new(1, 1);
    let mut sweeps = 0;
    if problem.mesh().interior_vertices().next().is_none() {
        residual = 0.0;
    }
    while residual > cfg.tol && sweeps < cfg.max_sweeps {
        sweep(&mut field, cfg.order, cfg.execution)?;
        sweeps += 1;
        (residual, worst) = fe_residual_sup(&field, cfg.execution);
    }
    if !(residual <= cfg.tol) {
        return Err(Error::NoConvergence { sweeps, residual, worst, tol: cfg.tol });
    }
    let multipliers = multipliers(&field, cfg.execution);
    Ok(HarmonicSolution { field, multipliers, sweeps, residual })
}

/// Discrete momenta on canonical edges, indexed like [`ReducedField`]:
/// `m` on the East edge `(i,j)` is `φ_{i+1,j}φ_{i,j}ᵀ − φ_{i,j}φ_{i+1,j}ᵀ`,
/// `n` on the North edge analogously, and `M = φ_{i,j}ᵀ m φ_{i,j}`,
/// `N = φ_{i,j}ᵀ n φ_{i,j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Momenta {
    mesh: Mesh,
    pub m: Vec<DMatrix<f64>>,
    pub n: Vec<DMatrix<f64>>,
    pub big_m: Vec<DMatrix<f64>>,
    pub big_n: Vec<DMatrix<f64>>,
}

impl Momenta {
    fn east(&self, i: usize, j: usize) -> usize {
        j * (self.mesh.width() - 1) + i
    }

    fn north(&self, i: usize, j: usize) -> usize {
        j * self.mesh.width() + i
    }

    pub fn m_east(&self, i: usize, j: usize) -> &DMatrix<f64> {
        &self.m[self.east(i, j)]
    }

    pub fn n_north(&self, i: usize, j: usize) -> &DMatrix<f64> {
        &self.n[self.north(i, j)]
    }

    pub fn big_m_east(&self, i: usize, j: usize) -> &DMatrix<f64> {
        &self.big_m[self.east(i, j)]
    }

    pub fn big_n_north(&self, i: usize, j: usize) -> &DMatrix<f64> {
        &self.big_n[self.north(i, j)]
    }
}

pub fn momenta(field: &DiscreteField) -> Momenta {
    let mesh = field.mesh();
    let pair = |a: &GroupElement, b: &GroupElement| {
        let (a, b) = (a.matrix(), b.matrix());
        let m = b * a.transpose() - a * b.transpose();
        let big = a.transpose() * &m * a;
        (m, big)
    };
    let (m, big_m) = (0..mesh.east_count())
        .map(|k| {
            let e = mesh.edge_at(k);
            pair(field.get(e.tail()), field.get(e.head()))
        })
        .unzip();
    let (n, big_n) = (mesh.east_count()..mesh.edge_count())
        .map(|k| {
            let e = mesh.edge_at(k);
            pair(field.get(e.tail()), field.get(e.head()))
        })
        .unzip();
    Momenta { mesh, m, n, big_m, big_n }
}

/// `max ‖M − (u − uᵀ)‖` and `‖N − (v − vᵀ)‖` over all edges.
pub fn mv1_residual(momenta: &Momenta, omega: &ReducedField) -> f64 {
    let east = momenta.big_m.iter().zip(omega.east_values()).map(|(big, u)| (big - (u.matrix() - u.matrix().transpose())).amax());
    let north = momenta.big_n.iter().zip(omega.north_values()).map(|(big, v)| (big - (v.matrix() - v.matrix().transpose())).amax());
    east.chain(north).fold(0.0, f64::max)
}

/// Legendre covectors `R*_{u_{i,j}} dl(·, v_{i,j})` and `R*_{v_{i,j}} dl(u_{i,j}, ·)`
/// for every base vertex with both edges present.
pub fn legendre_momenta<L: Lagrangian>(pair: &LagrangianPair<L>, omega: &ReducedField) -> BTreeMap<Vertex, (Covector, Covector)> {
    let mesh = omega.mesh();
    let bases: Vec<Vertex> = mesh.vertices().filter(|v| v.i + 1 < mesh.width() && v.j + 1 < mesh.height()).collect();
    let values = par::map_slice(pair.execution, &bases, |v| {
        let uv = [omega.u(v.i, v.j).clone(), omega.v(v.i, v.j).clone()];
        (pair.reduced_differential(&uv, 0, ExpSide::Left), pair.reduced_differential(&uv, 1, ExpSide::Left))
    });
    bases.into_iter().zip(values).collect()
}

/// `max ‖M − LEGENDRE_SCALE·μ_M‖`, `‖N − LEGENDRE_SCALE·μ_N‖` over the Legendre map.
pub fn legendre_mismatch(momenta: &Momenta, legendre: &BTreeMap<Vertex, (Covector, Covector)>) -> f64 {
    legendre
        .iter()
        .map(|(v, (mu, nu))| {
            let a = (momenta.big_m_east(v.i, v.j) - mu.matrix() * LEGENDRE_SCALE).amax();
            let b = (momenta.big_n_north(v.i, v.j) - nu.matrix() * LEGENDRE_SCALE).amax();
            a.max(b)
        })
        .fold(0.0, f64::max)
}

/// Sup-norm residuals of the structure equations of a harmonic field.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConservationReport {
    /// `m_{i+1,j} + n_{i,j+1} − m_{i,j} − n_{i,j}` at interior vertices.
    pub conslaw: f64,
    /// `M_{i+1,j} + N_{i,j+1} − Ad_{αᵀ}M_{i,j} − Ad_{βᵀ}N_{i,j}`.
    pub mv2: f64,
    /// `antisym(u_{i,j} + v_{i,j} − u_{i−1,j} − v_{i,j−1})`.
    pub epharm: f64,
    /// Antisymmetric part of `δφ` for the reduced field as a matrix 1-form.
    pub codiff: f64,
    /// `u_{i,j}v_{i+1,j}u_{i,j+1}⁻¹v_{i,j}⁻¹ − I` on every face.
    pub integrability: f64,
    /// `M − (α − αᵀ)`, `N − (β − βᵀ)`: an identity for every field.
    pub mv1: f64,
}

impl ConservationReport {
    /// Largest of the residuals that vanish only on solutions.
    pub fn max_equation_residual(&self) -> f64 {
        self.conslaw.max(self.mv2).max(self.epharm).max(self.codiff)
    }
}

/// The reduced field as a primal matrix-valued 1-form.
pub fn reduced_one_form(omega: &ReducedField) -> Cochain<DMatrix<f64>> {
    let n = omega.dim();
    Cochain::from_fn(omega.mesh(), Side::Primal, 1, DMatrix::zeros(n, n), |c| match c {
        Cell::Edge(e) => Some(omega.get(e).expect("edge of the mesh").into_matrix()),
        _ => None,
    })
}

pub fn conservation_checks(field: &DiscreteField) -> Result<ConservationReport> {
    let mesh = field.mesh();
    let omega = reduce(field);
    let mo = momenta(field);
    let n = field.dim();
    let eye = GroupElement::identity(n);
    let mut report = ConservationReport { mv1: mv1_residual(&mo, &omega), ..Default::default() };

    let codiff = reduced_one_form(&omega).codifferential()?;
    for v in mesh.interior_vertices() {
        let Vertex { i, j } = v;
        let cons = mo.m_east(i, j) + mo.n_north(i, j) - mo.m_east(i - 1, j) - mo.n_north(i, j - 1);
        report.conslaw = report.conslaw.max(cons.amax());

        let alpha = omega.u(i - 1, j).matrix();
        let beta = omega.v(i, j - 1).matrix();
        let mv2 = mo.big_m_east(i, j) + mo.big_n_north(i, j)
            - alpha.transpose() * mo.big_m_east(i - 1, j) * alpha
            - beta.transpose() * mo.big_n_north(i, j - 1) * beta;
        report.mv2 = report.mv2.max(mv2.amax());

        let ep = omega.u(i, j).matrix() + omega.v(i, j).matrix() - alpha - beta;
        report.epharm = report.epharm.max(antisym(&ep).amax());

        let delta = codiff.eval(Cell::Vertex(v))?;
        report.codiff = report.codiff.max(antisym(&delta).amax());
    }
    for f in mesh.faces() {
        let Vertex { i, j } = f.base;
        let hol = &(&(omega.u(i, j) * omega.v(i + 1, j)) * &omega.u(i, j + 1).inverse()) * &omega.v(i, j).inverse();
        report.integrability = report.integrability.max(hol.distance(&eye));
    }
    Ok(report)
}
