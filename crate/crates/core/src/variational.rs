//! Discrete Lagrangians on G³ and their reduced counterparts on G², action
//! sums, and the discrete Euler-Lagrange / Euler-Poincaré residuals.
//!
//! Residuals are covectors in so(n)* (trace pairing), obtained from
//! derivatives along exp-curves: `ExpSide::Left` is the curve `exp(tξ)·g`
//! (tangent `ξg`, the fundamental field of ξ), `ExpSide::Right` is `g·exp(tξ)`.

use nalgebra::DMatrix;

use crate::connection::{DiscreteField, ReducedField};
use crate::error::{Error, Result};
use crate::lie::{directional_derivative, AlgebraElement, Covector, Direction, GroupElement, FD_STEP};
use crate::mesh::{Mesh, Vertex};
use crate::par::{self, Execution};

/// Which side `exp(tξ)` multiplies the group element on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpSide {
    Left,
    Right,
}

impl ExpSide {
    pub fn direction(self, xi: &AlgebraElement) -> Direction {
        match self {
            ExpSide::Left => Direction::Left(xi.clone()),
            ExpSide::Right => Direction::Right(xi.clone()),
        }
    }
}

/// A left-invariant discrete Lagrangian `L(g1, g2, g3)` together with its
/// reduced form `l(u, v) = L(e, u, v)`.
pub trait Lagrangian: Send + Sync {
    fn full(&self, g: &[GroupElement]) -> f64;

    fn reduced(&self, u: &GroupElement, v: &GroupElement) -> f64;

    /// Analytic covector of `ξ ↦ d/dt L` along `side` in slot `slot`, if known.
    fn full_differential(&self, _g: &[GroupElement], _slot: usize, _side: ExpSide) -> Option<Covector> {
        None
    }

    /// Analytic covector of `ξ ↦ d/dt l` along `side` in slot `slot`, if known.
    fn reduced_differential(&self, _uv: &[GroupElement], _slot: usize, _side: ExpSide) -> Option<Covector> {
        None
    }
}

/// `L(g1,g2,g3) = tr(g1ᵀg2) + tr(g1ᵀg3)`, `l(u,v) = tr u + tr v`: the
/// harmonic-map Lagrangian with the multiplier term dropped.
#[derive(Debug, Clone, Copy, Default)]
pub struct HarmonicLagrangian;

fn mat(g: &GroupElement) -> &DMatrix<f64> {
    g.matrix()
}

impl Lagrangian for HarmonicLagrangian {
    fn full(&self, g: &[GroupElement]) -> f64 {
        mat(&g[0]).dot(mat(&g[1])) + mat(&g[0]).dot(mat(&g[2]))
    }

    fn reduced(&self, u: &GroupElement, v: &GroupElement) -> f64 {
        u.trace() + v.trace()
    }

    // A functional ξ ↦ tr(ξX) is the covector with matrix antisym(Xᵀ).
    fn full_differential(&self, g: &[GroupElement], slot: usize, side: ExpSide) -> Option<Covector> {
        let (g1, g2, g3) = (mat(&g[0]), mat(&g[1]), mat(&g[2]));
        let x = match (slot, side) {
            (0, ExpSide::Left) => -(g2 + g3) * g1.transpose(),
            (0, ExpSide::Right) => -g1.transpose() * (g2 + g3),
            (1, ExpSide::Left) => g2 * g1.transpose(),
            (1, ExpSide::Right) => g1.transpose() * g2,
            (2, ExpSide::Left) => g3 * g1.transpose(),
            (2, ExpSide::Right) => g1.transpose() * g3,
            _ => return None,
        };
        Some(Covector::from_matrix(x.transpose()))
    }

    fn reduced_differential(&self, uv: &[GroupElement], slot: usize, _side: ExpSide) -> Option<Covector> {
        uv.get(slot).map(|g| Covector::from_matrix(mat(g).transpose()))
    }
}

/// Builds `L = l ∘ Ψ̂` from a reduced Lagrangian, `Ψ̂(g1,g2,g3) = (g1⁻¹g2, g1⁻¹g3)`.
pub struct FromReduced<F>(pub F);

impl<F> Lagrangian for FromReduced<F>
where
    F: Fn(&GroupElement, &GroupElement) -> f64 + Send + Sync,
{
    fn full(&self, g: &[GroupElement]) -> f64 {
        let inv = g[0].inverse();
        (self.0)(&(&inv * &g[1]), &(&inv * &g[2]))
    }

    fn reduced(&self, u: &GroupElement, v: &GroupElement) -> f64 {
        (self.0)(u, v)
    }
}

/// `Ψ̂(g1, g2, g3) = (g1⁻¹g2, g1⁻¹g3)`.
pub fn psi_hat(g: &[GroupElement]) -> [GroupElement; 2] {
    let inv = g[0].inverse();
    [&inv * &g[1], &inv * &g[2]]
}

/// Inclusive rectangle of base vertices `(i, j)` over which the action is summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    pub i_min: usize,
    pub i_max: usize,
    pub j_min: usize,
    pub j_max: usize,
}

impl Region {
    /// Every vertex whose East and North neighbours exist.
    pub fn full(mesh: Mesh) -> Region {
        Region { i_min: 0, i_max: mesh.width() - 2, j_min: 0, j_max: mesh.height() - 2 }
    }

    pub fn rect(i_min: usize, i_max: usize, j_min: usize, j_max: usize) -> Region {
        Region { i_min, i_max, j_min, j_max }
    }

    pub fn contains(&self, v: Vertex) -> bool {
        (self.i_min..=self.i_max).contains(&v.i) && (self.j_min..=self.j_max).contains(&v.j)
    }

    pub fn len(&self) -> usize {
        (self.i_max + 1).saturating_sub(self.i_min) * (self.j_max + 1).saturating_sub(self.j_min)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (self.j_min..=self.j_max).flat_map(move |j| (self.i_min..=self.i_max).map(move |i| Vertex::new(i, j)))
    }

    fn check(&self, mesh: Mesh) -> Result<()> {
        if self.i_max + 1 >= mesh.width() || self.j_max + 1 >= mesh.height() {
            return Err(Error::RegionOverflow(Vertex::new(self.i_max, self.j_max)));
        }
        Ok(())
    }
}

/// A Lagrangian with the numerical settings used to differentiate it.
#[derive(Debug, Clone)]
pub struct LagrangianPair<L> {
    pub lagrangian: L,
    pub fd_step: f64,
    /// Use the Lagrangian's analytic differentials where it provides them.
    pub analytic: bool,
    /// Action region; `None` means [`Region::full`].
    pub region: Option<Region>,
    pub execution: Execution,
}

impl LagrangianPair<HarmonicLagrangian> {
    pub fn harmonic() -> Self {
        LagrangianPair::new(HarmonicLagrangian)
    }
}

impl<L: Lagrangian> LagrangianPair<L> {
    /// Finite differences with the default step, full region.
    pub fn new(lagrangian: L) -> Self {
        LagrangianPair { lagrangian, fd_step: FD_STEP, analytic: false, region: None, execution: Execution::default() }
    }

    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    pub fn with_analytic(mut self, analytic: bool) -> Self {
        self.analytic = analytic;
        self
    }

    pub fn with_region(mut self, region: Region) -> Self {
        self.region = Some(region);
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn region(&self, mesh: Mesh) -> Region {
        self.region.unwrap_or_else(|| Region::full(mesh))
    }

    pub fn full(&self, g: &[GroupElement]) -> f64 {
        self.lagrangian.full(g)
    }

    pub fn reduced(&self, u: &GroupElement, v: &GroupElement) -> f64 {
        self.lagrangian.reduced(u, v)
    }

    /// Covector of `ξ ↦ d/dt L(…, exp-curve in slot, …)`.
    pub fn full_differential(&self, g: &[GroupElement], slot: usize, side: ExpSide) -> Covector {
        if self.analytic {
            if let Some(mu) = self.lagrangian.full_differential(g, slot, side) {
                return mu;
            }
        }
        let n = g[0].dim();
        Covector::from_functional(n, |xi| {
            directional_derivative(|x| self.lagrangian.full(x), g, slot, &side.direction(xi), self.fd_step)
        })
    }

    /// Covector of `ξ ↦ d/dt l(…, exp-curve in slot, …)`.
    pub fn reduced_differential(&self, uv: &[GroupElement], slot: usize, side: ExpSide) -> Covector {
        if self.analytic {
            if let Some(mu) = self.lagrangian.reduced_differential(uv, slot, side) {
                return mu;
            }
        }
        let n = uv[0].dim();
        Covector::from_functional(n, |xi| {
            directional_derivative(|x| self.lagrangian.reduced(&x[0], &x[1]), uv, slot, &side.direction(xi), self.fd_step)
        })
    }
}

/// The three vertices entering the summand at base vertex `(i, j)`.
pub fn stencil(field: &DiscreteField, i: usize, j: usize) -> [GroupElement; 3] {
    [field.at(i, j).clone(), field.at(i + 1, j).clone(), field.at(i, j + 1).clone()]
}

/// `S(φ) = Σ_{(i,j)∈U} L(φ_{i,j}, φ_{i+1,j}, φ_{i,j+1})`.
pub fn action_sum<L: Lagrangian>(pair: &LagrangianPair<L>, field: &DiscreteField) -> Result<f64> {
    let region = pair.region(field.mesh());
    region.check(field.mesh())?;
    Ok(region.vertices().map(|x| pair.full(&stencil(field, x.i, x.j))).sum())
}

/// `s(ω) = Σ_{(i,j)∈U} l(u_{i,j}, v_{i,j})`.
pub fn reduced_action_sum<L: Lagrangian>(pair: &LagrangianPair<L>, omega: &ReducedField) -> Result<f64> {
    let region = pair.region(omega.mesh());
    region.check(omega.mesh())?;
    Ok(region.vertices().map(|x| pair.reduced(omega.u(x.i, x.j), omega.v(x.i, x.j))).sum())
}

fn check_interior(mesh: Mesh, at: Vertex) -> Result<()> {
    if mesh.contains(at) && mesh.is_interior(at) {
        Ok(())
    } else {
        Err(Error::StencilOverflow(at))
    }
}

/// Euler-Lagrange residual at an interior vertex: the sum of the slot-1, -2
/// and -3 differentials of L on the three summands containing `φ_{i,j}`,
/// taken along `exp(tξ)·φ_{i,j}`. Its pairing with ξ is the derivative of the
/// action under that localized variation.
pub fn el_residual<L: Lagrangian>(pair: &LagrangianPair<L>, field: &DiscreteField, at: Vertex) -> Result<Covector> {
    check_interior(field.mesh(), at)?;
    let Vertex { i, j } = at;
    let a = pair.full_differential(&stencil(field, i, j), 0, ExpSide::Left);
    let b = pair.full_differential(&stencil(field, i - 1, j), 1, ExpSide::Left);
    let c = pair.full_differential(&stencil(field, i, j - 1), 2, ExpSide::Left);
    Ok(a.add(&b).add(&c))
}

/// Euler-Poincaré residual at an interior vertex:
/// `[R*_{u_{i,j}} dl(·, v_{i,j}) − L*_{u_{i−1,j}} dl(·, v_{i−1,j})]
///  + [R*_{v_{i,j}} dl(u_{i,j}, ·) − L*_{v_{i,j−1}} dl(u_{i,j−1}, ·)]`.
pub fn ep_residual<L: Lagrangian>(pair: &LagrangianPair<L>, omega: &ReducedField, at: Vertex) -> Result<Covector> {
    check_interior(omega.mesh(), at)?;
    let Vertex { i, j } = at;
    let here = [omega.u(i, j).clone(), omega.v(i, j).clone()];
    let west = [omega.u(i - 1, j).clone(), omega.v(i - 1, j).clone()];
    let south = [omega.u(i, j - 1).clone(), omega.v(i, j - 1).clone()];
    let du = pair
        .reduced_differential(&here, 0, ExpSide::Left)
        .sub(&pair.reduced_differential(&west, 0, ExpSide::Right));
    let dv = pair
        .reduced_differential(&here, 1, ExpSide::Left)
        .sub(&pair.reduced_differential(&south, 1, ExpSide::Right));
    Ok(du.add(&dv))
}

/// Covectors attached to a set of vertices (primal or dual).
#[derive(Debug, Clone, PartialEq)]
pub struct CovectorMap {
    pub entries: Vec<(Vertex, Covector)>,
}

impl CovectorMap {
    pub fn get(&self, v: Vertex) -> Option<&Covector> {
        self.entries.iter().find(|(x, _)| *x == v).map(|(_, c)| c)
    }

    /// `max_v ‖μ_v‖_max`, with the vertex attaining it.
    pub fn worst(&self) -> Option<(Vertex, f64)> {
        self.entries
            .iter()
            .map(|(v, c)| (*v, c.norm_max()))
            .fold(None, |acc, (v, r)| match acc {
                Some((_, best)) if best >= r => acc,
                _ => Some((v, r)),
            })
    }

    pub fn sup_norm(&self) -> f64 {
        self.worst().map_or(0.0, |(_, r)| r)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// [`el_residual`] at every interior vertex.
pub fn el_residuals<L: Lagrangian>(pair: &LagrangianPair<L>, field: &DiscreteField) -> CovectorMap {
    let interior: Vec<Vertex> = field.mesh().interior_vertices().collect();
    let values = par::map_slice(pair.execution, &interior, |v| {
        el_residual(pair, field, *v).expect("interior vertex")
    });
    CovectorMap { entries: interior.into_iter().zip(values).collect() }
}

/// [`ep_residual`] at every interior vertex.
pub fn ep_residuals<L: Lagrangian>(pair: &LagrangianPair<L>, omega: &ReducedField) -> CovectorMap {
    let interior: Vec<Vertex> = omega.mesh().interior_vertices().collect();
    let values = par::map_slice(pair.execution, &interior, |v| {
        ep_residual(pair, omega, *v).expect("interior vertex")
    });
    CovectorMap { entries: interior.into_iter().zip(values).collect() }
}

/// Tangent vectors `δu`, `δv` (as ambient matrices) induced on a reduced field.
#[derive(Debug, Clone, PartialEq)]
pub struct Variations {
    pub east: Vec<DMatrix<f64>>,
    pub north: Vec<DMatrix<f64>>,
}

impl Variations {
    pub fn max_abs(&self) -> f64 {
        self.east.iter().chain(&self.north).map(|m| m.amax()).fold(0.0, f64::max)
    }
}

/// `δu_{i,j} = u_{i,j}θ_{i+1,j} − θ_{i,j}u_{i,j}` and `δv_{i,j} = v_{i,j}θ_{i,j+1} − θ_{i,j}v_{i,j}`
/// for a variation `θ` (indexed by vertex) vanishing on the boundary.
pub fn induced_variations(omega: &ReducedField, theta: &[AlgebraElement]) -> Result<Variations> {
    let mesh = omega.mesh();
    if theta.len() != mesh.vertex_count() {
        return Err(Error::DimensionMismatch { expected: mesh.vertex_count(), found: theta.len() });
    }
    if let Some(v) = mesh.vertices().find(|v| !mesh.is_interior(*v) && theta[mesh.vertex_index(*v)].norm_max() != 0.0) {
        return Err(Error::BoundaryViolation(v));
    }
    let th = |i: usize, j: usize| theta[mesh.vertex_index(Vertex::new(i, j))].matrix();
    let east = (0..mesh.east_count())
        .map(|k| {
            let e = mesh.edge_at(k);
            let (i, j) = (e.base.i, e.base.j);
            let u = mat(omega.u(i, j));
            u * th(i + 1, j) - th(i, j) * u
        })
        .collect();
    let north = (mesh.east_count()..mesh.edge_count())
        .map(|k| {
            let e = mesh.edge_at(k);
            let (i, j) = (e.base.i, e.base.j);
            let v = mat(omega.v(i, j));
            v * th(i, j + 1) - th(i, j) * v
        })
        .collect();
    Ok(Variations { east, north })
}
