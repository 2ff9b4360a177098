//! Discrete forms (cochains) on the primal and dual mesh with real or matrix
//! coefficients: pairing with chains, the coboundary `d`, the Hodge star and
//! the codifferential `⋆d⋆`.
//!
//! A cochain stores one value per canonical cell of its grid. Values may be
//! missing: the Hodge star of a dual form is only defined on primal cells that
//! have a dual, so boundary cells of the primal mesh are left undefined and any
//! attempt to read them fails with [`Error::NoDualCell`].

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::mesh::{Cell, Chain, Edge, Grid, Mesh, Side, Vertex};

/// Coefficient group of a cochain. Only the additive (Abelian) structure is used.
pub trait FormValue: Clone + fmt::Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, factor: f64) -> Self;
    fn max_abs(&self) -> f64;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }
}

impl FormValue for f64 {
    fn zero_like(&self) -> f64 {
        0.0
    }
    fn add(&self, other: &f64) -> f64 {
        self + other
    }
    fn scale(&self, factor: f64) -> f64 {
        self * factor
    }
    fn max_abs(&self) -> f64 {
        self.abs()
    }
    fn sub(&self, other: &f64) -> f64 {
        self - other
    }
}

impl FormValue for DMatrix<f64> {
    fn zero_like(&self) -> Self {
        DMatrix::zeros(self.nrows(), self.ncols())
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn scale(&self, factor: f64) -> Self {
        self * factor
    }
    fn max_abs(&self) -> f64 {
        self.amax()
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cochain<V> {
    mesh: Mesh,
    side: Side,
    degree: usize,
    zero: V,
    values: Vec<Option<V>>,
}

impl<V: FormValue> Cochain<V> {
    /// Cochain with every value undefined. `zero` fixes the coefficient shape.
    pub fn undefined(mesh: Mesh, side: Side, degree: usize, zero: V) -> Self {
        let n = mesh.side_grid(side).cell_count(degree);
        let zero = zero.zero_like();
        Cochain { mesh, side, degree, zero, values: vec![None; n] }
    }

    pub fn zeros(mesh: Mesh, side: Side, degree: usize, zero: V) -> Self {
        Self::from_fn(mesh, side, degree, zero, |_| None)
    }

    /// Builds a cochain from its values on canonical cells; `None` from the
    /// closure means zero.
    pub fn from_fn(
        mesh: Mesh,
        side: Side,
        degree: usize,
        zero: V,
        mut f: impl FnMut(Cell) -> Option<V>,
    ) -> Self {
        let grid = mesh.side_grid(side);
        let zero = zero.zero_like();
        let values = (0..grid.cell_count(degree))
            .map(|k| Some(f(grid.cell_at(degree, k)).unwrap_or_else(|| zero.clone())))
            .collect();
        Cochain { mesh, side, degree, zero, values }
    }

    pub fn mesh(&self) -> Mesh {
        self.mesh
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn grid(&self) -> Grid {
        self.mesh.side_grid(self.side)
    }

    pub fn zero_value(&self) -> &V {
        &self.zero
    }

    /// Canonical cells with their values (including undefined ones).
    pub fn entries(&self) -> impl Iterator<Item = (Cell, Option<&V>)> + '_ {
        let grid = self.grid();
        self.values
            .iter()
            .enumerate()
            .map(move |(k, v)| (grid.cell_at(self.degree, k), v.as_ref()))
    }

    pub fn is_defined(&self, cell: Cell) -> bool {
        matches!(self.grid().locate(cell), Some((k, _)) if self.values[k].is_some())
    }

    /// Value on an arbitrarily oriented cell; reversed cells negate.
    pub fn eval(&self, cell: Cell) -> Result<V> {
        if cell.degree() != self.degree {
            return Err(Error::PairingMismatch {
                form: self.describe(),
                chain: cell.to_string(),
            });
        }
        let (k, sign) = self
            .grid()
            .locate(cell)
            .ok_or_else(|| Error::InvalidInput(format!("{cell} is outside the {:?} grid", self.side)))?;
        match &self.values[k] {
            Some(v) if sign > 0 => Ok(v.clone()),
            Some(v) => Ok(v.scale(-1.0)),
            None => Err(Error::NoDualCell(format!("{} is undefined on {cell}", self.describe()))),
        }
    }

    /// Sets the value on `cell`; a reversed cell stores the negated value.
    pub fn set(&mut self, cell: Cell, value: V) -> Result<()> {
        let (k, sign) = self
            .grid()
            .locate(cell)
            .filter(|_| cell.degree() == self.degree)
            .ok_or_else(|| Error::InvalidInput(format!("cannot set {cell} on {}", self.describe())))?;
        self.values[k] = Some(if sign > 0 { value } else { value.scale(-1.0) });
        Ok(())
    }

    fn describe(&self) -> String {
        format!("{:?} {}-form", self.side, self.degree)
    }

    /// The natural pairing `<f, c>`, linear in the chain.
    pub fn pair(&self, chain: &Chain) -> Result<V> {
        if chain.degree() != self.degree || chain.side() != self.side || chain.mesh() != self.mesh {
            return Err(Error::PairingMismatch {
                form: self.describe(),
                chain: format!("{:?} {}-chain", chain.side(), chain.degree()),
            });
        }
        chain.terms().try_fold(self.zero.clone(), |acc, (cell, c)| {
            Ok(acc.add(&self.eval(cell)?.scale(c)))
        })
    }

    /// The coboundary `d`. Undefined inputs propagate to every cell whose
    /// boundary touches them; the coboundary of a 2-form is the (empty) zero
    /// 3-form.
    pub fn coboundary(&self) -> Cochain<V> {
        let mut out = Cochain::undefined(self.mesh, self.side, self.degree + 1, self.zero.clone());
        let grid = self.grid();
        for k in 0..out.values.len() {
            let value = match grid.cell_at(self.degree + 1, k) {
                Cell::Edge(e) => self
                    .eval(Cell::Vertex(e.head()))
                    .and_then(|h| Ok(h.sub(&self.eval(Cell::Vertex(e.tail()))?))),
                Cell::Face(f) => f.boundary_edges().iter().try_fold(self.zero.clone(), |acc, &e| {
                    Ok(acc.add(&self.eval(Cell::Edge(e))?))
                }),
                Cell::Vertex(_) => unreachable!("coboundary never produces 0-forms"),
            };
            out.values[k] = value.ok();
        }
        out
    }

    /// The Hodge star `(⋆α)(*v) = α(v)`, mapping to the opposite side.
    pub fn hodge(&self) -> Cochain<V> {
        let target_side = self.side.opposite();
        let mut out = Cochain::undefined(self.mesh, target_side, 2 - self.degree.min(2), self.zero.clone());
        if self.degree > 2 {
            return out;
        }
        let grid = self.grid();
        let target = self.mesh.side_grid(target_side);
        for (k, value) in self.values.iter().enumerate() {
            let cell = grid.cell_at(self.degree, k);
            let dual = match self.side {
                Side::Primal => self.mesh.dual_cell(cell),
                Side::Dual => self.mesh.primal_cell(cell),
            };
            let (Ok(dual), Some(value)) = (dual, value) else { continue };
            let (t, _) = target.locate(dual.cell).expect("dual cell lies in the target grid");
            out.values[t] = Some(value.scale(f64::from(dual.sign)));
        }
        out
    }

    /// Codifferential `δ = ⋆d⋆`, lowering the degree by one.
    pub fn codifferential(&self) -> Result<Cochain<V>> {
        if self.degree == 0 {
            return Err(Error::DegreeUnderflow { degree: 0 });
        }
        Ok(self.hodge().coboundary().hodge())
    }

    /// Largest entrywise difference over cells defined in both cochains.
    pub fn max_abs_diff(&self, other: &Cochain<V>) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .filter_map(|(a, b)| Some(a.as_ref()?.sub(b.as_ref()?).max_abs()))
            .fold(0.0, f64::max)
    }

    pub fn map<W: FormValue>(&self, zero: W, f: impl Fn(&V) -> W) -> Cochain<W> {
        Cochain {
            mesh: self.mesh,
            side: self.side,
            degree: self.degree,
            zero: zero.zero_like(),
            values: self.values.iter().map(|v| v.as_ref().map(&f)).collect(),
        }
    }

    pub fn linear_combination(&self, a: f64, other: &Cochain<V>, b: f64) -> Cochain<V> {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| Some(x.as_ref()?.scale(a).add(&y.as_ref()?.scale(b))))
            .collect();
        Cochain { values, ..self.clone() }
    }
}

/// Sum of a primal 1-form over the four edges pointing into an interior vertex,
/// `φ(x1,x) + φ(x2,x) + φ(x3,x) + φ(x4,x)`.
pub fn incoming_edge_sum<V: FormValue>(form: &Cochain<V>, x: Vertex) -> Result<V> {
    check_primal(form, 1)?;
    if !form.grid().is_interior(x) {
        return Err(Error::NoDualCell(format!("vertex {x} lacks a full four-edge star")));
    }
    let neighbours = [
        Vertex::new(x.i + 1, x.j),
        Vertex::new(x.i, x.j + 1),
        Vertex::new(x.i - 1, x.j),
        Vertex::new(x.i, x.j - 1),
    ];
    neighbours.iter().try_fold(form.zero_value().clone(), |acc, &y| {
        Ok(acc.add(&form.eval(Cell::Edge(Edge::between(y, x)?))?))
    })
}

/// `ψ(f0) - ψ(f1)` for a primal 2-form, where `f0` is the face whose
/// anticlockwise boundary runs along `edge` and `f1` the face running against it.
pub fn adjacent_face_difference<V: FormValue>(form: &Cochain<V>, edge: Edge) -> Result<V> {
    check_primal(form, 2)?;
    let grid = form.grid();
    let b = edge.base;
    let (along, against) = match edge.kind {
        crate::mesh::EdgeKind::East if b.j >= 1 => ((b.i, b.j), (b.i, b.j - 1)),
        crate::mesh::EdgeKind::North if b.i >= 1 => ((b.i - 1, b.j), (b.i, b.j)),
        _ => return Err(Error::NoDualCell(format!("edge {edge} is on the mesh boundary"))),
    };
    let f0 = crate::mesh::Face::ccw(along.0, along.1);
    let f1 = crate::mesh::Face::ccw(against.0, against.1);
    if !grid.contains_face(f0) || !grid.contains_face(f1) {
        return Err(Error::NoDualCell(format!("edge {edge} is on the mesh boundary")));
    }
    let diff = form.eval(Cell::Face(f0))?.sub(&form.eval(Cell::Face(f1))?);
    Ok(if edge.sign > 0 { diff } else { diff.scale(-1.0) })
}

fn check_primal<V: FormValue>(form: &Cochain<V>, degree: usize) -> Result<()> {
    if form.side() != Side::Primal || form.degree() != degree {
        return Err(Error::InvalidInput(format!(
            "expected a primal {degree}-form, got a {:?} {}-form",
            form.side(),
            form.degree()
        )));
    }
    Ok(())
}
