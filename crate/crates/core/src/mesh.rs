//! Finite rectangular windows of the square lattice, their circumcentric duals,
//! real chains and the boundary and duality operators on them.
//!
//! Cells are stored by canonical representative: East edges `(i,j)->(i+1,j)`,
//! North edges `(i,j)->(i,j+1)` and counter-clockwise faces keyed by their
//! bottom-left vertex. Every other orientation is a sign on the canonical cell.
//!
//! The dual of an `w x h` mesh is the `(w-1) x (h-1)` grid of face centres. Dual
//! vertex `(a,b)` sits at `(a+1/2, b+1/2)`, so it is the centre of primal face
//! `(a,b)`, and dual face `(a,b)` surrounds primal vertex `(a+1,b+1)`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    pub i: usize,
    pub j: usize,
}

impl Vertex {
    pub const fn new(i: usize, j: usize) -> Self {
        Vertex { i, j }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    East,
    North,
}

/// Primal or dual side of the complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Primal,
    Dual,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Primal => Side::Dual,
            Side::Dual => Side::Primal,
        }
    }
}

/// An oriented edge: a canonical edge plus a sign. `sign = -1` is the reverse
/// edge `(head, tail)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub base: Vertex,
    pub kind: EdgeKind,
    pub sign: i8,
}

impl Edge {
    pub const fn east(i: usize, j: usize) -> Self {
        Edge { base: Vertex::new(i, j), kind: EdgeKind::East, sign: 1 }
    }

    pub const fn north(i: usize, j: usize) -> Self {
        Edge { base: Vertex::new(i, j), kind: EdgeKind::North, sign: 1 }
    }

    /// The edge running from `tail` to `head`, if they are lattice neighbours.
    pub fn between(tail: Vertex, head: Vertex) -> Result<Edge> {
        let (ti, tj) = (tail.i as i64, tail.j as i64);
        let (hi, hj) = (head.i as i64, head.j as i64);
        match (hi - ti, hj - tj) {
            (1, 0) => Ok(Edge::east(tail.i, tail.j)),
            (-1, 0) => Ok(Edge::east(head.i, head.j).reversed()),
            (0, 1) => Ok(Edge::north(tail.i, tail.j)),
            (0, -1) => Ok(Edge::north(head.i, head.j).reversed()),
            _ => Err(Error::NotAdjacent { tail, head }),
        }
    }

    pub fn reversed(self) -> Edge {
        Edge { sign: -self.sign, ..self }
    }

    pub fn canonical(self) -> Edge {
        Edge { sign: 1, ..self }
    }

    fn far_end(self) -> Vertex {
        match self.kind {
            EdgeKind::East => Vertex::new(self.base.i + 1, self.base.j),
            EdgeKind::North => Vertex::new(self.base.i, self.base.j + 1),
        }
    }

    pub fn tail(self) -> Vertex {
        if self.sign > 0 {
            self.base
        } else {
            self.far_end()
        }
    }

    pub fn head(self) -> Vertex {
        if self.sign > 0 {
            self.far_end()
        } else {
            self.base
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.tail(), self.head())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Ccw,
    Cw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Face {
    pub base: Vertex,
    pub orientation: Orientation,
}

impl Face {
    pub const fn ccw(i: usize, j: usize) -> Self {
        Face { base: Vertex::new(i, j), orientation: Orientation::Ccw }
    }

    pub fn reversed(self) -> Face {
        let orientation = match self.orientation {
            Orientation::Ccw => Orientation::Cw,
            Orientation::Cw => Orientation::Ccw,
        };
        Face { orientation, ..self }
    }

    pub fn sign(self) -> i8 {
        match self.orientation {
            Orientation::Ccw => 1,
            Orientation::Cw => -1,
        }
    }

    /// The four boundary edges as a closed path starting and ending at the base vertex.
    pub fn boundary_edges(self) -> [Edge; 4] {
        let Vertex { i, j } = self.base;
        let ccw = [
            Edge::east(i, j),
            Edge::north(i + 1, j),
            Edge::east(i, j + 1).reversed(),
            Edge::north(i, j).reversed(),
        ];
        match self.orientation {
            Orientation::Ccw => ccw,
            Orientation::Cw => [
                ccw[3].reversed(),
                ccw[2].reversed(),
                ccw[1].reversed(),
                ccw[0].reversed(),
            ],
        }
    }

    /// Corners in traversal order, starting at the base vertex.
    pub fn corners(self) -> [Vertex; 4] {
        self.boundary_edges().map(|e| e.tail())
    }
}

/// Any cell of the complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Vertex(Vertex),
    Edge(Edge),
    Face(Face),
}

impl Cell {
    pub fn degree(self) -> usize {
        match self {
            Cell::Vertex(_) => 0,
            Cell::Edge(_) => 1,
            Cell::Face(_) => 2,
        }
    }

    /// Canonical representative and the sign relating `self` to it.
    pub fn canonical(self) -> (Cell, i8) {
        match self {
            Cell::Vertex(v) => (Cell::Vertex(v), 1),
            Cell::Edge(e) => (Cell::Edge(e.canonical()), e.sign),
            Cell::Face(f) => (Cell::Face(Face::ccw(f.base.i, f.base.j)), f.sign()),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Vertex(v) => write!(f, "vertex {v}"),
            Cell::Edge(e) => write!(f, "edge {e}"),
            Cell::Face(face) => write!(f, "{:?} face at {}", face.orientation, face.base),
        }
    }
}

/// A cell together with a sign, as produced by the duality operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignedCell {
    pub sign: i8,
    pub cell: Cell,
}

/// Cell enumeration for a `width x height` grid of vertices. Both the primal
/// mesh and its dual are grids; only the primal one must be at least 2x2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    pub width: usize,
    pub height: usize,
}

impl Grid {
    pub fn vertex_count(&self) -> usize {
        self.width * self.height
    }

    pub fn east_count(&self) -> usize {
        self.width.saturating_sub(1) * self.height
    }

    pub fn north_count(&self) -> usize {
        self.width * self.height.saturating_sub(1)
    }

    pub fn edge_count(&self) -> usize {
        self.east_count() + self.north_count()
    }

    pub fn face_count(&self) -> usize {
        self.width.saturating_sub(1) * self.height.saturating_sub(1)
    }

    pub fn cell_count(&self, degree: usize) -> usize {
        match degree {
            0 => self.vertex_count(),
            1 => self.edge_count(),
            2 => self.face_count(),
            _ => 0,
        }
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v.i < self.width && v.j < self.height
    }

    pub fn contains_edge(&self, e: Edge) -> bool {
        match e.kind {
            EdgeKind::East => e.base.i + 1 < self.width && e.base.j < self.height,
            EdgeKind::North => e.base.i < self.width && e.base.j + 1 < self.height,
        }
    }

    pub fn contains_face(&self, f: Face) -> bool {
        f.base.i + 1 < self.width && f.base.j + 1 < self.height
    }

    pub fn contains_cell(&self, c: Cell) -> bool {
        match c {
            Cell::Vertex(v) => self.contains(v),
            Cell::Edge(e) => self.contains_edge(e),
            Cell::Face(f) => self.contains_face(f),
        }
    }

    /// Vertices with all four lattice neighbours inside the grid.
    pub fn is_interior(&self, v: Vertex) -> bool {
        v.i >= 1 && v.j >= 1 && v.i + 1 < self.width && v.j + 1 < self.height
    }

    pub fn vertex_index(&self, v: Vertex) -> usize {
        debug_assert!(self.contains(v));
        v.j * self.width + v.i
    }

    pub fn vertex_at(&self, index: usize) -> Vertex {
        Vertex::new(index % self.width, index / self.width)
    }

    /// Index of the canonical edge underlying `e` (orientation ignored). East
    /// edges come first, then North edges.
    pub fn edge_index(&self, e: Edge) -> usize {
        debug_assert!(self.contains_edge(e));
        match e.kind {
            EdgeKind::East => e.base.j * (self.width - 1) + e.base.i,
            EdgeKind::North => self.east_count() + e.base.j * self.width + e.base.i,
        }
    }

    pub fn edge_at(&self, index: usize) -> Edge {
        let east = self.east_count();
        if index < east {
            let w = self.width - 1;
            Edge::east(index % w, index / w)
        } else {
            let k = index - east;
            Edge::north(k % self.width, k / self.width)
        }
    }

    pub fn face_index(&self, f: Face) -> usize {
        debug_assert!(self.contains_face(f));
        f.base.j * (self.width - 1) + f.base.i
    }

    pub fn face_at(&self, index: usize) -> Face {
        let w = self.width - 1;
        Face::ccw(index % w, index / w)
    }

    /// Canonical index of `cell` and the sign relating it to its canonical cell.
    pub fn locate(&self, cell: Cell) -> Option<(usize, i8)> {
        if !self.contains_cell(cell) {
            return None;
        }
        Some(match cell {
            Cell::Vertex(v) => (self.vertex_index(v), 1),
            Cell::Edge(e) => (self.edge_index(e), e.sign),
            Cell::Face(f) => (self.face_index(f), f.sign()),
        })
    }

    pub fn cell_at(&self, degree: usize, index: usize) -> Cell {
        match degree {
            0 => Cell::Vertex(self.vertex_at(index)),
            1 => Cell::Edge(self.edge_at(index)),
            _ => Cell::Face(self.face_at(index)),
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.vertex_count()).map(move |k| self.vertex_at(k))
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.edge_count()).map(move |k| self.edge_at(k))
    }

    pub fn faces(&self) -> impl Iterator<Item = Face> + '_ {
        (0..self.face_count()).map(move |k| self.face_at(k))
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.vertices().filter(move |v| self.is_interior(*v))
    }
}

/// The primal mesh: a rectangular window of `width x height` lattice vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mesh {
    grid: Grid,
}

impl Mesh {
    pub fn new(width: usize, height: usize) -> Result<Mesh> {
        if width < 2 || height < 2 {
            return Err(Error::InvalidDimensions { width, height });
        }
        Ok(Mesh { grid: Grid { width, height } })
    }

    pub fn width(&self) -> usize {
        self.grid.width
    }

    pub fn height(&self) -> usize {
        self.grid.height
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn dual(&self) -> DualMesh {
        DualMesh {
            grid: Grid { width: self.grid.width - 1, height: self.grid.height - 1 },
        }
    }

    /// Grid carrying the cells of the given side.
    pub fn side_grid(&self, side: Side) -> Grid {
        match side {
            Side::Primal => self.grid,
            Side::Dual => self.dual().grid,
        }
    }

    /// Vertices that are neither on the rectangle boundary.
    pub fn interior_vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.grid.interior_vertices()
    }

    /// The duality operator `*` on a single primal cell, returning a signed
    /// canonical cell of the dual mesh.
    pub fn dual_cell(&self, cell: Cell) -> Result<SignedCell> {
        star_cell(self, Side::Primal, cell)
    }

    /// `*` on a dual cell; the dual of the dual mesh is the primal interior.
    pub fn primal_cell(&self, dual: Cell) -> Result<SignedCell> {
        star_cell(self, Side::Dual, dual)
    }
}

impl std::ops::Deref for Mesh {
    type Target = Grid;
    fn deref(&self) -> &Grid {
        &self.grid
    }
}

/// The circumcentric dual of a [`Mesh`]: one vertex per face, one edge per
/// interior edge and one face per interior vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DualMesh {
    grid: Grid,
}

impl DualMesh {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Planar position of a dual vertex.
    pub fn position(&self, r: Vertex) -> (f64, f64) {
        (r.i as f64 + 0.5, r.j as f64 + 0.5)
    }

    /// Primal face whose centre is the dual vertex `r`.
    pub fn face_of(&self, r: Vertex) -> Face {
        Face::ccw(r.i, r.j)
    }

    /// Primal vertex surrounded by the dual face with base `r`.
    pub fn vertex_of(&self, r: Vertex) -> Vertex {
        Vertex::new(r.i + 1, r.j + 1)
    }
}

impl std::ops::Deref for DualMesh {
    type Target = Grid;
    fn deref(&self) -> &Grid {
        &self.grid
    }
}

/// `*` from the grid of `side` to the opposite grid. Edges rotate a quarter
/// turn anticlockwise in both directions, so `**` is `-1` on edges and `+1`
/// on vertices and faces.
fn star_cell(mesh: &Mesh, side: Side, cell: Cell) -> Result<SignedCell> {
    let grid = mesh.side_grid(side);
    let target = mesh.side_grid(side.opposite());
    if !grid.contains_cell(cell) {
        return Err(Error::NoDualCell(format!("{cell} is not a {side:?} cell")));
    }
    let (canonical, sign) = cell.canonical();
    let missing = || Error::NoDualCell(format!("{cell} lies on the {side:?} boundary"));
    // Offsets between the two grids: primal vertex (i,j) is surrounded by dual
    // face (i-1,j-1); dual face (a,b) surrounds primal vertex (a+1,b+1).
    let (dual, rel) = match (side, canonical) {
        (Side::Primal, Cell::Face(f)) => (Cell::Vertex(f.base), 1),
        (Side::Dual, Cell::Vertex(r)) => (Cell::Face(Face::ccw(r.i, r.j)), 1),
        (Side::Primal, Cell::Vertex(v)) => {
            if v.i == 0 || v.j == 0 {
                return Err(missing());
            }
            (Cell::Face(Face::ccw(v.i - 1, v.j - 1)), 1)
        }
        (Side::Dual, Cell::Face(f)) => (Cell::Vertex(Vertex::new(f.base.i + 1, f.base.j + 1)), 1),
        (Side::Primal, Cell::Edge(e)) => match e.kind {
            // East edge rotates to the northward dual edge crossing it.
            EdgeKind::East => {
                if e.base.j == 0 {
                    return Err(missing());
                }
                (Cell::Edge(Edge::north(e.base.i, e.base.j - 1)), 1)
            }
            // North edge rotates to the westward dual edge crossing it.
            EdgeKind::North => {
                if e.base.i == 0 {
                    return Err(missing());
                }
                (Cell::Edge(Edge::east(e.base.i - 1, e.base.j)), -1)
            }
        },
        (Side::Dual, Cell::Edge(e)) => match e.kind {
            EdgeKind::East => (Cell::Edge(Edge::north(e.base.i + 1, e.base.j)), 1),
            EdgeKind::North => (Cell::Edge(Edge::east(e.base.i, e.base.j + 1)), -1),
        },
    };
    if !target.contains_cell(dual) {
        return Err(missing());
    }
    Ok(SignedCell { sign: sign * rel, cell: dual })
}

/// Formal real linear combination of cells of one degree on one side.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    mesh: Mesh,
    side: Side,
    degree: usize,
    coeffs: BTreeMap<usize, f64>,
}

impl Chain {
    pub fn zero(mesh: Mesh, side: Side, degree: usize) -> Chain {
        Chain { mesh, side, degree, coeffs: BTreeMap::new() }
    }

    /// `coeff * cell`; a reversed cell negates the canonical coefficient.
    pub fn cell(mesh: Mesh, side: Side, cell: Cell, coeff: f64) -> Result<Chain> {
        let mut c = Chain::zero(mesh, side, cell.degree());
        c.add_cell(cell, coeff)?;
        Ok(c)
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

    pub fn add_cell(&mut self, cell: Cell, coeff: f64) -> Result<()> {
        if cell.degree() != self.degree {
            return Err(Error::InvalidInput(format!(
                "{cell} added to a chain of degree {}",
                self.degree
            )));
        }
        let (index, sign) = self
            .grid()
            .locate(cell)
            .ok_or_else(|| Error::InvalidInput(format!("{cell} is outside the {:?} grid", self.side)))?;
        self.add_index(index, f64::from(sign) * coeff);
        Ok(())
    }

    fn add_index(&mut self, index: usize, coeff: f64) {
        let entry = self.coeffs.entry(index).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.coeffs.remove(&index);
        }
    }

    /// Coefficient of `cell`, with the sign of its orientation applied.
    pub fn coefficient(&self, cell: Cell) -> f64 {
        match self.grid().locate(cell) {
            Some((index, sign)) if cell.degree() == self.degree => {
                f64::from(sign) * self.coeffs.get(&index).copied().unwrap_or(0.0)
            }
            _ => 0.0,
        }
    }

    /// Nonzero terms as `(canonical cell, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (Cell, f64)> + '_ {
        let grid = self.grid();
        self.coeffs.iter().map(move |(&k, &c)| (grid.cell_at(self.degree, k), c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> Chain {
        let mut out = Chain::zero(self.mesh, self.side, self.degree);
        for (&k, &c) in &self.coeffs {
            out.add_index(k, factor * c);
        }
        out
    }

    pub fn plus(&self, other: &Chain) -> Result<Chain> {
        if other.side != self.side || other.degree != self.degree || other.mesh != self.mesh {
            return Err(Error::InvalidInput("adding chains of different type".into()));
        }
        let mut out = self.clone();
        for (&k, &c) in &other.coeffs {
            out.add_index(k, c);
        }
        Ok(out)
    }

    /// The boundary operator: `d(edge) = head - tail`, `d(face)` = signed sum
    /// of its four boundary edges.
    pub fn boundary(&self) -> Result<Chain> {
        if self.degree == 0 {
            return Err(Error::DegreeUnderflow { degree: 0 });
        }
        let mut out = Chain::zero(self.mesh, self.side, self.degree - 1);
        for (cell, c) in self.terms() {
            match cell {
                Cell::Edge(e) => {
                    out.add_cell(Cell::Vertex(e.head()), c)?;
                    out.add_cell(Cell::Vertex(e.tail()), -c)?;
                }
                Cell::Face(f) => {
                    for e in f.boundary_edges() {
                        out.add_cell(Cell::Edge(e), c)?;
                    }
                }
                Cell::Vertex(_) => unreachable!("degree checked above"),
            }
        }
        Ok(out)
    }

    /// Linear extension of `*` to chains; the result lives on the opposite side.
    pub fn star(&self) -> Result<Chain> {
        let mut out = Chain::zero(self.mesh, self.side.opposite(), 2 - self.degree);
        for (cell, c) in self.terms() {
            let d = star_cell(&self.mesh, self.side, cell)?;
            out.add_cell(d.cell, f64::from(d.sign) * c)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_mesh_counts() {
        let m = Mesh::new(2, 2).unwrap();
        assert_eq!((m.vertex_count(), m.edge_count(), m.face_count()), (4, 4, 1));
        let m = Mesh::new(3, 2).unwrap();
        assert_eq!((m.vertex_count(), m.edge_count(), m.face_count()), (6, 7, 2));
    }

    #[test]
    fn rejects_degenerate_dimensions() {
        assert_eq!(Mesh::new(1, 5), Err(Error::InvalidDimensions { width: 1, height: 5 }));
        assert!(Mesh::new(5, 0).is_err());
    }

    #[test]
    fn counts_follow_closed_forms() {
        for w in 2..=12 {
            for h in 2..=12 {
                let m = Mesh::new(w, h).unwrap();
                assert_eq!(m.vertices().count(), w * h);
                assert_eq!(m.edges().count(), (w - 1) * h + w * (h - 1));
                assert_eq!(m.faces().count(), (w - 1) * (h - 1));
                for (k, e) in m.edges().enumerate() {
                    assert_eq!(m.edge_index(e), k);
                }
                for (k, f) in m.faces().enumerate() {
                    assert_eq!(m.face_index(f), k);
                }
            }
        }
    }

    #[test]
    fn edge_reverse_and_between() {
        let e = Edge::east(2, 3);
        assert_eq!(e.tail(), Vertex::new(2, 3));
        assert_eq!(e.head(), Vertex::new(3, 3));
        let r = e.reversed();
        assert_eq!((r.tail(), r.head(), r.kind, r.sign), (e.head(), e.tail(), e.kind, -1));
        assert_eq!(Edge::between(Vertex::new(3, 3), Vertex::new(2, 3)).unwrap(), r);
        assert_eq!(Edge::between(Vertex::new(1, 1), Vertex::new(1, 2)).unwrap(), Edge::north(1, 1));
        assert!(Edge::between(Vertex::new(1, 1), Vertex::new(2, 2)).is_err());
    }

    #[test]
    fn faces_are_closed_paths_without_backtracking() {
        for f in [Face::ccw(1, 2), Face::ccw(1, 2).reversed()] {
            let edges = f.boundary_edges();
            for k in 0..4 {
                let (a, b) = (edges[k], edges[(k + 1) % 4]);
                assert_eq!(a.head(), b.tail());
                assert_ne!(a, b.reversed());
            }
            assert_eq!(edges[0].tail(), f.base);
        }
    }

    #[test]
    fn boundary_of_east_edge() {
        let m = Mesh::new(3, 3).unwrap();
        let c = Chain::cell(m, Side::Primal, Cell::Edge(Edge::east(0, 0)), 1.0).unwrap();
        let b = c.boundary().unwrap();
        assert_eq!(b.coefficient(Cell::Vertex(Vertex::new(1, 0))), 1.0);
        assert_eq!(b.coefficient(Cell::Vertex(Vertex::new(0, 0))), -1.0);
        assert_eq!(b.terms().count(), 2);
    }

    #[test]
    fn boundary_of_ccw_face_by_hand() {
        let m = Mesh::new(3, 3).unwrap();
        let c = Chain::cell(m, Side::Primal, Cell::Face(Face::ccw(0, 0)), 1.0).unwrap();
        let b = c.boundary().unwrap();
        let coeff = |e: Edge| b.coefficient(Cell::Edge(e));
        assert_eq!(coeff(Edge::east(0, 0)), 1.0);
        assert_eq!(coeff(Edge::north(1, 0)), 1.0);
        assert_eq!(coeff(Edge::east(0, 1)), -1.0);
        assert_eq!(coeff(Edge::north(0, 0)), -1.0);
        assert_eq!(b.terms().count(), 4);
        assert!(b.boundary().unwrap().is_zero());
    }

    #[test]
    fn boundary_of_vertex_chain_underflows() {
        let m = Mesh::new(2, 2).unwrap();
        let c = Chain::cell(m, Side::Primal, Cell::Vertex(Vertex::new(0, 0)), 1.0).unwrap();
        assert_eq!(c.boundary(), Err(Error::DegreeUnderflow { degree: 0 }));
    }

    #[test]
    fn reversed_edge_negates_coefficient() {
        let m = Mesh::new(3, 3).unwrap();
        let mut c = Chain::zero(m, Side::Primal, 1);
        c.add_cell(Cell::Edge(Edge::north(1, 1).reversed()), 2.5).unwrap();
        assert_eq!(c.coefficient(Cell::Edge(Edge::north(1, 1))), -2.5);
        assert_eq!(c.coefficient(Cell::Edge(Edge::north(1, 1).reversed())), 2.5);
    }

    #[test]
    fn dual_of_faces_carries_orientation() {
        let m = Mesh::new(4, 4).unwrap();
        let ccw = m.dual_cell(Cell::Face(Face::ccw(1, 2))).unwrap();
        assert_eq!(ccw, SignedCell { sign: 1, cell: Cell::Vertex(Vertex::new(1, 2)) });
        let cw = m.dual_cell(Cell::Face(Face::ccw(1, 2).reversed())).unwrap();
        assert_eq!(cw.sign, -1);
        assert_eq!(cw.cell, ccw.cell);
    }

    #[test]
    fn east_edge_dual_points_north_through_it() {
        let m = Mesh::new(4, 4).unwrap();
        let e = Edge::east(1, 2);
        let d = m.dual_cell(Cell::Edge(e)).unwrap();
        let Cell::Edge(de) = d.cell else { panic!("expected an edge") };
        let dual = m.dual();
        let de = if d.sign < 0 { de.reversed() } else { de };
        let (t, h) = (dual.position(de.tail()), dual.position(de.head()));
        // The dual segment crosses the primal edge at its midpoint.
        assert_eq!(((t.0 + h.0) / 2.0, (t.1 + h.1) / 2.0), (1.5, 2.0));
        // (primal direction, dual direction) is a positively oriented basis.
        let (px, py) = (1.0, 0.0);
        let (dx, dy) = (h.0 - t.0, h.1 - t.1);
        assert!(px * dy - py * dx > 0.0);
        assert_eq!((dx, dy), (0.0, 1.0));
    }

    #[test]
    fn north_edge_dual_is_positively_oriented() {
        let m = Mesh::new(4, 4).unwrap();
        let e = Edge::north(2, 1);
        let d = m.dual_cell(Cell::Edge(e)).unwrap();
        let Cell::Edge(de) = d.cell else { panic!("expected an edge") };
        let de = if d.sign < 0 { de.reversed() } else { de };
        let dual = m.dual();
        let (t, h) = (dual.position(de.tail()), dual.position(de.head()));
        let (dx, dy) = (h.0 - t.0, h.1 - t.1);
        assert!(0.0 * dy - 1.0 * dx > 0.0);
    }

    #[test]
    fn boundary_cells_have_no_dual() {
        let m = Mesh::new(4, 4).unwrap();
        assert!(matches!(m.dual_cell(Cell::Vertex(Vertex::new(0, 2))), Err(Error::NoDualCell(_))));
        assert!(matches!(m.dual_cell(Cell::Vertex(Vertex::new(3, 2))), Err(Error::NoDualCell(_))));
        assert!(matches!(m.dual_cell(Cell::Edge(Edge::east(1, 0))), Err(Error::NoDualCell(_))));
        assert!(matches!(m.dual_cell(Cell::Edge(Edge::north(3, 1))), Err(Error::NoDualCell(_))));
        assert!(m.dual_cell(Cell::Vertex(Vertex::new(1, 1))).is_ok());
    }

    #[test]
    fn double_dual_sign_rule_on_every_interior_cell() {
        let m = Mesh::new(6, 5).unwrap();
        let cells = m
            .vertices()
            .map(Cell::Vertex)
            .chain(m.edges().map(Cell::Edge))
            .chain(m.faces().map(Cell::Face));
        let mut checked = 0;
        for cell in cells {
            let Ok(d) = m.dual_cell(cell) else { continue };
            let dd = m.primal_cell(d.cell).unwrap();
            let n = cell.degree() as i32;
            let expected: i8 = if (n * (2 - n)) % 2 == 0 { 1 } else { -1 };
            assert_eq!(dd.cell, cell, "{cell}");
            assert_eq!(d.sign * dd.sign, expected, "{cell}");
            checked += 1;
        }
        // 12 interior vertices, 15 + 16 interior edges, 20 faces.
        assert_eq!(checked, 12 + 31 + 20);
    }

    #[test]
    fn vertex_dual_is_ccw_dual_face() {
        let m = Mesh::new(4, 4).unwrap();
        let d = m.dual_cell(Cell::Vertex(Vertex::new(2, 1))).unwrap();
        assert_eq!(d, SignedCell { sign: 1, cell: Cell::Face(Face::ccw(1, 0)) });
        assert_eq!(m.dual().vertex_of(Vertex::new(1, 0)), Vertex::new(2, 1));
    }
}
