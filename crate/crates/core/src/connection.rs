//! Vertex-valued fields, edge-valued reduced fields (discrete G-connections),
//! curvature, holonomy, and the reduction/reconstruction pair between them.

use rand::Rng;

use crate::error::{Error, Result};
use crate::lie::GroupElement;
use crate::mesh::{Edge, EdgeKind, Face, Mesh, Vertex};

/// Default flatness tolerance for reconstruction of solver output.
pub const FLAT_TOL: f64 = 1e-8;

/// A map from mesh vertices to SO(n).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteField {
    mesh: Mesh,
    values: Vec<GroupElement>,
}

impl DiscreteField {
    /// Values in row-major vertex order.
    pub fn new(mesh: Mesh, values: Vec<GroupElement>) -> Result<Self> {
        if values.len() != mesh.vertex_count() {
            return Err(Error::DimensionMismatch { expected: mesh.vertex_count(), found: values.len() });
        }
        check_dims(&values)?;
        Ok(DiscreteField { mesh, values })
    }

    pub fn from_fn(mesh: Mesh, f: impl FnMut(Vertex) -> GroupElement) -> Self {
        let values: Vec<_> = mesh.vertices().map(f).collect();
        check_dims(&values).expect("field values of one dimension");
        DiscreteField { mesh, values }
    }

    pub fn constant(mesh: Mesh, g: &GroupElement) -> Self {
        DiscreteField { mesh, values: vec![g.clone(); mesh.vertex_count()] }
    }

    pub fn random<R: Rng + ?Sized>(mesh: Mesh, n: usize, rng: &mut R) -> Self {
        Self::from_fn(mesh, |_| GroupElement::random(n, rng))
    }

    pub fn mesh(&self) -> Mesh {
        self.mesh
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }

    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    pub fn get(&self, v: Vertex) -> &GroupElement {
        &self.values[self.mesh.vertex_index(v)]
    }

    /// Value at `(i, j)`.
    pub fn at(&self, i: usize, j: usize) -> &GroupElement {
        self.get(Vertex::new(i, j))
    }

    pub fn set(&mut self, v: Vertex, g: GroupElement) {
        let k = self.mesh.vertex_index(v);
        self.values[k] = g;
    }

    /// `g·φ`.
    pub fn left_translated(&self, g: &GroupElement) -> DiscreteField {
        DiscreteField { mesh: self.mesh, values: self.values.iter().map(|x| g * x).collect() }
    }

    /// `max_v ‖φ(v) - ψ(v)‖_max`.
    pub fn max_distance(&self, other: &DiscreteField) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a.distance(b)).fold(0.0, f64::max)
    }

    pub fn reduce(&self) -> ReducedField {
        reduce(self)
    }
}

fn check_dims(values: &[GroupElement]) -> Result<()> {
    let Some(first) = values.first() else { return Ok(()) };
    match values.iter().find(|g| g.dim() != first.dim()) {
        Some(g) => Err(Error::DimensionMismatch { expected: first.dim(), found: g.dim() }),
        None => Ok(()),
    }
}

/// An edge-valued field `ω: E → SO(n)` with `ω(e⁻¹) = ω(e)⁻¹`. Stores
/// `u_{i,j}` on East edges and `v_{i,j}` on North edges.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedField {
    mesh: Mesh,
    east: Vec<GroupElement>,
    north: Vec<GroupElement>,
}

impl ReducedField {
    /// East values in row-major order of their base vertex, then North values.
    pub fn new(mesh: Mesh, east: Vec<GroupElement>, north: Vec<GroupElement>) -> Result<Self> {
        if east.len() != mesh.east_count() {
            return Err(Error::DimensionMismatch { expected: mesh.east_count(), found: east.len() });
        }
        if north.len() != mesh.north_count() {
            return Err(Error::DimensionMismatch { expected: mesh.north_count(), found: north.len() });
        }
        check_dims(&east)?;
        let all: Vec<_> = [&east[..1], &north[..]].concat();
        check_dims(&all)?;
        Ok(ReducedField { mesh, east, north })
    }

    /// `a` on every East edge, `b` on every North edge.
    pub fn constant(mesh: Mesh, a: &GroupElement, b: &GroupElement) -> Self {
        ReducedField {
            mesh,
            east: vec![a.clone(); mesh.east_count()],
            north: vec![b.clone(); mesh.north_count()],
        }
    }

    pub fn from_fn(mesh: Mesh, mut f: impl FnMut(Edge) -> GroupElement) -> Self {
        let east = (0..mesh.east_count()).map(|k| f(mesh.edge_at(k))).collect();
        let north = (mesh.east_count()..mesh.edge_count()).map(|k| f(mesh.edge_at(k))).collect();
        ReducedField { mesh, east, north }
    }

    pub fn mesh(&self) -> Mesh {
        self.mesh
    }

    pub fn dim(&self) -> usize {
        self.east.first().or(self.north.first()).map_or(0, GroupElement::dim)
    }

    pub fn east_values(&self) -> &[GroupElement] {
        &self.east
    }

    pub fn north_values(&self) -> &[GroupElement] {
        &self.north
    }

    /// `u_{i,j}`, the value on the East edge `(i,j)->(i+1,j)`.
    pub fn u(&self, i: usize, j: usize) -> &GroupElement {
        &self.east[self.mesh.edge_index(Edge::east(i, j))]
    }

    /// `v_{i,j}`, the value on the North edge `(i,j)->(i,j+1)`.
    pub fn v(&self, i: usize, j: usize) -> &GroupElement {
        &self.north[self.mesh.edge_index(Edge::north(i, j)) - self.mesh.east_count()]
    }

    fn canonical(&self, e: Edge) -> &GroupElement {
        match e.kind {
            EdgeKind::East => self.u(e.base.i, e.base.j),
            EdgeKind::North => self.v(e.base.i, e.base.j),
        }
    }

    /// `ω(e)`, inverted for reversed edges.
    pub fn get(&self, e: Edge) -> Result<GroupElement> {
        if !self.mesh.contains_edge(e) {
            return Err(Error::OutOfBounds(e.base));
        }
        let g = self.canonical(e);
        Ok(if e.sign > 0 { g.clone() } else { g.inverse() })
    }

    pub fn max_distance(&self, other: &ReducedField) -> f64 {
        self.east
            .iter()
            .zip(&other.east)
            .chain(self.north.iter().zip(&other.north))
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }
}

/// `u_{i,j} = φ_{i,j}⁻¹φ_{i+1,j}`, `v_{i,j} = φ_{i,j}⁻¹φ_{i,j+1}`.
pub fn reduce(field: &DiscreteField) -> ReducedField {
    ReducedField::from_fn(field.mesh(), |e| &field.get(e.tail()).inverse() * field.get(e.head()))
}

/// Ordered product of the boundary edge values of `face`, starting at its base vertex.
pub fn curvature(omega: &ReducedField, face: Face) -> Result<GroupElement> {
    if !omega.mesh().contains_face(face) {
        return Err(Error::OutOfBounds(face.base));
    }
    let [a, b, c, d] = face.boundary_edges();
    Ok(&(&(&omega.get(a)? * &omega.get(b)?) * &omega.get(c)?) * &omega.get(d)?)
}

/// `max_f ‖Ω(f) - I‖_max` over all faces.
pub fn max_curvature_defect(omega: &ReducedField) -> f64 {
    let eye = GroupElement::identity(omega.dim());
    omega
        .mesh()
        .faces()
        .map(|f| curvature(omega, f).expect("face of the mesh").distance(&eye))
        .fold(0.0, f64::max)
}

pub fn is_flat(omega: &ReducedField, tol: f64) -> bool {
    max_curvature_defect(omega) <= tol
}

/// `ω(e_1)ω(e_2)⋯ω(e_m)` along a path of composable edges.
pub fn holonomy(omega: &ReducedField, path: &[Edge]) -> Result<GroupElement> {
    let mut acc = GroupElement::identity(omega.dim());
    for (k, e) in path.iter().enumerate() {
        if k > 0 && path[k - 1].head() != e.tail() {
            return Err(Error::BrokenPath { index: k - 1, end: path[k - 1].head() });
        }
        acc = &acc * &omega.get(*e)?;
    }
    Ok(acc)
}

/// Integrates a flat connection to a field with `φ(x0) = g0` and
/// `φ(x) = g0·ω̂(x0, x)`. Holonomies are taken along the row-major spanning
/// tree: along row 0 first, then up each column.
pub fn reconstruct(omega: &ReducedField, x0: Vertex, g0: &GroupElement, tol: f64) -> Result<DiscreteField> {
    let mesh = omega.mesh();
    if !mesh.contains(x0) {
        return Err(Error::OutOfBounds(x0));
    }
    if g0.dim() != omega.dim() {
        return Err(Error::DimensionMismatch { expected: omega.dim(), found: g0.dim() });
    }
    let max_defect = max_curvature_defect(omega);
    if !(max_defect <= tol) {
        return Err(Error::NotFlat { max_defect, tol });
    }
    // Holonomy from (0,0) along the tree.
    let mut from_origin: Vec<GroupElement> = Vec::with_capacity(mesh.vertex_count());
    from_origin.resize(mesh.vertex_count(), GroupElement::identity(omega.dim()));
    for i in 1..mesh.width() {
        let prev = &from_origin[mesh.vertex_index(Vertex::new(i - 1, 0))];
        from_origin[mesh.vertex_index(Vertex::new(i, 0))] = prev * omega.u(i - 1, 0);
    }
    for i in 0..mesh.width() {
        for j in 1..mesh.height() {
            let prev = &from_origin[mesh.vertex_index(Vertex::new(i, j - 1))];
            from_origin[mesh.vertex_index(Vertex::new(i, j))] = prev * omega.v(i, j - 1);
        }
    }
    let anchor = if x0 == Vertex::new(0, 0) {
        g0.clone()
    } else {
        g0 * &from_origin[mesh.vertex_index(x0)].inverse()
    };
    let mut values: Vec<_> = from_origin.iter().map(|h| &anchor * h).collect();
    values[mesh.vertex_index(x0)] = g0.clone();
    DiscreteField::new(mesh, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{exp, AlgebraElement};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn constant_field_reduces_to_identity() {
        let m = Mesh::new(4, 3).unwrap();
        let g = GroupElement::random(3, &mut rng());
        let omega = reduce(&DiscreteField::constant(m, &g));
        let eye = GroupElement::identity(3);
        for e in m.edges() {
            assert!(omega.get(e).unwrap().distance(&eye) < 1e-15);
        }
    }

    #[test]
    fn reduction_is_left_invariant() {
        let mut rng = rng();
        let m = Mesh::new(5, 4).unwrap();
        let phi = DiscreteField::random(m, 3, &mut rng);
        let g = GroupElement::random(3, &mut rng);
        assert!(reduce(&phi).max_distance(&reduce(&phi.left_translated(&g))) < 1e-14);
    }

    #[test]
    fn reduced_fields_are_flat() {
        let mut rng = rng();
        let m = Mesh::new(6, 5).unwrap();
        let omega = reduce(&DiscreteField::random(m, 3, &mut rng));
        assert!(max_curvature_defect(&omega) < 1e-12);
        assert!(is_flat(&omega, 1e-10));
    }

    #[test]
    fn reverse_edge_returns_inverse() {
        let mut rng = rng();
        let m = Mesh::new(3, 3).unwrap();
        let omega = reduce(&DiscreteField::random(m, 3, &mut rng));
        let e = Edge::north(1, 0);
        assert_eq!(omega.get(e.reversed()).unwrap(), omega.get(e).unwrap().inverse());
    }

    #[test]
    fn curvature_of_constant_connection() {
        let mut rng = rng();
        let m = Mesh::new(3, 3).unwrap();
        let a = GroupElement::random(3, &mut rng);
        let b = GroupElement::random(3, &mut rng);
        let omega = ReducedField::constant(m, &a, &b);
        let expected = &(&(&a * &b) * &a.inverse()) * &b.inverse();
        let omega_f = curvature(&omega, Face::ccw(1, 1)).unwrap();
        assert!(omega_f.distance(&expected) < 1e-14);
        let defect = expected.distance(&GroupElement::identity(3));
        assert!(defect > 1e-3);
        assert!(!is_flat(&omega, 1e-10));
    }

    #[test]
    fn abelian_curvature_is_rotation_by_discrete_curl() {
        let mut rng = rng();
        let m = Mesh::new(5, 4).unwrap();
        let angles: Vec<f64> = (0..m.edge_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let omega = ReducedField::from_fn(m, |e| GroupElement::rotation2(angles[m.edge_index(e)]));
        for f in m.faces() {
            let [a, b, c, d] = f.boundary_edges();
            let curl = [a, b, c, d].iter().map(|e| e.sign as f64 * angles[m.edge_index(*e)]).sum::<f64>();
            let expected = GroupElement::rotation2(curl);
            assert!(curvature(&omega, f).unwrap().distance(&expected) < 1e-14);
        }
        // Gradient angles are flat.
        let pot: Vec<f64> = (0..m.vertex_count()).map(|_| rng.random_range(-2.0..2.0)).collect();
        let grad = ReducedField::from_fn(m, |e| {
            GroupElement::rotation2(pot[m.vertex_index(e.head())] - pot[m.vertex_index(e.tail())])
        });
        assert!(is_flat(&grad, 1e-13));
    }

    #[test]
    fn holonomy_of_trivial_paths() {
        let mut rng = rng();
        let m = Mesh::new(4, 4).unwrap();
        let omega = ReducedField::from_fn(m, |_| GroupElement::random(3, &mut rng));
        assert_eq!(holonomy(&omega, &[]).unwrap(), GroupElement::identity(3));
        let e = Edge::east(1, 2);
        let back = holonomy(&omega, &[e, e.reversed()]).unwrap();
        assert!(back.distance(&GroupElement::identity(3)) < 1e-15);
    }

    #[test]
    fn broken_path_is_rejected() {
        let m = Mesh::new(4, 4).unwrap();
        let omega = ReducedField::constant(m, &GroupElement::identity(2), &GroupElement::identity(2));
        let err = holonomy(&omega, &[Edge::east(0, 0), Edge::east(2, 0)]).unwrap_err();
        assert_eq!(err, Error::BrokenPath { index: 0, end: Vertex::new(1, 0) });
    }

    #[test]
    fn staircase_paths_agree_on_flat_connections() {
        let mut rng = rng();
        let m = Mesh::new(5, 5).unwrap();
        let omega = reduce(&DiscreteField::random(m, 3, &mut rng));
        // (0,0) -> (3,2): east first, then north; versus alternating.
        let p1 = [
            Edge::east(0, 0),
            Edge::east(1, 0),
            Edge::east(2, 0),
            Edge::north(3, 0),
            Edge::north(3, 1),
        ];
        let p2 = [
            Edge::north(0, 0),
            Edge::east(0, 1),
            Edge::north(1, 1),
            Edge::east(1, 2),
            Edge::east(2, 2),
        ];
        let h1 = holonomy(&omega, &p1).unwrap();
        let h2 = holonomy(&omega, &p2).unwrap();
        assert!(h1.distance(&h2) < 1e-10);
    }

    #[test]
    fn reconstruct_round_trip_and_left_translation() {
        let mut rng = rng();
        let m = Mesh::new(6, 4).unwrap();
        let phi = DiscreteField::random(m, 3, &mut rng);
        let omega = reduce(&phi);
        let x0 = Vertex::new(0, 0);
        let back = reconstruct(&omega, x0, phi.get(x0), FLAT_TOL).unwrap();
        assert!(back.max_distance(&phi) < 1e-12);
        assert!(reduce(&back).max_distance(&omega) < 1e-12);

        let h = GroupElement::random(3, &mut rng);
        let moved = reconstruct(&omega, x0, &(&h * phi.get(x0)), FLAT_TOL).unwrap();
        assert!(moved.max_distance(&phi.left_translated(&h)) < 1e-12);

        let x1 = Vertex::new(3, 2);
        let other = reconstruct(&omega, x1, phi.get(x1), FLAT_TOL).unwrap();
        assert!(other.max_distance(&phi) < 1e-12);
        assert_eq!(other.get(x1), phi.get(x1));
    }

    #[test]
    fn reconstruct_rejects_curved_connection() {
        let m = Mesh::new(3, 3).unwrap();
        let a = exp(&AlgebraElement::from_coordinates(3, &[0.4, 0.0, 0.0]));
        let b = exp(&AlgebraElement::from_coordinates(3, &[0.0, 0.5, 0.0]));
        let omega = ReducedField::constant(m, &a, &b);
        let err = reconstruct(&omega, Vertex::new(0, 0), &GroupElement::identity(3), FLAT_TOL).unwrap_err();
        assert!(matches!(err, Error::NotFlat { max_defect, .. } if max_defect > 0.01));
    }

    #[test]
    fn field_constructor_checks_counts() {
        let m = Mesh::new(3, 3).unwrap();
        assert!(DiscreteField::new(m, vec![GroupElement::identity(2); 8]).is_err());
        assert!(ReducedField::new(m, vec![GroupElement::identity(2); 6], vec![GroupElement::identity(2); 5]).is_err());
    }
}
