//! The rotation group SO(n) embedded in n x n matrices, its Lie algebra so(n),
//! and the dual so(n)* represented through the trace pairing `<μ, ξ> = tr(μᵀξ)`.

use std::fmt;
use std::ops::Mul;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Largest tolerated `‖gᵀg - I‖_max` for a group element.
pub const ORTHO_TOL: f64 = 1e-10;
/// Default step for central finite differences along exp-curves.
pub const FD_STEP: f64 = 1e-5;
/// Below this smallest singular value a matrix is not projected onto SO(n).
pub const SINGULAR_TOL: f64 = 1e-12;

fn orthogonality_defect(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    (m.transpose() * m - DMatrix::identity(n, n)).amax()
}

fn antisym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m - m.transpose()) * 0.5
}

/// An element of SO(n).
#[derive(Clone, PartialEq)]
pub struct GroupElement(DMatrix<f64>);

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement({:?})", self.0.as_slice())
    }
}

impl GroupElement {
    pub fn identity(n: usize) -> Self {
        GroupElement(DMatrix::identity(n, n))
    }

    /// Checks orthogonality to [`ORTHO_TOL`] and a positive determinant.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        let defect = orthogonality_defect(&m);
        let det = m.determinant();
        if !(defect <= ORTHO_TOL) || !(det > 0.0) {
            return Err(Error::NotSpecialOrthogonal { defect, det });
        }
        Ok(GroupElement(m))
    }

    /// Wraps a matrix that is orthogonal by construction. Checked in debug builds.
    pub(crate) fn from_matrix_unchecked(m: DMatrix<f64>) -> Self {
        debug_assert!(
            orthogonality_defect(&m) <= ORTHO_TOL,
            "orthogonality defect {:e}",
            orthogonality_defect(&m)
        );
        GroupElement(m)
    }

    /// Rotation by `angle` in SO(2).
    pub fn rotation2(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        GroupElement(DMatrix::from_row_slice(2, 2, &[c, -s, s, c]))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn multiply(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(GroupElement::from_matrix_unchecked(&self.0 * &other.0))
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement(self.0.transpose())
    }

    pub fn orthogonality_defect(&self) -> f64 {
        orthogonality_defect(&self.0)
    }

    /// `‖self - other‖_max`.
    pub fn distance(&self, other: &GroupElement) -> f64 {
        (&self.0 - &other.0).amax()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// Conjugation `Ad_g ξ = g ξ g⁻¹`.
    pub fn adjoint(&self, xi: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::from_antisymmetric(&self.0 * &xi.0 * self.0.transpose())
    }

    /// Haar-distributed random rotation.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> GroupElement {
        loop {
            let w = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
            if let Ok(g) = polar_project(&w) {
                return g;
            }
        }
    }
}

impl Mul for &GroupElement {
    type Output = GroupElement;

    fn mul(self, rhs: &GroupElement) -> GroupElement {
        self.multiply(rhs).expect("group elements of equal dimension")
    }
}

/// An element of so(n), stored as an exactly antisymmetric matrix.
#[derive(Clone, PartialEq)]
pub struct AlgebraElement(DMatrix<f64>);

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraElement({:?})", self.0.as_slice())
    }
}

impl AlgebraElement {
    pub fn zero(n: usize) -> Self {
        AlgebraElement(DMatrix::zeros(n, n))
    }

    /// Accepts a matrix antisymmetric to [`ORTHO_TOL`] and keeps its
    /// antisymmetric part.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        let defect = (&m + m.transpose()).amax();
        if !(defect <= ORTHO_TOL) {
            return Err(Error::NotAntisymmetric { defect });
        }
        Ok(AlgebraElement(antisym(&m)))
    }

    /// Antisymmetric part of an arbitrary square matrix.
    pub fn from_antisymmetric(m: DMatrix<f64>) -> Self {
        AlgebraElement(antisym(&m))
    }

    /// Standard basis `E_ab = e_a e_bᵀ - e_b e_aᵀ`, `a < b`.
    pub fn basis(n: usize) -> Vec<AlgebraElement> {
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for a in 0..n {
            for b in a + 1..n {
                let mut m = DMatrix::zeros(n, n);
                m[(a, b)] = 1.0;
                m[(b, a)] = -1.0;
                out.push(AlgebraElement(m));
            }
        }
        out
    }

    /// Element with the given coordinates in [`AlgebraElement::basis`].
    pub fn from_coordinates(n: usize, coords: &[f64]) -> Self {
        let mut m = DMatrix::zeros(n, n);
        let mut k = 0;
        for a in 0..n {
            for b in a + 1..n {
                m[(a, b)] = coords[k];
                m[(b, a)] = -coords[k];
                k += 1;
            }
        }
        AlgebraElement(m)
    }

    /// Standard normal coordinates scaled by `scale`.
    pub fn random<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> Self {
        let coords: Vec<f64> = (0..n * n.saturating_sub(1) / 2)
            .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        Self::from_coordinates(n, &coords)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn scale(&self, t: f64) -> AlgebraElement {
        AlgebraElement(&self.0 * t)
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        AlgebraElement(&self.0 + &other.0)
    }

    pub fn bracket(&self, other: &AlgebraElement) -> AlgebraElement {
        AlgebraElement(&self.0 * &other.0 - &other.0 * &self.0)
    }

    pub fn norm_max(&self) -> f64 {
        self.0.amax()
    }
}

/// An element of so(n)* represented by the antisymmetric matrix `μ` with
/// `<μ, ξ> = tr(μᵀξ)`.
#[derive(Clone, PartialEq)]
pub struct Covector(DMatrix<f64>);

impl fmt::Debug for Covector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Covector({:?})", self.0.as_slice())
    }
}

impl Covector {
    pub fn zero(n: usize) -> Self {
        Covector(DMatrix::zeros(n, n))
    }

    /// Covector represented by the antisymmetric part of `m`.
    pub fn from_matrix(m: DMatrix<f64>) -> Self {
        Covector(antisym(&m))
    }

    /// Covector of a linear functional on so(n), recovered from its values
    /// on the standard basis (`tr(E_abᵀ E_ab) = 2`).
    pub fn from_functional(n: usize, mut f: impl FnMut(&AlgebraElement) -> f64) -> Self {
        let mut m = DMatrix::zeros(n, n);
        for e in AlgebraElement::basis(n).iter() {
            let value = 0.5 * f(e);
            let (a, b) = basis_indices(n, e);
            m[(a, b)] = value;
            m[(b, a)] = -value;
        }
        Covector(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn pair(&self, xi: &AlgebraElement) -> f64 {
        self.0.dot(&xi.0)
    }

    pub fn add(&self, other: &Covector) -> Covector {
        Covector(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Covector) -> Covector {
        Covector(&self.0 - &other.0)
    }

    pub fn scale(&self, t: f64) -> Covector {
        Covector(&self.0 * t)
    }

    pub fn norm_max(&self) -> f64 {
        self.0.amax()
    }
}

fn basis_indices(n: usize, e: &AlgebraElement) -> (usize, usize) {
    for a in 0..n {
        for b in a + 1..n {
            if e.0[(a, b)] != 0.0 {
                return (a, b);
            }
        }
    }
    unreachable!("basis element has a nonzero upper entry")
}

/// Matrix exponential of an antisymmetric matrix by scaling and squaring of
/// the Taylor series.
pub fn exp(xi: &AlgebraElement) -> GroupElement {
    let n = xi.dim();
    let norm = xi.0.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = &xi.0 * scale;
    let mut term = DMatrix::identity(n, n);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &a / k as f64;
        sum += &term;
        if term.amax() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    GroupElement::from_matrix_unchecked(sum)
}

/// Principal logarithm of a rotation without eigenvalue −1, by repeated
/// principal square roots (`√R = polar(I + R)`) followed by the Mercator series.
pub fn log(g: &GroupElement) -> Result<AlgebraElement> {
    let n = g.dim();
    let eye = DMatrix::<f64>::identity(n, n);
    let mut r = g.0.clone();
    let mut doublings = 0;
    while (&r - &eye).amax() > 0.05 {
        r = polar_project(&(&eye + &r))?.0;
        doublings += 1;
        if doublings > 60 {
            return Err(Error::InvalidInput("rotation too close to a half turn for a principal log".into()));
        }
    }
    let e = &r - &eye;
    let mut power = e.clone();
    let mut sum = e.clone();
    for k in 2..40 {
        power = &power * &e;
        let term = &power / k as f64;
        if k % 2 == 0 {
            sum -= &term;
        } else {
            sum += &term;
        }
        if term.amax() < 1e-18 {
            break;
        }
    }
    Ok(AlgebraElement::from_antisymmetric(sum * 2f64.powi(doublings)))
}

/// Point at parameter `t` on the geodesic `a·exp(t log(aᵀb))`.
pub fn geodesic(a: &GroupElement, b: &GroupElement, t: f64) -> Result<GroupElement> {
    let step = log(&(&a.inverse() * b))?;
    Ok(a * &exp(&step.scale(t)))
}

/// Orthogonal factor with determinant +1 of `w`: `U diag(1,…,1,±1) Vᵀ` from
/// the SVD, flipping the direction of the smallest singular value when
/// `det(w) < 0`.
pub fn polar_project(w: &DMatrix<f64>) -> Result<GroupElement> {
    let n = w.nrows();
    if n != w.ncols() {
        return Err(Error::DimensionMismatch { expected: n, found: w.ncols() });
    }
    let svd = w.clone().svd(true, true);
    let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else {
        return Err(Error::DegenerateNeighborSum { sigma_min: 0.0, at: None });
    };
    let (imin, sigma_min) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (k, s)| if s < best.1 { (k, s) } else { best });
    if !(sigma_min >= SINGULAR_TOL) {
        return Err(Error::DegenerateNeighborSum { sigma_min, at: None });
    }
    let mut r = &u * &v_t;
    if r.determinant() < 0.0 {
        let mut u = u;
        u.column_mut(imin).neg_mut();
        r = &u * &v_t;
    }
    Ok(GroupElement::from_matrix_unchecked(r))
}

/// Coadjoint-type action `gᵀ μ g`, characterised by `<result, ξ> = <μ, Ad_g ξ>`.
pub fn ad_action(g: &GroupElement, mu: &Covector) -> Result<Covector> {
    if g.dim() != mu.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), found: mu.dim() });
    }
    Ok(Covector::from_matrix(g.0.transpose() * &mu.0 * &g.0))
}

/// Tangent direction at a group element along an exp-curve.
#[derive(Clone, Debug)]
pub enum Direction {
    /// `t ↦ exp(tξ)·g`, tangent `ξg` (the fundamental vector field of ξ).
    Left(AlgebraElement),
    /// `t ↦ g·exp(tξ)`, tangent `gξ`.
    Right(AlgebraElement),
}

impl Direction {
    pub fn move_by(&self, g: &GroupElement, t: f64) -> GroupElement {
        match self {
            Direction::Left(xi) => &exp(&xi.scale(t)) * g,
            Direction::Right(xi) => g * &exp(&xi.scale(t)),
        }
    }
}

/// Central finite difference of `f` along `direction` in slot `slot` of `base`.
pub fn directional_derivative(
    f: impl Fn(&[GroupElement]) -> f64,
    base: &[GroupElement],
    slot: usize,
    direction: &Direction,
    step: f64,
) -> f64 {
    let mut point = base.to_vec();
    point[slot] = direction.move_by(&base[slot], step);
    let plus = f(&point);
    point[slot] = direction.move_by(&base[slot], -step);
    let minus = f(&point);
    (plus - minus) / (2.0 * step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(42)
    }

    fn rodrigues(xi: &AlgebraElement) -> DMatrix<f64> {
        let m = xi.matrix();
        let w = [m[(2, 1)], m[(0, 2)], m[(1, 0)]];
        let theta = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
        let k = m / theta;
        DMatrix::identity(3, 3) + &k * theta.sin() + &k * &k * (1.0 - theta.cos())
    }

    #[test]
    fn inverse_is_transpose_and_cancels() {
        let mut rng = rng();
        let g = GroupElement::random(3, &mut rng);
        assert_eq!(g.inverse().matrix(), &g.matrix().transpose());
        assert!((&g * &g.inverse()).distance(&GroupElement::identity(3)) < 1e-12);
        assert_eq!(GroupElement::identity(4).inverse(), GroupElement::identity(4));
        let h = GroupElement::random(3, &mut rng);
        assert!((&g * &h).orthogonality_defect() < 1e-12);
        let k = GroupElement::random(3, &mut rng);
        assert!((&(&g * &h) * &k).distance(&(&g * &(&h * &k))) < 1e-14);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let g = GroupElement::identity(2);
        let h = GroupElement::identity(3);
        assert_eq!(g.multiply(&h), Err(Error::DimensionMismatch { expected: 2, found: 3 }));
        assert!(ad_action(&g, &Covector::zero(3)).is_err());
    }

    #[test]
    fn new_rejects_reflections_and_non_orthogonal() {
        let reflection = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(GroupElement::new(reflection), Err(Error::NotSpecialOrthogonal { .. })));
        let shear = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(GroupElement::new(shear).is_err());
        assert!(GroupElement::new(GroupElement::rotation2(0.3).into_matrix()).is_ok());
    }

    #[test]
    fn exp_of_zero_is_identity() {
        assert_eq!(exp(&AlgebraElement::zero(3)), GroupElement::identity(3));
    }

    #[test]
    fn exp_in_two_dimensions_is_a_rotation() {
        for theta in [-3.0, -0.7, 0.0, 0.4, 1.9, 6.0] {
            let xi = AlgebraElement::from_coordinates(2, &[-theta]);
            assert!(exp(&xi).distance(&GroupElement::rotation2(theta)) < 1e-14, "{theta}");
        }
    }

    #[test]
    fn exp_matches_rodrigues() {
        let mut rng = rng();
        for _ in 0..50 {
            let xi = AlgebraElement::random(3, 1.5, &mut rng);
            assert!((exp(&xi).matrix() - rodrigues(&xi)).amax() < 1e-12);
        }
    }

    #[test]
    fn exp_has_unit_derivative_at_zero() {
        let mut rng = rng();
        let xi = AlgebraElement::random(4, 1.0, &mut rng);
        let h = 1e-5;
        let d = (exp(&xi.scale(h)).matrix() - exp(&xi.scale(-h)).matrix()) / (2.0 * h);
        assert!((d - xi.matrix()).amax() < 1e-9);
    }

    #[test]
    fn log_inverts_exp() {
        let mut rng = rng();
        for n in [2, 3, 5] {
            for _ in 0..10 {
                let xi = AlgebraElement::random(n, 0.6, &mut rng);
                let back = log(&exp(&xi)).unwrap();
                assert!((back.matrix() - xi.matrix()).amax() < 1e-11);
            }
        }
    }

    #[test]
    fn polar_of_scaled_rotation() {
        let mut rng = rng();
        let r = GroupElement::random(3, &mut rng);
        assert!(polar_project(&(r.matrix() * 2.0)).unwrap().distance(&r) < 1e-14);
        assert!(polar_project(&DMatrix::identity(3, 3)).unwrap().distance(&GroupElement::identity(3)) < 1e-15);
    }

    #[test]
    fn polar_with_negative_determinant() {
        let mut rng = rng();
        let mut found = 0;
        while found < 20 {
            let w = DMatrix::from_fn(3, 3, |_, _| rng.sample::<f64, _>(StandardNormal));
            if w.determinant() >= 0.0 {
                continue;
            }
            found += 1;
            let r = polar_project(&w).unwrap();
            assert!((r.matrix().determinant() - 1.0).abs() < 1e-12);
            let p = r.matrix().transpose() * &w;
            assert!((&p - p.transpose()).amax() < 1e-12);
            let eig = p.symmetric_eigenvalues();
            assert_eq!(eig.iter().filter(|&&x| x < 0.0).count(), 1);
            let q = &w * r.matrix().transpose();
            assert!((&q - q.transpose()).amax() < 1e-12);
        }
    }

    #[test]
    fn polar_rejects_singular_input() {
        let w = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(polar_project(&w), Err(Error::DegenerateNeighborSum { .. })));
    }

    #[test]
    fn exp_and_polar_respect_block_embedding() {
        let mut rng = rng();
        let embed = |m: &DMatrix<f64>| {
            let mut big = DMatrix::identity(3, 3);
            big.view_mut((0, 0), (2, 2)).copy_from(m);
            big
        };
        let theta: f64 = 0.83;
        let xi2 = AlgebraElement::from_coordinates(2, &[theta]);
        let mut xi3 = DMatrix::zeros(3, 3);
        xi3.view_mut((0, 0), (2, 2)).copy_from(xi2.matrix());
        let xi3 = AlgebraElement::new(xi3).unwrap();
        assert!((exp(&xi3).matrix() - embed(exp(&xi2).matrix())).amax() < 1e-15);

        let w2 = DMatrix::from_fn(2, 2, |_, _| rng.random_range(-1.0..1.0)) + DMatrix::identity(2, 2) * 2.0;
        let w3 = embed(&w2);
        let p2 = polar_project(&w2).unwrap();
        assert!((polar_project(&w3).unwrap().matrix() - embed(p2.matrix())).amax() < 1e-14);
    }

    #[test]
    fn ad_action_pairing_identity() {
        let mut rng = rng();
        for _ in 0..100 {
            let g = GroupElement::random(3, &mut rng);
            let mu = Covector::from_matrix(AlgebraElement::random(3, 1.0, &mut rng).matrix().clone());
            let xi = AlgebraElement::random(3, 1.0, &mut rng);
            let lhs = ad_action(&g, &mu).unwrap().pair(&xi);
            let rhs = mu.pair(&g.adjoint(&xi));
            assert!((lhs - rhs).abs() < 1e-12);
        }
        let mu = Covector::from_matrix(AlgebraElement::random(3, 1.0, &mut rng).matrix().clone());
        assert!(ad_action(&GroupElement::identity(3), &mu).unwrap().sub(&mu).norm_max() < 1e-16);
        let mu2 = Covector::from_matrix(AlgebraElement::from_coordinates(2, &[0.7]).matrix().clone());
        for angle in [0.3, 2.0, -1.1] {
            let out = ad_action(&GroupElement::rotation2(angle), &mu2).unwrap();
            assert!(out.sub(&mu2).norm_max() < 1e-15);
        }
    }

    #[test]
    fn trace_pairing_gram_matrix_is_diagonal() {
        let basis = AlgebraElement::basis(4);
        for (a, ea) in basis.iter().enumerate() {
            for (b, eb) in basis.iter().enumerate() {
                let g = Covector::from_matrix(ea.matrix().clone()).pair(eb);
                assert_eq!(g, if a == b { 2.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn covector_from_functional_round_trips() {
        let mut rng = rng();
        let mu = Covector::from_matrix(DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0)));
        let back = Covector::from_functional(4, |xi| mu.pair(xi));
        assert!(back.sub(&mu).norm_max() < 1e-15);
    }

    #[test]
    fn directional_derivative_basics() {
        let mut rng = rng();
        let g = GroupElement::random(3, &mut rng);
        let xi = AlgebraElement::random(3, 1.0, &mut rng);
        let constant = |_: &[GroupElement]| 3.0;
        assert_eq!(directional_derivative(constant, std::slice::from_ref(&g), 0, &Direction::Left(xi.clone()), FD_STEP), 0.0);
        let trace = |g: &[GroupElement]| g[0].trace();
        let d = directional_derivative(trace, &[GroupElement::identity(3)], 0, &Direction::Right(xi), FD_STEP);
        assert!(d.abs() < 1e-12);
    }

    #[test]
    fn directional_derivative_matches_analytic_and_converges_quadratically() {
        let mut rng = rng();
        let a = DMatrix::from_fn(3, 3, |_, _| rng.random_range(-1.0..1.0));
        let f = |g: &[GroupElement]| (&a * g[0].matrix().transpose()).trace();
        let g = GroupElement::random(3, &mut rng);
        let xi = AlgebraElement::random(3, 1.0, &mut rng);
        // d/dt tr(A (g e^{tξ})ᵀ) = tr(A (gξ)ᵀ); d/dt tr(A (e^{tξ} g)ᵀ) = tr(A (ξg)ᵀ)
        let right = (&a * (g.matrix() * xi.matrix()).transpose()).trace();
        let left = (&a * (xi.matrix() * g.matrix()).transpose()).trace();
        let base = [g];
        let dr = directional_derivative(f, &base, 0, &Direction::Right(xi.clone()), FD_STEP);
        let dl = directional_derivative(f, &base, 0, &Direction::Left(xi.clone()), FD_STEP);
        assert!((dr - right).abs() < 1e-6);
        assert!((dl - left).abs() < 1e-6);

        let err = |h: f64| (directional_derivative(f, &base, 0, &Direction::Right(xi.clone()), h) - right).abs();
        let (e1, e2) = (err(0.02), err(0.01));
        let ratio = e1 / e2;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }
}
