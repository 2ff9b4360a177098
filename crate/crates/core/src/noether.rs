//! Poincaré-Cartan forms, Noether currents on the dual mesh, and the discrete
//! conservation law `δ⁻ₓη^(x) + δ⁻ᵧη^(y) = 0`.
//!
//! Slots are 0-based throughout. Tangents to `L` are passed right-translated
//! (`v_i = ξ_i g_i`); tangents to `l` are passed as the algebra elements
//! `(ξ1, ξ2, ξ3)` of the reduced phase space.

use crate::connection::DiscreteField;
use crate::error::{Error, Result};
use crate::lie::{exp, AlgebraElement, Covector, GroupElement};
use crate::mesh::{Mesh, Vertex};
use crate::par;
use crate::variational::{stencil, CovectorMap, ExpSide, Lagrangian, LagrangianPair};

/// `⟨θ^L_(slot)(g), (ξ1g1, ξ2g2, ξ3g3)⟩`: the slot derivative of `L` along `exp(tξ_slot)g_slot`.
pub fn theta_full<L: Lagrangian>(pair: &LagrangianPair<L>, slot: usize, g: &[GroupElement], xi: &[AlgebraElement]) -> f64 {
    pair.full_differential(g, slot, ExpSide::Left).pair(&xi[slot])
}

/// `⟨θ^l_(slot)(u, v), (ξ1, ξ2, ξ3)⟩`. Slot 0 uses
/// `−⟨dl(·,v), TR_u ξ1⟩ − ⟨dl(u,·), TR_v ξ1⟩`; slots 1 and 2 use
/// `⟨dl(·,v), TL_u ξ2⟩` and `⟨dl(u,·), TL_v ξ3⟩`.
pub fn theta_reduced<L: Lagrangian>(pair: &LagrangianPair<L>, slot: usize, uv: &[GroupElement], xi: &[AlgebraElement]) -> f64 {
    match slot {
        0 => {
            let du = pair.reduced_differential(uv, 0, ExpSide::Left);
            let dv = pair.reduced_differential(uv, 1, ExpSide::Left);
            -du.pair(&xi[0]) - dv.pair(&xi[0])
        }
        1 => pair.reduced_differential(uv, 0, ExpSide::Right).pair(&xi[1]),
        2 => pair.reduced_differential(uv, 1, ExpSide::Right).pair(&xi[2]),
        _ => panic!("slot {slot} out of range"),
    }
}

/// Slot-0 form through the curve `h(t) = exp(tξ1)`: `d/dt l(h⁻¹u, h⁻¹v)` at 0.
pub fn theta_reduced_first_by_curve<L: Lagrangian>(pair: &LagrangianPair<L>, uv: &[GroupElement], xi1: &AlgebraElement) -> f64 {
    let at = |t: f64| {
        let h_inv = exp(&xi1.scale(-t));
        pair.reduced(&(&h_inv * &uv[0]), &(&h_inv * &uv[1]))
    };
    let h = pair.fd_step;
    (at(h) - at(-h)) / (2.0 * h)
}

/// `J^slot(g)`: the covector `ξ ↦ ⟨θ^L_(slot)(g), (ξ_G(g1), ξ_G(g2), ξ_G(g3))⟩`.
pub fn current<L: Lagrangian>(pair: &LagrangianPair<L>, slot: usize, g: &[GroupElement]) -> Covector {
    pair.full_differential(g, slot, ExpSide::Left)
}

/// `‖J¹ + J² + J³‖_max` at `g`; zero for G-invariant Lagrangians.
pub fn redundancy_defect<L: Lagrangian>(pair: &LagrangianPair<L>, g: &[GroupElement]) -> f64 {
    (0..3).map(|s| current(pair, s, g)).reduce(|a, b| a.add(&b)).expect("three slots").norm_max()
}

/// Currents `η^(x) = J²∘ψ` and `η^(y) = J³∘ψ` on every dual vertex, where the
/// dual vertex `(a, b)` is the centre of the face with base vertex `(a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoetherCurrents {
    mesh: Mesh,
    pub eta_x: Vec<Covector>,
    pub eta_y: Vec<Covector>,
    /// `J¹∘ψ`, kept for the redundancy check.
    pub j1: Vec<Covector>,
}

impl NoetherCurrents {
    pub fn mesh(&self) -> Mesh {
        self.mesh
    }

    fn index(&self, r: Vertex) -> usize {
        self.mesh.dual().vertex_index(r)
    }

    pub fn eta_x(&self, r: Vertex) -> &Covector {
        &self.eta_x[self.index(r)]
    }

    pub fn eta_y(&self, r: Vertex) -> &Covector {
        &self.eta_y[self.index(r)]
    }

    /// `max_r ‖J¹ + J² + J³‖_max` over dual vertices.
    pub fn redundancy_defect(&self) -> f64 {
        self.j1
            .iter()
            .zip(&self.eta_x)
            .zip(&self.eta_y)
            .map(|((a, b), c)| a.add(b).add(c).norm_max())
            .fold(0.0, f64::max)
    }
}

pub fn noether_currents<L: Lagrangian>(pair: &LagrangianPair<L>, field: &DiscreteField) -> NoetherCurrents {
    let mesh = field.mesh();
    let faces: Vec<Vertex> = mesh.dual().vertices().collect();
    let triples = par::map_slice(pair.execution, &faces, |r| {
        let g = stencil(field, r.i, r.j);
        [current(pair, 0, &g), current(pair, 1, &g), current(pair, 2, &g)]
    });
    let mut out = NoetherCurrents { mesh, eta_x: vec![], eta_y: vec![], j1: vec![] };
    for [a, b, c] in triples {
        out.j1.push(a);
        out.eta_x.push(b);
        out.eta_y.push(c);
    }
    out
}

/// `(δ⁻ₓη^(x))(r) + (δ⁻ᵧη^(y))(r)` with backward differences towards the west
/// and south dual neighbours of `r`.
pub fn noether_residual(currents: &NoetherCurrents, r: Vertex) -> Result<Covector> {
    let dual = currents.mesh.dual();
    if !dual.contains(r) || r.i == 0 || r.j == 0 {
        return Err(Error::StencilOverflow(r));
    }
    let west = Vertex::new(r.i - 1, r.j);
    let south = Vertex::new(r.i, r.j - 1);
    Ok(currents
        .eta_x(r)
        .sub(currents.eta_x(west))
        .add(&currents.eta_y(r).sub(currents.eta_y(south))))
}

/// [`noether_residual`] at every dual vertex with west and south neighbours.
pub fn noether_residuals(currents: &NoetherCurrents) -> CovectorMap {
    let dual = currents.mesh.dual();
    let entries = dual
        .vertices()
        .filter(|r| r.i > 0 && r.j > 0)
        .map(|r| (r, noether_residual(currents, r).expect("full stencil")))
        .collect();
    CovectorMap { entries }
}

/// The primal vertex shared by the three faces in the stencil of dual vertex `r`.
pub fn stencil_vertex(r: Vertex) -> Vertex {
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::reduce;
    use crate::lie::directional_derivative;
    use crate::lie::Direction;
    use crate::variational::{el_residual, ep_residual, psi_hat, FromReduced};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(23)
    }

    fn random_triple(rng: &mut ChaCha8Rng) -> (Vec<GroupElement>, Vec<AlgebraElement>) {
        let g = (0..3).map(|_| GroupElement::random(3, rng)).collect();
        let xi = (0..3).map(|_| AlgebraElement::random(3, 1.0, rng)).collect();
        (g, xi)
    }

    #[test]
    fn constant_lagrangian_has_zero_forms() {
        let mut rng = rng();
        let pair = LagrangianPair::new(FromReduced(|_: &GroupElement, _: &GroupElement| 3.0));
        let (g, xi) = random_triple(&mut rng);
        for s in 0..3 {
            assert!(theta_full(&pair, s, &g, &xi).abs() < 1e-9);
        }
    }

    #[test]
    fn slot_forms_sum_to_the_differential() {
        let mut rng = rng();
        let pair = LagrangianPair::harmonic();
        let (g, xi) = random_triple(&mut rng);
        let sum: f64 = (0..3).map(|s| theta_full(&pair, s, &g, &xi)).sum();
        let h = 1e-5;
        let at = |t: f64| {
            let moved: Vec<_> = g.iter().zip(&xi).map(|(gi, x)| &exp(&x.scale(t)) * gi).collect();
            pair.full(&moved)
        };
        assert!((sum - (at(h) - at(-h)) / (2.0 * h)).abs() < 1e-6);
    }

    #[test]
    fn harmonic_second_slot_matches_trace_derivative() {
        let mut rng = rng();
        let pair = LagrangianPair::harmonic();
        let (g, xi) = random_triple(&mut rng);
        // d/dt tr(g1ᵀ exp(tξ) g2) = tr(g1ᵀ ξ g2).
        let expected = (g[0].matrix().transpose() * xi[1].matrix() * g[1].matrix()).trace();
        assert!((theta_full(&pair, 1, &g, &xi) - expected).abs() < 1e-8);
    }

    #[test]
    fn first_reduced_slot_forms_agree() {
        let mut rng = rng();
        let pair = LagrangianPair::new(FromReduced(|u: &GroupElement, v: &GroupElement| (u * v).trace().powi(2) + u.trace()));
        let (g, xi) = random_triple(&mut rng);
        let uv = [g[1].clone(), g[2].clone()];
        let a = theta_reduced(&pair, 0, &uv, &xi);
        let b = theta_reduced_first_by_curve(&pair, &uv, &xi[0]);
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        assert_eq!(theta_reduced(&pair, 2, &uv, &[AlgebraElement::zero(3), AlgebraElement::zero(3), AlgebraElement::zero(3)]), 0.0);
    }

    #[test]
    fn reduced_forms_pull_back() {
        let mut rng = rng();
        let pair = LagrangianPair::new(FromReduced(|u: &GroupElement, v: &GroupElement| (u * v).trace().powi(2) + u.trace()));
        for _ in 0..5 {
            let (g, xi) = random_triple(&mut rng);
            let uv = psi_hat(&g);
            let body: Vec<_> = g.iter().zip(&xi).map(|(gi, x)| gi.inverse().adjoint(x)).collect();
            for s in 0..3 {
                let lhs = theta_reduced(&pair, s, &uv, &body);
                let rhs = theta_full(&pair, s, &g, &xi);
                assert!((lhs - rhs).abs() < 1e-6, "slot {s}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn harmonic_eta_x_is_antisymmetrized_product() {
        let mut rng = rng();
        let m = Mesh::new(4, 3).unwrap();
        let phi = DiscreteField::random(m, 3, &mut rng);
        let c = noether_currents(&LagrangianPair::harmonic(), &phi);
        for r in m.dual().vertices() {
            let g1 = phi.get(r).matrix();
            let g2 = phi.at(r.i + 1, r.j).matrix();
            let expected = Covector::from_matrix(g1 * g2.transpose());
            assert!(c.eta_x(r).sub(&expected).norm_max() < 1e-9);
        }
        assert!(c.redundancy_defect() < 1e-8);
    }

    #[test]
    fn constant_field_currents_are_constant() {
        let mut rng = rng();
        let m = Mesh::new(4, 4).unwrap();
        let phi = DiscreteField::constant(m, &GroupElement::random(3, &mut rng));
        let c = noether_currents(&LagrangianPair::harmonic(), &phi);
        assert!(noether_residuals(&c).sup_norm() < 1e-9);
        let r0 = Vertex::new(0, 0);
        for r in m.dual().vertices() {
            assert!(c.eta_x(r).sub(c.eta_x(r0)).norm_max() < 1e-12);
        }
        assert!(matches!(noether_residual(&c, Vertex::new(0, 2)), Err(Error::StencilOverflow(_))));
    }

    #[test]
    fn conservation_residual_is_minus_el_and_reduces_to_ep() {
        let mut rng = rng();
        let m = Mesh::new(5, 5).unwrap();
        let pair = LagrangianPair::harmonic();
        let phi = DiscreteField::random(m, 3, &mut rng);
        let c = noether_currents(&pair, &phi);
        let omega = reduce(&phi);
        for (r, res) in noether_residuals(&c).entries {
            let x = stencil_vertex(r);
            let el = el_residual(&pair, &phi, x).unwrap();
            assert!(res.add(&el).norm_max() < 2e-6);
            let ep = ep_residual(&pair, &omega, x).unwrap();
            let xi = AlgebraElement::random(3, 1.0, &mut rng);
            let eta = phi.get(x).inverse().adjoint(&xi);
            assert!((res.pair(&xi) - ep.pair(&eta)).abs() < 2e-6);
        }
    }

    #[test]
    fn redundancy_for_generic_invariant_lagrangian() {
        let mut rng = rng();
        let pair = LagrangianPair::new(FromReduced(|u: &GroupElement, v: &GroupElement| (u.trace() - v.trace()).cos()));
        let (g, _) = random_triple(&mut rng);
        assert!(redundancy_defect(&pair, &g) < 1e-8);
        // The FD slot derivative agrees with the generic helper.
        let xi = AlgebraElement::random(3, 1.0, &mut rng);
        let d = directional_derivative(|x| pair.full(x), &g, 1, &Direction::Left(xi.clone()), 1e-5);
        assert!((current(&pair, 1, &g).pair(&xi) - d).abs() < 1e-9);
    }
}
