use thiserror::Error;

use crate::mesh::Vertex;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mesh dimensions must both be at least 2, got {width}x{height}")]
    InvalidDimensions { width: usize, height: usize },

    #[error("operation is undefined on chains or forms of degree {degree}")]
    DegreeUnderflow { degree: usize },

    #[error("cell has no complete dual cell inside the mesh: {0}")]
    NoDualCell(String),

    #[error("cannot pair {form} with {chain}")]
    PairingMismatch { form: String, chain: String },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not special orthogonal (orthogonality defect {defect:e}, det {det})")]
    NotSpecialOrthogonal { defect: f64, det: f64 },

    #[error("matrix is not antisymmetric (defect {defect:e})")]
    NotAntisymmetric { defect: f64 },

    #[error("neighbor sum is numerically singular (smallest singular value {sigma_min:e}){}", at.map(|v| format!(" at {v}")).unwrap_or_default())]
    DegenerateNeighborSum { sigma_min: f64, at: Option<Vertex> },

    #[error("{tail} and {head} are not joined by a mesh edge")]
    NotAdjacent { tail: Vertex, head: Vertex },

    #[error("{0} lies outside the mesh")]
    OutOfBounds(Vertex),

    #[error("path is broken after edge {index}: {end} is not followed by an edge starting there")]
    BrokenPath { index: usize, end: Vertex },

    #[error("connection is not flat (max curvature defect {max_defect:e} exceeds {tol:e})")]
    NotFlat { max_defect: f64, tol: f64 },

    #[error("action region reaches outside the mesh at base vertex {0}")]
    RegionOverflow(Vertex),

    #[error("stencil around {0} is not contained in the mesh")]
    StencilOverflow(Vertex),

    #[error("variation is nonzero on the region boundary at {0}")]
    BoundaryViolation(Vertex),

    #[error("no convergence after {sweeps} sweeps: residual {residual:e} at {worst} (tol {tol:e})")]
    NoConvergence {
        sweeps: usize,
        residual: f64,
        worst: Vertex,
        tol: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
