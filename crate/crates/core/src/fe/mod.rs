//! Quadratic Lagrange finite elements on a structured triangulation of the unit square.

mod assembly;
mod mesh;
mod quadrature;
mod space;
mod sparse;
mod trilinear;

pub use assembly::{assemble_mass, assemble_stiffness, h1_semi_norm, l2_inner, l2_norm};
pub use mesh::TriMesh;
pub use quadrature::{gauss_legendre_unit, TriangleRule};
pub use space::{shape_gradients, shape_values, ElementGeometry, FeField, Tabulation, VelocitySpace, LOCAL_NODES};
pub use sparse::{CsrMatrix, SymmetricOperator};
pub use trilinear::{trilinear_bstar, trilinear_bstar_with_rule};
