//! Mass and stiffness operators and the discrete norms built from them.

use super::space::{VelocitySpace, LOCAL_NODES};
use super::sparse::{CsrMatrix, SymmetricOperator};
use crate::error::{check_dim, Result};

type LocalMatrix = [[f64; LOCAL_NODES]; LOCAL_NODES];

fn assemble(space: &VelocitySpace, local: impl Fn(usize) -> LocalMatrix) -> SymmetricOperator {
    let ns = space.scalar_dofs();
    let mut triplets = Vec::with_capacity(space.element_count() * LOCAL_NODES * LOCAL_NODES);
    for (e, dofs) in space.dofmap().iter().enumerate() {
        let k = local(e);
        for a in 0..LOCAL_NODES {
            for b in 0..LOCAL_NODES {
                triplets.push((dofs[a], dofs[b], k[a][b]));
            }
        }
    }
    SymmetricOperator::block_diagonal(CsrMatrix::from_triplets(ns, ns, triplets), 2)
}

// only the upper triangle is integrated; the lower one is mirrored so that
// the assembled operator is exactly symmetric
fn symmetric_local(entry: impl Fn(usize, usize) -> f64) -> LocalMatrix {
    let mut k = [[0.0; LOCAL_NODES]; LOCAL_NODES];
    for a in 0..LOCAL_NODES {
        for b in a..LOCAL_NODES {
            let v = entry(a, b);
            k[a][b] = v;
            k[b][a] = v;
        }
    }
    k
}

/// L2 mass operator `(u, v)` over both velocity components.
pub fn assemble_mass(space: &VelocitySpace) -> SymmetricOperator {
    let w = space.rule().weights();
    let tab = space.tabulation();
    assemble(space, |e| {
        let det = space.geometry()[e].det.abs();
        symmetric_local(|a, b| {
            w.iter().zip(&tab.values).map(|(wq, phi)| wq * phi[a] * phi[b]).sum::<f64>() * det
        })
    })
}

/// Gradient operator `(grad u, grad v)`; no boundary rows are eliminated.
pub fn assemble_stiffness(space: &VelocitySpace) -> SymmetricOperator {
    let w = space.rule().weights();
    let tab = space.tabulation();
    assemble(space, |e| {
        let geo = &space.geometry()[e];
        let det = geo.det.abs();
        let grads: Vec<[[f64; 2]; LOCAL_NODES]> =
            tab.gradients.iter().map(|g| g.map(|ga| geo.physical_gradient(ga))).collect();
        symmetric_local(|a, b| {
            w.iter()
                .zip(&grads)
                .map(|(wq, g)| wq * (g[a][0] * g[b][0] + g[a][1] * g[b][1]))
                .sum::<f64>()
                * det
        })
    })
}

/// `(u, v)` with the mass operator.
pub fn l2_inner(mass: &SymmetricOperator, u: &[f64], v: &[f64]) -> Result<f64> {
    check_dim(mass.dim(), v.len())?;
    mass.inner(u, v)
}

/// `sqrt(u^T M u)`
pub fn l2_norm(mass: &SymmetricOperator, u: &[f64]) -> Result<f64> {
    Ok(mass.inner(u, u)?.max(0.0).sqrt())
}

/// `sqrt(u^T S u)`
pub fn h1_semi_norm(stiffness: &SymmetricOperator, u: &[f64]) -> Result<f64> {
    Ok(stiffness.inner(u, u)?.max(0.0).sqrt())
}
