use nalgebra::DMatrix;

use crate::error::{Result, RomError};
use crate::fe::{VelocitySpace, LOCAL_NODES};
use crate::pod::PodBasis;

/// Default memory budget for the streamed tensor build, in bytes.
pub const DEFAULT_BLOCK_BUDGET: usize = 256 << 20;

/// Reduced convection tensor `T_ijk = b*(phi_i, phi_j, phi_k)`.
///
/// Stored as `r` slices of `r x r`, slice `i` row-major in `(j, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrilinearTensor {
    r: usize,
    data: Vec<f64>,
}

impl TrilinearTensor {
    pub fn from_fn(r: usize, f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(r * r * r);
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    data.push(f(i, j, k));
                }
            }
        }
        Self { r, data }
    }

    pub fn zeros(r: usize) -> Self {
        Self { r, data: vec![0.0; r * r * r] }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.r + j) * self.r + k]
    }

    /// The `r x r` slice `T_i..`, row-major in `(j, k)`.
    pub fn slice(&self, i: usize) -> &[f64] {
        let rr = self.r * self.r;
        &self.data[i * rr..(i + 1) * rr]
    }

    /// Leading `r x r x r` sub-tensor (the tensor of the first `r` modes).
    pub fn truncate(&self, r: usize) -> Result<Self> {
        if r > self.r {
            return Err(RomError::InvalidArgument(format!("cannot truncate rank-{} tensor to {r}", self.r)));
        }
        Ok(Self::from_fn(r, |i, j, k| self.get(i, j, k)))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |T_ijk + T_ikj|`
    pub fn skew_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.r {
            for j in 0..self.r {
                for k in 0..self.r {
                    d = d.max((self.get(i, j, k) + self.get(i, k, j)).abs());
                }
            }
        }
        d
    }

    /// `N_m = sum_ij abar_i a_j T_ijm`
    pub fn contract(&self, abar: &[f64], a: &[f64]) -> Vec<f64> {
        let r = self.r;
        let mut out = vec![0.0; r];
        for (i, &ai) in abar.iter().enumerate() {
            for (j, &aj) in a.iter().enumerate() {
                let c = ai * aj;
                if c == 0.0 {
                    continue;
                }
                let row = &self.data[(i * r + j) * r..(i * r + j + 1) * r];
                for (o, t) in out.iter_mut().zip(row) {
                    *o += c * t;
                }
            }
        }
        out
    }

    /// Adds `B(abar)` with `B_mj = sum_i abar_i T_ijm` to the column-major `r x r` matrix `target`.
    pub fn add_advection_matrix(&self, abar: &[f64], target: &mut DMatrix<f64>) {
        let r = self.r;
        // column j of target gets sum_i abar_i T_ij.
        let dst = target.as_mut_slice();
        for (i, &ai) in abar.iter().enumerate() {
            if ai == 0.0 {
                continue;
            }
            for (d, t) in dst.iter_mut().zip(self.slice(i)) {
                *d += ai * t;
            }
        }
        debug_assert_eq!(dst.len(), r * r);
    }
}

/// Assembles the reduced convection tensor of the first `r` modes.
///
/// Mode values and gradients are evaluated at blocks of quadrature points;
/// each block contributes `C_ijk = sum_q w_q ((phi_i . grad) phi_j)(q) . phi_k(q)`
/// through two matrix products, and `T_ijk = (C_ijk - C_ikj) / 2`.
pub fn build_trilinear_tensor(
    space: &VelocitySpace,
    basis: &PodBasis,
    r: usize,
    block_budget: usize,
) -> Result<TrilinearTensor> {
    if r == 0 || r > basis.dim() {
        return Err(RomError::InvalidArgument(format!("r = {r} outside 1..={}", basis.dim())));
    }
    crate::error::check_dim(space.dofs(), basis.dofs())?;
    let ns = space.scalar_dofs();
    let nq = space.rule().len();
    let weights = space.rule().weights();
    let tab = space.tabulation();
    let modes = basis.modes();
    let rr = r * r;
    let block_elems = (block_budget / (2 * rr * 8 * nq)).clamp(1, space.element_count());
    let mut c = DMatrix::<f64>::zeros(rr, r);

    let elements: Vec<usize> = (0..space.element_count()).collect();
    for chunk in elements.chunks(block_elems) {
        let qb = chunk.len() * nq;
        // mode values and gradients, one column per quadrature point
        let mut val = [DMatrix::<f64>::zeros(r, qb), DMatrix::<f64>::zeros(r, qb)];
        let mut grad = [
            [DMatrix::<f64>::zeros(r, qb), DMatrix::<f64>::zeros(r, qb)],
            [DMatrix::<f64>::zeros(r, qb), DMatrix::<f64>::zeros(r, qb)],
        ];
        let mut wq = vec![0.0; qb];
        let mut local = vec![[0.0; LOCAL_NODES]; 2 * r];
        for (b, &e) in chunk.iter().enumerate() {
            let geo = &space.geometry()[e];
            let dofs = &space.dofmap()[e];
            let det = geo.det.abs();
            for m in 0..r {
                let col = modes.column(m);
                for comp in 0..2 {
                    for a in 0..LOCAL_NODES {
                        local[2 * m + comp][a] = col[comp * ns + dofs[a]];
                    }
                }
            }
            for q in 0..nq {
                let pt = b * nq + q;
                wq[pt] = weights[q] * det;
                let pg = tab.gradients[q].map(|ga| geo.physical_gradient(ga));
                for m in 0..r {
                    for comp in 0..2 {
                        let coefs = &local[2 * m + comp];
                        let (mut v, mut gx, mut gy) = (0.0, 0.0, 0.0);
                        for a in 0..LOCAL_NODES {
                            v += coefs[a] * tab.values[q][a];
                            gx += coefs[a] * pg[a][0];
                            gy += coefs[a] * pg[a][1];
                        }
                        val[comp][(m, pt)] = v;
                        grad[comp][0][(m, pt)] = gx;
                        grad[comp][1][(m, pt)] = gy;
                    }
                }
            }
        }
        for comp in 0..2 {
            // x[(i, j), q] = w_q sum_d phi_i^d(q) d_d phi_j^comp(q), pair index i + r j
            let mut x = DMatrix::<f64>::zeros(rr, qb);
            for q in 0..qb {
                let w = wq[q];
                let (v0, v1) = (val[0].column(q), val[1].column(q));
                let (g0, g1) = (grad[comp][0].column(q), grad[comp][1].column(q));
                let mut col = x.column_mut(q);
                let dst = col.as_mut_slice();
                for j in 0..r {
                    let (a0, a1) = (g0[j] * w, g1[j] * w);
                    let out = &mut dst[r * j..r * (j + 1)];
                    for i in 0..r {
                        out[i] = v0[i] * a0 + v1[i] * a1;
                    }
                }
            }
            c.gemm(1.0, &x, &val[comp].transpose(), 1.0);
        }
    }

    Ok(TrilinearTensor::from_fn(r, |i, j, k| 0.5 * (c[(i + r * j, k)] - c[(i + r * k, j)])))
}
