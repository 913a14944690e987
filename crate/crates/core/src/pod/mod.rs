//! Proper orthogonal decomposition by the method of snapshots, and the
//! ROM-space operators built on top of the basis.

mod cache;

pub use cache::{load_basis, save_basis, CacheKey};

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Result, RomError};
use crate::fe::{FeField, SymmetricOperator, VelocitySpace};
use crate::linalg::{compensated_dot, symmetric_eig};
use crate::manufactured::AnalyticSolution;

/// Default relative eigenvalue cut-off used to determine the numerical rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-14;

/// Velocity snapshots stored as the columns of a dense matrix.
#[derive(Debug, Clone)]
pub struct SnapshotSet {
    times: Vec<f64>,
    matrix: DMatrix<f64>,
}

impl SnapshotSet {
    /// Wraps precomputed columns.
    pub fn from_columns(times: Vec<f64>, columns: &[FeField]) -> Result<Self> {
        check_dim(times.len(), columns.len())?;
        if columns.is_empty() {
            return Err(RomError::InvalidArgument("snapshot set is empty".into()));
        }
        let n = columns[0].len();
        for c in columns {
            check_dim(n, c.len())?;
        }
        let matrix = DMatrix::from_fn(n, columns.len(), |i, j| columns[j].values()[i]);
        Ok(Self { times, matrix })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// `N x (M+1)` snapshot matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.ncols() == 0
    }

    pub fn column(&self, l: usize) -> FeField {
        FeField::from_vec(self.matrix.column(l).iter().copied().collect())
    }
}

/// `t_l = l dT` for `l = 0..count`.
pub fn uniform_times(spacing: f64, count: usize) -> Vec<f64> {
    (0..count).map(|l| l as f64 * spacing).collect()
}

/// Nodal interpolants of the exact velocity at the given times, uncentred.
pub fn collect_snapshots(space: &VelocitySpace, solution: &AnalyticSolution, times: &[f64]) -> Result<SnapshotSet> {
    if times.is_empty() {
        return Err(RomError::InvalidArgument("no snapshot times".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(RomError::InvalidArgument("snapshot times must be strictly increasing".into()));
    }
    if times.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(RomError::InvalidArgument("snapshot times must lie in [0, 1]".into()));
    }
    let columns = times
        .iter()
        .map(|&t| space.interpolate(|p| solution.velocity(p, t)))
        .collect::<Result<Vec<_>>>()?;
    SnapshotSet::from_columns(times.to_vec(), &columns)
}

/// `M x` for every column of `x`.
pub(crate) fn apply_to_columns(op: &SymmetricOperator, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_dim(op.dim(), x.nrows())?;
    let mut out = DMatrix::zeros(x.nrows(), x.ncols());
    for j in 0..x.ncols() {
        op.apply_into(x.column(j).as_slice(), out.column_mut(j).as_mut_slice())?;
    }
    Ok(out)
}

/// Snapshot correlation matrix `K = U^T M U / (M+1)` in the L2 inner product.
///
/// Entries use compensated dot products: the trailing eigenvalues sit many
/// orders of magnitude below `lambda_1`, and plain summation over all degrees
/// of freedom perturbs them by `~ sqrt(N) eps lambda_1`.
pub fn correlation_matrix(snapshots: &SnapshotSet, mass: &SymmetricOperator) -> Result<DMatrix<f64>> {
    let u = snapshots.matrix();
    let mu = apply_to_columns(mass, u)?;
    let m = snapshots.len();
    let scale = 1.0 / m as f64;
    let mut k = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = compensated_dot(u.column(i).as_slice(), mu.column(j).as_slice()) * scale;
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(k)
}

/// Which `||phi_j||_1` enters the H1 truncation error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum H1Convention {
    /// `||phi||^2 + ||grad phi||^2`
    #[default]
    Full,
    /// `||grad phi||^2`
    Seminorm,
}

/// L2-orthonormal POD modes with their eigenvalues.
#[derive(Debug, Clone)]
pub struct PodBasis {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    modes: DMatrix<f64>,
    mass_modes: DMatrix<f64>,
    gradient_gram: DMatrix<f64>,
    convention: H1Convention,
}

impl PodBasis {
    /// Assembles a basis from its stored parts (used by the cache).
    pub(crate) fn from_parts(
        eigenvalues: Vec<f64>,
        eigenvectors: DMatrix<f64>,
        modes: DMatrix<f64>,
        gradient_gram: DMatrix<f64>,
        mass: &SymmetricOperator,
    ) -> Result<Self> {
        let mass_modes = apply_to_columns(mass, &modes)?;
        Ok(Self { eigenvalues, eigenvectors, modes, mass_modes, gradient_gram, convention: H1Convention::Full })
    }

    /// Numerical rank `d`.
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn dofs(&self) -> usize {
        self.modes.nrows()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Correlation-matrix eigenvectors `z_j` as columns.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// Modes `phi_j` as the columns of an `N x d` matrix.
    pub fn modes(&self) -> &DMatrix<f64> {
        &self.modes
    }

    /// `M phi_j` as columns.
    pub fn mass_modes(&self) -> &DMatrix<f64> {
        &self.mass_modes
    }

    pub fn mode(&self, j: usize) -> FeField {
        FeField::from_vec(self.modes.column(j).iter().copied().collect())
    }

    /// `(grad phi_j, grad phi_i)` for all `i, j < d`.
    pub fn gradient_gram(&self) -> &DMatrix<f64> {
        &self.gradient_gram
    }

    pub fn convention(&self) -> H1Convention {
        self.convention
    }

    pub fn set_convention(&mut self, convention: H1Convention) {
        self.convention = convention;
    }

    /// `||phi_j||_1^2` under the active convention.
    pub fn h1_norm_sq(&self, j: usize) -> f64 {
        let grad = self.gradient_gram[(j, j)];
        match self.convention {
            H1Convention::Full => 1.0 + grad,
            H1Convention::Seminorm => grad,
        }
    }

    fn check_rank(&self, r: usize) -> Result<()> {
        if r > self.dim() {
            Err(RomError::InvalidArgument(format!("r = {r} exceeds the basis dimension {}", self.dim())))
        } else {
            Ok(())
        }
    }

    /// `(Lambda_L2, Lambda_H1)`: eigenvalue tails beyond `r`.
    pub fn truncation_errors(&self, r: usize) -> Result<(f64, f64)> {
        self.check_rank(r)?;
        let mut l2 = 0.0;
        let mut h1 = 0.0;
        // summed from the smallest eigenvalue up
        for j in (r..self.dim()).rev() {
            l2 += self.eigenvalues[j];
            h1 += self.h1_norm_sq(j) * self.eigenvalues[j];
        }
        Ok((l2, h1))
    }

    /// Coordinates `a_i = (v, phi_i)` of the L2 projection onto the first `r` modes.
    pub fn project(&self, r: usize, v: &[f64]) -> Result<Vec<f64>> {
        self.check_rank(r)?;
        check_dim(self.dofs(), v.len())?;
        let v = DVector::from_column_slice(v);
        Ok(self.mass_modes.columns(0, r).tr_mul(&v).as_slice().to_vec())
    }

    /// Projects every column of `x` at once; returns an `r x ncols` matrix.
    pub fn project_columns(&self, r: usize, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.check_rank(r)?;
        check_dim(self.dofs(), x.nrows())?;
        Ok(self.mass_modes.columns(0, r).tr_mul(x))
    }

    /// `sum_i a_i phi_i`
    pub fn reconstruct(&self, a: &[f64]) -> Result<FeField> {
        self.check_rank(a.len())?;
        let a = DVector::from_column_slice(a);
        Ok(FeField::from_vec((self.modes.columns(0, a.len()) * a).as_slice().to_vec()))
    }

    /// `max |Phi_r^T M Phi_r - I|`
    pub fn orthonormality_defect(&self, r: usize) -> Result<f64> {
        self.check_rank(r)?;
        let g = self.mass_modes.columns(0, r).tr_mul(&self.modes.columns(0, r));
        Ok((g - DMatrix::<f64>::identity(r, r)).amax())
    }

    /// ROM stiffness matrix of the first `r` modes.
    pub fn rom_stiffness(&self, r: usize) -> Result<RomStiffness> {
        if r == 0 {
            return Err(RomError::InvalidArgument("r must be at least 1".into()));
        }
        self.check_rank(r)?;
        RomStiffness::new(self.gradient_gram.view((0, 0), (r, r)).into_owned())
    }
}

/// Builds the POD basis of `snapshots` in the L2 inner product.
///
/// Eigenvalues below `rank_tol * lambda_1` are discarded. Modes are formed
/// from the snapshot formula `phi_j = U z_j / sqrt(lambda_j)` and then
/// re-orthonormalized in the mass inner product.
pub fn build_pod_basis(
    snapshots: &SnapshotSet,
    mass: &SymmetricOperator,
    stiffness: &SymmetricOperator,
    rank_tol: f64,
) -> Result<PodBasis> {
    let k = correlation_matrix(snapshots, mass)?;
    let eig = symmetric_eig(&k)?;
    let lambda1 = eig.values[0];
    if !(lambda1 > 0.0) {
        return Err(RomError::DegenerateEnsemble);
    }
    let d = eig.values.iter().take_while(|&&l| l > rank_tol * lambda1).count();
    if d == 0 {
        return Err(RomError::DegenerateEnsemble);
    }
    let eigenvalues: Vec<f64> = eig.values.iter().take(d).copied().collect();
    let z = eig.vectors.columns(0, d).into_owned();
    let mut modes = snapshots.matrix() * &z;
    for (j, lam) in eigenvalues.iter().enumerate() {
        modes.column_mut(j).scale_mut(1.0 / lam.sqrt());
    }
    orthonormalize(&mut modes, mass)?;
    let grad_modes = apply_to_columns(stiffness, &modes)?;
    let g = modes.tr_mul(&grad_modes);
    let gradient_gram = (&g + g.transpose()) * 0.5;
    PodBasis::from_parts(eigenvalues, z, modes, gradient_gram, mass)
}

// Two passes of modified Gram-Schmidt in the mass inner product. The
// snapshot formula loses orthogonality like eps * lambda_1 / lambda_j for the
// trailing modes; leading modes are changed only at round-off level.
fn orthonormalize(modes: &mut DMatrix<f64>, mass: &SymmetricOperator) -> Result<()> {
    let n = modes.nrows();
    let d = modes.ncols();
    let data = modes.as_mut_slice();
    let mut mass_cols: Vec<Vec<f64>> = Vec::with_capacity(d);
    for j in 0..d {
        let (done, rest) = data.split_at_mut(j * n);
        let col = &mut rest[..n];
        for _pass in 0..2 {
            for (i, mi) in mass_cols.iter().enumerate() {
                let c: f64 = col.iter().zip(mi).map(|(a, b)| a * b).sum();
                for (x, q) in col.iter_mut().zip(&done[i * n..(i + 1) * n]) {
                    *x -= c * q;
                }
            }
        }
        let mut mq = mass.apply(col)?;
        let norm = col.iter().zip(&mq).map(|(a, b)| a * b).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(RomError::DegenerateEnsemble);
        }
        col.iter_mut().for_each(|x| *x /= norm);
        mq.iter_mut().for_each(|x| *x /= norm);
        mass_cols.push(mq);
    }
    Ok(())
}

/// Dense ROM stiffness matrix `(S_r)_ij = (grad phi_j, grad phi_i)` with its spectral norm.
#[derive(Debug, Clone)]
pub struct RomStiffness {
    matrix: DMatrix<f64>,
    spectral_norm: f64,
}

impl RomStiffness {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let eig = symmetric_eig(&matrix)?;
        let spectral_norm = eig.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        Ok(Self { matrix, spectral_norm })
    }

    pub fn r(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `||S_r||_2`
    pub fn spectral_norm(&self) -> f64 {
        self.spectral_norm
    }

    /// POD inverse-estimate constant `sqrt(||S_r||_2)`.
    pub fn inverse_estimate_constant(&self) -> f64 {
        self.spectral_norm.sqrt()
    }

    /// ROM Laplacian in ROM coordinates, `-S_r a`.
    pub fn rom_laplacian(&self, a: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.r(), a.len())?;
        let a = DVector::from_column_slice(a);
        Ok((-(&self.matrix * a)).as_slice().to_vec())
    }
}

#[cfg(test)]
mod tests;
