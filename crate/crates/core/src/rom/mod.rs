//! Reduced operators and backward-Euler time stepping of the Galerkin and
//! Leray reduced-order models.

mod forcing;
mod stepper;
mod tensor;

pub use forcing::project_forcing;
pub use stepper::{
    grom_step, lrom_step, run, stability_check, Linearization, LromConfig, RomTrajectory, StabilityReport,
    StepOutcome,
};
pub use tensor::{build_trilinear_tensor, TrilinearTensor, DEFAULT_BLOCK_BUDGET};

use nalgebra::DMatrix;

use crate::error::{check_dim, Result, RomError};
use crate::fe::{FeField, VelocitySpace};
use crate::pod::{PodBasis, RomStiffness};

/// Everything the reduced time stepper needs for a fixed `r`.
#[derive(Debug, Clone)]
pub struct RomOperators {
    stiffness: RomStiffness,
    tensor: TrilinearTensor,
    forcing: DMatrix<f64>,
    initial: Vec<f64>,
}

impl RomOperators {
    /// Assembles operators from already computed parts, truncating each to `r`.
    ///
    /// `forcing` holds one column per time level `t_k = k dt`; `initial` is the
    /// initial velocity field, projected onto the first `r` modes.
    pub fn from_parts(
        basis: &PodBasis,
        r: usize,
        tensor: &TrilinearTensor,
        forcing: &DMatrix<f64>,
        initial: &FeField,
    ) -> Result<Self> {
        if r == 0 || r > tensor.r() || r > forcing.nrows() {
            return Err(RomError::InvalidArgument(format!(
                "r = {r} not covered by tensor ({}) / forcing ({})",
                tensor.r(),
                forcing.nrows()
            )));
        }
        let stiffness = basis.rom_stiffness(r)?;
        let tensor = if tensor.r() == r { tensor.clone() } else { tensor.truncate(r)? };
        let forcing = forcing.rows(0, r).into_owned();
        let initial = basis.project(r, initial.values())?;
        Ok(Self { stiffness, tensor, forcing, initial })
    }

    /// Builds all operators directly for the manufactured problem.
    pub fn build(
        space: &VelocitySpace,
        basis: &PodBasis,
        r: usize,
        force: impl Fn([f64; 2], f64) -> [f64; 2],
        initial: &FeField,
        times: &[f64],
    ) -> Result<Self> {
        let tensor = build_trilinear_tensor(space, basis, r, DEFAULT_BLOCK_BUDGET)?;
        let forcing = project_forcing(space, basis, r, force, times)?;
        Self::from_parts(basis, r, &tensor, &forcing, initial)
    }

    /// Operators from explicit matrices (used for small synthetic problems).
    pub fn from_matrices(
        stiffness: RomStiffness,
        tensor: TrilinearTensor,
        forcing: DMatrix<f64>,
        initial: Vec<f64>,
    ) -> Result<Self> {
        let r = stiffness.r();
        check_dim(r, tensor.r())?;
        check_dim(r, forcing.nrows())?;
        check_dim(r, initial.len())?;
        Ok(Self { stiffness, tensor, forcing, initial })
    }

    pub fn r(&self) -> usize {
        self.stiffness.r()
    }

    pub fn stiffness(&self) -> &RomStiffness {
        &self.stiffness
    }

    pub fn tensor(&self) -> &TrilinearTensor {
        &self.tensor
    }

    /// Reduced forcing, one column per time level.
    pub fn forcing(&self) -> &DMatrix<f64> {
        &self.forcing
    }

    pub fn forcing_at(&self, k: usize) -> Vec<f64> {
        self.forcing.column(k).iter().copied().collect()
    }

    /// `a^0 = P_r u^0`
    pub fn initial(&self) -> &[f64] {
        &self.initial
    }
}
