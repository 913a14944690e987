//! ROM differential filter.
//!
//! For `v` in the velocity space, the filtered field `vbar` is the element
//! of the ROM space with
//! `delta^2 (grad vbar, grad w) + (vbar, w) = (v, w)` for every ROM `w`.
//! In L2-orthonormal POD coordinates this is the SPD system
//! `(I + delta^2 S_r) abar = P_r v`, factored once and reused.

use nalgebra::DMatrix;

use crate::error::{check_dim, Result, RomError};
use crate::linalg::Cholesky;
use crate::pod::{PodBasis, RomStiffness};

/// Factored `I + delta^2 S_r`.
#[derive(Debug, Clone)]
pub struct FilterOperator {
    delta: f64,
    matrix: DMatrix<f64>,
    factor: Cholesky,
}

impl FilterOperator {
    pub fn new(stiffness: &RomStiffness, delta: f64) -> Result<Self> {
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(RomError::InvalidArgument(format!("filter radius must be >= 0, got {delta}")));
        }
        let r = stiffness.r();
        let matrix = DMatrix::identity(r, r) + stiffness.matrix() * (delta * delta);
        let factor = Cholesky::new(&matrix)?;
        Ok(Self { delta, matrix, factor })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn r(&self) -> usize {
        self.matrix.nrows()
    }

    /// The unfactored `I + delta^2 S_r`.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn cholesky(&self) -> &Cholesky {
        &self.factor
    }

    /// Filtered coordinates of a ROM-space field with coordinates `a`.
    pub fn apply(&self, a: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.r(), a.len())?;
        if self.delta == 0.0 {
            return Ok(a.to_vec());
        }
        self.factor.solve(a)
    }

    pub fn apply_in_place(&self, a: &mut [f64]) -> Result<()> {
        check_dim(self.r(), a.len())?;
        if self.delta == 0.0 {
            return Ok(());
        }
        self.factor.solve_in_place(a)
    }

    /// Filters an arbitrary FE field: `apply(P_r v)`.
    pub fn filter_fe(&self, basis: &PodBasis, v: &[f64]) -> Result<Vec<f64>> {
        let a = basis.project(self.r(), v)?;
        self.apply(&a)
    }
}

/// Factors the filter for radius `delta`.
pub fn build_filter(stiffness: &RomStiffness, delta: f64) -> Result<FilterOperator> {
    FilterOperator::new(stiffness, delta)
}
