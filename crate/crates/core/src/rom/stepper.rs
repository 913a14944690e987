use nalgebra::{DMatrix, DVector};

use super::RomOperators;
use crate::error::{check_dim, Result, RomError};
use crate::filter::FilterOperator;

/// How the nonlinear term of each implicit step is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Linearization {
    /// Picard iteration on the advecting field until the step equation is met.
    #[default]
    PicardImplicit,
    /// One linear solve with the advecting field lagged to the previous level.
    SemiImplicit,
}

/// Time-stepping parameters. `delta = 0` gives the Galerkin ROM.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LromConfig {
    pub r: usize,
    pub delta: f64,
    pub dt: f64,
    pub t_final: f64,
    pub nu: f64,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub linearization: Linearization,
}

impl LromConfig {
    pub fn new(r: usize, delta: f64, dt: f64) -> Self {
        Self {
            r,
            delta,
            dt,
            t_final: 1.0,
            nu: 1e-3,
            picard_tol: 1e-10,
            picard_max_iters: 50,
            linearization: Linearization::PicardImplicit,
        }
    }

    /// Number of steps `M = T / dt`, which must be an integer.
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt > 0.0) || !(self.t_final >= 0.0) {
            return Err(RomError::InvalidArgument("dt must be positive and t_final non-negative".into()));
        }
        let m = self.t_final / self.dt;
        let steps = m.round();
        if (m - steps).abs() > 1e-9 * steps.max(1.0) {
            return Err(RomError::InvalidArgument(format!("t_final / dt = {m} is not an integer")));
        }
        Ok(steps as usize)
    }

    /// Time levels `t_k = k dt`, `k = 0..=M`.
    pub fn times(&self) -> Result<Vec<f64>> {
        Ok((0..=self.steps()?).map(|k| k as f64 * self.dt).collect())
    }

    pub fn validate(&self) -> Result<()> {
        self.steps()?;
        if !(self.picard_tol > 0.0) || self.picard_max_iters == 0 {
            return Err(RomError::InvalidArgument("Picard tolerance and iteration cap must be positive".into()));
        }
        if !(self.nu > 0.0) || !(self.delta >= 0.0) {
            return Err(RomError::InvalidArgument("nu must be positive and delta non-negative".into()));
        }
        Ok(())
    }
}

/// Result of one implicit step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: Vec<f64>,
    /// Filtered advecting field used in the final linear solve.
    pub advecting: Vec<f64>,
    pub iterations: usize,
    /// Relative size of the last Picard update.
    pub residual: f64,
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

// Solves [I/dt + nu S_r + B(abar)] a = rhs.
fn linear_solve(ops: &RomOperators, base: &DMatrix<f64>, abar: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let mut a = base.clone();
    ops.tensor().add_advection_matrix(abar, &mut a);
    let lu = a.lu();
    let x = lu
        .solve(&DVector::from_column_slice(rhs))
        .ok_or_else(|| RomError::Solver("singular step matrix".into()))?;
    Ok(x.as_slice().to_vec())
}

fn step_matrix(ops: &RomOperators, cfg: &LromConfig) -> DMatrix<f64> {
    let r = ops.r();
    DMatrix::identity(r, r) / cfg.dt + ops.stiffness().matrix() * cfg.nu
}

fn filtered(filter: Option<&FilterOperator>, a: &[f64]) -> Result<Vec<f64>> {
    match filter {
        Some(f) => f.apply(a),
        None => Ok(a.to_vec()),
    }
}

fn implicit_step(
    ops: &RomOperators,
    filter: Option<&FilterOperator>,
    cfg: &LromConfig,
    base: &DMatrix<f64>,
    a_k: &[f64],
    f_next: &[f64],
    step: usize,
) -> Result<StepOutcome> {
    check_dim(ops.r(), a_k.len())?;
    check_dim(ops.r(), f_next.len())?;
    if let Some(f) = filter {
        check_dim(ops.r(), f.r())?;
    }
    let rhs: Vec<f64> = a_k.iter().zip(f_next).map(|(a, f)| a / cfg.dt + f).collect();
    if cfg.linearization == Linearization::SemiImplicit {
        let abar = filtered(filter, a_k)?;
        let state = linear_solve(ops, base, &abar, &rhs)?;
        return Ok(StepOutcome { state, advecting: abar, iterations: 1, residual: 0.0 });
    }
    let mut a = a_k.to_vec();
    let mut residual = f64::INFINITY;
    for iter in 1..=cfg.picard_max_iters {
        let abar = filtered(filter, &a)?;
        let next = linear_solve(ops, base, &abar, &rhs)?;
        let diff: Vec<f64> = next.iter().zip(&a).map(|(x, y)| x - y).collect();
        let scale = norm(&next);
        residual = if scale > 0.0 { norm(&diff) / scale } else { norm(&diff) };
        if !residual.is_finite() {
            break;
        }
        a = next;
        if residual <= cfg.picard_tol {
            return Ok(StepOutcome { state: a, advecting: abar, iterations: iter, residual });
        }
    }
    Err(RomError::StepDivergence { step, residual })
}

/// One backward-Euler step of the Leray ROM:
/// `(a' - a_k)/dt + nu S_r a' + N(F^{-1} a', a') = F_next`.
pub fn lrom_step(
    ops: &RomOperators,
    filter: &FilterOperator,
    cfg: &LromConfig,
    a_k: &[f64],
    f_next: &[f64],
) -> Result<StepOutcome> {
    implicit_step(ops, Some(filter), cfg, &step_matrix(ops, cfg), a_k, f_next, 0)
}

/// One backward-Euler step of the Galerkin ROM (unfiltered advecting field).
pub fn grom_step(ops: &RomOperators, cfg: &LromConfig, a_k: &[f64], f_next: &[f64]) -> Result<StepOutcome> {
    implicit_step(ops, None, cfg, &step_matrix(ops, cfg), a_k, f_next, 0)
}

/// Coefficient history of one reduced run with its energy ledger.
#[derive(Debug, Clone, PartialEq)]
pub struct RomTrajectory {
    pub states: Vec<Vec<f64>>,
    /// Picard iterations per step (`len = M`).
    pub iterations: Vec<usize>,
    /// `||a^k||^2` for `k = 0..=M`.
    pub energies: Vec<f64>,
    /// `dt sum_{k < K} (a^{k+1})^T S_r a^{k+1}` for `K = 0..=M`.
    pub dissipation: Vec<f64>,
}

impl RomTrajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }
}

/// Runs the reduced model from `a^0` to `t_final`. `filter = None` runs the Galerkin ROM.
pub fn run(ops: &RomOperators, filter: Option<&FilterOperator>, cfg: &LromConfig) -> Result<RomTrajectory> {
    cfg.validate()?;
    check_dim(cfg.r, ops.r())?;
    let m = cfg.steps()?;
    if ops.forcing().ncols() < m + 1 {
        return Err(RomError::InvalidArgument(format!(
            "forcing has {} time levels, run needs {}",
            ops.forcing().ncols(),
            m + 1
        )));
    }
    let filter = filter.filter(|f| f.delta() > 0.0);
    let base = step_matrix(ops, cfg);
    let s = ops.stiffness().matrix();
    let a0 = ops.initial().to_vec();
    let cap = 1e6 * (1.0 + norm(&a0));
    let mut traj = RomTrajectory {
        energies: vec![norm(&a0).powi(2)],
        dissipation: vec![0.0],
        states: Vec::with_capacity(m + 1),
        iterations: Vec::with_capacity(m),
    };
    traj.states.push(a0);
    for k in 0..m {
        let f_next = ops.forcing_at(k + 1);
        let out = implicit_step(ops, filter, cfg, &base, &traj.states[k], &f_next, k + 1)?;
        let n = norm(&out.state);
        if !n.is_finite() || n > cap {
            return Err(RomError::BlowUp { step: k + 1, norm: n });
        }
        let a = DVector::from_column_slice(&out.state);
        let grad_sq = a.dot(&(s * &a));
        traj.energies.push(n * n);
        traj.dissipation.push(traj.dissipation[k] + cfg.dt * grad_sq);
        traj.iterations.push(out.iterations);
        traj.states.push(out.state);
    }
    Ok(traj)
}

/// Discrete stability quantity `||a^K||^2 + dt sum_{k<K} ||grad u_r^{k+1}||^2` for every `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub values: Vec<f64>,
    pub max: f64,
    /// All values finite and below the blow-up threshold.
    pub bounded: bool,
}

pub fn stability_check(traj: &RomTrajectory) -> StabilityReport {
    let values: Vec<f64> = traj.energies.iter().zip(&traj.dissipation).map(|(e, d)| e + d).collect();
    let max = values.iter().fold(0.0_f64, |m, &v| if v.is_nan() { f64::NAN } else { m.max(v) });
    let cap = (1e6 * (1.0 + traj.energies[0].sqrt())).powi(2);
    let bounded = values.iter().all(|v| v.is_finite()) && max <= cap;
    StabilityReport { values, max, bounded }
}
