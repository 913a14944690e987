//! Parameter sweeps over the filter and the reduced models, with error
//! metrics, log-log regressions and CSV / plot-data output.

mod output;
mod regression;

pub use output::{write_csv, write_plot_data, CSV_HEADER};
pub use regression::{loglog_regression, Regression};

use std::path::PathBuf;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{check_dim, Result, RomError};
use crate::fe::{assemble_mass, assemble_stiffness, FeField, SymmetricOperator, TriMesh, VelocitySpace};
use crate::filter::FilterOperator;
use crate::manufactured::AnalyticSolution;
use crate::pod::{self, CacheKey, H1Convention, PodBasis, SnapshotSet, DEFAULT_RANK_TOL};
use crate::rom::{self, Linearization, LromConfig, RomOperators, TrilinearTensor, DEFAULT_BLOCK_BUDGET};

/// Mean squared L2 and H1-seminorm errors of the filtered snapshots,
/// `E = 1/(M+1) sum_k ||u^k - filter(u^k)||^2`.
pub fn avg_filter_errors(
    basis: &PodBasis,
    r: usize,
    delta: f64,
    snapshots: &SnapshotSet,
    mass: &SymmetricOperator,
    stiffness: &SymmetricOperator,
) -> Result<(f64, f64)> {
    let filter = FilterOperator::new(&basis.rom_stiffness(r)?, delta)?;
    let u = snapshots.matrix();
    let mut coords = basis.project_columns(r, u)?;
    for mut col in coords.column_iter_mut() {
        filter.apply_in_place(col.as_mut_slice())?;
    }
    let diff = u - basis.modes().columns(0, r) * coords;
    let (mut el2, mut eh1) = (0.0, 0.0);
    for col in diff.column_iter() {
        el2 += mass.inner(col.as_slice(), col.as_slice())?;
        eh1 += stiffness.inner(col.as_slice(), col.as_slice())?;
    }
    let m = snapshots.len() as f64;
    Ok((el2 / m, eh1 / m))
}

/// Which final-time error is reported for a reduced run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FinalErrorKind {
    /// `||u^M - u_r^M||`
    #[default]
    RomState,
    /// `||u^M - filter(u^M)||`, independent of the trajectory.
    FilteredSnapshot,
}

/// `||u^M - sum_i a_i phi_i||` in the L2 norm.
pub fn final_time_error(basis: &PodBasis, a_final: &[f64], exact: &FeField, mass: &SymmetricOperator) -> Result<f64> {
    check_dim(basis.dofs(), exact.len())?;
    let ur = basis.reconstruct(a_final)?;
    let e: Vec<f64> = exact.values().iter().zip(ur.values()).map(|(x, y)| x - y).collect();
    crate::fe::l2_norm(mass, &e)
}

/// Study families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyKind {
    FilterDelta,
    FilterR,
    LromDt,
    LromDelta,
    LromR,
}

impl StudyKind {
    pub const ALL: [StudyKind; 5] =
        [StudyKind::FilterDelta, StudyKind::FilterR, StudyKind::LromDt, StudyKind::LromDelta, StudyKind::LromR];

    pub fn name(self) -> &'static str {
        match self {
            StudyKind::FilterDelta => "filter-delta",
            StudyKind::FilterR => "filter-r",
            StudyKind::LromDt => "lrom-dt",
            StudyKind::LromDelta => "lrom-delta",
            StudyKind::LromR => "lrom-r",
        }
    }

    /// Name of the swept parameter, as written in the CSV `param` column.
    pub fn param_name(self) -> &'static str {
        match self {
            StudyKind::FilterDelta | StudyKind::LromDelta => "delta",
            StudyKind::FilterR | StudyKind::LromR => "r",
            StudyKind::LromDt => "dt",
        }
    }

    pub fn is_filter(self) -> bool {
        matches!(self, StudyKind::FilterDelta | StudyKind::FilterR)
    }

    /// Whether the regression abscissa is `Lambda_H1` rather than the parameter itself.
    pub fn regresses_on_lambda(self) -> bool {
        matches!(self, StudyKind::FilterR | StudyKind::LromR)
    }
}

impl FromStr for StudyKind {
    type Err = RomError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| RomError::InvalidArgument(format!("unknown study kind `{s}`")))
    }
}

impl std::fmt::Display for StudyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Full description of one sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub kind: StudyKind,
    pub mesh_n: usize,
    pub snapshot_spacing: f64,
    pub snapshot_count: usize,
    pub r: usize,
    pub delta: f64,
    pub dt: f64,
    pub nu: f64,
    pub t_final: f64,
    pub sweep: Vec<f64>,
    pub out: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub linearization: Linearization,
    pub final_error: FinalErrorKind,
    pub convention: H1Convention,
    pub rank_tol: f64,
}

impl StudyConfig {
    /// Mesh, snapshot protocol, fixed parameters and sweep grid of the
    /// reference experiments.
    pub fn paper_defaults(kind: StudyKind) -> Self {
        let (r, delta, dt, sweep): (usize, f64, f64, Vec<f64>) = match kind {
            StudyKind::FilterDelta => (95, 1e-2, 1e-4, vec![1e-2, 5e-3, 2.5e-3, 2.0e-3, 1.67e-3, 1.25e-3]),
            StudyKind::FilterR => (95, 1e-3, 1e-4, vec![30.0, 40.0, 50.0, 60.0, 70.0, 80.0]),
            StudyKind::LromDt => (99, 1e-4, 1e-2, vec![1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4]),
            StudyKind::LromDelta => (99, 1e-4, 1e-4, vec![5e-1, 2.5e-1, 1.25e-1, 6.25e-2, 3.12e-2, 1.56e-2]),
            StudyKind::LromR => (99, 1e-2, 1e-4, vec![10.0, 20.0, 30.0, 40.0, 50.0]),
        };
        Self {
            kind,
            mesh_n: 64,
            snapshot_spacing: 1e-2,
            snapshot_count: 101,
            r,
            delta,
            dt,
            nu: 1e-3,
            t_final: 1.0,
            sweep,
            out: None,
            cache_dir: None,
            linearization: Linearization::PicardImplicit,
            final_error: FinalErrorKind::RomState,
            convention: H1Convention::Full,
            rank_tol: DEFAULT_RANK_TOL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(RomError::InvalidArgument(m.to_string()));
        if self.mesh_n == 0 || self.snapshot_count == 0 {
            return bad("mesh size and snapshot count must be positive");
        }
        if !(self.snapshot_spacing > 0.0)
            || (self.snapshot_count - 1) as f64 * self.snapshot_spacing > 1.0 + 1e-12
        {
            return bad("snapshots must be positively spaced within [0, 1]");
        }
        if !(self.delta >= 0.0 && self.dt > 0.0 && self.nu > 0.0 && self.t_final > 0.0) || self.r == 0 {
            return bad("fixed parameters must be positive");
        }
        if self.sweep.is_empty() {
            return bad("sweep is empty");
        }
        let inc = self.sweep.windows(2).all(|w| w[1] > w[0]);
        let dec = self.sweep.windows(2).all(|w| w[1] < w[0]);
        if !(inc || dec) {
            return bad("sweep must be strictly monotone");
        }
        if self.sweep.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return bad("sweep values must be positive");
        }
        if matches!(self.kind, StudyKind::FilterR | StudyKind::LromR)
            && self.sweep.iter().any(|v| v.fract() != 0.0)
        {
            return bad("r sweep values must be integers");
        }
        Ok(())
    }

    fn rank_at(&self, value: f64) -> usize {
        match self.kind {
            StudyKind::FilterR | StudyKind::LromR => value as usize,
            _ => self.r,
        }
    }

    fn max_rank(&self) -> usize {
        self.sweep.iter().map(|&v| self.rank_at(v)).max().unwrap_or(self.r)
    }
}

/// Summary of the Picard iterations of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardStats {
    pub max: usize,
    pub mean: f64,
}

/// One sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRecord {
    pub value: f64,
    pub r: usize,
    pub e_l2: Option<f64>,
    pub e_h1: Option<f64>,
    pub lambda_l2: Option<f64>,
    pub lambda_h1: Option<f64>,
    pub picard: Option<PicardStats>,
    /// Maximum of the discrete stability quantity over the run.
    pub stability: Option<f64>,
    pub failure: Option<String>,
}

impl StudyRecord {
    fn new(value: f64, r: usize) -> Self {
        Self {
            value,
            r,
            e_l2: None,
            e_h1: None,
            lambda_l2: None,
            lambda_h1: None,
            picard: None,
            stability: None,
            failure: None,
        }
    }
}

/// Outcome of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult {
    pub kind: StudyKind,
    pub records: Vec<StudyRecord>,
    /// Fit of `E_L2` (filter studies) or `E_L2^M` (ROM studies).
    pub l2_fit: Option<Regression>,
    /// Fit of `E_H1`, filter studies only.
    pub h1_fit: Option<Regression>,
    pub warnings: Vec<String>,
}

impl StudyResult {
    /// Regression abscissa of a record.
    pub fn abscissa(&self, rec: &StudyRecord) -> Option<f64> {
        if self.kind.regresses_on_lambda() {
            rec.lambda_h1
        } else {
            Some(rec.value)
        }
    }

    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| r.failure.is_some()).count()
    }

    /// Points that survived and enter the regressions: `(x, e_l2, e_h1)`.
    pub fn points(&self) -> Vec<(f64, Option<f64>, Option<f64>)> {
        self.records
            .iter()
            .filter(|r| r.failure.is_none())
            .filter_map(|r| self.abscissa(r).map(|x| (x, r.e_l2, r.e_h1)))
            .collect()
    }
}

/// Shared discretization, snapshots and POD basis for one mesh / protocol.
#[derive(Debug, Clone)]
pub struct Lab {
    pub space: VelocitySpace,
    pub mass: SymmetricOperator,
    pub stiffness: SymmetricOperator,
    pub solution: AnalyticSolution,
    pub snapshots: SnapshotSet,
    pub basis: PodBasis,
}

impl Lab {
    pub fn new(mesh_n: usize, snapshot_spacing: f64, snapshot_count: usize, nu: f64) -> Result<Self> {
        Self::with_cache(mesh_n, snapshot_spacing, snapshot_count, nu, DEFAULT_RANK_TOL, None)
    }

    /// Builds the pipeline, reading / writing the POD basis in `cache_dir` when given.
    pub fn with_cache(
        mesh_n: usize,
        snapshot_spacing: f64,
        snapshot_count: usize,
        nu: f64,
        rank_tol: f64,
        cache_dir: Option<&std::path::Path>,
    ) -> Result<Self> {
        let space = VelocitySpace::new(TriMesh::new(mesh_n)?);
        let mass = assemble_mass(&space);
        let stiffness = assemble_stiffness(&space);
        let solution = AnalyticSolution::new(nu);
        let times = pod::uniform_times(snapshot_spacing, snapshot_count);
        let snapshots = pod::collect_snapshots(&space, &solution, &times)?;
        let key = CacheKey { mesh_n, spacing: snapshot_spacing, count: snapshot_count, rank_tol };
        let cached = cache_dir.map(|d| key.path_in(d)).filter(|p| p.exists());
        let basis = match cached {
            Some(path) => pod::load_basis(&path, &key, &mass)?,
            None => {
                let b = pod::build_pod_basis(&snapshots, &mass, &stiffness, rank_tol)?;
                if let Some(dir) = cache_dir {
                    std::fs::create_dir_all(dir)?;
                    pod::save_basis(&key.path_in(dir), &key, &b)?;
                }
                b
            }
        };
        Ok(Self { space, mass, stiffness, solution, snapshots, basis })
    }

    /// Nodal interpolant of the exact velocity at time `t`.
    pub fn exact(&self, t: f64) -> Result<FeField> {
        self.space.interpolate(|p| self.solution.velocity(p, t))
    }

    /// Reduced convection tensor of the leading `r` modes.
    pub fn tensor(&self, r: usize) -> Result<TrilinearTensor> {
        rom::build_trilinear_tensor(&self.space, &self.basis, r, DEFAULT_BLOCK_BUDGET)
    }

    /// Reduced forcing at `t_k = k dt`, `k = 0..=T/dt`, for the leading `r` modes.
    pub fn forcing(&self, r: usize, dt: f64, t_final: f64) -> Result<DMatrix<f64>> {
        let mut cfg = LromConfig::new(r, 0.0, dt);
        cfg.t_final = t_final;
        let times = cfg.times()?;
        rom::project_forcing(&self.space, &self.basis, r, |p, t| self.solution.forcing(p, t), &times)
    }

    /// Reduced operators from precomputed tensor and forcing.
    pub fn operators(&self, r: usize, tensor: &TrilinearTensor, forcing: &DMatrix<f64>) -> Result<RomOperators> {
        RomOperators::from_parts(&self.basis, r, tensor, forcing, &self.exact(0.0)?)
    }

    /// Runs one reduced model and returns its final-time error, Picard stats and stability maximum.
    pub fn lrom_error(
        &self,
        ops: &RomOperators,
        cfg: &LromConfig,
        kind: FinalErrorKind,
    ) -> Result<(f64, PicardStats, f64, rom::RomTrajectory)> {
        let filter = FilterOperator::new(ops.stiffness(), cfg.delta)?;
        let traj = rom::run(ops, Some(&filter), cfg)?;
        let exact = self.exact(cfg.t_final)?;
        let err = match kind {
            FinalErrorKind::RomState => final_time_error(&self.basis, traj.final_state(), &exact, &self.mass)?,
            FinalErrorKind::FilteredSnapshot => {
                let abar = filter.filter_fe(&self.basis, exact.values())?;
                final_time_error(&self.basis, &abar, &exact, &self.mass)?
            }
        };
        let stats = PicardStats {
            max: traj.iterations.iter().copied().max().unwrap_or(0),
            mean: traj.iterations.iter().sum::<usize>() as f64 / traj.iterations.len().max(1) as f64,
        };
        let stab = rom::stability_check(&traj);
        Ok((err, stats, stab.max, traj))
    }
}

/// Runs a full sweep. Failing points are recorded and left out of the fits.
pub fn run_study(cfg: &StudyConfig) -> Result<StudyResult> {
    cfg.validate()?;
    let mut lab = Lab::with_cache(
        cfg.mesh_n,
        cfg.snapshot_spacing,
        cfg.snapshot_count,
        cfg.nu,
        cfg.rank_tol,
        cfg.cache_dir.as_deref(),
    )?;
    lab.basis.set_convention(cfg.convention);
    run_study_with(&lab, cfg)
}

/// As [`run_study`] on an already built [`Lab`].
pub fn run_study_with(lab: &Lab, cfg: &StudyConfig) -> Result<StudyResult> {
    cfg.validate()?;
    let d = lab.basis.dim();
    let r_max = cfg.max_rank();
    if r_max > d {
        return Err(RomError::InvalidArgument(format!("r = {r_max} exceeds the POD dimension {d}")));
    }

    let records: Vec<StudyRecord> = if cfg.kind.is_filter() {
        cfg.sweep.par_iter().map(|&v| filter_point(lab, cfg, v)).collect()
    } else {
        let tensor = lab.tensor(r_max)?;
        let shared_forcing =
            if cfg.kind == StudyKind::LromDt { None } else { Some(lab.forcing(r_max, cfg.dt, cfg.t_final)?) };
        cfg.sweep
            .par_iter()
            .map(|&v| {
                let mut rec = StudyRecord::new(v, cfg.rank_at(v));
                let outcome = (|| {
                    let (r, delta, dt) = match cfg.kind {
                        StudyKind::LromDt => (cfg.r, cfg.delta, v),
                        StudyKind::LromDelta => (cfg.r, v, cfg.dt),
                        _ => (v as usize, cfg.delta, cfg.dt),
                    };
                    let own;
                    let forcing = match &shared_forcing {
                        Some(f) => f,
                        None => {
                            own = lab.forcing(r_max, dt, cfg.t_final)?;
                            &own
                        }
                    };
                    let ops = lab.operators(r, &tensor, forcing)?;
                    let mut run_cfg = LromConfig::new(r, delta, dt);
                    run_cfg.t_final = cfg.t_final;
                    run_cfg.nu = cfg.nu;
                    run_cfg.linearization = cfg.linearization;
                    let (l2, h1) = lab.basis.truncation_errors(r)?;
                    let (err, stats, stab, _) = lab.lrom_error(&ops, &run_cfg, cfg.final_error)?;
                    Ok::<_, RomError>((err, stats, stab, l2, h1))
                })();
                match outcome {
                    Ok((err, stats, stab, l2, h1)) => {
                        rec.e_l2 = Some(err);
                        rec.picard = Some(stats);
                        rec.stability = Some(stab);
                        rec.lambda_l2 = Some(l2);
                        rec.lambda_h1 = Some(h1);
                    }
                    Err(e) => rec.failure = Some(e.to_string()),
                }
                rec
            })
            .collect()
    };

    let mut result = StudyResult { kind: cfg.kind, records, l2_fit: None, h1_fit: None, warnings: Vec::new() };
    for rec in &result.records {
        if let Some(f) = &rec.failure {
            result.warnings.push(format!("{} = {}: {f}", cfg.kind.param_name(), rec.value));
        }
    }
    let pts = result.points();
    let fit = |sel: fn(&(f64, Option<f64>, Option<f64>)) -> Option<f64>| {
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts.iter().filter_map(|p| sel(p).map(|y| (p.0, y))).unzip();
        loglog_regression(&xs, &ys)
    };
    match fit(|p| p.1) {
        Ok(f) => result.l2_fit = Some(f),
        Err(e) => result.warnings.push(format!("no L2 regression: {e}")),
    }
    if cfg.kind.is_filter() {
        match fit(|p| p.2) {
            Ok(f) => result.h1_fit = Some(f),
            Err(e) => result.warnings.push(format!("no H1 regression: {e}")),
        }
    }
    Ok(result)
}

fn filter_point(lab: &Lab, cfg: &StudyConfig, value: f64) -> StudyRecord {
    let r = cfg.rank_at(value);
    let delta = if cfg.kind == StudyKind::FilterDelta { value } else { cfg.delta };
    let mut rec = StudyRecord::new(value, r);
    let outcome = avg_filter_errors(&lab.basis, r, delta, &lab.snapshots, &lab.mass, &lab.stiffness)
        .and_then(|e| lab.basis.truncation_errors(r).map(|l| (e, l)));
    match outcome {
        Ok(((el2, eh1), (l2, h1))) => {
            rec.e_l2 = Some(el2);
            rec.e_h1 = Some(eh1);
            rec.lambda_l2 = Some(l2);
            rec.lambda_h1 = Some(h1);
        }
        Err(e) => rec.failure = Some(e.to_string()),
    }
    rec
}
