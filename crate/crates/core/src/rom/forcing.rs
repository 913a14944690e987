use nalgebra::DMatrix;

use crate::error::{Result, RomError};
use crate::fe::VelocitySpace;
use crate::pod::PodBasis;

const TIME_BATCH: usize = 64;

/// Reduced forcing `F^k_i = (f_h(t_k), phi_i)` for every time in `times`,
/// where `f_h` is the nodal interpolant of `forcing(., t_k)`.
///
/// Returns an `r x times.len()` matrix, one column per time level.
pub fn project_forcing(
    space: &VelocitySpace,
    basis: &PodBasis,
    r: usize,
    forcing: impl Fn([f64; 2], f64) -> [f64; 2],
    times: &[f64],
) -> Result<DMatrix<f64>> {
    if r > basis.dim() {
        return Err(RomError::InvalidArgument(format!("r = {r} exceeds the basis dimension {}", basis.dim())));
    }
    let n = space.dofs();
    let ns = space.scalar_dofs();
    let coords: Vec<[f64; 2]> = (0..ns).map(|k| space.node_coords(k)).collect();
    let mut out = DMatrix::zeros(r, times.len());
    for (b, batch) in times.chunks(TIME_BATCH).enumerate() {
        let mut fields = DMatrix::<f64>::zeros(n, batch.len());
        for (col, &t) in batch.iter().enumerate() {
            let dst = fields.column_mut(col);
            let dst = dst.data.into_slice_mut();
            for (k, &p) in coords.iter().enumerate() {
                let f = forcing(p, t);
                if !(f[0].is_finite() && f[1].is_finite()) {
                    return Err(RomError::Evaluation { what: "forcing", x: p[0], y: p[1] });
                }
                dst[k] = f[0];
                dst[ns + k] = f[1];
            }
        }
        let proj = basis.project_columns(r, &fields)?;
        out.columns_mut(b * TIME_BATCH, batch.len()).copy_from(&proj);
    }
    Ok(out)
}
