//! Binary POD cache.
//!
//! Layout (all little-endian):
//!
//! ```text
//! magic    8 bytes  "ROMLBPOD"
//! version  u32      = 1
//! mesh_n   u32
//! count    u64      number of snapshots (M + 1)
//! spacing  f64      snapshot spacing dT
//! rank_tol f64
//! dofs     u64      N
//! d        u64      basis dimension
//! lambda   d   x f64
//! z        count x d f64, column-major
//! phi      N x d f64, column-major
//! grad     d x d f64, (grad phi_j, grad phi_i)
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use super::PodBasis;
use crate::error::{Result, RomError};
use crate::fe::SymmetricOperator;

const MAGIC: &[u8; 8] = b"ROMLBPOD";
const VERSION: u32 = 1;

/// Parameters identifying a cached basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CacheKey {
    pub mesh_n: usize,
    pub spacing: f64,
    pub count: usize,
    pub rank_tol: f64,
}

impl CacheKey {
    /// File name used inside a cache directory.
    pub fn file_name(&self) -> String {
        format!("pod_n{}_dt{:e}_m{}_tol{:e}.bin", self.mesh_n, self.spacing, self.count, self.rank_tol)
    }

    pub fn path_in(&self, dir: &Path) -> PathBuf {
        dir.join(self.file_name())
    }
}

fn write_f64s(w: &mut impl Write, xs: &[f64]) -> Result<()> {
    for x in xs {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn read_f64s(r: &mut impl Read, n: usize) -> Result<Vec<f64>> {
    let mut buf = vec![0u8; 8 * n];
    r.read_exact(&mut buf)?;
    Ok(buf.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

pub fn save_basis(path: &Path, key: &CacheKey, basis: &PodBasis) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(key.mesh_n as u32).to_le_bytes())?;
    w.write_all(&(key.count as u64).to_le_bytes())?;
    w.write_all(&key.spacing.to_le_bytes())?;
    w.write_all(&key.rank_tol.to_le_bytes())?;
    w.write_all(&(basis.dofs() as u64).to_le_bytes())?;
    w.write_all(&(basis.dim() as u64).to_le_bytes())?;
    write_f64s(&mut w, basis.eigenvalues())?;
    write_f64s(&mut w, basis.eigenvectors().as_slice())?;
    write_f64s(&mut w, basis.modes().as_slice())?;
    write_f64s(&mut w, basis.gradient_gram().as_slice())?;
    w.flush()?;
    Ok(())
}

/// Loads a basis, checking that the header matches `key` and `mass`.
pub fn load_basis(path: &Path, key: &CacheKey, mass: &SymmetricOperator) -> Result<PodBasis> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(RomError::Cache("bad magic".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(RomError::Cache(format!("unsupported version {version}")));
    }
    let mesh_n = read_u32(&mut r)? as usize;
    let count = read_u64(&mut r)? as usize;
    let spacing = read_f64(&mut r)?;
    let rank_tol = read_f64(&mut r)?;
    let stored = CacheKey { mesh_n, spacing, count, rank_tol };
    if stored != *key {
        return Err(RomError::Cache(format!("key mismatch: stored {stored:?}, requested {key:?}")));
    }
    let dofs = read_u64(&mut r)? as usize;
    let d = read_u64(&mut r)? as usize;
    if dofs != mass.dim() {
        return Err(RomError::Cache(format!("cached basis has {dofs} dofs, space has {}", mass.dim())));
    }
    let eigenvalues = read_f64s(&mut r, d)?;
    let z = DMatrix::from_vec(count, d, read_f64s(&mut r, count * d)?);
    let modes = DMatrix::from_vec(dofs, d, read_f64s(&mut r, dofs * d)?);
    let grad = DMatrix::from_vec(d, d, read_f64s(&mut r, d * d)?);
    PodBasis::from_parts(eigenvalues, z, modes, grad, mass)
}
