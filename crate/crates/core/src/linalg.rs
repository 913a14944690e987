//! Small dense kernels: cyclic Jacobi eigensolver and Cholesky factorization.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Result, RomError};

/// Eigen-decomposition of a symmetric matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: DVector<f64>,
    /// Orthonormal eigenvectors stored as columns, matching `values`.
    pub vectors: DMatrix<f64>,
}

/// Largest `|a_ij - a_ji|` of a square matrix.
/// Dot product in twice the working precision (error-free product and sum
/// transformations), rounded once at the end.
pub fn compensated_dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0_f64;
    let mut c = 0.0_f64;
    for (&x, &y) in a.iter().zip(b) {
        let p = x * y;
        let pe = x.mul_add(y, -p);
        let t = s + p;
        let z = t - s;
        let se = (s - (t - z)) + (p - z);
        s = t;
        c += pe + se;
    }
    s + c
}

pub fn symmetry_defect(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut d: f64 = 0.0;
    for j in 0..n {
        for i in 0..j {
            d = d.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    d
}

/// Full symmetric eigensolve by cyclic Jacobi rotations.
///
/// Rejects inputs whose symmetry defect exceeds `1e-10 max(1, max|a_ij|)`.
pub fn symmetric_eig(a: &DMatrix<f64>) -> Result<SymmetricEigen> {
    let n = a.nrows();
    check_dim(n, a.ncols())?;
    let scale = a.amax().max(1.0);
    if symmetry_defect(a) > 1e-10 * scale {
        return Err(RomError::InvalidArgument("eigensolver input is not symmetric".into()));
    }
    // row-major working copy of the symmetrized input
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = 0.5 * (a[(i, j)] + a[(j, i)]);
        }
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                let (app, aqq) = (m[p * n + p], m[q * n + q]);
                if apq == 0.0 || apq.abs() <= 1e-18 * (app.abs() * aqq.abs()).sqrt() {
                    continue;
                }
                if apq.abs() < f64::MIN_POSITIVE * 1e10 {
                    m[p * n + q] = 0.0;
                    m[q * n + p] = 0.0;
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k * n + p], m[k * n + q]);
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p * n + k], m[q * n + k]);
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                m[p * n + p] = app - t * apq;
                m[q * n + q] = aqq + t * apq;
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].total_cmp(&m[i * n + i]).then(i.cmp(&j)));
    let values = DVector::from_iterator(n, order.iter().map(|&i| m[i * n + i]));
    let vectors = DMatrix::from_fn(n, n, |k, j| v[k * n + order[j]]);
    Ok(SymmetricEigen { values, vectors })
}

/// Lower-triangular Cholesky factor `L` with `L L^T = A`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: DMatrix<f64>,
}

impl Cholesky {
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        check_dim(n, a.ncols())?;
        let mut l = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(RomError::Solver(format!("matrix not positive definite at pivot {j}")));
            }
            let ljj = d.sqrt();
            l[(j, j)] = ljj;
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / ljj;
            }
        }
        Ok(Self { l })
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.l
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) -> Result<()> {
        let n = self.dim();
        check_dim(n, b.len())?;
        let l = &self.l;
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= l[(i, k)] * b[k];
            }
            b[i] = s / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s -= l[(k, i)] * b[k];
            }
            b[i] = s / l[(i, i)];
        }
        Ok(())
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_dot_recovers_cancelled_terms() {
        let a = [1e16, 1.0, -1e16, 3.0];
        let b = [1.0, 1.0, 1.0, 0.5];
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert_eq!(compensated_dot(&a, &b), 2.5);
        assert_ne!(naive, 2.5);
        // 0.1 * 0.1 is not representable; the product error is kept
        let x = vec![0.1; 1000];
        let exact = 10.000_000_000_000_001_110_2; // 1000 * 0.1f64^2
        assert!((compensated_dot(&x, &x) - exact).abs() <= f64::EPSILON * exact);
    }
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        (&b + b.transpose()) * 0.5
    }

    #[test]
    fn identity_spectrum() {
        let e = symmetric_eig(&DMatrix::identity(3, 3)).unwrap();
        assert!(e.values.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn two_by_two() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let e = symmetric_eig(&a).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_reconstruction() {
        let a = random_symmetric(20, 42);
        let e = symmetric_eig(&a).unwrap();
        let rec = &e.vectors * DMatrix::from_diagonal(&e.values) * e.vectors.transpose();
        assert!((rec - &a).amax() < 1e-9);
        let gram = e.vectors.transpose() * &e.vectors;
        assert!((gram - DMatrix::identity(20, 20)).amax() < 1e-10);
        assert!(e.values.as_slice().windows(2).all(|w| w[0] >= w[1]));
        let norm = e.values.amax();
        for j in 0..20 {
            let r = &a * e.vectors.column(j) - e.vectors.column(j) * e.values[j];
            assert!(r.amax() <= 1e-9 * norm);
        }
    }

    #[test]
    fn non_symmetric_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(symmetric_eig(&a), Err(RomError::InvalidArgument(_))));
    }

    #[test]
    fn cholesky_reconstructs_and_solves() {
        let b = random_symmetric(15, 3);
        let a = &b * &b + DMatrix::identity(15, 15);
        let c = Cholesky::new(&a).unwrap();
        let rec = c.factor() * c.factor().transpose();
        assert!((rec - &a).amax() <= 1e-12 * a.amax());
        let rhs: Vec<f64> = (0..15).map(|i| i as f64 - 7.0).collect();
        let x = c.solve(&rhs).unwrap();
        let r = &a * DVector::from_column_slice(&x) - DVector::from_column_slice(&rhs);
        assert!(r.amax() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(Cholesky::new(&a).is_err());
    }
}
