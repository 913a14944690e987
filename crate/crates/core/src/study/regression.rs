use crate::error::{Result, RomError};

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regression {
    /// Convergence rate.
    pub slope: f64,
    /// Natural-log intercept, `y ~ exp(intercept) x^slope`.
    pub intercept: f64,
    pub r_squared: f64,
}

impl Regression {
    pub fn predict(&self, x: f64) -> f64 {
        (self.intercept + self.slope * x.ln()).exp()
    }
}

/// Ordinary least squares on the logarithms of `xs` and `ys`.
pub fn loglog_regression(xs: &[f64], ys: &[f64]) -> Result<Regression> {
    if xs.len() != ys.len() {
        return Err(RomError::DimensionMismatch { expected: xs.len(), actual: ys.len() });
    }
    if xs.len() < 2 {
        return Err(RomError::InvalidArgument("regression needs at least two points".into()));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(RomError::InvalidArgument("log-log regression needs positive finite values".into()));
    }
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(RomError::InvalidArgument("regression abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok(Regression { slope, intercept, r_squared })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_power_law() {
        let xs = [1e-3, 2e-3, 5e-3, 1e-2];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x * x).collect();
        let r = loglog_regression(&xs, &ys).unwrap();
        assert!((r.slope - 2.0).abs() < 1e-12);
        assert!((r.intercept - 3.0_f64.ln()).abs() < 1e-10);
        assert!((r.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_inputs() {
        assert!(loglog_regression(&[1.0], &[1.0]).is_err());
        assert!(loglog_regression(&[1.0, 0.0], &[1.0, 2.0]).is_err());
        assert!(loglog_regression(&[1.0, 2.0], &[1.0, -2.0]).is_err());
        assert!(loglog_regression(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn noisy_power_law_matches_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let xs: Vec<f64> = (0..12).map(|i| 1e-3 * 1.5_f64.powi(i)).collect();
        let noise = 0.05;
        let ys: Vec<f64> = xs.iter().map(|x| 0.7 * x.powf(1.5) * (noise * rng.gen_range(-1.0..1.0_f64)).exp()).collect();
        let fit = loglog_regression(&xs, &ys).unwrap();
        // normal equations [n, sum lx; sum lx, sum lx^2] [c; p] = [sum ly; sum lx ly]
        let a = DMatrix::from_fn(xs.len(), 2, |i, j| if j == 0 { 1.0 } else { xs[i].ln() });
        let b = DVector::from_iterator(ys.len(), ys.iter().map(|y| y.ln()));
        let sol = (a.transpose() * &a).lu().solve(&(a.transpose() * b)).unwrap();
        assert!((fit.slope - sol[1]).abs() < 1e-10);
        assert!((fit.intercept - sol[0]).abs() < 1e-9);
        // slope error bounded by the noise amplitude over the log-range spread
        let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let m = lx.iter().sum::<f64>() / lx.len() as f64;
        let sxx: f64 = lx.iter().map(|x| (x - m).powi(2)).sum();
        let band = noise * lx.iter().map(|x| (x - m).abs()).sum::<f64>() / sxx;
        assert!((fit.slope - 1.5).abs() <= band);
    }
}
