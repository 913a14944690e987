//! Quadrature rules on the reference triangle `{(s, t) : s, t >= 0, s + t <= 1}`.

/// Points and weights on the reference triangle; the weights sum to its area, 1/2.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
    degree: usize,
}

impl TriangleRule {
    /// Symmetric 6-point rule, exact for polynomials of degree 4.
    #[allow(clippy::excessive_precision)]
    pub fn degree4() -> Self {
        const A1: f64 = 0.445_948_490_915_964_886_32;
        const W1: f64 = 0.223_381_589_678_011_465_70;
        const A2: f64 = 0.091_576_213_509_770_743_46;
        const W2: f64 = 0.109_951_743_655_321_867_64;
        let mut points = Vec::with_capacity(6);
        let mut weights = Vec::with_capacity(6);
        for (a, w) in [(A1, W1), (A2, W2)] {
            for p in [[a, a], [1.0 - 2.0 * a, a], [a, 1.0 - 2.0 * a]] {
                points.push(p);
                weights.push(0.5 * w);
            }
        }
        Self { points, weights, degree: 4 }
    }

    /// Collapsed (Duffy) tensor Gauss-Legendre rule with `k` points per
    /// direction; exact for polynomials of degree `2k - 2`.
    pub fn collapsed_gauss(k: usize) -> Self {
        assert!(k >= 1, "need at least one Gauss point");
        let (x, w) = gauss_legendre_unit(k);
        let mut points = Vec::with_capacity(k * k);
        let mut weights = Vec::with_capacity(k * k);
        for (xi, wi) in x.iter().zip(&w) {
            for (xj, wj) in x.iter().zip(&w) {
                // s = u, t = (1 - u) v, Jacobian (1 - u)
                points.push([*xi, (1.0 - xi) * xj]);
                weights.push(wi * wj * (1.0 - xi));
            }
        }
        Self { points, weights, degree: 2 * k - 2 }
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Highest total polynomial degree integrated exactly.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Applies the rule to `f` on the reference triangle.
    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p[0], p[1])).sum()
    }
}

/// Gauss-Legendre nodes and weights mapped to `[0, 1]`.
pub fn gauss_legendre_unit(k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; k];
    let mut w = vec![0.0; k];
    for i in 0..k {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(k, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(k, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = 0.5 * (1.0 - z);
        w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

// P_k(z) and P_k'(z) by the three-term recurrence
fn legendre(k: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if k == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=k {
        let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, k as f64 * (z * p1 - p0) / (z * z - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    // exact integral of s^a t^b over the reference triangle: a! b! / (a + b + 2)!
    fn monomial(a: u32, b: u32) -> f64 {
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        fact(a) * fact(b) / fact(a + b + 2)
    }

    #[test]
    fn weights_positive_and_sum_to_half() {
        for rule in [TriangleRule::degree4(), TriangleRule::collapsed_gauss(5)] {
            assert!(rule.weights().iter().all(|&w| w > 0.0));
            let s: f64 = rule.weights().iter().sum();
            assert!((s - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn exact_to_stated_degree() {
        for rule in [TriangleRule::degree4(), TriangleRule::collapsed_gauss(4), TriangleRule::collapsed_gauss(9)] {
            let deg = rule.degree() as u32;
            for a in 0..=deg {
                for b in 0..=deg - a {
                    let q = rule.integrate(|s, t| s.powi(a as i32) * t.powi(b as i32));
                    assert!((q - monomial(a, b)).abs() < 1e-15, "degree {deg}: s^{a} t^{b}");
                }
            }
        }
    }

    #[test]
    fn degree4_is_not_exact_at_degree_6() {
        let rule = TriangleRule::degree4();
        let q = rule.integrate(|s, _| s.powi(6));
        assert!((q - monomial(6, 0)).abs() > 1e-8);
    }
}
