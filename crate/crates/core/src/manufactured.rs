//! Analytic Navier-Stokes solution with a moving internal layer.
//!
//! `u = 2/pi atan(-k (y - t)) sin(pi y)`, `v = 2/pi atan(-k (x - t)) sin(pi x)`,
//! `p = 0`, with the forcing chosen so that the momentum equation holds exactly.
//! All derivatives are closed-form.

use std::f64::consts::{FRAC_2_PI, PI};

/// Manufactured velocity field and the matching body force.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticSolution {
    nu: f64,
    sharpness: f64,
}

/// The three parts of the forcing, `f = u_t - nu lap u + (u . grad) u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForcingTerms {
    pub time_derivative: [f64; 2],
    pub diffusion: [f64; 2],
    pub convection: [f64; 2],
}

impl ForcingTerms {
    pub fn total(&self) -> [f64; 2] {
        [0, 1].map(|c| self.time_derivative[c] + self.diffusion[c] + self.convection[c])
    }
}

// One-dimensional profile P(z, t) = g(z - t) sin(pi z) with its derivatives.
struct Profile {
    p: f64,
    dz: f64,
    dzz: f64,
    dt: f64,
}

impl AnalyticSolution {
    pub const DEFAULT_NU: f64 = 1e-3;
    pub const DEFAULT_SHARPNESS: f64 = 500.0;

    pub fn new(nu: f64) -> Self {
        assert!(nu > 0.0, "diffusion coefficient must be positive");
        Self { nu, sharpness: Self::DEFAULT_SHARPNESS }
    }

    pub fn with_sharpness(nu: f64, sharpness: f64) -> Self {
        assert!(nu > 0.0, "diffusion coefficient must be positive");
        Self { nu, sharpness }
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn sharpness(&self) -> f64 {
        self.sharpness
    }

    fn profile(&self, z: f64, t: f64) -> Profile {
        let k = self.sharpness;
        let s = z - t;
        let q = 1.0 + k * k * s * s;
        let g = FRAC_2_PI * (-k * s).atan();
        let g1 = -FRAC_2_PI * k / q;
        let g2 = FRAC_2_PI * 2.0 * k * k * k * s / (q * q);
        let (sn, cs) = (PI * z).sin_cos();
        Profile {
            p: g * sn,
            dz: g1 * sn + g * PI * cs,
            dzz: g2 * sn + 2.0 * g1 * PI * cs - g * PI * PI * sn,
            dt: -g1 * sn,
        }
    }

    /// Velocity `(u, v)` at `x = (x, y)` and time `t`.
    pub fn velocity(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        [self.profile(x[1], t).p, self.profile(x[0], t).p]
    }

    /// Velocity gradient, `grad[c][d] = d u_c / d x_d`.
    pub fn velocity_grad(&self, x: [f64; 2], t: f64) -> [[f64; 2]; 2] {
        [[0.0, self.profile(x[1], t).dz], [self.profile(x[0], t).dz, 0.0]]
    }

    pub fn velocity_dt(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        [self.profile(x[1], t).dt, self.profile(x[0], t).dt]
    }

    pub fn velocity_laplacian(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        [self.profile(x[1], t).dzz, self.profile(x[0], t).dzz]
    }

    pub fn forcing_terms(&self, x: [f64; 2], t: f64) -> ForcingTerms {
        let py = self.profile(x[1], t);
        let px = self.profile(x[0], t);
        let (u, v) = (py.p, px.p);
        ForcingTerms {
            time_derivative: [py.dt, px.dt],
            diffusion: [-self.nu * py.dzz, -self.nu * px.dzz],
            // u d/dx u + v d/dy u, u d/dx v + v d/dy v
            convection: [v * py.dz, u * px.dz],
        }
    }

    /// Body force matching the exact solution (zero pressure gradient).
    pub fn forcing(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        self.forcing_terms(x, t).total()
    }
}

impl Default for AnalyticSolution {
    fn default() -> Self {
        Self::new(Self::DEFAULT_NU)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1.0)
    }

    #[test]
    fn zeros_of_the_closed_form() {
        let sol = AnalyticSolution::default();
        assert_eq!(sol.velocity([0.3, 0.25], 0.25)[0], 0.0);
        assert_eq!(sol.velocity([0.25, 0.7], 0.25)[1], 0.0);
        assert!(sol.velocity([0.5, 0.0], 0.37)[0].abs() < 1e-16);
    }

    #[test]
    fn bounded_and_divergence_free() {
        let sol = AnalyticSolution::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let (x, t) = ([rng.gen(), rng.gen()], rng.gen());
            let u = sol.velocity(x, t);
            assert!(u[0].abs() <= 1.0 && u[1].abs() <= 1.0);
            let g = sol.velocity_grad(x, t);
            assert_eq!(g[0][0] + g[1][1], 0.0);
        }
    }

    #[test]
    fn gradient_and_time_derivative_match_finite_differences() {
        let sol = AnalyticSolution::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = 1e-6;
        for _ in 0..50 {
            let (x, t): ([f64; 2], f64) = ([rng.gen_range(0.01..0.99), rng.gen_range(0.01..0.99)], rng.gen_range(0.01..0.99));
            let g = sol.velocity_grad(x, t);
            for d in 0..2 {
                let mut xp = x;
                let mut xm = x;
                xp[d] += h;
                xm[d] -= h;
                let (up, um) = (sol.velocity(xp, t), sol.velocity(xm, t));
                for c in 0..2 {
                    assert!(rel(g[c][d], (up[c] - um[c]) / (2.0 * h)) < 1e-5);
                }
            }
            let dt = sol.velocity_dt(x, t);
            let (up, um) = (sol.velocity(x, t + h), sol.velocity(x, t - h));
            for c in 0..2 {
                assert!(rel(dt[c], (up[c] - um[c]) / (2.0 * h)) < 1e-5);
            }
        }
    }

    #[test]
    fn forcing_matches_finite_difference_residual() {
        let sol = AnalyticSolution::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (h1, h2) = (1e-6, 1e-5);
        for _ in 0..50 {
            let (x, t): ([f64; 2], f64) = ([rng.gen_range(0.01..0.99), rng.gen_range(0.01..0.99)], rng.gen_range(0.01..0.99));
            let u = sol.velocity(x, t);
            let ut = [0, 1].map(|c| (sol.velocity(x, t + h1)[c] - sol.velocity(x, t - h1)[c]) / (2.0 * h1));
            let mut grad = [[0.0; 2]; 2];
            let mut lap = [0.0; 2];
            for d in 0..2 {
                let mut xp = x;
                let mut xm = x;
                xp[d] += h1;
                xm[d] -= h1;
                let (up, um) = (sol.velocity(xp, t), sol.velocity(xm, t));
                let mut xp2 = x;
                let mut xm2 = x;
                xp2[d] += h2;
                xm2[d] -= h2;
                let (up2, um2) = (sol.velocity(xp2, t), sol.velocity(xm2, t));
                for c in 0..2 {
                    grad[c][d] = (up[c] - um[c]) / (2.0 * h1);
                    lap[c] += (up2[c] - 2.0 * u[c] + um2[c]) / (h2 * h2);
                }
            }
            let f = sol.forcing(x, t);
            for c in 0..2 {
                let conv = u[0] * grad[c][0] + u[1] * grad[c][1];
                let fd = ut[c] - sol.nu() * lap[c] + conv;
                assert!(rel(f[c], fd) < 1e-4, "component {c}: {} vs {}", f[c], fd);
            }
        }
    }

    #[test]
    fn strong_form_residual_vanishes() {
        let sol = AnalyticSolution::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let (x, t) = ([rng.gen(), rng.gen()], rng.gen());
            let (u, g, lap, ut) = (sol.velocity(x, t), sol.velocity_grad(x, t), sol.velocity_laplacian(x, t), sol.velocity_dt(x, t));
            let f = sol.forcing(x, t);
            for c in 0..2 {
                let r = ut[c] - sol.nu() * lap[c] + u[0] * g[c][0] + u[1] * g[c][1] - f[c];
                assert!(r.abs() <= 1e-10 * f[c].abs().max(1.0));
            }
        }
    }

    #[test]
    fn forcing_is_sum_of_terms() {
        let sol = AnalyticSolution::default();
        let x = [0.5, 0.0];
        let terms = sol.forcing_terms(x, 0.9);
        let f = sol.forcing(x, 0.9);
        let (u, g) = (sol.velocity(x, 0.9), sol.velocity_grad(x, 0.9));
        for c in 0..2 {
            assert_eq!(f[c], terms.time_derivative[c] + terms.diffusion[c] + terms.convection[c]);
            assert_eq!(terms.time_derivative[c], sol.velocity_dt(x, 0.9)[c]);
            assert_eq!(terms.diffusion[c], -sol.nu() * sol.velocity_laplacian(x, 0.9)[c]);
            assert!((terms.convection[c] - (u[0] * g[c][0] + u[1] * g[c][1])).abs() < 1e-14);
        }
    }

    #[test]
    fn inviscid_forcing_isolates_convection() {
        let sol = AnalyticSolution::with_sharpness(1e-300, 500.0);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let (x, t) = ([rng.gen(), rng.gen()], rng.gen());
            let f = sol.forcing(x, t);
            let (u, g, ut) = (sol.velocity(x, t), sol.velocity_grad(x, t), sol.velocity_dt(x, t));
            for c in 0..2 {
                let conv = u[0] * g[c][0] + u[1] * g[c][1];
                assert!((f[c] - ut[c] - conv).abs() <= 1e-12 * conv.abs().max(1.0));
            }
        }
    }
}
