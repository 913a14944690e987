use super::*;
use crate::fe::{assemble_mass, assemble_stiffness, TriMesh};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Setup {
    space: VelocitySpace,
    mass: SymmetricOperator,
    stiffness: SymmetricOperator,
    snapshots: SnapshotSet,
}

fn setup(n: usize, count: usize) -> Setup {
    let space = VelocitySpace::new(TriMesh::new(n).unwrap());
    let mass = assemble_mass(&space);
    let stiffness = assemble_stiffness(&space);
    let times = uniform_times(1.0 / (count - 1) as f64, count);
    let snapshots = collect_snapshots(&space, &AnalyticSolution::default(), &times).unwrap();
    Setup { space, mass, stiffness, snapshots }
}

fn basis(s: &Setup) -> PodBasis {
    build_pod_basis(&s.snapshots, &s.mass, &s.stiffness, DEFAULT_RANK_TOL).unwrap()
}

#[test]
fn single_snapshot_basis() {
    let space = VelocitySpace::new(TriMesh::new(6).unwrap());
    let (mass, stiffness) = (assemble_mass(&space), assemble_stiffness(&space));
    let sol = AnalyticSolution::default();
    let snaps = collect_snapshots(&space, &sol, &[0.0]).unwrap();
    let u0 = space.interpolate(|p| sol.velocity(p, 0.0)).unwrap();
    assert_eq!(snaps.column(0), u0);
    let b = build_pod_basis(&snaps, &mass, &stiffness, DEFAULT_RANK_TOL).unwrap();
    assert_eq!(b.dim(), 1);
    let energy = mass.inner(u0.values(), u0.values()).unwrap();
    assert!((b.eigenvalues()[0] - energy).abs() < 1e-14 * energy);
    let norm = energy.sqrt();
    for (phi, u) in b.modes().column(0).iter().zip(u0.values()) {
        assert!((phi - u / norm).abs() < 1e-12);
    }
}

#[test]
fn default_protocol_has_101_columns() {
    let s = setup(4, 101);
    assert_eq!(s.snapshots.len(), 101);
    let sol = AnalyticSolution::default();
    let u50 = s.space.interpolate(|p| sol.velocity(p, 0.5)).unwrap();
    assert_eq!(s.snapshots.column(50), u50);
    assert_eq!(s.snapshots.times()[50], 0.5);
}

#[test]
fn bad_times_rejected() {
    let s = setup(2, 3);
    let sol = AnalyticSolution::default();
    assert!(collect_snapshots(&s.space, &sol, &[]).is_err());
    assert!(collect_snapshots(&s.space, &sol, &[0.2, 0.1]).is_err());
    assert!(collect_snapshots(&s.space, &sol, &[0.5, 1.5]).is_err());
}

#[test]
fn repeated_snapshot_gives_rank_one_correlation() {
    let s = setup(4, 3);
    let u = s.snapshots.column(1);
    let reps = SnapshotSet::from_columns(vec![0.0, 0.1, 0.2, 0.3], &vec![u.clone(); 4]).unwrap();
    let k = correlation_matrix(&reps, &s.mass).unwrap();
    let c = s.mass.inner(u.values(), u.values()).unwrap();
    assert!(k.iter().all(|&v| (v - c / 4.0).abs() < 1e-14 * c));
    let b = build_pod_basis(&reps, &s.mass, &s.stiffness, DEFAULT_RANK_TOL).unwrap();
    assert_eq!(b.dim(), 1);
}

#[test]
fn correlation_trace_is_mean_energy() {
    let s = setup(6, 21);
    let k = correlation_matrix(&s.snapshots, &s.mass).unwrap();
    assert!((&k - k.transpose()).amax() <= 1e-14);
    let mean: f64 = (0..s.snapshots.len())
        .map(|l| crate::fe::l2_norm(&s.mass, s.snapshots.matrix().column(l).as_slice()).unwrap().powi(2))
        .sum::<f64>()
        / s.snapshots.len() as f64;
    assert!((k.trace() - mean).abs() <= 1e-12 * mean);
}

#[test]
fn error_formula_by_explicit_projection() {
    let s = setup(8, 21);
    let b = basis(&s);
    assert!(b.orthonormality_defect(b.dim()).unwrap() <= 1e-10);
    for r in [1, 5, 10, 15] {
        let r = r.min(b.dim());
        let mut avg = 0.0;
        for l in 0..s.snapshots.len() {
            let u = s.snapshots.column(l);
            let a = b.project(r, u.values()).unwrap();
            let pu = b.reconstruct(&a).unwrap();
            let e: Vec<f64> = u.values().iter().zip(pu.values()).map(|(x, y)| x - y).collect();
            avg += s.mass.inner(&e, &e).unwrap();
        }
        avg /= s.snapshots.len() as f64;
        let (tail, _) = b.truncation_errors(r).unwrap();
        // round-off floor once the basis is exhausted
        let floor = 1e-14 * b.eigenvalues()[0];
        assert!((avg - tail).abs() <= 1e-8 * tail + floor, "r = {r}: {avg} vs {tail}");
    }
}

#[test]
fn truncation_errors_decrease_to_zero() {
    let s = setup(6, 21);
    let b = basis(&s);
    let d = b.dim();
    assert_eq!(b.truncation_errors(d).unwrap(), (0.0, 0.0));
    assert!(b.truncation_errors(d + 1).is_err());
    let vals: Vec<(f64, f64)> = (0..=d).map(|r| b.truncation_errors(r).unwrap()).collect();
    for w in vals.windows(2) {
        assert!(w[1].0 < w[0].0 && w[1].1 < w[0].1);
    }
}

#[test]
fn h1_convention_switch() {
    let s = setup(6, 11);
    let mut b = basis(&s);
    let (_, full) = b.truncation_errors(2).unwrap();
    b.set_convention(H1Convention::Seminorm);
    let (l2, semi) = b.truncation_errors(2).unwrap();
    assert!((full - semi - l2).abs() <= 1e-12 * full);
}

#[test]
fn rom_stiffness_properties() {
    let s = setup(6, 21);
    let b = basis(&s);
    let s1 = b.rom_stiffness(1).unwrap();
    assert!((s1.matrix()[(0, 0)] - (b.h1_norm_sq(0) - 1.0)).abs() <= 1e-12 * s1.matrix()[(0, 0)]);
    let s5 = b.rom_stiffness(5).unwrap();
    let s10 = b.rom_stiffness(10).unwrap();
    assert_eq!(s5.matrix(), &s10.matrix().view((0, 0), (5, 5)).into_owned());
    let top = symmetric_eig(s10.matrix()).unwrap().values[0];
    assert!((s10.spectral_norm() - top).abs() <= 1e-8 * top);
    assert!(b.rom_stiffness(0).is_err());
    assert!(b.rom_stiffness(b.dim() + 1).is_err());
    // entries are (grad phi_j, grad phi_i)
    let (p2, p3) = (b.mode(2), b.mode(3));
    let direct = s.stiffness.inner(p2.values(), p3.values()).unwrap();
    assert!((s10.matrix()[(3, 2)] - direct).abs() <= 1e-10 * direct.abs().max(1.0));
}

#[test]
fn projection_properties() {
    let s = setup(6, 21);
    let b = basis(&s);
    let a = b.project(5, b.mode(2).values()).unwrap();
    for (i, ai) in a.iter().enumerate() {
        assert!((ai - if i == 2 { 1.0 } else { 0.0 }).abs() < 1e-10);
    }
    let u = s.snapshots.column(7);
    let full = b.project(b.dim(), u.values()).unwrap();
    let pu = b.reconstruct(&full).unwrap();
    // scale the complement up to unit norm before checking
    let w: Vec<f64> = u.values().iter().zip(pu.values()).map(|(x, y)| x - y).collect();
    let wn = crate::fe::l2_norm(&s.mass, &w).unwrap().max(1e-300);
    let w: Vec<f64> = w.iter().map(|x| x / wn).collect();
    assert!(b.project(b.dim(), &w).unwrap().iter().all(|c| c.abs() < 1e-9) || wn < 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let v: Vec<f64> = (0..s.space.dofs()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = b.project(8, &v).unwrap();
        let pn = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(pn <= crate::fe::l2_norm(&s.mass, &v).unwrap());
    }
    assert!(b.project(3, &[1.0]).is_err());
}

#[test]
fn rom_laplacian_properties() {
    let s = setup(6, 21);
    let b = basis(&s);
    let sr = b.rom_stiffness(6).unwrap();
    assert!(sr.rom_laplacian(&[0.0; 6]).unwrap().iter().all(|&v| v == 0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let a: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let la = sr.rom_laplacian(&a).unwrap();
        assert!(a.iter().zip(&la).map(|(x, y)| x * y).sum::<f64>() <= 0.0);
    }
    let eig = symmetric_eig(sr.matrix()).unwrap();
    let v: Vec<f64> = eig.vectors.column(1).iter().copied().collect();
    let lv = sr.rom_laplacian(&v).unwrap();
    for (x, y) in v.iter().zip(&lv) {
        assert!((y + eig.values[1] * x).abs() <= 1e-9 * eig.values[0]);
    }
    assert!(sr.rom_laplacian(&[1.0]).is_err());
}

#[test]
fn inverse_estimate_holds() {
    let s = setup(6, 21);
    let b = basis(&s);
    let r = 12.min(b.dim());
    let c = b.rom_stiffness(r).unwrap().inverse_estimate_constant();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let a: Vec<f64> = (0..r).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v = b.reconstruct(&a).unwrap();
        let g = crate::fe::h1_semi_norm(&s.stiffness, v.values()).unwrap();
        let l = crate::fe::l2_norm(&s.mass, v.values()).unwrap();
        assert!(g <= c * l * (1.0 + 1e-8));
    }
}

#[test]
fn cache_round_trip_is_bit_exact() {
    let s = setup(4, 11);
    let b = basis(&s);
    let key = CacheKey { mesh_n: 4, spacing: 0.1, count: 11, rank_tol: DEFAULT_RANK_TOL };
    let dir = std::env::temp_dir().join(format!("romlab-cache-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = key.path_in(&dir);
    save_basis(&path, &key, &b).unwrap();
    let c = load_basis(&path, &key, &s.mass).unwrap();
    assert_eq!(b.eigenvalues(), c.eigenvalues());
    assert_eq!(b.modes(), c.modes());
    assert_eq!(b.gradient_gram(), c.gradient_gram());
    assert_eq!(b.mass_modes(), c.mass_modes());
    let other = CacheKey { mesh_n: 8, ..key };
    assert!(matches!(load_basis(&path, &other, &s.mass), Err(RomError::Cache(_))));
    std::fs::remove_dir_all(&dir).unwrap();
}
