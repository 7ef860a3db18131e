use qlrap::linalg::hs_distance;
use qlrap::random::{random_density, rng};
use qlrap::solver::{solve_hs, solve_trace_distance};
use qlrap::{DensityMatrix32, Tolerances32};

#[test]
fn f32_solves_a_diagonal_example() {
    let tol = Tolerances32::default();
    let rho = DensityMatrix32::from_diag(&[0.41, 0.39, 0.2, 0.0], &tol).unwrap();
    let sol = solve_hs(&rho, 2, &tol).unwrap();
    assert!((sol.distance_star - 0.06).abs() < 1e-6);
    let diag = sol.sigma_star.matrix().diagonal_re();
    assert!((diag[0] - 0.51).abs() < 1e-6 && (diag[1] - 0.49).abs() < 1e-6);
    assert!((solve_trace_distance(&rho, 2, &tol).unwrap() - 0.2).abs() < 1e-6);
}

#[test]
fn f32_agrees_with_f64_on_random_states() {
    let t32 = Tolerances32::default();
    let t64 = qlrap::Tolerances64::default();
    for seed in 0..20 {
        let rho64 = random_density::<f64, _>(5, 5, &mut rng(seed), &t64).unwrap();
        let rho32 = DensityMatrix32::from_matrix(rho64.matrix().cast(), &t32).unwrap();
        for r in 1..=5 {
            let a = solve_hs(&rho64, r, &t64).unwrap();
            let b = solve_hs(&rho32, r, &t32).unwrap();
            assert!((a.distance_star - b.distance_star as f64).abs() < 1e-5);
            let recomputed = hs_distance(&rho32, &b.sigma_star).unwrap();
            assert!((recomputed - b.distance_star).abs() < 1e-5);
        }
    }
}
