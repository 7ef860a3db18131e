use qlrap::pca::{cost, gradient, PurificationAnsatz};
use qlrap::random::{random_density, rng};
use qlrap::Tolerances64;

const H: f64 = 1e-6;

#[test]
fn gradient_matches_central_differences() {
    let tol = Tolerances64::default();
    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let mut g = rng(seed);
        let d = 2 + (seed % 4) as usize;
        let r = 1 + (seed % d as u64) as usize;
        let rho = random_density::<f64, _>(d, d, &mut g, &tol).unwrap();
        let ansatz = PurificationAnsatz::<f64>::random(d, r, &mut g).unwrap();
        let analytic = gradient(&rho, &ansatz).unwrap();
        let f = |p: Vec<f64>| {
            cost(&rho, &PurificationAnsatz::new(d, r, p).unwrap())
                .unwrap()
                .total
        };
        for (k, &a) in analytic.iter().enumerate() {
            let mut plus = ansatz.params().to_vec();
            let mut minus = plus.clone();
            plus[k] += H;
            minus[k] -= H;
            let numeric = (f(plus) - f(minus)) / (2.0 * H);
            worst = worst.max((a - numeric).abs());
        }
    }
    assert!(worst < 1e-5, "max deviation {worst:e}");
}

#[test]
fn gradient_is_tangent_to_the_norm_sphere() {
    // Rescaling the parameters leaves the state unchanged.
    let tol = Tolerances64::default();
    let mut g = rng(9);
    let rho = random_density::<f64, _>(4, 3, &mut g, &tol).unwrap();
    let ansatz = PurificationAnsatz::<f64>::random(4, 2, &mut g).unwrap();
    let grad = gradient(&rho, &ansatz).unwrap();
    let radial: f64 = grad.iter().zip(ansatz.params()).map(|(a, b)| a * b).sum();
    assert!(radial.abs() < 1e-12);
}
