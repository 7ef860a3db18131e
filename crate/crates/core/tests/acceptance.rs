//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use qlrap::linalg::{hs_distance, trace_distance};
use qlrap::oracle::{majorization_audit, DescentConfig, GridConfig};
use qlrap::pca::{
    cost, eigenvalue_shifts, extract_principal_components, gradient, misordering_demo, optimize,
    MisorderingReport, OptimizerConfig, PurificationAnsatz,
};
use qlrap::random::{random_density, rng};
use qlrap::solver::{
    naive_rescale, solve_hs, solve_trace_distance, trace_family, trace_family_contains,
};
use qlrap::sweep::{sweep, SweepGrid};
use qlrap::verify::{run_battery, BatteryConfig, BatteryReport, ExactClosedForm};
use qlrap::{DensityMatrix64, Metric, Tolerances64};

type Outcome = Result<String, String>;

fn tol() -> Tolerances64 {
    Tolerances64::default()
}

fn rho_tilde() -> DensityMatrix64 {
    DensityMatrix64::from_diag(&[0.41, 0.39, 0.2, 0.0], &tol()).unwrap()
}

fn diag(values: &[f64]) -> DensityMatrix64 {
    DensityMatrix64::from_diag(values, &tol()).unwrap()
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn hs_example() -> Outcome {
    let rho = rho_tilde();
    let sol = solve_hs(&rho, 2, &tol()).map_err(|e| e.to_string())?;
    let mu = sol.sigma_star.eigenvalues();
    let values_ok = (mu[0] - 0.51).abs() <= 1e-12 && (mu[1] - 0.49).abs() <= 1e-12;
    let dist_ok = (sol.distance_star - 0.06).abs() <= 1e-12;
    // best of several runs, so scheduler noise does not decide the outcome
    let mut best = Duration::MAX;
    for _ in 0..200 {
        let start = Instant::now();
        let s = solve_hs(&rho, 2, &tol()).unwrap();
        std::hint::black_box(&s);
        best = best.min(start.elapsed());
    }
    ensure(
        values_ok && dist_ok && best < Duration::from_millis(1),
        format!(
            "eigenvalues ({}, {}), distance {}, runtime {best:?}",
            mu[0], mu[1], sol.distance_star
        ),
    )
}

fn trace_formula() -> Outcome {
    let d = solve_trace_distance(&rho_tilde(), 2, &tol()).map_err(|e| e.to_string())?;
    ensure((d - 0.2).abs() <= 1e-12, format!("distance {d}"))
}

fn family_degeneracy() -> Outcome {
    let rho = rho_tilde();
    let family = trace_family(&rho, 2, &tol()).map_err(|e| e.to_string())?;
    let member = diag(&[0.49, 0.51, 0.0, 0.0]);
    let outsider = diag(&[0.38, 0.62, 0.0, 0.0]);
    let in_ok = trace_family_contains(&family, &member, 1e-12).unwrap();
    let d_in = trace_distance(&rho, &member).unwrap();
    let out_ok = !trace_family_contains(&family, &outsider, 1e-12).unwrap();
    let d_out = trace_distance(&rho, &outsider).unwrap();
    ensure(
        in_ok && (d_in - 0.2).abs() <= 1e-12 && out_ok && d_out > 0.2,
        format!("member at {d_in} (contained: {in_ok}), outsider at {d_out} (rejected: {out_ok})"),
    )
}

fn battery_summary(report: &BatteryReport, elapsed: Duration) -> Outcome {
    let t = &report.tallies;
    let gap_failures = t.grid_gap.failures + t.descent_gap.failures + t.hs_uniqueness.failures;
    ensure(
        gap_failures == 0 && elapsed < Duration::from_secs(300),
        format!(
            "{} instances in {:.1?}: grid worst gap {:e} ({} runs), descent worst gap {:e} ({} runs), HS state deviation {:e}",
            report.instances,
            elapsed,
            t.grid_gap.worst,
            t.grid_gap.runs,
            t.descent_gap.worst,
            t.descent_gap.runs,
            t.hs_uniqueness.worst
        ),
    )
}

fn rotation_summary(report: &BatteryReport) -> Outcome {
    let t = &report.tallies.rotation;
    ensure(
        t.failures == 0 && t.runs > 0,
        format!("{} rotation audits, smallest margin {:e}", t.runs, t.worst),
    )
}

fn majorization() -> Outcome {
    let rep = majorization_audit::<f64>(6, 1000, 0, 1e-9, &tol()).map_err(|e| e.to_string())?;
    ensure(
        rep.passed && rep.trials == 1000,
        format!(
            "{} trials at d={}, smallest margin {:e}",
            rep.trials, rep.dim, rep.min_margin
        ),
    )
}

fn naive_rescale_example() -> Outcome {
    let rho = rho_tilde();
    let naive = naive_rescale(&rho, 2, &tol()).map_err(|e| e.to_string())?;
    let d = hs_distance(&rho, &naive).unwrap();
    ensure(
        (d - 0.0600125).abs() <= 1e-10 && d > 0.06,
        format!("naive rescale at {d}"),
    )
}

fn monotonicity_summary(report: &BatteryReport) -> Outcome {
    let t = &report.tallies.monotonicity;
    ensure(
        t.failures == 0 && t.runs > 0,
        format!(
            "{} (instance, metric, R) checks, largest step {:e}",
            t.runs, t.worst
        ),
    )
}

fn variational() -> Outcome {
    let rho = rho_tilde();
    let cfg = OptimizerConfig::default();
    let run = optimize(&rho, 2, &cfg, &tol()).map_err(|e| e.to_string())?;
    let pcs =
        extract_principal_components(&run.final_state, 2, &tol()).map_err(|e| e.to_string())?;
    let overlaps = pcs.overlaps_with(&rho).map_err(|e| e.to_string())?;
    let shifts = eigenvalue_shifts(&rho, &run.final_state, 2).map_err(|e| e.to_string())?;
    let spread = shifts.iter().copied().fold(f64::MIN, f64::max)
        - shifts.iter().copied().fold(f64::MAX, f64::min);
    let fd = finite_difference_deviation();
    ensure(
        run.converged
            && run.closed_form_gap <= 1e-6
            && cfg.max_iters <= 5000
            && cfg.restarts <= 5
            && overlaps.iter().all(|&o| o >= 0.999)
            && spread <= 1e-3
            && fd <= 1e-5,
        format!(
            "gap {:e} after {} iterations, overlaps {:?}, shift spread {:e}, gradient deviation {:e}",
            run.closed_form_gap, run.iterations, overlaps, spread, fd
        ),
    )
}

fn finite_difference_deviation() -> f64 {
    const H: f64 = 1e-6;
    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let mut g = rng(seed);
        let d = 2 + (seed % 3) as usize;
        let r = 1 + (seed % d as u64) as usize;
        let rho = random_density::<f64, _>(d, d, &mut g, &tol()).unwrap();
        let ansatz = PurificationAnsatz::<f64>::random(d, r, &mut g).unwrap();
        let analytic = gradient(&rho, &ansatz).unwrap();
        let f = |p: Vec<f64>| {
            cost(&rho, &PurificationAnsatz::new(d, r, p).unwrap())
                .unwrap()
                .total
        };
        for (k, &a) in analytic.iter().enumerate() {
            let (mut plus, mut minus) = (ansatz.params().to_vec(), ansatz.params().to_vec());
            plus[k] += H;
            minus[k] -= H;
            worst = worst.max((a - (f(plus) - f(minus)) / (2.0 * H)).abs());
        }
    }
    worst
}

fn misordering(report: &BatteryReport) -> Outcome {
    let rho = rho_tilde();
    match misordering_demo(&rho, 2, 0, &tol()).map_err(|e| e.to_string())? {
        MisorderingReport::Found(m) => {
            let optimal = (m.trace_distance - m.optimal_trace_distance).abs() <= 1e-12;
            let swapped = m.weights[m.swapped.0] < m.weights[m.swapped.1];
            let hs_unique =
                report.tallies.hs_uniqueness.failures == 0 && report.tallies.hs_uniqueness.runs > 0;
            ensure(
                optimal && swapped && m.hs_distance > m.hs_optimum && hs_unique,
                format!(
                    "weights {:?} at trace distance {}, HS distance {} above optimum {}; HS optimum unique in {} battery checks",
                    m.weights, m.trace_distance, m.hs_distance, m.hs_optimum,
                    report.tallies.hs_uniqueness.runs
                ),
            )
        }
        MisorderingReport::NoMisorderedMember { slack, min_gap } => Err(format!(
            "no misordered member (slack {slack}, min gap {min_gap})"
        )),
    }
}

fn sweep_landscape() -> Outcome {
    let rho = rho_tilde();
    let hs_grid = SweepGrid::unit(201, Metric::HilbertSchmidt);
    let hs = sweep(&rho, &hs_grid, &tol()).map_err(|e| e.to_string())?;
    let hs_flagged: Vec<_> = hs.optimal_rows().map(|(_, r)| *r).collect();
    let hs_ok = hs_flagged.len() == 1
        && (hs_flagged[0].lambda_sigma1 - 0.51).abs() < 1e-12
        && (hs_flagged[0].lambda_sigma2 - 0.49).abs() < 1e-12;

    let tr_grid = SweepGrid::unit(201, Metric::Trace);
    let tr = sweep(&rho, &tr_grid, &tol()).map_err(|e| e.to_string())?;
    // Expected segment: every grid point on x + y = 1 with x >= 0.41 and
    // y >= 0.39, i.e. x in [0.41, 0.61] at spacing 0.005.
    let flagged: Vec<(usize, f64, f64)> = tr
        .optimal_rows()
        .map(|(i, r)| (i, r.lambda_sigma1, r.lambda_sigma2))
        .collect();
    let expected: Vec<f64> = (82..=122).map(|k| k as f64 / 200.0).collect();
    let tr_ok = flagged.len() == expected.len()
        && flagged.iter().zip(&expected).all(|(&(_, x, y), &e)| {
            (x - e).abs() < 1e-12 && (x + y - 1.0).abs() < 1e-12 && x >= 0.41 - 1e-12
        })
        // consecutive in x: row indices step by one x-row minus one y-column
        && flagged.windows(2).all(|w| w[1].0 - w[0].0 == 200);

    let bytes_ok = sweep(&rho, &hs_grid, &tol()).unwrap().to_csv() == hs.to_csv()
        && sweep(&rho, &tr_grid, &tol()).unwrap().to_csv() == tr.to_csv();
    ensure(
        hs_ok && tr_ok && bytes_ok,
        format!(
            "HS flags {} point(s), trace flags {} points from x={} to x={}, deterministic: {bytes_ok}",
            hs_flagged.len(),
            flagged.len(),
            flagged.first().map_or(f64::NAN, |f| f.1),
            flagged.last().map_or(f64::NAN, |f| f.1)
        ),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let battery = run_battery(
        &ExactClosedForm,
        &BatteryConfig::default(),
        &GridConfig::with_resolution(100),
        &DescentConfig::default(),
        &tol(),
    );
    let elapsed = start.elapsed();
    let battery = match battery {
        Ok(b) => Some(b),
        Err(e) => {
            eprintln!("battery aborted: {e}");
            None
        }
    };
    let with_battery = |f: &dyn Fn(&BatteryReport) -> Outcome| match &battery {
        Some(b) => f(b),
        None => Err("battery did not run".into()),
    };

    let results: Vec<(u32, &str, Outcome)> = vec![
        (
            1,
            "HS optimum of diag(0.41, 0.39, 0.2, 0) at R=2",
            hs_example(),
        ),
        (2, "trace distance optimum", trace_formula()),
        (3, "trace-optimal family membership", family_degeneracy()),
        (
            4,
            "oracle equivalence over seeded battery",
            with_battery(&|b| battery_summary(b, elapsed)),
        ),
        (
            5,
            "rotation audits, both metrics",
            with_battery(&rotation_summary),
        ),
        (6, "spectrum majorizes diagonal at d=6", majorization()),
        (
            7,
            "multiplicative rescale is suboptimal",
            naive_rescale_example(),
        ),
        (
            8,
            "optimal distances monotone in R",
            with_battery(&monotonicity_summary),
        ),
        (9, "variational PCA", variational()),
        (10, "misordered trace optimum", with_battery(&misordering)),
        (
            11,
            "distance landscape sweep at resolution 201",
            sweep_landscape(),
        ),
    ];

    let mut failed = 0;
    for (n, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS {n:>2} {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {n:>2} {name}: {detail}");
            }
        }
    }
    if let Some(b) = &battery {
        for f in b.failures.iter().take(10) {
            println!(
                "  battery failure {}: d={} R={} {}",
                f.check, f.instance.dim, f.instance.rank_bound, f.detail
            );
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
