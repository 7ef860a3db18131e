//! Distance landscape over the two leading eigenvalues of a candidate.
//!
//! Each grid point `(x, y)` is the operator with eigenvalues `x`, `y` on
//! rho's two leading eigenvectors and zero elsewhere. Points near the line
//! `x + y = 1` are flagged as satisfying the trace constraint, and those of
//! them within one grid step's worth of the optimal distance are flagged as
//! optimal.
//!
//! CSV layout: `#`-prefixed `key=value` lines describing the sweep, then the
//! header `lambda_sigma1,lambda_sigma2,distance,on_trace_constraint,in_optimal_set`,
//! then one row per grid point with `x` varying slowest. Flags are `0`/`1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::format_number;
use crate::linalg::state::DensityMatrix;
use crate::oracle::codiagonal_distance;
use crate::scalar::Real;
use crate::solver::{optimal_distance, Metric};
use crate::tolerance::Tolerances;

pub const CSV_HEADER: &str =
    "lambda_sigma1,lambda_sigma2,distance,on_trace_constraint,in_optimal_set";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    /// Points per axis, endpoints included.
    pub resolution: usize,
    pub metric: Metric,
}

impl SweepGrid {
    pub fn unit(resolution: usize, metric: Metric) -> Self {
        Self {
            x_range: (0.0, 1.0),
            y_range: (0.0, 1.0),
            resolution,
            metric,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < 2 {
            return Err(Error::InvalidArgument(
                "sweep resolution must be at least 2".into(),
            ));
        }
        for (name, (lo, hi)) in [("x", self.x_range), ("y", self.y_range)] {
            if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
                return Err(Error::InvalidArgument(format!(
                    "{name} range [{lo}, {hi}] must lie within [0, 1]"
                )));
            }
        }
        Ok(())
    }

    fn axis(&self, (lo, hi): (f64, f64), k: usize) -> f64 {
        lo + (hi - lo) * k as f64 / (self.resolution - 1) as f64
    }

    fn min_step(&self) -> f64 {
        let n = (self.resolution - 1) as f64;
        let steps = [self.x_range, self.y_range].map(|(lo, hi)| (hi - lo) / n);
        steps
            .into_iter()
            .filter(|&s| s > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance slack for the optimal-set flag: the most an on-line grid
    /// point nearest the optimum can exceed it.
    pub fn optimal_window(&self) -> f64 {
        let h = self.min_step();
        let h = if h.is_finite() { h } else { 0.0 };
        let w = match self.metric {
            Metric::HilbertSchmidt => h * h / 2.0,
            Metric::Trace => h / 2.0,
        };
        w + 1e-12
    }

    pub fn trace_window(&self) -> f64 {
        let h = self.min_step();
        (if h.is_finite() { h / 2.0 } else { 0.0 }) + 1e-12
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow<T> {
    pub lambda_sigma1: T,
    pub lambda_sigma2: T,
    pub distance: T,
    pub on_trace_constraint: bool,
    pub in_optimal_set: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep<T> {
    pub grid: SweepGrid,
    pub optimal_distance: T,
    pub rows: Vec<SweepRow<T>>,
}

pub fn sweep<T: Real>(
    rho: &DensityMatrix<T>,
    grid: &SweepGrid,
    tol: &Tolerances<T>,
) -> Result<Sweep<T>> {
    grid.validate()?;
    if rho.dim() < 2 {
        return Err(Error::RankOutOfRange {
            rank: 2,
            dim: rho.dim(),
        });
    }
    let metric = grid.metric;
    let optimal = optimal_distance(rho, 2, metric, tol)?;
    let lambda = rho.eigenvalues();
    let trace_window = T::lit(grid.trace_window());
    let optimal_window = T::lit(grid.optimal_window());
    let mut rows = Vec::with_capacity(grid.resolution * grid.resolution);
    for i in 0..grid.resolution {
        let x = T::lit(grid.axis(grid.x_range, i));
        for j in 0..grid.resolution {
            let y = T::lit(grid.axis(grid.y_range, j));
            let distance = codiagonal_distance(metric, lambda, &[0, 1], &[x, y]);
            let on_trace = (x + y - T::one()).abs() <= trace_window;
            rows.push(SweepRow {
                lambda_sigma1: x,
                lambda_sigma2: y,
                distance,
                on_trace_constraint: on_trace,
                in_optimal_set: on_trace && distance <= optimal + optimal_window,
            });
        }
    }
    Ok(Sweep {
        grid: *grid,
        optimal_distance: optimal,
        rows,
    })
}

impl<T: Real> Sweep<T> {
    pub fn optimal_rows(&self) -> impl Iterator<Item = (usize, &SweepRow<T>)> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.in_optimal_set)
    }

    pub fn to_csv(&self) -> String {
        let g = &self.grid;
        let f = |x: f64| format_number(x);
        let mut out = String::new();
        out.push_str(&format!("# metric={}\n", g.metric.short_name()));
        out.push_str("# rank=2\n");
        out.push_str(&format!("# resolution={}\n", g.resolution));
        out.push_str(&format!(
            "# x_range={},{}\n",
            f(g.x_range.0),
            f(g.x_range.1)
        ));
        out.push_str(&format!(
            "# y_range={},{}\n",
            f(g.y_range.0),
            f(g.y_range.1)
        ));
        out.push_str(&format!(
            "# optimal_distance={}\n",
            f(self.optimal_distance.to_f64_lossy())
        ));
        out.push_str(&format!("# trace_window={}\n", f(g.trace_window())));
        out.push_str(&format!("# optimal_window={}\n", f(g.optimal_window())));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                f(r.lambda_sigma1.to_f64_lossy()),
                f(r.lambda_sigma2.to_f64_lossy()),
                f(r.distance.to_f64_lossy()),
                u8::from(r.on_trace_constraint),
                u8::from(r.in_optimal_set),
            ));
        }
        out
    }
}
