//! Exhaustive search over co-diagonal candidates on a simplex grid.
//!
//! For every support set of `R` eigen-indices and every composition of
//! `resolution` into `R` non-negative parts, the candidate spectrum is the
//! composition divided by `resolution`. Any simplex point has a grid
//! neighbour within `1/resolution` per coordinate with the same sum, so the
//! discretisation leaves at most `R / resolution^2` (Hilbert–Schmidt, whose
//! first-order term vanishes along the simplex at the optimum) or
//! `R / (2 resolution)` (trace distance, 1/2-Lipschitz in l1) above the true
//! minimum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::state::DensityMatrix;
use crate::oracle::{subsets, InstanceDescriptor, OracleReport};
use crate::scalar::Real;
use crate::solver::{optimal_distance, Metric};
use crate::tolerance::Tolerances;

pub const MAX_DIM: usize = 8;
pub const MAX_RANK: usize = 4;
pub const MAX_RESOLUTION: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub resolution: usize,
    /// Candidates within this distance of the best count as near-optimal.
    pub window: f64,
    /// Cap on the number of near-optimal spectra retained in the report.
    pub keep: usize,
    pub seed: Option<u64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            resolution: 100,
            window: 1e-12,
            keep: 4096,
            seed: None,
        }
    }
}

impl GridConfig {
    pub fn with_resolution(resolution: usize) -> Self {
        Self {
            resolution,
            ..Self::default()
        }
    }
}

pub fn grid_gap_bound<T: Real>(metric: Metric, r: usize, resolution: usize) -> T {
    let r = T::from_usize_lossy(r);
    let res = T::from_usize_lossy(resolution);
    match metric {
        Metric::HilbertSchmidt => r / (res * res),
        Metric::Trace => r / (T::lit(2.0) * res),
    }
}

/// Minimum over all support sets of size `r`.
pub fn grid_oracle<T: Real>(
    rho: &DensityMatrix<T>,
    r: usize,
    metric: Metric,
    cfg: &GridConfig,
    tol: &Tolerances<T>,
) -> Result<OracleReport<T>> {
    if r == 0 || r > rho.dim() {
        return Err(Error::RankOutOfRange {
            rank: r,
            dim: rho.dim(),
        });
    }
    grid_oracle_on_supports(rho, r, metric, &subsets(rho.dim(), r), cfg, tol)
}

/// Minimum over the given support sets only (each of size `r`).
pub fn grid_oracle_on_supports<T: Real>(
    rho: &DensityMatrix<T>,
    r: usize,
    metric: Metric,
    supports: &[Vec<usize>],
    cfg: &GridConfig,
    tol: &Tolerances<T>,
) -> Result<OracleReport<T>> {
    let d = rho.dim();
    if r == 0 || r > d {
        return Err(Error::RankOutOfRange { rank: r, dim: d });
    }
    if d > MAX_DIM || r > MAX_RANK || cfg.resolution > MAX_RESOLUTION {
        return Err(Error::BudgetExceeded(format!(
            "grid oracle limited to d <= {MAX_DIM}, R <= {MAX_RANK}, resolution <= {MAX_RESOLUTION} (got d={d}, R={r}, resolution={})",
            cfg.resolution
        )));
    }
    if cfg.resolution == 0 {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    if supports.is_empty() {
        return Err(Error::InvalidArgument("no support sets given".into()));
    }
    if let Some(s) = supports
        .iter()
        .find(|s| s.len() != r || s.iter().any(|&i| i >= d))
    {
        return Err(Error::InvalidArgument(format!("bad support set {s:?}")));
    }

    let lambda = rho.eigenvalues();
    let mut search = Search::new(cfg, d);
    for support in supports {
        search.run_support(metric, lambda, support, cfg.resolution);
    }

    let (best_support, best_ks) = search.best.clone().expect("at least one candidate");
    let res = T::from_usize_lossy(cfg.resolution);
    let mut values = vec![T::zero(); d];
    for (&i, &k) in best_support.iter().zip(&best_ks) {
        values[i] = T::from_usize_lossy(k) / res;
    }
    let best_candidate =
        DensityMatrix::from_eigenpairs(values, rho.spectrum().vectors().to_vec(), tol)?;
    let oracle_distance = metric.distance(rho, &best_candidate)?;
    let closed_form_distance = optimal_distance(rho, r, metric, tol)?;

    Ok(OracleReport {
        instance: InstanceDescriptor::new(rho, r, cfg.seed),
        metric,
        oracle_distance,
        closed_form_distance,
        gap: oracle_distance - closed_form_distance,
        gap_bound: grid_gap_bound(metric, r, cfg.resolution),
        best_candidate,
        best_support,
        candidates_evaluated: search.evaluated,
        near_optimal: search
            .near
            .into_iter()
            .filter_map(|(_, spec)| spec)
            .collect(),
        near_optimal_count: search.near_count,
        failed_restarts: 0,
    })
}

struct Search<T> {
    window: T,
    keep: usize,
    dim: usize,
    best_distance: T,
    best: Option<(Vec<usize>, Vec<usize>)>,
    evaluated: u64,
    /// (distance, optional stored spectrum) of near-optimal candidates.
    near: Vec<(T, Option<Vec<T>>)>,
    near_count: u64,
    stored: usize,
}

impl<T: Real> Search<T> {
    fn new(cfg: &GridConfig, dim: usize) -> Self {
        Self {
            window: T::lit(cfg.window),
            keep: cfg.keep,
            dim,
            best_distance: T::infinity(),
            best: None,
            evaluated: 0,
            near: Vec::new(),
            near_count: 0,
            stored: 0,
        }
    }

    fn run_support(&mut self, metric: Metric, lambda: &[T], support: &[usize], resolution: usize) {
        let res = T::from_usize_lossy(resolution);
        // per-position cost of placing k/res on support[pos]
        let table: Vec<Vec<T>> = support
            .iter()
            .map(|&i| {
                (0..=resolution)
                    .map(|k| {
                        let diff = T::from_usize_lossy(k) / res - lambda[i];
                        match metric {
                            Metric::HilbertSchmidt => diff * diff,
                            Metric::Trace => diff.abs(),
                        }
                    })
                    .collect()
            })
            .collect();
        let scale = match metric {
            Metric::HilbertSchmidt => T::one(),
            Metric::Trace => T::lit(0.5),
        };
        // distance contribution of the eigenvalues left out of the support
        let outside: T = lambda
            .iter()
            .enumerate()
            .filter(|(i, _)| !support.contains(i))
            .map(|(_, &l)| match metric {
                Metric::HilbertSchmidt => l * l,
                Metric::Trace => l.abs(),
            })
            .sum::<T>()
            * scale;
        let mut ks = vec![0usize; support.len()];
        self.recurse(
            &table,
            support,
            resolution,
            0,
            resolution,
            T::zero(),
            outside,
            scale,
            &mut ks,
        );
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        &mut self,
        table: &[Vec<T>],
        support: &[usize],
        resolution: usize,
        pos: usize,
        remaining: usize,
        acc: T,
        outside: T,
        scale: T,
        ks: &mut [usize],
    ) {
        let last = table.len() - 1;
        if pos == last {
            ks[pos] = remaining;
            let dist = outside + (acc + table[pos][remaining]) * scale;
            self.visit(dist, support, ks, resolution);
            return;
        }
        for k in 0..=remaining {
            ks[pos] = k;
            self.recurse(
                table,
                support,
                resolution,
                pos + 1,
                remaining - k,
                acc + table[pos][k],
                outside,
                scale,
                ks,
            );
        }
    }

    fn visit(&mut self, dist: T, support: &[usize], ks: &[usize], resolution: usize) {
        self.evaluated += 1;
        if dist < self.best_distance - self.window {
            self.best_distance = dist;
            self.best = Some((support.to_vec(), ks.to_vec()));
            let cutoff = dist + self.window;
            self.near.retain(|(d, _)| *d <= cutoff);
            self.near_count = self.near.len() as u64;
            self.stored = self.near.iter().filter(|(_, s)| s.is_some()).count();
        } else if dist < self.best_distance {
            self.best_distance = dist;
            self.best = Some((support.to_vec(), ks.to_vec()));
        }
        if dist <= self.best_distance + self.window {
            self.near_count += 1;
            let spectrum = (self.stored < self.keep).then(|| {
                let res = T::from_usize_lossy(resolution);
                let mut v = vec![T::zero(); self.dim];
                for (&i, &k) in support.iter().zip(ks) {
                    v[i] = T::from_usize_lossy(k) / res;
                }
                v
            });
            if spectrum.is_some() {
                self.stored += 1;
            }
            self.near.push((dist, spectrum));
        }
    }
}
