//! End-to-end transform: optional projection onto the 3D subspace,
//! densest-first ordering per class, iterated attraction passes until the
//! intra-class variance settles, then unsorting and reconstruction.

use std::time::{Duration, Instant};

use ndarray::Array2;

use crate::dataset::LabeledDataset;
use crate::density::{sort_by_density, unsort, ClassBundle};
use crate::error::{Error, Result};
use crate::newtonian::{newtonian_pass_points, StepGuards};
use crate::pca::{fit_pca3, PcaModel};
use crate::relativity::{relativity_pass_points, AlphaWeights, MetricKind};

/// Which dynamics move the points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Accumulated unit pulls, any dimensionality.
    Newtonian,
    /// Curved-metric per-pair steps in the 3D subspace.
    Schwarzschild,
    /// Flat-metric per-pair steps in the 3D subspace.
    Minkowski,
}

impl Method {
    pub fn is_relativity(self) -> bool {
        matches!(self, Method::Schwarzschild | Method::Minkowski)
    }
}

/// Full run configuration. `seed` is carried for provenance in run
/// manifests; the transform itself draws no random numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct GdrConfig {
    pub method: Method,
    /// Work inside the fitted 3D subspace. Optional for `Newtonian`,
    /// mandatory for the relativity methods.
    pub use_pca: bool,
    /// Movement split among radial/polar/azimuthal directions
    /// (relativity methods only).
    pub alpha: AlphaWeights,
    pub max_iter: usize,
    /// Relative total-variance change below which the run stops early.
    /// 0 disables early stopping.
    pub tol: f64,
    pub guards: StepGuards,
    /// Newtonian only: cap per-pair moves and scale each point's
    /// accumulated move by 1/(n_k−1), guaranteeing no overshoot past the
    /// class however large the class is.
    pub stabilized: bool,
    /// Neighborhood size for the density sort, clamped per class to
    /// n_k − 1.
    pub lof_k: usize,
    pub seed: u64,
}

impl GdrConfig {
    pub fn for_method(method: Method) -> Self {
        GdrConfig {
            method,
            use_pca: true,
            alpha: AlphaWeights::default(),
            max_iter: 6,
            tol: 1e-3,
            guards: StepGuards::default(),
            stabilized: false,
            lof_k: 20,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iter < 1 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        if self.method.is_relativity() && !self.use_pca {
            return Err(Error::InvalidConfig(
                "the relativity methods move points in spherical coordinates and need \
                 the 3D subspace; use_pca cannot be disabled for them"
                    .into(),
            ));
        }
        let tol_valid = self.tol >= 0.0 && self.tol.is_finite();
        if !tol_valid {
            return Err(Error::InvalidConfig(format!(
                "tol must be a non-negative real, got {}",
                self.tol
            )));
        }
        if self.lof_k < 1 {
            return Err(Error::InvalidConfig("lof_k must be at least 1".into()));
        }
        self.guards.validate()
    }
}

/// Variance bookkeeping for one completed iteration.
#[derive(Debug, Clone)]
pub struct IterationReport {
    /// 1-based iteration number.
    pub iteration: usize,
    pub per_class_variance: Vec<f64>,
    /// Sample-weighted mean of the per-class entries.
    pub total_variance: f64,
    pub elapsed: Duration,
}

fn class_variance(points: &Array2<f64>) -> f64 {
    let n_k = points.ncols();
    if n_k == 0 {
        return 0.0;
    }
    let mean = points.mean_axis(ndarray::Axis(1)).expect("n_k >= 1");
    points
        .columns()
        .into_iter()
        .map(|c| (&c - &mean).mapv(|v| v * v).sum())
        .sum::<f64>()
        / n_k as f64
}

/// Mean squared distance of each class's points to the class mean, plus
/// the sample-weighted total.
pub fn intra_class_variance(data: &LabeledDataset) -> (Vec<f64>, f64) {
    let ell = data.class_count();
    let n = data.len();
    let mut per_class = Vec::with_capacity(ell);
    let mut total = 0.0;
    for k in 0..ell {
        let cols: Vec<usize> = (0..n).filter(|&j| data.labels()[j] == k).collect();
        let mut pts = Array2::zeros((data.dim(), cols.len()));
        for (t, &c) in cols.iter().enumerate() {
            pts.column_mut(t).assign(&data.points().column(c));
        }
        let v = class_variance(&pts);
        per_class.push(v);
        total += v * cols.len() as f64 / n as f64;
    }
    (per_class, total)
}

/// Leave-one-out 1-nearest-neighbor label agreement rate. Distance ties
/// pick the lower index.
pub fn knn_loo_accuracy(data: &LabeledDataset) -> f64 {
    let n = data.len();
    if n < 2 {
        return 1.0;
    }
    let pts = data.points();
    let mut correct = 0usize;
    for j in 0..n {
        let mut best = f64::INFINITY;
        let mut best_i = usize::MAX;
        for i in 0..n {
            if i == j {
                continue;
            }
            let d2 = pts
                .column(i)
                .iter()
                .zip(pts.column(j).iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>();
            if d2 < best {
                best = d2;
                best_i = i;
            }
        }
        if data.labels()[best_i] == data.labels()[j] {
            correct += 1;
        }
    }
    correct as f64 / n as f64
}

/// True once the latest two recorded totals differ by less than `tol`
/// relatively.
pub fn has_converged(history: &[IterationReport], tol: f64) -> bool {
    if history.len() < 2 {
        return false;
    }
    let last = history[history.len() - 1].total_variance;
    let prev = history[history.len() - 2].total_variance;
    (last - prev).abs() / prev.max(1e-300) < tol
}

/// Stabilized mode swaps in capped, 1/(n_k−1)-scaled guards per class.
fn effective_guards(config: &GdrConfig, n_k: usize) -> StepGuards {
    if config.method == Method::Newtonian && config.stabilized && n_k >= 2 {
        StepGuards {
            r_min: config.guards.r_min,
            per_pair_cap: true,
            step_scale: 1.0 / (n_k - 1) as f64,
        }
    } else {
        config.guards
    }
}

/// A run in progress, stepped one iteration at a time so callers can
/// snapshot intermediate states (e.g. for per-iteration plots).
pub struct GdrSession {
    config: GdrConfig,
    model: Option<PcaModel>,
    bundles: Vec<ClassBundle>,
    class_columns: Vec<Vec<usize>>,
    labels: Vec<usize>,
    class_names: Vec<String>,
    n: usize,
    reports: Vec<IterationReport>,
}

impl GdrSession {
    /// Projects (when configured), splits by class, and sorts each class
    /// densest first. No movement happens yet.
    pub fn new(data: &LabeledDataset, config: GdrConfig) -> Result<Self> {
        config.validate()?;
        let (model, x) = if config.use_pca {
            let model = fit_pca3(data)?;
            let x = model.project(data.points().view())?;
            (Some(model), x)
        } else {
            (None, data.points().clone())
        };
        let ell = data.class_count();
        let n = data.len();
        let mut class_columns: Vec<Vec<usize>> = vec![Vec::new(); ell];
        for (j, &label) in data.labels().iter().enumerate() {
            class_columns[label].push(j);
        }
        let mut bundles = Vec::with_capacity(ell);
        for (k, cols) in class_columns.iter().enumerate() {
            let mut pts = Array2::zeros((x.nrows(), cols.len()));
            for (t, &c) in cols.iter().enumerate() {
                pts.column_mut(t).assign(&x.column(c));
            }
            let k_eff = config.lof_k.min(cols.len().saturating_sub(1)).max(1);
            bundles.push(sort_by_density(pts.view(), k_eff, k));
        }
        Ok(GdrSession {
            config,
            model,
            bundles,
            class_columns,
            labels: data.labels().to_vec(),
            class_names: data.class_names().to_vec(),
            n,
            reports: Vec::new(),
        })
    }

    pub fn reports(&self) -> &[IterationReport] {
        &self.reports
    }

    /// Runs one more iteration over every class in ascending class order.
    /// Returns false (and does nothing) once max_iter is exhausted or the
    /// variance has converged.
    pub fn step(&mut self) -> Result<bool> {
        if self.reports.len() >= self.config.max_iter
            || has_converged(&self.reports, self.config.tol)
        {
            return Ok(false);
        }
        let start = Instant::now();
        let config = &self.config;
        for bundle in &mut self.bundles {
            match config.method {
                Method::Newtonian => {
                    let guards = effective_guards(config, bundle.len());
                    newtonian_pass_points(bundle.points_mut(), &guards);
                }
                Method::Schwarzschild => relativity_pass_points(
                    bundle.points_mut(),
                    MetricKind::Schwarzschild,
                    &config.alpha,
                    &config.guards,
                )?,
                Method::Minkowski => relativity_pass_points(
                    bundle.points_mut(),
                    MetricKind::Minkowski,
                    &config.alpha,
                    &config.guards,
                )?,
            }
        }
        let mut per_class = vec![0.0; self.bundles.len()];
        let mut total = 0.0;
        for bundle in &self.bundles {
            per_class[bundle.class_id()] = class_variance(bundle.points());
            total += per_class[bundle.class_id()] * bundle.len() as f64 / self.n as f64;
        }
        self.reports.push(IterationReport {
            iteration: self.reports.len() + 1,
            per_class_variance: per_class,
            total_variance: total,
            elapsed: start.elapsed(),
        });
        Ok(true)
    }

    /// Current state assembled back into input order and input space.
    /// Labels and sample order always match the input dataset.
    pub fn snapshot(&self) -> Result<LabeledDataset> {
        let work_dim = self.bundles[0].points().nrows();
        let mut x = Array2::zeros((work_dim, self.n));
        for bundle in &self.bundles {
            let restored = unsort(bundle);
            for (t, &c) in self.class_columns[bundle.class_id()].iter().enumerate() {
                x.column_mut(c).assign(&restored.column(t));
            }
        }
        let y = match &self.model {
            Some(model) => model.reconstruct(x.view())?,
            None => x,
        };
        LabeledDataset::with_class_names(y, self.labels.clone(), self.class_names.clone())
    }

    /// Runs any remaining iterations and returns the transformed dataset
    /// with the per-iteration reports.
    pub fn finish(mut self) -> Result<(LabeledDataset, Vec<IterationReport>)> {
        while self.step()? {}
        let out = self.snapshot()?;
        Ok((out, self.reports))
    }
}

/// Whole transform in one call. Deterministic: identical data and config
/// give bitwise-identical output.
pub fn run_gdr(
    data: &LabeledDataset,
    config: GdrConfig,
) -> Result<(LabeledDataset, Vec<IterationReport>)> {
    GdrSession::new(data, config)?.finish()
}
