//! Labeled datasets: the d×n column-point matrix every stage transforms,
//! plus CSV ingestion/emission and a deterministic blob generator.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// A real matrix of column points with one integer class label per column.
///
/// Labels are densified to `0..class_count` in first-appearance order; the
/// original label strings are kept only so output files can restore them.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    points: Array2<f64>,
    labels: Vec<usize>,
    class_names: Vec<String>,
}

impl LabeledDataset {
    /// Builds a dataset, naming class `k` by its dense id `k`.
    pub fn new(points: Array2<f64>, labels: Vec<usize>) -> Result<Self> {
        let count = labels.iter().copied().max().map_or(0, |m| m + 1);
        let names = (0..count).map(|k| k.to_string()).collect();
        Self::with_class_names(points, labels, names)
    }

    /// Builds a dataset keeping the original label strings for output.
    pub fn with_class_names(
        points: Array2<f64>,
        labels: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if points.nrows() == 0 || points.ncols() == 0 {
            return Err(Error::EmptyDataset);
        }
        if points.ncols() != labels.len() {
            return Err(Error::InvalidDataset(format!(
                "{} point columns but {} labels",
                points.ncols(),
                labels.len()
            )));
        }
        let count = class_names.len();
        if count == 0 {
            return Err(Error::InvalidDataset("no classes".into()));
        }
        let mut seen = vec![false; count];
        for &l in &labels {
            if l >= count {
                return Err(Error::InvalidDataset(format!(
                    "label {l} out of range for {count} classes"
                )));
            }
            seen[l] = true;
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidDataset(format!("class {k} has no samples")));
        }
        if let Some(bad) = points.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!("non-finite entry {bad}")));
        }
        Ok(Self {
            points,
            labels,
            class_names,
        })
    }

    pub fn points(&self) -> &Array2<f64> {
        &self.points
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    /// Feature dimensionality d.
    pub fn dim(&self) -> usize {
        self.points.nrows()
    }

    /// Sample count n.
    pub fn len(&self) -> usize {
        self.points.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.points.ncols() == 0
    }

    /// Same labels and names, new point matrix of identical shape.
    pub fn with_points(&self, points: Array2<f64>) -> Result<Self> {
        if points.dim() != self.points.dim() {
            return Err(Error::InvalidDataset(format!(
                "replacement points are {:?}, dataset is {:?}",
                points.dim(),
                self.points.dim()
            )));
        }
        Self::with_class_names(points, self.labels.clone(), self.class_names.clone())
    }
}

/// Renders a float with 17 significant digits, enough for an exact f64
/// round trip.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Loads a CSV with a header row; `label_column` holds the class, every
/// other column a feature. Samples become matrix columns.
pub fn load_csv(path: impl AsRef<Path>, label_column: &str) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::MissingLabelColumn {
            column: label_column.to_string(),
            path: path.display().to_string(),
        })?;
    let feature_cols: Vec<usize> = (0..headers.len()).filter(|&i| i != label_idx).collect();
    let d = feature_cols.len();

    let mut values: Vec<f64> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    let mut class_names: Vec<String> = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        for &c in &feature_cols {
            let cell = record.get(c).unwrap_or("");
            let v: f64 = cell.parse().map_err(|_| Error::BadCell {
                row,
                column: headers[c].to_string(),
                value: cell.to_string(),
            })?;
            if !v.is_finite() {
                return Err(Error::BadCell {
                    row,
                    column: headers[c].to_string(),
                    value: cell.to_string(),
                });
            }
            values.push(v);
        }
        let raw = record.get(label_idx).unwrap_or("").to_string();
        let id = match class_names.iter().position(|n| *n == raw) {
            Some(id) => id,
            None => {
                class_names.push(raw);
                class_names.len() - 1
            }
        };
        labels.push(id);
    }
    let n = labels.len();
    if n == 0 || d == 0 {
        return Err(Error::EmptyDataset);
    }
    // values are row-major per sample; transpose into d×n columns
    let mut points = Array2::zeros((d, n));
    for j in 0..n {
        for k in 0..d {
            points[[k, j]] = values[j * d + k];
        }
    }
    LabeledDataset::with_class_names(points, labels, class_names)
}

/// Writes `f0..f{d-1},label` rows, floats with 17 significant digits,
/// original labels restored.
pub fn write_csv(data: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path.as_ref())?;
    let mut out = BufWriter::new(file);
    out.write_all(csv_string(data).as_bytes())?;
    out.flush()?;
    Ok(())
}

/// The exact CSV text `write_csv` emits.
pub fn csv_string(data: &LabeledDataset) -> String {
    let d = data.dim();
    let mut s = String::new();
    for k in 0..d {
        let _ = write!(s, "f{k},");
    }
    s.push_str("label\n");
    for j in 0..data.len() {
        for k in 0..d {
            let _ = write!(s, "{},", format_f64(data.points()[[k, j]]));
        }
        s.push_str(&data.class_names()[data.labels()[j]]);
        s.push('\n');
    }
    s
}

/// Deterministic Gaussian blobs: class centers uniform in
/// `[-center_scale, center_scale]^dim`, points `center + spread·z`.
/// Pure in its arguments: identical calls give bitwise-identical data.
pub fn make_blobs(
    n_classes: usize,
    per_class: usize,
    dim: usize,
    spread: f64,
    center_scale: f64,
    seed: u64,
) -> Result<LabeledDataset> {
    if n_classes == 0 || per_class == 0 || dim == 0 {
        return Err(Error::InvalidConfig(
            "classes, per-class count and dim must be positive".into(),
        ));
    }
    // NaN fails both comparisons and is rejected with the rest.
    let spread_valid = spread >= 0.0;
    let center_scale_valid = center_scale > 0.0;
    if !spread_valid || !center_scale_valid {
        return Err(Error::InvalidConfig(
            "spread must be >= 0 and center scale > 0".into(),
        ));
    }
    let mut rng = SplitMix64::new(seed);
    let mut centers = Array2::zeros((dim, n_classes));
    for c in 0..n_classes {
        for k in 0..dim {
            centers[[k, c]] = (2.0 * rng.next_unit() - 1.0) * center_scale;
        }
    }
    let n = n_classes * per_class;
    let mut points = Array2::zeros((dim, n));
    let mut labels = Vec::with_capacity(n);
    let mut col = 0;
    for c in 0..n_classes {
        for _ in 0..per_class {
            for k in 0..dim {
                points[[k, col]] = centers[[k, c]] + spread * rng.next_normal();
            }
            labels.push(c);
            col += 1;
        }
    }
    LabeledDataset::new(points, labels)
}
