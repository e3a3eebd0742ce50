//! Scatter-plot rendering of a labeled dataset into a self-contained SVG.
//!
//! The plot is an 800x800 canvas showing a 2-component principal view of the
//! points, one fixed-radius circle per point, colored by class id from a
//! fixed 10-color palette. Rendering is pure string formatting, so the same
//! dataset always yields the same bytes.

use std::fs;
use std::path::Path;

use gdr_core::pca::{covariance, eigen_symmetric};
use gdr_core::LabeledDataset;
use ndarray::Array2;

use crate::CliError;

const CANVAS: f64 = 800.0;
const POINT_RADIUS: f64 = 3.0;
const MARGIN_FRACTION: f64 = 0.05;

/// Class colors, cycled by `class_id % 10`.
const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

/// Projects the points onto the top two principal directions of their
/// covariance. Datasets too small or too flat for that (a single point, a
/// single coordinate) fall back to the raw leading coordinates, zero-padded.
fn planar_view(data: &LabeledDataset) -> Array2<f64> {
    let points = data.points();
    let (d, n) = points.dim();
    if d >= 2 && n >= 2 {
        if let Ok(cov) = covariance(points.view()) {
            if let Ok((_, basis)) = eigen_symmetric(cov.view()) {
                let top2 = basis.slice(ndarray::s![.., 0..2]);
                return top2.t().dot(&points.view());
            }
        }
    }
    let mut view = Array2::zeros((2, n));
    for axis in 0..d.min(2) {
        view.row_mut(axis).assign(&points.row(axis));
    }
    view
}

/// Maps one view axis onto the canvas: data bounds plus a 5% margin, with a
/// fixed half-unit pad when the axis has no extent.
fn axis_scale(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    if range > 0.0 {
        (lo - MARGIN_FRACTION * range, hi + MARGIN_FRACTION * range)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

/// Renders the dataset to SVG text. Byte-deterministic for equal inputs.
pub fn render_svg(data: &LabeledDataset) -> String {
    let view = planar_view(data);
    let xs: Vec<f64> = view.row(0).to_vec();
    let ys: Vec<f64> = view.row(1).to_vec();
    let (x_lo, x_hi) = axis_scale(&xs);
    let (y_lo, y_hi) = axis_scale(&ys);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{CANVAS}\" height=\"{CANVAS}\" viewBox=\"0 0 {CANVAS} {CANVAS}\">\n"
    ));
    out.push_str(&format!(
        "<rect width=\"{CANVAS}\" height=\"{CANVAS}\" fill=\"#ffffff\"/>\n"
    ));
    for (idx, (&x, &y)) in xs.iter().zip(&ys).enumerate() {
        let cx = (x - x_lo) / (x_hi - x_lo) * CANVAS;
        // SVG y grows downward; flip so larger view values plot higher.
        let cy = CANVAS - (y - y_lo) / (y_hi - y_lo) * CANVAS;
        let fill = PALETTE[data.labels()[idx] % PALETTE.len()];
        out.push_str(&format!(
            "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"{POINT_RADIUS}\" fill=\"{fill}\"/>\n"
        ));
    }
    out.push_str("</svg>\n");
    out
}

pub fn emit_svg(data: &LabeledDataset, path: &Path) -> Result<(), CliError> {
    fs::write(path, render_svg(data))
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}
