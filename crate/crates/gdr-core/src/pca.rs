//! 3D PCA subspace: the space manifold the metric-tensor dynamics run in.
//!
//! The eigensolver is a cyclic Jacobi iteration with a fixed sweep order so
//! identical input always yields the identical basis, down to the bit.

use ndarray::{Array2, ArrayView2, Axis};

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-10;

/// Orthonormal d×3 basis with its (non-negative, descending) eigenvalues.
#[derive(Debug, Clone)]
pub struct PcaModel {
    basis: Array2<f64>,
    eigenvalues: [f64; 3],
}

impl PcaModel {
    /// Basis matrix U, one orthonormal column per component.
    pub fn basis(&self) -> &Array2<f64> {
        &self.basis
    }

    pub fn eigenvalues(&self) -> &[f64; 3] {
        &self.eigenvalues
    }

    /// Input-space dimensionality d.
    pub fn source_dim(&self) -> usize {
        self.basis.nrows()
    }

    /// X = UᵀD. The data is projected exactly as written, without mean
    /// subtraction.
    pub fn project(&self, data: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if data.nrows() != self.source_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.source_dim(),
                got: data.nrows(),
            });
        }
        Ok(self.basis.t().dot(&data))
    }

    /// Y = UX back into the input space.
    pub fn reconstruct(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if x.nrows() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                got: x.nrows(),
            });
        }
        Ok(self.basis.dot(&x))
    }
}

/// Population covariance (1/n)·Σ(x−μ)(x−μ)ᵀ of column points, exactly
/// symmetrized.
pub fn covariance(data: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    let n = data.ncols();
    if n < 2 {
        return Err(Error::TooFewSamples { need: 2, got: n });
    }
    let mean = data.mean_axis(Axis(1)).expect("n >= 2");
    let mut centered = data.to_owned();
    for mut col in centered.columns_mut() {
        col -= &mean;
    }
    let s = centered.dot(&centered.t()) / n as f64;
    Ok((&s + &s.t()) * 0.5)
}

fn off_diagonal_norm(a: &Array2<f64>) -> f64 {
    let m = a.nrows();
    let mut sum = 0.0;
    for p in 0..m {
        for q in 0..m {
            if p != q {
                sum += a[[p, q]] * a[[p, q]];
            }
        }
    }
    sum.sqrt()
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order with orthonormal eigenvector
/// columns. Each column is signed so its largest-magnitude entry is
/// positive. Sweeps run row-major over the superdiagonal.
pub fn eigen_symmetric(s: ArrayView2<'_, f64>) -> Result<(Vec<f64>, Array2<f64>)> {
    let m = s.nrows();
    if m != s.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: s.ncols(),
        });
    }
    let mut max_asym = 0.0f64;
    for p in 0..m {
        for q in (p + 1)..m {
            max_asym = max_asym.max((s[[p, q]] - s[[q, p]]).abs());
        }
    }
    if max_asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric { max_asym });
    }

    let mut a = s.to_owned();
    let mut v: Array2<f64> = Array2::eye(m);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) < OFF_DIAGONAL_TOL {
            converged = true;
            break;
        }
        for p in 0..m.saturating_sub(1) {
            for q in (p + 1)..m {
                let apq = a[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[[q, q]] - a[[p, p]]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;

                let app = a[[p, p]];
                let aqq = a[[q, q]];
                a[[p, p]] = app - t * apq;
                a[[q, q]] = aqq + t * apq;
                a[[p, q]] = 0.0;
                a[[q, p]] = 0.0;
                for k in 0..m {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = c * akp - sn * akq;
                    a[[p, k]] = a[[k, p]];
                    a[[k, q]] = sn * akp + c * akq;
                    a[[q, k]] = a[[k, q]];
                }
                for k in 0..m {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - sn * vkq;
                    v[[k, q]] = sn * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&a) >= OFF_DIAGONAL_TOL {
        return Err(Error::NoConvergence {
            sweeps: MAX_SWEEPS,
            off_norm: off_diagonal_norm(&a),
        });
    }

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| a[[j, j]].partial_cmp(&a[[i, i]]).expect("finite"));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[[i, i]]).collect();
    let mut vectors = Array2::zeros((m, m));
    for (dst, &src) in order.iter().enumerate() {
        let mut peak = 0usize;
        for k in 1..m {
            if v[[k, src]].abs() > v[[peak, src]].abs() {
                peak = k;
            }
        }
        let flip = if v[[peak, src]] < 0.0 { -1.0 } else { 1.0 };
        for k in 0..m {
            vectors[[k, dst]] = flip * v[[k, src]];
        }
    }
    Ok((eigenvalues, vectors))
}

/// Learns the 3D subspace spanned by the covariance's top eigenvectors.
pub fn fit_pca3(data: &LabeledDataset) -> Result<PcaModel> {
    let d = data.dim();
    if d < 3 {
        return Err(Error::ManifoldTooSmall { got: d });
    }
    let s = covariance(data.points().view())?;
    let (values, vectors) = eigen_symmetric(s.view())?;
    let mut eigenvalues = [0.0; 3];
    for (k, slot) in eigenvalues.iter_mut().enumerate() {
        let lambda = values[k];
        if lambda < -1e-10 {
            return Err(Error::InvalidDataset(format!(
                "covariance has negative eigenvalue {lambda:e}"
            )));
        }
        *slot = lambda.max(0.0);
    }
    let basis = vectors.slice(ndarray::s![.., 0..3]).to_owned();
    Ok(PcaModel { basis, eigenvalues })
}
