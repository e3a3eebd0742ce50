//! Pairwise attraction pass: every point accumulates unit pulls toward its
//! classmates, then moves. Points are processed last to first and updates
//! land in place, so earlier-moved points pull later ones from their new
//! positions.

use ndarray::{Array1, Array2, ArrayView1};

use crate::density::ClassBundle;
use crate::error::{Error, Result};

/// Numerical guards around the raw 1/r dynamics.
///
/// Defaults leave the dynamics untouched: no cap, unit scale. The r_min
/// skip is always on because 1/r diverges once points coincide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepGuards {
    /// Pairs closer than this do not interact.
    pub r_min: f64,
    /// Rescale any per-pair move longer than the pair distance down to it,
    /// so a single pair can never fling a point past its attractor.
    pub per_pair_cap: bool,
    /// Multiplier on each point's accumulated move.
    pub step_scale: f64,
}

impl Default for StepGuards {
    fn default() -> Self {
        StepGuards {
            r_min: 1e-6,
            per_pair_cap: false,
            step_scale: 1.0,
        }
    }
}

impl StepGuards {
    pub fn validate(&self) -> Result<()> {
        let r_min_valid = self.r_min > 0.0 && self.r_min.is_finite();
        if !r_min_valid {
            return Err(Error::InvalidConfig(format!(
                "r_min must be a positive real, got {}",
                self.r_min
            )));
        }
        let step_scale_valid = self.step_scale > 0.0 && self.step_scale.is_finite();
        if !step_scale_valid {
            return Err(Error::InvalidConfig(format!(
                "step_scale must be a positive real, got {}",
                self.step_scale
            )));
        }
        Ok(())
    }
}

/// Euclidean distance between two equal-length points.
pub fn pair_distance(x_i: ArrayView1<'_, f64>, x_j: ArrayView1<'_, f64>) -> Result<f64> {
    if x_i.len() != x_j.len() {
        return Err(Error::DimensionMismatch {
            expected: x_i.len(),
            got: x_j.len(),
        });
    }
    Ok(x_i
        .iter()
        .zip(x_j.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

/// Movement of x_j toward x_i: (1/r)(x_i − x_j), which always has unit
/// norm. Closer pairs are not pulled harder, they are pulled the same
/// amount in fewer remaining steps. Below r_min the pair is inert; with the
/// cap on, a move longer than the gap is shortened to exactly close it.
pub fn pair_move(
    x_i: ArrayView1<'_, f64>,
    x_j: ArrayView1<'_, f64>,
    guards: &StepGuards,
) -> Result<Array1<f64>> {
    let r = pair_distance(x_i, x_j)?;
    if r < guards.r_min {
        return Ok(Array1::zeros(x_j.len()));
    }
    let mut v = Array1::from_shape_fn(x_j.len(), |d| (x_i[d] - x_j[d]) / r);
    if guards.per_pair_cap {
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > r {
            v.mapv_inplace(|c| c * r / norm);
        }
    }
    Ok(v)
}

pub(crate) fn newtonian_pass_points(points: &mut Array2<f64>, guards: &StepGuards) {
    let n = points.ncols();
    let dim = points.nrows();
    for j in (0..n).rev() {
        let mut delta = Array1::zeros(dim);
        for i in 0..n {
            if i == j {
                continue;
            }
            let v = pair_move(points.column(i), points.column(j), guards)
                .expect("columns share one dimensionality");
            if !guards.per_pair_cap {
                let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                debug_assert!(
                    norm == 0.0 || (norm - 1.0).abs() < 1e-9,
                    "uncapped pair move must be unit length, got {norm}"
                );
            }
            delta += &v;
        }
        let mut col = points.column_mut(j);
        col.scaled_add(guards.step_scale, &delta);
    }
}

/// One attraction sweep over a class, densest point processed last to
/// first as attractee while attractors are taken first to last.
pub fn newtonian_pass(mut bundle: ClassBundle, guards: &StepGuards) -> ClassBundle {
    newtonian_pass_points(bundle.points_mut(), guards);
    bundle
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::sort_by_density;
    use crate::rng::SplitMix64;
    use ndarray::array;

    #[test]
    fn distance_of_three_four_five() {
        let a = array![0.0, 0.0, 0.0];
        let b = array![3.0, 4.0, 0.0];
        assert_eq!(pair_distance(a.view(), b.view()).unwrap(), 5.0);
        assert_eq!(pair_distance(a.view(), a.view()).unwrap(), 0.0);
        assert!(pair_distance(a.view(), array![1.0].view()).is_err());
    }

    #[test]
    fn distance_matches_brute_force() {
        let mut rng = SplitMix64::new(8);
        let a = ndarray::Array1::from_shape_fn(9, |_| rng.next_unit() * 10.0 - 5.0);
        let b = ndarray::Array1::from_shape_fn(9, |_| rng.next_unit() * 10.0 - 5.0);
        let mut acc = 0.0;
        for d in 0..9 {
            acc += (a[d] - b[d]) * (a[d] - b[d]);
        }
        let got = pair_distance(a.view(), b.view()).unwrap();
        assert!((got - acc.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn move_is_unit_length() {
        let x_i = array![0.0, 0.0, 0.0];
        let x_j = array![2.0, 0.0, 0.0];
        let v = pair_move(x_i.view(), x_j.view(), &StepGuards::default()).unwrap();
        assert_eq!(v, array![-1.0, 0.0, 0.0]);
    }

    #[test]
    fn cap_shortens_overshooting_move() {
        let x_i = array![0.0, 0.0, 0.0];
        let x_j = array![0.5, 0.0, 0.0];
        let guards = StepGuards {
            per_pair_cap: true,
            ..StepGuards::default()
        };
        let v = pair_move(x_i.view(), x_j.view(), &guards).unwrap();
        assert_eq!(v, array![-0.5, 0.0, 0.0]);
        // without the cap the unit move would fly past the attractor
        let raw = pair_move(x_i.view(), x_j.view(), &StepGuards::default()).unwrap();
        assert_eq!(raw, array![-1.0, 0.0, 0.0]);
    }

    #[test]
    fn coincident_points_do_not_interact() {
        let x = array![1.0, 2.0, 3.0];
        let v = pair_move(x.view(), x.view(), &StepGuards::default()).unwrap();
        assert!(v.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn two_point_pass_collapses_to_midpoint() {
        // the trailing point jumps a unit to the midpoint, then the leading
        // one jumps a unit onto it
        let pts = array![[0.0, 2.0], [0.0, 0.0], [0.0, 0.0]];
        let bundle = sort_by_density(pts.view(), 1, 0);
        let out = newtonian_pass(bundle, &StepGuards::default());
        assert_eq!(out.points().column(0).to_vec(), vec![1.0, 0.0, 0.0]);
        assert_eq!(out.points().column(1).to_vec(), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn singleton_class_is_fixed() {
        let pts = array![[4.0], [5.0]];
        let bundle = sort_by_density(pts.view(), 1, 0);
        let out = newtonian_pass(bundle, &StepGuards::default());
        assert_eq!(out.points(), &pts);
    }

    #[test]
    fn pass_is_deterministic() {
        let mut rng = SplitMix64::new(15);
        let pts = ndarray::Array2::from_shape_fn((3, 12), |_| rng.next_unit() * 6.0);
        let guards = StepGuards::default();
        let a = newtonian_pass(sort_by_density(pts.view(), 5, 0), &guards);
        let b = newtonian_pass(sort_by_density(pts.view(), 5, 0), &guards);
        for (x, y) in a.points().iter().zip(b.points().iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn stabilized_pass_shrinks_spread_monotonically() {
        let mut rng = SplitMix64::new(99);
        let mut pts = ndarray::Array2::from_shape_fn((3, 20), |_| rng.next_normal());
        let guards = StepGuards {
            per_pair_cap: true,
            step_scale: 1.0 / 19.0,
            ..StepGuards::default()
        };
        let spread = |p: &ndarray::Array2<f64>| {
            let mean = p.mean_axis(ndarray::Axis(1)).unwrap();
            p.columns()
                .into_iter()
                .map(|c| (&c - &mean).mapv(|v| v * v).sum())
                .sum::<f64>()
                / p.ncols() as f64
        };
        let mut last = spread(&pts);
        for _ in 0..6 {
            newtonian_pass_points(&mut pts, &guards);
            let now = spread(&pts);
            assert!(now <= last, "spread grew: {last} -> {now}");
            last = now;
        }
    }

    #[test]
    fn guard_validation() {
        assert!(StepGuards::default().validate().is_ok());
        let bad = StepGuards {
            r_min: 0.0,
            ..StepGuards::default()
        };
        assert!(bad.validate().is_err());
        let bad = StepGuards {
            step_scale: -1.0,
            ..StepGuards::default()
        };
        assert!(bad.validate().is_err());
    }
}
