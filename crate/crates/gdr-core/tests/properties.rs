//! Randomized invariants: whatever the inputs, these relationships hold.

use gdr_core::density::{lof_scores, sort_by_density, unsort};
use gdr_core::newtonian::{pair_move, StepGuards};
use gdr_core::pca::fit_pca3;
use gdr_core::relativity::{cartesian_to_spherical, spherical_to_cartesian};
use gdr_core::{intra_class_variance, knn_loo_accuracy, LabeledDataset};
use ndarray::Array2;
use proptest::prelude::*;

fn finite_coord() -> impl Strategy<Value = f64> {
    -50.0..50.0f64
}

fn points(dim: usize, min_n: usize, max_n: usize) -> impl Strategy<Value = Array2<f64>> {
    (min_n..=max_n).prop_flat_map(move |n| {
        proptest::collection::vec(finite_coord(), dim * n)
            .prop_map(move |v| Array2::from_shape_vec((dim, n), v).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lof_is_scale_invariant(pts in points(3, 8, 30), c in 1e-3..1e3f64) {
        let base = lof_scores(pts.view(), 4).unwrap();
        let scaled = pts.mapv(|v| c * v);
        let got = lof_scores(scaled.view(), 4).unwrap();
        for (g, b) in got.iter().zip(base.iter()) {
            if b.is_finite() {
                prop_assert!((g - b).abs() < 1e-9 * (1.0 + b.abs()));
            } else {
                prop_assert_eq!(g.is_finite(), b.is_finite());
            }
        }
    }

    #[test]
    fn spherical_round_trip(x in finite_coord(), y in finite_coord(), z in finite_coord()) {
        prop_assume!(x != 0.0 || y != 0.0 || z != 0.0);
        let s = cartesian_to_spherical([x, y, z]);
        prop_assert!(s.r >= 0.0);
        prop_assert!((0.0..=std::f64::consts::PI).contains(&s.theta));
        prop_assert!((0.0..2.0 * std::f64::consts::PI).contains(&s.phi));
        let back = spherical_to_cartesian(s);
        for (a, b) in back.iter().zip([x, y, z].iter()) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn sorting_round_trips_columns(pts in points(4, 1, 25), k in 1usize..8) {
        let bundle = sort_by_density(pts.view(), k, 0);
        let mut seen = vec![false; bundle.len()];
        for &p in bundle.permutation() {
            prop_assert!(!seen[p]);
            seen[p] = true;
        }
        let restored = unsort(&bundle);
        prop_assert_eq!(restored, pts);
    }

    #[test]
    fn projection_is_idempotent(pts in points(5, 4, 20)) {
        let n = pts.ncols();
        let data = LabeledDataset::new(pts, vec![0; n]).unwrap();
        let model = fit_pca3(&data).unwrap();
        let x = model.project(data.points().view()).unwrap();
        let again = model
            .project(model.reconstruct(x.view()).unwrap().view())
            .unwrap();
        for (a, b) in again.iter().zip(x.iter()) {
            prop_assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn pair_moves_are_unit_or_zero(
        a in proptest::array::uniform3(finite_coord()),
        b in proptest::array::uniform3(finite_coord()),
    ) {
        let x_i = ndarray::arr1(&a);
        let x_j = ndarray::arr1(&b);
        let v = pair_move(x_i.view(), x_j.view(), &StepGuards::default()).unwrap();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        prop_assert!(norm == 0.0 || (norm - 1.0).abs() < 1e-9);
    }

    #[test]
    fn evaluation_metrics_are_bounded(pts in points(3, 4, 24)) {
        let n = pts.ncols();
        let labels: Vec<usize> = (0..n).map(|j| j % 2).collect();
        let data = LabeledDataset::new(pts, labels).unwrap();
        let (per_class, total) = intra_class_variance(&data);
        prop_assert!(per_class.iter().all(|&v| v >= 0.0));
        prop_assert!(total >= 0.0);
        let acc = knn_loo_accuracy(&data);
        prop_assert!((0.0..=1.0).contains(&acc));
    }
}

#[test]
fn csv_round_trip_is_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = gdr_core::rng::SplitMix64::new(99);
    for trial in 0..10 {
        let n = 3 + (trial % 5);
        let pts = Array2::from_shape_fn((4, n), |_| (rng.next_unit() - 0.5) * 1e3);
        let labels: Vec<usize> = (0..n).map(|j| j % 2).collect();
        let data = LabeledDataset::new(pts, labels).unwrap();
        let path = dir.path().join(format!("t{trial}.csv"));
        gdr_core::write_csv(&data, &path).unwrap();
        let back = gdr_core::load_csv(&path, "label").unwrap();
        assert_eq!(back.labels(), data.labels());
        for (a, b) in back.points().iter().zip(data.points().iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
