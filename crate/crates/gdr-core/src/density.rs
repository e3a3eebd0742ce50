//! Local-outlier-factor density scoring and the densest-first column order
//! each class is processed in.
//!
//! Low LOF means dense surroundings. Scores near 1 mean locally uniform
//! density, larger means sparser. Classes are sorted ascending so the pass
//! loops see the densest points first.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

/// One class's columns together with the permutation that sorted them,
/// kept so the engine can restore the original order afterwards.
///
/// `permutation[s]` is the original column index now sitting at sorted
/// position `s`.
#[derive(Debug, Clone)]
pub struct ClassBundle {
    points: Array2<f64>,
    permutation: Vec<usize>,
    class_id: usize,
}

impl ClassBundle {
    pub fn points(&self) -> &Array2<f64> {
        &self.points
    }

    pub fn points_mut(&mut self) -> &mut Array2<f64> {
        &mut self.points
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn class_id(&self) -> usize {
        self.class_id
    }

    /// Number of points in the class.
    pub fn len(&self) -> usize {
        self.permutation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutation.is_empty()
    }
}

fn column_distance(points: ArrayView2<'_, f64>, a: usize, b: usize) -> f64 {
    let ca = points.column(a);
    let cb = points.column(b);
    ca.iter()
        .zip(cb.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn pairwise_distances(points: ArrayView2<'_, f64>) -> Array2<f64> {
    let n = points.ncols();
    let mut d = Array2::zeros((n, n));
    for a in 0..n {
        for b in (a + 1)..n {
            let dist = column_distance(points, a, b);
            d[[a, b]] = dist;
            d[[b, a]] = dist;
        }
    }
    d
}

fn neighborhood_from_distances(dist: &Array2<f64>, j: usize, k: usize) -> (f64, Vec<usize>) {
    let n = dist.nrows();
    let mut order: Vec<usize> = (0..n).filter(|&i| i != j).collect();
    order.sort_by(|&a, &b| {
        dist[[j, a]]
            .partial_cmp(&dist[[j, b]])
            .expect("finite distances")
            .then(a.cmp(&b))
    });
    let k_distance = dist[[j, order[k - 1]]];
    let neighbors: Vec<usize> = (0..n)
        .filter(|&i| i != j && dist[[j, i]] <= k_distance)
        .collect();
    (k_distance, neighbors)
}

/// Distance to the k-th nearest other point, plus every point at most that
/// far away. Ties at the boundary are all included, so the neighborhood can
/// hold more than k members. The k-th selection breaks distance ties by
/// lower index.
pub fn k_neighborhood(
    points: ArrayView2<'_, f64>,
    j: usize,
    k: usize,
) -> Result<(f64, Vec<usize>)> {
    let n = points.ncols();
    if k == 0 {
        return Err(Error::InvalidConfig(
            "neighborhood size k must be at least 1".into(),
        ));
    }
    if k >= n {
        return Err(Error::NeighborhoodTooLarge { k, points: n });
    }
    let dist = pairwise_distances(points);
    Ok(neighborhood_from_distances(&dist, j, k))
}

/// max(k-distance(o), ‖x_p − x_o‖): how far p effectively is from o once
/// o's own neighborhood radius is accounted for.
pub fn reachability_distance(
    points: ArrayView2<'_, f64>,
    p: usize,
    o: usize,
    k: usize,
) -> Result<f64> {
    if p == o {
        return Err(Error::SamePoint { index: p });
    }
    let (k_distance, _) = k_neighborhood(points, o, k)?;
    Ok(k_distance.max(column_distance(points, p, o)))
}

/// Mean reachability distance of each point to its neighborhood. 0 marks a
/// point whose whole neighborhood coincides with it.
fn mean_reachability(dist: &Array2<f64>, k: usize) -> (Vec<f64>, Vec<Vec<usize>>) {
    let n = dist.nrows();
    let mut k_distances = Vec::with_capacity(n);
    let mut neighborhoods = Vec::with_capacity(n);
    for j in 0..n {
        let (kd, nb) = neighborhood_from_distances(dist, j, k);
        k_distances.push(kd);
        neighborhoods.push(nb);
    }
    let mut mr = vec![0.0; n];
    for p in 0..n {
        let nb = &neighborhoods[p];
        let total: f64 = nb.iter().map(|&o| k_distances[o].max(dist[[p, o]])).sum();
        mr[p] = total / nb.len() as f64;
    }
    (mr, neighborhoods)
}

/// LOF score per column. Duplicated points have zero mean reachability, so
/// their local density is infinite; they are assigned the minimum finite
/// score minus 1 so they sort as the densest points.
pub fn lof_scores(points: ArrayView2<'_, f64>, k: usize) -> Result<Vec<f64>> {
    let n = points.ncols();
    if k == 0 {
        return Err(Error::InvalidConfig(
            "neighborhood size k must be at least 1".into(),
        ));
    }
    if n <= k {
        return Err(Error::NeighborhoodTooLarge { k, points: n });
    }
    let dist = pairwise_distances(points);
    let (mr, neighborhoods) = mean_reachability(&dist, k);

    // LOF(p) = mean over neighbors o of lrd(o)/lrd(p) = mean of mr(p)/mr(o)
    let mut scores = vec![0.0; n];
    let mut min_finite = f64::INFINITY;
    for p in 0..n {
        if mr[p] == 0.0 {
            scores[p] = f64::NAN; // placeholder, resolved below
            continue;
        }
        let nb = &neighborhoods[p];
        let total: f64 = nb
            .iter()
            .map(|&o| {
                if mr[o] == 0.0 {
                    f64::INFINITY
                } else {
                    mr[p] / mr[o]
                }
            })
            .sum();
        scores[p] = total / nb.len() as f64;
        if scores[p].is_finite() && scores[p] < min_finite {
            min_finite = scores[p];
        }
    }
    let densest = if min_finite.is_finite() {
        min_finite - 1.0
    } else {
        0.0
    };
    for (p, score) in scores.iter_mut().enumerate() {
        if mr[p] == 0.0 {
            *score = densest;
        }
    }
    Ok(scores)
}

/// Columns reordered densest first. LOF drives the order when the class is
/// big enough for it (n ≥ k+1); smaller classes fall back to ascending mean
/// distance to the rest of the class. Ties keep ascending original index.
pub fn sort_by_density(points: ArrayView2<'_, f64>, k: usize, class_id: usize) -> ClassBundle {
    let n = points.ncols();
    let keys: Vec<f64> = if n <= 1 {
        vec![0.0; n]
    } else if n > k && k >= 1 {
        lof_scores(points, k).expect("n > k >= 1 checked")
    } else {
        let dist = pairwise_distances(points);
        (0..n)
            .map(|p| {
                let total: f64 = (0..n).filter(|&o| o != p).map(|o| dist[[p, o]]).sum();
                total / (n - 1) as f64
            })
            .collect()
    };
    let mut permutation: Vec<usize> = (0..n).collect();
    permutation.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]).then(a.cmp(&b)));
    let mut sorted = Array2::zeros(points.dim());
    for (s, &orig) in permutation.iter().enumerate() {
        sorted.column_mut(s).assign(&points.column(orig));
    }
    ClassBundle {
        points: sorted,
        permutation,
        class_id,
    }
}

/// Columns back in their original order via the inverse permutation.
pub fn unsort(bundle: &ClassBundle) -> Array2<f64> {
    let mut restored = Array2::zeros(bundle.points.dim());
    for (s, &orig) in bundle.permutation.iter().enumerate() {
        restored.column_mut(orig).assign(&bundle.points.column(s));
    }
    restored
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use ndarray::array;

    fn random_points(dim: usize, n: usize, rng: &mut SplitMix64) -> Array2<f64> {
        Array2::from_shape_fn((dim, n), |_| 4.0 * rng.next_unit() - 2.0)
    }

    /// From-the-definition scores via explicit local reachability densities.
    fn lof_oracle(points: ArrayView2<'_, f64>, k: usize) -> Vec<f64> {
        let n = points.ncols();
        let d = |a: usize, b: usize| column_distance(points, a, b);
        let mut kdist = vec![0.0; n];
        let mut hood: Vec<Vec<usize>> = vec![Vec::new(); n];
        for j in 0..n {
            let mut others: Vec<usize> = (0..n).filter(|&i| i != j).collect();
            others.sort_by(|&a, &b| d(j, a).partial_cmp(&d(j, b)).unwrap().then(a.cmp(&b)));
            kdist[j] = d(j, others[k - 1]);
            hood[j] = others
                .into_iter()
                .filter(|&i| d(j, i) <= kdist[j])
                .collect();
        }
        let lrd: Vec<f64> = (0..n)
            .map(|p| {
                let m: f64 = hood[p].iter().map(|&o| kdist[o].max(d(p, o))).sum::<f64>()
                    / hood[p].len() as f64;
                1.0 / m
            })
            .collect();
        (0..n)
            .map(|p| hood[p].iter().map(|&o| lrd[o]).sum::<f64>() / hood[p].len() as f64 / lrd[p])
            .collect()
    }

    #[test]
    fn neighborhood_on_a_line() {
        let pts = array![[0.0, 1.0, 3.0, 7.0]];
        let (kd, nb) = k_neighborhood(pts.view(), 0, 2).unwrap();
        assert_eq!(kd, 3.0);
        assert_eq!(nb, vec![1, 2]);
    }

    #[test]
    fn neighborhood_includes_distance_ties() {
        let pts = array![[0.0, 1.0, 0.0, 1.0], [0.0, 0.0, 1.0, 1.0]];
        for j in 0..4 {
            let (kd, nb) = k_neighborhood(pts.view(), j, 2).unwrap();
            assert_eq!(kd, 1.0);
            assert_eq!(nb.len(), 2, "two adjacent corners at the side length");
            assert!(nb.iter().all(|&i| i != j));
        }
        // pull one corner onto the diagonal so three points tie at distance 1
        let pts = array![[0.0, 1.0, 0.0, 0.6], [0.0, 0.0, 1.0, 0.8]];
        let (kd, nb) = k_neighborhood(pts.view(), 0, 2).unwrap();
        assert_eq!(kd, 1.0);
        assert_eq!(nb, vec![1, 2, 3]);
    }

    #[test]
    fn neighborhood_rejects_oversized_k() {
        let pts = array![[0.0, 1.0, 2.0]];
        assert!(matches!(
            k_neighborhood(pts.view(), 0, 3),
            Err(Error::NeighborhoodTooLarge { k: 3, points: 3 })
        ));
        assert!(k_neighborhood(pts.view(), 0, 0).is_err());
    }

    #[test]
    fn neighborhood_matches_brute_force() {
        let mut rng = SplitMix64::new(11);
        let pts = random_points(3, 40, &mut rng);
        for k in [2usize, 5, 10] {
            for j in 0..40 {
                let (kd, nb) = k_neighborhood(pts.view(), j, k).unwrap();
                let mut pairs: Vec<(f64, usize)> = (0..40)
                    .filter(|&i| i != j)
                    .map(|i| (column_distance(pts.view(), j, i), i))
                    .collect();
                pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
                assert_eq!(kd, pairs[k - 1].0);
                let want: Vec<usize> = (0..40)
                    .filter(|&i| i != j && column_distance(pts.view(), j, i) <= kd)
                    .collect();
                assert_eq!(nb, want);
            }
        }
    }

    #[test]
    fn reachability_on_a_line() {
        let pts = array![[0.0, 1.0, 3.0, 7.0]];
        // k-distance of point 1 is 2, which dominates d(0,1)=1
        assert_eq!(reachability_distance(pts.view(), 0, 1, 2).unwrap(), 2.0);
        // far pairs are dominated by the plain distance
        assert_eq!(reachability_distance(pts.view(), 3, 1, 2).unwrap(), 6.0);
        // inside the neighborhood the k-distance wins
        assert_eq!(reachability_distance(pts.view(), 2, 1, 2).unwrap(), 2.0);
        assert!(matches!(
            reachability_distance(pts.view(), 1, 1, 2),
            Err(Error::SamePoint { index: 1 })
        ));
    }

    #[test]
    fn uniform_grid_interior_scores_one() {
        let pts = Array2::from_shape_fn((1, 21), |(_, j)| j as f64);
        let scores = lof_scores(pts.view(), 2).unwrap();
        for (j, &score) in scores.iter().enumerate().take(16).skip(5) {
            assert!((score - 1.0).abs() < 1e-9, "score {score} at {j}");
        }
    }

    #[test]
    fn outlier_scores_highest() {
        let mut rng = SplitMix64::new(3);
        let mut pts = random_points(3, 20, &mut rng);
        pts.column_mut(7).fill(50.0);
        let scores = lof_scores(pts.view(), 5).unwrap();
        for (j, &s) in scores.iter().enumerate() {
            if j != 7 {
                assert!(scores[7] > s, "outlier must be the strict maximum");
            }
        }
    }

    #[test]
    fn scores_match_independent_oracle() {
        let mut rng = SplitMix64::new(19);
        let pts = random_points(3, 50, &mut rng);
        let got = lof_scores(pts.view(), 10).unwrap();
        let want = lof_oracle(pts.view(), 10);
        for (g, w) in got.iter().zip(want.iter()) {
            assert!((g - w).abs() < 1e-9);
        }
    }

    #[test]
    fn duplicates_are_densest_and_scores_total_order() {
        let pts = array![
            [0.0, 0.0, 0.0, 5.0, 5.1, 9.0],
            [0.0, 0.0, 0.0, 5.0, 5.1, 9.0]
        ];
        let scores = lof_scores(pts.view(), 2).unwrap();
        assert!(scores.iter().all(|s| !s.is_nan()));
        let dup = scores[0];
        assert_eq!(scores[1], dup);
        assert_eq!(scores[2], dup);
        let min_rest = scores[3..].iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(dup < min_rest, "duplicates sort before everything finite");
    }

    #[test]
    fn identical_points_keep_original_order() {
        let pts = Array2::from_elem((2, 5), 3.25);
        let bundle = sort_by_density(pts.view(), 2, 0);
        assert_eq!(bundle.permutation(), &[0, 1, 2, 3, 4]);
        assert_eq!(bundle.points(), &pts);
    }

    #[test]
    fn outlier_sorts_last() {
        let mut rng = SplitMix64::new(23);
        let mut pts = random_points(3, 15, &mut rng);
        pts.column_mut(4).fill(80.0);
        let bundle = sort_by_density(pts.view(), 5, 0);
        assert_eq!(*bundle.permutation().last().unwrap(), 4);
    }

    #[test]
    fn sort_matches_oracle_argsort() {
        let mut rng = SplitMix64::new(29);
        let pts = random_points(3, 30, &mut rng);
        let bundle = sort_by_density(pts.view(), 10, 0);
        let scores = lof_oracle(pts.view(), 10);
        let mut want: Vec<usize> = (0..30).collect();
        want.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap().then(a.cmp(&b)));
        assert_eq!(bundle.permutation(), want.as_slice());
    }

    #[test]
    fn tiny_class_sorts_by_mean_distance() {
        // 3 points, k=10: LOF undefined, order by mean distance to the rest
        let pts = array![[0.0, 10.0, 1.0]];
        let bundle = sort_by_density(pts.view(), 10, 0);
        // mean distances: p0 (10+1)/2=5.5, p1 (10+9)/2=9.5, p2 (1+9)/2=5
        assert_eq!(bundle.permutation(), &[2, 0, 1]);
    }

    #[test]
    fn singleton_is_identity() {
        let pts = array![[1.5], [2.5]];
        let bundle = sort_by_density(pts.view(), 20, 3);
        assert_eq!(bundle.permutation(), &[0]);
        assert_eq!(bundle.class_id(), 3);
        assert_eq!(unsort(&bundle), pts);
    }

    #[test]
    fn unsort_restores_column_order() {
        let mut rng = SplitMix64::new(41);
        let pts = random_points(4, 20, &mut rng);
        let bundle = sort_by_density(pts.view(), 5, 0);
        let perm = bundle.permutation();
        let mut seen = [false; 20];
        for &p in perm {
            assert!(!seen[p], "permutation must be a bijection");
            seen[p] = true;
        }
        assert_eq!(unsort(&bundle), pts);
    }

    #[test]
    fn scores_are_scale_invariant() {
        let mut rng = SplitMix64::new(53);
        let pts = random_points(3, 25, &mut rng);
        let base = lof_scores(pts.view(), 6).unwrap();
        for c in [0.001, 0.5, 3.0, 1e6] {
            let scaled = pts.mapv(|v| c * v);
            let got = lof_scores(scaled.view(), 6).unwrap();
            for (g, b) in got.iter().zip(base.iter()) {
                assert!((g - b).abs() < 1e-9, "scale {c}");
            }
        }
    }
}
