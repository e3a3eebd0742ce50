//! Metric-weighted attraction pass. Each pair moves immediately: the
//! curved-space variant steps in spherical coordinates centered on the
//! attractor, the flat-space variant subtracts fixed per-axis amounts.

use crate::density::ClassBundle;
use crate::error::{Error, Result};
use crate::newtonian::StepGuards;

/// Clamp margin keeping the radial metric entry finite at the horizon and
/// the azimuthal entry positive at the poles.
pub const METRIC_EPS: f64 = 1e-3;

/// Spherical coordinates: radius, polar angle from +z in [0, π], azimuth
/// in [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPoint {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

/// Convex weights splitting one unit of movement among the radial, polar,
/// and azimuthal directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaWeights {
    a1: f64,
    a2: f64,
    a3: f64,
}

impl AlphaWeights {
    /// Weights must each lie in [0,1] and sum to 1 within 1e-12.
    pub fn new(a1: f64, a2: f64, a3: f64) -> Result<Self> {
        for (name, a) in [("first", a1), ("second", a2), ("third", a3)] {
            if !a.is_finite() || !(0.0..=1.0).contains(&a) {
                return Err(Error::InvalidWeights(format!(
                    "{name} weight {a} is outside [0, 1]"
                )));
            }
        }
        let sum = a1 + a2 + a3;
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidWeights(format!(
                "weights must sum to 1, got {sum}"
            )));
        }
        Ok(AlphaWeights { a1, a2, a3 })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.a1, self.a2, self.a3]
    }
}

impl Default for AlphaWeights {
    /// Near-even split; the last weight absorbs the rounding so the sum is
    /// exactly 1.
    fn default() -> Self {
        AlphaWeights::new(0.33, 0.33, 0.34).expect("valid default weights")
    }
}

/// Positive space-space diagonal of a metric tensor (signs dropped).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricDiag {
    pub g11: f64,
    pub g22: f64,
    pub g33: f64,
}

/// Which metric weights the movement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    /// Curved metric around a point mass; movement runs in spherical
    /// coordinates centered on the attractor.
    Schwarzschild,
    /// Flat metric; movement subtracts equal-weighted amounts per axis.
    Minkowski,
}

/// (r, θ, φ) with θ = angle from +z, φ = azimuth in [0, 2π). The origin
/// maps to all zeros.
pub fn cartesian_to_spherical(v: [f64; 3]) -> SphericalPoint {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if r == 0.0 {
        return SphericalPoint {
            r: 0.0,
            theta: 0.0,
            phi: 0.0,
        };
    }
    let rho = (v[0] * v[0] + v[1] * v[1]).sqrt();
    let theta = rho.atan2(v[2]);
    let mut phi = v[1].atan2(v[0]);
    if phi < 0.0 {
        phi += 2.0 * std::f64::consts::PI;
    }
    SphericalPoint { r, theta, phi }
}

pub fn spherical_to_cartesian(s: SphericalPoint) -> [f64; 3] {
    [
        s.r * s.theta.sin() * s.phi.cos(),
        s.r * s.theta.sin() * s.phi.sin(),
        s.r * s.theta.cos(),
    ]
}

/// Polar angle entering the metric: atan(√(x₁²+x₂²)/|x₃|), with θ = π/2
/// when x₃ = 0, reflected to π − θ when x₂ < 0. Note the hemisphere test
/// is on the second coordinate and the third enters by absolute value, so
/// this is not the polar angle of `cartesian_to_spherical`.
pub fn metric_polar_angle(v: [f64; 3]) -> Result<f64> {
    if v == [0.0, 0.0, 0.0] {
        return Err(Error::InvalidConfig(
            "polar angle of the zero vector is undefined".into(),
        ));
    }
    let rho = (v[0] * v[0] + v[1] * v[1]).sqrt();
    let mut theta = if v[2] == 0.0 {
        std::f64::consts::FRAC_PI_2
    } else {
        (rho / v[2].abs()).atan()
    };
    if v[1] < 0.0 {
        theta = std::f64::consts::PI - theta;
    }
    Ok(theta)
}

/// Diagonal of the curved metric at radius r and polar angle θ, with unit
/// gravitational constant, mass, and speed of light so the horizon sits at
/// r = 2. The radius is clamped above the horizon and sin²θ away from 0,
/// keeping every entry finite and positive.
pub fn schwarzschild_g(r: f64, theta: f64, eps: f64) -> MetricDiag {
    let r_eff = r.max(2.0 + eps);
    let sin2 = (theta.sin() * theta.sin()).max(eps * eps);
    MetricDiag {
        g11: 1.0 / (1.0 - 2.0 / r_eff),
        g22: r_eff * r_eff,
        g33: r_eff * r_eff * sin2,
    }
}

/// Diagonal of the flat metric: ones.
pub fn minkowski_g() -> MetricDiag {
    MetricDiag {
        g11: 1.0,
        g22: 1.0,
        g33: 1.0,
    }
}

/// Per-coordinate movement −√(α_k δ / g_kk). All components are ≤ 0: the
/// step only ever shrinks coordinates toward the attractor.
pub fn movement_components(delta: f64, alpha: &AlphaWeights, g: &MetricDiag) -> [f64; 3] {
    let a = alpha.as_array();
    let gg = [g.g11, g.g22, g.g33];
    let mut out = [0.0; 3];
    for k in 0..3 {
        if a[k] == 0.0 {
            continue;
        }
        let radicand = a[k] * delta / gg[k];
        assert!(
            radicand >= 0.0,
            "negative radicand {radicand} from delta={delta}, g={gg:?}"
        );
        out[k] = -radicand.sqrt();
    }
    out
}

fn column3(points: &ndarray::Array2<f64>, j: usize) -> [f64; 3] {
    [points[[0, j]], points[[1, j]], points[[2, j]]]
}

fn set_column3(points: &mut ndarray::Array2<f64>, j: usize, v: [f64; 3]) {
    points[[0, j]] = v[0];
    points[[1, j]] = v[1];
    points[[2, j]] = v[2];
}

/// Reflect θ into [0, π] (crossing a pole flips the azimuth by π) and wrap
/// φ into [0, 2π).
fn canonicalize(mut s: SphericalPoint) -> SphericalPoint {
    if s.theta < 0.0 {
        s.theta = -s.theta;
        s.phi += std::f64::consts::PI;
    } else if s.theta > std::f64::consts::PI {
        s.theta = 2.0 * std::f64::consts::PI - s.theta;
        s.phi += std::f64::consts::PI;
    }
    s.phi = s.phi.rem_euclid(2.0 * std::f64::consts::PI);
    s
}

pub(crate) fn relativity_pass_points(
    points: &mut ndarray::Array2<f64>,
    metric: MetricKind,
    alpha: &AlphaWeights,
    guards: &StepGuards,
) -> Result<()> {
    if points.nrows() != 3 {
        return Err(Error::ManifoldTooSmall {
            got: points.nrows(),
        });
    }
    let n = points.ncols();
    for j in (0..n).rev() {
        for i in 0..n {
            if i == j {
                continue;
            }
            let x_i = column3(points, i);
            let x_j = column3(points, j);
            let centered = [x_j[0] - x_i[0], x_j[1] - x_i[1], x_j[2] - x_i[2]];
            let r_ij =
                (centered[0] * centered[0] + centered[1] * centered[1] + centered[2] * centered[2])
                    .sqrt();
            if r_ij < guards.r_min {
                continue;
            }
            let delta = 1.0 / r_ij;
            match metric {
                MetricKind::Schwarzschild => {
                    let theta_ij = metric_polar_angle(centered).expect("r_ij >= r_min > 0");
                    let g = schwarzschild_g(r_ij, theta_ij, METRIC_EPS);
                    let m = movement_components(delta, alpha, &g);
                    let mut s = cartesian_to_spherical(centered);
                    s.r += m[0];
                    s.theta += m[1];
                    s.phi += m[2];
                    s.r = s.r.max(guards.r_min);
                    let s = canonicalize(s);
                    let back = spherical_to_cartesian(s);
                    set_column3(
                        points,
                        j,
                        [back[0] + x_i[0], back[1] + x_i[1], back[2] + x_i[2]],
                    );
                }
                MetricKind::Minkowski => {
                    let m = movement_components(delta, alpha, &minkowski_g());
                    set_column3(points, j, [x_j[0] + m[0], x_j[1] + m[1], x_j[2] + m[2]]);
                }
            }
        }
    }
    Ok(())
}

/// One metric-weighted sweep over a class. Unlike the accumulate-then-move
/// pass, every pair's movement lands immediately.
pub fn relativity_pass(
    mut bundle: ClassBundle,
    metric: MetricKind,
    alpha: &AlphaWeights,
    guards: &StepGuards,
) -> Result<ClassBundle> {
    relativity_pass_points(bundle.points_mut(), metric, alpha, guards)?;
    Ok(bundle)
}
