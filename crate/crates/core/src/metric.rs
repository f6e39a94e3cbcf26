//! Finite metric spaces: validated distance matrices, samplers for the model
//! spaces (geodesic circles and spheres, their ℓ∞ cousins, trees), and the
//! metric constructions used by the barcode calculus (ℓ∞-product, gluing,
//! bounded perturbation).

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance for symmetry, diagonal and triangle checks.
///
/// Sampled geodesic distances accumulate `acos` rounding; exact validation
/// would reject valid inputs.
pub const METRIC_TOL: f64 = 1e-9;

/// Hard cap on the number of points an ℓ∞-product may produce.
pub const PRODUCT_POINT_CAP: usize = 20_000;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("input matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("asymmetric entry at ({0}, {1})")]
    AsymmetricEntry(usize, usize),
    #[error("negative entry at ({0}, {1})")]
    NegativeEntry(usize, usize),
    #[error("triangle inequality violated on ({0}, {1}, {2})")]
    TriangleViolation(usize, usize, usize),
    #[error("nonzero diagonal entry at ({0}, {0})")]
    NonzeroDiagonal(usize),
    #[error("non-finite entry at ({0}, {1})")]
    NonFiniteEntry(usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("product would have {requested} points, cap is {cap}")]
    SizeOverflow { requested: usize, cap: usize },
    #[error("index {index} out of range for space with {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("perturbation too large: eps must be at most {required_eps_max}")]
    SlackTooSmall { required_eps_max: f64 },
    #[error("size mismatch: {0} vs {1} points")]
    SizeMismatch(usize, usize),
}

/// A finite metric space stored as a validated symmetric distance matrix.
///
/// Distances are kept in the units of the sampled space (radians for
/// geodesic spheres). Ambient coordinates are retained when the sampler has
/// them, so ℓ∞-Čech constructions can run on the same points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
    pub labels: Option<Vec<String>>,
    pub coords: Option<Vec<Vec<f64>>>,
}

impl DistanceMatrix {
    /// Validates a raw square matrix and returns a metric space.
    ///
    /// Checks, with absolute tolerance [`METRIC_TOL`]: zero diagonal,
    /// symmetry, nonnegativity, finiteness, and the triangle inequality.
    /// The stored matrix is exactly symmetric (off-diagonal pairs are
    /// averaged) with an exactly zero diagonal.
    pub fn validate(raw: &[Vec<f64>]) -> Result<Self, MetricError> {
        let n = raw.len();
        if n == 0 {
            return Err(MetricError::InvalidParameter(
                "matrix must have at least one point".into(),
            ));
        }
        for (row, r) in raw.iter().enumerate() {
            if r.len() != n {
                return Err(MetricError::NotSquare {
                    row,
                    len: r.len(),
                    n,
                });
            }
        }
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let v = raw[i][j];
                if !v.is_finite() {
                    return Err(MetricError::NonFiniteEntry(i, j));
                }
                if i == j {
                    if v.abs() > METRIC_TOL {
                        return Err(MetricError::NonzeroDiagonal(i));
                    }
                    continue;
                }
                if v < -METRIC_TOL {
                    return Err(MetricError::NegativeEntry(i, j));
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let a = raw[i][j];
                let b = raw[j][i];
                if (a - b).abs() > METRIC_TOL {
                    return Err(MetricError::AsymmetricEntry(i, j));
                }
                let v = (0.5 * (a + b)).max(0.0);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        let out = DistanceMatrix {
            n,
            d,
            labels: None,
            coords: None,
        };
        out.check_triangle()?;
        Ok(out)
    }

    fn check_triangle(&self) -> Result<(), MetricError> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let dij = self.d[i * n + j];
                for k in 0..n {
                    if dij > self.d[i * n + k] + self.d[k * n + j] + METRIC_TOL {
                        return Err(MetricError::TriangleViolation(i, k, j));
                    }
                }
            }
        }
        Ok(())
    }

    /// Builds from an already-symmetric matrix produced by a sampler.
    /// Debug builds re-run the full validation (an O(n³) scan) up to desk
    /// sizes.
    fn from_exact(n: usize, d: Vec<f64>) -> Self {
        debug_assert_eq!(d.len(), n * n);
        let out = DistanceMatrix {
            n,
            d,
            labels: None,
            coords: None,
        };
        debug_assert!(n > 128 || out.check_triangle().is_ok());
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    /// Largest pairwise distance; 0 for a single point.
    pub fn diameter(&self) -> f64 {
        self.d.iter().cloned().fold(0.0, f64::max)
    }

    /// Rows as `n x n` nested vectors, for serialization.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.d[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    /// Label for point `i` (its index when no labels are attached).
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(ls) => ls[i].clone(),
            None => i.to_string(),
        }
    }
}

/// Equally spaced points on a geodesic circle of the given radius.
///
/// `d(i, j) = radius * min(|θi - θj|, 2π - |θi - θj|)` with `θk = 2πk/count`.
pub fn sample_circle(count: usize, radius: f64) -> Result<DistanceMatrix, MetricError> {
    if count < 1 {
        return Err(MetricError::InvalidParameter("count must be >= 1".into()));
    }
    if !(radius > 0.0) {
        return Err(MetricError::InvalidParameter("radius must be > 0".into()));
    }
    let tau = std::f64::consts::TAU;
    let theta: Vec<f64> = (0..count).map(|k| tau * k as f64 / count as f64).collect();
    let mut d = vec![0.0; count * count];
    for i in 0..count {
        for j in (i + 1)..count {
            let dt = (theta[i] - theta[j]).abs();
            let v = radius * dt.min(tau - dt);
            d[i * count + j] = v;
            d[j * count + i] = v;
        }
    }
    Ok(DistanceMatrix::from_exact(count, d))
}

fn unit_gaussian_points(count: usize, ambient: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let v: Vec<f64> = (0..ambient).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                return v.iter().map(|x| x / norm).collect();
            }
        })
        .collect()
}

/// Seeded uniform sample of the unit `dim`-sphere with the geodesic metric
/// (distances in radians). Points are normalized Gaussian vectors, so the
/// same seed always yields the same matrix.
pub fn sample_sphere(count: usize, dim: usize, seed: u64) -> Result<DistanceMatrix, MetricError> {
    if count < 1 || dim < 1 {
        return Err(MetricError::InvalidParameter(
            "count and dim must be >= 1".into(),
        ));
    }
    let pts = unit_gaussian_points(count, dim + 1, seed);
    let mut d = vec![0.0; count * count];
    for i in 0..count {
        for j in (i + 1)..count {
            let dot: f64 = pts[i].iter().zip(&pts[j]).map(|(a, b)| a * b).sum();
            let v = dot.clamp(-1.0, 1.0).acos();
            d[i * count + j] = v;
            d[j * count + i] = v;
        }
    }
    let mut out = DistanceMatrix::from_exact(count, d);
    out.coords = Some(pts);
    Ok(out)
}

fn linf_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn matrix_from_coords_linf(pts: Vec<Vec<f64>>) -> DistanceMatrix {
    let n = pts.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = linf_dist(&pts[i], &pts[j]);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    let mut out = DistanceMatrix::from_exact(n, d);
    out.coords = Some(pts);
    out
}

/// Points of the unit round sphere in `R^dim` carrying the ℓ∞ metric.
///
/// For `dim = 2` the points are equally spaced on the circle and the seed is
/// unused; for `dim > 2` they are a seeded uniform sample. Ambient
/// coordinates are retained for ℓ∞-Čech constructions.
pub fn sample_linf_sphere(
    count: usize,
    dim: usize,
    seed: u64,
) -> Result<DistanceMatrix, MetricError> {
    if count < 1 || dim < 1 {
        return Err(MetricError::InvalidParameter(
            "count and dim must be >= 1".into(),
        ));
    }
    let pts: Vec<Vec<f64>> = if dim == 1 {
        // S^0 in R^1: alternate between the two points.
        (0..count)
            .map(|k| vec![if k % 2 == 0 { 1.0 } else { -1.0 }])
            .collect()
    } else if dim == 2 {
        let tau = std::f64::consts::TAU;
        (0..count)
            .map(|k| {
                let t = tau * k as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect()
    } else {
        unit_gaussian_points(count, dim, seed)
    };
    Ok(matrix_from_coords_linf(pts))
}

/// Points on the boundary of the cube `[-1, 1]^dim` with the ℓ∞ metric.
///
/// For `dim = 2` the points are equally spaced along the perimeter; for
/// higher dimensions each point picks a seeded uniform facet and position.
pub fn sample_linf_box_boundary(
    count: usize,
    dim: usize,
    seed: u64,
) -> Result<DistanceMatrix, MetricError> {
    if count < 1 || dim < 1 {
        return Err(MetricError::InvalidParameter(
            "count and dim must be >= 1".into(),
        ));
    }
    let pts: Vec<Vec<f64>> = if dim == 1 {
        (0..count)
            .map(|k| vec![if k % 2 == 0 { 1.0 } else { -1.0 }])
            .collect()
    } else if dim == 2 {
        // Perimeter of the square, arc-length parametrized, total length 8.
        (0..count)
            .map(|k| {
                let t = 8.0 * k as f64 / count as f64;
                match t {
                    t if t < 2.0 => vec![1.0, t - 1.0],
                    t if t < 4.0 => vec![3.0 - t, 1.0],
                    t if t < 6.0 => vec![-1.0, 5.0 - t],
                    t => vec![t - 7.0, -1.0],
                }
            })
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let axis = rng.gen_range(0..dim);
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                (0..dim)
                    .map(|a| {
                        if a == axis {
                            sign
                        } else {
                            rng.gen_range(-1.0..=1.0)
                        }
                    })
                    .collect()
            })
            .collect()
    };
    Ok(matrix_from_coords_linf(pts))
}

/// Path metric of a seeded random tree on `count` nodes.
///
/// Node `i > 0` attaches to a uniform parent among `0..i` with a dyadic edge
/// weight in `[0.5, 1.0]`, so path sums are exact in `f64` and the four-point
/// condition holds with zero slack.
pub fn sample_tree(count: usize, seed: u64) -> Result<DistanceMatrix, MetricError> {
    if count < 1 {
        return Err(MetricError::InvalidParameter("count must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parent = vec![0usize; count];
    let mut weight = vec![0.0f64; count];
    for i in 1..count {
        parent[i] = rng.gen_range(0..i);
        weight[i] = 0.5 + rng.gen_range(0..=64u32) as f64 / 128.0;
    }
    // depth[i] = exact sum of dyadic weights root -> i
    let mut depth = vec![0.0f64; count];
    for i in 1..count {
        depth[i] = depth[parent[i]] + weight[i];
    }
    let ancestors = |mut i: usize| {
        let mut chain = vec![i];
        while i != 0 {
            i = parent[i];
            chain.push(i);
        }
        chain
    };
    let mut d = vec![0.0; count * count];
    for i in 0..count {
        let up_i: Vec<usize> = ancestors(i);
        for j in (i + 1)..count {
            let mut lca = 0;
            let mut k = j;
            'outer: loop {
                for &a in &up_i {
                    if a == k {
                        lca = k;
                        break 'outer;
                    }
                }
                if k == 0 {
                    break;
                }
                k = parent[k];
            }
            let v = depth[i] + depth[j] - 2.0 * depth[lca];
            d[i * count + j] = v;
            d[j * count + i] = v;
        }
    }
    Ok(DistanceMatrix::from_exact(count, d))
}

/// ℓ∞-product of two spaces: `d((a,b),(a',b')) = max(d_A(a,a'), d_B(b,b'))`.
/// Point `(a, b)` lands at index `a * n_B + b`; labels are pairs.
pub fn linf_product(a: &DistanceMatrix, b: &DistanceMatrix) -> Result<DistanceMatrix, MetricError> {
    let n = a
        .n()
        .checked_mul(b.n())
        .filter(|&n| n <= PRODUCT_POINT_CAP)
        .ok_or(MetricError::SizeOverflow {
            requested: a.n().saturating_mul(b.n()),
            cap: PRODUCT_POINT_CAP,
        })?;
    let (na, nb) = (a.n(), b.n());
    let mut d = vec![0.0; n * n];
    for ai in 0..na {
        for bi in 0..nb {
            let p = ai * nb + bi;
            for aj in 0..na {
                for bj in 0..nb {
                    let q = aj * nb + bj;
                    d[p * n + q] = a.dist(ai, aj).max(b.dist(bi, bj));
                }
            }
        }
    }
    let mut out = DistanceMatrix::from_exact(n, d);
    let labels = (0..na)
        .flat_map(|ai| (0..nb).map(move |bi| (ai, bi)))
        .map(|(ai, bi)| format!("({},{})", a.label(ai), b.label(bi)))
        .collect();
    out.labels = Some(labels);
    Ok(out)
}

/// Metric gluing of `A` and `B` along `a[p] ~ b[q]`.
///
/// The result has `n_A + n_B - 1` points: all of `A` first, then `B` with `q`
/// removed. Cross distances are `d_A(x, p) + d_B(q, y)`; distances within
/// each factor are unchanged.
pub fn metric_glue(
    a: &DistanceMatrix,
    b: &DistanceMatrix,
    p: usize,
    q: usize,
) -> Result<DistanceMatrix, MetricError> {
    if p >= a.n() {
        return Err(MetricError::IndexOutOfRange { index: p, n: a.n() });
    }
    if q >= b.n() {
        return Err(MetricError::IndexOutOfRange { index: q, n: b.n() });
    }
    let (na, nb) = (a.n(), b.n());
    let n = na + nb - 1;
    // b_points[k] = original index in B of glued point na + k
    let b_points: Vec<usize> = (0..nb).filter(|&y| y != q).collect();
    let mut d = vec![0.0; n * n];
    for i in 0..na {
        for j in 0..na {
            d[i * n + j] = a.dist(i, j);
        }
    }
    for (ki, &bi) in b_points.iter().enumerate() {
        let gi = na + ki;
        for (kj, &bj) in b_points.iter().enumerate() {
            d[gi * n + (na + kj)] = b.dist(bi, bj);
        }
        for x in 0..na {
            let v = a.dist(x, p) + b.dist(q, bi);
            d[x * n + gi] = v;
            d[gi * n + x] = v;
        }
    }
    let mut out = DistanceMatrix::from_exact(n, d);
    let labels = (0..na)
        .map(|i| a.label(i))
        .chain(b_points.iter().map(|&j| format!("B:{}", b.label(j))))
        .collect();
    out.labels = Some(labels);
    Ok(out)
}

/// Largest perturbation magnitude [`perturb`] accepts for this space:
/// one third of the minimal triangle slack, and no more than the smallest
/// off-diagonal entry (so distances stay nonnegative).
pub fn max_safe_perturbation(a: &DistanceMatrix) -> f64 {
    let n = a.n();
    let mut eps = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                eps = eps.min(a.dist(i, j));
            }
            for k in 0..n {
                if i == j || j == k || i == k {
                    continue;
                }
                let slack = a.dist(i, j) + a.dist(j, k) - a.dist(i, k);
                eps = eps.min(slack / 3.0);
            }
        }
    }
    eps
}

/// Shifts every off-diagonal entry by seeded uniform noise in `[-eps, eps]`.
///
/// Refuses (rather than repairs) when the noise could break the triangle
/// inequality: repairing via shortest paths would silently change the ℓ∞
/// distortion, which the stability contract measures. The output satisfies
/// `linf_distortion(a, out) <= eps`.
pub fn perturb(a: &DistanceMatrix, eps: f64, seed: u64) -> Result<DistanceMatrix, MetricError> {
    if !(eps >= 0.0) {
        return Err(MetricError::InvalidParameter("eps must be >= 0".into()));
    }
    if eps == 0.0 {
        return Ok(a.clone());
    }
    let allowed = max_safe_perturbation(a);
    if eps > allowed {
        return Err(MetricError::SlackTooSmall {
            required_eps_max: allowed,
        });
    }
    let n = a.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = a.dist(i, j) + rng.gen_range(-eps..=eps);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    let mut out = DistanceMatrix::from_exact(n, d);
    out.labels = a.labels.clone();
    Ok(out)
}

/// `max_{i,j} |d_A(i,j) - d_B(i,j)|` over spaces on the same point set.
pub fn linf_distortion(a: &DistanceMatrix, b: &DistanceMatrix) -> Result<f64, MetricError> {
    if a.n() != b.n() {
        return Err(MetricError::SizeMismatch(a.n(), b.n()));
    }
    Ok(a.d
        .iter()
        .zip(&b.d)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Declarative description of a sample, as read from SpaceSpec JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpaceSpec {
    CircleGeodesic {
        count: usize,
        radius: f64,
    },
    SphereGeodesic {
        count: usize,
        dim: usize,
        #[serde(default)]
        seed: u64,
    },
    CircleLinf {
        count: usize,
    },
    SphereLinf {
        count: usize,
        dim: usize,
        #[serde(default)]
        seed: u64,
    },
    BoxBoundaryLinf {
        count: usize,
        dim: usize,
        #[serde(default)]
        seed: u64,
    },
    Tree {
        count: usize,
        #[serde(default)]
        seed: u64,
    },
    Explicit {
        d: Vec<Vec<f64>>,
    },
}

impl SpaceSpec {
    pub fn sample(&self) -> Result<DistanceMatrix, MetricError> {
        match self {
            SpaceSpec::CircleGeodesic { count, radius } => sample_circle(*count, *radius),
            SpaceSpec::SphereGeodesic { count, dim, seed } => sample_sphere(*count, *dim, *seed),
            SpaceSpec::CircleLinf { count } => sample_linf_sphere(*count, 2, 0),
            SpaceSpec::SphereLinf { count, dim, seed } => sample_linf_sphere(*count, *dim, *seed),
            SpaceSpec::BoxBoundaryLinf { count, dim, seed } => {
                sample_linf_box_boundary(*count, *dim, *seed)
            }
            SpaceSpec::Tree { count, seed } => sample_tree(*count, *seed),
            SpaceSpec::Explicit { d } => DistanceMatrix::validate(d),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    #[test]
    fn validate_accepts_minimal_metric() {
        let m = DistanceMatrix::validate(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(m.n(), 2);
        assert_eq!(m.dist(0, 1), 1.0);
    }

    #[test]
    fn validate_rejects_asymmetry() {
        let e = DistanceMatrix::validate(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap_err();
        assert_eq!(e, MetricError::AsymmetricEntry(0, 1));
    }

    #[test]
    fn validate_rejects_triangle_violation() {
        let raw = vec![
            vec![0.0, 1.0, 3.0],
            vec![1.0, 0.0, 1.0],
            vec![3.0, 1.0, 0.0],
        ];
        let e = DistanceMatrix::validate(&raw).unwrap_err();
        assert!(matches!(e, MetricError::TriangleViolation(..)));
    }

    #[test]
    fn validate_rejects_bad_shapes_and_entries() {
        assert!(matches!(
            DistanceMatrix::validate(&[vec![0.0, 1.0], vec![1.0]]),
            Err(MetricError::NotSquare { .. })
        ));
        assert_eq!(
            DistanceMatrix::validate(&[vec![0.0, -1.0], vec![-1.0, 0.0]]),
            Err(MetricError::NegativeEntry(0, 1))
        );
        assert_eq!(
            DistanceMatrix::validate(&[vec![0.5]]),
            Err(MetricError::NonzeroDiagonal(0))
        );
    }

    #[test]
    fn circle_sample_square_distances() {
        let m = sample_circle(4, 1.0).unwrap();
        assert_eq!(m.dist(0, 1), FRAC_PI_2);
        assert_eq!(m.dist(1, 2), FRAC_PI_2);
        assert_eq!(m.dist(0, 2), PI);
        assert_eq!(m.diameter(), PI);
    }

    #[test]
    fn circle_sample_edge_cases() {
        let single = sample_circle(1, 1.0).unwrap();
        assert_eq!(single.n(), 1);
        assert_eq!(single.diameter(), 0.0);
        let tri = sample_circle(3, 1.0).unwrap();
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            assert_abs_diff_eq!(tri.dist(i, j), TAU / 3.0, epsilon = 1e-15);
        }
        assert!(sample_circle(0, 1.0).is_err());
        assert!(sample_circle(3, 0.0).is_err());
    }

    #[test]
    fn sphere_sample_is_deterministic_and_valid() {
        let a = sample_sphere(20, 2, 7).unwrap();
        let b = sample_sphere(20, 2, 7).unwrap();
        assert_eq!(a, b);
        let c = sample_sphere(20, 2, 8).unwrap();
        assert_ne!(a, c);
        assert!(DistanceMatrix::validate(&a.rows()).is_ok());
    }

    #[test]
    fn sphere_distances_are_arc_lengths_of_coords() {
        let m = sample_sphere(12, 3, 5).unwrap();
        let pts = m.coords.as_ref().unwrap();
        for p in pts {
            let norm: f64 = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
        }
        for i in 0..12 {
            for j in 0..12 {
                if i == j {
                    continue; // the diagonal is exactly zero by construction
                }
                let dot: f64 = pts[i].iter().zip(&pts[j]).map(|(a, b)| a * b).sum();
                assert_eq!(m.dist(i, j), dot.clamp(-1.0, 1.0).acos());
            }
        }
        // orthogonal pairs sit at a quarter turn, antipodal pairs at half
        assert_eq!(0.0f64.clamp(-1.0, 1.0).acos(), FRAC_PI_2);
        assert_eq!((-1.0f64).clamp(-1.0, 1.0).acos(), PI);
    }

    #[test]
    fn linf_sphere_axis_points() {
        let m = sample_linf_sphere(4, 2, 0).unwrap();
        assert_abs_diff_eq!(m.dist(0, 1), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.dist(0, 2), 2.0, epsilon = 1e-12);
        assert!(m.coords.is_some());
    }

    #[test]
    fn product_max_metric_and_identity_factor() {
        let a = DistanceMatrix::validate(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let b = DistanceMatrix::validate(&[vec![0.0, 0.5], vec![0.5, 0.0]]).unwrap();
        let p = linf_product(&a, &b).unwrap();
        assert_eq!(p.n(), 4);
        assert_eq!(p.dist(0, 3), 1.0); // max(1, 0.5)
        assert_eq!(p.dist(0, 1), 0.5);
        let point = DistanceMatrix::validate(&[vec![0.0]]).unwrap();
        let q = linf_product(&a, &point).unwrap();
        assert_eq!(q.n(), 2);
        assert_eq!(q.dist(0, 1), 1.0);
    }

    #[test]
    fn product_commutes_up_to_relabeling() {
        let a = sample_circle(3, 1.0).unwrap();
        let b = sample_circle(4, 0.5).unwrap();
        let mut ab: Vec<f64> = linf_product(&a, &b).unwrap().d;
        let mut ba: Vec<f64> = linf_product(&b, &a).unwrap().d;
        ab.sort_by(f64::total_cmp);
        ba.sort_by(f64::total_cmp);
        assert_eq!(ab, ba);
    }

    #[test]
    fn glue_path_metric() {
        let a = DistanceMatrix::validate(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let b = DistanceMatrix::validate(&[vec![0.0, 0.5], vec![0.5, 0.0]]).unwrap();
        let g = metric_glue(&a, &b, 1, 0).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.dist(0, 1), 1.0);
        assert_eq!(g.dist(1, 2), 0.5);
        assert_eq!(g.dist(0, 2), 1.5);
        assert!(DistanceMatrix::validate(&g.rows()).is_ok());
        // restriction to A is A itself
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(g.dist(i, j), a.dist(i, j));
            }
        }
        let point = DistanceMatrix::validate(&[vec![0.0]]).unwrap();
        let ga = metric_glue(&a, &point, 0, 0).unwrap();
        assert_eq!(ga.n(), 2);
        assert_eq!(ga.dist(0, 1), 1.0);
        assert!(metric_glue(&a, &b, 5, 0).is_err());
    }

    #[test]
    fn perturb_bounds_and_refusal() {
        let m = DistanceMatrix::validate(&[
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(perturb(&m, 0.0, 3).unwrap(), m);
        let p = perturb(&m, 0.01, 3).unwrap();
        assert!(linf_distortion(&m, &p).unwrap() <= 0.01);
        assert!(DistanceMatrix::validate(&p.rows()).is_ok());
        let err = perturb(&m, 10.0, 3).unwrap_err();
        match err {
            MetricError::SlackTooSmall { required_eps_max } => {
                assert!(required_eps_max < 10.0);
            }
            other => panic!("unexpected error {other:?}"),
        }
        // equi-spaced circle samples have zero triangle slack (two adjacent
        // arcs compose exactly to the opposite arc), so any eps > 0 refuses
        let square = sample_circle(4, 1.0).unwrap();
        assert_eq!(max_safe_perturbation(&square), 0.0);
        assert!(matches!(
            perturb(&square, 0.01, 3),
            Err(MetricError::SlackTooSmall { .. })
        ));
    }

    #[test]
    fn distortion_measures_linf_gap() {
        let a = DistanceMatrix::validate(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let b = DistanceMatrix::validate(&[vec![0.0, 1.5], vec![1.5, 0.0]]).unwrap();
        assert_eq!(linf_distortion(&a, &a).unwrap(), 0.0);
        assert_eq!(linf_distortion(&a, &b).unwrap(), 0.5);
        let c = sample_circle(3, 1.0).unwrap();
        assert!(linf_distortion(&a, &c).is_err());
    }

    #[test]
    fn tree_metric_is_exactly_zero_hyperbolic_material() {
        let t = sample_tree(12, 5).unwrap();
        assert!(DistanceMatrix::validate(&t.rows()).is_ok());
        // four-point condition with zero slack: largest two sums tie exactly
        let n = t.n();
        for (w, x, y, z) in [(0, 3, 7, 9), (1, 2, 5, 11), (4, 6, 8, 10)] {
            if w.max(x).max(y).max(z) >= n {
                continue;
            }
            let mut sums = [
                t.dist(w, x) + t.dist(y, z),
                t.dist(w, y) + t.dist(x, z),
                t.dist(w, z) + t.dist(x, y),
            ];
            sums.sort_by(f64::total_cmp);
            assert_eq!(sums[1], sums[2]);
        }
    }

    #[test]
    fn samplers_pass_validation() {
        for m in [
            sample_sphere(10, 3, 1).unwrap(),
            sample_linf_sphere(10, 3, 1).unwrap(),
            sample_linf_box_boundary(10, 3, 1).unwrap(),
            sample_tree(10, 1).unwrap(),
            sample_circle(10, 2.0).unwrap(),
        ] {
            assert!(DistanceMatrix::validate(&m.rows()).is_ok());
        }
    }
}
