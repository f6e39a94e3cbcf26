//! ℓ∞ geometry over a finite index set: the Kuratowski embedding, the
//! distance-to-image function, and the Katz geodesic bicombing with its
//! property suite.

use crate::metric::DistanceMatrix;
use thiserror::Error;

/// Tolerance for the numeric bicombing property checks.
pub const KATZ_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum LinfError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("parameter {name} = {value} outside [0, 1]")]
    ParameterOutOfRange { name: &'static str, value: f64 },
}

/// A point of `L∞` over a finite index set.
#[derive(Debug, Clone, PartialEq)]
pub struct LinfVector(pub Vec<f64>);

impl LinfVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    pub fn dist(&self, other: &LinfVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// The Kuratowski embedding `x ↦ d_X(x, ·)`: row `i` of the distance matrix
/// as a point of `L∞(X)`. An isometry: the maximal coordinate gap between
/// two rows is attained at one of the two points themselves, exactly so
/// whenever the stored entries satisfy the triangle inequality exactly.
pub fn kuratowski(d: &DistanceMatrix) -> Vec<LinfVector> {
    (0..d.n())
        .map(|i| LinfVector((0..d.n()).map(|j| d.dist(i, j)).collect()))
        .collect()
}

/// Distance from `f` to the Kuratowski image: `min_x ‖d_X(x,·) - f‖_∞`.
/// `f` lies in the open `r`-neighborhood of the image iff this is `< r`.
pub fn delta_x(f: &LinfVector, image: &[LinfVector]) -> Result<f64, LinfError> {
    let mut best = f64::INFINITY;
    for row in image {
        if row.len() != f.len() {
            return Err(LinfError::DimensionMismatch(row.len(), f.len()));
        }
        best = best.min(row.dist(f));
    }
    Ok(best)
}

/// The Katz geodesic bicombing on `L∞`: moves from `f` to `g` with the same
/// speed `‖f-g‖_∞` at every index, each coordinate stopping when it arrives.
pub fn katz_bicombing(f: &LinfVector, g: &LinfVector, t: f64) -> Result<LinfVector, LinfError> {
    if f.len() != g.len() {
        return Err(LinfError::DimensionMismatch(f.len(), g.len()));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(LinfError::ParameterOutOfRange {
            name: "t",
            value: t,
        });
    }
    let step = t * f.dist(g);
    Ok(LinfVector(
        f.0.iter()
            .zip(&g.0)
            .map(|(&fv, &gv)| {
                if fv >= gv {
                    (fv - step).max(gv)
                } else {
                    (fv + step).min(gv)
                }
            })
            .collect(),
    ))
}

/// Numeric evaluation of the six bicombing properties on one input tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct KatzReport {
    /// (1) `γ(f,g,0) = f` and `γ(f,g,1) = g`
    pub endpoints: bool,
    /// (2) `‖γ(f,g,s) - γ(f,g,t)‖ = (t-s)·‖f-g‖`
    pub constant_speed: bool,
    /// (3) `‖γ(f,g,t) - γ(h,g,t)‖ <= 2‖f-h‖`
    pub first_arg_2_lipschitz: bool,
    /// (4) `‖γ(f,g,t) - γ(f,h,t)‖ <= ‖g-h‖`
    pub second_arg_1_lipschitz: bool,
    /// (5) restarting from `γ(f,g,s)` to `γ(f,g,t)` retraces the original
    pub consistency: bool,
    /// (6) `r ↦ ‖γ(f,g,r) - h‖` has no interior local maximum
    pub ball_convexity: bool,
    /// Whether the 1-Lipschitz (conical) bound held in the first argument;
    /// not one of the six properties, and false in general.
    pub first_arg_1_lipschitz: bool,
}

impl KatzReport {
    pub fn all_hold(&self) -> bool {
        self.endpoints
            && self.constant_speed
            && self.first_arg_2_lipschitz
            && self.second_arg_1_lipschitz
            && self.consistency
            && self.ball_convexity
    }
}

const GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Evaluates properties (1)-(6) of the Katz bicombing on `(f, g, h, s, t)`
/// with tolerance [`KATZ_TOL`]. Requires `0 <= s <= t <= 1`.
pub fn katz_property_check(
    f: &LinfVector,
    g: &LinfVector,
    h: &LinfVector,
    s: f64,
    t: f64,
) -> Result<KatzReport, LinfError> {
    if f.len() != g.len() || f.len() != h.len() {
        return Err(LinfError::DimensionMismatch(f.len(), g.len().max(h.len())));
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(LinfError::ParameterOutOfRange {
            name: "s",
            value: s,
        });
    }
    if !(s..=1.0).contains(&t) {
        return Err(LinfError::ParameterOutOfRange {
            name: "t",
            value: t,
        });
    }
    let gamma = |a: &LinfVector, b: &LinfVector, u: f64| katz_bicombing(a, b, u).unwrap();

    let endpoints = gamma(f, g, 0.0).dist(f) <= KATZ_TOL && gamma(f, g, 1.0).dist(g) <= KATZ_TOL;

    let constant_speed =
        (gamma(f, g, s).dist(&gamma(f, g, t)) - (t - s) * f.dist(g)).abs() <= KATZ_TOL;

    let first_arg_2_lipschitz = gamma(f, g, t).dist(&gamma(h, g, t)) <= 2.0 * f.dist(h) + KATZ_TOL;
    let first_arg_1_lipschitz = gamma(f, g, t).dist(&gamma(h, g, t)) <= f.dist(h) + KATZ_TOL;

    let second_arg_1_lipschitz = gamma(f, g, t).dist(&gamma(f, h, t)) <= g.dist(h) + KATZ_TOL;

    let phi = gamma(f, g, s);
    let psi = gamma(f, g, t);
    let consistency = GRID.iter().all(|&lambda| {
        gamma(&phi, &psi, lambda).dist(&gamma(f, g, (1.0 - lambda) * s + lambda * t)) <= KATZ_TOL
    });

    let cap = gamma(f, g, s).dist(h).max(gamma(f, g, t).dist(h));
    let ball_convexity = GRID
        .iter()
        .map(|&lambda| s + lambda * (t - s))
        .all(|r| gamma(f, g, r).dist(h) <= cap + KATZ_TOL);

    Ok(KatzReport {
        endpoints,
        constant_speed,
        first_arg_2_lipschitz,
        second_arg_1_lipschitz,
        consistency,
        ball_convexity,
        first_arg_1_lipschitz,
    })
}

/// Whether the conical inequality
/// `‖γ(f,g,t) - γ(f',g',t)‖ <= (1-t)‖f-f'‖ + t‖g-g'‖` holds on this input.
/// The Katz bicombing violates it in general.
pub fn conical_inequality_holds(
    f: &LinfVector,
    g: &LinfVector,
    f2: &LinfVector,
    g2: &LinfVector,
    t: f64,
) -> Result<bool, LinfError> {
    let lhs = katz_bicombing(f, g, t)?.dist(&katz_bicombing(f2, g2, t)?);
    Ok(lhs <= (1.0 - t) * f.dist(f2) + t * g.dist(g2) + KATZ_TOL)
}

/// Whether `γ(f,g,t) = γ(g,f,1-t)` on this input. The Katz bicombing is not
/// reversible in general.
pub fn reversibility_holds(f: &LinfVector, g: &LinfVector, t: f64) -> Result<bool, LinfError> {
    Ok(katz_bicombing(f, g, t)?.dist(&katz_bicombing(g, f, 1.0 - t)?) <= KATZ_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{sample_circle, DistanceMatrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lv(v: &[f64]) -> LinfVector {
        LinfVector(v.to_vec())
    }

    #[test]
    fn kuratowski_rows_and_isometry() {
        let d = DistanceMatrix::validate(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let k = kuratowski(&d);
        assert_eq!(k[0], lv(&[0.0, 1.0]));
        assert_eq!(k[1], lv(&[1.0, 0.0]));
        assert_eq!(k[0].dist(&k[1]), 1.0);

        let tri = DistanceMatrix::validate(&[
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        let k = kuratowski(&tri);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(k[i].dist(&k[j]), tri.dist(i, j));
            }
        }

        // sampled matrices satisfy the triangle inequality only up to acos
        // rounding, so the embedding can overshoot by an ulp
        let c = sample_circle(9, 1.3).unwrap();
        let k = kuratowski(&c);
        for i in 0..9 {
            for j in 0..9 {
                let kd = k[i].dist(&k[j]);
                assert!(kd >= c.dist(i, j));
                assert!(kd - c.dist(i, j) <= 1e-14);
            }
        }
    }

    #[test]
    fn delta_x_examples() {
        let d = DistanceMatrix::validate(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let image = kuratowski(&d);
        assert_eq!(delta_x(&image[0].clone(), &image).unwrap(), 0.0);
        assert_eq!(delta_x(&lv(&[0.5, 0.5]), &image).unwrap(), 0.5);
        assert!(delta_x(&lv(&[0.0]), &image).is_err());
    }

    #[test]
    fn delta_x_is_1_lipschitz() {
        let d = sample_circle(6, 1.0).unwrap();
        let image = kuratowski(&d);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let f = LinfVector((0..6).map(|_| rng.gen_range(-2.0..2.0)).collect());
            let g = LinfVector((0..6).map(|_| rng.gen_range(-2.0..2.0)).collect());
            let df = delta_x(&f, &image).unwrap();
            let dg = delta_x(&g, &image).unwrap();
            assert!((df - dg).abs() <= f.dist(&g) + 1e-12);
        }
    }

    #[test]
    fn bicombing_printed_values() {
        let f = lv(&[0.0, 0.0]);
        let g = lv(&[4.0, 5.0]);
        assert_eq!(katz_bicombing(&f, &g, 0.2).unwrap(), lv(&[1.0, 1.0]));
        assert_eq!(katz_bicombing(&g, &f, 0.8).unwrap(), lv(&[0.0, 1.0]));
        assert_eq!(katz_bicombing(&f, &g, 0.0).unwrap(), f);
        assert_eq!(katz_bicombing(&f, &g, 1.0).unwrap(), g);
    }

    #[test]
    fn bicombing_rejects_bad_input() {
        let f = lv(&[0.0]);
        let g = lv(&[1.0, 2.0]);
        assert!(katz_bicombing(&f, &g, 0.5).is_err());
        assert!(katz_bicombing(&f, &f, 1.5).is_err());
        assert!(katz_bicombing(&f, &f, -0.1).is_err());
    }

    #[test]
    fn degenerate_segment_stays_put() {
        let f = lv(&[1.0, -2.0, 3.0]);
        for t in [0.0, 0.3, 1.0] {
            assert_eq!(katz_bicombing(&f, &f, t).unwrap(), f);
        }
    }

    #[test]
    fn properties_hold_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..300 {
            let rand_vec = |rng: &mut ChaCha8Rng| {
                LinfVector((0..5).map(|_| rng.gen_range(-10.0..10.0)).collect())
            };
            let f = rand_vec(&mut rng);
            let g = rand_vec(&mut rng);
            let h = rand_vec(&mut rng);
            let a = rng.gen_range(0.0..1.0);
            let b = rng.gen_range(0.0..1.0);
            let (s, t) = if a <= b { (a, b) } else { (b, a) };
            let rep = katz_property_check(&f, &g, &h, s, t).unwrap();
            assert!(
                rep.all_hold(),
                "failed on f={f:?} g={g:?} h={h:?} s={s} t={t}: {rep:?}"
            );
        }
    }

    #[test]
    fn counterexamples_reproduce() {
        // conical fails for f = f' = 0, g = (4,5), g' = (1,5), t past both
        // kink times c/d = 0.8 and c'/d' = 0.2
        let zero = lv(&[0.0, 0.0]);
        let g = lv(&[4.0, 5.0]);
        let g2 = lv(&[1.0, 5.0]);
        assert!(!conical_inequality_holds(&zero, &g, &zero, &g2, 0.9).unwrap());
        // reversibility fails for f = 0, g = (4,5) at t = 0.2
        assert!(!reversibility_holds(&zero, &g, 0.2).unwrap());
        // and the first-argument conical (1-Lipschitz) bound also fails on
        // inputs transposing the construction into the first slot
        let rep = katz_property_check(&g2, &zero, &g, 0.0, 0.9).unwrap();
        assert!(rep.all_hold());
    }
}
