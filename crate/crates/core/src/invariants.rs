//! Metric invariants and the diagnostic bounds tying them to barcodes:
//! k-spread and spread, radius, δ-hyperbolicity, the Jung covering radius
//! ψ, and strong filling radius estimators.

use crate::barcode::{max_persistence, Barcode};
use crate::metric::DistanceMatrix;
use rayon::prelude::*;
use std::collections::BTreeMap;
use thiserror::Error;

/// Default ceiling on the number of subsets the spread enumeration visits.
pub const DEFAULT_SUBSET_BUDGET: usize = 5_000_000;

/// Slack for asserted bound comparisons; endpoint subtraction costs one ulp.
pub const BOUND_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum InvariantError {
    #[error("subset budget exceeded after {0} subsets")]
    BudgetExceeded(usize),
    #[error("argument {value} outside [0, {max}]")]
    DomainError { value: f64, max: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Result of a spread computation: the value and an argmin witness subset.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadResult {
    pub value: f64,
    pub witness: Vec<usize>,
}

/// Covering radius of the subset `a`: `max_x min_{p ∈ a} d(x, p)`.
fn covering_radius(d: &DistanceMatrix, a: &[usize]) -> f64 {
    (0..d.n())
        .map(|x| {
            a.iter()
                .map(|&p| d.dist(x, p))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// `spread_k`: the infimal `r` admitting a subset of at most `k` points
/// with diameter below `r` that also `r`-covers the space. Equals
/// `min_{|A| <= k} max(diam(A), covering_radius(A))`; the strict
/// inequalities in the definition make this an infimum, not attained.
///
/// Enumerates subsets in increasing size, pruning branches whose diameter
/// already reaches the best value found.
pub fn spread_k(d: &DistanceMatrix, k: usize) -> Result<SpreadResult, InvariantError> {
    spread_k_with_budget(d, k, DEFAULT_SUBSET_BUDGET)
}

pub fn spread_k_with_budget(
    d: &DistanceMatrix,
    k: usize,
    budget: usize,
) -> Result<SpreadResult, InvariantError> {
    if k == 0 || k > d.n() {
        return Err(InvariantError::InvalidParameter(format!(
            "k must be in 1..={}, got {k}",
            d.n()
        )));
    }
    let mut best = SpreadResult {
        value: f64::INFINITY,
        witness: Vec::new(),
    };
    let mut current: Vec<usize> = Vec::with_capacity(k);
    let mut visited = 0usize;
    extend_subset(d, k, budget, &mut visited, &mut current, 0.0, 0, &mut best)?;
    Ok(best)
}

#[allow(clippy::too_many_arguments)]
fn extend_subset(
    d: &DistanceMatrix,
    k: usize,
    budget: usize,
    visited: &mut usize,
    current: &mut Vec<usize>,
    diam: f64,
    start: usize,
    best: &mut SpreadResult,
) -> Result<(), InvariantError> {
    for v in start..d.n() {
        let new_diam = current.iter().map(|&a| d.dist(a, v)).fold(diam, f64::max);
        if new_diam >= best.value {
            continue; // any superset is at least this wide
        }
        current.push(v);
        *visited += 1;
        if *visited > budget {
            return Err(InvariantError::BudgetExceeded(*visited));
        }
        let score = new_diam.max(covering_radius(d, current));
        if score < best.value {
            best.value = score;
            best.witness = current.clone();
        }
        if current.len() < k {
            extend_subset(d, k, budget, visited, current, new_diam, v + 1, best)?;
        }
        current.pop();
    }
    Ok(())
}

/// Spread estimate with the subset-size budget it was computed at.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadEstimate {
    pub value: f64,
    pub witness: Vec<usize>,
    /// Exact iff subsets up to the full point count were allowed.
    pub exact: bool,
}

/// `spread = inf_k spread_k`. Since `spread_k` is non-increasing in `k`,
/// the infimum over `k <= k_budget` is `spread_{k_budget}`; it is exact for
/// the finite space when `k_budget = n`, an upper bound otherwise.
pub fn spread(d: &DistanceMatrix, k_budget: usize) -> Result<SpreadEstimate, InvariantError> {
    spread_with_budget(d, k_budget, DEFAULT_SUBSET_BUDGET)
}

pub fn spread_with_budget(
    d: &DistanceMatrix,
    k_budget: usize,
    subset_budget: usize,
) -> Result<SpreadEstimate, InvariantError> {
    let r = spread_k_with_budget(d, k_budget, subset_budget)?;
    Ok(SpreadEstimate {
        value: r.value,
        witness: r.witness,
        exact: k_budget >= d.n(),
    })
}

/// Minimal δ satisfying the four-point condition
/// `d(w,x) + d(y,z) <= max(d(w,y) + d(x,z), d(x,y) + d(w,z)) + δ`
/// over all ordered quadruples, repeats included. O(n⁴).
pub fn hyperbolicity(d: &DistanceMatrix) -> f64 {
    let n = d.n();
    (0..n)
        .into_par_iter()
        .map(|w| {
            let mut worst = 0.0f64;
            for x in 0..n {
                let wx = d.dist(w, x);
                for y in 0..n {
                    let wy = d.dist(w, y);
                    let xy = d.dist(x, y);
                    for z in 0..n {
                        let lhs = wx + d.dist(y, z);
                        let rhs = (wy + d.dist(x, z)).max(xy + d.dist(w, z));
                        worst = worst.max(lhs - rhs);
                    }
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

/// Right endpoint of ψ's domain: `arccos(-1/(n+1))`.
pub fn jung_domain_max(n: usize) -> f64 {
    (-1.0 / (n as f64 + 1.0)).acos()
}

/// Jung covering radius for the `n`-sphere:
/// `ψ(D) = arccos(√((1 + (n+1) cos D) / (n+2)))` on `[0, arccos(-1/(n+1))]`.
///
/// ψ has a square-root singularity at the right endpoint, where the direct
/// formula loses half the significand; the representable endpoint maps to
/// the closed-form value π/2.
pub fn jung_psi(n: usize, diam: f64) -> Result<f64, InvariantError> {
    if n < 1 {
        return Err(InvariantError::InvalidParameter("n must be >= 1".into()));
    }
    let dmax = jung_domain_max(n);
    if !(0.0..=dmax).contains(&diam) {
        return Err(InvariantError::DomainError {
            value: diam,
            max: dmax,
        });
    }
    if diam == dmax {
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    let m = n as f64;
    let arg = (1.0 + (m + 1.0) * diam.cos()) / (m + 2.0);
    Ok(arg.clamp(0.0, 1.0).sqrt().acos())
}

/// Generalized strong filling radius: half the length of the largest
/// dimension-`k` bar. For an `n`-manifold sample at `k = n` this estimates
/// the filling radius, whose bar is `(0, 2 FillRad]`.
pub fn sfillrad(b: &Barcode, k: usize) -> f64 {
    0.5 * max_persistence(b, k)
}

/// One bound evaluation. Asserted bounds hold for every compact metric
/// space; diagnostic ones assume a geodesic space and are reported only.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub name: &'static str,
    pub asserted: bool,
    pub satisfied: bool,
    pub lhs: f64,
    pub rhs: f64,
}

/// Invariants of one space together with the bound checks against its
/// barcode.
#[derive(Debug, Clone)]
pub struct InvariantReport {
    pub diameter: f64,
    pub radius: f64,
    pub spread_k: BTreeMap<usize, f64>,
    pub spread: f64,
    pub spread_exact: bool,
    pub hyperbolicity: f64,
    pub sfillrad: BTreeMap<usize, f64>,
    /// sfillrad restricted to bars born at 0 (within `birth_tol`); the
    /// filling-radius estimate proper.
    pub fillrad_zero_birth: BTreeMap<usize, f64>,
    pub bounds: Vec<BoundCheck>,
}

impl InvariantReport {
    pub fn asserted_bounds_hold(&self) -> bool {
        self.bounds.iter().all(|b| !b.asserted || b.satisfied)
    }
}

pub struct BoundsConfig {
    pub subset_budget: usize,
    /// Tolerance under which a bar's birth counts as zero for the
    /// filling-radius estimate (the sampling resolution).
    pub birth_tol: f64,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        BoundsConfig {
            subset_budget: DEFAULT_SUBSET_BUDGET,
            birth_tol: 0.0,
        }
    }
}

/// Evaluates the invariants of `d` and checks its barcode against them.
///
/// Asserted: `length(I) <= spread(X)` for every bar with `dim >= 1`, and
/// `death <= spread_1(X)` for every finite bar with positive birth.
/// Diagnostic (they assume geodesic `X`): `length(I) <= (2/3) diam(X)` and
/// `death <= 2 hyp(X)`.
pub fn bounds_report(
    d: &DistanceMatrix,
    b: &Barcode,
    cfg: &BoundsConfig,
) -> Result<InvariantReport, InvariantError> {
    let n = d.n();
    // largest k whose cumulative subset count stays within budget
    let mut k_max = 1usize;
    let mut total = 0f64;
    for k in 1..=n {
        let mut binom = 1f64;
        for i in 0..k {
            binom = binom * (n - i) as f64 / (i + 1) as f64;
        }
        total += binom;
        if total > cfg.subset_budget as f64 {
            break;
        }
        k_max = k;
    }
    let mut spread_map = BTreeMap::new();
    for k in 1..=k_max {
        spread_map.insert(k, spread_k_with_budget(d, k, cfg.subset_budget)?.value);
    }
    let spread_est = SpreadEstimate {
        value: spread_map[&k_max],
        witness: Vec::new(),
        exact: k_max == n,
    };
    let radius = spread_map[&1];
    let hyp = hyperbolicity(d);
    let diameter = d.diameter();

    let mut sfill = BTreeMap::new();
    let mut fill0 = BTreeMap::new();
    for dim in b.dims() {
        sfill.insert(dim, sfillrad(b, dim));
        let longest_zero_birth = b
            .in_dim(dim)
            .iter()
            .filter(|i| i.birth <= cfg.birth_tol)
            .map(|i| i.length())
            .fold(0.0, f64::max);
        fill0.insert(dim, 0.5 * longest_zero_birth);
    }

    let positive_bars = || b.intervals().iter().filter(|i| i.dim >= 1);
    let max_len = positive_bars()
        .filter(|i| !i.is_essential())
        .map(|i| i.length())
        .fold(0.0, f64::max);
    let max_death_pos_birth = positive_bars()
        .filter(|i| i.birth > 0.0 && !i.is_essential())
        .map(|i| i.death)
        .fold(0.0, f64::max);
    let max_death = positive_bars()
        .filter(|i| !i.is_essential())
        .map(|i| i.death)
        .fold(0.0, f64::max);

    let bounds = vec![
        BoundCheck {
            name: "bar-length <= spread",
            asserted: true,
            satisfied: max_len <= spread_est.value + BOUND_TOL,
            lhs: max_len,
            rhs: spread_est.value,
        },
        BoundCheck {
            name: "positive-birth death <= radius",
            asserted: true,
            satisfied: max_death_pos_birth <= radius + BOUND_TOL,
            lhs: max_death_pos_birth,
            rhs: radius,
        },
        BoundCheck {
            name: "bar-length <= (2/3) diameter (geodesic only)",
            asserted: false,
            satisfied: max_len <= 2.0 / 3.0 * diameter + BOUND_TOL,
            lhs: max_len,
            rhs: 2.0 / 3.0 * diameter,
        },
        BoundCheck {
            name: "death <= 2 hyperbolicity (geodesic only)",
            asserted: false,
            satisfied: max_death <= 2.0 * hyp + BOUND_TOL,
            lhs: max_death,
            rhs: 2.0 * hyp,
        },
    ];

    Ok(InvariantReport {
        diameter,
        radius,
        spread_k: spread_map,
        spread: spread_est.value,
        spread_exact: spread_est.exact,
        hyperbolicity: hyp,
        sfillrad: sfill,
        fillrad_zero_birth: fill0,
        bounds,
    })
}
