//! Filtered simplicial complexes.
//!
//! Two constructions are provided: the open Vietoris-Rips flag filtration of
//! a distance matrix, and the open Čech filtration of points in `R^m` with
//! the ℓ∞ ambient metric. Filtration values are stored as reals and read
//! with open semantics: a simplex is present at level `r` iff `value < r`.

use crate::metric::DistanceMatrix;
use rayon::prelude::*;
use std::sync::atomic::{AtomicUsize, Ordering};
use thiserror::Error;

/// Default ceiling on the number of simplices a single construction may emit.
pub const DEFAULT_SIMPLEX_BUDGET: usize = 12_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum ComplexError {
    #[error("simplex budget exceeded: at least {0} simplices")]
    CapExceeded(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// One weighted simplex: strictly increasing vertex list plus its filtration
/// value (the diameter for flag complexes).
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    pub vertices: Vec<u32>,
    pub value: f64,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// A filtration: simplices sorted by `(value, dimension, lexicographic
/// vertices)`, so faces always precede cofaces. Present at level `r` iff
/// `value < r` (open semantics).
#[derive(Debug, Clone)]
pub struct Filtration {
    simplices: Vec<Simplex>,
    max_dim: usize,
    r_max: f64,
}

impl Filtration {
    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Simplices with `value <= c`; the complex seen at any level in
    /// `(c, next critical value]`.
    pub fn simplices_up_to(&self, c: f64) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter().take_while(move |s| s.value <= c)
    }

    /// Distinct filtration values in increasing order.
    pub fn critical_values(&self) -> Vec<f64> {
        let mut vals: Vec<f64> = self.simplices.iter().map(|s| s.value).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        vals
    }

    /// Debug export: one line `value dim v0 v1 ... vk` per simplex, sorted.
    pub fn to_debug_text(&self) -> String {
        let mut out = String::new();
        for s in &self.simplices {
            out.push_str(&format!("{} {}", s.value, s.dim()));
            for v in &s.vertices {
                out.push_str(&format!(" {v}"));
            }
            out.push('\n');
        }
        out
    }

    fn from_unsorted(mut simplices: Vec<Simplex>, max_dim: usize, r_max: f64) -> Self {
        simplices.sort_by(|a, b| {
            a.value
                .total_cmp(&b.value)
                .then_with(|| a.vertices.len().cmp(&b.vertices.len()))
                .then_with(|| a.vertices.cmp(&b.vertices))
        });
        Filtration {
            simplices,
            max_dim,
            r_max,
        }
    }
}

/// Bitset adjacency rows over u64 blocks.
struct Adjacency {
    blocks: usize,
    rows: Vec<u64>,
}

impl Adjacency {
    fn new(n: usize) -> Self {
        let blocks = n.div_ceil(64);
        Adjacency {
            blocks,
            rows: vec![0; n * blocks],
        }
    }

    fn set(&mut self, i: usize, j: usize) {
        self.rows[i * self.blocks + j / 64] |= 1 << (j % 64);
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.blocks..(i + 1) * self.blocks]
    }
}

fn intersect_above(row: &[u64], cand: &[u64], above: usize, out: &mut Vec<u64>) {
    out.clear();
    out.extend(row.iter().zip(cand).map(|(a, b)| a & b));
    // mask off indices <= above
    let blk = above / 64;
    for b in out.iter_mut().take(blk) {
        *b = 0;
    }
    if blk < out.len() {
        let shift = above % 64 + 1;
        out[blk] &= if shift == 64 { 0 } else { !0u64 << shift };
    }
}

fn iter_bits(bits: &[u64]) -> impl Iterator<Item = usize> + '_ {
    bits.iter().enumerate().flat_map(|(bi, &word)| {
        let mut w = word;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(bi * 64 + t)
            }
        })
    })
}

/// The open Vietoris-Rips flag filtration of a finite metric space.
///
/// Contains every simplex on at most `max_dim + 1` vertices whose diameter
/// (max pairwise distance) is below `r_max` (strictly below when `r_max` is
/// finite); `value = diameter`, vertices enter at 0. Enumeration expands
/// cliques of the threshold graph rather than scanning all subsets.
pub fn vr_filtration(
    d: &DistanceMatrix,
    max_dim: usize,
    r_max: f64,
) -> Result<Filtration, ComplexError> {
    vr_filtration_with_budget(d, max_dim, r_max, DEFAULT_SIMPLEX_BUDGET)
}

pub fn vr_filtration_with_budget(
    d: &DistanceMatrix,
    max_dim: usize,
    r_max: f64,
    budget: usize,
) -> Result<Filtration, ComplexError> {
    if !(r_max > 0.0) {
        return Err(ComplexError::InvalidParameter(
            "r_max must be positive".into(),
        ));
    }
    let n = d.n();
    let mut adj = Adjacency::new(n);
    for i in 0..n {
        for j in 0..n {
            if i != j && d.dist(i, j) < r_max {
                adj.set(i, j);
            }
        }
    }
    let emitted = AtomicUsize::new(0);
    let per_root: Result<Vec<Vec<Simplex>>, ComplexError> = (0..n)
        .into_par_iter()
        .map(|root| {
            let mut out = Vec::new();
            let mut stack_verts = vec![root as u32];
            let mut cand = vec![0u64; adj.blocks];
            intersect_above(adj.row(root), &vec![u64::MAX; adj.blocks], root, &mut cand);
            expand_flag(
                d,
                &adj,
                max_dim,
                budget,
                &emitted,
                &mut stack_verts,
                0.0,
                cand,
                &mut out,
            )?;
            out.push(Simplex {
                vertices: vec![root as u32],
                value: 0.0,
            });
            emit_count(&emitted, budget, 1)?;
            Ok(out)
        })
        .collect();
    let simplices: Vec<Simplex> = per_root?.into_iter().flatten().collect();
    Ok(Filtration::from_unsorted(simplices, max_dim, r_max))
}

fn emit_count(emitted: &AtomicUsize, budget: usize, k: usize) -> Result<(), ComplexError> {
    let c = emitted.fetch_add(k, Ordering::Relaxed) + k;
    if c > budget {
        return Err(ComplexError::CapExceeded(c));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn expand_flag(
    d: &DistanceMatrix,
    adj: &Adjacency,
    max_dim: usize,
    budget: usize,
    emitted: &AtomicUsize,
    verts: &mut Vec<u32>,
    value: f64,
    cand: Vec<u64>,
    out: &mut Vec<Simplex>,
) -> Result<(), ComplexError> {
    if verts.len() == max_dim + 1 {
        return Ok(());
    }
    let mut next_cand = Vec::new();
    for w in iter_bits(&cand) {
        let new_value = verts
            .iter()
            .map(|&v| d.dist(v as usize, w))
            .fold(value, f64::max);
        verts.push(w as u32);
        out.push(Simplex {
            vertices: verts.clone(),
            value: new_value,
        });
        emit_count(emitted, budget, 1)?;
        intersect_above(adj.row(w), &cand, w, &mut next_cand);
        expand_flag(
            d,
            adj,
            max_dim,
            budget,
            emitted,
            verts,
            new_value,
            std::mem::take(&mut next_cand),
            out,
        )?;
        verts.pop();
    }
    Ok(())
}

/// Čech value of a point set in ℓ∞ ambient space: open balls of radius `r`
/// around the points share a point iff their coordinate intervals all
/// overlap, which happens exactly when `r` exceeds half the largest
/// per-coordinate spread.
fn cech_linf_value(coords: &[Vec<f64>], verts: &[u32]) -> f64 {
    let m = coords[0].len();
    let mut worst = 0.0f64;
    for k in 0..m {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in verts {
            let x = coords[v as usize][k];
            lo = lo.min(x);
            hi = hi.max(x);
        }
        worst = worst.max(hi - lo);
    }
    0.5 * worst
}

/// The open Čech filtration of points in `(R^m, ℓ∞)`, by per-coordinate
/// interval intersection. `value(σ) = ½ max_k (max_{i∈σ} x_i[k] - min x_i[k])`.
pub fn cech_linf_filtration(
    coords: &[Vec<f64>],
    max_dim: usize,
    r_max: f64,
) -> Result<Filtration, ComplexError> {
    cech_linf_filtration_with_budget(coords, max_dim, r_max, DEFAULT_SIMPLEX_BUDGET)
}

pub fn cech_linf_filtration_with_budget(
    coords: &[Vec<f64>],
    max_dim: usize,
    r_max: f64,
    budget: usize,
) -> Result<Filtration, ComplexError> {
    if coords.is_empty() {
        return Err(ComplexError::InvalidParameter(
            "coords must be nonempty".into(),
        ));
    }
    if !(r_max > 0.0) {
        return Err(ComplexError::InvalidParameter(
            "r_max must be positive".into(),
        ));
    }
    let m = coords[0].len();
    if m == 0 || coords.iter().any(|p| p.len() != m) {
        return Err(ComplexError::InvalidParameter(
            "coords rows must share a positive dimension".into(),
        ));
    }
    let n = coords.len();
    let mut adj = Adjacency::new(n);
    for i in 0..n {
        for j in 0..n {
            if i != j && cech_linf_value(coords, &[i as u32, j as u32]) < r_max {
                adj.set(i, j);
            }
        }
    }
    let emitted = AtomicUsize::new(0);
    let mut simplices = Vec::new();
    let mut verts: Vec<u32> = Vec::new();
    for root in 0..n {
        verts.clear();
        verts.push(root as u32);
        simplices.push(Simplex {
            vertices: verts.clone(),
            value: 0.0,
        });
        emit_count(&emitted, budget, 1)?;
        let mut cand = vec![0u64; adj.blocks];
        intersect_above(adj.row(root), &vec![u64::MAX; adj.blocks], root, &mut cand);
        expand_cech(
            coords,
            &adj,
            max_dim,
            r_max,
            budget,
            &emitted,
            &mut verts,
            cand,
            &mut simplices,
        )?;
    }
    Ok(Filtration::from_unsorted(simplices, max_dim, r_max))
}

#[allow(clippy::too_many_arguments)]
fn expand_cech(
    coords: &[Vec<f64>],
    adj: &Adjacency,
    max_dim: usize,
    r_max: f64,
    budget: usize,
    emitted: &AtomicUsize,
    verts: &mut Vec<u32>,
    cand: Vec<u64>,
    out: &mut Vec<Simplex>,
) -> Result<(), ComplexError> {
    if verts.len() == max_dim + 1 {
        return Ok(());
    }
    let mut next_cand = Vec::new();
    for w in iter_bits(&cand) {
        verts.push(w as u32);
        let value = cech_linf_value(coords, verts);
        if value < r_max {
            out.push(Simplex {
                vertices: verts.clone(),
                value,
            });
            emit_count(emitted, budget, 1)?;
            intersect_above(adj.row(w), &cand, w, &mut next_cand);
            expand_cech(
                coords,
                adj,
                max_dim,
                r_max,
                budget,
                emitted,
                verts,
                std::mem::take(&mut next_cand),
                out,
            )?;
        }
        verts.pop();
    }
    Ok(())
}

/// Outcome of the Čech-vs-Rips coincidence check.
#[derive(Debug, Clone)]
pub struct CechVrReport {
    pub ok: bool,
    pub simplices_checked: usize,
    /// `(vertices, 2 * cech_value, vr_value)` of the first disagreement.
    pub first_mismatch: Option<(Vec<u32>, f64, f64)>,
}

/// Checks that the ℓ∞-Čech filtration at radius `r` equals the Vietoris-Rips
/// filtration at `2r` on the same points, simplex by simplex.
///
/// The two values are produced by independent code paths: per-coordinate
/// interval intersection on one side, pairwise ℓ∞ diameter on the other.
/// Agreement is required within `1e-12`.
pub fn check_cech_vr(coords: &[Vec<f64>], max_dim: usize) -> Result<CechVrReport, ComplexError> {
    let cech = cech_linf_filtration(coords, max_dim, f64::INFINITY)?;
    let raw: Vec<Vec<f64>> = coords
        .iter()
        .map(|p| {
            coords
                .iter()
                .map(|q| {
                    p.iter()
                        .zip(q)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .collect()
        })
        .collect();
    let dm = crate::metric::DistanceMatrix::validate(&raw)
        .map_err(|e| ComplexError::InvalidParameter(format!("coords induce no metric: {e}")))?;
    let vr = vr_filtration(&dm, max_dim, f64::INFINITY)?;
    let mut vr_values: std::collections::HashMap<&[u32], f64> =
        std::collections::HashMap::with_capacity(vr.len());
    for s in vr.simplices() {
        vr_values.insert(&s.vertices, s.value);
    }
    let mut checked = 0;
    for s in cech.simplices() {
        let doubled = 2.0 * s.value;
        let vr_value = match vr_values.get(s.vertices.as_slice()) {
            Some(&v) => v,
            None => {
                return Ok(CechVrReport {
                    ok: false,
                    simplices_checked: checked,
                    first_mismatch: Some((s.vertices.clone(), doubled, f64::NAN)),
                })
            }
        };
        checked += 1;
        if (doubled - vr_value).abs() > 1e-12 {
            return Ok(CechVrReport {
                ok: false,
                simplices_checked: checked,
                first_mismatch: Some((s.vertices.clone(), doubled, vr_value)),
            });
        }
    }
    let ok = checked == vr.len();
    Ok(CechVrReport {
        ok,
        simplices_checked: checked,
        first_mismatch: if ok {
            None
        } else {
            Some((vec![], f64::NAN, f64::NAN))
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{sample_circle, DistanceMatrix};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn simple(verts: &[u32], filtration: &Filtration) -> Option<f64> {
        filtration
            .simplices()
            .iter()
            .find(|s| s.vertices == verts)
            .map(|s| s.value)
    }

    #[test]
    fn two_point_filtration() {
        let d = DistanceMatrix::validate(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let f = vr_filtration(&d, 1, f64::INFINITY).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(simple(&[0], &f), Some(0.0));
        assert_eq!(simple(&[1], &f), Some(0.0));
        assert_eq!(simple(&[0, 1], &f), Some(1.0));
    }

    #[test]
    fn equilateral_triangle_counts() {
        let d = DistanceMatrix::validate(&[
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        let f = vr_filtration(&d, 2, f64::INFINITY).unwrap();
        let by_dim = |k: usize| f.simplices().iter().filter(|s| s.dim() == k).count();
        assert_eq!(by_dim(0), 3);
        assert_eq!(by_dim(1), 3);
        assert_eq!(by_dim(2), 1);
        assert_eq!(simple(&[0, 1, 2], &f), Some(1.0));
    }

    #[test]
    fn square_circle_sample_structure() {
        let d = sample_circle(4, 1.0).unwrap();
        let f = vr_filtration(&d, 2, f64::INFINITY).unwrap();
        let edges: Vec<f64> = f
            .simplices()
            .iter()
            .filter(|s| s.dim() == 1)
            .map(|s| s.value)
            .collect();
        assert_eq!(edges.iter().filter(|&&v| v == FRAC_PI_2).count(), 4);
        assert_eq!(edges.iter().filter(|&&v| v == PI).count(), 2);
        let tris: Vec<f64> = f
            .simplices()
            .iter()
            .filter(|s| s.dim() == 2)
            .map(|s| s.value)
            .collect();
        assert_eq!(tris.len(), 4);
        assert!(tris.iter().all(|&v| v == PI));
    }

    #[test]
    fn r_max_is_strict() {
        let d = DistanceMatrix::validate(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let f = vr_filtration(&d, 1, 1.0).unwrap();
        assert_eq!(f.len(), 2); // edge at exactly r_max excluded
        let g = vr_filtration(&d, 1, f64::next_up(1.0)).unwrap();
        assert_eq!(g.len(), 3);
    }

    #[test]
    fn faces_precede_cofaces_and_values_monotone() {
        let d = sample_circle(7, 1.0).unwrap();
        let f = vr_filtration(&d, 3, f64::INFINITY).unwrap();
        use std::collections::HashMap;
        let mut pos: HashMap<&[u32], (usize, f64)> = HashMap::new();
        for (i, s) in f.simplices().iter().enumerate() {
            pos.insert(&s.vertices, (i, s.value));
        }
        for s in f.simplices() {
            if s.dim() == 0 {
                continue;
            }
            for skip in 0..s.vertices.len() {
                let face: Vec<u32> = s
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != skip)
                    .map(|(_, &v)| v)
                    .collect();
                let (fi, fv) = pos[face.as_slice()];
                let (si, sv) = pos[s.vertices.as_slice()];
                assert!(fi < si);
                assert!(fv <= sv);
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let d = sample_circle(12, 1.0).unwrap();
        let err = vr_filtration_with_budget(&d, 5, f64::INFINITY, 100).unwrap_err();
        assert!(matches!(err, ComplexError::CapExceeded(_)));
        let coords: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let err = cech_linf_filtration_with_budget(&coords, 5, f64::INFINITY, 50).unwrap_err();
        assert!(matches!(err, ComplexError::CapExceeded(_)));
    }

    #[test]
    fn cech_interval_examples() {
        let coords = vec![vec![0.0], vec![1.0]];
        let f = cech_linf_filtration(&coords, 1, f64::INFINITY).unwrap();
        assert_eq!(simple(&[0, 1], &f), Some(0.5));
        let single = cech_linf_filtration(&[vec![0.0, 0.0]], 2, f64::INFINITY).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single.simplices()[0].value, 0.0);
        let tri = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let f = cech_linf_filtration(&tri, 2, f64::INFINITY).unwrap();
        assert_eq!(simple(&[0, 1], &f), Some(0.5));
        assert_eq!(simple(&[0, 2], &f), Some(0.5));
        assert_eq!(simple(&[1, 2], &f), Some(0.5));
        assert_eq!(simple(&[0, 1, 2], &f), Some(0.5));
    }

    #[test]
    fn cech_vr_coincidence() {
        assert!(check_cech_vr(&[vec![0.3, -1.0, 2.0]], 2).unwrap().ok);
        let tri = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(check_cech_vr(&tri, 2).unwrap().ok);
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<Vec<f64>> = (0..10)
            .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let rep = check_cech_vr(&pts, 3).unwrap();
        assert!(rep.ok, "mismatch: {:?}", rep.first_mismatch);
    }

    #[test]
    fn vr_is_isometry_invariant() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let d = sample_circle(6, 1.3).unwrap();
        let f = vr_filtration(&d, 2, f64::INFINITY).unwrap();
        let mut perm: Vec<usize> = (0..6).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(2));
        let raw: Vec<Vec<f64>> = (0..6)
            .map(|i| (0..6).map(|j| d.dist(perm[i], perm[j])).collect())
            .collect();
        let dp = DistanceMatrix::validate(&raw).unwrap();
        let g = vr_filtration(&dp, 2, f64::INFINITY).unwrap();
        let key = |f: &Filtration| {
            let mut v: Vec<(usize, f64)> =
                f.simplices().iter().map(|s| (s.dim(), s.value)).collect();
            v.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
            v
        };
        assert_eq!(key(&f), key(&g));
    }

    #[test]
    fn debug_text_is_sorted_lines() {
        let d = DistanceMatrix::validate(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let f = vr_filtration(&d, 1, f64::INFINITY).unwrap();
        assert_eq!(f.to_debug_text(), "0 0 0\n0 0 1\n1 1 0 1\n");
    }
}
