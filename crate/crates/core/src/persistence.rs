//! Barcode computation by column reduction over a prime field.
//!
//! The reduction runs on the anti-transposed (coboundary) matrix, dimension
//! by dimension ascending, with the clearing optimization: a simplex paired
//! as a destroyer in one round has a guaranteed-zero column in the next and
//! is skipped. This produces exactly the pairs of the standard descending
//! boundary reduction (the anti-transpose of a reduction is a reduction)
//! while never forming columns for top-dimensional simplices, which
//! dominate flag filtrations.
//!
//! The output pairs each destroyer simplex with the creator it kills;
//! surviving creators become essential `(birth, ∞)` intervals. Pairs whose
//! birth and death values coincide are dropped, so every emitted interval is
//! a genuine half-open `(u, v]` or `(u, ∞)`.

use crate::barcode::{Barcode, Interval};
use crate::complex::{Filtration, Simplex};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PersistenceError {
    #[error(
        "filtration max_dim {filtration_max_dim} cannot certify deaths in homology dimension \
         {homology_max_dim}; need max_dim >= homology_max_dim + 1"
    )]
    InsufficientDimension {
        filtration_max_dim: usize,
        homology_max_dim: usize,
    },
    #[error("{0} is not prime")]
    NotPrime(u32),
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut k = 2u64;
    let p = p as u64;
    while k * k <= p {
        if p % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Arithmetic in `F_p` for word-sized primes.
#[derive(Clone, Copy)]
struct Fp {
    p: u64,
}

impl Fp {
    fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    fn inv(self, a: u64) -> u64 {
        // Fermat: a^(p-2) mod p
        let mut base = a % self.p;
        let mut exp = self.p - 2;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

type Entry = (u32, u32); // (row ordinal, nonzero coefficient)

/// Working column as a lazy max-heap of (row, coefficient) terms. Terms
/// with equal rows are only combined when they surface, so adding an owner
/// column costs a push per entry instead of a full merge.
struct WorkingColumn {
    heap: std::collections::BinaryHeap<Entry>,
}

impl WorkingColumn {
    fn from_entries(entries: Vec<Entry>) -> Self {
        WorkingColumn {
            heap: entries.into(),
        }
    }

    /// Surfaces the current pivot: the largest row with a nonzero combined
    /// coefficient. The pivot term is removed from the heap.
    fn pop_pivot(&mut self, fp: Fp) -> Option<Entry> {
        loop {
            let (row, coeff) = self.heap.pop()?;
            let mut coeff = coeff as u64;
            while let Some(&(r2, c2)) = self.heap.peek() {
                if r2 != row {
                    break;
                }
                self.heap.pop();
                coeff = (coeff + c2 as u64) % fp.p;
            }
            if coeff % fp.p != 0 {
                return Some((row, (coeff % fp.p) as u32));
            }
        }
    }

    /// Adds `lambda` times the owner column, whose pivot entry is known to
    /// cancel the already-popped pivot and is skipped.
    fn add_scaled(&mut self, src: &[Entry], lambda: u64, fp: Fp) {
        for &(r, c) in &src[..src.len() - 1] {
            let scaled = fp.mul(lambda, c as u64);
            if scaled != 0 {
                self.heap.push((r, scaled as u32));
            }
        }
    }

    /// Drains the remaining terms into a sorted entry list.
    fn into_sorted(mut self, fp: Fp, pivot: Entry) -> Vec<Entry> {
        let mut out = Vec::with_capacity(self.heap.len() + 1);
        out.push(pivot);
        while let Some(e) = self.pop_pivot(fp) {
            out.push(e);
        }
        out.reverse();
        out
    }
}

const UNPAIRED: u32 = u32::MAX;

/// Computes the barcode of an open filtration with `F_p` coefficients.
///
/// Requires `f.max_dim() >= homology_max_dim + 1`: without the next layer of
/// simplices the deaths in the top requested dimension would be unreliable.
/// Deaths are `+∞` exactly when the creator is never paired below `r_max`.
pub fn compute_barcode(
    f: &Filtration,
    p: u32,
    homology_max_dim: usize,
) -> Result<Barcode, PersistenceError> {
    if !is_prime(p) {
        return Err(PersistenceError::NotPrime(p));
    }
    if f.max_dim() < homology_max_dim + 1 {
        return Err(PersistenceError::InsufficientDimension {
            filtration_max_dim: f.max_dim(),
            homology_max_dim,
        });
    }
    let fp = Fp { p: p as u64 };

    let top = f.simplices().iter().map(Simplex::dim).max().unwrap_or(0);
    let mut by_dim: Vec<Vec<&Simplex>> = vec![Vec::new(); top + 1];
    for s in f.simplices() {
        by_dim[s.dim()].push(s);
    }

    let mut intervals: Vec<Interval> = Vec::new();
    // destroyed[k][i]: creator i in dim k has a finite death
    let mut destroyed: Vec<Vec<bool>> = by_dim.iter().map(|v| vec![false; v.len()]).collect();
    // destroyer[k][i]: simplex i kills a (k-1)-dimensional class
    let mut destroyer: Vec<Vec<bool>> = by_dim.iter().map(|v| vec![false; v.len()]).collect();

    // rounds above the requested homology dimension influence nothing below
    for k in 0..top.min(homology_max_dim + 1) {
        let n_rows = by_dim[k + 1].len();
        if n_rows == 0 {
            continue;
        }
        let col_ordinal: HashMap<&[u32], u32> = by_dim[k]
            .iter()
            .enumerate()
            .map(|(i, s)| (s.vertices.as_slice(), i as u32))
            .collect();
        // coboundary[i]: cofacets of simplex i as (reversed row ordinal,
        // coefficient), sorted ascending
        let mut coboundary: Vec<Vec<Entry>> = vec![Vec::new(); by_dim[k].len()];
        let mut face: Vec<u32> = Vec::with_capacity(k + 1);
        for (t, tau) in by_dim[k + 1].iter().enumerate().rev() {
            let rev_row = (n_rows - 1 - t) as u32;
            for skip in 0..=k + 1 {
                face.clear();
                face.extend(
                    tau.vertices
                        .iter()
                        .enumerate()
                        .filter(|(x, _)| *x != skip)
                        .map(|(_, &v)| v),
                );
                let i = col_ordinal[face.as_slice()];
                let coeff = if skip % 2 == 0 { 1 } else { fp.neg(1) as u32 };
                coboundary[i as usize].push((rev_row, coeff));
            }
        }

        let mut pivot_owner: Vec<u32> = vec![UNPAIRED; n_rows];
        let mut cols: Vec<Vec<Entry>> = vec![Vec::new(); by_dim[k].len()];
        // anti-transposed column order: descending filtration order
        for i in (0..by_dim[k].len()).rev() {
            if destroyer[k][i] {
                continue; // cleared: its coboundary column reduces to zero
            }
            let mut working = WorkingColumn::from_entries(std::mem::take(&mut coboundary[i]));
            let mut settled = None;
            while let Some((row, coeff)) = working.pop_pivot(fp) {
                let owner = pivot_owner[row as usize];
                if owner == UNPAIRED {
                    settled = Some((row, coeff));
                    break;
                }
                let owner_col = &cols[owner as usize];
                let lead = owner_col.last().unwrap().1;
                let lambda = fp.mul(fp.neg(coeff as u64), fp.inv(lead as u64));
                working.add_scaled(owner_col, lambda, fp);
            }
            if let Some((row, coeff)) = settled {
                pivot_owner[row as usize] = i as u32;
                let t = n_rows - 1 - row as usize;
                destroyed[k][i] = true;
                destroyer[k + 1][t] = true;
                let birth = by_dim[k][i].value;
                let death = by_dim[k + 1][t].value;
                if birth < death {
                    intervals.push(Interval::new(k, birth, death));
                }
                cols[i] = working.into_sorted(fp, (row, coeff));
            }
        }
    }

    for k in 0..=homology_max_dim.min(top) {
        for (i, s) in by_dim[k].iter().enumerate() {
            if !destroyed[k][i] && !destroyer[k][i] {
                intervals.push(Interval::new(k, s.value, f64::INFINITY));
            }
        }
    }

    Ok(Barcode::from_intervals(p, intervals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::vr_filtration;
    use crate::metric::{sample_circle, DistanceMatrix};
    use std::f64::consts::{FRAC_PI_2, PI};

    const INF: f64 = f64::INFINITY;

    #[test]
    fn two_points() {
        let d = DistanceMatrix::validate(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let f = vr_filtration(&d, 1, INF).unwrap();
        let b = compute_barcode(&f, 2, 0).unwrap();
        let h0 = b.in_dim(0);
        assert_eq!(h0.len(), 2);
        assert_eq!((h0[0].birth, h0[0].death), (0.0, 1.0));
        assert_eq!((h0[1].birth, h0[1].death), (0.0, INF));
    }

    #[test]
    fn three_equidistant_points() {
        let d = DistanceMatrix::validate(&[
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        let f = vr_filtration(&d, 2, INF).unwrap();
        let b = compute_barcode(&f, 2, 1).unwrap();
        let h0 = b.in_dim(0);
        assert_eq!(h0.len(), 3);
        assert_eq!((h0[0].birth, h0[0].death), (0.0, 1.0));
        assert_eq!((h0[1].birth, h0[1].death), (0.0, 1.0));
        assert_eq!((h0[2].birth, h0[2].death), (0.0, INF));
        assert!(b.in_dim(1).is_empty());
    }

    #[test]
    fn square_circle_sample() {
        let d = sample_circle(4, 1.0).unwrap();
        let f = vr_filtration(&d, 2, INF).unwrap();
        let b = compute_barcode(&f, 2, 1).unwrap();
        let h1 = b.in_dim(1);
        assert_eq!(h1.len(), 1);
        assert_eq!((h1[0].birth, h1[0].death), (FRAC_PI_2, PI));
        assert_eq!(b.in_dim(0).len(), 4);
        assert_eq!(b.in_dim(0).iter().filter(|i| i.is_essential()).count(), 1);
    }

    #[test]
    fn field_independence_at_desk_scale() {
        for n in [4usize, 6, 9] {
            let d = sample_circle(n, 1.0).unwrap();
            let f = vr_filtration(&d, 2, INF).unwrap();
            let b2 = compute_barcode(&f, 2, 1).unwrap();
            let b3 = compute_barcode(&f, 3, 1).unwrap();
            let b5 = compute_barcode(&f, 5, 1).unwrap();
            assert!(b2.same_multiset(&Barcode::from_intervals(2, b3.intervals().to_vec())));
            assert!(b2.same_multiset(&Barcode::from_intervals(2, b5.intervals().to_vec())));
        }
    }

    #[test]
    fn endpoint_law_holds() {
        let d = sample_circle(9, 1.0).unwrap();
        let f = vr_filtration(&d, 3, INF).unwrap();
        let b = compute_barcode(&f, 2, 2).unwrap();
        for i in b.intervals() {
            assert!(i.birth < i.death);
            assert!(i.birth >= 0.0);
        }
    }

    #[test]
    fn h0_count_equals_point_count() {
        let d = sample_circle(7, 1.0).unwrap();
        let f = vr_filtration(&d, 1, INF).unwrap();
        let b = compute_barcode(&f, 2, 0).unwrap();
        assert_eq!(b.in_dim(0).len(), 7);
        assert_eq!(b.in_dim(0).iter().filter(|i| i.is_essential()).count(), 1);
    }

    #[test]
    fn r_max_truncation_gives_infinite_deaths() {
        // two clusters further apart than r_max stay disconnected
        let d = DistanceMatrix::validate(&[
            vec![0.0, 0.1, 1.0, 1.0],
            vec![0.1, 0.0, 1.0, 1.0],
            vec![1.0, 1.0, 0.0, 0.1],
            vec![1.0, 1.0, 0.1, 0.0],
        ])
        .unwrap();
        let f = vr_filtration(&d, 1, 0.5).unwrap();
        let b = compute_barcode(&f, 2, 0).unwrap();
        assert_eq!(b.in_dim(0).iter().filter(|i| i.is_essential()).count(), 2);
    }

    #[test]
    fn rejects_bad_parameters() {
        let d = sample_circle(4, 1.0).unwrap();
        let f = vr_filtration(&d, 2, INF).unwrap();
        assert_eq!(
            compute_barcode(&f, 4, 1).unwrap_err(),
            PersistenceError::NotPrime(4)
        );
        assert!(matches!(
            compute_barcode(&f, 2, 2).unwrap_err(),
            PersistenceError::InsufficientDimension { .. }
        ));
    }
}
