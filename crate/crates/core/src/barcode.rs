//! Persistence intervals and barcodes.
//!
//! Every interval is half-open `(birth, death]` with `death = +∞` allowed;
//! zero-length intervals are not representable. Barcodes carry the
//! characteristic of the coefficient field they were computed over.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BarcodeError {
    #[error("coefficient fields differ: F{0} vs F{1}")]
    FieldMismatch(u32, u32),
    #[error("barcode has no essential (0, inf) interval in dimension 0")]
    NoEssentialComponent,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// One bar: the half-open interval `(birth, death]` in homology dimension
/// `dim`. `death` is `f64::INFINITY` for essential classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
}

impl Interval {
    pub fn new(dim: usize, birth: f64, death: f64) -> Self {
        debug_assert!(birth >= 0.0 && birth < death);
        Interval { dim, birth, death }
    }

    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }

    pub fn length(&self) -> f64 {
        self.death - self.birth
    }

    fn sort_key(&self) -> (usize, f64, f64) {
        (self.dim, self.birth, self.death)
    }
}

/// A graded multiset of intervals over a fixed prime field.
#[derive(Debug, Clone, PartialEq)]
pub struct Barcode {
    field_char: u32,
    intervals: Vec<Interval>,
}

impl Barcode {
    /// Empty barcode over `F_p`.
    pub fn new(field_char: u32) -> Self {
        Barcode {
            field_char,
            intervals: Vec::new(),
        }
    }

    /// Builds from intervals in any order; the stored order is
    /// `(dim, birth, death)`.
    pub fn from_intervals(field_char: u32, intervals: Vec<Interval>) -> Self {
        let mut b = Barcode {
            field_char,
            intervals,
        };
        b.normalize();
        b
    }

    fn normalize(&mut self) {
        self.intervals.sort_by(|a, b| {
            let (ka, kb) = (a.sort_key(), b.sort_key());
            ka.0.cmp(&kb.0)
                .then(ka.1.total_cmp(&kb.1))
                .then(ka.2.total_cmp(&kb.2))
        });
    }

    pub fn push(&mut self, interval: Interval) {
        self.intervals.push(interval);
        self.normalize();
    }

    pub fn field_char(&self) -> u32 {
        self.field_char
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Intervals of one homology dimension, in `(birth, death)` order.
    pub fn in_dim(&self, dim: usize) -> &[Interval] {
        let lo = self.intervals.partition_point(|i| i.dim < dim);
        let hi = self.intervals.partition_point(|i| i.dim <= dim);
        &self.intervals[lo..hi]
    }

    /// Largest homology dimension carrying an interval, if any.
    pub fn max_dim(&self) -> Option<usize> {
        self.intervals.last().map(|i| i.dim)
    }

    /// Dimensions that carry at least one interval, ascending.
    pub fn dims(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.intervals.iter().map(|i| i.dim).collect();
        v.dedup();
        v
    }

    /// Multiset equality on exact endpoint values.
    pub fn same_multiset(&self, other: &Barcode) -> bool {
        self.intervals.len() == other.intervals.len()
            && self
                .intervals
                .iter()
                .zip(&other.intervals)
                .all(|(a, b)| a.dim == b.dim && a.birth == b.birth && a.death == b.death)
    }

    /// Restriction to dimensions `<= max_dim`.
    pub fn truncated_to_dim(&self, max_dim: usize) -> Barcode {
        Barcode {
            field_char: self.field_char,
            intervals: self
                .intervals
                .iter()
                .cloned()
                .filter(|i| i.dim <= max_dim)
                .collect(),
        }
    }
}

/// Length of the longest dimension-`k` bar: 0 when the dimension is empty,
/// `+∞` when it contains an essential class.
pub fn max_persistence(b: &Barcode, k: usize) -> f64 {
    b.in_dim(k).iter().map(Interval::length).fold(0.0, f64::max)
}

/// Removes exactly one `(0, ∞)` interval from dimension 0, as the reduced
/// homology convention requires for wedge sums.
pub fn reduced_barcode(b: &Barcode) -> Result<Barcode, BarcodeError> {
    let pos = b
        .intervals
        .iter()
        .position(|i| i.dim == 0 && i.birth == 0.0 && i.death == f64::INFINITY)
        .ok_or(BarcodeError::NoEssentialComponent)?;
    let mut intervals = b.intervals.clone();
    intervals.remove(pos);
    Ok(Barcode {
        field_char: b.field_char,
        intervals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn grouping_and_order() {
        let b = Barcode::from_intervals(
            2,
            vec![
                Interval::new(1, 0.5, 2.0),
                Interval::new(0, 0.0, INF),
                Interval::new(0, 0.0, 1.0),
                Interval::new(1, 0.5, 1.0),
            ],
        );
        assert_eq!(b.in_dim(0).len(), 2);
        assert_eq!(b.in_dim(1)[0].death, 1.0);
        assert_eq!(b.in_dim(2).len(), 0);
        assert_eq!(b.dims(), vec![0, 1]);
    }

    #[test]
    fn max_persistence_cases() {
        let b = Barcode::from_intervals(
            2,
            vec![Interval::new(0, 0.0, INF), Interval::new(1, 0.0, 2.0)],
        );
        assert_eq!(max_persistence(&b, 1), 2.0);
        assert_eq!(max_persistence(&b, 3), 0.0);
        assert_eq!(max_persistence(&b, 0), INF);
    }

    #[test]
    fn reduction_removes_one_essential() {
        let b = Barcode::from_intervals(
            2,
            vec![Interval::new(0, 0.0, INF), Interval::new(0, 0.0, 1.0)],
        );
        let r = reduced_barcode(&b).unwrap();
        assert_eq!(r.intervals().len(), 1);
        assert_eq!(r.in_dim(0)[0].death, 1.0);
        let only = Barcode::from_intervals(2, vec![Interval::new(0, 0.0, INF)]);
        assert!(reduced_barcode(&only).unwrap().is_empty());
        let none = Barcode::from_intervals(2, vec![Interval::new(0, 0.0, 1.0)]);
        assert_eq!(
            reduced_barcode(&none),
            Err(BarcodeError::NoEssentialComponent)
        );
    }
}
