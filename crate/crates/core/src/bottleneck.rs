//! Exact bottleneck distance between barcodes of one homology dimension.
//!
//! The distance is the infimal cost over partial matchings, where a matched
//! pair costs `max(|birth - birth'|, |death - death'|)` and an unmatched
//! interval costs half its length. The infimum is attained on the finite set
//! of candidate costs (all pairwise displacements and half-lengths), so a
//! binary search over that set with a bipartite feasibility test is exact.
//!
//! Essential intervals form a separate sub-problem matched among themselves
//! by birth displacement; matching an essential interval with a finite one
//! costs `+∞`. This is the standard completion of the definition's implicit
//! `∞` arithmetic.

use crate::barcode::Interval;

/// A witnessing partial matching: `pairs` are index pairs into the two input
/// lists, the rest of the indices are split into the unmatched lists.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    pub unmatched1: Vec<usize>,
    pub unmatched2: Vec<usize>,
    pub cost: f64,
}

fn displacement(a: &Interval, b: &Interval) -> f64 {
    match (a.is_essential(), b.is_essential()) {
        (true, true) => (a.birth - b.birth).abs(),
        (false, false) => (a.birth - b.birth).abs().max((a.death - b.death).abs()),
        _ => f64::INFINITY,
    }
}

fn half_length(a: &Interval) -> f64 {
    0.5 * (a.death - a.birth)
}

/// Bipartite matcher for the diagonal-augmented feasibility graph.
///
/// Left vertices: the `m1` intervals of side 1, then `m2` diagonal slots for
/// side 2. Right vertices: the `m2` intervals of side 2, then `m1` diagonal
/// slots for side 1. Diagonal slots pair with each other freely, so a
/// perfect matching exists iff the barcodes match within cost `c`.
struct Feasibility<'a> {
    side1: &'a [Interval],
    side2: &'a [Interval],
    threshold: f64,
}

impl Feasibility<'_> {
    fn m1(&self) -> usize {
        self.side1.len()
    }

    fn m2(&self) -> usize {
        self.side2.len()
    }

    fn left_count(&self) -> usize {
        self.m1() + self.m2()
    }

    fn right_count(&self) -> usize {
        self.m2() + self.m1()
    }

    fn neighbors(&self, left: usize) -> Vec<usize> {
        let mut out = Vec::new();
        if left < self.m1() {
            let a = &self.side1[left];
            for (j, b) in self.side2.iter().enumerate() {
                if displacement(a, b) <= self.threshold {
                    out.push(j);
                }
            }
            if half_length(a) <= self.threshold {
                out.push(self.m2() + left);
            }
        } else {
            let j = left - self.m1();
            if half_length(&self.side2[j]) <= self.threshold {
                out.push(j);
            }
            out.extend(self.m2()..self.right_count());
        }
        out
    }

    fn max_matching(&self) -> (usize, Vec<Option<usize>>) {
        let mut right_owner: Vec<Option<usize>> = vec![None; self.right_count()];
        let mut size = 0;
        for left in 0..self.left_count() {
            let mut visited = vec![false; self.right_count()];
            if self.augment(left, &mut visited, &mut right_owner) {
                size += 1;
            }
        }
        (size, right_owner)
    }

    fn augment(
        &self,
        left: usize,
        visited: &mut [bool],
        right_owner: &mut Vec<Option<usize>>,
    ) -> bool {
        for r in self.neighbors(left) {
            if visited[r] {
                continue;
            }
            visited[r] = true;
            if right_owner[r].is_none()
                || self.augment(right_owner[r].unwrap(), visited, right_owner)
            {
                right_owner[r] = Some(left);
                return true;
            }
        }
        false
    }

    fn is_perfect(&self) -> Option<Vec<Option<usize>>> {
        let (size, owners) = self.max_matching();
        (size == self.left_count()).then_some(owners)
    }
}

/// Exact bottleneck over finite-death intervals. Returns the minimal cost
/// and, per side-1 index, the matched side-2 index if any.
fn finite_bottleneck(side1: &[Interval], side2: &[Interval]) -> (f64, Vec<(usize, usize)>) {
    if side1.is_empty() && side2.is_empty() {
        return (0.0, Vec::new());
    }
    let mut candidates: Vec<f64> = vec![0.0];
    for a in side1 {
        candidates.push(half_length(a));
        for b in side2 {
            candidates.push(displacement(a, b));
        }
    }
    for b in side2 {
        candidates.push(half_length(b));
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let feasible = |c: f64| {
        Feasibility {
            side1,
            side2,
            threshold: c,
        }
        .is_perfect()
    };
    let mut lo = 0;
    let mut hi = candidates.len() - 1;
    debug_assert!(feasible(candidates[hi]).is_some());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let cost = candidates[lo];
    let owners = feasible(cost).expect("binary search landed on a feasible cost");
    let mut pairs = Vec::new();
    for (r, owner) in owners.iter().enumerate() {
        if r < side2.len() {
            if let Some(l) = owner {
                if *l < side1.len() {
                    pairs.push((*l, r));
                }
            }
        }
    }
    (cost, pairs)
}

/// Bottleneck distance with a witnessing matching.
///
/// Both inputs should come from a single homology dimension; the `dim`
/// fields are not inspected. Returns `+∞` (with everything unmatched on the
/// essential side) when the two barcodes carry different numbers of
/// essential intervals.
pub fn bottleneck(b1: &[Interval], b2: &[Interval]) -> (f64, Matching) {
    let ess1: Vec<usize> = (0..b1.len()).filter(|&i| b1[i].is_essential()).collect();
    let ess2: Vec<usize> = (0..b2.len()).filter(|&i| b2[i].is_essential()).collect();
    let fin1: Vec<usize> = (0..b1.len()).filter(|&i| !b1[i].is_essential()).collect();
    let fin2: Vec<usize> = (0..b2.len()).filter(|&i| !b2[i].is_essential()).collect();

    let side1: Vec<Interval> = fin1.iter().map(|&i| b1[i]).collect();
    let side2: Vec<Interval> = fin2.iter().map(|&i| b2[i]).collect();
    let (finite_cost, finite_pairs) = finite_bottleneck(&side1, &side2);

    let mut pairs: Vec<(usize, usize)> = finite_pairs
        .iter()
        .map(|&(l, r)| (fin1[l], fin2[r]))
        .collect();
    let mut cost = finite_cost;

    if ess1.len() != ess2.len() {
        cost = f64::INFINITY;
    } else if !ess1.is_empty() {
        // sorted-birth pairing minimizes the max displacement on a line
        let mut s1 = ess1.clone();
        let mut s2 = ess2.clone();
        s1.sort_by(|&a, &b| b1[a].birth.total_cmp(&b1[b].birth));
        s2.sort_by(|&a, &b| b2[a].birth.total_cmp(&b2[b].birth));
        for (&i, &j) in s1.iter().zip(&s2) {
            cost = cost.max((b1[i].birth - b2[j].birth).abs());
            pairs.push((i, j));
        }
    }

    pairs.sort_unstable();
    let used1: std::collections::HashSet<usize> = pairs.iter().map(|p| p.0).collect();
    let used2: std::collections::HashSet<usize> = pairs.iter().map(|p| p.1).collect();
    let unmatched1: Vec<usize> = (0..b1.len()).filter(|i| !used1.contains(i)).collect();
    let unmatched2: Vec<usize> = (0..b2.len()).filter(|i| !used2.contains(i)).collect();
    let matching = Matching {
        pairs,
        unmatched1,
        unmatched2,
        cost,
    };
    (cost, matching)
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    fn iv(b: f64, d: f64) -> Interval {
        Interval::new(1, b, d)
    }

    #[test]
    fn identical_singletons() {
        let (d, m) = bottleneck(&[iv(0.0, 2.0)], &[iv(0.0, 2.0)]);
        assert_eq!(d, 0.0);
        assert_eq!(m.pairs, vec![(0, 0)]);
    }

    #[test]
    fn unmatched_costs_half_length() {
        let (d, m) = bottleneck(&[iv(0.0, 2.0)], &[]);
        assert_eq!(d, 1.0);
        assert_eq!(m.unmatched1, vec![0]);
    }

    #[test]
    fn shifted_pair() {
        let (d, _) = bottleneck(&[iv(0.0, 2.0)], &[iv(0.5, 2.5)]);
        assert_eq!(d, 0.5);
    }

    #[test]
    fn deletion_beats_bad_match() {
        // matching would cost 10, deleting both costs max(0.5, 0.45)
        let (d, m) = bottleneck(&[iv(0.0, 1.0)], &[iv(10.0, 10.9)]);
        assert_eq!(d, 0.5);
        assert!(m.pairs.is_empty());
    }

    #[test]
    fn essential_intervals_match_among_themselves() {
        let (d, _) = bottleneck(&[iv(1.0, INF)], &[iv(1.25, INF)]);
        assert_eq!(d, 0.25);
        let (d, _) = bottleneck(&[iv(1.0, INF)], &[iv(1.0, 5.0)]);
        assert_eq!(d, INF);
        let (d, _) = bottleneck(&[iv(1.0, INF), iv(0.0, 1.0)], &[iv(1.0, INF), iv(0.0, 1.0)]);
        assert_eq!(d, 0.0);
    }

    #[test]
    fn symmetric_and_zero_on_self() {
        let a = vec![iv(0.0, 1.0), iv(0.5, 3.0), iv(2.0, INF)];
        let b = vec![iv(0.1, 1.2), iv(1.5, INF), iv(4.0, 4.4)];
        let (dab, _) = bottleneck(&a, &b);
        let (dba, _) = bottleneck(&b, &a);
        assert_eq!(dab, dba);
        let (daa, _) = bottleneck(&a, &a);
        assert_eq!(daa, 0.0);
    }

    #[test]
    fn matching_indices_partition_inputs() {
        let a = vec![iv(0.0, 1.0), iv(0.0, 4.0)];
        let b = vec![iv(0.1, 3.9)];
        let (_, m) = bottleneck(&a, &b);
        let mut seen1: Vec<usize> = m
            .pairs
            .iter()
            .map(|p| p.0)
            .chain(m.unmatched1.iter().cloned())
            .collect();
        seen1.sort_unstable();
        assert_eq!(seen1, vec![0, 1]);
        let mut seen2: Vec<usize> = m
            .pairs
            .iter()
            .map(|p| p.1)
            .chain(m.unmatched2.iter().cloned())
            .collect();
        seen2.sort_unstable();
        assert_eq!(seen2, vec![0]);
    }
}
