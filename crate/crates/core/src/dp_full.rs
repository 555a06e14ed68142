//! Optimal min-ε approximation by full-search dynamic programming.
//!
//! `δ(j, i)` is the least squared error of a `j`-segment chain from the
//! first vertex to vertex `i`:
//!
//! ```text
//! δ(0, 0) = 0
//! δ(j, i) = min over m in [j-1, i-1] of d(m, i) + δ(j-1, m)
//! ```
//!
//! Near-ties keep the smallest `m`. The answer is `sqrt(δ(K, N-1))`. Time
//! is O(K·N²) with O(1) segment costs, space O(K·N).

use crate::curve::{Approximation, Curve, IndexMap};
use crate::error::{Error, Result};
use crate::metrics::{improves, SegmentCostEngine};

/// Work counters reported by the dynamic programs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WorkStats {
    /// `(j, i, m)` triples examined.
    pub transitions: u64,
    /// Largest number of DP cells allocated at once.
    pub peak_cells: usize,
}

/// Full `(K+1) × N` tables of squared-error sums and argmin predecessors.
#[derive(Debug, Clone)]
pub struct DpTableFull {
    k: usize,
    n: usize,
    delta: Vec<f64>,
    back: Vec<u32>,
    transitions: u64,
}

impl DpTableFull {
    /// Fills the tables for `k` segments. Inner ties keep the smallest `m`.
    pub fn build(engine: &SegmentCostEngine, k: usize) -> Result<Self> {
        let n = engine.len();
        if k < 1 || k >= n {
            return Err(Error::InfeasibleK { k, n });
        }
        let mut delta = vec![f64::INFINITY; (k + 1) * n];
        let mut back = vec![u32::MAX; (k + 1) * n];
        delta[0] = 0.0;
        let mut transitions = 0u64;
        for j in 1..=k {
            let (prev, cur) = delta.split_at_mut(j * n);
            let prev = &prev[(j - 1) * n..];
            let cur = &mut cur[..n];
            let back = &mut back[j * n..(j + 1) * n];
            for i in j..n {
                let mut best = f64::INFINITY;
                let mut arg = u32::MAX;
                for m in j - 1..i {
                    let e = engine.cost(m, i) + prev[m];
                    if improves(e, best) {
                        best = e;
                        arg = m as u32;
                    }
                }
                transitions += (i - j + 1) as u64;
                cur[i] = best;
                back[i] = arg;
            }
        }
        Ok(DpTableFull {
            k,
            n,
            delta,
            back,
            transitions,
        })
    }

    /// `δ(j, i)`; infinite when no `j`-segment chain reaches `i`.
    pub fn delta(&self, j: usize, i: usize) -> f64 {
        self.delta[j * self.n + i]
    }

    pub fn segments(&self) -> usize {
        self.k
    }

    pub fn transitions(&self) -> u64 {
        self.transitions
    }

    pub fn cells(&self) -> usize {
        self.delta.len()
    }

    /// Backtracks the optimal `j`-segment chain ending at the last vertex.
    /// The error is recomputed directly with `engine`, which must be the
    /// one the table was built from.
    pub fn backtrack(&self, engine: &SegmentCostEngine, j: usize) -> Result<Approximation> {
        let last = self.n - 1;
        let sq = self.delta(j, last);
        if !sq.is_finite() {
            return Err(Error::InfeasibleK { k: j, n: self.n });
        }
        let mut vertices = vec![last];
        let mut i = last;
        for row in (1..=j).rev() {
            i = self.back[row * self.n + i] as usize;
            vertices.push(i);
        }
        vertices.reverse();
        debug_assert_eq!(vertices[0], 0);
        let error = engine.squared_error(&vertices).sqrt();
        Approximation::new(IndexMap::from_vec_unchecked(vertices), error)
    }
}

/// Globally optimal `k`-segment approximation of `curve`.
pub fn fsdp(curve: &Curve, k: usize) -> Result<Approximation> {
    fsdp_with_engine(&SegmentCostEngine::new(curve), k).map(|(a, _)| a)
}

/// As [`fsdp`], reusing a prebuilt cost engine and reporting work counters.
pub fn fsdp_with_engine(engine: &SegmentCostEngine, k: usize) -> Result<(Approximation, WorkStats)> {
    let table = DpTableFull::build(engine, k)?;
    let approx = table.backtrack(engine, k)?;
    Ok((
        approx,
        WorkStats {
            transitions: table.transitions(),
            peak_cells: table.cells(),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::validate_curve;

    #[test]
    fn zigzag_two_segments() {
        let z = validate_curve(&[[0.0, 0.0], [1.0, 1.0], [2.0, 0.0], [3.0, 1.0], [4.0, 0.0]]).unwrap();
        let a = fsdp(&z, 2).unwrap();
        assert_eq!(a.vertices(), &[0, 1, 4]);
        assert!((a.error() - (8.0f64 / 9.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn collinear_is_exact() {
        let line: Vec<[f64; 2]> = (0..12).map(|i| [i as f64, 0.5 * i as f64]).collect();
        let line = validate_curve(&line).unwrap();
        for k in 1..11 {
            assert_eq!(fsdp(&line, k).unwrap().error(), 0.0);
        }
    }

    #[test]
    fn identity_when_k_is_n_minus_one() {
        let c = validate_curve(&[[0.0], [3.0], [-1.0], [2.0]]).unwrap();
        let a = fsdp(&c, 3).unwrap();
        assert_eq!(a.vertices(), &[0, 1, 2, 3]);
        assert_eq!(a.error(), 0.0);
    }

    #[test]
    fn base_row_is_single_chord() {
        let c = validate_curve(&[[0.0], [3.0], [-1.0], [2.0], [5.0], [0.5]]).unwrap();
        let e = SegmentCostEngine::new(&c);
        let t = DpTableFull::build(&e, 3).unwrap();
        assert_eq!(t.delta(1, 0), f64::INFINITY);
        for i in 1..6 {
            assert_eq!(t.delta(1, i), e.cost(0, i));
        }
        assert_eq!(t.delta(2, 1), f64::INFINITY);
    }

    #[test]
    fn infeasible_k() {
        let c = validate_curve(&[[0.0], [1.0], [2.0]]).unwrap();
        assert_eq!(fsdp(&c, 0), Err(Error::InfeasibleK { k: 0, n: 3 }));
        assert_eq!(fsdp(&c, 3), Err(Error::InfeasibleK { k: 3, n: 3 }));
    }
}
