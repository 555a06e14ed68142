//! Classical heuristics used as comparison points: Douglas–Peucker
//! splitting and Merge-L2 greedy vertex elimination, both driven to an
//! exact segment count.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::curve::{Approximation, Curve, IndexMap};
use crate::error::{Error, Result};
use crate::metrics::SegmentCostEngine;

fn check_k(k: usize, n: usize) -> Result<()> {
    if k < 1 || k >= n {
        Err(Error::InfeasibleK { k, n })
    } else {
        Ok(())
    }
}

fn finish(engine: &SegmentCostEngine, vertices: Vec<usize>) -> Result<Approximation> {
    let error = engine.squared_error(&vertices).sqrt();
    Approximation::new(IndexMap::from_vec_unchecked(vertices), error)
}

/// Squared distance from `x` to the line through `a` and `b` (to `a` itself
/// when the chord is degenerate, as on closed curves).
fn perpendicular_sq(x: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let (mut vv, mut ww, mut wv) = (0.0, 0.0, 0.0);
    for ((&x, &a), &b) in x.iter().zip(a).zip(b) {
        let v = b - a;
        let w = x - a;
        vv += v * v;
        ww += w * w;
        wv += w * v;
    }
    if vv == 0.0 {
        ww
    } else {
        (ww - wv * wv / vv).max(0.0)
    }
}

/// A splittable span keyed by its worst interior deviation.
#[derive(Debug, Clone, Copy)]
struct Span {
    deviation: f64,
    start: usize,
    end: usize,
    split: usize,
}

impl Span {
    fn measure(curve: &Curve, start: usize, end: usize, evaluations: &mut u64) -> Option<Span> {
        if end < start + 2 {
            return None;
        }
        let (a, b) = (curve.point(start), curve.point(end));
        let mut best = Span {
            deviation: -1.0,
            start,
            end,
            split: start + 1,
        };
        for l in start + 1..end {
            let d = perpendicular_sq(curve.point(l), a, b);
            if d > best.deviation {
                best.deviation = d;
                best.split = l;
            }
        }
        *evaluations += (end - start - 1) as u64;
        Some(best)
    }
}

// max-heap: largest deviation first, then smaller start, then smaller split
impl Ord for Span {
    fn cmp(&self, other: &Self) -> Ordering {
        self.deviation
            .total_cmp(&other.deviation)
            .then_with(|| other.start.cmp(&self.start))
            .then_with(|| other.split.cmp(&self.split))
    }
}

impl PartialOrd for Span {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Span {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Span {}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SplitStats {
    /// Point-to-chord distance evaluations.
    pub evaluations: u64,
}

/// Douglas–Peucker split to exactly `k` segments.
pub fn douglas_peucker(curve: &Curve, k: usize) -> Result<Approximation> {
    douglas_peucker_with_stats(curve, &SegmentCostEngine::new(curve), k).map(|(a, _)| a)
}

/// As [`douglas_peucker`]; `engine` is only used to score the result.
pub fn douglas_peucker_with_stats(
    curve: &Curve,
    engine: &SegmentCostEngine,
    k: usize,
) -> Result<(Approximation, SplitStats)> {
    let n = curve.len();
    check_k(k, n)?;
    let mut stats = SplitStats::default();
    let mut queue = BinaryHeap::new();
    queue.extend(Span::measure(curve, 0, n - 1, &mut stats.evaluations));
    let mut vertices = vec![0, n - 1];
    while vertices.len() < k + 1 {
        // k < n guarantees a span with an interior point remains
        let span = queue.pop().expect("splittable span");
        vertices.push(span.split);
        queue.extend(Span::measure(curve, span.start, span.split, &mut stats.evaluations));
        queue.extend(Span::measure(curve, span.split, span.end, &mut stats.evaluations));
    }
    vertices.sort_unstable();
    Ok((finish(engine, vertices)?, stats))
}

/// Binary min-heap that counts key comparisons.
#[derive(Debug)]
pub struct CountingHeap<T> {
    items: Vec<T>,
    comparisons: u64,
}

impl<T: Ord> CountingHeap<T> {
    pub fn with_capacity(cap: usize) -> Self {
        CountingHeap {
            items: Vec::with_capacity(cap),
            comparisons: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn comparisons(&self) -> u64 {
        self.comparisons
    }

    fn less(&mut self, a: usize, b: usize) -> bool {
        self.comparisons += 1;
        self.items[a] < self.items[b]
    }

    pub fn push(&mut self, item: T) {
        self.items.push(item);
        let mut pos = self.items.len() - 1;
        while pos > 0 {
            let parent = (pos - 1) / 2;
            if !self.less(pos, parent) {
                break;
            }
            self.items.swap(pos, parent);
            pos = parent;
        }
    }

    pub fn pop(&mut self) -> Option<T> {
        if self.items.is_empty() {
            return None;
        }
        let top = self.items.swap_remove(0);
        let len = self.items.len();
        let mut pos = 0;
        loop {
            let left = 2 * pos + 1;
            if left >= len {
                break;
            }
            let right = left + 1;
            let child = if right < len && self.less(right, left) {
                right
            } else {
                left
            };
            if !self.less(child, pos) {
                break;
            }
            self.items.swap(pos, child);
            pos = child;
        }
        Some(top)
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    cost: f64,
    vertex: usize,
    version: u32,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then_with(|| self.vertex.cmp(&other.vertex))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MergeStats {
    pub heap_comparisons: u64,
    pub pushes: u64,
    pub pops: u64,
    /// Popped entries discarded because their vertex changed since.
    pub stale: u64,
}

/// Merge-L2 elimination to exactly `k` segments.
pub fn merge_l2(curve: &Curve, k: usize) -> Result<Approximation> {
    merge_l2_with_stats(&SegmentCostEngine::new(curve), k).map(|(a, _)| a)
}

/// As [`merge_l2`], reporting heap work.
///
/// The cost of removing `v` between surviving neighbours `a` and `b` is
/// `d(a, b) - d(a, v) - d(v, b)` measured on the original points. Entries
/// are never updated in place; a version stamp per vertex marks older
/// entries stale.
pub fn merge_l2_with_stats(engine: &SegmentCostEngine, k: usize) -> Result<(Approximation, MergeStats)> {
    let n = engine.len();
    check_k(k, n)?;
    let mut prev: Vec<usize> = (0..n).map(|v| v.saturating_sub(1)).collect();
    let mut next: Vec<usize> = (0..n).map(|v| (v + 1).min(n - 1)).collect();
    let mut alive = vec![true; n];
    let mut version = vec![0u32; n];
    let cost = |a: usize, v: usize, b: usize| engine.cost(a, b) - engine.cost(a, v) - engine.cost(v, b);

    let mut heap = CountingHeap::with_capacity(n);
    let mut stats = MergeStats::default();
    for v in 1..n - 1 {
        heap.push(Candidate {
            cost: cost(v - 1, v, v + 1),
            vertex: v,
            version: 0,
        });
        stats.pushes += 1;
    }

    let mut survivors = n;
    while survivors > k + 1 {
        let c = heap.pop().expect("interior vertex remains");
        stats.pops += 1;
        if !alive[c.vertex] || c.version != version[c.vertex] {
            stats.stale += 1;
            continue;
        }
        let (a, b) = (prev[c.vertex], next[c.vertex]);
        alive[c.vertex] = false;
        next[a] = b;
        prev[b] = a;
        survivors -= 1;
        for v in [a, b] {
            if v == 0 || v == n - 1 {
                continue;
            }
            version[v] += 1;
            heap.push(Candidate {
                cost: cost(prev[v], v, next[v]),
                vertex: v,
                version: version[v],
            });
            stats.pushes += 1;
        }
    }
    stats.heap_comparisons = heap.comparisons();
    let vertices = (0..n).filter(|&v| alive[v]).collect();
    Ok((finish(engine, vertices)?, stats))
}
