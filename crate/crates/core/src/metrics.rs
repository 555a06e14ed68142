//! Segment cost `d(m, i)`, global L2 error, Rosin fidelity and the
//! exhaustive optimality oracle.

use crate::curve::{check_fits, chord_point, Approximation, Curve, IndexMap};
use crate::error::{Error, Result};

/// Squared error of replacing `X(m..=i)` by the chord from `X(m)` to `X(i)`,
/// by direct summation. Endpoint terms are exactly zero.
pub fn segment_error(curve: &Curve, m: usize, i: usize) -> Result<f64> {
    check_segment(curve.len(), m, i)?;
    Ok(direct_cost(curve, m, i))
}

fn direct_cost(curve: &Curve, m: usize, i: usize) -> f64 {
    (m + 1..i)
        .map(|l| {
            chord_point(curve, m, i, l as f64)
                .iter()
                .zip(curve.point(l))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
        })
        .sum()
}

fn check_segment(len: usize, m: usize, i: usize) -> Result<()> {
    for index in [m, i] {
        if index >= len {
            return Err(Error::IndexOutOfRange { index, len });
        }
    }
    if m == i {
        return Err(Error::DegenerateChord { index: m });
    }
    if m > i {
        return Err(Error::InvalidParameter(format!(
            "segment start {} after end {}",
            m + 1,
            i + 1
        )));
    }
    Ok(())
}

/// Prefix sum kept as an unevaluated pair `hi + lo` (Neumaier), so that
/// range differences stay accurate far into long curves.
#[derive(Debug, Clone, Default)]
struct Prefix {
    hi: Vec<f64>,
    lo: Vec<f64>,
}

impl Prefix {
    fn build(values: impl Iterator<Item = f64>) -> Self {
        let (mut hi, mut lo) = (vec![0.0], vec![0.0]);
        let (mut s, mut c) = (0.0f64, 0.0f64);
        for v in values {
            let t = s + v;
            if s.abs() >= v.abs() {
                c += (s - t) + v;
            } else {
                c += (v - t) + s;
            }
            s = t;
            hi.push(s);
            lo.push(c);
        }
        Prefix { hi, lo }
    }

    /// Sum over indices `m..=i`.
    #[inline]
    fn range(&self, m: usize, i: usize) -> f64 {
        (self.hi[i + 1] - self.hi[m]) + (self.lo[i + 1] - self.lo[m])
    }
}

/// O(1) evaluation of `d(m, i)` from prefix moments of the curve.
///
/// The chord residual is a quadratic in `l`, so the sum over a span only
/// needs the running sums of `X(l)`, `l * X(l)` and `|X(l)|^2`; the sums of
/// `l` and `l^2` have closed forms. Coordinates are centred on the
/// centroid before accumulation.
#[derive(Debug, Clone)]
pub struct SegmentCostEngine {
    len: usize,
    dim: usize,
    centred: Vec<f64>,
    /// Per dimension: sum of y.
    first: Vec<Prefix>,
    /// Per dimension: sum of l * y.
    weighted: Vec<Prefix>,
    /// Sum of |y|^2.
    square: Prefix,
}

/// Relative floor below which a computed cost is indistinguishable from
/// rounding noise and is reported as exactly zero.
const NOISE_FLOOR: f64 = 1e-12;

/// Same for a single chord residual against its operands, a few ulps.
const RESIDUAL_FLOOR: f64 = 1e-15;

impl SegmentCostEngine {
    pub fn new(curve: &Curve) -> Self {
        let (len, dim) = (curve.len(), curve.dim());
        let mut centroid = vec![0.0; dim];
        for p in curve.points() {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= len as f64);
        let centred: Vec<f64> = curve
            .points()
            .flat_map(|p| p.iter().zip(&centroid).map(|(v, c)| v - c))
            .collect();
        let col = |k: usize| centred.iter().skip(k).step_by(dim).copied();
        let first = (0..dim).map(|k| Prefix::build(col(k))).collect();
        let weighted = (0..dim)
            .map(|k| Prefix::build(col(k).enumerate().map(|(l, v)| l as f64 * v)))
            .collect();
        let square = Prefix::build(centred.chunks_exact(dim).map(|p| p.iter().map(|v| v * v).sum()));
        SegmentCostEngine {
            len,
            dim,
            centred,
            first,
            weighted,
            square,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Checked form of [`SegmentCostEngine::cost`].
    pub fn segment_error_fast(&self, m: usize, i: usize) -> Result<f64> {
        check_segment(self.len, m, i)?;
        Ok(self.cost(m, i))
    }

    /// `d(m, i)` for `m < i < len`; the caller guarantees the bounds.
    #[inline]
    pub fn cost(&self, m: usize, i: usize) -> f64 {
        debug_assert!(m < i && i < self.len);
        if i == m + 1 {
            return 0.0;
        }
        let d = self.dim;
        let h = (i - m) as f64;
        let n = h + 1.0;
        let sum_t = n / 2.0;
        let sum_t2 = n * (2.0 * h + 1.0) / (6.0 * h);
        let a = &self.centred[m * d..m * d + d];
        let b = &self.centred[i * d..i * d + d];

        let q = self.square.range(m, i);
        let (mut total, mut mag) = (q, q);
        for k in 0..d {
            let s1 = self.first[k].range(m, i);
            let sl = self.weighted[k].range(m, i);
            let dk = b[k] - a[k];
            // sum over the span of t * (y - a), t = (l - m) / h
            let t_y = (sl - m as f64 * s1) / h - a[k] * sum_t;
            let y2 = -2.0 * a[k] * s1 + n * a[k] * a[k];
            let chord = -2.0 * dk * t_y + dk * dk * sum_t2;
            total += y2 + chord;
            mag += (2.0 * a[k] * s1).abs() + n * a[k] * a[k] + (2.0 * dk * t_y).abs() + dk * dk * sum_t2;
        }
        if total <= NOISE_FLOOR * mag {
            0.0
        } else {
            total
        }
    }

    /// Sum of squared chord residuals over consecutive vertices, summed
    /// directly over the centred points in O(span).
    ///
    /// [`SegmentCostEngine::cost`] carries an absolute rounding error near
    /// 1e-16 of the squared distance to the centroid, which dominates when
    /// many short segments each have tiny residuals. Reported errors use this
    /// instead; the DP only uses `cost` to compare candidates.
    pub fn squared_error(&self, vertices: &[usize]) -> f64 {
        let d = self.dim;
        let mut total = 0.0;
        for w in vertices.windows(2) {
            let (m, i) = (w[0], w[1]);
            let a = &self.centred[m * d..m * d + d];
            let b = &self.centred[i * d..i * d + d];
            let h = (i - m) as f64;
            for l in m + 1..i {
                let t = (l - m) as f64 / h;
                let y = &self.centred[l * d..l * d + d];
                total += (0..d)
                    .map(|k| {
                        let r = a[k] + t * (b[k] - a[k]) - y[k];
                        if r.abs() <= RESIDUAL_FLOOR * (a[k].abs() + b[k].abs() + y[k].abs()) {
                            0.0
                        } else {
                            r * r
                        }
                    })
                    .sum::<f64>();
            }
        }
        total
    }
}

/// L2 distance between `curve` and the piecewise-linear reconstruction from
/// `approx`'s vertices, by direct summation.
///
/// Interior vertices appear in two segment sums; both terms are zero.
pub fn approximation_error(curve: &Curve, approx: &Approximation) -> Result<f64> {
    check_fits(approx, curve)?;
    Ok(index_map_error(curve, approx.index_map()))
}

pub(crate) fn index_map_error(curve: &Curve, vertices: &IndexMap) -> f64 {
    vertices
        .as_slice()
        .windows(2)
        .map(|w| direct_cost(curve, w[0], w[1]))
        .sum::<f64>()
        .sqrt()
}

/// Rosin fidelity `100 * e_min / e`, in percent.
pub fn fidelity(e_min: f64, e: f64) -> Result<f64> {
    if !(e_min >= 0.0 && e >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "errors must be non-negative, got ({e_min}, {e})"
        )));
    }
    if e == 0.0 {
        return if e_min == 0.0 {
            Ok(100.0)
        } else {
            Err(Error::FidelityUndefined { e_min })
        };
    }
    if e < e_min {
        return if e_min - e <= 1e-9 * e_min {
            Ok(100.0)
        } else {
            Err(Error::ReferenceNotOptimal { e_min, e })
        };
    }
    // ratio first: e_min / e <= 1 exactly when e_min <= e
    Ok(100.0 * (e_min / e))
}

/// Relative gap below which two candidate errors count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// True when `candidate` beats `best` by more than the tie tolerance, so
/// that the earliest-seen of two near-equal candidates is kept.
#[inline]
pub(crate) fn improves(candidate: f64, best: f64) -> bool {
    candidate < best && (best == f64::INFINITY || best - candidate > TIE_TOLERANCE * best)
}

pub const BRUTE_FORCE_MAX_N: usize = 22;
pub const BRUTE_FORCE_MAX_K: usize = 6;

/// Exhaustive search over all interior-vertex subsets. Ties (within
/// [`TIE_TOLERANCE`]) go to the lexicographically smallest index sequence.
pub fn brute_force_optimal(curve: &Curve, k: usize) -> Result<Approximation> {
    let n = curve.len();
    if k < 1 || k >= n {
        return Err(Error::InfeasibleK { k, n });
    }
    if n > BRUTE_FORCE_MAX_N || k > BRUTE_FORCE_MAX_K {
        return Err(Error::TooLarge {
            n,
            k,
            max_n: BRUTE_FORCE_MAX_N,
            max_k: BRUTE_FORCE_MAX_K,
        });
    }
    // interior choice: k - 1 indices from 1..=n-2, lexicographic order
    let r = k - 1;
    let mut pick: Vec<usize> = (1..=r).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        let mut vertices = Vec::with_capacity(k + 1);
        vertices.push(0);
        vertices.extend_from_slice(&pick);
        vertices.push(n - 1);
        let sq: f64 = vertices.windows(2).map(|w| direct_cost(curve, w[0], w[1])).sum();
        let better = match &best {
            None => true,
            Some((b, _)) => improves(sq, *b),
        };
        if better {
            best = Some((sq, vertices));
        }
        // advance to the next combination
        let mut pos = r;
        loop {
            if pos == 0 {
                let (sq, v) = best.expect("at least one candidate");
                return Approximation::new(IndexMap::from_vec_unchecked(v), sq.sqrt());
            }
            pos -= 1;
            if pick[pos] < n - 2 - (r - 1 - pos) {
                pick[pos] += 1;
                for q in pos + 1..r {
                    pick[q] = pick[q - 1] + 1;
                }
                break;
            }
        }
    }
}
