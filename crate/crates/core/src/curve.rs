//! Domain types shared by every algorithm: curves, index maps,
//! approximations and multiresolution pyramids.
//!
//! Indices are zero-based throughout the API. Error messages, documents and
//! the command line report them one-based.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// An ordered sequence of `N >= 2` points in `R^p`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    coords: Vec<f64>,
    dim: usize,
}

/// Builds a [`Curve`] from raw coordinate rows, checking length, dimension
/// and finiteness. Errors name the offending point.
pub fn validate_curve<P: AsRef<[f64]>>(raw_points: &[P]) -> Result<Curve> {
    if raw_points.len() < 2 {
        return Err(Error::TooShort {
            len: raw_points.len(),
        });
    }
    let dim = raw_points[0].as_ref().len();
    if dim == 0 {
        return Err(Error::DimensionMismatch {
            index: 0,
            expected: 1,
            found: 0,
        });
    }
    let mut coords = Vec::with_capacity(dim * raw_points.len());
    for (index, p) in raw_points.iter().enumerate() {
        let p = p.as_ref();
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                index,
                expected: dim,
                found: p.len(),
            });
        }
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteCoordinate { index });
        }
        coords.extend_from_slice(p);
    }
    Ok(Curve { coords, dim })
}

impl Curve {
    /// Wraps a row-major coordinate buffer of `len * dim` values.
    pub fn from_flat(coords: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || coords.len() % dim != 0 {
            return Err(Error::InvalidParameter(format!(
                "buffer of {} values is not a whole number of {dim}-d points",
                coords.len()
            )));
        }
        let len = coords.len() / dim;
        if len < 2 {
            return Err(Error::TooShort { len });
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFiniteCoordinate { index: pos / dim });
        }
        Ok(Curve { coords, dim })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false: a curve holds at least two points.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    /// Applies `f` to every point, producing a curve of the same length.
    pub fn map_points<F>(&self, mut f: F) -> Result<Curve>
    where
        F: FnMut(&[f64]) -> Vec<f64>,
    {
        let rows: Vec<Vec<f64>> = self.points().map(&mut f).collect();
        validate_curve(&rows)
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.len() {
            Err(Error::IndexOutOfRange {
                index,
                len: self.len(),
            })
        } else {
            Ok(())
        }
    }
}

/// Point at position `l` on the chord joining `X(m)` and `X(i)`.
///
/// Both endpoints are reproduced exactly.
pub fn interpolate_chord(curve: &Curve, m: usize, i: usize, l: usize) -> Result<Vec<f64>> {
    curve.check_index(m)?;
    curve.check_index(i)?;
    curve.check_index(l)?;
    if m == i {
        return Err(Error::DegenerateChord { index: m });
    }
    if m > i || l < m || l > i {
        return Err(Error::InvalidParameter(format!(
            "chord position {} outside [{}, {}]",
            l + 1,
            m + 1,
            i + 1
        )));
    }
    Ok(chord_point(curve, m, i, l as f64))
}

/// Real-parameter extension of [`interpolate_chord`]; callers guarantee
/// `m < i` are valid indices.
pub fn chord_point(curve: &Curve, m: usize, i: usize, l: f64) -> Vec<f64> {
    let a = curve.point(m);
    if l == m as f64 {
        return a.to_vec();
    }
    let b = curve.point(i);
    if l == i as f64 {
        return b.to_vec();
    }
    let t = (l - m as f64) / (i - m) as f64;
    a.iter().zip(b).map(|(&a, &b)| (b - a) * t + a).collect()
}

/// Strictly increasing map from a level's vertices to original-curve
/// indices, pinned to both curve endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexMap(Vec<usize>);

impl IndexMap {
    /// Validates `indices` against a curve of `n` points.
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        if indices.len() < 2 {
            return Err(Error::InvalidApproximation(format!(
                "{} vertex index(es), at least 2 required",
                indices.len()
            )));
        }
        if indices[0] != 0 {
            return Err(Error::InvalidApproximation(format!(
                "first vertex is {}, expected 1",
                indices[0] + 1
            )));
        }
        let last = *indices.last().unwrap();
        if last + 1 != n {
            return Err(Error::InvalidApproximation(format!(
                "last vertex is {}, expected {n}",
                last + 1
            )));
        }
        if let Some(w) = indices.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidApproximation(format!(
                "vertex indices not strictly increasing at {} -> {}",
                w[0] + 1,
                w[1] + 1
            )));
        }
        Ok(IndexMap(indices))
    }

    pub fn identity(n: usize) -> Self {
        IndexMap((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    /// True when every index of `self` also appears in `finer`.
    pub fn is_subset_of(&self, finer: &IndexMap) -> bool {
        let mut it = finer.0.iter();
        self.0.iter().all(|v| it.any(|w| w == v))
    }

    pub(crate) fn from_vec_unchecked(v: Vec<usize>) -> Self {
        IndexMap(v)
    }
}

/// A K-segment polygonal approximation: `K + 1` original-curve vertex
/// indices and the L2 distance to the original curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Approximation {
    vertices: IndexMap,
    error: f64,
}

impl Approximation {
    pub fn new(vertices: IndexMap, error: f64) -> Result<Self> {
        if !(error >= 0.0) || !error.is_finite() {
            return Err(Error::InvalidApproximation(format!(
                "error must be finite and non-negative, got {error}"
            )));
        }
        Ok(Approximation { vertices, error })
    }

    /// All `n` points kept, zero error.
    pub fn identity(n: usize) -> Self {
        Approximation {
            vertices: IndexMap::identity(n),
            error: 0.0,
        }
    }

    pub fn vertices(&self) -> &[usize] {
        self.vertices.as_slice()
    }

    pub fn index_map(&self) -> &IndexMap {
        &self.vertices
    }

    pub fn error(&self) -> f64 {
        self.error
    }

    pub fn segment_count(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Original-curve length covered (last vertex + 1).
    pub fn curve_len(&self) -> usize {
        self.vertices().last().map_or(0, |&v| v + 1)
    }

    /// Piecewise-linear reconstruction sampled at every original index.
    pub fn reconstruct(&self, curve: &Curve) -> Result<Curve> {
        check_fits(self, curve)?;
        let mut rows = Vec::with_capacity(curve.len());
        for w in self.vertices().windows(2) {
            let (m, i) = (w[0], w[1]);
            for l in m..i {
                rows.push(chord_point(curve, m, i, l as f64));
            }
        }
        rows.push(curve.point(curve.len() - 1).to_vec());
        validate_curve(&rows)
    }

    /// Coordinates of the kept vertices, in order.
    pub fn vertex_points(&self, curve: &Curve) -> Vec<Vec<f64>> {
        self.vertices()
            .iter()
            .map(|&v| curve.point(v).to_vec())
            .collect()
    }
}

pub(crate) fn check_fits(approx: &Approximation, curve: &Curve) -> Result<()> {
    if approx.curve_len() != curve.len() {
        return Err(Error::InvalidApproximation(format!(
            "approximation spans {} points, curve has {}",
            approx.curve_len(),
            curve.len()
        )));
    }
    Ok(())
}

/// Nested approximations ordered fine to coarse. Level 0 is the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pyramid {
    pub levels: Vec<Approximation>,
    pub rho: f64,
    pub alpha: f64,
    /// Number of regular decimation steps `r`; a residual level may follow.
    pub depth: usize,
    /// False when intermediate levels (including the identity) were dropped.
    #[serde(default = "complete_default")]
    pub complete: bool,
}

fn complete_default() -> bool {
    true
}

impl Pyramid {
    pub fn finest(&self) -> &Approximation {
        &self.levels[0]
    }

    pub fn coarsest(&self) -> &Approximation {
        self.levels.last().expect("pyramid has at least one level")
    }

    /// Checks the structural invariants: identity level 0, nestedness,
    /// strictly decreasing segment counts and non-decreasing errors.
    ///
    /// Returns one message per violation; empty means the pyramid is sound.
    pub fn violations(&self, error_tolerance: f64) -> Vec<String> {
        let mut out = Vec::new();
        let Some(first) = self.levels.first() else {
            out.push("pyramid has no levels".to_string());
            return out;
        };
        let n = first.curve_len();
        if self.complete && (first.segment_count() + 1 != n || first.error() != 0.0) {
            out.push("level 0 is not the identity approximation".to_string());
        }
        for (l, pair) in self.levels.windows(2).enumerate() {
            let (fine, coarse) = (&pair[0], &pair[1]);
            if coarse.curve_len() != n {
                out.push(format!("level {} does not span the curve", l + 1));
            }
            if !coarse.index_map().is_subset_of(fine.index_map()) {
                out.push(format!("level {} is not nested in level {l}", l + 1));
            }
            if coarse.segment_count() >= fine.segment_count() {
                out.push(format!(
                    "segment count does not decrease from level {l} to {}",
                    l + 1
                ));
            }
            if coarse.error() + error_tolerance * fine.error().max(1.0) < fine.error() {
                out.push(format!("error decreases from level {l} to {}", l + 1));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri() -> Curve {
        validate_curve(&[[0.0, 0.0], [1.0, 1.0], [2.0, 0.0]]).unwrap()
    }

    #[test]
    fn minimal_curve() {
        let c = validate_curve(&[[0.0, 0.0], [1.0, 1.0]]).unwrap();
        assert_eq!((c.len(), c.dim()), (2, 2));
    }

    #[test]
    fn rejects_short_and_bad_points() {
        assert_eq!(
            validate_curve(&[[0.0, 0.0]]),
            Err(Error::TooShort { len: 1 })
        );
        assert_eq!(
            validate_curve(&[[0.0, 0.0], [1.0, f64::NAN]]),
            Err(Error::NonFiniteCoordinate { index: 1 })
        );
        let e = validate_curve(&[vec![0.0, 0.0], vec![1.0]]).unwrap_err();
        assert_eq!(
            e,
            Error::DimensionMismatch {
                index: 1,
                expected: 2,
                found: 1
            }
        );
        assert_eq!(e.to_string(), "point 2 has dimension 1, expected 2");
    }

    #[test]
    fn chord_midpoint() {
        assert_eq!(interpolate_chord(&tri(), 0, 2, 1).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn chord_endpoints_exact() {
        let c = validate_curve(&[[0.1, 0.7], [0.3, 0.2], [0.9, 0.35]]).unwrap();
        assert_eq!(interpolate_chord(&c, 0, 2, 0).unwrap(), c.point(0));
        assert_eq!(interpolate_chord(&c, 0, 2, 2).unwrap(), c.point(2));
    }

    #[test]
    fn chord_errors() {
        let c = tri();
        assert_eq!(
            interpolate_chord(&c, 1, 1, 1),
            Err(Error::DegenerateChord { index: 1 })
        );
        assert_eq!(
            interpolate_chord(&c, 0, 3, 1),
            Err(Error::IndexOutOfRange { index: 3, len: 3 })
        );
    }

    #[test]
    fn index_map_validation() {
        assert!(IndexMap::new(vec![0, 2, 4], 5).is_ok());
        assert!(IndexMap::new(vec![1, 4], 5).is_err());
        assert!(IndexMap::new(vec![0, 3], 5).is_err());
        assert!(IndexMap::new(vec![0, 2, 2, 4], 5).is_err());
        let fine = IndexMap::new(vec![0, 1, 2, 4], 5).unwrap();
        let coarse = IndexMap::new(vec![0, 2, 4], 5).unwrap();
        assert!(coarse.is_subset_of(&fine));
        assert!(!IndexMap::new(vec![0, 3, 4], 5).unwrap().is_subset_of(&fine));
    }

    #[test]
    fn reconstruct_keeps_vertices() {
        let c = tri();
        let a = Approximation::new(IndexMap::new(vec![0, 2], 3).unwrap(), 1.0).unwrap();
        let r = a.reconstruct(&c).unwrap();
        assert_eq!(r.point(1), &[1.0, 0.0]);
        assert_eq!(r.point(2), c.point(2));
    }
}
