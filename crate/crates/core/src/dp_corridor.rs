//! Corridor-constrained dynamic programming (PyCA): one decimation step
//! from a level of `M` vertices down to `K` segments.
//!
//! The upper end `i` of segment `j` is confined to
//! `[Cinf(j), Csup(j)] = [c_j - band, c_j + band]` around the mean position
//! `c_j = j·M/K`, and its lower end `m` to `[i - band, i - 1]`. Costs are
//! charged against the original curve through the level's index map, so
//! every level's error is its L2 distance to the original data.
//!
//! Only `K × (2·band + 1)` cells are stored. The last vertex is pinned to the
//! end of the level.

use crate::curve::{Approximation, Curve, IndexMap};
use crate::dp_full::WorkStats;
use crate::error::{Error, Result};
use crate::metrics::{improves, SegmentCostEngine};

/// Corridor half-width `floor(alpha · level_size / target)`, at least 1.
pub fn compute_band(alpha: f64, level_size: usize, target: usize) -> usize {
    band_from_ratio(alpha * level_size as f64 / target as f64)
}

pub(crate) fn band_from_ratio(x: f64) -> usize {
    // the tiny bias keeps exact products such as 4·1478/33 from flooring low
    ((x + 1e-9).floor() as usize).max(1)
}

/// Zero-based `(Cinf(j), Csup(j))` for segment `j` in `1..=target`.
///
/// The one-based centre `round(j·level_size/target)` maps to vertex
/// `centre - 1`, so `j = target` is always centred on the last vertex.
pub fn corridor_bounds(j: usize, level_size: usize, target: usize, band: usize) -> (usize, usize) {
    let centre = ((j * level_size) as f64 / target as f64).round() as usize;
    let centre = centre.clamp(1, level_size) - 1;
    (
        centre.saturating_sub(band),
        (centre + band).min(level_size - 1),
    )
}

/// Start of the backward search window `[lower_limit(i), i - 1]`.
pub fn lower_limit(i: usize, band: usize) -> usize {
    i.saturating_sub(band)
}

/// Sizes for one corridor-constrained step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorridorParams {
    pub level_size: usize,
    pub target_segments: usize,
    pub band: usize,
}

impl CorridorParams {
    pub fn new(level_size: usize, target_segments: usize, band: usize) -> Result<Self> {
        if target_segments < 1 || target_segments >= level_size {
            return Err(Error::InfeasibleK {
                k: target_segments,
                n: level_size,
            });
        }
        if band < 1 {
            return Err(Error::InvalidParameter("band must be at least 1".into()));
        }
        Ok(CorridorParams {
            level_size,
            target_segments,
            band,
        })
    }

    /// Band derived from `alpha` via [`compute_band`].
    pub fn with_alpha(level_size: usize, target_segments: usize, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if target_segments < 1 || target_segments >= level_size {
            return Err(Error::InfeasibleK {
                k: target_segments,
                n: level_size,
            });
        }
        Self::new(
            level_size,
            target_segments,
            compute_band(alpha, level_size, target_segments),
        )
    }

    /// Target `max(1, round(rho_step · (M - 1)))` for a level of `M` vertices.
    pub fn from_ratio(level_size: usize, rho_step: f64, alpha: f64) -> Result<Self> {
        if !(rho_step > 0.0 && rho_step < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "decimation ratio must lie in (0, 1), got {rho_step}"
            )));
        }
        let target = ((rho_step * (level_size as f64 - 1.0)).round() as usize).max(1);
        Self::with_alpha(level_size, target, alpha)
    }

    fn width(&self) -> usize {
        (2 * self.band + 1).min(self.level_size)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "alpha must be positive, got {alpha}"
        )))
    }
}

/// Banded `δ` and predecessor tables, row `j` covering `[Cinf(j), Csup(j)]`.
#[derive(Debug, Clone)]
pub struct DpTableBanded {
    width: usize,
    lo: Vec<usize>,
    hi: Vec<usize>,
    delta: Vec<f64>,
    back: Vec<u32>,
}

impl DpTableBanded {
    fn new(params: &CorridorParams) -> Self {
        let k = params.target_segments;
        let width = params.width();
        let (mut lo, mut hi) = (Vec::with_capacity(k), Vec::with_capacity(k));
        for j in 1..=k {
            let (a, b) = if j == k {
                let last = params.level_size - 1;
                (last, last)
            } else {
                corridor_bounds(j, params.level_size, k, params.band)
            };
            lo.push(a);
            hi.push(b);
        }
        DpTableBanded {
            width,
            lo,
            hi,
            delta: vec![f64::INFINITY; k * width],
            back: vec![u32::MAX; k * width],
        }
    }

    pub fn cells(&self) -> usize {
        self.delta.len()
    }

    /// Row bounds for segment `j` (one-based segment number).
    pub fn bounds(&self, j: usize) -> (usize, usize) {
        (self.lo[j - 1], self.hi[j - 1])
    }

    /// `δ(j, i)` or infinity outside the corridor.
    pub fn delta(&self, j: usize, i: usize) -> f64 {
        let (lo, hi) = self.bounds(j);
        if i < lo || i > hi {
            return f64::INFINITY;
        }
        self.delta[(j - 1) * self.width + i - lo]
    }
}

/// Result of one corridor step.
#[derive(Debug, Clone)]
pub struct PycaOutput {
    /// Selected vertices as original-curve indices, with the L2 error.
    pub approximation: Approximation,
    /// Positions of the selected vertices within the input level.
    pub level_positions: Vec<usize>,
    pub stats: WorkStats,
}

/// Optimal `params.target_segments`-segment sub-chain of `level` within the
/// corridor. `engine` must be built on the original curve that `level`
/// indexes into.
pub fn pyca(engine: &SegmentCostEngine, level: &IndexMap, params: &CorridorParams) -> Result<PycaOutput> {
    let ty = level.as_slice();
    let m_len = ty.len();
    if params.level_size != m_len {
        return Err(Error::InvalidParameter(format!(
            "corridor sized for {} vertices, level has {m_len}",
            params.level_size
        )));
    }
    if ty.last().map(|&v| v + 1) != Some(engine.len()) {
        return Err(Error::InvalidApproximation(
            "level does not span the original curve".into(),
        ));
    }
    let k = params.target_segments;
    let band = params.band;
    let mut table = DpTableBanded::new(params);
    let width = table.width;
    let mut transitions = 0u64;

    // row 0 holds the single cell δ(0, 0) = 0
    let zero = [0.0];
    for j in 1..=k {
        let (lo, hi) = table.bounds(j);
        let (prev_lo, prev_hi) = if j == 1 { (0, 0) } else { table.bounds(j - 1) };
        let (done, rest) = table.delta.split_at_mut((j - 1) * width);
        let prev: &[f64] = if j == 1 {
            &zero
        } else {
            &done[(j - 2) * width..]
        };
        let cur = &mut rest[..width];
        let back = &mut table.back[(j - 1) * width..j * width];
        for i in lo.max(1)..=hi {
            let m_lo = lower_limit(i, band).max(prev_lo);
            let m_hi = (i - 1).min(prev_hi);
            if m_lo > m_hi {
                continue;
            }
            let mut best = f64::INFINITY;
            let mut arg = u32::MAX;
            let end = ty[i];
            for m in m_lo..=m_hi {
                let e = engine.cost(ty[m], end) + prev[m - prev_lo];
                if improves(e, best) {
                    best = e;
                    arg = m as u32;
                }
            }
            transitions += (m_hi - m_lo + 1) as u64;
            cur[i - lo] = best;
            back[i - lo] = arg;
        }
    }

    let last = m_len - 1;
    let sq = table.delta(k, last);
    if !sq.is_finite() {
        return Err(Error::InfeasibleCorridor {
            k,
            band,
            level_size: m_len,
            level: None,
        });
    }
    let mut positions = vec![last];
    let mut i = last;
    for j in (1..=k).rev() {
        let (lo, _) = table.bounds(j);
        i = table.back[(j - 1) * width + i - lo] as usize;
        positions.push(i);
    }
    positions.reverse();
    debug_assert_eq!(positions[0], 0);
    let vertices: Vec<usize> = positions.iter().map(|&p| ty[p]).collect();
    let error = engine.squared_error(&vertices).sqrt();
    Ok(PycaOutput {
        approximation: Approximation::new(IndexMap::from_vec_unchecked(vertices), error)?,
        level_positions: positions,
        stats: WorkStats {
            transitions,
            peak_cells: table.cells(),
        },
    })
}

/// Single-level PyCA on the raw curve (identity index map).
pub fn pyca_curve(curve: &Curve, k: usize, alpha: f64) -> Result<Approximation> {
    let params = CorridorParams::with_alpha(curve.len(), k, alpha)?;
    let engine = SegmentCostEngine::new(curve);
    pyca(&engine, &IndexMap::identity(curve.len()), &params).map(|o| o.approximation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::validate_curve;
    use crate::dp_full::fsdp;

    #[test]
    fn corridor_bounds_examples() {
        // one-based (10, 50)
        assert_eq!(corridor_bounds(3, 100, 10, 20), (9, 49));
        for j in 1..=10 {
            assert_eq!(corridor_bounds(j, 100, 10, 100), (0, 99));
        }
        for band in [1, 5, 17] {
            assert_eq!(corridor_bounds(10, 100, 10, band).1, 99);
        }
    }

    #[test]
    fn lower_limit_examples() {
        // one-based i = 50 -> 30
        assert_eq!(lower_limit(49, 20), 29);
        assert_eq!(lower_limit(4, 20), 0);
        assert_eq!(lower_limit(99, 100), 0);
    }

    #[test]
    fn band_examples() {
        assert_eq!(compute_band(2.0, 100, 10), 20);
        assert_eq!(compute_band(4.0, 1478, 33), 179);
        assert_eq!(compute_band(1.0, 50, 49), 1);
        assert_eq!(compute_band(0.1, 50, 10), 1);
    }

    #[test]
    fn params_validation() {
        assert!(CorridorParams::new(10, 0, 2).is_err());
        assert!(CorridorParams::new(10, 10, 2).is_err());
        assert!(CorridorParams::new(10, 3, 0).is_err());
        assert!(CorridorParams::from_ratio(10, 1.0, 2.0).is_err());
        assert!(CorridorParams::with_alpha(10, 3, 0.0).is_err());
        let p = CorridorParams::from_ratio(11, 0.5, 2.0).unwrap();
        assert_eq!((p.target_segments, p.band), (5, 4));
    }

    #[test]
    fn zigzag_full_band_matches_fsdp() {
        let z = validate_curve(&[[0.0, 0.0], [1.0, 1.0], [2.0, 0.0], [3.0, 1.0], [4.0, 0.0]]).unwrap();
        let a = pyca_curve(&z, 2, 10.0).unwrap();
        assert_eq!(a, fsdp(&z, 2).unwrap());
    }

    #[test]
    fn collinear_level_is_exact() {
        let line: Vec<[f64; 2]> = (0..20).map(|i| [i as f64, 3.0 - i as f64]).collect();
        let line = validate_curve(&line).unwrap();
        let e = SegmentCostEngine::new(&line);
        let level = IndexMap::identity(20);
        for rho in [0.2, 0.5, 0.8] {
            let p = CorridorParams::from_ratio(20, rho, 2.0).unwrap();
            assert_eq!(pyca(&e, &level, &p).unwrap().approximation.error(), 0.0);
        }
    }

    #[test]
    fn narrow_corridor_is_infeasible() {
        // 4 segments over 30 vertices cannot advance 7+ vertices per step with band 1
        let c: Vec<[f64; 1]> = (0..30).map(|i| [(i * i % 7) as f64]).collect();
        let c = validate_curve(&c).unwrap();
        let e = SegmentCostEngine::new(&c);
        let p = CorridorParams::new(30, 4, 1).unwrap();
        assert!(matches!(
            pyca(&e, &IndexMap::identity(30), &p),
            Err(Error::InfeasibleCorridor { k: 4, band: 1, .. })
        ));
    }

    #[test]
    fn rejects_mismatched_level() {
        let c = validate_curve(&[[0.0], [1.0], [0.0], [1.0]]).unwrap();
        let e = SegmentCostEngine::new(&c);
        let p = CorridorParams::new(3, 1, 2).unwrap();
        assert!(pyca(&e, &IndexMap::identity(4), &p).is_err());
        let short = IndexMap::identity(3);
        assert!(pyca(&e, &short, &p).is_err());
    }
}
