//! Multiresolution driver (MR-PyCA).
//!
//! Starting from the identity level, each step keeps roughly a fraction
//! `rho` of the previous level's segments by running the corridor DP on the
//! previous level's vertices only, so every level is nested in the one
//! before it. A final residual step lands on exactly `K` segments.
//!
//! With `band ≈ alpha / rho` at every step the total work is bounded by
//! `2·alpha²·N / (rho·(1 - rho))`, independent of `K`.

use crate::curve::{Approximation, Curve, Pyramid};
use crate::dp_corridor::{band_from_ratio, pyca, CorridorParams};
use crate::error::{Error, Result};
use crate::metrics::SegmentCostEngine;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MrConfig {
    /// Segment count of the coarsest level.
    pub k: usize,
    pub rho: f64,
    pub alpha: f64,
    /// When false only the final approximation is retained.
    pub keep_all_levels: bool,
}

impl MrConfig {
    pub fn new(k: usize, rho: f64, alpha: f64) -> Self {
        MrConfig {
            k,
            rho,
            alpha,
            keep_all_levels: true,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k < 1 || self.k >= n {
            return Err(Error::InfeasibleK { k: self.k, n });
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "rho must lie in (0, 1), got {}",
                self.rho
            )));
        }
        if !(self.alpha >= 1.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be at least 1, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// The `r >= 0` with `N·rho^(r+1) < K <= N·rho^r`.
pub fn resolution_depth(n: usize, k: usize, rho: f64) -> Result<usize> {
    if k < 1 || k >= n {
        return Err(Error::InfeasibleK { k, n });
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "rho must lie in (0, 1), got {rho}"
        )));
    }
    let (n, k) = (n as f64, k as f64);
    let mut r = 0;
    while n * rho.powi(r as i32 + 1) >= k {
        r += 1;
    }
    Ok(r)
}

/// Upper bound `2·alpha²·N / (rho·(1 - rho))` on the transitions examined
/// by [`mr_pyca`].
pub fn work_bound(n: usize, rho: f64, alpha: f64) -> f64 {
    2.0 * alpha * alpha * n as f64 / (rho * (1.0 - rho))
}

/// Per-level work record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelStats {
    pub segments: usize,
    pub band: usize,
    pub transitions: u64,
    pub cells: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MrStats {
    pub levels: Vec<LevelStats>,
    pub transitions: u64,
    /// Largest DP table allocated by any single step.
    pub peak_dp_cells: usize,
    /// Vertex indices held by the pyramid when the run finishes.
    pub pyramid_cells: usize,
    /// Largest sum of one step's DP cells and the pyramid indices held
    /// while it runs.
    pub peak_live_cells: usize,
}

#[derive(Debug, Clone)]
pub struct MrOutput {
    pub pyramid: Pyramid,
    pub stats: MrStats,
}

/// Builds the nested pyramid down to `config.k` segments.
pub fn mr_pyca(curve: &Curve, config: &MrConfig) -> Result<Pyramid> {
    mr_pyca_with_engine(&SegmentCostEngine::new(curve), config).map(|o| o.pyramid)
}

/// As [`mr_pyca`], reusing a prebuilt engine and reporting work counters.
pub fn mr_pyca_with_engine(engine: &SegmentCostEngine, config: &MrConfig) -> Result<MrOutput> {
    let n = engine.len();
    config.validate(n)?;
    let k = config.k;
    let depth = resolution_depth(n, k, config.rho)?;

    let mut retained: Vec<Approximation> = Vec::new();
    let mut current = Approximation::identity(n);
    let mut stats = MrStats::default();
    let mut level_no = 0;

    let step = |current: &Approximation,
                held: usize,
                params: CorridorParams,
                level_no: usize,
                stats: &mut MrStats| {
        let out = pyca(engine, current.index_map(), &params).map_err(|e| match e {
            Error::InfeasibleCorridor {
                k, band, level_size, ..
            } => Error::InfeasibleCorridor {
                k,
                band,
                level_size,
                level: Some(level_no),
            },
            other => other,
        })?;
        stats.levels.push(LevelStats {
            segments: params.target_segments,
            band: params.band,
            transitions: out.stats.transitions,
            cells: out.stats.peak_cells,
        });
        stats.transitions += out.stats.transitions;
        stats.peak_dp_cells = stats.peak_dp_cells.max(out.stats.peak_cells);
        stats.peak_live_cells = stats.peak_live_cells.max(out.stats.peak_cells + held);
        Ok::<_, Error>(out.approximation)
    };

    for _ in 0..depth {
        let segments = current.segment_count();
        let target = k.max((config.rho * segments as f64).round() as usize);
        if target >= segments {
            break;
        }
        let params = CorridorParams::with_alpha(segments + 1, target, config.alpha)?;
        level_no += 1;
        let held = held_cells(&retained) + segments + 1;
        let next = step(&current, held, params, level_no, &mut stats)?;
        let prev = std::mem::replace(&mut current, next);
        if config.keep_all_levels {
            retained.push(prev);
        }
        if target == k {
            break;
        }
    }

    let segments = current.segment_count();
    if segments != k {
        // residual step with ratio K / K_r
        let band = band_from_ratio(config.alpha * segments as f64 / k as f64);
        let params = CorridorParams::new(segments + 1, k, band)?;
        level_no += 1;
        let held = held_cells(&retained) + segments + 1;
        let next = step(&current, held, params, level_no, &mut stats)?;
        let prev = std::mem::replace(&mut current, next);
        if config.keep_all_levels {
            retained.push(prev);
        }
    }
    retained.push(current);
    stats.pyramid_cells = held_cells(&retained);

    Ok(MrOutput {
        pyramid: Pyramid {
            levels: retained,
            rho: config.rho,
            alpha: config.alpha,
            depth,
            complete: config.keep_all_levels,
        },
        stats,
    })
}

fn held_cells(levels: &[Approximation]) -> usize {
    levels.iter().map(|a| a.segment_count() + 1).sum()
}
