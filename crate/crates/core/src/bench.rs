//! Benchmark harness: timed and counted runs, parameter sweeps and
//! log-log complexity slopes.
//!
//! Transition counters are the machine-independent measure of work; wall
//! time is the median of repeated runs after one discarded warm-up.
//!
//! Sweep cells run in parallel only in counter mode. Timed sweeps always
//! run serially on the calling thread so that runs do not compete for
//! cores; asking for both is rejected.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{douglas_peucker_with_stats, merge_l2_with_stats};
use crate::curve::{Approximation, Curve, IndexMap};
use crate::dp_corridor::{pyca, CorridorParams};
use crate::dp_full::fsdp_with_engine;
use crate::error::{Error, Result};
use crate::metrics::{fidelity, SegmentCostEngine};
use crate::multires::{mr_pyca_with_engine, work_bound, MrConfig};
use crate::synth::{synth_fractal, SynthKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Algorithm {
    #[serde(rename = "fsdp")]
    Fsdp,
    #[serde(rename = "pyca")]
    Pyca,
    #[serde(rename = "mr-pyca")]
    MrPyca,
    /// Douglas–Peucker.
    #[serde(rename = "dp")]
    DouglasPeucker,
    #[serde(rename = "merge-l2")]
    MergeL2,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Fsdp,
        Algorithm::Pyca,
        Algorithm::MrPyca,
        Algorithm::DouglasPeucker,
        Algorithm::MergeL2,
    ];

    pub fn uses_rho(self) -> bool {
        self == Algorithm::MrPyca
    }

    pub fn uses_alpha(self) -> bool {
        matches!(self, Algorithm::Pyca | Algorithm::MrPyca)
    }

    /// What the `transitions` counter measures for this algorithm.
    pub fn counter_name(self) -> &'static str {
        match self {
            Algorithm::Fsdp | Algorithm::Pyca | Algorithm::MrPyca => "dp transitions",
            Algorithm::DouglasPeucker => "distance evaluations",
            Algorithm::MergeL2 => "heap comparisons",
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "fsdp" => Ok(Algorithm::Fsdp),
            "pyca" => Ok(Algorithm::Pyca),
            "mr-pyca" | "mrpyca" => Ok(Algorithm::MrPyca),
            "dp" | "douglas-peucker" => Ok(Algorithm::DouglasPeucker),
            "merge-l2" | "mergel2" => Ok(Algorithm::MergeL2),
            _ => Err(Error::InvalidParameter(format!("unknown algorithm {s:?}"))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Fsdp => "fsdp",
            Algorithm::Pyca => "pyca",
            Algorithm::MrPyca => "mr-pyca",
            Algorithm::DouglasPeucker => "dp",
            Algorithm::MergeL2 => "merge-l2",
        })
    }
}

/// Parameters of a single run. `rho` and `alpha` are ignored by algorithms
/// that do not use them; `band` overrides the `alpha`-derived PyCA band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunParams {
    pub k: usize,
    pub rho: f64,
    pub alpha: f64,
    pub band: Option<usize>,
}

impl RunParams {
    pub fn new(k: usize) -> Self {
        RunParams {
            k,
            rho: 0.5,
            alpha: 2.0,
            band: None,
        }
    }
}

/// Result of one untimed run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub approximation: Approximation,
    pub transitions: u64,
    /// Ceiling the counter must respect, when the algorithm has one.
    pub ceiling: Option<f64>,
}

/// Exact ceiling `(2·band + 1)·band·K` on corridor DP transitions: each of
/// the `K` rows has at most `2·band + 1` cells with at most `band`
/// predecessors each.
pub fn pyca_ceiling(band: usize, k: usize) -> f64 {
    let (b, k) = (band as f64, k as f64);
    2.0 * b * b * k + b * k
}

/// Runs `algorithm` once on a prebuilt engine.
pub fn run_algorithm(
    algorithm: Algorithm,
    curve: &Curve,
    engine: &SegmentCostEngine,
    params: &RunParams,
) -> Result<RunOutcome> {
    let n = curve.len();
    let k = params.k;
    match algorithm {
        Algorithm::Fsdp => {
            let (approximation, stats) = fsdp_with_engine(engine, k)?;
            Ok(RunOutcome {
                approximation,
                transitions: stats.transitions,
                ceiling: None,
            })
        }
        Algorithm::Pyca => {
            let cp = match params.band {
                Some(band) => CorridorParams::new(n, k, band)?,
                None => CorridorParams::with_alpha(n, k, params.alpha)?,
            };
            let out = pyca(engine, &IndexMap::identity(n), &cp)?;
            Ok(RunOutcome {
                approximation: out.approximation,
                transitions: out.stats.transitions,
                ceiling: Some(pyca_ceiling(cp.band, k)),
            })
        }
        Algorithm::MrPyca => {
            let mut config = MrConfig::new(k, params.rho, params.alpha);
            config.keep_all_levels = false;
            let out = mr_pyca_with_engine(engine, &config)?;
            Ok(RunOutcome {
                approximation: out.pyramid.coarsest().clone(),
                transitions: out.stats.transitions,
                ceiling: Some(1.25 * work_bound(n, params.rho, params.alpha)),
            })
        }
        Algorithm::DouglasPeucker => {
            let (approximation, stats) = douglas_peucker_with_stats(curve, engine, k)?;
            Ok(RunOutcome {
                approximation,
                transitions: stats.evaluations,
                ceiling: None,
            })
        }
        Algorithm::MergeL2 => {
            let (approximation, stats) = merge_l2_with_stats(engine, k)?;
            Ok(RunOutcome {
                approximation,
                transitions: stats.heap_comparisons,
                ceiling: None,
            })
        }
    }
}

/// One benchmark measurement. `elapsed_ns` is absent for counter-mode runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub algorithm: Algorithm,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub rho: Option<f64>,
    pub alpha: Option<f64>,
    pub elapsed_ns: Option<u64>,
    pub transitions: u64,
    pub error: f64,
    pub fidelity: Option<f64>,
}

impl BenchRecord {
    fn from_outcome(algorithm: Algorithm, n: usize, params: &RunParams, outcome: &RunOutcome) -> Self {
        BenchRecord {
            algorithm,
            n,
            k: params.k,
            rho: algorithm.uses_rho().then_some(params.rho),
            alpha: (algorithm.uses_alpha() && params.band.is_none()).then_some(params.alpha),
            elapsed_ns: None,
            transitions: outcome.transitions,
            error: outcome.approximation.error(),
            fidelity: None,
        }
    }
}

/// Untimed single run, for counter-mode measurements.
pub fn count_run(algorithm: Algorithm, curve: &Curve, params: &RunParams) -> Result<BenchRecord> {
    let engine = SegmentCostEngine::new(curve);
    let outcome = run_algorithm(algorithm, curve, &engine, params)?;
    Ok(BenchRecord::from_outcome(algorithm, curve.len(), params, &outcome))
}

/// Runs `algorithm` once to warm up, then `repeats` timed runs, and
/// records the median wall time. Each timed run includes building the cost
/// engine. All runs must return identical vertices and error.
pub fn time_run(algorithm: Algorithm, curve: &Curve, params: &RunParams, repeats: usize) -> Result<BenchRecord> {
    if repeats < 1 {
        return Err(Error::InvalidParameter("repeats must be at least 1".into()));
    }
    let run = || {
        let engine = SegmentCostEngine::new(curve);
        run_algorithm(algorithm, curve, &engine, params)
    };
    let first = run()?;
    let mut times = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        let outcome = run()?;
        times.push(start.elapsed().as_nanos().max(1) as u64);
        if outcome.approximation.vertices() != first.approximation.vertices()
            || outcome.approximation.error().to_bits() != first.approximation.error().to_bits()
            || outcome.transitions != first.transitions
        {
            return Err(Error::NonDeterministicRun(algorithm.to_string()));
        }
    }
    times.sort_unstable();
    let mut record = BenchRecord::from_outcome(algorithm, curve.len(), params, &first);
    record.elapsed_ns = Some(times[repeats / 2]);
    Ok(record)
}

/// Record field usable as a slope axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    N,
    K,
    Rho,
    Alpha,
    ElapsedNs,
    Transitions,
    Error,
}

impl Field {
    fn get(self, r: &BenchRecord) -> Option<f64> {
        match self {
            Field::N => Some(r.n as f64),
            Field::K => Some(r.k as f64),
            Field::Rho => r.rho,
            Field::Alpha => r.alpha,
            Field::ElapsedNs => r.elapsed_ns.map(|t| t as f64),
            Field::Transitions => Some(r.transitions as f64),
            Field::Error => Some(r.error),
        }
    }
}

/// Least-squares slope of `log(y)` against `log(x)` over `records`.
pub fn complexity_slope(records: &[BenchRecord], x: Field, y: Field) -> Result<f64> {
    let mut xs = Vec::with_capacity(records.len());
    let mut ys = Vec::with_capacity(records.len());
    for r in records {
        match (x.get(r), y.get(r)) {
            (Some(a), Some(b)) => {
                xs.push(a);
                ys.push(b);
            }
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "record for {} has no value for the requested field",
                    r.algorithm
                )))
            }
        }
    }
    log_log_slope(&xs, &ys)
}

/// Least-squares slope of `log(y)` against `log(x)`. Needs at least four
/// points, strictly increasing `x` and positive values throughout.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidParameter("x and y lengths differ".into()));
    }
    if xs.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            found: xs.len(),
        });
    }
    if let Some(&bad) = xs.iter().chain(ys).find(|&&v| !(v > 0.0)) {
        return Err(Error::NonPositiveValue(bad));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("x values must be strictly increasing".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in lx.iter().zip(&ly) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    Ok(sxy / sxx)
}

/// Source of sweep curves.
#[derive(Debug, Clone)]
pub enum CurveSource {
    /// Regenerated for every `N` on the sweep's `N` axis.
    Synthetic {
        kind: SynthKind,
        seed: u64,
        roughness: f64,
    },
    /// A fixed curve; the `N` axis must be empty or hold its length only.
    Fixed(Curve),
}

/// Optimal-error solver used for fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    None,
    Fsdp,
    /// Corridor DP with the band as wide as the curve.
    PycaFullBand,
}

impl FromStr for Reference {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Reference::None),
            "fsdp" => Ok(Reference::Fsdp),
            "pyca" | "pyca-full" => Ok(Reference::PycaFullBand),
            _ => Err(Error::InvalidParameter(format!("unknown reference solver {s:?}"))),
        }
    }
}

/// Optimal error for `k` segments from the chosen reference solver.
pub fn reference_error(reference: Reference, engine: &SegmentCostEngine, k: usize) -> Result<Option<f64>> {
    let n = engine.len();
    match reference {
        Reference::None => Ok(None),
        Reference::Fsdp => Ok(Some(fsdp_with_engine(engine, k)?.0.error())),
        Reference::PycaFullBand => {
            let params = CorridorParams::new(n, k, n)?;
            Ok(Some(pyca(engine, &IndexMap::identity(n), &params)?.approximation.error()))
        }
    }
}

/// A Cartesian grid of runs.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub source: CurveSource,
    pub ns: Vec<usize>,
    pub ks: Vec<usize>,
    pub rhos: Vec<f64>,
    pub alphas: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub reference: Reference,
    /// Timed runs when true; counter mode otherwise.
    pub timing: bool,
    pub repeats: usize,
    /// Run counter-mode cells on the rayon pool.
    pub parallel: bool,
}

/// A grid cell that did not produce a record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellFailure {
    pub algorithm: Algorithm,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub rho: Option<f64>,
    pub alpha: Option<f64>,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutput {
    pub records: Vec<BenchRecord>,
    pub failures: Vec<CellFailure>,
    /// Runs whose transition counter exceeded its ceiling.
    pub ceiling_violations: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    curve: usize,
    algorithm: Algorithm,
    params: RunParams,
}

/// Executes the full grid. Cells are ordered by `N`, then `K`, then
/// algorithm, then `rho`, then `alpha`; axes an algorithm ignores collapse
/// to a single cell. Fidelity uses one reference run per `(curve, K)`.
pub fn sweep(spec: &SweepSpec) -> Result<SweepOutput> {
    if spec.timing && spec.parallel {
        return Err(Error::InvalidParameter(
            "timed sweeps run serially; parallel execution needs counter mode".into(),
        ));
    }
    if spec.timing && spec.repeats < 1 {
        return Err(Error::InvalidParameter("repeats must be at least 1".into()));
    }
    if spec.ks.is_empty() || spec.algorithms.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one K and one algorithm".into()));
    }
    let curves: Vec<Curve> = match &spec.source {
        CurveSource::Synthetic { kind, seed, roughness } => {
            if spec.ns.is_empty() {
                return Err(Error::InvalidParameter("synthetic sweep needs an N axis".into()));
            }
            spec.ns
                .iter()
                .map(|&n| synth_fractal(*kind, n, *seed, *roughness))
                .collect::<Result<_>>()?
        }
        CurveSource::Fixed(c) => {
            if spec.ns.iter().any(|&n| n != c.len()) {
                return Err(Error::InvalidParameter(format!(
                    "fixed curve has {} points; N axis must match",
                    c.len()
                )));
            }
            vec![c.clone()]
        }
    };
    let engines: Vec<SegmentCostEngine> = curves.iter().map(SegmentCostEngine::new).collect();
    let rhos = if spec.rhos.is_empty() { vec![0.5] } else { spec.rhos.clone() };
    let alphas = if spec.alphas.is_empty() { vec![2.0] } else { spec.alphas.clone() };

    let mut cells = Vec::new();
    for curve in 0..curves.len() {
        for &k in &spec.ks {
            for &algorithm in &spec.algorithms {
                let rho_axis: &[f64] = if algorithm.uses_rho() { &rhos } else { &rhos[..1] };
                let alpha_axis: &[f64] = if algorithm.uses_alpha() { &alphas } else { &alphas[..1] };
                for &rho in rho_axis {
                    for &alpha in alpha_axis {
                        cells.push(Cell {
                            curve,
                            algorithm,
                            params: RunParams {
                                k,
                                rho,
                                alpha,
                                band: None,
                            },
                        });
                    }
                }
            }
        }
    }

    let mut references = std::collections::HashMap::new();
    for curve in 0..curves.len() {
        for &k in &spec.ks {
            references.insert((curve, k), reference_error(spec.reference, &engines[curve], k));
        }
    }

    let execute = |cell: &Cell| -> std::result::Result<(BenchRecord, Option<String>), CellFailure> {
        let curve = &curves[cell.curve];
        let algorithm = cell.algorithm;
        let params = &cell.params;
        let fail = |message: String| CellFailure {
            algorithm,
            n: curve.len(),
            k: params.k,
            rho: algorithm.uses_rho().then_some(params.rho),
            alpha: algorithm.uses_alpha().then_some(params.alpha),
            message,
        };
        let outcome = run_algorithm(algorithm, curve, &engines[cell.curve], params).map_err(|e| fail(e.to_string()))?;
        let mut record = if spec.timing {
            time_run(algorithm, curve, params, spec.repeats).map_err(|e| fail(e.to_string()))?
        } else {
            BenchRecord::from_outcome(algorithm, curve.len(), params, &outcome)
        };
        match &references[&(cell.curve, params.k)] {
            Ok(Some(e_min)) => {
                record.fidelity = Some(fidelity(*e_min, record.error).map_err(|e| fail(e.to_string()))?);
            }
            Ok(None) => {}
            Err(e) => return Err(fail(format!("reference run failed: {e}"))),
        }
        let violation = outcome.ceiling.and_then(|c| {
            (outcome.transitions as f64 > c).then(|| {
                format!(
                    "{algorithm} N={} K={}: {} transitions exceed ceiling {c}",
                    curve.len(),
                    params.k,
                    outcome.transitions
                )
            })
        });
        Ok((record, violation))
    };

    let results: Vec<_> = if spec.parallel {
        cells.par_iter().map(execute).collect()
    } else {
        cells.iter().map(execute).collect()
    };
    let mut out = SweepOutput::default();
    for r in results {
        match r {
            Ok((record, violation)) => {
                out.records.push(record);
                out.ceiling_violations.extend(violation);
            }
            Err(f) => out.failures.push(f),
        }
    }
    Ok(out)
}

pub const CSV_HEADER: &str = "algorithm,N,K,rho,alpha,elapsed_ns,transitions,error,fidelity";

fn opt<T: fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes records as CSV under [`CSV_HEADER`]. Absent values are empty
/// fields; reals use the shortest round-trip representation.
pub fn write_csv<W: Write>(mut out: W, records: &[BenchRecord]) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.algorithm,
            r.n,
            r.k,
            opt(r.rho),
            opt(r.alpha),
            opt(r.elapsed_ns),
            r.transitions,
            r.error,
            opt(r.fidelity)
        )?;
    }
    Ok(())
}

/// Writes one JSON object per line: records first, then failures (which
/// carry a `message` field).
pub fn write_json_lines<W: Write>(mut out: W, output: &SweepOutput) -> Result<()> {
    for r in &output.records {
        serde_json::to_writer(&mut out, r).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(out)?;
    }
    for f in &output.failures {
        serde_json::to_writer(&mut out, f).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_laws() {
        let xs: Vec<f64> = (1..=6).map(|e| 2f64.powi(e)).collect();
        let lin: Vec<f64> = xs.iter().map(|x| 3.0 * x).collect();
        let quad: Vec<f64> = xs.iter().map(|x| 0.5 * x * x).collect();
        assert!((log_log_slope(&xs, &lin).unwrap() - 1.0).abs() < 1e-9);
        assert!((log_log_slope(&xs, &quad).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn slope_preconditions() {
        assert_eq!(
            log_log_slope(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]),
            Err(Error::InsufficientData { needed: 4, found: 3 })
        );
        assert_eq!(
            log_log_slope(&[1.0, 2.0, 3.0, 4.0], &[1.0, 0.0, 3.0, 4.0]),
            Err(Error::NonPositiveValue(0.0))
        );
        assert!(log_log_slope(&[1.0, 3.0, 2.0, 4.0], &[1.0, 2.0, 3.0, 4.0]).is_err());
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.to_string().parse::<Algorithm>().unwrap(), a);
        }
    }

    #[test]
    fn timed_run_matches_single_run() {
        let c = synth_fractal(SynthKind::MidpointDisplacement, 1000, 3, 0.6).unwrap();
        let params = RunParams::new(10);
        let timed = time_run(Algorithm::Fsdp, &c, &params, 3).unwrap();
        let single = count_run(Algorithm::Fsdp, &c, &params).unwrap();
        assert!(timed.elapsed_ns.unwrap() > 0);
        assert_eq!(timed.error, single.error);
        assert_eq!(timed.transitions, single.transitions);
    }

    #[test]
    fn timed_parallel_sweep_rejected() {
        let spec = SweepSpec {
            source: CurveSource::Synthetic {
                kind: SynthKind::RandomWalk,
                seed: 1,
                roughness: 0.3,
            },
            ns: vec![50],
            ks: vec![5],
            rhos: vec![],
            alphas: vec![],
            algorithms: vec![Algorithm::Fsdp],
            reference: Reference::None,
            timing: true,
            repeats: 1,
            parallel: true,
        };
        assert!(matches!(sweep(&spec), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn csv_header_and_empty_fields() {
        let r = BenchRecord {
            algorithm: Algorithm::MergeL2,
            n: 100,
            k: 7,
            rho: None,
            alpha: None,
            elapsed_ns: None,
            transitions: 42,
            error: 0.25,
            fidelity: Some(80.0),
        };
        let mut buf = Vec::new();
        write_csv(&mut buf, &[r]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            format!("{CSV_HEADER}\nmerge-l2,100,7,,,,42,0.25,80\n")
        );
    }
}
