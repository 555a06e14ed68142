//! wasm-bindgen bindings behind `www/index.html`.
//!
//! Curves cross the boundary as flat `[x0, y0, x1, y1, ...]` arrays and
//! vertex indices are zero-based positions into that curve.

use mrpyca::bench::{run_algorithm, Algorithm, RunParams};
use mrpyca::io::{ExportOptions, PyramidDocument};
use mrpyca::metrics::{fidelity, SegmentCostEngine};
use mrpyca::multires::{mr_pyca, MrConfig};
use mrpyca::synth::{synth_fractal, SynthKind};
use mrpyca::{Curve, Error};
use wasm_bindgen::prelude::*;

/// Largest `N²·K` for which `simplify` also solves the exact problem to
/// report fidelity. Keeps a click under a second or so in the browser.
pub const FIDELITY_WORK_LIMIT: f64 = 2e8;

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct Simplified {
    vertices: Vec<u32>,
    error: f64,
    transitions: f64,
    fidelity: f64,
}

#[wasm_bindgen]
impl Simplified {
    #[wasm_bindgen(getter)]
    pub fn vertices(&self) -> Vec<u32> {
        self.vertices.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn error(&self) -> f64 {
        self.error
    }

    /// Work counter of the chosen algorithm.
    #[wasm_bindgen(getter)]
    pub fn transitions(&self) -> f64 {
        self.transitions
    }

    /// Percentage against the exact optimum, NaN when the curve is too
    /// large to solve exactly.
    #[wasm_bindgen(getter)]
    pub fn fidelity(&self) -> f64 {
        self.fidelity
    }
}

fn planar(xy: &[f64]) -> Result<Curve, Error> {
    if xy.len() % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "flat coordinate array has odd length {}",
            xy.len()
        )));
    }
    Curve::from_flat(xy.to_vec(), 2)
}

pub fn synthesize_curve(kind: &str, n: u32, seed: u32, roughness: f64) -> Result<Vec<f64>, Error> {
    let kind: SynthKind = kind.parse()?;
    Ok(synth_fractal(kind, n as usize, seed as u64, roughness)?.as_flat().to_vec())
}

pub fn simplify_curve(xy: &[f64], algo: &str, k: u32, rho: f64, alpha: f64) -> Result<Simplified, Error> {
    let curve = planar(xy)?;
    let algorithm: Algorithm = algo.parse()?;
    let engine = SegmentCostEngine::new(&curve);
    let mut params = RunParams::new(k as usize);
    params.rho = rho;
    params.alpha = alpha;
    let run = run_algorithm(algorithm, &curve, &engine, &params)?;
    let n = curve.len() as f64;
    let fidelity = if algorithm == Algorithm::Fsdp {
        100.0
    } else if n * n * k as f64 <= FIDELITY_WORK_LIMIT {
        let best = run_algorithm(Algorithm::Fsdp, &curve, &engine, &params)?;
        fidelity(best.approximation.error(), run.approximation.error())?
    } else {
        f64::NAN
    };
    Ok(Simplified {
        vertices: run.approximation.vertices().iter().map(|&v| v as u32).collect(),
        error: run.approximation.error(),
        transitions: run.transitions as f64,
        fidelity,
    })
}

pub fn pyramid_document(xy: &[f64], k: u32, rho: f64, alpha: f64) -> Result<String, Error> {
    let curve = planar(xy)?;
    let pyramid = mr_pyca(&curve, &MrConfig::new(k as usize, rho, alpha))?;
    Ok(PyramidDocument::new(&pyramid, &curve, &ExportOptions::default()).to_json())
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Seeded synthetic planar curve as a flat coordinate array.
#[wasm_bindgen]
pub fn synthesize(kind: &str, n: u32, seed: u32, roughness: f64) -> Result<Vec<f64>, JsError> {
    synthesize_curve(kind, n, seed, roughness).map_err(js)
}

/// Runs one algorithm (`fsdp`, `pyca`, `mr-pyca`, `dp`, `merge-l2`) with `k` segments.
#[wasm_bindgen]
pub fn simplify(xy: &[f64], algo: &str, k: u32, rho: f64, alpha: f64) -> Result<Simplified, JsError> {
    simplify_curve(xy, algo, k, rho, alpha).map_err(js)
}

/// Full multiresolution pyramid as a pyramid JSON document (one-based vertices).
#[wasm_bindgen]
pub fn pyramid(xy: &[f64], k: u32, rho: f64, alpha: f64) -> Result<String, JsError> {
    pyramid_document(xy, k, rho, alpha).map_err(js)
}
