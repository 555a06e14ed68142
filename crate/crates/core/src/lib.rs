//! Multiresolution min-ε polygonal approximation of curves in `R^p`.
//!
//! Given a curve of `N` points and a segment budget `K`, the toolkit finds
//! `K + 1` of the original points whose polyline minimises the L2 distance
//! to the curve:
//!
//! * [`dp_full::fsdp`]: exact full-search dynamic programming, O(K·N²).
//! * [`dp_corridor::pyca`]: the same recurrence confined to a fixed-width
//!   corridor.
//! * [`multires::mr_pyca`]: repeated corridor steps with decimation ratio
//!   `rho`, producing nested levels in O(N) total work.
//! * [`baselines`]: Douglas–Peucker and Merge-L2 heuristics.
//! * [`bench`]: timing, instrumented work counters and log-log slope fits.
//! * [`io`] and [`synth`]: curve files, pyramid documents and seeded
//!   synthetic coastlines.

pub mod baselines;
pub mod bench;
pub mod curve;
pub mod dp_corridor;
pub mod dp_full;
pub mod error;
pub mod io;
pub mod metrics;
pub mod multires;
pub mod synth;

pub use curve::{interpolate_chord, validate_curve, Approximation, Curve, IndexMap, Pyramid};
pub use error::{Error, Result};
