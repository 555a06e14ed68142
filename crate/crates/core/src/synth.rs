//! Seeded synthetic test curves. All generators are deterministic in
//! `(kind, n, seed, roughness)` across platforms.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::curve::Curve;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SynthKind {
    /// Koch-style snowflake edge with seeded bump orientation;
    /// `roughness` scales the bump height.
    KochLike,
    /// Recursive midpoint displacement; the displacement scale shrinks by
    /// `roughness` per subdivision depth. Coastline-like at 0.5 to 0.7.
    MidpointDisplacement,
    /// Correlated planar random walk; `roughness` scales the turning noise.
    RandomWalk,
}

impl FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "koch" | "kochlike" => Ok(SynthKind::KochLike),
            "midpoint" | "midpointdisplacement" | "fractal" => Ok(SynthKind::MidpointDisplacement),
            "randomwalk" | "walk" => Ok(SynthKind::RandomWalk),
            _ => Err(Error::InvalidParameter(format!("unknown synthetic kind {s:?}"))),
        }
    }
}

impl fmt::Display for SynthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SynthKind::KochLike => "koch",
            SynthKind::MidpointDisplacement => "midpoint",
            SynthKind::RandomWalk => "random-walk",
        })
    }
}

/// Generates an `n`-point planar curve.
pub fn synth_fractal(kind: SynthKind, n: usize, seed: u64, roughness: f64) -> Result<Curve> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "synthetic curve needs at least 2 points, got {n}"
        )));
    }
    if !(roughness > 0.0 && roughness <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "roughness must lie in (0, 1], got {roughness}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = match kind {
        SynthKind::MidpointDisplacement => midpoint(n, roughness, &mut rng),
        SynthKind::RandomWalk => walk(n, roughness, &mut rng),
        SynthKind::KochLike => koch(n, roughness, &mut rng),
    };
    Curve::from_flat(coords, 2)
}

fn midpoint(n: usize, roughness: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut pts = vec![[0.0f64; 2]; n];
    pts[n - 1] = [1.0, 0.0];
    let mut stack = vec![(0usize, n - 1, 0u32)];
    while let Some((a, b, depth)) = stack.pop() {
        if b < a + 2 {
            continue;
        }
        let mid = (a + b) / 2;
        let t = (mid - a) as f64 / (b - a) as f64;
        let (pa, pb) = (pts[a], pts[b]);
        let (dx, dy) = (pb[0] - pa[0], pb[1] - pa[1]);
        let len = dx.hypot(dy);
        let (nx, ny) = if len > 0.0 {
            (-dy / len, dx / len)
        } else {
            let theta = rng.random::<f64>() * 2.0 * PI;
            (theta.cos(), theta.sin())
        };
        let g: f64 = rng.sample(StandardNormal);
        let offset = 0.25 * roughness.powi(depth as i32 + 1) * g;
        pts[mid] = [
            pa[0] + t * dx + offset * nx,
            pa[1] + t * dy + offset * ny,
        ];
        stack.push((mid, b, depth + 1));
        stack.push((a, mid, depth + 1));
    }
    pts.into_iter().flatten().collect()
}

fn walk(n: usize, roughness: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * n);
    let (mut x, mut y, mut heading) = (0.0f64, 0.0f64, 0.0f64);
    out.extend([x, y]);
    for _ in 1..n {
        let turn: f64 = rng.sample(StandardNormal);
        heading += roughness * PI * turn;
        let step = 0.5 + rng.random::<f64>();
        x += step * heading.cos();
        y += step * heading.sin();
        out.extend([x, y]);
    }
    out
}

fn koch(n: usize, roughness: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut pts = vec![[0.0f64, 0.0], [1.0, 0.0]];
    let height = roughness * 3f64.sqrt() / 6.0;
    while pts.len() < n {
        let mut next = Vec::with_capacity(4 * pts.len());
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let side = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let p1 = [a[0] + dx / 3.0, a[1] + dy / 3.0];
            let p3 = [a[0] + 2.0 * dx / 3.0, a[1] + 2.0 * dy / 3.0];
            let p2 = [
                a[0] + dx / 2.0 - side * height * dy,
                a[1] + dy / 2.0 + side * height * dx,
            ];
            next.extend([a, p1, p2, p3]);
        }
        next.push(*pts.last().unwrap());
        pts = next;
    }
    // evenly spaced subsample keeping both ends
    let m = pts.len() - 1;
    (0..n)
        .flat_map(|q| {
            let idx = (q * m + (n - 1) / 2) / (n - 1);
            pts[idx]
        })
        .collect()
}
