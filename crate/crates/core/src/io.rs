//! Curve files, pyramid documents and numeric formatting.
//!
//! Curve files hold one point per line. A blank line, a row of NaNs or a
//! `>` line ends the current polyline; `#` starts a comment. All indices in
//! files and messages are one-based.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::curve::{validate_curve, Curve, Pyramid};
use crate::error::{Error, Result};
use crate::metrics::segment_error;

/// Layout of a curve file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveFileFormat {
    /// Whitespace-separated coordinates, as in NGDC shoreline extracts.
    WhitespaceLonLat,
    Csv {
        /// Zero-based columns holding coordinates; all columns when `None`.
        columns: Option<Vec<usize>>,
        /// Skip the first non-comment line.
        header: bool,
    },
}

impl CurveFileFormat {
    pub fn csv() -> Self {
        CurveFileFormat::Csv {
            columns: None,
            header: false,
        }
    }

    /// Picks CSV for `.csv` paths, whitespace otherwise.
    pub fn from_extension(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Self::csv(),
            _ => CurveFileFormat::WhitespaceLonLat,
        }
    }
}

enum Row {
    Point(Vec<f64>),
    Break,
    Skip,
}

fn parse_row(line: &str, line_no: usize, format: &CurveFileFormat, header_pending: &mut bool) -> Result<Row> {
    let body = line.split('#').next().unwrap_or("").trim();
    if body.is_empty() {
        return Ok(if line.trim_start().starts_with('#') { Row::Skip } else { Row::Break });
    }
    if body.starts_with('>') {
        return Ok(Row::Break);
    }
    let fields: Vec<&str> = match format {
        CurveFileFormat::WhitespaceLonLat => body.split_whitespace().collect(),
        CurveFileFormat::Csv { header, .. } => {
            if *header && *header_pending {
                *header_pending = false;
                return Ok(Row::Skip);
            }
            body.split(',').map(str::trim).collect()
        }
    };
    let picked: Vec<&str> = match format {
        CurveFileFormat::Csv {
            columns: Some(cols), ..
        } => cols
            .iter()
            .map(|&c| {
                fields.get(c).copied().ok_or_else(|| Error::Parse {
                    line: line_no,
                    message: format!("missing column {}", c + 1),
                })
            })
            .collect::<Result<_>>()?,
        _ => fields,
    };
    let values = picked
        .iter()
        .map(|f| {
            f.parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("not a number: {f:?}"),
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    if values.iter().all(|v| v.is_nan()) {
        return Ok(Row::Break);
    }
    Ok(Row::Point(values))
}

/// Parses every polyline in `reader`. The dimension of the first row is
/// enforced on all later rows.
pub fn read_curves<R: BufRead>(reader: R, format: &CurveFileFormat) -> Result<Vec<Curve>> {
    let mut blocks: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut current: Vec<Vec<f64>> = Vec::new();
    let mut dim = None;
    let mut header_pending = true;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        match parse_row(&line, line_no, format, &mut header_pending)? {
            Row::Point(p) => {
                let d = *dim.get_or_insert(p.len());
                if p.len() != d {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("expected {d} coordinates, found {}", p.len()),
                    });
                }
                current.push(p);
            }
            Row::Break => {
                if !current.is_empty() {
                    blocks.push(std::mem::take(&mut current));
                }
            }
            Row::Skip => {}
        }
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    blocks
        .iter()
        .enumerate()
        .map(|(polyline, pts)| {
            validate_curve(pts).map_err(|e| Error::InPolyline {
                polyline,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Reads all polylines from `path`.
pub fn load_curve(path: &Path, format: &CurveFileFormat) -> Result<Vec<Curve>> {
    read_curves(BufReader::new(File::open(path)?), format)
}

/// Writes polylines separated by blank lines. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_curves<W: Write>(mut out: W, curves: &[Curve], format: &CurveFileFormat) -> Result<()> {
    let sep = match format {
        CurveFileFormat::WhitespaceLonLat => " ",
        CurveFileFormat::Csv { .. } => ",",
    };
    for (c, curve) in curves.iter().enumerate() {
        if c > 0 {
            writeln!(out)?;
        }
        for p in curve.points() {
            let row: Vec<String> = p.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", row.join(sep))?;
        }
    }
    Ok(())
}

pub fn save_curves(path: &Path, curves: &[Curve], format: &CurveFileFormat) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_curves(&mut out, curves, format)?;
    out.flush()?;
    Ok(())
}

/// `x` rounded to `digits` significant digits, in plain notation when the
/// exponent is moderate and scientific otherwise.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        sci
    }
}

pub const DOCUMENT_FORMAT: &str = "mrpyca-pyramid";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    /// Points in the original curve.
    pub n: usize,
    /// Coordinates per point.
    pub dim: usize,
    /// Segment count of the coarsest level.
    pub k: usize,
    pub rho: f64,
    pub alpha: f64,
    /// Regular decimation steps.
    pub depth: usize,
    /// False when intermediate levels were not kept.
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelBlock {
    pub level: usize,
    pub segments: usize,
    pub error: f64,
    /// One-based original-curve indices.
    pub vertices: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Vec<f64>>>,
}

/// Serialized pyramid, fine to coarse, with one-based vertex indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PyramidDocument {
    pub format: String,
    pub metadata: DocumentMetadata,
    pub levels: Vec<LevelBlock>,
}

#[derive(Debug, Clone, Default)]
pub struct ExportOptions {
    pub source: Option<String>,
    /// Store vertex coordinates alongside the indices.
    pub include_coords: bool,
}

impl PyramidDocument {
    pub fn new(pyramid: &Pyramid, curve: &Curve, options: &ExportOptions) -> Self {
        let levels = pyramid
            .levels
            .iter()
            .enumerate()
            .map(|(level, a)| LevelBlock {
                level,
                segments: a.segment_count(),
                error: a.error(),
                vertices: a.vertices().iter().map(|v| v + 1).collect(),
                coords: options.include_coords.then(|| a.vertex_points(curve)),
            })
            .collect();
        PyramidDocument {
            format: DOCUMENT_FORMAT.to_string(),
            metadata: DocumentMetadata {
                source: options.source.clone(),
                n: curve.len(),
                dim: curve.dim(),
                k: pyramid.coarsest().segment_count(),
                rho: pyramid.rho,
                alpha: pyramid.alpha,
                depth: pyramid.depth,
                complete: pyramid.complete,
            },
            levels,
        }
    }

    /// JSON text with one line per level.
    pub fn to_json(&self) -> String {
        let levels: Vec<String> = self.levels.iter().map(|l| format!("    {}", compact(l))).collect();
        format!(
            "{{\n  \"format\": {},\n  \"metadata\": {},\n  \"levels\": [\n{}\n  ]\n}}",
            compact(&self.format),
            compact(&self.metadata),
            levels.join(",\n")
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PyramidDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        if doc.format != DOCUMENT_FORMAT {
            return Err(Error::Parse {
                line: 1,
                message: format!("unknown document format {:?}", doc.format),
            });
        }
        Ok(doc)
    }

    /// Checks the document against `curve`, recomputing every level error
    /// directly.
    pub fn verify(&self, curve: &Curve, rel_tol: f64) -> VerifyReport {
        let mut report = VerifyReport::default();
        let issues = &mut report.issues;
        let meta = &self.metadata;
        let n = curve.len();
        if meta.n != n {
            issues.push(format!("document is for {} points, curve has {n}", meta.n));
            return report;
        }
        if meta.dim != curve.dim() {
            issues.push(format!(
                "document is for dimension {}, curve has {}",
                meta.dim,
                curve.dim()
            ));
        }
        if self.levels.is_empty() {
            issues.push("document has no levels".to_string());
            return report;
        }
        let scale = error_scale(curve);
        let mut recomputed = Vec::with_capacity(self.levels.len());
        for (pos, block) in self.levels.iter().enumerate() {
            let name = format!("level {}", block.level);
            if block.level != pos {
                issues.push(format!("{name} is stored at position {}", pos + 1));
            }
            let v = &block.vertices;
            let ok_range = v.iter().all(|&x| (1..=n).contains(&x));
            let increasing = v.windows(2).all(|w| w[0] < w[1]);
            if !ok_range {
                issues.push(format!("{name} has an index outside 1..={n}"));
            }
            if !increasing {
                issues.push(format!("{name} indices are not strictly increasing"));
            }
            if v.first() != Some(&1) || v.last() != Some(&n) {
                issues.push(format!("{name} does not start at 1 and end at {n}"));
            }
            if block.segments + 1 != v.len() {
                issues.push(format!(
                    "{name} lists {} vertices for {} segments",
                    v.len(),
                    block.segments
                ));
            }
            if !(ok_range && increasing && v.len() >= 2) {
                recomputed.push(None);
                continue;
            }
            let sq: f64 = v
                .windows(2)
                .map(|w| segment_error(curve, w[0] - 1, w[1] - 1).unwrap_or(f64::NAN))
                .sum();
            let e = sq.sqrt();
            if !((e - block.error).abs() <= rel_tol * e.max(block.error) + 1e-12 * scale) {
                issues.push(format!(
                    "{name} stores error {} but the curve gives {}",
                    format_sig(block.error, 12),
                    format_sig(e, 12)
                ));
            }
            if let Some(coords) = &block.coords {
                let matches = coords.len() == v.len()
                    && coords.iter().zip(v).all(|(c, &i)| c.as_slice() == curve.point(i - 1));
                if !matches {
                    issues.push(format!("{name} coordinates do not match the curve"));
                }
            }
            recomputed.push(Some(e));
        }
        let first = &self.levels[0];
        if meta.complete && (first.vertices.len() != n || first.error != 0.0) {
            issues.push("level 0 is not the full curve with zero error".to_string());
        }
        for pair in self.levels.windows(2) {
            let (fine, coarse) = (&pair[0], &pair[1]);
            let mut it = fine.vertices.iter();
            if !coarse.vertices.iter().all(|c| it.any(|f| f == c)) {
                issues.push(format!(
                    "level {} is not nested in level {}",
                    coarse.level, fine.level
                ));
            }
            if coarse.segments >= fine.segments {
                issues.push(format!(
                    "segment count does not decrease from level {} to {}",
                    fine.level, coarse.level
                ));
            }
            if coarse.error + rel_tol * fine.error < fine.error {
                report.warnings.push(format!(
                    "error decreases from level {} to {}",
                    fine.level, coarse.level
                ));
            }
        }
        if self.levels.last().map(|b| b.segments) != Some(meta.k) {
            report
                .issues
                .push(format!("coarsest level does not have K = {} segments", meta.k));
        }
        report
    }
}

fn compact<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string(value).expect("document serializes")
}

/// Outcome of [`PyramidDocument::verify`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyReport {
    /// Inconsistencies between the document and the curve, or broken
    /// nesting. Any entry here fails verification.
    pub issues: Vec<String>,
    /// An error that drops from a finer to a coarser level. Nested subsets
    /// can legitimately do this, so it is reported but does not fail.
    pub warnings: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Bounding-box diagonal times `sqrt(N)`: the magnitude of an L2 error on
/// this curve, used as the absolute floor when comparing near-zero errors.
fn error_scale(curve: &Curve) -> f64 {
    let d = curve.dim();
    let mut diag = 0.0;
    for k in 0..d {
        let (lo, hi) = curve
            .points()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[k]), hi.max(p[k])));
        diag += (hi - lo) * (hi - lo);
    }
    diag.sqrt() * (curve.len() as f64).sqrt()
}

/// Writes `pyramid` as a JSON [`PyramidDocument`].
pub fn export_pyramid(pyramid: &Pyramid, curve: &Curve, path: &Path, options: &ExportOptions) -> Result<()> {
    let doc = PyramidDocument::new(pyramid, curve, options);
    std::fs::write(path, doc.to_json() + "\n")?;
    Ok(())
}

pub fn load_pyramid_document(path: &Path) -> Result<PyramidDocument> {
    PyramidDocument::from_json(&std::fs::read_to_string(path)?)
}
