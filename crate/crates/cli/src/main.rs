//! `mrpyca` command-line tool.
//!
//! Exit codes: 0 success, 1 other failure, 2 usage or invalid parameter,
//! 3 unreadable input data, 4 infeasible K, 5 infeasible corridor,
//! 6 I/O error, 7 verification or reference disagreement.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mrpyca::bench::{self, Algorithm, CurveSource, Reference, RunParams, SweepSpec};
use mrpyca::io::{self as mio, format_sig, CurveFileFormat, ExportOptions, PyramidDocument};
use mrpyca::metrics::{fidelity, SegmentCostEngine};
use mrpyca::multires::{mr_pyca, MrConfig};
use mrpyca::synth::{synth_fractal, SynthKind};
use mrpyca::{Curve, Error};

const EXIT_OTHER: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_INFEASIBLE_K: u8 = 4;
const EXIT_INFEASIBLE_CORRIDOR: u8 = 5;
const EXIT_IO: u8 = 6;
const EXIT_VERIFY: u8 = 7;

#[derive(Parser)]
#[command(name = "mrpyca", version, about = "Optimal and multiresolution polyline simplification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Approximate a curve with K segments and print the kept vertices.
    Approx(ApproxArgs),
    /// Build the multiresolution pyramid down to K segments.
    Pyramid(PyramidArgs),
    /// Compare one algorithm's error with the optimum.
    Fidelity(FidelityArgs),
    /// Run a parameter sweep and write CSV records.
    Bench(BenchArgs),
    /// Generate a synthetic test curve.
    Synth(SynthArgs),
    /// Re-check a pyramid document against its source curve.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FileFormat {
    /// CSV for `.csv` files, whitespace otherwise.
    Auto,
    /// Whitespace-separated coordinates.
    Lonlat,
    Csv,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Algo {
    Fsdp,
    Pyca,
    MrPyca,
    Dp,
    MergeL2,
}

impl From<Algo> for Algorithm {
    fn from(a: Algo) -> Self {
        match a {
            Algo::Fsdp => Algorithm::Fsdp,
            Algo::Pyca => Algorithm::Pyca,
            Algo::MrPyca => Algorithm::MrPyca,
            Algo::Dp => Algorithm::DouglasPeucker,
            Algo::MergeL2 => Algorithm::MergeL2,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Koch,
    Midpoint,
    RandomWalk,
}

impl From<Kind> for SynthKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Koch => SynthKind::KochLike,
            Kind::Midpoint => SynthKind::MidpointDisplacement,
            Kind::RandomWalk => SynthKind::RandomWalk,
        }
    }
}

#[derive(Args)]
struct FileArgs {
    #[arg(long, value_enum, default_value = "auto")]
    format: FileFormat,
    /// One-based CSV columns holding the coordinates, e.g. `2,3`.
    #[arg(long, value_delimiter = ',')]
    columns: Vec<usize>,
    /// CSV input starts with a header line.
    #[arg(long)]
    header: bool,
}

impl FileArgs {
    fn resolve(&self, path: &std::path::Path) -> Result<CurveFileFormat, CliError> {
        if self.columns.contains(&0) {
            return Err(CliError::usage("CSV columns are one-based"));
        }
        let columns = (!self.columns.is_empty()).then(|| self.columns.iter().map(|c| c - 1).collect());
        Ok(match self.format {
            FileFormat::Lonlat => CurveFileFormat::WhitespaceLonLat,
            FileFormat::Csv => CurveFileFormat::Csv {
                columns,
                header: self.header,
            },
            FileFormat::Auto => match CurveFileFormat::from_extension(path) {
                CurveFileFormat::Csv { .. } => CurveFileFormat::Csv {
                    columns,
                    header: self.header,
                },
                other => other,
            },
        })
    }
}

#[derive(Args)]
struct Source {
    /// Curve file to read.
    #[arg(long, short, conflicts_with = "synth")]
    input: Option<PathBuf>,
    #[command(flatten)]
    file: FileArgs,
    /// Which polyline of the file to use (one-based).
    #[arg(long, default_value_t = 1)]
    polyline: usize,
    /// Use a generated curve instead of a file; needs --seed.
    #[arg(long, value_enum, requires = "seed")]
    synth: Option<Kind>,
    /// Points in the generated curve.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0.6)]
    roughness: f64,
}

impl Source {
    fn load(&self) -> Result<(Curve, String), CliError> {
        match (&self.input, self.synth) {
            (Some(path), _) => {
                let curves = mio::load_curve(path, &self.file.resolve(path)?)?;
                if self.polyline == 0 || self.polyline > curves.len() {
                    return Err(CliError::usage(format!(
                        "{} holds {} polylines; --polyline {} is out of range",
                        path.display(),
                        curves.len(),
                        self.polyline
                    )));
                }
                let name = if curves.len() > 1 {
                    format!("{}#{}", path.display(), self.polyline)
                } else {
                    path.display().to_string()
                };
                Ok((curves[self.polyline - 1].clone(), name))
            }
            (None, Some(kind)) => {
                let n = self.n.ok_or_else(|| CliError::usage("--synth needs --n"))?;
                let seed = self.seed.ok_or_else(|| CliError::usage("--synth needs --seed"))?;
                let curve = synth_fractal(kind.into(), n, seed, self.roughness)?;
                Ok((curve, format!("synth:{}:{n}:{seed}:{}", SynthKind::from(kind), self.roughness)))
            }
            (None, None) => Err(CliError::usage("give --input or --synth")),
        }
    }
}

#[derive(Args)]
struct AlgoArgs {
    #[arg(long, value_enum, default_value = "mr-pyca")]
    algo: Algo,
    /// Number of segments.
    #[arg(long)]
    k: usize,
    /// Decimation ratio between pyramid levels.
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    /// Corridor width multiplier.
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// Explicit corridor half-width for single-step pyca.
    #[arg(long)]
    band: Option<usize>,
}

impl AlgoArgs {
    fn params(&self) -> Result<RunParams, CliError> {
        if self.band.is_some() && self.algo != Algo::Pyca {
            return Err(CliError::usage("--band applies to --algo pyca only"));
        }
        Ok(RunParams {
            k: self.k,
            rho: self.rho,
            alpha: self.alpha,
            band: self.band,
        })
    }
}

#[derive(Args)]
struct ApproxArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    algo: AlgoArgs,
    /// Print the kept vertices' coordinates instead of their indices.
    #[arg(long)]
    coords: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PyramidArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// Keep every level (default).
    #[arg(long, overrides_with = "levels_final")]
    levels_all: bool,
    /// Keep only the final K-segment level.
    #[arg(long, overrides_with = "levels_all")]
    levels_final: bool,
    /// Store vertex coordinates in the document.
    #[arg(long)]
    coords: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum RefChoice {
    /// Corridor DP with the band as wide as the curve.
    Pyca,
    Fsdp,
    /// Run both and require agreement.
    Both,
}

#[derive(Args)]
struct FidelityArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    algo: AlgoArgs,
    #[arg(long, value_enum, default_value = "pyca")]
    reference: RefChoice,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchRef {
    None,
    Pyca,
    Fsdp,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    source: Source,
    /// Curve sizes for synthetic sources.
    #[arg(long, value_delimiter = ',')]
    ns: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    ks: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    rhos: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    alphas: Vec<f64>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "mr-pyca")]
    algos: Vec<Algo>,
    /// Optimal-error solver for the fidelity column.
    #[arg(long, value_enum, default_value = "none")]
    reference: BenchRef,
    /// Record median wall time over --repeats runs (serial).
    #[arg(long)]
    timing: bool,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    /// Run untimed cells on all cores.
    #[arg(long, conflicts_with = "timing")]
    parallel: bool,
    /// CSV destination; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also write line-delimited JSON records here.
    #[arg(long)]
    jsonl: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum, default_value = "midpoint")]
    kind: Kind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 0.6)]
    roughness: f64,
    #[arg(long, value_enum, default_value = "lonlat")]
    format: FileFormat,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Pyramid document written by `mrpyca pyramid`.
    document: PathBuf,
    #[command(flatten)]
    source: Source,
    /// Relative tolerance on recomputed errors.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
}

#[derive(Debug)]
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse { .. }
            | Error::InPolyline { .. }
            | Error::TooShort { .. }
            | Error::DimensionMismatch { .. }
            | Error::NonFiniteCoordinate { .. } => EXIT_PARSE,
            Error::InfeasibleK { .. } => EXIT_INFEASIBLE_K,
            Error::InfeasibleCorridor { .. } => EXIT_INFEASIBLE_CORRIDOR,
            Error::Io(_) => EXIT_IO,
            Error::InvalidParameter(_) => EXIT_USAGE,
            _ => EXIT_OTHER,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Error::from(e).into()
    }
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn approx(args: &ApproxArgs) -> Result<(), CliError> {
    let (curve, name) = args.source.load()?;
    let params = args.algo.params()?;
    let algorithm = Algorithm::from(args.algo.algo);
    let record = bench::run_algorithm(algorithm, &curve, &SegmentCostEngine::new(&curve), &params)?;
    let a = &record.approximation;
    let mut text = format!(
        "# {algorithm} source={name} N={} K={} error={}\n",
        curve.len(),
        a.segment_count(),
        format_sig(a.error(), 12)
    );
    if args.coords {
        for p in a.vertex_points(&curve) {
            let row: Vec<String> = p.iter().map(|v| v.to_string()).collect();
            text += &row.join(" ");
            text.push('\n');
        }
    } else {
        let ids: Vec<String> = a.vertices().iter().map(|v| (v + 1).to_string()).collect();
        text += &ids.join(" ");
        text.push('\n');
    }
    emit(&args.output, &text)
}

fn pyramid(args: &PyramidArgs) -> Result<(), CliError> {
    let (curve, name) = args.source.load()?;
    let mut config = MrConfig::new(args.k, args.rho, args.alpha);
    config.keep_all_levels = !args.levels_final;
    let p = mr_pyca(&curve, &config)?;
    let options = ExportOptions {
        source: Some(name),
        include_coords: args.coords,
    };
    let doc = PyramidDocument::new(&p, &curve, &options);
    emit(&args.output, &(doc.to_json() + "\n"))
}

fn fidelity_cmd(args: &FidelityArgs) -> Result<(), CliError> {
    let (curve, _) = args.source.load()?;
    let params = args.algo.params()?;
    let algorithm = Algorithm::from(args.algo.algo);
    let engine = SegmentCostEngine::new(&curve);
    let e = bench::run_algorithm(algorithm, &curve, &engine, &params)?.approximation.error();
    let k = params.k;
    let e_min = match args.reference {
        RefChoice::Pyca => bench::reference_error(Reference::PycaFullBand, &engine, k)?,
        RefChoice::Fsdp => bench::reference_error(Reference::Fsdp, &engine, k)?,
        RefChoice::Both => {
            let a = bench::reference_error(Reference::PycaFullBand, &engine, k)?.unwrap();
            let b = bench::reference_error(Reference::Fsdp, &engine, k)?.unwrap();
            if (a - b).abs() > 1e-9 * a.max(b) {
                return Err(CliError {
                    code: EXIT_VERIFY,
                    message: format!(
                        "reference solvers disagree: pyca {} vs fsdp {}",
                        format_sig(a, 12),
                        format_sig(b, 12)
                    ),
                });
            }
            Some(a)
        }
    }
    .expect("a reference was requested");
    let f = fidelity(e_min, e)?;
    println!("algorithm {algorithm}");
    println!("K {k}");
    println!("error {}", format_sig(e, 12));
    println!("optimal_error {}", format_sig(e_min, 12));
    println!("fidelity {}", format_sig(f, 12));
    Ok(())
}

fn bench_cmd(args: &BenchArgs) -> Result<(), CliError> {
    let source = match (&args.source.input, args.source.synth) {
        (None, Some(kind)) => {
            let seed = args.source.seed.ok_or_else(|| CliError::usage("--synth needs --seed"))?;
            CurveSource::Synthetic {
                kind: kind.into(),
                seed,
                roughness: args.source.roughness,
            }
        }
        _ => CurveSource::Fixed(args.source.load()?.0),
    };
    let ns = match (&source, args.source.n) {
        (CurveSource::Synthetic { .. }, Some(n)) if args.ns.is_empty() => vec![n],
        _ => args.ns.clone(),
    };
    let spec = SweepSpec {
        source,
        ns,
        ks: args.ks.clone(),
        rhos: args.rhos.clone(),
        alphas: args.alphas.clone(),
        algorithms: args.algos.iter().map(|&a| a.into()).collect(),
        reference: match args.reference {
            BenchRef::None => Reference::None,
            BenchRef::Pyca => Reference::PycaFullBand,
            BenchRef::Fsdp => Reference::Fsdp,
        },
        timing: args.timing,
        repeats: args.repeats,
        parallel: args.parallel,
    };
    let out = bench::sweep(&spec)?;
    let mut csv = Vec::new();
    bench::write_csv(&mut csv, &out.records)?;
    emit(&args.output, &String::from_utf8(csv).expect("csv is utf-8"))?;
    if let Some(path) = &args.jsonl {
        let mut lines = Vec::new();
        bench::write_json_lines(&mut lines, &out)?;
        fs::write(path, lines)?;
    }
    for f in &out.failures {
        eprintln!("failed cell {} N={} K={}: {}", f.algorithm, f.n, f.k, f.message);
    }
    for v in &out.ceiling_violations {
        eprintln!("ceiling exceeded: {v}");
    }
    if out.ceiling_violations.is_empty() {
        Ok(())
    } else {
        Err(CliError {
            code: EXIT_VERIFY,
            message: format!("{} runs exceeded their transition ceiling", out.ceiling_violations.len()),
        })
    }
}

fn synth(args: &SynthArgs) -> Result<(), CliError> {
    let curve = synth_fractal(args.kind.into(), args.n, args.seed, args.roughness)?;
    let format = match args.format {
        FileFormat::Csv => CurveFileFormat::csv(),
        _ => CurveFileFormat::WhitespaceLonLat,
    };
    let mut buf = Vec::new();
    mio::write_curves(&mut buf, &[curve], &format)?;
    emit(&args.output, &String::from_utf8(buf).expect("curve text is utf-8"))
}

fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    let doc = mio::load_pyramid_document(&args.document)?;
    let (curve, _) = args.source.load()?;
    let report = doc.verify(&curve, args.tolerance);
    for w in &report.warnings {
        println!("warning: {w}");
    }
    for issue in &report.issues {
        println!("issue: {issue}");
    }
    if report.passed() {
        println!("ok: {} levels verified", doc.levels.len());
        Ok(())
    } else {
        Err(CliError {
            code: EXIT_VERIFY,
            message: format!("{} issues found", report.issues.len()),
        })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Approx(a) => approx(a),
        Command::Pyramid(a) => pyramid(a),
        Command::Fidelity(a) => fidelity_cmd(a),
        Command::Bench(a) => bench_cmd(a),
        Command::Synth(a) => synth(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mrpyca: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
