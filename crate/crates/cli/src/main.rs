//! `mgfrft` command-line front end.
//!
//! Exit codes: 0 success, 1 internal or numerical error, 2 usage error
//! (bad flags, unreadable input files, invalid parameters).

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::{ArrayD, IxDyn};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mgfrft::bench::{bench_sweep, write_bench_csv, BenchConfig};
use mgfrft::compress::{compress_pipeline, compression_sweep, CompressionConfig, CompressionReport, PeakReference};
use mgfrft::geo::{build_station_graph, read_stations_csv, KnnConfig};
use mgfrft::graph::{build_cycle, build_grid, build_path, laplacian, read_graph_json, write_graph_json, Graph};
use mgfrft::linalg::{eig_general_real, eig_sym, fractional_basis, FractionalBasis, SymmetricEigenBasis};
use mgfrft::noaa::{assemble_dataset, load_gsod_dir, read_bundle, write_bundle, StationRecord};
use mgfrft::transform::{
    a_mgfrft_with, format_f64, ia_mgfrft_with, il_mgfrft, l_mgfrft, read_coefficients_csv, read_signal_csv, spectrum_table,
    write_coefficients_csv, write_signal_csv, write_spectrum_table_csv, AdjacencyFactor, ProductSignal,
    TransformKind,
};
use mgfrft::{Error, Execution};

#[derive(Parser)]
#[command(name = "mgfrft", version, about = "Multi-dimensional graph fractional Fourier transforms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a graph and write it as JSON.
    Graph {
        #[command(subcommand)]
        kind: GraphKind,
        /// Output file (stdout when omitted).
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Forward or inverse transform of a signal on a product graph.
    Transform(TransformArgs),
    /// Top-γ spectral compression with RE / PSNR scoring.
    Compress(CompressArgs),
    /// Time the factorized transform against the dense baseline.
    Bench(BenchArgs),
    /// Turn a directory of GSOD yearly CSVs into a dataset bundle.
    Ingest(IngestArgs),
    /// Generate a test signal.
    Signal {
        #[arg(value_enum)]
        kind: SignalKind,
        /// Comma-separated dimensions, e.g. 8,8 or 8,4,3.
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GraphKind {
    Path { n: usize },
    Cycle { n: usize },
    Grid { rows: usize, cols: usize },
    /// Gaussian-weighted kNN graph of a station list (`id,lat_deg,lon_deg`).
    Knn {
        #[arg(long)]
        stations: PathBuf,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long)]
        sigma2: Option<f64>,
        #[arg(long)]
        mutual: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Laplacian,
    Adjacency,
}

impl From<KindArg> for TransformKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Laplacian => TransformKind::Laplacian,
            KindArg::Adjacency => TransformKind::Adjacency,
        }
    }
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long, value_enum, default_value = "laplacian")]
    kind: KindArg,
    #[arg(long)]
    alpha: f64,
    /// Factor graphs in axis order, comma-separated JSON files.
    #[arg(long, value_delimiter = ',', required = true)]
    factors: Vec<PathBuf>,
    /// Signal CSV (forward transform).
    #[arg(long, required_unless_present = "inverse")]
    signal: Option<PathBuf>,
    /// Run the inverse transform on `--coefficients`.
    #[arg(long, requires = "coefficients")]
    inverse: bool,
    /// Coefficient CSV (inverse transform).
    #[arg(long)]
    coefficients: Option<PathBuf>,
    /// Also write the eigenvalue-sum table (Laplacian only).
    #[arg(long)]
    spectrum_table: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompressArgs {
    #[arg(long, required_unless_present = "sweep")]
    gamma: Option<f64>,
    #[arg(long, required_unless_present = "sweep")]
    alpha: Option<f64>,
    /// `gammas=0.02,0.05,... alphas=0.95,0.85`
    #[arg(long, num_args = 1..=2, value_name = "KEY=LIST")]
    sweep: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',', required_unless_present = "bundle")]
    factors: Vec<PathBuf>,
    #[arg(long, required_unless_present = "bundle")]
    signal: Option<PathBuf>,
    /// Dataset bundle from `ingest`; the factors become the kNN station graph and a 365-day path.
    #[arg(long, conflicts_with_all = ["factors", "signal"])]
    bundle: Option<PathBuf>,
    /// kNN neighbor count for `--bundle`.
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long)]
    sigma2: Option<f64>,
    /// Take the PSNR peak from the original signal instead of the reconstruction.
    #[arg(long)]
    peak_original: bool,
    /// Compressed signal CSV (single run) or sweep CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report JSON (stdout when omitted).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Square sizes N (shape N × N).
    #[arg(long, value_delimiter = ',', default_value = "16,32,64")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    #[arg(long)]
    allow_large: bool,
    /// Result JSON (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Timing CSV across the sweep.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    dir: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Randomly keep this many of the stations that pass the coverage gate.
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = mgfrft::noaa::DEFAULT_MIN_COVERAGE)]
    min_coverage: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignalKind {
    /// Uniform values in [-1, 1).
    Random,
    /// A few low-frequency cosines per axis with seeded amplitudes.
    Smooth,
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } | Error::Parameter(_) | Error::Parse { .. } | Error::Size { .. } => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Internal(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Graph { kind, out } => cmd_graph(kind, out.as_deref()),
        Command::Transform(a) => cmd_transform(a),
        Command::Compress(a) => cmd_compress(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Ingest(a) => cmd_ingest(a),
        Command::Signal { kind, dims, seed, out } => cmd_signal(kind, &dims, seed, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e }.into())
}

fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Io { path: p.to_path_buf(), source: e })?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: serde::Serialize>(path: Option<&Path>, value: &T) -> CliResult {
    let mut w = output(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| Failure::Internal(e.to_string()))
}

fn cmd_graph(kind: GraphKind, out: Option<&Path>) -> CliResult {
    let g = match kind {
        GraphKind::Path { n } => build_path(n)?,
        GraphKind::Cycle { n } => build_cycle(n)?,
        GraphKind::Grid { rows, cols } => build_grid(rows, cols)?,
        GraphKind::Knn { stations, k, sigma2, mutual } => {
            let st = read_stations_csv(open(&stations)?)?;
            build_station_graph(&st, &KnnConfig { k, sigma2, mutual })?
        }
    };
    let mut w = output(out)?;
    write_graph_json(&mut w, &g)?;
    w.flush().map_err(|e| Failure::Internal(e.to_string()))
}

fn read_factors(paths: &[PathBuf]) -> CliResult<Vec<Graph>> {
    paths.iter().map(|p| Ok(read_graph_json(open(p)?)?)).collect()
}

fn laplacian_eigs(graphs: &[Graph]) -> CliResult<Vec<SymmetricEigenBasis>> {
    graphs.iter().map(|g| Ok(eig_sym(&laplacian(g)?)?)).collect()
}

fn fractional(eigs: &[SymmetricEigenBasis], alpha: f64) -> CliResult<Vec<FractionalBasis>> {
    eigs.iter().map(|e| Ok(fractional_basis(e, alpha)?)).collect()
}

fn cmd_transform(a: TransformArgs) -> CliResult {
    let graphs = read_factors(&a.factors)?;
    let kind: TransformKind = a.kind.into();
    if a.spectrum_table.is_some() && (kind != TransformKind::Laplacian || a.inverse) {
        return Err(Failure::Usage("--spectrum-table needs a forward Laplacian transform".into()));
    }
    // Per-axis eigenvalues for the coefficient table, plus the transform itself.
    match kind {
        TransformKind::Laplacian => {
            let bases = fractional(&laplacian_eigs(&graphs)?, a.alpha)?;
            let eig: Vec<Vec<f64>> = bases.iter().map(|b| b.r().iter().map(|z| z.re).collect()).collect();
            if a.inverse {
                let coef = read_coefficients_csv(open(a.coefficients.as_deref().unwrap())?, a.alpha, kind)?;
                let f = il_mgfrft(&coef, &bases)?;
                emit_signal(&f, a.out.as_deref())
            } else {
                let f = read_signal_csv(open(a.signal.as_deref().unwrap())?)?;
                let coef = l_mgfrft(&f, &bases)?;
                if let Some(p) = &a.spectrum_table {
                    let rows = spectrum_table(&coef, &bases)?;
                    write_spectrum_table_csv(File::create(p).map_err(|e| Error::Io { path: p.clone(), source: e })?, &rows)?;
                }
                write_coefficients_csv(output(a.out.as_deref())?, &coef, &eig)?;
                Ok(())
            }
        }
        TransformKind::Adjacency => {
            let mut factors = Vec::new();
            let mut eig = Vec::new();
            for g in &graphs {
                let basis = eig_general_real(g.weights())?;
                eig.push(basis.j().iter().map(|z| z.re).collect::<Vec<f64>>());
                factors.push(AdjacencyFactor::new(&basis, a.alpha)?);
            }
            if a.inverse {
                let coef = read_coefficients_csv(open(a.coefficients.as_deref().unwrap())?, a.alpha, kind)?;
                let f = ia_mgfrft_with(&coef, &factors, Execution::default())?;
                emit_signal(&f, a.out.as_deref())
            } else {
                let f = read_signal_csv(open(a.signal.as_deref().unwrap())?)?;
                let coef = a_mgfrft_with(&f, &factors, Execution::default())?;
                write_coefficients_csv(output(a.out.as_deref())?, &coef, &eig)?;
                Ok(())
            }
        }
    }
}

fn emit_signal(f: &ProductSignal, out: Option<&Path>) -> CliResult {
    let imag = f.max_imag();
    if imag > 1e-9 {
        eprintln!("warning: discarding imaginary part up to {imag:.3e}");
    }
    write_signal_csv(output(out)?, &f.real_part())?;
    Ok(())
}

fn parse_list(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("`{s}` is not a number"))))
        .collect()
}

fn parse_sweep(items: &[String]) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let mut gammas = vec![0.02, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30];
    let mut alphas = vec![0.95, 0.85];
    for item in items {
        match item.split_once('=') {
            Some(("gammas", list)) => gammas = parse_list(list)?,
            Some(("alphas", list)) => alphas = parse_list(list)?,
            _ => return Err(Failure::Usage(format!("sweep item `{item}` must be gammas=... or alphas=..."))),
        }
    }
    Ok((gammas, alphas))
}

fn cmd_compress(a: CompressArgs) -> CliResult {
    let (graphs, signal) = match &a.bundle {
        Some(dir) => {
            let (_, ds) = read_bundle(dir)?;
            let stations = build_station_graph(&ds.coords(), &KnnConfig { k: a.k, sigma2: a.sigma2, mutual: false })?;
            (vec![stations, build_path(mgfrft::noaa::DAYS)?], ds.signal().clone())
        }
        None => (read_factors(&a.factors)?, read_signal_csv(open(a.signal.as_deref().unwrap())?)?),
    };
    let peak = if a.peak_original { PeakReference::Original } else { PeakReference::Compressed };
    let eigs = laplacian_eigs(&graphs)?;
    if let Some(items) = &a.sweep {
        let (gammas, alphas) = parse_sweep(items)?;
        let reports = compression_sweep(&signal, &eigs, &gammas, &alphas, peak)?;
        if let Some(p) = &a.out {
            write_sweep_csv(p, &reports)?;
        }
        return write_json(a.report.as_deref(), &reports);
    }
    let cfg = CompressionConfig::new(a.gamma.unwrap(), a.alpha.unwrap())?;
    let bases = fractional(&eigs, cfg.alpha())?;
    let (compressed, report) = compress_pipeline(&signal, &bases, &cfg, peak)?;
    if let Some(p) = &a.out {
        write_signal_csv(output(Some(p))?, &compressed.real_part())?;
    }
    write_json(a.report.as_deref(), &report)
}

fn write_sweep_csv(path: &Path, reports: &[CompressionReport]) -> CliResult {
    let mut w = output(Some(path))?;
    let io = |e: io::Error| Failure::Internal(e.to_string());
    writeln!(w, "alpha,gamma,retained,re,psnr,imag_residue").map_err(io)?;
    for r in reports {
        let cols = [r.alpha, r.gamma, r.retained as f64, r.re, r.psnr, r.imag_residue].map(format_f64);
        writeln!(w, "{}", cols.join(",")).map_err(io)?;
    }
    w.flush().map_err(io)
}

fn cmd_bench(a: BenchArgs) -> CliResult {
    if a.sizes.is_empty() {
        return Err(Failure::Usage("--sizes is empty".into()));
    }
    let template = BenchConfig { alpha: a.alpha, reps: a.reps, allow_large: a.allow_large, ..BenchConfig::new(2, 2) };
    let results = bench_sweep(&a.sizes, &template)?;
    if let Some(p) = &a.csv {
        write_bench_csv(output(Some(p))?, &results)?;
    }
    if let [single] = results.as_slice() {
        write_json(a.out.as_deref(), single)
    } else {
        write_json(a.out.as_deref(), &results)
    }
}

fn cmd_ingest(a: IngestArgs) -> CliResult {
    let loaded = load_gsod_dir(&a.dir, Execution::default())?;
    for (path, reason) in &loaded.rejected {
        eprintln!("skipping {}: {reason}", path.display());
    }
    let mut records: Vec<StationRecord> = loaded.records;
    records.sort_by(|x, y| x.station_id.cmp(&y.station_id));
    if let Some(n) = a.sample {
        records.retain(|r| r.coverage() >= a.min_coverage);
        if n < records.len() {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let mut picked = sample(&mut rng, records.len(), n).into_vec();
            picked.sort_unstable();
            records = picked.into_iter().map(|i| records[i].clone()).collect();
        }
    }
    let ds = assemble_dataset(records, a.min_coverage)?;
    let manifest = write_bundle(&a.out, &ds, a.min_coverage)?;
    eprintln!("{} stations written to {} ({} dropped by coverage)", manifest.stations, a.out.display(), manifest.dropped.len());
    Ok(())
}

fn cmd_signal(kind: SignalKind, dims: &[usize], seed: u64, out: Option<&Path>) -> CliResult {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Failure::Usage("--dims must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = match kind {
        SignalKind::Random => {
            let total = dims.iter().product();
            let values: Vec<f64> = (0..total).map(|_| rng.random_range(-1.0..1.0)).collect();
            ArrayD::from_shape_vec(IxDyn(dims), values).map_err(|e| Failure::Internal(e.to_string()))?
        }
        SignalKind::Smooth => {
            // Σ_axis Σ_{k<3} a_k cos(π k (n + ½) / N): low path-graph frequencies only.
            let amps: Vec<[f64; 3]> =
                dims.iter().map(|_| [rng.random_range(0.5..1.5), rng.random_range(-0.5..0.5), rng.random_range(-0.25..0.25)]).collect();
            ArrayD::from_shape_fn(IxDyn(dims), |ix| {
                dims.iter()
                    .enumerate()
                    .map(|(axis, &n)| {
                        (0..3)
                            .map(|k| amps[axis][k] * (std::f64::consts::PI * k as f64 * (ix[axis] as f64 + 0.5) / n as f64).cos())
                            .sum::<f64>()
                    })
                    .sum()
            })
        }
    };
    write_signal_csv(output(out)?, &data)?;
    Ok(())
}
