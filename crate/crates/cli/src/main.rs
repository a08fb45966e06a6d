use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tfloc::bench::{bench_all, BenchConfig};
use tfloc::estimators::{
    align_wigner_estimate, deconvolve_with_residual, gp_recover, impulse_kernel, pt_recover, was_recover,
    wawd_recover, wn_recover_with, BasisKind, KernelMode, MeasuredPipeline, Method, Region,
};
use tfloc::io::{read_map, save_csv, save_pgm};
use tfloc::rng::NoiseKind;
use tfloc::spectrum::eigendecompose;
use tfloc::symbols::{compress_positive_frequency, gen_symbol, Bump, SymbolShape, SymbolSpec};
use tfloc::window::{window_center, WindowSpec};
use tfloc::{Error, LocOperator, RealMap, Result, ValueRange};

#[derive(Parser, Debug)]
#[command(name = "tfloc", version, about = "Localization operators and symbol recovery on Z_L x Z_L")]
struct Cli {
    /// Worker threads, 0 picks one per core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic symbol.
    GenSymbol(GenSymbolArgs),
    /// Build the operator of a symbol and recover the symbol from it.
    Recover(RecoverArgs),
    /// Write the blurring kernel of an estimator.
    Impulse(ImpulseArgs),
    /// Deconvolve an estimate by a kernel.
    Deconvolve(DeconvolveArgs),
    /// Run every method on every symbol of a benchmark config.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct GenSymbolArgs {
    /// circle, gaussians, star, lines_circles, blurred_lines_circles, tiles or bitmap.
    #[arg(long)]
    kind: String,
    #[arg(long)]
    size: usize,
    /// Value range as lo,hi inside [-1, 1].
    #[arg(long, default_value = "0,1", value_parser = parse_range)]
    range: ValueRange,
    /// Gaussian blur in pixels.
    #[arg(long)]
    blur: Option<f64>,
    /// Center as n,m (circle, star).
    #[arg(long, value_parser = parse_pair)]
    center: Option<[f64; 2]>,
    /// Disk radius (circle).
    #[arg(long)]
    radius: Option<f64>,
    /// Number of default bumps (gaussians).
    #[arg(long)]
    count: Option<usize>,
    /// Bump as n,m,sigma[,amplitude] (gaussians, repeatable).
    #[arg(long = "bump", value_parser = parse_bump)]
    bumps: Vec<Bump>,
    /// Star tips.
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    outer_radius: Option<f64>,
    #[arg(long)]
    inner_radius: Option<f64>,
    /// Stroke width (lines_circles).
    #[arg(long)]
    width: Option<f64>,
    /// Tile rows and columns.
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    /// Source image (bitmap).
    #[arg(long)]
    path: Option<PathBuf>,
    /// Output file; `.csv` writes CSV, anything else 16-bit PGM.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Wn,
    Was,
    Wawd,
    Pt,
    Gp,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Wn => Method::Wn,
            MethodArg::Was => Method::Was,
            MethodArg::Wawd => Method::Wawd,
            MethodArg::Pt => Method::Pt,
            MethodArg::Gp => Method::Gp,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NoiseArg {
    Complex,
    Real,
}

#[derive(Args, Debug)]
struct OperatorArgs {
    /// Symbol file (PGM or CSV).
    #[arg(long)]
    symbol: PathBuf,
    /// Expected grid size; checked against the symbol file.
    #[arg(long)]
    size: Option<usize>,
    /// Value range a PGM symbol is mapped onto.
    #[arg(long, default_value = "0,1", value_parser = parse_range)]
    range: ValueRange,
    /// Operator window system, e.g. gauss, hermite:1 or 0.5*gauss+0.5*hermite:1.
    #[arg(long, default_value = "gauss")]
    window: WindowSpec,
    /// Zero the upper half of the frequency axis of the symbol first.
    #[arg(long)]
    compress_positive_frequency: bool,
}

#[derive(Args, Debug)]
struct RecoverArgs {
    #[arg(long)]
    method: MethodArg,
    #[command(flatten)]
    operator: OperatorArgs,
    /// Reconstruction window, defaults to --window.
    #[arg(long)]
    recon_window: Option<WindowSpec>,
    /// White-noise realizations.
    #[arg(long = "K", default_value_t = 200)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = NoiseArg::Complex)]
    noise: NoiseArg,
    /// Eigenpairs for was and wawd, defaults to all.
    #[arg(long)]
    eigs: Option<usize>,
    /// Orthonormal basis for pt: standard, dft or hermite:N@n,m.
    #[arg(long, default_value = "standard")]
    basis: BasisKind,
    /// Restrict gp to the rectangle n0,m0,n1,m1 (half-open).
    #[arg(long, value_parser = parse_region)]
    region: Option<[usize; 4]>,
    /// Keep wawd output in absolute time coordinates.
    #[arg(long)]
    no_align: bool,
    /// Output stem; writes <stem>.pgm, <stem>.csv and <stem>.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Analytic,
    Measured,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PipelineArg {
    Gp,
    Was,
    Wawd,
}

#[derive(Args, Debug)]
struct ImpulseArgs {
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Estimator whose response is measured.
    #[arg(long, value_enum, default_value_t = PipelineArg::Gp)]
    pipeline: PipelineArg,
    #[arg(long)]
    size: usize,
    #[arg(long, default_value = "gauss")]
    window: WindowSpec,
    /// Reconstruction window, defaults to --window.
    #[arg(long)]
    recon_window: Option<WindowSpec>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DeconvolveArgs {
    /// Estimate file (CSV, or PGM mapped onto --range).
    #[arg(long)]
    est: PathBuf,
    /// Kernel file (CSV, or PGM mapped onto --range).
    #[arg(long)]
    kernel: PathBuf,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value = "0,1", value_parser = parse_range)]
    range: ValueRange,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    /// Directory for report.json, report.txt and report.csv.
    #[arg(long)]
    out: PathBuf,
}

fn parse_numbers<T: std::str::FromStr>(s: &str, count: std::ops::RangeInclusive<usize>) -> std::result::Result<Vec<T>, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if !count.contains(&parts.len()) {
        return Err(format!("expected {} comma-separated numbers, got '{s}'", count.start()));
    }
    parts
        .iter()
        .map(|p| p.parse().map_err(|_| format!("bad number '{p}'")))
        .collect()
}

fn parse_range(s: &str) -> std::result::Result<ValueRange, String> {
    let v: Vec<f64> = parse_numbers(s, 2..=2)?;
    Ok(ValueRange::new(v[0], v[1]))
}

fn parse_pair(s: &str) -> std::result::Result<[f64; 2], String> {
    let v: Vec<f64> = parse_numbers(s, 2..=2)?;
    Ok([v[0], v[1]])
}

fn parse_bump(s: &str) -> std::result::Result<Bump, String> {
    let v: Vec<f64> = parse_numbers(s, 3..=4)?;
    Ok(Bump {
        center: [v[0], v[1]],
        sigma: v[2],
        amplitude: v.get(3).copied().unwrap_or(1.0),
    })
}

fn parse_region(s: &str) -> std::result::Result<[usize; 4], String> {
    let v: Vec<usize> = parse_numbers(s, 4..=4)?;
    Ok([v[0], v[1], v[2], v[3]])
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("tfloc: cannot start thread pool: {e}");
        return ExitCode::from(2);
    }
    let outcome = match cli.command {
        Command::GenSymbol(args) => gen_symbol_cmd(args),
        Command::Recover(args) => recover_cmd(args),
        Command::Impulse(args) => impulse_cmd(args),
        Command::Deconvolve(args) => deconvolve_cmd(args),
        Command::Bench(args) => bench_cmd(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tfloc: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}

fn gen_symbol_cmd(a: GenSymbolArgs) -> Result<()> {
    let shape = match a.kind.as_str() {
        "bitmap" => SymbolShape::Bitmap {
            path: a
                .path
                .ok_or_else(|| Error::InvalidParameter("bitmap needs --path".into()))?,
        },
        kind => match kind.parse()? {
            SymbolShape::Circle { .. } => SymbolShape::Circle {
                center: a.center,
                radius: a.radius,
            },
            SymbolShape::Gaussians { .. } => SymbolShape::Gaussians {
                bumps: (!a.bumps.is_empty()).then_some(a.bumps),
                count: a.count,
            },
            SymbolShape::Star { .. } => SymbolShape::Star {
                center: a.center,
                points: a.points,
                outer_radius: a.outer_radius,
                inner_radius: a.inner_radius,
            },
            SymbolShape::LinesCircles { .. } => SymbolShape::LinesCircles { width: a.width },
            SymbolShape::BlurredLinesCircles { .. } => SymbolShape::BlurredLinesCircles { width: a.width },
            SymbolShape::Tiles { .. } => SymbolShape::Tiles {
                rows: a.rows,
                cols: a.cols,
            },
            SymbolShape::Bitmap { .. } => unreachable!("parsed separately"),
        },
    };
    let spec = SymbolSpec {
        size: a.size,
        value_range: a.range,
        blur: a.blur,
        shape,
    };
    let map = gen_symbol(&spec)?;
    if tfloc::io::has_extension(&a.out, "csv") {
        save_csv(&map, &a.out)
    } else {
        save_pgm(&map, &a.out, spec.value_range)
    }
}

fn load_symbol(a: &OperatorArgs) -> Result<RealMap> {
    let mut f = read_map(&a.symbol, a.range)?;
    if let Some(size) = a.size {
        if f.size() != size {
            return Err(Error::Shape(format!(
                "symbol {} is {}x{}, --size is {size}",
                a.symbol.display(),
                f.size(),
                f.size()
            )));
        }
    }
    if a.compress_positive_frequency {
        f = compress_positive_frequency(&f);
    }
    Ok(f)
}

/// Writes `<stem>.csv` (exact), `<stem>.pgm` (scaled to the finite range of
/// the map) and `<stem>.json`.
fn write_outputs(stem: &Path, map: &RealMap, mut sidecar: Value) -> Result<()> {
    if let Some(dir) = stem.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let csv = stem.with_extension("csv");
    let pgm = stem.with_extension("pgm");
    let json_path = stem.with_extension("json");
    save_csv(map, &csv)?;
    let (lo, hi) = map.finite_range().unwrap_or((0.0, 1.0));
    let range = if hi > lo {
        ValueRange::new(lo, hi)
    } else {
        ValueRange::new(lo, lo + 1.0)
    };
    save_pgm(map, &pgm, range)?;
    sidecar["outputs"] = json!({
        "csv": csv,
        "pgm": pgm,
        "pgm_range": [range.lo, range.hi],
    });
    fs::write(&json_path, serde_json::to_string_pretty(&sidecar).expect("json value") + "\n")?;
    Ok(())
}

fn recover_cmd(a: RecoverArgs) -> Result<()> {
    let start = Instant::now();
    let method = Method::from(a.method);
    let f = load_symbol(&a.operator)?;
    let size = f.size();
    let recon_spec = a.recon_window.clone().unwrap_or_else(|| a.operator.window.clone());
    if a.region.is_some() && method != Method::Gp {
        return Err(Error::InvalidParameter("--region only applies to gp".into()));
    }
    let system = a.operator.window.build(size)?;
    let op = LocOperator::build(&f, &system)?;
    let noise = match a.noise {
        NoiseArg::Complex => NoiseKind::Complex,
        NoiseArg::Real => NoiseKind::Real,
    };
    let eigs = a.eigs.unwrap_or(size);

    let result = match method {
        Method::Wn => wn_recover_with(&op, &recon_spec.build_single(size)?, a.k, a.sigma2, a.seed, noise)?,
        Method::Pt => pt_recover(&op, &a.basis.build(size)?, &recon_spec.build_single(size)?)?,
        Method::Gp => {
            let region = a
                .region
                .map(|[n0, m0, n1, m1]| Region::rect(size, n0, m0, n1, m1))
                .transpose()?;
            gp_recover(&op, &recon_spec.build_single(size)?, region.as_ref())?
        }
        Method::Was => was_recover(&eigendecompose(&op)?, &recon_spec.build(size)?, eigs)?,
        Method::Wawd => {
            let mut r = wawd_recover(&eigendecompose(&op)?, eigs)?;
            if !a.no_align {
                r.estimate = align_wigner_estimate(&r.estimate, window_center(size));
            }
            r
        }
    };

    let mut config = json!({
        "method": method,
        "symbol": a.operator.symbol,
        "size": size,
        "range": a.operator.range,
        "window": a.operator.window,
        "recon_window": recon_spec,
        "compress_positive_frequency": a.operator.compress_positive_frequency,
    });
    match method {
        Method::Wn => {
            config["K"] = json!(a.k);
            config["sigma2"] = json!(a.sigma2);
            config["seed"] = json!(a.seed);
            config["noise"] = json!(noise);
        }
        Method::Was => config["eigs"] = json!(eigs),
        Method::Wawd => {
            config["eigs"] = json!(eigs);
            config["aligned"] = json!(!a.no_align);
        }
        Method::Pt => config["basis"] = json!(a.basis),
        Method::Gp => config["region"] = json!(a.region),
    }
    let sidecar = json!({
        "command": "recover",
        "config": config,
        "symbol_hash": op.symbol_hash(),
        "meta": result.meta,
        "runtime_seconds": start.elapsed().as_secs_f64(),
    });
    write_outputs(&a.out, &result.estimate, sidecar)
}

fn impulse_cmd(a: ImpulseArgs) -> Result<()> {
    let start = Instant::now();
    let system = a.window.build(a.size)?;
    let recon = a.recon_window.clone().unwrap_or_else(|| a.window.clone());
    let phi = recon.build_single(a.size)?;
    let mode = match a.mode {
        ModeArg::Analytic => KernelMode::Analytic,
        ModeArg::Measured => KernelMode::Measured(match a.pipeline {
            PipelineArg::Gp => MeasuredPipeline::Gp,
            PipelineArg::Was => MeasuredPipeline::Was,
            PipelineArg::Wawd => MeasuredPipeline::Wawd,
        }),
    };
    let kernel = impulse_kernel(&system, &phi, mode)?;
    let sidecar = json!({
        "command": "impulse",
        "config": {
            "mode": format!("{:?}", a.mode).to_lowercase(),
            "pipeline": matches!(a.mode, ModeArg::Measured).then(|| format!("{:?}", a.pipeline).to_lowercase()),
            "size": a.size,
            "window": a.window,
            "recon_window": recon,
        },
        "meta": { "mass": kernel.sum() },
        "runtime_seconds": start.elapsed().as_secs_f64(),
    });
    write_outputs(&a.out, &kernel, sidecar)
}

fn deconvolve_cmd(a: DeconvolveArgs) -> Result<()> {
    let start = Instant::now();
    let est = read_map(&a.est, a.range)?;
    let kernel = read_map(&a.kernel, a.range)?;
    let (out, max_imag) = deconvolve_with_residual(&est, &kernel, a.eps)?;
    let sidecar = json!({
        "command": "deconvolve",
        "config": {
            "est": a.est,
            "kernel": a.kernel,
            "eps": a.eps,
            "range": a.range,
        },
        "meta": { "max_imag": max_imag },
        "runtime_seconds": start.elapsed().as_secs_f64(),
    });
    write_outputs(&a.out, &out, sidecar)
}

fn bench_cmd(a: BenchArgs) -> Result<()> {
    let config = BenchConfig::load(&a.config)?;
    let report = bench_all(&config)?;
    report.write_to_dir(&a.out)?;
    print!("{}", report.to_table());
    Ok(())
}
