//! Multi-method benchmark: every configured symbol through every method,
//! scored by relative L1 error.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{
    align_wigner_estimate, gp_recover, pt_recover, was_recover, wawd_recover, wn_recover, BasisKind, Method,
};
use crate::metrics::rel_l1_error;
use crate::operator::LocOperator;
use crate::phase_map::{RealMap, ValueRange};
use crate::spectrum::{eigendecompose, Spectrum};
use crate::symbols::{gen_symbol, SymbolShape, SymbolSpec};
use crate::window::{window_center, WindowSpec};

pub const SCHEMA_VERSION: u32 = 1;

/// A symbol entry in a benchmark config; the grid size comes from the config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSymbol {
    /// Row label, defaults to the kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub value_range: ValueRange,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blur: Option<f64>,
    #[serde(flatten)]
    pub shape: SymbolShape,
}

impl BenchSymbol {
    pub fn new(shape: SymbolShape) -> Self {
        BenchSymbol {
            name: None,
            value_range: ValueRange::UNIT,
            blur: None,
            shape,
        }
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.shape.kind().to_string())
    }

    pub fn spec(&self, size: usize) -> SymbolSpec {
        SymbolSpec {
            size,
            value_range: self.value_range,
            blur: self.blur,
            shape: self.shape.clone(),
        }
    }
}

fn default_sigma2() -> f64 {
    1.0
}

fn default_k() -> usize {
    200
}

fn default_basis() -> BasisKind {
    BasisKind::Standard
}

fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

/// Benchmark configuration, read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub schema_version: u32,
    pub size: usize,
    /// Window system of the operator.
    #[serde(default = "WindowSpec::gauss")]
    pub window: WindowSpec,
    /// Reconstruction window. WAS accepts a mixture; WN, PT and GP need a
    /// single window. Defaults to `window`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recon_window: Option<WindowSpec>,
    #[serde(default)]
    pub seed: u64,
    /// White-noise realizations.
    #[serde(rename = "K", default = "default_k")]
    pub k: usize,
    #[serde(default = "default_sigma2")]
    pub sigma2: f64,
    /// Eigenpairs used by WAS and WAWD, defaults to `size`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigs: Option<usize>,
    #[serde(default = "default_basis")]
    pub pt_basis: BasisKind,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub symbols: Vec<BenchSymbol>,
}

impl BenchConfig {
    pub fn new(size: usize, symbols: Vec<BenchSymbol>) -> Self {
        BenchConfig {
            schema_version: SCHEMA_VERSION,
            size,
            window: WindowSpec::gauss(),
            recon_window: None,
            seed: 0,
            k: default_k(),
            sigma2: default_sigma2(),
            eigs: None,
            pt_basis: default_basis(),
            methods: default_methods(),
            symbols,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: BenchConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.size < 4 {
            return Err(Error::InvalidSize(format!("size must be >= 4, got {}", self.size)));
        }
        if self.k == 0 {
            return Err(Error::InvalidCount("K must be >= 1".into()));
        }
        if !(self.sigma2.is_finite() && self.sigma2 > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma2 must be > 0, got {}", self.sigma2)));
        }
        if let Some(n) = self.eigs {
            if n == 0 || n > self.size {
                return Err(Error::InvalidCount(format!("eigs must be in 1..={}, got {n}", self.size)));
            }
        }
        Ok(())
    }

    /// The config with every default filled in, as recorded in reports.
    pub fn resolved(&self) -> BenchConfig {
        let mut out = self.clone();
        out.recon_window.get_or_insert_with(|| self.window.clone());
        out.eigs.get_or_insert(self.size);
        out
    }
}

/// What an estimate was compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Truth {
    /// The symbol itself.
    #[serde(rename = "f")]
    Symbol,
    /// `sqrt(max(estimate, 0))` against a non-negative symbol.
    #[serde(rename = "sqrt")]
    SquareRoot,
    /// The raw estimate against `f^2`, used for signed symbols.
    #[serde(rename = "f^2")]
    Square,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodScore {
    pub method: Method,
    /// Relative L1 error as a fraction.
    pub rel_l1: f64,
    /// `100 * rel_l1` rounded to one decimal.
    pub error_pct: f64,
    pub seconds: f64,
    pub truth: Truth,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolRow {
    pub symbol: String,
    /// Whether the symbol takes negative values.
    pub signed: bool,
    pub scores: Vec<MethodScore>,
}

impl SymbolRow {
    pub fn score(&self, method: Method) -> Option<&MethodScore> {
        self.scores.iter().find(|s| s.method == method)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub config: BenchConfig,
    pub rows: Vec<SymbolRow>,
}

/// Runs every configured method on every configured symbol.
///
/// Errors depend only on the config, not on timing or thread count.
pub fn bench_all(config: &BenchConfig) -> Result<BenchReport> {
    config.validate()?;
    let config = config.resolved();
    let size = config.size;
    let system = config.window.build(size)?;
    let recon = config.recon_window.clone().expect("resolved");
    let recon_system = recon.build(size)?;
    let needs_single = config
        .methods
        .iter()
        .any(|m| matches!(m, Method::Wn | Method::Pt | Method::Gp));
    let phi = if needs_single {
        Some(recon.build_single(size)?)
    } else {
        None
    };
    let basis = if config.methods.contains(&Method::Pt) {
        config.pt_basis.build(size)?
    } else {
        Vec::new()
    };
    let eigs = config.eigs.expect("resolved");
    let center = window_center(size);

    let mut rows = Vec::with_capacity(config.symbols.len());
    for entry in &config.symbols {
        let f = gen_symbol(&entry.spec(size))?;
        let signed = f.as_slice().iter().any(|&v| v < 0.0);
        let op = LocOperator::build(&f, &system)?;
        let mut spectrum: Option<Spectrum> = None;
        let mut scores = Vec::with_capacity(config.methods.len());
        for &method in &config.methods {
            let start = Instant::now();
            let estimate = match method {
                Method::Wn => wn_recover(&op, phi.as_ref().expect("single"), config.k, config.sigma2, config.seed)?,
                Method::Pt => pt_recover(&op, &basis, phi.as_ref().expect("single"))?,
                Method::Gp => gp_recover(&op, phi.as_ref().expect("single"), None)?,
                Method::Was => was_recover(cached_spectrum(&mut spectrum, &op)?, &recon_system, eigs)?,
                Method::Wawd => {
                    let mut r = wawd_recover(cached_spectrum(&mut spectrum, &op)?, eigs)?;
                    r.estimate = align_wigner_estimate(&r.estimate, center);
                    r
                }
            }
            .estimate;
            let seconds = start.elapsed().as_secs_f64();
            let (rel_l1, truth) = score(method, &estimate, &f, signed)?;
            scores.push(MethodScore {
                method,
                rel_l1,
                error_pct: (rel_l1 * 1000.0).round() / 10.0,
                seconds,
                truth,
            });
        }
        rows.push(SymbolRow {
            symbol: entry.label(),
            signed,
            scores,
        });
    }
    Ok(BenchReport {
        schema_version: SCHEMA_VERSION,
        config,
        rows,
    })
}

/// Eigendecomposes on first use; the first spectral method pays for it.
fn cached_spectrum<'a>(cache: &'a mut Option<Spectrum>, op: &LocOperator) -> Result<&'a Spectrum> {
    if cache.is_none() {
        *cache = Some(eigendecompose(op)?);
    }
    Ok(cache.as_ref().expect("just filled"))
}

fn score(method: Method, estimate: &RealMap, f: &RealMap, signed: bool) -> Result<(f64, Truth)> {
    if !method.estimates_square() {
        return Ok((rel_l1_error(estimate, f)?, Truth::Symbol));
    }
    if signed {
        let square = f.map(|v| v * v);
        Ok((rel_l1_error(estimate, &square)?, Truth::Square))
    } else {
        let root = estimate.map(|v| v.max(0.0).sqrt());
        Ok((rel_l1_error(&root, f)?, Truth::SquareRoot))
    }
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned text table of error percentages, one row per symbol.
    pub fn to_table(&self) -> String {
        let methods = &self.config.methods;
        let name_width = self
            .rows
            .iter()
            .map(|r| r.symbol.len() + usize::from(r.signed))
            .chain(std::iter::once("symbol".len()))
            .max()
            .unwrap_or(6);
        let mut out = String::new();
        write!(out, "{:<name_width$}", "symbol").unwrap();
        for m in methods {
            write!(out, " {:>7}", m.label()).unwrap();
        }
        out.push('\n');
        for row in &self.rows {
            let name = if row.signed {
                format!("{}*", row.symbol)
            } else {
                row.symbol.clone()
            };
            write!(out, "{name:<name_width$}").unwrap();
            for m in methods {
                match row.score(*m) {
                    Some(s) => write!(out, " {:>7.1}", s.error_pct).unwrap(),
                    None => write!(out, " {:>7}", "-").unwrap(),
                }
            }
            out.push('\n');
        }
        out.push_str("errors in percent relative L1; WN and PT compare sqrt(estimate) with f");
        if self.rows.iter().any(|r| r.signed) {
            out.push_str(",\n* signed symbol: WN and PT compare the estimate with f^2");
        }
        out.push('\n');
        out
    }

    /// One line per (symbol, method).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("symbol,method,truth,error_pct,rel_l1,seconds\n");
        for row in &self.rows {
            for s in &row.scores {
                let truth = match s.truth {
                    Truth::Symbol => "f",
                    Truth::SquareRoot => "sqrt",
                    Truth::Square => "f^2",
                };
                writeln!(
                    out,
                    "{},{},{truth},{:.1},{:.17e},{:.6}",
                    row.symbol,
                    s.method.label(),
                    s.error_pct,
                    s.rel_l1,
                    s.seconds
                )
                .unwrap();
            }
        }
        out
    }

    /// Errors by symbol and method, without timings.
    pub fn errors(&self) -> BTreeMap<(String, Method), f64> {
        self.rows
            .iter()
            .flat_map(|r| r.scores.iter().map(move |s| ((r.symbol.clone(), s.method), s.rel_l1)))
            .collect()
    }

    /// Writes `report.json`, `report.txt` and `report.csv` into `dir`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.to_json())?;
        fs::write(dir.join("report.txt"), self.to_table())?;
        fs::write(dir.join("report.csv"), self.to_csv())?;
        Ok(())
    }
}
