//! Command-line front end: `gen`, `metric`, `flc`, `search`, `verify` and
//! `render`, driven by one JSON run config plus flag overrides.
//!
//! Exit codes: 0 success, 1 input or config error, 2 verification failure,
//! 3 search budget exhausted.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use log::{info, warn};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::complexity::classify_flc;
use crate::error::{Error, Result};
use crate::generators::{GeneratorSpec, WindowProvider};
use crate::geometry::{Tolerances, Vec2};
use crate::ipsets::IPSetSpec;
use crate::metrics::{metric_adapted, metric_general, Adapted, AdaptedOptions};
use crate::recurrence::{search_witness, verify_witness, CertificateFile, PatternF, SearchParams, Variant, WitnessCertificate};
use crate::render::render_svg;
use crate::tiling::{TilingWindow, WindowFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

const DEFAULT_RADIUS: f64 = 10.0;
const DEFAULT_SEARCH_RADIUS: f64 = 50.0;
const DEFAULT_DELTA: f64 = 0.01;
const DEFAULT_EPSILON: f64 = 0.25;
const DEFAULT_N_BUDGET: u64 = 60;
const DEFAULT_FLC_RADII: [f64; 3] = [5.0, 10.0, 20.0];

/// Contents of the `--config` file. Every field is optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub generator: Option<GeneratorSpec>,
    pub tolerances: Tolerances,
    /// Sampling pitch of the general metric.
    pub delta: Option<f64>,
    /// Window radius for `gen`, search radius for `search`, truncation
    /// radius for `metric d`.
    pub radius: Option<f64>,
    pub flc_radii: Option<Vec<f64>>,
    pub pattern: Option<Vec<[f64; 2]>>,
    pub epsilon: Option<f64>,
    pub variant: Option<Variant>,
    pub n_budget: Option<u64>,
    pub ip: Option<IPSetSpec>,
    /// Smallest level of the adapted-metric grid.
    pub r_min: Option<f64>,
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    D,
    D1,
    D2,
    D3,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Thm1,
    Thm2,
    Thm3,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Thm1 => Variant::Thm1,
            VariantArg::Thm2 => Variant::Thm2,
            VariantArg::Thm3 => Variant::Thm3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "tilerec", version, about = "Tiling spaces and scaled pattern recurrence certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    metric: Option<MetricArg>,
    #[arg(long, global = true, value_enum)]
    variant: Option<VariantArg>,
    #[arg(long, global = true, value_name = "REAL")]
    epsilon: Option<f64>,
    #[arg(long = "n-budget", global = true, value_name = "INT")]
    n_budget: Option<u64>,
    #[arg(long, global = true, value_name = "REAL")]
    radius: Option<f64>,
    #[arg(long, global = true, value_name = "PATH")]
    ip: Option<PathBuf>,
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "INT")]
    threads: Option<usize>,
    #[arg(long, global = true, value_name = "INT")]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a window of the configured tiling.
    Gen,
    /// Distance between two window files.
    Metric { a: PathBuf, b: PathBuf },
    /// Finite local complexity evidence for the configured tiling.
    Flc,
    /// Search for a recurrence certificate, in a window file or the configured tiling.
    Search { window: Option<PathBuf> },
    /// Check a certificate against a window file.
    Verify { window: PathBuf, certificate: PathBuf },
    /// Draw a window file as SVG, optionally with a certificate overlay.
    Render { window: PathBuf, certificate: Option<PathBuf> },
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter_or("TILEREC_LOG", "error"))
        .format_timestamp(None)
        .try_init();
    let outcome = match cli.threads {
        Some(0) => Err(Error::InvalidInput("--threads must be positive".into())),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(Error::InvalidInput(format!("thread pool: {e}"))),
        },
        None => dispatch(&cli),
    };
    match outcome {
        Ok(code) => code,
        Err(Error::BudgetExhausted) => {
            eprintln!("error: {}", Error::BudgetExhausted);
            EXIT_BUDGET
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let mut cfg = load_config(cli.config.as_deref())?;
    apply_overrides(&mut cfg, cli)?;
    cfg.tolerances.validate()?;
    match &cli.command {
        Command::Gen => cmd_gen(&cfg),
        Command::Metric { a, b } => cmd_metric(&cfg, cli.metric.unwrap_or(MetricArg::D1), a, b),
        Command::Flc => cmd_flc(&cfg),
        Command::Search { window } => cmd_search(&cfg, window.as_deref()),
        Command::Verify { window, certificate } => cmd_verify(&cfg, window, certificate),
        Command::Render { window, certificate } => cmd_render(&cfg, window, certificate.as_deref()),
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => Ok(serde_json::from_str(&read(p)?)?),
        None => Ok(RunConfig::default()),
    }
}

fn apply_overrides(cfg: &mut RunConfig, cli: &Cli) -> Result<()> {
    if let Some(v) = cli.variant {
        cfg.variant = Some(v.into());
    }
    if let Some(e) = cli.epsilon {
        cfg.epsilon = Some(e);
    }
    if let Some(n) = cli.n_budget {
        cfg.n_budget = Some(n);
    }
    if let Some(r) = cli.radius {
        cfg.radius = Some(r);
    }
    if let Some(p) = &cli.ip {
        cfg.ip = Some(serde_json::from_str(&read(p)?)?);
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    if let Some(s) = cli.seed {
        if let Some(g) = cfg.generator.as_mut() {
            g.seed = s;
        }
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidInput(format!("{name} must be positive and finite")))
    }
}

fn generator(cfg: &RunConfig) -> Result<&GeneratorSpec> {
    cfg.generator.as_ref().ok_or_else(|| Error::InvalidInput("config has no generator".into()))
}

fn load_window(path: &Path) -> Result<TilingWindow> {
    let file: WindowFile = serde_json::from_str(&read(path)?)?;
    TilingWindow::from_file(&file)
}

fn load_certificate(path: &Path, w: &TilingWindow) -> Result<WitnessCertificate> {
    let file: CertificateFile = serde_json::from_str(&read(path)?)?;
    WitnessCertificate::from_file(&file, w)
}

/// `v` rounded to 12 significant digits.
pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64().and_then(|x| serde_json::Number::from_f64(round_sig(x))) {
                *n = x;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to 12 significant digits.
pub fn to_json<T: Serialize>(t: &T) -> Result<String> {
    let mut v = serde_json::to_value(t)?;
    round_value(&mut v);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(p) => {
            fs::write(p, text).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?;
            info!("wrote {}", p.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_gen(cfg: &RunConfig) -> Result<i32> {
    let radius = positive("radius", cfg.radius.unwrap_or(DEFAULT_RADIUS))?;
    let provider = generator(cfg)?.build(radius)?;
    let w = provider.window(radius)?;
    info!("generated {} tiles at radius {radius}", w.tiles.len());
    emit(cfg, &to_json(&w.to_file())?)?;
    Ok(EXIT_OK)
}

/// Smallest adapted-metric level whose inflated window fits in radius `r`.
fn default_r_min(r: f64) -> Result<f64> {
    let disc = r * r - 12.0;
    if disc <= 0.0 {
        return Err(Error::InvalidInput(format!("window radius {r} too small for the adapted metrics")));
    }
    Ok(((r - disc.sqrt()) / 6.0 * 1.001).max(1e-3))
}

fn cmd_metric(cfg: &RunConfig, metric: MetricArg, a: &Path, b: &Path) -> Result<i32> {
    let (wa, wb) = (load_window(a)?, load_window(b)?);
    let avail = wa.radius.min(wb.radius);
    let x = WindowProvider::from_window(wa);
    let y = WindowProvider::from_window(wb);
    let result = match metric {
        MetricArg::D => {
            let d = x.max_diameter().max(y.max_diameter());
            let big_n = cfg.radius.unwrap_or((avail - d).floor());
            if !(big_n >= 1.0) {
                return Err(Error::InvalidInput("windows too small for the general metric".into()));
            }
            metric_general(&x, &y, big_n as u32, positive("delta", cfg.delta.unwrap_or(DEFAULT_DELTA))?)?
        }
        MetricArg::D1 | MetricArg::D2 | MetricArg::D3 => {
            let kind = match metric {
                MetricArg::D1 => Adapted::D1,
                MetricArg::D2 => Adapted::D2,
                _ => Adapted::D3,
            };
            let r_min = match cfg.r_min {
                Some(r) => r,
                None => default_r_min(avail)?,
            };
            let opts = AdaptedOptions { tol: cfg.tolerances, ..AdaptedOptions::new(r_min) };
            metric_adapted(&x, &y, kind, &opts)?
        }
    };
    print!("{}", to_json(&result)?);
    Ok(EXIT_OK)
}

fn cmd_flc(cfg: &RunConfig) -> Result<i32> {
    let radii = cfg.flc_radii.clone().unwrap_or_else(|| DEFAULT_FLC_RADII.to_vec());
    let cover = radii.iter().copied().fold(0.0, f64::max);
    let provider = generator(cfg)?.build(cover)?;
    let report = classify_flc(&provider, &radii, &cfg.tolerances)?;
    info!("verdict {:?}", report.verdict);
    emit(cfg, &to_json(&report)?)?;
    Ok(EXIT_OK)
}

fn cmd_search(cfg: &RunConfig, window: Option<&Path>) -> Result<i32> {
    let pattern = cfg.pattern.clone().unwrap_or_else(|| vec![[1.0, 0.0]]);
    let f = PatternF::new(pattern.into_iter().map(Vec2::from).collect())?;
    let (provider, r_search) = match window {
        Some(p) => {
            let w = load_window(p)?;
            let r = cfg.radius.unwrap_or(w.radius);
            (WindowProvider::from_window(w), r)
        }
        None => {
            let r = cfg.radius.unwrap_or(DEFAULT_SEARCH_RADIUS);
            (generator(cfg)?.build(r)?, r)
        }
    };
    let params = SearchParams {
        epsilon: cfg.epsilon.unwrap_or(DEFAULT_EPSILON),
        variant: cfg.variant.unwrap_or(Variant::Thm1),
        n_budget: cfg.n_budget.unwrap_or(DEFAULT_N_BUDGET),
        r_search: positive("radius", r_search)?,
        ip: cfg.ip.clone(),
        tol: cfg.tolerances,
    };
    let cert = search_witness(&provider, &f, &params)?;
    info!("certificate with n = {} at base ({}, {})", cert.n, cert.base.x, cert.base.y);
    let text = to_json(&cert.to_file())?;
    let stored: CertificateFile = serde_json::from_str(&text)?;
    let w = provider.window(r_search)?;
    let reread = WitnessCertificate::from_file(&stored, &w)?;
    if !verify_witness(&provider, &reread, &cfg.tolerances)? {
        warn!("certificate fails verification after serialization");
        return Ok(EXIT_INVALID);
    }
    emit(cfg, &text)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct VerifyReport {
    valid: bool,
    variant: Variant,
    n: u64,
    epsilon: f64,
    base: [f64; 2],
}

fn cmd_verify(cfg: &RunConfig, window: &Path, certificate: &Path) -> Result<i32> {
    let w = load_window(window)?;
    let cert = load_certificate(certificate, &w)?;
    let provider = WindowProvider::from_window(w);
    let valid = verify_witness(&provider, &cert, &cfg.tolerances)?;
    let report = VerifyReport {
        valid,
        variant: cert.variant(),
        n: cert.n,
        epsilon: cert.epsilon,
        base: [cert.base.x, cert.base.y],
    };
    print!("{}", to_json(&report)?);
    Ok(if valid { EXIT_OK } else { EXIT_INVALID })
}

fn cmd_render(cfg: &RunConfig, window: &Path, certificate: Option<&Path>) -> Result<i32> {
    let w = load_window(window)?;
    let cert = certificate.map(|c| load_certificate(c, &w)).transpose()?;
    emit(cfg, &render_svg(&w, cert.as_ref()))?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(1.234567890123456), 1.23456789012);
        assert_eq!(round_sig(-2.5e-20), -2.5e-20);
        assert_eq!(round_sig(0.0), 0.0);
        let s = to_json(&serde_json::json!({"a": [1, 0.30000000000000004]})).unwrap();
        assert!(s.contains("0.3\n"), "{s}");
    }

    #[test]
    fn config_rejects_unknown_fields() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"radius": 3, "bogus": 1}"#).is_err());
        let c: RunConfig = serde_json::from_str(r#"{"generator": {"kind": "lattice"}, "epsilon": 0.1}"#).unwrap();
        assert_eq!(c.epsilon, Some(0.1));
        assert_eq!(c.tolerances, Tolerances::default());
    }

    #[test]
    fn r_min_fits_window() {
        for r in [4.0, 10.0, 30.0] {
            let m = default_r_min(r).unwrap();
            assert!(1.0 / m + 3.0 * m <= r + 1e-9, "r = {r}, r_min = {m}");
        }
        assert!(default_r_min(3.0).is_err());
    }
}
