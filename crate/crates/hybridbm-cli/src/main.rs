//! `hybridbm` command line interface.
//!
//! Subcommands cover simulation, density tabulation, moment dynamics,
//! market classification, VaR, tail probabilities, the discrete
//! microstructure simulator and a self-validation suite. Tabular output is
//! CSV (17-significant-digit round-trip formatting), scalar output is JSON,
//! and every run emits a JSON sidecar log (next to the output file, or on
//! stderr when writing to stdout).

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hybridbm::densities::{density_cdf, density_value, gaussian_density, Family};
use hybridbm::laplace::{invert_transform, InversionMethod};
use hybridbm::micro::{map_to_sde, simulate_discrete_path, MicrostructureParams, OrderSizeDist};
use hybridbm::model::classify_market;
use hybridbm::moments::{moment_odes_solve, variance_closed_form};
use hybridbm::risk::{
    experimental_bimodal_var, gaussian_var, hyperbolic_var, tail_probability,
    tail_probability_log10, TailFamily, VarModel, VarRequest,
};
use hybridbm::sde::{
    default_dt, simulate_conditional_gaussian, simulate_euler, simulate_hyperbolic,
    simulate_integrating_factor,
};
use hybridbm::stats::ks_one_sample;
use hybridbm::ModelParams;
use serde::Serialize;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hybridbm", version, about = "Hybrid arithmetic-geometric Brownian motion toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Flat key=value config file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct ModelOpts {
    #[arg(long)]
    mu1: Option<f64>,
    #[arg(long)]
    mu2: Option<f64>,
    #[arg(long)]
    sigma1: Option<f64>,
    #[arg(long)]
    sigma2: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    /// Symmetric-case shortcut: sets mu2 = sigma2^2 (nu - 1) / 2.
    #[arg(long, conflicts_with = "mu2")]
    nu: Option<f64>,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Monte Carlo samples of X_t under a chosen scheme.
    #[command(allow_negative_numbers = true)]
    Simulate {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        model: ModelOpts,
        /// euler | hyperbolic | integrating-factor | conditional-gaussian
        #[arg(long)]
        scheme: Option<String>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        paths: Option<u64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Tabulate a density family on a grid.
    #[command(allow_negative_numbers = true)]
    Density {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        model: ModelOpts,
        /// gaussian | nu0 | chameleon | bimodal | student | pearson4 | transform
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        t: Option<f64>,
        /// Comma-separated times; emits one file per time (requires --out).
        #[arg(long, conflicts_with = "t")]
        ts: Option<String>,
        #[arg(long)]
        xmin: Option<f64>,
        #[arg(long)]
        xmax: Option<f64>,
        #[arg(long)]
        n: Option<u64>,
        /// Inversion method for --family transform: gs | talbot
        #[arg(long)]
        method: Option<String>,
        /// Add an f_gaussian column (naive sigma1^2 t variance) for overlays.
        #[arg(long)]
        overlay: bool,
    },
    /// Moments e_1..e_order on a time grid from the moment ODEs.
    #[command(allow_negative_numbers = true)]
    Moments {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        model: ModelOpts,
        #[arg(long)]
        order: Option<u64>,
        /// Comma-separated times starting at 0.
        #[arg(long)]
        t_grid: Option<String>,
        #[arg(long)]
        x0: Option<f64>,
    },
    /// Market-state classification from the parameters.
    #[command(allow_negative_numbers = true)]
    Classify {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        model: ModelOpts,
    },
    /// Signed value-at-risk.
    #[command(allow_negative_numbers = true)]
    Var {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        model: ModelOpts,
        #[arg(long)]
        u0: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        /// gaussian | hyperbolic | bimodal-experimental
        #[arg(long)]
        model_kind: Option<String>,
    },
    /// Standardized tail probability P(X > k).
    #[command(allow_negative_numbers = true)]
    Tails {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        k: Option<f64>,
        /// gaussian | student
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        nu: Option<f64>,
    },
    /// Discrete microstructure simulation and its SDE mapping.
    #[command(allow_negative_numbers = true)]
    Microsim {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        lambda_buy: Option<f64>,
        #[arg(long)]
        lambda_sell: Option<f64>,
        #[arg(long)]
        mu_slope: Option<f64>,
        #[arg(long)]
        lot: Option<u64>,
        #[arg(long)]
        omega: Option<f64>,
        /// deterministic:m | geometric:m | poisson:m
        #[arg(long)]
        dist: Option<String>,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        paths: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Only print the mapped SDE parameters as JSON.
        #[arg(long)]
        map_only: bool,
    },
    /// Monte-Carlo-vs-analytic validation harness.
    #[command(allow_negative_numbers = true)]
    Validate {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

// ---------------------------------------------------------------------------
// config file handling

type ConfigMap = HashMap<String, String>;

fn load_config(path: &Option<PathBuf>) -> Result<ConfigMap> {
    let mut map = ConfigMap::new();
    if let Some(path) = path {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {} is not key=value: {line}", i + 1))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    Ok(map)
}

fn reject_unknown_keys(cfg: &ConfigMap, allowed: &[&str]) -> Result<()> {
    for k in cfg.keys() {
        if !allowed.contains(&k.as_str()) {
            bail!("unknown config key: {k}");
        }
    }
    Ok(())
}

fn cfg_parse<T: std::str::FromStr>(cfg: &ConfigMap, key: &str) -> Result<Option<T>> {
    match cfg.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse::<T>()
            .map(Some)
            .map_err(|_| anyhow!("config key {key} has invalid value: {v}")),
    }
}

/// Command-line value if present, else config value, else default/missing.
fn resolve<T: std::str::FromStr + Clone>(
    cli: Option<T>,
    cfg: &ConfigMap,
    key: &str,
    default: Option<T>,
) -> Result<T> {
    if let Some(v) = cli {
        return Ok(v);
    }
    if let Some(v) = cfg_parse::<T>(cfg, key)? {
        return Ok(v);
    }
    default.ok_or_else(|| anyhow!("missing required option --{}", key.replace('_', "-")))
}

fn resolve_opt<T: std::str::FromStr + Clone>(
    cli: Option<T>,
    cfg: &ConfigMap,
    key: &str,
) -> Result<Option<T>> {
    if cli.is_some() {
        return Ok(cli);
    }
    cfg_parse::<T>(cfg, key)
}

const MODEL_KEYS: [&str; 6] = ["mu1", "mu2", "sigma1", "sigma2", "rho", "nu"];

fn resolve_model(opts: &ModelOpts, cfg: &ConfigMap) -> Result<ModelParams> {
    let mu1 = resolve(opts.mu1, cfg, "mu1", Some(0.0))?;
    let sigma1 = resolve(opts.sigma1, cfg, "sigma1", None::<f64>)?;
    let sigma2 = resolve(opts.sigma2, cfg, "sigma2", Some(0.0))?;
    let rho = resolve(opts.rho, cfg, "rho", Some(0.0))?;
    let nu = resolve_opt(opts.nu, cfg, "nu")?;
    let mu2 = match (opts.mu2, nu) {
        (Some(m), Some(_)) => {
            let _ = m;
            bail!("--mu2 and --nu are mutually exclusive");
        }
        (None, Some(nu)) => {
            if !(sigma2 > 0.0) {
                bail!("--nu requires sigma2 > 0");
            }
            0.5 * sigma2 * sigma2 * (nu - 1.0)
        }
        _ => resolve(opts.mu2, cfg, "mu2", Some(0.0))?,
    };
    ModelParams::new(mu1, mu2, sigma1, sigma2, rho).map_err(|e| anyhow!("{e}"))
}

// ---------------------------------------------------------------------------
// output plumbing

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Serialize)]
struct Sidecar<'a> {
    command: &'a str,
    version: &'a str,
    seed: Option<u64>,
    parameters: serde_json::Value,
}

fn write_output(common: &CommonOpts, body: &str, sidecar: &Sidecar) -> Result<()> {
    let log = serde_json::to_string_pretty(sidecar)?;
    match &common.out {
        Some(path) => {
            std::fs::write(path, body)
                .with_context(|| format!("cannot write {}", path.display()))?;
            let mut side = path.clone().into_os_string();
            side.push(".run.json");
            std::fs::write(&side, log)?;
        }
        None => {
            print!("{body}");
            eprintln!("{log}");
        }
    }
    Ok(())
}

fn require_seed(seed: Option<u64>) -> u64 {
    match seed {
        Some(s) => s,
        None => {
            let s: u64 = rand::random();
            eprintln!("seed: {s} (generated; pass --seed {s} to reproduce)");
            s
        }
    }
}

// ---------------------------------------------------------------------------
// subcommand implementations

fn parse_family(name: &str) -> Result<Family> {
    Ok(match name {
        "gaussian" => Family::Gaussian,
        "nu0" => Family::Nu0,
        "chameleon" => Family::Chameleon,
        "bimodal" => Family::BimodalNuMinus2,
        "student" => Family::Student,
        "pearson4" => Family::PearsonIV,
        "transform" => Family::TransformInverted,
        other => bail!("unknown family: {other}"),
    })
}

fn run_simulate(
    common: &CommonOpts,
    model: &ModelOpts,
    scheme: Option<String>,
    t: Option<f64>,
    paths: Option<u64>,
    dt: Option<f64>,
    seed: Option<u64>,
) -> Result<()> {
    let cfg = load_config(&common.config)?;
    let mut allowed = MODEL_KEYS.to_vec();
    allowed.extend(["scheme", "t", "paths", "dt", "seed"]);
    reject_unknown_keys(&cfg, &allowed)?;
    let params = resolve_model(model, &cfg)?;
    let scheme = resolve(scheme, &cfg, "scheme", Some("euler".to_string()))?;
    let t = resolve(t, &cfg, "t", Some(1.0))?;
    let paths = resolve(paths, &cfg, "paths", Some(10_000u64))? as usize;
    let dt = resolve(dt, &cfg, "dt", Some(default_dt(&params)))?;
    let seed = require_seed(resolve_opt(seed, &cfg, "seed")?);
    let steps = ((t / dt).ceil() as usize).max(10);
    let samples: Vec<f64> = match scheme.as_str() {
        "euler" => simulate_euler(&params, &[0.0, t], paths, dt, seed)
            .map_err(|e| anyhow!("{e}"))?
            .marginal(1),
        "hyperbolic" => simulate_hyperbolic(&params, &[0.0, t], paths, dt, seed)
            .map_err(|e| anyhow!("{e}"))?
            .marginal(1),
        "integrating-factor" => {
            simulate_integrating_factor(&params, t, paths, steps, seed).map_err(|e| anyhow!("{e}"))?
        }
        "conditional-gaussian" => simulate_conditional_gaussian(&params, t, paths, steps, seed)
            .map_err(|e| anyhow!("{e}"))?,
        other => bail!("unknown scheme: {other}"),
    };
    let mut body = String::from("path,x\n");
    for (i, x) in samples.iter().enumerate() {
        writeln!(body, "{i},{}", fmt(*x))?;
    }
    let sidecar = Sidecar {
        command: "simulate",
        version: env!("CARGO_PKG_VERSION"),
        seed: Some(seed),
        parameters: serde_json::json!({
            "mu1": params.mu1, "mu2": params.mu2, "sigma1": params.sigma1,
            "sigma2": params.sigma2, "rho": params.rho,
            "scheme": scheme, "t": t, "paths": paths, "dt": dt,
        }),
    };
    write_output(common, &body, &sidecar)
}

#[allow(clippy::too_many_arguments)]
fn run_density(
    common: &CommonOpts,
    model: &ModelOpts,
    family: Option<String>,
    t: Option<f64>,
    ts: Option<String>,
    xmin: Option<f64>,
    xmax: Option<f64>,
    n: Option<u64>,
    method: Option<String>,
    overlay: bool,
) -> Result<()> {
    let cfg = load_config(&common.config)?;
    let mut allowed = MODEL_KEYS.to_vec();
    allowed.extend(["family", "t", "ts", "xmin", "xmax", "n", "method"]);
    reject_unknown_keys(&cfg, &allowed)?;
    let mut params = resolve_model(model, &cfg)?;
    let family = parse_family(&resolve(family, &cfg, "family", None::<String>)?)?;
    // closed-form families fix nu; default mu2 to match unless the user
    // pinned it explicitly
    let implied_nu = match family {
        Family::Nu0 => Some(0.0),
        Family::Chameleon => Some(2.0),
        Family::BimodalNuMinus2 => Some(-2.0),
        _ => None,
    };
    let nu_pinned =
        model.mu2.is_some() || model.nu.is_some() || cfg.contains_key("mu2") || cfg.contains_key("nu");
    if let (Some(nu), false) = (implied_nu, nu_pinned) {
        if params.sigma2 > 0.0 {
            params = ModelParams::symmetric_with_nu(nu, params.sigma1, params.sigma2)
                .map_err(|e| anyhow!("{e}"))?;
        }
    }
    let xmin = resolve(xmin, &cfg, "xmin", Some(-5.0))?;
    let xmax = resolve(xmax, &cfg, "xmax", Some(5.0))?;
    let n = resolve(n, &cfg, "n", Some(501u64))? as usize;
    if n < 2 || xmax <= xmin {
        bail!("need n >= 2 and xmax > xmin");
    }
    let method = resolve(method, &cfg, "method", Some("gs".to_string()))?;
    let inversion = match method.as_str() {
        "gs" => InversionMethod::GaverStehfest,
        "talbot" => InversionMethod::TalbotFixed,
        other => bail!("unknown inversion method: {other}"),
    };
    let times: Vec<f64> = match (&ts, t) {
        (Some(list), _) => list
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| anyhow!("bad time: {s}")))
            .collect::<Result<_>>()?,
        (None, t) => vec![resolve(t, &cfg, "t", Some(1.0))?],
    };
    if times.len() > 1 && common.out.is_none() {
        bail!("--ts with multiple times requires --out");
    }
    // Gaussian overlay uses the naive variance sigma1^2 t
    let overlay_params = ModelParams::new(params.mu1, 0.0, params.sigma1, 0.0, 0.0)
        .map_err(|e| anyhow!("{e}"))?;
    for &time in &times {
        let mut body = String::from(if overlay { "x,f_hybrid,f_gaussian\n" } else { "x,f\n" });
        for i in 0..n {
            let x = xmin + (xmax - xmin) * i as f64 / (n - 1) as f64;
            let f = match family {
                Family::TransformInverted => {
                    invert_transform(x, time, &params, inversion).map_err(|e| anyhow!("{e}"))?
                }
                _ => density_value(family, x, time, &params).map_err(|e| anyhow!("{e}"))?,
            };
            if overlay {
                let g = gaussian_density(x, time, &overlay_params).map_err(|e| anyhow!("{e}"))?;
                writeln!(body, "{},{},{}", fmt(x), fmt(f), fmt(g))?;
            } else {
                writeln!(body, "{},{}", fmt(x), fmt(f))?;
            }
        }
        let sidecar = Sidecar {
            command: "density",
            version: env!("CARGO_PKG_VERSION"),
            seed: None,
            parameters: serde_json::json!({
                "mu1": params.mu1, "mu2": params.mu2, "sigma1": params.sigma1,
                "sigma2": params.sigma2, "rho": params.rho,
                "family": format!("{family:?}"), "t": time,
                "xmin": xmin, "xmax": xmax, "n": n,
                "method": method, "overlay": overlay,
            }),
        };
        if times.len() > 1 {
            let out = common.out.as_ref().unwrap();
            let name = out
                .file_name()
                .ok_or_else(|| anyhow!("--out must name a file"))?
                .to_string_lossy();
            let tagged = match name.rsplit_once('.') {
                Some((stem, ext)) => format!("{stem}_t{time}.{ext}"),
                None => format!("{name}_t{time}"),
            };
            let path = out.with_file_name(tagged);
            let per_time = CommonOpts { config: common.config.clone(), out: Some(path) };
            write_output(&per_time, &body, &sidecar)?;
        } else {
            write_output(common, &body, &sidecar)?;
        }
    }
    Ok(())
}

fn run_moments(
    common: &CommonOpts,
    model: &ModelOpts,
    order: Option<u64>,
    t_grid: Option<String>,
    x0: Option<f64>,
) -> Result<()> {
    let cfg = load_config(&common.config)?;
    let mut allowed = MODEL_KEYS.to_vec();
    allowed.extend(["order", "t_grid", "x0"]);
    reject_unknown_keys(&cfg, &allowed)?;
    let params = resolve_model(model, &cfg)?;
    let order = resolve(order, &cfg, "order", Some(2u64))? as usize;
    let x0 = resolve(x0, &cfg, "x0", Some(0.0))?;
    let grid_text = resolve(t_grid, &cfg, "t_grid", Some("0,0.25,0.5,0.75,1".to_string()))?;
    let grid: Vec<f64> = grid_text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| anyhow!("bad time: {s}")))
        .collect::<Result<_>>()?;
    let rows = moment_odes_solve(&params, order, &grid, x0).map_err(|e| anyhow!("{e}"))?;
    let mut body = String::from("t");
    for k in 1..=order {
        write!(body, ",e{k}")?;
    }
    body.push('\n');
    for mv in &rows {
        write!(body, "{}", fmt(mv.t))?;
        for k in 1..=order {
            write!(body, ",{}", fmt(mv.values[k]))?;
        }
        body.push('\n');
    }
    let sidecar = Sidecar {
        command: "moments",
        version: env!("CARGO_PKG_VERSION"),
        seed: None,
        parameters: serde_json::json!({
            "mu1": params.mu1, "mu2": params.mu2, "sigma1": params.sigma1,
            "sigma2": params.sigma2, "rho": params.rho,
            "order": order, "t_grid": grid, "x0": x0,
        }),
    };
    write_output(common, &body, &sidecar)
}

fn run_classify(common: &CommonOpts, model: &ModelOpts) -> Result<()> {
    let cfg = load_config(&common.config)?;
    reject_unknown_keys(&cfg, &MODEL_KEYS)?;
    let params = resolve_model(model, &cfg)?;
    let state = classify_market(&params).map_err(|e| anyhow!("{e}"))?;
    let body = serde_json::to_string_pretty(&serde_json::json!({
        "nu": state.nu,
        "regime": format!("{:?}", state.regime),
        "momentum_dominated": state.momentum_dominated,
        "timescale": state.timescale,
        "price_scale": state.price_scale,
    }))? + "\n";
    let sidecar = Sidecar {
        command: "classify",
        version: env!("CARGO_PKG_VERSION"),
        seed: None,
        parameters: serde_json::json!({
            "mu1": params.mu1, "mu2": params.mu2, "sigma1": params.sigma1,
            "sigma2": params.sigma2, "rho": params.rho,
        }),
    };
    write_output(common, &body, &sidecar)
}

fn run_var(
    common: &CommonOpts,
    model: &ModelOpts,
    u0: Option<f64>,
    t: Option<f64>,
    model_kind: Option<String>,
) -> Result<()> {
    let cfg = load_config(&common.config)?;
    let mut allowed = MODEL_KEYS.to_vec();
    allowed.extend(["u0", "t", "model_kind"]);
    reject_unknown_keys(&cfg, &allowed)?;
    let params = resolve_model(model, &cfg)?;
    let u0 = resolve(u0, &cfg, "u0", None::<f64>)?;
    let t = resolve(t, &cfg, "t", Some(1.0))?;
    let kind = resolve(model_kind, &cfg, "model_kind", Some("hyperbolic".to_string()))?;
    let svar = match kind.as_str() {
        "gaussian" => gaussian_var(
            &VarRequest::new(u0, t, params, VarModel::GaussianVar).map_err(|e| anyhow!("{e}"))?,
        ),
        "hyperbolic" => hyperbolic_var(
            &VarRequest::new(u0, t, params, VarModel::HyperbolicVar).map_err(|e| anyhow!("{e}"))?,
        ),
        "bimodal-experimental" => experimental_bimodal_var(
            &VarRequest::new(u0, t, params, VarModel::HyperbolicVar).map_err(|e| anyhow!("{e}"))?,
        ),
        other => bail!("unknown VaR model: {other}"),
    }
    .map_err(|e| anyhow!("{e}"))?;
    let body = serde_json::to_string_pretty(&serde_json::json!({
        "model": kind,
        "u0": u0,
        "t": t,
        "signed_var": svar,
        "reported_var": svar.abs(),
    }))? + "\n";
    let sidecar = Sidecar {
        command: "var",
        version: env!("CARGO_PKG_VERSION"),
        seed: None,
        parameters: serde_json::json!({
            "mu1": params.mu1, "mu2": params.mu2, "sigma1": params.sigma1,
            "sigma2": params.sigma2, "rho": params.rho, "u0": u0, "t": t, "model": kind,
        }),
    };
    write_output(common, &body, &sidecar)
}

fn run_tails(
    common: &CommonOpts,
    k: Option<f64>,
    family: Option<String>,
    nu: Option<f64>,
) -> Result<()> {
    let cfg = load_config(&common.config)?;
    reject_unknown_keys(&cfg, &["k", "family", "nu"])?;
    let k = resolve(k, &cfg, "k", None::<f64>)?;
    let family = resolve(family, &cfg, "family", Some("gaussian".to_string()))?;
    let nu = resolve_opt(nu, &cfg, "nu")?;
    let (p, log10p) = match family.as_str() {
        "gaussian" => (
            tail_probability(k, TailFamily::Gaussian, None).map_err(|e| anyhow!("{e}"))?,
            Some(tail_probability_log10(k)),
        ),
        "student" => (
            tail_probability(k, TailFamily::StudentNu, nu).map_err(|e| anyhow!("{e}"))?,
            None,
        ),
        other => bail!("unknown tail family: {other}"),
    };
    let body = serde_json::to_string_pretty(&serde_json::json!({
        "k": k,
        "family": family,
        "nu": nu,
        "probability": p,
        "log10_probability": log10p,
    }))? + "\n";
    let sidecar = Sidecar {
        command: "tails",
        version: env!("CARGO_PKG_VERSION"),
        seed: None,
        parameters: serde_json::json!({"k": k, "family": family, "nu": nu}),
    };
    write_output(common, &body, &sidecar)
}

fn parse_dist(text: &str) -> Result<OrderSizeDist> {
    let (kind, m) = text
        .split_once(':')
        .ok_or_else(|| anyhow!("order-size distribution must be kind:mean, got {text}"))?;
    Ok(match kind {
        "deterministic" => OrderSizeDist::Deterministic(
            m.parse::<u64>().map_err(|_| anyhow!("bad deterministic size: {m}"))?,
        ),
        "geometric" => OrderSizeDist::Geometric {
            mean: m.parse::<f64>().map_err(|_| anyhow!("bad geometric mean: {m}"))?,
        },
        "poisson" => OrderSizeDist::ShiftedPoisson {
            mean: m.parse::<f64>().map_err(|_| anyhow!("bad poisson mean: {m}"))?,
        },
        other => bail!("unknown order-size distribution: {other}"),
    })
}

#[allow(clippy::too_many_arguments)]
fn run_microsim(
    common: &CommonOpts,
    lambda_buy: Option<f64>,
    lambda_sell: Option<f64>,
    mu_slope: Option<f64>,
    lot: Option<u64>,
    omega: Option<f64>,
    dist: Option<String>,
    horizon: Option<f64>,
    dt: Option<f64>,
    paths: Option<u64>,
    seed: Option<u64>,
    map_only: bool,
) -> Result<()> {
    let cfg = load_config(&common.config)?;
    reject_unknown_keys(
        &cfg,
        &["lambda_buy", "lambda_sell", "mu_slope", "lot", "omega", "dist", "horizon", "dt", "paths", "seed"],
    )?;
    let lambda_buy = resolve(lambda_buy, &cfg, "lambda_buy", None::<f64>)?;
    let lambda_sell = resolve(lambda_sell, &cfg, "lambda_sell", None::<f64>)?;
    let mu_slope = resolve(mu_slope, &cfg, "mu_slope", Some(0.0))?;
    let lot = resolve(lot, &cfg, "lot", Some(1u64))?;
    let omega = resolve(omega, &cfg, "omega", Some(1.0))?;
    let dist = parse_dist(&resolve(dist, &cfg, "dist", Some("deterministic:1".to_string()))?)?;
    let mp = MicrostructureParams::new(lambda_buy, lambda_sell, mu_slope, lot, omega, dist)
        .map_err(|e| anyhow!("{e}"))?;
    let mapped = map_to_sde(&mp).map_err(|e| anyhow!("{e}"))?;
    let mapped_json = serde_json::json!({
        "mu1": mapped.mu1, "mu2": mapped.mu2,
        "sigma1": mapped.sigma1, "sigma2": mapped.sigma2, "rho": mapped.rho,
    });
    if map_only {
        let body = serde_json::to_string_pretty(&serde_json::json!({"mapped_sde": mapped_json}))? + "\n";
        let sidecar = Sidecar {
            command: "microsim",
            version: env!("CARGO_PKG_VERSION"),
            seed: None,
            parameters: serde_json::json!({
                "lambda_buy": lambda_buy, "lambda_sell": lambda_sell,
                "mu_slope": mu_slope, "lot": lot, "omega": omega,
            }),
        };
        return write_output(common, &body, &sidecar);
    }
    let horizon = resolve(horizon, &cfg, "horizon", Some(1.0))?;
    let dt = resolve(dt, &cfg, "dt", Some(1e-3))?;
    let paths = resolve(paths, &cfg, "paths", Some(1000u64))?;
    let seed = require_seed(resolve_opt(seed, &cfg, "seed")?);
    let mut body = String::from("path,x\n");
    for i in 0..paths {
        let path = simulate_discrete_path(&mp, horizon, dt, seed.wrapping_add(i))
            .map_err(|e| anyhow!("{e}"))?;
        writeln!(body, "{i},{}", fmt(path.last().unwrap().1))?;
    }
    let sidecar = Sidecar {
        command: "microsim",
        version: env!("CARGO_PKG_VERSION"),
        seed: Some(seed),
        parameters: serde_json::json!({
            "lambda_buy": lambda_buy, "lambda_sell": lambda_sell,
            "mu_slope": mu_slope, "lot": lot, "omega": omega,
            "horizon": horizon, "dt": dt, "paths": paths,
            "mapped_sde": mapped_json,
        }),
    };
    write_output(common, &body, &sidecar)
}

// ---------------------------------------------------------------------------
// validation harness

#[derive(Serialize)]
struct Check {
    name: String,
    statistic: f64,
    threshold: f64,
    pass: bool,
}

#[derive(Serialize)]
struct ValidationReport {
    suite: String,
    seed: u64,
    checks: Vec<Check>,
    pass: bool,
}

fn check(name: &str, statistic: f64, threshold: f64) -> Check {
    Check { name: name.to_string(), statistic, threshold, pass: statistic < threshold }
}

fn run_validate(common: &CommonOpts, suite: Option<String>, seed: Option<u64>) -> Result<bool> {
    let cfg = load_config(&common.config)?;
    reject_unknown_keys(&cfg, &["suite", "seed"])?;
    let suite = resolve(suite, &cfg, "suite", Some("core".to_string()))?;
    if suite != "core" {
        bail!("unknown validation suite: {suite}");
    }
    let seed = require_seed(resolve_opt(seed, &cfg, "seed")?);
    let started = std::time::Instant::now();
    let mut checks = Vec::new();

    // closed-form variance vs the moment ODE solver
    let mut worst = 0.0f64;
    for &nu in &[-2.0f64, 0.0, 2.0, 4.0] {
        let p = ModelParams::symmetric_with_nu(nu, 1.0, 1.0).map_err(|e| anyhow!("{e}"))?;
        for &t in &[0.5f64, 2.0] {
            let closed = variance_closed_form(&p, t).map_err(|e| anyhow!("{e}"))?;
            let mv = moment_odes_solve(&p, 2, &[0.0, t], 0.0).map_err(|e| anyhow!("{e}"))?;
            let ode = mv[1].values[2] - mv[1].values[1] * mv[1].values[1];
            worst = worst.max(((ode - closed) / closed).abs());
        }
    }
    checks.push(check("variance_ode_vs_closed", worst, 1e-8));

    // transform inversion against the closed nu = 0 density
    let p0 = ModelParams::symmetric_with_nu(0.0, 1.0, 1.0).map_err(|e| anyhow!("{e}"))?;
    let mut worst = 0.0f64;
    for &x in &[0.0f64, 0.5, 2.0] {
        for &t in &[0.5f64, 1.0] {
            let closed = density_value(Family::Nu0, x, t, &p0).map_err(|e| anyhow!("{e}"))?;
            let inv = invert_transform(x, t, &p0, InversionMethod::TalbotFixed)
                .map_err(|e| anyhow!("{e}"))?;
            worst = worst.max(((inv - closed) / closed).abs());
        }
    }
    checks.push(check("talbot_inversion_nu0", worst, 1e-4));

    // headline tail numbers
    let gauss_dev = (tail_probability_log10(25.0) - (6e-138f64).log10()).abs();
    checks.push(check("gaussian_25_sigma_log10", gauss_dev, 0.3));
    let s = tail_probability(25.0, TailFamily::StudentNu, Some(4.0)).map_err(|e| anyhow!("{e}"))?;
    checks.push(check("student4_25_sigma_ratio", (s / 4e-6).max(4e-6 / s), 2.0));

    // hyperbolic VaR Gaussian limit
    let ph = ModelParams::new(0.0, 0.0, 1.0, 1e-6, 0.0).map_err(|e| anyhow!("{e}"))?;
    let vh = hyperbolic_var(
        &VarRequest::new(0.01, 1.0, ph, VarModel::HyperbolicVar).map_err(|e| anyhow!("{e}"))?,
    )
    .map_err(|e| anyhow!("{e}"))?;
    let pg = ModelParams::new(0.0, 0.0, 1.0, 0.0, 0.0).map_err(|e| anyhow!("{e}"))?;
    let vg = gaussian_var(
        &VarRequest::new(0.01, 1.0, pg, VarModel::GaussianVar).map_err(|e| anyhow!("{e}"))?,
    )
    .map_err(|e| anyhow!("{e}"))?;
    checks.push(check("hyperbolic_var_gaussian_limit", ((vh - vg) / vg).abs(), 1e-6));

    // Monte Carlo law agreement for the nu = 0 family
    let ens = simulate_euler(&p0, &[0.0, 1.0], 20_000, 1e-3, seed).map_err(|e| anyhow!("{e}"))?;
    let mut xs = ens.marginal(1);
    let ks = ks_one_sample(&mut xs, |x| density_cdf(Family::Nu0, x, 1.0, &p0).unwrap());
    checks.push(check("euler_ks_nu0", ks, 0.02));

    // microstructure mapping consistency
    let mp = MicrostructureParams::new(2.0, 1.0, 0.5, 1, 0.5, OrderSizeDist::Deterministic(2))
        .map_err(|e| anyhow!("{e}"))?;
    let mapped = map_to_sde(&mp).map_err(|e| anyhow!("{e}"))?;
    let alpha = mp.alpha();
    let resid = ((mapped.mu1 - alpha * mp.nbar * (mp.lambda_buy - mp.lambda_sell)).abs())
        .max((mapped.sigma1 - alpha * ((mp.lambda_buy + mp.lambda_sell) * mp.n2).sqrt()).abs());
    checks.push(check("microstructure_map_identities", resid, 1e-12));

    let pass = checks.iter().all(|c| c.pass);
    let report = ValidationReport { suite, seed, checks, pass };
    let body = serde_json::to_string_pretty(&report)? + "\n";
    let sidecar = Sidecar {
        command: "validate",
        version: env!("CARGO_PKG_VERSION"),
        seed: Some(seed),
        parameters: serde_json::json!({"suite": report.suite}),
    };
    write_output(common, &body, &sidecar)?;
    eprintln!("validation wall time: {:.2}s", started.elapsed().as_secs_f64());
    Ok(pass)
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate { common, model, scheme, t, paths, dt, seed } => {
            run_simulate(&common, &model, scheme, t, paths, dt, seed)?;
            Ok(true)
        }
        Command::Density { common, model, family, t, ts, xmin, xmax, n, method, overlay } => {
            run_density(&common, &model, family, t, ts, xmin, xmax, n, method, overlay)?;
            Ok(true)
        }
        Command::Moments { common, model, order, t_grid, x0 } => {
            run_moments(&common, &model, order, t_grid, x0)?;
            Ok(true)
        }
        Command::Classify { common, model } => {
            run_classify(&common, &model)?;
            Ok(true)
        }
        Command::Var { common, model, u0, t, model_kind } => {
            run_var(&common, &model, u0, t, model_kind)?;
            Ok(true)
        }
        Command::Tails { common, k, family, nu } => {
            run_tails(&common, k, family, nu)?;
            Ok(true)
        }
        Command::Microsim {
            common,
            lambda_buy,
            lambda_sell,
            mu_slope,
            lot,
            omega,
            dist,
            horizon,
            dt,
            paths,
            seed,
            map_only,
        } => {
            run_microsim(
                &common, lambda_buy, lambda_sell, mu_slope, lot, omega, dist, horizon, dt, paths,
                seed, map_only,
            )?;
            Ok(true)
        }
        Command::Validate { common, suite, seed } => run_validate(&common, suite, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
