//! Command-line front end: argument parsing, `key=value` config files and dispatch.

mod commands;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::montecarlo::{McConfig, Scheme};
use crate::transforms::{HestonParams, Model, SteinSteinParams};

#[derive(Debug, Parser)]
#[command(name = "svoltails", version, about = "Densities, tails and smiles for uncorrelated stochastic volatility models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tail constants with their residues and Taylor coefficients.
    Constants(RunArgs),
    /// Exact density against its leading asymptotic term.
    Density(RunArgs),
    /// Model smile against the wing expansion.
    Smile(RunArgs),
    /// Monte Carlo and moment-window checks.
    Validate(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Heston,
    #[value(name = "stein_stein")]
    SteinStein,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DensityKind {
    /// Mixing density `m_t(y)`.
    Mixing,
    /// Stock density at moneyness `x`.
    Stock,
}

#[derive(Debug, Clone, Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    model: Option<ModelKind>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    rate: Option<f64>,
    /// Drift of the stock under the density's measure.
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long)]
    y0: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    grid_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    grid_max: Option<f64>,
    #[arg(long)]
    grid_count: Option<usize>,
    #[arg(long, value_enum)]
    grid_spacing: Option<Spacing>,
    /// Which density the `density` command tabulates.
    #[arg(long, value_enum)]
    kind: Option<DensityKind>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    ks_threshold: Option<f64>,
    #[arg(long)]
    mass_tolerance: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plain-text `key=value` file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Negative control: shift `c3` before the moment-window probe.
    #[arg(long, hide = true, allow_hyphen_values = true)]
    corrupt_c3: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let n = self.count - 1;
        (0..self.count)
            .map(|i| {
                let f = i as f64 / n as f64;
                match self.spacing {
                    Spacing::Linear => self.min + f * (self.max - self.min),
                    Spacing::Log => (self.min.ln() + f * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: Model,
    pub t: f64,
    pub rate: f64,
    pub grid: Option<Grid>,
    pub kind: DensityKind,
    pub mc: McConfig,
    pub ks_threshold: f64,
    pub mass_tolerance: f64,
    pub out: Option<PathBuf>,
    pub corrupt_c3: f64,
    /// `key=value` pairs echoed into the output header.
    pub echo: Vec<(String, String)>,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::invalid(format!("{name} must be finite and > 0, got {v}")));
    }
    Ok(v)
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let kind = self.model.unwrap_or(ModelKind::Heston);
        let mu = self.mu.unwrap_or(0.0);
        let x0 = self.x0.unwrap_or(1.0);
        let model = match kind {
            ModelKind::Heston => Model::Heston(HestonParams::new(
                mu,
                self.a.unwrap_or(1.0),
                self.b.unwrap_or(-1.0),
                self.c.unwrap_or(1.0),
                self.y0.unwrap_or(1.0),
                x0,
            )?),
            ModelKind::SteinStein => Model::SteinStein(SteinSteinParams::new(
                mu,
                self.q.unwrap_or(1.0),
                self.m.unwrap_or(0.2),
                self.sigma.unwrap_or(0.2),
                self.y0.unwrap_or(0.2),
                x0,
            )?),
        };
        let t = positive("t", self.t.unwrap_or(1.0))?;
        let rate = self.rate.unwrap_or(0.0);
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::invalid(format!("rate must be finite and >= 0, got {rate}")));
        }
        let grid = match (self.grid_min, self.grid_max, self.grid_count, self.grid_spacing) {
            (None, None, None, None) => None,
            (min, max, count, spacing) => {
                let (Some(min), Some(max)) = (min, max) else {
                    return Err(Error::invalid("grid needs both --grid-min and --grid-max"));
                };
                let g = Grid { min, max, count: count.unwrap_or(20), spacing: spacing.unwrap_or(Spacing::Linear) };
                if g.count < 2 {
                    return Err(Error::invalid(format!("grid count must be >= 2, got {}", g.count)));
                }
                if !(min < max) || !min.is_finite() || !max.is_finite() {
                    return Err(Error::invalid(format!("grid needs finite min < max, got [{min}, {max}]")));
                }
                if g.spacing == Spacing::Log && !(min > 0.0) {
                    return Err(Error::invalid("log grid needs min > 0"));
                }
                Some(g)
            }
        };
        let mc = McConfig::new(
            self.paths.unwrap_or(100_000),
            self.steps.unwrap_or(1024),
            self.seed.unwrap_or(20_240_601),
            Scheme::ExactTransition,
        )?;
        let ks_threshold = positive("ks-threshold", self.ks_threshold.unwrap_or(0.01))?;
        let mass_tolerance = positive("mass-tolerance", self.mass_tolerance.unwrap_or(1e-3))?;
        let kind_density = self.kind.unwrap_or(DensityKind::Mixing);

        let mut echo = vec![("model".to_string(), model.name().to_string())];
        let params: Vec<(&str, f64)> = match model {
            Model::Heston(p) => vec![("a", p.a), ("b", p.b), ("c", p.c), ("y0", p.y0)],
            Model::SteinStein(p) => vec![("q", p.q), ("m", p.m), ("sigma", p.sigma), ("y0", p.y0)],
        };
        for (k, v) in params.into_iter().chain([("mu", mu), ("x0", x0), ("t", t), ("rate", rate)]) {
            echo.push((k.to_string(), fmt(v)));
        }
        if let Some(g) = grid {
            echo.push(("grid".to_string(), format!("{}:{}:{}:{:?}", fmt(g.min), fmt(g.max), g.count, g.spacing).to_lowercase()));
        }
        Ok(RunConfig {
            model,
            t,
            rate,
            grid,
            kind: kind_density,
            mc,
            ks_threshold,
            mass_tolerance,
            out: self.out.clone(),
            corrupt_c3: self.corrupt_c3.unwrap_or(0.0),
            echo,
        })
    }
}

/// Floating-point output: 17 significant digits, exact round trip.
pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// `key=value` lines, `#` comments and blank lines allowed; keys are long flag names.
fn config_args(text: &str) -> Result<Vec<OsString>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::invalid(format!("config line {} is not key=value: {raw:?}", n + 1)));
        };
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key == "config" {
            return Err(Error::invalid("config files cannot include other config files"));
        }
        out.push(format!("--{key}={}", v.trim()).into());
    }
    Ok(out)
}

fn command() -> clap::Command {
    Cli::command().mut_subcommands(|s| s.args_override_self(true))
}

fn parse(args: &[OsString]) -> std::result::Result<Cli, clap::Error> {
    let matches = command().try_get_matches_from(args)?;
    Cli::from_arg_matches(&matches)
}

fn run_args(cli: &Cli) -> &RunArgs {
    match &cli.command {
        Command::Constants(a) | Command::Density(a) | Command::Smile(a) | Command::Validate(a) => a,
    }
}

/// Runs the tool on `args` (including the program name) and returns the process exit code:
/// 0 success, 1 validation failure, 2 invalid input, 3 numerical failure.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let mut args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let mut cli = match parse(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Some(path) = run_args(&cli).config.clone() {
        let injected = std::fs::read_to_string(&path)
            .map_err(|e| Error::invalid(format!("cannot read config {}: {e}", path.display())))
            .and_then(|text| config_args(&text));
        let injected = match injected {
            Ok(v) => v,
            Err(e) => return report(&e),
        };
        // file values go right after the subcommand so later command-line flags override them
        let pos = args.iter().position(|a| matches!(a.to_str(), Some("constants" | "density" | "smile" | "validate")));
        let at = pos.map_or(args.len(), |p| p + 1);
        args.splice(at..at, injected);
        cli = match parse(&args) {
            Ok(c) => c,
            Err(e) => {
                let _ = e.print();
                return e.exit_code();
            }
        };
    }
    let cfg = match run_args(&cli).resolve() {
        Ok(c) => c,
        Err(e) => return report(&e),
    };
    let outcome = match &cli.command {
        Command::Constants(_) => commands::constants(&cfg).map(|s| (s, None)),
        Command::Density(_) => commands::density(&cfg).map(|s| (s, None)),
        Command::Smile(_) => commands::smile(&cfg).map(|s| (s, None)),
        Command::Validate(_) => commands::validate(&cfg),
    };
    let (body, failed) = match outcome {
        Ok(v) => v,
        Err(e) => return report(&e),
    };
    let name = match &cli.command {
        Command::Constants(_) => "constants",
        Command::Density(_) => "density",
        Command::Smile(_) => "smile",
        Command::Validate(_) => "validate",
    };
    let text = header(name, &cfg) + &body;
    if let Err(e) = emit(&cfg, &text) {
        return report(&e);
    }
    if let Some(check) = failed {
        eprintln!("svoltails: validation failed: {check}");
        return 1;
    }
    0
}

fn report(e: &Error) -> i32 {
    eprintln!("svoltails: {e}");
    e.exit_code()
}

fn header(command: &str, cfg: &RunConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# svoltails {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "# command={command}");
    let echo: Vec<String> = cfg.echo.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let _ = writeln!(s, "# config {}", echo.join(" "));
    if command == "validate" {
        let _ = writeln!(s, "# seed={} paths={} steps={}", cfg.mc.seed, cfg.mc.paths, cfg.mc.steps);
    }
    s
}

fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Error::Internal(format!("stdout: {e}")))
        }
    }
}
