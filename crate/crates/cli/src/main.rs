//! Command-line front end over the curve-energy library: energy records,
//! circle bounds, Gauss-map floors, the cross-module invariant suite,
//! (p, q) sweeps, and descent runs, all with reproducible JSON/CSV output.
//!
//! Exit codes: 0 success, 1 invalid input (message names the violated
//! precondition), 2 energy flagged divergent, 3 invariant suite failure.

mod fixtures;
mod sweep;
mod verify;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use tangentpoint::output::{format_f64, json_object, json_string};
use tangentpoint::{
    bound_for_spec, classify_region, descend, evaluate, fenchel_report, resample_arclength,
    rescale_to_length, sample, CurveSamples, EnergyKind, EnergySpec, FourierCurve, MinimizeConfig,
    QuadratureSpec, StepRule,
};

#[derive(Parser)]
#[command(
    name = "tangentpoint",
    version,
    about = "Tangent-point energies, sharp circle bounds, and Gauss-map diagnostics for closed curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an energy on a fixture and print its JSON record.
    Energy(EnergyArgs),
    /// Print the closed-form circle bound and exponent-region flags.
    Bound(BoundArgs),
    /// Gauss-map path-length minima against the 2 pi and pi floors.
    Fenchel(FenchelArgs),
    /// Run the cross-module invariant suite and print a pass/fail table.
    Verify(verify::VerifyArgs),
    /// Sweep a (p, q) grid against the circle bound, as CSV.
    Sweep(sweep::SweepArgs),
    /// Steepest-descent run driven by a JSON config file.
    Minimize(MinimizeArgs),
}

#[derive(clap::Args)]
struct EnergyArgs {
    /// Fixture: circle | ellipse:a:b | perturbed:mode:eps | trefoil.
    #[arg(long, default_value = "circle")]
    curve: String,
    /// Chord exponent p.
    #[arg(long, default_value_t = 4.0)]
    p: f64,
    /// Projection exponent q.
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    /// Energy family: tp | classic | g | f.
    #[arg(long, default_value = "tp")]
    kind: String,
    /// Evaluate the fractional Willmore energy instead of a chord energy.
    #[arg(long)]
    willmore: bool,
    /// Fractional order s in (0, 1), used with --willmore.
    #[arg(long, default_value_t = 0.5)]
    s: f64,
    /// Integrability power of the Willmore energy, used with --willmore.
    #[arg(long, default_value_t = 1.0)]
    wp: f64,
    /// Rescale the fixture to this length before evaluating.
    #[arg(long)]
    length: Option<f64>,
    /// Quadrature grid as N_u,N_w,grading with grading in [1, 8].
    #[arg(long, default_value = "256,256,4", value_parser = parse_quad)]
    quad: QuadTriple,
    /// Write the record here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (energy records are always json).
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(clap::Args)]
struct BoundArgs {
    /// Chord exponent p.
    #[arg(long, default_value_t = 4.0)]
    p: f64,
    /// Projection exponent q.
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    /// Look up the Willmore disk bound instead of the chord-energy bound.
    #[arg(long)]
    willmore: bool,
    /// Fractional order s in (0, 1), used with --willmore.
    #[arg(long, default_value_t = 0.5)]
    s: f64,
    /// Integrability power of the Willmore energy, used with --willmore.
    #[arg(long, default_value_t = 1.0)]
    wp: f64,
    /// Curve length (perimeter for --willmore) the bound refers to.
    #[arg(long, default_value_t = 1.0)]
    length: f64,
    /// Write the record here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (bound records are always json).
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(clap::Args)]
struct FenchelArgs {
    /// Fixture: circle | ellipse:a:b | perturbed:mode:eps | trefoil.
    #[arg(long, default_value = "circle")]
    curve: String,
    /// Rescale the fixture to this length before sampling.
    #[arg(long)]
    length: Option<f64>,
    /// Grid resolution as N_u,N_w,grading; the path grid uses N_u.
    #[arg(long, default_value = "256,256,4", value_parser = parse_quad)]
    quad: QuadTriple,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (Fenchel reports are always json).
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(clap::Args)]
struct MinimizeArgs {
    /// JSON config file; see the README for the key list and defaults.
    #[arg(long)]
    config: PathBuf,
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// json emits the full report, csv the per-iteration energies.
    #[arg(long, default_value = "json")]
    format: String,
}

/// Parsed form of the --quad flag.
#[derive(Clone)]
pub(crate) struct QuadTriple {
    pub n_u: usize,
    pub n_w: usize,
    pub grading: f64,
}

impl QuadTriple {
    pub(crate) fn to_spec(&self, doubling_rounds: usize) -> QuadratureSpec {
        QuadratureSpec {
            n_u: self.n_u,
            n_w: self.n_w,
            grading_exponent: self.grading,
            doubling_rounds,
            convergence_rtol: 1e-6,
        }
    }
}

pub(crate) fn parse_quad(text: &str) -> Result<QuadTriple, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected N_u,N_w,grading, got {text:?}"));
    }
    let n_u: usize = parts[0]
        .trim()
        .parse()
        .map_err(|_| format!("N_u must be a positive integer, got {:?}", parts[0]))?;
    let n_w: usize = parts[1]
        .trim()
        .parse()
        .map_err(|_| format!("N_w must be a positive integer, got {:?}", parts[1]))?;
    let grading: f64 = parts[2]
        .trim()
        .parse()
        .map_err(|_| format!("grading must be a number, got {:?}", parts[2]))?;
    if !(1.0..=8.0).contains(&grading) {
        return Err(format!("grading must lie in [1, 8], got {grading}"));
    }
    Ok(QuadTriple { n_u, n_w, grading })
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap reserves exit code 2 for usage errors; here 2 means
            // divergence, so usage errors go out as invalid input instead.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Energy(args) => run_energy(&args),
        Command::Bound(args) => run_bound(&args),
        Command::Fenchel(args) => run_fenchel(&args),
        Command::Verify(args) => verify::run(&args),
        Command::Sweep(args) => sweep::run(&args),
        Command::Minimize(args) => run_minimize(&args),
    }
}

pub(crate) fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("writing output to {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn ensure_json(format: &str, what: &str) -> Result<()> {
    if format != "json" {
        bail!("{what} records support only --format json, got {format:?}");
    }
    Ok(())
}

pub(crate) fn build_spec(kind: &str, p: f64, q: f64, s: f64, wp: f64) -> Result<EnergySpec> {
    Ok(match kind {
        "tp" => EnergySpec::tp(p, q),
        "classic" => EnergySpec::tp_classic(q),
        "g" => EnergySpec::g(p, q),
        "f" => EnergySpec::f(p, q),
        "willmore" => EnergySpec::willmore(s, wp),
        other => bail!("unknown energy kind {other:?}; expected tp | classic | g | f | willmore"),
    })
}

fn fixture_at_length(text: &str, length: Option<f64>) -> Result<FourierCurve> {
    let curve = fixtures::parse_fixture(text)?;
    Ok(match length {
        Some(l) => rescale_to_length(&curve, l)?,
        None => curve,
    })
}

/// The F family integrates over arc-length slices; everything else takes
/// the curve in its native parametrization.
fn samples_for(curve: &FourierCurve, kind: EnergyKind, n: usize) -> Result<CurveSamples> {
    Ok(match kind {
        EnergyKind::F | EnergyKind::FSliceU => resample_arclength(curve, n)?,
        _ => sample(curve, n)?,
    })
}

fn run_energy(args: &EnergyArgs) -> Result<i32> {
    ensure_json(&args.format, "energy")?;
    let kind = if args.willmore { "willmore" } else { args.kind.as_str() };
    let spec = build_spec(kind, args.p, args.q, args.s, args.wp)?;
    spec.validate()?;
    let quad = args.quad.to_spec(3);
    quad.validate()?;
    let curve = fixture_at_length(&args.curve, args.length)?;
    let samples = samples_for(&curve, spec.kind, quad.n_u)?;
    let record = evaluate(&samples, &spec, &quad)?;
    let converged = record.converged;
    emit(args.out.as_deref(), &format!("{}\n", record.to_json()))?;
    Ok(if converged { 0 } else { 2 })
}

fn run_bound(args: &BoundArgs) -> Result<i32> {
    ensure_json(&args.format, "bound")?;
    if !(args.length > 0.0) {
        bail!("length must be positive, got {}", args.length);
    }
    let spec = if args.willmore {
        EnergySpec::willmore(args.s, args.wp)
    } else {
        EnergySpec::tp(args.p, args.q)
    };
    spec.validate()?;
    let bound = bound_for_spec(&spec, args.length)?
        .expect("chord and Willmore bounds are always defined");
    let flags = if args.willmore {
        Vec::new()
    } else {
        classify_region(args.p, args.q)?.names()
    };
    let flags_json = format!(
        "[{}]",
        flags.iter().map(|f| json_string(f)).collect::<Vec<_>>().join(",")
    );
    let opt = |v: f64| if v.is_finite() { format_f64(v) } else { "null".to_owned() };
    let json = json_object(&[
        ("kind", json_string(spec.kind.name())),
        ("p", opt(spec.p)),
        ("q", opt(spec.q)),
        ("s", if args.willmore { format_f64(spec.s) } else { "null".to_owned() }),
        ("length", format_f64(args.length)),
        ("bound", format_f64(bound)),
        ("region_flags", flags_json),
    ]);
    emit(args.out.as_deref(), &format!("{json}\n"))?;
    Ok(0)
}

fn run_fenchel(args: &FenchelArgs) -> Result<i32> {
    ensure_json(&args.format, "fenchel")?;
    let curve = fixture_at_length(&args.curve, args.length)?;
    let samples = sample(&curve, args.quad.n_u)?;
    let report = fenchel_report(&samples)?;
    emit(args.out.as_deref(), &format!("{}\n", report.to_json()))?;
    Ok(0)
}

const MINIMIZE_KEYS: [&str; 16] = [
    "curve",
    "kind",
    "p",
    "q",
    "s",
    "wp",
    "modes",
    "dims",
    "target_length",
    "max_iters",
    "grad_step",
    "initial_step",
    "shrink",
    "armijo",
    "stop_grad_norm",
    "quad",
];

fn run_minimize(args: &MinimizeArgs) -> Result<i32> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).context("minimize config is not valid JSON")?;
    let obj = value
        .as_object()
        .context("minimize config must be a JSON object")?;
    for key in obj.keys() {
        if !MINIMIZE_KEYS.contains(&key.as_str()) {
            bail!(
                "unknown config key {key:?}; allowed keys: {}",
                MINIMIZE_KEYS.join(", ")
            );
        }
    }
    let num = |key: &str, default: f64| -> Result<f64> {
        match obj.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_f64()
                .with_context(|| format!("config key {key:?} must be a number")),
        }
    };
    let int = |key: &str, default: usize| -> Result<usize> {
        match obj.get(key) {
            None => Ok(default),
            Some(v) => Ok(v
                .as_u64()
                .with_context(|| format!("config key {key:?} must be a non-negative integer"))?
                as usize),
        }
    };
    let word = |key: &str, default: &str| -> Result<String> {
        match obj.get(key) {
            None => Ok(default.to_owned()),
            Some(v) => Ok(v
                .as_str()
                .with_context(|| format!("config key {key:?} must be a string"))?
                .to_owned()),
        }
    };

    let spec = build_spec(
        &word("kind", "tp")?,
        num("p", 4.0)?,
        num("q", 2.0)?,
        num("s", 0.5)?,
        num("wp", 1.0)?,
    )?;
    let mut config = MinimizeConfig::new(spec);
    config.modes = int("modes", config.modes)?;
    config.dims = int("dims", config.dims)?;
    config.target_length = num("target_length", config.target_length)?;
    config.max_iters = int("max_iters", config.max_iters)?;
    config.grad_step = num("grad_step", config.grad_step)?;
    config.step_rule = StepRule {
        initial_step: num("initial_step", config.step_rule.initial_step)?,
        shrink: num("shrink", config.step_rule.shrink)?,
        armijo: num("armijo", config.step_rule.armijo)?,
    };
    config.stop_grad_norm = num("stop_grad_norm", config.stop_grad_norm)?;
    if let Some(quad) = obj.get("quad") {
        let quad = quad
            .as_object()
            .context("config key \"quad\" must be an object {n_u, n_w, grading}")?;
        for key in quad.keys() {
            if !["n_u", "n_w", "grading"].contains(&key.as_str()) {
                bail!("unknown quad key {key:?}; allowed: n_u, n_w, grading");
            }
        }
        if let Some(v) = quad.get("n_u") {
            config.quad.n_u = v.as_u64().context("quad.n_u must be an integer")? as usize;
        }
        if let Some(v) = quad.get("n_w") {
            config.quad.n_w = v.as_u64().context("quad.n_w must be an integer")? as usize;
        }
        if let Some(v) = quad.get("grading") {
            let g = v.as_f64().context("quad.grading must be a number")?;
            if !(1.0..=8.0).contains(&g) {
                bail!("quad.grading must lie in [1, 8], got {g}");
            }
            config.quad.grading_exponent = g;
        }
    }

    let start = fixtures::parse_fixture(&word("curve", "ellipse:1.5:1")?)?;
    let report = descend(&start, &config)?;
    match args.format.as_str() {
        "json" => emit(args.out.as_deref(), &format!("{}\n", report.to_json()))?,
        "csv" => {
            let mut writer = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            writer.write_record(["iteration", "energy"])?;
            for (i, energy) in report.energies.iter().enumerate() {
                writer.write_record([i.to_string(), format_f64(*energy)])?;
            }
            let bytes = writer.into_inner().context("flushing csv")?;
            emit(args.out.as_deref(), std::str::from_utf8(&bytes)?)?;
        }
        other => bail!("unknown format {other:?}; expected json or csv"),
    }
    Ok(0)
}
