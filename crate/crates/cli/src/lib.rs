//! `decadic` command line: exact multiplets, shooting cross-checks, wedge
//! tables and reality-domain sweeps.
//!
//! Exit codes: 0 when solutions were emitted, 1 for a valid run with an
//! empty (or unconverged) result, 2 for usage errors.

mod json;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use decadic_core::model::{potential_coeffs, Coupling, Multiplet};
use decadic_core::shooting::{find_eigenvalue_with, Contour, EvenPolynomial, ShootingConfig};
use decadic_core::solvers::{
    shifted_coupling, solve_coupled_with, solve_energies_m2_with, solve_sturmian_with, Tolerances,
};
use decadic_core::sweep::{reality_sweep, Axis, SweepGrid, SweepRow};
use decadic_core::verify::verify_solution;
use decadic_core::wedges::{bender_sectors, pt_pairs, sectors_for_degree, Sector};
use decadic_core::{Error, ModelSpec};

use json::{floats, render, sci, Obj};

/// Largest supported number of expansion coefficients.
pub const MAX_N: u32 = 64;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "decadic", version, about = "Exact multiplets of the PT-symmetric decadic oscillator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// M = 1: real couplings d at E = 0 (default M = 1).
    Sturmian(SolveArgs),
    /// M = 2: energies with d = E²/4 (default M = 2).
    Energies(SolveArgs),
    /// M ≥ 2: simultaneous (E, d) from both secular determinants (default M = 2).
    Coupled(SolveArgs),
    /// Asymptotic wedges for degree z or for V = x²(ix)^δ.
    Wedges(WedgeArgs),
    /// Complex-contour shooting for one eigenvalue at fixed d (default M = 2).
    Shoot(ShootArgs),
    /// Check a candidate (E, d, h) against the recurrence and the radial equation (default M = 1).
    Verify(VerifyArgs),
    /// Count real solutions over an (α, β) grid; M ∈ {1, 2} (default M = 1).
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct SpecArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    beta: f64,
    /// Multiplet index M (L = M − 1/2); the default depends on the subcommand.
    #[arg(short = 'M', long = "big-m")]
    big_m: Option<u32>,
    /// Number of expansion coefficients, 1..=64.
    #[arg(short = 'N', long = "n-states")]
    n_states: u32,
    /// Spatial dimension D.
    #[arg(long, default_value_t = 3)]
    dimension: u32,
    /// Partial wave ℓ.
    #[arg(long, default_value_t = 0)]
    ell: u32,
}

#[derive(Args, Debug)]
struct TolArgs {
    /// |Im z| ≤ tol·(1+|z|) counts as real.
    #[arg(long, default_value_t = 1e-8)]
    real_tol: f64,
    /// Relative distance below which roots are merged.
    #[arg(long, default_value_t = 1e-6)]
    cluster_tol: f64,
    /// Rank-deficiency threshold on σmin/σmax.
    #[arg(long, default_value_t = 1e-9)]
    rank_tol: f64,
    /// Acceptance threshold on the relative recurrence residual.
    #[arg(long, default_value_t = 1e-10)]
    residual_tol: f64,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    tol: TolArgs,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct WedgeChoice {
    /// Sectors where exp(−x^(2z)/(2z)) decays, with PT pairing.
    #[arg(long)]
    degree: Option<u32>,
    /// Sectors of V = x²(ix)^δ.
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
}

#[derive(Args, Debug)]
struct WedgeArgs {
    #[command(flatten)]
    choice: WedgeChoice,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ShootArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Quadratic coupling d of the potential.
    #[arg(long, allow_negative_numbers = true)]
    coupling: f64,
    /// Starting energy for the secant iteration.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    guess: f64,
    /// Distance of the contour below the real axis.
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    /// Half-length of the contour.
    #[arg(long, default_value_t = 4.0)]
    x_max: f64,
    /// Convergence threshold on the normalized Wronskian mismatch.
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
    #[arg(long, default_value_t = 40)]
    max_iterations: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    energy: f64,
    #[arg(long, allow_negative_numbers = true)]
    coupling: f64,
    /// Comma-separated coefficients h_0,…,h_(N−1).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    h: Vec<f64>,
    #[arg(long, default_value_t = 1e-10)]
    residual_tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(short = 'M', long = "big-m", default_value_t = 1)]
    big_m: u32,
    #[arg(short = 'N', long = "n-states")]
    n_states: u32,
    #[arg(long, default_value_t = -4.0, allow_negative_numbers = true)]
    alpha_min: f64,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    alpha_max: f64,
    #[arg(long, default_value_t = 41)]
    alpha_steps: usize,
    #[arg(long, default_value_t = -4.0, allow_negative_numbers = true)]
    beta_min: f64,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    beta_max: f64,
    #[arg(long, default_value_t = 41)]
    beta_steps: usize,
    #[command(flatten)]
    tol: TolArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure of a subcommand, already mapped to its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidSpec(_)
            | Error::WrongMode { .. }
            | Error::InvalidContour(_)
            | Error::IndexOutOfRange { .. }
            | Error::UnsolvedCoupling => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Outcome of a successful run: the document and whether it counts as
/// non-empty.
struct Output {
    text: String,
    found: bool,
    out: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs to completion, writing
/// results to `stdout` and diagnostics to `stderr`.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return 2;
            }
            let _ = write!(stdout, "{e}");
            return 0;
        }
    };
    let result = match cli.command {
        Command::Sturmian(a) => cmd_solve(a, Mode::Sturmian),
        Command::Energies(a) => cmd_solve(a, Mode::Energies),
        Command::Coupled(a) => cmd_solve(a, Mode::Coupled),
        Command::Wedges(a) => cmd_wedges(a),
        Command::Shoot(a) => cmd_shoot(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match result {
        Ok(output) => {
            let written = match &output.out {
                Some(path) => fs::write(path, &output.text)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => stdout
                    .write_all(output.text.as_bytes())
                    .map_err(|e| format!("cannot write output: {e}")),
            };
            if let Err(msg) = written {
                let _ = writeln!(stderr, "error: {msg}");
                return 2;
            }
            if output.found {
                0
            } else {
                1
            }
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

#[derive(Clone, Copy)]
enum Mode {
    Sturmian,
    Energies,
    Coupled,
}

fn build_spec(a: &SpecArgs, default_m: u32) -> Result<ModelSpec<f64>, Failure> {
    if a.n_states > MAX_N {
        return Err(Failure::usage(format!("N = {} exceeds the limit {MAX_N}", a.n_states)));
    }
    let spec = ModelSpec::new(a.alpha, a.beta, a.big_m.unwrap_or(default_m), a.n_states)?
        .with_partial_wave(a.dimension, a.ell)?;
    Ok(spec)
}

fn build_tolerances(t: &TolArgs) -> Result<Tolerances, Failure> {
    for (name, v) in [
        ("real-tol", t.real_tol),
        ("cluster-tol", t.cluster_tol),
        ("rank-tol", t.rank_tol),
        ("residual-tol", t.residual_tol),
    ] {
        positive(name, v)?;
    }
    Ok(Tolerances {
        real: t.real_tol,
        cluster: t.cluster_tol,
        rank: t.rank_tol,
        residual: t.residual_tol,
    })
}

fn positive(name: &str, v: f64) -> Result<(), Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Failure::usage(format!("--{name} must be positive and finite, got {v}")))
    }
}

fn spec_json(s: &ModelSpec<f64>) -> Value {
    Obj::new()
        .num("alpha", s.alpha)
        .num("beta", s.beta)
        .with("M", s.big_m)
        .with("N", s.n_states)
        .with("D", s.dimension)
        .with("ell", s.ell)
        .into()
}

fn tol_json(t: &Tolerances) -> Value {
    Obj::new()
        .num("real", t.real)
        .num("cluster", t.cluster)
        .num("rank", t.rank)
        .num("residual", t.residual)
        .into()
}

fn multiplet_json(spec: &ModelSpec<f64>, m: &Multiplet) -> Value {
    Value::Array(
        m.entries
            .iter()
            .map(|e| {
                Obj::new()
                    .num("E", e.energy)
                    .num("d", e.quadratic_coupling)
                    .num("F", shifted_coupling(e.quadratic_coupling, spec))
                    .with("h", floats(&e.h))
                    .num("residual", e.recurrence_residual)
                    .with("validated", e.validated)
                    .into()
            })
            .collect(),
    )
}

fn cmd_solve(a: SolveArgs, mode: Mode) -> Result<Output, Failure> {
    let default_m = match mode {
        Mode::Sturmian => 1,
        Mode::Energies | Mode::Coupled => 2,
    };
    let spec = build_spec(&a.spec, default_m)?;
    let tol = build_tolerances(&a.tol)?;
    let multiplet = match mode {
        Mode::Sturmian => solve_sturmian_with(&spec, &tol)?.multiplet(&spec, &tol),
        Mode::Energies => solve_energies_m2_with(&spec, &tol)?,
        Mode::Coupled => solve_coupled_with(&spec, &tol)?.multiplet(&spec, &tol),
    };
    let found = multiplet.validated().count() > 0;
    let doc: Value = Obj::new()
        .with("spec", spec_json(&spec))
        .with("solutions", multiplet_json(&spec, &multiplet))
        .with("tolerances", tol_json(&tol))
        .with("version", VERSION)
        .into();
    Ok(Output {
        text: render(&doc),
        found,
        out: a.out,
    })
}

fn sector_json(s: &Sector) -> Value {
    Obj::new()
        .num("lo", s.lo)
        .num("hi", s.hi)
        .num("center", s.center)
        .num("half_width", s.half_width)
        .into()
}

fn cmd_wedges(a: WedgeArgs) -> Result<Output, Failure> {
    let doc: Value = match (a.choice.degree, a.choice.delta) {
        (Some(z), _) => {
            let sectors = sectors_for_degree(z)?;
            let pairs = pt_pairs(z)?;
            Obj::new()
                .with("degree", z)
                .with("sectors", Value::Array(sectors.iter().map(sector_json).collect()))
                .with(
                    "pairs",
                    Value::Array(
                        pairs
                            .pairs
                            .iter()
                            .map(|p| {
                                Obj::new()
                                    .with("index", p.index)
                                    .with("left", sector_json(&p.left))
                                    .with("right", sector_json(&p.right))
                                    .into()
                            })
                            .collect(),
                    ),
                )
                .with(
                    "self_symmetric",
                    Value::Array(pairs.self_symmetric.iter().map(sector_json).collect()),
                )
                .with("version", VERSION)
                .into()
        }
        (None, Some(delta)) => {
            let b = bender_sectors(delta)?;
            Obj::new()
                .num("delta", delta)
                .num("half_width", b.half_width)
                .with("left", sector_json(&b.left))
                .with("right", sector_json(&b.right))
                .with("left2", sector_json(&b.left2))
                .with("right2", sector_json(&b.right2))
                .with("second_pair_compatible", b.second_pair_compatible)
                .with("version", VERSION)
                .into()
        }
        (None, None) => return Err(Failure::usage("one of --degree or --delta is required")),
    };
    Ok(Output {
        text: render(&doc),
        found: true,
        out: a.out,
    })
}

fn cmd_shoot(a: ShootArgs) -> Result<Output, Failure> {
    let spec = build_spec(&a.spec, 2)?;
    if !a.coupling.is_finite() || !a.guess.is_finite() {
        return Err(Failure::usage("--coupling and --guess must be finite"));
    }
    positive("tolerance", a.tolerance)?;
    let contour = Contour::straight(a.epsilon, a.x_max)?;
    let coeffs = potential_coeffs(&spec, Coupling::Known(a.coupling));
    let potential = EvenPolynomial::from_coeffs(&coeffs)?;
    let config = ShootingConfig {
        tolerance: a.tolerance,
        max_iterations: a.max_iterations,
        ..ShootingConfig::default()
    };
    let r = find_eigenvalue_with(&potential, spec.angular_l(), a.guess, &contour, &config)?;
    let solution: Value = Obj::new()
        .num("E", r.energy)
        .num("d", a.coupling)
        .num("F", shifted_coupling(a.coupling, &spec))
        .with("h", Value::Array(Vec::new()))
        .num("residual", r.wronskian_residual)
        .with("validated", r.converged)
        .with("iterations", r.iterations)
        .into();
    let doc: Value = Obj::new()
        .with("spec", spec_json(&spec))
        .with("solutions", Value::Array(vec![solution]))
        .with(
            "contour",
            Obj::new().num("epsilon", contour.epsilon).num("x_max", contour.x_max),
        )
        .with(
            "tolerances",
            Obj::new()
                .num("rtol", config.rtol)
                .num("atol", config.atol)
                .num("mismatch", config.tolerance),
        )
        .with("version", VERSION)
        .into();
    Ok(Output {
        text: render(&doc),
        found: r.converged,
        out: a.out,
    })
}

fn cmd_verify(a: VerifyArgs) -> Result<Output, Failure> {
    let spec = build_spec(&a.spec, 1)?;
    positive("residual-tol", a.residual_tol)?;
    if a.h.len() != spec.n_states as usize {
        return Err(Failure::usage(format!(
            "expected {} coefficients in --h, got {}",
            spec.n_states,
            a.h.len()
        )));
    }
    if !a.energy.is_finite() || !a.coupling.is_finite() || a.h.iter().any(|v| !v.is_finite()) {
        return Err(Failure::usage("energy, coupling and h must be finite"));
    }
    let r = verify_solution(&spec, a.energy, a.coupling, &a.h, a.residual_tol)?;
    let decay = Value::Array(
        r.wedge_decay
            .iter()
            .map(|(i, ok)| Obj::new().with("pair", *i).with("decays", *ok).into())
            .collect(),
    );
    let doc: Value = Obj::new()
        .with("spec", spec_json(&spec))
        .with(
            "candidate",
            Obj::new()
                .num("E", a.energy)
                .num("d", a.coupling)
                .num("F", shifted_coupling(a.coupling, &spec))
                .with("h", floats(&a.h)),
        )
        .with(
            "report",
            Obj::new()
                .num("recurrence_residual", r.recurrence_residual)
                .num("ode_residual", r.ode_residual_max_coeff)
                .with("wedge_decay", decay)
                .with("passed", r.passed),
        )
        .with("tolerances", Obj::new().num("residual", a.residual_tol))
        .with("version", VERSION)
        .into();
    Ok(Output {
        text: render(&doc),
        found: r.passed,
        out: a.out,
    })
}

fn cmd_sweep(a: SweepArgs) -> Result<Output, Failure> {
    if a.n_states > MAX_N {
        return Err(Failure::usage(format!("N = {} exceeds the limit {MAX_N}", a.n_states)));
    }
    let tol = build_tolerances(&a.tol)?;
    let grid = SweepGrid {
        alpha: Axis::new(a.alpha_min, a.alpha_max, a.alpha_steps),
        beta: Axis::new(a.beta_min, a.beta_max, a.beta_steps),
    };
    // validate the mode and N up front with a representative spec
    ModelSpec::new(a.alpha_min, a.beta_min, a.big_m, a.n_states)?;
    let rows = reality_sweep(a.big_m, a.n_states, &grid, &tol)?;
    let text = match a.format {
        Format::Csv => sweep_csv(&rows),
        Format::Json => {
            let doc: Value = Obj::new()
                .with(
                    "spec",
                    Obj::new().with("M", a.big_m).with("N", a.n_states),
                )
                .with(
                    "grid",
                    Obj::new()
                        .num("alpha_min", a.alpha_min)
                        .num("alpha_max", a.alpha_max)
                        .with("alpha_steps", a.alpha_steps)
                        .num("beta_min", a.beta_min)
                        .num("beta_max", a.beta_max)
                        .with("beta_steps", a.beta_steps),
                )
                .with(
                    "rows",
                    Value::Array(
                        rows.iter()
                            .map(|r| {
                                Obj::new()
                                    .num("alpha", r.alpha)
                                    .num("beta", r.beta)
                                    .with("n_real", r.n_real)
                                    .with("validated", r.validated)
                                    .into()
                            })
                            .collect(),
                    ),
                )
                .with("tolerances", tol_json(&tol))
                .with("version", VERSION)
                .into();
            render(&doc)
        }
    };
    Ok(Output {
        text,
        found: !rows.is_empty(),
        out: a.out,
    })
}

fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("alpha,beta,n_real,validated\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{}\n", sci(r.alpha), sci(r.beta), r.n_real, r.validated));
    }
    s
}
