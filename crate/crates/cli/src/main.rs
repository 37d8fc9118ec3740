use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kappa_infimum::report::{format_sig, parse_kappa_list, run_sweep, OutputFormat, SweepSpec};
use kappa_infimum::solver::{ig_root_residual, solve_ig_critical_point};
use kappa_infimum::verify::{self, AnalyticModel, Budget, HalfScaledNormalFault, ReferenceModel};
use kappa_infimum::{g_at, DistParams, Error, FamilyId, GridSpec, Kappa};

/// Infimum of P(X <= kappa * E[X]) over the inverse Gaussian, log-normal,
/// Gumbel and logistic families.
#[derive(Debug, Parser)]
#[command(name = "kappa-inf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate P(X <= kappa * E[X]) for one distribution.
    Eval(EvalArgs),
    /// Tabulate the infimum over a family for one or more kappa.
    Infimum(InfimumArgs),
    /// Locate the inverse Gaussian minimizer x0(kappa) for kappa > 1.
    Root(RootArgs),
    /// Run the oracle cross-check matrix.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    family: FamilyId,
    #[arg(long, allow_negative_numbers = true)]
    kappa: f64,
    /// Reduced coordinate (x, sigma, x or y depending on the family).
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["mu", "lambda", "sigma", "beta"])]
    coord: Option<f64>,
    /// Location (log-scale for log-normal, mean for inverse Gaussian).
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    /// Inverse Gaussian shape.
    #[arg(long)]
    lambda: Option<f64>,
    /// Log-normal log-scale standard deviation.
    #[arg(long)]
    sigma: Option<f64>,
    /// Gumbel or logistic scale.
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Debug, Args)]
struct InfimumArgs {
    #[arg(long)]
    family: FamilyId,
    /// Comma-separated list, e.g. 0.5,1,2.
    #[arg(long, allow_hyphen_values = true)]
    kappa: String,
    #[arg(long, default_value = "table")]
    format: OutputFormat,
    /// Write to FILE instead of standard output.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Emit this many (coord, g) samples per kappa on the family's default range.
    #[arg(long, conflicts_with = "curve_grid")]
    curve_points: Option<usize>,
    /// Emit curve samples on an explicit grid, `geom:LO:HI:N` or `lin:LO:HI:N`.
    #[arg(long, value_name = "SPEC")]
    curve_grid: Option<GridSpec>,
}

#[derive(Debug, Args)]
struct RootArgs {
    /// Comma-separated list of kappa > 1.
    #[arg(long)]
    kappa: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Fault {
    HalfScaledNormal,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value = "quick")]
    budget: Budget,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Print every report, not only failures.
    #[arg(long)]
    verbose: bool,
    #[arg(long, hide = true)]
    inject_fault: Option<Fault>,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Numerical(_) => 3,
            Error::Domain(_) | Error::Regime(_) => 2,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: 2,
            msg: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(a) => eval(a),
        Command::Infimum(a) => infimum(a),
        Command::Root(a) => root(a),
        Command::Verify(a) => run_verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("kappa-inf: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        msg: msg.into(),
    }
}

fn eval(a: EvalArgs) -> Result<u8, Failure> {
    let kappa = Kappa::new(a.kappa)?;
    let p = match a.coord {
        Some(c) => g_at(a.family, kappa, c)?,
        None => {
            let mu =
                a.mu.ok_or_else(|| usage("give either --coord or --mu with the family's scale"))?;
            let (name, scale) = match a.family {
                FamilyId::InverseGaussian => ("--lambda", a.lambda),
                FamilyId::LogNormal => ("--sigma", a.sigma),
                FamilyId::Gumbel | FamilyId::Logistic => ("--beta", a.beta),
            };
            let extra = [
                ("--lambda", a.lambda),
                ("--sigma", a.sigma),
                ("--beta", a.beta),
            ]
            .into_iter()
            .find(|(n, v)| *n != name && v.is_some());
            if let Some((n, _)) = extra {
                return Err(usage(format!("{n} does not apply to {}", a.family)));
            }
            let scale = scale.ok_or_else(|| usage(format!("{} needs {name}", a.family)))?;
            let params = DistParams::new(a.family, mu, scale)?;
            params.cdf(kappa.value() * params.mean())?
        }
    };
    println!("{}", format_sig(p.value()));
    Ok(0)
}

fn infimum(a: InfimumArgs) -> Result<u8, Failure> {
    let kappas = parse_kappa_list(&a.kappa)?;
    let curve = match (a.curve_grid, a.curve_points) {
        (Some(g), _) => Some(g),
        (None, Some(n)) => Some(GridSpec::default_for(a.family, n)),
        (None, None) => None,
    };
    let spec = SweepSpec::new(a.family, kappas, a.format, curve)?;
    let mut text = run_sweep(&spec)?.render(spec.format)?;
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match a.out {
        Some(path) => {
            fs::write(&path, text).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(0)
}

fn root(a: RootArgs) -> Result<u8, Failure> {
    let rows = parse_kappa_list(&a.kappa)?
        .into_iter()
        .map(|kappa| {
            let out = solve_ig_critical_point(kappa)?;
            let residual = ig_root_residual(kappa, out.root)?;
            let g0 = g_at(FamilyId::InverseGaussian, kappa, out.root)?;
            Ok((kappa, out, residual, g0))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    println!(
        "{:>12}  {:>22}  {:>22}  {:>22}  {:>10}  {:>22}",
        "kappa", "x0", "bracket_lo", "bracket_hi", "residual", "g(x0)"
    );
    for (kappa, out, residual, g0) in rows {
        println!(
            "{:>12}  {:>22}  {:>22}  {:>22}  {:>10.3e}  {:>22}",
            format_sig(kappa.value()),
            out.root,
            out.bracket.lo,
            out.bracket.hi,
            residual,
            g0.value()
        );
    }
    Ok(0)
}

fn run_verify(a: VerifyArgs) -> Result<u8, Failure> {
    let model: &dyn AnalyticModel = match a.inject_fault {
        Some(Fault::HalfScaledNormal) => &HalfScaledNormalFault,
        None => &ReferenceModel,
    };
    let outcome = verify::run(model, a.budget, a.seed)?;
    println!("verify: budget={} seed={}", outcome.budget, outcome.seed);
    for group in &outcome.groups {
        let verdict = if group.passed() { "PASS" } else { "FAIL" };
        println!(
            "[{verdict}] {} ({} checks, worst |diff|/tol = {:.3e})",
            group.name,
            group.reports.len(),
            group.worst_ratio()
        );
        for r in &group.reports {
            if a.verbose || !r.passed {
                println!("    {r}");
            }
        }
    }
    if outcome.passed() {
        println!("all checks passed");
        Ok(0)
    } else {
        println!("{} check(s) failed", outcome.failures().count());
        Ok(3)
    }
}
