use clap::{Args, Parser, Subcommand};
use eisglm::harness::{self, FitWindow};
use eisglm::problem::WithoutJacobian;
use eisglm::sspharness::{self, AdvectionSetup};
use eisglm::stability::{self, AStabilityConfig, GridSpec};
use eisglm::tableau::{load_tableau, save_tableau};
use eisglm::{lookup, registry, Kind, MethodTableau, TableauError};
use log::{info, warn};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

#[derive(Parser)]
#[command(name = "eisglm", version, about = "Error-inhibiting two-derivative general linear methods")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the bundled methods.
    List,
    /// Check order conditions, EIS conditions and zero-stability.
    Verify(TableauArg),
    /// Convergence study on the Van der Pol oscillator.
    Converge(ConvergeArgs),
    /// Spectral radius of the amplification matrix on a grid.
    Stability(StabilityArgs),
    /// Sample the left half plane for A-stability.
    Astable(TableauArg),
    /// Total-variation study on linear advection with a square wave.
    Ssp(SspArgs),
    /// Write a bundled method in the coefficient file format.
    TableauDump {
        method: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Registry name, with or without the `_2` suffix.
    method: Option<String>,
    /// Coefficient file.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct TableauArg {
    #[command(flatten)]
    source: Source,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 3.0)]
    tf: f64,
    /// Post-processing window in steps; defaults to the method's own.
    #[arg(long)]
    m: Option<usize>,
    /// Comma-separated step sizes.
    #[arg(long, value_delimiter = ',')]
    dts: Option<Vec<f64>>,
    /// Van der Pol parameter.
    #[arg(long, default_value_t = 2.0)]
    a: f64,
    /// Use finite-difference Jacobians in Newton.
    #[arg(long)]
    fd_jacobian: bool,
    /// Per-point CSV; the summary always goes to stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct StabilityArgs {
    #[command(flatten)]
    source: Source,
    /// Square window `LO,HI` for both axes; defaults to `-s,s`.
    #[arg(long, value_delimiter = ',', num_args = 2, allow_negative_numbers = true)]
    window: Option<Vec<f64>>,
    /// Samples per axis.
    #[arg(long, default_value_t = 401)]
    n: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SspArgs {
    #[command(flatten)]
    source: Source,
    /// Comma-separated CFL numbers; defaults to 40 values up to 2.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    lambdas: Option<Vec<f64>>,
    #[arg(long, default_value_t = 10)]
    steps: usize,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long)]
    m: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn resolve(source: &Source) -> Result<MethodTableau, CliError> {
    match (&source.method, &source.file) {
        (Some(name), None) => lookup(name)
            .cloned()
            .ok_or_else(|| CliError::Usage(format!("unknown method '{name}'; see `eisglm list`"))),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            load_tableau(&text).map_err(|e| match e {
                TableauError::ParseError { .. } => CliError::Usage(format!("{}: {e}", path.display())),
                e => CliError::Failed(format!("{}: {e}", path.display())),
            })
        }
        _ => Err(CliError::Usage("give exactly one of a method name or --file".into())),
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("EISGLM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("EISGLM_THREADS must be a non-negative integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n.max(1))
        .build_global()
        .map_err(failed)
}

fn cmd_list() -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    let w = registry().iter().map(|t| t.name().len()).max().unwrap_or(4);
    writeln!(out, "{:<w$}  {:>2}  {:>2}  {:>2}  {:<4}  {:<8}  ssp", "name", "s", "p", "P", "kind", "family").map_err(failed)?;
    for t in registry() {
        let ssp = t.ssp_coefficient().map(|c| c.to_string()).unwrap_or_else(|| "-".into());
        writeln!(
            out,
            "{:<w$}  {:>2}  {:>2}  {:>2}  {:<4}  {:<8}  {ssp}",
            t.name(),
            t.stages(),
            t.truncation_order(),
            t.order(),
            t.kind().label(),
            t.family().label(),
        )
        .map_err(failed)?;
    }
    Ok(())
}

fn cmd_verify(t: &MethodTableau) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    let mut failures = Vec::new();
    let p = t.truncation_order();
    writeln!(out, "method {}  s = {}  p = {}  P = {}  {}", t.name(), t.stages(), p, t.order(), t.kind().label()).map_err(failed)?;
    for j in 0..=p + 2 {
        writeln!(out, "tau_{j:<2} {:.16e}", t.tau(j).max_abs()).map_err(failed)?;
    }
    if let Err(e) = t.verify_order() {
        failures.push(format!("order: {e}"));
    }
    let r = t.eis_residuals();
    writeln!(out, "D tau_(p+1)       {:.16e}", r.con1).map_err(failed)?;
    if t.kind() == Kind::EisPlus {
        writeln!(out, "D tau_(p+2)       {:.16e}", r.con2).map_err(failed)?;
        writeln!(out, "D (A+R) tau_(p+1) {:.16e}", r.con3).map_err(failed)?;
    }
    if let Err(e) = t.verify_eis() {
        failures.push(format!("error inhibition: {e}"));
    }
    if let Some(m) = t.stored_tau_mismatch() {
        writeln!(out, "stored tau mismatch {m:.16e}").map_err(failed)?;
    }
    let c: Vec<String> = t.abscissas().iter().map(|x| format!("{x:.16e}")).collect();
    writeln!(out, "abscissas {}", c.join(" ")).map_err(failed)?;
    let eig = t.d_eigenvalues();
    let shown: Vec<String> = eig.iter().map(|(re, im)| format!("({re:.16e}, {im:.16e})")).collect();
    writeln!(out, "eigenvalues of D {}", shown.join(" ")).map_err(failed)?;
    let mut moduli: Vec<f64> = eig.iter().map(|(re, im)| re.hypot(*im)).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    let zero_stable = (moduli[0] - 1.0).abs() <= 1e-9 && moduli.get(1).is_none_or(|m| *m < 1.0 - 1e-9);
    if !zero_stable {
        failures.push("zero-stability: D must have a simple eigenvalue 1 and all others inside the unit disk".into());
    }
    if failures.is_empty() {
        writeln!(out, "PASS").map_err(failed)?;
        Ok(())
    } else {
        writeln!(out, "FAIL").map_err(failed)?;
        Err(CliError::Failed(failures.join("; ")))
    }
}

fn cmd_converge(t: &MethodTableau, args: &ConvergeArgs) -> Result<(), CliError> {
    if !(args.tf.is_finite() && args.tf > 0.0) {
        return Err(CliError::Usage(format!("--tf must be positive, got {}", args.tf)));
    }
    let dts = match &args.dts {
        Some(d) if d.iter().any(|x| !(x.is_finite() && *x > 0.0)) => {
            return Err(CliError::Usage("--dts must be positive".into()));
        }
        Some(d) => d.clone(),
        None => harness::dt_list(args.tf, &harness::default_step_counts()),
    };
    let m = args.m.unwrap_or_else(|| t.default_window());
    let u0 = [2.0, 0.0];
    let problem = harness::vdp_problem(args.a);
    let reference = harness::reference_solution(&problem, 0.0, &u0, args.tf).map_err(failed)?;
    info!("reference {:?}", reference);
    let window = FitWindow::default();
    let result = if args.fd_jacobian {
        harness::convergence_study(t, &WithoutJacobian(problem), 0.0, &u0, args.tf, &dts, m, &reference, window)
    } else {
        harness::convergence_study(t, &problem, 0.0, &u0, args.tf, &dts, m, &reference, window)
    }
    .map_err(failed)?;
    let results = [result];
    let to_stdout = args.output.is_none();
    harness::write_points_csv(&results, sink(args.output.as_deref())?).map_err(failed)?;
    let mut out = io::stdout().lock();
    if to_stdout {
        writeln!(out).map_err(failed)?;
    }
    harness::write_summary_csv(&results, &mut out).map_err(failed)
}

fn cmd_stability(t: &MethodTableau, args: &StabilityArgs) -> Result<(), CliError> {
    let mut spec = GridSpec::default_for(t);
    if let Some(w) = &args.window {
        if w[0].is_nan() || w[1].is_nan() || w[0] >= w[1] {
            return Err(CliError::Usage(format!("--window needs LO < HI, got {},{}", w[0], w[1])));
        }
        spec.re_range = (w[0], w[1]);
        spec.im_range = (w[0], w[1]);
    }
    spec.nx = args.n;
    spec.ny = args.n;
    let grid = stability::scan_region(t, spec).map_err(|e| match e {
        stability::StabilityError::GridTooSmall { .. } => CliError::Usage(e.to_string()),
        e => failed(e),
    })?;
    info!("stable fraction {:.6}", grid.stable_fraction());
    grid.write_csv(sink(args.output.as_deref())?).map_err(failed)
}

fn cmd_astable(t: &MethodTableau) -> Result<(), CliError> {
    let report = stability::check_a_stability(t, AStabilityConfig::default());
    let mut out = io::stdout().lock();
    writeln!(out, "method {}", t.name()).map_err(failed)?;
    writeln!(out, "samples {}", report.samples).map_err(failed)?;
    writeln!(out, "max rho {:.16e} at ({:.16e}, {:.16e})", report.max_rho, report.argmax.re, report.argmax.im)
        .map_err(failed)?;
    writeln!(out, "violations {}", report.violations.len()).map_err(failed)?;
    for (z, rho) in report.violations.iter().take(10) {
        writeln!(out, "  z = ({:.16e}, {:.16e})  rho = {rho:.16e}", z.re, z.im).map_err(failed)?;
    }
    if report.passed() {
        writeln!(out, "PASS").map_err(failed)?;
        Ok(())
    } else {
        writeln!(out, "FAIL").map_err(failed)?;
        Err(CliError::Failed(format!("{} is not A-stable on the sampled points", t.name())))
    }
}

fn cmd_ssp(t: &MethodTableau, args: &SspArgs) -> Result<(), CliError> {
    let lambdas = args.lambdas.clone().unwrap_or_else(|| sspharness::lambda_grid(2.0, 40));
    if lambdas.is_empty() || lambdas.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(CliError::Usage("CFL numbers must be positive".into()));
    }
    if args.n < 4 {
        return Err(CliError::Usage(format!("--n must be at least 4, got {}", args.n)));
    }
    let m = args.m.unwrap_or_else(|| t.default_window());
    if t.kind() == Kind::EisPlus && args.steps + 1 < m {
        return Err(CliError::Usage(format!("{} steps cannot fill a window of {m}", args.steps)));
    }
    if t.ssp_coefficient().is_none() {
        warn!("{} has no SSP coefficient", t.name());
    }
    let setup = AdvectionSetup { n: args.n, lambda: 1.0, steps: args.steps };
    let rows = sspharness::sweep(t, &setup, &lambdas, m).map_err(failed)?;
    sspharness::write_csv(&rows, sink(args.output.as_deref())?).map_err(failed)
}

fn cmd_dump(name: &str, output: Option<&Path>) -> Result<(), CliError> {
    let t = lookup(name).ok_or_else(|| CliError::Usage(format!("unknown method '{name}'; see `eisglm list`")))?;
    sink(output)?.write_all(save_tableau(t).as_bytes()).map_err(failed)
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match &cli.command {
        Command::List => cmd_list(),
        Command::Verify(a) => cmd_verify(&resolve(&a.source)?),
        Command::Converge(a) => cmd_converge(&resolve(&a.source)?, a),
        Command::Stability(a) => cmd_stability(&resolve(&a.source)?, a),
        Command::Astable(a) => cmd_astable(&resolve(&a.source)?),
        Command::Ssp(a) => cmd_ssp(&resolve(&a.source)?, a),
        Command::TableauDump { method, output } => cmd_dump(method, output.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
