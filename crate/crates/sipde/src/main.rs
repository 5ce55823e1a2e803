//! Command-line driver: convergence runs, table-reproduction sweeps,
//! stability-region export, tableau tools, and the verification suite.

use std::collections::HashMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;

use sipde::error::Error;
use sipde::harness::{
    acceptance, emit_table, reference_data::TableId, run_convergence_study, sweep, test_case, CaseId,
    DtRule, Integrator, RunConfig, SpatialConfig, TableFormat,
};
use sipde::multistep::{PcConfig, Predictor};
use sipde::rosenbrock::{
    check_stiffly_accurate, construct_tableau, construct_tableau_exact, export_tableau,
    import_tableau, scheme_gamma_three_quarters, validate_order_conditions, RootChoice,
    RosenbrockTableau,
};
use sipde::spatial::WenoVariant;
use sipde::stability::{boundary_locus, YSampling};

#[derive(Parser)]
#[command(
    name = "sipde",
    about = "Semi-implicit Rosenbrock and predictor-corrector BDF integrators \
             for 1D PDEs with high-order derivatives",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct, validate, import or export a Rosenbrock tableau.
    Tableau(TableauArgs),
    /// Run one test case with one integrator configuration.
    Run(Box<RunArgs>),
    /// Reproduce a published convergence table side by side.
    Sweep(SweepArgs),
    /// Scan a stability region and export the field and boundary contour.
    Stability(StabilityArgs),
    /// Run the acceptance criteria and report pass/fail per criterion.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct TableauArgs {
    /// gamma as a rational ("3/4", "13/50"), "1-1/sqrt2", or a decimal.
    #[arg(long, default_value = "3/4")]
    gamma: String,
    /// Evaluate all order conditions and the stiff-accuracy check.
    #[arg(long)]
    validate: bool,
    /// Use the companion root of the last-abscissa quadratic (diagnostic).
    #[arg(long)]
    secondary_root: bool,
    /// Write the tableau in the plain-text exchange format.
    #[arg(long)]
    export: Option<String>,
    /// Read a tableau from the exchange format instead of constructing.
    #[arg(long)]
    import: Option<String>,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Key = value file mirroring these flags; flags take precedence.
    #[arg(long)]
    config: Option<String>,
    /// Case id: R1, R2, R3, M1, M2, M3, M4 (or full names).
    #[arg(long)]
    case: Option<String>,
    /// "rosenbrock" or "si-pc-bdf".
    #[arg(long)]
    integrator: Option<String>,
    /// Rosenbrock gamma (rational, "1-1/sqrt2", or decimal).
    #[arg(long)]
    gamma: Option<String>,
    /// BDF corrector order p (1..=4).
    #[arg(long)]
    p: Option<usize>,
    /// Corrector iterations per step (default p).
    #[arg(long)]
    mu: Option<usize>,
    /// Starting-procedure step reduction factor (1, 2, 4, 8, 16).
    #[arg(long)]
    start_m: Option<usize>,
    /// Start from exact-solution samples.
    #[arg(long)]
    exact_start: bool,
    /// Chain predictor (SI-Euler + BDF2..BDF(p-1)) instead of SI-Euler.
    #[arg(long)]
    chain_predictor: bool,
    /// Resolutions, comma separated, each double the last (e.g. 40,80,160).
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// dt = C dx.
    #[arg(long)]
    dt_ratio: Option<f64>,
    /// dt = CFL dx / max|f'(u0)|.
    #[arg(long)]
    cfl: Option<f64>,
    /// Stencil order of the implicit operators (2 or 4).
    #[arg(long)]
    spatial_order: Option<usize>,
    /// WENO variant: 32 or 53.
    #[arg(long)]
    weno: Option<String>,
    /// WENO smoothness regularizer.
    #[arg(long)]
    weno_epsilon: Option<f64>,
    /// Final time override.
    #[arg(long)]
    final_time: Option<f64>,
    /// Traveling-wave speed for the KdV cases.
    #[arg(long)]
    lambda: Option<f64>,
    /// Write the table to this path.
    #[arg(long)]
    out: Option<String>,
    /// Output format: csv or markdown.
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct SweepArgs {
    /// Table id: R1, R2, R2B, R3, M1, M2, M3, M4.
    #[arg(long)]
    table: String,
    /// Directory for per-scheme CSV output.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct StabilityArgs {
    #[arg(long, default_value = "3/4")]
    gamma: String,
    #[arg(long, default_value_t = -6.0)]
    re_min: f64,
    #[arg(long, default_value_t = 2.0)]
    re_max: f64,
    #[arg(long, default_value_t = -4.0)]
    im_min: f64,
    #[arg(long, default_value_t = 4.0)]
    im_max: f64,
    #[arg(long, default_value_t = 400)]
    resolution: usize,
    /// Samples per sign sweep of the imaginary-axis ladder.
    #[arg(long, default_value_t = 600)]
    y_samples: usize,
    /// Write the scalar field M as gnuplot columns.
    #[arg(long)]
    field: Option<String>,
    /// Write the level-1 contour polylines.
    #[arg(long)]
    contour: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Subset of criteria ids, comma separated (default: all).
    #[arg(long, value_delimiter = ',')]
    criteria: Option<Vec<usize>>,
}

fn parse_gamma_tableau(text: &str, root: RootChoice) -> Result<RosenbrockTableau, Error> {
    let norm = text.trim();
    if norm == "3/4" && root == RootChoice::Unit {
        return Ok(scheme_gamma_three_quarters());
    }
    if norm == "1-1/sqrt2" || norm == "1-1/sqrt(2)" {
        return construct_tableau(1.0 - 1.0 / 2.0_f64.sqrt(), root);
    }
    if !norm.contains('.') {
        if let Ok(r) = norm.parse::<BigRational>() {
            return construct_tableau_exact(r, root);
        }
    }
    let v: f64 = norm
        .parse()
        .map_err(|_| Error::config(format!("cannot parse gamma '{norm}'")))?;
    construct_tableau(v, root)
}

fn cmd_tableau(args: &TableauArgs) -> Result<(), Error> {
    let tableau = match &args.import {
        Some(path) => import_tableau(&std::fs::read_to_string(path)?)?,
        None => parse_gamma_tableau(
            &args.gamma,
            if args.secondary_root {
                RootChoice::Secondary
            } else {
                RootChoice::Unit
            },
        )?,
    };
    let text = export_tableau(&tableau);
    print!("{text}");
    if args.validate {
        let report = validate_order_conditions(&tableau);
        let mode = if report.rational_mode {
            "exact rational"
        } else {
            "floating point"
        };
        println!("# order conditions ({mode}):");
        for (k, (label, order, residual)) in report.residuals.iter().enumerate() {
            let status = if report.rational_mode && report.exact_zero[k] {
                "= 0 (exact)".to_string()
            } else {
                format!("residual {residual:.3e}")
            };
            println!("#   [order {order}] {label}: {status}");
        }
        println!(
            "# order {}: satisfied; stiffly accurate: {}",
            report.satisfied_order,
            check_stiffly_accurate(&tableau)
        );
        println!(
            "# R(zt, inf) = {:.6e}",
            sipde::stability::r_at_infinity(&tableau)?
        );
    }
    if let Some(path) = &args.export {
        std::fs::write(path, text)?;
        eprintln!("tableau written to {path}");
    }
    Ok(())
}

fn read_config_file(path: &str) -> Result<HashMap<String, String>, Error> {
    let mut map = HashMap::new();
    for line in std::fs::read_to_string(path)?.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad config line '{line}'")))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn merge_config(args: &mut RunArgs, cfg: &HashMap<String, String>) -> Result<(), Error> {
    fn set<T: std::str::FromStr>(slot: &mut Option<T>, k: &str, v: &str) -> Result<(), Error> {
        if slot.is_none() {
            *slot = Some(
                v.parse()
                    .map_err(|_| Error::Parse(format!("config {k} = '{v}'")))?,
            );
        }
        Ok(())
    }
    for (k, v) in cfg {
        match k.as_str() {
            "case" => set(&mut args.case, k, v)?,
            "integrator" => set(&mut args.integrator, k, v)?,
            "gamma" => set(&mut args.gamma, k, v)?,
            "weno" => set(&mut args.weno, k, v)?,
            "out" => set(&mut args.out, k, v)?,
            "p" => set(&mut args.p, k, v)?,
            "mu" => set(&mut args.mu, k, v)?,
            "start_m" => set(&mut args.start_m, k, v)?,
            "dt_ratio" => set(&mut args.dt_ratio, k, v)?,
            "cfl" => set(&mut args.cfl, k, v)?,
            "spatial_order" => set(&mut args.spatial_order, k, v)?,
            "weno_epsilon" => set(&mut args.weno_epsilon, k, v)?,
            "final_time" => set(&mut args.final_time, k, v)?,
            "lambda" => set(&mut args.lambda, k, v)?,
            "exact_start" => {
                args.exact_start |= v
                    .parse::<bool>()
                    .map_err(|_| Error::Parse(format!("config {k} = '{v}'")))?;
            }
            "chain_predictor" => {
                args.chain_predictor |= v
                    .parse::<bool>()
                    .map_err(|_| Error::Parse(format!("config {k} = '{v}'")))?;
            }
            "n" => {
                if args.n.is_none() {
                    args.n = Some(
                        v.split(',')
                            .map(|t| {
                                t.trim()
                                    .parse()
                                    .map_err(|_| Error::Parse(format!("config n = '{v}'")))
                            })
                            .collect::<Result<_, _>>()?,
                    );
                }
            }
            "format" => args.format = v.clone(),
            other => return Err(Error::Parse(format!("unknown config key '{other}'"))),
        }
    }
    Ok(())
}

fn cmd_run(mut args: RunArgs) -> Result<(), Error> {
    if let Some(path) = args.config.clone() {
        let cfg = read_config_file(&path)?;
        merge_config(&mut args, &cfg)?;
    }
    let case_name = args
        .case
        .as_deref()
        .ok_or_else(|| Error::config("missing --case"))?;
    let mut case = test_case(CaseId::parse(case_name)?);
    if let Some(lambda) = args.lambda {
        case = case.with_lambda(lambda);
    }

    let integ = match args.integrator.as_deref().unwrap_or("rosenbrock") {
        "rosenbrock" => {
            let gamma = args.gamma.as_deref().unwrap_or("3/4");
            Integrator::Rosenbrock(parse_gamma_tableau(gamma, RootChoice::Unit)?)
        }
        "si-pc-bdf" => {
            let p = args.p.unwrap_or(3);
            let mut cfg = PcConfig::standard(p);
            if let Some(mu) = args.mu {
                cfg.mu = mu;
            }
            if let Some(m) = args.start_m {
                cfg.start_m = m;
            }
            cfg.exact_start = args.exact_start;
            if args.chain_predictor {
                cfg.predictor = Predictor::Chain;
            }
            Integrator::SiPcBdf(cfg)
        }
        other => return Err(Error::config(format!("unknown integrator '{other}'"))),
    };

    let mut spatial = SpatialConfig::default();
    if let Some(order) = args.spatial_order {
        spatial.stencil_order = order;
    }
    spatial.weno = match args.weno.as_deref() {
        None | Some("32") => WenoVariant::Weno32,
        Some("53") => WenoVariant::Weno53,
        Some(other) => return Err(Error::config(format!("unknown WENO variant '{other}'"))),
    };
    if let Some(eps) = args.weno_epsilon {
        spatial.weno_epsilon = eps;
    }

    let dt_rule = match (args.dt_ratio, args.cfl) {
        (Some(c), None) => DtRule::FixedRatio(c),
        (None, Some(c)) => DtRule::Cfl(c),
        (None, None) => DtRule::FixedRatio(1.0),
        (Some(_), Some(_)) => {
            return Err(Error::config("--dt-ratio and --cfl are mutually exclusive"))
        }
    };

    let cfg = RunConfig {
        integrator: integ,
        spatial,
        n_list: args.n.clone().unwrap_or_else(|| vec![40, 80, 160, 320]),
        dt_rule,
        final_time: args.final_time,
    };
    let table = run_convergence_study(&case, &cfg)?;
    let format = match args.format.as_str() {
        "csv" => TableFormat::Csv,
        "markdown" | "md" => TableFormat::Markdown,
        other => return Err(Error::config(format!("unknown format '{other}'"))),
    };
    let text = emit_table(&table, format);
    print!("{text}");
    if let Some(path) = &args.out {
        std::fs::write(path, &text)?;
        eprintln!("table written to {path}");
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Error> {
    let table = TableId::parse(&args.table)
        .ok_or_else(|| Error::config(format!("unknown table '{}'", args.table)))?;
    let results = sweep::run_sweep(table)?;
    for r in &results {
        println!("{}", r.comparison_text());
        if let Some(dir) = &args.out {
            std::fs::create_dir_all(dir)?;
            let scheme_slug: String = r
                .computed
                .scheme
                .chars()
                .map(|c| if c.is_alphanumeric() { c } else { '_' })
                .collect();
            let path = format!("{dir}/{}_{scheme_slug}.csv", table.name());
            std::fs::write(&path, emit_table(&r.computed, TableFormat::Csv))?;
            eprintln!("written {path}");
        }
    }
    Ok(())
}

fn cmd_stability(args: &StabilityArgs) -> Result<(), Error> {
    let tableau = parse_gamma_tableau(&args.gamma, RootChoice::Unit)?;
    let sampling = YSampling {
        count: args.y_samples,
        ..YSampling::default()
    };
    let region = boundary_locus(
        &tableau,
        (args.re_min, args.re_max),
        (args.im_min, args.im_max),
        args.resolution,
        &sampling,
    )?;
    println!(
        "scanned {}x{} window [{}, {}] x [{}, {}] for {}",
        region.nx,
        region.ny,
        args.re_min,
        args.re_max,
        args.im_min,
        args.im_max,
        tableau.label()
    );
    println!(
        "contour polylines: {}, total points {}",
        region.contours.len(),
        region.contours.iter().map(|c| c.len()).sum::<usize>()
    );
    println!(
        "R(zt, inf) = {:.3e}",
        sipde::stability::r_at_infinity(&tableau)?
    );
    if let Some(path) = &args.field {
        std::fs::write(path, region.field_text())?;
        eprintln!("field written to {path}");
    }
    if let Some(path) = &args.contour {
        std::fs::write(path, region.contour_text())?;
        eprintln!("contour written to {path}");
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> ExitCode {
    let ids: Vec<usize> = args.criteria.clone().unwrap_or_else(|| (1..=12).collect());
    let mut all_ok = true;
    for id in ids {
        if !(1..=12).contains(&id) {
            eprintln!("unknown criterion {id}");
            return ExitCode::from(1);
        }
        let outcome = acceptance::run_criterion(id);
        let status = if outcome.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {:2} [{status}] {} — {}",
            outcome.id, outcome.name, outcome.detail
        );
        all_ok &= outcome.passed;
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap's default exit code for usage errors is 2; this CLI
            // reserves 2 for numerical failures.
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match cli.command {
        Command::Tableau(args) => cmd_tableau(&args),
        Command::Run(args) => cmd_run(*args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Stability(args) => cmd_stability(&args),
        Command::Verify(args) => return cmd_verify(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Config(msg)) | Err(Error::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
