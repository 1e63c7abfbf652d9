//! Command-line front end: censuses, scans, bifurcation-curve estimation,
//! zero-solution stability reports and the reference-point reproduction.

// `!(hi > lo)` style checks reject NaN along with the bad orderings.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod output;

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use josephson::abel::{zero_coefficients, zero_stability, Params, ZeroStability};
use josephson::census::{census, scan, CensusConfig, CycleCensus, GridSpec};
use josephson::error::Error;
use josephson::planar::{bifurcation_curve, from_physical, CurveKind};

const EXIT_NUMERIC: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "josephson",
    about = "Limit cycles of the Josephson equation: census, scans and bifurcation curves",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count and classify all limit cycles at one parameter point.
    Census(CensusArgs),
    /// Census over an (a, b) grid at fixed c; emits the dataset.
    Scan(ScanArgs),
    /// Estimate a bifurcation curve over an a-grid at fixed c.
    Curve(CurveArgs),
    /// Expansion coefficients and stability of the zero solution.
    ZeroStability(PointArgs),
    /// Reproduce the reference point (a, b, c) = (0.5, 0.75, -1).
    Example41(CommonArgs),
}

#[derive(Args, Clone, Copy, Default)]
struct CommonArgs {
    /// Relative integration tolerance.
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    /// Absolute integration tolerance.
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    /// Worker threads for scans (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct PointArgs {
    /// Damping offset a >= 0 (direct parameterization).
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Damping scale b > 0 (0 allowed as a flagged boundary case).
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    /// Cosine coupling c (direct parameterization).
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    /// Physical bias alpha (physical parameterization).
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["a", "b", "c"])]
    alpha: Option<f64>,
    /// Physical capacitance-like beta > 0.
    #[arg(long, allow_hyphen_values = true, requires = "alpha")]
    beta: Option<f64>,
    /// Physical coupling gamma.
    #[arg(long, allow_hyphen_values = true, requires = "alpha")]
    gamma: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to this path instead of stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct CensusArgs {
    #[command(flatten)]
    point: PointArgs,
}

#[derive(Args)]
struct ScanArgs {
    /// Fixed c for the cross-section.
    #[arg(long, allow_hyphen_values = true)]
    c: f64,
    /// a-grid as lo:hi:n (inclusive endpoints).
    #[arg(long)]
    a: String,
    /// b-grid as lo:hi:n (inclusive endpoints).
    #[arg(long)]
    b: String,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CurveArgs {
    /// Which curve to estimate.
    #[arg(value_enum)]
    curve: CurveName,
    /// Fixed c (phi and psi2 need c < 0).
    #[arg(long, allow_hyphen_values = true)]
    c: f64,
    /// a-grid as lo:hi:n.
    #[arg(long, default_value = "0.05:0.95:10")]
    a: String,
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveName {
    Phi,
    Psi1,
    Psi2,
}

impl From<CurveName> for CurveKind {
    fn from(n: CurveName) -> Self {
        match n {
            CurveName::Phi => CurveKind::Phi,
            CurveName::Psi1 => CurveKind::Psi1,
            CurveName::Psi2 => CurveKind::Psi2,
        }
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn numeric_error(e: &Error) -> ExitCode {
    eprintln!("numerical failure: {e}");
    ExitCode::from(EXIT_NUMERIC)
}

fn parse_params(args: &PointArgs) -> Result<Params, String> {
    match (args.a, args.b, args.c, args.alpha, args.beta, args.gamma) {
        (Some(a), Some(b), Some(c), None, None, None) => {
            let p = if b == 0.0 {
                Params::with_zero_b(a, c)
            } else {
                Params::new(a, b, c)
            };
            p.map_err(|e| e.to_string())
        }
        (None, None, None, Some(alpha), Some(beta), Some(gamma)) => {
            from_physical(alpha, beta, gamma).map_err(|e| e.to_string())
        }
        _ => Err("give exactly one parameterization: --a --b --c or --alpha --beta --gamma".into()),
    }
}

fn parse_grid(spec: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid spec must be lo:hi:n, got '{spec}'"));
    }
    let lo: f64 = parts[0].parse().map_err(|_| format!("bad grid lower bound '{}'", parts[0]))?;
    let hi: f64 = parts[1].parse().map_err(|_| format!("bad grid upper bound '{}'", parts[1]))?;
    let n: usize = parts[2].parse().map_err(|_| format!("bad grid count '{}'", parts[2]))?;
    if n == 0 {
        return Err("grid count must be at least 1".into());
    }
    if n > 1 && !(hi > lo) {
        return Err(format!("grid needs hi > lo, got {lo}:{hi}"));
    }
    Ok(GridSpec { lo, hi, n })
}

fn build_config(common: &CommonArgs) -> Result<CensusConfig, String> {
    let mut cfg = CensusConfig::default();
    if common.rel_tol.is_some() || common.abs_tol.is_some() {
        let rel = common.rel_tol.unwrap_or(cfg.search.integrator.rel_tol);
        let abs = common.abs_tol.unwrap_or(cfg.search.integrator.abs_tol);
        cfg = cfg.with_tols(rel, abs);
        cfg.search.integrator.validate().map_err(|e| e.to_string())?;
    }
    Ok(cfg)
}

fn init_jobs(common: &CommonArgs) -> Result<(), String> {
    if let Some(n) = common.jobs {
        if n == 0 {
            return Err("--jobs must be at least 1".into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn emit(out: &Option<String>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, content).map_err(|e| format!("cannot write {path}: {e}")),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn census_text(cen: &CycleCensus) -> String {
    let p = cen.params;
    let mut s = String::new();
    s.push_str(&format!(
        "parameters: a = {}, b = {}, c = {}{}\n",
        output::fmt_g12(p.a()),
        output::fmt_g12(p.b()),
        output::fmt_g12(p.c()),
        if p.is_zero_b() { "  (flagged b = 0 boundary)" } else { "" }
    ));
    s.push_str(&format!("region: {}\n", cen.region));
    s.push_str(&format!(
        "configuration (i, j): ({}, {})\n",
        cen.configuration.0, cen.configuration.1
    ));
    for cyc in &cen.first {
        s.push_str(&format!(
            "  first-kind cycle    anchor (x, y) = ({}, {})  {}  multiplicity {}  return-map slope - 1 = {}\n",
            output::fmt_g12(cyc.anchor.0),
            output::fmt_g12(cyc.anchor.1),
            cyc.stability.label(),
            cyc.multiplicity_estimate,
            output::fmt_g12(cyc.g_prime),
        ));
    }
    for cyc in cen.second_pos.iter().chain(&cen.second_neg) {
        s.push_str(&format!(
            "  second-kind cycle   anchor (x0, y0) = ({}, {})  {}  multiplicity {}  G' = {}\n",
            output::fmt_g12(cyc.anchor.0),
            output::fmt_g12(cyc.anchor.1),
            cyc.stability.label(),
            cyc.multiplicity_estimate,
            output::fmt_g12(cyc.g_prime),
        ));
    }
    s.push_str(&format!(
        "stability at infinity: +inf {}, -inf {}\n",
        cen.infinity.plus.label(),
        cen.infinity.minus.label()
    ));
    match &cen.predicted {
        Some(pred) => {
            s.push_str(&format!(
                "prediction [{}]: i in {{{}}}, j+ in {{{}}}, j- in {{{}}}\n",
                pred.source,
                pred.first.display(),
                pred.second_pos.display(),
                pred.second_neg.display()
            ));
            s.push_str(&format!(
                "agreement: {}\n",
                match cen.agreement {
                    Some(true) => "true",
                    Some(false) => "false",
                    None => "na",
                }
            ));
        }
        None => s.push_str("prediction: omitted (near-bifurcation or curves unavailable)\n"),
    }
    if !cen.flags.is_empty() {
        s.push_str(&format!("flags: {}\n", cen.flags.join("; ")));
    }
    s
}

fn census_row(cen: &CycleCensus) -> josephson::census::ScanRecord {
    josephson::census::ScanRecord {
        a: cen.params.a(),
        b: cen.params.b(),
        c: cen.params.c(),
        label: cen.region.clone(),
        first: cen.configuration.0,
        second: cen.configuration.1,
        second_pos: cen.second_pos.len(),
        second_neg: cen.second_neg.len(),
        agreement: cen.agreement,
        flags: cen.flags.join(";").replace([',', '\n'], " "),
    }
}

fn run_census(args: &CensusArgs) -> ExitCode {
    let p = match parse_params(&args.point) {
        Ok(p) => p,
        Err(e) => return usage_error(&e),
    };
    let cfg = match build_config(&args.point.common) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    if let Err(e) = init_jobs(&args.point.common) {
        return usage_error(&e);
    }
    let cen = match census(&p, &cfg) {
        Ok(c) => c,
        Err(e) => return numeric_error(&e),
    };
    let content = match args.point.format {
        Format::Text => census_text(&cen),
        Format::Csv => output::scan_csv(&[census_row(&cen)]),
        Format::Json => output::scan_json(&[census_row(&cen)]),
    };
    match emit(&args.point.out, &content) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}

fn run_scan(args: &ScanArgs) -> ExitCode {
    let (a_grid, b_grid) = match (parse_grid(&args.a), parse_grid(&args.b)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return usage_error(&e),
    };
    let cfg = match build_config(&args.common) {
        Ok(mut c) => {
            if args.common.rel_tol.is_none() && args.common.abs_tol.is_none() {
                c = CensusConfig::scan();
            }
            c
        }
        Err(e) => return usage_error(&e),
    };
    if let Err(e) = init_jobs(&args.common) {
        return usage_error(&e);
    }
    let rows = scan(args.c, a_grid, b_grid, &cfg);
    let content = match args.format {
        Format::Json => output::scan_json(&rows),
        _ => output::scan_csv(&rows),
    };
    match emit(&args.out, &content) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}

fn run_curve(args: &CurveArgs) -> ExitCode {
    let kind: CurveKind = args.curve.into();
    let grid = match parse_grid(&args.a) {
        Ok(g) => g,
        Err(e) => return usage_error(&e),
    };
    if matches!(kind, CurveKind::Phi | CurveKind::Psi2) && args.c >= 0.0 {
        return usage_error(&format!("curve {} needs c < 0", kind.name()));
    }
    if let Err(e) = init_jobs(&args.common) {
        return usage_error(&e);
    }
    let cfg = match build_config(&args.common) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let curve = match bifurcation_curve(kind, args.c, &grid.values(), &cfg.shoot) {
        Ok(c) => c,
        Err(e) => return numeric_error(&e),
    };
    let content = match args.format {
        Format::Json => output::curve_json(&curve),
        _ => output::curve_csv(&curve),
    };
    match emit(&args.out, &content) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}

fn run_zero_stability(args: &PointArgs) -> ExitCode {
    let p = match parse_params(args) {
        Ok(p) => p,
        Err(e) => return usage_error(&e),
    };
    let zc = zero_coefficients(&p);
    let st = zero_stability(&p);
    let content = match args.format {
        Format::Json => format!(
            "{{\"a\": {}, \"b\": {}, \"c\": {}, \"G2\": {}, \"G3\": {}, \"G4\": {}, \"zero\": \"{}\"}}\n",
            output::fmt_g12(p.a()),
            output::fmt_g12(p.b()),
            output::fmt_g12(p.c()),
            output::fmt_g12(zc.g2),
            output::fmt_g12(zc.g3),
            output::fmt_g12(zc.g4),
            zero_label(&st),
        ),
        _ => format!(
            "parameters: a = {}, b = {}, c = {}\nG2 = {}\nG3 = {}\nG4 = {}\nzero solution: {}\n",
            output::fmt_g12(p.a()),
            output::fmt_g12(p.b()),
            output::fmt_g12(p.c()),
            output::fmt_g12(zc.g2),
            output::fmt_g12(zc.g3),
            output::fmt_g12(zc.g4),
            zero_label(&st),
        ),
    };
    match emit(&args.out, &content) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}

fn zero_label(st: &ZeroStability) -> String {
    match st {
        ZeroStability::Degenerate => "degenerate (displacement map vanishes identically)".into(),
        ZeroStability::Classified { upper, lower } => format!(
            "upper {}, lower {}",
            match upper {
                josephson::abel::SideStability::Stable => "stable",
                josephson::abel::SideStability::Unstable => "unstable",
            },
            match lower {
                josephson::abel::SideStability::Stable => "stable",
                josephson::abel::SideStability::Unstable => "unstable",
            }
        ),
    }
}

fn run_example41(common: &CommonArgs) -> ExitCode {
    let cfg = match build_config(common) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    if let Err(e) = init_jobs(common) {
        return usage_error(&e);
    }
    let p = Params::new(0.5, 0.75, -1.0).expect("reference parameters are valid");
    let cen = match census(&p, &cfg) {
        Ok(c) => c,
        Err(e) => return numeric_error(&e),
    };
    print!("{}", census_text(&cen));
    let ok = cen.configuration == (1, 1)
        && cen.first.iter().all(|c| c.g_prime < 0.0)
        && cen.second_pos.iter().all(|c| c.g_prime < 0.0);
    if ok {
        println!("reference reproduction: ok (one cycle of each kind, both stable)");
        ExitCode::SUCCESS
    } else {
        println!("reference reproduction: MISMATCH");
        ExitCode::from(EXIT_NUMERIC)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Census(args) => run_census(&args),
        Command::Scan(args) => run_scan(&args),
        Command::Curve(args) => run_curve(&args),
        Command::ZeroStability(args) => run_zero_stability(&args),
        Command::Example41(common) => run_example41(&common),
    }
}
