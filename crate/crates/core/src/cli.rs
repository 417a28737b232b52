//! Command-line front end.
//!
//! Exit codes: 0 success, 2 bad data, unmet assumptions or bad usage,
//! 3 solver failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::Months;
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use crate::calibrator::{
    bootstrap_result, calibrate_bid_ask, CalibrationConfig, CalibrationResult, FailureKind,
};
use crate::choquet::BidAskEngine;
use crate::curves::{CurveForm, DiscountCurve, HazardCurve};
use crate::daycount::Date;
use crate::distortion::{Distortion, DistortionFamily};
use crate::error::{CdsError, Result};
use crate::io::{
    hash_file, parse_discount_curve, parse_quotes, QuoteFile, QuoteMode, ResultFile, ResultFormat,
    ResultMetadata, SurvivalSample,
};
use crate::pricer::{pv_cds, CdsContract, GridConfig};
use crate::schedule::{build_schedule, MaturityRule};
use crate::solver::SolverConfig;

const EXIT_DATA: i32 = 2;
const EXIT_SOLVER: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "conic-cds",
    version,
    about = "CDS hazard and implied-liquidity calibration from bid/ask quotes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hazard curve from mid quotes.
    Bootstrap(RunArgs),
    /// Hazard and liquidity curves from bid and ask quotes.
    Calibrate(CalibrateArgs),
    /// PV, bid and ask of every quoted contract for given hazard rates.
    Price(PriceArgs),
    /// Survival probabilities from a result file.
    Survival(SurvivalArgs),
    /// Long-format CSV of quotes, residuals, hazard and liquidity curves.
    ExportPlot(ExportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Minmaxvar,
    Wang,
}

impl From<FamilyArg> for DistortionFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Minmaxvar => DistortionFamily::MinMaxVar,
            FamilyArg::Wang => DistortionFamily::Wang,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormArg {
    Const,
    Linear,
}

impl From<FormArg> for CurveForm {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Const => CurveForm::PiecewiseConstant,
            FormArg::Linear => CurveForm::PiecewiseLinear,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RuleArg {
    SemiAnnual,
    Imm,
}

impl From<RuleArg> for MaturityRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::SemiAnnual => MaturityRule::SemiAnnualRoll,
            RuleArg::Imm => MaturityRule::NextImm,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for ResultFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => ResultFormat::Csv,
            FormatArg::Json => ResultFormat::Json,
        }
    }
}

#[derive(Debug, Args)]
struct MarketArgs {
    /// Quote file (preamble plus `tenor,uf_bid,uf_ask`).
    #[arg(long)]
    quotes: PathBuf,
    /// Discount curve (`date,df` or `tenor_years,df`); unit discounting if absent.
    #[arg(long)]
    discount_curve: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "minmaxvar")]
    distortion: FamilyArg,
    #[arg(long, value_enum, default_value = "const")]
    curve_form: FormArg,
    /// Default-time grid step in calendar days.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    grid_days: u32,
    /// Root-finder tolerance on the function value.
    #[arg(long)]
    tol: Option<f64>,
    /// Tenor to maturity mapping.
    #[arg(long, value_enum, default_value = "semi-annual")]
    maturity_rule: RuleArg,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    market: MarketArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Spacing of the stored survival samples, in months.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    survival_step_months: u32,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Hold gamma fixed and fit hazard rates to mid quotes.
    #[arg(long)]
    force_gamma: Option<f64>,
}

#[derive(Debug, Args)]
struct PriceArgs {
    #[command(flatten)]
    market: MarketArgs,
    /// One flat hazard rate, or one per quoted tenor (comma separated).
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_hyphen_values = true
    )]
    lambda: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
}

#[derive(Debug, Args)]
struct SurvivalArgs {
    #[arg(long)]
    result: PathBuf,
    /// Resample on this monthly grid instead of printing the stored samples.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    step_months: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[arg(long)]
    result: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sample count for the hazard and liquidity curves.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(2..))]
    points: u32,
}

/// Runs the tool with `argv` (including the program name) and returns the
/// process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// As [`run_cli`], writing to the given streams.
pub fn run_cli_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_DATA } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &CdsError) -> i32 {
    if e.is_solver_failure() {
        EXIT_SOLVER
    } else {
        EXIT_DATA
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Bootstrap(a) => run_calibration(&a, None, false, out, err),
        Command::Calibrate(a) => run_calibration(&a.run, a.force_gamma, true, out, err),
        Command::Price(a) => price(&a, out),
        Command::Survival(a) => survival(&a, out),
        Command::ExportPlot(a) => export_plot(&a, out),
    }
}

struct Market {
    quote_file: QuoteFile,
    disc: DiscountCurve,
    cfg: CalibrationConfig,
    rule: MaturityRule,
    hashes: BTreeMap<String, String>,
}

fn load_market(m: &MarketArgs, mode: QuoteMode) -> Result<Market> {
    let quote_file = parse_quotes(&m.quotes, mode)?;
    let mut hashes = BTreeMap::new();
    hashes.insert("quotes".to_string(), hash_file(&m.quotes)?);
    let disc = match &m.discount_curve {
        Some(p) => {
            hashes.insert("discount_curve".to_string(), hash_file(p)?);
            parse_discount_curve(p, Some(quote_file.valuation_date))?
        }
        None => DiscountCurve::unit().with_valuation(quote_file.valuation_date),
    };
    let mut solver = SolverConfig::default();
    if let Some(tol) = m.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CdsError::invalid(format!(
                "--tol must be positive, got {tol}"
            )));
        }
        solver.f_tol = tol;
    }
    let cfg = CalibrationConfig {
        grid: GridConfig::with_step_days(m.grid_days),
        form: m.curve_form.into(),
        family: m.distortion.into(),
        solver,
        ..CalibrationConfig::default()
    };
    Ok(Market {
        quote_file,
        disc,
        cfg,
        rule: m.maturity_rule.into(),
        hashes,
    })
}

fn resolve_format(o: &OutputArgs) -> Result<ResultFormat> {
    let from_flag = o.format.map(ResultFormat::from);
    let from_path = o.out.as_deref().and_then(ResultFormat::from_path);
    match (from_flag, from_path) {
        (Some(f), Some(p)) if f != p => Err(CdsError::invalid(format!(
            "--format {f} conflicts with the extension of --out ({p})"
        ))),
        (Some(f), _) | (None, Some(f)) => Ok(f),
        (None, None) => Ok(ResultFormat::Json),
    }
}

/// `{:.9e}`: ten significant digits.
fn money(x: f64) -> String {
    format!("{x:.9e}")
}

fn survival_samples(
    valuation: Date,
    h: &HazardCurve,
    result: &CalibrationResult,
    step_months: u32,
    cfg: &CalibrationConfig,
) -> Result<Vec<SurvivalSample>> {
    let Some(last) = result.pillars.last().map(|p| p.maturity) else {
        return Ok(Vec::new());
    };
    let mut dates: Vec<Date> = result.pillars.iter().map(|p| p.maturity).collect();
    let mut k = 0;
    loop {
        let d = valuation
            .checked_add_months(Months::new(k * step_months))
            .ok_or_else(|| CdsError::invalid("survival grid overflows the calendar"))?;
        if d > last {
            break;
        }
        dates.push(d);
        k += 1;
    }
    dates.sort();
    dates.dedup();
    dates
        .into_iter()
        .map(|date| {
            let time = cfg.schedule.curve_day_count.fraction(valuation, date);
            Ok(SurvivalSample {
                date,
                time,
                survival: h.survival(time)?,
            })
        })
        .collect()
}

fn run_calibration(
    a: &RunArgs,
    forced_gamma: Option<f64>,
    two_price: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let format = resolve_format(&a.output)?;
    let mode = if two_price && forced_gamma.is_none() {
        QuoteMode::TwoPrice
    } else {
        QuoteMode::OnePrice
    };
    let mut m = load_market(&a.market, mode)?;
    m.cfg.forced_gamma = forced_gamma;
    let valuation = m.quote_file.valuation_date;
    let quotes = m.quote_file.quotes(m.rule)?;
    info!("{} quotes, valuation {valuation}", quotes.len());

    let result = if two_price {
        calibrate_bid_ask(valuation, &quotes, &m.disc, &m.cfg)?
    } else {
        bootstrap_result(valuation, &quotes, &m.disc, &m.cfg)?
    };
    let survival = if result.pillars.is_empty() {
        Vec::new()
    } else {
        survival_samples(
            valuation,
            &result.hazard_curve()?,
            &result,
            a.survival_step_months,
            &m.cfg,
        )?
    };
    let file = ResultFile {
        metadata: ResultMetadata {
            mode: if two_price { "calibrate" } else { "bootstrap" }.to_string(),
            valuation_date: valuation,
            coupon: m.quote_file.coupon,
            recovery: m.quote_file.recovery,
            family: m.cfg.family,
            form: m.cfg.form,
            maturity_rule: m.rule,
            grid_days: m.cfg.grid.step_days,
            representative_point: serde_json::to_value(m.cfg.grid.point)?
                .as_str()
                .unwrap_or_default()
                .to_string(),
            accrual_day_count: m.cfg.schedule.accrual_day_count.to_string(),
            curve_day_count: m.cfg.schedule.curve_day_count.to_string(),
            f_tol: m.cfg.solver.f_tol,
            x_tol: m.cfg.solver.x_tol,
            max_iter: m.cfg.solver.max_iter,
            gamma_max: m.cfg.gamma_max,
            forced_gamma,
            input_hashes: m.hashes,
        },
        quotes: m.quote_file.rows.clone(),
        result,
        survival,
    };

    match &a.output.out {
        Some(path) => {
            file.write(path, format)?;
            writeln!(out, "tenor,lambda,gamma,residual_bid,residual_ask")?;
            for p in &file.result.pillars {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    p.tenor,
                    money(p.lambda),
                    money(p.gamma),
                    money(p.residual_bid),
                    money(p.residual_ask)
                )?;
            }
        }
        None => write!(out, "{}", file.to_string_as(format)?)?,
    }

    Ok(match &file.result.failure {
        None => 0,
        Some(f) => {
            writeln!(
                err,
                "error: pillar {} ({}): {}",
                f.pillar, f.tenor, f.message
            )?;
            match f.kind {
                FailureKind::Solver => EXIT_SOLVER,
                _ => EXIT_DATA,
            }
        }
    })
}

fn price(a: &PriceArgs, out: &mut dyn Write) -> Result<i32> {
    let m = load_market(&a.market, QuoteMode::OnePrice)?;
    let valuation = m.quote_file.valuation_date;
    let quotes = m.quote_file.quotes(m.rule)?;
    let contracts = quotes
        .iter()
        .map(|q| {
            let s = build_schedule(valuation, q.maturity, &m.cfg.schedule)?;
            CdsContract::with_grid(s, q.coupon, q.lgd(), &m.cfg.grid)
        })
        .collect::<Result<Vec<_>>>()?;
    let h = match a.lambda.len() {
        1 => HazardCurve::flat(a.lambda[0])?,
        n if n == contracts.len() => HazardCurve::new(
            contracts.iter().map(CdsContract::maturity_time).collect(),
            a.lambda.clone(),
            m.cfg.form,
        )?,
        n => {
            return Err(CdsError::invalid(format!(
                "--lambda takes 1 or {} values, got {n}",
                contracts.len()
            )))
        }
    };
    let d = Distortion::new(m.cfg.family, a.gamma)?;
    writeln!(out, "tenor,pv,bid,ask")?;
    for (q, c) in quotes.iter().zip(&contracts) {
        let pv = pv_cds(c, &m.disc, &h);
        let engine = BidAskEngine::new(c, &m.disc)?;
        let tails = engine.tails(&c.grid().cell_probabilities(&h));
        let (bid, ask) = engine.bid_ask(&tails, &d);
        writeln!(
            out,
            "{},{},{},{}",
            q.tenor,
            money(pv),
            money(bid),
            money(ask)
        )?;
    }
    Ok(0)
}

fn write_or_print(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => write!(out, "{text}")?,
    }
    Ok(())
}

fn survival(a: &SurvivalArgs, out: &mut dyn Write) -> Result<i32> {
    let file = ResultFile::read(&a.result)?;
    let samples = match a.step_months {
        None => file.survival.clone(),
        Some(step) => {
            let cfg = CalibrationConfig::default();
            survival_samples(
                file.metadata.valuation_date,
                &file.result.hazard_curve()?,
                &file.result,
                step,
                &cfg,
            )?
        }
    };
    let mut text = String::from("date,time,survival\n");
    for s in &samples {
        text.push_str(&format!("{},{},{}\n", s.date, s.time, money(s.survival)));
    }
    write_or_print(a.out.as_deref(), &text, out)?;
    Ok(0)
}

fn export_plot(a: &ExportArgs, out: &mut dyn Write) -> Result<i32> {
    let file = ResultFile::read(&a.result)?;
    let r = &file.result;
    let mut text = String::from("series,x,y\n");
    let mut push = |series: &str, x: f64, y: f64| text.push_str(&format!("{series},{x},{y}\n"));
    for (q, p) in file.quotes.iter().zip(&r.pillars) {
        push("uf_bid", p.time, q.uf_bid);
        push("uf_ask", p.time, q.uf_ask);
        push("uf_mid", p.time, 0.5 * (q.uf_bid + q.uf_ask));
        push("residual_bid", p.time, p.residual_bid);
        push("residual_ask", p.time, p.residual_ask);
        push("lambda_pillar", p.time, p.lambda);
        push("gamma_pillar", p.time, p.gamma);
    }
    if let Some(last) = r.pillars.last() {
        let h = r.hazard_curve()?;
        let n = a.points as usize;
        for i in 0..n {
            let t = last.time * i as f64 / (n - 1) as f64;
            push("lambda", t, h.rate(t));
            push("gamma", t, r.liquidity.gamma(t));
        }
    }
    for s in &file.survival {
        push("survival", s.time, s.survival);
    }
    write_or_print(a.out.as_deref(), &text, out)?;
    Ok(0)
}
