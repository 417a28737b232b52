//! Market-data input files and calibration result files.
//!
//! Quote file: optional `key=value` preamble (`valuation_date`, `recovery`,
//! `coupon`; `#` starts a comment) followed by CSV with header
//! `tenor,uf_bid,uf_ask`.
//!
//! Discount file: CSV with header `date,df` or `tenor_years,df`.
//!
//! Result file: JSON, or a sectioned CSV whose first column names the record
//! kind (`meta`, `quote`, `pillar`, `survival`, `failure`). Floats are written
//! in shortest round-trip form, so reading a file back reproduces it exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use log::warn;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::calibrator::{
    CalibrationFailure, CalibrationResult, FailureKind, MarketQuote, PillarResult,
};
use crate::curves::{CurveForm, DiscountCurve};
use crate::daycount::{year_fraction, Date, DayCount};
use crate::distortion::DistortionFamily;
use crate::error::{CdsError, Result};
use crate::schedule::{MaturityRule, Tenor};

/// Whether bid and ask are used separately (two-price) or only their mid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuoteMode {
    OnePrice,
    TwoPrice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuoteRow {
    pub tenor: Tenor,
    pub uf_bid: f64,
    pub uf_ask: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuoteFile {
    pub valuation_date: Date,
    pub recovery: f64,
    pub coupon: f64,
    /// Sorted by maturity.
    pub rows: Vec<QuoteRow>,
}

impl QuoteFile {
    /// Quotes with maturities resolved under `rule`.
    pub fn quotes(&self, rule: MaturityRule) -> Result<Vec<MarketQuote>> {
        self.rows
            .iter()
            .map(|r| {
                MarketQuote::new(
                    r.tenor,
                    r.tenor.maturity(self.valuation_date, rule),
                    r.uf_bid,
                    r.uf_ask,
                    self.coupon,
                    self.recovery,
                )
            })
            .collect()
    }
}

const QUOTE_HEADER: [&str; 3] = ["tenor", "uf_bid", "uf_ask"];

fn parse_number(field: &str, what: &str, line: usize) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| {
        CdsError::parse(Some(line), format!("unparseable {what} '{}'", field.trim()))
    })?;
    if !v.is_finite() {
        return Err(CdsError::parse(Some(line), format!("non-finite {what}")));
    }
    Ok(v)
}

fn parse_date(field: &str, line: usize) -> Result<Date> {
    Date::parse_from_str(field.trim(), "%Y-%m-%d").map_err(|_| {
        CdsError::parse(
            Some(line),
            format!("unparseable date '{}' (expected YYYY-MM-DD)", field.trim()),
        )
    })
}

fn is_blank(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

pub fn parse_quotes(path: &Path, mode: QuoteMode) -> Result<QuoteFile> {
    parse_quotes_str(&fs::read_to_string(path)?, mode)
}

pub fn parse_quotes_str(text: &str, mode: QuoteMode) -> Result<QuoteFile> {
    let lines: Vec<&str> = text.lines().collect();
    let mut meta: BTreeMap<String, (String, usize)> = BTreeMap::new();
    let mut header_at = None;
    for (i, raw) in lines.iter().enumerate() {
        if is_blank(raw) {
            continue;
        }
        let line = raw.trim();
        if line.to_ascii_lowercase().starts_with("tenor") {
            header_at = Some(i);
            break;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CdsError::parse(
                Some(i + 1),
                format!("expected key=value or the header, got '{line}'"),
            )
        })?;
        let key = k.trim().to_ascii_lowercase();
        if !matches!(key.as_str(), "valuation_date" | "recovery" | "coupon") {
            return Err(CdsError::parse(
                Some(i + 1),
                format!("unknown preamble key '{key}'"),
            ));
        }
        meta.insert(key, (v.trim().to_string(), i + 1));
    }
    let header_at =
        header_at.ok_or_else(|| CdsError::parse(None, "missing header 'tenor,uf_bid,uf_ask'"))?;

    let get = |key: &str| -> Result<&(String, usize)> {
        meta.get(key)
            .ok_or_else(|| CdsError::parse(None, format!("missing preamble entry '{key}'")))
    };
    let (v, l) = get("valuation_date")?;
    let valuation_date = parse_date(v, *l)?;
    let (v, l) = get("recovery")?;
    let recovery = parse_number(v, "recovery", *l)?;
    let (v, l) = get("coupon")?;
    let coupon = parse_number(v, "coupon", *l)?;

    let header: Vec<String> = lines[header_at]
        .split(',')
        .map(|s| s.trim().to_ascii_lowercase())
        .collect();
    let mut columns = [0usize; 3];
    for (slot, name) in columns.iter_mut().zip(QUOTE_HEADER) {
        *slot = header.iter().position(|h| h == name).ok_or_else(|| {
            CdsError::parse(Some(header_at + 1), format!("missing column '{name}'"))
        })?;
    }

    let mut rows = Vec::new();
    for (i, raw) in lines.iter().enumerate().skip(header_at + 1) {
        if is_blank(raw) {
            continue;
        }
        let line = i + 1;
        let fields: Vec<&str> = raw.split(',').collect();
        let field = |c: usize| -> Result<&str> {
            fields.get(c).copied().ok_or_else(|| {
                CdsError::parse(Some(line), format!("missing field '{}'", header[c]))
            })
        };
        let tenor: Tenor = field(columns[0])?
            .parse()
            .map_err(|e: CdsError| CdsError::parse(Some(line), e.to_string()))?;
        let uf_bid = parse_number(field(columns[1])?, "uf_bid", line)?;
        let uf_ask = parse_number(field(columns[2])?, "uf_ask", line)?;
        if uf_bid > uf_ask {
            match mode {
                QuoteMode::OnePrice => {
                    warn!("line {line}: bid upfront {uf_bid} above ask {uf_ask}")
                }
                QuoteMode::TwoPrice => {
                    return Err(CdsError::parse(
                        Some(line),
                        format!("bid upfront {uf_bid} above ask {uf_ask}"),
                    ))
                }
            }
        }
        rows.push(QuoteRow {
            tenor,
            uf_bid,
            uf_ask,
        });
    }
    if rows.is_empty() {
        return Err(CdsError::parse(None, "no quote rows"));
    }
    rows.sort_by_key(|r| r.tenor.maturity(valuation_date, MaturityRule::default()));
    Ok(QuoteFile {
        valuation_date,
        recovery,
        coupon,
        rows,
    })
}

/// Reads a discount curve. Dated rows need `valuation`; times are then
/// ACT/365F year fractions from it.
pub fn parse_discount_curve(path: &Path, valuation: Option<Date>) -> Result<DiscountCurve> {
    parse_discount_curve_str(&fs::read_to_string(path)?, valuation)
}

pub fn parse_discount_curve_str(text: &str, valuation: Option<Date>) -> Result<DiscountCurve> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !is_blank(l));
    let (hline, header) = lines
        .next()
        .ok_or_else(|| CdsError::parse(None, "missing header 'date,df' or 'tenor_years,df'"))?;
    let cols: Vec<String> = header
        .split(',')
        .map(|s| s.trim().to_ascii_lowercase())
        .collect();
    let dated = match cols.first().map(String::as_str) {
        Some("date") => true,
        Some("tenor_years") => false,
        _ => {
            return Err(CdsError::parse(
                Some(hline + 1),
                "expected header 'date,df' or 'tenor_years,df'",
            ))
        }
    };
    if cols.get(1).map(String::as_str) != Some("df") {
        return Err(CdsError::parse(Some(hline + 1), "missing column 'df'"));
    }
    if dated && valuation.is_none() {
        return Err(CdsError::invalid(
            "dated discount curve needs a valuation date",
        ));
    }

    let mut nodes = Vec::new();
    for (i, raw) in lines {
        let line = i + 1;
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() < 2 {
            return Err(CdsError::parse(Some(line), "expected two fields"));
        }
        let t = if dated {
            let d = parse_date(fields[0], line)?;
            year_fraction(valuation.expect("checked above"), d, DayCount::Act365F)
                .map_err(|e| CdsError::parse(Some(line), e.to_string()))?
        } else {
            parse_number(fields[0], "tenor_years", line)?
        };
        let df = parse_number(fields[1], "df", line)?;
        if let Some(&(prev, _)) = nodes.last() {
            if t <= prev {
                return Err(CdsError::parse(
                    Some(line),
                    "rows out of order (times must increase)",
                ));
            }
        }
        nodes.push((t, df));
    }
    if nodes.is_empty() {
        return Err(CdsError::parse(None, "discount curve has no rows"));
    }
    if nodes.iter().any(|&(_, df)| df > 1.0) {
        warn!("discount curve has a factor above 1");
    }
    if nodes.windows(2).any(|w| w[1].1 > w[0].1) {
        warn!("discount factors are not non-increasing");
    }
    let curve =
        DiscountCurve::new(valuation, &nodes).map_err(|e| CdsError::parse(None, e.to_string()))?;
    Ok(curve)
}

/// Lower-case hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn hash_file(path: &Path) -> Result<String> {
    Ok(sha256_hex(&fs::read(path)?))
}

/// Everything needed to rerun a calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultMetadata {
    pub mode: String,
    pub valuation_date: Date,
    pub coupon: f64,
    pub recovery: f64,
    pub family: DistortionFamily,
    pub form: CurveForm,
    pub maturity_rule: MaturityRule,
    pub grid_days: u32,
    pub representative_point: String,
    pub accrual_day_count: String,
    pub curve_day_count: String,
    pub f_tol: f64,
    pub x_tol: f64,
    pub max_iter: usize,
    pub gamma_max: f64,
    pub forced_gamma: Option<f64>,
    /// Input name to SHA-256.
    pub input_hashes: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalSample {
    pub date: Date,
    pub time: f64,
    pub survival: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub metadata: ResultMetadata,
    pub quotes: Vec<QuoteRow>,
    pub result: CalibrationResult,
    pub survival: Vec<SurvivalSample>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResultFormat {
    Json,
    Csv,
}

impl ResultFormat {
    /// Format implied by a file extension, if any.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "json" => Some(ResultFormat::Json),
            "csv" => Some(ResultFormat::Csv),
            _ => None,
        }
    }
}

impl FromStr for ResultFormat {
    type Err = CdsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ResultFormat::Json),
            "csv" => Ok(ResultFormat::Csv),
            other => Err(CdsError::invalid(format!(
                "unknown format '{other}' (expected csv or json)"
            ))),
        }
    }
}

impl fmt::Display for ResultFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResultFormat::Json => "json",
            ResultFormat::Csv => "csv",
        })
    }
}

const PILLAR_FIELDS: usize = 14;

impl ResultFile {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .flexible(true)
            .from_writer(Vec::new());
        let meta = serde_json::to_value(&self.metadata)?;
        if let serde_json::Value::Object(map) = meta {
            for (k, v) in map {
                w.write_record(["meta", k.as_str(), &v.to_string()])?;
            }
        }
        for q in &self.quotes {
            w.write_record([
                "quote".to_string(),
                q.tenor.to_string(),
                q.uf_bid.to_string(),
                q.uf_ask.to_string(),
            ])?;
        }
        for p in &self.result.pillars {
            let mut rec = vec![
                "pillar".to_string(),
                p.tenor.clone(),
                p.maturity.to_string(),
            ];
            rec.extend(
                [
                    p.time,
                    p.lambda,
                    p.gamma,
                    p.residual_bid,
                    p.residual_ask,
                    p.bracket.0,
                    p.bracket.1,
                    p.pv,
                    p.bid,
                    p.ask,
                    p.target_bid,
                    p.target_ask,
                ]
                .iter()
                .map(f64::to_string),
            );
            w.write_record(&rec)?;
        }
        for s in &self.survival {
            w.write_record([
                "survival".to_string(),
                s.date.to_string(),
                s.time.to_string(),
                s.survival.to_string(),
            ])?;
        }
        if let Some(f) = &self.result.failure {
            let kind = serde_json::to_value(f.kind)?;
            w.write_record([
                "failure".to_string(),
                f.pillar.to_string(),
                f.tenor.clone(),
                kind.as_str().unwrap_or_default().to_string(),
                f.message.clone(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| CdsError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CdsError::Io(e.to_string()))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut meta = serde_json::Map::new();
        let mut quotes = Vec::new();
        let mut pillars = Vec::new();
        let mut survival = Vec::new();
        let mut failure = None;
        for rec in r.records() {
            let rec = rec?;
            let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
            let field = |i: usize| -> Result<&str> {
                rec.get(i)
                    .ok_or_else(|| CdsError::parse(Some(line), format!("record has no field {i}")))
            };
            let num = |i: usize| -> Result<f64> {
                field(i)?.parse().map_err(|_| {
                    CdsError::parse(
                        Some(line),
                        format!("unparseable number '{}'", rec.get(i).unwrap_or("")),
                    )
                })
            };
            match field(0)? {
                "meta" => {
                    let v: serde_json::Value = serde_json::from_str(field(2)?)?;
                    meta.insert(field(1)?.to_string(), v);
                }
                "quote" => quotes.push(QuoteRow {
                    tenor: field(1)?.parse()?,
                    uf_bid: num(2)?,
                    uf_ask: num(3)?,
                }),
                "pillar" => {
                    if rec.len() != PILLAR_FIELDS + 1 {
                        return Err(CdsError::parse(
                            Some(line),
                            "pillar record has the wrong number of fields",
                        ));
                    }
                    pillars.push(PillarResult {
                        tenor: field(1)?.to_string(),
                        maturity: parse_date(field(2)?, line)?,
                        time: num(3)?,
                        lambda: num(4)?,
                        gamma: num(5)?,
                        residual_bid: num(6)?,
                        residual_ask: num(7)?,
                        bracket: (num(8)?, num(9)?),
                        pv: num(10)?,
                        bid: num(11)?,
                        ask: num(12)?,
                        target_bid: num(13)?,
                        target_ask: num(14)?,
                    });
                }
                "survival" => survival.push(SurvivalSample {
                    date: parse_date(field(1)?, line)?,
                    time: num(2)?,
                    survival: num(3)?,
                }),
                "failure" => {
                    let kind: FailureKind =
                        serde_json::from_value(serde_json::Value::String(field(3)?.to_string()))?;
                    failure = Some(CalibrationFailure {
                        pillar: field(1)?
                            .parse()
                            .map_err(|_| CdsError::parse(Some(line), "unparseable pillar index"))?,
                        tenor: field(2)?.to_string(),
                        kind,
                        message: field(4)?.to_string(),
                    });
                }
                other => {
                    return Err(CdsError::parse(
                        Some(line),
                        format!("unknown record kind '{other}'"),
                    ))
                }
            }
        }
        let metadata: ResultMetadata = serde_json::from_value(serde_json::Value::Object(meta))?;
        let result =
            CalibrationResult::from_parts(metadata.form, metadata.family, pillars, failure);
        Ok(Self {
            metadata,
            quotes,
            result,
            survival,
        })
    }

    pub fn to_string_as(&self, format: ResultFormat) -> Result<String> {
        match format {
            ResultFormat::Json => self.to_json(),
            ResultFormat::Csv => self.to_csv(),
        }
    }

    pub fn write(&self, path: &Path, format: ResultFormat) -> Result<()> {
        fs::write(path, self.to_string_as(format)?)?;
        Ok(())
    }

    /// Reads a result file; the format comes from the extension, falling
    /// back to sniffing the first character.
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let format =
            ResultFormat::from_path(path).unwrap_or(if text.trim_start().starts_with('{') {
                ResultFormat::Json
            } else {
                ResultFormat::Csv
            });
        match format {
            ResultFormat::Json => Self::from_json(&text),
            ResultFormat::Csv => Self::from_csv(&text),
        }
    }
}
