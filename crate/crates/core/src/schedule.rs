//! CDS contract schedules: protection/settlement dates, accrual periods and
//! the mapping from quoted tenors to maturity dates.

use std::fmt;
use std::str::FromStr;

use chrono::Months;
use serde::{Deserialize, Serialize};

use crate::daycount::{add_business_days, previous_cds_date, Date, DayCount, RollConvention};
use crate::error::{CdsError, Result};

/// Calendar conventions for building a [`CdsSchedule`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleConfig {
    pub roll: RollConvention,
    /// Day count of the premium accruals.
    pub accrual_day_count: DayCount,
    /// Day count measuring curve time from the valuation date.
    pub curve_day_count: DayCount,
    pub settle_lag_bd: u32,
    pub protection_lag_d: u32,
    pub pay_freq_months: u32,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            roll: RollConvention::quarterly(),
            accrual_day_count: DayCount::Act360,
            curve_day_count: DayCount::Act365F,
            settle_lag_bd: 3,
            protection_lag_d: 1,
            pay_freq_months: 3,
        }
    }
}

/// Dates and accrual fractions of one CDS contract.
///
/// Payment dates coincide with accrual end dates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdsSchedule {
    pub valuation: Date,
    pub protection_effective: Date,
    pub cash_settle: Date,
    pub accrual_starts: Vec<Date>,
    pub accrual_ends: Vec<Date>,
    pub payment_dates: Vec<Date>,
    pub accrual_fractions: Vec<f64>,
    pub maturity: Date,
    pub accrual_day_count: DayCount,
    pub curve_day_count: DayCount,
}

impl CdsSchedule {
    /// Number of coupon periods.
    pub fn len(&self) -> usize {
        self.accrual_ends.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accrual_ends.is_empty()
    }

    /// Curve time (years from valuation) of `d`.
    pub fn time(&self, d: Date) -> f64 {
        self.curve_day_count.fraction(self.valuation, d)
    }

    pub fn maturity_time(&self) -> f64 {
        self.time(self.maturity)
    }

    /// Accrual fraction from `start` to `end` under the premium day count.
    pub fn accrual(&self, start: Date, end: Date) -> f64 {
        self.accrual_day_count.fraction(start, end)
    }

    /// Largest accrual fraction over all coupon periods.
    pub fn max_accrual_fraction(&self) -> f64 {
        self.accrual_fractions.iter().copied().fold(0.0, f64::max)
    }
}

/// Builds the schedule of a contract traded on `valuation` maturing on `maturity`.
pub fn build_schedule(
    valuation: Date,
    maturity: Date,
    config: &ScheduleConfig,
) -> Result<CdsSchedule> {
    if maturity <= valuation {
        return Err(CdsError::invalid(format!(
            "maturity {maturity} must be after valuation date {valuation}"
        )));
    }
    if !matches!(config.pay_freq_months, 3 | 6) {
        return Err(CdsError::invalid(format!(
            "payment frequency must be 3 or 6 months, got {}",
            config.pay_freq_months
        )));
    }
    let protection_effective = valuation + chrono::Days::new(config.protection_lag_d as u64);
    let cash_settle = add_business_days(valuation, config.settle_lag_bd);
    let first_start = previous_cds_date(protection_effective, &config.roll);
    if maturity <= first_start {
        return Err(CdsError::invalid(format!(
            "maturity {maturity} must be after the first accrual start {first_start}"
        )));
    }

    let step = Months::new(config.pay_freq_months);
    let mut accrual_starts = Vec::new();
    let mut accrual_ends = Vec::new();
    let mut start = first_start;
    loop {
        let end = (start + step).min(maturity);
        accrual_starts.push(start);
        accrual_ends.push(end);
        if end == maturity {
            break;
        }
        start = end;
    }
    let accrual_fractions = accrual_starts
        .iter()
        .zip(&accrual_ends)
        .map(|(&s, &e)| config.accrual_day_count.fraction(s, e))
        .collect();

    Ok(CdsSchedule {
        valuation,
        protection_effective,
        cash_settle,
        payment_dates: accrual_ends.clone(),
        accrual_starts,
        accrual_ends,
        accrual_fractions,
        maturity,
        accrual_day_count: config.accrual_day_count,
        curve_day_count: config.curve_day_count,
    })
}

/// A quoted tenor: either a period such as `6M`/`5Y` or an explicit maturity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Tenor {
    Months(u32),
    Date(Date),
}

impl FromStr for Tenor {
    type Err = CdsError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Ok(d) = Date::parse_from_str(t, "%Y-%m-%d") {
            return Ok(Tenor::Date(d));
        }
        let upper = t.to_ascii_uppercase();
        let (num, unit) = upper.split_at(upper.len().saturating_sub(1));
        let n: u32 = num
            .parse()
            .map_err(|_| CdsError::invalid(format!("unparseable tenor '{t}'")))?;
        match unit {
            "M" if n > 0 => Ok(Tenor::Months(n)),
            "Y" if n > 0 => Ok(Tenor::Months(12 * n)),
            _ => Err(CdsError::invalid(format!("unparseable tenor '{t}'"))),
        }
    }
}

impl TryFrom<String> for Tenor {
    type Error = CdsError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Tenor> for String {
    fn from(t: Tenor) -> Self {
        t.to_string()
    }
}

impl fmt::Display for Tenor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tenor::Months(m) if m % 12 == 0 => write!(f, "{}Y", m / 12),
            Tenor::Months(m) => write!(f, "{m}M"),
            Tenor::Date(d) => write!(f, "{d}"),
        }
    }
}

/// How a period tenor is mapped to a maturity date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MaturityRule {
    /// Post-2015 convention: maturities roll semi-annually on 20 March and
    /// 20 September; the maturity is the last roll date on or before the
    /// valuation date plus the tenor plus three months (a 20 June or
    /// 20 December date).
    #[default]
    SemiAnnualRoll,
    /// First quarterly roll date on or after valuation plus tenor.
    NextImm,
}

impl Tenor {
    pub fn maturity(&self, valuation: Date, rule: MaturityRule) -> Date {
        match (*self, rule) {
            (Tenor::Date(d), _) => d,
            (Tenor::Months(m), MaturityRule::SemiAnnualRoll) => {
                let roll = previous_cds_date(valuation, &RollConvention::semi_annual());
                roll + Months::new(m + 3)
            }
            (Tenor::Months(m), MaturityRule::NextImm) => {
                let target = valuation + Months::new(m);
                let q = RollConvention::quarterly();
                let prev = previous_cds_date(target, &q);
                if prev == target {
                    target
                } else {
                    crate::daycount::next_cds_date(target, &q)
                }
            }
        }
    }
}
