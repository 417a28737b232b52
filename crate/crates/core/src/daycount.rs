//! Calendar primitives: day-count year fractions, CDS roll dates and the
//! weekend-only business-day calendar.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, Months, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{CdsError, Result};

/// Proleptic-Gregorian calendar date.
pub type Date = chrono::NaiveDate;

/// Day-count convention used to turn a pair of dates into a year fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DayCount {
    #[serde(rename = "ACT/360")]
    Act360,
    #[serde(rename = "ACT/365F")]
    Act365F,
    /// 30/360 US (bond basis).
    #[serde(rename = "30/360")]
    Thirty360,
}

impl DayCount {
    /// Year fraction between `d1` and `d2` without the ordering check.
    /// Negative when `d2 < d1`.
    pub fn fraction(self, d1: Date, d2: Date) -> f64 {
        match self {
            DayCount::Act360 => (d2 - d1).num_days() as f64 / 360.0,
            DayCount::Act365F => (d2 - d1).num_days() as f64 / 365.0,
            DayCount::Thirty360 => {
                let (y1, m1, mut dd1) = (d1.year(), d1.month() as i64, d1.day() as i64);
                let (y2, m2, mut dd2) = (d2.year(), d2.month() as i64, d2.day() as i64);
                if dd1 == 31 {
                    dd1 = 30;
                }
                if dd2 == 31 && dd1 == 30 {
                    dd2 = 30;
                }
                let days = 360 * (y2 - y1) as i64 + 30 * (m2 - m1) + (dd2 - dd1);
                days as f64 / 360.0
            }
        }
    }
}

impl fmt::Display for DayCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DayCount::Act360 => "ACT/360",
            DayCount::Act365F => "ACT/365F",
            DayCount::Thirty360 => "30/360",
        };
        f.write_str(s)
    }
}

impl FromStr for DayCount {
    type Err = CdsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().replace('_', "/").as_str() {
            "ACT/360" => Ok(DayCount::Act360),
            "ACT/365F" | "ACT/365" => Ok(DayCount::Act365F),
            "30/360" | "THIRTY/360" => Ok(DayCount::Thirty360),
            other => Err(CdsError::invalid(format!("unknown day count '{other}'"))),
        }
    }
}

/// Year fraction from `d1` to `d2` under `conv`.
pub fn year_fraction(d1: Date, d2: Date, conv: DayCount) -> Result<f64> {
    if d1 > d2 {
        return Err(CdsError::DateOrder { start: d1, end: d2 });
    }
    Ok(conv.fraction(d1, d2))
}

/// Months and day-of-month on which standard CDS dates fall.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RollConvention {
    months: Vec<u32>,
    day: u32,
}

impl RollConvention {
    pub fn new(mut months: Vec<u32>, day: u32) -> Result<Self> {
        months.sort_unstable();
        months.dedup();
        if months.is_empty() || months.iter().any(|m| !(1..=12).contains(m)) {
            return Err(CdsError::invalid(format!(
                "roll months must be in 1..=12, got {months:?}"
            )));
        }
        if !(1..=28).contains(&day) {
            return Err(CdsError::invalid(format!(
                "roll day must be in 1..=28, got {day}"
            )));
        }
        Ok(Self { months, day })
    }

    /// March, June, September, December on the 20th.
    pub fn quarterly() -> Self {
        Self {
            months: vec![3, 6, 9, 12],
            day: 20,
        }
    }

    /// March and September on the 20th (post-2015 index roll).
    pub fn semi_annual() -> Self {
        Self {
            months: vec![3, 9],
            day: 20,
        }
    }

    pub fn months(&self) -> &[u32] {
        &self.months
    }

    pub fn day(&self) -> u32 {
        self.day
    }

    fn is_roll_month(&self, month: u32) -> bool {
        self.months.contains(&month)
    }
}

impl Default for RollConvention {
    fn default() -> Self {
        Self::quarterly()
    }
}

/// Latest roll date on or before `d`.
pub fn previous_cds_date(d: Date, roll: &RollConvention) -> Date {
    let mut first_of_month = d.with_day(1).expect("day 1 always valid");
    if roll.is_roll_month(d.month()) && d.day() >= roll.day {
        return first_of_month.with_day(roll.day).expect("roll day <= 28");
    }
    loop {
        first_of_month = first_of_month - Months::new(1);
        if roll.is_roll_month(first_of_month.month()) {
            return first_of_month.with_day(roll.day).expect("roll day <= 28");
        }
    }
}

/// Earliest roll date strictly after `d`.
pub fn next_cds_date(d: Date, roll: &RollConvention) -> Date {
    let mut first_of_month = d.with_day(1).expect("day 1 always valid");
    if roll.is_roll_month(d.month()) && d.day() < roll.day {
        return first_of_month.with_day(roll.day).expect("roll day <= 28");
    }
    loop {
        first_of_month = first_of_month + Months::new(1);
        if roll.is_roll_month(first_of_month.month()) {
            return first_of_month.with_day(roll.day).expect("roll day <= 28");
        }
    }
}

pub fn is_business_day(d: Date) -> bool {
    !matches!(d.weekday(), Weekday::Sat | Weekday::Sun)
}

/// Adds `n` business days under a weekend-only calendar.
pub fn add_business_days(d: Date, n: u32) -> Date {
    let mut out = d;
    let mut left = n;
    while left > 0 {
        out = out.succ_opt().expect("date in range");
        if is_business_day(out) {
            left -= 1;
        }
    }
    out
}
