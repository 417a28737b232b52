//! Risk-neutral CDS leg valuation on a default-time grid.
//!
//! The default time is discretised into cells `(d_{i-1}, d_i]` from the
//! valuation date to maturity plus a survival cell `{τ > e_N}`. The same
//! representative point per cell is used by the leg PVs and by the deferred
//! payoffs, so the undistorted Choquet price of a contract reproduces its PV
//! to rounding.

use chrono::Days;
use serde::{Deserialize, Serialize};

use crate::curves::{DiscountCurve, HazardCurve};
use crate::daycount::Date;
use crate::error::{CdsError, Result};
use crate::schedule::CdsSchedule;

/// Point of a grid cell at which a default is assumed to happen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepresentativePoint {
    #[default]
    RightEndpoint,
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridConfig {
    pub step_days: u32,
    pub point: RepresentativePoint,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            step_days: 1,
            point: RepresentativePoint::RightEndpoint,
        }
    }
}

impl GridConfig {
    pub fn with_step_days(step_days: u32) -> Self {
        Self {
            step_days,
            ..Self::default()
        }
    }
}

/// Default-time partition for one contract.
///
/// Nodes are the valuation date, every `step_days`-th calendar day, the
/// protection start and all accrual end dates, so no cell straddles a
/// coupon date or the start of protection.
#[derive(Debug, Clone, PartialEq)]
pub struct DefaultGrid {
    valuation: Date,
    maturity: Date,
    dates: Vec<Date>,
    times: Vec<f64>,
    rep_times: Vec<f64>,
    /// Coupon period containing each cell (`None` before the first accrual start).
    periods: Vec<Option<usize>>,
    /// Accrual `Δ(s_k, rep)` per cell.
    accruals: Vec<f64>,
    protected: Vec<bool>,
}

impl DefaultGrid {
    pub fn new(schedule: &CdsSchedule, config: &GridConfig) -> Result<Self> {
        if config.step_days == 0 {
            return Err(CdsError::invalid("grid step must be at least one day"));
        }
        let valuation = schedule.valuation;
        let maturity = schedule.maturity;
        let mut dates = Vec::new();
        let mut d = valuation;
        while d < maturity {
            dates.push(d);
            d = d + Days::new(config.step_days as u64);
        }
        dates.push(maturity);
        dates.push(schedule.protection_effective);
        dates.extend(schedule.accrual_ends.iter().copied());
        dates.retain(|&x| x >= valuation && x <= maturity);
        dates.sort_unstable();
        dates.dedup();

        let times: Vec<f64> = dates.iter().map(|&x| schedule.time(x)).collect();
        let cells = dates.len() - 1;
        let mut rep_times = Vec::with_capacity(cells);
        let mut periods = Vec::with_capacity(cells);
        let mut accruals = Vec::with_capacity(cells);
        let mut protected = Vec::with_capacity(cells);
        let mut k = 0;
        for i in 1..dates.len() {
            let (left, right) = (dates[i - 1], dates[i]);
            while schedule.accrual_ends[k] < right {
                k += 1;
            }
            let period = (schedule.accrual_starts[k] <= left).then_some(k);
            let accrual = match period {
                None => 0.0,
                Some(k) => {
                    let start = schedule.accrual_starts[k];
                    match config.point {
                        RepresentativePoint::RightEndpoint => schedule.accrual(start, right),
                        RepresentativePoint::Midpoint => {
                            0.5 * (schedule.accrual(start, left) + schedule.accrual(start, right))
                        }
                    }
                }
            };
            rep_times.push(match config.point {
                RepresentativePoint::RightEndpoint => times[i],
                RepresentativePoint::Midpoint => 0.5 * (times[i - 1] + times[i]),
            });
            periods.push(period);
            accruals.push(accrual);
            protected.push(left >= schedule.protection_effective);
        }

        Ok(Self {
            valuation,
            maturity,
            dates,
            times,
            rep_times,
            periods,
            accruals,
            protected,
        })
    }

    /// Number of default cells `M` (the survival cell excluded).
    pub fn cells(&self) -> usize {
        self.rep_times.len()
    }

    /// Grid dates `d_0 = valuation, …, d_M = maturity`.
    pub fn dates(&self) -> &[Date] {
        &self.dates
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn maturity(&self) -> Date {
        self.maturity
    }

    /// `Q(A_1), …, Q(A_M), Q(τ > e_N)`; sums to one.
    pub fn cell_probabilities(&self, h: &HazardCurve) -> Vec<f64> {
        let mut probs = Vec::with_capacity(self.cells() + 1);
        let mut integral_prev = 0.0;
        let mut survival_prev = 1.0;
        for &t in &self.times[1..] {
            let integral = h.integral_at(t);
            probs.push(-survival_prev * (integral_prev - integral).exp_m1());
            survival_prev = (-integral).exp();
            integral_prev = integral;
        }
        probs.push(survival_prev);
        probs
    }

    fn matches(&self, schedule: &CdsSchedule) -> bool {
        self.valuation == schedule.valuation && self.maturity == schedule.maturity
    }
}

/// A standard CDS on unit notional.
#[derive(Debug, Clone, PartialEq)]
pub struct CdsContract {
    schedule: CdsSchedule,
    coupon: f64,
    lgd: f64,
    grid: DefaultGrid,
}

impl CdsContract {
    pub fn new(schedule: CdsSchedule, coupon: f64, lgd: f64) -> Result<Self> {
        Self::with_grid(schedule, coupon, lgd, &GridConfig::default())
    }

    pub fn with_grid(
        schedule: CdsSchedule,
        coupon: f64,
        lgd: f64,
        grid: &GridConfig,
    ) -> Result<Self> {
        if !(coupon >= 0.0 && coupon.is_finite()) {
            return Err(CdsError::invalid(format!(
                "coupon must be non-negative, got {coupon}"
            )));
        }
        if !(0.0..=1.0).contains(&lgd) {
            return Err(CdsError::invalid(format!(
                "loss given default must lie in [0, 1], got {lgd}"
            )));
        }
        let grid = DefaultGrid::new(&schedule, grid)?;
        Ok(Self {
            schedule,
            coupon,
            lgd,
            grid,
        })
    }

    pub fn schedule(&self) -> &CdsSchedule {
        &self.schedule
    }

    pub fn coupon(&self) -> f64 {
        self.coupon
    }

    pub fn lgd(&self) -> f64 {
        self.lgd
    }

    pub fn grid(&self) -> &DefaultGrid {
        &self.grid
    }

    pub fn maturity_time(&self) -> f64 {
        self.schedule.maturity_time()
    }

    /// `Σ_j Δ_j·DF(t_j)·PS(e_j)`, the survival-weighted coupon annuity.
    fn coupon_annuity(&self, disc: &DiscountCurve, h: &HazardCurve) -> f64 {
        let s = &self.schedule;
        s.payment_dates
            .iter()
            .zip(&s.accrual_ends)
            .zip(&s.accrual_fractions)
            .map(|((&pay, &end), &frac)| {
                disc.df_at(s.time(pay)) * frac * h.survival_at(s.time(end))
            })
            .sum()
    }
}

/// Which cashflows a [`DeferredPayoff`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Leg {
    Protection,
    Premium,
    /// Protection minus premium.
    Net,
}

/// Per-cell value of a contract's cashflows, all deferred to maturity.
///
/// `values[i]` for `i < M` is the value if default happens in cell `i`;
/// `values[M]` is the survival-cell value. Premium values are magnitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct DeferredPayoff {
    pub leg: Leg,
    pub values: Vec<f64>,
}

impl DeferredPayoff {
    pub fn new(leg: Leg, values: Vec<f64>) -> Self {
        Self { leg, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `Σ x_i·q_i`.
    pub fn expectation(&self, probs: &[f64]) -> f64 {
        self.values.iter().zip(probs).map(|(x, q)| x * q).sum()
    }
}

/// `lgd · E[DF(τ)·1{t_p ≤ τ ≤ e_N}]`.
pub fn pv_protection(c: &CdsContract, disc: &DiscountCurve, h: &HazardCurve) -> f64 {
    let probs = c.grid.cell_probabilities(h);
    protection_on_grid(c, disc, &probs)
}

fn protection_on_grid(c: &CdsContract, disc: &DiscountCurve, probs: &[f64]) -> f64 {
    let g = &c.grid;
    let sum: f64 = (0..g.cells())
        .filter(|&i| g.protected[i])
        .map(|i| disc.df_at(g.rep_times[i]) * probs[i])
        .sum();
    c.lgd * sum
}

/// Coupon leg plus accrual paid on default.
pub fn pv_premium(c: &CdsContract, disc: &DiscountCurve, h: &HazardCurve) -> f64 {
    let probs = c.grid.cell_probabilities(h);
    premium_on_grid(c, disc, h, &probs)
}

fn premium_on_grid(c: &CdsContract, disc: &DiscountCurve, h: &HazardCurve, probs: &[f64]) -> f64 {
    let g = &c.grid;
    let accrued_on_default: f64 = (0..g.cells())
        .map(|i| g.accruals[i] * disc.df_at(g.rep_times[i]) * probs[i])
        .sum();
    c.coupon * (c.coupon_annuity(disc, h) + accrued_on_default)
}

/// Protection-buyer PV: protection leg minus premium leg.
pub fn pv_cds(c: &CdsContract, disc: &DiscountCurve, h: &HazardCurve) -> f64 {
    let probs = c.grid.cell_probabilities(h);
    protection_on_grid(c, disc, &probs) - premium_on_grid(c, disc, h, &probs)
}

/// `DF(t_s)·C·Δ(s_1, t_p)`.
pub fn accrued_amount(c: &CdsContract, disc: &DiscountCurve) -> f64 {
    let s = &c.schedule;
    let df_settle = disc.df_at(s.time(s.cash_settle));
    df_settle * c.coupon * s.accrual(s.accrual_starts[0], s.protection_effective)
}

/// Cell values of `leg`, with each cashflow moved to maturity by `DF(t)/DF(e_N)`.
pub fn deferred_payoff(
    c: &CdsContract,
    disc: &DiscountCurve,
    grid: &DefaultGrid,
    leg: Leg,
) -> Result<DeferredPayoff> {
    if !grid.matches(&c.schedule) {
        return Err(CdsError::invalid(format!(
            "grid {}..{} does not match contract {}..{}",
            grid.valuation, grid.maturity, c.schedule.valuation, c.schedule.maturity
        )));
    }
    let s = &c.schedule;
    let df_mat = disc.df_at(s.maturity_time());
    let cells = grid.cells();

    let prot = || {
        let mut v: Vec<f64> = (0..cells)
            .map(|i| {
                if grid.protected[i] {
                    c.lgd * disc.df_at(grid.rep_times[i]) / df_mat
                } else {
                    0.0
                }
            })
            .collect();
        v.push(0.0);
        v
    };

    let prem = || {
        // completed[k] = Σ_{j<k} Δ_j·DF(t_j)
        let mut completed = Vec::with_capacity(s.len() + 1);
        let mut acc = 0.0;
        completed.push(acc);
        for (&pay, &frac) in s.payment_dates.iter().zip(&s.accrual_fractions) {
            acc += frac * disc.df_at(s.time(pay));
            completed.push(acc);
        }
        let mut v: Vec<f64> = (0..cells)
            .map(|i| match grid.periods[i] {
                None => 0.0,
                Some(k) => {
                    c.coupon * (completed[k] + grid.accruals[i] * disc.df_at(grid.rep_times[i]))
                        / df_mat
                }
            })
            .collect();
        v.push(c.coupon * completed[s.len()] / df_mat);
        v
    };

    let values = match leg {
        Leg::Protection => prot(),
        Leg::Premium => prem(),
        Leg::Net => prot().into_iter().zip(prem()).map(|(a, b)| a - b).collect(),
    };
    Ok(DeferredPayoff::new(leg, values))
}

/// `lgd > C · max_j Δ_j`: the regime in which the contract PV increases in
/// every hazard pillar it depends on.
pub fn check_monotonicity_condition(c: &CdsContract) -> bool {
    c.lgd > c.coupon * c.schedule.max_accrual_fraction()
}
