//! Hazard-curve bootstrap from mid quotes and joint hazard/liquidity
//! calibration from bid and ask quotes.
//!
//! For pillar `i` with earlier pillars fixed, the quote targets are
//!
//! ```text
//! b = DF(t_s)·UF_bid − Acc        a = DF(t_s)·UF_ask − Acc
//! ```
//!
//! and the pair `(λ_i, γ_i)` solves `bid(λ, γ) = b`, `ask(λ, γ) = a`. The
//! bracket `[λ_b, λ_a]` comes from `PV(λ_b) = b`, `PV(λ_a) = a`; on it
//! `γ(λ)` matches the spread `a − b` and the outer equation
//! `F(λ) = ask(λ, γ(λ)) − a` is solved by bracketing.

use log::{debug, info};
use serde::{Deserialize, Serialize};

use crate::choquet::{BidAskEngine, LegTails};
use crate::curves::{CurveForm, DiscountCurve, HazardCurve, LAMBDA_MAX, LAMBDA_MIN};
use crate::daycount::Date;
use crate::distortion::{Distortion, DistortionFamily, GAMMA_MAX};
use crate::error::{CdsError, Result};
use crate::pricer::{
    accrued_amount, check_monotonicity_condition, pv_cds, CdsContract, GridConfig,
};
use crate::schedule::{build_schedule, ScheduleConfig, Tenor};
use crate::solver::{find_root, find_root_bracketed, SolverConfig};

/// One tenor's upfront quotes and contract terms.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketQuote {
    pub tenor: Tenor,
    pub maturity: Date,
    pub uf_bid: f64,
    pub uf_ask: f64,
    pub coupon: f64,
    pub recovery: f64,
}

impl MarketQuote {
    pub fn new(
        tenor: Tenor,
        maturity: Date,
        uf_bid: f64,
        uf_ask: f64,
        coupon: f64,
        recovery: f64,
    ) -> Result<Self> {
        if !(uf_bid.is_finite() && uf_ask.is_finite()) {
            return Err(CdsError::invalid(format!("non-finite upfront for {tenor}")));
        }
        if !(coupon >= 0.0 && coupon.is_finite()) {
            return Err(CdsError::invalid(format!(
                "coupon must be >= 0, got {coupon}"
            )));
        }
        if !(0.0..1.0).contains(&recovery) {
            return Err(CdsError::invalid(format!(
                "recovery must lie in [0, 1), got {recovery}"
            )));
        }
        Ok(Self {
            tenor,
            maturity,
            uf_bid,
            uf_ask,
            coupon,
            recovery,
        })
    }

    pub fn lgd(&self) -> f64 {
        1.0 - self.recovery
    }

    pub fn uf_mid(&self) -> f64 {
        0.5 * (self.uf_bid + self.uf_ask)
    }
}

/// Numerical controls shared by both calibration modes.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationConfig {
    pub schedule: ScheduleConfig,
    pub grid: GridConfig,
    pub form: CurveForm,
    pub family: DistortionFamily,
    pub solver: SolverConfig,
    pub gamma_max: f64,
    /// Hold γ at this value and match the mid quote instead of solving for γ.
    pub forced_gamma: Option<f64>,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            schedule: ScheduleConfig::default(),
            grid: GridConfig::default(),
            form: CurveForm::default(),
            family: DistortionFamily::default(),
            solver: SolverConfig::default(),
            gamma_max: GAMMA_MAX,
            forced_gamma: None,
        }
    }
}

impl CalibrationConfig {
    /// Tighter settings for the γ solve nested inside the outer λ solve, so
    /// the outer function is smooth at the outer tolerance.
    fn inner_solver(&self) -> SolverConfig {
        SolverConfig {
            f_tol: self.solver.f_tol * 1e-2,
            x_tol: self.solver.x_tol * 1e-3,
            max_iter: self.solver.max_iter,
        }
    }
}

/// Solved state of one pillar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PillarResult {
    pub tenor: String,
    pub maturity: Date,
    /// Maturity in curve years.
    pub time: f64,
    pub lambda: f64,
    pub gamma: f64,
    /// `bid(λ, γ) − b`.
    pub residual_bid: f64,
    /// `ask(λ, γ) − a`.
    pub residual_ask: f64,
    /// `(λ_b, λ_a)`.
    pub bracket: (f64, f64),
    pub pv: f64,
    pub bid: f64,
    pub ask: f64,
    pub target_bid: f64,
    pub target_ask: f64,
}

/// γ term structure, linear between pillar maturities and flat outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiquidityCurve {
    pub times: Vec<f64>,
    pub gammas: Vec<f64>,
}

impl LiquidityCurve {
    pub fn gamma(&self, t: f64) -> f64 {
        let (ts, gs) = (&self.times, &self.gammas);
        match ts.len() {
            0 => 0.0,
            _ if t <= ts[0] => gs[0],
            n if t >= ts[n - 1] => gs[n - 1],
            _ => {
                let k = ts.partition_point(|&x| x <= t);
                let w = (t - ts[k - 1]) / (ts[k] - ts[k - 1]);
                gs[k - 1] + w * (gs[k] - gs[k - 1])
            }
        }
    }
}

/// Why calibration stopped before the last pillar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    Assumption1,
    Assumption2,
    NonMonotone,
    Solver,
    Data,
}

impl FailureKind {
    pub fn of(e: &CdsError) -> Self {
        match e {
            CdsError::Assumption1 { .. } => FailureKind::Assumption1,
            CdsError::Assumption2 { .. } => FailureKind::Assumption2,
            CdsError::NonMonotone { .. } => FailureKind::NonMonotone,
            e if e.is_solver_failure() => FailureKind::Solver,
            _ => FailureKind::Data,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationFailure {
    /// 1-based pillar index.
    pub pillar: usize,
    pub tenor: String,
    pub kind: FailureKind,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub form: CurveForm,
    pub family: DistortionFamily,
    pub pillars: Vec<PillarResult>,
    pub liquidity: LiquidityCurve,
    pub failure: Option<CalibrationFailure>,
}

impl CalibrationResult {
    /// Assembles a result; the liquidity curve is derived from the pillars.
    pub fn from_parts(
        form: CurveForm,
        family: DistortionFamily,
        pillars: Vec<PillarResult>,
        failure: Option<CalibrationFailure>,
    ) -> Self {
        let liquidity = LiquidityCurve {
            times: pillars.iter().map(|p| p.time).collect(),
            gammas: pillars.iter().map(|p| p.gamma).collect(),
        };
        Self {
            form,
            family,
            pillars,
            liquidity,
            failure,
        }
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.pillars.iter().map(|p| p.lambda).collect()
    }

    pub fn gammas(&self) -> Vec<f64> {
        self.pillars.iter().map(|p| p.gamma).collect()
    }

    /// Hazard curve through the calibrated pillars.
    pub fn hazard_curve(&self) -> Result<HazardCurve> {
        HazardCurve::new(
            self.pillars.iter().map(|p| p.time).collect(),
            self.lambdas(),
            self.form,
        )
    }

    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }
}

/// Curve seen by pillar `i` while it is solved. When later pillars follow,
/// a piecewise-linear segment ending at this pillar is already linear, as
/// in the final curve; a trailing copy of the knot keeps the tail flat.
fn pillar_curve(
    knots: &[f64],
    fixed: &[f64],
    lambda: f64,
    form: CurveForm,
    interior: bool,
) -> Result<HazardCurve> {
    let mut ks = knots.to_vec();
    let mut ls = fixed.to_vec();
    ls.push(lambda);
    if interior && form == CurveForm::PiecewiseLinear {
        ks.push(knots[knots.len() - 1] + 1.0);
        ls.push(lambda);
    }
    HazardCurve::new(ks, ls, form)
}

fn check_quote_order(quotes: &[MarketQuote], valuation: Date) -> Result<()> {
    if quotes.is_empty() {
        return Err(CdsError::invalid("no quotes"));
    }
    if quotes[0].maturity <= valuation {
        return Err(CdsError::invalid(format!(
            "maturity {} is not after valuation {valuation}",
            quotes[0].maturity
        )));
    }
    for w in quotes.windows(2) {
        if w[1].maturity <= w[0].maturity {
            return Err(CdsError::invalid(format!(
                "maturities must be strictly increasing: {} ({}) follows {} ({})",
                w[1].tenor, w[1].maturity, w[0].tenor, w[0].maturity
            )));
        }
    }
    Ok(())
}

/// Everything needed to price pillar `i` as a function of its own `λ`.
#[derive(Debug, Clone)]
pub struct PillarContext {
    /// 1-based
    pillar: usize,
    tenor: String,
    maturity: Date,
    contract: CdsContract,
    engine: BidAskEngine,
    knots: Vec<f64>,
    fixed: Vec<f64>,
    form: CurveForm,
    interior: bool,
    family: DistortionFamily,
    gamma_max: f64,
    solver: SolverConfig,
    inner: SolverConfig,
    target_bid: f64,
    target_ask: f64,
    df_settle: f64,
    accrued: f64,
}

impl PillarContext {
    /// `fixed` holds the already calibrated `λ_1..λ_{i−1}` at `knots[..i−1]`.
    pub fn new(
        valuation: Date,
        quote: &MarketQuote,
        disc: &DiscountCurve,
        knots: &[f64],
        fixed: &[f64],
        cfg: &CalibrationConfig,
    ) -> Result<Self> {
        let schedule = build_schedule(valuation, quote.maturity, &cfg.schedule)?;
        let t = schedule.maturity_time();
        if let Some(&last) = knots.last() {
            if t <= last {
                return Err(CdsError::invalid(format!(
                    "pillar {} maturity is not after the previous one",
                    quote.tenor
                )));
            }
        }
        if knots.len() != fixed.len() {
            return Err(CdsError::invalid("knot and lambda counts differ"));
        }
        let contract = CdsContract::with_grid(schedule, quote.coupon, quote.lgd(), &cfg.grid)?;
        let engine = BidAskEngine::new(&contract, disc)?;
        let s = contract.schedule();
        let df_settle = disc.df(s.time(s.cash_settle))?;
        let accrued = accrued_amount(&contract, disc);
        let mut all_knots = knots.to_vec();
        all_knots.push(t);
        Ok(Self {
            pillar: knots.len() + 1,
            tenor: quote.tenor.to_string(),
            maturity: quote.maturity,
            engine,
            knots: all_knots,
            fixed: fixed.to_vec(),
            form: cfg.form,
            interior: false,
            family: cfg.family,
            gamma_max: cfg.gamma_max,
            solver: cfg.solver,
            inner: cfg.inner_solver(),
            target_bid: df_settle * quote.uf_bid - accrued,
            target_ask: df_settle * quote.uf_ask - accrued,
            df_settle,
            accrued,
            contract,
        })
    }

    /// Marks the pillar as followed by later ones (matters for the
    /// piecewise-linear form only).
    pub fn with_later_pillars(mut self, later: bool) -> Self {
        self.interior = later;
        self
    }

    pub fn pillar(&self) -> usize {
        self.pillar
    }

    pub fn contract(&self) -> &CdsContract {
        &self.contract
    }

    /// `(b, a)`.
    pub fn targets(&self) -> (f64, f64) {
        (self.target_bid, self.target_ask)
    }

    pub fn accrued(&self) -> f64 {
        self.accrued
    }

    pub fn df_settle(&self) -> f64 {
        self.df_settle
    }

    /// Hazard curve with the earlier pillars and `λ` at this one.
    pub fn curve(&self, lambda: f64) -> Result<HazardCurve> {
        pillar_curve(&self.knots, &self.fixed, lambda, self.form, self.interior)
    }

    pub fn tails(&self, lambda: f64) -> Result<LegTails> {
        let h = self.curve(lambda)?;
        Ok(self
            .engine
            .tails(&self.contract.grid().cell_probabilities(&h)))
    }

    pub fn pv(&self, lambda: f64) -> Result<f64> {
        Ok(self.tails(lambda)?.pv())
    }

    fn distortion(&self, gamma: f64) -> Result<Distortion> {
        Distortion::new(self.family, gamma)
    }

    /// `(bid, ask)` at `(λ, γ)`.
    pub fn bid_ask(&self, lambda: f64, gamma: f64) -> Result<(f64, f64)> {
        let t = self.tails(lambda)?;
        Ok(self.engine.bid_ask(&t, &self.distortion(gamma)?))
    }

    fn assumption1(&self, lo: f64, hi: f64) -> CdsError {
        CdsError::Assumption1 {
            pillar: self.pillar,
            pv_inf: lo,
            pv_sup: hi,
            bid: self.target_bid,
            ask: self.target_ask,
        }
    }

    /// Solves `PV(λ) = target` over the hazard clamp.
    fn solve_pv(&self, target: f64, pv_lo: f64, pv_hi: f64) -> Result<f64> {
        if !(pv_lo <= target && target <= pv_hi) {
            return Err(self.assumption1(pv_lo, pv_hi));
        }
        let root = find_root_bracketed(
            |l| Ok(self.pv(l)? - target),
            (LAMBDA_MIN, pv_lo - target),
            (LAMBDA_MAX, pv_hi - target),
            &self.solver,
        )?;
        Ok(root.x)
    }

    /// `(λ_b, λ_a)` with `PV(λ_b) = b` and `PV(λ_a) = a`.
    pub fn bracket_lambda(&self) -> Result<(f64, f64)> {
        if !check_monotonicity_condition(&self.contract) {
            return Err(CdsError::NonMonotone {
                pillar: self.pillar,
                lambda: LAMBDA_MIN,
            });
        }
        let pv_lo = self.pv(LAMBDA_MIN)?;
        let pv_hi = self.pv(LAMBDA_MAX)?;
        if !(pv_lo < self.target_bid && self.target_ask < pv_hi) {
            return Err(self.assumption1(pv_lo, pv_hi));
        }
        let lambda_b = self.solve_pv(self.target_bid, pv_lo, pv_hi)?;
        let lambda_a = if self.target_ask == self.target_bid {
            lambda_b
        } else {
            self.solve_pv(self.target_ask, pv_lo, pv_hi)?
        };
        if lambda_b > lambda_a {
            return Err(CdsError::NonMonotone {
                pillar: self.pillar,
                lambda: lambda_b,
            });
        }
        Ok((lambda_b, lambda_a))
    }

    fn gamma_for_tails(&self, tails: &LegTails, lambda: f64, target: f64) -> Result<f64> {
        if target <= 0.0 {
            return Ok(0.0);
        }
        let spread = |g: f64| -> Result<f64> {
            Ok(self.engine.spread(tails, &self.distortion(g)?) - target)
        };
        let f_hi = spread(self.gamma_max)?;
        if f_hi < 0.0 {
            return Err(CdsError::Assumption2 {
                pillar: self.pillar,
                lambda,
                target,
                max_spread: f_hi + target,
                gamma_max: self.gamma_max,
            });
        }
        let root =
            find_root_bracketed(spread, (0.0, -target), (self.gamma_max, f_hi), &self.inner)?;
        Ok(root.x)
    }

    /// Unique `γ ≥ 0` with `ask(λ, γ) − bid(λ, γ) = target`.
    pub fn solve_gamma_for_spread(&self, lambda: f64, target: f64) -> Result<f64> {
        let tails = self.tails(lambda)?;
        self.gamma_for_tails(&tails, lambda, target)
    }

    /// `F(λ) = ask(λ, γ(λ)) − a` together with `γ(λ)`.
    pub fn outer(&self, lambda: f64) -> Result<(f64, f64)> {
        let tails = self.tails(lambda)?;
        let gamma = self.gamma_for_tails(&tails, lambda, self.target_ask - self.target_bid)?;
        let ask = self.engine.ask(&tails, &self.distortion(gamma)?);
        Ok((ask - self.target_ask, gamma))
    }

    fn finish(&self, lambda: f64, gamma: f64, bracket: (f64, f64)) -> Result<PillarResult> {
        let tails = self.tails(lambda)?;
        let (bid, ask) = self.engine.bid_ask(&tails, &self.distortion(gamma)?);
        Ok(PillarResult {
            tenor: self.tenor.clone(),
            maturity: self.maturity,
            time: *self.knots.last().expect("at least one knot"),
            lambda,
            gamma,
            residual_bid: bid - self.target_bid,
            residual_ask: ask - self.target_ask,
            bracket,
            pv: tails.pv(),
            bid,
            ask,
            target_bid: self.target_bid,
            target_ask: self.target_ask,
        })
    }

    /// Joint `(λ, γ)` solve for this pillar.
    pub fn calibrate(&self) -> Result<PillarResult> {
        let (b, a) = (self.target_bid, self.target_ask);
        if b > a {
            return Err(CdsError::invalid(format!(
                "pillar {}: bid upfront above ask upfront",
                self.tenor
            )));
        }
        let bracket = self.bracket_lambda()?;
        if a == b {
            // any γ > 0 opens a strictly positive spread
            let tails = self.tails(bracket.0)?;
            return Err(CdsError::Assumption2 {
                pillar: self.pillar,
                lambda: bracket.0,
                target: 0.0,
                max_spread: self
                    .engine
                    .spread(&tails, &self.distortion(self.gamma_max)?),
                gamma_max: self.gamma_max,
            });
        }
        let (lambda_b, lambda_a) = bracket;
        let (f_lo, _) = self.outer(lambda_b)?;
        let (f_hi, _) = self.outer(lambda_a)?;
        debug!(
            "pillar {}: bracket [{lambda_b:e}, {lambda_a:e}], F = ({f_lo:e}, {f_hi:e})",
            self.pillar
        );
        if !(f_lo < 0.0 && f_hi > 0.0) {
            return Err(CdsError::SignCondition {
                pillar: self.pillar,
                f_low: f_lo,
                f_high: f_hi,
            });
        }
        let root = find_root_bracketed(
            |l| Ok(self.outer(l)?.0),
            (lambda_b, f_lo),
            (lambda_a, f_hi),
            &self.solver,
        )?;
        let (_, gamma) = self.outer(root.x)?;
        let result = self.finish(root.x, gamma, bracket)?;
        if !(b < result.pv && result.pv < a) {
            return Err(CdsError::ConstraintViolated {
                pillar: self.pillar,
                bid: b,
                pv: result.pv,
                ask: a,
            });
        }
        Ok(result)
    }

    /// Solve `λ` with `γ` held fixed, matching the mid of the targets.
    pub fn calibrate_fixed_gamma(&self, gamma: f64) -> Result<PillarResult> {
        if !check_monotonicity_condition(&self.contract) {
            return Err(CdsError::NonMonotone {
                pillar: self.pillar,
                lambda: LAMBDA_MIN,
            });
        }
        let d = self.distortion(gamma)?;
        let target = 0.5 * (self.target_bid + self.target_ask);
        let mid = |l: f64| -> Result<f64> {
            let t = self.tails(l)?;
            let (bid, ask) = self.engine.bid_ask(&t, &d);
            Ok(0.5 * (bid + ask) - target)
        };
        let f_lo = mid(LAMBDA_MIN)?;
        let f_hi = mid(LAMBDA_MAX)?;
        if !(f_lo <= 0.0 && f_hi >= 0.0) {
            return Err(self.assumption1(f_lo + target, f_hi + target));
        }
        let root = find_root_bracketed(mid, (LAMBDA_MIN, f_lo), (LAMBDA_MAX, f_hi), &self.solver)?;
        self.finish(root.x, gamma, (root.x, root.x))
    }
}

/// Free-function form of [`PillarContext::bracket_lambda`].
pub fn bracket_lambda(ctx: &PillarContext) -> Result<(f64, f64)> {
    ctx.bracket_lambda()
}

/// Free-function form of [`PillarContext::solve_gamma_for_spread`].
pub fn solve_gamma_for_spread(ctx: &PillarContext, lambda: f64, target_spread: f64) -> Result<f64> {
    ctx.solve_gamma_for_spread(lambda, target_spread)
}

/// Free-function form of [`PillarContext::calibrate`].
pub fn calibrate_pillar(ctx: &PillarContext) -> Result<PillarResult> {
    ctx.calibrate()
}

/// Sequential two-price calibration. Pillar failures stop the loop and are
/// reported in [`CalibrationResult::failure`] alongside the pillars solved
/// so far; invalid input is an error.
pub fn calibrate_bid_ask(
    valuation: Date,
    quotes: &[MarketQuote],
    disc: &DiscountCurve,
    cfg: &CalibrationConfig,
) -> Result<CalibrationResult> {
    check_quote_order(quotes, valuation)?;
    for q in quotes {
        if q.uf_bid > q.uf_ask {
            return Err(CdsError::invalid(format!(
                "{}: bid upfront {} above ask {}",
                q.tenor, q.uf_bid, q.uf_ask
            )));
        }
    }
    let mut knots = Vec::new();
    let mut lambdas = Vec::new();
    let mut pillars = Vec::new();
    for (i, q) in quotes.iter().enumerate() {
        let later = i + 1 < quotes.len();
        let ctx = PillarContext::new(valuation, q, disc, &knots, &lambdas, cfg)
            .map(|c| c.with_later_pillars(later));
        let solved = ctx.and_then(|ctx| match cfg.forced_gamma {
            Some(g) => ctx.calibrate_fixed_gamma(g),
            None => ctx.calibrate(),
        });
        match solved {
            Ok(p) => {
                info!(
                    "pillar {} ({}): lambda {:.10e}, gamma {:.10e}",
                    pillars.len() + 1,
                    p.tenor,
                    p.lambda,
                    p.gamma
                );
                knots.push(p.time);
                lambdas.push(p.lambda);
                pillars.push(p);
            }
            Err(e) => {
                let failure = CalibrationFailure {
                    pillar: pillars.len() + 1,
                    tenor: q.tenor.to_string(),
                    kind: FailureKind::of(&e),
                    message: e.to_string(),
                };
                return Ok(CalibrationResult::from_parts(
                    cfg.form,
                    cfg.family,
                    pillars,
                    Some(failure),
                ));
            }
        }
    }
    Ok(CalibrationResult::from_parts(
        cfg.form, cfg.family, pillars, None,
    ))
}

/// One-price bootstrap: `PV_i(λ_i) + Acc = DF(t_s)·UF_mid` pillar by pillar.
pub fn bootstrap_mid(
    valuation: Date,
    quotes: &[MarketQuote],
    disc: &DiscountCurve,
    cfg: &CalibrationConfig,
) -> Result<HazardCurve> {
    let pillars = bootstrap_mid_pillars(valuation, quotes, disc, cfg)?;
    HazardCurve::new(
        pillars.iter().map(|p| p.time).collect(),
        pillars.iter().map(|p| p.lambda).collect(),
        cfg.form,
    )
}

/// As [`bootstrap_mid`], keeping per-pillar diagnostics (`γ = 0`).
pub fn bootstrap_mid_pillars(
    valuation: Date,
    quotes: &[MarketQuote],
    disc: &DiscountCurve,
    cfg: &CalibrationConfig,
) -> Result<Vec<PillarResult>> {
    check_quote_order(quotes, valuation)?;
    let mut knots: Vec<f64> = Vec::new();
    let mut lambdas: Vec<f64> = Vec::new();
    let mut out = Vec::new();
    for (i, q) in quotes.iter().enumerate() {
        let pillar = i + 1;
        let schedule = build_schedule(valuation, q.maturity, &cfg.schedule)?;
        let t = schedule.maturity_time();
        let contract = CdsContract::with_grid(schedule, q.coupon, q.lgd(), &cfg.grid)?;
        if !check_monotonicity_condition(&contract) {
            return Err(CdsError::NonMonotone {
                pillar,
                lambda: LAMBDA_MIN,
            });
        }
        let s = contract.schedule();
        let df_settle = disc.df(s.time(s.cash_settle))?;
        let acc = accrued_amount(&contract, disc);
        let target = df_settle * q.uf_mid();

        let mut all_knots = knots.clone();
        all_knots.push(t);
        let later = i + 1 < quotes.len();
        let curve = |l: f64| pillar_curve(&all_knots, &lambdas, l, cfg.form, later);
        let residual =
            |l: f64| -> Result<f64> { Ok(pv_cds(&contract, disc, &curve(l)?) + acc - target) };
        let r_lo = residual(LAMBDA_MIN)?;
        let r_hi = residual(LAMBDA_MAX)?;
        if !(r_lo <= 0.0 && r_hi >= 0.0) {
            return Err(CdsError::Assumption1 {
                pillar,
                pv_inf: r_lo + target - acc,
                pv_sup: r_hi + target - acc,
                bid: target - acc,
                ask: target - acc,
            });
        }
        let root = find_root(residual, LAMBDA_MIN, LAMBDA_MAX, &cfg.solver)?;
        let pv = pv_cds(&contract, disc, &curve(root.x)?);
        info!(
            "bootstrap pillar {pillar} ({}): lambda {:.10e}",
            q.tenor, root.x
        );
        out.push(PillarResult {
            tenor: q.tenor.to_string(),
            maturity: q.maturity,
            time: t,
            lambda: root.x,
            gamma: 0.0,
            residual_bid: root.fx,
            residual_ask: root.fx,
            bracket: (root.x, root.x),
            pv,
            bid: pv,
            ask: pv,
            target_bid: target - acc,
            target_ask: target - acc,
        });
        knots.push(t);
        lambdas.push(root.x);
    }
    Ok(out)
}

/// Bootstrap packaged as a [`CalibrationResult`] with `γ ≡ 0`.
pub fn bootstrap_result(
    valuation: Date,
    quotes: &[MarketQuote],
    disc: &DiscountCurve,
    cfg: &CalibrationConfig,
) -> Result<CalibrationResult> {
    let pillars = bootstrap_mid_pillars(valuation, quotes, disc, cfg)?;
    Ok(CalibrationResult::from_parts(
        cfg.form, cfg.family, pillars, None,
    ))
}
