//! Deterministic discount curve and piecewise hazard-rate curve.
//!
//! Times are year fractions from the valuation date. Survival probabilities
//! are closed form: `PS(t) = exp(-∫₀ᵗ λ(s) ds)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::daycount::Date;
use crate::error::{CdsError, Result};

/// Lower end of the hazard-rate search interval (per year).
pub const LAMBDA_MIN: f64 = 1e-10;
/// Upper end of the hazard-rate search interval (per year).
pub const LAMBDA_MAX: f64 = 10.0;

/// Discount factors with log-linear interpolation (piecewise-flat forwards).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscountCurve {
    valuation: Option<Date>,
    times: Vec<f64>,
    log_dfs: Vec<f64>,
}

impl DiscountCurve {
    /// Builds a curve from `(time, df)` nodes. A `(0, 1)` node is implied.
    pub fn new(valuation: Option<Date>, nodes: &[(f64, f64)]) -> Result<Self> {
        if nodes.is_empty() {
            return Err(CdsError::invalid("discount curve has no nodes"));
        }
        let mut times = vec![0.0];
        let mut log_dfs = vec![0.0];
        for &(t, df) in nodes {
            if !(t.is_finite() && df.is_finite()) || t < 0.0 || df <= 0.0 {
                return Err(CdsError::invalid(format!(
                    "invalid discount node ({t}, {df})"
                )));
            }
            if t == 0.0 {
                if df != 1.0 {
                    return Err(CdsError::invalid(format!("DF(0) must be 1, got {df}")));
                }
                if times.len() > 1 {
                    return Err(CdsError::invalid(
                        "discount node times must be strictly increasing",
                    ));
                }
                continue;
            }
            if t <= *times.last().unwrap() {
                return Err(CdsError::invalid(
                    "discount node times must be strictly increasing",
                ));
            }
            times.push(t);
            log_dfs.push(df.ln());
        }
        if times.len() < 2 {
            return Err(CdsError::invalid(
                "discount curve needs a node with positive time",
            ));
        }
        Ok(Self {
            valuation,
            times,
            log_dfs,
        })
    }

    /// `DF ≡ 1`.
    pub fn unit() -> Self {
        Self::flat_rate(0.0)
    }

    /// Flat continuously-compounded zero rate.
    pub fn flat_rate(rate: f64) -> Self {
        Self {
            valuation: None,
            times: vec![0.0, 1.0],
            log_dfs: vec![0.0, -rate],
        }
    }

    pub fn with_valuation(mut self, valuation: Date) -> Self {
        self.valuation = Some(valuation);
        self
    }

    pub fn valuation(&self) -> Option<Date> {
        self.valuation
    }

    /// User-supplied nodes, excluding the implied `(0, 1)` anchor.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        self.times
            .iter()
            .zip(&self.log_dfs)
            .skip(1)
            .map(|(&t, &l)| (t, l.exp()))
            .collect()
    }

    pub fn df(&self, t: f64) -> Result<f64> {
        if t < 0.0 || t.is_nan() {
            return Err(CdsError::NegativeTime(t));
        }
        Ok(self.df_at(t))
    }

    /// Discount factor for `t >= 0` without validation.
    pub(crate) fn df_at(&self, t: f64) -> f64 {
        let n = self.times.len();
        // index of the first node with time >= t, clamped to a valid segment end
        let hi = self.times.partition_point(|&x| x < t).clamp(1, n - 1);
        let (t0, t1) = (self.times[hi - 1], self.times[hi]);
        let (l0, l1) = (self.log_dfs[hi - 1], self.log_dfs[hi]);
        if t == t1 {
            return l1.exp();
        }
        let w = (t - t0) / (t1 - t0);
        (l0 + w * (l1 - l0)).exp()
    }
}

/// Functional form of the hazard rate between pillars.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CurveForm {
    #[default]
    #[serde(rename = "const")]
    PiecewiseConstant,
    #[serde(rename = "linear")]
    PiecewiseLinear,
}

impl FromStr for CurveForm {
    type Err = CdsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "const" | "constant" | "piecewise_constant" => Ok(CurveForm::PiecewiseConstant),
            "linear" | "piecewise_linear" => Ok(CurveForm::PiecewiseLinear),
            other => Err(CdsError::invalid(format!("unknown curve form '{other}'"))),
        }
    }
}

impl fmt::Display for CurveForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveForm::PiecewiseConstant => "const",
            CurveForm::PiecewiseLinear => "linear",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Piece {
    start: f64,
    end: f64,
    left: f64,
    right: f64,
    /// ∫₀^start λ
    cum: f64,
}

impl Piece {
    fn rate(&self, t: f64) -> f64 {
        if self.end.is_infinite() || self.left == self.right {
            self.left
        } else {
            self.left + (self.right - self.left) * (t - self.start) / (self.end - self.start)
        }
    }

    fn integral_to(&self, t: f64) -> f64 {
        self.cum + 0.5 * (t - self.start) * (self.left + self.rate(t))
    }
}

/// Piecewise hazard-rate function with one parameter per pillar.
///
/// Piecewise-constant: `λ(t) = λᵢ` on `(knot_{i-1}, knot_i]`.
/// Piecewise-linear: flat `λ₁` up to the first knot, linear interpolation
/// between interior knots, flat `λ_K` after the penultimate knot.
/// Both forms extrapolate flat beyond the last knot.
#[derive(Debug, Clone, PartialEq)]
pub struct HazardCurve {
    knot_times: Vec<f64>,
    lambdas: Vec<f64>,
    form: CurveForm,
    pieces: Vec<Piece>,
}

impl HazardCurve {
    pub fn new(knot_times: Vec<f64>, lambdas: Vec<f64>, form: CurveForm) -> Result<Self> {
        if knot_times.is_empty() || knot_times.len() != lambdas.len() {
            return Err(CdsError::invalid(format!(
                "hazard curve needs matching non-empty knots and rates ({} vs {})",
                knot_times.len(),
                lambdas.len()
            )));
        }
        if knot_times[0] <= 0.0
            || knot_times.windows(2).any(|w| w[1] <= w[0])
            || knot_times.iter().any(|t| !t.is_finite())
        {
            return Err(CdsError::invalid(
                "hazard knot times must be positive and strictly increasing",
            ));
        }
        if let Some(bad) = lambdas.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(CdsError::invalid(format!(
                "hazard rates must be positive, got {bad}"
            )));
        }
        let pieces = build_pieces(&knot_times, &lambdas, form);
        Ok(Self {
            knot_times,
            lambdas,
            form,
            pieces,
        })
    }

    /// Constant hazard rate on `[0, ∞)`.
    pub fn flat(lambda: f64) -> Result<Self> {
        Self::new(vec![1.0], vec![lambda], CurveForm::PiecewiseConstant)
    }

    pub fn knot_times(&self) -> &[f64] {
        &self.knot_times
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn form(&self) -> CurveForm {
        self.form
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    fn piece(&self, t: f64) -> &Piece {
        let idx = self.pieces.partition_point(|p| p.end < t);
        &self.pieces[idx.min(self.pieces.len() - 1)]
    }

    /// Instantaneous hazard rate at `t`.
    pub fn rate(&self, t: f64) -> f64 {
        self.piece(t).rate(t)
    }

    /// `∫₀ᵗ λ(s) ds`.
    pub fn intensity_integral(&self, t: f64) -> Result<f64> {
        if t < 0.0 || t.is_nan() {
            return Err(CdsError::NegativeTime(t));
        }
        Ok(self.integral_at(t))
    }

    pub(crate) fn integral_at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        self.piece(t).integral_to(t)
    }

    /// `Q(τ > t)`.
    pub fn survival(&self, t: f64) -> Result<f64> {
        Ok((-self.intensity_integral(t)?).exp())
    }

    pub(crate) fn survival_at(&self, t: f64) -> f64 {
        (-self.integral_at(t)).exp()
    }

    /// Copy of the curve with pillar `index` (0-based) set to `new_lambda`.
    pub fn bump_pillar(&self, index: usize, new_lambda: f64) -> Result<Self> {
        if index >= self.lambdas.len() {
            return Err(CdsError::invalid(format!(
                "pillar index {index} out of range (curve has {})",
                self.lambdas.len()
            )));
        }
        let mut lambdas = self.lambdas.clone();
        lambdas[index] = new_lambda;
        Self::new(self.knot_times.clone(), lambdas, self.form)
    }
}

fn build_pieces(knots: &[f64], lambdas: &[f64], form: CurveForm) -> Vec<Piece> {
    let k = knots.len();
    let mut raw: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(k);
    // the last pillar's rate holds from the penultimate knot onwards in both forms
    let mut start = 0.0;
    for j in 0..k.saturating_sub(1) {
        let (left, right) = match form {
            CurveForm::PiecewiseConstant => (lambdas[j], lambdas[j]),
            CurveForm::PiecewiseLinear if j == 0 => (lambdas[0], lambdas[0]),
            CurveForm::PiecewiseLinear => (lambdas[j - 1], lambdas[j]),
        };
        raw.push((start, knots[j], left, right));
        start = knots[j];
    }
    raw.push((start, f64::INFINITY, lambdas[k - 1], lambdas[k - 1]));

    let mut cum = 0.0;
    raw.into_iter()
        .map(|(start, end, left, right)| {
            let piece = Piece {
                start,
                end,
                left,
                right,
                cum,
            };
            if end.is_finite() {
                cum = piece.integral_to(end);
            }
            piece
        })
        .collect()
}
