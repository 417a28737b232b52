//! Discrete Choquet integration and conic bid/ask prices of CDS contracts.
//!
//! For a payoff taking value `x_i` on cell `A_i` and a distorted measure
//! `μ = ψ∘Q`, with `σ` sorting the values increasingly and `x_{σ(0)} := 0`:
//!
//! ```text
//! (C)∫X dμ ≈ Σ_i (x_{σ(i)} − x_{σ(i−1)}) · μ(A_{σ(i)} ∪ … ∪ A_{σ(M+1)})
//! ask(X) = DF(T) · (C)∫ X dψ(Q)
//! bid(X) = −DF(T) · (C)∫ −X dψ(Q) = DF(T) · (C)∫ X dψ̄(Q)
//! ```
//!
//! A CDS is priced leg by leg from its deferred payoffs:
//! `ask = ask(prot) − bid(prem)` and `bid = bid(prot) − ask(prem)`.

use crate::curves::{DiscountCurve, HazardCurve};
use crate::distortion::Distortion;
use crate::error::{CdsError, Result};
use crate::pricer::{deferred_payoff, CdsContract, DeferredPayoff, Leg};

/// Cell probabilities together with the distortion applied to them.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortedCellMeasure {
    probs: Vec<f64>,
    distortion: Distortion,
    dual: bool,
}

impl DistortedCellMeasure {
    /// `μ(A) = ψ(Q(A))`.
    pub fn new(probs: Vec<f64>, distortion: Distortion) -> Result<Self> {
        if probs.is_empty()
            || probs
                .iter()
                .any(|p| p.is_nan() || *p < 0.0 || !p.is_finite())
        {
            return Err(CdsError::invalid(
                "cell probabilities must be non-negative and finite",
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(CdsError::invalid(format!(
                "cell probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self {
            probs,
            distortion,
            dual: false,
        })
    }

    /// `μ̄(A) = 1 − ψ(Q(Aᶜ))`.
    pub fn dual(probs: Vec<f64>, distortion: Distortion) -> Result<Self> {
        let mut m = Self::new(probs, distortion)?;
        m.dual = true;
        Ok(m)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn distortion(&self) -> &Distortion {
        &self.distortion
    }

    /// Undistorted tail masses `T_i = Q(A_i ∪ … ∪ A_{M+1})`, in cell order.
    pub fn tail_probs(&self) -> Vec<f64> {
        let mut tails = vec![0.0; self.probs.len()];
        let mut acc = 0.0;
        for i in (0..self.probs.len()).rev() {
            acc += self.probs[i];
            tails[i] = acc;
        }
        tails[0] = 1.0;
        tails
    }

    #[inline]
    fn set_value(&self, mass: f64) -> f64 {
        if self.dual {
            self.distortion.apply_dual(mass)
        } else {
            self.distortion.apply(mass)
        }
    }
}

/// Stable ascending order of `values`; ties keep cell order.
fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    order
}

/// Sorted-increment Choquet sum of `values` with respect to `measure`.
pub fn choquet_integral(values: &[f64], measure: &DistortedCellMeasure) -> Result<f64> {
    if values.len() != measure.probs.len() {
        return Err(CdsError::invalid(format!(
            "payoff has {} cells but measure has {}",
            values.len(),
            measure.probs.len()
        )));
    }
    let order = ascending_order(values);
    let n = order.len();
    let mut tails = vec![0.0; n];
    let mut acc = 0.0;
    for i in (0..n).rev() {
        acc += measure.probs[order[i]];
        tails[i] = acc;
    }
    tails[0] = 1.0;

    let mut prev = 0.0;
    let mut total = 0.0;
    for (i, &cell) in order.iter().enumerate() {
        let x = values[cell];
        let inc = x - prev;
        if inc != 0.0 {
            total += inc * measure.set_value(tails[i]);
        }
        prev = x;
    }
    Ok(total)
}

/// `DF(T)·(C)∫X dψ(Q)` for a claim paying `values` at `T`.
pub fn ask_claim(values: &[f64], probs: &[f64], d: &Distortion, df_maturity: f64) -> Result<f64> {
    let m = DistortedCellMeasure::new(probs.to_vec(), *d)?;
    Ok(df_maturity * choquet_integral(values, &m)?)
}

/// `−DF(T)·(C)∫−X dψ(Q)` for a claim paying `values` at `T`.
pub fn bid_claim(values: &[f64], probs: &[f64], d: &Distortion, df_maturity: f64) -> Result<f64> {
    let m = DistortedCellMeasure::new(probs.to_vec(), *d)?;
    let negated: Vec<f64> = values.iter().map(|x| -x).collect();
    Ok(-df_maturity * choquet_integral(&negated, &m)?)
}

/// Bid price of the contract (protection buyer's cashflows).
pub fn bid_price(
    c: &CdsContract,
    disc: &DiscountCurve,
    h: &HazardCurve,
    d: &Distortion,
) -> Result<f64> {
    let engine = BidAskEngine::new(c, disc)?;
    let tails = engine.tails(&c.grid().cell_probabilities(h));
    Ok(engine.bid(&tails, d))
}

/// Ask price of the contract (protection buyer's cashflows).
pub fn ask_price(
    c: &CdsContract,
    disc: &DiscountCurve,
    h: &HazardCurve,
    d: &Distortion,
) -> Result<f64> {
    let engine = BidAskEngine::new(c, disc)?;
    let tails = engine.tails(&c.grid().cell_probabilities(h));
    Ok(engine.ask(&tails, d))
}

/// One non-negative leg, pre-sorted. Only cells with a non-zero increment
/// contribute, so only their tail masses are kept.
#[derive(Debug, Clone)]
struct SortedLeg {
    values: Vec<f64>,
    order: Vec<usize>,
    /// (sorted position, increment) for every non-zero increment
    steps: Vec<(usize, f64)>,
}

impl SortedLeg {
    fn new(payoff: DeferredPayoff) -> Self {
        let order = ascending_order(&payoff.values);
        let mut steps = Vec::new();
        let mut prev = 0.0;
        for (pos, &cell) in order.iter().enumerate() {
            let x = payoff.values[cell];
            if x != prev {
                steps.push((pos, x - prev));
            }
            prev = x;
        }
        Self {
            values: payoff.values,
            order,
            steps,
        }
    }

    fn tails(&self, probs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.steps.len()];
        let mut acc = 0.0;
        let mut pos = self.order.len();
        for (slot, &(step_pos, _)) in self.steps.iter().enumerate().rev() {
            while pos > step_pos {
                pos -= 1;
                acc += probs[self.order[pos]];
            }
            out[slot] = if step_pos == 0 { 1.0 } else { acc };
        }
        out
    }

    fn integrate(&self, tails: &[f64], set_value: impl Fn(f64) -> f64) -> f64 {
        self.steps
            .iter()
            .zip(tails)
            .map(|(&(_, inc), &t)| inc * set_value(t))
            .sum()
    }
}

/// Hazard-dependent part of a Choquet evaluation: sorted tail masses of both
/// legs plus the undistorted PV.
#[derive(Debug, Clone)]
pub struct LegTails {
    prot: Vec<f64>,
    prem: Vec<f64>,
    pv: f64,
}

impl LegTails {
    /// Risk-neutral PV of the contract at these cell probabilities.
    pub fn pv(&self) -> f64 {
        self.pv
    }
}

/// Cached bid/ask pricer for one contract and discount curve.
///
/// Payoffs and their sort order do not depend on the hazard curve, and tail
/// masses do not depend on the distortion, so repeated evaluations over
/// `(λ, γ)` only pay for the distortion calls.
#[derive(Debug, Clone)]
pub struct BidAskEngine {
    df_maturity: f64,
    prot: SortedLeg,
    prem: SortedLeg,
}

impl BidAskEngine {
    pub fn new(c: &CdsContract, disc: &DiscountCurve) -> Result<Self> {
        let grid = c.grid();
        Ok(Self {
            df_maturity: disc.df_at(c.maturity_time()),
            prot: SortedLeg::new(deferred_payoff(c, disc, grid, Leg::Protection)?),
            prem: SortedLeg::new(deferred_payoff(c, disc, grid, Leg::Premium)?),
        })
    }

    pub fn df_maturity(&self) -> f64 {
        self.df_maturity
    }

    /// `probs` as returned by [`crate::pricer::DefaultGrid::cell_probabilities`].
    pub fn tails(&self, probs: &[f64]) -> LegTails {
        let expect =
            |leg: &SortedLeg| -> f64 { leg.values.iter().zip(probs).map(|(x, q)| x * q).sum() };
        LegTails {
            prot: self.prot.tails(probs),
            prem: self.prem.tails(probs),
            pv: self.df_maturity * (expect(&self.prot) - expect(&self.prem)),
        }
    }

    pub fn ask(&self, t: &LegTails, d: &Distortion) -> f64 {
        let prot = self.prot.integrate(&t.prot, |m| d.apply(m));
        let prem = self.prem.integrate(&t.prem, |m| d.apply_dual(m));
        self.df_maturity * (prot - prem)
    }

    pub fn bid(&self, t: &LegTails, d: &Distortion) -> f64 {
        let prot = self.prot.integrate(&t.prot, |m| d.apply_dual(m));
        let prem = self.prem.integrate(&t.prem, |m| d.apply(m));
        self.df_maturity * (prot - prem)
    }

    /// `(bid, ask)`.
    pub fn bid_ask(&self, t: &LegTails, d: &Distortion) -> (f64, f64) {
        (self.bid(t, d), self.ask(t, d))
    }

    /// `ask − bid`; equals `DF(T)·Σ_legs ((C)∫dψ − (C)∫dψ̄)`.
    pub fn spread(&self, t: &LegTails, d: &Distortion) -> f64 {
        let width = |leg: &SortedLeg, tails: &[f64]| -> f64 {
            leg.steps
                .iter()
                .zip(tails)
                .map(|(&(_, inc), &m)| inc * (d.apply(m) - d.apply_dual(m)))
                .sum()
        };
        self.df_maturity * (width(&self.prot, &t.prot) + width(&self.prem, &t.prem))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::daycount::Date;
    use crate::distortion::DistortionFamily;
    use crate::pricer::pv_cds;
    use crate::schedule::{build_schedule, ScheduleConfig};

    fn mmv(g: f64) -> Distortion {
        Distortion::new(DistortionFamily::MinMaxVar, g).unwrap()
    }

    /// Layer-cake integral with exact piecewise-constant integration in t;
    /// `μ(X ≥ t)` is found by scanning every cell.
    fn layer_cake(values: &[f64], probs: &[f64], mu: impl Fn(f64) -> f64) -> f64 {
        let mut breaks: Vec<f64> = values.to_vec();
        breaks.push(0.0);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let mut total = 0.0;
        for w in breaks.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let mass: f64 = values
                .iter()
                .zip(probs)
                .filter(|(x, _)| **x >= mid)
                .map(|(_, q)| q)
                .sum();
            let level = mu(mass.min(1.0));
            total += (w[1] - w[0]) * if mid < 0.0 { level - 1.0 } else { level };
        }
        total
    }

    #[test]
    fn undistorted_integral_is_expectation() {
        let values = [0.3, -1.2, 2.5, 0.0, 0.7];
        let probs = vec![0.1, 0.2, 0.3, 0.15, 0.25];
        let m = DistortedCellMeasure::new(probs.clone(), mmv(0.0)).unwrap();
        let expected: f64 = values.iter().zip(&probs).map(|(x, q)| x * q).sum();
        assert!((choquet_integral(&values, &m).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn indicator_and_constant_payoffs() {
        let probs = vec![0.1, 0.2, 0.3, 0.4];
        let d = mmv(0.4);
        let m = DistortedCellMeasure::new(probs, d).unwrap();
        let ind = [1.0, 0.0, 1.0, 0.0];
        assert!((choquet_integral(&ind, &m).unwrap() - d.apply(0.4)).abs() < 1e-15);
        assert!((choquet_integral(&[2.5; 4], &m).unwrap() - 2.5).abs() < 1e-15);
    }

    #[test]
    fn matches_layer_cake_on_signed_payoffs() {
        let values = [0.3, -1.2, 2.5, 0.0, 0.7, -0.4];
        let probs = vec![0.1, 0.2, 0.3, 0.05, 0.25, 0.1];
        for d in [
            mmv(0.5),
            Distortion::new(DistortionFamily::Wang, 0.8).unwrap(),
        ] {
            let m = DistortedCellMeasure::new(probs.clone(), d).unwrap();
            let fast = choquet_integral(&values, &m).unwrap();
            assert!((fast - layer_cake(&values, &probs, |p| d.apply(p))).abs() < 1e-14);
            let m = DistortedCellMeasure::dual(probs.clone(), d).unwrap();
            let fast = choquet_integral(&values, &m).unwrap();
            assert!((fast - layer_cake(&values, &probs, |p| d.apply_dual(p))).abs() < 1e-14);
        }
    }

    #[test]
    fn negation_uses_dual_measure() {
        let values = [0.3, 1.2, 2.5, 0.0, 0.7];
        let probs = vec![0.1, 0.2, 0.3, 0.15, 0.25];
        let d = mmv(0.9);
        let neg: Vec<f64> = values.iter().map(|x| -x).collect();
        let direct =
            choquet_integral(&neg, &DistortedCellMeasure::new(probs.clone(), d).unwrap()).unwrap();
        let dual =
            choquet_integral(&values, &DistortedCellMeasure::dual(probs, d).unwrap()).unwrap();
        assert!((direct + dual).abs() < 1e-15);
    }

    #[test]
    fn measure_validation() {
        assert!(DistortedCellMeasure::new(vec![0.5, 0.4], mmv(0.1)).is_err());
        assert!(DistortedCellMeasure::new(vec![1.5, -0.5], mmv(0.1)).is_err());
        let m = DistortedCellMeasure::new(vec![0.5, 0.5], mmv(0.1)).unwrap();
        assert!(choquet_integral(&[1.0], &m).is_err());
        let tails = DistortedCellMeasure::new(vec![0.2, 0.3, 0.5], mmv(0.1))
            .unwrap()
            .tail_probs();
        assert_eq!(tails[0], 1.0);
        assert!((tails[1] - 0.8).abs() < 1e-15 && (tails[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cds_bid_ask_bracket_pv() {
        let v = Date::from_ymd_opt(2020, 2, 13).unwrap();
        let s = build_schedule(
            v,
            Date::from_ymd_opt(2022, 6, 20).unwrap(),
            &ScheduleConfig::default(),
        )
        .unwrap();
        let c = CdsContract::new(s, 0.01, 0.6).unwrap();
        let disc = DiscountCurve::flat_rate(0.01);
        let h = HazardCurve::flat(0.02).unwrap();
        let pv = pv_cds(&c, &disc, &h);
        let d0 = mmv(0.0);
        assert!((bid_price(&c, &disc, &h, &d0).unwrap() - pv).abs() < 1e-12);
        assert!((ask_price(&c, &disc, &h, &d0).unwrap() - pv).abs() < 1e-12);
        let d = mmv(0.1);
        let bid = bid_price(&c, &disc, &h, &d).unwrap();
        let ask = ask_price(&c, &disc, &h, &d).unwrap();
        assert!(bid < pv && pv < ask, "{bid} {pv} {ask}");

        let engine = BidAskEngine::new(&c, &disc).unwrap();
        let t = engine.tails(&c.grid().cell_probabilities(&h));
        assert!((engine.spread(&t, &d) - (ask - bid)).abs() < 1e-15);
        assert!((t.pv() - pv).abs() < 1e-15);
    }
}
