use conic_cds::calibrator::{CalibrationConfig, MarketQuote, PillarContext};
use conic_cds::choquet::{
    ask_price, bid_price, choquet_integral, BidAskEngine, DistortedCellMeasure,
};
use conic_cds::curves::{CurveForm, DiscountCurve, HazardCurve};
use conic_cds::daycount::{previous_cds_date, year_fraction, Date, DayCount, RollConvention};
use conic_cds::distortion::{Distortion, DistortionFamily};
use conic_cds::pricer::{pv_cds, pv_premium, pv_protection, CdsContract, GridConfig};
use conic_cds::schedule::{build_schedule, MaturityRule, ScheduleConfig, Tenor};
use proptest::prelude::*;

fn ymd(y: i32, m: u32, d: u32) -> Date {
    Date::from_ymd_opt(y, m, d).unwrap()
}

fn date_strategy() -> impl Strategy<Value = Date> {
    (0i64..8000).prop_map(|n| ymd(2005, 1, 1) + chrono::Days::new(n as u64))
}

fn family() -> impl Strategy<Value = DistortionFamily> {
    prop_oneof![
        Just(DistortionFamily::MinMaxVar),
        Just(DistortionFamily::Wang)
    ]
}

fn contract(valuation: Date, maturity: Date, coupon: f64, lgd: f64) -> CdsContract {
    let s = build_schedule(valuation, maturity, &ScheduleConfig::default()).unwrap();
    CdsContract::new(s, coupon, lgd).unwrap()
}

/// Normalised positive weights.
fn probs(raw: &[f64]) -> Vec<f64> {
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn year_fraction_zero_and_positive(d in date_strategy(), n in 1u64..4000) {
        let later = d + chrono::Days::new(n);
        for conv in [DayCount::Act360, DayCount::Act365F, DayCount::Thirty360] {
            prop_assert_eq!(year_fraction(d, d, conv).unwrap(), 0.0);
        }
        for conv in [DayCount::Act360, DayCount::Act365F] {
            prop_assert!(year_fraction(d, later, conv).unwrap() > 0.0);
        }
        prop_assert!(year_fraction(later, d, DayCount::Act360).is_err());
    }

    #[test]
    fn previous_cds_date_is_idempotent(d in date_strategy()) {
        let roll = RollConvention::quarterly();
        let p = previous_cds_date(d, &roll);
        prop_assert!(p <= d);
        prop_assert_eq!(previous_cds_date(p, &roll), p);
    }

    #[test]
    fn schedules_are_adjacent_and_additive(v in date_strategy(), months in 1u32..130) {
        let m = Tenor::Months(months).maturity(v, MaturityRule::NextImm);
        let cfg = ScheduleConfig::default();
        let s = build_schedule(v, m, &cfg).unwrap();
        prop_assert_eq!(s.accrual_starts.len(), s.accrual_ends.len());
        prop_assert!(s.accrual_starts[0] <= s.protection_effective);
        prop_assert!(s.protection_effective <= s.accrual_ends[0]);
        for i in 1..s.len() {
            prop_assert_eq!(s.accrual_starts[i], s.accrual_ends[i - 1]);
        }
        prop_assert_eq!(*s.accrual_ends.last().unwrap(), m);
        let total: f64 = s.accrual_fractions.iter().sum();
        let whole = year_fraction(s.accrual_starts[0], m, DayCount::Act360).unwrap();
        prop_assert!((total - whole).abs() < 1e-12);
        prop_assert_eq!(build_schedule(v, m, &cfg).unwrap(), s);
    }

    #[test]
    fn survival_is_decreasing_and_bounded(
        lambdas in prop::collection::vec(1e-4f64..0.5, 1..6),
        linear in any::<bool>(),
        t1 in 0.0f64..12.0,
        dt in 1e-3f64..3.0,
    ) {
        let knots: Vec<f64> = (1..=lambdas.len()).map(|i| i as f64 * 1.5).collect();
        let form = if linear { CurveForm::PiecewiseLinear } else { CurveForm::PiecewiseConstant };
        let h = HazardCurve::new(knots, lambdas, form).unwrap();
        let (a, b) = (h.survival(t1).unwrap(), h.survival(t1 + dt).unwrap());
        prop_assert!(a > b);
        prop_assert!(a <= 1.0 && b > 0.0);
        prop_assert_eq!(h.survival(0.0).unwrap(), 1.0);
    }

    #[test]
    fn intensity_integral_matches_quadrature(
        lambdas in prop::collection::vec(1e-3f64..0.3, 1..5),
        linear in any::<bool>(),
        t in 0.1f64..8.0,
    ) {
        let knots: Vec<f64> = (1..=lambdas.len()).map(|i| i as f64 * 1.3).collect();
        let form = if linear { CurveForm::PiecewiseLinear } else { CurveForm::PiecewiseConstant };
        let h = HazardCurve::new(knots.clone(), lambdas, form).unwrap();
        // daily trapezoid rule with the knots added as nodes
        let mut nodes: Vec<f64> = (0..).map(|d| d as f64 / 365.0).take_while(|&x| x < t).collect();
        nodes.extend(knots.iter().copied().filter(|&k| k < t));
        nodes.push(t);
        nodes.sort_by(f64::total_cmp);
        let quad: f64 = nodes
            .windows(2)
            .map(|w| {
                let eps = 1e-12 * (w[1] - w[0]);
                0.5 * (w[1] - w[0]) * (h.rate(w[0] + eps) + h.rate(w[1] - eps))
            })
            .sum();
        let exact = h.intensity_integral(t).unwrap();
        prop_assert!((quad / exact - 1.0).abs() < 1e-8, "{} vs {}", quad, exact);
    }

    #[test]
    fn constant_form_bump_locality(
        lambdas in prop::collection::vec(1e-3f64..0.3, 2..5),
        bump in 1e-3f64..0.3,
    ) {
        let k = lambdas.len();
        let knots: Vec<f64> = (1..=k).map(|i| i as f64).collect();
        let h = HazardCurve::new(knots, lambdas.clone(), CurveForm::PiecewiseConstant).unwrap();
        let last = h.bump_pillar(k - 1, bump).unwrap();
        for i in 0..=10 {
            let t = (k - 1) as f64 * i as f64 / 10.0;
            prop_assert_eq!(last.survival(t).unwrap(), h.survival(t).unwrap());
        }
        let first = h.bump_pillar(0, lambdas[0] * 1.5).unwrap();
        for i in 1..=10 {
            let t = k as f64 * i as f64 / 10.0;
            prop_assert!(first.survival(t).unwrap() < h.survival(t).unwrap());
        }
        prop_assert_eq!(h.lambdas(), &lambdas[..]);
    }

    #[test]
    fn distortion_shape(f in family(), gamma in 0.0f64..10.0, x in 0.0f64..=1.0, y in 0.0f64..=1.0, dg in 0.0f64..2.0) {
        let d = Distortion::new(f, gamma).unwrap();
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        prop_assert!(d.apply(lo) <= d.apply(hi) + 1e-15);
        prop_assert!(d.apply(x) >= x - 1e-12);
        prop_assert!(d.apply(0.5 * (x + y)) >= 0.5 * (d.apply(x) + d.apply(y)) - 1e-12);
        let stronger = Distortion::new(f, gamma + dg).unwrap();
        prop_assert!(stronger.apply(x) >= d.apply(x) - 1e-12);
        prop_assert!(d.apply_dual(x) <= x + 1e-12);
    }

    #[test]
    fn choquet_monotone_and_homogeneous(
        raw in prop::collection::vec(0.01f64..1.0, 2..12),
        values in prop::collection::vec(-2.0f64..2.0, 12),
        bumps in prop::collection::vec(0.0f64..1.0, 12),
        scale in 0.01f64..50.0,
        f in family(),
        gamma in 0.0f64..3.0,
    ) {
        let n = raw.len();
        let m = DistortedCellMeasure::new(probs(&raw), Distortion::new(f, gamma).unwrap()).unwrap();
        let x = &values[..n];
        let bigger: Vec<f64> = x.iter().zip(&bumps).map(|(a, b)| a + b).collect();
        let scaled: Vec<f64> = x.iter().map(|a| a * scale).collect();
        let base = choquet_integral(x, &m).unwrap();
        prop_assert!(choquet_integral(&bigger, &m).unwrap() >= base - 1e-12);
        prop_assert!((choquet_integral(&scaled, &m).unwrap() - scale * base).abs() < 1e-12 * scale.max(1.0));
        let expectation: f64 = x.iter().zip(m.probs()).map(|(a, q)| a * q).sum();
        prop_assert!(base >= expectation - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bid_pv_ask_ordering(
        lambda in 1e-3f64..0.2,
        gamma in 1e-3f64..1.0,
        f in family(),
        months in prop::sample::select(vec![6u32, 12, 24, 36]),
        coupon in prop::sample::select(vec![0.01, 0.05]),
        rate in -0.01f64..0.05,
    ) {
        let v = ymd(2020, 2, 13);
        let c = contract(v, Tenor::Months(months).maturity(v, MaturityRule::default()), coupon, 0.6);
        let disc = DiscountCurve::flat_rate(rate);
        let h = HazardCurve::flat(lambda).unwrap();
        let pv = pv_cds(&c, &disc, &h);
        let d = Distortion::new(f, gamma).unwrap();
        let bid = bid_price(&c, &disc, &h, &d).unwrap();
        let ask = ask_price(&c, &disc, &h, &d).unwrap();
        prop_assert!(bid < pv && pv < ask, "{} {} {}", bid, pv, ask);
        let zero = Distortion::new(f, 0.0).unwrap();
        prop_assert!((bid_price(&c, &disc, &h, &zero).unwrap() - pv).abs() < 1e-12);
        let prot = pv_protection(&c, &disc, &h);
        prop_assert!(prot >= 0.0 && prot <= 0.6 * disc.df(0.0).unwrap().max(1.1));
        prop_assert!(pv_premium(&c, &disc, &h) >= 0.0);
    }

    #[test]
    fn spread_increases_with_gamma(lambda in 1e-3f64..0.1, f in family(), g in 1e-3f64..1.0, dg in 1e-3f64..1.0) {
        let v = ymd(2020, 2, 13);
        let c = contract(v, ymd(2025, 6, 20), 0.01, 0.6);
        let disc = DiscountCurve::flat_rate(0.01);
        let h = HazardCurve::flat(lambda).unwrap();
        let e = BidAskEngine::new(&c, &disc).unwrap();
        let t = e.tails(&c.grid().cell_probabilities(&h));
        let lo = Distortion::new(f, g).unwrap();
        let hi = Distortion::new(f, g + dg).unwrap();
        prop_assert!(e.spread(&t, &hi) > e.spread(&t, &lo));
        prop_assert!(e.ask(&t, &hi) > e.ask(&t, &lo));
    }
}

#[test]
fn grid_refinement_is_first_order() {
    let v = ymd(2020, 2, 13);
    let disc = DiscountCurve::flat_rate(0.02);
    let h = HazardCurve::flat(0.03).unwrap();
    let s = build_schedule(v, ymd(2025, 6, 20), &ScheduleConfig::default()).unwrap();
    let pv = |days: u32| {
        let c = CdsContract::with_grid(s.clone(), 0.01, 0.6, &GridConfig::with_step_days(days))
            .unwrap();
        pv_cds(&c, &disc, &h)
    };
    let (p8, p4, p2) = (pv(8), pv(4), pv(2));
    let (coarse, fine) = ((p8 - p4).abs(), (p4 - p2).abs());
    assert!(fine > 0.0 && fine < 4.0 * coarse, "{coarse:e} {fine:e}");
}

#[test]
fn implied_gamma_is_continuous_in_lambda() {
    let v = ymd(2020, 2, 13);
    let t: Tenor = "5Y".parse().unwrap();
    let q = MarketQuote::new(
        t,
        t.maturity(v, MaturityRule::default()),
        -0.0219,
        -0.0198,
        0.01,
        0.4,
    )
    .unwrap();
    let disc = DiscountCurve::unit();
    let ctx = PillarContext::new(v, &q, &disc, &[], &[], &CalibrationConfig::default()).unwrap();
    let (lb, la) = ctx.bracket_lambda().unwrap();
    let (b, a) = ctx.targets();
    let max_jump = |n: usize| {
        let gammas: Vec<f64> = (0..n)
            .map(|i| {
                ctx.solve_gamma_for_spread(lb + (la - lb) * i as f64 / (n - 1) as f64, a - b)
                    .unwrap()
            })
            .collect();
        gammas
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max)
    };
    let (j50, j100) = (max_jump(50), max_jump(100));
    assert!(j100 < j50, "{j50:e} {j100:e}");
}
