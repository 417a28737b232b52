#![allow(dead_code)]

use conic_cds::calibrator::{CalibrationConfig, MarketQuote};
use conic_cds::choquet::{ask_price, bid_price};
use conic_cds::curves::{DiscountCurve, HazardCurve};
use conic_cds::daycount::Date;
use conic_cds::distortion::Distortion;
use conic_cds::pricer::{accrued_amount, CdsContract};
use conic_cds::schedule::{build_schedule, MaturityRule, Tenor};

pub const COUPON: f64 = 0.01;
pub const RECOVERY: f64 = 0.4;

pub fn valuation() -> Date {
    Date::from_ymd_opt(2020, 2, 13).unwrap()
}

pub fn tenor(s: &str) -> Tenor {
    s.parse().unwrap()
}

pub fn quote(t: &str, uf_bid: f64, uf_ask: f64) -> MarketQuote {
    let t = tenor(t);
    MarketQuote::new(
        t,
        t.maturity(valuation(), MaturityRule::default()),
        uf_bid,
        uf_ask,
        COUPON,
        RECOVERY,
    )
    .unwrap()
}

pub fn contract(q: &MarketQuote, cfg: &CalibrationConfig) -> CdsContract {
    let s = build_schedule(valuation(), q.maturity, &cfg.schedule).unwrap();
    CdsContract::with_grid(s, q.coupon, q.lgd(), &cfg.grid).unwrap()
}

/// Upfront quotes generated from a known hazard curve and per-pillar
/// distortion levels, priced directly off the full curve.
pub fn synthetic(
    tenors: &[&str],
    lambdas: &[f64],
    gammas: &[f64],
    cfg: &CalibrationConfig,
    disc: &DiscountCurve,
) -> Vec<MarketQuote> {
    let contracts: Vec<CdsContract> = tenors
        .iter()
        .map(|t| contract(&quote(t, 0.0, 0.0), cfg))
        .collect();
    let h = HazardCurve::new(
        contracts.iter().map(|c| c.maturity_time()).collect(),
        lambdas.to_vec(),
        cfg.form,
    )
    .unwrap();
    tenors
        .iter()
        .zip(&contracts)
        .zip(gammas)
        .map(|((t, c), &g)| {
            let d = Distortion::new(cfg.family, g).unwrap();
            let s = c.schedule();
            let df_settle = disc.df(s.time(s.cash_settle)).unwrap();
            let acc = accrued_amount(c, disc);
            let up = |x: f64| (x + acc) / df_settle;
            quote(
                t,
                up(bid_price(c, disc, &h, &d).unwrap()),
                up(ask_price(c, disc, &h, &d).unwrap()),
            )
        })
        .collect()
}

/// Quote file text in the command-line input format.
pub fn quote_file_text(quotes: &[MarketQuote]) -> String {
    let mut s = format!(
        "valuation_date={}\nrecovery={RECOVERY}\ncoupon={COUPON}\ntenor,uf_bid,uf_ask\n",
        valuation()
    );
    for q in quotes {
        s.push_str(&format!("{},{},{}\n", q.tenor, q.uf_bid, q.uf_ask));
    }
    s
}

/// The market quotes shipped in `data/`.
pub fn table_quotes() -> Vec<MarketQuote> {
    [
        ("6M", -0.0033, -0.0026),
        ("1Y", -0.0074, -0.0068),
        ("2Y", -0.0149, -0.0126),
        ("3Y", -0.0192, -0.0169),
        ("4Y", -0.0221, -0.0198),
        ("5Y", -0.0219, -0.0198),
        ("7Y", -0.0162, -0.0095),
        ("10Y", -0.0073, 0.0047),
    ]
    .iter()
    .map(|&(t, b, a)| quote(t, b, a))
    .collect()
}
