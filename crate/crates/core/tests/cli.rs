mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use common::*;
use conic_cds::calibrator::CalibrationConfig;
use conic_cds::cli::run_cli_with;
use conic_cds::curves::DiscountCurve;
use conic_cds::io::{ResultFile, ResultFormat};

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("conic-cds").chain(args.iter().copied());
    let code = run_cli_with(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn calibrate_synthetic_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let tenors = ["1Y", "3Y", "5Y"];
    let (lambdas, gammas) = ([0.01, 0.02, 0.025], [0.08, 0.05, 0.03]);
    let quotes = synthetic(
        &tenors,
        &lambdas,
        &gammas,
        &CalibrationConfig::default(),
        &DiscountCurve::unit(),
    );
    let qpath = write(dir.path(), "q.csv", &quote_file_text(&quotes));
    let out = dir.path().join("r.json");
    let r = run(&["calibrate", "--quotes", s(&qpath), "--out", s(&out)]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r
        .out
        .starts_with("tenor,lambda,gamma,residual_bid,residual_ask\n"));
    assert_eq!(r.out.lines().count(), 4);

    let file = ResultFile::read(&out).unwrap();
    assert!(file.result.is_complete());
    for (p, (l, g)) in file.result.pillars.iter().zip(lambdas.iter().zip(&gammas)) {
        assert!(
            p.residual_bid.abs() < 1e-9 && p.residual_ask.abs() < 1e-9,
            "{p:?}"
        );
        assert!((p.lambda / l - 1.0).abs() < 1e-6, "{p:?}");
        assert!((p.gamma / g - 1.0).abs() < 1e-6, "{p:?}");
    }
    assert_eq!(file.metadata.input_hashes.len(), 1);
}

#[test]
fn table_quotes_calibrate_with_both_families() {
    for family in ["minmaxvar", "wang"] {
        let r = run(&[
            "calibrate",
            "--quotes",
            &data("quotes_2020-02-13.csv"),
            "--discount-curve",
            &data("discount_flat.csv"),
            "--distortion",
            family,
            "--format",
            "csv",
        ]);
        assert_eq!(r.code, 0, "{}", r.err);
        let file = ResultFile::from_csv(&r.out).unwrap();
        assert_eq!(file.result.pillars.len(), 8);
        assert!(file
            .result
            .pillars
            .iter()
            .all(|p| p.gamma > 0.0 && p.lambda > 0.0));
    }
}

#[test]
fn price_with_zero_gamma_collapses_to_pv() {
    let r = run(&[
        "price",
        "--quotes",
        &data("quotes_2020-02-13.csv"),
        "--lambda",
        "0.02",
        "--gamma",
        "0",
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    let mut lines = r.out.lines();
    assert_eq!(lines.next(), Some("tenor,pv,bid,ask"));
    let mut n = 0;
    for line in lines {
        let f: Vec<f64> = line
            .split(',')
            .skip(1)
            .map(|x| x.parse().unwrap())
            .collect();
        assert!((f[1] - f[0]).abs() <= 1e-9 * f[0].abs().max(1e-3), "{line}");
        assert!((f[2] - f[0]).abs() <= 1e-9 * f[0].abs().max(1e-3), "{line}");
        n += 1;
    }
    assert_eq!(n, 8);

    let r = run(&[
        "price",
        "--quotes",
        &data("quotes_2020-02-13.csv"),
        "--lambda",
        "0.02",
        "--gamma",
        "0.1",
    ]);
    for line in r.out.lines().skip(1) {
        let f: Vec<f64> = line
            .split(',')
            .skip(1)
            .map(|x| x.parse().unwrap())
            .collect();
        assert!(f[1] < f[0] && f[0] < f[2], "{line}");
    }
}

#[test]
fn zero_spread_quote_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let q = write(
        dir.path(),
        "q.csv",
        "valuation_date=2020-02-13\nrecovery=0.4\ncoupon=0.01\ntenor,uf_bid,uf_ask\n1Y,-0.007,-0.007\n",
    );
    let out = dir.path().join("r.json");
    let r = run(&["calibrate", "--quotes", s(&q), "--out", s(&out)]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("pillar 1"), "{}", r.err);
    let file = ResultFile::read(&out).unwrap();
    assert!(file.result.pillars.is_empty());
    assert_eq!(
        file.result.failure.unwrap().kind,
        conic_cds::calibrator::FailureKind::Assumption2
    );

    // the same quote is a valid single price for the bootstrap
    let r = run(&["bootstrap", "--quotes", s(&q)]);
    assert_eq!(r.code, 0, "{}", r.err);
}

#[test]
fn crossed_quote_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let q = write(
        dir.path(),
        "q.csv",
        "valuation_date=2020-02-13\nrecovery=0.4\ncoupon=0.01\ntenor,uf_bid,uf_ask\n1Y,-0.006,-0.007\n",
    );
    let r = run(&["calibrate", "--quotes", s(&q)]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("line 5"), "{}", r.err);
}

#[test]
fn argument_errors() {
    let q = data("quotes_2020-02-13.csv");
    assert_eq!(
        run(&[
            "calibrate",
            "--quotes",
            &q,
            "--out",
            "x.json",
            "--format",
            "csv"
        ])
        .code,
        2
    );
    assert_eq!(
        run(&["calibrate", "--quotes", &q, "--distortion", "cauchy"]).code,
        2
    );
    assert_eq!(
        run(&["calibrate", "--quotes", "/nonexistent/q.csv"]).code,
        2
    );
    assert_eq!(
        run(&["price", "--quotes", &q, "--lambda", "0.01,0.02"]).code,
        2
    );
    assert_eq!(run(&["price", "--quotes", &q, "--lambda", "-0.01"]).code, 2);
    assert_eq!(run(&["frobnicate"]).code, 2);
    assert_eq!(run(&["--help"]).code, 0);
}

#[test]
fn results_round_trip_and_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let q = data("quotes_2020-02-13.csv");
    let d = data("discount_flat.csv");
    let mut texts = Vec::new();
    for (name, fmt) in [
        ("a.json", ResultFormat::Json),
        ("b.json", ResultFormat::Json),
        ("c.csv", ResultFormat::Csv),
    ] {
        let out = dir.path().join(name);
        let r = run(&[
            "calibrate",
            "--quotes",
            &q,
            "--discount-curve",
            &d,
            "--distortion",
            "wang",
            "--out",
            s(&out),
        ]);
        assert_eq!(r.code, 0, "{}", r.err);
        texts.push((fs::read_to_string(&out).unwrap(), fmt));
    }
    assert_eq!(texts[0].0, texts[1].0);
    let json = ResultFile::from_json(&texts[0].0).unwrap();
    let csv = ResultFile::from_csv(&texts[2].0).unwrap();
    assert_eq!(json, csv);
    assert_eq!(json.metadata.input_hashes, csv.metadata.input_hashes);
    assert_eq!(json.metadata.input_hashes.len(), 2);
    assert_eq!(
        ResultFile::from_json(&json.to_json().unwrap()).unwrap(),
        json
    );
    assert_eq!(ResultFile::from_csv(&json.to_csv().unwrap()).unwrap(), json);
}

#[test]
fn survival_and_plot_export() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let r = run(&[
        "bootstrap",
        "--quotes",
        &data("quotes_2020-02-13.csv"),
        "--out",
        s(&out),
    ]);
    assert_eq!(r.code, 0, "{}", r.err);

    let r = run(&["survival", "--result", s(&out), "--step-months", "6"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let surv: Vec<f64> = r
        .out
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(surv.len() > 10);
    assert!(surv.windows(2).all(|w| w[1] < w[0]));
    assert!(surv[0] <= 1.0);

    let plot = dir.path().join("plot.csv");
    let r = run(&[
        "export-plot",
        "--result",
        s(&out),
        "--out",
        s(&plot),
        "--points",
        "50",
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    let text = fs::read_to_string(&plot).unwrap();
    assert!(text.starts_with("series,x,y\n"));
    assert_eq!(
        text.lines().filter(|l| l.starts_with("lambda,")).count(),
        50
    );
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_conic-cds");
    let ok = Command::new(bin)
        .args([
            "price",
            "--quotes",
            &data("quotes_2020-02-13.csv"),
            "--lambda",
            "0.01",
        ])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(bin)
        .args(["calibrate", "--quotes", "/nonexistent"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(!bad.stderr.is_empty());
}
