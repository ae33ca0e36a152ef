use std::path::PathBuf;
use std::process::{Command, Output};

use invvol::cli;
use invvol::config::{Overrides, RunConfig};
use invvol::Parallel;
use invvol_core::inverse_bs::{bs_price, BsPoint};
use serde_json::Value;

fn invvol(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_invvol"));
    cmd.args(args).env_remove("INVVOL_THREADS");
    if let Some(t) = threads {
        cmd.env("INVVOL_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn json(out: &Output) -> Value {
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn constvol_price_matches_closed_form() {
    let out = invvol(
        &[
            "price", "--model", "constvol", "--sigma0", "0.3", "--paths", "40000",
        ],
        None,
    );
    let v = json(&out);
    let (price, se) = (v["price"].as_f64().unwrap(), v["stderr"].as_f64().unwrap());
    let exact = bs_price(&BsPoint::atm(0.001, 100f64.ln(), 0.3).unwrap()).unwrap();
    assert!(
        (price - exact).abs() < 4.0 * se,
        "{price} vs {exact} (se {se})"
    );
    assert_eq!(v["n"], 20_000);
}

#[test]
fn quanto_is_exact_multiple_on_same_seed() {
    let run = |rate| {
        let mut c = RunConfig::default();
        c.apply(&Overrides {
            paths: Some(4000),
            rate_r: rate,
            seed: Some(3),
            ..Default::default()
        });
        let r = c.resolve().unwrap();
        let rep = cli::price(&r, &Parallel::new()).unwrap();
        rep.rows[0][0].as_f64().unwrap()
    };
    assert_eq!(run(Some(2.0)), 2.0 * run(None));
}

#[test]
fn output_is_reproducible_across_thread_counts() {
    let args = [
        "skew", "--model", "bergomi", "--hurst", "0.3", "--paths", "6000", "--steps", "10",
        "--seed", "11",
    ];
    let a = invvol(&args, Some("1"));
    let b = invvol(&args, Some("3"));
    let c = invvol(&args, None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"model":{"kind":"constvol","sigma0":0.5},"sim":{"n_paths":2000,"seed":1},"output_format":"csv"}"#,
    )
    .unwrap();
    let out_path = dir.path().join("out.csv");
    let cfg_s = cfg.display().to_string();
    let out_s = out_path.display().to_string();
    let out = invvol(
        &[
            "price", "--config", &cfg_s, "--paths", "1000", "--out", &out_s,
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("price,stderr,n"));
    assert!(lines.next().unwrap().ends_with(",500"));
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let unknown = dir.path().join("unknown.json");
    std::fs::write(&unknown, r#"{"sim":{"paths":10}}"#).unwrap();
    let bad_s = bad.display().to_string();
    let unknown_s = unknown.display().to_string();
    let cases: Vec<Vec<&str>> = vec![
        vec!["price", "--config", &bad_s],
        vec!["price", "--config", &unknown_s],
        vec!["price", "--config", "/nonexistent/run.json"],
        vec!["price", "--paths", "3"],
        vec!["price", "--sigma0", "-1"],
        vec!["price", "--model", "heston"],
        vec!["skew", "--strike", "90", "--paths", "100"],
        vec!["term-structure"],
        vec!["term-structure", "--maturities"],
        vec!["fit-market", "/nonexistent/quotes.csv"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let out = invvol(&args, None);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(invvol(&["price"], Some("zero")).status.code(), Some(2));
}

#[test]
fn price_outside_monotone_domain_exits_3() {
    let out = invvol(
        &[
            "iv-level", "--grid", "28.97", "--model", "constvol", "--paths", "2000", "--steps",
            "1", "--seed", "20240601",
        ],
        None,
    );
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn iv_level_csv() {
    let out = invvol(&["iv-level", "--grid", "0.2,0.6", "--paths", "2000"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "sigma0,iv_mc,iv_limit,iv_stderr");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0.2,"));
    let limit: f64 = lines[2].split(',').nth(2).unwrap().parse().unwrap();
    assert_eq!(limit, 0.6);
}

#[test]
fn skew_report_keys() {
    let v = json(&invvol(
        &[
            "skew", "--scaled", "--model", "bergomi", "--paths", "2000", "--steps", "8",
        ],
        None,
    ));
    for key in ["skew_mc", "stderr", "skew_limit", "scaling_exponent"] {
        assert!(v[key].is_number(), "{key}");
    }
    assert!((v["scaling_exponent"].as_f64().unwrap() - 0.1).abs() < 1e-15);
    assert!((v["skew_limit"].as_f64().unwrap() + 0.0392292627631542).abs() < 1e-12);
}

#[test]
fn term_structure_rows() {
    let out = invvol(
        &[
            "term-structure",
            "--maturities",
            "0.001,0.01",
            "--paths",
            "2000",
            "--steps",
            "8",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("T,skew_mc,stderr\n0.001,"));
}

#[test]
fn fit_market_fixtures() {
    let v = json(&invvol(&["fit-market", &fixture("power_law_skew.csv")], None));
    assert!((v["h_implied"].as_f64().unwrap() - 0.8).abs() < 1e-10);
    assert!((v["skew_shortest"].as_f64().unwrap() - 0.014).abs() < 1e-12);
    assert_eq!(v["atm_level_shortest"].as_f64(), Some(0.36));
    assert!(v["c"].is_number() && v["r_squared"].is_number() && v["alpha"].is_number());

    let v = json(&invvol(&["fit-market", &fixture("flat_skew.csv")], None));
    assert!((v["h_implied"].as_f64().unwrap() - 0.5).abs() < 1e-10);

    let out = invvol(&["fit-market", &fixture("mixed_sign.csv")], None);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn malformed_quote_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [
        ("empty.csv", ""),
        (
            "header.csv",
            "maturity_years,iv_put_d25,iv_call_d25,iv_call_d50\n",
        ),
        (
            "text.csv",
            "maturity_years,iv_put_d25,iv_call_d25,iv_call_d50\n0.1,abc,0.3,0.3\n",
        ),
        (
            "short.csv",
            "maturity_years,iv_put_d25,iv_call_d25,iv_call_d50\n0.1,0.3\n",
        ),
        (
            "neg.csv",
            "maturity_years,iv_put_d25,iv_call_d25,iv_call_d50\n0.1,0.3,0.3,-0.3\n",
        ),
        ("binary.csv", "\u{0}\u{1}\u{2}"),
    ] {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        let out = invvol(&["fit-market", &p.display().to_string()], None);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
