use std::f64::consts::PI;
use std::fs;

use serde_json::Value;
use sr_conjugate_cli::{parse_config, parse_grid, parse_matrix, run, EXIT_OK, EXIT_USAGE, EXIT_VACUOUS};

fn srconj(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("srconj")
        .chain(args.iter().copied())
        .map(String::from)
        .collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let (code, out, err) = srconj(args);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out} / {err}"));
    (code, v)
}

#[test]
fn heisenberg_time_from_closed_form_and_integration() {
    let (code, v) = json(&["lie3d-tc", "--chi", "0", "--kappa", "0", "--h0", "2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["verdict"], "finite");
    assert!((v["tc"].as_f64().unwrap() - PI).abs() < 1e-12);

    let (_, v) = json(&[
        "lie3d-tc",
        "--chi",
        "0",
        "--kappa",
        "0",
        "--h0",
        "2",
        "--numeric",
        "--horizon",
        "10",
    ]);
    assert!((v["tc"].as_f64().unwrap() - PI).abs() < 1e-6);
}

#[test]
fn classify_flat_row_is_infinite() {
    let (code, v) = json(&["lq-classify", "--l", "2", "--kappas", "0,0"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["verdict"], "infinite");
    assert_eq!(v["polynomial"], serde_json::json!([0.0, 0.0, 1.0]));

    let (_, v) = json(&["lq-classify", "--l", "2", "--kappas", "-1,1"]);
    assert_eq!(v["verdict"], "finite");
}

#[test]
fn lq_tc_both_model_forms() {
    let (code, v) = json(&["lq-tc", "--l", "2", "--kappas", "1,0", "--horizon", "10"]);
    assert_eq!(code, EXIT_OK);
    assert!((v["tc"].as_f64().unwrap() - 2.0 * PI).abs() < 1e-6);
    assert!((v["closed_form"].as_f64().unwrap() - 2.0 * PI).abs() < 1e-12);

    let (_, v) = json(&["lq-tc", "--rows", "1,1", "--q", "4,0;0,4", "--horizon", "10"]);
    assert!((v["tc"].as_f64().unwrap() - PI / 2.0).abs() < 1e-6);
}

#[test]
fn lq_tc_csv_table() {
    let (code, out, _) = srconj(&[
        "lq-tc",
        "--l",
        "1",
        "--kappas",
        "1",
        "--horizon",
        "4",
        "--format",
        "csv",
    ]);
    assert_eq!(code, EXIT_OK);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("t,det_n,sigma_min"));
    assert_eq!(lines.count(), 2001);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(srconj(&["lq-tc", "--l", "2"]).0, EXIT_USAGE);
    assert_eq!(srconj(&["no-such-command"]).0, EXIT_USAGE);
    assert_eq!(srconj(&["lq-classify", "--l", "3", "--kappas", "1,2"]).0, EXIT_USAGE);
    assert_eq!(
        srconj(&["lq-tc", "--l", "1", "--kappas", "1", "--horizon", "-1"]).0,
        EXIT_USAGE
    );
    assert_eq!(
        srconj(&["lq-tc", "--l", "1", "--kappas", "1", "--rtol", "0"]).0,
        EXIT_USAGE
    );
    let (code, _, err) = srconj(&["lie3d-tc", "--chi", "1", "--h0", "12", "--E", "60"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("precondition"));
    assert_eq!(srconj(&["--help"]).0, EXIT_OK);
}

#[test]
fn violated_hypothesis_exits_two() {
    let (code, v) = json(&[
        "compare-verify",
        "--rows",
        "2",
        "--bound",
        "sectional-lower",
        "--q",
        "1,0;0,0",
        "--r",
        "0.5,0;0,0",
    ]);
    assert_eq!(code, EXIT_VACUOUS);
    assert_eq!(v["verdict"], "vacuous");

    let (code, v) = json(&[
        "compare-verify",
        "--rows",
        "2",
        "--bound",
        "sectional-lower",
        "--q",
        "1,0;0,0",
        "--r",
        "2,0;0,0.5",
        "--horizon",
        "10",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["verdict"], "pass");
    assert!(v["tc_geodesic"].as_f64().unwrap() <= 2.0 * PI);
}

#[test]
fn compare_verify_reads_field_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("field.json");
    fs::write(
        &path,
        r#"{"kind": "sampled", "interpolation": "linear",
            "samples": [{"t": 0, "matrix": [[1]]}, {"t": 10, "matrix": [[3]]}]}"#,
    )
    .unwrap();
    let (code, v) = json(&[
        "compare-verify",
        "--rows",
        "1",
        "--bound",
        "sectional-lower",
        "--q",
        "1",
        "--field",
        path.to_str().unwrap(),
        "--horizon",
        "10",
    ]);
    assert_eq!(code, EXIT_OK, "{v}");
    assert!(v["tc_geodesic"].as_f64().unwrap() < PI);
}

#[test]
fn sweep_keeps_every_point_in_order() {
    let (code, out, _) = srconj(&[
        "lie3d-sweep",
        "--chi",
        "0",
        "--kappa",
        "-1,1",
        "--h0",
        "0:2:3",
        "--threads",
        "3",
    ]);
    assert_eq!(code, EXIT_OK);
    let mut r = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(
        r.headers().unwrap().iter().collect::<Vec<_>>(),
        ["chi", "kappa", "h0", "theta", "energy", "verdict", "tc", "error"]
    );
    let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(&rows[0][1], "-1.0");
    assert_eq!(&rows[0][5], "certified-infinite");
    assert_eq!(&rows[5][2], "2.0");
    let tc: f64 = rows[5][6].parse().unwrap();
    assert!((tc - 2.0 * PI / 5f64.sqrt()).abs() < 1e-12);
}

#[test]
fn sweep_records_failed_points() {
    // a negative chi is rejected per point, not for the whole sweep
    let (code, out, _) = srconj(&["lie3d-sweep", "--chi", "-1,0", "--h0", "1"]);
    assert_eq!(code, EXIT_OK);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].contains(",error,"), "{}", rows[0]);
    assert!(rows[1].contains(",finite,"));
}

#[test]
fn output_file_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let code = srconj(&[
            "lie3d-sweep",
            "--chi",
            "1",
            "--h0",
            "0.5,1.5",
            "--horizon",
            "8",
            "--output",
            p.to_str().unwrap(),
        ])
        .0;
        assert_eq!(code, EXIT_OK);
    }
    let x = fs::read(&a).unwrap();
    assert!(!x.is_empty());
    assert_eq!(x, fs::read(&b).unwrap());
}

#[test]
fn config_file_with_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# lq defaults\nl = 2\nkappas = 9,0\nhorizon = 10\n").unwrap();
    let c = cfg.to_str().unwrap();
    let (code, v) = json(&["lq-tc", "--config", c]);
    assert_eq!(code, EXIT_OK);
    assert!((v["tc"].as_f64().unwrap() - 2.0 * PI / 3.0).abs() < 1e-6);
    let (_, v) = json(&["lq-tc", "--config", c, "--kappas", "1,0"]);
    assert!((v["tc"].as_f64().unwrap() - 2.0 * PI).abs() < 1e-6);
}

#[test]
fn selftest_single_criterion() {
    let (code, v) = json(&["selftest", "--criterion", "3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v[0]["id"], 3);
    assert_eq!(v[0]["passed"], true);
    assert_eq!(srconj(&["selftest", "--criterion", "12"]).0, EXIT_USAGE);
}

#[test]
fn parsers() {
    assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
    assert_eq!(parse_grid("-1, 2").unwrap(), vec![-1.0, 2.0]);
    assert!(parse_grid("0:1").is_err());
    assert!(parse_grid("0:1:0").is_err());
    assert_eq!(parse_matrix("1,2;2,3").unwrap()[(1, 0)], 2.0);
    assert!(parse_matrix("1,2;3").is_err());
    assert_eq!(
        parse_config("a = 1\n\n b=x # note\n").unwrap(),
        vec![("a".into(), "1".into()), ("b".into(), "x".into())]
    );
    assert!(parse_config("oops").is_err());
}
