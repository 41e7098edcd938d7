use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lapprox(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lapprox"))
        .env("LAPPROX_CACHE_DIR", cache)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(o)).unwrap()
}

fn rows(v: &Value) -> Vec<Vec<String>> {
    v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            r.as_array()
                .unwrap()
                .iter()
                .map(|c| c.as_str().unwrap().to_string())
                .collect()
        })
        .collect()
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn coeffs_start_with_tau() {
    let dir = tempfile::tempdir().unwrap();
    let o = lapprox(dir.path(), &["coeffs", "--nmax", "10"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# eigenform k=12 C=1 P=0 nmax=10"));
    assert_eq!(&data_lines(&text)[..3], ["1 1", "2 -24", "3 252"]);
    assert_eq!(data_lines(&text)[9], "10 -115920");
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let first = lapprox(dir.path(), &["coeffs", "--nmax", "200"]);
    assert!(String::from_utf8_lossy(&first.stderr).contains("Miss"));
    let second = lapprox(dir.path(), &["coeffs", "--nmax", "200"]);
    assert!(String::from_utf8_lossy(&second.stderr).contains("Hit"));
    assert_eq!(first.stdout, second.stdout);

    let prefix = lapprox(dir.path(), &["coeffs", "--nmax", "50"]);
    assert!(String::from_utf8_lossy(&prefix.stderr).contains("Hit"));
    assert_eq!(data_lines(&stdout(&prefix)), data_lines(&stdout(&first))[..50]);
}

#[test]
fn coefficient_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("d.coeffs");
    let o = lapprox(
        dir.path(),
        &["coeffs", "--nmax", "300", "--out", file.to_str().unwrap()],
    );
    assert!(o.status.success());
    let args = [
        "zfunc", "--t-lo", "5", "--t-hi", "6", "--step", "0.5", "--modes", "full",
    ];
    let builtin = json(&lapprox(dir.path(), &args));
    let mut with_file = args.to_vec();
    with_file.extend(["--coeff-file", file.to_str().unwrap()]);
    let from_file = json(&lapprox(dir.path(), &with_file));
    assert_eq!(rows(&builtin), rows(&from_file));
}

#[test]
fn zfunc_modes_agree() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&lapprox(
        dir.path(),
        &[
            "zfunc",
            "--t-lo",
            "0",
            "--t-hi",
            "20",
            "--step",
            "1",
            "--modes",
            "full,3",
            "--target-error",
            "1e-12",
            "--bits",
            "80",
        ],
    ));
    assert_eq!(v["columns"], serde_json::json!(["t", "Z", "Z_err", "Z_3", "Z_3_err"]));
    let rows = rows(&v);
    assert_eq!(rows.len(), 21);
    for r in &rows {
        let z: f64 = r[1].parse().unwrap();
        let z3: f64 = r[3].parse().unwrap();
        assert!((z - z3).abs() < 1e-3, "t = {}", r[0]);
    }
    assert_eq!(rows[9][0].parse::<f64>().unwrap(), 9.0);
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "zfunc", "--t-lo", "1", "--t-hi", "2", "--step", "0.5", "--modes", "full,2",
    ];
    let j = json(&lapprox(dir.path(), &args));
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let c = lapprox(dir.path(), &csv_args);
    assert!(c.status.success());
    let text = stdout(&c);
    assert!(text.lines().any(|l| l == "# command=zfunc"));
    let body = data_lines(&text);
    assert_eq!(body[0], "t,Z,Z_err,Z_2,Z_2_err");
    let csv_rows: Vec<Vec<String>> = body[1..]
        .iter()
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    assert_eq!(csv_rows, rows(&j));
}

#[test]
fn empty_modes_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = lapprox(dir.path(), &["zfunc", "--modes", ""]);
    assert_eq!(o.status.code(), Some(2));
    let o = lapprox(dir.path(), &["zfunc", "--modes", "full,x"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn zeros_full_only() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&lapprox(
        dir.path(),
        &[
            "zeros",
            "--t-lo",
            "0",
            "--t-hi",
            "30",
            "--step",
            "0.1",
            "--tol",
            "1e-6",
            "--modes",
            "full",
            "--target-error",
            "1e-12",
            "--bits",
            "128",
        ],
    ));
    assert_eq!(v["columns"], serde_json::json!(["t0", "t0_err", "order"]));
    let zs: Vec<f64> = rows(&v).iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(zs.len(), 8);
    assert!(zs.windows(2).all(|w| w[1] - w[0] > 1.0));
    assert!((zs[0] - 9.2223793999211).abs() < 1e-6);
}

#[test]
fn zeros_compared_across_modes() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&lapprox(
        dir.path(),
        &[
            "zeros",
            "--t-lo",
            "8",
            "--t-hi",
            "15",
            "--step",
            "0.2",
            "--tol",
            "1e-8",
            "--modes",
            "full,3",
            "--target-error",
            "1e-14",
            "--bits",
            "96",
        ],
    ));
    assert_eq!(v["columns"][6], "t0-t0_3");
    let rows = rows(&v);
    assert_eq!(rows.len(), 2);
    for r in &rows {
        let t0: f64 = r[0].parse().unwrap();
        let t3: f64 = r[3].parse().unwrap();
        let d: f64 = r[6].parse().unwrap();
        assert!((t0 - t3 - d).abs() < 1e-7);
        assert!(d.abs() < 1e-6);
    }
}

#[test]
fn oracle_check_passes_and_self_test_fails() {
    let dir = tempfile::tempdir().unwrap();
    let base = [
        "oracle-check",
        "--N",
        "1",
        "--samples",
        "10",
        "--target-error",
        "1e-15",
        "--bits",
        "96",
    ];
    let v = json(&lapprox(dir.path(), &base));
    assert_eq!(v["meta"]["verdict"], "PASS");
    assert_eq!(rows(&v).len(), 10);
    let mut zero = base.to_vec();
    zero.push("--zero-budget");
    let o = lapprox(dir.path(), &zero);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL"));
}

#[test]
fn equidist_two_three() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&lapprox(
        dir.path(),
        &["equidist", "--p", "2", "--q", "3", "--m", "100000"],
    ));
    let r = &rows(&v)[0];
    assert!(r[3].parse::<f64>().unwrap() > 0.0);
    assert!(r[7].parse::<f64>().unwrap() < 1e-3);
    let o = lapprox(dir.path(), &["equidist", "--p", "3", "--q", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        lapprox(dir.path(), &["coeffs", "--nmax", "5", "--weight", "10"])
            .status
            .code(),
        Some(2)
    );
    let missing = dir.path().join("missing.coeffs");
    let o = lapprox(
        dir.path(),
        &["coeffs", "--nmax", "5", "--coeff-file", missing.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(4));
    let bad = dir.path().join("bad.coeffs");
    std::fs::write(&bad, "# eigenform k=12 C=1 P=0 nmax=2\n1 1\n2 x\n").unwrap();
    let o = lapprox(
        dir.path(),
        &["coeffs", "--nmax", "2", "--coeff-file", bad.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "bits = 70\nformat = csv\nN = 2\n").unwrap();
    let c = conf.to_str().unwrap();
    let o = lapprox(
        dir.path(),
        &["equidist", "--p", "2", "--q", "5", "--m", "1000", "--config", c],
    );
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "# bits=70"));
    let v = json(&lapprox(
        dir.path(),
        &[
            "equidist", "--p", "2", "--q", "5", "--m", "1000", "--config", c, "--format", "json", "--bits", "90",
        ],
    ));
    assert_eq!(v["meta"]["bits"], 90);
    assert_eq!(v["meta"]["config"]["n_factors"], 2);
}

fn serve_once(body: String) -> String {
    use std::io::{Read, Write};
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    std::thread::spawn(move || {
        let (mut s, _) = listener.accept().unwrap();
        let mut buf = [0u8; 4096];
        let _ = s.read(&mut buf);
        let head = format!(
            "HTTP/1.1 200 OK\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
            body.len()
        );
        s.write_all(head.as_bytes()).unwrap();
        s.write_all(body.as_bytes()).unwrap();
    });
    format!("http://{addr}/delta")
}

#[test]
fn fetch_stores_a_checked_table() {
    let dir = tempfile::tempdir().unwrap();
    let url = serve_once("[0, 1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920]".into());
    let out = dir.path().join("fetched.coeffs");
    let o = lapprox(dir.path(), &["fetch", "--url", &url, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# eigenform k=12 C=1 P=0 nmax=10"));
    let builtin = stdout(&lapprox(dir.path(), &["coeffs", "--nmax", "10"]));
    assert_eq!(data_lines(&text), data_lines(&builtin));
}

#[test]
fn fetch_rejects_inconsistent_data() {
    let dir = tempfile::tempdir().unwrap();
    let url = serve_once("1 1\n2 -24\n3 252\n4 -1472\n5 4830\n6 -6047\n".into());
    let out = dir.path().join("bad.coeffs");
    let o = lapprox(dir.path(), &["fetch", "--url", &url, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!out.exists());
    let o = lapprox(dir.path(), &["fetch", "--url", "http://127.0.0.1:1/none"]);
    assert_eq!(o.status.code(), Some(4));
}
