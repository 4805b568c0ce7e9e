use std::path::Path;
use std::process::{Command, Output};

use polybergman::cli::{parse_f64, Case, SamplePoint, Sampler};
use polybergman::specfun::AdaptiveOptions;
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polybergman")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    bin(args).status.code().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = bin(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn kind(s: &str) -> &'static str {
    match s {
        "interior" => "interior",
        "left" => "left",
        "right" => "right",
        "bottom" => "bottom",
        "top" => "top",
        other => panic!("unknown kind {other}"),
    }
}

fn coord(s: &str) -> Option<f64> {
    (!s.is_empty()).then(|| parse_f64(s).unwrap())
}

/// Re-evaluates every CSV row through the library and compares bits.
fn assert_round_trip(case: Case, symbol: Option<&str>, n: usize, csv_text: &str) {
    let sampler = Sampler::new(case, symbol, n, AdaptiveOptions::default()).unwrap();
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(headers.iter().collect::<Vec<_>>(), ["kind", "t1", "t2", "j", "k", "value"]);
    let mut rows = 0;
    for rec in reader.records() {
        let rec = rec.unwrap();
        let p = SamplePoint { kind: kind(&rec[0]), t1: coord(&rec[1]), t2: coord(&rec[2]) };
        let j: usize = rec[3].parse().unwrap();
        let k: usize = rec[4].parse().unwrap();
        let m = sampler.eval(&p).unwrap();
        let expect = m[(j - 1, k - 1)];
        let got = parse_f64(&rec[5]).unwrap();
        assert_eq!(got.to_bits(), expect.to_bits(), "{:?} ({j},{k})", rec);
        rows += 1;
    }
    assert!(rows > 0);
}

#[test]
fn csv_round_trip_is_bit_identical() {
    let cases: &[(&str, Case, Option<&str>, usize, &str)] = &[
        ("phi-a", Case::PhiA, Some("sigmoid"), 2, "t1=-2:2:5,t2=0.1:10:3:log"),
        ("phi-plus", Case::PhiPlus, None, 3, "t1=-3:3:7"),
        ("b-1n", Case::B1n, Some("b:inv1p"), 2, "t2=0.01:100:5:log"),
        ("a-1n", Case::A1n, Some("witch"), 2, "t1=-1:1:3,t2=0.5:2:2"),
        ("c-n1", Case::Cn1, Some("chi+*b:inv1p"), 2, "t1=-1:1:2,t2=0.5:1:2"),
    ];
    for &(name, case, symbol, n, grid) in cases {
        let n_s = n.to_string();
        let mut args = vec!["sample", "--case", name, "--n", &n_s, "--grid", grid, "--include-boundary"];
        if !case.has_boundary() {
            args.pop();
        }
        if let Some(s) = symbol {
            args.extend(["--symbol", s]);
        }
        assert_round_trip(case, symbol, n, &stdout(&args));
    }
}

#[test]
fn sequential_and_parallel_outputs_match() {
    let args = ["sample", "--case", "phi-a", "--symbol", "abswitch", "--n", "2", "--grid", "t1=-2:2:9,t2=0.1:10:4:log"];
    let mut seq = args.to_vec();
    seq.push("--sequential");
    assert_eq!(stdout(&args), stdout(&seq));
}

#[test]
fn infinities_are_written_as_signed_strings() {
    let out = stdout(&["sample", "--case", "phi-a", "--symbol", "chi+", "--n", "1", "--grid", "t1=0:1:2,t2=1:2:2", "--include-boundary"]);
    assert!(out.lines().any(|l| l.starts_with("left,-inf,+inf,")));
    assert!(out.lines().any(|l| l.starts_with("top,0,+inf,")));
    let bottom: Vec<&str> = out.lines().filter(|l| l.starts_with("bottom,")).collect();
    assert!(bottom.iter().all(|l| l.split(',').nth(2) == Some("0")));
}

#[test]
fn json_has_documented_shape() {
    let out = stdout(&[
        "sample", "--case", "phi-a", "--symbol", "sigmoid", "--n", "2", "--grid", "t1=-1:1:3,t2=1:2:2", "--include-boundary",
        "--format", "json",
    ]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["case"], "phi-a");
    assert_eq!(v["n"], 2);
    assert_eq!(v["symbol"], "sigmoid");
    assert!(v["grid"].is_object());
    let samples = v["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 6 + 3 + 3 + 4 + 4);
    for s in samples {
        let m = s["matrix"].as_array().unwrap();
        assert_eq!(m.len(), 2);
        assert!(m.iter().all(|r| r.as_array().unwrap().len() == 2));
        assert!(s["point"]["kind"].is_string());
    }
    assert!(samples.iter().any(|s| s["point"]["t1"] == "+inf" && s["point"]["t2"] == "+inf"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let p = path.to_str().unwrap();
    let printed = stdout(&["sample", "--case", "phi-plus", "--n", "2", "--grid", "t1=-1:1:3", "--out", p]);
    assert!(printed.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 4);
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn eigencurves_writes_table_and_basis() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    assert_eq!(code(&["eigencurves", "--n", "3", "--grid", "t1=-3:3:13", "--out", out.to_str().unwrap()]), 0);
    let curves = read_csv(&out);
    assert_eq!(curves.len(), 15 * 3);
    for r in &curves {
        let lam = parse_f64(&r[2]).unwrap();
        assert!((-1e-12..=1.0 + 1e-12).contains(&lam), "{r:?}");
        match r[0].as_str() {
            "-inf" => assert_eq!(lam, 1.0),
            "+inf" => assert_eq!(lam, 0.0),
            _ => {}
        }
    }
    let basis = read_csv(&dir.path().join("c.csv.basis.csv"));
    assert_eq!(basis.len(), 15 * 9);
    // columns are unit vectors
    for t in basis.chunks(9) {
        for col in 1..=3 {
            let norm: f64 = t
                .iter()
                .filter(|r| r[2] == col.to_string())
                .map(|r| parse_f64(&r[3]).unwrap().powi(2))
                .sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    let basis_path = dir.path().join("b.csv");
    let args = ["eigencurves", "--n", "2", "--grid", "t1=-1:1:3", "--out", out.to_str().unwrap(), "--basis-out", basis_path.to_str().unwrap()];
    assert_eq!(code(&args), 0);
    assert!(basis_path.exists());
}

#[test]
fn exit_codes_sample() {
    assert_eq!(code(&["sample", "--case", "phi-plus", "--grid", "t1=0:1:2"]), 0);
    assert_eq!(code(&["sample", "--case", "phi-a"]), 2);
    assert_eq!(code(&["sample", "--case", "phi-a", "--symbol", "sigmoid(("]), 2);
    assert_eq!(code(&["sample", "--case", "b-1n", "--symbol", "sigmoid"]), 2);
    assert_eq!(code(&["sample", "--case", "phi-plus", "--n", "13"]), 2);
    assert_eq!(code(&["sample", "--case", "phi-plus", "--grid", "t1=0:1:0"]), 2);
    assert_eq!(code(&["sample", "--case", "a-1n", "--symbol", "witch", "--grid", "t1=0:1:2", "--include-boundary"]), 2);
    assert_eq!(
        code(&["sample", "--case", "a-n1", "--symbol", "sigmoid", "--n", "2", "--grid", "t1=0:1:2,t2=1:2:2", "--tol", "1e-300"]),
        1
    );
}

#[test]
fn exit_codes_verify() {
    assert_eq!(code(&["verify", "--suite", "specfun"]), 0);
    assert_eq!(code(&["verify", "--suite", "specfun", "--smax", "1"]), 1);
    assert_eq!(code(&["verify", "--suite", "everything"]), 2);
    let out = stdout(&["verify", "--suite", "algebra", "--format", "json"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], true);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn exit_codes_eigencurves() {
    assert_eq!(code(&["eigencurves", "--n", "1", "--grid", "t1=-1:1:3"]), 0);
    assert_eq!(code(&["eigencurves", "--n", "1", "--grid", "t1=-1:1:1"]), 2);
    assert_eq!(code(&["eigencurves", "--n", "1", "--grid", "t1=1:-1:3"]), 2);
    assert_eq!(code(&["eigencurves", "--n", "0"]), 2);
}

#[test]
fn exit_codes_separate() {
    let out = stdout(&["separate", "--p", "0,1", "--q", "0,4"]);
    assert!(out.starts_with("separable, c2=-12"), "{out}");
    let out = stdout(&["separate", "--p", "1,1", "--q", "1,1"]);
    assert!(out.starts_with("not separable"), "{out}");
    let out = stdout(&["separate", "--p", "0,0.25", "--q", "0,0.25", "--v", "1,0", "--w", "0,1", "--n", "2"]);
    assert!(out.contains("states differ"), "{out}");
    let out = stdout(&["separate", "--p", "0,0.25", "--q", "0,0.25", "--v", "0.6,0:0.8", "--w", "0:0.6,-0.8", "--n", "2"]);
    assert!(out.contains("states coincide"), "{out}");
    assert_eq!(code(&["separate", "--p", "0", "--q", "0,4"]), 2);
    assert_eq!(code(&["separate", "--p", "0,-1", "--q", "0,4"]), 2);
    assert_eq!(code(&["separate", "--p", "0,1", "--q", "0,4", "--v", "1,0"]), 2);
}
