use std::fs;
use std::process::Command;

use wamlab_cli::run;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("wamlab").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// Data lines of a CSV output, header included.
fn body(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

fn meta<'a>(csv: &'a str, key: &str) -> Option<&'a str> {
    csv.lines().find_map(|l| l.strip_prefix(&format!("# {key}=")))
}

#[test]
fn wam_of_72_at_one() {
    let (code, out, _) = invoke(&["wam", "72", "--s", "1"]);
    assert_eq!(code, 0);
    let row = body(&out)[1];
    let value: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
    assert!((value - 2.386852807).abs() < 1e-9);
}

#[test]
fn acrit_of_30() {
    let (code, out, _) = invoke(&["acrit", "30"]);
    assert_eq!(code, 0);
    let a: f64 = body(&out)[1].split(',').nth(4).unwrap().parse().unwrap();
    assert!((a - 1.195).abs() < 0.005, "{a}");
}

#[test]
fn metadata_header() {
    let (_, out, _) = invoke(&["--seed", "7", "acrit", "30"]);
    assert_eq!(meta(&out, "log_base"), Some("natural"));
    assert_eq!(meta(&out, "seed"), Some("7"));
    assert_eq!(meta(&out, "version"), Some(wamlab_cli::VERSION));
    assert!(meta(&out, "cap").is_some());

    let (_, json, _) = invoke(&["acrit", "30", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(doc["metadata"]["log_base"], "natural");
    assert_eq!(doc["columns"][4], "a_crit");
    assert_eq!(doc["rows"][0][0], 30);
}

#[test]
fn exit_codes() {
    let (code, _, err) = invoke(&["factor", "0"]);
    assert_eq!(code, 1);
    assert!(err.contains("cannot factor 0"));
    assert_eq!(invoke(&["frobnicate"]).0, 1);
    assert_eq!(invoke(&["wam", "12"]).0, 1);
    assert_eq!(invoke(&["wam", "12", "--s", "1,2,3"]).0, 1);
    assert_eq!(invoke(&["zeros", "6", "--re", "1:-1", "--im", "0:10"]).0, 1);
    assert_eq!(invoke(&["poly-triple", "--q", "2", "--n", "20"]).0, 1);
    let (code, out, _) = invoke(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("Usage"));
    assert_eq!(invoke(&["--version"]).0, 0);

    // (2^61 - 1) · 2305843009213693921, both prime.
    let hard = "5316911983139663417828251946283171871";
    assert_eq!(invoke(&["factor", hard, "--rho-budget", "10000"]).0, 2);
    assert_eq!(invoke(&["poly-triple", "--q", "2", "--n", "27"]).0, 2);
}

#[test]
fn negative_arguments() {
    let (code, out, _) = invoke(&["wam", "6", "--s", "-1,-2.5"]);
    assert_eq!(code, 0, "{out}");
    let row: Vec<&str> = body(&out)[1].split(',').collect();
    assert_eq!((row[1], row[2]), ("-1.0", "-2.5"));
    let (code, out, _) = invoke(&["zeros", "6", "--re", "-1:1", "--im", "-10:10", "--verify"]);
    assert_eq!(code, 0);
    assert_eq!(body(&out).len(), 3);
    assert_eq!(meta(&out, "argument_principle_count"), Some("2"));
}

#[test]
fn factor_and_cyclo() {
    let (_, out, _) = invoke(&["factor", "1024"]);
    assert_eq!(body(&out), vec!["prime,exponent", "2,10"]);
    let (_, out, _) = invoke(&["cyclo", "--p", "5", "--s", "1"]);
    let v: f64 = body(&out)[1].split(',').nth(3).unwrap().parse().unwrap();
    assert!((v - 11.0 / 7.0).abs() < 1e-12);
    assert_eq!(invoke(&["cyclo", "--p", "4", "--s", "1"]).0, 1);
}

#[test]
fn dataset_commands() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("triples.txt");
    fs::write(&path, "# a b c\n1 8 9\n3 125 128\r\n2 2 4\n5 27 32 # comment\n").unwrap();
    let path = path.to_str().unwrap();

    let (code, out, err) = invoke(&["em-hist", "--triples", path]);
    assert_eq!(code, 0);
    assert_eq!(body(&out), vec!["e_m,count", "1,1", "2,1", "3,1"]);
    assert_eq!(meta(&out, "skipped_lines"), Some("1"));
    assert!(err.contains(":4:"));

    let (code, out, _) = invoke(&["acrit-scan", "--triples", path]);
    assert_eq!(code, 0);
    assert_eq!(body(&out).len(), 4);

    let (code, out, _) =
        invoke(&["heatmap", "--triples", path, "--re=-1:1", "--im=-1:1", "--step", "0.5", "--cap", "100"]);
    assert_eq!(code, 0);
    assert_eq!(body(&out).len(), 1 + 25);
    assert_eq!(meta(&out, "cap"), Some("100.0"));

    assert_eq!(invoke(&["em-hist"]).0, 1);
    assert_eq!(invoke(&["em-hist", "--triples", path, "--gen", "10"]).0, 1);
    assert_eq!(invoke(&["em-hist", "--triples", "/nonexistent/file"]).0, 1);
}

#[test]
fn generated_histogram() {
    let (code, out, _) = invoke(&["em-hist", "--gen", "1000"]);
    assert_eq!(code, 0);
    let total: usize = body(&out)[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(meta(&out, "triples").unwrap().parse::<usize>().unwrap(), total);
}

#[test]
fn mersenne_and_bounds() {
    let (code, out, _) = invoke(&["mersenne", "--nmax", "12", "--s", "0.5"]);
    assert_eq!(code, 0);
    let rows = body(&out);
    assert_eq!(rows.len(), 1 + 11);
    assert!(rows[1..].iter().all(|r| r.ends_with(",true")));

    let (code, out, _) = invoke(&["bounds-check", "--nmax", "20"]);
    assert_eq!(code, 0);
    assert_eq!(body(&out).len(), 1 + 19 * 12);
    assert_eq!(meta(&out, "failures"), Some("0"));
    assert_eq!(invoke(&["bounds-check", "--re-values", "1.5"]).0, 1);
}

#[test]
fn poly_triple_and_probe() {
    let (code, out, _) = invoke(&["poly-triple", "--q", "3", "--n", "8"]);
    assert_eq!(code, 0);
    assert!(body(&out)[1].starts_with("3,8,2,\""));
    let (code, out, _) = invoke(&["critical-line", "30", "--bmax", "50"]);
    assert_eq!(code, 0);
    assert!(body(&out)[1].starts_with("30,"));
    assert_eq!(invoke(&["critical-line", "6", "--bmax", "50"]).0, 1);
}

#[test]
fn output_files_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["csv", "json"] {
        let mut contents = Vec::new();
        for run_id in 0..2 {
            let path = dir.path().join(format!("out-{run_id}.{format}"));
            let args = [
                "heatmap",
                "--gen",
                "300",
                "--step",
                "0.25",
                "--seed",
                "3",
                "--format",
                format,
                "--output",
                path.to_str().unwrap(),
            ];
            let (code, stdout, _) = invoke(&args);
            assert_eq!(code, 0);
            assert!(stdout.is_empty());
            contents.push(fs::read(&path).unwrap());
        }
        assert_eq!(contents[0], contents[1]);
        assert!(contents[0].is_ascii());
        assert!(!contents[0].contains(&b'\r'));
    }
}

#[test]
fn binary_exit_codes_and_threads() {
    let bin = env!("CARGO_BIN_EXE_wamlab");
    let status =
        |threads: &str, args: &[&str]| Command::new(bin).args(args).env("WAMLAB_THREADS", threads).output().unwrap();
    let ok = status("2", &["acrit", "30"]);
    assert!(ok.status.success());
    assert!(String::from_utf8(ok.stdout).unwrap().contains("a_crit"));
    assert_eq!(status("zero", &["acrit", "30"]).status.code(), Some(1));
    assert_eq!(status("1", &["factor", "0"]).status.code(), Some(1));
    assert_eq!(status("1", &["poly-triple", "--q", "2", "--n", "27"]).status.code(), Some(2));
}
