use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn qfn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfn")).args(args).env_remove("QFN_SEED").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn records(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).expect("one JSON object per line")).collect()
}

fn kind<'a>(rs: &'a [Value], name: &str) -> Vec<&'a Value> {
    rs.iter().filter(|r| r["record"] == name).collect()
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn build_and_sweep_exponentiation() {
    let doc = tmp("expn7_15.qc");
    let o = qfn(&["build", "expn", "--x", "7", "--N", "15", "--L", "2", "--variant", "e2k1", "--out", doc.to_str().unwrap(), "--format", "records"]);
    assert!(o.status.success());
    let rs = records(&o);
    let build = kind(&rs, "build")[0];
    assert_eq!(build["fits_machine"], true);
    assert!(build["pulses"].as_u64().unwrap() > 0);
    assert_eq!(kind(&rs, "manifest")[0]["outputs"][0], doc.to_str().unwrap());

    let o = qfn(&["simulate", doc.to_str().unwrap(), "--sweep", "alpha=0..3", "--format", "records"]);
    assert!(o.status.success());
    let betas: Vec<u64> = kind(&records(&o), "basis").iter().map(|r| r["outputs"]["beta"].as_u64().unwrap()).collect();
    assert_eq!(betas, [1, 7, 4, 13]);
}

#[test]
fn build_small_documents() {
    let o = qfn(&["build", "qft", "--L", "2", "--format", "records", "--check"]);
    assert!(o.status.success());
    let rs = records(&o);
    let b = kind(&rs, "build")[0];
    assert_eq!((b["instructions"].as_u64(), b["pulses"].as_u64()), (Some(3), Some(6)));

    let o = qfn(&["build", "fa", "--a", "0"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("cknot")).count(), 2);
    assert!(text.starts_with("qubits 3"));
}

#[test]
fn every_network_builds() {
    let cases: [&[&str]; 20] = [
        &["fa", "--a", "1"],
        &["muxfa", "--a0", "1", "--a1", "0", "--enables", "2"],
        &["muxha", "--a0", "0", "--a1", "1", "--enables", "1"],
        &["madd", "--a0", "3", "--a1", "9", "--K", "4", "--enables", "1"],
        &["lt", "--a", "5", "--K", "4"],
        &["xlt", "--a", "5", "--K", "4", "--enables", "1"],
        &["addn", "--a", "4", "--N", "13", "--enables", "2"],
        &["oaddn", "--a", "4", "--N", "13", "--enables", "1"],
        &["emul", "--a", "5", "--K", "4", "--enables", "1"],
        &["xor", "--K", "4", "--enables", "1"],
        &["muln", "--a", "7", "--N", "15", "--variant", "b2k3"],
        &["omuln", "--a", "7", "--N", "15", "--variant", "b2k1"],
        &["expn", "--x", "2", "--N", "21", "--L", "3", "--variant", "s3k1"],
        &["add-ltr", "--a", "6", "--K", "4", "--enables", "2"],
        &["madd-prime", "--a0", "2", "--a1", "11", "--K", "4"],
        &["oaddn-min", "--a", "7", "--N", "15", "--enables", "1"],
        &["expn-min", "--x", "7", "--N", "15", "--L", "2"],
        &["qft", "--L", "5", "--kind", "tilde", "--prune", "2"],
        &["expn15", "--x", "7", "--style", "custom"],
        &["mod2k", "--L", "4", "--K", "2"],
    ];
    for args in cases {
        let mut full = vec!["build"];
        full.extend_from_slice(args);
        full.extend_from_slice(&["--format", "records", "--check"]);
        let o = qfn(&full);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let rs = records(&o);
        let doc = kind(&rs, "build")[0]["document"].as_str().unwrap();
        assert!(qfn_core::ir::parse(doc).is_ok(), "{args:?}");
    }
    let o = qfn(&["build", "expn-min", "--x", "7", "--N", "15", "--L", "2", "--format", "records", "--check"]);
    let rs = records(&o);
    assert_eq!(kind(&rs, "build")[0]["qubits"], 11);
    assert_eq!(kind(&rs, "check-summary")[0]["passed"], 1);
}

#[test]
fn simulate_identity_and_vector_modes() {
    let doc = tmp("identity.qc");
    std::fs::write(&doc, "qubits 3\nreg r 0 1 2\n").unwrap();
    let o = qfn(&["simulate", doc.to_str().unwrap(), "--set", "r=5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "r=5 -> r=5");

    let qft = tmp("qft2.qc");
    assert!(qfn(&["build", "qft", "--L", "2", "--out", qft.to_str().unwrap()]).status.success());
    let o = qfn(&["simulate", qft.to_str().unwrap(), "--bits", "01", "--format", "records"]);
    let amps = records(&o).into_iter().filter(|r| r["record"] == "amplitude").collect::<Vec<_>>();
    assert_eq!(amps.len(), 4);
    for a in &amps {
        assert!((a["prob"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    }
    // Basis mode refuses phase gates.
    let o = qfn(&["simulate", qft.to_str().unwrap(), "--mode", "basis"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn summary_table() {
    let o = qfn(&["count", "--all", "--case", "avg", "--format", "records", "--check"]);
    assert!(o.status.success());
    let rs = records(&o);
    let pulses: Vec<i64> = kind(&rs, "leading").iter().map(|r| r["pulses"].as_i64().unwrap()).collect();
    assert_eq!(pulses, [198, 186, 206, 224, 373, 140]);
    assert_eq!(kind(&rs, "check-summary")[0]["passed"], 6);

    let o = qfn(&["count", "--variant", "e2k1", "--variant", "e2k2", "--K", "4", "--L", "8", "--format", "records", "--check"]);
    let totals: Vec<i64> = kind(&records(&o), "formula").iter().map(|r| r["pulses"].as_i64().unwrap()).collect();
    assert_eq!(totals, [15284, 14878]);

    let o = qfn(&["count", "--variant", "b2k2", "--K", "4", "--primitives"]);
    let text = stdout(&o);
    assert!(text.contains("MUXFA''''") && text.contains("[2,1,15]"));
}

#[test]
fn factoring_fifteen() {
    let o = qfn(&["factor", "--N", "15", "--x", "7", "--L", "2", "--trials", "10000", "--check", "--format", "records"]);
    assert!(o.status.success());
    let rs = records(&o);
    let f = kind(&rs, "factor")[0];
    assert!((f["success_rate"].as_f64().unwrap() - 0.5).abs() <= 0.02);
    assert_eq!(f["pulses"], 38);
    assert_eq!(f["factors"][0]["p"], 3);
    let o = qfn(&["factor", "--N", "15", "--x", "7", "--L", "2", "--source", "min-k1", "--trials", "100"]);
    assert!(o.status.success());
}

#[test]
fn transform_test() {
    let o = qfn(&["qft-test", "--L", "2", "--K", "1", "--check", "--format", "records"]);
    assert!(o.status.success());
    let rs = records(&o);
    let t = kind(&rs, "qft-test")[0];
    assert_eq!(t["pulses"], 13);
    assert!((t["p_y0_zero"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert_eq!(kind(&rs, "check-summary")[0]["passed"], 4);
}

#[test]
fn selfcheck_passes() {
    let o = qfn(&["selfcheck"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn runs_are_reproducible() {
    let args = ["count", "--variant", "b2k3", "--K", "6", "--trials", "12", "--format", "records"];
    let one = qfn(&[&args[..], &["--jobs", "1"]].concat());
    let many = qfn(&[&args[..], &["--jobs", "4"]].concat());
    let strip = |o: &Output| stdout(o).lines().filter(|l| !l.contains("\"manifest\"")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&one), strip(&many));
    let again = qfn(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(stdout(&one), stdout(&again));

    let sample = |seed: Option<&str>, env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_qfn"));
        c.args(["qft-test", "--L", "3", "--K", "1", "--shots", "16", "--format", "records"]).env_remove("QFN_SEED");
        if let Some(s) = seed {
            c.args(["--seed", s]);
        }
        if let Some(e) = env {
            c.env("QFN_SEED", e);
        }
        let rs = records(&c.output().unwrap());
        kind(&rs, "qft-test")[0]["seed"].as_u64().unwrap()
    };
    assert_eq!(sample(None, Some("77")), 77);
    assert_eq!(sample(Some("5"), Some("77")), 5);
    assert_ne!(sample(None, None), 77);
}

#[test]
fn manifest_file() {
    let path = tmp("manifest.json");
    let o = qfn(&["qft-test", "--L", "2", "--K", "1", "--seed", "9", "--manifest", path.to_str().unwrap()]);
    assert!(o.status.success());
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(m["command"], "qft-test");
    assert_eq!(m["seed"], 9);
    assert_eq!(m["parameters"]["l"], 2);
    assert!(m["tool_version"].is_string());
}

#[test]
fn bad_parameters_print_usage() {
    let o = qfn(&["build", "expn", "--N", "15", "--L", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("needs --x") && err.contains("Usage"), "{err}");
    let o = qfn(&["build", "expn", "--x", "7", "--N", "15", "--L", "2", "--variant", "zzz"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qfn(&["build", "expn", "--x", "5", "--N", "15", "--L", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qfn(&["simulate", "/nonexistent/circuit.qc"]);
    assert_eq!(o.status.code(), Some(2));
}
