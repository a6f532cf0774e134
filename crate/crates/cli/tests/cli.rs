use std::process::{Command, Output};

fn tpbg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tpbg")).args(args).output().expect("run tpbg")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(o: &Output) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(o.stdout.as_slice()).records().map(|r| r.unwrap()).collect()
}

fn field(rec: &csv::StringRecord, i: usize) -> f64 {
    rec[i].parse().unwrap()
}

#[test]
fn psi_values() {
    let o = tpbg(&["psi", "--a", "2", "--c", "3", "--z", "5"]);
    assert!(o.status.success());
    assert!((field(&rows(&o)[0], 3) - 0.04).abs() < 1e-15);
    let o = tpbg(&["psi", "--a", "1", "--c", "1", "--z", "1"]);
    assert!((field(&rows(&o)[0], 3) - 0.5963473624).abs() < 1e-10);
}

#[test]
fn psi_domain_error_exits_2() {
    let o = tpbg(&["psi", "--a", "-1", "--c", "0", "--z", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("domain"));
    assert_eq!(tpbg(&["psi", "--a", "1"]).status.code(), Some(2));
    assert_eq!(tpbg(&["verify", "nonsense"]).status.code(), Some(2));
}

#[test]
fn classify_labels() {
    for (d, b, label) in [("0.5", "0.5", "TP_2 (finite)"), ("3", "0.4", "TP_infinity"), ("-0.5", "0.5", "TP_1 only")] {
        let o = tpbg(&["classify", "--d", d, "--b", b]);
        assert!(o.status.success());
        let r = rows(&o);
        assert_eq!(r.len(), 4);
        assert!(r.iter().all(|row| &row[2] == label), "{d} {b}");
    }
    let o = tpbg(&["classify", "--d", "0.5", "--b", "0.5", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["classification"]["verdict"], "TpFinite");
    assert_eq!(v["table"][1]["precedes"], true);
}

#[test]
fn scan_edge_cases() {
    let o = tpbg(&["scan", "--d-min", "1", "--d-max", "1", "--b-min", "0.5", "--b-max", "0.5"]);
    let r = rows(&o);
    assert_eq!(r.len(), 1);
    assert_eq!(&r[0][2], "infinity");
    assert_eq!(&r[0][6], "true");
    let o = tpbg(&["scan", "--d-min", "1", "--d-max", "0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "d,b,theoretical,empirical,capped,boundary,agree\n");
}

#[test]
fn scan_agrees_off_the_lattice() {
    let o = tpbg(&["scan", "--d-min", "-1.5", "--d-max", "1.5", "--b-min", "0.5", "--b-max", "1.5", "--step", "0.5", "--n-max", "2", "--z-points", "61"]);
    assert!(o.status.success());
    let r = rows(&o);
    assert_eq!(r.len(), 7 * 3);
    for row in r.iter().filter(|row| &row[5] == "false") {
        assert_eq!(&row[6], "true", "{row:?}");
    }
}

#[test]
fn verify_suites_pass() {
    for suite in ["kummer", "lemmas", "kummer2", "sylvester", "wronskian"] {
        let o = tpbg(&["verify", suite]);
        assert!(o.status.success(), "{suite}: {}", stdout(&o));
        assert!(rows(&o).iter().all(|r| &r[5] == "true"));
    }
    let o = tpbg(&["verify", "laws", "--trials", "200000", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["suite"], "laws");
}

#[test]
fn turan_reports() {
    let o = tpbg(&["turan", "cor1", "--grid", "default"]);
    assert!(o.status.success());
    let r = rows(&o);
    assert!(!r.is_empty() && r.iter().all(|row| &row[7] == "true"));
    let o = tpbg(&["turan", "cor2", "--a", "2", "--c", "2.5", "--x", "1"]);
    let r = rows(&o);
    assert_eq!((&r[0][0], &r[1][0]), ("corollary2", "tric1"));
    assert!(o.status.success());
    let o = tpbg(&["turan", "holder", "--samples", "200", "--seed", "3"]);
    assert!(o.status.success());
    assert_eq!(rows(&o).len(), 200);
    let o = tpbg(&["turan", "compare", "--a", "1", "--c", "-1", "--x", "10"]);
    assert_eq!(&rows(&o)[0][8], "corollary1");
    let o = tpbg(&["turan", "compare", "--a", "1", "--c", "-1", "--x", "0.1"]);
    assert_eq!(&rows(&o)[0][8], "cited");
    assert_eq!(tpbg(&["turan", "cor1", "--a", "0.5", "--c", "3", "--x", "1"]).status.code(), Some(2));
}

#[test]
fn falsify_reports_witness_or_failure() {
    let o = tpbg(&["turan", "falsify", "--a", "0.5", "--c", "3.0"]);
    assert!(o.status.success());
    let r = rows(&o);
    assert!(field(&r[0], 6) < 0.0 && &r[0][7] == "false");
    // The bound holds at (0.5, 2.0): no witness, exit 1.
    let o = tpbg(&["turan", "falsify", "--a", "0.5", "--c", "2.0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(field(&rows(&o)[0], 6) > 0.0);
}

#[test]
fn output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|i| dir.path().join(format!("run{i}.json"))).collect();
    for p in &paths {
        let o = tpbg(&["turan", "cor2", "--samples", "50", "--seed", "11", "--format", "json", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
        assert!(o.stdout.is_empty());
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
    let other = tpbg(&["turan", "cor2", "--samples", "50", "--seed", "12", "--format", "json"]);
    assert_ne!(a, other.stdout);
}

#[test]
fn thread_cap_is_respected() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_tpbg")).env("TPBG_THREADS", threads).args(["verify", "delta", "--trials", "20"]).output().unwrap()
    };
    let (one, two) = (run("1"), run("2"));
    assert!(one.status.success());
    assert_eq!(one.stdout, two.stdout);
    assert_eq!(run("zero").status.code(), Some(2));
}
