use std::process::{Command, Output};

fn hatcrystal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hatcrystal")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn iota_examples() {
    for (args, want) in [
        (vec!["iota", "--ell", "3", "0"], "1;1  h-fixed: true\n"),
        (vec!["iota", "--ell", "3", "0", "2"], "1,1;1,1  h-fixed: true\n"),
        (vec!["iota", "--ell", "3"], ";  h-fixed: true\n"),
    ] {
        let out = hatcrystal(&args);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(stdout(&out), want);
    }
}

#[test]
fn iota_invalid_path_reports_the_step() {
    let out = hatcrystal(&["iota", "--ell", "3", "0", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("step 1"));
    let out = hatcrystal(&["iota", "--ell", "3", "7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn graph_layer_counts() {
    let out = hatcrystal(&["graph", "--model", "hw", "--e", "3", "--charge", "0", "--depth", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("layer sizes: 1,1,2,2,4\n"));
    let out = hatcrystal(&["graph", "--model", "binf", "--e", "6", "--depth", "0"]);
    assert!(stdout(&out).contains("layer sizes: 1\n"));
}

#[test]
fn graph_export_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = |p: &std::path::Path| {
        vec!["graph", "--model", "hat-hw", "--ell", "3", "--depth", "3", "--format", "json", "--out"]
            .into_iter()
            .map(String::from)
            .chain([p.display().to_string()])
            .collect::<Vec<_>>()
    };
    for p in [&a, &b] {
        let argv = args(p);
        let out = hatcrystal(&argv.iter().map(|s| s.as_str()).collect::<Vec<_>>());
        assert_eq!(out.status.code(), Some(0));
        assert!(stdout(&out).contains("layer sizes: 1,1,2,2"));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let dot = dir.path().join("a.dot");
    let c = dir.path().join("c.json");
    let out = hatcrystal(&["export", "--in", a.to_str().unwrap(), "--format", "dot", "--out", dot.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph"));
    let out = hatcrystal(&["export", "--in", a.to_str().unwrap(), "--format", "json", "--out", c.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn io_errors_exit_3() {
    let out = hatcrystal(&["export", "--in", "/nonexistent/g.json", "--format", "dot", "--out", "/tmp/x.dot"]);
    assert_eq!(out.status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("g.json");
    let out = hatcrystal(&["graph", "--model", "binf", "--depth", "1", "--out", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_char_identities() {
    let out = hatcrystal(&["verify", "--check", "char_identities", "--ell", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("dim = 24 - 6 = 18"));
}

#[test]
fn verify_rank_two_guard() {
    let out = hatcrystal(&["verify", "--check", "crystal1", "--ell", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = hatcrystal(&["verify", "--check", "crystal1", "--ell", "2", "--allow-l2", "--depth", "2"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_unknown_check_is_a_config_error() {
    assert_eq!(hatcrystal(&["verify", "--check", "nope"]).status.code(), Some(2));
    assert_eq!(hatcrystal(&["verify", "--check", "crystal1", "--depth", "40"]).status.code(), Some(2));
}

#[test]
fn verify_quick_is_green_and_repeatable() {
    let a = hatcrystal(&["verify", "--profile", "quick"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let lines = stdout(&a);
    assert_eq!(lines.lines().count(), 13);
    for line in lines.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["status"], "pass");
    }
    let b = hatcrystal(&["verify", "--profile", "quick"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn thread_cap_does_not_change_output() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_hatcrystal"))
            .args(["graph", "--model", "hat-binf", "--ell", "3", "--depth", "4"])
            .env("HATCRYSTAL_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("4"));
}
