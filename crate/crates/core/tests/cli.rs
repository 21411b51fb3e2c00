//! End-to-end checks of the `critcoupling` binary.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_critcoupling"))
        .args(args)
        .env("RUST_LOG", "off")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn help_lists_every_flag() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for flag in [
        "--builtin",
        "--param",
        "--potential-expr",
        "--potential-file",
        "--ell",
        "--n",
        "--methods",
        "--panels",
        "--points-per-panel",
        "--tail-eps",
        "--format",
        "--output",
        "--keep-going",
        "--config",
    ] {
        assert!(text.contains(flag), "missing {flag}");
    }
    for command in ["bounds", "reproduce", "spectrum"] {
        assert!(text.contains(command), "missing {command}");
    }
}

#[test]
fn configuration_errors_exit_with_2() {
    for args in [
        vec!["bounds", "--builtin", "nope"],
        vec!["bounds", "--potential-expr", "exp(-r"],
        vec!["bounds", "--builtin", "exponential", "--format", "xml"],
        vec!["bounds", "--builtin", "exponential", "--points-per-panel", "1"],
        vec!["bounds"],
        vec!["bounds", "--builtin", "exponential", "--potential-expr", "exp(-r)"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn numerical_failures_exit_with_3() {
    let out = run(&["bounds", "--potential-expr", "1/(1+r^2)"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("decays too slowly"));
}

#[test]
fn keep_going_prints_the_partial_table() {
    let args = [
        "bounds",
        "--potential-expr",
        "1/(1+r)^3.5",
        "--tail-eps",
        "1e-4",
        "--methods",
        "trace,shooting",
        "--n",
        "1,2",
    ];
    let strict = run(&args);
    assert_eq!(strict.status.code(), Some(3));
    assert!(strict.stdout.is_empty());

    let mut lenient = args.to_vec();
    lenient.push("--keep-going");
    let out = run(&lenient);
    assert_eq!(out.status.code(), Some(3));
    let table = stdout(&out);
    assert!(table.contains("| 0 |") && table.contains("failed"), "{table}");
}

#[test]
fn reproduction_of_the_square_well_table_succeeds() {
    let out = run(&["reproduce", "table1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1 + 36);
    assert!(!text.contains(",false"));
}

#[test]
fn reproduction_mismatches_exit_with_4() {
    let out = run(&["reproduce", "table1", "--panels", "2", "--points-per-panel", "4"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).lines().any(|l| l.starts_with("mismatch:")));
    assert!(stdout(&out).contains("NO"));
}

#[test]
fn spectrum_recovers_the_exact_critical_couplings() {
    for (name, mu) in [("square_well", "0.40528"), ("exponential", "0.69166")] {
        let out = run(&["spectrum", "--builtin", name, "--format", "csv"]);
        assert_eq!(out.status.code(), Some(0));
        let text = stdout(&out);
        let first = text.lines().nth(1).unwrap();
        assert!(first.starts_with(&format!("0,1,{mu},")), "{name}: {first}");
    }
}

#[test]
fn csv_and_json_carry_the_same_values() {
    let args = ["bounds", "--builtin", "gaussian", "--ell", "0-2", "--methods", "trace,glaser,exact", "--n", "1,3"];
    let csv = stdout(&run(&[&args[..], &["--format", "csv"]].concat()));
    let json = stdout(&run(&[&args[..], &["--format", "json"]].concat()));
    let json: serde_json::Value = serde_json::from_str(&json).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for (line, row) in lines.zip(rows) {
        let fields: Vec<&str> = line.split(',').collect();
        let cells = row[1].as_array().unwrap();
        for (k, cell) in cells.iter().enumerate() {
            let value = cell["value"].as_f64().unwrap();
            let shown: f64 = fields[1 + 2 * k].parse().unwrap();
            assert!(((shown - value) / value).abs() < 1e-4, "{}: {shown} vs {value}", header[1 + 2 * k]);
        }
    }
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["bounds", "--builtin", "wood_saxon", "--ell", "0,1", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.conf");
    std::fs::write(
        &config,
        "# square well, two channels\nbuiltin = square_well\nell = 0,1\nmethods = trace\nn = 1\nformat = json\n",
    )
    .unwrap();
    let config = config.to_str().unwrap();

    let out = run(&["bounds", "--config", config]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 2);

    let out = run(&["bounds", "--config", config, "--format", "csv", "--ell", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "ell,trace_n1,trace_n1_err");
    assert!(lines[1].starts_with("3,14,"), "{text}");

    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "colour = blue\n").unwrap();
    assert_eq!(run(&["bounds", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn output_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.md");
    let out = run(&["bounds", "--builtin", "square_well", "--n", "2", "--methods", "trace", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("| 0 | 2.4495 ±"), "{text}");
}

#[test]
fn tabulated_potentials_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("well.txt");
    std::fs::write(&path, "# y v\n0 1\n0.5 1\n1 1\n").unwrap();
    let out = run(&["bounds", "--potential-file", path.to_str().unwrap(), "--methods", "exact", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).lines().nth(1).unwrap().starts_with("0,2.4674,"));
}
