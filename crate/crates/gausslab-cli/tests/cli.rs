use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gausslab")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn field<'a>(csv: &'a str, name: &str) -> &'a str {
    csv.lines()
        .find_map(|l| l.strip_prefix(&format!("{name},")))
        .unwrap_or_else(|| panic!("no row {name} in\n{csv}"))
        .split(',')
        .next()
        .unwrap()
}

#[test]
fn exponents_at_one_sixth() {
    let out = stdout(&["exponents", "--theta", "1/6"]);
    assert!(out.starts_with("name,exact,decimal\n"));
    assert_eq!(field(&out, "delta0"), "242/153");
    assert_eq!(field(&out, "delta1"), "3/2");
    assert_eq!(field(&out, "delta2"), "255/172");
    assert_eq!(field(&out, "fixed_point"), "none");
}

#[test]
fn table_has_nine_rows_all_matching_their_printed_digits() {
    let out = stdout(&["table"]);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r.ends_with(",true")), "{out}");
    assert!(out.contains("242/153") && out.contains("34/23"));
}

#[test]
fn identities_pass_and_ignore_the_thread_count() {
    let a = stdout(&["identities", "--max-norm", "60"]);
    let b = stdout(&["identities", "--max-norm", "60", "--threads", "1"]);
    assert_eq!(a, b);
    assert!(a.lines().last().unwrap().starts_with("all,") && a.trim_end().ends_with(",PASS"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        &["large-sieve", "--m", "200", "--n", "200", "--trials", "4", "--seed", "9"][..],
        &["bilinear", "--a", "200"][..],
        &["curves", "--kind", "sigma", "--n", "6", "--format", "json"][..],
    ] {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
    let s1 = stdout(&["large-sieve", "--m", "200", "--n", "200", "--trials", "2", "--seed", "1"]);
    let s2 = stdout(&["large-sieve", "--m", "200", "--n", "200", "--trials", "2", "--seed", "2"]);
    assert_ne!(s1, s2);
}

#[test]
fn json_rows_carry_column_names() {
    let out = stdout(&["factor", "--format", "json", "--", "-3+4i"]);
    let v: serde_json::Value = serde_json::from_str(out.lines().next().unwrap()).unwrap();
    assert_eq!(v["prime"], "1+2i");
    assert_eq!(v["exponent"], 2);
}

#[test]
fn pinned_nu_rescales_the_bilinear_main_term() {
    let base = stdout(&["bilinear", "--a", "100"]);
    let half = stdout(&["bilinear", "--a", "100", "--nu", "1.5707963267948966"]);
    let main = |s: &str| s.lines().nth(1).unwrap().split(',').nth(4).unwrap().parse::<f64>().unwrap();
    assert!((main(&base) / main(&half) - 2.0).abs() < 1e-12);
}

#[test]
fn output_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("gausslab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("t.csv");
    let _ = stdout(&["table", "--out", path.to_str().unwrap()]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(&["table"]));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code().unwrap();
    assert_eq!(code(&["table"]), 0);
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["exponents", "--theta", "1/3"]), 1);
    assert_eq!(code(&["zagier", "2"]), 1);
    assert_eq!(code(&["spectral-sum", "--file", "/nonexistent/spectrum.txt", "--T", "5", "--X", "2"]), 2);
    assert_eq!(code(&["psi", "--x", "100", "--out", "/nonexistent/dir/psi.csv"]), 2);
    assert_eq!(code(&["exponents", "--theta", "one"]), 3);
    assert_eq!(code(&["factor", "1+"]), 3);
    assert_eq!(code(&["no-such-command"]), 64);
}

#[test]
fn spectral_file_input() {
    let dir = std::env::temp_dir().join(format!("gausslab-spec-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("spec.txt");
    std::fs::write(&path, "# three values\n4.0\n5.0\n\n6.0\n").unwrap();
    let out = stdout(&["spectral-sum", "--file", path.to_str().unwrap(), "--T", "5.5", "--X", "1"]);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[3], "2");
    assert_eq!(row[4].parse::<f64>().unwrap(), 2.0);
    std::fs::write(&path, "4.0\nseven\n").unwrap();
    assert_eq!(run(&["spectral-sum", "--file", path.to_str().unwrap(), "--T", "5", "--X", "2"]).status.code(), Some(3));
    std::fs::remove_dir_all(dir).unwrap();
}
