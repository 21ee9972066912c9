use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn kleinian(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kleinian")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn fixture(dir: &TempDir, name: &str) -> PathBuf {
    let p = path(dir, &format!("{name}.json"));
    let out = kleinian(&["fixtures", "--emit", name, s(&p)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    p
}

fn read_csv(p: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(p).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

/// Floating-point fields are written in scientific notation with 9 significant digits.
fn assert_nine_digits(field: &str) {
    let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
    let digits = mantissa.chars().filter(char::is_ascii_digit).count();
    assert!(field.contains('e') && digits == 9, "{field}");
}

#[test]
fn fixtures_list_and_emit() {
    let out = kleinian(&["fixtures", "--list"]);
    assert_eq!(code(&out), 0);
    let names: Vec<String> = String::from_utf8(out.stdout).unwrap().lines().map(String::from).collect();
    assert_eq!(names, ["cyclic_loxodromic", "schottky_f2", "fuchsian_lattice", "cantor_test"]);

    let dir = TempDir::new().unwrap();
    let g = fixture(&dir, "schottky_f2");
    let text = std::fs::read_to_string(g).unwrap();
    assert!(text.contains("\"model_dimension\": 2"));
    let c = path(&dir, "cantor.csv");
    assert_eq!(code(&kleinian(&["fixtures", "--emit", "cantor_test", s(&c)])), 0);
    let (header, rows) = read_csv(&c);
    assert_eq!(header, ["index", "witness", "x", "y"]);
    assert_eq!(rows.len(), 1 << 12);

    let bad = kleinian(&["fixtures", "--emit", "nope", s(&path(&dir, "x"))]);
    assert_eq!(code(&bad), 1);
}

#[test]
fn verify_schottky_passes() {
    let dir = TempDir::new().unwrap();
    let g = fixture(&dir, "schottky_f2");
    let report = path(&dir, "report.csv");
    let out = kleinian(&["verify", s(&g), "--depth", "10", "--out", s(&report)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (header, rows) = read_csv(&report);
    assert_eq!(
        header,
        [
            "group",
            "depth",
            "delta_est",
            "delta_method",
            "delta_window_low",
            "delta_window_high",
            "dim_est",
            "dim_kmin",
            "dim_kmax",
            "min_local_slope",
            "margin",
            "tolerance",
            "pass"
        ]
    );
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    assert_eq!(row[0], "schottky_f2");
    assert_eq!(row[1], "10");
    assert_eq!(row[12], "true");
    for i in [2, 6, 10] {
        assert_nine_digits(&row[i]);
    }
}

#[test]
fn verification_failure_exits_with_2() {
    let dir = TempDir::new().unwrap();
    let g = fixture(&dir, "schottky_f2");
    let report = path(&dir, "report.csv");
    let out = kleinian(&["verify", s(&g), "--depth", "10", "--tolerance", "0.001", "--out", s(&report)]);
    let (_, rows) = read_csv(&report);
    let margin: f64 = rows[0][10].parse().unwrap();
    // The depth-10 Schottky estimates differ by slightly more than 0.001.
    assert!(margin < -0.001, "{margin}");
    assert_eq!(code(&out), 2);
    assert_eq!(rows[0][12], "false");
}

#[test]
fn chain_rejects_small_t() {
    let dir = TempDir::new().unwrap();
    let g = fixture(&dir, "schottky_f2");
    let out = kleinian(&["chain", s(&g), "--s", "1.2", "--t", "0.2", "--out", s(&path(&dir, "c.csv"))]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("requires s > t > box-dimension estimate"), "{}", stderr(&out));
    assert!(!path(&dir, "c.csv").exists());
}

#[test]
fn chain_table() {
    let dir = TempDir::new().unwrap();
    let g = fixture(&dir, "schottky_f2");
    let c = path(&dir, "c.csv");
    let out = kleinian(&["chain", s(&g), "--s", "1.2", "--t", "0.9", "--out", s(&c)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (header, rows) = read_csv(&c);
    assert_eq!(
        header,
        ["k", "elements", "lhs", "series", "mid", "rhs", "tail", "packed_volume", "neighborhood_volume"]
    );
    assert!(!rows.is_empty());
    for row in &rows {
        row[2..].iter().for_each(|f| assert_nine_digits(f));
    }
}

#[test]
fn usage_errors_exit_with_1() {
    for args in [&["frobnicate"][..], &["verify", "--bogus"], &["verify"], &[]] {
        let out = kleinian(args);
        assert_eq!(code(&out), 1, "{args:?}");
        assert!(stderr(&out).to_lowercase().contains("usage"), "{args:?}");
    }
    assert_eq!(code(&kleinian(&["--help"])), 0);
}

#[test]
fn bad_group_files_exit_with_1() {
    let dir = TempDir::new().unwrap();
    let report = path(&dir, "r.csv");
    let missing = kleinian(&["verify", s(&path(&dir, "missing.json")), "--out", s(&report)]);
    assert_eq!(code(&missing), 1);
    let bad = path(&dir, "bad.json");
    std::fs::write(&bad, "{\"name\": \"x\", \"model_dimension\": 4}").unwrap();
    let out = kleinian(&["verify", s(&bad), "--out", s(&report)]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).starts_with("error: "));
    assert!(!report.exists());
}

#[test]
fn subcommand_tables() {
    let dir = TempDir::new().unwrap();
    let g = fixture(&dir, "fuchsian_lattice");

    let orbit = path(&dir, "orbit.csv");
    assert_eq!(code(&kleinian(&["orbit", s(&g), "--depth", "4", "--out", s(&orbit)])), 0);
    let (header, rows) = read_csv(&orbit);
    assert_eq!(
        header,
        ["index", "word", "word_length", "x", "y", "origin_distance", "displacement", "radial_gap", "shell"]
    );
    assert_eq!(rows[0][1], "e");
    assert_eq!(rows[0][2], "0");
    assert_nine_digits(&rows[1][3]);

    let series = path(&dir, "series.csv");
    let out = kleinian(&["poincare", s(&g), "--depth", "6", "--s-grid", "0.5:1.5:0.25", "--out", s(&series)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (header, rows) = read_csv(&series);
    assert_eq!(header, ["s", "truncation_word_length", "value", "central_term"]);
    assert_eq!(rows.len(), 5);
    assert_nine_digits(&rows[0][2]);

    let points = path(&dir, "points.csv");
    let image = path(&dir, "points.pgm");
    let out = kleinian(&["limitset", s(&g), "--depth", "6", "--out", s(&points), "--image", s(&image)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (header, rows) = read_csv(&points);
    assert_eq!(header, ["index", "witness", "x", "y"]);
    assert!(!rows.is_empty());
    assert!(std::fs::read(&image).unwrap().starts_with(b"P5"));

    let scales = path(&dir, "scales.csv");
    let out = kleinian(&["boxdim", s(&g), "--depth", "8", "--kmin", "1", "--kmax", "5", "--out", s(&scales)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (header, rows) = read_csv(&scales);
    assert_eq!(header, ["k", "r", "cell_count", "volume", "local_slope"]);
    assert_eq!(rows.len(), 5);

    let out = kleinian(&["exponent", s(&g), "--depth", "8", "--method", "counting_fit"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().nth(1).unwrap();
    assert!(line.contains(",counting_fit,"));
    assert_nine_digits(line.split(',').next().unwrap());
    assert_eq!(code(&kleinian(&["exponent", s(&g), "--method", "guess"])), 1);
}

#[test]
fn three_dimensional_orbit_has_z_column() {
    let dir = TempDir::new().unwrap();
    let g = path(&dir, "ball.json");
    std::fs::write(
        &g,
        r#"{
  "name": "ball",
  "model_dimension": 3,
  "chart": "halfspace",
  "generators": [
    [[3.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.3333333333333333, 0.0]],
    [[1.25, 0.0], [0.75, 0.0], [0.75, 0.0], [1.25, 0.0]]
  ]
}"#,
    )
    .unwrap();
    let orbit = path(&dir, "orbit.csv");
    let out = kleinian(&["orbit", s(&g), "--depth", "3", "--out", s(&orbit)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (header, rows) = read_csv(&orbit);
    assert_eq!(&header[3..6], ["x", "y", "z"]);
    assert_eq!(rows.len(), 1 + 4 + 12 + 36);
}

#[test]
fn outputs_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let g = fixture(&dir, "schottky_f2");
    let run = |name: &str, threads: &str| {
        let p = path(&dir, name);
        let out = Command::new(env!("CARGO_BIN_EXE_kleinian"))
            .env("KLEINIAN_THREADS", threads)
            .args(["verify", s(&g), "--depth", "8", "--out", s(&p)])
            .output()
            .unwrap();
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        std::fs::read(p).unwrap()
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "1");
    let c = run("c.csv", "4");
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn invalid_thread_count() {
    for value in ["0", "many"] {
        let out = Command::new(env!("CARGO_BIN_EXE_kleinian"))
            .env("KLEINIAN_THREADS", value)
            .args(["fixtures", "--list"])
            .output()
            .unwrap();
        assert_eq!(code(&out), 1);
        assert!(stderr(&out).contains("KLEINIAN_THREADS"));
    }
}
