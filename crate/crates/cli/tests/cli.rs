use std::path::Path;
use std::process::{Command, Output};

fn hpdiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hpdiv"))
        .args(args)
        .env_remove("HPDIV_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn toy(dir: &Path) -> String {
    let path = dir.join("toy.csv");
    std::fs::write(&path, "x,y,label\n0,0,a\n1,0,b\n2,0,a\n3,0,b\n").unwrap();
    path.to_str().unwrap().to_string()
}

/// Header and first data row, skipping the metadata comment.
fn first_row(text: &str) -> (Vec<String>, Vec<String>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let split = |l: &str| l.split(',').map(str::to_string).collect::<Vec<_>>();
    (split(lines.next().unwrap()), split(lines.next().unwrap()))
}

#[test]
fn estimate_on_alternating_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = toy(dir.path());
    let out = hpdiv(&[
        "estimate",
        "--input",
        &input,
        "--label-col",
        "label",
        "--classes",
        "a,b",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("# hpdiv "));
    assert!(text.lines().next().unwrap().contains("--classes a,b"));
    let (header, row) = first_row(&text);
    assert_eq!(header, ["m", "n", "R", "d_hat_raw", "d_hat", "a_hat"]);
    assert_eq!(row[2], "3");
    assert_eq!(row[4], "0.0");
}

#[test]
fn bootstrap_adds_interval_columns() {
    let dir = tempfile::tempdir().unwrap();
    let input = toy(dir.path());
    let out = hpdiv(&[
        "estimate",
        "--input",
        &input,
        "--label-col",
        "label",
        "--classes",
        "a,b",
        "--bootstrap",
        "200",
        "--level",
        "0.9",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (header, row) = first_row(&stdout(&out));
    assert_eq!(&header[6..], ["low", "point", "high"]);
    assert_eq!(row.len(), 9);
}

#[test]
fn usage_and_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let input = toy(dir.path());
    let missing = hpdiv(&["estimate", "--input", &input, "--label-col", "label"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("--classes"));

    let schema = hpdiv(&[
        "estimate",
        "--input",
        &input,
        "--label-col",
        "kind",
        "--classes",
        "a,b",
    ]);
    assert_eq!(schema.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&schema.stderr).contains("kind"));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x,label\n1,a\nzz,b\n").unwrap();
    let parse = hpdiv(&[
        "estimate",
        "--input",
        bad.to_str().unwrap(),
        "--label-col",
        "label",
        "--classes",
        "a,b",
    ]);
    assert_eq!(parse.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&parse.stderr).contains("row 3"));

    let threads = Command::new(env!("CARGO_BIN_EXE_hpdiv"))
        .arg("table2")
        .env("HPDIV_THREADS", "lots")
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(2));
}

#[test]
fn verify_structure_passes_and_margins_are_nonnegative() {
    let out = hpdiv(&["verify-structure", "--trials", "40", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "margin").unwrap();
    let rows: Vec<String> = lines.map(str::to_string).collect();
    assert_eq!(rows.len(), 40 * 5);
    for r in rows {
        assert!(r.split(',').nth(col).unwrap().parse::<i64>().unwrap() >= 0);
    }
}

#[test]
fn table2_and_theory_commands() {
    let out = hpdiv(&["table2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out).lines().filter(|l| !l.starts_with('#')).count(),
        8
    );

    let out = hpdiv(&[
        "epsilon-star",
        "--total",
        "1000",
        "--dim",
        "2",
        "--t",
        "2e7",
    ]);
    let (header, row) = first_row(&stdout(&out));
    let bound: f64 = row[header.iter().position(|h| h == "bound").unwrap()]
        .parse()
        .unwrap();
    assert!((bound - 0.3439).abs() / 0.3439 < 0.05);

    let out = hpdiv(&["heatmap", "--n-grid", "100,1000", "--d-grid", "2,3"]);
    assert_eq!(stdout(&out).lines().count(), 1 + 1 + 4);

    let out = hpdiv(&["bounds", "--total", "1000", "--dim", "2", "--delta", "0.05"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, row) = first_row(&stdout(&out));
    let v: f64 = row[header.iter().position(|h| h == "variance_bound").unwrap()]
        .parse()
        .unwrap();
    assert_eq!(v, 0.576);
}

#[test]
fn simulate_writes_csv_and_sidecar_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let out = Command::new(env!("CARGO_BIN_EXE_hpdiv"))
            .args([
                "simulate", "--grid", "30,60", "--trials", "8", "--seed", "7", "--output",
            ])
            .arg(&path)
            .env("HPDIV_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let csv = std::fs::read_to_string(&path).unwrap();
        let json = std::fs::read_to_string(dir.path().join(format!("{name}.json"))).unwrap();
        (csv, json)
    };
    let (a, ja) = run("a.csv", "1");
    let (b, jb) = run("b.csv", "3");
    let body = |s: &str| s.lines().skip(1).collect::<Vec<_>>().join("\n");
    assert_eq!(body(&a), body(&b));
    assert_eq!(ja, jb);
    assert_eq!(body(&a).lines().count(), 3);
}

#[test]
fn simulate_reads_toml_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        r#"
label = "t_vs_t"
n_grid = [20, 40]
trials = 4
f0 = { kind = "student_t", dim = 2 }
f1 = { kind = "student_t", dim = 2 }
"#,
    )
    .unwrap();
    let out = hpdiv(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("t_vs_t,20,"));

    std::fs::write(&cfg, "trials = 4\n").unwrap();
    let out = hpdiv(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn feature_sweep_rows() {
    let dir = tempfile::tempdir().unwrap();
    let input = toy(dir.path());
    let out = hpdiv(&[
        "feature-sweep",
        "--input",
        &input,
        "--label-col",
        "label",
        "--classes",
        "a,b",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out).lines().filter(|l| !l.starts_with('#')).count(),
        3
    );
}

#[test]
fn compare_dists_has_three_curves() {
    let out = hpdiv(&["compare-dists", "--grid", "20,40", "--trials", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for label in ["gaussian,", "gamma_copula,", "student_t,"] {
        assert_eq!(text.lines().filter(|l| l.starts_with(label)).count(), 2);
    }
}
