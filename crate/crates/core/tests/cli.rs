use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_uav-pathloss"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn sweep_h_rows_and_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.csv");
    let o = run(&[
        "sweep-h",
        "--altitude",
        "50",
        "--d-max",
        "100",
        "--d-step",
        "0.1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = read(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "D,H,d_los,d_ref_g,d_ref_b,num_wr,dphi_g_rad,dphi_b_rad,pl_db,clipped"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 1001);
    for r in &rows {
        let wr = r.split(',').nth(5).unwrap();
        assert!(["0", "1", "2"].contains(&wr));
    }
    assert!(!text.contains('\r'));
}

#[test]
fn sweep_v_counts_do_not_increase() {
    let o = run(&[
        "sweep-v",
        "--distance",
        "50",
        "--h-min",
        "5",
        "--h-max",
        "150",
        "--seed",
        "4",
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let wr: Vec<u8> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(5).unwrap().parse().unwrap())
        .collect();
    assert_eq!(wr.len(), 291);
    assert!(wr.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn sweep_v_with_huge_buildings_is_constant() {
    let o = run(&[
        "sweep-v",
        "--gamma",
        "1e7",
        "--distance",
        "10",
        "--h-max",
        "300",
    ]);
    let text = String::from_utf8(o.stdout).unwrap();
    let wr: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(5).unwrap())
        .collect();
    assert!(wr.iter().all(|w| *w == wr[0]));
}

#[test]
fn sweep_v_above_all_critical_altitudes() {
    // γ = 0.5 m keeps every critical altitude far below 100 m
    let o = run(&[
        "sweep-v", "--gamma", "0.5", "--h-min", "100", "--h-max", "200",
    ]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text
        .lines()
        .skip(1)
        .all(|l| l.split(',').nth(5) == Some("0")));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "scenario = \"dense-urban\"\naltitude = 80.0\nd_max = 10.0\nd_step = 1.0\n",
    )
    .unwrap();
    let o = run(&[
        "sweep-h",
        "--config",
        cfg.to_str().unwrap(),
        "--altitude",
        "60",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 12);
    assert!(text
        .lines()
        .skip(1)
        .all(|l| l.split(',').nth(1) == Some("60")));
}

#[test]
fn config_errors_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "seed = 1\nfrequncy = 4e9\n").unwrap();
    let o = run(&["sweep-h", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("frequncy"), "{err}");

    let o = run(&["sweep-h", "--d-step", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("d_step"));

    let o = run(&["sweep-h", "--d-min", "50", "--d-max", "10"]);
    assert!(String::from_utf8(o.stderr).unwrap().contains("d_max"));
}

#[test]
fn validate_requires_grid_and_trials() {
    let o = run(&["validate", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr)
        .unwrap()
        .contains("manhattan_width"));

    let o = run(&[
        "validate",
        "--trials",
        "0",
        "--manhattan-width",
        "80",
        "--manhattan-street",
        "18",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("trials"));
}

#[test]
fn validate_reports_pass() {
    let o = run(&[
        "validate",
        "--trials",
        "500",
        "--manhattan-width",
        "80",
        "--manhattan-street",
        "18",
        "--manhattan-seeds",
        "3",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("oracle_count_mismatches = 0"));
    assert!(text.contains("manhattan_mu_db = "));
    assert_eq!(text.lines().last(), Some("result = PASS"));
}

#[test]
fn sample_heights_minimum_and_fit() {
    let o = run(&["sample-heights", "--n", "2"]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 3);
    let o = run(&["sample-heights", "--n", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&[
        "sample-heights",
        "--scenario",
        "custom",
        "--alpha",
        "0.5",
        "--beta",
        "300",
        "--gamma",
        "87.3",
    ]);
    let err = String::from_utf8(o.stderr).unwrap();
    let gamma_hat: f64 = err
        .trim()
        .rsplit("gamma_hat = ")
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((gamma_hat - 87.3).abs() < 1.0);
}

#[test]
fn compare_summary_and_ecdf() {
    let dir = tempfile::tempdir().unwrap();
    let ecdf = dir.path().join("ecdf.csv");
    let summary = dir.path().join("summary.csv");
    let o = run(&[
        "compare",
        "--scenarios",
        "urban,urban",
        "--seeds",
        "3",
        "--out",
        ecdf.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = read(&summary);
    let rows: Vec<&str> = s.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0], rows[1]);
    assert!(read(&ecdf).starts_with("scenario,pl_db,cdf\n"));

    let o = run(&["compare", "--scenarios", "urban"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["sweep-h", "--seed", "17"],
        vec!["sweep-v", "--seed", "17"],
        vec!["compare", "--seed", "17", "--seeds", "4"],
        vec![
            "validate",
            "--seed",
            "17",
            "--trials",
            "200",
            "--manhattan-width",
            "80",
            "--manhattan-street",
            "18",
            "--manhattan-seeds",
            "2",
        ],
        vec!["sample-heights", "--seed", "17", "--n", "1000"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let a = dir.path().join(format!("{i}a"));
        let b = dir.path().join(format!("{i}b"));
        for p in [&a, &b] {
            let mut full = args.clone();
            full.extend(["--out", p.to_str().unwrap()]);
            assert!(run(&full).status.success(), "{args:?}");
        }
        assert_eq!(
            std::fs::read(&a).unwrap(),
            std::fs::read(&b).unwrap(),
            "{args:?}"
        );
    }
}
