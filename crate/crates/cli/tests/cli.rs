use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use re100::envelope::{partial_sum_hull, storage_requirement_lossy};
use re100::format::{read_bottlenecks, read_production_function, Document};
use re100::profiles::{ingest_csv, mix};
use re100::StorageTech;

fn re100(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_re100"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = re100(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

/// Data rows of a csv output, skipping header comments and the column row.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

const TWO_SOURCES: &str = "timestamp,demand,pv,wind\n\
    0,3,0,2\n1,4,1,1\n2,5,6,0\n3,5,8,1\n4,4,3,3\n5,3,0,4\n";

#[test]
fn block_fixture_has_one_flat_segment() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "prodfn",
            "--steps",
            "4",
            "--gen-pattern",
            "block",
            "--block-on",
            "0,1",
        ],
    );
    let pf = read_production_function(&Document::parse(&read(dir.path(), "prodfn.pf")).unwrap())
        .unwrap();
    assert_eq!(pf.segments.len(), 1);
    assert_eq!(pf.segments[0].slope, 0.0);
    assert_eq!(pf.segments[0].intercept, 0.5);
    assert!(dir.path().join("prodfn.svg").exists());
}

#[test]
fn pv_ratio_mixes_sources() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("two.csv");
    fs::write(&path, TWO_SOURCES).unwrap();
    ok(
        dir.path(),
        &[
            "prodfn",
            "--input",
            "two.csv",
            "--pv-ratio",
            "0.3",
            "--no-plot",
        ],
    );
    let set = ingest_csv(&path, "", "").unwrap();
    let g = mix(
        &[
            set.generation("pv").unwrap(),
            set.generation("wind").unwrap(),
        ],
        &[0.3, 0.7],
    )
    .unwrap();
    let want = partial_sum_hull(&set.demand, &g).unwrap();
    let got = read_production_function(&Document::parse(&read(dir.path(), "prodfn.pf")).unwrap())
        .unwrap();
    assert_eq!(got.vertices.len(), want.vertices.len());
    for (a, b) in got.vertices.iter().zip(&want.vertices) {
        assert!((a.0 - b.0).abs() < 1e-13 && (a.1 - b.1).abs() < 1e-13);
    }
    assert!(!dir.path().join("prodfn.svg").exists());
}

#[test]
fn efficiency_adds_lossy_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("two.csv");
    fs::write(&path, TWO_SOURCES).unwrap();
    ok(
        dir.path(),
        &[
            "prodfn", "--input", "two.csv", "--eff", "0.8", "--grid", "7",
        ],
    );
    let set = ingest_csv(&path, "", "").unwrap();
    let g = set.generation("pv").unwrap();
    let tech = StorageTech::symmetric(0.8).unwrap();
    let table = rows(&read(dir.path(), "prodfn.csv"));
    assert_eq!(table.len(), 7);
    for r in table {
        let x: f64 = r[0].parse().unwrap();
        match storage_requirement_lossy(&set.demand, g, x, &tech) {
            Ok(req) => assert!((r[2].parse::<f64>().unwrap() - req.x_s).abs() < 1e-14),
            Err(_) => assert_eq!(r[2], ""),
        }
    }
}

#[test]
fn contours_scale_with_cost() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("ex.csv"),
        "timestamp,demand,g\n0,1,1\n1,1,4\n2,1,1\n3,1,4\n",
    )
    .unwrap();
    ok(
        dir.path(),
        &[
            "costfn",
            "--input",
            "ex.csv",
            "--contour",
            "2.5",
            "--contour",
            "5",
        ],
    );
    let table = rows(&read(dir.path(), "costfn_contours.csv"));
    let (first, second): (Vec<_>, Vec<_>) = table.iter().partition(|r| r[1] == "2.5e0");
    assert_eq!(first.len(), second.len());
    for (a, b) in first.iter().zip(&second) {
        for c in 5..9 {
            let (x, y): (f64, f64) = (a[c].parse().unwrap(), b[c].parse().unwrap());
            assert!(x.is_infinite() && y.is_infinite() || y == 2.0 * x);
        }
    }
    let ray = first.iter().find(|r| r[4] == "ray").unwrap();
    assert_eq!(ray[5], "1e0");
    assert!(ray[6].parse::<f64>().unwrap() <= 20.0);
}

#[test]
fn costfn_reads_production_function_files() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "prodfn",
            "--steps",
            "4",
            "--gen-pattern",
            "block",
            "--block-on",
            "0,1",
            "--no-plot",
        ],
    );
    let out = ok(
        dir.path(),
        &["costfn", "--pf", "prodfn.pf", "--c-g", "1", "--c-s", "2"],
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("L = 2e0"));
}

#[test]
fn lp_options_respect_dominance() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "lp",
            "--steps",
            "12",
            "--gen-pattern",
            "seeded-noise-mix",
            "--step-hours",
            "730",
        ],
    );
    let table = rows(&read(dir.path(), "lp_summary.csv"));
    let l: Vec<f64> = table.iter().map(|r| r[3].parse().unwrap()).collect();
    assert_eq!(l.len(), 3);
    assert!(l[0] <= l[1].min(l[2]) + 1e-9);
    assert!(dir.path().join("lp-both_diagnostics.txt").exists());
}

#[test]
fn bottleneck_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "bottleneck",
            "--steps",
            "24",
            "--gen-pattern",
            "diurnal-sine",
            "--xg-sweep",
            "1:3:5",
        ],
    );
    let reports =
        read_bottlenecks(&Document::parse(&read(dir.path(), "bottleneck.bn")).unwrap()).unwrap();
    assert_eq!(reports.len(), 5);
    assert!(reports.windows(2).all(|w| w[1].x_s <= w[0].x_s));
}

#[test]
fn outputs_are_deterministic_and_carry_headers() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "gd-curve",
        "--steps",
        "30",
        "--gen-pattern",
        "seeded-noise-mix",
        "--seed",
        "7",
        "--out",
        "o",
    ];
    ok(a.path(), &args);
    ok(b.path(), &args);
    for f in [
        "gd-curve_boundary.csv",
        "gd-curve_points.csv",
        "gd-curve.svg",
    ] {
        let text = read(&a.path().join("o"), f);
        assert_eq!(text, read(&b.path().join("o"), f));
        assert!(text.contains(&format!("re100 {}", env!("CARGO_PKG_VERSION"))));
        assert!(text.contains("seed 7"));
    }
}

#[test]
fn config_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.conf"),
        "steps = 6\nquantity = storage\nxg = 2\ncontour = 3\n",
    )
    .unwrap();
    ok(
        dir.path(),
        &["oracle", "--config", "run.conf", "--xg", "1.5"],
    );
    let doc = Document::parse(&read(dir.path(), "oracle.oracle")).unwrap();
    assert_eq!(doc.top.get("quantity").unwrap(), "storage");
    let params = doc.sections("parameters").next().unwrap();
    assert_eq!(params.real("x_g").unwrap(), 1.5);
    assert!(read(dir.path(), "oracle.oracle").contains("--steps=6"));

    fs::write(dir.path().join("bad.conf"), "colour = red\n").unwrap();
    assert_eq!(
        re100(dir.path(), &["oracle", "--config", "bad.conf"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn oracle_agrees_with_prodfn() {
    let dir = tempfile::tempdir().unwrap();
    let common = [
        "--steps",
        "36",
        "--gen-pattern",
        "seeded-noise-mix",
        "--seed",
        "3",
    ];
    ok(
        dir.path(),
        &[&["oracle", "--xg", "1.7"], &common[..]].concat(),
    );
    ok(
        dir.path(),
        &[&["prodfn", "--no-plot"], &common[..]].concat(),
    );
    let value = Document::parse(&read(dir.path(), "oracle.oracle"))
        .unwrap()
        .top
        .real("value")
        .unwrap();
    let pf = read_production_function(&Document::parse(&read(dir.path(), "prodfn.pf")).unwrap())
        .unwrap();
    assert!((pf.eval(1.7).unwrap() - value).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        re100(dir.path(), &["prodfn", "--input", "missing.csv"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        re100(dir.path(), &["prodfn", "--no-such-flag"])
            .status
            .code(),
        Some(1)
    );
    fs::write(
        dir.path().join("bad.csv"),
        "timestamp,demand,g\n0,1,x\n1,1,1\n",
    )
    .unwrap();
    let out = re100(dir.path(), &["prodfn", "--input", "bad.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 2"));
    let infeasible = [
        "lp",
        "--variant",
        "lossy",
        "--steps",
        "8",
        "--fix",
        "x_g=0.5",
    ];
    assert_eq!(re100(dir.path(), &infeasible).status.code(), Some(2));
    assert_eq!(
        re100(dir.path(), &["oracle", "--steps", "2500"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(re100(dir.path(), &["--help"]).status.code(), Some(0));
}
