use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mgfrft::geo::{build_station_graph, read_stations_csv, KnnConfig};
use mgfrft::graph::{build_path, laplacian, read_graph_json, write_graph_json};
use mgfrft::linalg::{eig_sym, fractional_basis};
use mgfrft::transform::{l_mgfrft, read_coefficients_csv, read_signal_csv, write_coefficients_csv, TransformKind};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mgfrft")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_path_graph(dir: &Path, name: &str, n: usize) -> PathBuf {
    let path = dir.join(name);
    ok(&["graph", "path", &n.to_string(), "--out", p(&path)]);
    path
}

const STATIONS: &str = "id,lat_deg,lon_deg\nA,40.7,-74.0\nB,42.4,-71.1\nC,39.9,-75.2\nD,38.9,-77.0\nE,41.8,-87.6\nF,33.7,-84.4\n";

#[test]
fn graph_generators() {
    let path = read_graph_json(ok(&["graph", "path", "365"]).as_bytes()).unwrap();
    assert_eq!((path.n(), path.edge_count()), (365, 364));
    let grid = read_graph_json(ok(&["graph", "grid", "2", "2"]).as_bytes()).unwrap();
    assert_eq!(grid.edge_count(), 4);
    assert!(grid.degrees().iter().all(|&d| d == 2.0));
    assert!(grid.is_connected());
}

#[test]
fn knn_graph_matches_library_and_hand_checks() {
    let dir = tempfile::tempdir().unwrap();
    let st = dir.path().join("st.csv");
    fs::write(&st, STATIONS).unwrap();
    let got = read_graph_json(ok(&["graph", "knn", "--stations", p(&st), "--k", "2"]).as_bytes()).unwrap();
    let want = build_station_graph(&read_stations_csv(STATIONS.as_bytes()).unwrap(), &KnnConfig::new(2)).unwrap();
    let mut a = Vec::new();
    let mut b = Vec::new();
    write_graph_json(&mut a, &got).unwrap();
    write_graph_json(&mut b, &want).unwrap();
    assert_eq!(a, b);
    // k = n - 1 gives the complete graph; k = n is rejected as a usage error.
    let complete = read_graph_json(ok(&["graph", "knn", "--stations", p(&st), "--k", "5"]).as_bytes()).unwrap();
    assert_eq!(complete.edge_count(), 15);
    assert_eq!(run(&["graph", "knn", "--stations", p(&st), "--k", "6"]).status.code(), Some(2));
}

#[test]
fn unit_alpha_constant_signal_has_one_coefficient() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_path_graph(dir.path(), "p4.json", 4);
    let sig = dir.path().join("f.csv");
    fs::write(&sig, "1,1,1,1\n1,1,1,1\n1,1,1,1\n1,1,1,1\n").unwrap();
    let factors = format!("{},{}", p(&g), p(&g));
    let text = ok(&["transform", "--kind", "laplacian", "--alpha", "1", "--factors", &factors, "--signal", p(&sig)]);
    let coef = read_coefficients_csv(text.as_bytes(), 1.0, TransformKind::Laplacian).unwrap();
    for (index, z) in coef.iter_indexed() {
        if index.as_slice() == [0, 0] {
            assert!((z.re - 4.0).abs() < 1e-12);
        } else {
            assert!(z.norm() < 1e-12, "{index} = {z}");
        }
    }
}

#[test]
fn forward_then_inverse_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let g1 = write_path_graph(dir.path(), "p5.json", 5);
    let g2 = dir.path().join("c3.json");
    ok(&["graph", "cycle", "3", "--out", p(&g2)]);
    let sig = dir.path().join("f.csv");
    ok(&["signal", "random", "--dims", "5,3", "--seed", "7", "--out", p(&sig)]);
    let coef = dir.path().join("c.csv");
    let back = dir.path().join("back.csv");
    let factors = format!("{},{}", p(&g1), p(&g2));
    for kind in ["laplacian", "adjacency"] {
        let common = ["transform", "--kind", kind, "--alpha", "0.7", "--factors", &factors];
        ok(&[&common[..], &["--signal", p(&sig), "--out", p(&coef)]].concat());
        ok(&[&common[..], &["--inverse", "--coefficients", p(&coef), "--out", p(&back)]].concat());
        let f = read_signal_csv(fs::File::open(&sig).unwrap()).unwrap().real_part();
        let r = read_signal_csv(fs::File::open(&back).unwrap()).unwrap().real_part();
        let err = f.iter().zip(r.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{kind}: {err}");
    }
}

#[test]
fn transform_output_is_byte_identical_to_library() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_path_graph(dir.path(), "p8.json", 8);
    let sig = dir.path().join("f.csv");
    ok(&["signal", "random", "--dims", "8,8", "--seed", "42", "--out", p(&sig)]);
    let table = dir.path().join("table.csv");
    let factors = format!("{},{}", p(&g), p(&g));
    let cli = ok(&["transform", "--alpha", "0.9", "--factors", &factors, "--signal", p(&sig), "--spectrum-table", p(&table)]);

    let f = read_signal_csv(fs::File::open(&sig).unwrap()).unwrap();
    let basis = fractional_basis(&eig_sym(&laplacian(&build_path(8).unwrap()).unwrap()).unwrap(), 0.9).unwrap();
    let bases = vec![basis.clone(), basis];
    let coef = l_mgfrft(&f, &bases).unwrap();
    let eig: Vec<Vec<f64>> = bases.iter().map(|b| b.r().iter().map(|z| z.re).collect()).collect();
    let mut lib = Vec::new();
    write_coefficients_csv(&mut lib, &coef, &eig).unwrap();
    assert_eq!(cli.as_bytes(), lib.as_slice());

    let table = fs::read_to_string(&table).unwrap();
    assert!(table.starts_with("l1,l2,eigsum,re,im,magnitude\n0,0,"));
    assert_eq!(table.lines().count(), 65);
}

#[test]
fn compression_single_run_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let g1 = write_path_graph(dir.path(), "p12.json", 12);
    let g2 = write_path_graph(dir.path(), "p10.json", 10);
    let sig = dir.path().join("f.csv");
    ok(&["signal", "smooth", "--dims", "12,10", "--seed", "3", "--out", p(&sig)]);
    let factors = format!("{},{}", p(&g1), p(&g2));

    let report: Value = serde_json::from_str(&ok(&[
        "compress", "--gamma", "0.1", "--alpha", "0.95", "--factors", &factors, "--signal", p(&sig),
    ]))
    .unwrap();
    assert_eq!(report["retained"], 12);
    for key in ["gamma", "alpha", "re", "psnr", "imag_residue"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }

    let lossless: Value = serde_json::from_str(&ok(&[
        "compress", "--gamma", "0.999", "--alpha", "0.9", "--factors", &factors, "--signal", p(&sig),
    ]))
    .unwrap();
    // Keeping every coefficient reconstructs up to round-off, so the MSE is
    // tiny but not exactly zero and PSNR is huge rather than the "inf" sentinel.
    assert!(lossless["re"].as_f64().unwrap() < 1e-9);
    assert!(lossless["psnr"].as_f64().unwrap() > 200.0);

    let csv = dir.path().join("sweep.csv");
    let sweep: Value = serde_json::from_str(&ok(&[
        "compress", "--factors", &factors, "--signal", p(&sig), "--out", p(&csv),
        "--sweep", "gammas=0.02,0.05,0.10,0.15,0.20,0.25,0.30", "alphas=0.95,0.85",
    ]))
    .unwrap();
    let rows = sweep.as_array().unwrap();
    assert_eq!(rows.len(), 14);
    for per_alpha in rows.chunks(7) {
        for w in per_alpha.windows(2) {
            assert!(w[1]["re"].as_f64().unwrap() <= w[0]["re"].as_f64().unwrap());
        }
    }
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 15);
}

#[test]
fn usage_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_path_graph(dir.path(), "p3.json", 3);
    let missing = dir.path().join("nope.csv");
    let out = run(&["compress", "--gamma", "0.1", "--alpha", "0.9", "--factors", p(&g), "--signal", p(&missing)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.csv"));
    assert_eq!(run(&["transform", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["graph", "grid", "2"]).status.code(), Some(2));
    assert_eq!(run(&["bench", "--sizes", "65"]).status.code(), Some(2));
}

#[test]
fn shape_mismatch_is_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_path_graph(dir.path(), "p3.json", 3);
    let sig = dir.path().join("f.csv");
    fs::write(&sig, "1,2\n3,4\n").unwrap();
    let out = run(&["transform", "--alpha", "0.5", "--factors", &format!("{},{}", p(&g), p(&g)), "--signal", p(&sig)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn bench_reports_gate_and_timings() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let r: Value = serde_json::from_str(&ok(&["bench", "--sizes", "8", "--csv", p(&csv)])).unwrap();
    assert!(r["gate_max_error"].as_f64().unwrap() < 1e-8);
    for key in ["t_factorized", "t_dense", "t_eig_factor", "t_eig_full"] {
        assert!(r[key].as_f64().unwrap() > 0.0);
    }
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 2);
}

#[test]
fn signals_are_seeded() {
    let a = ok(&["signal", "random", "--dims", "3,4", "--seed", "1"]);
    assert_eq!(a, ok(&["signal", "random", "--dims", "3,4", "--seed", "1"]));
    assert_ne!(a, ok(&["signal", "random", "--dims", "3,4", "--seed", "2"]));
    let cube = ok(&["signal", "smooth", "--dims", "2,3,4"]);
    assert!(cube.starts_with("dims,2,3,4\n"));
    assert_eq!(read_signal_csv(cube.as_bytes()).unwrap().dims(), &[2, 3, 4]);
}

#[test]
fn ingest_then_compress_bundle() {
    let raw = tempfile::tempdir().unwrap();
    let coords = [(40.7, -74.0), (42.4, -71.1), (39.9, -75.2), (38.9, -77.0), (41.8, -87.6), (33.7, -84.4), (29.8, -95.4)];
    for (k, (lat, lon)) in coords.iter().enumerate() {
        let mut text = String::from("\"STATION\",\"DATE\",\"LATITUDE\",\"LONGITUDE\",\"TEMP\"\n");
        for d in 0..365 {
            let date = chrono_free_date(d);
            let temp = 50.0 + 20.0 * (d as f64 / 58.0).sin() - (lat - 30.0);
            text.push_str(&format!("\"S{k}\",\"{date}\",\"{lat}\",\"{lon}\",\"{temp:.1}\"\n"));
        }
        fs::write(raw.path().join(format!("s{k}.csv")), text).unwrap();
    }
    let bundle = tempfile::tempdir().unwrap();
    let out = bundle.path().join("b");
    ok(&["ingest", "--dir", p(raw.path()), "--out", p(&out), "--sample", "5", "--seed", "1"]);
    let manifest: Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["stations"], 5);
    let r: Value = serde_json::from_str(&ok(&["compress", "--bundle", p(&out), "--k", "2", "--gamma", "0.05", "--alpha", "0.95"])).unwrap();
    assert_eq!(r["retained"], 92);
}

/// 2020-01-01 plus `d` days, for d < 365 (2020 is a leap year).
fn chrono_free_date(d: usize) -> String {
    let lengths = [31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];
    let mut rem = d;
    for (m, &len) in lengths.iter().enumerate() {
        if rem < len {
            return format!("2020-{:02}-{:02}", m + 1, rem + 1);
        }
        rem -= len;
    }
    unreachable!()
}
