use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use maplace::formats::{parse_positions, Report};
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_maplace"));
    cmd.env_remove("MA_PLACEMENT_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn default_design_matches_golden_files() {
    let dir = TempDir::new().unwrap();
    let pos = dir.path().join("p.txt");
    let json = ok(&["design", "--positions", path_str(&pos)]);
    assert_eq!(
        json,
        fs::read_to_string(golden("default_report.json")).unwrap()
    );
    assert_eq!(
        fs::read_to_string(&pos).unwrap(),
        fs::read_to_string(golden("default_positions.txt")).unwrap()
    );
    let csv = ok(&["design", "--format", "csv"]);
    assert_eq!(
        csv,
        fs::read_to_string(golden("default_report.csv")).unwrap()
    );

    let report: Report = serde_json::from_str(&json).unwrap();
    assert_eq!(report.n, 25);
    assert_eq!(report.clusters, Some([6, 13, 6]));
    // moments of the written positions through the broadside closed form, in f64 Python
    assert_eq!(report.worst_case_speb_m2, 0.5644782287211609);
    assert_eq!((report.worst_u, report.worst_r_m), (0.0, 53.5343675));
}

#[test]
fn design_then_evaluate_is_bit_exact() {
    let dir = TempDir::new().unwrap();
    for design in [
        "proposed",
        "proposed-asymptotic",
        "ula",
        "sparse-ula",
        "two-edge",
    ] {
        let pos = dir.path().join(format!("{design}.txt"));
        let args = ["--n-u", "51", "--n-r", "37", "-n", "16", "--design", design];
        let designed: Report = serde_json::from_str(&ok(&[
            &args[..],
            &["design", "--positions", path_str(&pos)],
        ]
        .concat()))
        .unwrap();
        let evaluated: Report =
            serde_json::from_str(&ok(&[&args[..6], &["evaluate", path_str(&pos)]].concat()))
                .unwrap();
        assert_eq!(
            designed.worst_case_speb_m2.to_bits(),
            evaluated.worst_case_speb_m2.to_bits(),
            "{design}"
        );
        assert_eq!(designed.worst_u, evaluated.worst_u);
        assert_eq!(designed.worst_r_m, evaluated.worst_r_m);
        assert_eq!(evaluated.design, "positions-file");
    }
}

#[test]
fn ula_design_writes_half_wavelength_grid() {
    let dir = TempDir::new().unwrap();
    let pos = dir.path().join("ula.txt");
    ok(&[
        "--wavelength",
        "0.01",
        "--n-u",
        "11",
        "--n-r",
        "11",
        "design",
        "--design",
        "ula",
        "--positions",
        path_str(&pos),
    ]);
    let xs = parse_positions(&fs::read_to_string(&pos).unwrap()).unwrap();
    assert_eq!(xs.len(), 25);
    for (k, x) in xs.iter().enumerate() {
        assert!((x - (k as f64 - 12.0) * 0.005).abs() < 1e-15);
    }
}

#[test]
fn small_exhaustive_design_matches_library_search() {
    use maplace_core::prelude::*;
    let out = ok(&[
        "--wavelength",
        "0.01",
        "--half-aperture-wl",
        "3",
        "--max-n",
        "4",
        "--n-u",
        "21",
        "--n-r",
        "21",
        "design",
        "--design",
        "exhaustive",
    ]);
    let report: Report = serde_json::from_str(&out).unwrap();
    let region = NearFieldRegion::new(0.03, 0.01).unwrap();
    let grid = RegionGrid::uniform(region, 21, 21).unwrap();
    let params = SensingParams::from_snr_db(0.01, 1024, 4, 5.0).unwrap();
    let found = exhaustive_search(4, 0.03, 0.01, &params, &grid, &SearchConfig::new(0.01)).unwrap();
    assert_eq!(report.worst_case_speb_m2, found.report.worst_case_speb);
}

#[test]
fn spacing_violation_exits_with_geometry_code() {
    let dir = TempDir::new().unwrap();
    let pos = dir.path().join("tight.txt");
    fs::write(&pos, "-0.2\n0.0\n0.001\n0.2\n").unwrap();
    let out = run(&[
        "--wavelength",
        "0.01",
        "--n-u",
        "11",
        "--n-r",
        "11",
        "evaluate",
        "--enforce-spacing",
        path_str(&pos),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error[spacing_violation]"), "{err}");
    assert!(err.contains("0.001"), "{err}");
    let out = run(&[
        "--wavelength",
        "0.01",
        "--n-u",
        "11",
        "--n-r",
        "11",
        "evaluate",
        path_str(&pos),
    ]);
    assert!(out.status.success());
}

#[test]
fn exit_codes_are_distinct() {
    let config = run(&["--wavelength", "0.01", "--frequency", "3e10", "design"]);
    assert_eq!(config.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&config.stderr).starts_with("error[config]"));

    let budget = run(&[
        "-n",
        "40",
        "--n-u",
        "11",
        "--n-r",
        "11",
        "design",
        "--design",
        "exhaustive",
    ]);
    assert_eq!(budget.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&budget.stderr).starts_with("error[search_space_too_large]"));

    let geometry = run(&["--half-aperture-wl", "2", "design", "--design", "ula"]);
    assert_eq!(geometry.status.code(), Some(3));

    let io = run(&["evaluate", "/nonexistent/positions.txt"]);
    assert_eq!(io.status.code(), Some(5));

    let usage = run(&["design", "--no-such-flag"]);
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("exp.cfg");
    fs::write(&cfg, "# small run\nwavelength = 0.01\nhalf_aperture_wl = 10\nn = 9\nn_u = 21\nn_r = 21\ndesign = two-edge\n").unwrap();
    let base: Report = serde_json::from_str(&ok(&["--config", path_str(&cfg), "design"])).unwrap();
    assert_eq!(
        (base.design.as_str(), base.n, base.a_m, base.lambda_m),
        ("two-edge", 9, 0.1, 0.01)
    );
    let over: Report = serde_json::from_str(&ok(&[
        "--config",
        path_str(&cfg),
        "-n",
        "11",
        "--design",
        "ula",
        "design",
    ]))
    .unwrap();
    assert_eq!((over.design.as_str(), over.n), ("ula", 11));

    fs::write(&cfg, "n = 9\nbogus = 1\n").unwrap();
    let out = run(&["--config", path_str(&cfg), "design"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));
}

#[test]
fn output_is_identical_for_any_thread_count() {
    let args = [
        "-n",
        "12",
        "--n-u",
        "81",
        "--n-r",
        "81",
        "design",
        "--design",
        "sparse-ula",
    ];
    let mut outputs = Vec::new();
    for threads in ["1", "3", "0"] {
        let out = bin()
            .args(args)
            .env("MA_PLACEMENT_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        outputs.push(out.stdout);
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
    let bad = bin()
        .args(args)
        .env("MA_PLACEMENT_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn heatmap_extremes() {
    let text = ok(&["--n-u", "101", "--n-r", "101", "heatmap"]);
    let rows = csv_rows(&text);
    assert_eq!(rows[0].join(","), "u,r_m,p1_m,p2_m,log10_speb");
    let data: Vec<[f64; 5]> = rows[1..]
        .iter()
        .map(|r| {
            let v: Vec<f64> = r.iter().map(|c| c.parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3], v[4]]
        })
        .collect();
    assert!(data.len() <= 101 * 101);
    let max = data.iter().max_by(|a, b| a[4].total_cmp(&b[4])).unwrap();
    let min = data.iter().min_by(|a, b| a[4].total_cmp(&b[4])).unwrap();
    let d_max = data.iter().map(|r| r[1]).fold(0.0, f64::max);
    assert_eq!(max[0], 0.0);
    assert_eq!(max[1], d_max);
    // the best point sits on the inner boundary, close to the array
    let inner = data
        .iter()
        .filter(|r| r[0] == min[0])
        .map(|r| r[1])
        .fold(f64::INFINITY, f64::min);
    assert_eq!(min[1], inner);
    assert!(min[1] < 0.01 * d_max);
    for r in &data {
        assert!((r[2] - r[0] * r[1]).abs() <= 1e-12 * r[1]);
        assert!(r[3] > 0.0);
    }
}

#[test]
fn heatmap_reads_positions_file() {
    let text = ok(&[
        "--n-u",
        "11",
        "--n-r",
        "5",
        "heatmap",
        path_str(&golden("default_positions.txt")),
    ]);
    assert_eq!(text, ok(&["--n-u", "11", "--n-r", "5", "heatmap"]));
}

#[test]
fn benchmark_snr_sweep_scales_exactly() {
    let text = ok(&[
        "--n-u",
        "31",
        "--n-r",
        "31",
        "benchmark",
        "--sweep",
        "snr_db",
        "--values=-5,0,5,10,20",
        "--designs",
        "proposed,two-edge,sparse-ula,ula",
    ]);
    let rows = csv_rows(&text);
    assert_eq!(
        rows[0].join(","),
        "design,variable,value,worst_case_speb_m2,worst_case_rmse_m,error"
    );
    assert_eq!(rows.len(), 1 + 5 * 4);
    for design in ["proposed", "two-edge", "sparse-ula", "ula"] {
        let cells: Vec<(f64, f64)> = rows[1..]
            .iter()
            .filter(|r| r[0] == design)
            .map(|r| (r[2].parse().unwrap(), r[3].parse().unwrap()))
            .collect();
        let (snr0, v0) = cells[0];
        for (snr, v) in &cells {
            let want = v0 * 10f64.powf(-(snr - snr0) / 10.0);
            assert!((v - want).abs() <= 1e-12 * want, "{design} at {snr}");
        }
    }
}

#[test]
fn benchmark_matches_golden_and_handles_empty_sweep() {
    let text = ok(&[
        "benchmark",
        "--sweep",
        "snr_db",
        "--values=-5,5",
        "--designs",
        "proposed,ula",
        "--n-u",
        "21",
        "--n-r",
        "21",
    ]);
    assert_eq!(
        text,
        fs::read_to_string(golden("benchmark_snr_small.csv")).unwrap()
    );
    let empty = ok(&["benchmark", "--sweep", "n", "--values", ""]);
    assert_eq!(
        empty,
        "design,variable,value,worst_case_speb_m2,worst_case_rmse_m,error\n"
    );
}

#[test]
fn benchmark_includes_exhaustive_only_under_budget() {
    // 13 candidates on an 11 x 11 grid: C(13, 4) subsets fit a budget of 1e5, C(13, 6) do not
    let text = ok(&[
        "--wavelength",
        "0.01",
        "--half-aperture-wl",
        "3",
        "--n-u",
        "11",
        "--n-r",
        "11",
        "--search-budget",
        "100000",
        "benchmark",
        "--sweep",
        "n",
        "--values",
        "4,6",
        "--designs",
        "exhaustive,proposed",
    ]);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 5);
    assert!(!rows[1][3].is_empty() && rows[1][5].is_empty());
    assert_eq!(rows[3][0], "exhaustive");
    assert!(rows[3][3].is_empty() && rows[3][4].is_empty());
    assert_eq!(rows[3][5], "search_space_too_large");
    assert!(!rows[4][3].is_empty());
}

#[test]
fn verify_command_passes_and_is_seeded() {
    let a = ok(&["--seed", "11", "verify", "--cases", "10"]);
    assert_eq!(a.lines().count(), 6);
    assert!(a.lines().all(|l| l.starts_with("PASS")), "{a}");
    assert_eq!(a, ok(&["--seed", "11", "verify", "--cases", "10"]));
}
