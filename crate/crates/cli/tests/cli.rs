use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use flrw_bgk::{RadialGrid, RuleKind};
use tempfile::TempDir;

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(rel)
}

fn run(out_root: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flrw-bgk"))
        .args(args)
        .env("FLRW_BGK_OUT", out_root)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn csv_rows(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

/// `d.dddddddddddddddde±x`: 17 significant digits.
fn has_17_digits(field: &str) -> bool {
    let mantissa = field.trim_start_matches('-').split('e').next().unwrap();
    mantissa.replace('.', "").len() == 17 && field.contains('e')
}

fn summary(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn mb_matched_run_follows_explicit_solution() {
    let tmp = TempDir::new().unwrap();
    let o = run(
        tmp.path(),
        &[
            "simulate",
            fixture("sweep/mb_matched.toml").to_str().unwrap(),
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));

    let dir = tmp.path().join("mb_matched");
    let (header, rows) = csv_rows(&dir.join("timeseries.csv"));
    assert_eq!(header, "t,rho,energy,T,linf_vs_analytic");
    assert_eq!(rows.len(), 1001);
    assert!(rows.iter().flatten().all(|f| has_17_digits(f)));

    let s = summary(&dir);
    assert!(s["max_analytic_deviation"].as_f64().unwrap() <= 1e-10);
    assert!(s["max_drift"].as_f64().unwrap() <= 1e-10);
    assert_eq!(s["completed"], true);
    assert!(s["wall_time_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn be_matched_run_keeps_unit_parameters() {
    let tmp = TempDir::new().unwrap();
    let o = run(
        tmp.path(),
        &[
            "simulate",
            fixture("sweep/be_matched.toml").to_str().unwrap(),
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));

    let (header, rows) = csv_rows(&tmp.path().join("be_matched/timeseries.csv"));
    assert_eq!(header, "t,rho,energy,T,c,gamma,linf_vs_analytic");
    for row in &rows {
        let c: f64 = row[4].parse().unwrap();
        let gamma: f64 = row[5].parse().unwrap();
        assert!(
            (c - 1.0).abs() <= 1e-8 && (gamma - 1.0).abs() <= 1e-8,
            "{row:?}"
        );
        assert!(row[6].parse::<f64>().unwrap() <= 1e-10);
    }
}

#[test]
fn unmatched_run_omits_analytic_column() {
    let tmp = TempDir::new().unwrap();
    let o = run(
        tmp.path(),
        &[
            "simulate",
            fixture("sweep/be_unmatched.toml").to_str().unwrap(),
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let dir = tmp.path().join("be_unmatched");
    let (header, _) = csv_rows(&dir.join("timeseries.csv"));
    assert_eq!(header, "t,rho,energy,T,c,gamma");
    let s = summary(&dir);
    assert!(s["max_analytic_deviation"].is_null());
    assert_eq!(s["matched"], false);
}

#[test]
fn malformed_config_exits_2() {
    let tmp = TempDir::new().unwrap();
    let o = run(
        tmp.path(),
        &[
            "simulate",
            fixture("invalid/malformed.toml").to_str().unwrap(),
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("missing field `rate`"),
        "{}",
        stderr(&o)
    );

    let o = run(tmp.path(), &["simulate", "no/such/file.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn out_of_range_run_reports_ratio_and_bound() {
    let tmp = TempDir::new().unwrap();
    let o = run(
        tmp.path(),
        &[
            "simulate",
            fixture("invalid/be_out_of_range.toml").to_str().unwrap(),
        ],
    );
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.contains("3.7037037037"), "{err}");
    assert!(err.contains("1.5328697679828"), "{err}");
    let s = summary(&tmp.path().join("be_out_of_range"));
    assert_eq!(s["completed"], false);
    assert_eq!(s["failure"]["step"], 0);
}

fn printed(out: &str, key: &str) -> f64 {
    out.lines()
        .find_map(|l| {
            let (k, v) = l.split_once('=')?;
            (k.trim() == key).then(|| v.trim().parse().ok())?
        })
        .unwrap_or_else(|| panic!("`{key}` not printed in\n{out}"))
}

#[test]
fn equilibrium_reproduces_global_equilibria() {
    let tmp = TempDir::new().unwrap();
    let pi = std::f64::consts::PI;
    let (rho, energy) = (format!("{}", 8.0 * pi), format!("{}", 24.0 * pi));
    let o = run(
        tmp.path(),
        &[
            "equilibrium",
            "--rho",
            &rho,
            "--energy",
            &energy,
            "--stats",
            "mb",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!((printed(&stdout(&o), "T") - 1.0).abs() < 1e-14);
    assert!((printed(&stdout(&o), "rho") - 8.0 * pi).abs() < 1e-13);
    assert!(tmp.path().join("equilibrium_mb.csv").exists());

    // 8π Li₃(e⁻¹) and 24π Li₄(e⁻¹).
    let out = tmp.path().join("nested/j.csv");
    let o = run(
        tmp.path(),
        &[
            "equilibrium",
            "--rho",
            "9.7262558533730016",
            "--energy",
            "28.427940943558681",
            "--stats",
            "be",
            "--out",
            out.to_str().unwrap(),
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!((printed(&stdout(&o), "c") - 1.0).abs() < 1e-10);
    assert!((printed(&stdout(&o), "gamma") - 1.0).abs() < 1e-10);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, "r,weight,j");
    assert_eq!(rows.len(), 64);
}

#[test]
fn equilibrium_range_violation_exits_3() {
    let tmp = TempDir::new().unwrap();
    // ρ/(3T)³ = ρ⁴/E³ = 1/0.6³ ≈ 4.63.
    let o = run(
        tmp.path(),
        &[
            "equilibrium",
            "--rho",
            "1",
            "--energy",
            "0.6",
            "--stats",
            "be",
        ],
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("1.5328697679828"));
    assert!(stderr(&o).contains("outside the admissible range"));

    let o = run(
        tmp.path(),
        &[
            "equilibrium",
            "--rho",
            "-1",
            "--energy",
            "1",
            "--stats",
            "mb",
        ],
    );
    assert_eq!(o.status.code(), Some(3));

    let o = run(
        tmp.path(),
        &[
            "equilibrium",
            "--rho",
            "1",
            "--energy",
            "1",
            "--stats",
            "fd",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn equilibrium_from_table() {
    let tmp = TempDir::new().unwrap();
    let grid = RadialGrid::new(RuleKind::Exponential, 64, None).unwrap();
    let mut text = String::from("r,f\n");
    for &r in grid.nodes() {
        text.push_str(&format!("{r:.17e},{:.17e}\n", (-r).exp()));
    }
    let table = tmp.path().join("f.csv");
    fs::write(&table, text).unwrap();
    let o = run(
        tmp.path(),
        &[
            "equilibrium",
            "--table",
            table.to_str().unwrap(),
            "--stats",
            "mb",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!((printed(&stdout(&o), "T") - 1.0).abs() < 1e-13);
}

#[test]
fn verify_passes_and_names_failures() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["verify"]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    assert_eq!(stdout(&o).matches("[PASS]").count(), 9);

    let o = run(tmp.path(), &["verify", "--grid-nodes", "8"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stdout(&o).contains("[FAIL]  8 matching_conditions"),
        "{}",
        stdout(&o)
    );
    assert!(stderr(&o).contains("matching_conditions"));
}

#[test]
fn sweep_runs_each_config_into_its_own_directory() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["sweep", fixture("sweep").to_str().unwrap()]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    for dir in ["mb_matched", "be_matched", "be_unmatched", "perturbed_rk4"] {
        let d = tmp.path().join(dir);
        assert!(d.join("summary.json").exists(), "{dir}");
        assert!(d.join("timeseries.csv").exists(), "{dir}");
        assert!(d.join("config.toml").exists(), "{dir}");
    }

    let o = run(tmp.path(), &["sweep", fixture("invalid").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_reports_math_failures() {
    let tmp = TempDir::new().unwrap();
    let configs = tmp.path().join("configs");
    fs::create_dir(&configs).unwrap();
    fs::copy(fixture("sweep/mb_matched.toml"), configs.join("a.toml")).unwrap();
    fs::copy(
        fixture("invalid/be_out_of_range.toml"),
        configs.join("b.toml"),
    )
    .unwrap();
    let o = run(tmp.path(), &["sweep", configs.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("ok    a"));
    assert!(stdout(&o).contains("fail  b"));
}

#[test]
fn table_initial_data_and_determinism() {
    let tmp = TempDir::new().unwrap();
    let grid = RadialGrid::new(RuleKind::Exponential, 32, None).unwrap();
    let mut text = String::from("r,f\n");
    for &r in grid.nodes() {
        text.push_str(&format!("{r:.17e},{:.17e}\n", r * r * (-1.5 * r).exp()));
    }
    fs::write(tmp.path().join("f0.csv"), text).unwrap();
    let config = "statistics = \"mb\"\n\n[initial]\nfamily = \"table\"\npath = \"f0.csv\"\n\n\
                  [grid]\nrule = \"exponential\"\nn_nodes = 32\n\n[solver]\nstepper = \"rk4\"\ndt = 0.1\nt_end = 3.0\n";
    let cfg = tmp.path().join("table.toml");
    fs::write(&cfg, config).unwrap();

    let first = run(
        &tmp.path().join("one"),
        &["simulate", cfg.to_str().unwrap()],
    );
    let second = run(
        &tmp.path().join("two"),
        &["simulate", cfg.to_str().unwrap()],
    );
    assert!(first.status.success(), "{}", stderr(&first));
    assert!(second.status.success());
    let a = fs::read(tmp.path().join("one/table/timeseries.csv")).unwrap();
    let b = fs::read(tmp.path().join("two/table/timeseries.csv")).unwrap();
    assert_eq!(a, b);

    let bad = "statistics = \"mb\"\n[initial]\nfamily = \"table\"\npath = \"f0.csv\"\n[grid]\nrule = \"exponential\"\nn_nodes = 16\n";
    fs::write(&cfg, bad).unwrap();
    let o = run(tmp.path(), &["simulate", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("does not match grid node"),
        "{}",
        stderr(&o)
    );
}
