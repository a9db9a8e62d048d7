use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_collective-mode"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).env_remove("COLLECTIVE_MODE_THREADS").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<Option<f64>>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| if c.is_empty() { None } else { Some(c.parse().unwrap()) }).collect())
        .collect();
    (header, rows)
}

const MINIMAL: &str = "[model]\nkind = \"next_neighbor\"\nN = 32\nalpha = 0.5\n\n[dynamics]\nP0 = 1.0\n";

#[test]
fn minimal_run_writes_all_tables() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "s.toml", MINIMAL);
    let o = run(&["run", cfg.to_str().unwrap(), "--quiet"], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = tmp.path().join("output");
    for f in ["trajectory.csv", "sigma.csv", "strengths.csv", "spectrum.csv", "summary.json"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let summary: Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["regime"], "underdamped");
    assert!(summary["errors"]["volterra_vs_exact"].as_f64().unwrap() < 1e-4);
    let (header, rows) = read_csv(&out.join("trajectory.csv"));
    assert_eq!(header, ["t", "X_exact", "X_volterra", "X_closed_form"]);
    assert!(rows.iter().all(|r| r.len() == 4));
    let (header, _) = read_csv(&out.join("spectrum.csv"));
    assert_eq!(header, ["omega", "S_smoothed", "S_fdt", "S_ohmic", "S_power_2"]);
}

#[test]
fn csv_cells_carry_seventeen_digits() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "s.toml", MINIMAL);
    assert_eq!(code(&run(&["run", cfg.to_str().unwrap(), "--quiet"], tmp.path())), 0);
    let text = fs::read_to_string(tmp.path().join("output/strengths.csv")).unwrap();
    let cell = text.lines().nth(1).unwrap().split(',').next().unwrap();
    let mantissa = cell.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{cell}");
}

#[test]
fn constant_coupling_leaves_the_mode_undamped() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "s.toml", "[model]\nN = 16\nalpha = 0.0\nkappa = 0.25\n");
    let o = run(&["run", cfg.to_str().unwrap(), "--quiet"], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("output/summary.json")).unwrap()).unwrap();
    assert!(summary["gamma0"].as_f64().unwrap().abs() < 1e-15);
    let (_, rows) = read_csv(&tmp.path().join("output/trajectory.csv"));
    for r in &rows {
        let exact = r[1].unwrap();
        assert!((r[2].unwrap() - exact).abs() < 1e-10);
        assert!((r[3].unwrap() - exact).abs() < 1e-10);
    }
}

#[test]
fn missing_particle_count_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "s.toml", "[model]\nalpha = 0.5\n");
    let o = run(&["run", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("model.N"), "{}", stderr(&o));
}

#[test]
fn malformed_files_are_config_errors() {
    let tmp = TempDir::new().unwrap();
    for (i, body) in [
        "[model\nN = 4\n",
        "[model]\nN = 4\nalpha = 1.0\ncolour = 3\n",
        "[model]\nN = \"four\"\nalpha = 1.0\n",
        "[model]\nN = 4\nalpha = -1.0\n",
        "[model]\nN = 4\nalpha = 1.0\n[spectra]\npowers = [0]\n",
        "[model]\nkind = \"general\"\nw_file = \"nope.csv\"\nk_file = \"nope.csv\"\n",
    ]
    .iter()
    .enumerate()
    {
        let cfg = write_config(tmp.path(), &format!("bad{i}.toml"), body);
        let o = run(&["run", cfg.to_str().unwrap()], tmp.path());
        assert_eq!(code(&o), 2, "case {i}: {}", stderr(&o));
    }
    let o = run(&["run", "does-not-exist.toml"], tmp.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn general_model_reads_matrix_files() {
    let tmp = TempDir::new().unwrap();
    let n = 6;
    let mut w = String::from("# cyclic next-neighbor chain\n");
    let mut k = String::new();
    for i in 0..n {
        let wrow: Vec<String> = (0..n)
            .map(|j| {
                let d = (i + n - j) % n;
                if d == 0 {
                    "1.0".into()
                } else if d == 1 || d == n - 1 {
                    "-0.5".into()
                } else {
                    "0".into()
                }
            })
            .collect();
        w.push_str(&wrow.join(", "));
        w.push('\n');
        let krow: Vec<String> = (0..n).map(|j| if (i + j) % 3 == 0 { "0.2".into() } else { "0.0".into() }).collect();
        k.push_str(&krow.join(" "));
        k.push('\n');
    }
    fs::write(tmp.path().join("w.csv"), w).unwrap();
    fs::write(tmp.path().join("k.csv"), k).unwrap();
    let cfg =
        write_config(tmp.path(), "g.toml", "[model]\nkind = \"general\"\nw_file = \"w.csv\"\nk_file = \"k.csv\"\n");
    let o = run(&["verify", cfg.to_str().unwrap(), "--quiet"], tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));

    fs::write(tmp.path().join("w.csv"), "1, -1, 0\n-1, 1, 0\n0, 0, 0\n").unwrap();
    fs::write(tmp.path().join("k.csv"), "1 0 0\n0 0 0\n0 0 0\n").unwrap();
    let o = run(&["run", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("shift"), "{}", stderr(&o));
}

#[test]
fn numerical_failures_exit_three() {
    let tmp = TempDir::new().unwrap();
    // no coupling at all: the collective coordinate has no restoring force
    let cfg = write_config(tmp.path(), "free.toml", "[model]\nN = 8\nalpha = 0.0\n");
    assert_eq!(code(&run(&["run", cfg.to_str().unwrap()], tmp.path())), 3);
    let cfg = write_config(tmp.path(), "coarse.toml", &format!("{MINIMAL}t_max = 50.0\nsteps = 100\n"));
    let o = run(&["run", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("too large"), "{}", stderr(&o));
}

fn verify_report(body: &str) -> (i32, Value) {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "v.toml", body);
    let o = run(&["verify", cfg.to_str().unwrap(), "--quiet"], tmp.path());
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    let saved: Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("output/verification.json")).unwrap()).unwrap();
    assert_eq!(report, saved);
    (code(&o), report)
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap()
}

#[test]
fn default_model_passes_verification() {
    let (c, report) = verify_report(MINIMAL);
    assert_eq!(c, 0);
    assert_eq!(report["passed"], true);
    for entry in report["checks"].as_array().unwrap() {
        assert!(entry["name"].is_string() && entry["tolerance"].is_number());
        assert_ne!(entry["status"], "fail", "{entry}");
    }
    assert_eq!(check(&report, "mapping.secular_equation")["status"], "pass");
}

#[test]
fn constant_coupling_passes_the_decoupling_group() {
    let (c, report) = verify_report("[model]\nN = 16\nalpha = 0.0\nkappa = 0.25\n");
    assert_eq!(c, 0);
    for name in ["decoupling.coupling_vanishes", "decoupling.kernel_vanishes", "decoupling.free_oscillation"] {
        assert_eq!(check(&report, name)["status"], "pass", "{name}");
    }
}

#[test]
fn coarse_step_fails_the_volterra_check() {
    let (c, report) = verify_report(&format!("{MINIMAL}t_max = 50.0\nsteps = 100\n"));
    assert_eq!(c, 1);
    let v = check(&report, "dynamics.volterra_matches_exact");
    assert_eq!(v["status"], "fail");
    assert!(v["detail"].as_str().unwrap().contains("too large"));
}

#[test]
fn output_is_byte_stable_across_thread_counts() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "s.toml", MINIMAL);
    let mut dirs = Vec::new();
    for threads in ["1", "3"] {
        let dir = tmp.path().join(format!("t{threads}"));
        let o = bin()
            .args(["run", cfg.to_str().unwrap(), "--quiet", "--output", dir.to_str().unwrap()])
            .env("COLLECTIVE_MODE_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        dirs.push(dir);
    }
    for f in ["trajectory.csv", "sigma.csv", "strengths.csv", "spectrum.csv", "summary.json"] {
        assert_eq!(fs::read(dirs[0].join(f)).unwrap(), fs::read(dirs[1].join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn json_tables_mirror_the_csv() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "s.toml",
        &format!("{MINIMAL}\n[output]\ndirectory = \"out\"\nformats = [\"csv\", \"json\"]\n"),
    );
    assert_eq!(code(&run(&["run", cfg.to_str().unwrap(), "--quiet"], tmp.path())), 0);
    let doc: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("out/strengths.json")).unwrap()).unwrap();
    let (header, rows) = read_csv(&tmp.path().join("out/strengths.csv"));
    assert_eq!(doc["columns"].as_array().unwrap().len(), header.len());
    assert_eq!(doc["rows"].as_array().unwrap().len(), rows.len());
    let first = doc["rows"][0][1].as_f64().unwrap();
    assert_eq!(first, rows[0][1].unwrap());
}

#[test]
fn figure_one_tables() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("fig");
    let o = run(&["figure1", out.to_str().unwrap(), "--quiet"], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let argmax = |rows: &[Vec<Option<f64>>]| {
        rows.iter().max_by(|a, b| a[1].unwrap().total_cmp(&b[1].unwrap())).unwrap()[0].unwrap()
    };
    let (h1, s1) = read_csv(&out.join("figure1_s.csv"));
    let (h2, s2) = read_csv(&out.join("figure1_s2.csv"));
    assert_eq!((h1.len(), h2.len()), (2, 2));
    assert_eq!((s1.len(), s2.len()), (2000, 2000));
    assert!(s1.windows(2).all(|w| w[1][0] > w[0][0]));
    assert!((argmax(&s1) - 1.0).abs() <= 0.01);
    assert!((argmax(&s2) - 2.0).abs() <= 0.05);
    // the scaled curve at Ω = 1 is π times S̃(1) ≈ 1.5876
    let near = s1.iter().min_by(|a, b| (a[0].unwrap() - 1.0).abs().total_cmp(&(b[0].unwrap() - 1.0).abs())).unwrap();
    assert!((near[1].unwrap() / std::f64::consts::PI - 1.5876).abs() < 5e-3);
}

#[test]
fn shipped_configs_verify() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let tmp = TempDir::new().unwrap();
    let mut seen = 0;
    for entry in fs::read_dir(configs).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let o = run(
                &["verify", path.to_str().unwrap(), "--quiet", "--output", tmp.path().to_str().unwrap()],
                tmp.path(),
            );
            assert_eq!(code(&o), 0, "{}: {}", path.display(), String::from_utf8_lossy(&o.stdout));
            seen += 1;
        }
    }
    assert!(seen >= 3);
}
