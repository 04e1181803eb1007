use std::path::Path;
use std::process::{Command, Output};

use ppide_cli::{format_sig, table1, ExperimentConfig};

const SMALL: &str = r#"
experiment = "fd_vs_fft"

[grid]
n_fd = 64
n_time = 5
n_fft = [128, 256]
"#;

fn ppide(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ppide"));
    cmd.args(args).env_remove("PPIDE_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn ppide")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn data_rows(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn meta<'a>(csv: &'a str, key: &str) -> Option<&'a str> {
    let prefix = format!("# {key} = ");
    csv.lines().find_map(|l| l.strip_prefix(prefix.as_str()))
}

fn run_cfg(text: &str, sets: &[&str]) -> String {
    let sets: Vec<String> = sets.iter().map(|s| s.to_string()).collect();
    let cfg = ExperimentConfig::parse(text, &sets).unwrap();
    ppide_cli::run_experiment(&cfg).unwrap()
}

#[test]
fn identical_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let ra = ppide(&["run", "--config", &cfg, "--out", a.to_str().unwrap(), "--threads", "1"], &[]);
    let rb = ppide(&["run", "--config", &cfg, "--out", b.to_str().unwrap()], &[("PPIDE_THREADS", "3")]);
    assert!(ra.status.success(), "{}", String::from_utf8_lossy(&ra.stderr));
    assert!(rb.status.success(), "{}", String::from_utf8_lossy(&rb.stderr));
    let ca = std::fs::read(a.join("fd_vs_fft.csv")).unwrap();
    let cb = std::fs::read(b.join("fd_vs_fft.csv")).unwrap();
    assert_eq!(ca, cb);
    assert!(!ca.contains(&b'\r'));
}

#[test]
fn comparison_columns_and_values() {
    let csv = run_cfg(SMALL, &[]);
    let (header, rows) = data_rows(&csv);
    assert_eq!(header, ["n_fft", "x", "c_fd", "c_fft", "diff"]);
    assert!(rows.iter().any(|r| r[0] == "128") && rows.iter().any(|r| r[0] == "256"));
    for r in &rows {
        let v: Vec<f64> = r[1..].iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(v[3], v[1] - v[2]);
        assert!(v[0].abs() <= 20.0);
        // 17 significant digits
        assert_eq!(r[2].split('e').next().unwrap().trim_start_matches('-').len(), 18);
    }
    assert_eq!(meta(&csv, "experiment"), Some("fd_vs_fft"));
    assert_eq!(meta(&csv, "grid.n_fd"), Some("64"));
    assert_eq!(meta(&csv, "model.alpha_plus"), Some("-1.0"));
    assert_eq!(meta(&csv, "market.seed_time"), meta(&csv, "market.maturity"));
}

#[test]
fn hash_tracks_parameters() {
    let a = run_cfg(SMALL, &[]);
    let b = run_cfg(SMALL, &["market.strike=90"]);
    let ha = meta(&a, "config_sha256").unwrap();
    assert_eq!(ha.len(), 64);
    assert_ne!(ha, meta(&b, "config_sha256").unwrap());
    assert_eq!(meta(&b, "market.strike"), Some("90.0"));
}

#[test]
fn set_overrides_file_values() {
    let csv = run_cfg(SMALL, &["grid.n_fft=[128]", "scheme.pade=pade22", "model.lambda_plus=0.3"]);
    let (_, rows) = data_rows(&csv);
    assert!(rows.iter().all(|r| r[0] == "128"));
    assert_eq!(meta(&csv, "scheme.pade"), Some("\"pade22\""));
    assert_eq!(meta(&csv, "model.lambda_plus"), Some("0.3"));
}

#[test]
fn empty_horizon_echoes_terminal_condition() {
    let csv = run_cfg(SMALL, &["grid.n_time=0"]);
    let (header, rows) = data_rows(&csv);
    assert_eq!(header, ["x", "c_terminal"]);
    assert_eq!(rows.len(), 64);
    let (k, r, t) = (100.0f64, 0.01f64, 30.0 / 365.0);
    // deep in the money the put is its discounted intrinsic value
    let x0: f64 = rows[0][0].parse().unwrap();
    let c0: f64 = rows[0][1].parse().unwrap();
    assert!((x0 - 1e-8f64.ln()).abs() < 1e-12);
    assert!((c0 - (k * (-r * t).exp() - x0.exp())).abs() < 1e-9);
    // far out of the money it vanishes
    let last: f64 = rows[63][1].parse().unwrap();
    assert!(last.abs() < 1e-12);
    // put values decrease in the spot
    let vals: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[1] <= w[0] + 1e-12));
}

#[test]
fn unknown_keys_are_rejected() {
    let bad = format!("{SMALL}\nn_fdd = 3\n");
    assert!(ExperimentConfig::parse(&bad, &[]).is_err());
    let err = ExperimentConfig::parse(SMALL, &["grid.n_fdd=3".into()]).unwrap_err();
    assert!(format!("{err:#}").contains("n_fdd"), "{err:#}");
    assert!(ExperimentConfig::parse(SMALL, &["scheme.pade=pade33".into()]).is_err());
    assert!(ExperimentConfig::parse("experiment = \"fd_vs_ffft\"", &[]).is_err());
}

#[test]
fn experiment_alpha_conflicts_are_errors() {
    let text = "experiment = \"vg_case\"\n[model]\nalpha_plus = -1.0\n";
    let err = ExperimentConfig::parse(text, &[]).unwrap_err();
    assert!(format!("{err:#}").contains("alpha"));
    let cfg = ExperimentConfig::parse("experiment = \"infvar_m_sweep\"", &[]).unwrap();
    assert_eq!(cfg.model.alpha_plus, Some(1.0));
    assert_eq!(cfg.model.nu_plus, Some(1.5));
}

#[test]
fn bad_input_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    let missing = ppide(&["run", "--config", "/nonexistent.toml", "--out", out], &[]);
    assert!(!missing.status.success());
    let unknown = write(dir.path(), "u.toml", "experiment = \"fd_vs_fft\"\ncolour = 1\n");
    let r = ppide(&["run", "--config", &unknown, "--out", out], &[]);
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("colour"));
    let cfg = write(dir.path(), "c.toml", SMALL);
    let r = ppide(&["run", "--config", &cfg, "--set", "grid", "--out", out], &[]);
    assert!(!r.status.success());
    let r = ppide(&["run", "--config", &cfg, "--out", out], &[("PPIDE_THREADS", "many")]);
    assert!(!r.status.success());
    let r = ppide(&["run", "--config", &cfg, "--set", "market.strike=-1", "--out", out], &[]);
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("strike"));
}

#[test]
fn numerical_domain_errors_name_the_step() {
    // Plain equation at alpha = 0 diverges
    let text = "experiment = \"alpha_interp\"\n[scheme]\nequation = \"plain\"\n[model]\nalpha_plus = -0.5\n";
    let cfg = ExperimentConfig::parse(text, &["grid.n_fd=64".into(), "grid.n_fft=[128]".into()]).unwrap();
    let err = ppide_cli::run_experiment(&cfg).unwrap_err();
    let msg = format!("{err:#}");
    assert!(msg.contains("alpha bridge") && msg.contains("alpha = 0"), "{msg}");
}

#[test]
fn alpha_interp_reports_anchor_columns() {
    let text = "experiment = \"alpha_interp\"\n[scheme]\nanchors = [-4, -3, -2, -1]\n";
    let csv = run_cfg(text, &["grid.n_fd=64", "grid.n_time=5", "grid.n_fft=[256]"]);
    let (header, rows) = data_rows(&csv);
    assert_eq!(&header[5..], ["c_alpha_-4", "c_alpha_-3", "c_alpha_-2", "c_alpha_-1"]);
    assert_eq!(meta(&csv, "derived.alpha_mode"), Some("interpolation"));
    // cubic Lagrange weights at -2.5 on {-4, -3, -2, -1}
    let w = [-1.0 / 16.0, 9.0 / 16.0, 9.0 / 16.0, -1.0 / 16.0];
    for r in &rows {
        let v: Vec<f64> = r.iter().map(|s| s.parse().unwrap()).collect();
        let interp: f64 = w.iter().zip(&v[5..]).map(|(a, b)| a * b).sum();
        assert!((interp - v[2]).abs() <= 1e-9 * (1.0 + v[2].abs()));
    }
}

#[test]
fn sweeps_emit_parameter_rows() {
    let nu = run_cfg(
        "experiment = \"infvar_nu_star_sweep\"",
        &["grid.n_fd=64", "grid.n_time=5", "sweep.nu_star_values=[20.0, 40.0]"],
    );
    let (header, rows) = data_rows(&nu);
    assert_eq!(header, ["nu_star_from", "nu_star_to", "m_from", "m_to", "max_abs_diff"]);
    assert_eq!(rows.len(), 1);
    // Simpson spacing (5 - 1.5)/30 held fixed
    assert_eq!(rows[0][2], "160");
    assert_eq!(rows[0][3], "330");
    let m = run_cfg(
        "experiment = \"infvar_m_sweep\"",
        &["grid.n_fd=64", "grid.n_time=5", "sweep.m_values=[10, 20, 40]", "scheme.nu_star=20.0"],
    );
    let (_, rows) = data_rows(&m);
    assert_eq!(rows.len(), 2);
    let d: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(d[1] < d[0]);
}

#[test]
fn stability_sweep_classifies_vg_bound() {
    let csv = run_cfg(
        "experiment = \"stability_sweep\"",
        &["sweep.n_stability=24", "sweep.nu_values=[0.5]", "sweep.h_values=[2.9, 3.1]", "sweep.alpha_values=[-2]"],
    );
    let (header, rows) = data_rows(&csv);
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let vg: Vec<_> = rows.iter().filter(|r| r[0] == "vg").collect();
    assert_eq!(vg.len(), 4);
    for r in vg {
        let h: f64 = r[col("h")].parse().unwrap();
        assert_eq!(r[col("admissible")], (h < 3.0).to_string());
    }
    for r in rows.iter().filter(|r| r[0] == "pade") {
        assert_eq!(r[col("stable")], "true");
        let radius: f64 = r[col("radius")].parse().unwrap();
        assert!(radius < 1.0);
    }
}

#[test]
fn test_integral_matches_closed_form_at_alpha_minus_one() {
    let csv = run_cfg("experiment = \"test_integral\"", &["grid.n_fft=[256, 512]"]);
    let (header, rows) = data_rows(&csv);
    assert_eq!(header, ["n", "x", "fft", "exact", "error"]);
    for r in &rows {
        let v: Vec<f64> = r[1..].iter().map(|s| s.parse().unwrap()).collect();
        // ∫₀^∞ (x + y) e^{-y} dy = x + 1
        assert!((v[2] - (v[0] + 1.0)).abs() < 1e-9 * (1.0 + v[0].abs()));
        assert_eq!(v[3], v[1] - v[2]);
    }
    let e256: f64 = meta(&csv, "derived.max_error_256").unwrap().parse().unwrap();
    let e512: f64 = meta(&csv, "derived.max_error_512").unwrap().parse().unwrap();
    assert!((e256 / e512 - 2.0).abs() < 0.2);
}

#[test]
fn basic_model_keeps_shape() {
    let csv = run_cfg("experiment = \"basic_model\"", &["grid.n_fd=64", "grid.n_time=5"]);
    let (header, rows) = data_rows(&csv);
    assert_eq!(header, ["x", "c_initial", "c_fd"]);
    assert_eq!(rows.len(), 64);
    assert!(rows.iter().all(|r| r[2].parse::<f64>().unwrap().is_finite()));
}

#[test]
fn output_path_names_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("output_path = \"curves.csv\"\n{SMALL}");
    let cfg = ExperimentConfig::parse(&text, &["grid.n_fft=[128]".into()]).unwrap();
    let p = ppide_cli::run_to_dir(&cfg, dir.path()).unwrap();
    assert_eq!(p, dir.path().join("curves.csv"));
    assert!(ExperimentConfig::parse(&text, &["output_path=\"../x.csv\"".into()]).is_err());
}

#[test]
fn table1_reproduces_printed_steps() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t").join("table1.csv");
    let r = ppide(&["table1", "--out", out.to_str().unwrap()], &[]);
    assert!(r.status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv, table1().unwrap());
    let (header, rows) = data_rows(&csv);
    assert_eq!(header, ["grid", "n", "x_min", "x_max", "h", "h_3sf"]);
    // printed entries with their last-digit resolution
    let printed = [(0.096, 1e-3), (0.1563, 1e-4), (0.078, 1e-3), (0.039, 1e-3), (0.0195, 1e-4), (0.00977, 1e-5)];
    assert_eq!(rows.len(), printed.len());
    for (r, (p, ulp)) in rows.iter().zip(printed) {
        let h: f64 = r[4].parse().unwrap();
        assert!((h - p).abs() <= 0.5 * ulp, "{h} vs {p}");
    }
    let h3: Vec<&str> = rows.iter().map(|r| r[5].as_str()).collect();
    assert_eq!(h3, ["0.0962", "0.156", "0.0781", "0.0391", "0.0195", "0.00977"]);
    let fft: Vec<f64> = rows[1..].iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(fft.windows(2).all(|w| w[0] == 2.0 * w[1]));
}

#[test]
fn significant_figures() {
    assert_eq!(format_sig(0.15625, 4), "0.1562");
    assert_eq!(format_sig(0.009765625, 3), "0.00977");
    assert_eq!(format_sig(123.456, 3), "123");
    assert_eq!(format_sig(0.0, 3), "0");
}
