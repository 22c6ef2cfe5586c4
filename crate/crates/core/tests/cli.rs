use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qbath::cli::ModelConfig;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn qbath(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbath"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove(qbath::cli::OUT_DIR_ENV)
        .output()
        .expect("binary runs")
}

fn config_arg(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(|x| x.parse().unwrap_or(f64::NAN)).collect()).collect();
    (header, rows)
}

#[test]
fn malformed_config_exits_3_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "schema = 1\n\n[system]\npreset = \"two_level\"\ndelat = 1.0\n").unwrap();
    let out = qbath(&["diagnose", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 5"), "{err}");
}

#[test]
fn parse_errors_carry_line_numbers() {
    let err = ModelConfig::parse("schema = 1\n[bath]\nfamily = \"ohmic\"\neta = \"x\"\ncutoff = 1.0\n", &[]).unwrap_err();
    assert!(err.to_string().contains("line 4"), "{err}");
    let err = ModelConfig::parse("schema = 2\n", &[]).unwrap_err();
    assert!(err.to_string().contains("schema"));
    let err = ModelConfig::parse("schema = 1\n[run]\nsolver = \"euler\"\n", &[]).unwrap_err();
    assert!(err.to_string().contains("line 3"), "{err}");
}

#[test]
fn overrides_use_dotted_keys() {
    let text = std::fs::read_to_string(configs().join("weak_ohmic.toml")).unwrap();
    let cfg = ModelConfig::parse(&text, &["bath.eta=0.05".into(), "run.solver=redfield".into()]).unwrap();
    match cfg.bath.unwrap() {
        qbath::cli::config::BathConfig::Ohmic { eta, .. } => assert_eq!(eta, 0.05),
        other => panic!("{other:?}"),
    }
    assert_eq!(cfg.run.solver, qbath::cli::config::SolverKind::Redfield);
    assert!(ModelConfig::parse(&text, &["bath.etaa=1".into()]).is_err());
    assert!(ModelConfig::parse(&text, &["no_equals_sign".into()]).is_err());
}

#[test]
fn diagnose_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let weak = qbath(&["diagnose", "--config", &config_arg("weak_ohmic.toml")], &dir.path().join("weak"));
    assert_eq!(weak.status.code(), Some(0), "{}", String::from_utf8_lossy(&weak.stdout));

    let kondo_out = dir.path().join("kondo");
    let kondo = qbath(&["diagnose", "--config", &config_arg("kondo.toml")], &kondo_out);
    assert_eq!(kondo.status.code(), Some(2));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(kondo_out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"]["markov"]["verdict"], "fail");
    assert_eq!(report["exit_code"], 2.0);

    let strong = qbath(
        &["diagnose", "--config", &config_arg("weak_ohmic.toml"), "--override", "bath.eta=0.05"],
        &dir.path().join("strong"),
    );
    assert_eq!(strong.status.code(), Some(2));
}

#[test]
fn marginal_verdict_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    // Loosen the Born bound so only the marginal band is hit.
    let out = qbath(
        &[
            "diagnose",
            "--config",
            &config_arg("weak_ohmic.toml"),
            "--override",
            "diagnostics.born_pass=0.01",
            "--override",
            "diagnostics.born_marginal=0.5",
        ],
        &dir.path().join("m"),
    );
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn solve_output_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let out = qbath(&["solve", "--config", &config_arg("v_system.toml")], d);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["trajectory.csv", "generator.json", "solve_summary.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f} differs");
    }

    // Recompute the trajectory through the library and compare with the CSV.
    use qbath::master::{propagate, Backend, OpenSystem};
    let text = std::fs::read_to_string(configs().join("v_system.toml")).unwrap();
    let cfg = ModelConfig::parse(&text, &[]).unwrap();
    let (h, ops, coupling) = cfg.model(Path::new(".")).unwrap();
    let sys = OpenSystem::new(&h, &ops, coupling, None).unwrap();
    let g = sys.redfield().unwrap();
    let rho0 = qbath::qops::DensityMatrix::pure(&[qbath::qops::ZERO, qbath::qops::ZERO, qbath::qops::ONE]).unwrap();
    let times: Vec<f64> = (0..=200).map(|k| k as f64).collect();
    let traj = propagate(&g, &rho0, &times, Backend::Auto).unwrap();

    let (header, rows) = read_csv(&a.join("trajectory.csv"));
    assert_eq!(header.len(), 1 + 2 * 9 + 1);
    assert_eq!(rows.len(), times.len());
    for (row, st) in rows.iter().zip(&traj.states) {
        let m = st.matrix();
        for i in 0..3 {
            for j in 0..3 {
                assert!((row[1 + 3 * i + j] - m[(i, j)].re).abs() <= 1e-12);
                assert!((row[10 + 3 * i + j] - m[(i, j)].im).abs() <= 1e-12);
            }
        }
    }
    // Redfield with near-degenerate transitions dips below zero.
    let min_eig = rows.iter().map(|r| r[19]).fold(f64::INFINITY, f64::min);
    assert!(min_eig < 0.0, "{min_eig}");
}

#[test]
fn spectral_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("flat.toml");
    std::fs::write(&cfg, "schema = 1\n[bath]\nfamily = \"flat\"\nlevel = 0.25\ncutoff = 10.0\n").unwrap();
    let out_dir = dir.path().join("flat");
    assert_eq!(qbath(&["spectral", "--config", cfg.to_str().unwrap()], &out_dir).status.code(), Some(0));
    let (header, rows) = read_csv(&out_dir.join("spectral.csv"));
    assert_eq!(header, vec!["omega", "J(T=0)"]);
    assert!(rows.iter().all(|r| r[1] == 0.25));

    let out_dir = dir.path().join("fermi");
    let out = qbath(&["spectral", "--config", &config_arg("fermionic_spectral.toml")], &out_dir);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = read_csv(&out_dir.join("spectral.csv"));
    assert_eq!(header.len(), 5);
    // Grid step 0.01: rows 299 and 301 straddle ω = 0.
    let (below, above) = (&rows[299], &rows[301]);
    assert!(below[1] == 0.0 && above[1] > 0.0, "zero temperature keeps the step");
    for (k, t) in [0.05f64, 0.1, 0.2].iter().enumerate() {
        let (jm, jp) = (below[2 + k], above[2 + k]);
        assert!((jm / jp - (-0.01 / t).exp()).abs() < 1e-9, "smoothed step obeys detailed balance");
    }
}

#[test]
fn out_dir_falls_back_to_env() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_qbath"))
        .args(["case", "thermalization"])
        .env(qbath::cli::OUT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("thermalization_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["files"][0], "thermalization.csv");
    assert!(summary["headlines"].as_array().unwrap().iter().all(|h| h["pass"] == true));
}
