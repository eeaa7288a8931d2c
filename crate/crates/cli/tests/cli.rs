use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sobspec_cli::output::MatrixFile;
use sobspec_cli::Format;
use sobspec_core::matrix::max_rel_residual;
use sobspec_core::real::from_f64;
use tempfile::TempDir;

const NAMES: [&str; 9] = ["J", "L", "J1", "L1", "J2", "Q", "R", "T", "H"];

fn sobspec(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sobspec"));
    cmd.args(args);
    for (k, _) in std::env::vars() {
        if k.starts_with("SOBSPEC_") {
            cmd.env_remove(k);
        }
    }
    cmd
}

fn run(args: &[&str]) -> Output {
    sobspec(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn load(dir: &Path, name: &str, format: Format) -> MatrixFile {
    let text = fs::read_to_string(dir.join(format!("{name}.{}", format.extension()))).unwrap();
    MatrixFile::parse(&text, format).unwrap()
}

fn generate(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["generate", "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn generate_writes_every_matrix_with_reference_h() {
    let tmp = TempDir::new().unwrap();
    let out = generate(
        tmp.path(),
        &["--measure", "laguerre", "--alpha", "0", "--c", "-1", "--M", "1", "--N", "1", "--size", "8"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for name in NAMES {
        let f = load(tmp.path(), name, Format::Json);
        assert_eq!(f.exact_size, 8, "{name}");
        assert!(f.exact.is_some(), "{name}");
    }
    let h = load(tmp.path(), "H", Format::Json);
    let (i, j, v) = &h.entries[0];
    assert_eq!((*i, *j), (0, 0));
    assert!(v.starts_with("2.50000000000000000000000000000"), "{v}");
    let exact = h.exact.unwrap();
    assert_eq!(exact[0], (0, 0, "25".into(), "4".into(), 1));
    assert!(tmp.path().join("christoffel_ledger.json").exists());
    assert!(tmp.path().join("sobolev_ledger.json").exists());
}

#[test]
fn invalid_parameters_exit_2() {
    let tmp = TempDir::new().unwrap();
    for extra in [
        &["--alpha", "-2"][..],
        &["--size", "2"],
        &["--precision", "32"],
        &["--guard", "1"],
        &["--c", "1"],
        &["--M", "-1"],
        &["--c", "abc"],
        &["--format", "xml"],
        &["--measure", "custom"],
    ] {
        let out = generate(tmp.path(), extra);
        assert_eq!(code(&out), 2, "{extra:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn malformed_config_exits_2() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "size = [oops\n").unwrap();
    assert_eq!(code(&run(&["verify", "--config", cfg.to_str().unwrap()])), 2);
    fs::write(&cfg, "colour = 3\n").unwrap();
    assert_eq!(code(&run(&["verify", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn config_file_and_environment_layer_under_flags() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "c = -0.5\nM = 2\nN = \"0.25\"\nsize = 6\nformat = \"csv\"\n").unwrap();
    let dir = tmp.path().join("a");
    let out = generate(&dir, &["--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(load(&dir, "H", Format::Csv).nrows, 6);

    let dir = tmp.path().join("b");
    let out = sobspec(&["generate", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()])
        .env("SOBSPEC_SIZE", "5")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(load(&dir, "H", Format::Csv).nrows, 5);

    let dir = tmp.path().join("c");
    let out = sobspec(&["generate", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap(), "--size", "4"])
        .env("SOBSPEC_SIZE", "5")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(load(&dir, "H", Format::Csv).nrows, 4);
}

#[test]
fn vanishing_masses_give_shifted_jacobi_square() {
    let tmp = TempDir::new().unwrap();
    let out = generate(tmp.path(), &["--M", "0", "--N", "0", "--size", "10", "--c", "-1.5"]);
    assert_eq!(code(&out), 0);
    let h = load(tmp.path(), "H", Format::Json).to_banded().unwrap();
    let j = load(tmp.path(), "J", Format::Json).to_banded().unwrap();
    let s = j.shifted(&from_f64(256, -1.5), 1);
    let sq = s.mul(&s).unwrap();
    let block = h.exact_size().min(sq.exact_size());
    assert!(block >= 9);
    assert!(max_rel_residual(&h, &sq, block).unwrap() < 1e-60);
}

#[test]
fn verify_passes_at_default_precision() {
    let tmp = TempDir::new().unwrap();
    let out = run(&["verify", "--size", "20", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["size"], 20);
    let residuals = report["residuals"].as_array().unwrap();
    assert_eq!(residuals.iter().filter(|r| r["gated"] == true).count(), 7);
}

#[test]
fn verify_reports_tolerance_breach_with_exit_4() {
    let tmp = TempDir::new().unwrap();
    let out = run(&["verify", "--precision", "64", "--size", "40", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&out), 4);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], false);

    let out = run(&[
        "verify",
        "--precision",
        "64",
        "--size",
        "10",
        "--tolerance",
        "1e-6",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
}

#[test]
fn reproduce_paper_passes() {
    let out = run(&["reproduce-paper"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("J     exact  36/36  float  36/36"), "{text}");
    assert!(text.contains("J2sq"));
}

#[test]
fn reproduce_paper_at_low_precision_fails_verification() {
    let out = run(&["reproduce-paper", "--precision", "64"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn output_is_deterministic() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for format in ["json", "csv"] {
        for dir in [&a, &b] {
            assert_eq!(code(&generate(dir.path(), &["--size", "7", "--format", format])), 0);
        }
        let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        assert_eq!(names.len(), if format == "csv" { 22 } else { 11 });
        for n in names {
            assert_eq!(fs::read(a.path().join(&n)).unwrap(), fs::read(b.path().join(&n)).unwrap(), "{n:?}");
        }
    }
}

#[test]
fn matrix_files_round_trip() {
    let tmp = TempDir::new().unwrap();
    for format in [Format::Json, Format::Csv] {
        let dir = tmp.path().join(format.extension());
        let out = generate(&dir, &["--size", "9", "--alpha", "0.5", "--format", format.extension()]);
        assert_eq!(code(&out), 0);
        for name in NAMES {
            let text = fs::read_to_string(dir.join(format!("{name}.{}", format.extension()))).unwrap();
            let file = MatrixFile::parse(&text, format).unwrap();
            assert_eq!(file.render(format), text, "{name}");
            let again = MatrixFile::from_banded(name, &file.to_banded().unwrap());
            assert_eq!(again.render(format), text, "{name}");
        }
    }
}

#[test]
fn custom_recurrence_on_the_right_of_the_support() {
    let tmp = TempDir::new().unwrap();
    // Legendre: beta_n = 0, gamma_n = n^2 / (4 n^2 - 1), mass 2, support [-1, 1].
    let gamma: Vec<String> = (0..30)
        .map(|n: i64| if n == 0 { "0".into() } else { format!("{}", (n * n) as f64 / (4 * n * n - 1) as f64) })
        .collect();
    let rec = serde_json::json!({
        "beta": vec!["0"; 30],
        "gamma": gamma,
        "mass": 2,
        "lower": -1,
        "upper": 1,
    });
    let path = tmp.path().join("legendre.json");
    fs::write(&path, rec.to_string()).unwrap();
    let out = run(&[
        "verify",
        "--measure",
        "custom",
        "--recurrence",
        path.to_str().unwrap(),
        "--c",
        "2",
        "--M",
        "0.5",
        "--N",
        "0.25",
        "--size",
        "12",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    // Too few coefficients for size + guard.
    let out = run(&["verify", "--measure", "custom", "--recurrence", path.to_str().unwrap(), "--c", "2", "--size", "40"]);
    assert_eq!(code(&out), 2);
}
