use std::path::PathBuf;

use serde::Serialize;
use sobspec_core::oracle::example::{ExactSobolev, ExactSystems};
use sobspec_core::oracle::fixture::{check_float, check_oracle, reference_example};
use sobspec_core::oracle::ORACLE_DEGREE_CAP;
use sobspec_core::real::{self, from_f64};
use sobspec_core::{Error, MeasureSpec, Pipeline, ResidualReport, SobolevSpec};

use crate::config::{Command, RunConfig};
use crate::error::CliError;
use crate::output::{self, LedgerFile, MatrixFile};

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    match cfg.command {
        Command::Generate => generate(cfg).map(|files| {
            for f in files {
                println!("{}", f.display());
            }
        }),
        Command::Verify => verify(cfg),
        Command::ReproducePaper => reproduce(cfg),
    }
}

/// Oracle systems through `degree`, or `None` when the spec has no exact moments.
fn oracle(spec: &SobolevSpec, degree: usize) -> Result<Option<ExactSystems>, CliError> {
    match ExactSobolev::from_spec(spec, degree).and_then(|e| e.systems(degree)) {
        Ok(s) => Ok(Some(s)),
        Err(Error::UnsupportedByOracle(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Writes the leading `size x size` block of every matrix plus both ledgers.
pub fn generate(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let spec = cfg.sobolev_spec()?;
    let p = Pipeline::build(&spec, cfg.size, cfg.guard)?;
    let exact = oracle(&spec, ORACLE_DEGREE_CAP.min(cfg.size - 1))?;
    std::fs::create_dir_all(&cfg.out).map_err(|e| CliError::Io(format!("{}: {e}", cfg.out.display())))?;

    let ext = cfg.format.extension();
    let mut written = Vec::new();
    for (name, m) in p.matrices.named() {
        let lead = m.leading(cfg.size);
        let mut file = MatrixFile::from_banded(name, &lead);
        if let Some(sys) = &exact {
            if cfg.format == crate::config::Format::Json {
                let k = (sys.degree() + 1).min(lead.exact_size());
                file = file.with_exact(&sys.matrix(name, k, k)?);
            }
        }
        output::write(&cfg.out, name, cfg.format, &file.render(cfg.format))?;
        written.push(cfg.out.join(format!("{name}.{ext}")));
    }
    for ledger in [
        LedgerFile::christoffel(&p.christoffel, cfg.size),
        LedgerFile::sobolev(&p.sobolev, cfg.size),
    ] {
        let stem = format!("{}_ledger", ledger.name);
        output::write(&cfg.out, &stem, cfg.format, &ledger.render(cfg.format))?;
        written.push(cfg.out.join(format!("{stem}.{ext}")));
    }
    Ok(written)
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    config: &'a RunConfig,
    passed: bool,
    max_gated: String,
    #[serde(flatten)]
    report: &'a ResidualReport,
}

/// Writes `report.json`; fails with a verification error when any gated
/// residual exceeds the tolerance.
pub fn verify(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = cfg.sobolev_spec()?;
    let tol = cfg.tolerance()?;
    let report = Pipeline::build(&spec, cfg.size, cfg.guard)?.verify()?;
    let passed = report.passes(&tol);
    let doc = VerifyReport {
        config: cfg,
        passed,
        max_gated: real::to_decimal(&report.max_gated()),
        report: &report,
    };
    std::fs::create_dir_all(&cfg.out).map_err(|e| CliError::Io(format!("{}: {e}", cfg.out.display())))?;
    let mut text = serde_json::to_string_pretty(&doc).expect("plain data serializes");
    text.push('\n');
    let path = cfg.out.join("report.json");
    std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;

    for r in &report.residuals {
        let mark = match (r.gated, r.value <= tol) {
            (false, _) => "info",
            (true, true) => "ok",
            (true, false) => "FAIL",
        };
        println!("{mark:>4}  {:<32} block {:>3}  {:.3e}", r.name, r.block, r.value.to_f64());
    }
    println!("report: {}", path.display());
    if passed {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "largest residual {:.3e} exceeds tolerance {}",
            report.max_gated().to_f64(),
            cfg.tolerance
        )))
    }
}

/// Squared-entry comparison of the reference Laguerre example, exact and in
/// floating point at the configured precision and tolerance.
pub fn reproduce(cfg: &RunConfig) -> Result<(), CliError> {
    let prec = cfg.precision;
    let fixture = reference_example()?;
    let spec = SobolevSpec::new(
        MeasureSpec::laguerre(from_f64(prec, 0.0))?,
        from_f64(prec, -1.0),
        from_f64(prec, 1.0),
        from_f64(prec, 1.0),
    )?;
    let tol = cfg.tolerance()?;
    let sys = ExactSobolev::from_spec(&spec, 7)?.systems(7)?;
    let p = Pipeline::build(&spec, 8, cfg.guard.max(4))?;
    let exact = check_oracle(&fixture, &sys)?;
    let float = check_float(&fixture, &p.matrices, &tol)?;
    let mut failures = Vec::new();
    for (e, f) in exact.iter().zip(&float) {
        println!(
            "{:<5} exact {:>3}/{:<3} float {:>3}/{:<3}",
            e.name, e.passed, e.checked, f.passed, f.checked
        );
        failures.extend(e.failures.iter().map(|m| format!("exact {m}")));
        failures.extend(f.failures.iter().map(|m| format!("float {m}")));
    }
    for m in &failures {
        eprintln!("{m}");
    }
    if failures.is_empty() {
        println!("all reference entries reproduced");
        Ok(())
    } else {
        Err(CliError::Verification(format!("{} reference entries differ", failures.len())))
    }
}
