//! Batch driver behind the `diracsym` binary.

mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

pub use config::{parse_config, parse_config_with_mode, ConfigError, CurvatureSpec, Mode, RunConfig};

use crate::asymmetry::{asymmetry_components, sweep, AsymmetryError, AsymmetryReport, PipelineConfig};
use crate::geometry::{bianchi_basis, curvature_selfcheck, CurvatureData, GeometryError, GeometryJets};
use crate::gauge::standard_checks;
use crate::kernel::{kernel_checks, KernelError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_THEOREM: i32 = 1;
pub const EXIT_SELFCHECK: i32 = 2;
pub const EXIT_QUADRATURE: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

/// Everything a run produces.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub report: Value,
    pub transcript: String,
}

impl RunOutcome {
    /// Pretty JSON with a trailing newline.
    pub fn report_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("report serializes");
        s.push('\n');
        s
    }
}

fn envelope(cfg: &RunConfig, passed: usize, total: usize, exit_code: i32) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    m.insert("mode".into(), cfg.mode.name().into());
    m.insert("config_echo".into(), cfg.echo());
    m.insert(
        "summary".into(),
        json!({
            "passed": passed,
            "total": total,
            "line": format!("{passed}/{total}"),
            "pass": exit_code == EXIT_OK,
            "exit_code": exit_code,
        }),
    );
    m
}

fn failed(cfg: &RunConfig, exit_code: i32, message: String) -> RunOutcome {
    let mut m = envelope(cfg, 0, 1, exit_code);
    m.insert("error".into(), message.clone().into());
    RunOutcome {
        exit_code,
        report: Value::Object(m),
        transcript: format!("error: {message}\n"),
    }
}

fn pipeline_exit(e: &AsymmetryError) -> i32 {
    match e {
        AsymmetryError::Geometry(GeometryError::BudgetTooSmall(..)) => EXIT_CONFIG,
        _ => EXIT_SELFCHECK,
    }
}

fn pipeline(cfg: &RunConfig) -> PipelineConfig {
    PipelineConfig {
        budget: cfg.budget,
        depth: cfg.depth,
        framing: cfg.framing,
    }
}

fn data_of(cfg: &RunConfig) -> CurvatureData {
    match &cfg.curvature {
        CurvatureSpec::Data(d) => d.clone(),
        CurvatureSpec::Basis => CurvatureData::flat(),
    }
}

fn summary_line(r: &AsymmetryReport) -> String {
    format!(
        "{:<10} a~0(0)={} a~-1(0)={} a~-2(0)={} a~-3(0)={} predicted={} {}",
        r.generator,
        r.at_origin(0),
        r.at_origin(-1),
        r.at_origin(-2),
        r.computed,
        r.predicted,
        if r.pass() { "PASS" } else { "FAIL" }
    )
}

fn run_single(cfg: &RunConfig) -> RunOutcome {
    let data = data_of(cfg);
    let report = match asymmetry_components(&data.label(), &data, &pipeline(cfg)) {
        Ok(r) => r,
        Err(e) => return failed(cfg, pipeline_exit(&e), e.to_string()),
    };
    let code = if report.pass() { EXIT_OK } else { EXIT_THEOREM };
    let mut m = envelope(cfg, report.pass() as usize, 1, code);
    m.insert("reports".into(), Value::Array(vec![report.to_json()]));
    let mut transcript = report.transcript.clone();
    let _ = writeln!(transcript, "\n## verdict\n{}", summary_line(&report));
    RunOutcome {
        exit_code: code,
        report: Value::Object(m),
        transcript,
    }
}

fn run_sweep(cfg: &RunConfig) -> RunOutcome {
    let result = match sweep(&bianchi_basis(), &pipeline(cfg)) {
        Ok(r) => r,
        Err(e) => return failed(cfg, pipeline_exit(&e), e.to_string()),
    };
    let code = if result.all_pass() { EXIT_OK } else { EXIT_THEOREM };
    let mut m = envelope(cfg, result.passed(), result.reports.len(), code);
    m.insert(
        "reports".into(),
        Value::Array(result.reports.iter().map(AsymmetryReport::to_json).collect()),
    );
    m.insert(
        "combinations".into(),
        Value::Array(result.combinations.iter().map(|c| c.to_json()).collect()),
    );
    let mut transcript = String::new();
    for r in &result.reports {
        let _ = writeln!(transcript, "{}", summary_line(r));
    }
    for c in &result.combinations {
        let _ = writeln!(
            transcript,
            "{:<10} computed={} superposed={} predicted={} {}",
            c.label,
            c.report.computed,
            c.superposed,
            c.report.predicted,
            if c.pass() { "PASS" } else { "FAIL" }
        );
    }
    let _ = writeln!(transcript, "{}/{}", result.passed(), result.reports.len());
    RunOutcome {
        exit_code: code,
        report: Value::Object(m),
        transcript,
    }
}

fn run_ft(cfg: &RunConfig) -> RunOutcome {
    let checks = match kernel_checks(&data_of(cfg), &cfg.quadrature) {
        Ok(c) => c,
        Err(e @ KernelError::InvalidConfig(_)) => return failed(cfg, EXIT_CONFIG, e.to_string()),
        Err(e) => return failed(cfg, EXIT_QUADRATURE, e.to_string()),
    };
    let verdicts = [
        ("sphere-average monomial", checks.monomial_pass()),
        ("sphere-average trace-free", checks.trace_free_pass()),
        ("sphere-average identity", checks.identity_pass()),
        ("F33 log limit", checks.log_limit_pass()),
        ("singular split (curvature)", checks.split_curvature.pass()),
        ("singular split (K = delta) detected", checks.failure_detected()),
    ];
    let passed = verdicts.iter().filter(|v| v.1).count();
    let code = if checks.pass() { EXIT_OK } else { EXIT_QUADRATURE };
    let mut m = envelope(cfg, passed, verdicts.len(), code);
    m.insert("kernel_checks".into(), checks.to_json());
    let mut transcript = String::new();
    for (name, ok) in verdicts {
        let _ = writeln!(transcript, "{name}: {}", if ok { "PASS" } else { "FAIL" });
    }
    RunOutcome {
        exit_code: code,
        report: Value::Object(m),
        transcript,
    }
}

fn run_gauge(cfg: &RunConfig) -> RunOutcome {
    let checks = GeometryJets::build_with(&data_of(cfg), cfg.budget, cfg.framing)
        .map_err(|e| e.to_string())
        .and_then(|g| {
            curvature_selfcheck(&g).map_err(|e| e.to_string())?;
            standard_checks(&g).map_err(|e| e.to_string())
        });
    let checks = match checks {
        Ok(c) => c,
        Err(e) => return failed(cfg, EXIT_SELFCHECK, e),
    };
    let passed = checks.iter().filter(|c| c.pass).count();
    let code = if passed == checks.len() { EXIT_OK } else { EXIT_SELFCHECK };
    let mut m = envelope(cfg, passed, checks.len(), code);
    m.insert(
        "gauge_checks".into(),
        Value::Array(checks.iter().map(|c| json!({"check": c.name, "pass": c.pass})).collect()),
    );
    let mut transcript = String::new();
    for c in &checks {
        let _ = writeln!(transcript, "{}: {}", c.name, if c.pass { "PASS" } else { "FAIL" });
    }
    RunOutcome {
        exit_code: code,
        report: Value::Object(m),
        transcript,
    }
}

pub fn run(cfg: &RunConfig) -> RunOutcome {
    if let Err(e) = cfg.validate() {
        return failed(cfg, EXIT_CONFIG, e.to_string());
    }
    match cfg.mode {
        Mode::VerifyTheorem | Mode::ShowIntermediates => run_single(cfg),
        Mode::Sweep => run_sweep(cfg),
        Mode::FtCheck => run_ft(cfg),
        Mode::GaugeCheck => run_gauge(cfg),
    }
}

/// The transcript sits next to the report, with extension `txt`.
pub fn transcript_path(report: &Path) -> PathBuf {
    report.with_extension("txt")
}

pub fn write_outputs(outcome: &RunOutcome, report: &Path) -> std::io::Result<()> {
    fs::write(report, outcome.report_text())?;
    fs::write(transcript_path(report), &outcome.transcript)
}

pub fn load_config(path: &Path, mode: Option<Mode>) -> Result<RunConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config_with_mode(&text, mode)
}
