use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_diracsym"))
}

fn run_with(dir: &Path, config: &str, mode: Option<&str>, name: &str) -> (Output, Option<Value>, String) {
    let cfg = dir.join(format!("{name}.cfg"));
    fs::write(&cfg, config).unwrap();
    let out = dir.join(format!("{name}.json"));
    let mut cmd = bin();
    if let Some(m) = mode {
        cmd.arg(m);
    }
    let output = cmd.arg("--config").arg(&cfg).arg("--out").arg(&out).output().unwrap();
    let report = fs::read_to_string(&out).ok().map(|s| serde_json::from_str(&s).unwrap());
    let transcript = fs::read_to_string(out.with_extension("txt")).unwrap_or_default();
    (output, report, transcript)
}

#[test]
fn flat_config_passes_with_zero_report() {
    let dir = tempfile::tempdir().unwrap();
    let (out, report, _) = run_with(dir.path(), "# flat\nmode = verify-theorem\n", None, "flat");
    assert_eq!(out.status.code(), Some(0));
    let report = report.unwrap();
    assert_eq!(report["reports"][0]["computed"], "0");
    assert_eq!(report["summary"]["pass"], true);
    assert_eq!(report["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn printed_framing_reproduces_minus_one_twelfth() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "mode = verify-theorem\nc11 = 1\ndepth = 3\nbudget = 3\nframing = printed\n";
    let (out, report, transcript) = run_with(dir.path(), cfg, None, "b");
    assert_eq!(out.status.code(), Some(0));
    let r = &report.unwrap()["reports"][0];
    assert_eq!(r["computed"], "-1/12");
    assert_eq!(r["pass"], true);
    assert!(transcript.contains("a~-3(0,xi0): -1/12"));
}

#[test]
fn parallel_transport_framing_reports_theorem_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let (out, report, _) = run_with(dir.path(), "c11 = 1\n", Some("verify-theorem"), "pt");
    assert_eq!(out.status.code(), Some(1));
    let r = &report.unwrap()["reports"][0];
    assert_eq!(r["computed"], "-1/4");
    assert_eq!(r["predicted"], "-1/12");
    assert_eq!(r["pass"], false);
}

#[test]
fn inconsistent_curvature_is_a_selfcheck_failure() {
    let dir = tempfile::tempdir().unwrap();
    let (out, report, _) = run_with(dir.path(), "mode = verify-theorem\nc24 = 1\n", None, "bad");
    assert_eq!(out.status.code(), Some(2));
    assert!(report.unwrap()["error"].as_str().unwrap().contains("self-check"));
}

#[test]
fn quadrature_failure_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let (out, report, _) = run_with(dir.path(), "mode = ft-check\nc11 = 1\ncutoff = 3\n", None, "ft");
    assert_eq!(out.status.code(), Some(3));
    assert!(report.unwrap()["error"].as_str().unwrap().contains("did not converge"));
}

#[test]
fn config_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    for (i, cfg) in ["mode = sweep\ndepth = 5\n", "mode = sweep\nspeed = 9\n", "mode = sweep\nbudget 3\n"]
        .iter()
        .enumerate()
    {
        let (out, report, _) = run_with(dir.path(), cfg, None, &format!("e{i}"));
        assert_eq!(out.status.code(), Some(4), "{cfg}");
        assert!(report.is_none());
        assert!(!out.stderr.is_empty());
    }
    let (out, _, _) = run_with(dir.path(), "mode = sweep\n", Some("ft-check"), "clash");
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(bin().arg("--config").arg(dir.path().join("missing.cfg")).output().unwrap().status.code(), Some(4));
    assert_eq!(bin().arg("no-such-mode").output().unwrap().status.code(), Some(4));
    assert_eq!(bin().output().unwrap().status.code(), Some(4));
}

#[test]
fn show_intermediates_prints_in_proof_order() {
    let out = bin().arg("show-intermediates").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut last = 0;
    for needle in [
        "g:", "g_inv:", "rho:", "norm:", "framing e~", "sigma~^1", "W_prin:", "P(+):", "P(-):", "## iteration 1", "R+,1:", "S+,1:", "T+,1:", "X+,1:",
        "R-,1:", "X-,1:", "## iteration 2", "## iteration 3", "X+,3:", "X-,3:", "## traces",
    ] {
        let at = text[last..].find(needle).unwrap_or_else(|| panic!("{needle} missing or out of order")) + last;
        last = at;
    }
}

#[test]
fn gauge_and_ft_modes_pass() {
    let dir = tempfile::tempdir().unwrap();
    let (out, report, _) = run_with(dir.path(), "c15 = 1\nc9 = -1\nc24 = 2\n", Some("gauge-check"), "g");
    assert_eq!(out.status.code(), Some(0), "{report:?}");
    let (out, report, transcript) = run_with(dir.path(), "mode = ft-check\nc11 = 1\n", None, "ft");
    assert_eq!(out.status.code(), Some(0), "{report:?}");
    let report = report.unwrap();
    assert_eq!(report["kernel_checks"]["pass"], true);
    assert_eq!(report["summary"]["line"], "6/6");
    assert!(transcript.contains("singular split (K = delta) detected: PASS"));
}

#[test]
fn sweep_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "mode = sweep\ncurvature = basis\nframing = printed\n";
    let (o1, r1, t1) = run_with(dir.path(), cfg, None, "s1");
    let (o2, r2, t2) = run_with(dir.path(), cfg, None, "s2");
    assert_eq!(o1.status.code(), Some(0));
    assert_eq!(o2.status.code(), Some(0));
    assert_eq!(
        fs::read(dir.path().join("s1.json")).unwrap(),
        fs::read(dir.path().join("s2.json")).unwrap()
    );
    assert_eq!(t1, t2);
    let r1 = r1.unwrap();
    assert_eq!(r1, r2.unwrap());
    assert_eq!(r1["summary"]["line"], "21/21");
    assert_eq!(r1["reports"].as_array().unwrap().len(), 21);
    assert!(t1.ends_with("21/21\n"));
}
