use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wildjl"))
}

fn scenarios() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn tmp(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("wildjl-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn shipped_suite_passes_despite_control() {
    let out = bin().arg("suite").arg(scenarios()).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let log = String::from_utf8_lossy(&out.stderr);
    assert!(log.contains("FAIL (control)"));
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(reports.as_array().unwrap().len(), 6);
}

#[test]
fn empty_suite_succeeds() {
    let out = bin().arg("suite").arg(tmp("empty")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn exit_codes() {
    let s = scenarios();
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code();
    assert_eq!(code(&["run", s.join("03_control.toml").to_str().unwrap()]), Some(2));
    assert_eq!(code(&["run", s.join("01_headline.toml").to_str().unwrap(), "--precision", "3"]), Some(4));
    assert_eq!(code(&["run", "missing.toml"]), Some(4));
    assert_eq!(code(&["frobnicate"]), Some(4));
}

#[test]
fn reports_are_byte_identical() {
    let d = tmp("det");
    let file = scenarios().join("05_inner_z2.toml");
    for (name, workers) in [("a.json", "1"), ("b.json", "4")] {
        let st = bin()
            .args(["run", file.to_str().unwrap(), "--workers", workers, "--report"])
            .arg(d.join(name))
            .status()
            .unwrap();
        assert!(st.success());
    }
    assert_eq!(std::fs::read(d.join("a.json")).unwrap(), std::fs::read(d.join("b.json")).unwrap());
}

#[test]
fn a_failing_scenario_fails_the_suite() {
    let d = tmp("bad");
    let text = std::fs::read_to_string(scenarios().join("03_control.toml")).unwrap();
    std::fs::write(d.join("x.toml"), text.replace("control = true", "control = false")).unwrap();
    let out = bin().arg("suite").arg(&d).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
