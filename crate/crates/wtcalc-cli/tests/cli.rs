//! End-to-end runs of the `wtcalc` binary and its exit-code contract.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use wtcalc::diagram::Diagram;
use wtcalc::rules::{self, Suite};
use wtcalc::semantics::{compare, evaluate, Comparison, RULE_TOL};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fx(name: &str) -> String {
    fixtures().join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wtcalc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn eval_cnot_is_a_permutation() {
    let o = run(&["eval", "--in", &fx("cnot.json"), "--model", "nu"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), fs::read_to_string(fixtures().join("cnot.tensor")).unwrap());
    let text = stdout(&o);
    let ones: Vec<&str> = text
        .lines()
        .filter(|l| l.ends_with(" 1 0"))
        .map(|l| &l[..4])
        .collect();
    assert_eq!(ones, ["0000", "0101", "1011", "1110"]);
}

#[test]
fn eval_zero_scalar_and_empty() {
    let o = run(&["eval", "--in", &fx("z_pi_scalar.json"), "--model", "nu"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, " 0 0\n"));
    let o = run(&["eval", "--in", &fx("empty.json"), "--model", "nu"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, " 1 0\n"));
}

#[test]
fn eval_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.txt");
    let o = run(&["eval", "--in", &fx("wire.json"), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read_to_string(out).unwrap(), "00 1 0\n01 0 0\n10 0 0\n11 1 0\n");
}

#[test]
fn eval_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"inputs":[],"outputs":[],"nodes":[{"id":"n0","kind":"Q"}],"edges":[]}"#).unwrap();
    let o = run(&["eval", "--in", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Q"));
    assert_eq!(code(&run(&["eval", "--in", "/nonexistent/x.json"])), 2);
    // A not dot is outside the ZX-only model.
    assert_eq!(code(&run(&["eval", "--in", &fx("not.json"), "--model", "alpha"])), 1);
}

#[test]
fn compare_verdicts() {
    let o = run(&["compare", "--a", &fx("hopf_first.json"), "--b", &fx("hopf_last.json"), "--model", "nu"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "Equal\n"));
    let o = run(&["compare", "--a", &fx("cnot.json"), "--b", &fx("cnot.tensor"), "--model", "alpha"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("Proportional λ=0.7071067811865"), "{}", stdout(&o));
    let o = run(&["compare", "--a", &fx("wire.json"), "--b", &fx("not.json"), "--model", "nu"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("Different dev="));
    let o = run(&["compare", "--a", &fx("wire.json"), "--b", &fx("cnot.json")]);
    assert_eq!(code(&o), 2);
}

#[test]
fn check_rule_and_suite() {
    let o = run(&["check-rule", "--rule", "Fuse_Z", "--model", "nu"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().last().unwrap().starts_with("aggregate Sound"));
    let o = run(&["check-rule", "--rule", "Special Z", "--model", "nu"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("ProportionallySound lambda=1.41421356237309"));
    assert_eq!(code(&run(&["check-rule", "--rule", "NoSuchRule"])), 2);
    let o = run(&["--jobs", "2", "check-suite", "welltempered-zx", "--model", "nu"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).ends_with("suite welltempered-zx model nu sound 10/10\n"));
    assert_eq!(code(&run(&["check-suite", "legacy-zx", "--model", "nu"])), 1);
    assert_eq!(code(&run(&["check-suite", "nonsense"])), 2);
}

#[test]
fn check_suite_tables() {
    let o = run(&["check-suite", "tables"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.ends_with("mismatches 0\n"));
    assert!(!text.contains("MISMATCH"));
}

#[test]
fn coefficient_file_model() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bent.coeffs");
    fs::write(&path, "base nu\nu 3 4/2\nv 3 2\n").unwrap();
    let o = run(&["check-rule", "--rule", "Fuse_Z", "--model", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    fs::write(&path, "u three 1\n").unwrap();
    assert_eq!(code(&run(&["eval", "--in", &fx("wire.json"), "--model", path.to_str().unwrap()])), 2);
}

#[test]
fn solve_outputs() {
    let o = run(&["solve", "--constraints", "BialgZR,SpecialZ"]);
    assert_eq!(code(&o), 1);
    assert_eq!(
        stdout(&o),
        "UNSAT:\n  [BialgZR] x_u,3 = 1\n  [SpecialZ] x_u,3 = 0\n"
    );
    let o = run(&["solve", "--constraints", "UnitR_CounitZ,CopyZR", "--K", "4"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("u 1 = 2^{-1 /4}\n") && text.contains("u 3 = 2^{1 /4}\n"), "{text}");
    let o = run(&["solve", "--constraints", "IdZ,FuseZ,SpecialZ,BialgZR", "--cross-check"]);
    assert_eq!(code(&o), 1);
    assert_eq!(code(&run(&["solve", "--constraints", "Nope"])), 2);
    assert_eq!(code(&run(&["solve", "--constraints", "IdZ", "--K", "2"])), 2);
}

#[test]
fn simplify_hopf() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.json");
    let trace = dir.path().join("trace.txt");
    let o = run(&[
        "simplify",
        "--in",
        &fx("hopf_start.json"),
        "--out",
        out.to_str().unwrap(),
        "--validate",
        "nu",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let lines = fs::read_to_string(&trace).unwrap();
    let rules: Vec<&str> = lines.lines().map(|l| l.split(' ').nth(1).unwrap()).collect();
    assert_eq!(rules, ["Fuse_X", "Fuse_X", "Hopf"]);
    assert!(lines.lines().all(|l| l.ends_with("Equal(nu)")));
    let o = run(&["compare", "--a", out.to_str().unwrap(), "--b", &fx("hopf_last.json")]);
    assert_eq!(code(&o), 0);
    let o = run(&["simplify", "--in", &fx("wire.json"), "--out", out.to_str().unwrap(), "--strategy", "fuse,warp"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn output_is_deterministic() {
    let a = run(&["check-suite", "welltempered-zh", "--jobs", "3"]);
    let b = run(&["check-suite", "welltempered-zh", "--jobs", "1"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(code(&a), 0);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&run(&[])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["eval"])), 2);
}

fn files_under(root: &Path) -> BTreeSet<PathBuf> {
    let mut out = BTreeSet::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in fs::read_dir(&dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out
}

#[test]
fn rule_fixtures_have_not_drifted() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["export-rules", "--dir", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let committed = fixtures().join("rules");
    let (fresh, stored) = (files_under(dir.path()), files_under(&committed));
    assert_eq!(fresh, stored, "regenerate with `wtcalc export-rules --dir fixtures/rules`");
    for f in &fresh {
        assert_eq!(
            fs::read(dir.path().join(f)).unwrap(),
            fs::read(committed.join(f)).unwrap(),
            "{} drifted",
            f.display()
        );
    }
}

#[test]
fn rule_fixtures_are_sound_in_their_models() {
    let root = fixtures().join("rules");
    for suite in [Suite::WellTemperedZx, Suite::WellTemperedZh, Suite::LegacyZx, Suite::LegacyZh, Suite::Derived] {
        let model = suite.default_model();
        for schema in rules::suite(suite) {
            let dir = root.join(suite.name()).join(rules::sanitize_name(schema.name));
            let mut seen = 0;
            for f in fs::read_dir(&dir).unwrap() {
                let p = f.unwrap().path();
                let Some(stem) = p.to_str().and_then(|s| s.strip_suffix(".lhs.json")) else { continue };
                let load = |path: &str| Diagram::parse(&fs::read_to_string(path).unwrap()).unwrap();
                let (l, r) = (load(p.to_str().unwrap()), load(&format!("{stem}.rhs.json")));
                let c = compare(&evaluate(&l, &model).unwrap(), &evaluate(&r, &model).unwrap(), RULE_TOL).unwrap();
                assert_eq!(c, Comparison::Equal, "{}", p.display());
                seen += 1;
            }
            assert!(seen > 0, "{} has no fixtures", schema.name);
        }
    }
}
