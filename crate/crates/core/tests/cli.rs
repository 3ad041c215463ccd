use std::process::Command;

use carnot::cli::run;

fn carnot(args: &[&str]) -> (i32, String) {
    run(std::iter::once("carnot").chain(args.iter().copied()))
}

const BROKEN: &str = "name = broken
strata = [3, 3, 1]
[ (1,1), (1,2) ] = (2,3)
[ (1,2), (1,3) ] = (2,1)
[ (1,3), (1,1) ] = (2,2)
[ (1,1), (2,1) ] = (3,1)
";

#[test]
fn validate_exit_codes() {
    let (code, _) = carnot(&["validate", "engel"]);
    assert_eq!(code, 0);

    let path = std::env::temp_dir().join(format!("carnot-broken-{}.grp", std::process::id()));
    std::fs::write(&path, BROKEN).unwrap();
    let (code, out) = carnot(&["validate", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("(1,1), (1,2), (1,3)"), "{out}");

    let (code, out) = carnot(&["validate", "no-such-group"]);
    assert_eq!(code, 2, "{out}");
    assert!(out.contains("error"), "{out}");
    let (code, _) = carnot(&["frobnicate"]);
    assert_eq!(code, 2);
}

#[test]
fn probe_reports_stabilization() {
    let (code, out) = carnot(&["probe", "g235"]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l.contains("stabilized at 14")), "{out}");
    let (_, out) = carnot(&["probe", "heisenberg", "--degree", "4"]);
    assert!(!out.contains("stabilized"), "{out}");
}

#[test]
fn heisenberg_frames() {
    let (code, out) = carnot(&["--format", "machine", "frame", "heisenberg"]);
    assert_eq!(code, 0);
    for line in ["X(1,1)=-1/2 * x2 * ∂x3", "X(1,2)=1/2 * x1 * ∂x3", "XR(1,1)=1/2 * x2 * ∂x3", "XR(1,2)=-1/2 * x1 * ∂x3"] {
        assert!(out.lines().any(|l| l == line), "missing {line}\n{out}");
    }
}

#[test]
fn machine_output_is_deterministic() {
    for args in [
        &["--format", "machine", "solve-contact", "engel", "--degree", "2"][..],
        &["--format", "machine", "verify-weak", "heisenberg", "--field", "kernel:1:2"],
    ] {
        let (c1, a) = carnot(args);
        let (c2, b) = carnot(args);
        assert_eq!((c1, &a), (c2, &b));
        assert!(!a.is_empty());
    }
}

#[test]
fn every_subcommand_has_help() {
    for sub in ["validate", "frame", "solve-contact", "probe", "smooth-demo", "verify-weak", "chart-demo"] {
        let (code, out) = carnot(&[sub, "--help"]);
        assert_eq!(code, 0, "{sub}");
        assert!(out.contains("Usage"), "{sub}: {out}");
    }
}

#[test]
fn binary_forwards_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_carnot");
    let ok = Command::new(bin).args(["validate", "heisenberg"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(!ok.stdout.is_empty());
    let bad = Command::new(bin).args(["validate", "no-such-group"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(!bad.stderr.is_empty());
}
