use std::process::{Command, Output};

fn qkdv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qkdv")).args(args).env_remove("QKDV_CACHE").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn density_examples() {
    let o = qkdv(&["density", "kdv", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "u0^2/2 - 1/24 + (eps/24) u2\n");
    assert_eq!(stdout(&qkdv(&["density", "kdv", "-1"])), "u0\n");
    let ilw = stdout(&qkdv(&["density", "ilw", "1", "--genus", "2"]));
    assert!(ilw.contains("mu^2 u4/1152"), "{ilw}");
    assert!(!ilw.contains("mu^4"), "{ilw}");
}

#[test]
fn verify_table() {
    let o = qkdv(&["verify", "kdv", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 5);
    assert!(out.contains("PASS kdv k=0 weight=2 : G2 + c^2/2\n"), "{out}");
    assert!(out.contains("PASS kdv k=2 weight=4 : G2^2/2 + G4/12 + c^2 G2/2 + c^4/24 - (eps/24) 2 c G4 + (eps/24)^2 12 G6/5"), "{out}");
    let o = qkdv(&["verify", "ilw", "1", "--genus", "2", "--qorder", "20"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS ilw (G=2) k=1 weight=3"));
}

#[test]
fn exit_codes() {
    assert_eq!(qkdv(&["verify", "kdv", "1", "--qorder", "4"]).status.code(), Some(1));
    assert_eq!(qkdv(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qkdv(&["density", "kdv", "-7"]).status.code(), Some(2));
    assert_eq!(qkdv(&["--help"]).status.code(), Some(0));
}

#[test]
fn eigenvalue_examples() {
    let o = qkdv(&["eigenvalues", "0", "3", "--order", "2"]);
    assert_eq!(o.status.code(), Some(0));
    for line in stdout(&o).lines() {
        assert!(line.ends_with(": c^2/2 + 71/24"), "{line}");
    }
    let o = qkdv(&["eigenvalues", "1", "2", "--order", "0"]);
    assert_eq!(stdout(&o), "s(2): c^3/6 + 47 c/24 + 1\ns(1,1): c^3/6 + 47 c/24 - 1\n");
}

#[test]
fn cache_via_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_qkdv")).args(args).env("QKDV_CACHE", dir.path()).output().unwrap()
    };
    assert_eq!(run(&["cache", "build", "kdv", "6"]).status.code(), Some(0));
    let path = dir.path().join("kdv.json");
    let first = std::fs::read(&path).unwrap();
    assert_eq!(stdout(&run(&["cache", "validate", "kdv"])), format!("OK {} k_max=6\n", path.display()));
    assert_eq!(run(&["cache", "build", "kdv", "6"]).status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), first);
    let text = String::from_utf8(first).unwrap();
    std::fs::write(&path, text.replacen("\"1/24\"", "\"1/25\"", 1)).unwrap();
    let o = run(&["cache", "validate", "kdv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("cache validation failed"));
    assert_eq!(run(&["cache", "clear", "kdv"]).status.code(), Some(0));
    assert!(!path.exists());
}
