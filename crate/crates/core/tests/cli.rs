use std::path::PathBuf;
use std::process::{Command, Output};

use qudit_sim::sim::PulseSchedule;

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("qudit-sim-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, text: &str) -> String {
        let p = self.0.join(name);
        std::fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    }

    fn path(&self, name: &str) -> String {
        self.0.join(name).to_string_lossy().into_owned()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qudit-sim"))
        .args(args)
        .output()
        .unwrap()
}

const ZZ: &str = "qudit-ham v1\nD 2 N 2\nterm 0 1 0 1 1 0\n";
const XX: &str = "qudit-ham v1\nD 2 N 2\nterm 1 0 1 0 1 0\n";

#[test]
fn compile_then_verify() {
    let s = Scratch::new("roundtrip");
    let (h, k) = (s.file("h.ham", ZZ), s.file("k.ham", XX));
    let out = s.path("sched.txt");
    let r = cli(&[
        "compile",
        "--resource",
        &h,
        "--target",
        &k,
        "--time",
        "1",
        "--slices",
        "16",
        "--out",
        &out,
    ]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(String::from_utf8_lossy(&r.stdout).contains("status pass"));
    let r = cli(&[
        "verify",
        "--schedule",
        &out,
        "--resource",
        &h,
        "--target",
        &k,
        "--time",
        "1",
        "--tol",
        "1e-6",
    ]);
    assert_eq!(r.status.code(), Some(0));
    let r = cli(&[
        "verify",
        "--schedule",
        &out,
        "--resource",
        &h,
        "--target",
        &k,
        "--time",
        "2",
        "--tol",
        "1e-6",
    ]);
    assert_eq!(r.status.code(), Some(3));
}

#[test]
fn empty_schedule_is_identity() {
    let s = Scratch::new("empty");
    let sched = s.file("empty.txt", &PulseSchedule::empty(2, 2).to_text());
    let h = s.file("h.ham", ZZ);
    let r = cli(&[
        "verify",
        "--schedule",
        &sched,
        "--resource",
        &h,
        "--target",
        &h,
        "--time",
        "0",
    ]);
    assert_eq!(r.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&r.stdout).contains("distance 0.000000e0"));
}

#[test]
fn input_errors_exit_four() {
    let s = Scratch::new("errors");
    let bad = s.file("bad.ham", "qudit-ham v1\nD 3 N 2\nterm 1 0 0 0 1 0\n");
    let zz = s.file("zz.ham", "qudit-ham v1\nD 3 N 2\nterm 0 1 0 1 1 0\nterm 0 2 0 2 1 0\n");
    let r = cli(&["compile", "--resource", &zz, "--target", &bad]);
    assert_eq!(r.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&r.stderr).contains("(1,0)(0,0)"));
    let r = cli(&["compile", "--resource", &zz, "--target", &s.path("missing.ham")]);
    assert_eq!(r.status.code(), Some(4));
    let r = cli(&["peg", "--d", "6", "--j", "0", "--k", "0"]);
    assert_eq!(r.status.code(), Some(4));
}

#[test]
fn non_entangling_resources_exit_two() {
    let s = Scratch::new("ent");
    let local = s.file(
        "local.ham",
        "qudit-ham v1\nD 2 N 2\nterm 0 1 0 0 1 0\nterm 0 0 1 0 1 0\n",
    );
    let k = s.file("k.ham", XX);
    assert_eq!(
        cli(&["compile", "--resource", &local, "--target", &k]).status.code(),
        Some(2)
    );
    let split = s.file("split.ham", "qudit-ham v1\nD 2 N 3\nterm 0 1 0 1 0 0 1 0\n");
    let r = cli(&["compile", "--resource", &split, "--target", &k, "--principal", "0,1"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("not connected"));
}

#[test]
fn routed_compile_on_a_chain() {
    let s = Scratch::new("chain");
    let h = s.file(
        "chain.ham",
        "qudit-ham v1\nD 2 N 3\nterm 0 1 0 1 0 0 1 0\nterm 0 0 1 0 1 0 1 0\n",
    );
    let k = s.file("k.ham", ZZ);
    let out = s.path("sched.txt");
    for strategy in ["generic", "chain"] {
        let r = cli(&[
            "compile",
            "--resource",
            &h,
            "--target",
            &k,
            "--principal",
            "0,2",
            "--slices",
            "128",
            "--strategy",
            strategy,
            "--out",
            &out,
        ]);
        assert_eq!(
            r.status.code(),
            Some(0),
            "{strategy}: {}",
            String::from_utf8_lossy(&r.stderr)
        );
        let stdout = String::from_utf8_lossy(&r.stdout);
        assert!(stdout.contains("swap_chain [(0, 1)]"), "{stdout}");
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(text.contains("# twirl-begin"));
    }
}

#[test]
fn peg_and_uhlmann() {
    let r = cli(&["peg", "--d", "105", "--j", "104", "--k", "80"]);
    assert_eq!(r.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&r.stdout).contains("result Z^8"));

    let s = Scratch::new("uhlmann");
    let a = s.file("a.txt", "qudit-matrix v1\ndim 2\nrow 0.5 0 0.5 0\nrow 0.5 0 0.5 0\n");
    let b = s.file("b.txt", "qudit-matrix v1\ndim 2\nrow 1 0 0 0\nrow 0 0 0 0\n");
    let r = cli(&["uhlmann", "--a", &a, "--b", &b]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let out = String::from_utf8_lossy(&r.stdout);
    assert!(out.contains("weight_sum 1.000000000000"), "{out}");
}
