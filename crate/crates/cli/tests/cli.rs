use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> String {
    format!("{}/../../corpus/{name}.loop", env!("CARGO_MANIFEST_DIR"))
}

fn invgen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invgen")).args(args).output().unwrap()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("invgen-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn run_prints_json_report() {
    let out = invgen(&["run", &corpus("euclidex"), "--json", "--oracle", "20"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["name"], "euclidex");
    assert_eq!(v["branches"], 2);
    assert_eq!(v["variables"], 6);
    assert_eq!(v["iterations"], 3);
    assert_eq!(v["algorithm"], "fixpoint");
    assert_eq!(v["oracle"]["trials"], 20);
    assert_eq!(v["oracle"]["violations"].as_array().unwrap().len(), 0);
    assert!(v["generators"].as_array().unwrap().iter().any(|g| g == "q*r - p*s - q_0*r_0 + p_0*s_0"));
}

#[test]
fn json_is_byte_identical_across_runs() {
    let args = ["run", &corpus("fermat"), "--json", "--oracle", "30", "--seed", "11", "--no-timings"];
    let a = invgen(&args);
    let b = invgen(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn text_output_and_unrolled() {
    let out = invgen(&["run", &corpus("mannadiv"), "--algorithm", "unrolled"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("mannadiv: 2 branches, 3 variables"), "{text}");
    assert!(text.contains("(unrolled)"));
}

#[test]
fn exit_codes_per_error_class() {
    let parse = scratch("bad.loop", "while do a := end\n");
    let out = invgen(&["run", parse.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1:15"));

    let unsupported = scratch("fib.loop", "vars x, y, t\nwhile c do t := x + y\nx := y\ny := t end while\n");
    assert_eq!(invgen(&["run", unsupported.to_str().unwrap()]).status.code(), Some(4));

    let out = invgen(&["run", &corpus("euclidex"), "--pair-budget", "2"]);
    assert_eq!(out.status.code(), Some(5));

    assert_eq!(invgen(&["run", "/nonexistent/x.loop"]).status.code(), Some(7));
}

#[test]
fn bench_directory() {
    let p = scratch("one.loop", "vars x\nwhile c do x := 2 * x end while\n");
    let dir = p.parent().unwrap().join("bench");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::copy(&p, dir.join("one.loop")).unwrap();
    let out = invgen(&["bench", dir.to_str().unwrap(), "--json", "--no-timings"]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 1);
    assert_eq!(rows[0]["fixpoint"]["status"], "ok");
}
