use std::io::Write;
use std::process::{Command, Output, Stdio};

fn soire(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_soire")).args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

#[test]
fn match_reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_soire"))
        .args(["match", "--regex", "(a&b)c*"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"bacc\nacb\nab\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "1\n0\n1\n");
}

#[test]
fn gen_train_interpret_eval() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    soire(&[
        "gen", "--fixture", "21", "--alphabet", "ab", "--train-size", "30", "--val-size", "10", "--test-size", "30",
        "--out", &p("data"),
    ]);
    for split in ["train", "validation", "test"] {
        assert!(dir.path().join("data").join(format!("{split}.txt")).exists());
    }
    soire(&[
        "train", "--train", &p("data/train.txt"), "--validation", &p("data/validation.txt"), "--epochs", "5",
        "--out", &p("run"),
    ]);
    let log = std::fs::read_to_string(dir.path().join("run/train_log.csv")).unwrap();
    assert_eq!(log.lines().count(), 6);
    let out = soire(&["interpret", "--checkpoint", &p("run/checkpoint.txt"), "--train", &p("data/train.txt")]);
    let text = String::from_utf8(out.stdout).unwrap();
    let prefix = text.lines().find_map(|l| l.strip_prefix("prefix ")).unwrap().to_string();
    let out = soire(&[
        "eval", "--checkpoint", &p("run/checkpoint.txt"), "--regex", &prefix, "--test", &p("data/test.txt"),
        "--dataset-id", "21", "--header",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row.len(), 5);
    assert_eq!(row[0], "21");
    for x in &row[2..] {
        let v: f64 = x.parse().unwrap();
        assert!((0.0..=1.0).contains(&v));
    }
}

#[test]
fn rejects_two_targets() {
    let out = Command::new(env!("CARGO_BIN_EXE_soire"))
        .args(["gen", "--fixture", "1", "--regex", "ab", "--out", "unused"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
