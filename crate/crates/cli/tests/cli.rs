use std::process::{Command, Output};

fn x0quot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_x0quot"))
        .args(args)
        .env_remove("X0QUOT_DATA_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn genus_query() {
    let o = x0quot(&["genus", "120", "--w", "w15"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "5\n");
    assert_eq!(stdout(&x0quot(&["genus", "37"])), "2\n");
}

#[test]
fn usage_error_names_token() {
    let o = x0quot(&["genus", "120", "--w", "w7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("'w7'"), "{}", stderr(&o));

    let o = x0quot(&["group-genus", "120", "--gens", "w8,X2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("'X2'"));

    let o = x0quot(&["classify", "--format", "xml"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("'xml'"));

    assert_eq!(x0quot(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(x0quot(&["fix", "120"]).status.code(), Some(2));
}

#[test]
fn group_genus_and_fix() {
    assert_eq!(stdout(&x0quot(&["group-genus", "126", "--gens", "w9,V3*w7"])), "1\n");
    assert_eq!(stdout(&x0quot(&["fix", "120", "--w", "V2*w40"])), "16\n");
    let o = x0quot(&["fix", "252", "--all", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("element,count\n"));
    assert!(text.contains("\nV3*w7,24\n"));
    assert!(text.contains("\nw63,24\n"));
}

#[test]
fn genus_matrix_row() {
    let o = x0quot(&["genus", "252", "--all", "--format", "csv"]);
    let text = stdout(&o);
    assert_eq!(text.lines().nth(1), Some("252,37,17,19,19,19,19,13,17,9,9,7,5,9,9,7,3"));
}

#[test]
fn screen_and_quadpoints() {
    let o = x0quot(&["screen", "90", "--w", "w9"]);
    assert_eq!(stdout(&o), "bielliptic-confirmed V3*w10 Q\n");
    let o = x0quot(&["screen", "84", "--w", "w3", "--trace"]);
    let text = stdout(&o);
    assert!(text.starts_with("adjudicated not-bielliptic lem7.6\n"));
    assert!(text.contains("star-gate"));
    assert_eq!(stdout(&x0quot(&["quadpoints", "171", "--w", "w9"])), "finite\n");
    assert!(stdout(&x0quot(&["quadpoints", "40", "--w", "w8"])).starts_with("infinite (hyperelliptic)"));
}

#[test]
fn classify_is_deterministic() {
    let a = x0quot(&["classify", "--format", "csv"]);
    let b = x0quot(&["classify", "--format", "csv"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 548);
    let j = x0quot(&["classify", "--level", "126", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 13);
}

#[test]
fn missing_data_dir() {
    let dir = std::env::temp_dir().join("x0quot-no-such-dir");
    let o = x0quot(&["--data-dir", dir.to_str().unwrap(), "screen", "90", "--w", "w9"]);
    assert_eq!(o.status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_x0quot"))
        .args(["quadpoints", "99", "--w", "w9"])
        .env("X0QUOT_DATA_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn data_dir_round_trip() {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data");
    let o = x0quot(&["--data-dir", data, "quadpoints", "99", "--w", "w11"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("99a"));
}

#[test]
fn selftest_passes() {
    let o = x0quot(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("appendix-a: 772 cells verified"));
    assert!(text.contains("fix-tables: 37 counts checked"));
    assert!(text.contains("124 bielliptic"));
}
