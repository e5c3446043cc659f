use std::path::Path;
use std::process::{Command, Output};

use deimkit::io::write_matrix;
use deimkit::linalg::haar_orthonormal;
use deimkit::selection::SelectionRecord;
use deimkit::Matrix;

fn deimkit(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deimkit"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn identity_columns(dir: &Path) -> String {
    let u = Matrix::from_fn(10, 2, |i, j| {
        if (j == 0 && i == 2) || (j == 1 && i == 6) {
            1.0
        } else {
            0.0
        }
    });
    let path = dir.join("id.mtx");
    write_matrix(&path, &u).unwrap();
    path.to_string_lossy().into_owned()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn identity_columns_select_their_rows() {
    let dir = tempfile::tempdir().unwrap();
    let input = identity_columns(dir.path());
    for method in ["deim", "qdeim", "lu", "volume"] {
        let out = dir.path().join(method);
        let o = deimkit(&["select", &input, "--method", method], &out);
        assert!(
            o.status.success(),
            "{method}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let rec: SelectionRecord =
            serde_json::from_str(&std::fs::read_to_string(out.join("selection.json")).unwrap())
                .unwrap();
        let mut idx = rec.indices.clone();
        idx.sort_unstable();
        assert_eq!(idx, vec![3, 7], "{method}");
        assert_eq!(rec.c, 1.0);
        assert_eq!(rec.method, method);
    }
}

#[test]
fn manifest_lists_every_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench");
    let o = deimkit(
        &[
            "benchmark-random",
            "--n",
            "200",
            "--m",
            "5",
            "--trials",
            "4",
        ],
        &out,
    );
    assert!(o.status.success());
    let m = manifest(&out);
    let listed: Vec<&str> = m["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    let mut on_disk: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    on_disk.sort();
    let mut listed_sorted: Vec<String> = listed.iter().map(|s| s.to_string()).collect();
    listed_sorted.sort();
    assert_eq!(listed_sorted, on_disk);
    assert_eq!(m["config"]["n"], 200);
    assert!(m["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
}

#[test]
fn missing_input_is_an_io_failure() {
    let dir = tempfile::tempdir().unwrap();
    let o = deimkit(&["select", "does-not-exist.mtx"], &dir.path().join("o"));
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("does-not-exist.mtx"));
}

#[test]
fn bad_flags_are_usage_failures() {
    let dir = tempfile::tempdir().unwrap();
    let input = identity_columns(dir.path());
    assert_eq!(
        deimkit(
            &["select", &input, "--method", "nope"],
            &dir.path().join("a")
        )
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        deimkit(&["select", &input, "--m", "5"], &dir.path().join("b"))
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn rank_deficient_input_is_a_numeric_failure() {
    let dir = tempfile::tempdir().unwrap();
    let u = Matrix::from_fn(8, 2, |i, _| i as f64 + 1.0);
    let path = dir.path().join("dep.mtx");
    write_matrix(&path, &u).unwrap();
    let o = deimkit(
        &["select", path.to_str().unwrap(), "--method", "deim"],
        &dir.path().join("o"),
    );
    assert_eq!(
        o.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn failed_postcondition_exits_five() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tight");
    let o = deimkit(&["paramfun-demo", "--paper-preset", "ex31-tight"], &out);
    let m = manifest(&out);
    let failed = m["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["passed"] == false);
    assert_eq!(o.status.code(), Some(if failed { 5 } else { 0 }));
}

#[test]
fn qdeimr_select_respects_threshold_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.mtx");
    write_matrix(&path, &haar_orthonormal(500, 8, 2).unwrap()).unwrap();
    let input = path.to_str().unwrap();
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = deimkit(
            &[
                "select",
                input,
                "--method",
                "qdeimr",
                "--seed",
                seed,
                "--threshold",
                "40",
            ],
            &out,
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read_to_string(out.join("selection.json")).unwrap()
    };
    let (a, b) = (run("a", "9"), run("b", "9"));
    assert_eq!(a, b);
    let rec: SelectionRecord = serde_json::from_str(&a).unwrap();
    assert!(rec.c <= 40.0);
    assert_eq!(rec.seed, Some(9));
}

#[test]
fn unstable_stepping_is_reported_as_blowup() {
    let dir = tempfile::tempdir().unwrap();
    for steps in ["3", "10"] {
        let o = deimkit(
            &["rc-demo", "--n", "50", "--snapshots", "3", "--steps", steps],
            &dir.path().join(steps),
        );
        assert_eq!(
            o.status.code(),
            Some(6),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(String::from_utf8_lossy(&o.stderr).contains("\"steps\":"));
    }
}
