//! Golden-output tests for the `algmod` binary. Set `UPDATE_GOLDEN=1` to
//! rewrite the expected files.

use std::path::PathBuf;
use std::process::Command;

struct Case {
    name: &'static str,
    args: &'static [&'static str],
    code: i32,
}

const CASES: &[Case] = &[
    Case {
        name: "validate_bullet4",
        args: &["validate", "tests/data/bullet4.json"],
        code: 0,
    },
    Case {
        name: "validate_noncommutative",
        args: &["validate", "tests/data/noncommutative.json"],
        code: 1,
    },
    Case {
        name: "disc_split3",
        args: &["--format", "json", "disc", "split:3:5"],
        code: 0,
    },
    Case {
        name: "disc_bullet3",
        args: &["--format", "csv", "disc", "bullet:3:5"],
        code: 0,
    },
    Case {
        name: "act_shear",
        args: &["act", "--matrix", "tests/data/shear3.json", "split:3:3"],
        code: 0,
    },
    Case {
        name: "iso_f4_split",
        args: &["iso", "mono:2:1,1", "split:2:2"],
        code: 1,
    },
    Case {
        name: "iso_dual",
        args: &["iso", "mono:3:0,0", "bullet:2:3"],
        code: 0,
    },
    Case {
        name: "aut_bullet3",
        args: &["aut", "bullet:3:3"],
        code: 0,
    },
    Case {
        name: "aut_split3_list",
        args: &["aut", "--list", "split:3:2"],
        code: 0,
    },
    Case {
        name: "classify_2_2",
        args: &["classify", "--n", "2", "--q", "2"],
        code: 0,
    },
    Case {
        name: "classify_3_3",
        args: &["classify", "--n", "3", "--q", "3"],
        code: 0,
    },
    Case {
        name: "classify_3_2_reversed",
        args: &[
            "classify",
            "--n",
            "3",
            "--q",
            "2",
            "--seed-order",
            "reversed",
        ],
        code: 0,
    },
    Case {
        name: "classify_3_2_json",
        args: &["--format", "json", "classify", "--n", "3", "--q", "2"],
        code: 0,
    },
    Case {
        name: "census_4_2",
        args: &["census", "--n", "4", "--q", "2"],
        code: 0,
    },
    Case {
        name: "tangent_bullet4",
        args: &[
            "tangent", "--point", "bullet", "--n", "4", "--q", "2", "--space", "b1",
        ],
        code: 0,
    },
    Case {
        name: "tangent_split3_json",
        args: &[
            "--format", "json", "tangent", "--point", "split", "--n", "3", "--q", "3", "--space",
            "b",
        ],
        code: 0,
    },
    Case {
        name: "lift_pi_2",
        args: &["lift-check", "--p", "2"],
        code: 1,
    },
    Case {
        name: "lift_split_3",
        args: &["lift-check", "--p", "3", "--point", "split:3"],
        code: 0,
    },
    Case {
        name: "bounds_12",
        args: &["bounds", "--n-max", "12"],
        code: 0,
    },
    Case {
        name: "canonical_x4",
        args: &["canonical", "mono:2:0,0,0,0"],
        code: 0,
    },
    Case {
        name: "rings_2_2",
        args: &["rings", "--p", "2", "--n", "2", "--check"],
        code: 0,
    },
    Case {
        name: "rings_3_2_csv",
        args: &["--format", "csv", "rings", "--p", "3", "--n", "2"],
        code: 0,
    },
];

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str], threads: Option<usize>) -> (String, i32) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_algmod"));
    cmd.current_dir(crate_dir()).env_remove("ALGMOD_BUDGET");
    if let Some(t) = threads {
        cmd.args(["--threads", &t.to_string()]);
    }
    let out = cmd.args(args).output().expect("binary runs");
    (
        String::from_utf8(out.stdout).expect("utf-8 output"),
        out.status.code().expect("exit code"),
    )
}

#[test]
fn golden_outputs() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut failures = Vec::new();
    for case in CASES {
        let (out, code) = run(case.args, None);
        let path = crate_dir()
            .join("tests/golden")
            .join(format!("{}.txt", case.name));
        if update {
            std::fs::write(&path, &out).unwrap();
        }
        let expected =
            std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
        if out != expected || code != case.code {
            failures.push(format!(
                "{} (exit {code}, expected {})",
                case.name, case.code
            ));
        }
    }
    assert!(failures.is_empty(), "mismatched: {failures:?}");
}

#[test]
fn output_is_independent_of_thread_count() {
    for case in CASES {
        let one = run(case.args, Some(1));
        let many = run(case.args, Some(4));
        assert_eq!(one, many, "{}", case.name);
    }
}

#[test]
fn documented_examples() {
    assert_eq!(
        run(&["validate", "tests/data/bullet4.json"], None),
        ("valid\n".into(), 0)
    );
    let (csv, code) = run(&["classify", "--n", "2", "--q", "2"], None);
    assert_eq!((csv.lines().count(), code), (4, 0));
    assert_eq!(
        run(
            &["tangent", "--point", "bullet", "--n", "4", "--q", "2", "--space", "b1"],
            None
        )
        .0,
        "18\n"
    );
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["classify", "--n", "2"][..],
        &["validate", "tests/data/missing.json"],
        &["validate", "tests/data/unreduced.json"],
        &["tangent", "--point", "bullet", "--n", "3"],
        &["validate", "bullet:x:2"],
        &["disc", "split:2:4"],
        &["act", "--matrix", "tests/data/bullet4.json", "split:2:2"],
        &["frobnicate"],
    ] {
        assert_eq!(run(args, None).1, 2, "{args:?}");
    }
}

#[test]
fn budget_errors_exit_with_two() {
    let out = Command::new(env!("CARGO_BIN_EXE_algmod"))
        .current_dir(crate_dir())
        .env("ALGMOD_BUDGET", "10")
        .args(["classify", "--n", "3", "--q", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn canonical_round_trip_through_files() {
    let (data, code) = run(&["canonical", "mono:3:0,0,0"], None);
    assert_eq!(code, 0);
    let path = std::env::temp_dir().join(format!("algmod-canonical-{}.json", std::process::id()));
    std::fs::write(&path, data.trim()).unwrap();
    let (table, code) = run(
        &["canonical", "--reconstruct", path.to_str().unwrap()],
        None,
    );
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 0);
    let (iso, code) = {
        let tpath = std::env::temp_dir().join(format!("algmod-table-{}.json", std::process::id()));
        std::fs::write(&tpath, table.trim()).unwrap();
        let r = run(&["iso", tpath.to_str().unwrap(), "mono:3:0,0,0"], None);
        std::fs::remove_file(&tpath).ok();
        r
    };
    assert_eq!(code, 0, "{iso}");
}
