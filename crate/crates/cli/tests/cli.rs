use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn repsel(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repsel"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// A temp dir holding a synthetic year as `year.csv`.
fn workspace(days: usize) -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let out = repsel(
        dir.path(),
        &[
            "synth",
            "--days",
            &days.to_string(),
            "--seed",
            "5",
            "--out",
            "year.csv",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let path = dir.path().join("year.csv");
    (dir, path)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn weight_days(selection: &Value) -> f64 {
    let per = selection["geometry"]["days_per_period"].as_f64().unwrap();
    selection["periods"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["weight"].as_f64().unwrap() * per)
        .sum()
}

#[test]
fn select_three_day_periods() {
    let (dir, _) = workspace(365);
    let out = repsel(
        dir.path(),
        &[
            "select",
            "-i",
            "year.csv",
            "--features",
            "load,wind,solar",
            "--length-days",
            "3",
            "--periods",
            "12",
            "--solver",
            "exact",
            "--node-limit",
            "100",
            "--time-limit",
            "0",
            "--out-dir",
            "run",
        ],
    );
    assert!([0, 4].contains(&code(&out)), "{}", stderr(&out));
    let sel = json(&dir.path().join("run/selection.json"));
    assert_eq!(sel["k"], 12);
    assert_eq!(weight_days(&sel), 365.0);
    let status = sel["optimality"]["status"].as_str().unwrap();
    assert_eq!(code(&out) == 4, status == "bounded");
    let reps = std::fs::read_to_string(dir.path().join("run/representatives.csv")).unwrap();
    assert_eq!(reps.lines().count(), 1 + 12 * 72);
    assert!(dir.path().join("run/fidelity.json").exists());
    let manifest = json(&dir.path().join("run/manifest.json"));
    assert_eq!(manifest["task"]["command"], "select");
    assert_eq!(manifest["outputs"].as_object().unwrap().len(), 3);
}

#[test]
fn twenty_one_representative_days() {
    let (dir, _) = workspace(365);
    let out = repsel(
        dir.path(),
        &[
            "select",
            "-i",
            "year.csv",
            "--length-days",
            "1",
            "--periods",
            "21",
            "--solver",
            "exact",
            "--dump-distance-matrix",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let sel = json(&dir.path().join("out/selection.json"));
    assert_eq!(sel["periods"].as_array().unwrap().len(), 21);
    assert_eq!(weight_days(&sel), 365.0);
    assert_eq!(sel["optimality"]["status"], "proven-optimal");
    let dist = std::fs::read_to_string(dir.path().join("out/distance.csv")).unwrap();
    assert_eq!(dist.lines().count(), 366);
}

#[test]
fn heuristic_solvers_and_raw_units() {
    let (dir, _) = workspace(40);
    for solver in ["greedy", "swap"] {
        let out = repsel(
            dir.path(),
            &[
                "select",
                "-i",
                "year.csv",
                "--target-days",
                "6",
                "--length-days",
                "2",
                "--solver",
                solver,
                "--out-dir",
                solver,
            ],
        );
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let sel = json(&dir.path().join(format!("{solver}/selection.json")));
        assert_eq!(sel["k"], 3);
        assert_eq!(sel["method"], solver);
        let reps =
            std::fs::read_to_string(dir.path().join(format!("{solver}/representatives.csv")))
                .unwrap();
        let load: f64 = reps
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .nth(5)
            .unwrap()
            .parse()
            .unwrap();
        assert!(load > 1000.0, "representatives should be in MW, got {load}");
    }
}

#[test]
fn kmeans_baseline_and_evaluate() {
    let (dir, _) = workspace(60);
    let out = repsel(
        dir.path(),
        &[
            "baseline",
            "kmeans",
            "-i",
            "year.csv",
            "--periods",
            "5",
            "--seed",
            "11",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let sel = json(&dir.path().join("out/selection.json"));
    assert_eq!(sel["method"], "kmeans-medoid");
    assert_eq!(weight_days(&sel), 60.0);

    let out = repsel(
        dir.path(),
        &[
            "evaluate",
            "-i",
            "year.csv",
            "--selection",
            "out/selection.json",
            "--out",
            "fid.json",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(
        json(&dir.path().join("fid.json")),
        json(&dir.path().join("out/fidelity.json"))
    );
    assert!(dir.path().join("fid.manifest.json").exists());
}

#[test]
fn elbow_points_per_length() {
    let (dir, _) = workspace(365);
    let out = repsel(
        dir.path(),
        &[
            "elbow",
            "-i",
            "year.csv",
            "--lengths",
            "1,3,5",
            "--target-days",
            "35",
            "--node-limit",
            "20",
            "--time-limit",
            "0",
        ],
    );
    assert!([0, 4].contains(&code(&out)), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("elbow.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "length_days,k,total_days,objective,status"
    );
    let mut top = std::collections::BTreeMap::new();
    let mut last = std::collections::BTreeMap::new();
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let (len, k, total): (usize, usize, usize) = (
            f[0].parse().unwrap(),
            f[1].parse().unwrap(),
            f[2].parse().unwrap(),
        );
        let obj: f64 = f[3].parse().unwrap();
        assert_eq!(total, len * k);
        if let Some(prev) = last.insert(len, obj) {
            assert!(obj <= prev, "{len}-day curve rises at k = {k}");
        }
        top.insert(len, k);
    }
    assert_eq!(
        top.into_iter().collect::<Vec<_>>(),
        vec![(1, 35), (3, 12), (5, 7)]
    );
}

#[test]
fn config_file_and_flag_precedence() {
    let (dir, _) = workspace(30);
    std::fs::write(
        dir.path().join("run.toml"),
        "input = \"year.csv\"\nlength-days = 2\nperiods = 4\nsolver = \"greedy\"\nout-dir = \"from-file\"\n",
    )
    .unwrap();
    let out = repsel(
        dir.path(),
        &["select", "--config", "run.toml", "--periods", "3"],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let sel = json(&dir.path().join("from-file/selection.json"));
    assert_eq!(sel["k"], 3);
    assert_eq!(sel["method"], "greedy");
    assert_eq!(sel["geometry"]["days_per_period"], 2);
}

#[test]
fn exit_codes() {
    let (dir, _) = workspace(10);
    let cases: &[(&[&str], i32, &str)] = &[
        (
            &[
                "select",
                "-i",
                "year.csv",
                "--stride-hours",
                "7",
                "--periods",
                "2",
            ],
            2,
            "[config]",
        ),
        (
            &["select", "-i", "year.csv", "--periods", "40"],
            2,
            "[selection]",
        ),
        (&["select", "-i", "year.csv"], 2, "--periods"),
        (
            &[
                "select",
                "-i",
                "year.csv",
                "--features",
                "load,gas",
                "--periods",
                "2",
            ],
            3,
            "[ingest]",
        ),
        (
            &["select", "-i", "absent.csv", "--periods", "2"],
            3,
            "[ingest]",
        ),
        (
            &[
                "select",
                "-i",
                "year.csv",
                "--periods",
                "2",
                "--periods-typo",
            ],
            2,
            "",
        ),
    ];
    for (args, expected, needle) in cases {
        let out = repsel(dir.path(), args);
        assert_eq!(code(&out), *expected, "{args:?}: {}", stderr(&out));
        assert!(stderr(&out).contains(needle), "{args:?}: {}", stderr(&out));
    }

    let text = std::fs::read_to_string(dir.path().join("year.csv")).unwrap();
    let ragged: String = text
        .lines()
        .take(1 + 24 * 3 + 5)
        .map(|l| format!("{l}\n"))
        .collect();
    std::fs::write(dir.path().join("ragged.csv"), ragged).unwrap();
    let out = repsel(
        dir.path(),
        &["select", "-i", "ragged.csv", "--periods", "2"],
    );
    assert_eq!(code(&out), 3);
    assert!(
        stderr(&out).contains("--truncate-to-hours 72"),
        "{}",
        stderr(&out)
    );
    let out = repsel(
        dir.path(),
        &[
            "select",
            "-i",
            "ragged.csv",
            "--periods",
            "2",
            "--truncate-to-hours",
            "72",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn budget_exhaustion_still_writes_outputs() {
    let (dir, _) = workspace(365);
    let out = repsel(
        dir.path(),
        &[
            "select",
            "-i",
            "year.csv",
            "--length-days",
            "5",
            "--periods",
            "7",
            "--node-limit",
            "1",
            "--time-limit",
            "0",
        ],
    );
    assert_eq!(code(&out), 4, "{}", stderr(&out));
    let sel = json(&dir.path().join("out/selection.json"));
    assert_eq!(sel["optimality"]["status"], "bounded");
    let gap = sel["optimality"]["gap"].as_f64().unwrap();
    assert!(gap > 0.0 && gap < 0.05, "{gap}");
    assert!(String::from_utf8_lossy(&out.stdout).contains("gap"));
}

#[test]
fn rerun_reproduces_and_detects_changes() {
    let (dir, input) = workspace(20);
    let out = repsel(
        dir.path(),
        &[
            "select",
            "-i",
            "year.csv",
            "--length-days",
            "2",
            "--periods",
            "3",
            "--out-dir",
            "a",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = repsel(
        dir.path(),
        &[
            "rerun",
            "--manifest",
            "a/manifest.json",
            "--out-dir",
            "b",
            "--verify",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for name in [
        "selection.json",
        "representatives.csv",
        "fidelity.json",
        "manifest.json",
    ] {
        let a = std::fs::read(dir.path().join("a").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }

    let mut text = std::fs::read_to_string(&input).unwrap();
    text.push('\n');
    std::fs::write(&input, text).unwrap();
    let out = repsel(
        dir.path(),
        &["rerun", "--manifest", "a/manifest.json", "--out-dir", "c"],
    );
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("inputs changed"), "{}", stderr(&out));
}

#[test]
fn dump_distance_matrix() {
    let (dir, _) = workspace(12);
    let out = repsel(
        dir.path(),
        &[
            "dump-distance",
            "-i",
            "year.csv",
            "--length-days",
            "3",
            "--out",
            "d/dist.csv",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("d/dist.csv")).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 13);
    assert_eq!(rows[0].split(',').count(), 10);
    // Day 4 lies inside the window starting at day 2.
    assert_eq!(
        rows[5].split(',').nth(2).unwrap().parse::<f64>().unwrap(),
        0.0
    );
}
