use std::fs;
use std::process::{Command, Output};

fn tracecode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tracecode"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn params_prints_derived_values() {
    let o = tracecode(&["params", "--n", "994", "--k", "14"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for line in ["ell=71", "num_blocks=14", "redundancy=65", "rate=0.934608", "max_run=8"] {
        assert!(text.lines().any(|l| l == line), "missing {line} in\n{text}");
    }
}

#[test]
fn sample_corrupt_reconstruct_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let code = ["--n", "994", "--k", "14"];
    let x = tracecode(&[&["sample", "--seed", "5"][..], &code].concat());
    assert_eq!(x.status.code(), Some(0));
    let x_path = dir.path().join("x.txt");
    fs::write(&x_path, &x.stdout).unwrap();

    let traces = tracecode(&["corrupt", "--p", "0", "--t", "3", x_path.to_str().unwrap()]);
    assert_eq!(traces.status.code(), Some(0));
    assert_eq!(stdout(&traces).lines().count(), 3);
    let y_path = dir.path().join("y.txt");
    fs::write(&y_path, &traces.stdout).unwrap();

    let rec = tracecode(&[&["reconstruct"][..], &code, &[y_path.to_str().unwrap()]].concat());
    assert_eq!(rec.status.code(), Some(0));
    assert_eq!(stdout(&rec), stdout(&x));
}

#[test]
fn experiment_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# tiny sweep\nscheme=ours\nn=994\nk=14\nt=3\ntrials=5\nseed=1\n").unwrap();
    let out = dir.path().join("out.csv");
    let o = tracecode(&["experiment", cfg.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], tracecode::experiment::CSV_HEADER);
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("ours,994,14,1,3,71,3,5,1,0.934608,"));
}

#[test]
fn configuration_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("unknown.cfg", "n=994\nk=14\nt=3\ncolour=blue\n"),
        ("missing.cfg", "n=994\nk=14\n"),
        ("syntax.cfg", "n 994\n"),
    ] {
        let path = dir.path().join(name);
        fs::write(&path, text).unwrap();
        let o = tracecode(&["experiment", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1), "{name}");
    }
    let absent = dir.path().join("absent.cfg");
    assert_eq!(
        tracecode(&["experiment", absent.to_str().unwrap()]).status.code(),
        Some(1)
    );
    assert_eq!(
        tracecode(&["params", "--n", "994", "--k", "14", "--delta", "9"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(tracecode(&["bogus"]).status.code(), Some(1));
    assert_eq!(tracecode(&["--help"]).status.code(), Some(0));
}

#[test]
fn exhausted_sampler_is_a_runtime_failure() {
    // alpha < 1 leaves whole-string rejection hopeless
    let o = tracecode(&[
        "sample",
        "--n",
        "2000",
        "--k",
        "10",
        "--alpha",
        "0.75",
        "--delta",
        "5",
        "--rejection",
        "--retry-limit",
        "50",
    ]);
    assert_eq!(o.status.code(), Some(2));
}
