use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_layered-echo");
const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/ten_layer.taur");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("LAYERED_ECHO_THREADS")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn below_first_arrival_gives_empty_train() {
    let out = run(&["reflect", "--medium", FIXTURE, "--cutoff", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "time,amplitude\n");
    assert!(stderr(&out).starts_with("reflection: 0 terms"));

    let out = run(&["transmit", "--medium", FIXTURE, "--cutoff", "1.0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).starts_with("transmission: 0 terms"));
}

#[test]
fn transparent_medium_transmits_one_unit_pulse() {
    let dir = tempfile::tempdir().unwrap();
    let medium = write(dir.path(), "clear.taur", "taur v1 M=1\n1 0\n1 0\ntail 0.5\n");
    let out = run(&["transmit", "--medium", &medium, "--cutoff", "5"]);
    assert_eq!(out.status.code(), Some(0));
    // Every multiple has amplitude zero but still counts as a term.
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    let first: Vec<f64> = rows[0].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first, [1.25, 1.0]);
    for row in &rows[1..] {
        assert_eq!(row.split(',').nth(1).unwrap().parse::<f64>().unwrap(), 0.0);
    }

    let out = run(&[
        "transmit", "--medium", &medium, "--cutoff", "5", "--floor", "1e-300",
    ]);
    assert_eq!(stdout(&out).lines().count(), 2);
}

#[test]
fn bad_inputs_exit_with_two() {
    let out = run(&["reflect", "--medium", "/no/such/medium.taur", "--cutoff", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("/no/such/medium.taur"));

    let dir = tempfile::tempdir().unwrap();
    let broken = write(dir.path(), "broken.taur", "taur v1 M=1\n1 0.5\n1 1.5\n");
    let out = run(&["reflect", "--medium", &broken, "--cutoff", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("broken.taur"));

    for cutoff in ["0", "-1", "nan"] {
        let out = run(&["reflect", "--medium", FIXTURE, "--cutoff", cutoff]);
        assert_eq!(out.status.code(), Some(2), "cutoff {cutoff}");
    }
    assert_eq!(run(&["reflect", "--medium", FIXTURE]).status.code(), Some(2));
    assert_eq!(
        run(&["--threads", "0", "reflect", "--medium", FIXTURE, "--cutoff", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn merge_and_provenance_columns() {
    let dir = tempfile::tempdir().unwrap();
    let medium = write(dir.path(), "m.taur", "taur v1 M=2\n1 0.3\n1 -0.5\n2 0.4\n");
    let out = run(&["reflect", "--medium", &medium, "--cutoff", "4", "--with-k"]);
    let text = stdout(&out);
    assert!(text.starts_with("time,amplitude,k\n"));
    assert!(text.contains(",1|1|1\n") && text.contains(",1|3|0\n"));
    let per_k = text.lines().count();
    let out = run(&[
        "reflect",
        "--medium",
        &medium,
        "--cutoff",
        "4",
        "--merge-tol",
        "1e-12",
    ]);
    assert!(stdout(&out).lines().count() < per_k);
}

#[test]
fn convert_physical_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let uniform = write(
        dir.path(),
        "u.phys",
        "phys v1 M=1\ndepths 0 1 3\nrho 2 2 2\nK 8 8 8\n",
    );
    let out = run(&["convert", "--medium", &uniform]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "taur v1 M=1\n1.0 0.0\n2.0 0.0\ntail 0.0\n");

    // Impedances 1 and 3 across z_0; 1 m of K/rho = 4 takes 1 s two-way.
    let contrast = write(
        dir.path(),
        "c.phys",
        "phys v1 M=1\ndepths 0 1 2 3\nrho 1 1 1\nK 1 4 4\n",
    );
    let converted = dir.path().join("c.taur");
    let out = run(&[
        "convert",
        "--medium",
        &contrast,
        "--out",
        converted.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&converted).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().filter_map(|x| x.parse().ok()).collect())
        .collect();
    assert_eq!(rows[0], [2.0, -1.0 / 3.0]);
    assert_eq!(rows[1], [1.0, 0.0]);
    assert_eq!(rows[2], [1.0]);

    let ratio = write(
        dir.path(),
        "r.phys",
        "phys v1 M=1\ndepths 0 1 2\nrho 1 1 1\nK 1 9 9\n",
    );
    let out = run(&["convert", "--medium", &ratio]);
    assert!(stdout(&out).lines().nth(1).unwrap().ends_with(" -0.5"));

    let bad = write(
        dir.path(),
        "bad.phys",
        "phys v1 M=1\ndepths 0 1 1\nrho 1 1 1\nK 1 1 1\n",
    );
    assert_eq!(run(&["convert", "--medium", &bad]).status.code(), Some(2));
}

#[test]
fn render_examples() {
    let dir = tempfile::tempdir().unwrap();
    let single = write(dir.path(), "one.csv", "time,amplitude\n1.0,1.0\n");
    let out = run(&[
        "render",
        "--train",
        &single,
        "--wavelet",
        "spike",
        "--dt",
        "0.5",
        "--n",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let values: Vec<f64> = stdout(&out)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values, [0.0, 0.0, 1.0, 0.0, 0.0]);

    let empty = write(dir.path(), "empty.csv", "time,amplitude,k\n");
    let out = run(&[
        "render",
        "--train",
        &empty,
        "--wavelet",
        "ricker:10",
        "--dt",
        "0.1",
        "--n",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out)
        .lines()
        .skip(1)
        .all(|l| l.ends_with(",0.0000000000000000e0")));

    let peak = write(dir.path(), "peak.csv", "time,amplitude\n0.3,-0.7\n");
    let out = run(&[
        "render",
        "--train",
        &peak,
        "--wavelet",
        "ricker:25",
        "--t0",
        "0.2",
        "--dt",
        "0.05",
        "--n",
        "5",
    ]);
    let at_peak: f64 = stdout(&out)
        .lines()
        .nth(3)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(at_peak, -0.7);

    assert_eq!(
        run(&[
            "render",
            "--train",
            &peak,
            "--wavelet",
            "morlet",
            "--dt",
            "1",
            "--n",
            "2"
        ])
        .status
        .code(),
        Some(2)
    );
    let nothing = write(dir.path(), "nothing.csv", "");
    assert_eq!(
        run(&["render", "--train", &nothing, "--dt", "1", "--n", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn oracle_and_lattice_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let two = write(
        dir.path(),
        "two.taur",
        "taur v1 M=2\n0.9 0.45\n1.2 -0.6\n1.0 0.35\ntail 0.4\n",
    );
    let out = run(&["oracle", "--medium", &two, "--cutoff", "6.2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("0 count mismatches, 0 unmatched"));

    let out = run(&[
        "oracle",
        "--medium",
        &two,
        "--cutoff",
        "6.2",
        "--corrupt",
        "1.000001",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("verification failed"));

    let equal = write(
        dir.path(),
        "eq.taur",
        "taur v1 M=3\n0.5 0.6\n0.5 -0.4\n0.5 0.7\n0.5 -0.2\n",
    );
    let out = run(&["lattice", "--medium", &equal, "--steps", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(run(&["lattice", "--medium", FIXTURE]).status.code(), Some(2));
}

#[test]
fn thread_count_from_environment() {
    let by_flag = run(&[
        "--threads",
        "3",
        "reflect",
        "--medium",
        FIXTURE,
        "--cutoff",
        "3",
        "--with-k",
    ]);
    let by_env = Command::new(BIN)
        .args(["reflect", "--medium", FIXTURE, "--cutoff", "3", "--with-k"])
        .env("LAYERED_ECHO_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(by_env.status.code(), Some(0));
    assert_eq!(by_flag.stdout, by_env.stdout);
    let bad_env = Command::new(BIN)
        .args(["reflect", "--medium", FIXTURE, "--cutoff", "3"])
        .env("LAYERED_ECHO_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad_env.status.code(), Some(2));
}
