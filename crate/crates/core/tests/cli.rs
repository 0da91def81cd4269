use std::fs;
use std::path::Path;

use rba::cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("rba-bench").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn small_ensemble(dir: &Path, extra: &[&str]) -> (i32, String, String) {
    let d = dir.to_str().unwrap();
    let mut args = vec![
        "ensemble", "--n", "5,6", "--r", "2,3", "--count", "2", "--max-l", "8", "--out", d,
    ];
    args.extend_from_slice(extra);
    call(&args)
}

#[test]
fn full_pool_wcnf_ignores_the_seed() {
    let (c1, a, _) = call(&["gen", "--n", "5", "--r", "8", "--seed", "42"]);
    let (c2, b, _) = call(&["gen", "--n", "5", "--r", "8", "--seed", "43"]);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    assert_eq!(
        a.lines()
            .filter(|l| !l.starts_with('c') && !l.starts_with('p'))
            .count(),
        40
    );
    let (_, ja, _) = call(&["gen", "--n", "5", "--r", "8", "--seed", "42", "--format", "json"]);
    let (_, jb, _) = call(&["gen", "--n", "5", "--r", "8", "--seed", "43", "--format", "json"]);
    assert_ne!(ja, jb);
}

#[test]
fn usage_errors_exit_one() {
    let (code, _, err) = call(&["gen", "--n", "5", "--r", "9"]);
    assert_eq!(code, 1);
    assert!(err.contains("45 clauses exceed the pool of 40"), "{err}");
    let (code, _, _) = call(&["frobnicate"]);
    assert_eq!(code, 1);
    let (code, _, err) = call(&["ensemble", "--n", "4,5", "--r", "1/3", "--count", "0"]);
    assert_eq!(code, 1);
    assert!(err.lines().count() >= 2, "{err}");
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("ensemble"));
}

#[test]
fn instance_files_round_trip_through_solve_and_rba() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().to_str().unwrap();
    let (code, out, _) = call(&[
        "gen", "--n", "6", "--r", "4", "--seed", "1", "--format", "json", "--out", d,
    ]);
    assert_eq!(code, 0);
    let path = out.trim().to_string();
    assert!(Path::new(&path).is_file());
    let (code, _, _) = call(&[
        "gen", "--n", "6", "--r", "4", "--seed", "1", "--format", "json", "--out", d,
    ]);
    assert_eq!(code, 2, "existing file must not be overwritten");

    let (code, out, _) = call(&["solve", "--instance", &path]);
    assert_eq!(code, 0);
    assert!(out.contains("degeneracy = 1"), "{out}");

    let (code, from_file, _) = call(&["rba", "--instance", &path, "--equidistant", "3"]);
    assert_eq!(code, 0);
    let (_, generated, _) = call(&["rba", "--n", "6", "--r", "4", "--seed", "1", "--equidistant", "3"]);
    assert_eq!(from_file, generated);
    assert!(generated.contains("tts = 1.1573585072"), "{generated}");

    let (code, out, _) = call(&["grover", "--n", "6", "--r", "4", "--seed", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("n_opt = 6"), "{out}");
}

#[test]
fn ensemble_writes_its_files_and_refuses_to_overwrite() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, out, err) = small_ensemble(tmp.path(), &[]);
    assert_eq!(code, 0, "{err}");
    for f in ["tts.csv", "iterations.csv", "ratio.csv", "sweep.csv"] {
        assert!(tmp.path().join(f).is_file(), "{f} missing; stdout: {out}");
    }
    let tts = fs::read_to_string(tmp.path().join("tts.csv")).unwrap();
    assert!(tts.starts_with("algorithm,variant,mode,n,r,seed,L_or_nit,p_success,tts"));
    let (code, _, err) = small_ensemble(tmp.path(), &[]);
    assert_eq!(code, 2);
    assert!(err.contains("exists"), "{err}");
    let (code, _, _) = small_ensemble(tmp.path(), &["--force"]);
    assert_eq!(code, 0);

    let (code, report, err) = call(&["report", tmp.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(report.contains("median TTS ratio Grover/RBA"));
    assert!(report.contains("Spearman"));
}

#[test]
fn report_names_missing_files() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, _, err) = call(&["report", tmp.path().to_str().unwrap()]);
    assert_eq!(code, 2);
    for f in ["tts.csv", "iterations.csv", "ratio.csv"] {
        assert!(err.contains(f), "{err}");
    }
}

#[test]
fn ensemble_output_is_deterministic_across_worker_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(small_ensemble(a.path(), &["--workers", "1"]).0, 0);
    assert_eq!(small_ensemble(b.path(), &["--workers", "3"]).0, 0);
    for f in ["tts.csv", "iterations.csv", "ratio.csv", "sweep.csv"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}
