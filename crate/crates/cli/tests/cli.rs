use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(rel)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unimorph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn validate_reports_counts() {
    let inflections = data("hun/inflections.tsv");
    let map = data("hun/stem_map.tsv");
    let o = run(&["validate", arg(&inflections), "--stem-map", arg(&map)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).trim_end().ends_with(": lemmas=1 forms=3"));
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tsv");
    fs::write(&bad, "a\tb\n\tx\tN;SG\nc\td\tN;FOO(\n").unwrap();
    let o = run(&["validate", arg(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains(":1: error BadColumnCount"));
    assert!(out.contains(":2: error EmptyField"));
    assert!(out.contains(":3: error FeatureParseError"));

    let o = run(&["validate", arg(&dir.path().join("missing.tsv"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn segment_matches_golden_output() {
    let o = run(&[
        "segment",
        arg(&data("hun/inflections.tsv")),
        "--table",
        arg(&data("hun/morpheme_table.tsv")),
        "--stem-map",
        arg(&data("hun/stem_map.tsv")),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        fs::read_to_string(data("hun/segmented.tsv")).unwrap()
    );
}

#[test]
fn segment_without_stem_map_keeps_surface_stem() {
    let o = run(&[
        "segment",
        arg(&data("hun/inflections.tsv")),
        "--table",
        arg(&data("hun/morpheme_table.tsv")),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("legy|ek|nek"));
}

#[test]
fn convert_flat_to_hierarchical() {
    let o = run(&[
        "convert",
        arg(&data("fixtures/table1_flat.tsv")),
        "--to",
        "hier",
        "--profile",
        arg(&data("profiles/standard.profile")),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let expected = fs::read_to_string(data("fixtures/table1_hier.tsv")).unwrap();
    let expected: Vec<&str> = expected.lines().take(4).collect();
    assert_eq!(stdout(&o).lines().collect::<Vec<_>>(), expected);
}

#[test]
fn convert_rejects_case_stacking() {
    let dir = tempfile::tempdir().unwrap();
    let rejects = dir.path().join("rejects.tsv");
    let o = run(&[
        "convert",
        arg(&data("fixtures/table1_hier.tsv")),
        "--to",
        "flat",
        "--profile",
        arg(&data("profiles/standard.profile")),
        "--rejects",
        arg(&rejects),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4);
    assert!(stdout(&o).contains("V;FUT;NO1P;AC2S"));
    assert_eq!(
        fs::read_to_string(&rejects).unwrap(),
        "ңинакин\tңинакиннундуле\tN;ALL(COM(SG))\n"
    );
    assert!(stderr(&o).contains("case stacking"));
}

#[test]
fn convert_turkish_with_wrapping_profile() {
    let o = run(&[
        "convert",
        arg(&data("fixtures/turkish_flat.tsv")),
        "--to",
        "hier",
        "--profile",
        arg(&data("profiles/tur.profile")),
    ]);
    assert_eq!(
        stdout(&o),
        fs::read_to_string(data("fixtures/turkish_hier.tsv")).unwrap()
    );
}

#[test]
fn convert_needs_a_readable_profile() {
    let o = run(&[
        "convert",
        arg(&data("fixtures/table1_flat.tsv")),
        "--to",
        "hier",
        "--profile",
        "/nonexistent/profile",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn infer_paradigms_lists_compatible_classes() {
    let o = run(&[
        "infer-paradigms",
        arg(&data("fixtures/rus_lemmas.tsv")),
        "--inventory",
        arg(&data("paradigms/rus_nouns.tsv")),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("собака\tжо 3a\n"));
    assert!(out.contains("книга\tж 3a\n"));
    assert!(out.contains("стол\tм 1a\n"));
    assert!(out.contains("сон\tм 1*a\n"));
}

#[test]
fn infer_paradigms_marks_unmatched_lemmas() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("x.tsv");
    fs::write(&f, "окно\tокнищем\tN;INS;SG\n").unwrap();
    let o = run(&[
        "infer-paradigms",
        arg(&f),
        "--inventory",
        arg(&data("paradigms/rus_nouns.tsv")),
    ]);
    assert_eq!(stdout(&o), "окно\t-\n");
}

#[test]
fn fuse_derivations_merges_and_warns() {
    let ita = data("derivations/ita.preliminary.tsv");
    let fra = data("derivations/fra.preliminary.tsv");
    let o = run(&["fuse-derivations", arg(&ita), arg(&fra)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("morfologico\tmorfologicamente\tADJ:ADV\t-mente\tita\n"));
    assert_eq!(out.matches("morfologicamente").count(), 1);
    assert!(stderr(&o).contains("FieldConflict"));

    let strict = run(&["--strict", "fuse-derivations", arg(&ita), arg(&fra)]);
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn fuse_derivations_is_idempotent_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let once = dir.path().join("mixed.final.tsv");
    let o = run(&[
        "fuse-derivations",
        arg(&data("derivations/ita.preliminary.tsv")),
        arg(&data("derivations/fra.preliminary.tsv")),
        "--output",
        arg(&once),
    ]);
    assert!(stdout(&o).is_empty());
    let first = fs::read_to_string(&once).unwrap();
    let again = run(&["fuse-derivations", arg(&once)]);
    assert_eq!(stdout(&again), first);
}

#[test]
fn fuse_derivations_stats_table() {
    let o = run(&[
        "fuse-derivations",
        arg(&data("derivations/ita.preliminary.tsv")),
        "--stats",
    ]);
    assert_eq!(
        stdout(&o),
        "language\tlemmas\tderivations\tmorphemes\nita\t5\t3\t3\n"
    );
}

#[test]
fn eval_ud_reports_scores() {
    let o = run(&[
        "eval-ud",
        arg(&data("fixtures/ud_eval_unimorph.tsv")),
        arg(&data("fixtures/ud_eval.conllu")),
        "--profile",
        arg(&data("ud/eng.tsv")),
        "--format",
        "tsv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("ALL\t40\t28\t20\t50.0000\t71.4286\t58.8235\n"));
}

#[test]
fn every_bundled_ud_profile_loads() {
    for entry in fs::read_dir(data("ud")).unwrap() {
        let path = entry.unwrap().path();
        let o = run(&[
            "eval-ud",
            arg(&data("fixtures/ud_eval_unimorph.tsv")),
            arg(&data("fixtures/ud_eval.conllu")),
            "--profile",
            arg(&path),
        ]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}: {}",
            path.display(),
            stderr(&o)
        );
        assert!(stdout(&o).contains("ALL"));
    }
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let args = |jobs: &str| {
        vec![
            "--jobs".to_string(),
            jobs.to_string(),
            "infer-paradigms".into(),
            data("fixtures/rus_lemmas.tsv").display().to_string(),
            "--inventory".into(),
            data("paradigms/rus_nouns.tsv").display().to_string(),
        ]
    };
    let reference = Command::new(env!("CARGO_BIN_EXE_unimorph"))
        .args(args("1"))
        .output()
        .unwrap();
    for jobs in ["2", "4", "8"] {
        let o = Command::new(env!("CARGO_BIN_EXE_unimorph"))
            .args(args(jobs))
            .output()
            .unwrap();
        assert_eq!(o.stdout, reference.stdout);
    }
}
