//! End-to-end checks of the `routebench` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use routebench_core::instance_io::{derive_variant_instance, parse_tsplib};
use routebench_core::pipeline::fixture::{golden_json, FixtureInstance, ReplayFixture};
use routebench_core::pipeline::{read_records, RunRecord};

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn routebench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_routebench"))
        .args(args)
        .current_dir(workspace())
        .env("OPENAI_API_KEY", "")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn gen(dir: &Path) {
    let out = routebench(&["dataset", "gen", "--out", p(dir)]);
    assert_eq!(code(&out), 0, "{}", text(&out.stderr));
}

fn instance_name(spec: &FixtureInstance) -> String {
    match spec {
        FixtureInstance::Generated { kind, n, seed } => format!("{}-n{n}-s{seed}", kind.slug()),
        FixtureInstance::Cvrplib { file, kind } => {
            let text = fs::read_to_string(workspace().join("data/cvrplib").join(file)).unwrap();
            derive_variant_instance(&parse_tsplib(&text).unwrap(), *kind).unwrap().name
        }
    }
}

#[test]
fn dataset_gen_is_deterministic_and_guarded() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    gen(&a);
    gen(&b);
    let ma = fs::read(a.join("manifest.json")).unwrap();
    assert_eq!(ma, fs::read(b.join("manifest.json")).unwrap());
    gen(&a);
    assert_eq!(ma, fs::read(a.join("manifest.json")).unwrap());

    let manifest: serde_json::Value = serde_json::from_slice(&ma).unwrap();
    let entries = manifest["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 80);
    assert_eq!(entries.iter().filter(|e| e.get("seed").is_some()).count(), 60);
    assert_eq!(entries.iter().filter(|e| e.get("source").is_some()).count(), 20);

    let out = routebench(&["dataset", "gen", "--out", p(&a), "--seed-base", "5"]);
    assert_eq!(code(&out), 2);
    assert!(text(&out.stderr).contains("--force"));
    let out = routebench(&["dataset", "gen", "--out", p(&a), "--seed-base", "5", "--force"]);
    assert_eq!(code(&out), 0);
    assert_ne!(ma, fs::read(a.join("manifest.json")).unwrap());

    let partial = tmp.path().join("partial");
    fs::create_dir_all(partial.join("instances")).unwrap();
    assert_eq!(code(&routebench(&["dataset", "gen", "--out", p(&partial)])), 2);
}

#[test]
fn missing_cvrplib_file_is_named() {
    let tmp = tempfile::tempdir().unwrap();
    let vendored = tmp.path().join("vrp");
    fs::create_dir_all(&vendored).unwrap();
    for f in ["P-n19-k2", "P-n21-k2", "E-n22-k4", "P-n23-k8"] {
        fs::copy(
            workspace().join(format!("data/cvrplib/{f}.vrp")),
            vendored.join(format!("{f}.vrp")),
        )
        .unwrap();
    }
    let out = routebench(&["dataset", "gen", "--out", p(&tmp.path().join("ds")), "--cvrplib", p(&vendored)]);
    assert_eq!(code(&out), 2);
    assert!(text(&out.stderr).contains("P-n16-k8.vrp"), "{}", text(&out.stderr));
}

#[test]
fn import_derives_multi_robot_variants() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = tmp.path().join("ds");
    let file = workspace().join("data/cvrplib/P-n19-k2.vrp");
    let out = routebench(&["dataset", "import", "--out", p(&ds), p(&file)]);
    assert_eq!(code(&out), 0, "{}", text(&out.stderr));
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(ds.join("manifest.json")).unwrap()).unwrap();
    let names: Vec<&str> = manifest["entries"].as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert_eq!(names.len(), 4);
    assert!(names.contains(&"P-n19-k2-md-mtsp"));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&routebench(&["frobnicate"])), 1);
    assert_eq!(code(&routebench(&["run", "--dataset", "x"])), 1);
    assert_eq!(code(&routebench(&["--help"])), 0);
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("config.json");
    fs::write(&cfg, r#"{"no_such_setting": 1}"#).unwrap();
    assert_eq!(code(&routebench(&["--config", p(&cfg), "report", "--records", ".", "--out", "."])), 1);
}

#[test]
fn flags_override_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("config.json");
    fs::write(&cfg, r#"{"cvrplib": "does-not-exist"}"#).unwrap();
    let ds = tmp.path().join("ds");
    let out = routebench(&["--config", p(&cfg), "dataset", "gen", "--out", p(&ds)]);
    assert_eq!(code(&out), 2);
    assert!(text(&out.stderr).contains("does-not-exist"));
    let vendored = workspace().join("data/cvrplib");
    let out = routebench(&["--config", p(&cfg), "dataset", "gen", "--out", p(&ds), "--cvrplib", p(&vendored)]);
    assert_eq!(code(&out), 0, "{}", text(&out.stderr));
}

#[test]
fn solve_is_resumable_and_budgeted() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = tmp.path().join("ds");
    gen(&ds);
    let out = routebench(&["solve", "--dataset", p(&ds), "--kind", "tsp", "--kind", "ktsp"]);
    assert_eq!(code(&out), 0, "{}", text(&out.stderr));
    assert!(text(&out.stdout).contains("PROVEN_OPTIMAL 30, BOUND_ONLY 0, skipped 0, failed 0"));
    let out = routebench(&["solve", "--dataset", p(&ds), "--kind", "tsp", "--kind", "ktsp"]);
    assert!(text(&out.stdout).contains("PROVEN_OPTIMAL 0, BOUND_ONLY 0, skipped 30, failed 0"));

    let out = routebench(&["solve", "--dataset", p(&ds), "--instance", "P-n23-k8-mtsp", "--budget", "1"]);
    assert_eq!(code(&out), 0, "{}", text(&out.stderr));
    let cert: serde_json::Value =
        serde_json::from_slice(&fs::read(ds.join("certificates/P-n23-k8-mtsp.json")).unwrap()).unwrap();
    assert_eq!(cert["status"], "BOUND_ONLY");
    assert!(cert["lower_bound"].as_f64().unwrap() <= cert["value"]["value"].as_f64().unwrap());
}

#[test]
fn replay_run_reproduces_fixture_goldens() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = tmp.path().join("ds");
    gen(&ds);
    let records = tmp.path().join("records");
    let transcripts = records.join("transcripts");
    fs::create_dir_all(&transcripts).unwrap();

    let fixtures = ReplayFixture::load_all(&workspace().join("fixtures/pipeline")).unwrap();
    let mut expected = Vec::new();
    for f in &fixtures {
        let spec = &f.spec;
        let name = instance_name(&spec.instance);
        let context = spec.context.label();
        let file = format!("{name}__{}__{context}__{}__r{}.jsonl", spec.framework.slug(), spec.model, spec.repeat);
        fs::copy(f.transcript_path(), transcripts.join(file)).unwrap();
        let asset = spec.context.asset_id.unwrap_or(1).to_string();
        let repeats = (spec.repeat + 1).to_string();
        let out = routebench(&[
            "run",
            "--dataset",
            p(&ds),
            "--records",
            p(&records),
            "--experiment",
            "fixtures",
            "--framework",
            spec.framework.slug(),
            "--context",
            spec.context.kind.slug(),
            "--asset-id",
            &asset,
            "--model",
            &spec.model,
            "--repeats",
            &repeats,
            "--instance",
            &name,
            "--workers",
            "1",
        ]);
        assert_eq!(code(&out), 0, "{}: {}", f.name, text(&out.stderr));
        expected.push((name, fs::read_to_string(f.golden_path()).unwrap()));
    }

    let path = records.join("fixtures.jsonl");
    let got: Vec<RunRecord> = read_records(&path).unwrap();
    assert_eq!(got.len(), fixtures.len());
    for (record, (name, golden)) in got.iter().zip(&expected) {
        assert_eq!(&record.instance, name);
        assert_eq!(&golden_json(record), golden, "{name}");
    }

    // a torn trailing write is ignored and nothing is rerun
    let mut bytes = fs::read(&path).unwrap();
    bytes.extend_from_slice(b"{\"experiment_id\": \"fix");
    fs::write(&path, bytes).unwrap();
    let f = &fixtures[0];
    let out = routebench(&[
        "run",
        "--dataset",
        p(&ds),
        "--records",
        p(&records),
        "--experiment",
        "fixtures",
        "--framework",
        f.spec.framework.slug(),
        "--context",
        f.spec.context.kind.slug(),
        "--asset-id",
        &f.spec.context.asset_id.unwrap_or(1).to_string(),
        "--model",
        &f.spec.model,
        "--repeats",
        "1",
        "--instance",
        &instance_name(&f.spec.instance),
    ]);
    assert_eq!(code(&out), 0, "{}", text(&out.stderr));
    assert!(text(&out.stdout).contains("nothing to do"));
    assert_eq!(read_records(&path).unwrap().len(), fixtures.len());
}

#[test]
fn replay_without_transcripts_is_an_environment_error() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = tmp.path().join("ds");
    gen(&ds);
    let records = tmp.path().join("records");
    let out = routebench(&[
        "run", "--dataset", p(&ds), "--records", p(&records), "--model", "m", "--instance", "tsp-n10-s0",
    ]);
    assert_eq!(code(&out), 2);
    assert!(text(&out.stderr).contains("transcripts are missing"));
    assert!(!records.join("default.jsonl").exists());
}

#[test]
fn remote_mode_requires_credential_before_running() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = tmp.path().join("ds");
    gen(&ds);
    let records = tmp.path().join("records");
    let out = routebench(&[
        "run",
        "--dataset",
        p(&ds),
        "--records",
        p(&records),
        "--model",
        "m",
        "--instance",
        "tsp-n10-s0",
        "--transcript-mode",
        "record",
    ]);
    assert_eq!(code(&out), 2);
    assert!(text(&out.stderr).contains("OPENAI_API_KEY"));
    assert!(!records.join("default.jsonl").exists());
}

#[test]
fn report_on_empty_records() {
    let tmp = tempfile::tempdir().unwrap();
    let out = routebench(&["report", "--records", p(tmp.path()), "--out", p(&tmp.path().join("out"))]);
    assert_eq!(code(&out), 0);
    assert!(text(&out.stdout).contains("no records"));
}

/// Report tables over the fixture golden records, compared with
/// `fixtures/report/`. `UPDATE_GOLDENS=1` rewrites them.
#[test]
fn report_tables_match_goldens() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = tmp.path().join("ds");
    gen(&ds);
    let fixtures = ReplayFixture::load_all(&workspace().join("fixtures/pipeline")).unwrap();
    let mut lines = String::new();
    let mut solve = vec!["solve".to_string(), "--dataset".into(), p(&ds).into()];
    for f in &fixtures {
        let golden: RunRecord = serde_json::from_str(&fs::read_to_string(f.golden_path()).unwrap()).unwrap();
        lines.push_str(&serde_json::to_string(&golden).unwrap());
        lines.push('\n');
        solve.extend(["--instance".into(), golden.instance.clone()]);
    }
    let records = tmp.path().join("fixtures.jsonl");
    fs::write(&records, lines).unwrap();
    let solve: Vec<&str> = solve.iter().map(String::as_str).collect();
    assert_eq!(code(&routebench(&solve)), 0);

    let out_dir = tmp.path().join("report");
    let out = routebench(&[
        "report",
        "--records",
        p(&records),
        "--dataset",
        p(&ds),
        "--out",
        p(&out_dir),
        "--format",
        "markdown,csv,json",
    ]);
    assert_eq!(code(&out), 0, "{}", text(&out.stderr));

    let golden_dir = workspace().join("fixtures/report");
    let update = std::env::var("UPDATE_GOLDENS").is_ok_and(|v| v == "1");
    let mut produced: Vec<PathBuf> = fs::read_dir(&out_dir).unwrap().map(|e| e.unwrap().path()).collect();
    produced.sort();
    assert_eq!(produced.len(), 18);
    for path in produced {
        let name = path.file_name().unwrap();
        let got = fs::read_to_string(&path).unwrap();
        if update {
            fs::create_dir_all(&golden_dir).unwrap();
            fs::write(golden_dir.join(name), &got).unwrap();
        } else {
            let want = fs::read_to_string(golden_dir.join(name)).unwrap();
            assert_eq!(got, want, "{}", name.to_string_lossy());
        }
    }
}
