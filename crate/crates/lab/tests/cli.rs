use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rtcn(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rtcn"))
        .args(args)
        .current_dir(dir)
        .env_remove("RTCN_THREADS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(format!("{name}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn assert_valid(name: &str, v: &Value) {
    let validator = schema(name);
    if let Err(e) = validator.validate(v) {
        panic!("{name} schema: {e}\n{v:#}");
    }
}

#[test]
fn generate_two_leaves_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let o = rtcn(
        &[
            "generate",
            "--leaves",
            "2",
            "--seed",
            "1",
            "--format",
            "events",
            "--manifest",
            "m.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 2);

    let a = rtcn(
        &[
            "generate",
            "--leaves",
            "100",
            "--seed",
            "7",
            "--manifest",
            "a.json",
        ],
        dir.path(),
    );
    let b = rtcn(
        &[
            "generate",
            "--leaves",
            "100",
            "--seed",
            "7",
            "--manifest",
            "b.json",
        ],
        dir.path(),
    );
    assert_eq!(a.stdout, b.stdout);
    let c = rtcn(
        &[
            "generate",
            "--leaves",
            "100",
            "--seed",
            "8",
            "--manifest",
            "c.json",
        ],
        dir.path(),
    );
    assert_ne!(a.stdout, c.stdout);

    let dot = rtcn(
        &[
            "generate",
            "--leaves",
            "5",
            "--format",
            "dot",
            "--manifest",
            "d.json",
        ],
        dir.path(),
    );
    assert!(String::from_utf8(dot.stdout)
        .unwrap()
        .starts_with("digraph"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&rtcn(&["generate", "--leaves", "1"], dir.path())), 1);
    assert_eq!(code(&rtcn(&["generate"], dir.path())), 1);
    assert_eq!(code(&rtcn(&["frobnicate"], dir.path())), 1);
    assert_eq!(
        code(&rtcn(&["verify", "--suite", "theorem9"], dir.path())),
        1
    );
    assert_eq!(code(&rtcn(&["--help"], dir.path())), 0);
}

#[test]
fn count_examples() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("two.txt"), "RTCN v1 n=2\nB 0\n").unwrap();
    std::fs::write(dir.path().join("retic.txt"), "RTCN v1 n=3\nB 0\nR 0 1\n").unwrap();
    std::fs::write(dir.path().join("bad.txt"), "RTCN v1 n=3\nB 0\nR 0 9\n").unwrap();

    let o = rtcn(&["count", "two.txt", "--pattern", "cherry"], dir.path());
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_valid("count", &v);
    assert_eq!(v["count"], 1);

    let v = json(&rtcn(
        &["count", "retic.txt", "--pattern", "trident"],
        dir.path(),
    ));
    assert_eq!(v["count"], 1);
    assert_eq!(v["leaves"], 3);

    assert_eq!(
        code(&rtcn(
            &["count", "two.txt", "--pattern", "no-such-pattern"],
            dir.path()
        )),
        1
    );
    assert_eq!(
        code(&rtcn(
            &["count", "bad.txt", "--pattern", "cherry"],
            dir.path()
        )),
        2
    );
    assert_eq!(
        code(&rtcn(
            &["count", "missing.txt", "--pattern", "cherry"],
            dir.path()
        )),
        2
    );
}

#[test]
fn count_with_pattern_file() {
    let dir = tempfile::tempdir().unwrap();
    let gen = rtcn(
        &[
            "generate", "--leaves", "40", "--seed", "3", "--out", "net.txt",
        ],
        dir.path(),
    );
    assert_eq!(code(&gen), 0);
    assert!(dir.path().join("net.txt.manifest.json").exists());
    std::fs::write(
        dir.path().join("p.toml"),
        "initial_lineages = 2\nevents = [{ type = \"retic\", a = 0, b = 1 }]\n",
    )
    .unwrap();
    let by_file = json(&rtcn(
        &["count", "net.txt", "--pattern", "p.toml"],
        dir.path(),
    ));
    let by_id = json(&rtcn(
        &["count", "net.txt", "--pattern", "trident"],
        dir.path(),
    ));
    assert_eq!(by_file["count"], by_id["count"]);
}

#[test]
fn classify_examples() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&rtcn(&["classify", "--pattern", "cherry"], dir.path()));
    assert_valid("classify", &v);
    assert_eq!(v["label"], "Poisson");
    assert_eq!(v["conjectural"], false);
    assert_eq!(
        json(&rtcn(&["classify", "--pattern", "trident"], dir.path()))["label"],
        "Normal"
    );

    std::fs::write(
        dir.path().join("h4.toml"),
        "initial_lineages = 2\nevents = [\n  { type = \"retic\", a = 0, b = 1 },\n  { type = \"branch\", a = 2 },\n  \
         { type = \"retic\", a = 2, b = 3 },\n  { type = \"branch\", a = 0 },\n]\n",
    )
    .unwrap();
    let o = rtcn(&["classify", "h4.toml", "--mode", "height-one"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_valid("classify", &v);
    assert_eq!(v["height"], 4);
    assert_eq!(v["conjectural"], true);

    std::fs::write(
        dir.path().join("split.toml"),
        "initial_lineages = 2\nevents = [{ type = \"branch\", a = 0 }]\n",
    )
    .unwrap();
    assert_eq!(code(&rtcn(&["classify", "split.toml"], dir.path())), 2);
}

#[test]
fn manifests_validate_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let o = rtcn(
        &[
            "simulate",
            "--leaves",
            "60",
            "--reps",
            "300",
            "--seed",
            "5",
            "--pattern",
            "cherry,trident",
            "--out",
            "s.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("s.csv.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_valid("manifest", &m);
    assert_eq!(m["seed"], 5);

    let r = rtcn(
        &["replay", "s.csv.manifest.json", "--manifest", "r.json"],
        dir.path(),
    );
    assert_eq!(code(&r), 0);
    let v = json(&r);
    assert_valid("replay", &v);
    assert_eq!(v["reproduced"], true);

    // a tampered digest is reported and fails the replay
    let mut m2 = m.clone();
    m2["outputs"][0]["sha256"] = Value::from("0".repeat(64));
    std::fs::write(
        dir.path().join("t.json"),
        serde_json::to_string(&m2).unwrap(),
    )
    .unwrap();
    let r = rtcn(&["replay", "t.json", "--manifest", "r2.json"], dir.path());
    assert_eq!(code(&r), 3);
    assert_eq!(json(&r)["differing_outputs"][0], "output");
}

#[test]
fn manifest_goes_to_stderr_without_out() {
    let dir = tempfile::tempdir().unwrap();
    let o = rtcn(&["classify", "--pattern", "b-iv"], dir.path());
    let m: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_valid("manifest", &m);
    assert_eq!(m["subcommand"], "classify");
}

#[test]
fn verify_coupling_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = rtcn(
        &["verify", "--suite", "coupling", "--out", "c.json"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let v: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("c.json")).unwrap()).unwrap();
    assert_valid("verify", &v);
    assert_eq!(v["passed"], true);
}

#[test]
fn verify_poisson_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = rtcn(
        &[
            "verify",
            "--suite",
            "theorem2b",
            "--reps",
            "20000",
            "--manifest",
            "m.json",
        ],
        dir.path(),
    );
    let v = json(&o);
    assert_valid("verify", &v);
    assert_eq!(code(&o), 0, "{v:#}");
    assert_eq!(v["checks"].as_array().unwrap().len(), 5);
}

#[test]
fn perturbed_sigma_fails_moments() {
    let dir = tempfile::tempdir().unwrap();
    let shipped = include_str!("../data/sigma.toml");
    std::fs::write(
        dir.path().join("bad.toml"),
        shipped.replace("\"24/637\"", "\"25/637\""),
    )
    .unwrap();
    std::fs::write(dir.path().join("good.toml"), shipped).unwrap();
    let bad = rtcn(
        &[
            "verify",
            "--suite",
            "moments",
            "--sigma",
            "bad.toml",
            "--manifest",
            "m.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&bad), 3);
    assert_eq!(json(&bad)["passed"], false);
    let good = rtcn(
        &[
            "verify",
            "--suite",
            "moments",
            "--sigma",
            "good.toml",
            "--manifest",
            "m.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&good), 0);

    std::fs::write(dir.path().join("broken.toml"), "entries = [[\"1\"]]\n").unwrap();
    let broken = rtcn(
        &[
            "verify",
            "--suite",
            "moments",
            "--sigma",
            "broken.toml",
            "--manifest",
            "m.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&broken), 2);
}
