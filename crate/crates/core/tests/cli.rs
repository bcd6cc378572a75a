use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

use credal_bayes::capacity::{Capacity, EventMask, OutcomeSpace, ProbabilityVector};
use credal_bayes::choquet::Functional;
use credal_bayes::model::{self, ModelFile};
use credal_bayes::{precise_posterior, Exact, Scalar};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_credal-bayes"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn write(dir: &TempDir, name: &str, value: &Value) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

fn parse(v: &Value) -> Exact {
    Exact::parse_literal(v.as_str().expect("exact values are strings")).unwrap()
}

#[test]
fn worked_model_in_rational_mode() {
    let path = fixture("worked.json");
    let doc = stdout_json(&run(&["update", path.to_str().unwrap(), "--json", "--exact"]));
    let first = &doc["reports"][0];
    assert_eq!(first["event"], "t1");
    assert_eq!(first["upper"], "4/7");
    assert_eq!(first["equality_diagnosis"], "ProvenEqual");
    // lower({t1}) = 1 - upper({t2,t3}).
    let complement = doc["reports"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["event"] == "t2,t3")
        .unwrap();
    assert_eq!(parse(&first["lower"]), Exact::from_ratio(1, 1) - parse(&complement["upper"]));
}

#[test]
fn human_table_has_six_significant_digits() {
    let path = fixture("worked.json");
    let out = run(&["update", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let header = text.lines().next().unwrap();
    for column in ["event", "lower", "upper", "diagnosis", "c", "c'"] {
        assert!(header.split_whitespace().any(|h| h == column), "{header}");
    }
    assert!(text.contains("{t1}     0.454545  0.571429  ProvenEqual"), "{text}");
}

#[test]
fn precise_prior_and_likelihood_give_bayes() {
    let dir = TempDir::new().unwrap();
    let p = [0.2, 0.5, 0.3];
    let l = [0.9, 0.1, 0.4];
    let path = write(
        &dir,
        "precise.json",
        &json!({
            "version": 1,
            "outcomes": ["a", "b", "c"],
            "prior": {"kind": "eps-contamination", "p": p, "eps": 0},
            "likelihood": {"precise": l},
            "events": "all"
        }),
    );
    let doc = stdout_json(&run(&["update", &path, "--json"]));
    let space = OutcomeSpace::new(["a", "b", "c"]).unwrap();
    let pv = ProbabilityVector::new(space.clone(), p.to_vec()).unwrap();
    let lf = Functional::new(space.clone(), l.to_vec()).unwrap();
    for (i, r) in doc["reports"].as_array().unwrap().iter().enumerate() {
        let bayes = precise_posterior(&pv, &lf, EventMask(i as u32)).unwrap();
        let upper = r["upper"].as_f64().unwrap();
        let lower = r["lower"].as_f64().unwrap();
        assert!((upper - bayes).abs() < 1e-12 && (lower - bayes).abs() < 1e-12, "{r}");
    }
}

#[test]
fn vacuous_prior_gives_upper_one() {
    let dir = TempDir::new().unwrap();
    let path = write(
        &dir,
        "vacuous.json",
        &json!({
            "version": 1,
            "outcomes": ["t1", "t2", "t3"],
            "prior": {"kind": "eps-contamination", "p": ["1/3", "1/3", "1/3"], "eps": 1},
            "likelihood": {"precise": [0.5, 0.3, 0.2]}
        }),
    );
    let doc = stdout_json(&run(&["update", &path, "--json", "--sweep", "--exact"]));
    for r in doc["reports"].as_array().unwrap() {
        let expected = if r["event"] == "" { "0/1" } else { "1/1" };
        assert_eq!(r["upper"], expected, "{r}");
    }
}

#[test]
fn emitted_posterior_is_accepted_as_a_prior() {
    let dir = TempDir::new().unwrap();
    let path = fixture("band_walk.json");
    for extra in [&[][..], &["--exact"][..]] {
        let mut args = vec!["update", path.to_str().unwrap(), "--json"];
        args.extend_from_slice(extra);
        let doc = stdout_json(&run(&args));
        let posterior = doc["posterior"].clone();
        assert!(posterior.is_object());
        let next = write(
            &dir,
            "next.json",
            &json!({
                "version": 1,
                "outcomes": ["a", "b", "c", "d"],
                "prior": posterior,
                "likelihood": {"precise": [1, 1, 1, 1]}
            }),
        );
        let again = stdout_json(&run(&["update", &next, "--json"]));
        assert!(again["reports"].as_array().unwrap().len() == 4);
    }
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", &json!({"version": 1, "outcomes": ["a"], "prior": {}}));
    let out = run(&["update", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("$.likelihood"));

    let undefined = write(
        &dir,
        "undefined.json",
        &json!({
            "version": 1,
            "outcomes": ["a", "b"],
            "prior": {"kind": "eps-contamination", "p": [0.5, 0.5], "eps": 0.2},
            "likelihood": {"precise": [0, 0]},
            "events": [["b"]]
        }),
    );
    let out = run(&["update", &undefined]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("{1}"));

    let missing = dir.path().join("nope.json");
    assert_eq!(run(&["update", missing.to_str().unwrap()]).status.code(), Some(2));

    let not_two = write(
        &dir,
        "not_two.json",
        &json!({
            "version": 1,
            "outcomes": ["a", "b", "c", "d"],
            "prior": {"kind": "envelope", "vertices": [[0.4, 0.0, 0.4, 0.2], [0.2, 0.1, 0.3, 0.4]]},
            "likelihood": {"precise": [1, 1, 1, 1]}
        }),
    );
    let obs = write(&dir, "obs.json", &json!({"version": 1, "observations": []}));
    assert_eq!(run(&["iterate", &not_two, &obs]).status.code(), Some(2));
}

#[test]
fn verify_model_and_random_campaigns() {
    let path = fixture("band_walk.json");
    let out = run(&["verify", path.to_str().unwrap(), "--json"]);
    assert!(out.status.success());
    let lines: Vec<Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 3);
    for r in &lines {
        assert_eq!(r["equality_diagnosis"], "ProvenEqual");
        let gap = (r["oracle"].as_f64().unwrap() - r["bound_vertex"].as_f64().unwrap()).abs();
        assert!(gap <= 1e-9);
    }

    let args = ["verify", "--random", "40", "--seed", "9", "--family", "arbitrary"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "fixed seed replays byte-identical summaries");
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("violations           0"), "{text}");

    let out = run(&["verify", "--random", "25", "--seed", "3", "--family", "distortion", "--json"]);
    let lines: Vec<Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 26);
    assert_eq!(lines[25]["summary"]["diagnoses"]["ProvenEqual"], 25);
    assert!(lines[..25].iter().all(|r| r["instance_hash"].as_str().unwrap().len() == 16));

    let out = run(&["verify", "--random", "5", "--family", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn campaign_threads_do_not_change_output() {
    let args = ["verify", "--random", "30", "--seed", "4", "--family", "contamination", "--json"];
    let one = bin().args(args).env("CREDAL_BAYES_THREADS", "1").output().unwrap();
    let four = bin().args(args).env("CREDAL_BAYES_THREADS", "4").output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn iterate_matches_repeated_updates() {
    let path = fixture("band_walk.json");
    let obs = fixture("band_walk_obs.json");
    let doc = stdout_json(&run(&["iterate", path.to_str().unwrap(), obs.to_str().unwrap(), "--json", "--exact"]));
    let steps = doc["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 4);
    assert!(steps.iter().all(|s| s["two_alternating"] == true));

    // Step 1 agrees with a one-shot update.
    let once = stdout_json(&run(&["update", path.to_str().unwrap(), "--json", "--exact"]));
    for (a, b) in steps[1]["events"].as_array().unwrap().iter().zip(once["reports"].as_array().unwrap()) {
        assert_eq!(a["upper"], b["upper"]);
        assert_eq!(a["lower"], b["lower"]);
    }
}

#[test]
fn iterate_with_no_observations_echoes_the_prior() {
    let dir = TempDir::new().unwrap();
    let path = fixture("band_walk.json");
    let obs = write(&dir, "empty.json", &json!({"version": 1, "observations": []}));
    let doc = stdout_json(&run(&["iterate", path.to_str().unwrap(), &obs, "--json", "--exact"]));
    let file = ModelFile::from_json_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let prior: Capacity<Exact> = file.build().unwrap().prior;
    assert_eq!(doc["posterior"], model::capacity_to_json(&prior));
    assert_eq!(doc["steps"].as_array().unwrap().len(), 1);
}

#[test]
fn two_precise_observations_equal_the_squared_likelihood() {
    let dir = TempDir::new().unwrap();
    let l = [0.5, 0.25, 0.75];
    let base = json!({
        "version": 1,
        "outcomes": ["a", "b", "c"],
        "prior": {"kind": "eps-contamination", "p": [0.2, 0.3, 0.5], "eps": 0},
        "likelihood": {"precise": l},
        "events": "all"
    });
    let model = write(&dir, "m.json", &base);
    let obs = write(
        &dir,
        "o.json",
        &json!({"version": 1, "observations": [{"precise": l}, {"precise": l}]}),
    );
    let doc = stdout_json(&run(&["iterate", &model, &obs, "--json", "--exact"]));
    let space = OutcomeSpace::new(["a", "b", "c"]).unwrap();
    let r = |a, b| Exact::from_ratio(a, b);
    let p = ProbabilityVector::new(space.clone(), vec![r(1, 5), r(3, 10), r(1, 2)]).unwrap();
    let squared = Functional::new(space.clone(), vec![r(1, 4), r(1, 16), r(9, 16)]).unwrap();
    for (i, e) in doc["steps"][2]["events"].as_array().unwrap().iter().enumerate() {
        let expected = precise_posterior(&p, &squared, EventMask(i as u32)).unwrap();
        assert_eq!(parse(&e["upper"]), expected);
        assert_eq!(parse(&e["lower"]), expected);
    }
}
