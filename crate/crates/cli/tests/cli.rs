use std::path::PathBuf;
use std::process::{Command as Proc, Output};

use serde_json::{json, Value};

fn repo() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn mukai(args: &[&str]) -> Output {
    Proc::new(env!("CARGO_BIN_EXE_mukai"))
        .args(args)
        .current_dir(repo())
        .env("MUKAI_COLOR", "never")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn job_file(name: &str, body: &Value) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mukai-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(body).unwrap()).unwrap();
    path
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(repo().join("jobs/golden").join(name)).unwrap()
}

#[test]
fn single_jobs_match_their_golden_output() {
    for (cmd, name) in [
        ("perp", "perp-indecomposable"),
        ("fm", "isotropic-fm"),
        ("classify", "classify-isotropic"),
        ("walls", "walls-rank-one"),
        ("walls", "walls-picard-two"),
    ] {
        let out = mukai(&[cmd, "--job", &format!("jobs/{name}.json")]);
        assert_eq!(code(&out), 0, "{name}");
        assert_eq!(String::from_utf8(out.stdout).unwrap(), golden(&format!("{name}.json")), "{name}");
    }
}

#[test]
fn batch_matches_golden_json_and_table() {
    let out = mukai(&["run", "--job", "jobs/deform-batch.json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("deform-batch.json"));
    let out = mukai(&["--format", "table", "run", "--job", "jobs/deform-batch.json"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("deform-batch.table.txt"));
}

#[test]
fn perp_of_the_dimension_twelve_example_is_indecomposable() {
    let out = json_of(&mukai(&["perp", "--job", "jobs/perp-indecomposable.json"]));
    let perp = &out["result"]["perp"];
    assert_eq!(perp["gram"], json!([["-2", "-1"], ["-1", "2"]]));
    assert_eq!(perp["indecomposable"], json!(true));
    assert_eq!(perp["discriminant"], json!("-5"));
    assert_eq!(out["result"]["square"], json!("10"));
}

#[test]
fn isotropic_transform_prints_a_factored_sign() {
    let out = json_of(&mukai(&["fm", "--job", "jobs/isotropic-fm.json"]));
    let image = &out["result"]["image"];
    assert_eq!(image["text"], json!("−(1 − 2ω)"));
    assert_eq!((image["r"].clone(), image["c1"].clone(), image["a"].clone()), (json!("-1"), json!(["0"]), json!("2")));
}

#[test]
fn rank_one_walls_are_empty_and_succeed() {
    let out = mukai(&["walls", "--job", "jobs/walls-rank-one.json"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["result"]["walls"], json!([]));
    assert_eq!(v["result"]["oracle"]["agrees"], json!(true));
}

#[test]
fn inline_flags_and_job_files_agree_byte_for_byte() {
    let file = mukai(&["classify", "--job", "jobs/classify-isotropic.json"]);
    let inline = mukai(&[
        "classify",
        "--kind",
        "k3",
        "--gram",
        "12",
        "--v",
        "1,1,4",
        "--isotropic",
        "2,-1,3,-1,1",
        "--assume-general",
    ]);
    assert_eq!(file.stdout, inline.stdout);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = mukai(&["walls", "--job", "jobs/walls-picard-two.json"]);
    for _ in 0..3 {
        assert_eq!(mukai(&["walls", "--job", "jobs/walls-picard-two.json"]).stdout, a.stdout);
    }
    let b = mukai(&["run", "--job", "jobs/deform-batch.json"]);
    assert_eq!(mukai(&["run", "--job", "jobs/deform-batch.json"]).stdout, b.stdout);
}

#[test]
fn odd_diagonal_names_the_entry() {
    let out = mukai(&["pair", "--gram", "2,1;1,3", "--ample", "1,0", "--v", "1,0,0,0", "--w", "1,0,0,0"]);
    assert_eq!(code(&out), 1);
    let err = &json_of(&out)["error"];
    assert_eq!(err["code"], json!("odd-diagonal"));
    assert_eq!(err["path"], json!("surface.gram[1][1]"));
}

#[test]
fn asymmetric_gram_is_rejected() {
    let job = json!({"command": "pair", "surface": {"kind": "k3", "gram": [[2, 1], [0, -2]], "ample": [1, 0]},
                     "inputs": {"v": [1, 0, 0, 0], "w": [1, 0, 0, 0]}});
    let out = mukai(&["pair", "--job", job_file("asym.json", &job).to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert_eq!(json_of(&out)["error"]["code"], json!("asymmetric-gram"));
}

#[test]
fn unknown_fields_are_rejected_with_their_path() {
    let cases = [
        (
            json!({"command": "pair", "surface": {"kind": "k3", "gram": [[2]]}, "inputs": {"v": [1, 0, 0], "w": [1, 0, 0], "x": 1}}),
            "inputs.x",
        ),
        (
            json!({"command": "classify", "surface": {"kind": "k3", "gram": [[2]]}, "inputs": {"v": [1, 0, 0], "context": {"bogus": true}}}),
            "inputs.context.bogus",
        ),
        (
            json!({"command": "pair", "surface": {"kind": "k3", "gram": [[2]], "colour": 1}, "inputs": {}}),
            "surface.colour",
        ),
        (json!({"command": "pair", "extra": 1}), "extra"),
    ];
    for (i, (job, path)) in cases.iter().enumerate() {
        let out = mukai(&["run", "--job", job_file(&format!("unknown{i}.json"), &json!([job])).to_str().unwrap()]);
        assert_eq!(code(&out), 1);
        let err = &json_of(&out)[0]["error"];
        assert_eq!(err["code"], json!("schema"), "{job}");
        assert_eq!(err["path"], json!(path), "{job}");
    }
}

#[test]
fn wrong_vector_length_is_an_input_error() {
    let out = mukai(&["pair", "--gram", "2", "--v", "1,0,0,0", "--w", "1,0,0"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json_of(&out)["ok"], json!(false));
}

#[test]
fn exit_codes_separate_input_and_precondition_failures() {
    assert_eq!(code(&mukai(&["pair", "--gram", "2", "--v", "1,0,0", "--w", "0,0,1"])), 0);
    assert_eq!(code(&mukai(&["pair", "--gram", "3", "--v", "1,0,0", "--w", "0,0,1"])), 1);
    // walls need a destabilising class of positive square
    let out = mukai(&["walls", "--gram", "-2,6;6,6", "--ample", "0,1", "--c1e", "1,0", "--chie", "1"]);
    assert_eq!(code(&out), 2);
    assert_eq!(json_of(&out)["error"]["code"], json!("precondition"));
    let out = mukai(&["fujiki", "--n", "2", "--l2", "2", "--lx", "0", "--x2", "2"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn a_job_file_must_match_the_subcommand() {
    let out = mukai(&["walls", "--job", "jobs/isotropic-fm.json"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json_of(&out)["error"]["code"], json!("command-mismatch"));
}

#[test]
fn batch_keeps_input_order_and_exits_with_the_worst_code() {
    let mut jobs = Vec::new();
    for n in 1..=12 {
        jobs.push(json!({"command": "pair", "surface": {"kind": "abelian", "gram": [[2]]},
                         "inputs": {"v": [n, 0, 0], "w": [0, 0, 1]}}));
    }
    jobs.insert(5, json!({"command": "fujiki", "inputs": {"n": 2, "l2": 2, "lx": 0, "x2": 2}}));
    jobs.insert(2, json!({"command": "pair"}));
    let out = mukai(&["run", "--job", job_file("order.json", &json!({ "jobs": jobs })).to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let envs = json_of(&out);
    let envs = envs.as_array().unwrap();
    assert_eq!(envs.len(), 14);
    assert_eq!(envs[2]["error"]["path"], json!("surface"));
    assert_eq!(envs[6]["command"], json!("fujiki"));
    let pairs: Vec<String> = envs
        .iter()
        .filter(|e| e["command"] == "pair" && e["ok"] == true)
        .map(|e| e["result"]["pair"].as_str().unwrap().to_string())
        .collect();
    let expected: Vec<String> = (1..=12).map(|n: i32| (-n).to_string()).collect();
    assert_eq!(pairs, expected);
}

#[test]
fn report_rejects_mixed_kinds() {
    let deform = mukai(&["run", "--job", "jobs/deform-batch.json"]);
    let deform_path = job_file("deform-results.json", &json_of(&deform));
    let fm = mukai(&["fm", "--job", "jobs/isotropic-fm.json"]);
    let fm_path = job_file("fm-result.json", &json_of(&fm));
    let out = mukai(&["report", deform_path.to_str().unwrap(), fm_path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert_eq!(json_of(&out)["error"]["code"], json!("mixed-kinds"));
}

#[test]
fn report_csv_round_trips_through_a_reader() {
    let deform = mukai(&["run", "--job", "jobs/deform-batch.json"]);
    let results = json_of(&deform);
    let path = job_file("deform-for-csv.json", &results);
    let out = mukai(&["report", "--csv", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = json_of(&out)["result"]["text"].as_str().unwrap().to_string();
    let raw = mukai(&["--format", "csv", "report", path.to_str().unwrap()]);
    assert_eq!(String::from_utf8(raw.stdout).unwrap(), text);
    let parsed = mukai_cli::render::parse_csv(&text).unwrap();
    let built = mukai_cli::render::build_table(results.as_array().unwrap()).unwrap();
    assert_eq!(parsed, built);
    assert_eq!(parsed.header, ["invariants", "model", "count", "vectors"]);
    let total: usize = parsed.rows.iter().map(|r| r[2].parse::<usize>().unwrap()).sum();
    assert_eq!(total, 8);
}

#[test]
fn colour_follows_the_environment() {
    let args = ["--format", "table", "classify", "--job", "jobs/classify-isotropic.json"];
    let run = |mode: &str| {
        Proc::new(env!("CARGO_BIN_EXE_mukai")).args(args).current_dir(repo()).env("MUKAI_COLOR", mode).output().unwrap()
    };
    let plain = run("never");
    assert!(!plain.stdout.contains(&0x1b));
    let auto = run("auto");
    assert_eq!(auto.stdout, plain.stdout, "auto must not colour a pipe");
    assert!(run("always").stdout.contains(&0x1b));
    assert_eq!(code(&run("sometimes")), 1);
}

#[test]
fn example_jobs_follow_the_parser() {
    for entry in std::fs::read_dir(repo().join("jobs")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let jobs = match mukai_cli::parse_job(&text) {
            Ok(_) => continue,
            Err(_) => mukai_cli::parse_batch(&text).unwrap_or_else(|e| panic!("{}: {}", path.display(), e.message)),
        };
        for j in jobs {
            mukai_cli::job::parse_job_value(j).unwrap_or_else(|e| panic!("{}: {}", path.display(), e.message));
        }
    }
}

#[test]
fn schema_lists_every_command() {
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(repo().join("schemas/job.schema.json")).unwrap()).unwrap();
    let listed: Vec<&str> =
        schema["properties"]["command"]["enum"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    let known: Vec<&str> = mukai_cli::Command::ALL.iter().map(|c| c.as_str()).collect();
    assert_eq!(listed, known);
    for name in ["batch", "common", "envelope", "surface", "vector"] {
        let text = std::fs::read_to_string(repo().join(format!("schemas/{name}.schema.json"))).unwrap();
        serde_json::from_str::<Value>(&text).unwrap();
    }
}
