use std::path::PathBuf;

use multifrac::factorizer::FactorizationDoc;
use multifrac::{GeneratorSet, MapUnion};

use super::{execute, Execution};

fn run_with(args: &[&str], env_cache: Option<PathBuf>) -> Execution {
    let argv: Vec<String> = std::iter::once("multifrac").chain(args.iter().copied()).map(String::from).collect();
    execute(&argv, env_cache)
}

fn run(args: &[&str]) -> Execution {
    run_with(args, None)
}

#[test]
fn member_json_is_exact() {
    let o = run(&["member", "--bases", "2/3", "--x", "4/3", "--json"]);
    assert_eq!(o.code, 0);
    assert_eq!(o.stdout, "{\"member\":true,\"hub\":{\"c0\":0,\"terms\":[{\"base\":\"2/3\",\"exp\":1,\"coeff\":2}]}}\n");
    let o = run(&["member", "--bases", "2/3", "--x", "1/3", "--json"]);
    assert_eq!(o.code, 0);
    assert_eq!(o.stdout, "{\"member\":false}\n");
}

#[test]
fn lengths_json_round_trips() {
    let o = run(&["lengths", "--bases", "2/3", "--x", "2", "--json"]);
    assert_eq!(o.stdout, "{\"components\":[{\"offset\":2,\"diffs\":[]},{\"offset\":2,\"diffs\":[{\"d\":1,\"l\":\"inf\"}]}]}\n");
    let l: MapUnion = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(serde_json::to_string(&l).unwrap() + "\n", o.stdout);
}

#[test]
fn hub_and_generator_set_round_trip() {
    #[derive(serde::Deserialize)]
    struct Factorize {
        hub: FactorizationDoc,
    }
    #[derive(serde::Deserialize)]
    struct Classify {
        bases: GeneratorSet,
    }
    let o = run(&["factorize", "--bases", "2/3,4/5", "--x", "22/15", "--json"]);
    let doc: Factorize = serde_json::from_str(&o.stdout).unwrap();
    let hub = serde_json::to_string(&doc.hub).unwrap();
    assert!(o.stdout.starts_with(&format!("{{\"x\":\"22/15\",\"hub\":{hub},")));

    let o = run(&["classify", "--bases", "4/5,2/3", "--json"]);
    let doc: Classify = serde_json::from_str(&o.stdout).unwrap();
    let set = serde_json::to_string(&doc.bases).unwrap();
    assert!(o.stdout.starts_with(&format!("{{\"bases\":{set},")));
}

#[test]
fn bases_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let list = dir.path().join("list.txt");
    std::fs::write(&list, "2/3, 4/5\n").unwrap();
    let doc = dir.path().join("set.json");
    std::fs::write(&doc, r#"{"bases":["4/5","2/3"]}"#).unwrap();
    let a = run(&["member", "--bases-file", list.to_str().unwrap(), "--x", "22/15", "--json"]);
    let b = run(&["member", "--bases-file", doc.to_str().unwrap(), "--x", "22/15", "--json"]);
    let c = run(&["member", "--bases", "2/3,4/5", "--x", "22/15", "--json"]);
    assert_eq!(a.stdout, c.stdout);
    assert_eq!(b.stdout, c.stdout);
    assert_eq!(run(&["member", "--x", "1"]).code, 1);
}

#[test]
fn non_canonical_lengths_fall_back_to_enumeration() {
    let o = run(&["lengths", "--bases", "2/3,5/6", "--x", "5/3", "--emax", "2", "--lenmax", "6", "--json"]);
    assert_eq!(o.code, 0);
    assert_eq!(o.stdout, "{\"lengths\":[2],\"caps\":{\"e_max\":2,\"len_max\":6,\"cap\":64},\"complete\":false}\n");
}

#[test]
fn text_output() {
    let o = run(&["lengths", "--bases", "2/5", "--x", "2", "--cap", "14"]);
    assert_eq!(o.stdout, "L(2/1) = {2} ∪ (2 + P_inf(3))\nelements up to 14: {2, 5, 8, 11, 14}\n");
    let o = run(&["delta", "--bases", "2/3", "--sample", "2,2/3,10/3"]);
    assert!(o.stdout.contains("Δ(M) = {1}"));
}

#[test]
fn exit_codes() {
    let o = run(&["member", "--bases", "2/3", "--x", "2/x"]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("2/x"));
    assert_eq!(run(&["frobnicate"]).code, 1);
    assert_eq!(run(&["--help"]).code, 0);
    assert_eq!(run(&["member", "--bases", "2/3,2/x", "--x", "1"]).code, 1);

    let o = run(&["difftest", "--bases", "2/3,5/6", "--json"]);
    assert_eq!(o.code, 2);
    assert_eq!(o.stdout, "{\"error\":{\"kind\":\"NotCanonical\",\"message\":\"generator set is not canonical\"}}\n");
    let o = run(&["delta", "--bases", "2/3", "--x", "1/3"]);
    assert_eq!(o.code, 2);
    assert!(o.stdout.is_empty() && o.stderr.starts_with("error:"));
    let o = run(&["construct", "--kind", "nonatomic", "--seed-primes", "2,3,5", "--json"]);
    assert_eq!(o.code, 2);
    assert!(o.stdout.contains("BadSeed"));
    assert_eq!(run(&["unions", "--bases", "2/3", "--k", "0"]).code, 2);
    assert_eq!(run(&["construct", "--kind", "delta", "--K", "1", "--k", "2"]).code, 2);
}

#[test]
fn difftest_passes_on_fixtures() {
    for bases in ["2/3", "2/3,4/5", "2/3,5/2", "3/5,6/7,7/11"] {
        let o = run(&["difftest", "--bases", bases, "--trials", "200", "--seed", "42", "--json"]);
        assert_eq!(o.code, 0, "{bases}: {}", o.stdout);
        let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["pass"], true);
        assert_eq!(v["checks"]["hub_uniqueness"], 200);
        assert_eq!(v["counterexample"], serde_json::Value::Null);
    }
    let a = run(&["difftest", "--bases", "2/3,4/5", "--trials", "50", "--seed", "1"]);
    let b = run(&["difftest", "--bases", "2/3,4/5", "--trials", "50", "--seed", "1"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn construct_reports() {
    let o = run(&["construct", "--kind", "delta", "--d", "2", "--K", "1", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["family"]["bases"]["bases"], serde_json::json!(["3/7", "9/11"]));
    assert_eq!(v["family"]["seed"]["primes"], serde_json::json!([7, 11]));

    let o = run(&["construct", "--kind", "delta", "--d", "2", "--K", "1", "--k", "1", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["check"]["hub_length"], 12);
    assert_eq!(v["check"]["delta"]["deltas"], serde_json::json!([2]));
    assert_eq!(v["check"]["localized"], true);

    let o = run(&["construct", "--kind", "nonatomic", "--seed-primes", "2,3,11", "--m", "2", "--nmax", "8", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["witness_search"]["witness"]["N"], 4);
    assert_eq!(v["witness_search"]["witness"]["alpha"], "10");
}

#[test]
fn unions_report_carries_caps() {
    let o = run(&["unions", "--bases", "2/3", "--k", "2", "--cap", "10", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["values"], serde_json::json!([2, 3, 4, 5, 6, 7, 8, 9, 10]));
    assert_eq!(v["truncation"], 10);
    assert_eq!(v["complete"], false);
    assert_eq!(v["elasticity"], "inf");
    assert_eq!(v["aap"]["d"], 1);
}

#[test]
fn cache_stores_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_str().unwrap();
    let args = ["unions", "--bases", "2/3", "--k", "2", "--cap", "20", "--json", "--cache", path];
    let first = run(&args);
    assert_eq!(first.code, 0);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
    let manifest = std::fs::read_to_string(dir.path().join("manifest.jsonl")).unwrap();
    assert!(manifest.contains("\"unions\""));
    assert!(!manifest.contains(path));
    assert_eq!(run(&args).stdout, first.stdout);
    assert_eq!(std::fs::read_to_string(dir.path().join("manifest.jsonl")).unwrap(), manifest);

    // same key through the environment variable
    let via_env = run_with(&args[..8], Some(dir.path().to_path_buf()));
    assert_eq!(via_env.stdout, first.stdout);
    assert_eq!(std::fs::read_to_string(dir.path().join("manifest.jsonl")).unwrap(), manifest);

    // failures are not cached
    let _ = run(&["member", "--bases", "2/3,5/6", "--x", "1", "--cache", path]);
    let _ = run(&["difftest", "--bases", "2/3,5/6", "--cache", path]);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}
