use std::fs;
use std::process::{Command, Output};

use residuum_cli::report::{parse_jsonl, render_human};
use serde_json::Value;

fn residuum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_residuum"))
        .args(args)
        .env_remove("RESIDUUM_FORMAT")
        .env_remove("RESIDUUM_TABLE_BOUND")
        .env_remove("RESIDUUM_JOBS")
        .env_remove("RESIDUUM_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn jsonl_rows(o: &Output) -> Vec<Value> {
    stdout(o)
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap())
        .filter(|v| v["kind"] == "row")
        .map(|v| v["data"].clone())
        .collect()
}

#[test]
fn jsonl_rerenders_to_human() {
    for args in [
        &["core", "-p", "11", "-k", "3"][..],
        &["kp", "--to", "40"],
        &["pairsums", "-p", "11", "-k", "2"],
        &["waring", "-p", "5", "-k", "2"],
        &["divisors", "-p", "13"],
        &["scan", "exceptions", "--to", "300"],
        &["decompose", "-p", "7", "-k", "2", "35"],
    ] {
        let human = residuum(args);
        let mut j = args.to_vec();
        j.extend(["--format", "jsonl"]);
        let jsonl = residuum(&j);
        assert_eq!(human.status.code(), jsonl.status.code());
        let (echo, records) = parse_jsonl(&stdout(&jsonl)).unwrap();
        assert_eq!(render_human(&echo, &records), stdout(&human), "{args:?}");
    }
}

#[test]
fn core_table_golden_base_11() {
    let o = residuum(&["core", "-p", "11", "-k", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.split_whitespace().take(2).eq(["2", "4a2"])));
    let cores: Vec<String> = text
        .lines()
        .skip(2)
        .take(10)
        .map(|l| l.split_whitespace().nth(1).unwrap().to_string())
        .collect();
    assert_eq!(cores, ["001", "4a2", "103", "974", "525", "586", "137", "9a8", "609", "aaa"]);
}

#[test]
fn core_fifth_powers_mod_25() {
    let o = residuum(&["core", "-p", "5", "-k", "2", "--format", "csv"]);
    let cores: Vec<String> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().to_string())
        .collect();
    assert_eq!(cores, ["01", "12", "33", "44"]);
}

#[test]
fn exit_codes() {
    assert_eq!(residuum(&["core", "-p", "4", "-k", "2"]).status.code(), Some(3));
    assert_eq!(residuum(&["core", "-p", "2", "-k", "2"]).status.code(), Some(3));
    assert_eq!(residuum(&["waring", "-p", "11", "-k", "8"]).status.code(), Some(4));
    assert_eq!(residuum(&["core", "-p", "11"]).status.code(), Some(2));
    assert_eq!(residuum(&["decompose", "-p", "5", "-k", "2", "0z"]).status.code(), Some(6));
    assert_eq!(residuum(&["scan", "note4", "--to", "100"]).status.code(), Some(1));
    let o = residuum(&["waring", "-p", "11", "-k", "4", "--table-bound", "1000"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--table-bound"));
}

#[test]
fn kp_rows() {
    let o = residuum(&["kp", "--from", "3", "--to", "13", "--format", "jsonl"]);
    assert!(o.status.success());
    let got: Vec<(u64, u64)> = jsonl_rows(&o)
        .iter()
        .map(|r| (r["p"].as_u64().unwrap(), r["kp"].as_u64().unwrap()))
        .collect();
    assert_eq!(got, [(3, 2), (5, 2), (7, 2), (11, 3), (13, 2)]);

    let o = residuum(&["kp", "--from", "72", "--to", "75", "--format", "jsonl"]);
    assert_eq!(jsonl_rows(&o)[0]["kp"], 4);

    let empty = residuum(&["kp", "--from", "24", "--to", "28", "--format", "jsonl"]);
    assert!(empty.status.success());
    assert!(jsonl_rows(&empty).is_empty());

    let o = residuum(&["kp", "--from", "1990", "--to", "2004", "--format", "jsonl"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\"kind\":\"warning\""));
}

#[test]
fn pairsums_rows() {
    let o = residuum(&["pairsums", "-p", "11", "-k", "3", "--format", "jsonl"]);
    let core = &jsonl_rows(&o)[0];
    assert_eq!((core["observed"].as_u64(), core["predicted"].as_u64()), (Some(50), Some(50)));
    let o = residuum(&["pairsums", "-p", "11", "-k", "2", "--format", "jsonl"]);
    let core = &jsonl_rows(&o)[0];
    assert_eq!(core["observed"], 40);
    assert_eq!(core["note"], "k < K_p");
}

#[test]
fn waring_summary() {
    let o = residuum(&["waring", "-p", "3", "-k", "2", "--format", "jsonl"]);
    assert!(o.status.success());
    let last: Value = serde_json::from_str(stdout(&o).lines().last().unwrap()).unwrap();
    assert_eq!(last["data"]["theorem_holds"], true);
    assert_eq!(last["data"]["disjoint_3_4"], true);
    assert!(residuum(&["waring", "-p", "11", "-k", "2"]).status.success());
}

#[test]
fn divisors_of_p2_minus_1() {
    let o = residuum(&["divisors", "-p", "11", "--format", "jsonl"]);
    assert!(o.status.success());
    let rows = jsonl_rows(&o);
    let r3 = rows.iter().find(|r| r["r"] == "3").unwrap();
    assert_eq!(r3["exceptional_p2"], true);
    assert!(rows.iter().all(|r| r["core_p3"] == false));
}

#[test]
fn scans() {
    let o = residuum(&["scan", "wieferich", "--to", "10000", "--format", "jsonl"]);
    let ps: Vec<u64> = jsonl_rows(&o).iter().map(|r| r["p"].as_u64().unwrap()).collect();
    assert_eq!(ps, [1093, 3511]);

    let o = residuum(&["scan", "exceptions", "--to", "401", "--format", "jsonl"]);
    let rows: Vec<(u64, u64)> = jsonl_rows(&o)
        .iter()
        .map(|r| (r["p"].as_u64().unwrap(), r["r"].as_u64().unwrap()))
        .collect();
    assert_eq!(
        rows,
        [(11, 3), (29, 14), (37, 18), (181, 78), (257, 48), (269, 180), (281, 20), (313, 104)]
    );
}

#[test]
fn checkpoint_resume() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("wief.ckpt");
    let cps = cp.to_str().unwrap();
    let to = "3000000";
    let full = residuum(&["scan", "wieferich", "--to", to, "--format", "csv"]);
    assert!(full.status.success());

    // A scan stopped after its first block leaves the next block start.
    fs::write(&cp, format!("{}\n", 3 + (1u64 << 20))).unwrap();
    let resumed = residuum(&["scan", "wieferich", "--to", to, "--checkpoint", cps, "--format", "jsonl"]);
    assert!(resumed.status.success());
    assert!(jsonl_rows(&resumed).is_empty());
    assert_eq!(fs::read_to_string(&cp).unwrap(), "3000001\n");

    let fresh = dir.path().join("fresh.ckpt");
    let o = residuum(&["scan", "wieferich", "--to", to, "--checkpoint", fresh.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(stdout(&o), stdout(&full));
    assert_eq!(stdout(&full), "p,base,residue\n1093,2,0\n3511,2,0\n");

    fs::write(&cp, "garbage").unwrap();
    let bad = residuum(&["scan", "wieferich", "--to", to, "--checkpoint", cps]);
    assert_eq!(bad.status.code(), Some(7));
}

#[test]
fn settings_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("residuum.conf");
    fs::write(&conf, "format = csv\n").unwrap();
    let base = ["core", "-p", "5", "-k", "2", "--config", conf.to_str().unwrap()];
    assert!(stdout(&residuum(&base)).starts_with("n,core"));

    let from_env = Command::new(env!("CARGO_BIN_EXE_residuum"))
        .args(base)
        .env("RESIDUUM_FORMAT", "jsonl")
        .output()
        .unwrap();
    assert!(stdout(&from_env).starts_with("{\"schema_version\":1"));

    let from_flag = Command::new(env!("CARGO_BIN_EXE_residuum"))
        .args(base)
        .args(["--format", "human"])
        .env("RESIDUUM_FORMAT", "jsonl")
        .output()
        .unwrap();
    assert!(stdout(&from_flag).starts_with("# core -p 5 -k 2"));
}

#[test]
fn output_is_deterministic() {
    let args = ["scan", "exceptions", "--to", "2000", "--jobs", "3"];
    assert_eq!(stdout(&residuum(&args)), stdout(&residuum(&args[..4])));
}
