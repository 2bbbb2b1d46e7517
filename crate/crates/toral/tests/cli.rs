use std::process::Command;

fn toral(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_toral")).args(args).env_remove("TORAL_CONFIG").output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn chart_json_round_trip() {
    let dir = std::env::temp_dir().join(format!("toral-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (code, json) = toral(&["ext", "--rank", "1", "--source", "sigma:ann=3", "--target", "sigma:ann=3", "--window=-4:4", "--format", "json"]);
    assert_eq!(code, 0);
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(value["schema"], 1);
    let path = dir.join("chart.json");
    std::fs::write(&path, &json).unwrap();
    let (code, ascii) = toral(&["chart", path.to_str().unwrap(), "--format", "ascii"]);
    assert_eq!(code, 0);
    assert!(ascii.contains("sigma:ann=3"));

    let mut bumped = value.clone();
    bumped["schema"] = 99.into();
    std::fs::write(&path, bumped.to_string()).unwrap();
    assert_eq!(toral(&["chart", path.to_str().unwrap()]).0, 1);
}

#[test]
fn resolution_save_and_load() {
    let dir = std::env::temp_dir().join(format!("toral-res-{}", std::process::id()));
    let config = dir.join("config.json");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(&config, serde_json::json!({ "rank": 2, "window": "4", "output_dir": dir }).to_string()).unwrap();
    let (code, _) = toral(&["--config", config.to_str().unwrap(), "resolve", "--object", "cell:ann=2,0;0,2", "--kind", "koszul"]);
    assert_eq!(code, 0);
    let saved = dir.join("resolution.json");
    let (code, _) = toral(&["resolve", "--load", saved.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (_, summary) = toral(&["resolve", "--load", saved.to_str().unwrap()]);
    let summary: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(summary["multiplicities"], serde_json::json!([1, 2, 1]));
}

#[test]
fn exit_codes() {
    assert_eq!(toral(&["subgroup", "--rank", "2", "--ann", "1,x"]).0, 1);
    assert_eq!(toral(&["selfcheck", "--suite", "missing"]).0, 1);
    assert_eq!(toral(&["selfcheck", "--suite", "euler"]).0, 0);
    let (code, out) = toral(&["euler", "--rank", "1", "--rep", "3", "--at", "full"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"degree\": -2"));
}
