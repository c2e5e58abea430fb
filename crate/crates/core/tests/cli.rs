use std::process::{Command, Output};

fn hotplug(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hotplug"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn tradeoff_lists_the_three_user_corners() {
    let o = hotplug(&["tradeoff", "--ka", "3", "--k", "4", "--n", "3", "--schemes", "ht", "--bounds", "exact_small,cutset"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    assert!(csv.starts_with("scheme,M_num,M_den,R_num,R_den,M_float,R_float,is_corner"));
    assert!(csv.contains("ht,1,1,1,1,"));
    assert!(csv.contains("ht,2,1,1,3,"));
    assert!(csv.lines().any(|l| l.starts_with("cutset,")));
    // exact_small needs K' = 2 and is skipped with a warning
    assert!(!csv.lines().any(|l| l.starts_with("exact_small,")));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exact_small"));
}

#[test]
fn tradeoff_private_dataset_as_json() {
    let o = hotplug(&[
        "tradeoff", "--ka", "3", "--k", "6", "--n", "3", "--schemes", "ht_pk,pk_plus,yma_vu", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], 1);
    let ht_pk = v["curves"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["label"] == "ht_pk")
        .expect("ht_pk curve");
    let pts: Vec<(String, String)> = ht_pk["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p["M"].as_str().unwrap().to_string(), p["R"].as_str().unwrap().to_string()))
        .collect();
    assert!(pts.contains(&("5/3".into(), "1".into())));
    assert!(pts.contains(&("7/3".into(), "1/3".into())));
}

#[test]
fn verify_passes_and_reports_the_measured_pair() {
    let o = hotplug(&["verify", "--scheme", "ht1", "--ka", "2", "--k", "3", "--n", "2", "--t", "1", "--q", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let c = &v["reports"][0]["correctness"];
    assert_eq!(c["decode_ok"], true);
    assert_eq!(c["measured"]["M"], "1");
    assert_eq!(c["measured"]["R"], "1/2");
}

#[test]
fn exit_codes() {
    let base = ["--ka", "2", "--k", "3", "--n", "2"];
    let run = |extra: &[&str]| {
        let mut args = extra.to_vec();
        args.extend(base);
        hotplug(&args).status.code()
    };
    assert_eq!(run(&["verify", "--scheme", "ht1", "--t", "1", "--sabotage"]), Some(2));
    assert_eq!(run(&["verify", "--scheme", "ht1", "--t", "1", "--privacy"]), Some(3));
    assert_eq!(run(&["verify", "--scheme", "pk_plus", "--t", "sweep", "--privacy"]), Some(0));
    assert_eq!(run(&["verify", "--scheme", "no_such_scheme"]), Some(1));
    assert_eq!(run(&["tradeoff", "--schemes", ""]), Some(1));
    assert_eq!(hotplug(&["gap", "--ka", "0"]).status.code(), Some(1));
    assert_eq!(hotplug(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(hotplug(&["--help"]).status.code(), Some(0));
}

#[test]
fn gap_reports_ratios_within_claims() {
    let o = hotplug(&["gap", "--ka", "4", "--k", "6", "--n", "4", "--grid", "32"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["ok"], true);
    for r in v["reports"].as_array().unwrap() {
        assert!(r["max_ratio_float"].as_f64().unwrap() <= r["threshold_float"].as_f64().unwrap());
    }
}

#[test]
fn config_file_and_out_path() {
    let dir = std::env::temp_dir().join(format!("hotplug-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    let out = dir.join("curve.csv");
    std::fs::write(&cfg, "ka = 2\nk = 3\nn = 2\nschemes = ht\n").unwrap();
    let o = hotplug(&["tradeoff", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.contains("ht,1,2,1,1,"));
    assert!(csv.contains("ht,1,1,1,2,"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn private_verify_with_explicit_field() {
    let o = hotplug(&["verify", "--scheme", "ht_vu", "--ka", "3", "--k", "6", "--n", "3", "--q", "19", "--privacy"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let r = &v["reports"][0];
    assert_eq!(r["correctness"]["decode_ok"], true);
    assert_eq!(r["privacy"]["privacy_ok"], true);
    assert_eq!(r["params"]["q"], 19);
}
