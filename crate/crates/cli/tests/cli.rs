use std::path::Path;
use std::process::{Command, Output};

fn greenwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_greenwalk"))
        .args(args)
        .env_remove("GREENWALK_WORKERS")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SRW: &str = r#"{"kind":"points","points":[[-1,0.5],[1,0.5]]}"#;

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"version":1,"walk":{"type":"homogeneous","step":{"kind":"points","points":[[1,1.0]]}},
            "tasks":[{"kind":"classify","tolerance":1e-6}]}"#,
    );
    let out = dir.path().join("r");
    let o = greenwalk(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown field `tolerance`"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn negative_weights_name_the_atom() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"version":1,"walk":{"type":"homogeneous","step":{"kind":"points","points":[[1,1.2],[-3,-0.2]]}},
            "tasks":[{"kind":"classify"}]}"#,
    );
    let o = greenwalk(&["run", &cfg, "--out", dir.path().join("r").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr(&o);
    assert!(e.contains("walk.step") && e.contains("atom -3"), "{e}");
}

#[test]
fn wrong_version_and_missing_walk() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"version":2,"tasks":[{"kind":"classify"}]}"#);
    let o = greenwalk(&["run", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("version 2"));

    let cfg = write_config(dir.path(), r#"{"version":1,"tasks":[{"kind":"classify"}]}"#);
    let o = greenwalk(&["run", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("has no walk"));
}

#[test]
fn classify_shortcut_prints_json() {
    let o = greenwalk(&["classify", "--measure", SRW]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "greenwalk-report/1");
    assert_eq!(v["result"]["regime"], "null-recurrent");
    assert_eq!(v["result"]["recurrent"], true);

    let o = greenwalk(&["classify", "--measure", r#"{"kind":"points","points":[[1,0.6],[-1,0.4]]}"#]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["regime"], "transient");
}

#[test]
fn classify_shortcut_bad_measure() {
    let o = greenwalk(&["classify", "--measure", r#"{"kind":"points","points":[[1,0.5]]"#]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error"));
}

#[test]
fn strict_flags_undetermined_verdicts() {
    let zeta = r#"{"kind":"zeta","a":0.7,"window":4096}"#;
    let cfg_text = format!(
        r#"{{"version":1,
            "walk":{{"type":"concentrated","mu_plus":{zeta},"nu_minus":{{"kind":"reflected","of":{zeta}}}}},
            "tasks":[{{"kind":"classify","name":"gap","tol":1e-8}}]}}"#
    );
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &cfg_text);
    let out = dir.path().join("r");
    let o = greenwalk(&["run", &cfg, "--strict", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    // reports are still written
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("01-gap.json")).unwrap()).unwrap();
    assert_eq!(report["result"]["regime"], "undetermined");

    let o = greenwalk(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));

    let nu = r#"{"kind":"reflected","of":{"kind":"zeta","a":0.7,"window":4096}}"#;
    let o = greenwalk(&["classify", "--measure", zeta, "--nu", nu, "--strict"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!(
            r#"{{"version":1,"walk":{{"type":"homogeneous","step":{SRW}}},
                "defaults":{{"seed":7,"trials":4000,"horizon":500}},
                "tasks":[
                  {{"kind":"simulate","name":"ret","event":{{"type":"return"}}}},
                  {{"kind":"green","name":"g","modes":["dp"]}},
                  {{"kind":"factorize","name":"wh","trials":2000}}
                ]}}"#
        ),
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for (out, workers) in [(&a, "1"), (&b, "3")] {
        let o = greenwalk(&["--workers", workers, "run", &cfg, "--no-timestamp", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.iter().any(|n| n == "02-g.table.csv"));
    for n in &names {
        assert_eq!(std::fs::read(a.join(n)).unwrap(), std::fs::read(b.join(n)).unwrap(), "{n:?}");
    }
}

#[test]
fn timestamps_only_when_asked() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!(r#"{{"version":1,"walk":{{"type":"homogeneous","step":{SRW}}},"tasks":[{{"kind":"classify"}}]}}"#),
    );
    let out = dir.path().join("r");
    assert!(greenwalk(&["run", &cfg, "--out", out.to_str().unwrap()]).status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("01-classify.json")).unwrap()).unwrap();
    assert!(v["generated_at"].as_u64().is_some());
}
