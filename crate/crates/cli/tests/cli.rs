use std::path::PathBuf;
use std::process::{Command, Output};

fn vkm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vkm")).args(args).output().expect("vkm runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("vkm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn random_apply_canon_pipeline() {
    let r = scratch("r.tdf");
    let k = scratch("k.tdf");
    assert!(vkm(&["random", "--seed", "3", "--steps", "6", "-o", r.to_str().unwrap()]).status.success());
    assert!(vkm(&["validate", r.to_str().unwrap()]).status.success());
    let o = vkm(&["apply", r.to_str().unwrap(), "--move", "V1a", "--dir", "fwd", "--site", "0", "-o", k.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let back = scratch("back.tdf");
    let o = vkm(&["matches", k.to_str().unwrap(), "--move", "V1a", "--dir", "bwd", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let n = v["sites"].as_array().unwrap().len();
    // one of the backward sites removes the new kink again
    let original = stdout(&vkm(&["canon", r.to_str().unwrap()]));
    let undone = (0..n).any(|i| {
        let i = i.to_string();
        vkm(&["apply", k.to_str().unwrap(), "--move", "V1a", "--dir", "bwd", "--site", &i, "-o", back.to_str().unwrap()])
            .status
            .success()
            && stdout(&vkm(&["canon", back.to_str().unwrap()])) == original
    });
    assert!(undone);
}

#[test]
fn exit_codes() {
    let bad = scratch("bad.tdf");
    std::fs::write(&bad, "closed\nx 7 over=02\ne 7.4 7.0\n").unwrap();
    assert_eq!(vkm(&["validate", bad.to_str().unwrap()]).status.code(), Some(1));

    let twisted = scratch("twisted.tdf");
    std::fs::write(&twisted, "closed\nx 0 over=02\ne 0.0 0.1\ne 0.2 0.3\n").unwrap();
    assert_eq!(vkm(&["validate", twisted.to_str().unwrap()]).status.code(), Some(2));

    assert_eq!(vkm(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(vkm(&["derive", "--target", "V2b", "--allow", "V2a", "--max-crossings", "6", "--max-depth", "12"]).status.code(), Some(2));
    assert_eq!(vkm(&["audit", "--invariant", "crossing-count", "--moves", "V1a", "--count", "3", "--steps", "5"]).status.code(), Some(2));
    assert_eq!(vkm(&["audit", "--moves", "generators", "--count", "3", "--steps", "5"]).status.code(), Some(0));
}

#[test]
fn certificates_round_trip_through_files() {
    let cert = scratch("v2b.cert");
    let o = vkm(&["derive", "--target", "V2b", "--allow", "V1a,V2a,V3a", "--cert", cert.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(vkm(&["check", "--cert", cert.to_str().unwrap()]).status.success());

    let text = std::fs::read_to_string(&cert).unwrap();
    let truncated: String = text.lines().take(2).map(|l| format!("{l}\n")).collect();
    let cut = scratch("cut.cert");
    std::fs::write(&cut, truncated).unwrap();
    assert_eq!(vkm(&["check", "--cert", cut.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn moves_map_override() {
    let map = scratch("moves.map");
    let text = stdout(&vkm(&["catalog", "--map"]));
    assert_eq!(text.lines().count(), 33);
    std::fs::write(&map, &text).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_vkm")).env("VKM_MOVES_MAP", &map).args(["catalog"]).output().unwrap();
    assert!(o.status.success());

    let short: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
    std::fs::write(&map, short).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_vkm")).env("VKM_MOVES_MAP", &map).args(["catalog"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn enumerate_one_family() {
    let o = vkm(&["enumerate", "--family", "V4"]);
    let out = stdout(&o);
    assert!(out.starts_with("V4 8\n"));
    for letter in 'a'..='h' {
        assert!(out.contains(&format!("V4{letter} ")), "{out}");
    }
}
