//! End-to-end tests for the `thinair` binary: exit-code contract,
//! byte-reproducibility of artifacts and manifests, and the bundled-asset
//! guarantees.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use thinair::config::{ArrayDocument, PipelineDocument, ProfileDocument, RigDocument};
use thinair::interaction::demo_trajectory;
use thinair::sensations::SensationLibrary;
use thinair_cli::assets;
use thinair_cli::trajectory::{parse_hand_trajectory, write_hand_trajectory};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thinair"))
        .args(args)
        .env_remove("THINAIR_ASSETS")
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn read(path: &Path) -> Vec<u8> {
    fs::read(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

fn manifest_of(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap().to_string_lossy().into_owned();
    name.push_str(".manifest.json");
    path.with_file_name(name)
}

#[test]
fn field_writes_expected_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.csv");
    let status = run(&[
        "field",
        "--array",
        "default",
        "--focus",
        "0,0,0.2",
        "--plane",
        "z=0.2",
        "--extent",
        "0.2",
        "--n",
        "64",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success(), "{status:?}");

    let text = String::from_utf8(read(&out)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,y,z,re,im,abs");
    assert_eq!(lines.len(), 1 + 64 * 64);

    let manifest = manifest_of(&out);
    assert!(manifest.exists(), "manifest missing");
    let m: serde_json::Value = serde_json::from_slice(&read(&manifest)).unwrap();
    assert_eq!(m["subcommand"], "field");
    assert_eq!(m["inputs"][0]["name"], "array");
    assert!(m.get("timestamp_utc_s").is_none());
}

#[test]
fn field_runs_are_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let status = run(&[
            "field",
            "--focus",
            "0,0,0.2",
            "--plane",
            "z=0.2",
            "--n",
            "16",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(status.status.success());
    }
    assert_eq!(read(&a), read(&b));
    assert_eq!(read(&manifest_of(&a)), read(&manifest_of(&b)));
}

#[test]
fn field_pgm_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.pgm");
    let status = run(&[
        "field",
        "--focus",
        "0,0,0.2",
        "--plane",
        "z=0.2",
        "--n",
        "32",
        "--format",
        "pgm",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let bytes = read(&out);
    assert!(bytes.starts_with(b"P5\n32 32\n255\n"));
    assert_eq!(bytes.len(), b"P5\n32 32\n255\n".len() + 32 * 32);
    assert!(bytes[bytes.len() - 32 * 32..].contains(&255u8));
}

#[test]
fn gain_prints_the_golden_ratio() {
    let out = run(&["gain", "--focus", "0.05,0,0.2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    let gain = v["gain"].as_f64().unwrap();
    assert!((gain - 13.420034462935325).abs() / 13.420034462935325 < 1e-9);
}

#[test]
fn sensation_dumps_a_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("click.jsonl");
    let status = run(&[
        "sensation",
        "--name",
        "click",
        "--duration-us",
        "200000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let text = String::from_utf8(read(&out)).unwrap();
    // Burst cap: 100 ms at 40 kHz regardless of the longer request.
    assert_eq!(text.lines().count(), 4000);
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["t_us"], 0);
    assert_eq!(first["envelope"], 1.0);
    assert!(manifest_of(&out).exists());
}

#[test]
fn sensation_rejects_bad_params_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.jsonl");
    let status = run(&[
        "sensation",
        "--name",
        "click",
        "--param",
        "frequency_hz=5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(status.status.code(), Some(1));
    assert!(!out.exists());

    let status = run(&[
        "sensation",
        "--name",
        "warp",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(status.status.code(), Some(1));
}

#[test]
fn session_replays_reproducibly() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for out in [&a, &b] {
        let status = run(&["session", "--rate", "2000", "--out", out.to_str().unwrap()]);
        assert!(status.status.success(), "{status:?}");
    }
    let bytes = read(&a);
    assert_eq!(bytes, read(&b));
    let text = String::from_utf8(bytes).unwrap();
    assert!(text.lines().count() > 100);
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    for key in [
        "t_us",
        "device",
        "x_mm",
        "y_mm",
        "z_mm",
        "envelope",
        "sensation",
        "control",
    ] {
        assert!(first.get(key).is_some(), "event missing {key}");
    }
}

#[test]
fn coverage_emits_map_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cov.csv");
    let summary = dir.path().join("cov_summary.json");
    let status = run(&[
        "coverage",
        "--voxel",
        "0.05",
        "--out",
        out.to_str().unwrap(),
        "--summary-out",
        summary.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let text = String::from_utf8(read(&out)).unwrap();
    assert!(text.starts_with("x_mm,y_mm,z_mm,count\n"));
    // 0.5 x 0.3 x 0.3 volume at 0.05 voxels: 10 x 6 x 6.
    assert_eq!(text.lines().count(), 1 + 10 * 6 * 6);
    let s: serde_json::Value = serde_json::from_slice(&read(&summary)).unwrap();
    assert_eq!(s["total_voxels"], 360);
    assert_eq!(s["fraction_ge1"], 1.0);
    assert!(manifest_of(&summary).exists());
}

#[test]
fn power_reads_schedules_back() {
    let dir = tempfile::tempdir().unwrap();
    let schedule = dir.path().join("click.jsonl");
    assert!(run(&[
        "sensation",
        "--name",
        "click",
        "--out",
        schedule.to_str().unwrap(),
    ])
    .status
    .success());

    let out = run(&[
        "power",
        "--schedule",
        &format!("usi0={}", schedule.display()),
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    // 50% duty at full strength: envelope² averages 0.5 of the 80 W peak.
    assert_eq!(v["usi0"], 40.0);
    assert_eq!(v["usi1"], 0.0);
}

#[test]
fn latency_reports_budget_findings() {
    let out = run(&["latency", "--distance-m", "0.2", "--level", "ffs_c"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    assert_eq!(v["breakdown"]["total_us"], 12078);
    assert_eq!(v["finding"]["status"], "opportunity");
}

#[test]
fn compliance_flags_panels_three_and_four_at_ftd5() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let status = run(&[
        "compliance",
        "--level",
        "ftd5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let v: serde_json::Value = serde_json::from_slice(&read(&out)).unwrap();
    assert_eq!(v["verdict"], "red");
    let red: Vec<&str> = v["findings"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|f| f["status"] == "risk")
        .map(|f| f["subject"].as_str().unwrap())
        .collect();
    assert_eq!(red, ["gear_lever", "throttle"]);
    assert!(v["disclaimer"]
        .as_str()
        .unwrap()
        .contains("not a certification"));
    assert!(manifest_of(&out).exists());
}

#[test]
fn compliance_text_summary_is_keyed_green_amber_red() {
    let plain = run(&["compliance", "--level", "ftd5", "--format", "text"]);
    assert!(plain.status.success());
    let text = stdout_of(&plain);
    assert!(text.contains("RED"));
    assert!(text.contains("[GREEN]"));
    assert!(text.contains("gear_lever"));
    assert!(!text.contains('\u{1b}'));

    let colored = run(&[
        "compliance",
        "--level",
        "ftd5",
        "--format",
        "text",
        "--color",
    ]);
    assert!(stdout_of(&colored).contains("\u{1b}[31m"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["warp-drive"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(
        run(&["gain", "--focus", "not-a-point"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["latency", "--level", "ffs_e"]).status.code(), Some(2));
}

#[test]
fn validation_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    // Focus behind the array is a domain error, not a usage error.
    let out = run(&["gain", "--focus", "0,0,-0.2"]);
    assert_eq!(out.status.code(), Some(1));

    // Malformed config file.
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"schema_version\": 1}").unwrap();
    let out = run(&[
        "gain",
        "--array",
        bad.to_str().unwrap(),
        "--focus",
        "0,0,0.2",
    ]);
    assert_eq!(out.status.code(), Some(1));

    // Missing file.
    let out = run(&[
        "session",
        "--trajectory",
        "/nope.csv",
        "--out",
        "/tmp/x.jsonl",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bundled_assets_match_factories_and_round_trip() {
    // Byte equality against the factories guards asset drift, and each
    // document survives parse -> serialize -> parse.
    assert_eq!(
        assets::DEFAULT_ARRAY_JSON,
        ArrayDocument::default_array().to_json_pretty()
    );
    assert_eq!(
        assets::FIGURE5_RIG_JSON,
        RigDocument::figure5().to_json_pretty()
    );
    assert_eq!(
        assets::A320_PROFILE_JSON,
        ProfileDocument::a320_example().to_json_pretty()
    );
    assert_eq!(
        assets::PIPELINE_DEFAULT_JSON,
        PipelineDocument::default_pipeline().to_json_pretty()
    );

    let a = ArrayDocument::from_json(assets::DEFAULT_ARRAY_JSON).unwrap();
    assert_eq!(ArrayDocument::from_json(&a.to_json_pretty()).unwrap(), a);
    let r = RigDocument::from_json(assets::FIGURE5_RIG_JSON).unwrap();
    assert_eq!(RigDocument::from_json(&r.to_json_pretty()).unwrap(), r);
    let p = ProfileDocument::from_json(assets::A320_PROFILE_JSON).unwrap();
    assert_eq!(ProfileDocument::from_json(&p.to_json_pretty()).unwrap(), p);
    assert!(p.build(&SensationLibrary::with_builtins()).is_ok());

    // Demo trajectory asset equals the generator output.
    assert_eq!(
        assets::DEMO_TRAJECTORY_CSV,
        write_hand_trajectory(&demo_trajectory(5_000_000, 90.0))
    );
    let poses = parse_hand_trajectory(assets::DEMO_TRAJECTORY_CSV.as_bytes()).unwrap();
    assert_eq!(poses.len(), 450);
}

#[test]
fn asset_dir_override_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    // A pipeline with one zero-delay stage; distance 0 gives total 0.
    fs::write(
        dir.path().join("pipeline_default.json"),
        "{\"schema_version\":1,\"stages\":[{\"name\":\"only\",\"delay_us\":7}],\"speed_of_sound_mps\":346.0}",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_thinair"))
        .args(["latency", "--distance-m", "0", "--level", "ftd4"])
        .env("THINAIR_ASSETS", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stdout).trim()).unwrap();
    assert_eq!(v["breakdown"]["total_us"], 7);
}
