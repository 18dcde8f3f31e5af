//! `thinair`: simulate mid-air ultrasonic haptics for virtual cockpit
//! controls from the command line.
//!
//! Exit codes: 0 success, 1 validation/runtime error, 2 usage error.
//! Every file artifact is accompanied by a `.manifest.json` with input
//! digests and modeling assumptions; outputs are byte-reproducible unless
//! `--with-timestamp` is set.

// `!(x > 0.0)` rejects NaN flag values; `x <= 0.0` would accept them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use thinair::acoustics::{evaluate_pressure_grid, focal_gain, solve_focus_phases, FieldGrid};
use thinair::compliance::{assess_compliance, check_latency_budget, simulate_latency, SimLevel};
use thinair::config::{ArrayDocument, PipelineDocument, ProfileDocument, RigDocument};
use thinair::interaction::{events_to_jsonl, run_session, HandPose};
use thinair::math::Vec3;
use thinair::modulation::Schedule;
use thinair::rig::{coverage_map, estimate_power};
use thinair::sensations::SensationLibrary;

use thinair_cli::assets::{resolve, AssetKind, ResolvedAsset};
use thinair_cli::fieldmap::{write_field_csv, write_field_pgm};
use thinair_cli::manifest::RunManifest;
use thinair_cli::trajectory::parse_hand_trajectory;

#[derive(Parser)]
#[command(
    name = "thinair",
    version,
    about = "Mid-air ultrasonic haptics simulation for virtual cockpit controls"
)]
struct Cli {
    /// Stamp manifests with wall-clock time (off by default so outputs are
    /// byte-reproducible).
    #[arg(long, global = true)]
    with_timestamp: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Focus the array and write the pressure field over a plane.
    Field(FieldArgs),
    /// Print the focal gain (focused vs unfocused magnitude) at a point.
    Gain(GainArgs),
    /// Expand a named sensation into a focal-sample schedule (JSON-lines).
    Sensation(SensationArgs),
    /// Replay a hand trajectory through a cockpit profile and rig.
    Session(SessionArgs),
    /// Map how many devices reach each voxel of the interaction volume.
    Coverage(CoverageArgs),
    /// Estimate mean electrical power per device from drive schedules.
    Power(PowerArgs),
    /// Simulate the latency pipeline and check it against a level's budget.
    Latency(LatencyArgs),
    /// Audit a cockpit profile against FTD/FFS criteria.
    Compliance(ComplianceArgs),
}

#[derive(Args)]
struct FieldArgs {
    /// Array config: `default` or a JSON path.
    #[arg(long, default_value = "default")]
    array: String,
    /// Focus point `x,y,z` in meters.
    #[arg(long, value_parser = parse_vec3)]
    focus: Vec3Arg,
    /// Evaluation plane, e.g. `z=0.2`.
    #[arg(long, value_parser = parse_plane)]
    plane: PlaneArg,
    /// Plane side length in meters (centered on the plane axes).
    #[arg(long, default_value_t = 0.2)]
    extent: f64,
    /// Samples per axis.
    #[arg(long, default_value_t = 64)]
    n: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Output file; a `.manifest.json` is written alongside.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GainArgs {
    #[arg(long, default_value = "default")]
    array: String,
    #[arg(long, value_parser = parse_vec3)]
    focus: Vec3Arg,
    /// Optional output file (otherwise prints to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SensationArgs {
    /// Template name: dial, click, presence, or line.
    #[arg(long)]
    name: String,
    /// Parameter overrides, `key=value`, repeatable.
    #[arg(long = "param", value_parser = parse_key_value)]
    params: Vec<(String, f64)>,
    /// Hand pose: `canonical` or a trajectory CSV (first row is used).
    #[arg(long, default_value = "canonical")]
    pose: String,
    #[arg(long, default_value_t = 100_000)]
    duration_us: u64,
    #[arg(long, default_value_t = 40_000.0)]
    rate: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SessionArgs {
    /// Profile config: `a320` or a JSON path.
    #[arg(long, default_value = "a320")]
    profile: String,
    /// Rig config: `figure5` or a JSON path.
    #[arg(long, default_value = "figure5")]
    rig: String,
    /// Hand trajectory CSV: `demo` or a path.
    #[arg(long, default_value = "demo")]
    trajectory: String,
    #[arg(long, default_value_t = 40_000.0)]
    rate: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CoverageArgs {
    #[arg(long, default_value = "figure5")]
    rig: String,
    /// Voxel edge length in meters.
    #[arg(long, default_value_t = 0.01)]
    voxel: f64,
    /// Per-voxel CSV output.
    #[arg(long)]
    out: PathBuf,
    /// Optional covered-fraction summary (JSON).
    #[arg(long)]
    summary_out: Option<PathBuf>,
}

#[derive(Args)]
struct PowerArgs {
    #[arg(long, default_value = "figure5")]
    rig: String,
    /// Device schedules, `device_id=schedule.jsonl`, repeatable.
    #[arg(long = "schedule", value_parser = parse_assignment, required = true)]
    schedules: Vec<(String, String)>,
    /// Update rate the schedules were generated at.
    #[arg(long, default_value_t = 40_000.0)]
    rate: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LatencyArgs {
    /// Pipeline config: `default` or a JSON path.
    #[arg(long, default_value = "default")]
    pipeline: String,
    /// Focal distance in meters (sets the acoustic-transit stage).
    #[arg(long, default_value_t = 0.2)]
    distance_m: f64,
    #[arg(long, value_parser = parse_level)]
    level: SimLevel,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ComplianceArgs {
    #[arg(long, default_value = "a320")]
    profile: String,
    #[arg(long, value_parser = parse_level)]
    level: SimLevel,
    /// Measured end-to-end latency to fold into the report (µs).
    #[arg(long)]
    latency_total_us: Option<u64>,
    /// Report form: structured JSON or the green/amber/red text summary.
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    format: ReportFormat,
    /// Force ANSI colors in the text summary.
    #[arg(long)]
    color: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Pgm,
}

#[derive(Clone, Copy)]
struct Vec3Arg(f64, f64, f64);

impl Vec3Arg {
    fn vec(&self) -> Vec3 {
        Vec3::new(self.0, self.1, self.2)
    }
}

fn parse_vec3(s: &str) -> Result<Vec3Arg, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got \"{s}\""));
    }
    let mut v = [0.0; 3];
    for (i, p) in parts.iter().enumerate() {
        v[i] = p
            .trim()
            .parse::<f64>()
            .map_err(|_| format!("malformed coordinate \"{p}\""))?;
    }
    Ok(Vec3Arg(v[0], v[1], v[2]))
}

#[derive(Clone, Copy)]
struct PlaneArg {
    axis: char,
    value: f64,
}

fn parse_plane(s: &str) -> Result<PlaneArg, String> {
    let (axis, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected axis=value (e.g. z=0.2), got \"{s}\""))?;
    let axis = match axis.trim() {
        "x" => 'x',
        "y" => 'y',
        "z" => 'z',
        other => return Err(format!("unknown plane axis \"{other}\"")),
    };
    let value = value
        .trim()
        .parse::<f64>()
        .map_err(|_| format!("malformed plane offset \"{value}\""))?;
    Ok(PlaneArg { axis, value })
}

fn parse_key_value(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got \"{s}\""))?;
    let value = v
        .trim()
        .parse::<f64>()
        .map_err(|_| format!("malformed value \"{v}\""))?;
    Ok((k.trim().to_string(), value))
}

fn parse_assignment(s: &str) -> Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected device=path, got \"{s}\""))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn parse_level(s: &str) -> Result<SimLevel, String> {
    s.parse::<SimLevel>().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Field(args) => cmd_field(args, cli.with_timestamp),
        Command::Gain(args) => cmd_gain(args, cli.with_timestamp),
        Command::Sensation(args) => cmd_sensation(args, cli.with_timestamp),
        Command::Session(args) => cmd_session(args, cli.with_timestamp),
        Command::Coverage(args) => cmd_coverage(args, cli.with_timestamp),
        Command::Power(args) => cmd_power(args, cli.with_timestamp),
        Command::Latency(args) => cmd_latency(args, cli.with_timestamp),
        Command::Compliance(args) => cmd_compliance(args, cli.with_timestamp),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

type CmdResult = Result<(), String>;

fn stringify<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn load_array(value: &str) -> Result<(ResolvedAsset, thinair::acoustics::TransducerArray), String> {
    let asset = resolve(AssetKind::Array, value).map_err(stringify)?;
    let array = ArrayDocument::from_json(&asset.contents)
        .and_then(|d| d.build())
        .map_err(stringify)?;
    Ok((asset, array))
}

const ACOUSTIC_ASSUMPTIONS: [&str; 4] = [
    "pressure values are in arbitrary units (no absolute calibration)",
    "air absorption is not modeled; comparisons are relative",
    "a 1 mm distance floor guards the near-field spreading term",
    "piston directivity is zero behind the element face",
];

fn cmd_field(args: &FieldArgs, timestamp: bool) -> CmdResult {
    let (asset, array) = load_array(&args.array)?;
    if args.n == 0 {
        return Err("--n must be at least 1".into());
    }
    if !(args.extent > 0.0) {
        return Err("--extent must be positive".into());
    }

    let (axes, origin) = match args.plane.axis {
        'z' => (
            vec![Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)],
            Vec3::new(-args.extent / 2.0, -args.extent / 2.0, args.plane.value),
        ),
        'y' => (
            vec![Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 0.0, 1.0)],
            Vec3::new(-args.extent / 2.0, args.plane.value, -args.extent / 2.0),
        ),
        _ => (
            vec![Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, 0.0, 1.0)],
            Vec3::new(args.plane.value, -args.extent / 2.0, -args.extent / 2.0),
        ),
    };
    let spacing = if args.n > 1 {
        args.extent / (args.n - 1) as f64
    } else {
        args.extent
    };
    let grid = FieldGrid::new(origin, axes, vec![args.n, args.n], spacing).map_err(stringify)?;

    let pattern = solve_focus_phases(&array, args.focus.vec()).map_err(stringify)?;
    let samples = evaluate_pressure_grid(&array, &pattern, &grid).map_err(stringify)?;
    let bytes = match args.format {
        OutputFormat::Csv => write_field_csv(&samples).map_err(stringify)?,
        OutputFormat::Pgm => write_field_pgm(&samples, &grid).map_err(stringify)?,
    };
    fs::write(&args.out, bytes).map_err(stringify)?;

    RunManifest::new("field")
        .param("array", &args.array)
        .param("focus", format_vec3(args.focus.vec()))
        .param("plane", format!("{}={}", args.plane.axis, args.plane.value))
        .param("extent", args.extent)
        .param("n", args.n)
        .param(
            "format",
            match args.format {
                OutputFormat::Csv => "csv",
                OutputFormat::Pgm => "pgm",
            },
        )
        .input("array", &asset.source, asset.contents.as_bytes())
        .assumptions(&ACOUSTIC_ASSUMPTIONS)
        .with_timestamp(timestamp)
        .write_alongside(&args.out)
        .map_err(stringify)?;
    Ok(())
}

fn cmd_gain(args: &GainArgs, timestamp: bool) -> CmdResult {
    let (asset, array) = load_array(&args.array)?;
    let gain = focal_gain(&array, args.focus.vec()).map_err(stringify)?;
    let json = format!(
        "{}\n",
        serde_json::json!({ "focus_m": [args.focus.0, args.focus.1, args.focus.2], "gain": gain })
    );
    match &args.out {
        None => print!("{json}"),
        Some(path) => {
            fs::write(path, &json).map_err(stringify)?;
            RunManifest::new("gain")
                .param("array", &args.array)
                .param("focus", format_vec3(args.focus.vec()))
                .input("array", &asset.source, asset.contents.as_bytes())
                .assumptions(&ACOUSTIC_ASSUMPTIONS)
                .with_timestamp(timestamp)
                .write_alongside(path)
                .map_err(stringify)?;
        }
    }
    Ok(())
}

fn load_pose(value: &str) -> Result<(String, HandPose), String> {
    if value == "canonical" {
        return Ok(("canonical".into(), HandPose::canonical(0)));
    }
    let asset = resolve(AssetKind::Trajectory, value).map_err(stringify)?;
    let poses = parse_hand_trajectory(asset.contents.as_bytes()).map_err(stringify)?;
    let first = poses
        .into_iter()
        .next()
        .ok_or_else(|| "trajectory has no poses".to_string())?;
    Ok((asset.source, first.at_time(0)))
}

fn cmd_sensation(args: &SensationArgs, timestamp: bool) -> CmdResult {
    let (pose_source, pose) = load_pose(&args.pose)?;
    let library = SensationLibrary::with_builtins();
    let params: BTreeMap<String, f64> = args.params.iter().cloned().collect();
    let instance = library
        .instantiate(&args.name, &params, &pose)
        .map_err(stringify)?;
    let schedule = instance
        .schedule(args.duration_us, args.rate)
        .map_err(stringify)?;
    fs::write(&args.out, schedule.to_jsonl()).map_err(stringify)?;

    let mut manifest = RunManifest::new("sensation")
        .param("name", &args.name)
        .param("pose", &pose_source)
        .param("duration_us", args.duration_us)
        .param("rate", args.rate)
        .assumption("waveform defaults are library stand-ins; names and hand targets follow the reference bindings")
        .with_timestamp(timestamp);
    for (k, v) in &params {
        manifest = manifest.param(&format!("param.{k}"), v);
    }
    manifest.write_alongside(&args.out).map_err(stringify)?;
    Ok(())
}

fn cmd_session(args: &SessionArgs, timestamp: bool) -> CmdResult {
    let profile_asset = resolve(AssetKind::Profile, &args.profile).map_err(stringify)?;
    let rig_asset = resolve(AssetKind::Rig, &args.rig).map_err(stringify)?;
    let traj_asset = resolve(AssetKind::Trajectory, &args.trajectory).map_err(stringify)?;

    let library = SensationLibrary::with_builtins();
    let profile = ProfileDocument::from_json(&profile_asset.contents)
        .and_then(|d| d.build(&library))
        .map_err(stringify)?;
    let rig = RigDocument::from_json(&rig_asset.contents)
        .and_then(|d| d.build())
        .map_err(stringify)?;
    let trajectory = parse_hand_trajectory(traj_asset.contents.as_bytes()).map_err(stringify)?;

    let events = run_session(&profile, &rig, &trajectory, args.rate).map_err(stringify)?;
    fs::write(&args.out, events_to_jsonl(&events)).map_err(stringify)?;

    RunManifest::new("session")
        .param("profile", &args.profile)
        .param("rig", &args.rig)
        .param("trajectory", &args.trajectory)
        .param("rate", args.rate)
        .param("events", events.len())
        .input(
            "profile",
            &profile_asset.source,
            profile_asset.contents.as_bytes(),
        )
        .input("rig", &rig_asset.source, rig_asset.contents.as_bytes())
        .input(
            "trajectory",
            &traj_asset.source,
            traj_asset.contents.as_bytes(),
        )
        .assumptions(&[
            "poses are held between trajectory samples (zero-order hold)",
            "burst sensations retrigger on contact onset only",
            "one device drives each sample; unreached samples are logged under \"unreachable\"",
        ])
        .with_timestamp(timestamp)
        .write_alongside(&args.out)
        .map_err(stringify)?;
    Ok(())
}

fn cmd_coverage(args: &CoverageArgs, timestamp: bool) -> CmdResult {
    let rig_asset = resolve(AssetKind::Rig, &args.rig).map_err(stringify)?;
    let rig = RigDocument::from_json(&rig_asset.contents)
        .and_then(|d| d.build())
        .map_err(stringify)?;
    let map = coverage_map(&rig, args.voxel).map_err(stringify)?;

    let mut csv = String::from("x_mm,y_mm,z_mm,count\n");
    for (i, count) in map.counts().iter().enumerate() {
        let c = map.center(i);
        csv.push_str(&format!(
            "{:.3},{:.3},{:.3},{count}\n",
            c.x * 1000.0,
            c.y * 1000.0,
            c.z * 1000.0
        ));
    }
    fs::write(&args.out, csv).map_err(stringify)?;

    let assumptions = [
        "the 90-degree cone is read as the full apex angle (45-degree half-angle)",
        "reach boundaries are inclusive",
    ];
    RunManifest::new("coverage")
        .param("rig", &args.rig)
        .param("voxel", args.voxel)
        .input("rig", &rig_asset.source, rig_asset.contents.as_bytes())
        .assumptions(&assumptions)
        .with_timestamp(timestamp)
        .write_alongside(&args.out)
        .map_err(stringify)?;

    if let Some(summary_path) = &args.summary_out {
        let mut json = serde_json::to_string_pretty(&map.summary()).map_err(stringify)?;
        json.push('\n');
        fs::write(summary_path, json).map_err(stringify)?;
        RunManifest::new("coverage")
            .param("rig", &args.rig)
            .param("voxel", args.voxel)
            .input("rig", &rig_asset.source, rig_asset.contents.as_bytes())
            .assumptions(&assumptions)
            .with_timestamp(timestamp)
            .write_alongside(summary_path)
            .map_err(stringify)?;
    }
    Ok(())
}

fn cmd_power(args: &PowerArgs, timestamp: bool) -> CmdResult {
    let rig_asset = resolve(AssetKind::Rig, &args.rig).map_err(stringify)?;
    let rig = RigDocument::from_json(&rig_asset.contents)
        .and_then(|d| d.build())
        .map_err(stringify)?;

    let mut schedules = BTreeMap::new();
    let mut inputs: Vec<(String, String, Vec<u8>)> = Vec::new();
    for (device, path) in &args.schedules {
        let text = fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
        let schedule = Schedule::from_jsonl(&text, args.rate).map_err(stringify)?;
        schedules.insert(device.clone(), schedule);
        inputs.push((
            format!("schedule.{device}"),
            path.clone(),
            text.into_bytes(),
        ));
    }
    let watts = estimate_power(&rig, &schedules);
    let mut json = serde_json::to_string_pretty(&watts).map_err(stringify)?;
    json.push('\n');

    match &args.out {
        None => print!("{json}"),
        Some(path) => {
            fs::write(path, &json).map_err(stringify)?;
            let mut manifest = RunManifest::new("power")
                .param("rig", &args.rig)
                .param("rate", args.rate)
                .input("rig", &rig_asset.source, rig_asset.contents.as_bytes())
                .assumption("mean power is modeled as peak power times the mean squared envelope")
                .with_timestamp(timestamp);
            for (name, source, bytes) in &inputs {
                manifest = manifest.input(name, source, bytes);
            }
            manifest.write_alongside(path).map_err(stringify)?;
        }
    }
    Ok(())
}

fn cmd_latency(args: &LatencyArgs, timestamp: bool) -> CmdResult {
    let asset = resolve(AssetKind::Pipeline, &args.pipeline).map_err(stringify)?;
    let pipeline = PipelineDocument::from_json(&asset.contents)
        .and_then(|d| d.build())
        .map_err(stringify)?;
    let breakdown = simulate_latency(&pipeline, args.distance_m).map_err(stringify)?;
    let finding = check_latency_budget(breakdown.total_us, args.level);
    let mut json = serde_json::to_string_pretty(&serde_json::json!({
        "level": args.level,
        "breakdown": breakdown,
        "finding": finding,
    }))
    .map_err(stringify)?;
    json.push('\n');

    match &args.out {
        None => print!("{json}"),
        Some(path) => {
            fs::write(path, &json).map_err(stringify)?;
            RunManifest::new("latency")
                .param("pipeline", &args.pipeline)
                .param("distance_m", args.distance_m)
                .param("level", args.level)
                .input("pipeline", &asset.source, asset.contents.as_bytes())
                .assumption("stage delays are engineering estimates; acoustic transit is distance over the speed of sound")
                .with_timestamp(timestamp)
                .write_alongside(path)
                .map_err(stringify)?;
        }
    }
    Ok(())
}

fn cmd_compliance(args: &ComplianceArgs, timestamp: bool) -> CmdResult {
    let asset = resolve(AssetKind::Profile, &args.profile).map_err(stringify)?;
    let library = SensationLibrary::with_builtins();
    let profile = ProfileDocument::from_json(&asset.contents)
        .and_then(|d| d.build(&library))
        .map_err(stringify)?;
    let report = assess_compliance(&profile, args.level, args.latency_total_us);
    let rendered = match args.format {
        ReportFormat::Json => {
            let mut json = serde_json::to_string_pretty(&report).map_err(stringify)?;
            json.push('\n');
            json
        }
        // Files get plain text; --color forces ANSI (useful on stdout).
        ReportFormat::Text => report.text_summary(args.color && args.out.is_none()),
    };

    match &args.out {
        None => print!("{rendered}"),
        Some(path) => {
            fs::write(path, &rendered).map_err(stringify)?;
            let mut manifest = RunManifest::new("compliance")
                .param("profile", &args.profile)
                .param("level", args.level)
                .input("profile", &asset.source, asset.contents.as_bytes())
                .assumption("the rules engine covers only the encoded criteria; not a certification determination")
                .with_timestamp(timestamp);
            if let Some(total) = args.latency_total_us {
                manifest = manifest.param("latency_total_us", total);
            }
            manifest.write_alongside(path).map_err(stringify)?;
        }
    }
    Ok(())
}

fn format_vec3(v: Vec3) -> String {
    format!("{},{},{}", v.x, v.y, v.z)
}
