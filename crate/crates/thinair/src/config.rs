//! Versioned JSON configuration documents for arrays, rigs, cockpit
//! profiles, and latency pipelines, with factories for the bundled
//! examples.
//!
//! Documents are strict: unknown fields are rejected, `schema_version`
//! must be 1, and units are fixed per field (`*_m` meters, `*_hz` hertz,
//! `*_us` microseconds, `*_rad` radians, `*_w` watts). Building a document
//! validates it into the corresponding domain value.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acoustics::{
    AcousticsError, DirectivityMode, Transducer, TransducerArray, DEFAULT_CARRIER_HZ,
    DEFAULT_PISTON_RADIUS_M, DEFAULT_PITCH_M, DEFAULT_SPEED_OF_SOUND_MPS,
};
use crate::compliance::{LatencyPipeline, PipelineStage};
use crate::interaction::{
    CockpitProfile, ControlCategory, ControlWidget, InteractionVolume, LabelBinding, Panel,
    Physicality, WidgetKind,
};
use crate::math::{Aabb, Mat3, RigidTransform, Vec3};
use crate::rig::{
    DevicePose, DeviceSpec, RigConfig, RigDevice, RigError, DEFAULT_CONE_HALF_ANGLE_RAD,
    DEFAULT_MAX_RANGE_M, DEFAULT_PEAK_POWER_W,
};
use crate::sensations::{HandRegion, SensationLibrary};

/// The one schema version this build reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema_version {0}, expected {SCHEMA_VERSION}")]
    UnsupportedSchemaVersion(u32),
    #[error("invalid array document: {0}")]
    Acoustics(#[from] AcousticsError),
    #[error("invalid rig document: {0}")]
    Rig(#[from] RigError),
    #[error("invalid geometry: {0}")]
    Geometry(#[from] crate::math::GeometryError),
    #[error("profile validation failed:\n{}", .0.join("\n"))]
    ProfileValidation(Vec<String>),
    #[error("unknown builtin asset \"{0}\"")]
    UnknownBuiltin(String),
}

fn check_version(v: u32) -> Result<(), ConfigError> {
    if v != SCHEMA_VERSION {
        return Err(ConfigError::UnsupportedSchemaVersion(v));
    }
    Ok(())
}

fn vec3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

// ---------------------------------------------------------------------------
// Array documents

/// Grid layout: identical +z-facing elements centered on the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridLayout {
    pub nx: usize,
    pub ny: usize,
    pub pitch_m: f64,
    pub piston_radius_m: f64,
    pub drive_amplitude: f64,
}

/// One explicitly placed element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementDoc {
    pub position_m: [f64; 3],
    pub normal: [f64; 3],
    pub drive_amplitude: f64,
    pub piston_radius_m: f64,
}

/// Element layout: a regular grid or an explicit element list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutDoc {
    Grid(GridLayout),
    Elements(Vec<ElementDoc>),
}

/// Declarative transducer-array configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayDocument {
    pub schema_version: u32,
    pub carrier_frequency_hz: f64,
    pub speed_of_sound_mps: f64,
    pub directivity: DirectivityMode,
    pub layout: LayoutDoc,
}

impl ArrayDocument {
    /// The bundled default: 16x16 at 10.3 mm pitch. The true aperture and
    /// pitch of the reference hardware are not public; this layout is a
    /// documented stand-in.
    pub fn default_array() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            carrier_frequency_hz: DEFAULT_CARRIER_HZ,
            speed_of_sound_mps: DEFAULT_SPEED_OF_SOUND_MPS,
            directivity: DirectivityMode::Piston,
            layout: LayoutDoc::Grid(GridLayout {
                nx: 16,
                ny: 16,
                pitch_m: DEFAULT_PITCH_M,
                piston_radius_m: DEFAULT_PISTON_RADIUS_M,
                drive_amplitude: 1.0,
            }),
        }
    }

    pub fn from_json(json: &str) -> Result<Self, ConfigError> {
        let doc: Self = serde_json::from_str(json)?;
        check_version(doc.schema_version)?;
        Ok(doc)
    }

    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn build(&self) -> Result<TransducerArray, ConfigError> {
        check_version(self.schema_version)?;
        let array = match &self.layout {
            LayoutDoc::Grid(g) => TransducerArray::grid(
                g.nx,
                g.ny,
                g.pitch_m,
                g.piston_radius_m,
                g.drive_amplitude,
                self.carrier_frequency_hz,
                self.speed_of_sound_mps,
                self.directivity,
            )?,
            LayoutDoc::Elements(els) => {
                let elements = els
                    .iter()
                    .map(|e| {
                        Transducer::new(
                            vec3(e.position_m),
                            vec3(e.normal),
                            e.drive_amplitude,
                            e.piston_radius_m,
                        )
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                TransducerArray::new(
                    elements,
                    self.carrier_frequency_hz,
                    self.speed_of_sound_mps,
                    self.directivity,
                )?
            }
        };
        Ok(array)
    }
}

// ---------------------------------------------------------------------------
// Rig documents

/// Reference to an array: a builtin name or an inline document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrayRefDoc {
    /// Currently only `"default"`.
    Builtin(String),
    Inline(Box<ArrayDocument>),
}

impl ArrayRefDoc {
    fn build(&self) -> Result<TransducerArray, ConfigError> {
        match self {
            ArrayRefDoc::Builtin(name) if name == "default" => Ok(TransducerArray::default_16x16()),
            ArrayRefDoc::Builtin(other) => Err(ConfigError::UnknownBuiltin(other.clone())),
            ArrayRefDoc::Inline(doc) => doc.build(),
        }
    }
}

/// One device: envelope, array, and rigid pose (rotation rows + translation).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceDoc {
    pub id: String,
    pub array: ArrayRefDoc,
    pub max_range_m: f64,
    pub cone_half_angle_rad: f64,
    pub peak_power_w: f64,
    pub rotation: [[f64; 3]; 3],
    pub translation_m: [f64; 3],
}

/// Axis-aligned interaction volume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolumeDoc {
    pub min_m: [f64; 3],
    pub max_m: [f64; 3],
}

/// Declarative rig configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigDocument {
    pub schema_version: u32,
    pub devices: Vec<DeviceDoc>,
    pub volume: VolumeDoc,
}

impl RigDocument {
    /// The bundled four-device concept rig (see [`RigConfig::figure5`]).
    pub fn figure5() -> Self {
        let rig = RigConfig::figure5();
        Self {
            schema_version: SCHEMA_VERSION,
            devices: rig
                .devices()
                .iter()
                .map(|d| {
                    let r = d.pose.transform().rotation();
                    DeviceDoc {
                        id: d.pose.device_id().to_string(),
                        array: ArrayRefDoc::Builtin("default".into()),
                        max_range_m: DEFAULT_MAX_RANGE_M,
                        cone_half_angle_rad: DEFAULT_CONE_HALF_ANGLE_RAD,
                        peak_power_w: DEFAULT_PEAK_POWER_W,
                        rotation: [
                            [r[(0, 0)], r[(0, 1)], r[(0, 2)]],
                            [r[(1, 0)], r[(1, 1)], r[(1, 2)]],
                            [r[(2, 0)], r[(2, 1)], r[(2, 2)]],
                        ],
                        translation_m: [
                            d.pose.transform().translation_vec().x,
                            d.pose.transform().translation_vec().y,
                            d.pose.transform().translation_vec().z,
                        ],
                    }
                })
                .collect(),
            volume: VolumeDoc {
                min_m: [-0.25, -0.15, 0.15],
                max_m: [0.25, 0.15, 0.45],
            },
        }
    }

    pub fn from_json(json: &str) -> Result<Self, ConfigError> {
        let doc: Self = serde_json::from_str(json)?;
        check_version(doc.schema_version)?;
        Ok(doc)
    }

    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn build(&self) -> Result<RigConfig, ConfigError> {
        check_version(self.schema_version)?;
        let mut devices = Vec::with_capacity(self.devices.len());
        for d in &self.devices {
            let rotation = Mat3::new(
                d.rotation[0][0],
                d.rotation[0][1],
                d.rotation[0][2],
                d.rotation[1][0],
                d.rotation[1][1],
                d.rotation[1][2],
                d.rotation[2][0],
                d.rotation[2][1],
                d.rotation[2][2],
            );
            let transform = RigidTransform::new(rotation, vec3(d.translation_m))?;
            devices.push(RigDevice {
                spec: DeviceSpec::new(
                    d.array.build()?,
                    d.max_range_m,
                    d.cone_half_angle_rad,
                    d.peak_power_w,
                )?,
                pose: DevicePose::new(d.id.clone(), transform)?,
            });
        }
        let volume = Aabb::new(vec3(self.volume.min_m), vec3(self.volume.max_m));
        Ok(RigConfig::new(devices, volume)?)
    }
}

// ---------------------------------------------------------------------------
// Profile documents

/// Widget contact volume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeShapeDoc {
    Sphere { center_m: [f64; 3], radius_m: f64 },
    Box { min_m: [f64; 3], max_m: [f64; 3] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelDoc {
    pub number: u32,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WidgetDoc {
    pub id: String,
    pub kind: WidgetKind,
    pub category: ControlCategory,
    pub panel: u32,
    pub volume: VolumeShapeDoc,
    pub physicality: Physicality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelDoc {
    pub sensation: String,
    pub targets: Vec<HandRegion>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

/// Declarative cockpit profile: aircraft, panels, widgets, haptic labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDocument {
    pub schema_version: u32,
    pub aircraft: String,
    pub panels: Vec<PanelDoc>,
    pub widgets: Vec<WidgetDoc>,
    pub labels: BTreeMap<String, LabelDoc>,
}

impl ProfileDocument {
    /// The bundled simplified A320 deck: rotary dials (panel 1),
    /// pushbuttons (panel 2), the landing gear lever (panel 3), and the
    /// throttle (panel 4), with the reference sensation bindings.
    pub fn a320_example() -> Self {
        let sphere = |c: [f64; 3], r: f64| VolumeShapeDoc::Sphere {
            center_m: c,
            radius_m: r,
        };
        let boxv = |min: [f64; 3], max: [f64; 3]| VolumeShapeDoc::Box {
            min_m: min,
            max_m: max,
        };
        let widget =
            |id: &str, kind: WidgetKind, cat: ControlCategory, panel: u32, vol| WidgetDoc {
                id: id.into(),
                kind,
                category: cat,
                panel,
                volume: vol,
                physicality: Physicality::Virtual,
            };
        let label = |sensation: &str, targets: &[HandRegion]| LabelDoc {
            sensation: sensation.into(),
            targets: targets.to_vec(),
            params: BTreeMap::new(),
        };
        use ControlCategory::*;
        use HandRegion::*;
        use WidgetKind::*;
        Self {
            schema_version: SCHEMA_VERSION,
            aircraft: "A320 (simplified)".into(),
            panels: vec![
                PanelDoc {
                    number: 1,
                    name: "overhead rotary panel".into(),
                },
                PanelDoc {
                    number: 2,
                    name: "FCU pushbutton panel".into(),
                },
                PanelDoc {
                    number: 3,
                    name: "landing gear panel".into(),
                },
                PanelDoc {
                    number: 4,
                    name: "throttle quadrant".into(),
                },
            ],
            widgets: vec![
                widget(
                    "ovhd_dial_a",
                    RotaryDial,
                    SystemsControl,
                    1,
                    sphere([-0.15, 0.05, 0.30], 0.03),
                ),
                widget(
                    "ovhd_dial_b",
                    RotaryDial,
                    SystemsControl,
                    1,
                    sphere([-0.15, -0.05, 0.30], 0.03),
                ),
                widget(
                    "fcu_btn_a",
                    PushButton,
                    SystemsControl,
                    2,
                    sphere([0.0, 0.05, 0.30], 0.025),
                ),
                widget(
                    "fcu_btn_b",
                    PushButton,
                    SystemsControl,
                    2,
                    sphere([0.0, -0.05, 0.30], 0.025),
                ),
                widget(
                    "gear_lever",
                    LandingGearLever,
                    SecondaryFlightControl,
                    3,
                    boxv([0.12, 0.05, 0.24], [0.18, 0.11, 0.34]),
                ),
                widget(
                    "throttle",
                    ThrottleLever,
                    SecondaryFlightControl,
                    4,
                    boxv([0.12, -0.11, 0.24], [0.18, -0.05, 0.34]),
                ),
            ],
            labels: BTreeMap::from([
                (
                    "ovhd_dial_a".to_string(),
                    label("dial", &[ThumbTip, IndexTip]),
                ),
                (
                    "ovhd_dial_b".to_string(),
                    label("dial", &[ThumbTip, IndexTip]),
                ),
                ("fcu_btn_a".to_string(), label("click", &[IndexTip])),
                ("fcu_btn_b".to_string(), label("click", &[IndexTip])),
                (
                    "gear_lever".to_string(),
                    label("presence", &[ThumbTip, IndexTip, MiddleTip]),
                ),
                ("throttle".to_string(), label("line", &[PalmCenter])),
            ]),
        }
    }

    pub fn from_json(json: &str) -> Result<Self, ConfigError> {
        let doc: Self = serde_json::from_str(json)?;
        check_version(doc.schema_version)?;
        Ok(doc)
    }

    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    /// Validates everything at once and reports all problems together.
    pub fn build(&self, library: &SensationLibrary) -> Result<CockpitProfile, ConfigError> {
        check_version(self.schema_version)?;
        let mut problems = Vec::new();

        let mut panel_numbers = std::collections::BTreeSet::new();
        for p in &self.panels {
            if !panel_numbers.insert(p.number) {
                problems.push(format!("duplicate panel number {}", p.number));
            }
        }

        let mut widget_ids = std::collections::BTreeSet::new();
        for w in &self.widgets {
            if !widget_ids.insert(w.id.clone()) {
                problems.push(format!("duplicate widget id \"{}\"", w.id));
            }
            if !panel_numbers.contains(&w.panel) {
                problems.push(format!(
                    "widget \"{}\" references unknown panel {}",
                    w.id, w.panel
                ));
            }
            match &w.volume {
                VolumeShapeDoc::Sphere { radius_m, .. } => {
                    if !(*radius_m > 0.0) {
                        problems.push(format!(
                            "widget \"{}\" sphere radius {} must be > 0",
                            w.id, radius_m
                        ));
                    }
                }
                VolumeShapeDoc::Box { min_m, max_m } => {
                    if !(min_m[0] < max_m[0] && min_m[1] < max_m[1] && min_m[2] < max_m[2]) {
                        problems.push(format!("widget \"{}\" box has non-positive extent", w.id));
                    }
                }
            }
            if w.physicality == Physicality::Virtual && !self.labels.contains_key(&w.id) {
                problems.push(format!("virtual widget \"{}\" has no haptic label", w.id));
            }
        }

        for (control, l) in &self.labels {
            if !widget_ids.contains(control) {
                problems.push(format!("label references unknown control \"{control}\""));
            }
            if library.template(&l.sensation).is_none() {
                problems.push(format!(
                    "label for \"{control}\" references unknown sensation \"{}\"",
                    l.sensation
                ));
            }
            if l.targets.is_empty() {
                problems.push(format!("label for \"{control}\" has no target regions"));
            }
        }

        if !problems.is_empty() {
            return Err(ConfigError::ProfileValidation(problems));
        }

        Ok(CockpitProfile {
            aircraft: self.aircraft.clone(),
            panels: self
                .panels
                .iter()
                .map(|p| Panel {
                    number: p.number,
                    name: p.name.clone(),
                })
                .collect(),
            widgets: self
                .widgets
                .iter()
                .map(|w| ControlWidget {
                    id: w.id.clone(),
                    kind: w.kind,
                    category: w.category,
                    panel: w.panel,
                    volume: match &w.volume {
                        VolumeShapeDoc::Sphere { center_m, radius_m } => {
                            InteractionVolume::Sphere {
                                center: vec3(*center_m),
                                radius: *radius_m,
                            }
                        }
                        VolumeShapeDoc::Box { min_m, max_m } => {
                            InteractionVolume::Box(Aabb::new(vec3(*min_m), vec3(*max_m)))
                        }
                    },
                    physicality: w.physicality,
                })
                .collect(),
            labels: self
                .labels
                .iter()
                .map(|(k, l)| {
                    (
                        k.clone(),
                        LabelBinding {
                            sensation: l.sensation.clone(),
                            targets: l.targets.iter().copied().collect(),
                            params: l.params.clone(),
                        },
                    )
                })
                .collect(),
        })
    }
}

// ---------------------------------------------------------------------------
// Pipeline documents

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageDoc {
    pub name: String,
    pub delay_us: u64,
}

/// Declarative latency pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineDocument {
    pub schema_version: u32,
    pub stages: Vec<StageDoc>,
    pub speed_of_sound_mps: f64,
}

impl PipelineDocument {
    pub fn default_pipeline() -> Self {
        let p = LatencyPipeline::default_pipeline();
        Self {
            schema_version: SCHEMA_VERSION,
            stages: p
                .stages()
                .iter()
                .map(|s| StageDoc {
                    name: s.name.clone(),
                    delay_us: s.delay_us,
                })
                .collect(),
            speed_of_sound_mps: p.speed_of_sound_mps(),
        }
    }

    pub fn from_json(json: &str) -> Result<Self, ConfigError> {
        let doc: Self = serde_json::from_str(json)?;
        check_version(doc.schema_version)?;
        Ok(doc)
    }

    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn build(&self) -> Result<LatencyPipeline, ConfigError> {
        check_version(self.schema_version)?;
        Ok(LatencyPipeline::new(
            self.stages
                .iter()
                .map(|s| PipelineStage {
                    name: s.name.clone(),
                    delay_us: s.delay_us,
                })
                .collect(),
            self.speed_of_sound_mps,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn array_document_round_trip() {
        let doc = ArrayDocument::default_array();
        let json = doc.to_json_pretty();
        let back = ArrayDocument::from_json(&json).unwrap();
        assert_eq!(doc, back);
        assert_eq!(back.build().unwrap(), TransducerArray::default_16x16());
    }

    #[test]
    fn rig_document_round_trip_matches_factory() {
        let doc = RigDocument::figure5();
        let json = doc.to_json_pretty();
        let back = RigDocument::from_json(&json).unwrap();
        assert_eq!(doc, back);
        assert_eq!(back.build().unwrap(), RigConfig::figure5());
    }

    #[test]
    fn profile_document_round_trip_matches_factory() {
        let doc = ProfileDocument::a320_example();
        let json = doc.to_json_pretty();
        let back = ProfileDocument::from_json(&json).unwrap();
        assert_eq!(doc, back);
        let lib = SensationLibrary::with_builtins();
        assert_eq!(back.build(&lib).unwrap(), CockpitProfile::example_a320());
    }

    #[test]
    fn pipeline_document_round_trip() {
        let doc = PipelineDocument::default_pipeline();
        let back = PipelineDocument::from_json(&doc.to_json_pretty()).unwrap();
        assert_eq!(doc, back);
        assert_eq!(back.build().unwrap(), LatencyPipeline::default_pipeline());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let mut v: serde_json::Value =
            serde_json::from_str(&ArrayDocument::default_array().to_json_pretty()).unwrap();
        v["surprise"] = serde_json::json!(1);
        assert!(ArrayDocument::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn wrong_schema_version_is_rejected() {
        let mut v: serde_json::Value =
            serde_json::from_str(&ArrayDocument::default_array().to_json_pretty()).unwrap();
        v["schema_version"] = serde_json::json!(2);
        assert!(matches!(
            ArrayDocument::from_json(&v.to_string()),
            Err(ConfigError::UnsupportedSchemaVersion(2))
        ));
    }

    #[test]
    fn a320_profile_loads_with_reference_bindings() {
        let lib = SensationLibrary::with_builtins();
        let profile = ProfileDocument::a320_example().build(&lib).unwrap();
        assert_eq!(profile.panels.len(), 4);
        assert_eq!(profile.labels["ovhd_dial_a"].sensation, "dial");
        assert_eq!(profile.labels["fcu_btn_a"].sensation, "click");
        assert_eq!(profile.labels["gear_lever"].sensation, "presence");
        assert_eq!(profile.labels["throttle"].sensation, "line");
    }

    #[test]
    fn profile_validation_is_itemized() {
        let mut doc = ProfileDocument::a320_example();
        doc.labels.remove("fcu_btn_a");
        doc.widgets.push(doc.widgets[0].clone()); // duplicate id
        doc.labels.insert(
            "ghost".into(),
            LabelDoc {
                sensation: "warp".into(),
                targets: vec![],
                params: BTreeMap::new(),
            },
        );
        let lib = SensationLibrary::with_builtins();
        match doc.build(&lib) {
            Err(ConfigError::ProfileValidation(problems)) => {
                assert!(problems.iter().any(|p| p.contains("fcu_btn_a")));
                assert!(problems.iter().any(|p| p.contains("duplicate widget id")));
                assert!(problems.iter().any(|p| p.contains("unknown control")));
                assert!(problems.iter().any(|p| p.contains("unknown sensation")));
                assert!(problems.iter().any(|p| p.contains("no target regions")));
            }
            other => panic!("expected itemized validation failure, got {other:?}"),
        }
    }
}
