//! The cockpit runtime: hand poses, control widgets and haptic labels,
//! contact detection, the activation rule, and the deterministic session
//! engine that turns a hand trajectory into a haptic event log.
//!
//! Sessions hold each pose between trajectory samples (zero-order hold),
//! re-anchor active sensations every frame so they track the hand, and
//! retrigger burst sensations only on contact onset. Samples that no device
//! reaches are logged under the reserved device id rather than dropped, so
//! coverage failures stay visible.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{self, ConfigError};
use crate::math::{Aabb, RigidTransform, Vec3};
use crate::modulation::{snap_to_grid_mm, MAX_UPDATE_RATE_HZ};
use crate::rig::{select_device, RigConfig, UNREACHABLE_DEVICE_ID};
use crate::sensations::{HandRegion, SensationError, SensationInstance, SensationLibrary};

#[derive(Debug, Error)]
pub enum InteractionError {
    #[error("invalid hand pose: {0}")]
    InvalidPose(String),
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error("trajectory timestamps are not strictly increasing at index {0}")]
    NonMonotonicTrajectory(usize),
    #[error("update rate {0} Hz exceeds the 40 kHz cap")]
    RateCap(f64),
    #[error("update rate {0} Hz must be positive and finite")]
    InvalidRate(f64),
    #[error("virtual control \"{0}\" has no haptic label")]
    MissingLabel(String),
    #[error(transparent)]
    Sensation(#[from] SensationError),
}

/// A tracked hand at one instant: palm frame plus five fingertips.
#[derive(Debug, Clone, PartialEq)]
pub struct HandPose {
    t_us: u64,
    palm_center: Vec3,
    palm_normal: Vec3,
    lateral_axis: Vec3,
    thumb_tip: Vec3,
    index_tip: Vec3,
    middle_tip: Vec3,
    ring_tip: Vec3,
    little_tip: Vec3,
}

impl HandPose {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        t_us: u64,
        palm_center: Vec3,
        palm_normal: Vec3,
        lateral_axis: Vec3,
        thumb_tip: Vec3,
        index_tip: Vec3,
        middle_tip: Vec3,
        ring_tip: Vec3,
        little_tip: Vec3,
    ) -> Result<Self, InteractionError> {
        if (palm_normal.norm() - 1.0).abs() > 1e-6 {
            return Err(InteractionError::InvalidPose(format!(
                "palm normal has length {}",
                palm_normal.norm()
            )));
        }
        if (lateral_axis.norm() - 1.0).abs() > 1e-6 {
            return Err(InteractionError::InvalidPose(format!(
                "lateral axis has length {}",
                lateral_axis.norm()
            )));
        }
        if palm_normal.dot(&lateral_axis).abs() > 1e-6 {
            return Err(InteractionError::InvalidPose(format!(
                "palm normal and lateral axis are not orthogonal (dot = {})",
                palm_normal.dot(&lateral_axis)
            )));
        }
        Ok(Self {
            t_us,
            palm_center,
            palm_normal,
            lateral_axis,
            thumb_tip,
            index_tip,
            middle_tip,
            ring_tip,
            little_tip,
        })
    }

    /// A fixed, well-formed pose hovering palm-down over the rig center;
    /// handy for tests and CLI demos.
    pub fn canonical(t_us: u64) -> Self {
        Self::builder(t_us)
            .build()
            .expect("canonical pose is valid")
    }

    /// Builder seeded with the canonical pose geometry.
    pub fn builder(t_us: u64) -> HandPoseBuilder {
        HandPoseBuilder {
            t_us,
            palm_center: Vec3::new(0.0, 0.0, 0.30),
            palm_normal: Vec3::new(0.0, 0.0, -1.0),
            lateral_axis: Vec3::new(1.0, 0.0, 0.0),
            thumb_tip: Vec3::new(-0.045, 0.025, 0.295),
            index_tip: Vec3::new(-0.01, 0.055, 0.30),
            middle_tip: Vec3::new(0.005, 0.06, 0.30),
            ring_tip: Vec3::new(0.022, 0.055, 0.30),
            little_tip: Vec3::new(0.04, 0.045, 0.295),
        }
    }

    pub fn t_us(&self) -> u64 {
        self.t_us
    }

    pub fn palm_center(&self) -> Vec3 {
        self.palm_center
    }

    pub fn palm_normal(&self) -> Vec3 {
        self.palm_normal
    }

    pub fn lateral_axis(&self) -> Vec3 {
        self.lateral_axis
    }

    /// Stored landmark position for a hand region.
    pub fn landmark(&self, region: HandRegion) -> Vec3 {
        match region {
            HandRegion::ThumbTip => self.thumb_tip,
            HandRegion::IndexTip => self.index_tip,
            HandRegion::MiddleTip => self.middle_tip,
            HandRegion::RingTip => self.ring_tip,
            HandRegion::LittleTip => self.little_tip,
            HandRegion::PalmCenter => self.palm_center,
        }
    }

    /// The pose moved rigidly (axes rotate, landmarks map through `t`).
    pub fn transformed(&self, t: &RigidTransform) -> Self {
        Self {
            t_us: self.t_us,
            palm_center: t.apply(self.palm_center),
            palm_normal: t.rotate(self.palm_normal),
            lateral_axis: t.rotate(self.lateral_axis),
            thumb_tip: t.apply(self.thumb_tip),
            index_tip: t.apply(self.index_tip),
            middle_tip: t.apply(self.middle_tip),
            ring_tip: t.apply(self.ring_tip),
            little_tip: t.apply(self.little_tip),
        }
    }

    /// Same pose at a different timestamp.
    pub fn at_time(&self, t_us: u64) -> Self {
        let mut p = self.clone();
        p.t_us = t_us;
        p
    }
}

/// Builder for hand poses; unset landmarks keep the canonical geometry.
#[derive(Debug, Clone)]
pub struct HandPoseBuilder {
    t_us: u64,
    palm_center: Vec3,
    palm_normal: Vec3,
    lateral_axis: Vec3,
    thumb_tip: Vec3,
    index_tip: Vec3,
    middle_tip: Vec3,
    ring_tip: Vec3,
    little_tip: Vec3,
}

impl HandPoseBuilder {
    pub fn palm_center(mut self, v: Vec3) -> Self {
        self.palm_center = v;
        self
    }

    pub fn palm_normal(mut self, v: Vec3) -> Self {
        self.palm_normal = v;
        self
    }

    pub fn lateral_axis(mut self, v: Vec3) -> Self {
        self.lateral_axis = v;
        self
    }

    pub fn thumb_tip(mut self, v: Vec3) -> Self {
        self.thumb_tip = v;
        self
    }

    pub fn index_tip(mut self, v: Vec3) -> Self {
        self.index_tip = v;
        self
    }

    pub fn middle_tip(mut self, v: Vec3) -> Self {
        self.middle_tip = v;
        self
    }

    pub fn ring_tip(mut self, v: Vec3) -> Self {
        self.ring_tip = v;
        self
    }

    pub fn little_tip(mut self, v: Vec3) -> Self {
        self.little_tip = v;
        self
    }

    /// Translates the whole pose (palm and all fingertips) by `offset`.
    pub fn shifted(mut self, offset: Vec3) -> Self {
        self.palm_center += offset;
        self.thumb_tip += offset;
        self.index_tip += offset;
        self.middle_tip += offset;
        self.ring_tip += offset;
        self.little_tip += offset;
        self
    }

    pub fn build(self) -> Result<HandPose, InteractionError> {
        HandPose::new(
            self.t_us,
            self.palm_center,
            self.palm_normal,
            self.lateral_axis,
            self.thumb_tip,
            self.index_tip,
            self.middle_tip,
            self.ring_tip,
            self.little_tip,
        )
    }
}

/// What a control physically is in the simulated deck.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidgetKind {
    RotaryDial,
    PushButton,
    ToggleSwitch,
    LandingGearLever,
    ThrottleLever,
    StickOrRudder,
    Other,
}

/// Certification-relevant control category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlCategory {
    PrimaryFlightControl,
    SecondaryFlightControl,
    SystemsControl,
}

/// Whether the control is rendered in mid-air or is a physical prop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Physicality {
    Virtual,
    Physical,
}

/// Contact volume of a widget; boundaries are inclusive.
#[derive(Debug, Clone, PartialEq)]
pub enum InteractionVolume {
    Sphere { center: Vec3, radius: f64 },
    Box(Aabb),
}

impl InteractionVolume {
    pub fn contains(&self, p: Vec3) -> bool {
        match self {
            InteractionVolume::Sphere { center, radius } => (p - center).norm() <= *radius,
            InteractionVolume::Box(aabb) => aabb.contains(p),
        }
    }

    /// Rigidly transformed volume. Boxes become the AABB of their
    /// transformed corners, which is exact for axis-permuting rotations.
    pub fn transformed(&self, t: &RigidTransform) -> Self {
        match self {
            InteractionVolume::Sphere { center, radius } => InteractionVolume::Sphere {
                center: t.apply(*center),
                radius: *radius,
            },
            InteractionVolume::Box(aabb) => {
                let mut min = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
                let mut max = -min;
                for &x in &[aabb.min.x, aabb.max.x] {
                    for &y in &[aabb.min.y, aabb.max.y] {
                        for &z in &[aabb.min.z, aabb.max.z] {
                            let p = t.apply(Vec3::new(x, y, z));
                            min = min.inf(&p);
                            max = max.sup(&p);
                        }
                    }
                }
                InteractionVolume::Box(Aabb::new(min, max))
            }
        }
    }
}

/// One cockpit control.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlWidget {
    pub id: String,
    pub kind: WidgetKind,
    pub category: ControlCategory,
    pub panel: u32,
    pub volume: InteractionVolume,
    pub physicality: Physicality,
}

impl ControlWidget {
    pub fn is_virtual(&self) -> bool {
        self.physicality == Physicality::Virtual
    }
}

/// Haptic label: which sensation a control renders and where on the hand.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelBinding {
    pub sensation: String,
    pub targets: BTreeSet<HandRegion>,
    pub params: BTreeMap<String, f64>,
}

/// A named cockpit panel.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub number: u32,
    pub name: String,
}

/// An aircraft's interactive deck: panels, widgets, and labels.
#[derive(Debug, Clone, PartialEq)]
pub struct CockpitProfile {
    pub aircraft: String,
    pub panels: Vec<Panel>,
    pub widgets: Vec<ControlWidget>,
    pub labels: BTreeMap<String, LabelBinding>,
}

impl CockpitProfile {
    pub fn widget(&self, id: &str) -> Option<&ControlWidget> {
        self.widgets.iter().find(|w| w.id == id)
    }

    /// The bundled simplified A320 example profile.
    pub fn example_a320() -> Self {
        config::ProfileDocument::a320_example()
            .build(&SensationLibrary::with_builtins())
            .expect("bundled profile is valid")
    }

    /// The profile moved rigidly (widget volumes transform).
    pub fn transformed(&self, t: &RigidTransform) -> Self {
        Self {
            aircraft: self.aircraft.clone(),
            panels: self.panels.clone(),
            widgets: self
                .widgets
                .iter()
                .map(|w| ControlWidget {
                    id: w.id.clone(),
                    kind: w.kind,
                    category: w.category,
                    panel: w.panel,
                    volume: w.volume.transformed(t),
                    physicality: w.physicality,
                })
                .collect(),
            labels: self.labels.clone(),
        }
    }
}

/// Parses and validates a profile JSON document.
pub fn load_profile(json: &str, library: &SensationLibrary) -> Result<CockpitProfile, ConfigError> {
    config::ProfileDocument::from_json(json)?.build(library)
}

/// One emitted drive sample: snapped position on the 4 mm lattice (integer
/// millimeters), attributed to a device, sensation, and control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HapticEvent {
    pub t_us: u64,
    pub device: String,
    pub x_mm: i64,
    pub y_mm: i64,
    pub z_mm: i64,
    pub envelope: f64,
    pub sensation: String,
    pub control: String,
}

/// Serializes events as JSON-lines, one event per line, byte-stable for
/// identical inputs.
pub fn events_to_jsonl(events: &[HapticEvent]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&serde_json::to_string(e).expect("event serializes"));
        out.push('\n');
    }
    out
}

/// Hand regions touching each widget: a region is in contact when its
/// landmark lies inside the widget's interaction volume (inclusive).
/// Physical widgets are detected too; activation filters them out.
pub fn detect_contacts(
    hand: &HandPose,
    profile: &CockpitProfile,
) -> BTreeMap<String, BTreeSet<HandRegion>> {
    let mut contacts = BTreeMap::new();
    for w in &profile.widgets {
        let mut regions = BTreeSet::new();
        for r in HandRegion::ALL {
            if w.volume.contains(hand.landmark(r)) {
                regions.insert(r);
            }
        }
        if !regions.is_empty() {
            contacts.insert(w.id.clone(), regions);
        }
    }
    contacts
}

/// A sensation running against a specific control.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveSensation {
    pub control: String,
    pub instance: SensationInstance,
}

/// Exactly one sensation instance per contacted, labeled, virtual control,
/// anchored via the label's target regions. Physical controls produce
/// nothing; a contacted virtual control without a label is a
/// profile-integrity error.
pub fn activate(
    contacts: &BTreeMap<String, BTreeSet<HandRegion>>,
    profile: &CockpitProfile,
    library: &SensationLibrary,
    hand: &HandPose,
) -> Result<Vec<ActiveSensation>, InteractionError> {
    let mut out = Vec::new();
    for control_id in contacts.keys() {
        let Some(widget) = profile.widget(control_id) else {
            continue;
        };
        if !widget.is_virtual() {
            continue;
        }
        let label = profile
            .labels
            .get(control_id)
            .ok_or_else(|| InteractionError::MissingLabel(control_id.clone()))?;
        let instance =
            library.instantiate_for(&label.sensation, &label.params, &label.targets, hand)?;
        out.push(ActiveSensation {
            control: control_id.clone(),
            instance,
        });
    }
    Ok(out)
}

struct ActiveDrive {
    onset_us: u64,
    instance: SensationInstance,
}

/// Stateful session engine. [`run_session`] drives it over a whole
/// trajectory; [`Session::advance`] steps one held pose at a time, and
/// [`Session::switch_profile`] swaps aircraft with no residual sensations.
pub struct Session {
    profile: CockpitProfile,
    rig: RigConfig,
    library: SensationLibrary,
    spacing_us: u64,
    active: BTreeMap<String, ActiveDrive>,
    next_tick_us: Option<u64>,
}

impl Session {
    pub fn new(
        profile: CockpitProfile,
        rig: RigConfig,
        update_rate_hz: f64,
    ) -> Result<Self, InteractionError> {
        if !(update_rate_hz > 0.0) || !update_rate_hz.is_finite() {
            return Err(InteractionError::InvalidRate(update_rate_hz));
        }
        if update_rate_hz > MAX_UPDATE_RATE_HZ {
            return Err(InteractionError::RateCap(update_rate_hz));
        }
        Ok(Self {
            profile,
            rig,
            library: SensationLibrary::with_builtins(),
            spacing_us: (1e6 / update_rate_hz).round() as u64,
            active: BTreeMap::new(),
            next_tick_us: None,
        })
    }

    /// Replaces the sensation library (for rigs using custom templates).
    pub fn with_library(mut self, library: SensationLibrary) -> Self {
        self.library = library;
        self
    }

    pub fn spacing_us(&self) -> u64 {
        self.spacing_us
    }

    /// Swaps the cockpit profile. Takes effect at the next pose frame; all
    /// active sensations stop immediately.
    pub fn switch_profile(&mut self, profile: CockpitProfile) {
        self.profile = profile;
        self.active.clear();
    }

    /// Processes one pose held for `hold_us`, emitting events for every
    /// haptic tick in `[pose.t, pose.t + hold_us)`.
    pub fn advance(
        &mut self,
        pose: &HandPose,
        hold_us: u64,
    ) -> Result<Vec<HapticEvent>, InteractionError> {
        let frame_start = pose.t_us();
        let frame_end = frame_start + hold_us;
        let mut tick = match self.next_tick_us {
            Some(t) => t,
            None => frame_start,
        };

        let contacts = detect_contacts(pose, &self.profile);

        // Drop sensations whose contact ended.
        self.active
            .retain(|control, _| contacts.contains_key(control));

        // Start or re-anchor sensations for this frame's contacts.
        let activations = activate(&contacts, &self.profile, &self.library, pose)?;
        let first_tick_of_frame = tick.max(frame_start);
        for a in activations {
            match self.active.get_mut(&a.control) {
                Some(drive) => drive.instance = a.instance,
                None => {
                    self.active.insert(
                        a.control,
                        ActiveDrive {
                            onset_us: first_tick_of_frame,
                            instance: a.instance,
                        },
                    );
                }
            }
        }

        let mut events = Vec::new();
        while tick < frame_end {
            for (control, drive) in &self.active {
                let local_t = tick - drive.onset_us;
                if let Some(burst) = drive.instance.burst_us {
                    if local_t >= burst {
                        continue;
                    }
                }
                let (position, envelope) = drive.instance.scheme.sample_at(local_t);
                let device = select_device(&self.rig, position)
                    .unwrap_or(UNREACHABLE_DEVICE_ID)
                    .to_string();
                let [x_mm, y_mm, z_mm] = snap_to_grid_mm(position);
                events.push(HapticEvent {
                    t_us: tick,
                    device,
                    x_mm,
                    y_mm,
                    z_mm,
                    envelope,
                    sensation: drive.instance.template.clone(),
                    control: control.clone(),
                });
            }
            tick += self.spacing_us;
        }
        self.next_tick_us = Some(tick);
        Ok(events)
    }
}

/// Replays a hand trajectory through a cockpit and rig, producing the
/// ordered haptic event log. Deterministic: identical inputs give
/// byte-identical serialized logs.
///
/// Poses are held until the next trajectory sample; the final pose is held
/// for the preceding interval (or one tick for a single-pose trajectory).
pub fn run_session(
    profile: &CockpitProfile,
    rig: &RigConfig,
    trajectory: &[HandPose],
    update_rate_hz: f64,
) -> Result<Vec<HapticEvent>, InteractionError> {
    if trajectory.is_empty() {
        return Err(InteractionError::EmptyTrajectory);
    }
    for (i, pair) in trajectory.windows(2).enumerate() {
        if pair[1].t_us() <= pair[0].t_us() {
            return Err(InteractionError::NonMonotonicTrajectory(i + 1));
        }
    }
    let mut session = Session::new(profile.clone(), rig.clone(), update_rate_hz)?;
    let mut events = Vec::new();
    for (i, pose) in trajectory.iter().enumerate() {
        let hold = if i + 1 < trajectory.len() {
            trajectory[i + 1].t_us() - pose.t_us()
        } else if trajectory.len() >= 2 {
            pose.t_us() - trajectory[i - 1].t_us()
        } else {
            session.spacing_us()
        };
        events.extend(session.advance(pose, hold)?);
    }
    events.sort_by(|a, b| (a.t_us, &a.device, &a.control).cmp(&(b.t_us, &b.device, &b.control)));
    Ok(events)
}

/// Synthetic 90 Hz demo trajectory through the bundled A320 profile: the
/// hand reaches a pushbutton, a rotary dial, the gear lever, and the
/// throttle in turn, then withdraws. Used by tests and the bundled CSV
/// asset.
pub fn demo_trajectory(duration_us: u64, rate_hz: f64) -> Vec<HandPose> {
    // Palm waypoints (seconds -> position); segments in between are linear.
    // Held positions sit a fraction of a millimeter off the widget centers,
    // at coordinates incommensurable with half-lattice ties, so no focal
    // sample lands exactly between two 4 mm lattice points.
    let waypoints: [(f64, Vec3); 8] = [
        (0.0, Vec3::new(0.0, 0.0, 0.42)),
        (0.8, Vec3::new(0.01033, -0.00487, 0.30031)), // index on pushbutton A
        (1.3, Vec3::new(0.01033, -0.00487, 0.30031)),
        (1.7, Vec3::new(-0.13967, 0.00513, 0.30491)), // index on dial A
        (2.2, Vec3::new(-0.13967, 0.00513, 0.30491)),
        (2.6, Vec3::new(0.16033, 0.00013, 0.29033)), // index in gear lever box
        (3.5, Vec3::new(0.16033, -0.12987, 0.29033)), // index in throttle box
        (5.0, Vec3::new(0.0, 0.0, 0.42)),
    ];
    let palm_at = |t_s: f64| -> Vec3 {
        if t_s <= waypoints[0].0 {
            return waypoints[0].1;
        }
        for w in waypoints.windows(2) {
            let (t0, p0) = w[0];
            let (t1, p1) = w[1];
            if t_s <= t1 {
                let f = (t_s - t0) / (t1 - t0);
                return p0 + (p1 - p0) * f;
            }
        }
        waypoints[waypoints.len() - 1].1
    };

    let base = HandPose::canonical(0);
    let base_palm = base.palm_center();
    let mut poses = Vec::new();
    let mut i = 0u64;
    loop {
        let t_us = ((i as f64) * 1e6 / rate_hz).round() as u64;
        if t_us >= duration_us {
            break;
        }
        let offset = palm_at(t_us as f64 / 1e6) - base_palm;
        poses.push(
            HandPose::builder(t_us)
                .shifted(offset)
                .build()
                .expect("demo pose is valid"),
        );
        i += 1;
    }
    poses
}
