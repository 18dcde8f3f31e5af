//! The sensation core library: named, parameterized tactile templates that
//! expand into modulation schemes anchored to hand landmarks.
//!
//! Built-ins are `dial`, `click`, `presence`, and `line`. Their waveform
//! parameters (frequencies, radii, line length, burst duration) are library
//! defaults exposed through the parameter schema; only the sensation names
//! and hand-region targets come from the reference design. Circle-based
//! sensations are rendered in the palm plane; `presence` is a slow wide
//! circle over the three-fingertip centroid, and `line` sweeps the palm's
//! lateral axis. These renderings are explicit stand-ins.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interaction::HandPose;
use crate::math::Vec3;
use crate::modulation::{
    am_envelope, stm_schedule, AmScheme, ModulationError, Path, Schedule, StmScheme,
};

#[derive(Debug, Error)]
pub enum SensationError {
    #[error("no sensation template named \"{0}\"")]
    UnknownTemplate(String),
    #[error("a template named \"{0}\" is already registered")]
    DuplicateTemplate(String),
    #[error("unknown parameter \"{0}\"")]
    UnknownParam(String),
    #[error("parameter \"{name}\" = {value} outside [{min}, {max}]")]
    ParamOutOfBounds {
        name: String,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("sensation has no target regions to anchor")]
    EmptyTargets,
    #[error(transparent)]
    Modulation(#[from] ModulationError),
}

/// Hand landmarks a sensation can anchor to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HandRegion {
    ThumbTip,
    IndexTip,
    MiddleTip,
    RingTip,
    LittleTip,
    PalmCenter,
}

impl HandRegion {
    pub const ALL: [HandRegion; 6] = [
        HandRegion::ThumbTip,
        HandRegion::IndexTip,
        HandRegion::MiddleTip,
        HandRegion::RingTip,
        HandRegion::LittleTip,
        HandRegion::PalmCenter,
    ];
}

impl fmt::Display for HandRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            HandRegion::ThumbTip => "thumb_tip",
            HandRegion::IndexTip => "index_tip",
            HandRegion::MiddleTip => "middle_tip",
            HandRegion::RingTip => "ring_tip",
            HandRegion::LittleTip => "little_tip",
            HandRegion::PalmCenter => "palm_center",
        };
        f.write_str(s)
    }
}

/// Looks up the pose's stored landmark for each requested region.
pub fn resolve_targets(
    regions: &BTreeSet<HandRegion>,
    hand: &HandPose,
) -> BTreeMap<HandRegion, Vec3> {
    regions.iter().map(|&r| (r, hand.landmark(r))).collect()
}

/// Bounds and default of one template parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    pub min: f64,
    pub max: f64,
}

/// The drive a sensation instance produces.
#[derive(Debug, Clone, PartialEq)]
pub enum Scheme {
    /// AM burst at a fixed position.
    Am { scheme: AmScheme, position: Vec3 },
    /// STM traversal of a geometric path.
    Stm { scheme: StmScheme },
}

impl Scheme {
    /// Focal position and envelope at `t` µs from the scheme's start.
    pub fn sample_at(&self, t_us: u64) -> (Vec3, f64) {
        match self {
            Scheme::Am { scheme, position } => (*position, scheme.envelope_at(t_us)),
            Scheme::Stm { scheme } => (scheme.position_at(t_us), scheme.strength()),
        }
    }
}

/// A template resolved against a hand pose: anchors plus a concrete drive.
#[derive(Debug, Clone, PartialEq)]
pub struct SensationInstance {
    pub template: String,
    pub anchors: BTreeMap<HandRegion, Vec3>,
    pub scheme: Scheme,
    /// Burst-style sensations stop after this long; `None` plays while
    /// active.
    pub burst_us: Option<u64>,
    pub active: bool,
}

impl SensationInstance {
    /// Expands the instance into a drive schedule. Burst sensations are
    /// capped at their burst duration.
    pub fn schedule(
        &self,
        duration_us: u64,
        update_rate_hz: f64,
    ) -> Result<Schedule, SensationError> {
        let effective = match self.burst_us {
            Some(b) => duration_us.min(b),
            None => duration_us,
        };
        let s = match &self.scheme {
            Scheme::Am { scheme, position } => {
                am_envelope(scheme, *position, effective, update_rate_hz)?
            }
            Scheme::Stm { scheme } => stm_schedule(scheme, effective, update_rate_hz)?,
        };
        Ok(s)
    }
}

type Generator = Box<
    dyn Fn(
            &BTreeMap<&'static str, f64>,
            &BTreeMap<HandRegion, Vec3>,
            &HandPose,
        ) -> Result<(Scheme, Option<u64>), SensationError>
        + Send
        + Sync,
>;

/// A named tactile template: target regions, parameter schema, and a
/// generator mapping parameters and anchors to a drive scheme.
pub struct SensationTemplate {
    name: String,
    default_targets: BTreeSet<HandRegion>,
    params: Vec<ParamSpec>,
    generator: Generator,
}

impl SensationTemplate {
    pub fn new(
        name: impl Into<String>,
        default_targets: BTreeSet<HandRegion>,
        params: Vec<ParamSpec>,
        generator: Generator,
    ) -> Self {
        Self {
            name: name.into(),
            default_targets,
            params,
            generator,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn default_targets(&self) -> &BTreeSet<HandRegion> {
        &self.default_targets
    }

    pub fn params(&self) -> &[ParamSpec] {
        &self.params
    }
}

impl fmt::Debug for SensationTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SensationTemplate")
            .field("name", &self.name)
            .field("default_targets", &self.default_targets)
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

fn centroid(anchors: &BTreeMap<HandRegion, Vec3>) -> Result<Vec3, SensationError> {
    if anchors.is_empty() {
        return Err(SensationError::EmptyTargets);
    }
    Ok(anchors.values().sum::<Vec3>() / anchors.len() as f64)
}

/// In-plane circle axes spanned by the palm: `u` is the lateral axis and
/// `v = palm_normal × lateral`.
fn palm_plane_axes(hand: &HandPose) -> (Vec3, Vec3) {
    let u = hand.lateral_axis();
    let v = hand.palm_normal().cross(&u);
    (u, v)
}

fn builtin_click() -> SensationTemplate {
    SensationTemplate::new(
        "click",
        BTreeSet::from([HandRegion::IndexTip]),
        vec![
            ParamSpec {
                name: "frequency_hz",
                default: 200.0,
                min: 10.0,
                max: 400.0,
            },
            ParamSpec {
                name: "duty",
                default: 0.5,
                min: 0.01,
                max: 1.0,
            },
            ParamSpec {
                name: "strength",
                default: 1.0,
                min: 0.0,
                max: 1.0,
            },
            ParamSpec {
                name: "burst_us",
                default: 100_000.0,
                min: 1_000.0,
                max: 10_000_000.0,
            },
        ],
        Box::new(|p, anchors, _hand| {
            let position = centroid(anchors)?;
            let scheme = AmScheme::new(p["frequency_hz"], p["duty"], p["strength"])?;
            Ok((
                Scheme::Am { scheme, position },
                Some(p["burst_us"].round() as u64),
            ))
        }),
    )
}

fn builtin_circle(
    name: &'static str,
    targets: BTreeSet<HandRegion>,
    default_radius: f64,
    default_draw_hz: f64,
) -> SensationTemplate {
    SensationTemplate::new(
        name,
        targets,
        vec![
            ParamSpec {
                name: "radius_m",
                default: default_radius,
                min: 0.001,
                max: 0.1,
            },
            ParamSpec {
                name: "draw_frequency_hz",
                default: default_draw_hz,
                min: 10.0,
                max: 400.0,
            },
            ParamSpec {
                name: "strength",
                default: 1.0,
                min: 0.0,
                max: 1.0,
            },
        ],
        Box::new(|p, anchors, hand| {
            let center = centroid(anchors)?;
            let (u, v) = palm_plane_axes(hand);
            let path = Path::circle(center, p["radius_m"], u, v)?;
            let scheme = StmScheme::new(path, p["draw_frequency_hz"], p["strength"])?;
            Ok((Scheme::Stm { scheme }, None))
        }),
    )
}

fn builtin_line() -> SensationTemplate {
    SensationTemplate::new(
        "line",
        BTreeSet::from([HandRegion::PalmCenter]),
        vec![
            ParamSpec {
                name: "length_m",
                default: 0.06,
                min: 0.005,
                max: 0.5,
            },
            ParamSpec {
                name: "draw_frequency_hz",
                default: 100.0,
                min: 10.0,
                max: 400.0,
            },
            ParamSpec {
                name: "strength",
                default: 1.0,
                min: 0.0,
                max: 1.0,
            },
        ],
        Box::new(|p, anchors, hand| {
            let center = centroid(anchors)?;
            let half = hand.lateral_axis() * (p["length_m"] / 2.0);
            let path = Path::line(center - half, center + half)?;
            let scheme = StmScheme::new(path, p["draw_frequency_hz"], p["strength"])?;
            Ok((Scheme::Stm { scheme }, None))
        }),
    )
}

/// Registry of sensation templates. Built-ins are protected; the library
/// is meant to be populated at startup and then used immutably.
pub struct SensationLibrary {
    templates: BTreeMap<String, SensationTemplate>,
    builtins: BTreeSet<String>,
}

impl SensationLibrary {
    /// Library preloaded with the four built-in templates.
    pub fn with_builtins() -> Self {
        let mut templates = BTreeMap::new();
        for t in [
            builtin_click(),
            builtin_circle(
                "dial",
                BTreeSet::from([HandRegion::ThumbTip, HandRegion::IndexTip]),
                0.01,
                100.0,
            ),
            builtin_circle(
                "presence",
                BTreeSet::from([
                    HandRegion::ThumbTip,
                    HandRegion::IndexTip,
                    HandRegion::MiddleTip,
                ]),
                0.02,
                70.0,
            ),
            builtin_line(),
        ] {
            templates.insert(t.name().to_string(), t);
        }
        let builtins = templates.keys().cloned().collect();
        Self {
            templates,
            builtins,
        }
    }

    /// Registers a custom template. Built-ins cannot be overwritten.
    pub fn register(&mut self, template: SensationTemplate) -> Result<(), SensationError> {
        if self.templates.contains_key(template.name()) {
            return Err(SensationError::DuplicateTemplate(template.name().into()));
        }
        self.templates.insert(template.name().to_string(), template);
        Ok(())
    }

    pub fn template(&self, name: &str) -> Option<&SensationTemplate> {
        self.templates.get(name)
    }

    /// Registered template names in sorted order.
    pub fn names(&self) -> Vec<&str> {
        self.templates.keys().map(String::as_str).collect()
    }

    pub fn is_builtin(&self, name: &str) -> bool {
        self.builtins.contains(name)
    }

    /// Instantiates a template against a hand pose using its default
    /// targets.
    pub fn instantiate(
        &self,
        name: &str,
        params: &BTreeMap<String, f64>,
        hand: &HandPose,
    ) -> Result<SensationInstance, SensationError> {
        let targets = self
            .template(name)
            .ok_or_else(|| SensationError::UnknownTemplate(name.into()))?
            .default_targets()
            .clone();
        self.instantiate_for(name, params, &targets, hand)
    }

    /// Instantiates with an explicit target-region set (haptic labels may
    /// override the template defaults).
    pub fn instantiate_for(
        &self,
        name: &str,
        params: &BTreeMap<String, f64>,
        targets: &BTreeSet<HandRegion>,
        hand: &HandPose,
    ) -> Result<SensationInstance, SensationError> {
        let template = self
            .template(name)
            .ok_or_else(|| SensationError::UnknownTemplate(name.into()))?;
        if targets.is_empty() {
            return Err(SensationError::EmptyTargets);
        }

        let mut resolved: BTreeMap<&'static str, f64> = template
            .params()
            .iter()
            .map(|p| (p.name, p.default))
            .collect();
        for (key, &value) in params {
            let spec = template
                .params()
                .iter()
                .find(|p| p.name == key.as_str())
                .ok_or_else(|| SensationError::UnknownParam(key.clone()))?;
            if !(spec.min..=spec.max).contains(&value) {
                return Err(SensationError::ParamOutOfBounds {
                    name: key.clone(),
                    value,
                    min: spec.min,
                    max: spec.max,
                });
            }
            resolved.insert(spec.name, value);
        }

        let anchors = resolve_targets(targets, hand);
        let (scheme, burst_us) = (template.generator)(&resolved, &anchors, hand)?;
        Ok(SensationInstance {
            template: template.name().to_string(),
            anchors,
            scheme,
            burst_us,
            active: true,
        })
    }
}

impl Default for SensationLibrary {
    fn default() -> Self {
        Self::with_builtins()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::RigidTransform;
    use approx::assert_relative_eq;

    fn pose() -> HandPose {
        HandPose::canonical(0)
    }

    fn no_params() -> BTreeMap<String, f64> {
        BTreeMap::new()
    }

    #[test]
    fn resolve_targets_is_a_lookup() {
        let hand = pose();
        let m = resolve_targets(&BTreeSet::from([HandRegion::IndexTip]), &hand);
        assert_eq!(m.len(), 1);
        assert_eq!(
            m[&HandRegion::IndexTip],
            hand.landmark(HandRegion::IndexTip)
        );
        assert!(resolve_targets(&BTreeSet::new(), &hand).is_empty());
    }

    #[test]
    fn resolve_targets_translates_with_the_pose() {
        let hand = pose();
        let shift = Vec3::new(0.1, 0.0, 0.0);
        let moved = hand.transformed(&RigidTransform::translation(shift));
        let regions = BTreeSet::from([HandRegion::ThumbTip, HandRegion::IndexTip]);
        let a = resolve_targets(&regions, &hand);
        let b = resolve_targets(&regions, &moved);
        for r in &regions {
            assert!((b[r] - (a[r] + shift)).norm() < 1e-12);
        }
    }

    #[test]
    fn click_defaults() {
        let lib = SensationLibrary::with_builtins();
        let hand = pose();
        let inst = lib.instantiate("click", &no_params(), &hand).unwrap();
        assert_eq!(inst.template, "click");
        assert_eq!(inst.burst_us, Some(100_000));
        assert_eq!(
            inst.anchors.keys().copied().collect::<Vec<_>>(),
            vec![HandRegion::IndexTip]
        );
        match &inst.scheme {
            Scheme::Am { scheme, position } => {
                assert_eq!(scheme.frequency_hz(), 200.0);
                assert_eq!(*position, hand.landmark(HandRegion::IndexTip));
            }
            _ => panic!("click should be AM"),
        }
    }

    #[test]
    fn dial_centers_on_thumb_index_midpoint() {
        let lib = SensationLibrary::with_builtins();
        let hand = HandPose::builder(0)
            .thumb_tip(Vec3::new(0.0, 0.0, 0.2))
            .index_tip(Vec3::new(0.04, 0.0, 0.2))
            .build()
            .unwrap();
        let inst = lib.instantiate("dial", &no_params(), &hand).unwrap();
        match &inst.scheme {
            Scheme::Stm { scheme } => match scheme.path() {
                Path::Circle { center, radius, .. } => {
                    assert!((center - Vec3::new(0.02, 0.0, 0.2)).norm() < 1e-12);
                    assert_eq!(*radius, 0.01);
                }
                other => panic!("dial should be a circle, got {other:?}"),
            },
            _ => panic!("dial should be STM"),
        }
    }

    #[test]
    fn unknown_template_is_a_lookup_error() {
        let lib = SensationLibrary::with_builtins();
        assert!(matches!(
            lib.instantiate("warp", &no_params(), &pose()),
            Err(SensationError::UnknownTemplate(_))
        ));
    }

    #[test]
    fn register_custom_then_instantiate() {
        let mut lib = SensationLibrary::with_builtins();
        lib.register(SensationTemplate::new(
            "buzz",
            BTreeSet::from([HandRegion::PalmCenter]),
            vec![ParamSpec {
                name: "frequency_hz",
                default: 120.0,
                min: 10.0,
                max: 400.0,
            }],
            Box::new(|p, anchors, _| {
                let position = centroid(anchors)?;
                Ok((
                    Scheme::Am {
                        scheme: AmScheme::new(p["frequency_hz"], 0.5, 1.0)?,
                        position,
                    },
                    None,
                ))
            }),
        ))
        .unwrap();
        assert!(lib.instantiate("buzz", &no_params(), &pose()).is_ok());
        assert_eq!(
            lib.names(),
            vec!["buzz", "click", "dial", "line", "presence"]
        );
        assert_eq!(lib.names().len(), 5);
    }

    #[test]
    fn builtins_cannot_be_overwritten() {
        let mut lib = SensationLibrary::with_builtins();
        let err = lib.register(SensationTemplate::new(
            "dial",
            BTreeSet::new(),
            vec![],
            Box::new(|_, _, _| Err(SensationError::EmptyTargets)),
        ));
        assert!(matches!(err, Err(SensationError::DuplicateTemplate(_))));
    }

    #[test]
    fn out_of_bounds_param_rejected() {
        let lib = SensationLibrary::with_builtins();
        let params: BTreeMap<String, f64> = [("frequency_hz".to_string(), 5.0)].into();
        assert!(matches!(
            lib.instantiate("click", &params, &pose()),
            Err(SensationError::ParamOutOfBounds { .. })
        ));
        let unknown: BTreeMap<String, f64> = [("wavelength".to_string(), 1.0)].into();
        assert!(matches!(
            lib.instantiate("click", &unknown, &pose()),
            Err(SensationError::UnknownParam(_))
        ));
    }

    #[test]
    fn builtin_targets_match_reference_bindings() {
        let lib = SensationLibrary::with_builtins();
        let t = |n: &str| lib.template(n).unwrap().default_targets().clone();
        assert_eq!(
            t("dial"),
            BTreeSet::from([HandRegion::ThumbTip, HandRegion::IndexTip])
        );
        assert_eq!(t("click"), BTreeSet::from([HandRegion::IndexTip]));
        assert_eq!(
            t("presence"),
            BTreeSet::from([
                HandRegion::ThumbTip,
                HandRegion::IndexTip,
                HandRegion::MiddleTip
            ])
        );
        assert_eq!(t("line"), BTreeSet::from([HandRegion::PalmCenter]));
    }

    #[test]
    fn builtin_schemes_pass_modulation_validation() {
        // Frequencies of every built-in default sit in the perceptible band,
        // so expanding a schedule succeeds.
        let lib = SensationLibrary::with_builtins();
        let hand = pose();
        for name in ["click", "dial", "presence", "line"] {
            let inst = lib.instantiate(name, &no_params(), &hand).unwrap();
            let schedule = inst.schedule(10_000, 40_000.0).unwrap();
            assert!(!schedule.is_empty(), "{name} produced an empty schedule");
        }
    }

    #[test]
    fn instantiation_is_deterministic() {
        let lib = SensationLibrary::with_builtins();
        let hand = pose();
        let a = lib.instantiate("presence", &no_params(), &hand).unwrap();
        let b = lib.instantiate("presence", &no_params(), &hand).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn instantiation_is_pose_equivariant() {
        let lib = SensationLibrary::with_builtins();
        let hand = pose();
        let t = RigidTransform::from_axis_angle(
            Vec3::new(0.0, 0.0, 1.0),
            0.6,
            Vec3::new(0.05, -0.02, 0.01),
        )
        .unwrap();
        let moved = hand.transformed(&t);
        for name in ["click", "dial", "presence", "line"] {
            let a = lib.instantiate(name, &no_params(), &hand).unwrap();
            let b = lib.instantiate(name, &no_params(), &moved).unwrap();
            for (r, p) in &a.anchors {
                assert!((b.anchors[r] - t.apply(*p)).norm() < 1e-9);
            }
            // Sampled drive positions transform rigidly too.
            for t_us in [0u64, 1_000, 3_333] {
                let (pa, ea) = a.scheme.sample_at(t_us);
                let (pb, eb) = b.scheme.sample_at(t_us);
                assert!((pb - t.apply(pa)).norm() < 1e-9);
                assert_relative_eq!(ea, eb);
            }
        }
    }
}
