//! Multi-device rig geometry: device poses, reach cones, device selection,
//! coverage mapping of the interaction volume, and power estimation.
//!
//! The reference device projects up to 0.70 m from the array within a
//! 90-degree cone; the cone angle is read as the full apex angle, so the
//! half-angle default is 45 degrees. Reach boundaries are inclusive. Power
//! is modeled as the 80 W peak scaled by the mean squared envelope; the
//! scaling law is this crate's model, not a measured curve.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

use serde::Serialize;
use thiserror::Error;

use crate::acoustics::TransducerArray;
use crate::math::{Aabb, GeometryError, RigidTransform, Vec3};
use crate::modulation::Schedule;

/// Device id reserved for diagnostic events whose sample no device reaches.
pub const UNREACHABLE_DEVICE_ID: &str = "unreachable";

/// Reach distance of the reference device (m).
pub const DEFAULT_MAX_RANGE_M: f64 = 0.70;

/// Half of the 90-degree full cone angle (rad).
pub const DEFAULT_CONE_HALF_ANGLE_RAD: f64 = FRAC_PI_4;

/// Peak electrical power of the reference device (W).
pub const DEFAULT_PEAK_POWER_W: f64 = 80.0;

#[derive(Debug, Error)]
pub enum RigError {
    #[error("invalid device pose: {0}")]
    InvalidPose(#[from] GeometryError),
    #[error("device id must be non-empty and not the reserved \"{UNREACHABLE_DEVICE_ID}\"")]
    ReservedDeviceId,
    #[error("duplicate device id \"{0}\"")]
    DuplicateDeviceId(String),
    #[error("a rig needs at least one device")]
    EmptyRig,
    #[error("invalid device spec: {0}")]
    InvalidSpec(String),
    #[error("interaction volume has zero extent on some axis")]
    EmptyVolume,
    #[error("voxel size {0} must be > 0")]
    InvalidVoxel(f64),
}

/// Rigid placement of one device in scene coordinates. The device boresight
/// is local +z.
#[derive(Debug, Clone, PartialEq)]
pub struct DevicePose {
    device_id: String,
    transform: RigidTransform,
}

impl DevicePose {
    pub fn new(device_id: impl Into<String>, transform: RigidTransform) -> Result<Self, RigError> {
        let device_id = device_id.into();
        if device_id.is_empty() || device_id == UNREACHABLE_DEVICE_ID {
            return Err(RigError::ReservedDeviceId);
        }
        Ok(Self {
            device_id,
            transform,
        })
    }

    pub fn device_id(&self) -> &str {
        &self.device_id
    }

    pub fn transform(&self) -> &RigidTransform {
        &self.transform
    }

    /// Device-local point to scene coordinates.
    pub fn to_scene(&self, local: Vec3) -> Vec3 {
        self.transform.apply(local)
    }

    /// Scene point to device-local coordinates.
    pub fn to_device(&self, scene: Vec3) -> Vec3 {
        self.transform.apply_inverse(scene)
    }

    /// The pose re-expressed after applying `t` to the whole scene.
    pub fn transformed(&self, t: &RigidTransform) -> Self {
        Self {
            device_id: self.device_id.clone(),
            transform: t.compose(&self.transform),
        }
    }
}

/// Hardware envelope of one haptics device.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceSpec {
    array: TransducerArray,
    max_range_m: f64,
    cone_half_angle_rad: f64,
    peak_power_w: f64,
}

impl DeviceSpec {
    pub fn new(
        array: TransducerArray,
        max_range_m: f64,
        cone_half_angle_rad: f64,
        peak_power_w: f64,
    ) -> Result<Self, RigError> {
        if !(max_range_m > 0.0) {
            return Err(RigError::InvalidSpec(format!(
                "max range {max_range_m} must be > 0"
            )));
        }
        if !(cone_half_angle_rad > 0.0 && cone_half_angle_rad < std::f64::consts::FRAC_PI_2) {
            return Err(RigError::InvalidSpec(format!(
                "cone half-angle {cone_half_angle_rad} must be in (0, pi/2)"
            )));
        }
        if !(peak_power_w >= 0.0) {
            return Err(RigError::InvalidSpec(format!(
                "peak power {peak_power_w} must be >= 0"
            )));
        }
        Ok(Self {
            array,
            max_range_m,
            cone_half_angle_rad,
            peak_power_w,
        })
    }

    /// Reference-device envelope: 0.70 m range, 45° half-angle, 80 W peak.
    pub fn usi(array: TransducerArray) -> Self {
        Self {
            array,
            max_range_m: DEFAULT_MAX_RANGE_M,
            cone_half_angle_rad: DEFAULT_CONE_HALF_ANGLE_RAD,
            peak_power_w: DEFAULT_PEAK_POWER_W,
        }
    }

    pub fn array(&self) -> &TransducerArray {
        &self.array
    }

    pub fn max_range_m(&self) -> f64 {
        self.max_range_m
    }

    pub fn cone_half_angle_rad(&self) -> f64 {
        self.cone_half_angle_rad
    }

    pub fn peak_power_w(&self) -> f64 {
        self.peak_power_w
    }
}

/// A device and its placement.
#[derive(Debug, Clone, PartialEq)]
pub struct RigDevice {
    pub spec: DeviceSpec,
    pub pose: DevicePose,
}

/// The full rig: devices plus the interaction volume they serve.
#[derive(Debug, Clone, PartialEq)]
pub struct RigConfig {
    devices: Vec<RigDevice>,
    volume: Aabb,
}

impl RigConfig {
    pub fn new(devices: Vec<RigDevice>, volume: Aabb) -> Result<Self, RigError> {
        if devices.is_empty() {
            return Err(RigError::EmptyRig);
        }
        let mut seen = std::collections::BTreeSet::new();
        for d in &devices {
            if !seen.insert(d.pose.device_id().to_string()) {
                return Err(RigError::DuplicateDeviceId(d.pose.device_id().into()));
            }
        }
        Ok(Self { devices, volume })
    }

    /// The four-device concept rig: devices at the corners of a
    /// 0.6 m x 0.4 m rectangle, each tilted 30 degrees toward the central
    /// axis, serving a 0.5 x 0.3 x 0.3 m volume above them.
    ///
    /// The reference drawing gives no dimensions; this layout is a
    /// documented stand-in.
    pub fn figure5() -> Self {
        let volume = Aabb::new(Vec3::new(-0.25, -0.15, 0.15), Vec3::new(0.25, 0.15, 0.45));
        let corners = [(-0.3, -0.2), (0.3, -0.2), (-0.3, 0.2), (0.3, 0.2)];
        let devices = corners
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| RigDevice {
                spec: DeviceSpec::usi(TransducerArray::default_16x16()),
                pose: DevicePose::new(format!("usi{i}"), tilted_toward_origin(x, y))
                    .expect("valid id"),
            })
            .collect();
        Self::new(devices, volume).expect("figure-5 rig is valid")
    }

    pub fn devices(&self) -> &[RigDevice] {
        &self.devices
    }

    pub fn volume(&self) -> &Aabb {
        &self.volume
    }

    pub fn device(&self, id: &str) -> Option<&RigDevice> {
        self.devices.iter().find(|d| d.pose.device_id() == id)
    }

    /// The rig re-expressed after applying `t` to the whole scene.
    pub fn transformed(&self, t: &RigidTransform) -> Self {
        let devices = self
            .devices
            .iter()
            .map(|d| RigDevice {
                spec: d.spec.clone(),
                pose: d.pose.transformed(t),
            })
            .collect();
        // Axis-aligned volumes only transform exactly under axis-permuting
        // rotations; take the AABB of the transformed corners.
        let volume = transform_aabb(&self.volume, t);
        Self { devices, volume }
    }
}

fn transform_aabb(aabb: &Aabb, t: &RigidTransform) -> Aabb {
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
    Aabb::new(min, max)
}

/// Rotation tilting local +z by 30 degrees toward the scene origin for a
/// device at `(x, y, 0)`. Built from exact square roots so the layout is
/// reproducible bit-for-bit.
fn tilted_toward_origin(x: f64, y: f64) -> RigidTransform {
    let cos_t = 3.0_f64.sqrt() / 2.0;
    let sin_t = 0.5;
    let dn = (x * x + y * y).sqrt();
    let d = Vec3::new(-x / dn, -y / dn, 0.0);
    // axis = normalize(z × d) for Rodrigues; z is the boresight pre-tilt.
    let axis = Vec3::new(-d.y, d.x, 0.0).normalize();
    let rotation = crate::math::rodrigues(axis, cos_t, sin_t);
    RigidTransform::new(rotation, Vec3::new(x, y, 0.0)).expect("tilt rotation is proper")
}

/// Whether `point` (scene coordinates) lies within the device's reach:
/// distance <= max range and off-boresight angle <= the cone half-angle,
/// both inclusive.
pub fn in_reach(spec: &DeviceSpec, pose: &DevicePose, point: Vec3) -> bool {
    let local = pose.to_device(point);
    let r = local.norm();
    if r > spec.max_range_m() {
        return false;
    }
    let rho = (local.x * local.x + local.y * local.y).sqrt();
    let angle = rho.atan2(local.z);
    angle <= spec.cone_half_angle_rad()
}

/// Picks the device to drive a focal point: among devices that reach it,
/// the one with the smallest off-boresight angle, ties broken by smaller
/// distance and then lower device id. `None` if no device reaches.
pub fn select_device(rig: &RigConfig, point: Vec3) -> Option<&str> {
    let mut best: Option<(f64, f64, &str)> = None;
    for d in rig.devices() {
        let local = d.pose.to_device(point);
        let r = local.norm();
        if r > d.spec.max_range_m() {
            continue;
        }
        let rho = (local.x * local.x + local.y * local.y).sqrt();
        let angle = rho.atan2(local.z);
        if angle > d.spec.cone_half_angle_rad() {
            continue;
        }
        let id = d.pose.device_id();
        let better = match best {
            None => true,
            Some((ba, bd, bid)) => angle < ba || (angle == ba && (r < bd || (r == bd && id < bid))),
        };
        if better {
            best = Some((angle, r, id));
        }
    }
    best.map(|(_, _, id)| id)
}

/// Per-voxel count of devices reaching each voxel center of the
/// interaction volume.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageMap {
    origin: Vec3,
    voxel_m: f64,
    dims: [usize; 3],
    counts: Vec<u32>,
}

impl CoverageMap {
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn voxel_m(&self) -> f64 {
        self.voxel_m
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn total_voxels(&self) -> usize {
        self.counts.len()
    }

    /// Voxel center for flat index `i` (x fastest, then y, then z).
    pub fn center(&self, i: usize) -> Vec3 {
        let (nx, ny) = (self.dims[0], self.dims[1]);
        let ix = i % nx;
        let iy = (i / nx) % ny;
        let iz = i / (nx * ny);
        self.origin
            + Vec3::new(
                (ix as f64 + 0.5) * self.voxel_m,
                (iy as f64 + 0.5) * self.voxel_m,
                (iz as f64 + 0.5) * self.voxel_m,
            )
    }

    pub fn covered_count(&self, threshold: u32) -> usize {
        self.counts.iter().filter(|&&c| c >= threshold).count()
    }

    pub fn covered_fraction(&self, threshold: u32) -> f64 {
        self.covered_count(threshold) as f64 / self.total_voxels() as f64
    }

    pub fn summary(&self) -> CoverageSummary {
        CoverageSummary {
            voxel_m: self.voxel_m,
            dims: self.dims,
            total_voxels: self.total_voxels(),
            covered_ge1: self.covered_count(1),
            covered_ge2: self.covered_count(2),
            fraction_ge1: self.covered_fraction(1),
            fraction_ge2: self.covered_fraction(2),
        }
    }
}

/// Covered-fraction summary at the 1- and 2-device thresholds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageSummary {
    pub voxel_m: f64,
    pub dims: [usize; 3],
    pub total_voxels: usize,
    pub covered_ge1: usize,
    pub covered_ge2: usize,
    pub fraction_ge1: f64,
    pub fraction_ge2: f64,
}

/// Counts reaching devices for every voxel center, traversing x fastest,
/// then y, then z.
pub fn coverage_map(rig: &RigConfig, voxel_m: f64) -> Result<CoverageMap, RigError> {
    if !(voxel_m > 0.0) {
        return Err(RigError::InvalidVoxel(voxel_m));
    }
    let vol = rig.volume();
    if !vol.has_positive_extent() {
        return Err(RigError::EmptyVolume);
    }
    let ext = vol.extent();
    let dims = [
        ((ext.x / voxel_m) - 1e-9).ceil().max(1.0) as usize,
        ((ext.y / voxel_m) - 1e-9).ceil().max(1.0) as usize,
        ((ext.z / voxel_m) - 1e-9).ceil().max(1.0) as usize,
    ];
    let mut counts = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
    for iz in 0..dims[2] {
        let z = vol.min.z + (iz as f64 + 0.5) * voxel_m;
        for iy in 0..dims[1] {
            let y = vol.min.y + (iy as f64 + 0.5) * voxel_m;
            for ix in 0..dims[0] {
                let x = vol.min.x + (ix as f64 + 0.5) * voxel_m;
                let p = Vec3::new(x, y, z);
                let c = rig
                    .devices()
                    .iter()
                    .filter(|d| in_reach(&d.spec, &d.pose, p))
                    .count() as u32;
                counts.push(c);
            }
        }
    }
    Ok(CoverageMap {
        origin: vol.min,
        voxel_m,
        dims,
        counts,
    })
}

/// Mean electrical power per device: `peak_power × mean(envelope²)` over
/// its schedule; devices without a schedule idle at 0 W.
pub fn estimate_power(
    rig: &RigConfig,
    schedules: &BTreeMap<String, Schedule>,
) -> BTreeMap<String, f64> {
    rig.devices()
        .iter()
        .map(|d| {
            let id = d.pose.device_id().to_string();
            let watts = schedules
                .get(&id)
                .map(|s| d.spec.peak_power_w() * s.mean_square_envelope())
                .unwrap_or(0.0);
            (id, watts)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulation::{am_envelope, AmScheme};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn identity_device() -> (DeviceSpec, DevicePose) {
        (
            DeviceSpec::usi(TransducerArray::default_16x16()),
            DevicePose::new("d0", RigidTransform::identity()).unwrap(),
        )
    }

    fn single_device_rig() -> RigConfig {
        let (spec, pose) = identity_device();
        RigConfig::new(
            vec![RigDevice { spec, pose }],
            Aabb::new(Vec3::new(-0.1, -0.1, 0.1), Vec3::new(0.1, 0.1, 0.3)),
        )
        .unwrap()
    }

    #[test]
    fn reach_boundaries_are_inclusive() {
        let (spec, pose) = identity_device();
        assert!(in_reach(&spec, &pose, Vec3::new(0.0, 0.0, 0.7)));
        assert!(!in_reach(&spec, &pose, Vec3::new(0.0, 0.0, 0.701)));
        // Exactly on the 45-degree cone edge.
        assert!(in_reach(&spec, &pose, Vec3::new(0.3, 0.0, 0.3)));
    }

    #[test]
    fn outside_cone_at_46_degrees() {
        let (spec, pose) = identity_device();
        let a = 46.0_f64.to_radians();
        let p = Vec3::new(0.3 * a.sin(), 0.0, 0.3 * a.cos());
        assert!(!in_reach(&spec, &pose, p));
    }

    #[test]
    fn select_single_device_or_none() {
        let rig = single_device_rig();
        assert_eq!(select_device(&rig, Vec3::new(0.0, 0.0, 0.2)), Some("d0"));
        // Behind the device: outside the cone for every device.
        assert_eq!(select_device(&rig, Vec3::new(0.0, 0.0, -0.2)), None);
    }

    #[test]
    fn select_tie_breaks_to_lower_id() {
        // Mirror-symmetric pair of straight-up devices about the yz-plane;
        // a point on the plane sees bit-identical angles and distances.
        let up = |id: &str, x: f64| RigDevice {
            spec: DeviceSpec::usi(TransducerArray::default_16x16()),
            pose: DevicePose::new(id, RigidTransform::translation(Vec3::new(x, 0.0, 0.0))).unwrap(),
        };
        let rig = RigConfig::new(
            vec![up("d1", 0.2), up("d0", -0.2)],
            Aabb::new(Vec3::new(-0.3, -0.1, 0.1), Vec3::new(0.3, 0.1, 0.5)),
        )
        .unwrap();
        assert_eq!(select_device(&rig, Vec3::new(0.0, 0.0, 0.3)), Some("d0"));
    }

    #[test]
    fn selected_device_always_reaches() {
        let rig = RigConfig::figure5();
        for p in [
            Vec3::new(0.0, 0.0, 0.3),
            Vec3::new(0.2, 0.1, 0.2),
            Vec3::new(-0.2, -0.1, 0.4),
        ] {
            if let Some(id) = select_device(&rig, p) {
                let d = rig.device(id).unwrap();
                assert!(in_reach(&d.spec, &d.pose, p));
            }
        }
    }

    #[test]
    fn coverage_single_device() {
        let rig = single_device_rig();
        let map = coverage_map(&rig, 0.05).unwrap();
        // Voxel containing the boresight at z=0.2 is covered once.
        assert!(map.counts().contains(&1));
        assert!(map.counts().iter().all(|&c| c <= 1));
    }

    #[test]
    fn coverage_beyond_range_is_zero() {
        let (spec, pose) = identity_device();
        let rig = RigConfig::new(
            vec![RigDevice { spec, pose }],
            Aabb::new(Vec3::new(-0.05, -0.05, 0.75), Vec3::new(0.05, 0.05, 0.9)),
        )
        .unwrap();
        let map = coverage_map(&rig, 0.05).unwrap();
        assert!(map.counts().iter().all(|&c| c == 0));
    }

    #[test]
    fn coverage_rejects_degenerate_volume() {
        let (spec, pose) = identity_device();
        let rig = RigConfig::new(
            vec![RigDevice { spec, pose }],
            Aabb::new(Vec3::zeros(), Vec3::new(0.1, 0.1, 0.0)),
        )
        .unwrap();
        assert!(matches!(
            coverage_map(&rig, 0.01),
            Err(RigError::EmptyVolume)
        ));
        let rig2 = single_device_rig();
        assert!(matches!(
            coverage_map(&rig2, 0.0),
            Err(RigError::InvalidVoxel(_))
        ));
    }

    #[test]
    fn power_examples() {
        let rig = single_device_rig();
        // Continuous full-strength drive: the 80 W peak.
        let scheme = AmScheme::new(100.0, 1.0, 1.0).unwrap();
        let continuous = am_envelope(&scheme, Vec3::new(0.0, 0.0, 0.2), 10_000, 40_000.0).unwrap();
        let mut schedules = BTreeMap::new();
        schedules.insert("d0".to_string(), continuous);
        let w = estimate_power(&rig, &schedules);
        assert_relative_eq!(w["d0"], 80.0);

        // 50% duty at full strength: envelope² averages 0.5.
        let half = AmScheme::new(200.0, 0.5, 1.0).unwrap();
        let s = am_envelope(&half, Vec3::new(0.0, 0.0, 0.2), 10_000, 40_000.0).unwrap();
        schedules.insert("d0".to_string(), s);
        let w = estimate_power(&rig, &schedules);
        assert_relative_eq!(w["d0"], 40.0);

        // No schedule: idle.
        let w = estimate_power(&rig, &BTreeMap::new());
        assert_eq!(w["d0"], 0.0);
    }

    #[test]
    fn pose_round_trip_examples() {
        let pose = DevicePose::new("d0", RigidTransform::identity()).unwrap();
        let p = Vec3::new(0.1, 0.2, 0.3);
        assert_eq!(pose.to_scene(p), p);

        let shifted =
            DevicePose::new("d1", RigidTransform::translation(Vec3::new(0.0, 0.0, 0.5))).unwrap();
        assert_eq!(
            shifted.to_scene(Vec3::new(0.0, 0.0, 0.2)),
            Vec3::new(0.0, 0.0, 0.7)
        );
    }

    #[test]
    fn figure5_rig_shape() {
        let rig = RigConfig::figure5();
        assert_eq!(rig.devices().len(), 4);
        // Each boresight tilts 30 degrees off vertical toward the center.
        for d in rig.devices() {
            let b = d.pose.transform().rotate(Vec3::new(0.0, 0.0, 1.0));
            assert_relative_eq!(b.z, 3.0_f64.sqrt() / 2.0, max_relative = 1e-12);
            let horiz = Vec3::new(b.x, b.y, 0.0);
            let toward = -Vec3::new(
                d.pose.transform().translation_vec().x,
                d.pose.transform().translation_vec().y,
                0.0,
            )
            .normalize();
            assert_relative_eq!(horiz.normalize().dot(&toward), 1.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn reserved_and_duplicate_ids_rejected() {
        assert!(matches!(
            DevicePose::new("unreachable", RigidTransform::identity()),
            Err(RigError::ReservedDeviceId)
        ));
        let (spec, pose) = identity_device();
        let dup = RigConfig::new(
            vec![
                RigDevice {
                    spec: spec.clone(),
                    pose: pose.clone(),
                },
                RigDevice { spec, pose },
            ],
            Aabb::new(Vec3::zeros(), Vec3::new(0.1, 0.1, 0.1)),
        );
        assert!(matches!(dup, Err(RigError::DuplicateDeviceId(_))));
    }

    proptest! {
        #[test]
        fn to_device_to_scene_round_trip(
            px in -0.5f64..0.5, py in -0.5f64..0.5, pz in -0.5f64..0.5,
            ax in -1.0f64..1.0, ay in -1.0f64..1.0, az in -1.0f64..1.0,
            angle in 0.0f64..std::f64::consts::TAU,
            tx in -0.5f64..0.5, ty in -0.5f64..0.5, tz in -0.5f64..0.5,
        ) {
            let axis = Vec3::new(ax, ay, az);
            prop_assume!(axis.norm() > 1e-3);
            let t = RigidTransform::from_axis_angle(axis.normalize(), angle, Vec3::new(tx, ty, tz)).unwrap();
            let pose = DevicePose::new("d0", t).unwrap();
            let p = Vec3::new(px, py, pz);
            let back = pose.to_device(pose.to_scene(p));
            prop_assert!((back - p).norm() < 1e-12);
        }

        #[test]
        fn in_reach_is_rigid_invariant(
            px in -0.6f64..0.6, py in -0.6f64..0.6, pz in -0.2f64..0.8,
            angle in 0.0f64..std::f64::consts::TAU,
            tx in -0.5f64..0.5, ty in -0.5f64..0.5,
        ) {
            let (spec, pose) = identity_device();
            let p = Vec3::new(px, py, pz);
            let t = RigidTransform::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), angle, Vec3::new(tx, ty, 0.3)).unwrap();
            let a = in_reach(&spec, &pose, p);
            let b = in_reach(&spec, &pose.transformed(&t), t.apply(p));
            // Guard against boundary-straddling points where a rigid motion
            // legitimately flips an exact comparison by one ulp.
            let local = pose.to_device(p);
            let r = local.norm();
            let ang = (local.x * local.x + local.y * local.y).sqrt().atan2(local.z);
            let near_edge = (r - spec.max_range_m()).abs() < 1e-9
                || (ang - spec.cone_half_angle_rad()).abs() < 1e-9;
            if !near_edge {
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn power_stays_within_peak(duty in 0.05f64..1.0, strength in 0.0f64..1.0) {
            let rig = single_device_rig();
            let scheme = AmScheme::new(100.0, duty, strength).unwrap();
            let s = am_envelope(&scheme, Vec3::new(0.0, 0.0, 0.2), 20_000, 40_000.0).unwrap();
            let mut schedules = BTreeMap::new();
            schedules.insert("d0".to_string(), s);
            let w = estimate_power(&rig, &schedules);
            prop_assert!(w["d0"] >= 0.0 && w["d0"] <= 80.0);
        }
    }
}
