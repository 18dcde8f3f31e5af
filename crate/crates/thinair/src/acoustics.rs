//! Phased-array acoustics: element geometry, conjugate-phase focusing, and
//! complex pressure fields by superposition of spherical-spreading element
//! contributions.
//!
//! Pressure is in arbitrary units (unit source strength per element). The
//! propagation convention is `exp(+i k d)`, so the focusing phase for an
//! element at distance `d` from the target is `-k d` (mod 2π). A 1 mm
//! distance floor guards the near-field singularity. Air absorption is not
//! modeled; all downstream checks are relative.

use std::f64::consts::TAU;

pub use num_complex::Complex64;
use thiserror::Error;

use crate::math::{is_unit, piston_directivity_factor, wrap_phase, Vec3};

/// Spreading-term floor: contributions are scaled by `1 / max(d, 1 mm)`.
pub const DISTANCE_FLOOR_M: f64 = 1e-3;

/// Minimum element-to-focus clearance accepted by the phase solver.
pub const MIN_FOCUS_CLEARANCE_M: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum AcousticsError {
    #[error("invalid transducer: {0}")]
    InvalidTransducer(String),
    #[error("invalid array: {0}")]
    InvalidArray(String),
    #[error("directivity angle {0} outside [0, pi/2]")]
    AngleOutOfRange(f64),
    #[error("phase pattern has {got} entries but the array has {expected} elements")]
    PatternMismatch { expected: usize, got: usize },
    #[error("focus is within 1 mm of element {element}")]
    FocusTooClose { element: usize },
    #[error("focal gain is undefined for an array with zero total amplitude")]
    ZeroAmplitude,
    #[error("focus is not in front of the array plane")]
    FocusBehindArray,
    #[error("invalid field grid: {0}")]
    InvalidGrid(String),
    #[error("invalid phase pattern: {0}")]
    InvalidPattern(String),
}

/// Angular gain model applied per element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectivityMode {
    /// Baffled circular piston: `2 J1(x)/x`, `x = k a sin(theta)`.
    Piston,
    /// Unit gain at all angles.
    Omnidirectional,
}

/// One ultrasonic emitter in device-local coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Transducer {
    position: Vec3,
    normal: Vec3,
    drive_amplitude: f64,
    piston_radius: f64,
}

impl Transducer {
    pub fn new(
        position: Vec3,
        normal: Vec3,
        drive_amplitude: f64,
        piston_radius: f64,
    ) -> Result<Self, AcousticsError> {
        if !is_unit(normal, 1e-9) {
            return Err(AcousticsError::InvalidTransducer(format!(
                "normal has length {}, expected 1 within 1e-9",
                normal.norm()
            )));
        }
        if !(0.0..=1.0).contains(&drive_amplitude) {
            return Err(AcousticsError::InvalidTransducer(format!(
                "drive amplitude {drive_amplitude} outside [0,1]"
            )));
        }
        if !(piston_radius > 0.0) {
            return Err(AcousticsError::InvalidTransducer(format!(
                "piston radius {piston_radius} must be > 0"
            )));
        }
        Ok(Self {
            position,
            normal,
            drive_amplitude,
            piston_radius,
        })
    }

    pub fn position(&self) -> Vec3 {
        self.position
    }

    pub fn normal(&self) -> Vec3 {
        self.normal
    }

    pub fn drive_amplitude(&self) -> f64 {
        self.drive_amplitude
    }

    pub fn piston_radius(&self) -> f64 {
        self.piston_radius
    }
}

/// An ordered set of transducers sharing a carrier and medium.
#[derive(Debug, Clone, PartialEq)]
pub struct TransducerArray {
    elements: Vec<Transducer>,
    carrier_frequency_hz: f64,
    speed_of_sound_mps: f64,
    directivity_mode: DirectivityMode,
}

/// Carrier frequency of the reference hardware (Hz).
pub const DEFAULT_CARRIER_HZ: f64 = 40_000.0;

/// Speed of sound default (m/s, ~25 °C air); the medium is configurable.
pub const DEFAULT_SPEED_OF_SOUND_MPS: f64 = 346.0;

/// Default grid pitch (m). Chosen so 9.9 mm-wide elements tile without
/// overlap; the reference device's true pitch is not public.
pub const DEFAULT_PITCH_M: f64 = 0.0103;

/// Default piston radius (m).
pub const DEFAULT_PISTON_RADIUS_M: f64 = 0.0043;

impl TransducerArray {
    pub fn new(
        elements: Vec<Transducer>,
        carrier_frequency_hz: f64,
        speed_of_sound_mps: f64,
        directivity_mode: DirectivityMode,
    ) -> Result<Self, AcousticsError> {
        if elements.is_empty() {
            return Err(AcousticsError::InvalidArray("no elements".into()));
        }
        if !(carrier_frequency_hz > 0.0) {
            return Err(AcousticsError::InvalidArray(format!(
                "carrier frequency {carrier_frequency_hz} must be > 0"
            )));
        }
        if !(speed_of_sound_mps > 0.0) {
            return Err(AcousticsError::InvalidArray(format!(
                "speed of sound {speed_of_sound_mps} must be > 0"
            )));
        }
        let k = TAU * carrier_frequency_hz / speed_of_sound_mps;
        if !k.is_finite() || !(k > 0.0) {
            return Err(AcousticsError::InvalidArray(format!(
                "wavenumber {k} is not finite and positive"
            )));
        }
        Ok(Self {
            elements,
            carrier_frequency_hz,
            speed_of_sound_mps,
            directivity_mode,
        })
    }

    /// Planar grid of identical +z-facing elements centered on the origin.
    #[allow(clippy::too_many_arguments)]
    pub fn grid(
        nx: usize,
        ny: usize,
        pitch_m: f64,
        piston_radius_m: f64,
        drive_amplitude: f64,
        carrier_frequency_hz: f64,
        speed_of_sound_mps: f64,
        directivity_mode: DirectivityMode,
    ) -> Result<Self, AcousticsError> {
        if nx == 0 || ny == 0 {
            return Err(AcousticsError::InvalidArray("empty grid".into()));
        }
        if !(pitch_m > 0.0) {
            return Err(AcousticsError::InvalidArray(format!(
                "pitch {pitch_m} must be > 0"
            )));
        }
        let cx = (nx as f64 - 1.0) / 2.0;
        let cy = (ny as f64 - 1.0) / 2.0;
        let mut elements = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                elements.push(Transducer::new(
                    Vec3::new((i as f64 - cx) * pitch_m, (j as f64 - cy) * pitch_m, 0.0),
                    Vec3::new(0.0, 0.0, 1.0),
                    drive_amplitude,
                    piston_radius_m,
                )?);
            }
        }
        Self::new(
            elements,
            carrier_frequency_hz,
            speed_of_sound_mps,
            directivity_mode,
        )
    }

    /// The 256-element reference layout: 16x16 at 10.3 mm pitch, piston
    /// directivity, 40 kHz carrier.
    pub fn default_16x16() -> Self {
        Self::grid(
            16,
            16,
            DEFAULT_PITCH_M,
            DEFAULT_PISTON_RADIUS_M,
            1.0,
            DEFAULT_CARRIER_HZ,
            DEFAULT_SPEED_OF_SOUND_MPS,
            DirectivityMode::Piston,
        )
        .expect("default array parameters are valid")
    }

    pub fn elements(&self) -> &[Transducer] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn carrier_frequency_hz(&self) -> f64 {
        self.carrier_frequency_hz
    }

    pub fn speed_of_sound_mps(&self) -> f64 {
        self.speed_of_sound_mps
    }

    pub fn directivity_mode(&self) -> DirectivityMode {
        self.directivity_mode
    }

    /// `k = 2π f / c`.
    pub fn wavenumber(&self) -> f64 {
        TAU * self.carrier_frequency_hz / self.speed_of_sound_mps
    }
}

/// Per-element drive state: phase in `[0, 2π)` and amplitude in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePattern {
    phases: Vec<f64>,
    amplitudes: Vec<f64>,
}

impl PhasePattern {
    pub fn new(phases: Vec<f64>, amplitudes: Vec<f64>) -> Result<Self, AcousticsError> {
        if phases.len() != amplitudes.len() {
            return Err(AcousticsError::InvalidPattern(format!(
                "{} phases vs {} amplitudes",
                phases.len(),
                amplitudes.len()
            )));
        }
        for (i, p) in phases.iter().enumerate() {
            if !(0.0..TAU).contains(p) {
                return Err(AcousticsError::InvalidPattern(format!(
                    "phase {p} at index {i} outside [0, 2pi)"
                )));
            }
        }
        for (i, a) in amplitudes.iter().enumerate() {
            if !(0.0..=1.0).contains(a) {
                return Err(AcousticsError::InvalidPattern(format!(
                    "amplitude {a} at index {i} outside [0,1]"
                )));
            }
        }
        Ok(Self { phases, amplitudes })
    }

    /// All-zero phases with the array's own drive amplitudes.
    pub fn zero_for(array: &TransducerArray) -> Self {
        Self {
            phases: vec![0.0; array.len()],
            amplitudes: array
                .elements()
                .iter()
                .map(|e| e.drive_amplitude())
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    /// Same phases with every amplitude multiplied by `factor` (clamped
    /// validity is the caller's concern; factor must keep values in [0,1]).
    pub fn scaled_amplitudes(&self, factor: f64) -> Result<Self, AcousticsError> {
        Self::new(
            self.phases.clone(),
            self.amplitudes.iter().map(|a| a * factor).collect(),
        )
    }
}

/// Complex pressure at a point, arbitrary units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureSample {
    pub point: Vec3,
    pub pressure: Complex64,
}

impl PressureSample {
    pub fn magnitude(&self) -> f64 {
        self.pressure.norm()
    }
}

/// Regular sampling lattice: 2 axes for planar maps, 3 for volumes.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    origin: Vec3,
    axes: Vec<Vec3>,
    counts: Vec<usize>,
    spacing_m: f64,
}

impl FieldGrid {
    pub fn new(
        origin: Vec3,
        axes: Vec<Vec3>,
        counts: Vec<usize>,
        spacing_m: f64,
    ) -> Result<Self, AcousticsError> {
        if !(axes.len() == 2 || axes.len() == 3) {
            return Err(AcousticsError::InvalidGrid(format!(
                "{} axes, expected 2 or 3",
                axes.len()
            )));
        }
        if counts.len() != axes.len() {
            return Err(AcousticsError::InvalidGrid(format!(
                "{} counts for {} axes",
                counts.len(),
                axes.len()
            )));
        }
        if counts.iter().any(|&c| c < 1) {
            return Err(AcousticsError::InvalidGrid("counts must be >= 1".into()));
        }
        if !(spacing_m > 0.0) {
            return Err(AcousticsError::InvalidGrid(format!(
                "spacing {spacing_m} must be > 0"
            )));
        }
        for (i, a) in axes.iter().enumerate() {
            if !is_unit(*a, 1e-9) {
                return Err(AcousticsError::InvalidGrid(format!(
                    "axis {i} is not unit length"
                )));
            }
            for b in axes.iter().skip(i + 1) {
                if a.dot(b).abs() > 1e-9 {
                    return Err(AcousticsError::InvalidGrid(
                        "axes are not mutually orthogonal within 1e-9".into(),
                    ));
                }
            }
        }
        Ok(Self {
            origin,
            axes,
            counts,
            spacing_m,
        })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn spacing_m(&self) -> f64 {
        self.spacing_m
    }

    pub fn axes(&self) -> &[Vec3] {
        &self.axes
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn num_points(&self) -> usize {
        self.counts.iter().product()
    }

    /// Sample points in deterministic order: the first axis varies fastest.
    pub fn points(&self) -> Vec<Vec3> {
        let mut pts = Vec::with_capacity(self.num_points());
        match self.axes.len() {
            2 => {
                for j in 0..self.counts[1] {
                    for i in 0..self.counts[0] {
                        pts.push(
                            self.origin
                                + self.axes[0] * (i as f64 * self.spacing_m)
                                + self.axes[1] * (j as f64 * self.spacing_m),
                        );
                    }
                }
            }
            3 => {
                for k in 0..self.counts[2] {
                    for j in 0..self.counts[1] {
                        for i in 0..self.counts[0] {
                            pts.push(
                                self.origin
                                    + self.axes[0] * (i as f64 * self.spacing_m)
                                    + self.axes[1] * (j as f64 * self.spacing_m)
                                    + self.axes[2] * (k as f64 * self.spacing_m),
                            );
                        }
                    }
                }
            }
            _ => unreachable!("validated in new"),
        }
        pts
    }
}

/// Element gain toward a direction `theta` off the element normal.
/// Piston elements radiate into the front hemisphere only; points behind
/// the face get zero gain. Omnidirectional elements have unit gain
/// everywhere.
fn element_gain(mode: DirectivityMode, k: f64, piston_radius: f64, cos_t: f64, sin_t: f64) -> f64 {
    match mode {
        DirectivityMode::Omnidirectional => 1.0,
        DirectivityMode::Piston => {
            if cos_t < 0.0 {
                0.0
            } else {
                piston_directivity_factor(k * piston_radius * sin_t)
            }
        }
    }
}

/// Far-field angular gain of the array's elements at `angle` off the
/// element normal.
///
/// Piston mode evaluates `2 J1(x)/x` with `x = k a sin(angle)` using the
/// first element's piston radius (the bundled layouts are homogeneous);
/// field evaluation applies each element's own radius.
pub fn directivity(array: &TransducerArray, angle: f64) -> Result<f64, AcousticsError> {
    if !angle.is_finite() || !(0.0..=std::f64::consts::FRAC_PI_2).contains(&angle) {
        return Err(AcousticsError::AngleOutOfRange(angle));
    }
    match array.directivity_mode() {
        DirectivityMode::Omnidirectional => Ok(1.0),
        DirectivityMode::Piston => {
            let a = array.elements()[0].piston_radius();
            Ok(piston_directivity_factor(
                array.wavenumber() * a * angle.sin(),
            ))
        }
    }
}

/// Conjugate-phase (time-reversal) focusing: `phase_n = (-k d_n) mod 2π`
/// so every element's contribution at the focus shares one complex
/// argument. Amplitudes are the elements' drive amplitudes.
pub fn solve_focus_phases(
    array: &TransducerArray,
    focus: Vec3,
) -> Result<PhasePattern, AcousticsError> {
    let k = array.wavenumber();
    let mut phases = Vec::with_capacity(array.len());
    let mut amplitudes = Vec::with_capacity(array.len());
    for (n, el) in array.elements().iter().enumerate() {
        let d = (focus - el.position()).norm();
        if d < MIN_FOCUS_CLEARANCE_M {
            return Err(AcousticsError::FocusTooClose { element: n });
        }
        phases.push(wrap_phase(-k * d));
        amplitudes.push(el.drive_amplitude());
    }
    PhasePattern::new(phases, amplitudes)
}

/// Superposed complex pressure at each point:
/// `p(r) = Σ_n (a_n / max(d_n, 1 mm)) · D(θ_n) · exp(i (k d_n + φ_n))`.
///
/// Pure and deterministic; the per-point summation order is the element
/// order, so results are identical regardless of how callers partition the
/// point list.
pub fn evaluate_pressure(
    array: &TransducerArray,
    pattern: &PhasePattern,
    points: &[Vec3],
) -> Result<Vec<PressureSample>, AcousticsError> {
    if pattern.len() != array.len() {
        return Err(AcousticsError::PatternMismatch {
            expected: array.len(),
            got: pattern.len(),
        });
    }
    let k = array.wavenumber();
    let mode = array.directivity_mode();
    let mut out = Vec::with_capacity(points.len());
    for &point in points {
        out.push(PressureSample {
            point,
            pressure: pressure_at(array, pattern, k, mode, point),
        });
    }
    Ok(out)
}

fn pressure_at(
    array: &TransducerArray,
    pattern: &PhasePattern,
    k: f64,
    mode: DirectivityMode,
    point: Vec3,
) -> Complex64 {
    let mut p = Complex64::new(0.0, 0.0);
    for (n, el) in array.elements().iter().enumerate() {
        let amp = pattern.amplitudes()[n];
        if amp == 0.0 {
            continue;
        }
        let dir = point - el.position();
        let d = dir.norm();
        let (cos_t, sin_t) = if d == 0.0 {
            (1.0, 0.0)
        } else {
            (
                el.normal().dot(&dir) / d,
                dir.cross(&el.normal()).norm() / d,
            )
        };
        let gain = element_gain(mode, k, el.piston_radius(), cos_t, sin_t);
        let mag = amp / d.max(DISTANCE_FLOOR_M) * gain;
        p += Complex64::from_polar(mag, k * d + pattern.phases()[n]);
    }
    p
}

/// Evaluates pressure over a grid; identical to the point-by-point loop
/// over `grid.points()`.
pub fn evaluate_pressure_grid(
    array: &TransducerArray,
    pattern: &PhasePattern,
    grid: &FieldGrid,
) -> Result<Vec<PressureSample>, AcousticsError> {
    evaluate_pressure(array, pattern, &grid.points())
}

/// `|p(focus)|` under conjugate-phase focusing divided by `|p(focus)|`
/// under the all-zero phase pattern with the same amplitudes.
///
/// The numerator equals the triangle-inequality maximum over phase
/// patterns; the ratio is not guaranteed >= 1 pointwise.
pub fn focal_gain(array: &TransducerArray, focus: Vec3) -> Result<f64, AcousticsError> {
    if array.elements().iter().all(|e| e.drive_amplitude() == 0.0) {
        return Err(AcousticsError::ZeroAmplitude);
    }
    let normal_sum: Vec3 = array.elements().iter().map(|e| e.normal()).sum();
    if normal_sum.norm() < 1e-9 {
        return Err(AcousticsError::InvalidArray(
            "array has no well-defined facing direction".into(),
        ));
    }
    let centroid: Vec3 =
        array.elements().iter().map(|e| e.position()).sum::<Vec3>() / array.len() as f64;
    if (focus - centroid).dot(&normal_sum.normalize()) <= 0.0 {
        return Err(AcousticsError::FocusBehindArray);
    }

    let focused = solve_focus_phases(array, focus)?;
    let zero = PhasePattern::zero_for(array);
    let k = array.wavenumber();
    let mode = array.directivity_mode();
    let num = pressure_at(array, &focused, k, mode, focus).norm();
    let den = pressure_at(array, &zero, k, mode, focus).norm();
    if den == 0.0 {
        return Err(AcousticsError::ZeroAmplitude);
    }
    Ok(num / den)
}
