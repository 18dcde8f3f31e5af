//! Focal-point drive scheduling: AM on/off envelopes, spatio-temporal (STM)
//! path traversal, 4 mm spatial quantization, and the 40 kHz update-rate
//! cap.
//!
//! Timestamps are integer microseconds throughout; 40 kHz gives exactly
//! 25 µs spacing, so long sessions accumulate no float drift.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math::{is_unit, Vec3};

/// Hard cap on the focal-point update rate (Hz).
pub const MAX_UPDATE_RATE_HZ: f64 = 40_000.0;

/// Spacing implied by the rate cap (µs).
pub const MIN_SAMPLE_SPACING_US: u64 = 25;

/// Tactually perceptible modulation band (Hz), inclusive.
pub const PERCEPTIBLE_BAND_HZ: (f64, f64) = (10.0, 400.0);

/// Focal-position quantization step (m).
pub const GRID_QUANTUM_M: f64 = 0.004;

#[derive(Debug, Error)]
pub enum ModulationError {
    #[error("modulation frequency {0} Hz outside [10, 400] Hz")]
    FrequencyOutOfBand(f64),
    #[error("draw frequency {0} Hz outside [10, 400] Hz (pass the band override to allow)")]
    DrawFrequencyOutOfBand(f64),
    #[error("duty {0} outside (0, 1]")]
    DutyOutOfRange(f64),
    #[error("strength {0} outside [0, 1]")]
    StrengthOutOfRange(f64),
    #[error("update rate {0} Hz exceeds the 40 kHz cap")]
    RateCap(f64),
    #[error("update rate {0} Hz must be positive and finite")]
    InvalidRate(f64),
    #[error("duration must be positive")]
    ZeroDuration,
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
}

/// Amplitude modulation: square-wave on/off switching in the perceptible
/// band.
#[derive(Debug, Clone, PartialEq)]
pub struct AmScheme {
    frequency_hz: f64,
    duty: f64,
    strength: f64,
}

impl AmScheme {
    pub fn new(frequency_hz: f64, duty: f64, strength: f64) -> Result<Self, ModulationError> {
        let (lo, hi) = PERCEPTIBLE_BAND_HZ;
        if !frequency_hz.is_finite() || frequency_hz < lo || frequency_hz > hi {
            return Err(ModulationError::FrequencyOutOfBand(frequency_hz));
        }
        if !(duty > 0.0 && duty <= 1.0) {
            return Err(ModulationError::DutyOutOfRange(duty));
        }
        if !(0.0..=1.0).contains(&strength) {
            return Err(ModulationError::StrengthOutOfRange(strength));
        }
        Ok(Self {
            frequency_hz,
            duty,
            strength,
        })
    }

    pub fn frequency_hz(&self) -> f64 {
        self.frequency_hz
    }

    pub fn duty(&self) -> f64 {
        self.duty
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    /// Square-wave envelope at `t` µs from the scheme's start.
    pub fn envelope_at(&self, t_us: u64) -> f64 {
        let cycles = t_us as f64 * self.frequency_hz / 1e6;
        if cycles.fract() < self.duty {
            self.strength
        } else {
            0.0
        }
    }
}

/// Geometric path traced by the focal point, parameterized by arc length.
#[derive(Debug, Clone, PartialEq)]
pub enum Path {
    Point(Vec3),
    LineSegment {
        start: Vec3,
        end: Vec3,
    },
    /// Circle with explicit orthonormal in-plane axes so that rigidly
    /// transformed inputs produce rigidly transformed paths.
    Circle {
        center: Vec3,
        radius: f64,
        axis_u: Vec3,
        axis_v: Vec3,
    },
    Polyline(Vec<Vec3>),
}

impl Path {
    pub fn point(p: Vec3) -> Self {
        Path::Point(p)
    }

    pub fn line(start: Vec3, end: Vec3) -> Result<Self, ModulationError> {
        if start == end {
            return Err(ModulationError::InvalidPath(
                "line endpoints must be distinct".into(),
            ));
        }
        Ok(Path::LineSegment { start, end })
    }

    pub fn circle(
        center: Vec3,
        radius: f64,
        axis_u: Vec3,
        axis_v: Vec3,
    ) -> Result<Self, ModulationError> {
        if !(radius > 0.0) {
            return Err(ModulationError::InvalidPath(format!(
                "circle radius {radius} must be > 0"
            )));
        }
        if !is_unit(axis_u, 1e-6) || !is_unit(axis_v, 1e-6) || axis_u.dot(&axis_v).abs() > 1e-6 {
            return Err(ModulationError::InvalidPath(
                "circle axes must be orthonormal".into(),
            ));
        }
        Ok(Path::Circle {
            center,
            radius,
            axis_u,
            axis_v,
        })
    }

    pub fn polyline(vertices: Vec<Vec3>) -> Result<Self, ModulationError> {
        if vertices.len() < 2 {
            return Err(ModulationError::InvalidPath(
                "polyline needs at least 2 vertices".into(),
            ));
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(ModulationError::InvalidPath(
                "polyline vertices must be pairwise distinct along the path".into(),
            ));
        }
        Ok(Path::Polyline(vertices))
    }

    /// Total arc length of one traversal (m). Zero for a point.
    pub fn length(&self) -> f64 {
        match self {
            Path::Point(_) => 0.0,
            Path::LineSegment { start, end } => (end - start).norm(),
            Path::Circle { radius, .. } => std::f64::consts::TAU * radius,
            Path::Polyline(v) => v.windows(2).map(|w| (w[1] - w[0]).norm()).sum(),
        }
    }

    /// Whether a traversal returns to its start (retrace is ping-pong
    /// otherwise).
    pub fn is_closed(&self) -> bool {
        matches!(self, Path::Circle { .. } | Path::Point(_))
    }

    /// Position at arc-length fraction `s` in `[0, 1]` of one traversal.
    pub fn position_at(&self, s: f64) -> Vec3 {
        match self {
            Path::Point(p) => *p,
            Path::LineSegment { start, end } => start + (end - start) * s,
            Path::Circle {
                center,
                radius,
                axis_u,
                axis_v,
            } => {
                let theta = std::f64::consts::TAU * s;
                center + (axis_u * theta.cos() + axis_v * theta.sin()) * *radius
            }
            Path::Polyline(v) => {
                let total = self.length();
                let target = s * total;
                let mut walked = 0.0;
                for w in v.windows(2) {
                    let seg = (w[1] - w[0]).norm();
                    if walked + seg >= target {
                        let f = if seg > 0.0 {
                            (target - walked) / seg
                        } else {
                            0.0
                        };
                        return w[0] + (w[1] - w[0]) * f;
                    }
                    walked += seg;
                }
                *v.last().expect("polyline has vertices")
            }
        }
    }

    /// Rigidly transformed copy of the path.
    pub fn transformed(&self, t: &crate::math::RigidTransform) -> Self {
        match self {
            Path::Point(p) => Path::Point(t.apply(*p)),
            Path::LineSegment { start, end } => Path::LineSegment {
                start: t.apply(*start),
                end: t.apply(*end),
            },
            Path::Circle {
                center,
                radius,
                axis_u,
                axis_v,
            } => Path::Circle {
                center: t.apply(*center),
                radius: *radius,
                axis_u: t.rotate(*axis_u),
                axis_v: t.rotate(*axis_v),
            },
            Path::Polyline(v) => Path::Polyline(v.iter().map(|p| t.apply(*p)).collect()),
        }
    }
}

/// Spatio-temporal modulation: the focal point traverses a path at a
/// tactually perceptible repetition rate instead of switching off.
#[derive(Debug, Clone, PartialEq)]
pub struct StmScheme {
    path: Path,
    draw_frequency_hz: f64,
    strength: f64,
}

impl StmScheme {
    /// Draw frequency is held to the perceptible band [10, 400] Hz.
    pub fn new(path: Path, draw_frequency_hz: f64, strength: f64) -> Result<Self, ModulationError> {
        let (lo, hi) = PERCEPTIBLE_BAND_HZ;
        if !draw_frequency_hz.is_finite() || draw_frequency_hz < lo || draw_frequency_hz > hi {
            return Err(ModulationError::DrawFrequencyOutOfBand(draw_frequency_hz));
        }
        Self::with_band_override(path, draw_frequency_hz, strength)
    }

    /// Skips the perceptibility-band check (experimental draw rates).
    pub fn with_band_override(
        path: Path,
        draw_frequency_hz: f64,
        strength: f64,
    ) -> Result<Self, ModulationError> {
        if !(draw_frequency_hz > 0.0) || !draw_frequency_hz.is_finite() {
            return Err(ModulationError::DrawFrequencyOutOfBand(draw_frequency_hz));
        }
        if !(0.0..=1.0).contains(&strength) {
            return Err(ModulationError::StrengthOutOfRange(strength));
        }
        Ok(Self {
            path,
            draw_frequency_hz,
            strength,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn draw_frequency_hz(&self) -> f64 {
        self.draw_frequency_hz
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    /// Focal position at `t` µs from the scheme's start: constant-speed
    /// arc-length traversal, looping for closed paths and ping-pong
    /// retracing for open ones.
    pub fn position_at(&self, t_us: u64) -> Vec3 {
        let traversals = t_us as f64 * self.draw_frequency_hz / 1e6;
        let s = if self.path.is_closed() {
            traversals.fract()
        } else {
            let n = traversals.floor();
            let frac = traversals - n;
            if (n as u64).is_multiple_of(2) {
                frac
            } else {
                1.0 - frac
            }
        };
        self.path.position_at(s)
    }
}

/// One timestamped device drive sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocalSample {
    pub t_us: u64,
    pub position: Vec3,
    pub envelope: f64,
}

/// JSON-lines wire form of a [`FocalSample`] (positions in mm).
#[derive(Debug, Serialize, Deserialize)]
struct SampleLine {
    t_us: u64,
    x_mm: f64,
    y_mm: f64,
    z_mm: f64,
    envelope: f64,
}

/// A fixed-rate sequence of focal samples with exact integer spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    samples: Vec<FocalSample>,
    update_rate_hz: f64,
    spacing_us: u64,
}

impl Schedule {
    pub fn new(samples: Vec<FocalSample>, update_rate_hz: f64) -> Result<Self, ModulationError> {
        let spacing_us = validated_spacing(update_rate_hz)?;
        for pair in samples.windows(2) {
            if pair[1].t_us != pair[0].t_us + spacing_us {
                return Err(ModulationError::InvalidSchedule(format!(
                    "samples at {} and {} µs are not spaced exactly {} µs",
                    pair[0].t_us, pair[1].t_us, spacing_us
                )));
            }
        }
        if let Some(s) = samples.iter().find(|s| !(0.0..=1.0).contains(&s.envelope)) {
            return Err(ModulationError::InvalidSchedule(format!(
                "envelope {} at t={} µs outside [0,1]",
                s.envelope, s.t_us
            )));
        }
        Ok(Self {
            samples,
            update_rate_hz,
            spacing_us,
        })
    }

    pub fn samples(&self) -> &[FocalSample] {
        &self.samples
    }

    pub fn update_rate_hz(&self) -> f64 {
        self.update_rate_hz
    }

    pub fn spacing_us(&self) -> u64 {
        self.spacing_us
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean of `envelope²` over all samples; 0 for an empty schedule.
    pub fn mean_square_envelope(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples
            .iter()
            .map(|s| s.envelope * s.envelope)
            .sum::<f64>()
            / self.samples.len() as f64
    }

    /// One JSON object per sample: `t_us, x_mm, y_mm, z_mm, envelope`.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for s in &self.samples {
            let line = SampleLine {
                t_us: s.t_us,
                x_mm: s.position.x * 1000.0,
                y_mm: s.position.y * 1000.0,
                z_mm: s.position.z * 1000.0,
                envelope: s.envelope,
            };
            out.push_str(&serde_json::to_string(&line).expect("sample serializes"));
            out.push('\n');
        }
        out
    }

    /// Parses the JSON-lines form produced by [`Schedule::to_jsonl`].
    pub fn from_jsonl(text: &str, update_rate_hz: f64) -> Result<Self, ModulationError> {
        let mut samples = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parsed: SampleLine = serde_json::from_str(line)
                .map_err(|e| ModulationError::InvalidSchedule(format!("line {}: {e}", i + 1)))?;
            samples.push(FocalSample {
                t_us: parsed.t_us,
                position: Vec3::new(
                    parsed.x_mm / 1000.0,
                    parsed.y_mm / 1000.0,
                    parsed.z_mm / 1000.0,
                ),
                envelope: parsed.envelope,
            });
        }
        Self::new(samples, update_rate_hz)
    }
}

fn validated_spacing(update_rate_hz: f64) -> Result<u64, ModulationError> {
    if !(update_rate_hz > 0.0) || !update_rate_hz.is_finite() {
        return Err(ModulationError::InvalidRate(update_rate_hz));
    }
    if update_rate_hz > MAX_UPDATE_RATE_HZ {
        return Err(ModulationError::RateCap(update_rate_hz));
    }
    Ok((1e6 / update_rate_hz).round() as u64)
}

fn sample_count(duration_us: u64, update_rate_hz: f64) -> Result<usize, ModulationError> {
    if duration_us == 0 {
        return Err(ModulationError::ZeroDuration);
    }
    Ok((duration_us as f64 * update_rate_hz / 1e6).floor() as usize)
}

/// Expands an AM scheme at a fixed position into a schedule:
/// `envelope(t) = strength` while `frac(t f) < duty`, else 0;
/// `floor(duration · rate / 1e6)` samples.
pub fn am_envelope(
    scheme: &AmScheme,
    position: Vec3,
    duration_us: u64,
    update_rate_hz: f64,
) -> Result<Schedule, ModulationError> {
    let spacing = validated_spacing(update_rate_hz)?;
    let count = sample_count(duration_us, update_rate_hz)?;
    let samples = (0..count)
        .map(|i| {
            let t_us = i as u64 * spacing;
            FocalSample {
                t_us,
                position,
                envelope: scheme.envelope_at(t_us),
            }
        })
        .collect();
    Schedule::new(samples, update_rate_hz)
}

/// Expands an STM scheme into a schedule: constant-speed arc-length
/// traversal completing `draw_frequency` traversals per second, with a
/// constant envelope equal to the scheme strength.
pub fn stm_schedule(
    scheme: &StmScheme,
    duration_us: u64,
    update_rate_hz: f64,
) -> Result<Schedule, ModulationError> {
    let spacing = validated_spacing(update_rate_hz)?;
    let count = sample_count(duration_us, update_rate_hz)?;
    let samples = (0..count)
        .map(|i| {
            let t_us = i as u64 * spacing;
            FocalSample {
                t_us,
                position: scheme.position_at(t_us),
                envelope: scheme.strength(),
            }
        })
        .collect();
    Schedule::new(samples, update_rate_hz)
}

/// Rounds each coordinate to the nearest 4 mm lattice point; exact midpoint
/// ties round away from zero. Idempotent.
pub fn snap_to_grid(position: Vec3) -> Vec3 {
    Vec3::new(
        snap_coord(position.x),
        snap_coord(position.y),
        snap_coord(position.z),
    )
}

/// Snapped coordinates as integer millimeters (always multiples of 4).
pub fn snap_to_grid_mm(position: Vec3) -> [i64; 3] {
    [
        snap_index(position.x) * 4,
        snap_index(position.y) * 4,
        snap_index(position.z) * 4,
    ]
}

fn snap_index(x: f64) -> i64 {
    // f64::round ties away from zero, matching the quantization rule.
    (x / GRID_QUANTUM_M).round() as i64
}

fn snap_coord(x: f64) -> f64 {
    (x / GRID_QUANTUM_M).round() * GRID_QUANTUM_M
}
