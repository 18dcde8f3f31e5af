//! Field-map serialization: CSV with fixed 9-significant-digit formatting,
//! or an 8-bit binary PGM normalized to the grid maximum.

use thinair::acoustics::{FieldGrid, PressureSample};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldMapError {
    #[error("no samples to write")]
    Empty,
    #[error("PGM output needs a 2-axis grid (got {0} axes)")]
    NotPlanar(usize),
    #[error("sample count {got} does not match the grid ({expected})")]
    CountMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldMapFormat {
    Csv,
    Pgm,
}

/// `x,y,z,re,im,abs` rows, 9 significant digits, deterministic bytes.
pub fn write_field_csv(samples: &[PressureSample]) -> Result<Vec<u8>, FieldMapError> {
    if samples.is_empty() {
        return Err(FieldMapError::Empty);
    }
    let mut out = String::from("x,y,z,re,im,abs\n");
    for s in samples {
        out.push_str(&format!(
            "{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e}\n",
            s.point.x,
            s.point.y,
            s.point.z,
            s.pressure.re,
            s.pressure.im,
            s.magnitude()
        ));
    }
    Ok(out.into_bytes())
}

/// Binary 8-bit PGM of |pressure|, normalized so the grid maximum maps to
/// 255 (all-zero fields stay black). Rows follow the grid's second axis.
pub fn write_field_pgm(
    samples: &[PressureSample],
    grid: &FieldGrid,
) -> Result<Vec<u8>, FieldMapError> {
    if samples.is_empty() {
        return Err(FieldMapError::Empty);
    }
    if grid.axes().len() != 2 {
        return Err(FieldMapError::NotPlanar(grid.axes().len()));
    }
    if samples.len() != grid.num_points() {
        return Err(FieldMapError::CountMismatch {
            expected: grid.num_points(),
            got: samples.len(),
        });
    }
    let max = samples
        .iter()
        .map(PressureSample::magnitude)
        .fold(0.0_f64, f64::max);
    let (w, h) = (grid.counts()[0], grid.counts()[1]);
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    for s in samples {
        let v = if max > 0.0 {
            (s.magnitude() / max * 255.0).round() as u8
        } else {
            0
        };
        out.push(v);
    }
    Ok(out)
}
