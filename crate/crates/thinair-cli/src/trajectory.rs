//! Hand-trajectory CSV: one pose per row in meters and integer
//! microseconds.
//!
//! Header (25 columns): `t_us`, palm center x/y/z, palm normal x/y/z,
//! lateral axis x/y/z, then thumb/index/middle/ring/little tip x/y/z.
//! Unit vectors within 1e-3 of unit length are renormalized (and the
//! lateral axis re-orthogonalized against the normal); anything further
//! off is rejected with the row number.

use std::io::Read;

use thinair::interaction::HandPose;
use thinair::math::Vec3;
use thinair::sensations::HandRegion;
use thiserror::Error;

pub const TRAJECTORY_COLUMNS: [&str; 25] = [
    "t_us",
    "palm_x",
    "palm_y",
    "palm_z",
    "palm_normal_x",
    "palm_normal_y",
    "palm_normal_z",
    "lateral_x",
    "lateral_y",
    "lateral_z",
    "thumb_x",
    "thumb_y",
    "thumb_z",
    "index_x",
    "index_y",
    "index_z",
    "middle_x",
    "middle_y",
    "middle_z",
    "ring_x",
    "ring_y",
    "ring_z",
    "little_x",
    "little_y",
    "little_z",
];

/// Unit-length slack accepted before a vector is rejected.
pub const UNIT_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum TrajectoryError {
    #[error("failed to read trajectory: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("bad header: expected the 25 documented columns, got {0:?}")]
    BadHeader(Vec<String>),
    #[error("{reason} at row {row}")]
    Row { row: usize, reason: String },
}

fn row_err(row: usize, reason: impl Into<String>) -> TrajectoryError {
    TrajectoryError::Row {
        row,
        reason: reason.into(),
    }
}

/// Parses and validates a trajectory stream. Row numbers in errors count
/// the header as row 1.
pub fn parse_hand_trajectory<R: Read>(reader: R) -> Result<Vec<HandPose>, TrajectoryError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if headers != TRAJECTORY_COLUMNS {
        return Err(TrajectoryError::BadHeader(headers));
    }

    let mut poses: Vec<HandPose> = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2; // header is row 1
        let record = record?;
        if record.len() != TRAJECTORY_COLUMNS.len() {
            return Err(row_err(
                row,
                format!("expected 25 fields, got {}", record.len()),
            ));
        }
        let field = |idx: usize| -> Result<f64, TrajectoryError> {
            record[idx]
                .parse::<f64>()
                .map_err(|_| row_err(row, format!("malformed number \"{}\"", &record[idx])))
        };
        let vec_at = |idx: usize| -> Result<Vec3, TrajectoryError> {
            Ok(Vec3::new(field(idx)?, field(idx + 1)?, field(idx + 2)?))
        };

        let t_us = record[0]
            .parse::<u64>()
            .map_err(|_| row_err(row, format!("malformed timestamp \"{}\"", &record[0])))?;
        if let Some(prev) = poses.last() {
            if t_us <= prev.t_us() {
                return Err(row_err(row, "non-increasing timestamp"));
            }
        }

        let palm_center = vec_at(1)?;
        let palm_normal = renormalize(vec_at(4)?, "palm normal", row)?;
        let lateral_raw = renormalize(vec_at(7)?, "lateral axis", row)?;
        let lateral_axis = orthogonalize(lateral_raw, palm_normal, row)?;

        let pose = HandPose::new(
            t_us,
            palm_center,
            palm_normal,
            lateral_axis,
            vec_at(10)?,
            vec_at(13)?,
            vec_at(16)?,
            vec_at(19)?,
            vec_at(22)?,
        )
        .map_err(|e| row_err(row, e.to_string()))?;
        poses.push(pose);
    }
    Ok(poses)
}

fn renormalize(v: Vec3, what: &str, row: usize) -> Result<Vec3, TrajectoryError> {
    let n = v.norm();
    if (n - 1.0).abs() > UNIT_TOLERANCE {
        return Err(row_err(
            row,
            format!("{what} has length {n}, outside 1 ± {UNIT_TOLERANCE}"),
        ));
    }
    Ok(v / n)
}

fn orthogonalize(lateral: Vec3, normal: Vec3, row: usize) -> Result<Vec3, TrajectoryError> {
    let dot = lateral.dot(&normal);
    if dot.abs() > UNIT_TOLERANCE {
        return Err(row_err(
            row,
            format!("lateral axis is not orthogonal to the palm normal (dot = {dot})"),
        ));
    }
    Ok((lateral - normal * dot).normalize())
}

/// Serializes poses back to the documented CSV form (used to generate the
/// bundled demo trajectory).
pub fn write_hand_trajectory(poses: &[HandPose]) -> String {
    let mut out = String::new();
    out.push_str(&TRAJECTORY_COLUMNS.join(","));
    out.push('\n');
    for p in poses {
        let mut fields: Vec<String> = vec![p.t_us().to_string()];
        let push_vec = |v: Vec3, fields: &mut Vec<String>| {
            fields.push(format!("{}", v.x));
            fields.push(format!("{}", v.y));
            fields.push(format!("{}", v.z));
        };
        push_vec(p.palm_center(), &mut fields);
        push_vec(p.palm_normal(), &mut fields);
        push_vec(p.lateral_axis(), &mut fields);
        for region in [
            HandRegion::ThumbTip,
            HandRegion::IndexTip,
            HandRegion::MiddleTip,
            HandRegion::RingTip,
            HandRegion::LittleTip,
        ] {
            push_vec(p.landmark(region), &mut fields);
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_row_csv() -> String {
        let poses = vec![
            HandPose::canonical(0),
            HandPose::canonical(0).at_time(11_111),
        ];
        write_hand_trajectory(&poses)
    }

    #[test]
    fn parses_valid_file() {
        let poses = parse_hand_trajectory(two_row_csv().as_bytes()).unwrap();
        assert_eq!(poses.len(), 2);
        assert_eq!(poses[1].t_us(), 11_111);
    }

    #[test]
    fn round_trips_through_serialization() {
        let poses = thinair::interaction::demo_trajectory(500_000, 90.0);
        let text = write_hand_trajectory(&poses);
        let back = parse_hand_trajectory(text.as_bytes()).unwrap();
        assert_eq!(poses.len(), back.len());
        for (a, b) in poses.iter().zip(&back) {
            assert_eq!(a.t_us(), b.t_us());
            assert!((a.palm_center() - b.palm_center()).norm() < 1e-12);
            assert!(
                (a.landmark(HandRegion::IndexTip) - b.landmark(HandRegion::IndexTip)).norm()
                    < 1e-12
            );
        }
    }

    #[test]
    fn rejects_non_increasing_timestamps() {
        let mut text = two_row_csv();
        // Duplicate the second data row so rows 3 and 4 share a timestamp.
        let row: String = text.lines().nth(2).unwrap().to_string();
        text.push_str(&row);
        text.push('\n');
        let err = parse_hand_trajectory(text.as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "non-increasing timestamp at row 4");

        // And equal first/second timestamps report row 3.
        let bad = two_row_csv().replace("\n11111,", "\n0,");
        let err = parse_hand_trajectory(bad.as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "non-increasing timestamp at row 3");
    }

    #[test]
    fn renormalizes_slightly_off_unit_vectors() {
        let text = two_row_csv().replace(",0,0,-1,", ",0,0,-0.9995,");
        let poses = parse_hand_trajectory(text.as_bytes()).unwrap();
        assert!((poses[0].palm_normal().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_badly_scaled_vectors() {
        let text = two_row_csv().replace(",0,0,-1,", ",0,0,-0.9,");
        let err = parse_hand_trajectory(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("palm normal"));
        assert!(err.to_string().contains("row 2"));
    }

    #[test]
    fn rejects_wrong_header() {
        let err = parse_hand_trajectory("a,b,c\n1,2,3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, TrajectoryError::BadHeader(_)));
    }

    #[test]
    fn rejects_malformed_numbers() {
        let text = two_row_csv().replace("11111", "soon");
        let err = parse_hand_trajectory(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("row 3"));
    }
}
