//! Text formats used by the command-line tools: correspondence files,
//! result tables, and metadata sidecars.
//!
//! Coordinates are serialized with 17 significant decimal digits, so a
//! write followed by a parse reproduces every value bit for bit. All
//! writers emit LF line endings and a fixed column order, which is what
//! makes repeated runs byte-identical.

use crate::experiments::{ShiftCell, SweepRow};
use crate::geometry::{Correspondence, NormalizedPoint};
use crate::synthetic::ScenePoint;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// First line of a correspondence file.
pub const CORRESPONDENCE_HEADER: &str = "x,y,x_prime,y_prime";
/// First line of an estimator comparison table.
pub const SWEEP_TABLE_HEADER: &str = "parameter,method,mae_deg,failures,trials";
/// First line of a shift sensitivity table.
pub const SHIFT_TABLE_HEADER: &str = "dx_px,dy_px,angle_deg,delta_deg";
/// First line of a conditioning map table.
pub const CONDITIONING_TABLE_HEADER: &str = "x,y,z,mean_error_deg";

#[derive(Debug, Error)]
pub enum IoError {
    /// Line numbers are 1-based and count the header line.
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("no data rows")]
    EmptyFile,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A parsed correspondence file: the path it came from and its rows in
/// file order. Data row k (0-based) sits on file line k + 2.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrespondenceFile {
    pub path: PathBuf,
    pub pairs: Vec<Correspondence>,
}

/// Reads a correspondence file. Blank lines are skipped but still counted,
/// so reported line numbers always match the file.
pub fn parse_correspondences(path: impl AsRef<Path>) -> Result<CorrespondenceFile, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header.trim() == CORRESPONDENCE_HEADER => {}
        _ => {
            return Err(IoError::Malformed {
                line: 1,
                reason: format!("expected header '{CORRESPONDENCE_HEADER}'"),
            })
        }
    }
    let mut pairs = Vec::new();
    for (index, line) in lines.enumerate() {
        let line_number = index + 2;
        if line.trim().is_empty() {
            continue;
        }
        pairs.push(parse_row(line, line_number)?);
    }
    if pairs.is_empty() {
        return Err(IoError::EmptyFile);
    }
    Ok(CorrespondenceFile {
        path: path.to_path_buf(),
        pairs,
    })
}

fn parse_row(line: &str, line_number: usize) -> Result<Correspondence, IoError> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 4 {
        return Err(IoError::Malformed {
            line: line_number,
            reason: format!("expected 4 comma-separated fields, found {}", fields.len()),
        });
    }
    let mut values = [0.0f64; 4];
    for (value, field) in values.iter_mut().zip(&fields) {
        let text = field.trim();
        *value = text.parse().map_err(|_| IoError::Malformed {
            line: line_number,
            reason: format!("field '{text}' is not a number"),
        })?;
        if !value.is_finite() {
            return Err(IoError::Malformed {
                line: line_number,
                reason: format!("field '{text}' is not finite"),
            });
        }
    }
    Ok(Correspondence::new(
        NormalizedPoint::new(values[0], values[1]),
        NormalizedPoint::new(values[2], values[3]),
    ))
}

/// Serializes correspondences in the format parse_correspondences reads.
pub fn correspondences_to_string(pairs: &[Correspondence]) -> String {
    let mut out = String::with_capacity(32 + 96 * pairs.len());
    out.push_str(CORRESPONDENCE_HEADER);
    out.push('\n');
    for pair in pairs {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            pair.first.x, pair.first.y, pair.second.x, pair.second.y
        )
        .expect("string write cannot fail");
    }
    out
}

pub fn write_correspondences(path: impl AsRef<Path>, pairs: &[Correspondence]) -> Result<(), IoError> {
    fs::write(path, correspondences_to_string(pairs))?;
    Ok(())
}

/// Serializes sweep rows under the pinned table header. Mean errors carry
/// 6 decimals, matching the angle reporting precision; a row whose trials
/// all failed prints NaN.
pub fn sweep_table_to_string(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(32 + 48 * rows.len());
    out.push_str(SWEEP_TABLE_HEADER);
    out.push('\n');
    for row in rows {
        writeln!(
            out,
            "{},{},{:.6},{},{}",
            row.parameter_value, row.method, row.mean_absolute_error, row.failure_count, row.trials
        )
        .expect("string write cannot fail");
    }
    out
}

pub fn write_sweep_table(path: impl AsRef<Path>, rows: &[SweepRow]) -> Result<(), IoError> {
    fs::write(path, sweep_table_to_string(rows))?;
    Ok(())
}

/// Serializes shift cells; degenerate cells leave the angle columns empty.
pub fn shift_table_to_string(cells: &[ShiftCell]) -> String {
    let mut out = String::with_capacity(32 + 40 * cells.len());
    out.push_str(SHIFT_TABLE_HEADER);
    out.push('\n');
    for cell in cells {
        match (cell.angle, cell.delta_deg) {
            (Some(angle), Some(delta)) => writeln!(
                out,
                "{},{},{:.6},{:.6}",
                cell.dx_px,
                cell.dy_px,
                angle.degrees(),
                delta
            ),
            _ => writeln!(out, "{},{},,", cell.dx_px, cell.dy_px),
        }
        .expect("string write cannot fail");
    }
    out
}

pub fn write_shift_table(path: impl AsRef<Path>, cells: &[ShiftCell]) -> Result<(), IoError> {
    fs::write(path, shift_table_to_string(cells))?;
    Ok(())
}

/// Serializes retained conditioning-map points with their mean errors.
pub fn conditioning_table_to_string(retained: &[(ScenePoint, f64)]) -> String {
    let mut out = String::with_capacity(32 + 40 * retained.len());
    out.push_str(CONDITIONING_TABLE_HEADER);
    out.push('\n');
    for (point, error) in retained {
        writeln!(
            out,
            "{},{},{},{:.6}",
            point.position.x, point.position.y, point.position.z, error
        )
        .expect("string write cannot fail");
    }
    out
}

pub fn write_conditioning_table(
    path: impl AsRef<Path>,
    retained: &[(ScenePoint, f64)],
) -> Result<(), IoError> {
    fs::write(path, conditioning_table_to_string(retained))?;
    Ok(())
}

/// Serializes a metadata sidecar: one key=value per line, in the order
/// given. Callers echo their full configuration here.
pub fn sidecar_to_string(entries: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (key, value) in entries {
        writeln!(out, "{key}={value}").expect("string write cannot fail");
    }
    out
}

pub fn write_sidecar(path: impl AsRef<Path>, entries: &[(&str, String)]) -> Result<(), IoError> {
    fs::write(path, sidecar_to_string(entries))?;
    Ok(())
}
