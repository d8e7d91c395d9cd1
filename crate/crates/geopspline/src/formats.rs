//! Small text formats used by the CLI.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use geopspline_core::detect::BandProbabilityMap;
use geopspline_core::sparse::SparseMatrix;

use crate::FormatError;

/// Reads `lat,lon` rows; a first line that does not parse as numbers is
/// taken as a header. Extra columns are ignored.
pub fn read_locations(path: &Path) -> Result<Vec<(f64, f64)>, FormatError> {
    parse_locations(BufReader::new(fs::File::open(path)?))
}

pub fn parse_locations(reader: impl BufRead) -> Result<Vec<(f64, f64)>, FormatError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 2 {
            return Err(FormatError::ShortRow {
                line: line_no,
                expected: 2,
                found: fields.len(),
            });
        }
        let parsed = (fields[0].parse::<f64>(), fields[1].parse::<f64>());
        match parsed {
            (Ok(lat), Ok(lon)) => {
                if !((-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon)) {
                    return Err(FormatError::CoordinateOutOfRange { lat, lon });
                }
                out.push((lat, lon));
            }
            _ if out.is_empty() && line_no == 1 => continue,
            (Err(_), _) => {
                return Err(FormatError::BadValue {
                    line: line_no,
                    column: 1,
                    text: fields[0].into(),
                })
            }
            (_, Err(_)) => {
                return Err(FormatError::BadValue {
                    line: line_no,
                    column: 2,
                    text: fields[1].into(),
                })
            }
        }
    }
    Ok(out)
}

/// Header `rows cols nnz`, then one `row col value` triple per line.
pub fn write_sparse(out: &mut impl Write, m: &SparseMatrix) -> Result<(), FormatError> {
    writeln!(out, "{} {} {}", m.rows(), m.cols(), m.nnz())?;
    for (r, c, v) in m.triplets() {
        writeln!(out, "{r} {c} {v}")?;
    }
    Ok(())
}

pub fn read_sparse(reader: impl BufRead) -> Result<SparseMatrix, FormatError> {
    let mut lines = reader.lines();
    let head = lines
        .next()
        .ok_or_else(|| FormatError::Header("empty matrix file".into()))??;
    let dims: Vec<usize> = head
        .split_whitespace()
        .map(|t| t.parse())
        .collect::<Result<_, _>>()
        .map_err(|_| FormatError::Header(format!("bad matrix header: {head}")))?;
    let [rows, cols, nnz] = dims[..] else {
        return Err(FormatError::Header(format!("bad matrix header: {head}")));
    };
    let mut trip = Vec::with_capacity(nnz);
    for (i, line) in lines.enumerate() {
        let line = line?;
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.is_empty() {
            continue;
        }
        let bad = |column: usize| FormatError::BadValue {
            line: i + 2,
            column,
            text: line.clone(),
        };
        if t.len() != 3 {
            return Err(FormatError::ShortRow {
                line: i + 2,
                expected: 3,
                found: t.len(),
            });
        }
        let r: usize = t[0].parse().map_err(|_| bad(1))?;
        let c: usize = t[1].parse().map_err(|_| bad(2))?;
        let v: f64 = t[2].parse().map_err(|_| bad(3))?;
        trip.push((r, c, v));
    }
    if trip.len() != nnz {
        return Err(FormatError::MissingRows {
            expected: nnz,
            found: trip.len(),
        });
    }
    Ok(SparseMatrix::from_triplets(rows, cols, trip)?)
}

/// Columns `lon,lat,probability`, meridian by meridian.
pub fn write_band_probability(out: &mut impl Write, map: &BandProbabilityMap) -> Result<(), FormatError> {
    writeln!(out, "lon,lat,probability")?;
    for (m, lon) in map.longitudes.iter().enumerate() {
        for (lat, p) in map.latitudes.iter().zip(map.meridian(m)) {
            writeln!(out, "{lon},{lat},{p}")?;
        }
    }
    Ok(())
}

/// Columns `knot,lat,lon,variance`.
pub fn write_variances(
    out: &mut impl Write,
    coords: &[(f64, f64)],
    variances: &[f64],
) -> Result<(), FormatError> {
    writeln!(out, "knot,lat,lon,variance")?;
    for (k, ((lat, lon), v)) in coords.iter().zip(variances).enumerate() {
        writeln!(out, "{k},{lat},{lon},{v}")?;
    }
    Ok(())
}

/// Columns `lat,lon,value`.
pub fn write_point_values(
    out: &mut impl Write,
    locations: &[(f64, f64)],
    values: &[f64],
) -> Result<(), FormatError> {
    writeln!(out, "lat,lon,value")?;
    for ((lat, lon), v) in locations.iter().zip(values) {
        writeln!(out, "{lat},{lon},{v}")?;
    }
    Ok(())
}
